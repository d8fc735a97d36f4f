//! Two-step nilpotent metric Lie algebras, their nilmanifolds, and the
//! geodesic-flow machinery for one isospectral pair of 8-dimensional
//! nilmanifolds with different integrability behaviour.
//!
//! Exact statements (brackets, lattices, spectra, certificates) are checked
//! over [`scalar::Q`]. Dynamics run in `f64`.
#![no_std]

extern crate alloc;

pub mod algebra;
pub mod catalog;
pub mod certificate;
pub mod criteria;
pub mod error;
pub mod flow;
pub mod integrals;
pub mod lattice;
pub mod linalg;
pub mod periodicity;
pub mod sampling;
pub mod scalar;
pub mod spectral;
pub mod tolerances;

pub use algebra::{AlgebraData, GroupElement};
pub use catalog::{Manifold, NilmanifoldData, Which};
pub use certificate::{Certificate, CheckRecord};
pub use error::{Error, Result};
pub use flow::TangentState;
pub use lattice::{Lattice, RationalLattice};
pub use scalar::{Scalar, Q};
pub use tolerances::Tolerances;
