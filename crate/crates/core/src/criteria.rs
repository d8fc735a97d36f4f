//! Integrability and nonintegrability criteria: injective HR presentations,
//! the centralizer condition on pairs of covectors, and the clean-intersection
//! eigenvalue test.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::algebra::AlgebraData;
use crate::catalog::NilmanifoldData;
use crate::certificate::{Certificate, Evidence};
use crate::error::{Error, Result};
use crate::linalg::{project_onto_span, span_basis, span_rank, Matrix};
use crate::sampling::{random_rational, rng_for};
use crate::scalar::{q_frac, q_int, Q};
use crate::spectral::{char_poly, expected_pair_char_poly, CharPoly};

/// A splitting `v = x ⊕ y` and a candidate central functional `c` (as a z-vector).
#[derive(Clone, Debug, PartialEq)]
pub struct PresentationSplit {
    pub x_basis: Vec<Vec<Q>>,
    pub y_basis: Vec<Vec<Q>>,
    pub candidate_c: Vec<Q>,
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut e = vec![q_int(0); n];
    e[i] = q_int(1);
    e
}

impl PresentationSplit {
    /// Checks `x ⊕ y = v` exactly.
    pub fn new(
        alg: &AlgebraData,
        x_basis: Vec<Vec<Q>>,
        y_basis: Vec<Vec<Q>>,
        candidate_c: Vec<Q>,
    ) -> Result<Self> {
        let dv = alg.dim_v();
        if candidate_c.len() != alg.dim_z() {
            return Err(Error::DimensionMismatch {
                expected: alg.dim_z(),
                got: candidate_c.len(),
            });
        }
        let mut all = x_basis.clone();
        all.extend(y_basis.iter().cloned());
        if let Some(bad) = all.iter().find(|b| b.len() != dv) {
            return Err(Error::DimensionMismatch {
                expected: dv,
                got: bad.len(),
            });
        }
        if all.len() != dv || span_rank(&all, dv) != dv {
            return Err(Error::DependentBasis);
        }
        Ok(PresentationSplit {
            x_basis,
            y_basis,
            candidate_c,
        })
    }

    /// `x` spanned by the first `nx` basis vectors, `y` by the rest, `c = e_r`.
    pub fn coordinate(alg: &AlgebraData, nx: usize, c_index: usize) -> Result<Self> {
        let dv = alg.dim_v();
        if nx > dv || c_index >= alg.dim_z() {
            return Err(Error::Unsupported(format!(
                "split {nx} of {dv}, functional {c_index}"
            )));
        }
        Self::new(
            alg,
            (0..nx).map(|i| unit(dv, i)).collect(),
            (nx..dv).map(|i| unit(dv, i)).collect(),
            unit(alg.dim_z(), c_index),
        )
    }
}

fn fmt_vec(x: &[Q]) -> String {
    let parts: Vec<String> = x.iter().map(|q| format!("{q}")).collect();
    format!("({})", parts.join(", "))
}

fn first_nonabelian(alg: &AlgebraData, basis: &[Vec<Q>]) -> Option<String> {
    for p in 0..basis.len() {
        for q in p + 1..basis.len() {
            let b = alg.bracket_v(&basis[p], &basis[q]);
            if b.iter().any(|x| !x.is_zero()) {
                return Some(format!(
                    "[{}, {}] = {}",
                    fmt_vec(&basis[p]),
                    fmt_vec(&basis[q]),
                    fmt_vec(&b)
                ));
            }
        }
    }
    None
}

/// Exact check of an injective HR presentation.
pub fn check_hr_presentation(alg: &AlgebraData, split: &PresentationSplit) -> Certificate {
    let mut cert = Certificate::new("hr_presentation");
    for (name, basis) in [("x_abelian", &split.x_basis), ("y_abelian", &split.y_basis)] {
        let w = first_nonabelian(alg, basis);
        let detail = match &w {
            None => format!(
                "all {} brackets vanish",
                basis.len() * basis.len().saturating_sub(1) / 2
            ),
            Some(_) => "nonzero bracket".into(),
        };
        cert.record(name, w.is_none(), Evidence::Exact, detail, w);
    }
    // Row a: X_a ↦ (⟨c, [X_a, y_b]⟩)_b.
    let rows: Vec<Vec<Q>> = split
        .x_basis
        .iter()
        .map(|x| {
            split
                .y_basis
                .iter()
                .map(|y| crate::scalar::dot(&split.candidate_c, &alg.bracket_v(x, y)))
                .collect()
        })
        .collect();
    let nx = rows.len();
    let rank = if nx == 0 || split.y_basis.is_empty() {
        0
    } else {
        Matrix::from_rows(&rows).rank()
    };
    let ok = rank == nx;
    let witness = if ok {
        None
    } else {
        Matrix::from_rows(&rows)
            .transpose()
            .nullspace()
            .first()
            .map(|k| {
                let x: Vec<Q> = (0..alg.dim_v())
                    .map(|i| k.iter().zip(&split.x_basis).map(|(a, b)| a * &b[i]).sum())
                    .collect();
                format!("c([X, y]) = 0 for X = {}", fmt_vec(&x))
            })
    };
    cert.record(
        "injective",
        ok,
        Evidence::Exact,
        format!("rank {rank} of {nx}"),
        witness,
    );
    cert
}

/// Basis of `n_λ = {X : λ([X, n]) = 0}` for `λ = ⟨V + Z, ·⟩`: `ker j(Z) ⊕ z`.
/// Vectors are full algebra vectors (v-part first).
pub fn centralizer_nlambda(alg: &AlgebraData, v: &[Q], z: &[Q]) -> Result<Vec<Vec<Q>>> {
    let (dv, dz) = (alg.dim_v(), alg.dim_z());
    if v.len() != dv {
        return Err(Error::DimensionMismatch {
            expected: dv,
            got: v.len(),
        });
    }
    let mut out: Vec<Vec<Q>> = alg
        .j_matrix(z)?
        .nullspace()
        .into_iter()
        .map(|mut k| {
            k.extend(vec![q_int(0); dz]);
            k
        })
        .collect();
    out.extend((0..dz).map(|r| unit(dv + dz, dv + r)));
    Ok(out)
}

fn bracket_span_dim(alg: &AlgebraData, a: &[Vec<Q>], b: &[Vec<Q>]) -> usize {
    let dv = alg.dim_v();
    let mut br = Vec::new();
    for x in a {
        for y in b {
            let w = alg.bracket_v(&x[..dv], &y[..dv]);
            if w.iter().any(|q| !q.is_zero()) {
                br.push(w);
            }
        }
    }
    span_rank(&br, alg.dim_z())
}

/// Result of [`butler_nonintegrability_sample`].
#[derive(Clone, Debug, PartialEq)]
pub struct ButlerSample {
    pub certificate: Certificate,
    /// Empirical minimal dimension of `n_λ`.
    pub regular_dim: usize,
    pub satisfied: usize,
    pub total: usize,
    pub fraction: f64,
}

fn random_covector<R: rand::Rng>(rng: &mut R, alg: &AlgebraData) -> (Vec<Q>, Vec<Q>) {
    loop {
        let v: Vec<Q> = (0..alg.dim_v())
            .map(|_| random_rational(rng, 60, 30))
            .collect();
        let z: Vec<Q> = (0..alg.dim_z())
            .map(|_| random_rational(rng, 60, 30))
            .collect();
        if !z[alg.dim_z() - 1].is_zero() {
            return (v, z);
        }
    }
}

/// Sampled evidence for the condition: for regular `λ, μ` the bracket
/// `[n_λ, n_μ]` has positive dimension.
pub fn butler_nonintegrability_sample(
    alg: &AlgebraData,
    n_samples: usize,
    seed: u64,
) -> Result<ButlerSample> {
    let mut reg = rng_for(seed, "criteria.butler.regular");
    let mut regular_dim = alg.dim();
    for _ in 0..64 {
        let (v, z) = random_covector(&mut reg, alg);
        regular_dim = regular_dim.min(centralizer_nlambda(alg, &v, &z)?.len());
    }
    let mut rng = rng_for(seed, "criteria.butler");
    let mut satisfied = 0usize;
    let mut witnesses = Vec::new();
    for i in 0..n_samples {
        let (v1, z1) = random_covector(&mut rng, alg);
        let (v2, z2) = random_covector(&mut rng, alg);
        let a = centralizer_nlambda(alg, &v1, &z1)?;
        let b = centralizer_nlambda(alg, &v2, &z2)?;
        let regular = a.len() == regular_dim && b.len() == regular_dim;
        let d = bracket_span_dim(alg, &a, &b);
        if regular && d >= 1 {
            satisfied += 1;
        } else if witnesses.len() < 3 {
            witnesses.push(format!(
                "sample {i}: Z = {}, Z~ = {}, dims ({}, {}), dim [n_l, n_m] = {d}",
                fmt_vec(&z1),
                fmt_vec(&z2),
                a.len(),
                b.len()
            ));
        }
    }
    let fraction = if n_samples == 0 {
        0.0
    } else {
        satisfied as f64 / n_samples as f64
    };
    let mut certificate = Certificate::new("butler_nonintegrability");
    certificate.record(
        "regular_dimension",
        true,
        Evidence::Sampled,
        format!("minimal dim n_lambda over 64 samples = {regular_dim}"),
        None,
    );
    certificate.record(
        "bracket_positive_dimension",
        fraction >= 0.999,
        Evidence::Sampled,
        format!("{satisfied}/{n_samples} regular pairs with dim [n_lambda, n_mu] >= 1 (fraction {fraction})"),
        if witnesses.is_empty() { None } else { Some(witnesses.join("; ")) },
    );
    Ok(ButlerSample {
        certificate,
        regular_dim,
        satisfied,
        total: n_samples,
        fraction,
    })
}

/// Result of [`cih_certificate`].
#[derive(Clone, Debug, PartialEq)]
pub struct CihReport {
    pub certificate: Certificate,
    /// Number of `V + Z ∈ log Γ` enumerated.
    pub enumerated: u64,
    /// Distinct projected vectors `Z_V^⊥` with a witness `V + Z` and the
    /// nonzero eigenvalues of `−j(Z_V^⊥)²` (with multiplicity).
    pub distinct: Vec<CihEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CihEntry {
    pub witness_v: Vec<Q>,
    pub witness_z: Vec<Q>,
    pub proj_z: Vec<Q>,
    pub eigenvalues: Vec<Q>,
}

fn int_box(dim: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * (hi - lo + 1) as usize);
        for p in &out {
            for k in lo..=hi {
                let mut q = p.clone();
                q.push(k);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// `∏ (λ − r)` for the given roots, as a descending coefficient list.
fn poly_from_roots(roots: &[Q]) -> CharPoly {
    let mut coeffs = vec![q_int(1)];
    for r in roots {
        let mut next = vec![q_int(0); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        coeffs = next;
    }
    CharPoly { coeffs }
}

/// Clean-intersection eigenvalue test over all `V + Z ∈ log Γ` with integer
/// `|v_p| ≤ bound` and half-integer `|z_r| ≤ bound`.
///
/// The projection of `Z` depends on `V` only through the subspace `[V, n]`,
/// so the enumeration groups `V` by that subspace and certifies each distinct
/// projected vector once.
pub fn cih_certificate(data: &NilmanifoldData<Q>, bound: i64) -> Result<CihReport> {
    if bound < 1 {
        return Err(Error::Unsupported(format!("coordinate bound {bound} < 1")));
    }
    let alg = &data.alg;
    let (dv, dz) = (alg.dim_v(), alg.dim_z());
    let vs = int_box(dv, -bound, bound);
    let zs: Vec<Vec<Q>> = int_box(dz, -2 * bound, 2 * bound)
        .into_iter()
        .map(|k| k.into_iter().map(|x| q_frac(x, 2)).collect())
        .collect();
    let mut log_ok = true;
    // Projector onto [V, n]^⊥ (columns), keyed by the rref basis of [V, n].
    let mut groups: BTreeMap<Vec<Vec<Q>>, Vec<Q>> = BTreeMap::new();
    for v in &vs {
        let vq: Vec<Q> = v.iter().map(|&x| q_int(x)).collect();
        let brs: Vec<Vec<Q>> = (0..dv).map(|p| alg.bracket_v(&vq, &unit(dv, p))).collect();
        let basis = span_basis(&brs, dz);
        groups.entry(basis).or_insert(vq);
    }
    let mut distinct: BTreeMap<Vec<Q>, (Vec<Q>, Vec<Q>)> = BTreeMap::new();
    for (basis, wv) in &groups {
        for z in &zs {
            if !log_ok {
                break;
            }
            let p = project_onto_span(basis, z);
            let proj: Vec<Q> = z.iter().zip(&p).map(|(a, b)| a - b).collect();
            distinct
                .entry(proj)
                .or_insert_with(|| (wv.clone(), z.clone()));
        }
        let mut full = wv.clone();
        full.extend(zs[0].iter().cloned());
        log_ok &= data.log_lattice.contains(&full);
    }
    let mut entries = Vec::new();
    let mut structure_fail = None;
    let mut eigen_fail = None;
    for (proj, (wv, wz)) in &distinct {
        let j = alg.j_matrix(proj)?;
        let cp = char_poly(&j)?;
        if cp != expected_pair_char_poly(proj) && structure_fail.is_none() {
            structure_fail = Some(format!("Z_perp = {}: char poly {cp}", fmt_vec(proj)));
        }
        let ck2 = &proj[2] * &proj[2];
        let n2: Q = proj.iter().map(|x| x * x).sum();
        let spectrum = [q_int(0), ck2.clone(), ck2, n2.clone(), n2];
        let neg_sq = j.mul(&j).scale(&q_int(-1));
        let cp2 = char_poly(&neg_sq)?;
        if cp2 != poly_from_roots(&spectrum) && structure_fail.is_none() {
            structure_fail = Some(format!("Z_perp = {}: -j^2 char poly {cp2}", fmt_vec(proj)));
        }
        let eigenvalues: Vec<Q> = spectrum.iter().filter(|x| !x.is_zero()).cloned().collect();
        if eigenvalues.iter().any(|x| !x.is_positive()) && eigen_fail.is_none() {
            eigen_fail = Some(format!("Z_perp = {}", fmt_vec(proj)));
        }
        entries.push(CihEntry {
            witness_v: wv.clone(),
            witness_z: wz.clone(),
            proj_z: proj.clone(),
            eigenvalues,
        });
    }
    let enumerated = (vs.len() * zs.len()) as u64;
    let mut certificate = Certificate::new("clean_intersection");
    certificate.record(
        "enumeration_in_log_lattice",
        log_ok,
        Evidence::Exact,
        format!(
            "{enumerated} elements, {} distinct subspaces [V, n], {} distinct projected Z",
            groups.len(),
            distinct.len()
        ),
        None,
    );
    certificate.record(
        "spectrum_structure",
        structure_fail.is_none(),
        Evidence::Exact,
        "char poly of j(Z_perp) and of -j(Z_perp)^2 match {0, c_k^2, |c|^2}".into(),
        structure_fail,
    );
    certificate.record(
        "eigenvalues_positive_rational",
        eigen_fail.is_none(),
        Evidence::Exact,
        "every nonzero eigenvalue theta^2 of -j(Z_perp)^2 is a positive rational, so theta is not in pi*Q".into(),
        eigen_fail,
    );
    Ok(CihReport {
        certificate,
        enumerated,
        distinct: entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{deformation_algebra, pair_algebra, Which};

    #[test]
    fn hr_separates_pair() {
        let m = pair_algebra(Which::M);
        let mp = pair_algebra(Which::MPrime);
        assert!(
            check_hr_presentation(&m, &PresentationSplit::coordinate(&m, 2, 2).unwrap()).pass()
        );
        let c = check_hr_presentation(&mp, &PresentationSplit::coordinate(&mp, 2, 2).unwrap());
        assert!(!c.pass());
        assert_eq!(c.first_failure().unwrap().name, "x_abelian");
        let d = deformation_algebra();
        assert!(
            check_hr_presentation(&d, &PresentationSplit::coordinate(&d, 2, 0).unwrap()).pass()
        );
    }

    #[test]
    fn nlambda_examples() {
        let mp = pair_algebra(Which::MPrime);
        let zero5 = vec![q_int(0); 5];
        let n = centralizer_nlambda(&mp, &zero5, &[q_int(0), q_int(0), q_int(1)]).unwrap();
        assert_eq!(n.len(), 4);
        assert_eq!(
            n[0],
            vec![
                q_int(0),
                q_int(0),
                q_int(0),
                q_int(0),
                q_int(1),
                q_int(0),
                q_int(0),
                q_int(0)
            ]
        );
        assert_eq!(
            centralizer_nlambda(&mp, &zero5, &vec![q_int(0); 3])
                .unwrap()
                .len(),
            8
        );
    }
}
