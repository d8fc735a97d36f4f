//! Numerical tolerances shared by the suites; overridable from a config file.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Central-difference step for gradients and Poisson brackets.
    pub fd_step: f64,
    /// Allowed drift of a first integral along a trajectory.
    pub conservation_tol: f64,
    /// Allowed magnitude of a Poisson bracket that should vanish.
    pub bracket_tol: f64,
    /// Relative singular-value threshold for the independence rank.
    pub svd_threshold: f64,
    /// RK4 steps per unit time.
    pub rk4_steps_per_unit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fd_step: 1e-6,
            conservation_tol: 1e-8,
            bracket_tol: 1e-6,
            svd_threshold: 1e-7,
            rk4_steps_per_unit: 1000.0,
        }
    }
}

impl Tolerances {
    /// RK4 step count for an integration over time `t`.
    pub fn rk4_steps(&self, t: f64) -> usize {
        (libm::ceil(libm::fabs(t) * self.rk4_steps_per_unit) as usize).max(1)
    }
}
