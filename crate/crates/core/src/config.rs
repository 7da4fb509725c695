//! Default numerical tolerances, gathered in one place.

/// Tolerance and threshold constants shared by the solvers and the
/// verification suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Start-boundary value (relative to `max|f|`) above which a half-order
    /// composition is flagged.
    pub boundary_value: f64,
    /// Fraction of the interval excluded at the start boundary when fractional
    /// accuracy is asserted.
    pub interior_skip: f64,
    /// Relative band around `C^2 = 4mk` (or `xi^2 = k^2`) classified as critical.
    pub critical_band: f64,
    /// Trajectories abort once `|q|` exceeds this multiple of the initial amplitude.
    pub instability_factor: f64,
    /// Inverse-iteration cap per eigenpair.
    pub max_inverse_iterations: usize,
    /// Relative eigen-residual `|H psi - E psi| / |psi|` accepted as converged.
    pub eigen_residual: f64,
    /// Norm of a coefficient vector must be within this of 1.
    pub coefficient_norm: f64,
    /// Samples below this fraction of `max|psi|` are ignored when counting nodes.
    pub node_threshold: f64,
    /// Minimum fitted exponent of `|dF|` in `eps` accepted as stationary.
    pub stationarity_exponent: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            boundary_value: 1e-8,
            interior_skip: 0.1,
            critical_band: 1e-12,
            instability_factor: 1e6,
            max_inverse_iterations: 50,
            eigen_residual: 1e-8,
            coefficient_norm: 1e-10,
            node_threshold: 1e-8,
            stationarity_exponent: 1.9,
        }
    }
}

pub const DEFAULT_TOLERANCES: Tolerances = Tolerances {
    boundary_value: 1e-8,
    interior_skip: 0.1,
    critical_band: 1e-12,
    instability_factor: 1e6,
    max_inverse_iterations: 50,
    eigen_residual: 1e-8,
    coefficient_norm: 1e-10,
    node_threshold: 1e-8,
    stationarity_exponent: 1.9,
};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn const_matches_default() {
        assert_eq!(Tolerances::default(), DEFAULT_TOLERANCES);
    }
}
