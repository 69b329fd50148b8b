/// Central numerical configuration.
///
/// Every tolerance and solver knob used by the crate lives here, so tests can
/// pin the defaults and callers can tighten or relax them in one place.
#[derive(Debug, Clone)]
pub struct NumericConfig {
    /// State normalization tolerance.
    pub tol_norm: f64,
    /// Hermiticity tolerance (max entrywise deviation from the adjoint).
    pub tol_hermitian: f64,
    /// Unit-trace tolerance for density matrices.
    pub tol_trace: f64,
    /// Allowed negativity of density-matrix eigenvalues.
    pub tol_psd: f64,
    /// Residual bound for extremal eigenpairs.
    pub tol_eig_residual: f64,
    /// Slack when checking a measured mean against the spectral range.
    pub tol_mean_range: f64,
    /// Fixed-point stopping: objective change below this value...
    pub fp_tol_change: f64,
    /// ...for this many consecutive iterations.
    pub fp_consecutive: usize,
    /// Fixed-point iteration cap per restart.
    pub fp_max_iters: usize,
    /// Random restarts per Legendre evaluation.
    pub restarts: usize,
    /// Multiplier box for the slope search: lambda in [-lambda_max, lambda_max].
    pub lambda_max: f64,
    /// Coordinate-ascent rounds for multi-observable records.
    pub coord_rounds: usize,
    /// Coordinate-ascent rounds for the multi-fidelity bound.
    pub fidelity_rounds: usize,
    /// Lower clamp for the alpha variable in the concurrence iteration.
    pub alpha_clamp: f64,
    /// Attempt cap for rejection sampling of separable states.
    pub rejection_cap: usize,
    /// Random restarts for the closest-product-state search.
    pub product_restarts: usize,
    /// Sweep cap for the closest-product-state search.
    pub product_sweeps: usize,
    /// Overlap-gain stopping threshold for the closest-product-state search.
    pub product_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            tol_norm: 1e-12,
            tol_hermitian: 1e-12,
            tol_trace: 1e-12,
            tol_psd: 1e-10,
            tol_eig_residual: 1e-9,
            tol_mean_range: 1e-10,
            fp_tol_change: 1e-10,
            fp_consecutive: 3,
            fp_max_iters: 5_000,
            restarts: 20,
            lambda_max: 1e3,
            coord_rounds: 50,
            fidelity_rounds: 100,
            alpha_clamp: 1e-8,
            rejection_cap: 1_000_000,
            product_restarts: 50,
            product_sweeps: 500,
            product_tol: 1e-10,
        }
    }
}
