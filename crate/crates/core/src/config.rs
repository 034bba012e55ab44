//! Tolerance and size defaults used across the crate.

use serde::{Deserialize, Serialize};

/// Tolerance for classification of local operators (PCA/QCA/CA).
pub const CLASSIFY_TOL: f64 = 1e-9;
/// Tolerance for checks that hold exactly by construction.
pub const EXACT_TOL: f64 = 1e-12;
/// Largest N for which a dense `2^N x 2^N` matrix is materialized.
pub const DENSE_CAP: usize = 12;
/// Above this N the matrix-free trace sweep logs a cost warning.
pub const MATRIX_FREE_WARN: usize = 14;
/// `|1 - u*lambda|` below this is treated as a pole of the zeta function.
pub const SINGULAR_TOL: f64 = 1e-14;
/// Discriminant magnitude below which the r = 1 recurrence has a double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-12;
/// Default Gauss-Hermite node count.
pub const GAUSS_HERMITE_NODES: usize = 64;
/// Node-doubling stops once successive quadratures differ by less than this.
pub const GAUSS_HERMITE_CONVERGENCE: f64 = 1e-10;
/// Default truncation order of the zeta log series.
pub const SERIES_ORDER: usize = 20;
/// Normalization drift that aborts an evolution.
pub const DRIFT_TOL: f64 = 1e-8;
/// Pass threshold for the Rule 90 conjecture experiment.
pub const CONJECTURE_TOL: f64 = 1e-8;

/// Tolerances bundled for callers that want to override the defaults in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub classify: f64,
    pub exact: f64,
    pub singular: f64,
    pub double_root: f64,
    pub drift: f64,
    pub conjecture: f64,
    pub quadrature_convergence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            classify: CLASSIFY_TOL,
            exact: EXACT_TOL,
            singular: SINGULAR_TOL,
            double_root: DOUBLE_ROOT_TOL,
            drift: DRIFT_TOL,
            conjecture: CONJECTURE_TOL,
            quadrature_convergence: GAUSS_HERMITE_CONVERGENCE,
        }
    }
}
