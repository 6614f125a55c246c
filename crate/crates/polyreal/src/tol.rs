//! Central tolerance record.
//!
//! Every numerical threshold used by validators and solvers lives here, so
//! a caller can tighten or relax the whole library in one place (the CLI
//! exposes this through `--tol key=value`). Defaults target double precision
//! at state dimensions up to 64.

/// Numerical tolerances shared across the library.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Residual bound for linear solves: `|A*X - B|_max <= tol_solve * (1 + |B|_max)`.
    pub tol_solve: f64,
    /// Allowed deviation `|M - M*|_max` for a matrix passed as Hermitian.
    pub tol_herm: f64,
    /// Slack on positive-semidefinite checks: min eigenvalue >= -psd_slack.
    pub psd_slack: f64,
    /// Residual bound for structural identities: sum-to-identity, metric
    /// relations of colligations, skew-adjointness, projection idempotency.
    pub tol_structure: f64,
    /// Pairwise residual bound on the Gram identity of decomposition samples.
    pub gram_tol: f64,
    /// Radius around 1 used when splitting the 1-eigenspace of a unitary.
    pub split_tol: f64,
    /// Reciprocal-condition floor below which `solve` refuses a system.
    pub rcond_solve: f64,
    /// Reciprocal-condition floor for Cayley-type inversions (F + I, I - D).
    pub rcond_cayley: f64,
    /// Relative singular-value cutoff for numerical rank: sigma > cutoff * sigma_max.
    pub svd_rank_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_solve: 1e-10,
            tol_herm: 1e-10,
            psd_slack: 1e-9,
            tol_structure: 1e-10,
            gram_tol: 1e-8,
            split_tol: 1e-8,
            rcond_solve: 1e-14,
            rcond_cayley: 1e-12,
            svd_rank_rel: 1e-10,
        }
    }
}

impl Tolerances {
    /// Set a tolerance by its field name. Returns false for unknown names.
    pub fn set_by_name(&mut self, name: &str, value: f64) -> bool {
        match name {
            "tol_solve" => self.tol_solve = value,
            "tol_herm" => self.tol_herm = value,
            "psd_slack" => self.psd_slack = value,
            "tol_structure" => self.tol_structure = value,
            "gram_tol" => self.gram_tol = value,
            "split_tol" => self.split_tol = value,
            "rcond_solve" => self.rcond_solve = value,
            "rcond_cayley" => self.rcond_cayley = value,
            "svd_rank_rel" => self.svd_rank_rel = value,
            _ => return false,
        }
        true
    }

    /// Field names and current values, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("tol_solve", self.tol_solve),
            ("tol_herm", self.tol_herm),
            ("psd_slack", self.psd_slack),
            ("tol_structure", self.tol_structure),
            ("gram_tol", self.gram_tol),
            ("split_tol", self.split_tol),
            ("rcond_solve", self.rcond_solve),
            ("rcond_cayley", self.rcond_cayley),
            ("svd_rank_rel", self.svd_rank_rel),
        ]
    }
}

/// How validated constructors treat invariant violations.
///
/// `Strict` rejects the object; `Lenient` constructs it anyway and records
/// each violation as a warning on the object, which is useful when
/// experimenting with deliberately corrupted data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validation {
    Strict,
    Lenient,
}
