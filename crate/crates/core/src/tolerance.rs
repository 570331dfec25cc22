//! Numerical tolerances shared across modules.

use serde::{Deserialize, Serialize};

/// Slack used when deciding whether an operator is a valid density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// max |ρ_ij − conj(ρ_ji)|.
    pub hermiticity: f64,
    /// |Tr ρ − 1|.
    pub trace: f64,
    /// Smallest eigenvalue accepted is `-psd_slack`.
    pub psd_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            trace: 1e-10,
            psd_slack: 1e-10,
        }
    }
}

/// Partial-transpose eigenvalues in `[-NEGATIVITY_CLAMP, 0)` count as zero.
pub const NEGATIVITY_CLAMP: f64 = 1e-10;

/// Entanglement-annihilation witness threshold on the min partial-transpose eigenvalue.
pub const EA_THRESHOLD: f64 = -1e-9;
