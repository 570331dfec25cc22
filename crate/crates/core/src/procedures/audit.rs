//! Bookkeeping of entanglement across the system–environment cut.

use serde::Serialize;

use crate::entanglement::{full_cut_negativity, negativity, system_negativity};
use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::states::{embed_operator, DensityMatrix, FOUR_QUBIT_DIMS};

use super::pipeline::PipelineStates;
use super::revival::TrajectoryPoint;

/// Slack for all equalities and inequalities below.
pub const AUDIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservationAudit {
    /// AE_A | BE_B negativity at the three stages.
    pub full_cut_negativity: [f64; 3],
    /// A | B negativity of the reduced states at the three stages.
    pub ab_negativity: [f64; 3],
    /// Inaccessible entanglement at the three stages.
    pub inaccessible: [f64; 3],
    /// |N(ω ⊗ ρ ⊗ ω) − N(ρ)| for the input: attaching product ancillas changes nothing.
    pub ancilla_residual: f64,
    /// Largest change of the full-cut negativity between stages.
    pub full_cut_drift: f64,
    /// Smallest N_full − N_AB over the stages; negative means a violation.
    pub monotonicity_margin: f64,
    pub passed: bool,
}

pub fn conservation_audit(states: &PipelineStates) -> Result<ConservationAudit> {
    let mut full = [0.0; 3];
    let mut ab = [0.0; 3];
    for (k, (f, r)) in states.full_stages().iter().zip(states.ab_stages()).enumerate() {
        full[k] = full_cut_negativity(f)?;
        ab[k] = negativity(r, &[1])?;
    }
    let inaccessible = [full[0] - ab[0], full[1] - ab[1], full[2] - ab[2]];
    let ancilla_residual = (full[0] - ab[0]).abs();
    let full_cut_drift = (full[1] - full[0]).abs().max((full[2] - full[0]).abs());
    let monotonicity_margin = inaccessible.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConservationAudit {
        full_cut_negativity: full,
        ab_negativity: ab,
        inaccessible,
        ancilla_residual,
        full_cut_drift,
        monotonicity_margin,
        passed: ancilla_residual <= AUDIT_TOL && full_cut_drift <= AUDIT_TOL && monotonicity_margin >= -AUDIT_TOL,
    })
}

/// Audit of a reduced trajectory. The full-cut negativity of any
/// product-environment dilation equals N(ρ₀) at all times, so the reduced
/// negativity may never exceed it and the difference is inaccessible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryAudit {
    pub initial_negativity: f64,
    pub inaccessible: Vec<f64>,
    pub monotonicity_margin: f64,
    pub passed: bool,
}

pub fn trajectory_audit(rho0: &DensityMatrix, points: &[TrajectoryPoint]) -> Result<TrajectoryAudit> {
    let initial = negativity(rho0, &[1])?;
    let inaccessible: Vec<f64> = points.iter().map(|p| initial - p.negativity).collect();
    let margin = inaccessible.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(TrajectoryAudit {
        initial_negativity: initial,
        inaccessible,
        monotonicity_margin: margin,
        passed: margin >= -AUDIT_TOL,
    })
}

/// Residuals of the cut-negativity relations for one four-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceResiduals {
    /// |N(U_{AE_A} ⊗ U_{BE_B} ρ …†) − N(ρ)|
    pub local_unitary: f64,
    /// N_full − N_AB; negative means the partial trace increased negativity.
    pub monotonicity_margin: f64,
}

/// `u_a` acts on `(E_A, A)` and `u_b` on `(B, E_B)`.
pub fn invariance_residuals(
    full: &DensityMatrix,
    u_a: &ComplexMatrix,
    u_b: &ComplexMatrix,
) -> Result<InvarianceResiduals> {
    let before = full_cut_negativity(full)?;
    let u = &embed_operator(u_a, &[0, 1], &FOUR_QUBIT_DIMS)? * &embed_operator(u_b, &[2, 3], &FOUR_QUBIT_DIMS)?;
    let after = full_cut_negativity(&full.evolve(&u)?)?;
    Ok(InvarianceResiduals {
        local_unitary: (after - before).abs(),
        monotonicity_margin: before - system_negativity(full)?,
    })
}

/// |N(σ_{E_A} ⊗ ρ_AB ⊗ σ_{E_B}) − N(ρ_AB)|
pub fn ancilla_residual(rho_ab: &DensityMatrix, env_a: &DensityMatrix, env_b: &DensityMatrix) -> Result<f64> {
    let full = env_a.tensor(rho_ab)?.tensor(env_b)?;
    Ok((full_cut_negativity(&full)? - negativity(rho_ab, &[1])?).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::GadParams;
    use crate::error::Error;
    use crate::procedures::pipeline::procedure2_stinespring;
    use crate::states::{phi_plus, random_density_with, random_unitary_with, seeded_rng, werner};

    #[test]
    fn separable_input_gives_zeros() {
        let s = procedure2_stinespring(&werner(0.25).unwrap(), &GadParams::new(0.6, 0.3).unwrap()).unwrap();
        let a = conservation_audit(&s).unwrap();
        assert!(a.passed);
        for v in a.full_cut_negativity.iter().chain(&a.ab_negativity) {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn bell_pipeline_keeps_full_cut_at_one_half() {
        // annihilating but not breaking at this point
        let s = procedure2_stinespring(&phi_plus(), &GadParams::new(0.75, 0.5).unwrap()).unwrap();
        let a = conservation_audit(&s).unwrap();
        assert!(a.passed, "{a:?}");
        for v in a.full_cut_negativity {
            assert!((v - 0.5).abs() < 1e-9);
        }
        assert!((a.ab_negativity[0] - 0.5).abs() < 1e-9);
        assert_eq!(a.ab_negativity[1], 0.0);
        assert!(a.ab_negativity[2] > 1e-3);
    }

    #[test]
    fn random_local_unitaries() {
        let mut rng = seeded_rng(77, 0);
        for _ in 0..10 {
            let full = random_density_with(&FOUR_QUBIT_DIMS, &mut rng);
            let ua = random_unitary_with(4, &mut rng);
            let ub = random_unitary_with(4, &mut rng);
            let r = invariance_residuals(&full, &ua, &ub).unwrap();
            assert!(r.local_unitary <= 1e-9 && r.monotonicity_margin >= -1e-9);
        }
    }

    #[test]
    fn wrong_dims_rejected() {
        let e = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!(matches!(
            invariance_residuals(&e, &ComplexMatrix::identity(4), &ComplexMatrix::identity(4)),
            Err(Error::WrongDims { .. })
        ));
    }
}
