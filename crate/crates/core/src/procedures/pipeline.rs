//! Second procedure: E⁻¹ ⊗ id on a GAD-separated state, at channel level and
//! as four-qubit unitary dynamics with thermal environments.

use serde::Serialize;

use crate::channels::{gad, gad_dilation_unitary, invert, tensor, Channel, GadParams};
use crate::error::{Error, Result};
use crate::matrix::{frobenius_distance, ComplexMatrix};
use crate::states::{embed_operator, thermal_env_state, DensityMatrix, FOUR_QUBIT_DIMS};

/// Every stage of the four-qubit realization, register order `(E_A, A, B, E_B)`.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineStates {
    pub rho_ab: DensityMatrix,
    /// ω ⊗ ρ_AB ⊗ ω before any evolution.
    pub rho_full: DensityMatrix,
    pub rho_full_prime: DensityMatrix,
    pub rho_ab_prime: DensityMatrix,
    pub rho_full_dprime: DensityMatrix,
    pub rho_ab_dprime: DensityMatrix,
}

impl PipelineStates {
    /// The three four-qubit stages in order.
    pub fn full_stages(&self) -> [&DensityMatrix; 3] {
        [&self.rho_full, &self.rho_full_prime, &self.rho_full_dprime]
    }

    /// The three two-qubit stages in order.
    pub fn ab_stages(&self) -> [&DensityMatrix; 3] {
        [&self.rho_ab, &self.rho_ab_prime, &self.rho_ab_dprime]
    }
}

fn check_input(rho: &DensityMatrix, g: &GadParams) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::WrongDims {
            expected: vec![2, 2],
            got: rho.dims().to_vec(),
        });
    }
    if g.gamma >= 1.0 {
        return Err(Error::NonInvertible {
            condition: f64::INFINITY,
        });
    }
    Ok(())
}

/// (E⁻¹ ⊗ id)[(E ⊗ E)[ρ]] and (id ⊗ E)[ρ].
pub fn procedure2_channel_level(rho: &DensityMatrix, g: &GadParams) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_input(rho, g)?;
    let e = gad(*g);
    let both = tensor(&e, &e)?.apply(rho.matrix())?;
    let lhs = tensor(&invert(&e)?, &Channel::identity(2))?.apply(&both)?;
    let rhs = tensor(&Channel::identity(2), &e)?.apply(rho.matrix())?;
    Ok((lhs, rhs))
}

/// U on the `(A, E_A)` pair and on the `(B, E_B)` pair of the register.
pub fn local_dilations(gamma: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let u = gad_dilation_unitary(gamma)?;
    Ok((
        embed_operator(&u, &[1, 0], &FOUR_QUBIT_DIMS)?,
        embed_operator(&u, &[2, 3], &FOUR_QUBIT_DIMS)?,
    ))
}

pub fn procedure2_stinespring(rho: &DensityMatrix, g: &GadParams) -> Result<PipelineStates> {
    check_input(rho, g)?;
    let env = thermal_env_state(g.n)?;
    let rho_full = env.tensor(rho)?.tensor(&env)?;
    let (u_a, u_b) = local_dilations(g.gamma)?;
    let rho_full_prime = rho_full.evolve(&(&u_a * &u_b))?;
    let rho_full_dprime = rho_full_prime.evolve(&u_a.adjoint())?;
    Ok(PipelineStates {
        rho_ab: rho.clone(),
        rho_ab_prime: rho_full_prime.partial_trace(&[1, 2])?,
        rho_ab_dprime: rho_full_dprime.partial_trace(&[1, 2])?,
        rho_full,
        rho_full_prime,
        rho_full_dprime,
    })
}

/// Pairwise Frobenius gaps between the three computations of the final state,
/// and between the unitary and Kraus-level intermediate states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Procedure2Residuals {
    pub lhs_rhs: f64,
    pub lhs_dprime: f64,
    pub rhs_dprime: f64,
    pub prime_vs_kraus: f64,
}

impl Procedure2Residuals {
    pub fn max(&self) -> f64 {
        self.lhs_rhs
            .max(self.lhs_dprime)
            .max(self.rhs_dprime)
            .max(self.prime_vs_kraus)
    }
}

pub fn procedure2_residuals(rho: &DensityMatrix, g: &GadParams, states: &PipelineStates) -> Result<Procedure2Residuals> {
    let (lhs, rhs) = procedure2_channel_level(rho, g)?;
    let e = gad(*g);
    let kraus_prime = tensor(&e, &e)?.apply(rho.matrix())?;
    let dprime = states.rho_ab_dprime.matrix();
    Ok(Procedure2Residuals {
        lhs_rhs: frobenius_distance(&lhs, &rhs)?,
        lhs_dprime: frobenius_distance(&lhs, dprime)?,
        rhs_dprime: frobenius_distance(&rhs, dprime)?,
        prime_vs_kraus: frobenius_distance(&kraus_prime, states.rho_ab_prime.matrix())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{full_cut_negativity, negativity};
    use crate::states::{phi_plus, random_density_with, seeded_rng};

    #[test]
    fn zero_damping_keeps_the_state() {
        let mut rng = seeded_rng(4, 0);
        let rho = random_density_with(&[2, 2], &mut rng);
        let g = GadParams::new(0.0, 0.3).unwrap();
        let (lhs, rhs) = procedure2_channel_level(&rho, &g).unwrap();
        assert!(frobenius_distance(&lhs, rho.matrix()).unwrap() < 1e-12);
        assert!(frobenius_distance(&rhs, rho.matrix()).unwrap() < 1e-12);
        let s = procedure2_stinespring(&rho, &g).unwrap();
        for st in s.ab_stages() {
            assert!(frobenius_distance(st.matrix(), rho.matrix()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn bell_state_identity() {
        let g = GadParams::new(0.5, 0.5).unwrap();
        let (lhs, rhs) = procedure2_channel_level(&phi_plus(), &g).unwrap();
        assert!(frobenius_distance(&lhs, &rhs).unwrap() <= 1e-9);
    }

    #[test]
    fn full_damping_is_rejected() {
        let g = GadParams::new(1.0, 0.5).unwrap();
        assert!(matches!(procedure2_channel_level(&phi_plus(), &g), Err(Error::NonInvertible { .. })));
        assert!(matches!(procedure2_stinespring(&phi_plus(), &g), Err(Error::NonInvertible { .. })));
    }

    #[test]
    fn unitary_stages_match_kraus_level() {
        let mut rng = seeded_rng(10, 0);
        let g = GadParams::new(0.63, 0.27).unwrap();
        for _ in 0..50 {
            let rho = random_density_with(&[2, 2], &mut rng);
            let s = procedure2_stinespring(&rho, &g).unwrap();
            let r = procedure2_residuals(&rho, &g, &s).unwrap();
            assert!(r.prime_vs_kraus <= 1e-10 && r.max() <= 1e-9, "{r:?}");
        }
    }

    #[test]
    fn full_cut_negativity_constant_along_pipeline() {
        let g = GadParams::new(0.8, 0.45).unwrap();
        let s = procedure2_stinespring(&phi_plus(), &g).unwrap();
        let n: Vec<f64> = s.full_stages().iter().map(|st| full_cut_negativity(st).unwrap()).collect();
        assert!((n[0] - 0.5).abs() < 1e-9 && (n[1] - n[0]).abs() < 1e-9 && (n[2] - n[0]).abs() < 1e-9);
        assert!(negativity(&s.rho_ab_dprime, &[1]).unwrap() > 0.0);
    }
}
