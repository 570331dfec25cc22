//! Generalized amplitude damping and its two-qubit Stinespring dilation.

use serde::Serialize;

use super::Channel;
use crate::error::{Error, Result};
use crate::matrix::{kron, ComplexMatrix, C64, ONE, ZERO};
use crate::states::{partial_trace_matrix, thermal_env_state, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GadParams {
    /// Damping γ ∈ [0, 1].
    pub gamma: f64,
    /// Excited-state population n ∈ [0, 1] of the environment.
    pub n: f64,
}

impl GadParams {
    pub fn new(gamma: f64, n: f64) -> Result<Self> {
        check_unit("gamma", gamma)?;
        check_unit("n", n)?;
        Ok(Self { gamma, n })
    }

    pub fn kraus(&self) -> [ComplexMatrix; 4] {
        let (g, n) = (self.gamma, self.n);
        let a = (1.0 - n).sqrt();
        let b = n.sqrt();
        let keep = (1.0 - g).sqrt();
        let jump = g.sqrt();
        [
            ComplexMatrix::from_real_rows(&[&[a, 0.0], &[0.0, a * keep]]),
            ComplexMatrix::from_real_rows(&[&[0.0, a * jump], &[0.0, 0.0]]),
            ComplexMatrix::from_real_rows(&[&[b * keep, 0.0], &[0.0, b]]),
            ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[b * jump, 0.0]]),
        ]
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Range {
            name,
            value,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// GAD channel built from its four Kraus operators.
pub fn gad(p: GadParams) -> Channel {
    Channel::from_kraus(&p.kraus()).expect("GAD Kraus operators are 2x2")
}

/// System–environment unitary on `A ⊗ E_A` (system factor first):
/// identity on |00⟩ and |11⟩, and [[√(1−γ), i√γ], [i√γ, √(1−γ)]] on {|01⟩, |10⟩}.
pub fn gad_dilation_unitary(gamma: f64) -> Result<ComplexMatrix> {
    check_unit("gamma", gamma)?;
    let c = C64::new((1.0 - gamma).sqrt(), 0.0);
    let s = C64::new(0.0, gamma.sqrt());
    Ok(ComplexMatrix::from_rows(&[
        &[ONE, ZERO, ZERO, ZERO],
        &[ZERO, c, s, ZERO],
        &[ZERO, s, c, ZERO],
        &[ZERO, ZERO, ZERO, ONE],
    ]))
}

/// Tr_E[U (ρ ⊗ ω_n) U†] for a single-qubit ρ.
pub fn stinespring_apply(gamma: f64, n: f64, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::WrongDims {
            expected: vec![2],
            got: rho.dims().to_vec(),
        });
    }
    let env = thermal_env_state(n)?;
    let u = gad_dilation_unitary(gamma)?;
    let joint = kron(rho.matrix(), env.matrix())?.conjugate_by(&u)?;
    let (reduced, _) = partial_trace_matrix(&joint, &[2, 2], &[0])?;
    Ok(DensityMatrix::from_trusted(reduced, vec![2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::invert;
    use crate::matrix::{frobenius_distance, pauli};
    use crate::states::{random_density_with, random_pure_with, seeded_rng};
    use rand::Rng;

    #[test]
    fn zero_damping_is_identity_for_every_temperature() {
        for n in [0.0, 0.3, 1.0] {
            let g = gad(GadParams::new(0.0, n).unwrap());
            assert!(frobenius_distance(g.superop(), Channel::identity(2).superop()).unwrap() < 1e-15);
        }
    }

    #[test]
    fn pauli_images() {
        let (gamma, n) = (0.37, 0.21);
        let g = gad(GadParams::new(gamma, n).unwrap());
        let s = (1.0f64 - gamma).sqrt();
        let x = g.apply(&pauli(1)).unwrap();
        assert!(frobenius_distance(&x, &pauli(1).scale_real(s)).unwrap() < 1e-14);
        let r = g.ptm_view().unwrap();
        let expected = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, s, 0.0, 0.0],
            [0.0, 0.0, s, 0.0],
            [gamma * (1.0 - 2.0 * n), 0.0, 0.0, 1.0 - gamma],
        ];
        assert!(r.max_abs_diff(&crate::channels::PauliTransfer { matrix: expected }) < 1e-14);
        assert!((r.determinant() - (1.0 - gamma).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn full_damping_outputs_environment_state() {
        let n = 0.3;
        let g = gad(GadParams::new(1.0, n).unwrap());
        let mut rng = seeded_rng(5, 0);
        let rho = random_density_with(&[2], &mut rng);
        let out = g.apply(rho.matrix()).unwrap();
        // oracle: direct Kraus sum
        let direct = GadParams::new(1.0, n).unwrap().kraus().iter().fold(ComplexMatrix::zeros(2, 2), |acc, k| {
            &acc + &(&(k * rho.matrix()) * &k.adjoint())
        });
        assert!(frobenius_distance(&out, &ComplexMatrix::diag_real(&[1.0 - n, n])).unwrap() < 1e-14);
        assert!(frobenius_distance(&out, &direct).unwrap() < 1e-14);
        assert!(invert(&g).is_err());
    }

    #[test]
    fn kraus_view_reproduces_listed_operators_action() {
        let p = GadParams::new(0.62, 0.44).unwrap();
        let g = gad(p);
        let via_choi = g.kraus_view().unwrap();
        let listed = crate::channels::KrausRep {
            operators: p.kraus().to_vec(),
        };
        let mut rng = seeded_rng(8, 0);
        for _ in 0..20 {
            let rho = random_pure_with(&[2], &mut rng).density();
            let a = via_choi.apply(rho.matrix());
            let b = listed.apply(rho.matrix());
            assert!(frobenius_distance(&a, &b).unwrap() < 1e-9);
        }
    }

    #[test]
    fn dilation_unitary_examples() {
        assert!(frobenius_distance(&gad_dilation_unitary(0.0).unwrap(), &ComplexMatrix::identity(4)).unwrap() == 0.0);
        let u = gad_dilation_unitary(1.0).unwrap();
        assert_eq!(u.get(1, 1), ZERO);
        assert_eq!(u.get(1, 2), C64::new(0.0, 1.0));
        assert_eq!(u.get(2, 1), C64::new(0.0, 1.0));
        let u = gad_dilation_unitary(0.37).unwrap();
        assert!(frobenius_distance(&(&u * &u.adjoint()), &ComplexMatrix::identity(4)).unwrap() < 1e-12);
        assert!(gad_dilation_unitary(1.2).is_err());
    }

    #[test]
    fn stinespring_examples() {
        let mut rng = seeded_rng(6, 0);
        let rho = random_density_with(&[2], &mut rng);
        let same = stinespring_apply(0.0, 0.4, &rho).unwrap();
        assert!(frobenius_distance(same.matrix(), rho.matrix()).unwrap() < 1e-15);

        let excited = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        for gamma in [0.1, 0.5, 0.9] {
            let out = stinespring_apply(gamma, 0.0, &excited).unwrap();
            assert!(frobenius_distance(out.matrix(), &ComplexMatrix::diag_real(&[gamma, 1.0 - gamma])).unwrap() < 1e-14);
        }
        assert!(stinespring_apply(0.5, 1.5, &excited).is_err());
    }

    #[test]
    fn stinespring_agrees_with_kraus_sum() {
        let mut rng = seeded_rng(12, 0);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let gamma: f64 = rng.gen();
            let n: f64 = rng.gen();
            let g = gad(GadParams::new(gamma, n).unwrap());
            for _ in 0..10 {
                let rho = random_density_with(&[2], &mut rng);
                let a = stinespring_apply(gamma, n, &rho).unwrap();
                let b = g.apply(rho.matrix()).unwrap();
                worst = worst.max(frobenius_distance(a.matrix(), &b).unwrap());
            }
        }
        assert!(worst <= 1e-10, "max gap {worst}");
    }
}
