//! Entanglement measures and channel classifiers.
//!
//! Negativity is the cross-cut measure everywhere (it is computable for the
//! 16×16 system–environment states and is a monotone under the local
//! operations that appear in the procedures). Concurrence is reported for
//! two-qubit states. PPT is exact separability only for 2⊗2; for larger cuts
//! a zero negativity is reported as PPT without a separability claim.

mod annihilation;

pub use annihilation::{
    is_entanglement_annihilating, min_pt_objective, state_from_params, EaCertificate, EaConfig, EaVerdict,
};

use serde::Serialize;

use crate::channels::{tensor, Channel};
use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigen, hermitian_eigenvalues, kron, pauli_y, ComplexMatrix};
use crate::states::{partial_transpose_set, phi_plus, DensityMatrix, FOUR_QUBIT_DIMS, SIDE_B};
use crate::tolerance::NEGATIVITY_CLAMP;

fn check_cut(dims: &[usize], cut: &[usize]) -> Result<()> {
    if cut.is_empty() || cut.len() >= dims.len() {
        return Err(Error::BadCut(format!(
            "cut {cut:?} must be a nonempty proper subset of {} subsystems",
            dims.len()
        )));
    }
    for (i, &k) in cut.iter().enumerate() {
        if k >= dims.len() || cut[..i].contains(&k) {
            return Err(Error::BadCut(format!("invalid subsystem {k} in cut {cut:?}")));
        }
    }
    Ok(())
}

/// Smallest eigenvalue of the partial transpose over the subsystems in `cut`.
pub fn min_pt_eigenvalue(m: &ComplexMatrix, dims: &[usize], cut: &[usize]) -> Result<f64> {
    check_cut(dims, cut)?;
    let pt = partial_transpose_set(m, dims, cut)?;
    Ok(hermitian_eigen(&pt.hermitian_part())?.min())
}

/// Negativity of any Hermitian operator on a register.
pub fn negativity_of(m: &ComplexMatrix, dims: &[usize], cut: &[usize]) -> Result<f64> {
    check_cut(dims, cut)?;
    let pt = partial_transpose_set(m, dims, cut)?;
    let eig = hermitian_eigenvalues(&pt.hermitian_part())?;
    Ok(eig
        .iter()
        .filter(|&&l| l < -NEGATIVITY_CLAMP)
        .fold(0.0, |acc, l| acc - l))
}

/// Σ |λ| over the negative eigenvalues of the partial transpose across `cut`.
/// `cut` lists the subsystems on one side; the rest form the other side.
pub fn negativity(rho: &DensityMatrix, cut: &[usize]) -> Result<f64> {
    negativity_of(rho.matrix(), rho.dims(), cut)
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::WrongDims {
            expected: vec![2, 2],
            got: rho.dims().to_vec(),
        });
    }
    let m = rho.matrix();
    let yy = kron(&pauli_y(), &pauli_y())?;
    let flipped = &(&yy * &m.conj()) * &yy;
    // λ_i² are the eigenvalues of √ρ ρ̃ √ρ, which is Hermitian
    let eig = hermitian_eigen(&m.hermitian_part())?;
    let roots: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    let sqrt_rho = ComplexMatrix::from_fn(4, 4, |r, c| {
        (0..4)
            .map(|k| eig.vectors.get(r, k) * roots[k] * eig.vectors.get(c, k).conj())
            .sum()
    });
    let inner = &(&sqrt_rho * &flipped) * &sqrt_rho;
    let mut lambdas: Vec<f64> = hermitian_eigenvalues(&inner.hermitian_part())?
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementReport {
    /// Two-qubit states only.
    pub concurrence: Option<f64>,
    pub negativity: f64,
    pub min_pt_eigenvalue: f64,
    pub is_ppt: bool,
    /// Subsystems on the partially transposed side of the cut.
    pub bipartition: Vec<usize>,
}

pub fn entanglement_report(rho: &DensityMatrix, cut: &[usize]) -> Result<EntanglementReport> {
    let min_pt = min_pt_eigenvalue(rho.matrix(), rho.dims(), cut)?;
    let negativity = negativity(rho, cut)?;
    let concurrence = if rho.dims() == [2, 2] {
        Some(concurrence(rho)?)
    } else {
        None
    };
    Ok(EntanglementReport {
        concurrence,
        negativity,
        min_pt_eigenvalue: min_pt,
        is_ppt: negativity == 0.0,
        bipartition: cut.to_vec(),
    })
}

/// (E ⊗ id)[φ⁺] for a qubit map.
pub fn choi_state(e: &Channel) -> Result<ComplexMatrix> {
    if e.in_dim() != 2 || e.out_dim() != 2 {
        return Err(Error::WrongDims {
            expected: vec![2],
            got: vec![e.in_dim(), e.out_dim()],
        });
    }
    tensor(e, &Channel::identity(2))?.apply(phi_plus().matrix())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EbVerdict {
    pub breaking: bool,
    pub choi_min_pt_eigenvalue: f64,
    pub choi_negativity: f64,
}

/// A qubit channel is entanglement breaking iff its Choi state is separable,
/// which for two qubits is the PPT condition.
pub fn is_entanglement_breaking(e: &Channel) -> Result<EbVerdict> {
    if !e.is_cp() {
        return Err(Error::NotCp {
            min_choi_eigenvalue: e.min_choi_eigenvalue(),
        });
    }
    let state = choi_state(e)?;
    let min = min_pt_eigenvalue(&state, &[2, 2], &[1])?;
    let neg = negativity_of(&state, &[2, 2], &[1])?;
    Ok(EbVerdict {
        breaking: neg == 0.0,
        choi_min_pt_eigenvalue: min,
        choi_negativity: neg,
    })
}

/// Negativity across the `A E_A | B E_B` cut of a four-qubit `(E_A, A, B, E_B)` state.
pub fn full_cut_negativity(full: &DensityMatrix) -> Result<f64> {
    check_four_qubit(full)?;
    negativity(full, &SIDE_B)
}

/// Negativity of the reduced `AB` state across `A | B`.
pub fn system_negativity(full: &DensityMatrix) -> Result<f64> {
    check_four_qubit(full)?;
    negativity(&full.partial_trace(&[1, 2])?, &[1])
}

fn check_four_qubit(full: &DensityMatrix) -> Result<()> {
    if full.dims() != FOUR_QUBIT_DIMS {
        return Err(Error::WrongDims {
            expected: FOUR_QUBIT_DIMS.to_vec(),
            got: full.dims().to_vec(),
        });
    }
    Ok(())
}

/// M(ρ_{AE_A;BE_B}) − M(ρ_AB) with M the negativity.
pub fn inaccessible_entanglement(full: &DensityMatrix) -> Result<f64> {
    Ok(full_cut_negativity(full)? - system_negativity(full)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{gad, GadParams};
    use crate::states::{random_density_with, seeded_rng, thermal_env_state, werner};

    const TOL: f64 = 1e-9;

    #[test]
    fn negativity_examples() {
        assert!((negativity(&phi_plus(), &[1]).unwrap() - 0.5).abs() < TOL);
        let mut rng = seeded_rng(1, 0);
        let a = random_density_with(&[2], &mut rng);
        let b = random_density_with(&[2], &mut rng);
        assert_eq!(negativity(&a.tensor(&b).unwrap(), &[1]).unwrap(), 0.0);
    }

    #[test]
    fn negativity_rejects_bad_cuts() {
        assert!(matches!(negativity(&phi_plus(), &[]), Err(Error::BadCut(_))));
        assert!(matches!(negativity(&phi_plus(), &[0, 1]), Err(Error::BadCut(_))));
        assert!(matches!(negativity(&phi_plus(), &[3]), Err(Error::BadCut(_))));
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence(&phi_plus()).unwrap() - 1.0).abs() < TOL);
        let ground = DensityMatrix::new(ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0]), vec![2, 2]).unwrap();
        assert!(concurrence(&ground).unwrap().abs() < TOL);
        let three = thermal_env_state(0.2).unwrap().tensor(&phi_plus()).unwrap();
        assert!(matches!(concurrence(&three), Err(Error::WrongDims { .. })));
    }

    #[test]
    fn werner_family_measures() {
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let w = werner(p).unwrap();
            assert!((negativity(&w, &[1]).unwrap() - ((3.0 * p - 1.0) / 4.0).max(0.0)).abs() < TOL);
            assert!((concurrence(&w).unwrap() - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < TOL);
        }
    }

    #[test]
    fn report_consistency() {
        let r = entanglement_report(&werner(0.2).unwrap(), &[1]).unwrap();
        assert!(r.is_ppt && r.negativity == 0.0 && r.concurrence == Some(0.0));
        let r = entanglement_report(&phi_plus(), &[0]).unwrap();
        assert!(!r.is_ppt && (r.min_pt_eigenvalue + 0.5).abs() < TOL);
    }

    #[test]
    fn eb_examples() {
        assert!(!is_entanglement_breaking(&Channel::identity(2)).unwrap().breaking);
        for n in [0.0, 0.4, 1.0] {
            assert!(is_entanglement_breaking(&gad(GadParams::new(1.0, n).unwrap())).unwrap().breaking);
        }
        assert!(matches!(
            is_entanglement_breaking(&Channel::transpose_map()),
            Err(Error::NotCp { .. })
        ));
    }

    #[test]
    fn inaccessible_entanglement_examples() {
        let env = thermal_env_state(0.3).unwrap();
        let attach = |rho: &DensityMatrix| env.tensor(rho).unwrap().tensor(&env).unwrap();
        let sep = werner(0.2).unwrap();
        assert!(inaccessible_entanglement(&attach(&sep)).unwrap().abs() < TOL);
        let full = attach(&phi_plus());
        assert!((full_cut_negativity(&full).unwrap() - 0.5).abs() < TOL);
        assert!((system_negativity(&full).unwrap() - 0.5).abs() < TOL);
        assert!(inaccessible_entanglement(&full).unwrap().abs() < TOL);
        assert!(matches!(inaccessible_entanglement(&phi_plus()), Err(Error::WrongDims { .. })));
    }

    #[test]
    fn hidden_entanglement_after_swapping_into_environments() {
        // A ↔ E_A and B ↔ E_B swaps are local unitaries across the cut; with
        // pure |0⟩ environments the Bell pair ends up entirely in the environments.
        let env = thermal_env_state(0.0).unwrap();
        let full = env.tensor(&phi_plus()).unwrap().tensor(&env).unwrap();
        let swap = ComplexMatrix::from_fn(4, 4, |r, c| {
            if (r % 2) * 2 + r / 2 == c {
                crate::matrix::ONE
            } else {
                crate::matrix::ZERO
            }
        });
        let u = kron(&swap, &swap).unwrap();
        let moved = full.evolve(&u).unwrap();
        assert!(system_negativity(&moved).unwrap().abs() < TOL);
        let mi = inaccessible_entanglement(&moved).unwrap();
        assert!((mi - full_cut_negativity(&moved).unwrap()).abs() < TOL);
        assert!((mi - 0.5).abs() < TOL);
    }
}
