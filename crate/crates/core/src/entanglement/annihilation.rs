//! Entanglement-annihilation certification for qubit channels.
//!
//! E is annihilating when (E ⊗ E)[ρ] is separable for every two-qubit ρ. By
//! convexity it suffices to check pure inputs, and for two qubits separability
//! is PPT, so the quantity of interest is
//! min_ψ λ_min(((E ⊗ E)[ψ])^{T_B}). The search is Haar sampling followed by
//! Nelder–Mead refinement from the best samples. A negative value is a real
//! witness; a nonnegative one is only evidence.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{tensor, Channel};
use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigenvalues, ComplexMatrix, C64};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::states::{partial_transpose_set, random_pure_with, seeded_rng, PureState};
use crate::tolerance::EA_THRESHOLD;

const PARAMS: usize = 6;
const MIN_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct EaConfig {
    pub samples: usize,
    pub restarts: usize,
    pub refine_iterations: usize,
    pub seed: u64,
    /// Minimum PT eigenvalue below which a witness is reported.
    pub threshold: f64,
}

impl Default for EaConfig {
    fn default() -> Self {
        Self {
            samples: 2000,
            restarts: 10,
            refine_iterations: 200,
            seed: 0,
            threshold: EA_THRESHOLD,
        }
    }
}

impl EaConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// At least 16 samples and 1 ≤ restarts ≤ samples.
    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::BudgetTooSmall(format!(
                "{} samples, need at least {MIN_SAMPLES}",
                self.samples
            )));
        }
        if self.restarts == 0 || self.restarts > self.samples {
            return Err(Error::BudgetTooSmall(format!(
                "{} restarts, need between 1 and the sample count {}",
                self.restarts, self.samples
            )));
        }
        if !(self.threshold.is_finite() && self.threshold <= 0.0) {
            return Err(Error::Range {
                name: "threshold",
                value: self.threshold,
                range: "(-inf, 0]",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EaVerdict {
    /// No input was found with a negative PT eigenvalue below the threshold.
    Annihilating,
    NotAnnihilating,
}

#[derive(Debug, Clone, Serialize)]
pub struct EaCertificate {
    pub verdict: EaVerdict,
    /// Input state whose output is NPT; present iff the verdict is negative.
    pub witness: Option<PureState>,
    pub min_pt_eigenvalue: f64,
    pub samples_used: usize,
    /// Total Nelder–Mead iterations over all restarts.
    pub refinement_steps: usize,
}

/// Normalized two-qubit amplitudes from three angles and three phases:
/// (cos a, sin a cos b e^{iφ₁}, sin a sin b cos c e^{iφ₂}, sin a sin b sin c e^{iφ₃}).
pub fn state_from_params(x: &[f64]) -> [C64; 4] {
    let (sa, ca) = x[0].sin_cos();
    let (sb, cb) = x[1].sin_cos();
    let (sc, cc) = x[2].sin_cos();
    [
        C64::new(ca, 0.0),
        C64::from_polar(sa * cb, x[3]),
        C64::from_polar(sa * sb * cc, x[4]),
        C64::from_polar(sa * sb * sc, x[5]),
    ]
}

/// Inverse of [`state_from_params`] up to global phase.
fn params_from_state(amps: &[C64]) -> [f64; PARAMS] {
    let global = if amps[0].norm() > 0.0 {
        amps[0].conj() / amps[0].norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let c: Vec<C64> = amps.iter().map(|a| a * global).collect();
    let a = c[0].re.clamp(-1.0, 1.0).acos();
    let tail = (c[2].norm_sqr() + c[3].norm_sqr()).sqrt();
    let b = tail.atan2(c[1].norm());
    let cc = c[3].norm().atan2(c[2].norm());
    [a, b, cc, c[1].arg(), c[2].arg(), c[3].arg()]
}

/// λ_min of the partial transpose of S·vec(|ψ⟩⟨ψ|) for a 4×4 superoperator-of-pair `pair`.
pub fn min_pt_objective(pair: &Channel, amps: &[C64; 4]) -> f64 {
    let rho = ComplexMatrix::from_fn(4, 4, |r, c| amps[r] * amps[c].conj());
    let out = pair.apply(&rho).expect("pair channel acts on 4x4");
    let pt = partial_transpose_set(&out.hermitian_part(), &[2, 2], &[1]).expect("two-qubit dims");
    hermitian_eigenvalues(&pt)
        .expect("4x4 Jacobi converges")
        .first()
        .copied()
        .unwrap_or(f64::NAN)
}

pub fn is_entanglement_annihilating(e: &Channel, cfg: &EaConfig) -> Result<EaCertificate> {
    cfg.validate()?;
    if e.in_dim() != 2 || e.out_dim() != 2 {
        return Err(Error::WrongDims {
            expected: vec![2],
            got: vec![e.in_dim(), e.out_dim()],
        });
    }
    if !e.is_cp() {
        return Err(Error::NotCp {
            min_choi_eigenvalue: e.min_choi_eigenvalue(),
        });
    }
    let pair = tensor(e, e)?;

    // each sample draws from its own stream so results do not depend on scheduling
    let mut sampled: Vec<(f64, usize, [f64; PARAMS])> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(cfg.seed, i as u64);
            let psi = random_pure_with(&[2, 2], &mut rng);
            let x = params_from_state(psi.amplitudes());
            (min_pt_objective(&pair, &state_from_params(&x)), i, x)
        })
        .collect();
    sampled.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let opts = NelderMeadOptions {
        max_iterations: cfg.refine_iterations,
        ..NelderMeadOptions::default()
    };
    let refined: Vec<_> = sampled[..cfg.restarts]
        .par_iter()
        .map(|(_, _, x0)| {
            nelder_mead(
                |x| min_pt_objective(&pair, &state_from_params(x)),
                x0,
                opts,
            )
        })
        .collect();

    let refinement_steps = refined.iter().map(|r| r.iterations).sum();
    let (mut best_value, mut best_x) = (sampled[0].0, sampled[0].2.to_vec());
    for r in &refined {
        if r.value < best_value {
            best_value = r.value;
            best_x = r.x.clone();
        }
    }

    let npt = best_value < cfg.threshold;
    let witness = if npt {
        Some(PureState::new(state_from_params(&best_x).to_vec(), vec![2, 2])?)
    } else {
        None
    };
    Ok(EaCertificate {
        verdict: if npt {
            EaVerdict::NotAnnihilating
        } else {
            EaVerdict::Annihilating
        },
        witness,
        min_pt_eigenvalue: best_value,
        samples_used: cfg.samples,
        refinement_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{gad, GadParams};
    use crate::entanglement::is_entanglement_breaking;

    fn quick(seed: u64) -> EaConfig {
        EaConfig {
            samples: 300,
            restarts: 4,
            refine_iterations: 150,
            seed,
            ..EaConfig::default()
        }
    }

    #[test]
    fn params_round_trip() {
        let mut rng = seeded_rng(3, 0);
        for _ in 0..50 {
            let psi = random_pure_with(&[2, 2], &mut rng);
            let back = state_from_params(&params_from_state(psi.amplitudes()));
            let overlap: C64 = psi.amplitudes().iter().zip(&back).map(|(a, b)| a.conj() * b).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_is_not_annihilating_with_bell_like_witness() {
        let cert = is_entanglement_annihilating(&Channel::identity(2), &quick(1)).unwrap();
        assert_eq!(cert.verdict, EaVerdict::NotAnnihilating);
        assert!((cert.min_pt_eigenvalue + 0.5).abs() < 1e-6, "{}", cert.min_pt_eigenvalue);
        assert!(cert.witness.is_some());
    }

    #[test]
    fn eb_channels_are_annihilating() {
        let g = gad(GadParams::new(1.0, 0.3).unwrap());
        assert!(is_entanglement_breaking(&g).unwrap().breaking);
        let cert = is_entanglement_annihilating(&g, &quick(2)).unwrap();
        assert_eq!(cert.verdict, EaVerdict::Annihilating);
        assert!(cert.witness.is_none());
        assert!(cert.min_pt_eigenvalue >= EA_THRESHOLD);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let g = gad(GadParams::new(0.5, 0.5).unwrap());
        let a = is_entanglement_annihilating(&g, &quick(9)).unwrap();
        let b = is_entanglement_annihilating(&g, &quick(9)).unwrap();
        assert_eq!(a.min_pt_eigenvalue.to_bits(), b.min_pt_eigenvalue.to_bits());
        assert_eq!(a.refinement_steps, b.refinement_steps);
    }

    #[test]
    fn budget_validation() {
        let g = Channel::identity(2);
        let mut cfg = quick(0);
        cfg.samples = 3;
        assert!(matches!(is_entanglement_annihilating(&g, &cfg), Err(Error::BudgetTooSmall(_))));
        let mut cfg = quick(0);
        cfg.restarts = 0;
        assert!(matches!(is_entanglement_annihilating(&g, &cfg), Err(Error::BudgetTooSmall(_))));
        assert!(matches!(
            is_entanglement_annihilating(&Channel::transpose_map(), &quick(0)),
            Err(Error::NotCp { .. })
        ));
    }
}
