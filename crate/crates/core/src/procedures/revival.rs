//! First procedure: undo the cavity decay up to `t_i` and redo it up to `t_f`.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{cavity_channel, compose, decay_probability, invert_with_condition, invertibility_zeros, tensor};
use crate::channels::{CavityParams, Channel};
use crate::entanglement::{concurrence, negativity};
use crate::error::{Error, Result};
use crate::matrix::{frobenius_distance, hermitian_eigenvalues, ComplexMatrix};
use crate::states::{random_pure_with, seeded_rng, DensityMatrix, PureState};

/// P at or below this makes the cavity channel non-invertible.
pub const INVERTIBILITY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub concurrence: f64,
    pub negativity: f64,
    pub invertible: bool,
}

/// Ψ = E(t_f) ∘ E(t_i)⁻¹ on one qubit, with the ∞-norm condition number of E(t_i).
pub fn single_revival_map(p: &CavityParams, t_i: f64, t_f: f64) -> Result<(Channel, f64)> {
    if !(t_i >= 0.0 && t_f >= t_i) {
        return Err(Error::BadTimes { t_i, t_f });
    }
    if decay_probability(t_i, p) <= INVERTIBILITY_THRESHOLD {
        return Err(Error::NonInvertible {
            condition: f64::INFINITY,
        });
    }
    let (undo, condition) = invert_with_condition(&cavity_channel(t_i, p)?)?;
    Ok((compose(&cavity_channel(t_f, p)?, &undo)?, condition))
}

/// Ψ_A ⊗ Ψ_B. Trace- and Hermiticity-preserving, generally not positive.
pub fn revival_map(p: &CavityParams, t_i: f64, t_f: f64) -> Result<Channel> {
    let (psi, _) = single_revival_map(p, t_i, t_f)?;
    tensor(&psi, &psi)
}

/// (E(t) ⊗ E(t))[ρ₀].
pub fn evolve_pair(rho0: &DensityMatrix, p: &CavityParams, t: f64) -> Result<DensityMatrix> {
    let e = cavity_channel(t, p)?;
    tensor(&e, &e)?.apply_state(rho0)
}

/// `steps` evenly spaced times on [0, t_max] merged with the zeros of P in that range.
pub fn default_time_grid(p: &CavityParams, t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::Range {
            name: "t_max",
            value: t_max,
            range: "(0, inf)",
        });
    }
    if steps < 2 {
        return Err(Error::Range {
            name: "t_steps",
            value: steps as f64,
            range: "t_steps >= 2",
        });
    }
    let mut grid: Vec<f64> = (0..steps)
        .map(|k| t_max * k as f64 / (steps - 1) as f64)
        .collect();
    let period = 2.0 * std::f64::consts::PI / p.d();
    let n_max = (t_max / period).ceil() as usize + 1;
    grid.extend(invertibility_zeros(p, n_max).into_iter().filter(|&z| z <= t_max));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

fn point(rho0: &DensityMatrix, p: &CavityParams, t: f64) -> Result<(TrajectoryPoint, DensityMatrix)> {
    let rho = evolve_pair(rho0, p, t)?;
    let prob = decay_probability(t, p);
    Ok((
        TrajectoryPoint {
            t,
            p: prob,
            concurrence: concurrence(&rho)?,
            negativity: negativity(&rho, &[1])?,
            invertible: prob > INVERTIBILITY_THRESHOLD,
        },
        rho,
    ))
}

pub fn trajectory(rho0: &DensityMatrix, p: &CavityParams, t_grid: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    check_pair(rho0)?;
    t_grid
        .par_iter()
        .map(|&t| point(rho0, p, t).map(|(pt, _)| pt))
        .collect()
}

fn check_pair(rho0: &DensityMatrix) -> Result<()> {
    if rho0.dims() != [2, 2] {
        return Err(Error::WrongDims {
            expected: vec![2, 2],
            got: rho0.dims().to_vec(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct Procedure1Config {
    /// Concurrence at or below this counts as separable at `t_i`.
    pub death_threshold: f64,
    /// Concurrence at or above this counts as entangled at `t_f`.
    pub exceed_threshold: f64,
    /// Candidates `t_i` whose cavity map is worse conditioned are skipped.
    pub max_condition: f64,
    /// Pure qubit inputs sampled when searching for a negative output of Ψ.
    pub witness_samples: usize,
    pub seed: u64,
}

impl Default for Procedure1Config {
    fn default() -> Self {
        Self {
            death_threshold: 1e-6,
            exceed_threshold: 0.01,
            max_condition: 1e8,
            witness_samples: 1000,
            seed: 0,
        }
    }
}

/// A separable `ρ(t_i)` mapped by a local Ψ onto an entangled `ρ(t_f)`.
#[derive(Debug, Clone, Serialize)]
pub struct ExceedingPair {
    pub t_i: f64,
    pub t_f: f64,
    pub p_i: f64,
    pub p_f: f64,
    pub concurrence_i: f64,
    pub concurrence_f: f64,
    /// Concurrence at `t_i` is exactly zero, not just below the threshold.
    pub separable_exact: bool,
    pub negativity_i: f64,
    pub negativity_f: f64,
    /// System–environment negativity; fixed at its initial value by any
    /// product-environment dilation, so it cannot rise with `negativity_f`.
    pub full_cut_negativity: f64,
    pub condition_number: f64,
    /// ‖(Ψ⊗Ψ)[ρ(t_i)] − ρ(t_f)‖_F
    pub reproduction_gap: f64,
    /// Smallest output eigenvalue of the single-qubit Ψ over sampled pure inputs.
    pub psi_min_output_eigenvalue: f64,
    pub psi_witness: PureState,
    #[serde(skip)]
    pub revival: Channel,
}

#[derive(Debug, Clone, Serialize)]
pub struct Procedure1Report {
    pub points: Vec<TrajectoryPoint>,
    pub initial_negativity: f64,
    pub pairs: Vec<ExceedingPair>,
}

/// Minimum eigenvalue of Ψ[|ψ⟩⟨ψ|] over `samples` Haar-random qubit states.
pub fn nonpositivity_search(psi: &Channel, samples: usize, seed: u64) -> Result<(f64, PureState)> {
    if psi.in_dim() != 2 || samples == 0 {
        return Err(Error::BudgetTooSmall(format!(
            "need a qubit map and at least one sample, got dim {} and {samples} samples",
            psi.in_dim()
        )));
    }
    let results: Vec<(f64, usize, PureState)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let state = random_pure_with(&[2], &mut seeded_rng(seed, k as u64));
            let out = psi.apply(state.density().matrix())?;
            let min = hermitian_eigenvalues(&out.hermitian_part())?[0];
            Ok((min, k, state))
        })
        .collect::<Result<_>>()?;
    let (min, _, state) = results
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("samples > 0");
    Ok((min, state))
}

/// Evolves ρ₀ over `t_grid` and pairs every separable candidate `t_i` with
/// every later entangled grid time `t_f`. With `candidates = None` the grid
/// itself supplies the `t_i` values and those too close to a zero of P are
/// skipped; explicitly requested candidates at a zero are an error.
pub fn procedure1_trajectory(
    rho0: &DensityMatrix,
    p: &CavityParams,
    t_grid: &[f64],
    candidates: Option<&[f64]>,
    cfg: &Procedure1Config,
) -> Result<Procedure1Report> {
    check_pair(rho0)?;
    let evolved: Vec<(TrajectoryPoint, DensityMatrix)> = t_grid
        .par_iter()
        .map(|&t| point(rho0, p, t))
        .collect::<Result<_>>()?;
    let initial_negativity = negativity(rho0, &[1])?;

    let explicit = candidates.is_some();
    let starts: Vec<(TrajectoryPoint, DensityMatrix)> = match candidates {
        Some(ts) => ts.iter().map(|&t| point(rho0, p, t)).collect::<Result<_>>()?,
        None => evolved.clone(),
    };

    let mut jobs = Vec::new();
    for (start, rho_i) in &starts {
        if start.concurrence > cfg.death_threshold {
            continue;
        }
        if !start.invertible {
            if explicit {
                return Err(Error::NonInvertible {
                    condition: f64::INFINITY,
                });
            }
            continue;
        }
        let condition = match invert_with_condition(&cavity_channel(start.t, p)?) {
            Ok((_, c)) => c,
            Err(Error::NonInvertible { .. }) if !explicit => continue,
            Err(e) => return Err(e),
        };
        if condition > cfg.max_condition {
            continue;
        }
        for (end, rho_f) in &evolved {
            if end.t > start.t && end.concurrence >= cfg.exceed_threshold {
                jobs.push((start, rho_i, end, rho_f));
            }
        }
    }

    let pairs = jobs
        .into_par_iter()
        .enumerate()
        .map(|(k, (start, rho_i, end, rho_f))| {
            let (psi, condition) = single_revival_map(p, start.t, end.t)?;
            let revival = tensor(&psi, &psi)?;
            let reproduced = revival.apply(rho_i.matrix())?;
            let gap = frobenius_distance(&reproduced, rho_f.matrix())?;
            let (min_eig, witness) = nonpositivity_search(&psi, cfg.witness_samples, cfg.seed ^ k as u64)?;
            Ok(ExceedingPair {
                t_i: start.t,
                t_f: end.t,
                p_i: start.p,
                p_f: end.p,
                concurrence_i: start.concurrence,
                concurrence_f: end.concurrence,
                separable_exact: start.concurrence == 0.0,
                negativity_i: start.negativity,
                negativity_f: end.negativity,
                full_cut_negativity: initial_negativity,
                condition_number: condition,
                reproduction_gap: gap,
                psi_min_output_eigenvalue: min_eig,
                psi_witness: witness,
                revival,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Procedure1Report {
        points: evolved.into_iter().map(|(pt, _)| pt).collect(),
        initial_negativity,
        pairs,
    })
}

/// Largest ‖(Ψ⊗Ψ)[ρ(t_i)] − ρ(t_f)‖_F over the supplied initial states.
pub fn revival_consistency(p: &CavityParams, t_i: f64, t_f: f64, states: &[DensityMatrix]) -> Result<f64> {
    let psi = revival_map(p, t_i, t_f)?;
    let mut worst: f64 = 0.0;
    for rho0 in states {
        let from_i = psi.apply(evolve_pair(rho0, p, t_i)?.matrix())?;
        let direct = evolve_pair(rho0, p, t_f)?;
        worst = worst.max(frobenius_distance(&from_i, direct.matrix())?);
    }
    Ok(worst)
}

/// max |tr Ψ[B] − tr B| over the matrix units B of the input space.
pub fn trace_preservation_defect(map: &Channel) -> Result<f64> {
    let d = map.in_dim();
    let mut worst: f64 = 0.0;
    for r in 0..d {
        for c in 0..d {
            let mut unit = ComplexMatrix::zeros(d, d);
            unit.set(r, c, crate::matrix::ONE);
            let out = map.apply(&unit)?;
            worst = worst.max((out.trace() - unit.trace()).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{phi_plus, random_density_with};

    fn params() -> CavityParams {
        CavityParams::new(1.0, 0.1).unwrap()
    }

    #[test]
    fn equal_times_give_identity() {
        let m = revival_map(&params(), 3.0, 3.0).unwrap();
        assert!(frobenius_distance(m.superop(), Channel::identity(4).superop()).unwrap() < 1e-12);
    }

    #[test]
    fn bad_times_and_zeros() {
        let p = params();
        assert!(matches!(revival_map(&p, 5.0, 4.0), Err(Error::BadTimes { .. })));
        let t1 = invertibility_zeros(&p, 1)[0];
        assert!(matches!(revival_map(&p, t1, 20.0), Err(Error::NonInvertible { .. })));
    }

    #[test]
    fn consistent_with_direct_evolution_and_trace_preserving() {
        let p = params();
        let mut rng = seeded_rng(21, 0);
        let states: Vec<_> = (0..50).map(|_| random_density_with(&[2, 2], &mut rng)).collect();
        for (ti, tf) in [(2.0, 5.0), (12.0, 30.0), (0.0, 44.0)] {
            assert!(revival_consistency(&p, ti, tf, &states).unwrap() <= 1e-8);
            assert!(trace_preservation_defect(&revival_map(&p, ti, tf).unwrap()).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn grid_contains_zeros() {
        let p = params();
        let grid = default_time_grid(&p, 60.0, 400).unwrap();
        assert_eq!(grid[0], 0.0);
        assert_eq!(*grid.last().unwrap(), 60.0);
        for z in invertibility_zeros(&p, 4) {
            assert!(grid.contains(&z));
        }
        assert_eq!(grid.len(), 404);
    }

    #[test]
    fn product_state_never_entangled() {
        let p = params();
        let a = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let rho0 = a.tensor(&DensityMatrix::diagonal(&[0.0, 1.0]).unwrap()).unwrap();
        let grid = default_time_grid(&p, 60.0, 120).unwrap();
        for pt in trajectory(&rho0, &p, &grid).unwrap() {
            assert!(pt.concurrence <= 1e-12 && pt.negativity == 0.0);
        }
    }

    #[test]
    fn bell_state_starts_maximally_entangled() {
        let pts = trajectory(&phi_plus(), &params(), &[0.0, 1.0]).unwrap();
        assert!((pts[0].concurrence - 1.0).abs() < 1e-9);
        assert!((pts[0].negativity - 0.5).abs() < 1e-9);
        assert!(pts[0].invertible && pts[0].p == 1.0);
        assert!(pts[1].concurrence < pts[0].concurrence);
    }

    #[test]
    fn explicit_candidate_at_zero_is_rejected() {
        let p = params();
        let t1 = invertibility_zeros(&p, 1)[0];
        let r = procedure1_trajectory(&phi_plus(), &p, &[0.0, 20.0], Some(&[t1]), &Procedure1Config::default());
        assert!(matches!(r, Err(Error::NonInvertible { .. })));
    }
}
