use serde::Serialize;

use entx_core::channels::{gad, CavityParams, GadParams};
use entx_core::entanglement::{entanglement_report, full_cut_negativity, EbVerdict, EntanglementReport};
use entx_core::procedures::{
    conservation_audit, default_time_grid, gad_region_scan, procedure1_trajectory, procedure2_residuals,
    procedure2_stinespring, single_revival_map, trajectory_audit, CellClass, ConservationAudit, ExceedingPair,
    Procedure1Config, Procedure1Report, Procedure2Residuals, ScanConfig, TrajectoryAudit, TrajectoryPoint,
};
use entx_core::states::{phi_plus, werner, SIDE_B};
use entx_core::{is_entanglement_annihilating, is_entanglement_breaking, Channel, DensityMatrix, EaConfig, EaVerdict};

use crate::config::{
    resolve_procedure2, resolve_scan, resolve_trajectory, FileConfig, Format, InputState, Procedure2Args,
    Procedure2Config, ScanArgs, ScanRunConfig, TrajectoryArgs, TrajectoryConfig,
};
use crate::output::{csv_f64, csv_opt, emit, json_string, Csv, Metadata};
use crate::CliError;

pub const TRAJECTORY_HEADER: &str = "t,P,concurrence,negativity,invertible";
pub const PAIRS_HEADER: &str =
    "t_i,t_f,P_i,P_f,concurrence_i,concurrence_f,negativity_i,negativity_f,full_cut_negativity,psi_min_output_eigenvalue";
pub const SCAN_HEADER: &str = "gamma,n,class,choi_min_pt_eig,ea_min_pt_eig";
pub const STAGES_HEADER: &str = "stage,full_cut_negativity,ab_negativity,ab_concurrence";

fn run_procedure1(cfg: &TrajectoryConfig) -> Result<(Procedure1Report, TrajectoryAudit, CavityParams), CliError> {
    let params = CavityParams::new(cfg.gamma0, cfg.lambda)?;
    let grid = default_time_grid(&params, cfg.t_max, cfg.t_steps)?;
    let p1 = Procedure1Config {
        death_threshold: cfg.death_threshold,
        exceed_threshold: cfg.exceed_threshold,
        max_condition: cfg.max_condition,
        witness_samples: cfg.witness_samples,
        seed: cfg.seed,
    };
    let rho0 = phi_plus();
    let report = procedure1_trajectory(&rho0, &params, &grid, None, &p1)?;
    let audit = trajectory_audit(&rho0, &report.points)?;
    Ok((report, audit, params))
}

#[derive(Serialize)]
struct AuditSummary {
    initial_negativity: f64,
    monotonicity_margin: f64,
    passed: bool,
}

impl From<&TrajectoryAudit> for AuditSummary {
    fn from(a: &TrajectoryAudit) -> Self {
        Self {
            initial_negativity: a.initial_negativity,
            monotonicity_margin: a.monotonicity_margin,
            passed: a.passed,
        }
    }
}

#[derive(Serialize)]
struct TrajectorySidecar<'a> {
    metadata: Metadata<'a, TrajectoryConfig>,
    grid_points: usize,
    audit: AuditSummary,
    exceeding_pairs: &'a [ExceedingPair],
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    metadata: Metadata<'a, TrajectoryConfig>,
    audit: AuditSummary,
    points: &'a [TrajectoryPoint],
    exceeding_pairs: &'a [ExceedingPair],
}

pub fn trajectory(args: &TrajectoryArgs, file: &FileConfig) -> Result<(), CliError> {
    let cfg = resolve_trajectory(args, file)?;
    let (report, audit, _) = run_procedure1(&cfg)?;
    match cfg.format {
        Format::Csv => {
            let mut csv = Csv::new(TRAJECTORY_HEADER);
            for pt in &report.points {
                csv.row(&[
                    csv_f64(pt.t),
                    csv_f64(pt.p),
                    csv_f64(pt.concurrence),
                    csv_f64(pt.negativity),
                    pt.invertible.to_string(),
                ]);
            }
            let sidecar = json_string(&TrajectorySidecar {
                metadata: Metadata::new("trajectory", &cfg),
                grid_points: report.points.len(),
                audit: (&audit).into(),
                exceeding_pairs: &report.pairs,
            })?;
            emit(args.common.out.as_deref(), &csv.into_string(), Some(&sidecar))
        }
        Format::Json => {
            let body = json_string(&TrajectoryJson {
                metadata: Metadata::new("trajectory", &cfg),
                audit: (&audit).into(),
                points: &report.points,
                exceeding_pairs: &report.pairs,
            })?;
            emit(args.common.out.as_deref(), &body, None)
        }
    }
}

#[derive(Serialize)]
struct PairWithMap<'a> {
    #[serde(flatten)]
    pair: &'a ExceedingPair,
    /// Superoperator of the single-qubit Ψ; the two-qubit map is Ψ ⊗ Ψ.
    psi: Channel,
}

#[derive(Serialize)]
struct Procedure1Json<'a> {
    metadata: Metadata<'a, TrajectoryConfig>,
    audit: AuditSummary,
    pair_count: usize,
    pairs: Vec<PairWithMap<'a>>,
}

pub fn procedure1(args: &TrajectoryArgs, file: &FileConfig) -> Result<(), CliError> {
    let cfg = resolve_trajectory(args, file)?;
    let (report, audit, params) = run_procedure1(&cfg)?;
    match cfg.format {
        Format::Csv => {
            let mut csv = Csv::new(PAIRS_HEADER);
            for p in &report.pairs {
                csv.row(&[
                    csv_f64(p.t_i),
                    csv_f64(p.t_f),
                    csv_f64(p.p_i),
                    csv_f64(p.p_f),
                    csv_f64(p.concurrence_i),
                    csv_f64(p.concurrence_f),
                    csv_f64(p.negativity_i),
                    csv_f64(p.negativity_f),
                    csv_f64(p.full_cut_negativity),
                    csv_f64(p.psi_min_output_eigenvalue),
                ]);
            }
            let sidecar = json_string(&TrajectorySidecar {
                metadata: Metadata::new("procedure1", &cfg),
                grid_points: report.points.len(),
                audit: (&audit).into(),
                exceeding_pairs: &report.pairs,
            })?;
            emit(args.common.out.as_deref(), &csv.into_string(), Some(&sidecar))
        }
        Format::Json => {
            let pairs = report
                .pairs
                .iter()
                .map(|pair| {
                    let (psi, _) = single_revival_map(&params, pair.t_i, pair.t_f)?;
                    Ok(PairWithMap { pair, psi })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let body = json_string(&Procedure1Json {
                metadata: Metadata::new("procedure1", &cfg),
                audit: (&audit).into(),
                pair_count: pairs.len(),
                pairs,
            })?;
            emit(args.common.out.as_deref(), &body, None)
        }
    }
}

#[derive(Serialize)]
struct Stage<'a> {
    state: &'a DensityMatrix,
    report: EntanglementReport,
}

#[derive(Serialize)]
struct CertificateSummary {
    verdict: EaVerdict,
    min_pt_eigenvalue: f64,
    samples_used: usize,
    refinement_steps: usize,
}

#[derive(Serialize)]
struct Procedure2Json<'a> {
    metadata: Metadata<'a, Procedure2Config>,
    entanglement_breaking: EbVerdict,
    entanglement_annihilating: CertificateSummary,
    rho_ab: Stage<'a>,
    rho_full: Stage<'a>,
    rho_full_prime: Stage<'a>,
    rho_ab_prime: Stage<'a>,
    rho_full_dprime: Stage<'a>,
    rho_ab_dprime: Stage<'a>,
    residuals: Procedure2Residuals,
    audit: ConservationAudit,
}

pub fn procedure2(args: &Procedure2Args, file: &FileConfig) -> Result<(), CliError> {
    let cfg = resolve_procedure2(args, file)?;
    let g = GadParams::new(cfg.gamma, cfg.n)?;
    let rho = match cfg.state {
        InputState::PhiPlus => phi_plus(),
        InputState::Werner => werner(cfg.werner_p.unwrap_or(1.0))?,
    };
    let states = procedure2_stinespring(&rho, &g)?;
    let residuals = procedure2_residuals(&rho, &g, &states)?;
    let audit = conservation_audit(&states)?;

    let stage = |s: &'static str| -> Result<(String, f64, f64, Option<f64>), CliError> {
        let (full, ab) = match s {
            "initial" => (&states.rho_full, &states.rho_ab),
            "prime" => (&states.rho_full_prime, &states.rho_ab_prime),
            _ => (&states.rho_full_dprime, &states.rho_ab_dprime),
        };
        let r = entanglement_report(ab, &[1])?;
        Ok((s.to_string(), full_cut_negativity(full)?, r.negativity, r.concurrence))
    };

    match cfg.format {
        Format::Csv => {
            let mut csv = Csv::new(STAGES_HEADER);
            for name in ["initial", "prime", "dprime"] {
                let (label, full, ab, conc) = stage(name)?;
                csv.row(&[label, csv_f64(full), csv_f64(ab), csv_opt(conc)]);
            }
            let sidecar = json_string(&serde_json::json!({
                "metadata": Metadata::new("procedure2", &cfg),
                "residuals": residuals,
                "audit": audit,
            }))?;
            emit(args.common.out.as_deref(), &csv.into_string(), Some(&sidecar))
        }
        Format::Json => {
            let channel = gad(g);
            let eb = is_entanglement_breaking(&channel)?;
            let cert = is_entanglement_annihilating(
                &channel,
                &EaConfig {
                    samples: cfg.ea_samples,
                    seed: cfg.seed,
                    ..EaConfig::default()
                },
            )?;
            let two = |s| entanglement_report(s, &[1]);
            let four = |s| entanglement_report(s, &SIDE_B);
            let body = json_string(&Procedure2Json {
                metadata: Metadata::new("procedure2", &cfg),
                entanglement_breaking: eb,
                entanglement_annihilating: CertificateSummary {
                    verdict: cert.verdict,
                    min_pt_eigenvalue: cert.min_pt_eigenvalue,
                    samples_used: cert.samples_used,
                    refinement_steps: cert.refinement_steps,
                },
                rho_ab: Stage {
                    state: &states.rho_ab,
                    report: two(&states.rho_ab)?,
                },
                rho_full: Stage {
                    state: &states.rho_full,
                    report: four(&states.rho_full)?,
                },
                rho_full_prime: Stage {
                    state: &states.rho_full_prime,
                    report: four(&states.rho_full_prime)?,
                },
                rho_ab_prime: Stage {
                    state: &states.rho_ab_prime,
                    report: two(&states.rho_ab_prime)?,
                },
                rho_full_dprime: Stage {
                    state: &states.rho_full_dprime,
                    report: four(&states.rho_full_dprime)?,
                },
                rho_ab_dprime: Stage {
                    state: &states.rho_ab_dprime,
                    report: two(&states.rho_ab_dprime)?,
                },
                residuals,
                audit,
            })?;
            emit(args.common.out.as_deref(), &body, None)
        }
    }
}

#[derive(Serialize)]
struct ClassCounts {
    noninvertible: usize,
    eb: usize,
    ea_not_eb: usize,
    not_ea: usize,
}

pub fn scan(args: &ScanArgs, file: &FileConfig) -> Result<(), CliError> {
    let cfg: ScanRunConfig = resolve_scan(args, file)?;
    let grid = gad_region_scan(&ScanConfig {
        gamma_steps: cfg.gamma_steps,
        n_steps: cfg.n_steps,
        ea: EaConfig {
            samples: cfg.ea_samples,
            restarts: cfg.restarts,
            refine_iterations: cfg.refine_iterations,
            seed: cfg.seed,
            threshold: cfg.ea_threshold,
        },
        seed: cfg.seed,
        certify_eb_cells: true,
    })?;
    let counts = ClassCounts {
        noninvertible: grid.count(CellClass::NonInvertible),
        eb: grid.count(CellClass::Eb),
        ea_not_eb: grid.count(CellClass::EaNotEb),
        not_ea: grid.count(CellClass::NotEa),
    };
    match cfg.format {
        Format::Csv => {
            let mut csv = Csv::new(SCAN_HEADER);
            for c in &grid.cells {
                csv.row(&[
                    csv_f64(c.gamma),
                    csv_f64(c.n),
                    c.class.to_string(),
                    csv_f64(c.choi_min_pt_eig),
                    csv_opt(c.ea_min_pt_eig),
                ]);
            }
            let sidecar = json_string(&serde_json::json!({
                "metadata": Metadata::new("scan", &cfg),
                "gamma_axis": grid.gamma_axis,
                "n_axis": grid.n_axis,
                "counts": counts,
            }))?;
            emit(args.common.out.as_deref(), &csv.into_string(), Some(&sidecar))
        }
        Format::Json => {
            let body = json_string(&serde_json::json!({
                "metadata": Metadata::new("scan", &cfg),
                "counts": counts,
                "grid": grid,
            }))?;
            emit(args.common.out.as_deref(), &body, None)
        }
    }
}
