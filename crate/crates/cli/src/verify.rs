//! Invariant suites run by `entx verify`, one report entry per group.

use rand::Rng;
use serde::Serialize;

use entx_core::channels::{
    cavity_channel, compose, decay_probability, invert, invertibility_zeros, stinespring_apply, tensor, CavityParams,
    Channel, GadParams, PauliTransfer,
};
use entx_core::entanglement::{concurrence, is_entanglement_annihilating, is_entanglement_breaking, negativity};
use entx_core::matrix::{frobenius_distance, hermitian_eigen, kron, ComplexMatrix};
use entx_core::procedures::{
    ancilla_residual, conservation_audit, evolve_pair, gad_region_scan, invariance_residuals, procedure2_residuals,
    procedure2_stinespring, revival_consistency, revival_map, trace_preservation_defect, CellClass, ScanConfig,
};
use entx_core::states::{
    random_density_with, random_pure_with, random_unitary_with, seeded_rng, thermal_env_state, validate_with, werner,
    DensityMatrix, FOUR_QUBIT_DIMS,
};
use entx_core::{gad, EaConfig, EaVerdict, Tolerances};

use crate::config::{resolve_verify, FileConfig, VerifyArgs, VerifyConfig};
use crate::output::{emit, json_string, Metadata};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Group {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

fn upper(name: &'static str, residual: f64, tolerance: f64, detail: impl Into<String>) -> Group {
    Group {
        name,
        passed: residual <= tolerance,
        residual,
        tolerance,
        detail: detail.into(),
    }
}

type GroupResult = entx_core::Result<Group>;

fn random_params(rng: &mut impl Rng, max_gamma: f64) -> GadParams {
    GadParams::new(rng.gen::<f64>() * max_gamma, rng.gen()).expect("drawn inside the unit square")
}

fn library_channels() -> Vec<Channel> {
    let cavity = CavityParams::new(1.0, 0.1).expect("default cavity parameters");
    let mut out = vec![Channel::identity(2)];
    for (g, n) in [(0.0, 0.0), (0.3, 0.1), (0.75, 0.5), (1.0, 0.4)] {
        out.push(gad(GadParams::new(g, n).expect("valid")));
    }
    for t in [0.0, 3.0, 8.0, 30.0] {
        out.push(cavity_channel(t, &cavity).expect("valid time"));
    }
    out
}

fn eigendecomposition(seed: u64) -> GroupResult {
    let mut rng = seeded_rng(seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = random_density_with(&[2, 2, 2], &mut rng).matrix() - &ComplexMatrix::identity(8).scale_real(0.1);
        let e = hermitian_eigen(&a)?;
        let diag = ComplexMatrix::diag_real(&e.values);
        let rebuilt = &(&e.vectors * &diag) * &e.vectors.adjoint();
        let ortho = &e.vectors.adjoint() * &e.vectors;
        worst = worst
            .max(frobenius_distance(&rebuilt, &a)?)
            .max(frobenius_distance(&ortho, &ComplexMatrix::identity(8))?);
    }
    Ok(upper("matrix.eigendecomposition", worst, 1e-10, "V diag(λ) V† = A and V†V = I on 20 random 8x8"))
}

fn inverse(seed: u64) -> GroupResult {
    let mut rng = seeded_rng(seed, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = &random_unitary_with(6, &mut rng) + &ComplexMatrix::identity(6).scale_real(0.5);
        let inv = entx_core::matrix::invert(&a)?;
        worst = worst.max(frobenius_distance(&(&a * &inv.inverse), &ComplexMatrix::identity(6))?);
    }
    Ok(upper("matrix.inverse", worst, 1e-10, "A A⁻¹ = I on 20 random 6x6"))
}

fn kron_mixed_product(seed: u64) -> GroupResult {
    let mut rng = seeded_rng(seed, 3);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let [a, b, c, d] = [0; 4].map(|_| random_unitary_with(2, &mut rng));
        let lhs = &kron(&a, &b)? * &kron(&c, &d)?;
        let rhs = kron(&(&a * &c), &(&b * &d))?;
        worst = worst.max(frobenius_distance(&lhs, &rhs)?);
    }
    Ok(upper("matrix.kron_mixed_product", worst, 1e-12, "(A⊗B)(C⊗D) = AC⊗BD"))
}

fn state_validity(seed: u64, tol: &Tolerances) -> GroupResult {
    let mut rng = seeded_rng(seed, 4);
    let mut produced: Vec<DensityMatrix> = Vec::new();
    for _ in 0..10 {
        let g = random_params(&mut rng, 0.95);
        let pure = random_pure_with(&[2, 2], &mut rng).density();
        let pipeline = procedure2_stinespring(&pure, &g)?;
        produced.extend(pipeline.full_stages().into_iter().cloned());
        produced.push(pipeline.rho_ab_prime.clone());
        produced.push(tensor(&gad(g), &gad(g))?.apply_state(&pure)?);
    }
    let cavity = CavityParams::new(1.0, 0.1)?;
    for t in [0.0, 5.0, 12.0] {
        produced.push(evolve_pair(&random_pure_with(&[2, 2], &mut rng).density(), &cavity, t)?);
    }
    let mut worst_eig = f64::INFINITY;
    let mut failures = 0;
    for rho in &produced {
        let v = validate_with(rho.matrix(), tol);
        worst_eig = worst_eig.min(v.min_eigenvalue);
        if !v.passed {
            failures += 1;
        }
    }
    Ok(Group {
        name: "states.validity",
        passed: failures == 0,
        residual: worst_eig,
        tolerance: tol.psd_slack,
        detail: format!(
            "{failures} of {} channel and pipeline outputs rejected; residual is the smallest eigenvalue seen",
            produced.len()
        ),
    })
}

fn partial_trace(seed: u64) -> GroupResult {
    let mut rng = seeded_rng(seed, 5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let rho = random_density_with(&[2, 2], &mut rng);
        let env = thermal_env_state(rng.gen())?;
        let full = env.tensor(&rho)?.tensor(&env)?;
        worst = worst.max(frobenius_distance(full.partial_trace(&[1, 2])?.matrix(), rho.matrix())?);
        let a = random_density_with(&[2], &mut rng);
        let b = random_density_with(&[3], &mut rng);
        let ab = a.tensor(&b)?;
        worst = worst.max(frobenius_distance(ab.partial_trace(&[0])?.matrix(), a.matrix())?);
        worst = worst.max(frobenius_distance(ab.partial_trace(&[1])?.matrix(), b.matrix())?);
    }
    Ok(upper("states.partial_trace", worst, 1e-12, "tracing out product factors returns the kept factor"))
}

fn round_trips() -> GroupResult {
    let mut worst: f64 = 0.0;
    let channels = library_channels();
    for ch in &channels {
        let via_kraus = Channel::from_kraus(&ch.kraus_view()?.operators)?;
        let via_choi = Channel::from_choi(ch.in_dim(), ch.out_dim(), ch.choi_view())?;
        let ptm = ch.ptm_view().expect("qubit channel");
        let via_ptm = Channel::from_ptm(ptm)?;
        for other in [&via_kraus, &via_choi, &via_ptm] {
            worst = worst.max(frobenius_distance(ch.superop(), other.superop())?);
        }
    }
    Ok(upper(
        "channels.round_trips",
        worst,
        1e-9,
        format!("Kraus, Choi and PTM round trips over {} library channels", channels.len()),
    ))
}

fn ptm_homomorphism() -> GroupResult {
    let channels = library_channels();
    let mut worst: f64 = 0.0;
    for f in &channels {
        for g in &channels {
            let fg = compose(f, g)?;
            let product = f.ptm_view().expect("qubit").matmul(g.ptm_view().expect("qubit"));
            worst = worst.max(fg.ptm_view().expect("qubit").max_abs_diff(&product));
        }
    }
    Ok(upper("channels.ptm_homomorphism", worst, 1e-12, "ptm(f∘g) = ptm(f) ptm(g)"))
}

/// PTM of the cavity channel read off its Pauli images.
fn cavity_ptm_oracle(prob: f64) -> PauliTransfer {
    let s = prob.sqrt();
    PauliTransfer {
        matrix: [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, s, 0.0, 0.0],
            [0.0, 0.0, -s, 0.0],
            [prob - 1.0, 0.0, 0.0, -prob],
        ],
    }
}

fn invertibility(seed: u64) -> GroupResult {
    let cavity = CavityParams::new(1.0, 0.1)?;
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let t = 60.0 * k as f64 / 49.0;
        let prob = decay_probability(t, &cavity);
        let ptm = cavity_channel(t, &cavity)?.ptm_view().cloned().expect("qubit");
        let oracle = cavity_ptm_oracle(prob);
        worst = worst
            .max(ptm.max_abs_diff(&oracle))
            .max((ptm.determinant() - oracle.determinant()).abs())
            .max((ptm.determinant().abs() - prob * prob).abs());
    }
    let mut misses = 0;
    for t in invertibility_zeros(&cavity, 4) {
        if invert(&cavity_channel(t, &cavity)?).is_ok() {
            misses += 1;
        }
    }
    let mut rng = seeded_rng(seed, 8);
    for _ in 0..20 {
        let g = random_params(&mut rng, 0.99);
        let ptm = gad(g).ptm_view().cloned().expect("qubit");
        worst = worst.max((ptm.determinant() - (1.0 - g.gamma).powi(2)).abs());
        if invert(&gad(g)).is_err() {
            misses += 1;
        }
    }
    if invert(&gad(GadParams::new(1.0, 0.3)?)).is_ok() {
        misses += 1;
    }
    let mut g = upper(
        "channels.invertibility",
        worst,
        1e-9,
        format!("PTM determinants against closed forms; {misses} inversion outcomes wrong"),
    );
    g.passed &= misses == 0;
    Ok(g)
}

fn stinespring(seed: u64) -> GroupResult {
    let mut rng = seeded_rng(seed, 9);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let g = random_params(&mut rng, 1.0);
        let ch = gad(g);
        for _ in 0..10 {
            let rho = random_density_with(&[2], &mut rng);
            let a = stinespring_apply(g.gamma, g.n, &rho)?;
            worst = worst.max(frobenius_distance(a.matrix(), &ch.apply(rho.matrix())?)?);
        }
    }
    Ok(upper("channels.stinespring_vs_kraus", worst, 1e-10, "unitary dilation against Kraus sum"))
}

fn werner_oracles() -> GroupResult {
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let p = k as f64 / 49.0;
        let w = werner(p)?;
        worst = worst
            .max((concurrence(&w)? - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs())
            .max((negativity(&w, &[1])? - ((3.0 * p - 1.0) / 4.0).max(0.0)).abs());
    }
    Ok(upper("entanglement.werner_oracles", worst, 1e-9, "concurrence and negativity on 50 Werner states"))
}

fn local_invariance(seed: u64) -> GroupResult {
    let mut rng = seeded_rng(seed, 11);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let full = random_density_with(&FOUR_QUBIT_DIMS, &mut rng);
        let ua = random_unitary_with(4, &mut rng);
        let ub = random_unitary_with(4, &mut rng);
        let r = invariance_residuals(&full, &ua, &ub)?;
        worst = worst.max(r.local_unitary).max(-r.monotonicity_margin);
        let rho = random_density_with(&[2, 2], &mut rng);
        let ea = random_density_with(&[2], &mut rng);
        let eb = random_density_with(&[2], &mut rng);
        worst = worst.max(ancilla_residual(&rho, &ea, &eb)?);
    }
    Ok(upper(
        "entanglement.cut_invariance",
        worst,
        1e-9,
        "local unitaries, product ancillas and partial traces on 20 random four-qubit states",
    ))
}

fn revival(seed: u64) -> GroupResult {
    let p = CavityParams::new(1.0, 0.1)?;
    let mut rng = seeded_rng(seed, 12);
    let states: Vec<_> = (0..20).map(|_| random_density_with(&[2, 2], &mut rng)).collect();
    let mut worst: f64 = 0.0;
    for (ti, tf) in [(2.0, 6.0), (8.1, 11.0), (15.0, 40.0)] {
        worst = worst
            .max(revival_consistency(&p, ti, tf, &states)?)
            .max(trace_preservation_defect(&revival_map(&p, ti, tf)?)?);
    }
    Ok(upper("procedures.revival_consistency", worst, 1e-8, "revival after t_i evolution equals t_f evolution"))
}

fn procedure2_agreement(seed: u64) -> GroupResult {
    let mut rng = seeded_rng(seed, 13);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let g = random_params(&mut rng, 0.95);
        let rho = random_density_with(&[2, 2], &mut rng);
        let s = procedure2_stinespring(&rho, &g)?;
        worst = worst.max(procedure2_residuals(&rho, &g, &s)?.max());
    }
    Ok(upper("procedures.procedure2_agreement", worst, 1e-9, "channel level and unitary pipeline agree"))
}

fn conservation(seed: u64) -> GroupResult {
    let mut rng = seeded_rng(seed, 14);
    let mut worst: f64 = 0.0;
    let mut failed = 0;
    for _ in 0..20 {
        let g = random_params(&mut rng, 0.95);
        let rho = random_pure_with(&[2, 2], &mut rng).density();
        let audit = conservation_audit(&procedure2_stinespring(&rho, &g)?)?;
        worst = worst
            .max(audit.full_cut_drift)
            .max(audit.ancilla_residual)
            .max(-audit.monotonicity_margin);
        if !audit.passed {
            failed += 1;
        }
    }
    let mut g = upper(
        "procedures.conservation",
        worst,
        1e-9,
        format!("full-cut negativity constant along 20 pipelines, {failed} audits failed"),
    );
    g.passed &= failed == 0;
    Ok(g)
}

fn classifier_sanity(seed: u64) -> GroupResult {
    let grid = gad_region_scan(&ScanConfig {
        gamma_steps: 5,
        n_steps: 3,
        ea: EaConfig {
            samples: 100,
            restarts: 3,
            refine_iterations: 100,
            ..EaConfig::default()
        },
        seed,
        certify_eb_cells: true,
    })?;
    let mut bad = 0usize;
    for c in &grid.cells {
        if c.eb && !c.ea {
            bad += 1;
        }
        if (c.class == CellClass::NonInvertible) != (c.gamma == 1.0) {
            bad += 1;
        }
        if c.gamma == 1.0 && !(c.eb && c.ea) {
            bad += 1;
        }
    }
    let id = Channel::identity(2);
    if is_entanglement_breaking(&id)?.breaking {
        bad += 1;
    }
    let cert = is_entanglement_annihilating(
        &id,
        &EaConfig {
            samples: 100,
            restarts: 3,
            seed,
            ..EaConfig::default()
        },
    )?;
    if cert.verdict != EaVerdict::NotAnnihilating {
        bad += 1;
    }
    Ok(upper(
        "entanglement.classifier_sanity",
        bad as f64,
        0.0,
        "EB implies EA on a 5x3 scan, γ=1 is EB, EA and non-invertible, identity is neither",
    ))
}

#[derive(Serialize)]
struct Report<'a> {
    metadata: Metadata<'a, VerifyConfig>,
    passed: bool,
    groups: &'a [Group],
}

pub fn run(args: &VerifyArgs, file: &FileConfig) -> Result<(), CliError> {
    let cfg = resolve_verify(args, file)?;
    let tol = Tolerances {
        psd_slack: cfg.psd_slack,
        ..Tolerances::default()
    };
    let seed = cfg.seed;
    let groups = [
        eigendecomposition(seed),
        inverse(seed),
        kron_mixed_product(seed),
        state_validity(seed, &tol),
        partial_trace(seed),
        round_trips(),
        ptm_homomorphism(),
        invertibility(seed),
        stinespring(seed),
        werner_oracles(),
        local_invariance(seed),
        revival(seed),
        procedure2_agreement(seed),
        conservation(seed),
        classifier_sanity(seed),
    ]
    .into_iter()
    .collect::<entx_core::Result<Vec<_>>>()?;

    let failed: Vec<String> = groups.iter().filter(|g| !g.passed).map(|g| g.name.to_string()).collect();
    let body = json_string(&Report {
        metadata: Metadata::new("verify", &cfg),
        passed: failed.is_empty(),
        groups: &groups,
    })?;
    emit(args.common.out.as_deref(), &body, None)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed))
    }
}
