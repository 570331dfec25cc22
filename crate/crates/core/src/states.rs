//! Density matrices over registers of small subsystems.
//!
//! Subsystem 0 is the leftmost tensor factor (slowest-varying index). The
//! four-qubit system–environment register used by the procedures is ordered
//! `(E_A, A, B, E_B)`, see [`FOUR_QUBIT_DIMS`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigen, kron, ComplexMatrix, C64, ONE, ZERO};
use crate::tolerance::Tolerances;

/// Layout of the system–environment register: `(E_A, A, B, E_B)`.
pub const FOUR_QUBIT_DIMS: [usize; 4] = [2, 2, 2, 2];
/// `A E_A` side of the locality cut in the four-qubit register.
pub const SIDE_A: [usize; 2] = [0, 1];
/// `B E_B` side of the locality cut in the four-qubit register.
pub const SIDE_B: [usize; 2] = [2, 3];

/// Outcome of [`validate`]. Never an error: the diagnostics are the point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Validation {
    pub passed: bool,
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

/// Checks Hermiticity, unit trace and positivity with the default tolerances.
pub fn validate(m: &ComplexMatrix) -> Validation {
    validate_with(m, &Tolerances::default())
}

pub fn validate_with(m: &ComplexMatrix, tol: &Tolerances) -> Validation {
    if !m.is_square() {
        return Validation {
            passed: false,
            hermiticity_defect: f64::INFINITY,
            trace_defect: f64::INFINITY,
            min_eigenvalue: f64::NAN,
        };
    }
    let hermiticity_defect = m.hermiticity_defect();
    let trace = m.trace();
    let trace_defect = (trace - ONE).norm();
    // eigenvalues of the Hermitian part; the defect is reported separately
    let min_eigenvalue = hermitian_eigen(&m.hermitian_part())
        .map(|e| e.min())
        .unwrap_or(f64::NAN);
    let passed = hermiticity_defect <= tol.hermiticity
        && trace_defect <= tol.trace
        && min_eigenvalue >= -tol.psd_slack;
    Validation {
        passed,
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
    }
}

fn check_dims(dims: &[usize], size: usize) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) || dims.iter().product::<usize>() != size {
        return Err(Error::WrongDims {
            expected: vec![size],
            got: dims.to_vec(),
        });
    }
    Ok(())
}

/// A validated density matrix tagged with its subsystem dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::with_tolerances(matrix, dims, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        check_dims(&dims, matrix.rows())?;
        let v = validate_with(&matrix, tol);
        if !v.passed {
            return Err(Error::InvalidState(format!(
                "hermiticity defect {:e}, trace defect {:e}, min eigenvalue {:e}",
                v.hermiticity_defect, v.trace_defect, v.min_eigenvalue
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// For operators that are density matrices by construction (partial traces,
    /// unitary conjugations and CP images of valid states).
    pub(crate) fn from_trusted(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        Self { matrix, dims }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let m = ComplexMatrix::outer(&psi.amplitudes, &psi.amplitudes);
        Self::from_trusted(m, psi.dims.clone())
    }

    /// Single-subsystem state from a diagonal of probabilities.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(
            ComplexMatrix::diag_real(probabilities),
            vec![probabilities.len()],
        )
    }

    /// Maximally mixed state on the given register.
    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self::from_trusted(ComplexMatrix::identity(d).scale_real(1.0 / d as f64), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn validate(&self) -> Validation {
        validate(&self.matrix)
    }

    /// ρ ⊗ σ, concatenating the subsystem lists.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let m = kron(&self.matrix, &other.matrix)?;
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Ok(Self::from_trusted(m, dims))
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (m, dims) = partial_trace_matrix(&self.matrix, &self.dims, keep)?;
        Ok(Self::from_trusted(m, dims))
    }

    pub fn partial_transpose(&self, subsystem: usize) -> Result<ComplexMatrix> {
        partial_transpose_set(&self.matrix, &self.dims, &[subsystem])
    }

    /// U ρ U† for a unitary on the full register.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        Ok(Self::from_trusted(self.matrix.conjugate_by(u)?, self.dims.clone()))
    }
}

/// Free-function form of [`DensityMatrix::partial_trace`].
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

/// Free-function form of [`DensityMatrix::partial_transpose`].
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<ComplexMatrix> {
    rho.partial_transpose(subsystem)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn check_subset(set: &[usize], count: usize) -> Result<()> {
    for (i, &k) in set.iter().enumerate() {
        if k >= count {
            return Err(Error::BadIndex { index: k, count });
        }
        if set[..i].contains(&k) {
            return Err(Error::BadIndex { index: k, count });
        }
    }
    Ok(())
}

/// Partial trace of any operator on a register. Kept subsystems stay in their
/// original order regardless of the order of `keep`.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>)> {
    check_dims(dims, m.rows())?;
    if keep.is_empty() {
        return Err(Error::BadIndex {
            index: usize::MAX,
            count: dims.len(),
        });
    }
    check_subset(keep, dims.len())?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();

    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kept_strides = strides(&kept_dims);
    let traced_strides = strides(&traced_dims);
    let n = m.rows();

    // split every full index into (kept index, traced index)
    let mut split = Vec::with_capacity(n);
    let mut d = vec![0; dims.len()];
    for idx in 0..n {
        digits(idx, dims, &mut d);
        let k: usize = kept.iter().zip(&kept_strides).map(|(&s, st)| d[s] * st).sum();
        let t: usize = traced.iter().zip(&traced_strides).map(|(&s, st)| d[s] * st).sum();
        split.push((k, t));
    }
    let out_dim: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for r in 0..n {
        let (kr, tr) = split[r];
        for c in 0..n {
            let (kc, tc) = split[c];
            if tr == tc {
                out.set(kr, kc, out.get(kr, kc) + m.get(r, c));
            }
        }
    }
    Ok((out, kept_dims))
}

/// Transposes the listed tensor factors of an operator on a register.
pub fn partial_transpose_set(m: &ComplexMatrix, dims: &[usize], subsystems: &[usize]) -> Result<ComplexMatrix> {
    check_dims(dims, m.rows())?;
    check_subset(subsystems, dims.len())?;
    let n = m.rows();
    let st = strides(dims);
    let mut out = ComplexMatrix::zeros(n, n);
    let mut dr = vec![0; dims.len()];
    let mut dc = vec![0; dims.len()];
    for r in 0..n {
        digits(r, dims, &mut dr);
        for c in 0..n {
            digits(c, dims, &mut dc);
            let (mut r2, mut c2) = (r, c);
            for &k in subsystems {
                let delta = dc[k] as isize - dr[k] as isize;
                r2 = (r2 as isize + delta * st[k] as isize) as usize;
                c2 = (c2 as isize - delta * st[k] as isize) as usize;
            }
            out.set(r2, c2, m.get(r, c));
        }
    }
    Ok(out)
}

/// Lifts `op` (acting on `targets`, in that factor order) to the full register.
pub fn embed_operator(op: &ComplexMatrix, targets: &[usize], dims: &[usize]) -> Result<ComplexMatrix> {
    check_subset(targets, dims.len())?;
    let target_dims: Vec<usize> = targets.iter().map(|&k| dims[k]).collect();
    let sub: usize = target_dims.iter().product();
    if op.shape() != (sub, sub) {
        return Err(Error::DimensionMismatch {
            expected: sub,
            got: op.rows(),
        });
    }
    let tst = strides(&target_dims);
    let n: usize = dims.iter().product();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut dr = vec![0; dims.len()];
    let mut dc = vec![0; dims.len()];
    for r in 0..n {
        digits(r, dims, &mut dr);
        for c in 0..n {
            digits(c, dims, &mut dc);
            let spectators_match = (0..dims.len())
                .filter(|k| !targets.contains(k))
                .all(|k| dr[k] == dc[k]);
            if !spectators_match {
                continue;
            }
            let sr: usize = targets.iter().zip(&tst).map(|(&k, s)| dr[k] * s).sum();
            let sc: usize = targets.iter().zip(&tst).map(|(&k, s)| dc[k] * s).sum();
            out.set(r, c, op.get(sr, sc));
        }
    }
    Ok(out)
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureState {
    amplitudes: Vec<C64>,
    dims: Vec<usize>,
}

impl PureState {
    /// Normalizes `amplitudes`; fails on a zero vector or inconsistent dims.
    pub fn new(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
            dims,
        })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// (1/√d) Σ_j |j⟩|j⟩ on a d×d register.
pub fn maximally_entangled(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::Range {
            name: "d",
            value: d as f64,
            range: "d >= 2",
        });
    }
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; d * d];
    for j in 0..d {
        v[j * d + j] = amp;
    }
    Ok(PureState {
        amplitudes: v,
        dims: vec![d, d],
    })
}

/// Two-qubit |φ⁺⟩⟨φ⁺|.
pub fn phi_plus() -> DensityMatrix {
    maximally_entangled(2).expect("d = 2 is valid").density()
}

fn unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Range {
            name,
            value,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Environment state (1−n)|0⟩⟨0| + n|1⟩⟨1|.
pub fn thermal_env_state(n: f64) -> Result<DensityMatrix> {
    unit_interval("n", n)?;
    Ok(DensityMatrix::from_trusted(
        ComplexMatrix::diag_real(&[1.0 - n, n]),
        vec![2],
    ))
}

/// p·|φ⁺⟩⟨φ⁺| + (1−p)·I/4.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    unit_interval("p", p)?;
    let bell = phi_plus();
    let mixed = ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    let m = &bell.matrix.scale_real(p) + &mixed;
    Ok(DensityMatrix::from_trusted(m, vec![2, 2]))
}

/// Deterministic RNG for a (seed, stream) pair; used for all reproducible fan-out.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random pure state for a fixed seed.
pub fn random_pure(dims: &[usize], seed: u64) -> PureState {
    random_pure_with(dims, &mut seeded_rng(seed, 0))
}

/// Haar-random pure state from normalized complex Gaussian amplitudes.
pub fn random_pure_with<R: rand::Rng + ?Sized>(dims: &[usize], rng: &mut R) -> PureState {
    let d: usize = dims.iter().product();
    loop {
        let v: Vec<C64> = (0..d).map(|_| complex_normal(rng)).collect();
        if let Ok(psi) = PureState::new(v, dims.to_vec()) {
            return psi;
        }
    }
}

/// Random mixed state G G† / Tr(G G†) with G a complex Ginibre matrix.
pub fn random_density_with<R: rand::Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let g = ComplexMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_trusted(m.scale_real(1.0 / tr).hermitian_part(), dims.to_vec())
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary_with<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| complex_normal(rng)).collect();
        for _ in 0..2 {
            for u in &cols {
                let overlap: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= overlap * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(d, d, |r, c| cols[c][r])
}
