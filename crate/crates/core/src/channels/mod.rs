//! Linear maps on operators.
//!
//! A [`Channel`] is stored as its superoperator acting on column-stacked
//! operators (`vec(ρ)[c·d + r] = ρ[r, c]`), so composition is a matrix product
//! and inversion is a matrix inverse. The Choi matrix, Kraus operators (when
//! the map is CP) and, for qubit maps, the Pauli transfer matrix are computed
//! once at construction.
//!
//! The type deliberately admits maps that are merely Hermiticity-preserving:
//! inverses of channels and the revival maps built from them are legal values
//! here, they just report `is_cp() == false`.

mod cavity;
mod gad;

pub use cavity::{cavity_channel, decay_probability, invertibility_zeros, CavityParams};
pub use gad::{gad, gad_dilation_unitary, stinespring_apply, GadParams};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{self, hermitian_eigen, ComplexMatrix, C64, DEFAULT_DIMENSION_CAP, ZERO};
use crate::states::DensityMatrix;

/// Relative tolerance for the cached CP / TP / Hermiticity verdicts.
pub const FLAG_TOL: f64 = 1e-10;

/// Kraus eigenvalues below this fraction of the largest one are dropped.
const KRAUS_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChannelFlags {
    pub is_cp: bool,
    pub is_tp: bool,
    pub is_hermitian_preserving: bool,
}

/// Operator-sum representation Σ K ρ K†.
#[derive(Debug, Clone, Serialize)]
pub struct KrausRep {
    pub operators: Vec<ComplexMatrix>,
}

impl KrausRep {
    /// ‖Σ K†K − I‖_F.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.operators[0].cols();
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, k| &acc + &(&k.adjoint() * k));
        matrix::frobenius_distance(&sum, &ComplexMatrix::identity(d)).unwrap_or(f64::INFINITY)
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = self.operators[0].rows();
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, k| &acc + &(&(k * rho) * &k.adjoint()))
    }
}

/// Real 4×4 matrix R_ij = ½ Tr(σ_i E[σ_j]), Paulis ordered (I, X, Y, Z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PauliTransfer {
    pub matrix: [[f64; 4]; 4],
}

impl PauliTransfer {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| self.matrix[k][k])
    }

    pub fn matmul(&self, other: &PauliTransfer) -> PauliTransfer {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..4).map(|k| self.matrix[i][k] * other.matrix[k][j]).sum();
            }
        }
        PauliTransfer { matrix: m }
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let mut a = self.matrix;
        let mut det = 1.0;
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .unwrap();
            if a[pivot][col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            for r in col + 1..4 {
                let f = a[r][col] / a[col][col];
                for c in col..4 {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
        det
    }

    pub fn max_abs_diff(&self, other: &PauliTransfer) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.matrix[i][j] - other.matrix[i][j]).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Channel {
    in_dim: usize,
    out_dim: usize,
    superop: ComplexMatrix,
    #[serde(skip)]
    choi: ComplexMatrix,
    min_choi_eigenvalue: f64,
    flags: ChannelFlags,
    #[serde(skip)]
    kraus: Option<KrausRep>,
    ptm: Option<PauliTransfer>,
}

impl Channel {
    /// Builds a map from its superoperator (size `out² × in²`).
    pub fn from_superop(in_dim: usize, out_dim: usize, superop: ComplexMatrix) -> Result<Self> {
        if superop.shape() != (out_dim * out_dim, in_dim * in_dim) {
            return Err(Error::ShapeMismatch {
                left: superop.shape(),
                right: (out_dim * out_dim, in_dim * in_dim),
            });
        }
        let choi = choi_from_superop(in_dim, out_dim, &superop);
        let scale = choi.max_abs().max(1.0);
        let is_hermitian_preserving = choi.hermiticity_defect() <= FLAG_TOL * scale;

        let (min_choi_eigenvalue, kraus) = if is_hermitian_preserving {
            let eig = hermitian_eigen(&choi.hermitian_part())?;
            let min = eig.min();
            let kraus = (min >= -FLAG_TOL * scale).then(|| kraus_from_eigen(in_dim, out_dim, &eig));
            (min, kraus)
        } else {
            (f64::NAN, None)
        };
        let is_cp = kraus.is_some();

        let s_scale = superop.max_abs().max(1.0);
        let is_tp = (0..in_dim).all(|i| {
            (0..in_dim).all(|j| {
                let tr: C64 = (0..out_dim)
                    .map(|a| superop.get(a * out_dim + a, j * in_dim + i))
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                (tr - expected).norm() <= FLAG_TOL * s_scale
            })
        });

        let mut ch = Self {
            in_dim,
            out_dim,
            superop,
            choi,
            min_choi_eigenvalue,
            flags: ChannelFlags {
                is_cp,
                is_tp,
                is_hermitian_preserving,
            },
            kraus,
            ptm: None,
        };
        if in_dim == 2 && out_dim == 2 {
            ch.ptm = Some(ch.compute_ptm());
        }
        Ok(ch)
    }

    /// Builds the map whose action on every matrix unit |i⟩⟨j| is given by `f`.
    pub fn from_action(
        in_dim: usize,
        out_dim: usize,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        let mut s = ComplexMatrix::zeros(out_dim * out_dim, in_dim * in_dim);
        for j in 0..in_dim {
            for i in 0..in_dim {
                let mut unit = ComplexMatrix::zeros(in_dim, in_dim);
                unit.set(i, j, C64::new(1.0, 0.0));
                let out = f(&unit);
                if out.shape() != (out_dim, out_dim) {
                    return Err(Error::DimensionMismatch {
                        expected: out_dim,
                        got: out.rows(),
                    });
                }
                for (r, z) in out.vec_columns().into_iter().enumerate() {
                    s.set(r, j * in_dim + i, z);
                }
            }
        }
        Self::from_superop(in_dim, out_dim, s)
    }

    /// Σ conj(K) ⊗ K.
    pub fn from_kraus(operators: &[ComplexMatrix]) -> Result<Self> {
        let first = operators.first().ok_or(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        })?;
        let (out_dim, in_dim) = first.shape();
        let mut s = ComplexMatrix::zeros(out_dim * out_dim, in_dim * in_dim);
        for k in operators {
            if k.shape() != (out_dim, in_dim) {
                return Err(Error::ShapeMismatch {
                    left: k.shape(),
                    right: (out_dim, in_dim),
                });
            }
            s = &s + &matrix::kron(&k.conj(), k)?;
        }
        Self::from_superop(in_dim, out_dim, s)
    }

    /// Qubit map from its Pauli transfer matrix.
    pub fn from_ptm(ptm: &PauliTransfer) -> Result<Self> {
        let paulis: Vec<ComplexMatrix> = (0..4).map(matrix::pauli).collect();
        Self::from_action(2, 2, |unit| {
            let mut out = ComplexMatrix::zeros(2, 2);
            for (j, sj) in paulis.iter().enumerate() {
                let coeff = (sj * unit).trace() * 0.5;
                if coeff == ZERO {
                    continue;
                }
                for (i, si) in paulis.iter().enumerate() {
                    out = &out + &si.scale(coeff * ptm.matrix[i][j]);
                }
            }
            out
        })
    }

    /// Builds the map from its (unnormalized) Choi matrix Σ |i⟩⟨j| ⊗ E(|i⟩⟨j|).
    pub fn from_choi(in_dim: usize, out_dim: usize, choi: &ComplexMatrix) -> Result<Self> {
        if choi.shape() != (in_dim * out_dim, in_dim * out_dim) {
            return Err(Error::ShapeMismatch {
                left: choi.shape(),
                right: (in_dim * out_dim, in_dim * out_dim),
            });
        }
        let mut s = ComplexMatrix::zeros(out_dim * out_dim, in_dim * in_dim);
        for i in 0..in_dim {
            for j in 0..in_dim {
                for a in 0..out_dim {
                    for b in 0..out_dim {
                        s.set(b * out_dim + a, j * in_dim + i, choi.get(i * out_dim + a, j * out_dim + b));
                    }
                }
            }
        }
        Self::from_superop(in_dim, out_dim, s)
    }

    pub fn identity(d: usize) -> Self {
        Self::from_superop(d, d, ComplexMatrix::identity(d * d)).expect("identity is well formed")
    }

    /// ρ ↦ ρᵀ on a qubit: positive but not completely positive.
    pub fn transpose_map() -> Self {
        Self::from_action(2, 2, |m| m.transpose()).expect("transpose is well formed")
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn superop(&self) -> &ComplexMatrix {
        &self.superop
    }

    pub fn flags(&self) -> ChannelFlags {
        self.flags
    }

    pub fn is_cp(&self) -> bool {
        self.flags.is_cp
    }

    pub fn is_tp(&self) -> bool {
        self.flags.is_tp
    }

    pub fn is_hermitian_preserving(&self) -> bool {
        self.flags.is_hermitian_preserving
    }

    /// Smallest eigenvalue of the Choi matrix (NaN when the map is not Hermiticity-preserving).
    pub fn min_choi_eigenvalue(&self) -> f64 {
        self.min_choi_eigenvalue
    }

    /// Unnormalized Choi matrix Σ |i⟩⟨j| ⊗ E(|i⟩⟨j|).
    pub fn choi_view(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn kraus_view(&self) -> Result<&KrausRep> {
        self.kraus.as_ref().ok_or(Error::NotCp {
            min_choi_eigenvalue: self.min_choi_eigenvalue,
        })
    }

    /// Pauli transfer matrix; `None` unless the map acts on a single qubit.
    pub fn ptm_view(&self) -> Option<&PauliTransfer> {
        self.ptm.as_ref()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.in_dim, self.in_dim) {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim,
                got: rho.rows(),
            });
        }
        let out = self.superop.matvec(&rho.vec_columns())?;
        Ok(ComplexMatrix::unvec_columns(&out, self.out_dim, self.out_dim))
    }

    /// Applies a CP and TP map to a state, keeping the subsystem layout when
    /// the dimensions are unchanged.
    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if !(self.is_cp() && self.is_tp()) {
            return Err(Error::NotCp {
                min_choi_eigenvalue: self.min_choi_eigenvalue,
            });
        }
        let out = self.apply(rho.matrix())?;
        let dims = if self.in_dim == self.out_dim {
            rho.dims().to_vec()
        } else {
            vec![self.out_dim]
        };
        Ok(DensityMatrix::from_trusted(out.hermitian_part(), dims))
    }

    fn compute_ptm(&self) -> PauliTransfer {
        let paulis: Vec<ComplexMatrix> = (0..4).map(matrix::pauli).collect();
        let mut m = [[0.0; 4]; 4];
        for (j, sj) in paulis.iter().enumerate() {
            let image = self.apply(sj).expect("qubit map");
            for (i, si) in paulis.iter().enumerate() {
                m[i][j] = 0.5 * (si * &image).trace().re;
            }
        }
        PauliTransfer { matrix: m }
    }
}

fn choi_from_superop(in_dim: usize, out_dim: usize, s: &ComplexMatrix) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(in_dim * out_dim, in_dim * out_dim);
    for i in 0..in_dim {
        for jj in 0..in_dim {
            for a in 0..out_dim {
                for b in 0..out_dim {
                    j.set(i * out_dim + a, jj * out_dim + b, s.get(b * out_dim + a, jj * in_dim + i));
                }
            }
        }
    }
    j
}

fn kraus_from_eigen(in_dim: usize, out_dim: usize, eig: &matrix::HermitianEigen) -> KrausRep {
    let largest = eig.max().max(0.0);
    let mut operators = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate().rev() {
        if lambda <= KRAUS_CUTOFF * largest || lambda <= 0.0 {
            continue;
        }
        let amp = lambda.sqrt();
        let v = eig.vectors.column(k);
        operators.push(ComplexMatrix::from_fn(out_dim, in_dim, |a, i| v[i * out_dim + a] * amp));
    }
    if operators.is_empty() {
        operators.push(ComplexMatrix::zeros(out_dim, in_dim));
    }
    KrausRep { operators }
}

/// `f ∘ g` (g first).
pub fn compose(f: &Channel, g: &Channel) -> Result<Channel> {
    if g.out_dim != f.in_dim {
        return Err(Error::DimensionMismatch {
            expected: f.in_dim,
            got: g.out_dim,
        });
    }
    Channel::from_superop(g.in_dim, f.out_dim, f.superop.matmul(&g.superop)?)
}

/// `f ⊗ g`, with `f` on the left tensor factor.
pub fn tensor(f: &Channel, g: &Channel) -> Result<Channel> {
    let in_dim = f.in_dim * g.in_dim;
    let out_dim = f.out_dim * g.out_dim;
    let (rows, cols) = (out_dim * out_dim, in_dim * in_dim);
    if rows > DEFAULT_DIMENSION_CAP || cols > DEFAULT_DIMENSION_CAP {
        return Err(Error::DimensionCap {
            rows,
            cols,
            cap: DEFAULT_DIMENSION_CAP,
        });
    }
    let images = |ch: &Channel| -> Vec<Vec<ComplexMatrix>> {
        (0..ch.in_dim)
            .map(|i| {
                (0..ch.in_dim)
                    .map(|j| {
                        let col = ch.superop.column(j * ch.in_dim + i);
                        ComplexMatrix::unvec_columns(&col, ch.out_dim, ch.out_dim)
                    })
                    .collect()
            })
            .collect()
    };
    let fi = images(f);
    let gi = images(g);
    let mut s = ComplexMatrix::zeros(rows, cols);
    for i1 in 0..f.in_dim {
        for j1 in 0..f.in_dim {
            for i2 in 0..g.in_dim {
                for j2 in 0..g.in_dim {
                    let block = matrix::kron(&fi[i1][j1], &gi[i2][j2])?;
                    let row = i1 * g.in_dim + i2;
                    let col = j1 * g.in_dim + j2;
                    for (r, z) in block.vec_columns().into_iter().enumerate() {
                        s.set(r, col * in_dim + row, z);
                    }
                }
            }
        }
    }
    Channel::from_superop(in_dim, out_dim, s)
}

/// Inverse map together with the ∞-norm condition number of the superoperator.
pub fn invert_with_condition(e: &Channel) -> Result<(Channel, f64)> {
    if e.in_dim != e.out_dim {
        return Err(Error::DimensionMismatch {
            expected: e.in_dim,
            got: e.out_dim,
        });
    }
    match matrix::invert(&e.superop) {
        Ok(inv) => Ok((
            Channel::from_superop(e.in_dim, e.in_dim, inv.inverse)?,
            inv.condition_number,
        )),
        Err(Error::Singular { condition }) => Err(Error::NonInvertible { condition }),
        Err(other) => Err(other),
    }
}

/// Linear inverse on operator space. Trace- and Hermiticity-preserving when
/// `e` is, but generally not CP.
pub fn invert(e: &Channel) -> Result<Channel> {
    invert_with_condition(e).map(|(c, _)| c)
}

pub fn apply(e: &Channel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    e.apply(rho)
}

pub fn is_cp(e: &Channel) -> bool {
    e.is_cp()
}

pub fn is_tp(e: &Channel) -> bool {
    e.is_tp()
}

pub fn kraus_view(e: &Channel) -> Result<&KrausRep> {
    e.kraus_view()
}

pub fn choi_view(e: &Channel) -> &ComplexMatrix {
    e.choi_view()
}

pub fn ptm_view(e: &Channel) -> Option<&PauliTransfer> {
    e.ptm_view()
}

/// (f ⊗ id)[ρ] on a bipartite operator whose left factor has dimension `f.in_dim`.
pub fn apply_on_left(f: &Channel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let other = rho.rows() / f.in_dim;
    tensor(f, &Channel::identity(other))?.apply(rho)
}

/// (id ⊗ g)[ρ] on a bipartite operator whose right factor has dimension `g.in_dim`.
pub fn apply_on_right(g: &Channel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let other = rho.rows() / g.in_dim;
    tensor(&Channel::identity(other), g)?.apply(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{frobenius_distance, kron, pauli, pauli_x, pauli_z};
    use crate::states::{phi_plus, random_density_with, seeded_rng};

    const TOL: f64 = 1e-9;

    #[test]
    fn identity_channel_acts_trivially() {
        let id = Channel::identity(2);
        let mut rng = seeded_rng(1, 0);
        let rho = random_density_with(&[2], &mut rng);
        let out = id.apply(rho.matrix()).unwrap();
        assert!(frobenius_distance(&out, rho.matrix()).unwrap() < 1e-15);
        assert!(id.is_cp() && id.is_tp());
        let k = id.kraus_view().unwrap();
        assert_eq!(k.operators.len(), 1);
        // single Kraus operator equal to I up to a phase
        let op = &k.operators[0];
        let phase = op.get(0, 0);
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        let normalized = op.scale(phase.conj());
        assert!(frobenius_distance(&normalized, &ComplexMatrix::identity(2)).unwrap() < 1e-12);
    }

    #[test]
    fn transpose_map_is_tp_not_cp() {
        let t = Channel::transpose_map();
        assert!(!t.is_cp());
        assert!(t.is_tp());
        assert_eq!(t.ptm_view().unwrap().diagonal(), [1.0, 1.0, -1.0, 1.0]);
        assert!(matches!(t.kraus_view(), Err(Error::NotCp { .. })));
        let from_ptm = Channel::from_ptm(t.ptm_view().unwrap()).unwrap();
        assert!(frobenius_distance(from_ptm.superop(), t.superop()).unwrap() < 1e-15);
    }

    #[test]
    fn compose_with_identity() {
        let g = gad(GadParams::new(0.4, 0.2).unwrap());
        let c = compose(&g, &Channel::identity(2)).unwrap();
        assert!(frobenius_distance(c.superop(), g.superop()).unwrap() < 1e-15);
        let c = compose(&Channel::identity(2), &g).unwrap();
        assert!(frobenius_distance(c.superop(), g.superop()).unwrap() < 1e-15);
        assert!(matches!(
            compose(&Channel::identity(4), &g),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn compose_gad_scales_coherences() {
        let (g1, g2, n) = (0.3, 0.55, 0.2);
        let c = compose(
            &gad(GadParams::new(g1, n).unwrap()),
            &gad(GadParams::new(g2, n).unwrap()),
        )
        .unwrap();
        let out = c.apply(&pauli_x()).unwrap();
        let expected = pauli_x().scale_real((1.0f64 - g1).sqrt() * (1.0f64 - g2).sqrt());
        assert!(frobenius_distance(&out, &expected).unwrap() < 1e-12);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let g = gad(GadParams::new(0.5, 0.3).unwrap());
        let inv = invert(&g).unwrap();
        let c = compose(&inv, &g).unwrap();
        assert!(frobenius_distance(c.superop(), Channel::identity(2).superop()).unwrap() < TOL);
        let inv_id = invert(&Channel::identity(2)).unwrap();
        assert!(frobenius_distance(inv_id.superop(), Channel::identity(2).superop()).unwrap() < 1e-15);
    }

    #[test]
    fn gad_inverse_is_tp_but_not_cp() {
        let inv = invert(&gad(GadParams::new(0.5, 0.3).unwrap())).unwrap();
        assert!(!inv.is_cp());
        assert!(inv.is_tp());
        assert!(inv.is_hermitian_preserving());
        assert!(inv.min_choi_eigenvalue() < -1e-3);
    }

    #[test]
    fn gad_inverse_ptm_matches_hand_inverse() {
        // oracle: invert the affine Bloch map x,y ↦ s·x,y ; z ↦ (1−γ)z + γ(1−2n)
        let (gamma, n) = (0.35, 0.15);
        let s = (1.0f64 - gamma).sqrt();
        let inv = invert(&gad(GadParams::new(gamma, n).unwrap())).unwrap();
        let r = inv.ptm_view().unwrap();
        let d = r.diagonal();
        assert!((d[0] - 1.0).abs() < TOL);
        assert!((d[1] - 1.0 / s).abs() < TOL);
        assert!((d[2] - 1.0 / s).abs() < TOL);
        assert!((d[3] - 1.0 / (1.0 - gamma)).abs() < TOL);
        let shift = -gamma * (1.0 - 2.0 * n) / (1.0 - gamma);
        assert!((r.get(3, 0) - shift).abs() < TOL);
        assert!(r.get(0, 1).abs() < TOL && r.get(0, 3).abs() < TOL);
    }

    #[test]
    fn tensor_identity_and_product_action() {
        let id4 = tensor(&Channel::identity(2), &Channel::identity(2)).unwrap();
        assert!(frobenius_distance(id4.superop(), Channel::identity(4).superop()).unwrap() < 1e-15);

        let g = gad(GadParams::new(0.6, 0.1).unwrap());
        let t = tensor(&g, &Channel::identity(2)).unwrap();
        let mut rng = seeded_rng(7, 0);
        let ra = random_density_with(&[2], &mut rng);
        let rb = random_density_with(&[2], &mut rng);
        let input = kron(ra.matrix(), rb.matrix()).unwrap();
        let out = t.apply(&input).unwrap();
        let expected = kron(&g.apply(ra.matrix()).unwrap(), rb.matrix()).unwrap();
        assert!(frobenius_distance(&out, &expected).unwrap() < 1e-12);
    }

    #[test]
    fn tensor_equals_sequential_single_sided_maps() {
        let g = gad(GadParams::new(0.7, 0.4).unwrap());
        let both = tensor(&g, &g).unwrap().apply(phi_plus().matrix()).unwrap();
        let left = apply_on_left(&g, phi_plus().matrix()).unwrap();
        let seq = apply_on_right(&g, &left).unwrap();
        assert!(frobenius_distance(&both, &seq).unwrap() < 1e-12);
        // output is symmetric under swapping the parties
        let swap = ComplexMatrix::from_fn(4, 4, |r, c| {
            let sr = (r % 2) * 2 + r / 2;
            if sr == c { C64::new(1.0, 0.0) } else { ZERO }
        });
        let swapped = both.conjugate_by(&swap).unwrap();
        assert!(frobenius_distance(&swapped, &both).unwrap() < 1e-12);
    }

    #[test]
    fn tensor_dimension_cap() {
        let big = Channel::identity(16);
        assert!(matches!(tensor(&big, &big), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn representation_round_trips() {
        let channels = [
            Channel::identity(2),
            gad(GadParams::new(0.3, 0.7).unwrap()),
            gad(GadParams::new(1.0, 0.2).unwrap()),
            cavity_channel(3.0, &CavityParams::new(1.0, 0.1).unwrap()).unwrap(),
        ];
        for ch in &channels {
            let via_choi = Channel::from_choi(2, 2, ch.choi_view()).unwrap();
            assert!(frobenius_distance(via_choi.superop(), ch.superop()).unwrap() < TOL);
            let via_kraus = Channel::from_kraus(&ch.kraus_view().unwrap().operators).unwrap();
            assert!(frobenius_distance(via_kraus.superop(), ch.superop()).unwrap() < TOL);
            let via_ptm = Channel::from_ptm(ch.ptm_view().unwrap()).unwrap();
            assert!(frobenius_distance(via_ptm.superop(), ch.superop()).unwrap() < TOL);
            assert!(ch.kraus_view().unwrap().completeness_defect() < TOL);
        }
    }

    #[test]
    fn apply_rejects_wrong_dimension() {
        let r = Channel::identity(2).apply(&ComplexMatrix::identity(4));
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn ptm_of_composition_is_product() {
        let f = gad(GadParams::new(0.2, 0.9).unwrap());
        let g = cavity_channel(1.7, &CavityParams::new(1.0, 0.1).unwrap()).unwrap();
        let fg = compose(&f, &g).unwrap();
        let product = f.ptm_view().unwrap().matmul(g.ptm_view().unwrap());
        assert!(fg.ptm_view().unwrap().max_abs_diff(&product) < 1e-12);
    }

    #[test]
    fn z_pauli_image_under_gad() {
        let g = gad(GadParams::new(0.45, 0.8).unwrap());
        let out = g.apply(&pauli_z()).unwrap();
        assert!(frobenius_distance(&out, &pauli_z().scale_real(0.55)).unwrap() < 1e-12);
        assert!(frobenius_distance(&g.apply(&pauli(2)).unwrap(), &pauli(2).scale_real(0.55f64.sqrt())).unwrap() < 1e-12);
    }
}
