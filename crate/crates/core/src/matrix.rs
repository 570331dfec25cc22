//! Dense complex matrices.
//!
//! Everything in the crate (states, unitaries, superoperators, Choi matrices)
//! lives in a [`ComplexMatrix`]: row-major, dense, `f64` complex entries. The
//! largest object handled anywhere is a 256x256 superoperator, so there is no
//! sparse path and no BLAS dependency.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default cap on the row or column count produced by [`kron`].
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Maximum number of cyclic Jacobi sweeps before giving up.
const MAX_JACOBI_SWEEPS: usize = 100;

/// Hermiticity tolerance accepted by [`hermitian_eigen`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Condition number above which [`invert`] reports the matrix singular.
pub const MAX_CONDITION: f64 = 1e12;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    /// Convenience constructor from nested real rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// Convenience constructor from nested complex rows. Panics on ragged input.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: C64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// max |a_ij - conj(a_ji)|; infinite for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()) * 0.5
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Column-stacking vectorization: vec(A)[c * rows + r] = A[r, c].
    pub fn vec_columns(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                out.push(self.get(r, c));
            }
        }
        out
    }

    /// Inverse of [`vec_columns`](Self::vec_columns).
    pub fn unvec_columns(v: &[C64], rows: usize, cols: usize) -> Self {
        assert_eq!(v.len(), rows * cols);
        Self::from_fn(rows, cols, |r, c| v[c * rows + r])
    }

    /// U · self · U†.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self.get(r, c);
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Serialized as `{rows, cols, entries}` with `entries` a flat row-major list of `[re, im]`.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Entries<'a>(&'a [C64]);
        impl Serialize for Entries<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for z in self.0 {
                    seq.serialize_element(&[z.re, z.im])?;
                }
                seq.end()
            }
        }
        let mut st = serializer.serialize_struct("ComplexMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &Entries(&self.data))?;
        st.end()
    }
}

fn zip_with(a: &ComplexMatrix, b: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> ComplexMatrix {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in elementwise op");
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| f(*x, *y)).collect(),
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Panics on a shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in matrix product")
    }
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_cap(a, b, DEFAULT_DIMENSION_CAP)
}

/// Kronecker product; the left factor carries the slower-varying index.
pub fn kron_with_cap(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r <= cap && c <= cap => (r, c),
        _ => {
            return Err(Error::DimensionCap {
                rows: a.rows.saturating_mul(b.rows),
                cols: a.cols.saturating_mul(b.cols),
                cap,
            })
        }
    };
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a.get(ar, ac);
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                let base = (ar * b.rows + br) * cols + ac * b.cols;
                for bc in 0..b.cols {
                    out.data[base + bc] = x * b.get(br, bc);
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors
        .split_first()
        .expect("kron_all needs at least one factor");
    rest.iter()
        .try_fold((*first).clone(), |acc, m| kron(&acc, m))
}

/// Frobenius distance √Σ|a_ij − b_ij|².
pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column k is the unit eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows,
            cols: h.cols,
        });
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitian { defect });
    }
    let n = h.rows;
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    if scale == 0.0 || n == 1 {
        return Ok(sorted_eigen(&a, v));
    }
    let target = f64::EPSILON * scale * 1e-2;

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a.get(r, c).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }
    Ok(sorted_eigen(&a, v))
}

/// Zeroes a[p][q] with the unitary J = Phase(q) · Rot(p, q), updating A ← J†AJ, V ← VJ.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.rows;
    let apq = a.get(p, q);
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    // skip rotations that cannot change the diagonal in floating point
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a.set(p, q, ZERO);
        a.set(q, p, ZERO);
        return;
    }
    let phase = apq.conj() / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = phase * (-s);
    let jqq = phase * c;

    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * jpp + akq * jqp);
        a.set(k, q, akp * jpq + akq * jqq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, jpp.conj() * apk + jqp.conj() * aqk);
        a.set(q, k, jpq.conj() * apk + jqq.conj() * aqk);
    }
    a.set(p, q, ZERO);
    a.set(q, p, ZERO);
    a.set(p, p, C64::new(a.get(p, p).re, 0.0));
    a.set(q, q, C64::new(a.get(q, q).re, 0.0));

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * jpp + vkq * jqp);
        v.set(k, q, vkp * jpq + vkq * jqq);
    }
}

fn sorted_eigen(a: &ComplexMatrix, v: ComplexMatrix) -> HermitianEigen {
    let n = a.rows;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    HermitianEigen { values, vectors }
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(h).map(|e| e.values)
}

/// Result of [`invert`]. The condition number is measured in the ∞-norm.
#[derive(Debug, Clone)]
pub struct Inverse {
    pub inverse: ComplexMatrix,
    pub condition_number: f64,
}

/// Gauss–Jordan inversion with partial pivoting.
///
/// Fails with [`Error::Singular`] when a pivot drops below `1e-14 · ‖a‖∞` or
/// the ∞-norm condition number `‖a‖∞ · ‖a⁻¹‖∞` exceeds [`MAX_CONDITION`].
pub fn invert(a: &ComplexMatrix) -> Result<Inverse> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let norm = a.norm_inf();
    if norm == 0.0 {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    }
    let pivot_floor = 1e-14 * norm;
    let mut work = a.clone();
    let mut inv = ComplexMatrix::identity(n);

    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, work.get(r, col).norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_mag < pivot_floor {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        if pivot_row != col {
            for c in 0..n {
                work.data.swap(pivot_row * n + c, col * n + c);
                inv.data.swap(pivot_row * n + c, col * n + c);
            }
        }
        let pivot_inv = ONE / work.get(col, col);
        for c in 0..n {
            work.data[col * n + c] *= pivot_inv;
            inv.data[col * n + c] *= pivot_inv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = work.get(r, col);
            if factor == ZERO {
                continue;
            }
            for c in 0..n {
                let w = work.data[col * n + c];
                let i = inv.data[col * n + c];
                work.data[r * n + c] -= factor * w;
                inv.data[r * n + c] -= factor * i;
            }
        }
    }
    let condition_number = norm * inv.norm_inf();
    if !condition_number.is_finite() || condition_number > MAX_CONDITION {
        return Err(Error::Singular {
            condition: condition_number,
        });
    }
    Ok(Inverse {
        inverse: inv,
        condition_number,
    })
}

/// Pauli matrices in the order (I, X, Y, Z).
pub fn pauli(index: usize) -> ComplexMatrix {
    match index {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        2 => ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
        3 => ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
        _ => panic!("Pauli index {index} out of range"),
    }
}

pub fn pauli_x() -> ComplexMatrix {
    pauli(1)
}

pub fn pauli_y() -> ComplexMatrix {
    pauli(2)
}

pub fn pauli_z() -> ComplexMatrix {
    pauli(3)
}
