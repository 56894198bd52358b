//! Dense linear algebra for the small matrices that appear here: 2×2 and 4×4
//! covariances, the 8×8 real embedding of `Σ + iΩ/2`, and the 10×10 SLD system.
//!
//! Storage is a fixed `MAX_DIM × MAX_DIM` array, so nothing allocates.

use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::math::{hypot, sqrt};

/// Largest supported dimension.
pub const MAX_DIM: usize = 10;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Square matrix of dimension `dim ≤ MAX_DIM`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: [[f64; MAX_DIM]; MAX_DIM],
}

/// Column vector of dimension `dim ≤ MAX_DIM`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector {
    dim: usize,
    data: [f64; MAX_DIM],
}

/// Eigen-decomposition of a symmetric matrix; `vectors` holds eigenvectors as columns.
#[derive(Clone, Copy, Debug)]
pub struct SymmetricEigen {
    pub values: Vector,
    pub vectors: Matrix,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "matrix dimension {dim} exceeds {MAX_DIM}");
        Matrix { dim, data: [[0.0; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i][i] = 1.0;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i][i] = v;
        }
        m
    }

    /// Builds a matrix from row slices; every row must have `rows.len()` entries.
    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |i, j| rows[i][j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.data[j][i])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(self.dim, |i, j| s * self.data[i][j])
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i][i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max(self.data[i][j].abs());
            }
        }
        m
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                m = m.max((self.data[i][j] - self.data[j][i]).abs());
            }
        }
        m
    }

    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self.data[i][j] + self.data[j][i]))
    }

    /// Extracts the `size × size` block starting at `(row, col)`.
    pub fn block(&self, row: usize, col: usize, size: usize) -> Self {
        Self::from_fn(size, |i, j| self.data[row + i][col + j])
    }

    pub fn set_block(&mut self, row: usize, col: usize, b: &Matrix) {
        for i in 0..b.dim {
            for j in 0..b.dim {
                self.data[row + i][col + j] = b.data[i][j];
            }
        }
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        debug_assert_eq!(self.dim, v.dim);
        let mut out = Vector::zeros(self.dim);
        for i in 0..self.dim {
            out.data[i] = (0..self.dim).map(|j| self.data[i][j] * v.data[j]).sum();
        }
        out
    }

    /// `vᵀ A v`.
    pub fn quad_form(&self, v: &Vector) -> f64 {
        v.dot(&self.mul_vec(v))
    }

    /// `tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Matrix) -> f64 {
        let mut t = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                t += self.data[i][j] * other.data[j][i];
            }
        }
        t
    }

    /// LU factorization with partial pivoting. Returns the packed factors, the
    /// row permutation and the permutation sign, or `None` for an exactly
    /// singular pivot.
    fn lu(&self) -> Option<(Matrix, [usize; MAX_DIM], f64)> {
        let n = self.dim;
        let mut a = *self;
        let mut perm = [0usize; MAX_DIM];
        for (i, p) in perm.iter_mut().enumerate().take(n) {
            *p = i;
        }
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = a.data[k][k].abs();
            for i in (k + 1)..n {
                if a.data[i][k].abs() > best {
                    best = a.data[i][k].abs();
                    p = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            if p != k {
                a.data.swap(p, k);
                perm.swap(p, k);
                sign = -sign;
            }
            for i in (k + 1)..n {
                let f = a.data[i][k] / a.data[k][k];
                a.data[i][k] = f;
                for j in (k + 1)..n {
                    a.data[i][j] -= f * a.data[k][j];
                }
            }
        }
        Some((a, perm, sign))
    }

    pub fn determinant(&self) -> f64 {
        match self.lu() {
            Some((lu, _, sign)) => (0..self.dim).fold(sign, |acc, i| acc * lu.data[i][i]),
            None => 0.0,
        }
    }

    /// Solves `A x = b` by LU; `None` when `A` is exactly singular.
    pub fn solve(&self, b: &Vector) -> Option<Vector> {
        let n = self.dim;
        let (lu, perm, _) = self.lu()?;
        let mut x = Vector::zeros(n);
        for i in 0..n {
            let mut s = b.data[perm[i]];
            for j in 0..i {
                s -= lu.data[i][j] * x.data[j];
            }
            x.data[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x.data[i];
            for j in (i + 1)..n {
                s -= lu.data[i][j] * x.data[j];
            }
            x.data[i] = s / lu.data[i][i];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.dim;
        let mut inv = Matrix::zeros(n);
        for j in 0..n {
            let col = self.solve(&Vector::unit(n, j))?;
            for i in 0..n {
                inv.data[i][j] = col.data[i];
            }
        }
        Some(inv)
    }

    /// Cyclic Jacobi eigen-decomposition. The input is symmetrized first;
    /// eigenvalues come back in ascending order.
    pub fn symmetric_eigen(&self) -> SymmetricEigen {
        let n = self.dim;
        let mut a = self.symmetrized();
        let mut v = Matrix::identity(n);
        let scale = a.max_abs().max(f64::MIN_POSITIVE);

        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a.data[i][j] * a.data[i][j];
                }
            }
            if sqrt(off) <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.data[p][q];
                    if apq.abs() <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let theta = (a.data[q][q] - a.data[p][p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + hypot(theta, 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / sqrt(1.0 + t * t);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.data[k][p];
                        let akq = a.data[k][q];
                        a.data[k][p] = c * akp - s * akq;
                        a.data[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a.data[p][k];
                        let aqk = a.data[q][k];
                        a.data[p][k] = c * apk - s * aqk;
                        a.data[q][k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v.data[k][p];
                        let vkq = v.data[k][q];
                        v.data[k][p] = c * vkp - s * vkq;
                        v.data[k][q] = s * vkp + c * vkq;
                    }
                }
            }
        }

        // insertion sort, ascending
        let mut values = Vector::from_fn(n, |i| a.data[i][i]);
        let mut vectors = v;
        for i in 1..n {
            let mut j = i;
            while j > 0 && values.data[j - 1] > values.data[j] {
                values.data.swap(j - 1, j);
                for k in 0..n {
                    vectors.data[k].swap(j - 1, j);
                }
                j -= 1;
            }
        }
        SymmetricEigen { values, vectors }
    }

    /// Moore–Penrose pseudoinverse of a symmetric matrix, dropping eigenvalues
    /// with `|λ| < rel_cutoff · max|λ|`.
    pub fn symmetric_pinv(&self, rel_cutoff: f64) -> Matrix {
        let eig = self.symmetric_eigen();
        let n = self.dim;
        let lmax = (0..n).map(|i| eig.values[i].abs()).fold(0.0, f64::max);
        let cut = rel_cutoff * lmax;
        let mut out = Matrix::zeros(n);
        for k in 0..n {
            let l = eig.values[k];
            if l.abs() <= cut || l == 0.0 {
                continue;
            }
            let inv = 1.0 / l;
            for i in 0..n {
                for j in 0..n {
                    out.data[i][j] += inv * eig.vectors.data[i][k] * eig.vectors.data[j][k];
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i][j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i][j]
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i][j] += a * rhs.data[k][j];
                }
            }
        }
        out
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, rhs: Matrix) -> Matrix {
        debug_assert_eq!(self.dim, rhs.dim);
        Matrix::from_fn(self.dim, |i, j| self.data[i][j] + rhs.data[i][j])
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        debug_assert_eq!(self.dim, rhs.dim);
        Matrix::from_fn(self.dim, |i, j| self.data[i][j] - rhs.data[i][j])
    }
}

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "vector dimension {dim} exceeds {MAX_DIM}");
        Vector { dim, data: [0.0; MAX_DIM] }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize) -> f64) -> Self {
        let mut v = Self::zeros(dim);
        for i in 0..dim {
            v.data[i] = f(i);
        }
        v
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self::from_fn(s.len(), |i| s[i])
    }

    pub fn unit(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = 1.0;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.dim]
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        (0..self.dim).map(|i| self.data[i] * other.data[i]).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(self.dim, |i| s * self.data[i])
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        debug_assert!(i < self.dim);
        &self.data[i]
    }
}

impl IndexMut<usize> for Vector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        debug_assert!(i < self.dim);
        &mut self.data[i]
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, rhs: Vector) -> Vector {
        debug_assert_eq!(self.dim, rhs.dim);
        Vector::from_fn(self.dim, |i| self.data[i] - rhs.data[i])
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, rhs: Vector) -> Vector {
        debug_assert_eq!(self.dim, rhs.dim);
        Vector::from_fn(self.dim, |i| self.data[i] + rhs.data[i])
    }
}

/// Eigen-decomposition of a symmetric 2×2 matrix `[[a, b], [b, c]]`.
/// Returns `(λ_small, λ_large, angle)` where the eigenvector of `λ_small` is
/// `(cos angle, sin angle)`.
pub fn symmetric_eigen_2x2(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let mean = 0.5 * (a + c);
    let half_diff = 0.5 * (a - c);
    let rad = hypot(half_diff, b);
    let small = mean - rad;
    let large = mean + rad;
    // eigenvector of the smaller eigenvalue
    let angle = 0.5 * crate::math::atan2(-2.0 * b, c - a);
    (small, large, angle)
}
