use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::{Error, Result};

/// Max-norm bound on `U†U - 1` (or `OᵀO - 1`) accepted as unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexSquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, data }
    }

    /// Builds from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_row_major(entries: Vec<Complex64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::Config(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Config("matrix entries must be finite".into()));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm of `A†A - 1`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += self[(k, i)].conj() * self[(k, j)];
                }
                if i == j {
                    acc -= ONE;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexSquareMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexSquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexSquareMatrix {
    type Output = ComplexSquareMatrix;

    fn mul(self, rhs: &ComplexSquareMatrix) -> ComplexSquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexSquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// A complex matrix satisfying `max|U†U - 1| <= UNITARITY_TOLERANCE`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: ComplexSquareMatrix,
}

impl UnitaryOperator {
    /// Validates unitarity; costs `O(N^3)`.
    pub fn new(matrix: ComplexSquareMatrix) -> Result<Self> {
        let residual = matrix.unitarity_residual();
        if residual > UNITARITY_TOLERANCE {
            return Err(Error::GroupResidual { residual });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix produced by a construction that is unitary by design.
    pub(crate) fn from_trusted(matrix: ComplexSquareMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexSquareMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexSquareMatrix {
        self.matrix
    }

    pub fn residual(&self) -> f64 {
        self.matrix.unitarity_residual()
    }

    /// Lossless conversion when every imaginary part is exactly zero.
    pub fn to_orthogonal(&self) -> Result<OrthogonalOperator> {
        let n = self.dim();
        let mut data = Vec::with_capacity(n * n);
        for (k, z) in self.matrix.as_slice().iter().enumerate() {
            if z.im != 0.0 {
                return Err(Error::NotReal {
                    row: k / n,
                    col: k % n,
                });
            }
            data.push(z.re);
        }
        Ok(OrthogonalOperator { dim: n, data })
    }
}

/// A real matrix satisfying `max|OᵀO - 1| <= UNITARITY_TOLERANCE`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalOperator {
    dim: usize,
    data: Vec<f64>,
}

impl OrthogonalOperator {
    pub fn new(dim: usize, row_major: Vec<f64>) -> Result<Self> {
        if row_major.len() != dim * dim {
            return Err(Error::Config(format!(
                "{} entries for a {dim}x{dim} matrix",
                row_major.len()
            )));
        }
        let op = Self {
            dim,
            data: row_major,
        };
        let residual = op.residual();
        if residual > UNITARITY_TOLERANCE {
            return Err(Error::GroupResidual { residual });
        }
        Ok(op)
    }

    pub(crate) fn from_trusted(dim: usize, data: Vec<f64>) -> Self {
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn determinant_sign(&self) -> f64 {
        // Partial-pivot LU; |det| = 1 so only the sign matters.
        let n = self.dim;
        let mut a = self.data.clone();
        let mut sign = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
                .unwrap_or(col);
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                sign = -sign;
            }
            let p = a[col * n + col];
            if p < 0.0 {
                sign = -sign;
            }
            for row in col + 1..n {
                let f = a[row * n + col] / p;
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
            }
        }
        sign
    }

    /// Max-norm of `OᵀO - 1`.
    pub fn residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let mut acc = if i == j { -1.0 } else { 0.0 };
                for k in 0..n {
                    acc += self.get(k, i) * self.get(k, j);
                }
                worst = worst.max(acc.abs());
            }
        }
        worst
    }

    pub fn to_unitary(&self) -> UnitaryOperator {
        UnitaryOperator::from_trusted(ComplexSquareMatrix::from_fn(self.dim, |i, j| {
            Complex64::new(self.get(i, j), 0.0)
        }))
    }
}
