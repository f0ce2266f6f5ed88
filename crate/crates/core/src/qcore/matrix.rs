use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest register handled: three qubits.
pub const MAX_DIM: usize = 8;

/// Dense square complex matrix of dimension 2, 4 or 8, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 => Ok(()),
        _ => Err(Error::UnsupportedDimension(dim)),
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a valid `dim²`.
    pub fn from_row_major(entries: Vec<C64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        check_dim(dim)?;
        Ok(Self { dim, data: entries })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = C64::new(d, 0.0);
        }
        Ok(m)
    }

    /// Outer product |ψ⟩⟨ψ|.
    pub fn outer(psi: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(psi.len())?;
        let n = m.dim;
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = psi[i] * psi[j].conj();
            }
        }
        Ok(m)
    }

    pub(crate) fn from_2x2(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self {
            dim: 2,
            data: vec![a, b, c, d],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn nqubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[j * n + i].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Self { dim: n, data }
    }

    /// Tr(self · rhs) without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> C64 {
        assert_eq!(self.dim, rhs.dim, "trace_product dimension mismatch");
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * rhs.data[k * n + i];
            }
        }
        acc
    }

    /// U · self · U†.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        Ok(u.try_mul(self)?.mul_unchecked(&u.adjoint()))
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        let (n, m) = (self.dim, rhs.dim);
        let dim = n * m;
        if dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut out = Self::zeros(dim)?;
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                for k in 0..m {
                    for l in 0..m {
                        out.data[(i * m + k) * dim + (j * m + l)] = a * rhs.data[k * m + l];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Largest entrywise deviation of U†U from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let id = Self::identity(self.dim).expect("valid dim");
        self.adjoint().mul_unchecked(self).max_abs_diff(&id)
    }

    fn same_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim == rhs.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.dim, self.dim, rhs.dim, rhs.dim
            )))
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs)
            .expect("matrix product dimension mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.same_dim(rhs).expect("matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.same_dim(rhs)
            .expect("matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Pauli matrices σx, σy, σz.
pub fn pauli() -> [ComplexMatrix; 3] {
    [
        ComplexMatrix::from_2x2(ZERO, ONE, ONE, ZERO),
        ComplexMatrix::from_2x2(ZERO, -I, I, ZERO),
        ComplexMatrix::from_2x2(ONE, ZERO, ZERO, -ONE),
    ]
}

pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::from_2x2(ONE, ZERO, ZERO, ONE)
}

/// Kronecker product of two matrices; fails if the result exceeds 8×8.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.kron(b)
}
