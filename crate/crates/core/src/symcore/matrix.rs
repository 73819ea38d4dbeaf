use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense real symmetric `d×d` matrix stored row-major.
///
/// Construction always stores `(A + Aᵀ)/2`, so `get(i, j) == get(j, i)` holds
/// bitwise. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T = f64> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Scalar> SymmetricMatrix<T> {
    /// Builds a matrix from `dim * dim` row-major entries, symmetrizing.
    pub fn new(dim: usize, entries: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if let Some(k) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / dim,
                col: k % dim,
            });
        }
        let mut m = Self { dim, entries };
        m.symmetrize();
        Ok(m)
    }

    /// Builds a matrix from a list of rows. Rows must form a square.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "row {i} has {} entries, expected {dim}",
                r.len()
            )));
        }
        Self::new(dim, rows.iter().flatten().copied().collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Self {
            dim,
            entries: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); dim])
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            assert!(v.is_finite(), "diagonal entry {i} is not finite");
            m.entries[i * m.dim + i] = v;
        }
        m
    }

    /// `Aᵀ·A` for a square row-major `a`; positive semidefinite by construction.
    pub fn gram(dim: usize, a: &[T]) -> Result<Self> {
        if a.len() != dim * dim {
            return Err(Error::InvalidInput("gram factor must be square".into()));
        }
        let mut out = vec![T::zero(); dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let mut s = T::zero();
                for k in 0..dim {
                    s = s + a[k * dim + i] * a[k * dim + j];
                }
                out[i * dim + j] = s;
                out[j * dim + i] = s;
            }
        }
        Self::new(dim, out)
    }

    /// `Q·diag(values)·Qᵀ` for a row-major square `q`.
    pub(crate) fn from_spectral(q: &[T], values: &[T]) -> Self {
        let dim = values.len();
        let mut out = vec![T::zero(); dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let mut s = T::zero();
                for (k, &v) in values.iter().enumerate() {
                    if v != T::zero() {
                        s = s + q[i * dim + k] * v * q[j * dim + k];
                    }
                }
                out[i * dim + j] = s;
                out[j * dim + i] = s;
            }
        }
        Self { dim, entries: out }
    }

    fn symmetrize(&mut self) {
        let d = self.dim;
        let half = T::lit(0.5);
        for i in 0..d {
            for j in (i + 1)..d {
                let v = (self.entries[i * d + j] + self.entries[j * d + i]) * half;
                self.entries[i * d + j] = v;
                self.entries[j * d + i] = v;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.dim + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `max_ij |self_ij - other_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&v| v * alpha).collect(),
        }
    }

    /// Congruence `Q·self·Qᵀ` with a row-major square `q`.
    pub fn congruence(&self, q: &[T]) -> Result<Self> {
        let d = self.dim;
        if q.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                actual: q.len(),
            });
        }
        let mut tmp = vec![T::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = T::zero();
                for k in 0..d {
                    s = s + q[i * d + k] * self.get(k, j);
                }
                tmp[i * d + j] = s;
            }
        }
        let mut out = vec![T::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = T::zero();
                for k in 0..d {
                    s = s + tmp[i * d + k] * q[j * d + k];
                }
                out[i * d + j] = s;
            }
        }
        Self::new(d, out)
    }

    /// Maximum `|a_ij - a_ji|` of a raw (unsymmetrized) square row list.
    pub fn max_asymmetry(rows: &[Vec<T>]) -> T {
        let mut worst = T::zero();
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate().skip(i + 1) {
                if let Some(&w) = rows.get(j).and_then(|rj| rj.get(i)) {
                    worst = worst.max((v - w).abs());
                }
            }
        }
        worst
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl<T: Scalar> Add for &SymmetricMatrix<T> {
    type Output = SymmetricMatrix<T>;
    fn add(self, rhs: Self) -> SymmetricMatrix<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &SymmetricMatrix<T> {
    type Output = SymmetricMatrix<T>;
    fn sub(self, rhs: Self) -> SymmetricMatrix<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Neg for &SymmetricMatrix<T> {
    type Output = SymmetricMatrix<T>;
    fn neg(self) -> SymmetricMatrix<T> {
        SymmetricMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&v| -v).collect(),
        }
    }
}

impl<T: Scalar> fmt::Display for SymmetricMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
