use crate::error::{Error, Result};
use crate::scalar::{negative_part, positive_part, Scalar};

use super::{eigendecompose, EigenDecomposition, SymmetricMatrix};

/// Canonical decomposition `H = H⁺ - H⁻` built in the eigenbasis of `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSplit<T = f64> {
    pub plus: SymmetricMatrix<T>,
    pub minus: SymmetricMatrix<T>,
    /// `‖H⁺‖* = Σ λᵢ⁺`
    pub nuclear_plus: T,
    /// `‖H⁻‖* = Σ λᵢ⁻`
    pub nuclear_minus: T,
    /// `‖H‖* = Σ |λᵢ|`
    pub nuclear_total: T,
    pub eigen: EigenDecomposition<T>,
}

/// Positive-semidefiniteness indices of a symmetric matrix.
///
/// For a zero matrix (`‖H‖* = 0`) the ratios are 0/0; the report then carries
/// `lops = 0, nlops = 0, ps = 1` with `degenerate = true`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdIndexReport<T = f64> {
    pub lops: T,
    pub nlops: T,
    pub ps: T,
    pub degenerate: bool,
}

impl<T: Scalar> PsdIndexReport<T> {
    /// Indices from a list of eigenvalues.
    pub fn from_eigenvalues(eigenvalues: &[T]) -> Self {
        let plus: T = eigenvalues.iter().map(|&l| positive_part(l)).sum();
        let minus: T = eigenvalues.iter().map(|&l| negative_part(l)).sum();
        Self::from_parts(plus, minus)
    }

    /// Indices from the nuclear norms of `H⁺` and `H⁻`.
    pub fn from_parts(nuclear_plus: T, nuclear_minus: T) -> Self {
        let total = nuclear_plus + nuclear_minus;
        if total == T::zero() {
            return Self {
                lops: T::zero(),
                nlops: T::zero(),
                ps: T::one(),
                degenerate: true,
            };
        }
        Self {
            lops: nuclear_minus,
            nlops: nuclear_minus / total,
            ps: nuclear_plus / total,
            degenerate: false,
        }
    }
}

/// Canonical split with exact sign tests on the eigenvalues.
pub fn canonical_split<T: Scalar>(m: &SymmetricMatrix<T>) -> CanonicalSplit<T> {
    canonical_split_with_threshold(m, T::zero())
}

/// Canonical split treating eigenvalues with `|λ| <= zero_threshold` as zero.
pub fn canonical_split_with_threshold<T: Scalar>(m: &SymmetricMatrix<T>, zero_threshold: T) -> CanonicalSplit<T> {
    let eigen = eigendecompose(m);
    let snap = |l: T| {
        if l.abs() <= zero_threshold {
            T::zero()
        } else {
            l
        }
    };
    let plus = eigen.spectral_map(|l| positive_part(snap(l)));
    let minus = eigen.spectral_map(|l| negative_part(snap(l)));
    let nuclear_plus: T = eigen.eigenvalues().iter().map(|&l| positive_part(snap(l))).sum();
    let nuclear_minus: T = eigen.eigenvalues().iter().map(|&l| negative_part(snap(l))).sum();
    CanonicalSplit {
        plus,
        minus,
        nuclear_plus,
        nuclear_minus,
        nuclear_total: nuclear_plus + nuclear_minus,
        eigen,
    }
}

/// Nuclear (trace) norm `Σ |λᵢ|`.
pub fn nuclear_norm<T: Scalar>(m: &SymmetricMatrix<T>) -> T {
    eigendecompose(m).eigenvalues().iter().map(|l| l.abs()).sum()
}

pub fn psd_indices<T: Scalar>(m: &SymmetricMatrix<T>) -> PsdIndexReport<T> {
    PsdIndexReport::from_eigenvalues(eigendecompose(m).eigenvalues())
}

/// Tolerance below which a negative eigenvalue still counts as PSD.
pub fn psd_tolerance<T: Scalar>(m: &SymmetricMatrix<T>) -> T {
    T::tol(1e-10, 64.0) * T::one().max(m.frobenius_norm())
}

pub fn is_psd<T: Scalar>(m: &SymmetricMatrix<T>) -> bool {
    let e = eigendecompose(m);
    e.eigenvalues().last().is_none_or(|&l| l >= -psd_tolerance(m))
}

/// Checks the trace bounds `tr(H⁺) <= tr(h1)` and `tr(H⁻) <= tr(h2)` for
/// `H = h1 - h2`, each with slack `1e-9`.
///
/// Both inputs must be positive semidefinite.
pub fn trace_bound_check<T: Scalar>(h1: &SymmetricMatrix<T>, h2: &SymmetricMatrix<T>) -> Result<bool> {
    if h1.dim() != h2.dim() {
        return Err(Error::DimensionMismatch {
            expected: h1.dim(),
            actual: h2.dim(),
        });
    }
    for (name, m) in [("h1", h1), ("h2", h2)] {
        if !is_psd(m) {
            return Err(Error::Precondition(format!("{name} is not positive semidefinite")));
        }
    }
    let split = canonical_split(&(h1 - h2));
    let slack = T::tol(1e-9, 64.0);
    Ok(split.plus.trace() <= h1.trace() + slack && split.minus.trace() <= h2.trace() + slack)
}
