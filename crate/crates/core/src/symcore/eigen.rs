use crate::scalar::Scalar;

use super::SymmetricMatrix;

/// Maximum number of cyclic Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;

/// Spectral factorization `H = Q·diag(λ)·Qᵀ`.
///
/// Eigenvalues are sorted descending; column `k` of the row-major `Q` is the
/// unit eigenvector of `eigenvalues[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<T = f64> {
    eigenvalues: Vec<T>,
    eigenvectors: Vec<T>,
    sweeps: usize,
}

impl<T: Scalar> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Row-major orthogonal matrix whose columns are eigenvectors.
    pub fn eigenvectors(&self) -> &[T] {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> Vec<T> {
        let d = self.dim();
        (0..d).map(|i| self.eigenvectors[i * d + k]).collect()
    }

    /// Number of Jacobi sweeps performed before convergence.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// `Q·diag(f(λ))·Qᵀ`.
    pub fn spectral_map(&self, f: impl Fn(T) -> T) -> SymmetricMatrix<T> {
        let mapped: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        SymmetricMatrix::from_spectral(&self.eigenvectors, &mapped)
    }

    pub fn reconstruct(&self) -> SymmetricMatrix<T> {
        self.spectral_map(|l| l)
    }

    /// `max |QᵀQ - I|`.
    pub fn orthogonality_error(&self) -> T {
        let d = self.dim();
        let q = &self.eigenvectors;
        let mut worst = T::zero();
        for a in 0..d {
            for b in 0..d {
                let dot: T = (0..d).map(|i| q[i * d + a] * q[i * d + b]).sum();
                let target = if a == b { T::one() } else { T::zero() };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps continue until the off-diagonal Frobenius norm is at most
/// `1e-13·max(1, ‖H‖_F)` (or a few ulps for `f32`) or [`MAX_SWEEPS`] is hit.
/// The rotation sequence depends only on the input, so the result is
/// bitwise reproducible; `eigendecompose(-H)` yields exactly negated
/// eigenvalues.
pub fn eigendecompose<T: Scalar>(m: &SymmetricMatrix<T>) -> EigenDecomposition<T> {
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }

    let scale = T::one().max(m.frobenius_norm());
    let tol = T::tol(1e-13, 8.0) * scale;
    let two = T::lit(2.0);

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[p * n + q] * a[p * n + q];
            }
        }
        if (two * off).sqrt() <= tol {
            break;
        }
        sweeps += 1;

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                // smaller root of t² + 2θt - 1 = 0; θ = -0 takes the + branch
                let t = if theta >= T::zero() {
                    T::one() / (theta + theta.hypot(T::one()))
                } else {
                    -T::one() / (-theta + theta.hypot(T::one()))
                };
                let c = T::one() / t.hypot(T::one());
                let s = t * c;

                a[p * n + p] = a[p * n + p] - t * apq;
                a[q * n + q] = a[q * n + q] + t * apq;
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&i| a[i * n + i]).collect();
    let mut eigenvectors = vec![T::zero(); n * n];
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[r * n + col] = v[r * n + src];
        }
    }

    EigenDecomposition {
        eigenvalues,
        eigenvectors,
        sweeps,
    }
}
