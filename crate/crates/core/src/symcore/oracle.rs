//! Brute-force search for the nuclear-norm distance from a small symmetric
//! matrix to the positive semidefinite cone.
//!
//! The search never uses the canonical split to *evaluate* a candidate: every
//! candidate `M = F·Fᵀ` is scored by computing `‖H - M‖*` directly (closed
//! form for `d <= 2`). `H⁺` enters only as one candidate among many and as
//! the centre of random perturbations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{positive_part, Scalar};

use super::{canonical_split, nuclear_norm, SymmetricMatrix};

/// Largest dimension accepted by the oracle.
pub const ORACLE_MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    /// Grid points per axis of the PSD parameterization.
    pub grid_steps: usize,
    /// Random PSD perturbations of `H⁺`.
    pub random_candidates: usize,
    /// Pattern-search rounds per refinement start.
    pub refine_rounds: usize,
    pub seed: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            grid_steps: 50,
            random_candidates: 200,
            refine_rounds: 200,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome<T = f64> {
    /// Smallest `‖H - M‖*` found.
    pub distance: T,
    /// The PSD matrix attaining `distance`.
    pub minimizer: SymmetricMatrix<T>,
    /// Best distance among candidates other than `H⁺` itself.
    pub best_competitor: T,
    pub candidates_evaluated: usize,
}

/// `‖A‖*` for `d <= 3`, closed form for `d <= 2`.
pub fn small_nuclear_norm<T: Scalar>(dim: usize, a: &[T]) -> T {
    match dim {
        1 => a[0].abs(),
        2 => {
            let (p, q, r) = (a[0], a[1], a[3]);
            let det = p * r - q * q;
            if det >= T::zero() {
                // eigenvalues share a sign
                (p + r).abs()
            } else {
                T::lit(2.0) * ((p - r) * T::lit(0.5)).hypot(q)
            }
        }
        _ => nuclear_norm(&SymmetricMatrix::new(dim, a.to_vec()).expect("finite candidate")),
    }
}

struct Search<'a, T> {
    h: &'a SymmetricMatrix<T>,
    dim: usize,
    scratch: Vec<T>,
    evaluated: usize,
}

impl<T: Scalar> Search<'_, T> {
    /// `‖H - F·Fᵀ‖*`.
    fn score(&mut self, f: &[T]) -> T {
        let d = self.dim;
        for i in 0..d {
            for j in i..d {
                let mut s = T::zero();
                for k in 0..d {
                    s = s + f[i * d + k] * f[j * d + k];
                }
                let v = self.h.get(i, j) - s;
                self.scratch[i * d + j] = v;
                self.scratch[j * d + i] = v;
            }
        }
        self.evaluated += 1;
        small_nuclear_norm(d, &self.scratch)
    }

    /// Coordinate pattern search over the entries of `F`.
    fn refine(&mut self, start: &[T], start_score: T, rounds: usize, scale: T) -> (Vec<T>, T) {
        let mut f = start.to_vec();
        let mut best = start_score;
        let mut step = T::lit(0.1) * scale;
        let floor = T::lit(1e-10) * scale;
        for _ in 0..rounds {
            if step < floor {
                break;
            }
            let mut improved = false;
            for k in 0..f.len() {
                for dir in [T::one(), -T::one()] {
                    let old = f[k];
                    f[k] = old + dir * step;
                    let s = self.score(&f);
                    if s < best {
                        best = s;
                        improved = true;
                        break;
                    }
                    f[k] = old;
                }
            }
            if !improved {
                step = step * T::lit(0.5);
            }
        }
        (f, best)
    }
}

fn linspace<T: Scalar>(lo: T, hi: T, n: usize) -> impl Iterator<Item = T> {
    let n = n.max(2);
    (0..n).map(move |k| lo + (hi - lo) * T::lit(k as f64) / T::lit((n - 1) as f64))
}

/// Lower-triangular `L` with `L·Lᵀ = m` for PSD `m`; zero pivots zero their column.
fn psd_factor<T: Scalar>(dim: usize, m: &[T]) -> Vec<T> {
    let mut l = vec![T::zero(); dim * dim];
    for j in 0..dim {
        let mut diag = m[j * dim + j];
        for k in 0..j {
            diag = diag - l[j * dim + k] * l[j * dim + k];
        }
        let pivot = positive_part(diag).sqrt();
        l[j * dim + j] = pivot;
        if pivot == T::zero() {
            continue;
        }
        for i in (j + 1)..dim {
            let mut s = m[i * dim + j];
            for k in 0..j {
                s = s - l[i * dim + k] * l[j * dim + k];
            }
            l[i * dim + j] = s / pivot;
        }
    }
    l
}

fn gram_of<T: Scalar>(dim: usize, f: &[T]) -> SymmetricMatrix<T> {
    let mut out = vec![T::zero(); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[i * dim + j] = (0..dim).map(|k| f[i * dim + k] * f[j * dim + k]).sum();
        }
    }
    SymmetricMatrix::new(dim, out).expect("finite candidate")
}

/// Approximates `inf_{M PSD} ‖H - M‖*` by direct search.
///
/// The candidate set is `H⁺`, a grid over the PSD parameterization
/// (`[[a,b],[b,c]]`, `a,c ∈ [0, 2‖H‖_F]`, `b² <= ac` for `d = 2`; a Cholesky
/// factor grid for `d = 3`), random PSD perturbations of `H⁺`, and
/// pattern-search refinement from the best non-`H⁺` candidates.
pub fn nuclear_distance_to_psd_oracle<T: Scalar>(
    m: &SymmetricMatrix<T>,
    budget: &OracleBudget,
) -> Result<OracleOutcome<T>> {
    let d = m.dim();
    if d > ORACLE_MAX_DIM {
        return Err(Error::UnsupportedSize(format!(
            "oracle supports dimension <= {ORACLE_MAX_DIM}, got {d}"
        )));
    }
    let frob = m.frobenius_norm();
    let scale = T::one().max(frob);
    let mut search = Search {
        h: m,
        dim: d,
        scratch: vec![T::zero(); d * d],
        evaluated: 0,
    };

    // F = Q·diag(√λ⁺) reproduces H⁺ without a rank-deficient Cholesky
    let eigen = canonical_split(m).eigen;
    let mut plus_factor = vec![T::zero(); d * d];
    for i in 0..d {
        for (k, &l) in eigen.eigenvalues().iter().enumerate() {
            plus_factor[i * d + k] = eigen.eigenvectors()[i * d + k] * positive_part(l).sqrt();
        }
    }
    let plus_score = search.score(&plus_factor);
    let (mut best_f, mut best) = (plus_factor.clone(), plus_score);

    let mut competitor: Option<(Vec<T>, T)> = None;
    let offer = |f: Vec<T>, s: T, competitor: &mut Option<(Vec<T>, T)>| {
        if competitor.as_ref().is_none_or(|(_, c)| s < *c) {
            *competitor = Some((f, s));
        }
    };

    let top = T::lit(2.0) * frob;
    match d {
        1 => {
            for a in linspace(T::zero(), top, budget.grid_steps) {
                let f = vec![a.sqrt()];
                let s = search.score(&f);
                offer(f, s, &mut competitor);
            }
        }
        2 => {
            for a in linspace(T::zero(), top, budget.grid_steps) {
                for c in linspace(T::zero(), top, budget.grid_steps) {
                    let bound = (a * c).sqrt();
                    for b in linspace(-bound, bound, budget.grid_steps) {
                        let f = psd_factor(2, &[a, b, b, c]);
                        let s = search.score(&f);
                        offer(f, s, &mut competitor);
                    }
                }
            }
        }
        _ => {
            let k = budget.grid_steps.clamp(2, 5);
            let r = top.sqrt();
            let diag: Vec<T> = linspace(T::zero(), r, k).collect();
            let off: Vec<T> = linspace(-r, r, k).collect();
            let mut f = vec![T::zero(); 9];
            for &l00 in &diag {
                for &l11 in &diag {
                    for &l22 in &diag {
                        for &l10 in &off {
                            for &l20 in &off {
                                for &l21 in &off {
                                    f[0] = l00;
                                    f[4] = l11;
                                    f[8] = l22;
                                    f[3] = l10;
                                    f[6] = l20;
                                    f[7] = l21;
                                    let s = search.score(&f);
                                    offer(f.clone(), s, &mut competitor);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut random_best: Option<(Vec<T>, T)> = None;
    for _ in 0..budget.random_candidates {
        let sigma = T::lit(10f64.powf(rng.random_range(-4.0..0.0))) * scale.sqrt();
        let f: Vec<T> = plus_factor
            .iter()
            .map(|&v| v + sigma * T::lit(rng.random_range(-1.0..1.0)))
            .collect();
        let s = search.score(&f);
        offer(f.clone(), s, &mut random_best);
    }

    let starts: Vec<_> = competitor.into_iter().chain(random_best).collect();
    let mut best_competitor = starts.iter().map(|(_, s)| *s).fold(T::infinity(), T::min);
    for (f, s) in starts {
        let (rf, rs) = search.refine(&f, s, budget.refine_rounds, scale.sqrt());
        best_competitor = best_competitor.min(rs);
        if rs < best {
            best = rs;
            best_f = rf;
        }
    }

    Ok(OracleOutcome {
        distance: best,
        minimizer: gram_of(d, &best_f),
        best_competitor,
        candidates_evaluated: search.evaluated,
    })
}
