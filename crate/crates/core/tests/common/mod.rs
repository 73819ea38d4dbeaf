#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use convexity::symcore::SymmetricMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> SymmetricMatrix<f64> {
    let mut e = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v = scale * rng.random_range(-1.0..=1.0);
            e[i * dim + j] = v;
            e[j * dim + i] = v;
        }
    }
    SymmetricMatrix::new(dim, e).unwrap()
}

/// `AᵀA` for a random square `A`.
pub fn random_psd(rng: &mut ChaCha8Rng, dim: usize) -> SymmetricMatrix<f64> {
    let a: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
    SymmetricMatrix::gram(dim, &a).unwrap()
}

/// Orthogonal factor of the QR decomposition of `a` (row-major, columns
/// orthonormalized by modified Gram-Schmidt).
pub fn orthogonal_from(dim: usize, a: &[f64]) -> Vec<f64> {
    let mut cols: Vec<Vec<f64>> = (0..dim).map(|j| (0..dim).map(|i| a[i * dim + j]).collect()).collect();
    for j in 0..dim {
        for k in 0..j {
            let dot: f64 = (0..dim).map(|i| cols[j][i] * cols[k][i]).sum();
            let prev = cols[k].clone();
            cols[j].iter_mut().zip(&prev).for_each(|(v, p)| *v -= dot * p);
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|v| *v /= norm);
    }
    let mut q = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            q[i * dim + j] = cols[j][i];
        }
    }
    q
}

/// `(∫₀^a (cos)₊, ∫₀^a |cos|)` from antiderivatives on the sign-constant
/// pieces of cos.
pub fn cos_integrals(a: f64) -> (f64, f64) {
    let mut cuts = vec![0.0];
    let mut k = 0.0;
    while FRAC_PI_2 + k * PI < a {
        cuts.push(FRAC_PI_2 + k * PI);
        k += 1.0;
    }
    cuts.push(a);
    let (mut pos, mut abs) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let piece = w[1].sin() - w[0].sin();
        if (0.5 * (w[0] + w[1])).cos() > 0.0 {
            pos += piece;
        }
        abs += piece.abs();
    }
    (pos, abs)
}

/// CONV of h_cos over the square of half-width `a` around the origin, via the
/// separable reduction to one dimension.
pub fn h_cos_conv(a: f64) -> f64 {
    let (pos, abs) = cos_integrals(a);
    pos / abs
}
