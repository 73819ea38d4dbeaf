//! Pointwise convexity indices from the Hessian spectrum and the 1-D index of
//! increase.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::hessian::{hessian_fd, FdConfig};
use crate::quadrature::simpson_weights;
use crate::symcore::{canonical_split, eigendecompose, PsdIndexReport, SymmetricMatrix};

/// Lack-of-convexity indices at one point.
///
/// `loc = Σ λᵢ⁻`, `nloc = loc / Σ |λᵢ|`, `conv = Σ λᵢ⁺ / Σ |λᵢ|`. At a zero
/// Hessian the ratios are undefined; the report then holds `nloc = 0`,
/// `conv = 1` and sets `degenerate`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub point: Vec<f64>,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub loc: f64,
    pub nloc: f64,
    pub conv: f64,
    pub degenerate: bool,
}

impl ConvexityReport {
    pub fn from_hessian(point: &[f64], hessian: &SymmetricMatrix<f64>) -> Self {
        let eigen = eigendecompose(hessian);
        let psd = PsdIndexReport::from_eigenvalues(eigen.eigenvalues());
        Self {
            point: point.to_vec(),
            eigenvalues: eigen.eigenvalues().to_vec(),
            loc: psd.lops,
            nloc: psd.nlops,
            conv: psd.ps,
            degenerate: psd.degenerate,
        }
    }

    /// `Σ |λᵢ|`, the nuclear norm of the Hessian.
    pub fn nuclear_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).sum()
    }
}

/// `(LOC, NLOC, CONV)` computed from the traces of `H⁻` and `H⁺` instead of
/// eigenvalue sums. Degenerate Hessians give `(0, 0, 1)`.
pub fn norm_form_indices(hessian: &SymmetricMatrix<f64>) -> (f64, f64, f64) {
    let split = canonical_split(hessian);
    let minus = split.minus.trace();
    let plus = split.plus.trace();
    let total = plus + minus;
    if total == 0.0 {
        (0.0, 0.0, 1.0)
    } else {
        (minus, minus / total, plus / total)
    }
}

pub fn pointwise_indices(f: &ScalarField, point: &[f64], cfg: &FdConfig) -> Result<ConvexityReport> {
    let h = hessian_fd(f, point, cfg)?;
    Ok(ConvexityReport::from_hessian(point, &h))
}

/// Result of [`index_of_increase_1d`].
#[derive(Debug, Clone, PartialEq)]
pub struct IncreaseIndex {
    /// `∫ (h'')₊ / ∫ |h''|`, or 1 when both integrals vanish.
    pub value: f64,
    pub degenerate: bool,
    /// Interval actually integrated: `[a + step, b - step]`.
    pub effective: (f64, f64),
    pub positive_integral: f64,
    pub absolute_integral: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncreaseOptions {
    /// Odd number of Simpson nodes, at least 3.
    pub nodes: usize,
    /// Scale the reported integrals by `(b - a) / (effective length)`.
    /// The index itself is a ratio and is unaffected.
    pub rescale: bool,
}

impl Default for IncreaseOptions {
    fn default() -> Self {
        Self {
            nodes: 2001,
            rescale: false,
        }
    }
}

/// Denominator below which the 1-D index is reported as degenerate.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-14;

/// Index of increase of `h'` (equivalently the convexity index of `h`) on
/// `(a, b)`, from finite-difference second derivatives and composite
/// Simpson. The stencil must fit, so integration runs over
/// `[a + step(a), b - step(b)]`.
pub fn index_of_increase_1d(
    f: &ScalarField,
    interval: (f64, f64),
    opts: &IncreaseOptions,
    cfg: &FdConfig,
) -> Result<IncreaseIndex> {
    if f.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: f.dimension(),
        });
    }
    let (a, b) = interval;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter {
            name: "interval".into(),
            detail: format!("need finite a < b, got ({a}, {b})"),
        });
    }
    let lo = a + cfg.step_at(a);
    let hi = b - cfg.step_at(b);
    if !(lo < hi) {
        return Err(Error::InvalidParameter {
            name: "interval".into(),
            detail: "interval is shorter than two finite-difference steps".into(),
        });
    }
    let weights = simpson_weights(opts.nodes, lo, hi)?;
    let n = opts.nodes;
    let mut pos = 0.0;
    let mut abs = 0.0;
    for (k, w) in weights.iter().enumerate() {
        let x = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        let h2 = hessian_fd(f, &[x], cfg)?.get(0, 0);
        pos += w * h2.max(0.0);
        abs += w * h2.abs();
    }
    if opts.rescale {
        let r = (b - a) / (hi - lo);
        pos *= r;
        abs *= r;
    }
    let degenerate = abs < DEGENERATE_DENOMINATOR;
    Ok(IncreaseIndex {
        value: if degenerate { 1.0 } else { pos / abs },
        degenerate,
        effective: (lo, hi),
        positive_integral: pos,
        absolute_integral: abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{builtin, BuiltinParams};
    use std::f64::consts::PI;

    fn h_cos() -> ScalarField {
        builtin("h_cos", &BuiltinParams::default()).unwrap()
    }

    #[test]
    fn h_cos_reports() {
        let cfg = FdConfig::default();
        let r = pointwise_indices(&h_cos(), &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(r.loc, 0.0);
        assert_eq!(r.conv, 1.0);
        assert!(!r.degenerate);

        let r = pointwise_indices(&h_cos(), &[PI, PI], &cfg).unwrap();
        assert!((r.loc - 2.0).abs() < 1e-6);
        assert_eq!(r.nloc, 1.0);
        assert_eq!(r.conv, 0.0);

        let r = pointwise_indices(&h_cos(), &[0.0, PI], &cfg).unwrap();
        assert!((r.loc - 1.0).abs() < 1e-6);
        assert!((r.nloc - 0.5).abs() < 1e-6);
        assert!((r.conv - 0.5).abs() < 1e-6);
    }

    #[test]
    fn degenerate_point() {
        let f = ScalarField::parse("3", 2).unwrap();
        let r = pointwise_indices(&f, &[0.1, 0.2], &FdConfig::default()).unwrap();
        assert!(r.degenerate);
        assert_eq!((r.loc, r.nloc, r.conv), (0.0, 0.0, 1.0));
    }

    #[test]
    fn norm_forms_agree_with_eigenvalue_sums() {
        let h = SymmetricMatrix::new(3, vec![1.0, 2.0, 0.0, 2.0, -1.0, 0.5, 0.0, 0.5, -3.0]).unwrap();
        let r = ConvexityReport::from_hessian(&[0.0; 3], &h);
        let (loc, nloc, conv) = norm_form_indices(&h);
        assert!((r.loc - loc).abs() <= 1e-10);
        assert!((r.nloc - nloc).abs() <= 1e-10);
        assert!((r.conv - conv).abs() <= 1e-10);
    }

    #[test]
    fn increase_examples() {
        let opts = IncreaseOptions::default();
        let cfg = FdConfig::default();
        let sq = ScalarField::parse("x^2", 1).unwrap();
        let r = index_of_increase_1d(&sq, (-1.0, 1.0), &opts, &cfg).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-12);

        let cube = builtin("cubic_1d", &BuiltinParams::default()).unwrap();
        let r = index_of_increase_1d(&cube, (-1.0, 1.0), &opts, &cfg).unwrap();
        assert!((r.value - 0.5).abs() <= 1e-6, "{}", r.value);

        let nc = builtin("neg_cos_1d", &BuiltinParams::default()).unwrap();
        let r = index_of_increase_1d(&nc, (0.0, PI), &opts, &cfg).unwrap();
        assert!((r.value - 0.5).abs() <= 1e-4, "{}", r.value);
    }

    #[test]
    fn increase_degenerate_and_errors() {
        let opts = IncreaseOptions::default();
        let cfg = FdConfig::default();
        let c = ScalarField::parse("7", 1).unwrap();
        let r = index_of_increase_1d(&c, (0.0, 1.0), &opts, &cfg).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.value, 1.0);

        let f = ScalarField::parse("x^2", 1).unwrap();
        assert!(index_of_increase_1d(&f, (1.0, 0.0), &opts, &cfg).is_err());
        let even = IncreaseOptions { nodes: 4, ..opts };
        assert!(index_of_increase_1d(&f, (0.0, 1.0), &even, &cfg).is_err());
        let two_d = ScalarField::parse("x*y", 2).unwrap();
        assert!(index_of_increase_1d(&two_d, (0.0, 1.0), &opts, &cfg).is_err());
    }

    #[test]
    fn rescale_changes_integrals_not_index() {
        let cfg = FdConfig::default();
        let f = builtin("cubic_1d", &BuiltinParams::default()).unwrap();
        let plain = index_of_increase_1d(&f, (-1.0, 2.0), &IncreaseOptions::default(), &cfg).unwrap();
        let opts = IncreaseOptions {
            rescale: true,
            ..Default::default()
        };
        let scaled = index_of_increase_1d(&f, (-1.0, 2.0), &opts, &cfg).unwrap();
        assert!((plain.value - scaled.value).abs() < 1e-14);
        assert!(scaled.absolute_integral > plain.absolute_integral);
    }
}
