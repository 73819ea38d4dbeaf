//! Risk measures for a loss with known cdf, per-line total-loss functions and
//! their aggregation through the weighted generalized mean.

use crate::error::{Error, Result};
use crate::field::expr::real_pow;
use crate::scalar::Scalar;

/// `|β|` below which the generalized mean switches to its geometric limit.
pub const BETA_EPSILON: f64 = 1e-9;

/// Default lower/upper margin for aggregate fields on the unit cube.
pub const DEFAULT_DOMAIN_FLOOR: f64 = 1e-4;

/// Piecewise-linear cdf through `(t, F)` knots.
///
/// Repeated `t` values encode a jump (an atom); flat runs of `F` encode gaps
/// in the support. The cdf is right-continuous.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    knots: Vec<(f64, f64)>,
}

impl CdfTable {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |detail: &str| Error::InvalidParameter {
            name: "cdf table".into(),
            detail: detail.into(),
        };
        if knots.len() < 2 {
            return Err(bad("need at least two knots"));
        }
        if knots.iter().any(|(t, f)| !t.is_finite() || !f.is_finite()) {
            return Err(bad("knots must be finite"));
        }
        if knots.windows(2).any(|w| w[1].0 < w[0].0 || w[1].1 < w[0].1) {
            return Err(bad("knots must be non-decreasing in t and F"));
        }
        if knots[0].1.abs() > 1e-12 || (knots[knots.len() - 1].1 - 1.0).abs() > 1e-12 {
            return Err(bad("F must run from 0 to 1"));
        }
        let mut knots = knots;
        knots[0].1 = 0.0;
        let last = knots.len() - 1;
        knots[last].1 = 1.0;
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t < k[0].0 {
            return 0.0;
        }
        // last knot with t_k <= t
        let i = k.partition_point(|&(tk, _)| tk <= t) - 1;
        if i + 1 == k.len() {
            return 1.0;
        }
        let (t0, f0) = k[i];
        let (t1, f1) = k[i + 1];
        f0 + (f1 - f0) * (t - t0) / (t1 - t0)
    }

    fn shortfall(&self, x: f64) -> f64 {
        let k = &self.knots;
        let mut total = 0.0;
        if x < k[0].0 {
            total += k[0].0 - x;
        }
        for w in k.windows(2) {
            let (t0, t1) = (w[0].0.max(x), w[1].0);
            if t1 <= t0 {
                continue;
            }
            // trapezoid is exact on a linear piece
            total += 0.5 * ((1.0 - self.cdf(t0)) + (1.0 - self.cdf_left(t1))) * (t1 - t0);
        }
        total
    }

    /// Left limit `F(t⁻)`.
    fn cdf_left(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t <= k[0].0 {
            return 0.0;
        }
        let i = k.partition_point(|&(tk, _)| tk < t) - 1;
        if i + 1 == k.len() {
            return 1.0;
        }
        let (t0, f0) = k[i];
        let (t1, f1) = k[i + 1];
        f0 + (f1 - f0) * (t - t0) / (t1 - t0)
    }

    fn value_at_risk(&self, p: f64) -> f64 {
        let k = &self.knots;
        let j = k.partition_point(|&(_, f)| f < p);
        if j == 0 {
            return k[0].0;
        }
        let (t0, f0) = k[j - 1];
        let (t1, f1) = k[j];
        t0 + (p - f0) / (f1 - f0) * (t1 - t0)
    }

    fn average_value_at_risk(&self, p: f64) -> f64 {
        let mut integral = 0.0;
        for w in self.knots.windows(2) {
            let ((t0, f0), (t1, f1)) = (w[0], w[1]);
            if f1 <= f0 || f1 <= p {
                continue;
            }
            let u0 = f0.max(p);
            let q = |u: f64| t0 + (u - f0) / (f1 - f0) * (t1 - t0);
            integral += 0.5 * (q(u0) + t1) * (f1 - u0);
        }
        integral / (1.0 - p)
    }
}

/// Distribution of a single line's loss.
#[derive(Debug, Clone, PartialEq)]
pub enum LossDistribution {
    /// Uniform on `[0, 1]`, `F(t) = t`.
    Uniform01,
    Table(CdfTable),
}

impl LossDistribution {
    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            LossDistribution::Uniform01 => t.clamp(0.0, 1.0),
            LossDistribution::Table(table) => table.cdf(t),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            LossDistribution::Uniform01 => (0.0, 1.0),
            LossDistribution::Table(table) => {
                let k = table.knots();
                (k[0].0, k[k.len() - 1].0)
            }
        }
    }
}

fn check_level(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "p".into(),
            detail: format!("must lie in (0, 1), got {p}"),
        })
    }
}

/// Expected shortfall `E[(X - x)₊] = ∫ₓ^∞ (1 - F(t)) dt`.
pub fn expected_shortfall(dist: &LossDistribution, x: f64) -> f64 {
    match dist {
        LossDistribution::Uniform01 => {
            if x <= 0.0 {
                0.5 - x
            } else if x >= 1.0 {
                0.0
            } else {
                0.5 * (1.0 - x) * (1.0 - x)
            }
        }
        LossDistribution::Table(table) => table.shortfall(x),
    }
}

/// `VaR_p = inf{x : F(x) >= p}`.
pub fn value_at_risk(dist: &LossDistribution, p: f64) -> Result<f64> {
    check_level(p)?;
    Ok(match dist {
        LossDistribution::Uniform01 => p,
        LossDistribution::Table(table) => table.value_at_risk(p),
    })
}

/// `AVaR_p = (1 / (1 - p)) ∫_p^1 VaR_u du`.
pub fn average_value_at_risk(dist: &LossDistribution, p: f64) -> Result<f64> {
    check_level(p)?;
    Ok(match dist {
        LossDistribution::Uniform01 => 0.5 * (1.0 + p),
        LossDistribution::Table(table) => table.average_value_at_risk(p),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Penalty {
    /// `ℓ(x) = (1 - p)·x`
    Linear,
    /// `ℓ(x) = (1 - p)·x^α`
    Power,
}

/// One business line: loss distribution plus capital-holding penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSpec {
    pub distribution: LossDistribution,
    pub p: f64,
    pub alpha: f64,
    pub penalty: Penalty,
}

impl LineSpec {
    pub fn new(distribution: LossDistribution, p: f64, alpha: f64, penalty: Penalty) -> Result<Self> {
        check_level(p)?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha".into(),
                detail: format!("must be positive, got {alpha}"),
            });
        }
        Ok(Self {
            distribution,
            p,
            alpha,
            penalty,
        })
    }

    /// Uniform loss, `p = 0.99`, power penalty with `α = 1/4`.
    pub fn reference() -> Self {
        Self::new(LossDistribution::Uniform01, 0.99, 0.25, Penalty::Power).expect("valid")
    }

    /// `(h(x), h'(x), h''(x))` in closed form; uniform losses only.
    pub fn derivatives(&self, x: f64) -> Result<(f64, f64, f64)> {
        if self.distribution != LossDistribution::Uniform01 {
            return Err(Error::Unsupported(
                "closed-form derivatives exist only for uniform losses".into(),
            ));
        }
        let value = line_total_loss(self, x)?;
        let (es1, es2) = if x < 0.0 {
            (-1.0, 0.0)
        } else if x > 1.0 {
            (0.0, 0.0)
        } else {
            (-(1.0 - x), 1.0)
        };
        let q = 1.0 - self.p;
        let (l1, l2) = match self.penalty {
            Penalty::Linear => (q, 0.0),
            Penalty::Power => {
                let a = self.alpha;
                (q * a * x.powf(a - 1.0), q * a * (a - 1.0) * x.powf(a - 2.0))
            }
        };
        Ok((value, es1 + l1, es2 + l2))
    }
}

/// `h(x) = E[(X - x)₊] + ℓ(x)`.
pub fn line_total_loss(spec: &LineSpec, x: f64) -> Result<f64> {
    let q = 1.0 - spec.p;
    let penalty = match spec.penalty {
        Penalty::Linear => q * x,
        Penalty::Power => {
            if x < 0.0 {
                return Err(Error::Domain {
                    node: "line penalty".into(),
                    detail: format!("power penalty needs x >= 0, got {x}"),
                });
            }
            q * real_pow(x, spec.alpha).map_err(|d| Error::Domain {
                node: "line penalty".into(),
                detail: d.into(),
            })?
        }
    };
    Ok(expected_shortfall(&spec.distribution, x) + penalty)
}

fn check_weights<T: Scalar>(weights: &[T]) -> Result<()> {
    if weights.iter().any(|&w| !(w >= T::zero()) || !w.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "weights".into(),
            detail: "weights must be finite and nonnegative".into(),
        });
    }
    let sum: T = weights.iter().copied().sum();
    if (sum - T::one()).abs() > T::tol(1e-12, 16.0) {
        return Err(Error::InvalidParameter {
            name: "weights".into(),
            detail: format!("weights must sum to 1, got {sum}"),
        });
    }
    Ok(())
}

/// Weighted generalized mean `(Σ wᵢ vᵢ^β)^{1/β}`, geometric for `|β| < 1e-9`.
pub fn generalized_mean<T: Scalar>(values: &[T], weights: &[T], beta: T) -> Result<T> {
    if values.is_empty() || values.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            actual: values.len(),
        });
    }
    check_weights(weights)?;
    let domain = |detail: String| Error::Domain {
        node: "generalized mean".into(),
        detail,
    };
    let fractional = beta.fract() != T::zero();
    if let Some(v) = values.iter().find(|&&v| v <= T::zero()) {
        if beta <= T::zero() || fractional {
            return Err(domain(format!("value {v} is not positive (beta = {beta})")));
        }
    }
    let out = if beta.abs() < T::lit(BETA_EPSILON) {
        values.iter().zip(weights).map(|(&v, &w)| w * v.ln()).sum::<T>().exp()
    } else {
        let s: T = values.iter().zip(weights).map(|(&v, &w)| w * v.powf(beta)).sum();
        s.powf(T::one() / beta)
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(domain(format!("non-finite mean for beta = {beta}")))
    }
}

/// Lines aggregated through the weighted generalized mean.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSpec {
    pub lines: Vec<LineSpec>,
    pub weights: Vec<f64>,
    pub beta: f64,
}

impl AggregateSpec {
    pub fn new(lines: Vec<LineSpec>, weights: Vec<f64>, beta: f64) -> Result<Self> {
        if lines.is_empty() || lines.len() != weights.len() {
            return Err(Error::InvalidParameter {
                name: "weights".into(),
                detail: format!("{} weights for {} lines", weights.len(), lines.len()),
            });
        }
        check_weights(&weights)?;
        if !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta".into(),
                detail: "must be finite".into(),
            });
        }
        Ok(Self { lines, weights, beta })
    }

    /// Two uniform lines, `p = 0.99`, `α = 1/4`, equal weights.
    pub fn reference(beta: f64) -> Self {
        Self::new(vec![LineSpec::reference(); 2], vec![0.5, 0.5], beta).expect("valid")
    }

    pub fn dimension(&self) -> usize {
        self.lines.len()
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.lines.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lines.len(),
                actual: point.len(),
            });
        }
        let values = self
            .lines
            .iter()
            .zip(point)
            .map(|(l, &x)| line_total_loss(l, x))
            .collect::<Result<Vec<_>>>()?;
        generalized_mean(&values, &self.weights, self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn g(z: f64) -> f64 {
        0.5 * (1.0 - z).powi(2) + 0.01 * z.powf(0.25)
    }

    #[test]
    fn uniform_shortfall() {
        let u = LossDistribution::Uniform01;
        assert_eq!(expected_shortfall(&u, 1.0), 0.0);
        assert_eq!(expected_shortfall(&u, 0.0), 0.5);
        assert_eq!(expected_shortfall(&u, 0.5), 0.125);
        assert_eq!(expected_shortfall(&u, 2.0), 0.0);
    }

    #[test]
    fn uniform_risk_measures() {
        let u = LossDistribution::Uniform01;
        assert_eq!(value_at_risk(&u, 0.99).unwrap(), 0.99);
        assert_eq!(value_at_risk(&u, 0.5).unwrap(), 0.5);
        assert_abs_diff_eq!(average_value_at_risk(&u, 0.99).unwrap(), 0.995, epsilon = 1e-12);
        assert_eq!(average_value_at_risk(&u, 0.5).unwrap(), 0.75);
        assert_abs_diff_eq!(average_value_at_risk(&u, 1e-12).unwrap(), 0.5, epsilon = 1e-11);
        assert!(value_at_risk(&u, 0.0).is_err());
        assert!(average_value_at_risk(&u, 1.0).is_err());
    }

    #[test]
    fn table_jump_takes_left_endpoint() {
        let t = CdfTable::new(vec![(0.0, 0.0), (1.0, 0.3), (1.0, 0.8), (2.0, 1.0)]).unwrap();
        let d = LossDistribution::Table(t);
        assert_eq!(value_at_risk(&d, 0.5).unwrap(), 1.0);
        assert_eq!(value_at_risk(&d, 0.3).unwrap(), 1.0);
        assert_abs_diff_eq!(value_at_risk(&d, 0.15).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(d.cdf(1.0), 0.8);
    }

    #[test]
    fn table_flat_run_takes_infimum() {
        let t = CdfTable::new(vec![(0.0, 0.0), (1.0, 0.5), (3.0, 0.5), (4.0, 1.0)]).unwrap();
        let d = LossDistribution::Table(t);
        assert_eq!(value_at_risk(&d, 0.5).unwrap(), 1.0);
        assert_abs_diff_eq!(value_at_risk(&d, 0.75).unwrap(), 3.5, epsilon = 1e-15);
    }

    #[test]
    fn table_rejects_bad_knots() {
        assert!(CdfTable::new(vec![(0.0, 0.0)]).is_err());
        assert!(CdfTable::new(vec![(0.0, 0.0), (1.0, 0.9)]).is_err());
        assert!(CdfTable::new(vec![(0.0, 0.0), (1.0, 0.6), (0.5, 1.0)]).is_err());
        assert!(CdfTable::new(vec![(0.0, 0.1), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn reference_line_is_g() {
        let line = LineSpec::reference();
        for z in [0.0, 0.1, 0.5, 0.9, 1.0] {
            assert_abs_diff_eq!(line_total_loss(&line, z).unwrap(), g(z), epsilon = 1e-15);
        }
        assert_eq!(line_total_loss(&line, 0.0).unwrap(), 0.5);
        assert!(line_total_loss(&line, -0.1).is_err());
    }

    #[test]
    fn linear_minimum_is_scaled_avar() {
        let line = LineSpec::new(LossDistribution::Uniform01, 0.99, 1.0, Penalty::Linear).unwrap();
        let v = line_total_loss(&line, 0.99).unwrap();
        assert_abs_diff_eq!(v, 0.01 * 0.995, epsilon = 1e-15);
    }

    #[test]
    fn generalized_mean_examples() {
        assert_abs_diff_eq!(
            generalized_mean(&[4.0, 4.0], &[0.3, 0.7], -1.7).unwrap(),
            4.0,
            epsilon = 1e-14
        );
        assert_eq!(generalized_mean(&[1.0, 4.0], &[0.5, 0.5], 1.0).unwrap(), 2.5);
        assert_abs_diff_eq!(
            generalized_mean(&[1.0, 4.0], &[0.5, 0.5], -1.0).unwrap(),
            1.6,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            generalized_mean(&[1.0, 4.0], &[0.5, 0.5], 0.0).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            generalized_mean(&[1.0f32, 4.0], &[0.5, 0.5], 2.0).unwrap(),
            8.5f32.sqrt(),
            epsilon = 1e-6
        );
    }

    #[test]
    fn generalized_mean_domain_errors() {
        assert!(generalized_mean(&[0.0, 4.0], &[0.5, 0.5], -1.0).is_err());
        assert!(generalized_mean(&[-1.0, 4.0], &[0.5, 0.5], 0.5).is_err());
        assert!(generalized_mean(&[-1.0, 4.0], &[0.5, 0.5], 0.0).is_err());
        assert!(generalized_mean(&[1.0, 4.0], &[0.5, 0.6], 1.0).is_err());
        assert!(generalized_mean(&[1.0], &[0.5, 0.5], 1.0).is_err());
        assert_eq!(generalized_mean(&[0.0, 4.0], &[0.5, 0.5], 1.0).unwrap(), 2.0);
    }

    #[test]
    fn reference_aggregate_values() {
        let h2 = AggregateSpec::reference(2.0);
        assert_abs_diff_eq!(
            h2.evaluate(&[0.0, 1.0]).unwrap(),
            (0.5 * 0.25 + 0.5 * 1e-4f64).sqrt(),
            epsilon = 1e-15
        );
        let h1 = AggregateSpec::reference(1.0);
        assert_abs_diff_eq!(h1.evaluate(&[0.3, 0.3]).unwrap(), g(0.3), epsilon = 1e-15);
        let hm = AggregateSpec::reference(-1.0);
        let (a, b) = (g(0.25), g(0.75));
        assert_abs_diff_eq!(
            hm.evaluate(&[0.25, 0.75]).unwrap(),
            2.0 / (1.0 / a + 1.0 / b),
            epsilon = 1e-15
        );
    }

    #[test]
    fn closed_form_derivatives_match_differences() {
        let line = LineSpec::reference();
        let x = 0.4;
        let h = 1e-5;
        let (v, d1, d2) = line.derivatives(x).unwrap();
        let f = |z| line_total_loss(&line, z).unwrap();
        assert_eq!(v, f(x));
        assert_abs_diff_eq!(d1, (f(x + h) - f(x - h)) / (2.0 * h), epsilon = 1e-8);
        assert_abs_diff_eq!(d2, (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h), epsilon = 1e-4);
    }
}
