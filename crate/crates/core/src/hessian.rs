//! Central finite-difference Hessians and closed-form reference Hessians.

use crate::error::{Error, Result};
use crate::field::{Builtin, FieldBody, ScalarField};
use crate::symcore::SymmetricMatrix;

/// How stencils that leave the field's domain hint are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    /// Halve the offending step up to [`MAX_SHRINKS`] times.
    #[default]
    Shrink,
    Reject,
}

pub const MAX_SHRINKS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    base_step: f64,
    pub relative_scaling: bool,
    pub boundary: BoundaryMode,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            base_step: 1e-4,
            relative_scaling: true,
            boundary: BoundaryMode::Shrink,
        }
    }
}

impl FdConfig {
    pub fn new(base_step: f64) -> Result<Self> {
        Self::default().with_step(base_step)
    }

    pub fn with_step(mut self, base_step: f64) -> Result<Self> {
        if !(base_step > 0.0 && base_step <= 0.1) {
            return Err(Error::InvalidParameter {
                name: "fd-step".into(),
                detail: format!("must lie in (0, 0.1], got {base_step}"),
            });
        }
        self.base_step = base_step;
        Ok(self)
    }

    pub fn base_step(&self) -> f64 {
        self.base_step
    }

    /// Unshrunk step for coordinate value `x`.
    pub fn step_at(&self, x: f64) -> f64 {
        if self.relative_scaling {
            self.base_step * x.abs().max(1.0)
        } else {
            self.base_step
        }
    }
}

fn boundary(point: &[f64], detail: impl Into<String>) -> Error {
    Error::Boundary {
        point: point.to_vec(),
        detail: detail.into(),
    }
}

/// Per-axis steps whose stencil stays inside the domain hint.
fn fit_steps(f: &ScalarField, x: &[f64], cfg: &FdConfig) -> Result<Vec<f64>> {
    let mut steps: Vec<f64> = x.iter().map(|&xi| cfg.step_at(xi)).collect();
    let Some(rect) = f.domain_hint() else {
        return Ok(steps);
    };
    if !rect.contains(x) {
        return Err(boundary(x, "point lies outside the field's domain"));
    }
    for (i, h) in steps.iter_mut().enumerate() {
        let (lo, hi) = (rect.lo()[i], rect.hi()[i]);
        let mut shrinks = 0;
        while x[i] - *h < lo || x[i] + *h > hi {
            if cfg.boundary == BoundaryMode::Reject || shrinks == MAX_SHRINKS {
                let mut at = x.to_vec();
                at[i] = if x[i] - *h < lo { x[i] - *h } else { x[i] + *h };
                return Err(boundary(&at, format!("stencil on axis {i} leaves [{lo}, {hi}]")));
            }
            *h *= 0.5;
            shrinks += 1;
        }
    }
    Ok(steps)
}

fn stencil(f: &ScalarField, x: &[f64], steps: &[f64]) -> Result<SymmetricMatrix<f64>> {
    let d = x.len();
    // Round each step so that x + h is exactly representable.
    let steps: Vec<f64> = x.iter().zip(steps).map(|(&xi, &h)| (xi + h) - xi).collect();
    let mut p = x.to_vec();
    let mut eval_at = |offsets: &[(usize, f64)]| -> Result<f64> {
        p.copy_from_slice(x);
        for &(i, dx) in offsets {
            p[i] += dx;
        }
        f.evaluate(&p)
    };
    let f0 = eval_at(&[])?;
    let mut h = vec![0.0; d * d];
    for i in 0..d {
        let hi = steps[i];
        let fp = eval_at(&[(i, hi)])?;
        let fm = eval_at(&[(i, -hi)])?;
        h[i * d + i] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for j in (i + 1)..d {
            let hj = steps[j];
            let fpp = eval_at(&[(i, hi), (j, hj)])?;
            let fpm = eval_at(&[(i, hi), (j, -hj)])?;
            let fmp = eval_at(&[(i, -hi), (j, hj)])?;
            let fmm = eval_at(&[(i, -hi), (j, -hj)])?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            h[i * d + j] = v;
            h[j * d + i] = v;
        }
    }
    SymmetricMatrix::new(d, h)
}

/// Hessian of `f` at `point` by central differences.
///
/// Diagonal entries use the 3-point second difference, off-diagonal entries
/// the 4-point cross stencil. With [`BoundaryMode::Shrink`] a stencil that
/// leaves the domain hint, or hits an evaluation domain error, is retried
/// with halved steps; one-sided stencils are never used. A scaled field
/// `k·g` is differentiated as `k` times the Hessian of `g`.
pub fn hessian_fd(f: &ScalarField, point: &[f64], cfg: &FdConfig) -> Result<SymmetricMatrix<f64>> {
    if point.len() != f.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f.dimension(),
            actual: point.len(),
        });
    }
    if let FieldBody::Scaled(k, inner) = f.body() {
        return Ok(hessian_fd(inner, point, cfg)?.scaled(*k));
    }
    let mut steps = fit_steps(f, point, cfg)?;
    let mut attempt = 0;
    loop {
        match stencil(f, point, &steps) {
            Ok(h) => return Ok(h),
            Err(Error::Domain { node, detail }) if cfg.boundary == BoundaryMode::Shrink && attempt < MAX_SHRINKS => {
                log::debug!("stencil evaluation failed in `{node}` ({detail}); halving steps");
                steps.iter_mut().for_each(|h| *h *= 0.5);
                attempt += 1;
            }
            Err(Error::Domain { node, detail }) => {
                return Err(boundary(point, format!("evaluation failed in `{node}`: {detail}")))
            }
            Err(e) => return Err(e),
        }
    }
}

/// Closed-form Hessian for corpus fields that have one.
pub fn analytic_hessian(f: &ScalarField, point: &[f64]) -> Result<SymmetricMatrix<f64>> {
    if point.len() != f.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f.dimension(),
            actual: point.len(),
        });
    }
    let x = point;
    match f.body() {
        FieldBody::Builtin(b) => match b {
            Builtin::HCos => Ok(SymmetricMatrix::from_diagonal(&[x[0].cos(), x[1].cos()])),
            Builtin::Cubic1d => Ok(SymmetricMatrix::from_diagonal(&[6.0 * x[0]])),
            Builtin::NegCos1d => Ok(SymmetricMatrix::from_diagonal(&[x[0].cos()])),
            Builtin::Quadratic(q) => Ok(q.a.clone()),
            Builtin::GRisk(line) => {
                let (_, _, d2) = line.derivatives(x[0])?;
                SymmetricMatrix::new(1, vec![d2])
            }
            Builtin::HBeta(spec) => aggregate_hessian(spec, x),
        },
        FieldBody::Scaled(k, inner) => Ok(analytic_hessian(inner, point)?.scaled(*k)),
        FieldBody::Expression(_) => Err(Error::Unsupported(
            "no closed-form Hessian for parsed expressions".into(),
        )),
    }
}

/// Hessian of `(Σ wᵢ gᵢ^β)^{1/β}` (geometric form for `|β|` below the
/// threshold) from the per-line first and second derivatives.
fn aggregate_hessian(spec: &crate::risk::AggregateSpec, x: &[f64]) -> Result<SymmetricMatrix<f64>> {
    let d = spec.dimension();
    let parts = spec
        .lines
        .iter()
        .zip(x)
        .map(|(l, &xi)| l.derivatives(xi))
        .collect::<Result<Vec<_>>>()?;
    let w = &spec.weights;
    let beta = spec.beta;
    let mean = spec.evaluate(x)?;
    let mut out = vec![0.0; d * d];
    if beta.abs() < crate::risk::BETA_EPSILON {
        // ln h = Σ wᵢ ln gᵢ
        let r: Vec<f64> = parts.iter().zip(w).map(|(&(g, g1, _), wi)| wi * g1 / g).collect();
        for i in 0..d {
            for j in 0..d {
                let mut v = mean * r[i] * r[j];
                if i == j {
                    let (g, g1, g2) = parts[i];
                    v += mean * w[i] * (g2 * g - g1 * g1) / (g * g);
                }
                out[i * d + j] = v;
            }
        }
    } else {
        let s: f64 = parts.iter().zip(w).map(|(&(g, _, _), wi)| wi * g.powf(beta)).sum();
        let outer = (1.0 - beta) * s.powf(1.0 / beta - 2.0);
        let diag = s.powf(1.0 / beta - 1.0);
        let u: Vec<f64> = parts
            .iter()
            .zip(w)
            .map(|(&(g, g1, _), wi)| wi * g.powf(beta - 1.0) * g1)
            .collect();
        for i in 0..d {
            for j in 0..d {
                let mut v = outer * u[i] * u[j];
                if i == j {
                    let (g, g1, g2) = parts[i];
                    v += diag * w[i] * ((beta - 1.0) * g.powf(beta - 2.0) * g1 * g1 + g.powf(beta - 1.0) * g2);
                }
                out[i * d + j] = v;
            }
        }
    }
    SymmetricMatrix::new(d, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{builtin, BuiltinParams};
    use crate::quadrature::HyperRect;
    use std::f64::consts::PI;

    fn h_cos() -> ScalarField {
        builtin("h_cos", &BuiltinParams::default()).unwrap()
    }

    #[test]
    fn fd_h_cos_at_origin() {
        let h = hessian_fd(&h_cos(), &[0.0, 0.0], &FdConfig::default()).unwrap();
        assert!(h.max_abs_diff(&SymmetricMatrix::identity(2)) <= 1e-6);
    }

    #[test]
    fn fd_exact_for_quadratics() {
        let f = ScalarField::parse("x^2 + x*y", 2).unwrap();
        let want = SymmetricMatrix::new(2, vec![2.0, 1.0, 1.0, 0.0]).unwrap();
        for p in [[0.0, 0.0], [0.3, -0.7], [-0.2, 0.1]] {
            let h = hessian_fd(&f, &p, &FdConfig::default()).unwrap();
            assert!(h.max_abs_diff(&want) <= 1e-8, "{p:?}: {h}");
        }
        // Away from the origin only rounding of f remains: a few ulps of |f| over h².
        for p in [[1.0, 2.0], [-2.5, 0.4]] {
            let cfg = FdConfig::default();
            let h = hessian_fd(&f, &p, &cfg).unwrap();
            let fmax = f.evaluate(&p).unwrap().abs() + 10.0 * cfg.step_at(p[0]);
            let step = cfg.step_at(p[0]).min(cfg.step_at(p[1]));
            let bound = 16.0 * f64::EPSILON * fmax / (step * step);
            assert!(h.max_abs_diff(&want) <= bound, "{p:?}: {h}");
        }
    }

    #[test]
    fn constant_field_gives_zero() {
        let f = ScalarField::parse("5", 2).unwrap();
        let h = hessian_fd(&f, &[0.3, 1.7], &FdConfig::default()).unwrap();
        assert_eq!(h, SymmetricMatrix::zeros(2));
    }

    #[test]
    fn analytic_h_cos() {
        let f = h_cos();
        let h = analytic_hessian(&f, &[PI / 3.0, PI]).unwrap();
        assert!((h.get(0, 0) - 0.5).abs() < 1e-15);
        assert_eq!(h.get(1, 1), -1.0);
        assert_eq!(analytic_hessian(&f, &[0.0, 0.0]).unwrap(), SymmetricMatrix::identity(2));
        let z = analytic_hessian(&f, &[PI / 2.0, PI / 2.0]).unwrap();
        assert!(z.max_norm() < 1e-16);
    }

    #[test]
    fn analytic_unsupported_for_expressions() {
        let f = ScalarField::parse("x*y", 2).unwrap();
        assert!(matches!(analytic_hessian(&f, &[0.0, 0.0]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn shrink_near_boundary() {
        let f = ScalarField::parse("x^2", 1)
            .unwrap()
            .with_domain(HyperRect::new(vec![0.0], vec![1.0]).unwrap())
            .unwrap();
        let h = hessian_fd(&f, &[1e-5], &FdConfig::default()).unwrap();
        assert!((h.get(0, 0) - 2.0).abs() < 1e-3);
        let reject = FdConfig {
            boundary: BoundaryMode::Reject,
            ..FdConfig::default()
        };
        assert!(matches!(hessian_fd(&f, &[1e-5], &reject), Err(Error::Boundary { .. })));
        // too close even after eight halvings
        assert!(matches!(
            hessian_fd(&f, &[1e-9], &FdConfig::default()),
            Err(Error::Boundary { .. })
        ));
        assert!(matches!(
            hessian_fd(&f, &[1.5], &FdConfig::default()),
            Err(Error::Boundary { .. })
        ));
    }

    #[test]
    fn evaluation_errors_become_boundary_errors() {
        let f = ScalarField::parse("sqrt(x)", 1).unwrap();
        let err = hessian_fd(&f, &[0.0], &FdConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Boundary { .. }), "{err:?}");
    }

    #[test]
    fn step_validation() {
        assert!(FdConfig::new(0.0).is_err());
        assert!(FdConfig::new(0.2).is_err());
        assert!(FdConfig::new(0.1).is_ok());
        let abs = FdConfig {
            relative_scaling: false,
            ..FdConfig::default()
        };
        assert_eq!(abs.step_at(100.0), 1e-4);
        assert_eq!(FdConfig::default().step_at(100.0), 1e-2);
    }
}
