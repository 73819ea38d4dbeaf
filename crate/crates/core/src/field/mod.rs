//! Scalar fields `ℝᵈ → ℝ`: parsed expressions and the built-in corpus.

pub mod expr;
mod parser;

use crate::error::{Error, Result};
use crate::quadrature::HyperRect;
use crate::risk::{AggregateSpec, LineSpec, LossDistribution, Penalty, DEFAULT_DOMAIN_FLOOR};
use crate::symcore::SymmetricMatrix;

pub use expr::{BinaryOp, Expression, Function};
pub use parser::parse_expression;

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 5] = ["h_cos", "g_risk", "h_beta", "cubic_1d", "neg_cos_1d"];

/// `½·xᵀAx + bᵀx + c`; its Hessian is `A` everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub a: SymmetricMatrix<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl QuadraticForm {
    fn eval(&self, x: &[f64]) -> f64 {
        let d = self.a.dim();
        let mut quad = 0.0;
        for (i, xi) in x.iter().enumerate().take(d) {
            let row: f64 = x.iter().enumerate().map(|(j, xj)| self.a.get(i, j) * xj).sum();
            quad += xi * row;
        }
        0.5 * quad + self.b.iter().zip(x).map(|(b, x)| b * x).sum::<f64>() + self.c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    /// `-cos x - cos y`
    HCos,
    /// Total loss of one line; for the reference line `0.5(1-z)² + 0.01 z^{1/4}`.
    GRisk(LineSpec),
    /// Generalized-mean aggregate of line losses.
    HBeta(AggregateSpec),
    /// `x³`
    Cubic1d,
    /// `-cos x`
    NegCos1d,
    Quadratic(QuadraticForm),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldBody {
    Expression(Expression),
    Builtin(Builtin),
    /// `factor · inner`
    Scaled(f64, Box<ScalarField>),
}

/// An evaluatable function `ℝᵈ → ℝ` with an optional box on which it is C².
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    dimension: usize,
    body: FieldBody,
    domain_hint: Option<HyperRect>,
}

impl ScalarField {
    pub fn from_expression(expr: Expression, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if let Some(i) = expr.max_variable().filter(|&i| i >= dimension) {
            return Err(Error::VariableOutOfRange {
                name: format!("x{}", i + 1),
                index: i,
                dimension,
            });
        }
        Ok(Self {
            dimension,
            body: FieldBody::Expression(expr),
            domain_hint: None,
        })
    }

    pub fn parse(source: &str, dimension: usize) -> Result<Self> {
        Self::from_expression(parse_expression(source, dimension)?, dimension)
    }

    pub fn quadratic(form: QuadraticForm) -> Result<Self> {
        if form.b.len() != form.a.dim() {
            return Err(Error::DimensionMismatch {
                expected: form.a.dim(),
                actual: form.b.len(),
            });
        }
        Ok(Self {
            dimension: form.a.dim(),
            body: FieldBody::Builtin(Builtin::Quadratic(form)),
            domain_hint: None,
        })
    }

    fn from_builtin(dimension: usize, b: Builtin) -> Self {
        Self {
            dimension,
            body: FieldBody::Builtin(b),
            domain_hint: None,
        }
    }

    pub fn with_domain(mut self, domain: HyperRect) -> Result<Self> {
        if domain.dim() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: domain.dim(),
            });
        }
        self.domain_hint = Some(domain);
        Ok(self)
    }

    /// `factor · self`, keeping the domain hint.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dimension: self.dimension,
            body: FieldBody::Scaled(factor, Box::new(self.clone())),
            domain_hint: self.domain_hint.clone(),
        }
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn body(&self) -> &FieldBody {
        &self.body
    }

    pub fn domain_hint(&self) -> Option<&HyperRect> {
        self.domain_hint.as_ref()
    }

    /// Short human-readable description for output headers.
    pub fn describe(&self) -> String {
        match &self.body {
            FieldBody::Expression(e) => e.to_string(),
            FieldBody::Builtin(b) => match b {
                Builtin::HCos => "h_cos".into(),
                Builtin::GRisk(l) => format!("g_risk(p={}, alpha={})", l.p, l.alpha),
                Builtin::HBeta(s) => format!(
                    "h_beta(beta={}, p={}, alpha={}, weights={:?})",
                    s.beta, s.lines[0].p, s.lines[0].alpha, s.weights
                ),
                Builtin::Cubic1d => "cubic_1d".into(),
                Builtin::NegCos1d => "neg_cos_1d".into(),
                Builtin::Quadratic(_) => "quadratic".into(),
            },
            FieldBody::Scaled(k, inner) => format!("{k} * ({})", inner.describe()),
        }
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: point.len(),
            });
        }
        self.eval_unchecked(point)
    }

    fn eval_unchecked(&self, x: &[f64]) -> Result<f64> {
        let v = match &self.body {
            FieldBody::Expression(e) => return e.eval(x),
            FieldBody::Builtin(b) => match b {
                Builtin::HCos => -x[0].cos() - x[1].cos(),
                Builtin::GRisk(line) => crate::risk::line_total_loss(line, x[0])?,
                Builtin::HBeta(spec) => spec.evaluate(x)?,
                Builtin::Cubic1d => x[0] * x[0] * x[0],
                Builtin::NegCos1d => -x[0].cos(),
                Builtin::Quadratic(q) => q.eval(x),
            },
            FieldBody::Scaled(k, inner) => k * inner.eval_unchecked(x)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain {
                node: self.describe(),
                detail: format!("non-finite value {v}"),
            })
        }
    }
}

/// Parameters for [`builtin`]; unset values take the documented defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuiltinParams {
    /// Mean exponent for `h_beta` (required there).
    pub beta: Option<f64>,
    /// Quantile level, default `0.99`.
    pub p: Option<f64>,
    /// Penalty exponent, default `0.25`.
    pub alpha: Option<f64>,
    /// Line weights for `h_beta`, default `(0.5, 0.5)`.
    pub weights: Option<Vec<f64>>,
    /// Margin of the `[δ, 1-δ]` domain, default `1e-4`.
    pub delta: Option<f64>,
}

/// Builds a corpus field by name.
pub fn builtin(name: &str, params: &BuiltinParams) -> Result<ScalarField> {
    let invalid = |name: &str, detail: String| Error::InvalidParameter {
        name: name.into(),
        detail,
    };
    let delta = params.delta.unwrap_or(DEFAULT_DOMAIN_FLOOR);
    if !(delta > 0.0 && delta < 0.5) {
        return Err(invalid("delta", format!("must lie in (0, 0.5), got {delta}")));
    }
    let line = || {
        LineSpec::new(
            LossDistribution::Uniform01,
            params.p.unwrap_or(0.99),
            params.alpha.unwrap_or(0.25),
            Penalty::Power,
        )
    };
    match name {
        "h_cos" => Ok(ScalarField::from_builtin(2, Builtin::HCos)),
        "cubic_1d" => Ok(ScalarField::from_builtin(1, Builtin::Cubic1d)),
        "neg_cos_1d" => Ok(ScalarField::from_builtin(1, Builtin::NegCos1d)),
        "g_risk" => {
            ScalarField::from_builtin(1, Builtin::GRisk(line()?)).with_domain(HyperRect::cube(1, delta, 1.0 - delta)?)
        }
        "h_beta" => {
            let beta = params
                .beta
                .ok_or_else(|| invalid("beta", "h_beta requires a beta value".into()))?;
            let weights = params.weights.clone().unwrap_or_else(|| vec![0.5, 0.5]);
            let spec = AggregateSpec::new(vec![line()?; weights.len()], weights, beta)?;
            aggregate_field(spec, delta)
        }
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

/// The aggregate `x ↦ M_β(h₁(x₁), …, h_d(x_d))` on `[δ, 1-δ]^d`.
pub fn aggregate_field(spec: AggregateSpec, delta: f64) -> Result<ScalarField> {
    let d = spec.dimension();
    ScalarField::from_builtin(d, Builtin::HBeta(spec)).with_domain(HyperRect::cube(d, delta, 1.0 - delta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn g(z: f64) -> f64 {
        0.5 * (1.0 - z).powi(2) + 0.01 * z.powf(0.25)
    }

    #[test]
    fn h_cos_values() {
        let f = builtin("h_cos", &BuiltinParams::default()).unwrap();
        assert_eq!(f.evaluate(&[0.0, 0.0]).unwrap(), -2.0);
        assert_eq!(f.evaluate(&[PI, PI]).unwrap(), 2.0);
        assert!(f.evaluate(&[0.0]).is_err());
    }

    #[test]
    fn g_values() {
        let f = builtin("g_risk", &BuiltinParams::default()).unwrap();
        assert_abs_diff_eq!(f.evaluate(&[1.0]).unwrap(), 0.01, epsilon = 1e-16);
        assert_eq!(f.evaluate(&[0.0]).unwrap(), 0.5);
    }

    #[test]
    fn h_beta_values() {
        let params = |beta| BuiltinParams {
            beta: Some(beta),
            ..Default::default()
        };
        let h1 = builtin("h_beta", &params(1.0)).unwrap();
        assert_abs_diff_eq!(h1.evaluate(&[0.3, 0.3]).unwrap(), g(0.3), epsilon = 1e-15);
        let hm = builtin("h_beta", &params(-1.0)).unwrap();
        assert_abs_diff_eq!(hm.evaluate(&[0.5, 0.5]).unwrap(), 0.13341, epsilon = 1e-5);
        assert_abs_diff_eq!(hm.evaluate(&[0.5, 0.5]).unwrap(), g(0.5), epsilon = 1e-15);
        let hint = hm.domain_hint().unwrap();
        assert_eq!(hint.lo(), &[1e-4, 1e-4]);
        assert_eq!(hint.hi(), &[1.0 - 1e-4, 1.0 - 1e-4]);
    }

    #[test]
    fn builtin_errors() {
        assert!(matches!(
            builtin("nope", &BuiltinParams::default()),
            Err(Error::UnknownBuiltin(_))
        ));
        assert!(matches!(
            builtin("h_beta", &BuiltinParams::default()),
            Err(Error::InvalidParameter { .. })
        ));
        let bad_weights = BuiltinParams {
            beta: Some(1.0),
            weights: Some(vec![0.5, 0.6]),
            ..Default::default()
        };
        assert!(matches!(
            builtin("h_beta", &bad_weights),
            Err(Error::InvalidParameter { .. })
        ));
        let bad_p = BuiltinParams {
            p: Some(1.5),
            ..Default::default()
        };
        assert!(builtin("g_risk", &bad_p).is_err());
    }

    #[test]
    fn parse_rejects_out_of_range_variables() {
        assert!(ScalarField::parse("x + y", 1).is_err());
        let e = parse_expression("x3", 3).unwrap();
        assert!(ScalarField::from_expression(e, 2).is_err());
    }

    #[test]
    fn scaled_field() {
        let f = ScalarField::parse("x^2 + y", 2).unwrap();
        let g = f.scaled(-2.0);
        assert_eq!(g.evaluate(&[3.0, 1.0]).unwrap(), -20.0);
        assert_eq!(f.negated().evaluate(&[3.0, 1.0]).unwrap(), -10.0);
    }

    #[test]
    fn quadratic_form() {
        let a = SymmetricMatrix::new(2, vec![2.0, 1.0, 1.0, 0.0]).unwrap();
        let q = ScalarField::quadratic(QuadraticForm {
            a,
            b: vec![1.0, -1.0],
            c: 3.0,
        })
        .unwrap();
        // x² + xy + x - y + 3
        assert_eq!(q.evaluate(&[1.0, 2.0]).unwrap(), 1.0 + 2.0 + 1.0 - 2.0 + 3.0);
    }
}
