//! Global L1 convexity index over boxes by tensor-product Simpson, the
//! expanding-square sweep, and lattice maps of pointwise reports.
//!
//! Lattice points are evaluated in parallel, but every reduction runs
//! sequentially in lattice order, so results do not depend on the thread
//! count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::hessian::{hessian_fd, FdConfig};
use crate::indices::ConvexityReport;
use crate::scalar::{negative_part, positive_part};
use crate::symcore::eigendecompose;

/// Default Simpson nodes per axis for 2-D regions.
pub const DEFAULT_NODES: usize = 201;

/// Axis-aligned box `[lo₀, hi₀] × … × [lo_{d-1}, hi_{d-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperRect {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl HyperRect {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidParameter {
                name: "region".into(),
                detail: format!("bounds of length {} and {}", lo.len(), hi.len()),
            });
        }
        if let Some(i) = (0..lo.len()).find(|&i| !(lo[i] < hi[i]) || !lo[i].is_finite() || !hi[i].is_finite()) {
            return Err(Error::InvalidParameter {
                name: "region".into(),
                detail: format!("axis {i} needs finite lo < hi, got [{}, {}]", lo[i], hi[i]),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    /// Closed containment.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, &v)| v >= self.lo[i] && v <= self.hi[i])
    }

    pub fn contains_rect(&self, other: &HyperRect) -> bool {
        other.dim() == self.dim() && self.contains(&other.lo) && self.contains(&other.hi)
    }
}

/// Cube `S_c(a)` of half-width `a` around `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Square {
    pub center: Vec<f64>,
    pub half_width: f64,
}

impl Square {
    pub fn new(center: Vec<f64>, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "half-width".into(),
                detail: format!("must be positive, got {half_width}"),
            });
        }
        Ok(Self { center, half_width })
    }

    pub fn to_rect(&self) -> Result<HyperRect> {
        HyperRect::new(
            self.center.iter().map(|c| c - self.half_width).collect(),
            self.center.iter().map(|c| c + self.half_width).collect(),
        )
    }
}

/// Composite Simpson weights on `n` equispaced nodes of `[lo, hi]`.
pub fn simpson_weights(n: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidParameter {
            name: "grid".into(),
            detail: format!("Simpson needs an odd node count >= 3, got {n}"),
        });
    }
    let h = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| {
            let c = if k == 0 || k == n - 1 {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect())
}

/// Node coordinates along one axis; a single node sits at the midpoint.
fn axis_nodes(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Lattice point `k` with the first axis varying slowest.
fn lattice_point(k: usize, axes: &[Vec<f64>]) -> (Vec<f64>, Vec<usize>) {
    let mut idx = vec![0; axes.len()];
    let mut rem = k;
    for (i, axis) in axes.iter().enumerate().rev() {
        idx[i] = rem % axis.len();
        rem /= axis.len();
    }
    let x = idx.iter().zip(axes).map(|(&j, a)| a[j]).collect();
    (x, idx)
}

fn check_region(f: &ScalarField, region: &HyperRect, what: &str) -> Result<()> {
    if region.dim() != f.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f.dimension(),
            actual: region.dim(),
        });
    }
    if let Some(hint) = f.domain_hint() {
        if !hint.contains_rect(region) {
            return Err(Error::Domain {
                node: what.to_string(),
                detail: format!(
                    "region {:?}..{:?} leaves the field's domain {:?}..{:?}",
                    region.lo(),
                    region.hi(),
                    hint.lo(),
                    hint.hi()
                ),
            });
        }
    }
    Ok(())
}

fn lattice_size(nodes: usize, dim: usize) -> Result<usize> {
    let total = (0..dim).try_fold(1usize, |acc, _| acc.checked_mul(nodes));
    let total = total.ok_or_else(|| Error::InvalidParameter {
        name: "grid".into(),
        detail: format!("{nodes}^{dim} lattice points overflow"),
    })?;
    if dim >= 3 {
        log::warn!("{dim}-dimensional tensor lattice: {total} Hessian evaluations");
    }
    Ok(total)
}

/// Evaluates `per_point` on every lattice point in parallel and returns the
/// results in lattice order; the first failure in lattice order wins.
fn map_lattice<R: Send>(
    axes: &[Vec<f64>],
    total: usize,
    per_point: impl Fn(&[f64]) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let results: Vec<Result<R>> = (0..total)
        .into_par_iter()
        .map(|k| per_point(&lattice_point(k, axes).0))
        .collect();
    results.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalIndex {
    /// `∫ Σ λᵢ⁺ / ∫ Σ |λᵢ|`, or 1 for an all-degenerate region.
    pub value: f64,
    pub degenerate: bool,
    /// Share of lattice points with a zero Hessian.
    pub degenerate_fraction: f64,
    pub positive_integral: f64,
    pub absolute_integral: f64,
    pub nodes: usize,
}

/// Global convexity index of `f` over `region`.
///
/// Numerator and denominator share one lattice and one set of Simpson
/// weights. Points with a zero Hessian add nothing to either integral.
pub fn global_convexity_index(
    f: &ScalarField,
    region: &HyperRect,
    nodes: usize,
    cfg: &FdConfig,
) -> Result<GlobalIndex> {
    check_region(f, region, "region")?;
    let d = region.dim();
    let weights: Vec<Vec<f64>> = (0..d)
        .map(|i| simpson_weights(nodes, region.lo()[i], region.hi()[i]))
        .collect::<Result<_>>()?;
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|i| axis_nodes(nodes, region.lo()[i], region.hi()[i]))
        .collect();
    let total = lattice_size(nodes, d)?;

    let sums = map_lattice(&axes, total, |x| {
        let h = hessian_fd(f, x, cfg)?;
        let eigen = eigendecompose(&h);
        let plus: f64 = eigen.eigenvalues().iter().map(|&l| positive_part(l)).sum();
        let minus: f64 = eigen.eigenvalues().iter().map(|&l| negative_part(l)).sum();
        Ok((plus, plus + minus))
    })?;

    let mut pos = 0.0;
    let mut abs = 0.0;
    let mut degenerate_points = 0usize;
    for (k, &(p, a)) in sums.iter().enumerate() {
        let (_, idx) = lattice_point(k, &axes);
        let w: f64 = idx.iter().zip(&weights).map(|(&j, wi)| wi[j]).product();
        pos += w * p;
        abs += w * a;
        if a == 0.0 {
            degenerate_points += 1;
        }
    }
    let degenerate = abs < 1e-14 * region.volume();
    Ok(GlobalIndex {
        value: if degenerate { 1.0 } else { pos / abs },
        degenerate,
        degenerate_fraction: degenerate_points as f64 / total as f64,
        positive_integral: pos,
        absolute_integral: abs,
        nodes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub a: f64,
    pub conv: f64,
    pub degenerate_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub center: Vec<f64>,
    pub records: Vec<SweepRecord>,
    pub nodes: usize,
}

/// `CONV(a)` on the squares `S_center(a)` for `a = a_max·k/steps`,
/// `k = 1..=steps`.
pub fn sweep_conv_a(
    f: &ScalarField,
    center: &[f64],
    a_max: f64,
    steps: usize,
    nodes: usize,
    cfg: &FdConfig,
) -> Result<SweepResult> {
    if steps == 0 {
        return Err(Error::InvalidParameter {
            name: "steps".into(),
            detail: "need at least one step".into(),
        });
    }
    if center.len() != f.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f.dimension(),
            actual: center.len(),
        });
    }
    Square::new(center.to_vec(), a_max)?;
    let halfwidths: Vec<f64> = (1..=steps).map(|k| a_max * k as f64 / steps as f64).collect();
    let rects = halfwidths
        .iter()
        .map(|&a| Square::new(center.to_vec(), a)?.to_rect())
        .collect::<Result<Vec<_>>>()?;
    if let Some(hint) = f.domain_hint() {
        if let Some(k) = rects.iter().position(|r| !hint.contains_rect(r)) {
            return Err(Error::Domain {
                node: format!("square S(a = {})", halfwidths[k]),
                detail: format!(
                    "square around {center:?} leaves the field's domain {:?}..{:?}",
                    hint.lo(),
                    hint.hi()
                ),
            });
        }
    }
    let mut records = Vec::with_capacity(steps);
    for (a, rect) in halfwidths.into_iter().zip(&rects) {
        let g = global_convexity_index(f, rect, nodes, cfg)?;
        records.push(SweepRecord {
            a,
            conv: g.value,
            degenerate_fraction: g.degenerate_fraction,
        });
    }
    Ok(SweepResult {
        center: center.to_vec(),
        records,
        nodes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub region: HyperRect,
    pub nodes: usize,
    /// Row-major, first axis slowest.
    pub reports: Vec<ConvexityReport>,
}

/// Pointwise reports on the `nodes^d` lattice of `region`.
pub fn region_map(f: &ScalarField, region: &HyperRect, nodes: usize, cfg: &FdConfig) -> Result<RegionMap> {
    if nodes == 0 {
        return Err(Error::InvalidParameter {
            name: "grid".into(),
            detail: "need at least one node per axis".into(),
        });
    }
    check_region(f, region, "region")?;
    let d = region.dim();
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|i| axis_nodes(nodes, region.lo()[i], region.hi()[i]))
        .collect();
    let total = lattice_size(nodes, d)?;
    let reports = map_lattice(&axes, total, |x| {
        let h = hessian_fd(f, x, cfg)?;
        Ok(ConvexityReport::from_hessian(x, &h))
    })?;
    Ok(RegionMap {
        region: region.clone(),
        nodes,
        reports,
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
    fn simpson_integrates_cubics_exactly() {
        let w = simpson_weights(5, 0.0, 2.0).unwrap();
        let xs = axis_nodes(5, 0.0, 2.0);
        let s: f64 = w.iter().zip(&xs).map(|(w, x)| w * x * x * x).sum();
        assert!((s - 4.0).abs() < 1e-14);
        assert!(simpson_weights(4, 0.0, 1.0).is_err());
        assert!(simpson_weights(1, 0.0, 1.0).is_err());
    }

    #[test]
    fn rect_validation() {
        assert!(HyperRect::new(vec![0.0], vec![0.0]).is_err());
        assert!(HyperRect::new(vec![0.0, 1.0], vec![1.0]).is_err());
        let r = HyperRect::cube(2, -1.0, 1.0).unwrap();
        assert_eq!(r.volume(), 4.0);
        assert!(r.contains(&[1.0, -1.0]));
        assert!(!r.contains(&[1.1, 0.0]));
        assert!(Square::new(vec![0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn lattice_order_is_first_axis_slowest() {
        let axes = vec![vec![0.0, 1.0], vec![10.0, 20.0, 30.0]];
        assert_eq!(lattice_point(1, &axes).0, vec![0.0, 20.0]);
        assert_eq!(lattice_point(3, &axes).0, vec![1.0, 10.0]);
    }

    #[test]
    fn h_cos_convex_square() {
        let r = HyperRect::cube(2, -1.0, 1.0).unwrap();
        let g = global_convexity_index(&h_cos(), &r, 101, &FdConfig::default()).unwrap();
        assert!((g.value - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn h_cos_half_at_pi() {
        let r = HyperRect::cube(2, -PI, PI).unwrap();
        let g = global_convexity_index(&h_cos(), &r, 201, &FdConfig::default()).unwrap();
        assert!((g.value - 0.5).abs() <= 1e-3, "{}", g.value);
    }

    #[test]
    fn convex_quadratic_is_exactly_one() {
        let f = ScalarField::parse("x^2 + y^2", 2).unwrap();
        let s = sweep_conv_a(&f, &[0.3, -0.2], 1.5, 3, 21, &FdConfig::default()).unwrap();
        assert!(s.records.iter().all(|r| r.conv == 1.0));
    }

    #[test]
    fn all_degenerate_region() {
        let f = ScalarField::parse("x + 2*y", 2).unwrap();
        let f = f.scaled(0.0);
        let g = global_convexity_index(&f, &HyperRect::cube(2, 0.0, 1.0).unwrap(), 5, &FdConfig::default()).unwrap();
        assert!(g.degenerate);
        assert_eq!(g.value, 1.0);
        assert_eq!(g.degenerate_fraction, 1.0);
    }

    #[test]
    fn sweep_names_first_escaping_square() {
        let f = builtin(
            "h_beta",
            &BuiltinParams {
                beta: Some(1.0),
                ..Default::default()
            },
        )
        .unwrap();
        let err = sweep_conv_a(&f, &[0.25, 0.75], 0.5, 10, 5, &FdConfig::default()).unwrap_err();
        match err {
            Error::Domain { node, .. } => assert_eq!(node, "square S(a = 0.25)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn map_layout() {
        let f = ScalarField::parse("-x^2 - y^2", 2).unwrap();
        let m = region_map(&f, &HyperRect::cube(2, -1.0, 1.0).unwrap(), 3, &FdConfig::default()).unwrap();
        assert_eq!(m.reports.len(), 9);
        assert_eq!(m.reports[1].point, vec![-1.0, 0.0]);
        assert!(m.reports.iter().all(|r| r.conv == 0.0));
    }
}
