//! Composite tensor-product quadrature on rectangles.
//!
//! Each axis is split into `panels_per_axis` equal panels and a fixed rule
//! (Gauss-Legendre or Simpson) is applied on every panel. The error estimate
//! is the difference against the same rule with twice as many panels per
//! axis. Panel sums are combined by pairwise summation in panel-index order,
//! so results are bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::domain::Rectangle;
use crate::error::{Error, Result};
use crate::expr::{EvalError, FunctionExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadRule {
    GaussLegendre,
    Simpson,
}

impl QuadRule {
    pub fn name(self) -> &'static str {
        match self {
            QuadRule::GaussLegendre => "gauss_legendre",
            QuadRule::Simpson => "simpson",
        }
    }

    pub fn from_name(name: &str) -> Option<QuadRule> {
        match name {
            "gauss_legendre" => Some(QuadRule::GaussLegendre),
            "simpson" => Some(QuadRule::Simpson),
            _ => None,
        }
    }
}

/// Quadrature configuration.
///
/// `order` is the number of nodes per panel for Gauss-Legendre (2..=64) and
/// the number of Simpson sub-intervals per panel (even) for Simpson.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub rule: QuadRule,
    pub order: usize,
    pub panels_per_axis: usize,
}

impl QuadSpec {
    pub fn new(rule: QuadRule, order: usize, panels_per_axis: usize) -> Result<Self> {
        let spec = QuadSpec {
            rule,
            order,
            panels_per_axis,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.rule {
            QuadRule::GaussLegendre if !(2..=64).contains(&self.order) => {
                return Err(Error::InvalidQuadSpec(format!(
                    "gauss_legendre order must be in [2, 64] (got {})",
                    self.order
                )))
            }
            QuadRule::Simpson if self.order == 0 || !self.order.is_multiple_of(2) => {
                return Err(Error::InvalidQuadSpec(format!(
                    "simpson order must be a positive even number (got {})",
                    self.order
                )))
            }
            _ => {}
        }
        if self.panels_per_axis == 0 {
            return Err(Error::InvalidQuadSpec(
                "panels_per_axis must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The same rule with twice as many panels per axis.
    pub fn refined(&self) -> QuadSpec {
        QuadSpec {
            panels_per_axis: self.panels_per_axis * 2,
            ..*self
        }
    }
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rule: QuadRule::GaussLegendre,
            order: 16,
            panels_per_axis: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    /// `|value - value with doubled panels|`.
    pub error_estimate: f64,
}

/// A rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct ReferenceRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ReferenceRule {
    pub fn for_spec(spec: &QuadSpec) -> ReferenceRule {
        match spec.rule {
            QuadRule::GaussLegendre => gauss_legendre(spec.order),
            QuadRule::Simpson => simpson(spec.order),
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending, by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> ReferenceRule {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, z);
            derivative = dp;
            let step = p / dp;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        // refresh the derivative at the converged root
        let (_, dp) = legendre_with_derivative(n, z);
        if dp.is_finite() {
            derivative = dp;
        }
        if n % 2 == 1 && i == half - 1 {
            z = 0.0;
            derivative = legendre_with_derivative(n, 0.0).1;
        }
        let w = 2.0 / ((1.0 - z * z) * derivative * derivative);
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    ReferenceRule { nodes, weights }
}

/// `(P_n(z), P_n'(z))` for `|z| < 1`.
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * z * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (z * p - p_prev) / (z * z - 1.0);
    (p, dp)
}

/// Composite Simpson with `m` (even) sub-intervals on `[-1, 1]`.
pub fn simpson(m: usize) -> ReferenceRule {
    let h = 2.0 / m as f64;
    let nodes = (0..=m)
        .map(|i| if i == m { 1.0 } else { -1.0 + h * i as f64 })
        .collect();
    let weights = (0..=m)
        .map(|i| {
            let c = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect();
    ReferenceRule { nodes, weights }
}

/// Nodes and weights of one axis, grouped by panel.
struct AxisRule {
    panels: Vec<(Vec<f64>, Vec<f64>)>,
}

impl AxisRule {
    fn new(rule: &ReferenceRule, lo: f64, hi: f64, panels: usize) -> AxisRule {
        let width = (hi - lo) / panels as f64;
        let panels = (0..panels)
            .map(|p| {
                let left = lo + width * p as f64;
                let right = if p + 1 == panels {
                    hi
                } else {
                    lo + width * (p + 1) as f64
                };
                let centre = 0.5 * (left + right);
                let half = 0.5 * (right - left);
                let nodes = rule.nodes.iter().map(|t| centre + half * t).collect();
                let weights = rule.weights.iter().map(|w| half * w).collect();
                (nodes, weights)
            })
            .collect();
        AxisRule { panels }
    }
}

/// Sum in a fixed binary-tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

fn tensor_sum<F>(f: &F, rect: &Rectangle, rule: &ReferenceRule, panels: usize) -> Result<f64, EvalError>
where
    F: Fn(f64, f64) -> Result<f64, EvalError>,
{
    let xs = AxisRule::new(rule, rect.a(), rect.b(), panels);
    let ys = AxisRule::new(rule, rect.c(), rect.d(), panels);
    let mut panel_sums = Vec::with_capacity(panels * panels);
    for (px, wx) in &xs.panels {
        for (py, wy) in &ys.panels {
            let mut sum = 0.0;
            for (x, wxi) in px.iter().zip(wx) {
                let mut row = 0.0;
                for (y, wyj) in py.iter().zip(wy) {
                    row += wyj * f(*x, *y)?;
                }
                sum += wxi * row;
            }
            panel_sums.push(sum);
        }
    }
    Ok(pairwise_sum(&panel_sums))
}

fn axis_sum<F>(f: &F, lo: f64, hi: f64, rule: &ReferenceRule, panels: usize) -> Result<f64, EvalError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let axis = AxisRule::new(rule, lo, hi, panels);
    let mut panel_sums = Vec::with_capacity(panels);
    for (nodes, weights) in &axis.panels {
        let mut sum = 0.0;
        for (t, w) in nodes.iter().zip(weights) {
            sum += w * f(*t)?;
        }
        panel_sums.push(sum);
    }
    Ok(pairwise_sum(&panel_sums))
}

/// Integrate an arbitrary fallible integrand over `rect`.
pub fn integrate2d_with<F>(f: F, rect: &Rectangle, spec: &QuadSpec) -> Result<IntegralEstimate>
where
    F: Fn(f64, f64) -> Result<f64, EvalError>,
{
    spec.validate()?;
    let rule = ReferenceRule::for_spec(spec);
    let value = tensor_sum(&f, rect, &rule, spec.panels_per_axis)?;
    let fine = tensor_sum(&f, rect, &rule, spec.refined().panels_per_axis)?;
    Ok(IntegralEstimate {
        value,
        error_estimate: (value - fine).abs(),
    })
}

/// Integrate a fallible function of one variable over `[lo, hi]`.
pub fn integrate1d_with<F>(f: F, lo: f64, hi: f64, spec: &QuadSpec) -> Result<IntegralEstimate>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "interval [{lo}, {hi}] is not finite"
        )));
    }
    let rule = ReferenceRule::for_spec(spec);
    let value = axis_sum(&f, lo, hi, &rule, spec.panels_per_axis)?;
    let fine = axis_sum(&f, lo, hi, &rule, spec.refined().panels_per_axis)?;
    Ok(IntegralEstimate {
        value,
        error_estimate: (value - fine).abs(),
    })
}

/// Unnormalized `∫∫ f` over the rectangle.
pub fn integrate2d(f: &FunctionExpr, rect: &Rectangle, spec: &QuadSpec) -> Result<IntegralEstimate> {
    integrate2d_with(|x, y| f.eval(x, y), rect, spec)
}

/// Which variable is held fixed in a one-dimensional integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pinned {
    /// `x = v`, integrate over `y`.
    X(f64),
    /// `y = v`, integrate over `x`.
    Y(f64),
}

pub fn integrate1d(
    f: &FunctionExpr,
    pinned: Pinned,
    interval: (f64, f64),
    spec: &QuadSpec,
) -> Result<IntegralEstimate> {
    let (lo, hi) = interval;
    match pinned {
        Pinned::X(x) => integrate1d_with(|y| f.eval(x, y), lo, hi, spec),
        Pinned::Y(y) => integrate1d_with(|x| f.eval(x, y), lo, hi, spec),
    }
}

/// `∫∫ f / area`.
pub fn mean2d(f: &FunctionExpr, rect: &Rectangle, spec: &QuadSpec) -> Result<f64> {
    Ok(integrate2d(f, rect, spec)?.value / rect.area())
}
