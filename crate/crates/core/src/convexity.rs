//! Sampling-based convexity certification.
//!
//! Verdicts are `holds_on_samples` or `violated`: a finite sample can refute
//! a universally quantified statement but never prove it.

use serde::{Deserialize, Serialize};

use crate::domain::{sample_points, Point, Rectangle, SamplePlan};
use crate::error::{Error, Result};
use crate::expr::FunctionExpr;
use crate::sweep::{self, Judgement, Probe};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        let tol = Tolerance { abs_tol, rel_tol };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(self.abs_tol) || !ok(self.rel_tol) {
            return Err(Error::InvalidTolerance(format!(
                "tolerances must be finite and non-negative (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return Err(Error::InvalidTolerance(
                "at least one of abs_tol, rel_tol must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `abs_tol + rel_tol * |scale|`.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs_tol + self.rel_tol * scale.abs()
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnSamples,
    Violated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::HoldsOnSamples => "holds_on_samples",
            Verdict::Violated => "violated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub label: String,
    pub value: f64,
}

impl Quantity {
    pub fn new(label: impl Into<String>, value: f64) -> Self {
        Quantity {
            label: label.into(),
            value,
        }
    }
}

/// A sampled instance at which an inequality fails.
///
/// For two-point instances `points` is `[P, Q, R]` with
/// `R = lambda P + (1 - lambda) Q`; for H-functional checks the points are
/// `(t, s)` parameter pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub points: Vec<Point>,
    pub lambda: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub quantities: Vec<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub verdict: Verdict,
    /// Most negative slack observed, or 0 when none is negative.
    pub max_margin: f64,
    pub instances: u64,
    pub witness: Option<Witness>,
    /// Check-specific observations (bounds, sub-check margins, ...).
    pub summary: Vec<Quantity>,
}

impl CheckResult {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnSamples
    }
}

/// Running verdict over a deterministic stream of instances.
///
/// The witness is the violating instance with the most negative slack; ties
/// go to the earliest instance in enumeration order.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    instances: u64,
    min_slack: f64,
    worst: Option<Witness>,
    summary: Vec<Quantity>,
}

impl Tally {
    pub fn observe(&mut self, slack: f64, threshold: f64, witness: impl FnOnce() -> Witness) {
        self.instances += 1;
        if slack < self.min_slack {
            self.min_slack = slack;
        }
        if slack < -threshold && self.worst.as_ref().is_none_or(|w| slack < w.slack) {
            self.worst = Some(witness());
        }
    }

    pub fn note(&mut self, label: impl Into<String>, value: f64) {
        self.summary.push(Quantity::new(label, value));
    }

    pub fn finish(self) -> CheckResult {
        CheckResult {
            verdict: if self.worst.is_some() {
                Verdict::Violated
            } else {
                Verdict::HoldsOnSamples
            },
            max_margin: self.min_slack,
            instances: self.instances,
            witness: self.worst,
            summary: self.summary,
        }
    }
}

pub(crate) struct ConvexityProbe {
    functions: Vec<(String, FunctionExpr)>,
}

impl ConvexityProbe {
    pub fn new(name: &str, f: &FunctionExpr) -> Self {
        ConvexityProbe {
            functions: vec![(name.to_string(), f.clone())],
        }
    }
}

impl Probe for ConvexityProbe {
    fn functions(&self) -> &[(String, FunctionExpr)] {
        &self.functions
    }

    fn judge(&self, lambda: f64, values: &[[f64; 3]]) -> Judgement {
        let [at_p, at_q, at_r] = values[0];
        let rhs = lambda * at_p + (1.0 - lambda) * at_q;
        Judgement {
            lhs: at_r,
            rhs,
            slack: rhs - at_r,
            scale: rhs,
        }
    }
}

/// `f(lambda P + (1 - lambda) Q) <= lambda f(P) + (1 - lambda) f(Q)` over
/// sampled ordered pairs and lambdas.
pub fn check_convex_joint(
    f: &FunctionExpr,
    rect: &Rectangle,
    plan: &SamplePlan,
    tol: &Tolerance,
) -> Result<CheckResult> {
    sweep::sweep_joint(&ConvexityProbe::new("f", f), rect, plan, tol)
}

/// One-dimensional convexity of every sampled partial mapping
/// `u -> f(u, y)` and `v -> f(x, v)`.
pub fn check_convex_on_coordinates(
    f: &FunctionExpr,
    rect: &Rectangle,
    plan: &SamplePlan,
    tol: &Tolerance,
) -> Result<CheckResult> {
    check_convex_on_coordinates_named("f", f, rect, plan, tol)
}

pub(crate) fn check_convex_on_coordinates_named(
    name: &str,
    f: &FunctionExpr,
    rect: &Rectangle,
    plan: &SamplePlan,
    tol: &Tolerance,
) -> Result<CheckResult> {
    sweep::sweep_coordinates(&ConvexityProbe::new(name, f), rect, plan, tol)
}

/// Fejér weight conditions at every sample point: `p >= 0` and symmetry
/// about both mid-lines, `p(x, y) = p(a + b - x, y) = p(x, c + d - y)`.
pub fn check_weight(
    p: &FunctionExpr,
    rect: &Rectangle,
    plan: &SamplePlan,
    tol: &Tolerance,
) -> Result<CheckResult> {
    plan.validate()?;
    let mut tally = Tally::default();
    for point in sample_points(rect, plan) {
        let value = p.eval(point.x, point.y)?;
        tally.observe(value, tol.threshold(value), || Witness {
            points: vec![point],
            lambda: None,
            lhs: 0.0,
            rhs: value,
            slack: value,
            quantities: vec![Quantity::new("p(P)", value)],
        });
        let reflections = [
            Point::new((rect.a() + rect.b() - point.x).clamp(rect.a(), rect.b()), point.y),
            Point::new(point.x, (rect.c() + rect.d() - point.y).clamp(rect.c(), rect.d())),
        ];
        for mirrored in reflections {
            let other = p.eval(mirrored.x, mirrored.y)?;
            let gap = (value - other).abs();
            tally.observe(-gap, tol.threshold(value.abs().max(other.abs())), || Witness {
                points: vec![point, mirrored],
                lambda: None,
                lhs: gap,
                rhs: 0.0,
                slack: -gap,
                quantities: vec![Quantity::new("p(P)", value), Quantity::new("p(P')", other)],
            });
        }
    }
    Ok(tally.finish())
}
