//! g-convex dominance, jointly on the rectangle and on the co-ordinates.
//!
//! With the combination defect `D_F = lambda F(P) + (1 - lambda) F(Q) - F(R)`,
//! `f` is dominated by `g` when `|D_f| <= D_g` for every instance. The
//! partial mappings are `f_x(u) = f(x, u)` and `f_y(w) = f(w, y)`.

use serde::{Deserialize, Serialize};

use crate::convexity::{check_convex_on_coordinates_named, CheckResult, Quantity, Tolerance, Verdict};
use crate::domain::{Rectangle, SamplePlan};
use crate::error::Result;
use crate::expr::FunctionExpr;
use crate::sweep::{self, Judgement, Probe};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominancePair {
    pub f: FunctionExpr,
    pub g: FunctionExpr,
}

impl DominancePair {
    pub fn new(f: FunctionExpr, g: FunctionExpr) -> Self {
        DominancePair { f, g }
    }
}

struct DominanceProbe {
    functions: Vec<(String, FunctionExpr)>,
}

impl DominanceProbe {
    fn new(pair: &DominancePair) -> Self {
        DominanceProbe {
            functions: vec![("f".into(), pair.f.clone()), ("g".into(), pair.g.clone())],
        }
    }
}

impl Probe for DominanceProbe {
    fn functions(&self) -> &[(String, FunctionExpr)] {
        &self.functions
    }

    fn judge(&self, lambda: f64, values: &[[f64; 3]]) -> Judgement {
        let defect = |[p, q, r]: [f64; 3]| lambda * p + (1.0 - lambda) * q - r;
        let lhs = defect(values[0]).abs();
        let rhs = defect(values[1]);
        let scale = values
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        Judgement {
            lhs,
            rhs,
            slack: rhs - lhs,
            scale,
        }
    }
}

/// `|D_f| <= D_g` over sampled point pairs of the rectangle. Does not check
/// that `g` itself is convex.
pub fn check_dominated_joint(
    pair: &DominancePair,
    rect: &Rectangle,
    plan: &SamplePlan,
    tol: &Tolerance,
) -> Result<CheckResult> {
    sweep::sweep_joint(&DominanceProbe::new(pair), rect, plan, tol)
}

/// One-dimensional dominance of every sampled partial mapping of `f` by the
/// matching partial mapping of `g`.
pub fn check_dominated_coordinates(
    pair: &DominancePair,
    rect: &Rectangle,
    plan: &SamplePlan,
    tol: &Tolerance,
) -> Result<CheckResult> {
    sweep::sweep_coordinates(&DominanceProbe::new(pair), rect, plan, tol)
}

/// Co-ordinate convexity of both `g - f` and `g + f`.
pub fn check_via_sum_difference(
    pair: &DominancePair,
    rect: &Rectangle,
    plan: &SamplePlan,
    tol: &Tolerance,
) -> Result<CheckResult> {
    let difference = &pair.g - &pair.f;
    let sum = &pair.g + &pair.f;
    let diff_result = check_convex_on_coordinates_named("g-f", &difference, rect, plan, tol)?;
    let sum_result = check_convex_on_coordinates_named("g+f", &sum, rect, plan, tol)?;

    let summary = vec![
        Quantity::new("g-f.max_margin", diff_result.max_margin),
        Quantity::new("g+f.max_margin", sum_result.max_margin),
    ];
    let witness = match (diff_result.witness, sum_result.witness) {
        (Some(d), Some(s)) => Some(if s.slack < d.slack { s } else { d }),
        (d, s) => d.or(s),
    };
    Ok(CheckResult {
        verdict: if witness.is_some() {
            Verdict::Violated
        } else {
            Verdict::HoldsOnSamples
        },
        max_margin: diff_result.max_margin.min(sum_result.max_margin),
        instances: diff_result.instances + sum_result.instances,
        witness,
        summary,
    })
}

/// `f = (h - k) / 2`, `g = (h + k) / 2`. Convexity of `h` and `k` is the
/// caller's responsibility.
pub fn decompose(h: &FunctionExpr, k: &FunctionExpr) -> DominancePair {
    DominancePair {
        f: (h - k).div_scalar(2.0),
        g: (h + k).div_scalar(2.0),
    }
}
