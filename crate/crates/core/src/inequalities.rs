//! Hadamard and Fejér inequality chains evaluated by quadrature.
//!
//! Every report carries the per-inequality threshold it was judged against:
//! the tolerance at the scale of the compared terms plus the quadrature error
//! estimates of those terms.

use serde::{Deserialize, Serialize};

use crate::convexity::Tolerance;
use crate::domain::{Point, Rectangle};
use crate::dominance::DominancePair;
use crate::error::{Error, Result};
use crate::expr::FunctionExpr;
use crate::quadrature::{integrate1d, integrate2d, integrate2d_with, Pinned, QuadSpec};

pub const F_MID: &str = "f_mid";
pub const MIDLINE_MEAN: &str = "midline_mean";
pub const MEAN: &str = "mean";
pub const EDGE_MEAN: &str = "edge_mean";
pub const CORNER_AVG: &str = "corner_avg";
pub const WEIGHTED_MEAN: &str = "weighted_mean";

/// Floor for `∫∫ p`, relative to the rectangle's area.
pub const WEIGHT_FLOOR_FACTOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub terms: Vec<Term>,
    /// `terms[i + 1] - terms[i]`.
    pub slacks: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub all_ordered: bool,
}

impl ChainReport {
    pub fn value(&self, label: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.label == label).map(|t| t.value)
    }

    fn from_terms(terms: &[(&str, Estimate)], tol: &Tolerance) -> ChainReport {
        let mut slacks = Vec::with_capacity(terms.len().saturating_sub(1));
        let mut thresholds = Vec::with_capacity(slacks.capacity());
        for w in terms.windows(2) {
            let (lo, hi) = (w[0].1, w[1].1);
            slacks.push(hi.value - lo.value);
            thresholds.push(
                tol.threshold(lo.value.abs().max(hi.value.abs())) + lo.error + hi.error,
            );
        }
        let all_ordered = slacks.iter().zip(&thresholds).all(|(s, t)| *s >= -t);
        ChainReport {
            terms: terms
                .iter()
                .map(|(label, e)| Term {
                    label: label.to_string(),
                    value: e.value,
                })
                .collect(),
            slacks,
            thresholds,
            all_ordered,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundLine {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub threshold: f64,
}

impl BoundLine {
    pub fn holds(&self) -> bool {
        self.slack >= -self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inequalities: Vec<BoundLine>,
    pub all_hold: bool,
}

impl BoundReport {
    pub(crate) fn new(inequalities: Vec<BoundLine>) -> Self {
        let all_hold = inequalities.iter().all(BoundLine::holds);
        BoundReport {
            inequalities,
            all_hold,
        }
    }

    pub fn line(&self, label: &str) -> Option<&BoundLine> {
        self.inequalities.iter().find(|l| l.label == label)
    }
}

/// A computed quantity together with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }
}

/// `|x_f - y_f| <= x_g - y_g` from four estimates.
pub(crate) fn dominated_line(
    label: &str,
    (xf, yf): (Estimate, Estimate),
    (xg, yg): (Estimate, Estimate),
    tol: &Tolerance,
) -> BoundLine {
    let lhs = (xf.value - yf.value).abs();
    let rhs = xg.value - yg.value;
    let scale = [xf, yf, xg, yg]
        .iter()
        .fold(0.0f64, |m, e| m.max(e.value.abs()));
    let error = xf.error + yf.error + xg.error + yg.error;
    BoundLine {
        label: label.to_string(),
        lhs,
        rhs,
        slack: rhs - lhs,
        threshold: tol.threshold(scale) + error,
    }
}

fn at(f: &FunctionExpr, p: Point) -> Result<Estimate> {
    Ok(Estimate::exact(f.eval(p.x, p.y)?))
}

pub(crate) fn f_mid(f: &FunctionExpr, rect: &Rectangle) -> Result<Estimate> {
    at(f, rect.midpoint())
}

pub(crate) fn corner_average(f: &FunctionExpr, rect: &Rectangle) -> Result<Estimate> {
    let mut sum = 0.0;
    for c in rect.corners() {
        sum += f.eval(c.x, c.y)?;
    }
    Ok(Estimate::exact(sum / 4.0))
}

pub(crate) fn mean(f: &FunctionExpr, rect: &Rectangle, spec: &QuadSpec) -> Result<Estimate> {
    let est = integrate2d(f, rect, spec)?;
    Ok(Estimate {
        value: est.value / rect.area(),
        error: est.error_estimate / rect.area(),
    })
}

fn line_mean(f: &FunctionExpr, pinned: Pinned, rect: &Rectangle, spec: &QuadSpec) -> Result<Estimate> {
    let (interval, length) = match pinned {
        Pinned::X(_) => ((rect.c(), rect.d()), rect.height()),
        Pinned::Y(_) => ((rect.a(), rect.b()), rect.width()),
    };
    let est = integrate1d(f, pinned, interval, spec)?;
    Ok(Estimate {
        value: est.value / length,
        error: est.error_estimate / length,
    })
}

fn averaged(parts: &[Estimate]) -> Estimate {
    let n = parts.len() as f64;
    Estimate {
        value: parts.iter().map(|e| e.value).sum::<f64>() / n,
        error: parts.iter().map(|e| e.error).sum::<f64>() / n,
    }
}

/// `∫∫ f p / ∫∫ p`.
pub(crate) fn weighted_mean(
    f: &FunctionExpr,
    p: &FunctionExpr,
    rect: &Rectangle,
    spec: &QuadSpec,
) -> Result<Estimate> {
    let denominator = integrate2d(p, rect, spec)?;
    let floor = WEIGHT_FLOOR_FACTOR * rect.area();
    if denominator.value <= floor {
        return Err(Error::DegenerateWeight {
            integral: denominator.value,
            floor,
        });
    }
    let numerator = integrate2d_with(|x, y| Ok(f.eval(x, y)? * p.eval(x, y)?), rect, spec)?;
    let value = numerator.value / denominator.value;
    Ok(Estimate {
        value,
        error: (numerator.error_estimate + value.abs() * denominator.error_estimate)
            / denominator.value,
    })
}

/// The five-term chain
/// `f_mid <= midline_mean <= mean <= edge_mean <= corner_avg`.
pub fn hadamard_chain(
    f: &FunctionExpr,
    rect: &Rectangle,
    spec: &QuadSpec,
    tol: &Tolerance,
) -> Result<ChainReport> {
    let mid = rect.midpoint();
    let midline = averaged(&[
        line_mean(f, Pinned::Y(mid.y), rect, spec)?,
        line_mean(f, Pinned::X(mid.x), rect, spec)?,
    ]);
    let edges = averaged(&[
        line_mean(f, Pinned::Y(rect.c()), rect, spec)?,
        line_mean(f, Pinned::Y(rect.d()), rect, spec)?,
        line_mean(f, Pinned::X(rect.a()), rect, spec)?,
        line_mean(f, Pinned::X(rect.b()), rect, spec)?,
    ]);
    Ok(ChainReport::from_terms(
        &[
            (F_MID, f_mid(f, rect)?),
            (MIDLINE_MEAN, midline),
            (MEAN, mean(f, rect, spec)?),
            (EDGE_MEAN, edges),
            (CORNER_AVG, corner_average(f, rect)?),
        ],
        tol,
    ))
}

pub const MEAN_VS_MID: &str = "mean_vs_mid";
pub const CORNER_VS_MEAN: &str = "corner_vs_mean";

/// `|mean(f) - f_mid| <= mean(g) - g_mid` and
/// `|corner_avg(f) - mean(f)| <= corner_avg(g) - mean(g)`.
pub fn dominated_hadamard(
    pair: &DominancePair,
    rect: &Rectangle,
    spec: &QuadSpec,
    tol: &Tolerance,
) -> Result<BoundReport> {
    let (f, g) = (&pair.f, &pair.g);
    let (mean_f, mean_g) = (mean(f, rect, spec)?, mean(g, rect, spec)?);
    let (mid_f, mid_g) = (f_mid(f, rect)?, f_mid(g, rect)?);
    let (corner_f, corner_g) = (corner_average(f, rect)?, corner_average(g, rect)?);
    Ok(BoundReport::new(vec![
        dominated_line(MEAN_VS_MID, (mean_f, mid_f), (mean_g, mid_g), tol),
        dominated_line(CORNER_VS_MEAN, (corner_f, mean_f), (corner_g, mean_g), tol),
    ]))
}

/// `f_mid <= weighted_mean <= corner_avg` for a Fejér weight `p`.
pub fn fejer_chain(
    f: &FunctionExpr,
    p: &FunctionExpr,
    rect: &Rectangle,
    spec: &QuadSpec,
    tol: &Tolerance,
) -> Result<ChainReport> {
    let weighted = weighted_mean(f, p, rect, spec)?;
    Ok(ChainReport::from_terms(
        &[
            (F_MID, f_mid(f, rect)?),
            (WEIGHTED_MEAN, weighted),
            (CORNER_AVG, corner_average(f, rect)?),
        ],
        tol,
    ))
}

pub const WEIGHTED_VS_MID: &str = "weighted_vs_mid";
pub const CORNER_VS_WEIGHTED: &str = "corner_vs_weighted";

/// `|f_mid - wmean(f)| <= wmean(g) - g_mid` and
/// `|corner_avg(f) - wmean(f)| <= corner_avg(g) - wmean(g)`.
pub fn dominated_fejer(
    pair: &DominancePair,
    p: &FunctionExpr,
    rect: &Rectangle,
    spec: &QuadSpec,
    tol: &Tolerance,
) -> Result<BoundReport> {
    let (f, g) = (&pair.f, &pair.g);
    let (wm_f, wm_g) = (weighted_mean(f, p, rect, spec)?, weighted_mean(g, p, rect, spec)?);
    let (mid_f, mid_g) = (f_mid(f, rect)?, f_mid(g, rect)?);
    let (corner_f, corner_g) = (corner_average(f, rect)?, corner_average(g, rect)?);
    Ok(BoundReport::new(vec![
        dominated_line(WEIGHTED_VS_MID, (mid_f, wm_f), (wm_g, mid_g), tol),
        dominated_line(CORNER_VS_WEIGHTED, (corner_f, wm_f), (corner_g, wm_g), tol),
    ]))
}
