//! The mapping
//! `H(t, s) = mean over [a,b]x[c,d] of f(t x + (1 - t) mx, s y + (1 - s) my)`
//! where `(mx, my)` is the midpoint of the rectangle.
//!
//! H is computed on the quadrature nodes of the original rectangle, so
//! `H_f` and `H_g` share one node layout and `H(1, 1)` reproduces `mean2d`
//! bit for bit.

use serde::{Deserialize, Serialize};

use crate::convexity::{CheckResult, Quantity, Tally, Tolerance, Witness};
use crate::domain::{lattice, Point, Rectangle};
use crate::dominance::DominancePair;
use crate::error::{Error, Result};
use crate::expr::FunctionExpr;
use crate::inequalities::{self, dominated_line, BoundReport, Estimate};
use crate::quadrature::{integrate2d_with, QuadSpec};

pub const DEFAULT_T_GRID: usize = 9;

pub const MID_VS_H: &str = "mid_vs_h";
pub const MEAN_VS_H: &str = "mean_vs_h";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HParams {
    pub t: f64,
    pub s: f64,
}

impl HParams {
    pub fn new(t: f64, s: f64) -> Result<Self> {
        let params = HParams { t, s };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t", self.t), ("s", self.s)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(())
    }
}

fn h_estimate(f: &FunctionExpr, rect: &Rectangle, params: HParams, spec: &QuadSpec) -> Result<Estimate> {
    params.validate()?;
    let mid = rect.midpoint();
    let HParams { t, s } = params;
    let est = integrate2d_with(
        |x, y| f.eval(t * x + (1.0 - t) * mid.x, s * y + (1.0 - s) * mid.y),
        rect,
        spec,
    )?;
    Ok(Estimate {
        value: est.value / rect.area(),
        error: est.error_estimate / rect.area(),
    })
}

pub fn h_eval(f: &FunctionExpr, rect: &Rectangle, params: HParams, spec: &QuadSpec) -> Result<f64> {
    Ok(h_estimate(f, rect, params, spec)?.value)
}

/// H tabulated on `ts x ts`, indexed `[i][j]` for `(ts[i], ts[j])`.
struct Surface {
    ts: Vec<f64>,
    cells: Vec<Vec<Estimate>>,
}

impl Surface {
    fn new(f: &FunctionExpr, rect: &Rectangle, spec: &QuadSpec, grid: usize) -> Result<Surface> {
        if grid < 2 {
            return Err(Error::InvalidArgument(format!("H lattice needs grid >= 2, got {grid}")));
        }
        spec.validate()?;
        let ts = lattice(0.0, 1.0, grid);
        let cells = ts
            .iter()
            .map(|&t| {
                ts.iter()
                    .map(|&s| h_estimate(f, rect, HParams { t, s }, spec))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Surface { ts, cells })
    }

    fn at(&self, (i, j): (usize, usize)) -> Estimate {
        self.cells[i][j]
    }

    fn param(&self, (i, j): (usize, usize)) -> Point {
        Point::new(self.ts[i], self.ts[j])
    }

    fn last(&self) -> usize {
        self.ts.len() - 1
    }

    fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.ts.len();
        (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)))
    }
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `H(0, 0) <= H(t, s) <= H(1, 1)` on the lattice, together with
/// `H(0, 0) = f(mid)` and `H(1, 1) = mean2d(f)`.
pub fn h_bounds(
    f: &FunctionExpr,
    rect: &Rectangle,
    spec: &QuadSpec,
    grid: usize,
    tol: &Tolerance,
) -> Result<CheckResult> {
    let surface = Surface::new(f, rect, spec, grid)?;
    let n = surface.last();
    let (low, high) = (surface.at((0, 0)), surface.at((n, n)));
    let f_mid = inequalities::f_mid(f, rect)?;
    let mean = inequalities::mean(f, rect, spec)?;
    let mut tally = Tally::default();

    for (label, h, reference) in [("H(0,0) - f_mid", low, f_mid), ("H(1,1) - mean", high, mean)] {
        let gap = (h.value - reference.value).abs();
        let threshold = tol.threshold(max_abs(&[h.value, reference.value])) + h.error + reference.error;
        let corner = if label.starts_with("H(0,0)") { 0 } else { n };
        tally.observe(-gap, threshold, || Witness {
            points: vec![surface.param((corner, corner))],
            lambda: None,
            lhs: gap,
            rhs: 0.0,
            slack: -gap,
            quantities: vec![Quantity::new("H", h.value), Quantity::new(label, h.value - reference.value)],
        });
    }

    let (mut lattice_min, mut lattice_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for idx in surface.indices() {
        let h = surface.at(idx);
        lattice_min = lattice_min.min(h.value);
        lattice_max = lattice_max.max(h.value);
        for (lo, hi) in [(low, h), (h, high)] {
            let slack = hi.value - lo.value;
            let threshold = tol.threshold(max_abs(&[lo.value, hi.value])) + lo.error + hi.error;
            tally.observe(slack, threshold, || Witness {
                points: vec![surface.param(idx)],
                lambda: None,
                lhs: lo.value,
                rhs: hi.value,
                slack,
                quantities: vec![
                    Quantity::new("H(t,s)", h.value),
                    Quantity::new("H(0,0)", low.value),
                    Quantity::new("H(1,1)", high.value),
                ],
            });
        }
    }

    tally.note("H(0,0)", low.value);
    tally.note("H(1,1)", high.value);
    tally.note("f_mid", f_mid.value);
    tally.note("mean", mean.value);
    tally.note("lattice_min", lattice_min);
    tally.note("lattice_max", lattice_max);
    Ok(tally.finish())
}

/// `H(t1, s) <= H(t2, s)` for all lattice `t1 < t2` at every lattice `s`,
/// then the same along `s`.
pub fn check_h_monotone(
    f: &FunctionExpr,
    rect: &Rectangle,
    spec: &QuadSpec,
    grid: usize,
    tol: &Tolerance,
) -> Result<CheckResult> {
    let surface = Surface::new(f, rect, spec, grid)?;
    let n = surface.ts.len();
    let mut tally = Tally::default();
    for along_t in [true, false] {
        for fixed in 0..n {
            for k1 in 0..n {
                for k2 in k1 + 1..n {
                    let (i1, i2) = if along_t {
                        ((k1, fixed), (k2, fixed))
                    } else {
                        ((fixed, k1), (fixed, k2))
                    };
                    let (h1, h2) = (surface.at(i1), surface.at(i2));
                    let slack = h2.value - h1.value;
                    let threshold = tol.threshold(max_abs(&[h1.value, h2.value])) + h1.error + h2.error;
                    tally.observe(slack, threshold, || Witness {
                        points: vec![surface.param(i1), surface.param(i2)],
                        lambda: None,
                        lhs: h1.value,
                        rhs: h2.value,
                        slack,
                        quantities: vec![Quantity::new("H(1)", h1.value), Quantity::new("H(2)", h2.value)],
                    });
                }
            }
        }
    }
    Ok(tally.finish())
}

/// `|H_f(t2, s2) - H_f(t1, s1)| <= H_g(t2, s2) - H_g(t1, s1)` for every
/// pair of distinct lattice points with `t1 <= t2` and `s1 <= s2`.
pub fn check_h_dominated(
    pair: &DominancePair,
    rect: &Rectangle,
    spec: &QuadSpec,
    grid: usize,
    tol: &Tolerance,
) -> Result<CheckResult> {
    let hf = Surface::new(&pair.f, rect, spec, grid)?;
    let hg = Surface::new(&pair.g, rect, spec, grid)?;
    let mut tally = Tally::default();
    for first in hf.indices() {
        for second in hf.indices() {
            if second.0 < first.0 || second.1 < first.1 || second == first {
                continue;
            }
            let (f1, f2, g1, g2) = (hf.at(first), hf.at(second), hg.at(first), hg.at(second));
            let lhs = (f2.value - f1.value).abs();
            let rhs = g2.value - g1.value;
            let slack = rhs - lhs;
            let threshold = tol.threshold(max_abs(&[f1.value, f2.value, g1.value, g2.value]))
                + f1.error
                + f2.error
                + g1.error
                + g2.error;
            tally.observe(slack, threshold, || Witness {
                points: vec![hf.param(first), hf.param(second)],
                lambda: None,
                lhs,
                rhs,
                slack,
                quantities: vec![
                    Quantity::new("H_f(1)", f1.value),
                    Quantity::new("H_f(2)", f2.value),
                    Quantity::new("H_g(1)", g1.value),
                    Quantity::new("H_g(2)", g2.value),
                ],
            });
        }
    }
    Ok(tally.finish())
}

fn sandwich_lines(
    pair: &DominancePair,
    rect: &Rectangle,
    params: HParams,
    spec: &QuadSpec,
    tol: &Tolerance,
    suffix: &str,
) -> Result<Vec<inequalities::BoundLine>> {
    let (f, g) = (&pair.f, &pair.g);
    let (hf, hg) = (h_estimate(f, rect, params, spec)?, h_estimate(g, rect, params, spec)?);
    let (mid_f, mid_g) = (inequalities::f_mid(f, rect)?, inequalities::f_mid(g, rect)?);
    let (mean_f, mean_g) = (inequalities::mean(f, rect, spec)?, inequalities::mean(g, rect, spec)?);
    Ok(vec![
        dominated_line(&format!("{MID_VS_H}{suffix}"), (mid_f, hf), (hg, mid_g), tol),
        dominated_line(&format!("{MEAN_VS_H}{suffix}"), (mean_f, hf), (mean_g, hg), tol),
    ])
}

/// `|f(mid) - H_f| <= H_g - g(mid)` and `|mean(f) - H_f| <= mean(g) - H_g`
/// at one `(t, s)`.
pub fn h_sandwich(
    pair: &DominancePair,
    rect: &Rectangle,
    params: HParams,
    spec: &QuadSpec,
    tol: &Tolerance,
) -> Result<BoundReport> {
    Ok(BoundReport::new(sandwich_lines(pair, rect, params, spec, tol, "")?))
}

/// [`h_sandwich`] at every diagonal lattice point `t = s`, with line labels
/// suffixed by `@t=s=<value>`.
pub fn h_sandwich_diagonal(
    pair: &DominancePair,
    rect: &Rectangle,
    spec: &QuadSpec,
    grid: usize,
    tol: &Tolerance,
) -> Result<BoundReport> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("H lattice needs grid >= 2, got {grid}")));
    }
    let mut lines = Vec::with_capacity(2 * grid);
    for t in lattice(0.0, 1.0, grid) {
        lines.extend(sandwich_lines(pair, rect, HParams { t, s: t }, spec, tol, &format!("@t=s={t}"))?);
    }
    Ok(BoundReport::new(lines))
}
