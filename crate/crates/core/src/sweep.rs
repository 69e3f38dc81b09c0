//! Enumeration of sampled quantifier instances shared by the convexity and
//! dominance checks.
//!
//! A *probe* judges one instance: endpoint values of its functions at `P` and
//! `Q`, and their value at `R = lambda P + (1 - lambda) Q`. Joint sweeps draw
//! `P, Q` from the sample points; coordinate sweeps fix one coordinate to a
//! sampled slice value and draw the other from the sampled coordinates of
//! that axis.

use std::collections::BTreeSet;

use crate::convexity::{CheckResult, Quantity, Tally, Tolerance, Witness};
use crate::domain::{mix, sample_points, Point, Rectangle, SamplePlan};
use crate::error::Result;
use crate::expr::FunctionExpr;
use crate::rng;

/// Pair lists are exhaustive up to this grid size.
pub const EXHAUSTIVE_GRID_LIMIT: usize = 9;
/// Size of the seeded pair subset used beyond [`EXHAUSTIVE_GRID_LIMIT`].
pub const MAX_PAIRS: usize = 10_000;

pub(crate) struct Judgement {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// Magnitude that scales the relative tolerance.
    pub scale: f64,
}

pub(crate) trait Probe {
    fn functions(&self) -> &[(String, FunctionExpr)];

    /// `values[k] = [F_k(P), F_k(Q), F_k(R)]`.
    fn judge(&self, lambda: f64, values: &[[f64; 3]]) -> Judgement;
}

/// Ordered index pairs `(i, j)`, lexicographically sorted.
///
/// All `count^2` pairs when `grid_n <= 9`; otherwise every pair among
/// `anchors` plus seeded uniform pairs up to [`MAX_PAIRS`] in total.
pub(crate) fn index_pairs(count: usize, anchors: &[usize], plan: &SamplePlan) -> Vec<(usize, usize)> {
    let total = count * count;
    if plan.grid_n <= EXHAUSTIVE_GRID_LIMIT || total <= MAX_PAIRS {
        return (0..count)
            .flat_map(|i| (0..count).map(move |j| (i, j)))
            .collect();
    }
    let mut set = BTreeSet::new();
    for &i in anchors {
        for &j in anchors {
            set.insert((i, j));
        }
    }
    let mut rng = rng::stream(plan.seed, rng::PAIR_STREAM);
    while set.len() < MAX_PAIRS {
        set.insert((rng.next_below(count), rng.next_below(count)));
    }
    set.into_iter().collect()
}

fn lattice_anchors(n: usize) -> Vec<usize> {
    let mut anchors = vec![0, n - 1, n * (n - 1), n * n - 1];
    if n % 2 == 1 {
        anchors.push((n / 2) * n + n / 2);
    }
    anchors
}

fn axis_anchors(n: usize) -> Vec<usize> {
    let mut anchors = vec![0, n - 1];
    if n % 2 == 1 {
        anchors.push(n / 2);
    }
    anchors
}

/// Distinct values in first-occurrence order.
fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut seen = std::collections::HashSet::new();
    values.filter(|v| seen.insert(v.to_bits())).collect()
}

/// Sampled x- and y-coordinates (lattice first, then random points).
pub(crate) fn sampled_coordinates(rect: &Rectangle, plan: &SamplePlan) -> (Vec<f64>, Vec<f64>) {
    let points = sample_points(rect, plan);
    let lattice_xs = points.iter().step_by(plan.grid_n).take(plan.grid_n).map(|p| p.x);
    let lattice_ys = points.iter().take(plan.grid_n).map(|p| p.y);
    let random = &points[plan.grid_n * plan.grid_n..];
    let xs = distinct(lattice_xs.chain(random.iter().map(|p| p.x)));
    let ys = distinct(lattice_ys.chain(random.iter().map(|p| p.y)));
    (xs, ys)
}

fn observe<P: Probe>(
    probe: &P,
    tally: &mut Tally,
    tol: &Tolerance,
    (p, q, r): (Point, Point, Point),
    lambda: f64,
    values: &[[f64; 3]],
) {
    let j = probe.judge(lambda, values);
    tally.observe(j.slack, tol.threshold(j.scale), || Witness {
        points: vec![p, q, r],
        lambda: Some(lambda),
        lhs: j.lhs,
        rhs: j.rhs,
        slack: j.slack,
        quantities: probe
            .functions()
            .iter()
            .zip(values)
            .flat_map(|((name, _), v)| {
                [
                    Quantity::new(format!("{name}(P)"), v[0]),
                    Quantity::new(format!("{name}(Q)"), v[1]),
                    Quantity::new(format!("{name}(R)"), v[2]),
                ]
            })
            .collect(),
    });
}

pub(crate) fn sweep_joint<P: Probe>(
    probe: &P,
    rect: &Rectangle,
    plan: &SamplePlan,
    tol: &Tolerance,
) -> Result<CheckResult> {
    plan.validate()?;
    let points = sample_points(rect, plan);
    let funcs = probe.functions();
    let endpoint: Vec<Vec<f64>> = funcs
        .iter()
        .map(|(_, f)| points.iter().map(|p| f.eval(p.x, p.y)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let pairs = index_pairs(points.len(), &lattice_anchors(plan.grid_n), plan);
    let mut tally = Tally::default();
    let mut values = vec![[0.0; 3]; funcs.len()];
    for (i, j) in pairs {
        let (p, q) = (points[i], points[j]);
        for &lambda in &plan.lambdas {
            let r = Point::new(mix(p.x, q.x, lambda), mix(p.y, q.y, lambda));
            for (k, (_, f)) in funcs.iter().enumerate() {
                values[k] = [endpoint[k][i], endpoint[k][j], f.eval(r.x, r.y)?];
            }
            observe(probe, &mut tally, tol, (p, q, r), lambda, &values);
        }
    }
    Ok(tally.finish())
}

/// Slices along x (one per sampled y) first, then slices along y.
pub(crate) fn sweep_coordinates<P: Probe>(
    probe: &P,
    rect: &Rectangle,
    plan: &SamplePlan,
    tol: &Tolerance,
) -> Result<CheckResult> {
    plan.validate()?;
    let (xs, ys) = sampled_coordinates(rect, plan);
    let funcs = probe.functions();
    let mut tally = Tally::default();
    let mut values = vec![[0.0; 3]; funcs.len()];

    for along_x in [true, false] {
        let (coords, slices) = if along_x { (&xs, &ys) } else { (&ys, &xs) };
        let at = |u: f64, slice: f64| {
            if along_x {
                Point::new(u, slice)
            } else {
                Point::new(slice, u)
            }
        };
        let pairs = index_pairs(coords.len(), &axis_anchors(plan.grid_n), plan);
        for &slice in slices {
            let endpoint: Vec<Vec<f64>> = funcs
                .iter()
                .map(|(_, f)| {
                    coords
                        .iter()
                        .map(|&u| {
                            let p = at(u, slice);
                            f.eval(p.x, p.y)
                        })
                        .collect::<Result<_, _>>()
                })
                .collect::<Result<_, _>>()?;
            for &(i, j) in &pairs {
                let (p, q) = (at(coords[i], slice), at(coords[j], slice));
                for &lambda in &plan.lambdas {
                    let r = at(mix(coords[i], coords[j], lambda), slice);
                    for (k, (_, f)) in funcs.iter().enumerate() {
                        values[k] = [endpoint[k][i], endpoint[k][j], f.eval(r.x, r.y)?];
                    }
                    observe(probe, &mut tally, tol, (p, q, r), lambda, &values);
                }
            }
        }
    }
    Ok(tally.finish())
}
