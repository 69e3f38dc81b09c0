//! The rectangle `[a, b] x [c, d]`, points in it, and deterministic sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, SplitMix64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Rectangle {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidRectangle(
                "bounds must be finite".into(),
            ));
        }
        if a >= b {
            return Err(Error::InvalidRectangle(format!(
                "requires a < b (got a = {a}, b = {b})"
            )));
        }
        if c >= d {
            return Err(Error::InvalidRectangle(format!(
                "requires c < d (got c = {c}, d = {d})"
            )));
        }
        Ok(Rectangle { a, b, c, d })
    }

    pub fn unit() -> Self {
        Rectangle {
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.d - self.c
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn midpoint(&self) -> Point {
        Point::new((self.a + self.b) / 2.0, (self.c + self.d) / 2.0)
    }

    /// `(a,c), (a,d), (b,c), (b,d)` in that order.
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.a, self.c),
            Point::new(self.a, self.d),
            Point::new(self.b, self.c),
            Point::new(self.b, self.d),
        ]
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.a..=self.b).contains(&p.x) && (self.c..=self.d).contains(&p.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// `lambda * p + (1 - lambda) * q`, componentwise.
pub fn combine(p: Point, q: Point, lambda: f64) -> Result<Point> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "lambda {lambda} outside [0, 1]"
        )));
    }
    Ok(Point::new(
        mix(p.x, q.x, lambda),
        mix(p.y, q.y, lambda),
    ))
}

/// `lambda * u + (1 - lambda) * w` for scalars; no range check.
#[inline]
pub(crate) fn mix(u: f64, w: f64, lambda: f64) -> f64 {
    // rounding can push the sum one ulp past the segment
    (lambda * u + (1.0 - lambda) * w).clamp(u.min(w), u.max(w))
}

/// The fixed part of the default lambda set.
pub const BASE_LAMBDAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
/// How many seeded lambdas the default set adds.
pub const RANDOM_LAMBDAS: usize = 8;

/// Sampling schedule for universally quantified checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub grid_n: usize,
    pub random_count: usize,
    pub seed: u64,
    pub lambdas: Vec<f64>,
}

impl SamplePlan {
    /// Plan with the default lambda set: [`BASE_LAMBDAS`] followed by
    /// [`RANDOM_LAMBDAS`] draws from the seeded lambda stream.
    pub fn new(grid_n: usize, random_count: usize, seed: u64) -> Result<Self> {
        let mut rng = rng::stream(seed, rng::LAMBDA_STREAM);
        let lambdas = BASE_LAMBDAS
            .iter()
            .copied()
            .chain((0..RANDOM_LAMBDAS).map(|_| rng.next_f64()))
            .collect();
        Self::with_lambdas(grid_n, random_count, seed, lambdas)
    }

    pub fn with_lambdas(
        grid_n: usize,
        random_count: usize,
        seed: u64,
        lambdas: Vec<f64>,
    ) -> Result<Self> {
        let plan = SamplePlan {
            grid_n,
            random_count,
            seed,
            lambdas,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 2 {
            return Err(Error::InvalidPlan(format!(
                "grid_n must be at least 2 (got {})",
                self.grid_n
            )));
        }
        if let Some(bad) = self.lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::InvalidPlan(format!("lambda {bad} outside [0, 1]")));
        }
        for required in [0.0, 0.5, 1.0] {
            if !self.lambdas.contains(&required) {
                return Err(Error::InvalidPlan(format!(
                    "lambdas must include {required}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan::new(9, 32, 1).expect("default plan is valid")
    }
}

/// `n` equally spaced values from `lo` to `hi` inclusive. The endpoints are
/// exact, and so is the centre `(lo + hi) / 2` when `n` is odd.
pub fn lattice(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = n - 1;
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == last {
                hi
            } else if 2 * i == last {
                (lo + hi) / 2.0
            } else {
                lo + (hi - lo) * (i as f64 / last as f64)
            }
        })
        .collect()
}

/// The `grid_n x grid_n` lattice in x-major order, followed by
/// `random_count` seeded uniform points.
///
/// The lattice contains the four corners, and the midpoint when `grid_n` is
/// odd.
pub fn sample_points(rect: &Rectangle, plan: &SamplePlan) -> Vec<Point> {
    let xs = lattice(rect.a, rect.b, plan.grid_n);
    let ys = lattice(rect.c, rect.d, plan.grid_n);
    let mut points = Vec::with_capacity(plan.grid_n * plan.grid_n + plan.random_count);
    for &x in &xs {
        for &y in &ys {
            points.push(Point::new(x, y));
        }
    }
    let mut rng: SplitMix64 = rng::stream(plan.seed, rng::POINT_STREAM);
    for _ in 0..plan.random_count {
        let u = rng.next_f64();
        let v = rng.next_f64();
        points.push(Point::new(
            (rect.a + rect.width() * u).min(rect.b),
            (rect.c + rect.height() * v).min(rect.d),
        ));
    }
    points
}
