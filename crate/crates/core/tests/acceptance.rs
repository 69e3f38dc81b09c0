//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use hhverify::cli::{load_scenario, run};
use hhverify::convexity::Tolerance;
use hhverify::domain::{lattice, Rectangle, SamplePlan};
use hhverify::dominance::{check_dominated_coordinates, check_dominated_joint, check_via_sum_difference, decompose};
use hhverify::hmap::{check_h_dominated, check_h_monotone, h_bounds, h_eval, h_sandwich, HParams, MEAN_VS_H, MID_VS_H};
use hhverify::inequalities::{dominated_hadamard, fejer_chain, hadamard_chain, ChainReport, CORNER_VS_MEAN, MEAN_VS_MID};
use hhverify::quadrature::{integrate2d, QuadRule, QuadSpec};
use hhverify::report::Outcome;
use hhverify::rng::SplitMix64;
use hhverify::{parse, CheckResult, DominancePair, FunctionExpr};

type CriterionResult = Result<(), String>;
type Criterion = (&'static str, fn() -> CriterionResult);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn e(s: &str) -> FunctionExpr {
    parse(s).unwrap_or_else(|err| panic!("{s}: {err}"))
}

fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

fn summary(r: &CheckResult, label: &str) -> f64 {
    r.summary.iter().find(|q| q.label == label).map(|q| q.value).unwrap_or(f64::NAN)
}

fn chain_values(r: &ChainReport) -> Vec<f64> {
    r.terms.iter().map(|t| t.value).collect()
}

fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn shipped_scenarios() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(scenarios_dir())
        .expect("scenarios directory")
        .map(|entry| entry.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "scenario"))
        .collect();
    paths.sort();
    paths
}

fn counterexample() -> CriterionResult {
    let start = Instant::now();
    let sc = load_scenario(&scenarios_dir().join("coordinate_not_joint.scenario")).map_err(|e| e.to_string())?;
    let report = run(&sc);
    let elapsed = start.elapsed();

    let Some(Outcome::Check(coords)) = report.entry("dominance.coordinates") else {
        return Err("dominance.coordinates missing".into());
    };
    ensure!(coords.holds(), "coordinate dominance should hold");
    ensure!(close(coords.max_margin, 0.0, 1e-12), "coordinate max_margin {}", coords.max_margin);

    let Some(Outcome::Check(joint)) = report.entry("dominance.joint") else {
        return Err("dominance.joint missing".into());
    };
    ensure!(!joint.holds(), "joint dominance should be violated");
    let w = joint.witness.as_ref().ok_or("no witness")?;
    ensure!(close(w.slack, -0.25, 1e-12), "witness slack {}", w.slack);
    ensure!(close(joint.max_margin, -0.25, 1e-12), "max_margin {}", joint.max_margin);
    ensure!(w.lambda == Some(0.5), "witness lambda {:?}", w.lambda);
    let corners = Rectangle::unit().corners();
    ensure!(
        corners.contains(&w.points[0]) && corners.contains(&w.points[1]),
        "witness endpoints {:?} are not corners",
        w.points
    );
    ensure!(
        close(w.points[0].x + w.points[1].x, 1.0, 0.0) && close(w.points[0].y + w.points[1].y, 1.0, 0.0),
        "witness endpoints {:?} are not opposite corners",
        w.points
    );

    // the same verdict straight from the library
    let pair = DominancePair::new(e("x*y"), e("x+y"));
    let direct = check_dominated_joint(&pair, &Rectangle::unit(), &SamplePlan::default(), &Tolerance::default())
        .map_err(|e| e.to_string())?;
    ensure!(direct.witness == joint.witness, "library and scenario witnesses differ");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(())
}

fn hadamard() -> CriterionResult {
    let (spec, tol, unit) = (QuadSpec::default(), Tolerance::default(), Rectangle::unit());
    let r = hadamard_chain(&e("x^2+y^2"), &unit, &spec, &tol).map_err(|e| e.to_string())?;
    let want = [0.5, 7.0 / 12.0, 2.0 / 3.0, 5.0 / 6.0, 1.0];
    for (got, want) in chain_values(&r).iter().zip(want) {
        ensure!(close(*got, want, 1e-10), "term {got} vs {want}");
    }
    ensure!(r.slacks.iter().all(|s| *s >= 0.0), "negative slack {:?}", r.slacks);
    ensure!(r.all_ordered, "chain not ordered");

    let r = hadamard_chain(&e("x+y"), &unit, &spec, &tol).map_err(|e| e.to_string())?;
    ensure!(chain_values(&r).iter().all(|v| close(*v, 1.0, 1e-10)), "affine terms {:?}", chain_values(&r));
    Ok(())
}

fn dominated_hadamard_bounds() -> CriterionResult {
    let (spec, tol, unit) = (QuadSpec::default(), Tolerance::default(), Rectangle::unit());
    let pair = DominancePair::new(e("x*y"), e("(x^2+y^2)/2"));
    let r = dominated_hadamard(&pair, &unit, &spec, &tol).map_err(|e| e.to_string())?;
    let i1 = r.line(MEAN_VS_MID).ok_or("missing first line")?;
    let i2 = r.line(CORNER_VS_MEAN).ok_or("missing second line")?;
    ensure!(close(i1.lhs, 0.0, 1e-10) && close(i1.rhs, 1.0 / 12.0, 1e-10), "first line {i1:?}");
    ensure!(close(i2.lhs, 0.0, 1e-10) && close(i2.rhs, 1.0 / 6.0, 1e-10), "second line {i2:?}");
    ensure!(r.all_hold, "bounds do not hold");

    let g = e("x^2+y^2");
    let r = dominated_hadamard(&DominancePair::new(g.clone(), g), &unit, &spec, &tol).map_err(|e| e.to_string())?;
    for line in &r.inequalities {
        ensure!((line.rhs - line.lhs).abs() <= 1e-10, "saturation slack {line:?}");
    }
    Ok(())
}

fn fejer() -> CriterionResult {
    let (spec, tol, unit) = (QuadSpec::default(), Tolerance::default(), Rectangle::unit());
    let f = e("x^2+y^2");
    let r = fejer_chain(&f, &e("x*(1-x)*y*(1-y)"), &unit, &spec, &tol).map_err(|e| e.to_string())?;
    for (got, want) in chain_values(&r).iter().zip([0.5, 0.6, 1.0]) {
        ensure!(close(*got, want, 1e-10), "term {got} vs {want}");
    }
    ensure!(r.all_ordered, "weighted chain not ordered");

    let flat = fejer_chain(&f, &e("1"), &unit, &spec, &tol).map_err(|e| e.to_string())?;
    let plain = hadamard_chain(&f, &unit, &spec, &tol).map_err(|e| e.to_string())?;
    let (flat, plain) = (chain_values(&flat), chain_values(&plain));
    for (i, j) in [(0, 0), (1, 2), (2, 4)] {
        ensure!(close(flat[i], plain[j], 1e-10), "unit weight term {} is {} vs {}", i + 1, flat[i], plain[j]);
    }
    Ok(())
}

fn h_functional() -> CriterionResult {
    let (spec, tol, unit) = (QuadSpec::default(), Tolerance::default(), Rectangle::unit());
    let f = e("x^2+y^2");
    for t in lattice(0.0, 1.0, 9) {
        for s in lattice(0.0, 1.0, 9) {
            let h = h_eval(&f, &unit, HParams::new(t, s).unwrap(), &spec).map_err(|e| e.to_string())?;
            let want = t * t / 12.0 + s * s / 12.0 + 0.5;
            ensure!(close(h, want, 1e-10), "H({t}, {s}) = {h}, expected {want}");
        }
    }
    let bounds = h_bounds(&f, &unit, &spec, 9, &tol).map_err(|e| e.to_string())?;
    ensure!(bounds.holds(), "bounds violated");
    let (low, high) = (summary(&bounds, "H(0,0)"), summary(&bounds, "H(1,1)"));
    ensure!(close(low, 0.5, 1e-10), "H(0,0) = {low}");
    ensure!(close(high, 2.0 / 3.0, 1e-10), "H(1,1) = {high}");
    ensure!(summary(&bounds, "lattice_min") == low, "infimum is not attained at (0,0)");
    ensure!(summary(&bounds, "lattice_max") == high, "supremum is not attained at (1,1)");

    let mono = check_h_monotone(&f, &unit, &spec, 9, &tol).map_err(|e| e.to_string())?;
    ensure!(mono.holds(), "monotonicity violated");
    ensure!(mono.max_margin >= -1e-10, "monotone margin {}", mono.max_margin);
    Ok(())
}

fn h_dominance() -> CriterionResult {
    let (spec, tol, unit) = (QuadSpec::default(), Tolerance::default(), Rectangle::unit());
    let pair = DominancePair::new(e("x*y"), e("(x^2+y^2)/2"));
    let r = check_h_dominated(&pair, &unit, &spec, 9, &tol).map_err(|e| e.to_string())?;
    ensure!(r.holds(), "H dominance violated: {:?}", r.witness);
    ensure!(r.instances == 45 * 45 - 81, "{} ordered pairs checked", r.instances);

    let at = |t, s| h_sandwich(&pair, &unit, HParams::new(t, s).unwrap(), &spec, &tol).map_err(|e| e.to_string());
    // H_g(t, s) = 1/4 + t^2/24 + s^2/24 and g(mid) = 1/4
    let half = at(0.5, 0.5)?;
    let s1 = half.line(MID_VS_H).ok_or("missing midpoint line")?;
    ensure!(close(s1.lhs, 0.0, 1e-10), "midpoint lhs {}", s1.lhs);
    ensure!(close(s1.rhs, 1.0 / 48.0, 1e-10), "midpoint rhs {}", s1.rhs);
    ensure!(half.all_hold, "sandwich violated at (1/2, 1/2)");

    let origin = at(0.0, 0.0)?;
    let s1 = origin.line(MID_VS_H).ok_or("missing midpoint line")?;
    ensure!(close(s1.lhs, 0.0, 1e-10) && close(s1.rhs, 0.0, 1e-10), "at (0,0): {s1:?}");
    let one = at(1.0, 1.0)?;
    let s2 = one.line(MEAN_VS_H).ok_or("missing mean line")?;
    ensure!(close(s2.lhs, 0.0, 1e-10) && close(s2.rhs, 0.0, 1e-10), "at (1,1): {s2:?}");
    Ok(())
}

/// `Q(x, y) + b1 x + b2 y + c` with `Q` built from `L L^T`, `L` lower
/// triangular with diagonal in `[0.5, 1.5]`.
fn quadratic(rng: &mut SplitMix64, sign: f64) -> String {
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.next_f64();
    let (l11, l21, l22) = (u(0.5, 1.5), u(-1.0, 1.0), u(0.5, 1.5));
    let (a11, a12, a22) = (l11 * l11, l11 * l21, l21 * l21 + l22 * l22);
    let (b1, b2, c) = (u(-1.0, 1.0), u(-1.0, 1.0), u(-1.0, 1.0));
    format!(
        "({sign:?})*(({a11:?})*x^2 + ({:?})*x*y + ({a22:?})*y^2) + ({b1:?})*x + ({b2:?})*y + ({c:?})",
        2.0 * a12
    )
}

fn equivalence() -> CriterionResult {
    let start = Instant::now();
    let rect = Rectangle::new(-1.0, 1.0, -1.0, 1.0).unwrap();
    // the full default lattice with fewer random points keeps 100 sweeps cheap
    let (plan, tol) = (SamplePlan::new(9, 8, 7).unwrap(), Tolerance::default());
    let cases: Vec<(String, String, String)> = {
        let mut rng = SplitMix64::new(20240607);
        (0..50)
            .map(|_| {
                let h = quadratic(&mut rng, 1.0);
                let state = rng.clone();
                let k = quadratic(&mut rng, 1.0);
                let flipped = quadratic(&mut state.clone(), -1.0);
                (h, k, flipped)
            })
            .collect()
    };
    let verdicts = std::thread::scope(|scope| {
        let handles: Vec<_> = cases
            .iter()
            .map(|(h, k, flipped)| {
                let (rect, plan, tol) = (&rect, &plan, &tol);
                scope.spawn(move || {
                    let verdict = |k: &str| {
                        let pair = decompose(&e(h), &e(k));
                        let coords = check_dominated_coordinates(&pair, rect, plan, tol).unwrap();
                        let via = check_via_sum_difference(&pair, rect, plan, tol).unwrap();
                        (coords.holds(), via.holds())
                    };
                    (verdict(k), verdict(flipped))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect::<Vec<_>>()
    });
    let convex_ok = verdicts.iter().filter(|((c, v), _)| *c && *v).count();
    ensure!(convex_ok == 50, "only {convex_ok}/50 convex pairs hold in both checkers");
    ensure!(verdicts.iter().any(|(_, (c, _))| !c), "flipped k never violates the coordinate checker");
    ensure!(verdicts.iter().any(|(_, (_, v))| !v), "flipped k never violates the sum/difference checker");
    ensure!(
        verdicts.iter().all(|(_, (c, v))| c == v),
        "the two checkers disagree on a flipped pair"
    );
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(())
}

fn quadrature_exactness() -> CriterionResult {
    let unit = Rectangle::unit();
    for panels in [1, 4] {
        let spec = QuadSpec::new(QuadRule::GaussLegendre, 16, panels).unwrap();
        for i in 0..=10 {
            for j in 0..=10 {
                let f = e(&format!("x^{i} * y^{j}"));
                let got = integrate2d(&f, &unit, &spec).map_err(|e| e.to_string())?.value;
                let want = 1.0 / ((i + 1) * (j + 1)) as f64;
                ensure!(
                    (got - want).abs() <= 1e-12 * want,
                    "x^{i} y^{j} with {panels} panel(s): {got} vs {want}"
                );
            }
        }
    }
    Ok(())
}

fn json_report(path: &std::path::Path, seed: Option<u64>) -> Result<(i32, Vec<u8>), String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hhverify"));
    cmd.arg("verify").arg(path).args(["--report", "json"]);
    if let Some(seed) = seed {
        cmd.args(["--seed", &seed.to_string()]);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn verdicts(json: &[u8]) -> Result<Vec<(String, String)>, String> {
    let report = hhverify::report::parse_json(std::str::from_utf8(json).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    Ok(report
        .checks
        .iter()
        .map(|c| (c.check_id.clone(), c.outcome.status().to_string()))
        .collect())
}

fn determinism() -> CriterionResult {
    let paths = shipped_scenarios();
    ensure!(paths.len() >= 6, "found {} shipped scenarios", paths.len());
    for path in &paths {
        let name = path.file_name().unwrap().to_string_lossy();
        let (code, first) = json_report(path, None)?;
        let (code2, second) = json_report(path, None)?;
        ensure!(first == second && code == code2, "{name}: reruns differ");
        ensure!((0..=1).contains(&code), "{name}: exit code {code}");
        let base = verdicts(&first)?;
        for seed in [2, 77, 123456789] {
            let (other_code, other) = json_report(path, Some(seed))?;
            ensure!(other_code == code, "{name}: seed {seed} changes the exit code");
            ensure!(verdicts(&other)? == base, "{name}: seed {seed} changes a verdict");
        }
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("coordinate dominance without joint dominance", counterexample),
        ("Hadamard chain terms", hadamard),
        ("dominated Hadamard bounds", dominated_hadamard_bounds),
        ("Fejér chain terms", fejer),
        ("H functional closed form, bounds and monotonicity", h_functional),
        ("H dominance and sandwich bounds", h_dominance),
        ("coordinate and sum/difference dominance agree", equivalence),
        ("Gauss-Legendre exactness on monomials", quadrature_exactness),
        ("deterministic reports and seed-independent verdicts", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (index, (name, criterion)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(criterion)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("PASS {}: {name} ({secs:.2}s)", index + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {}: {name} ({secs:.2}s): {why}", index + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
