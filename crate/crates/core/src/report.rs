//! Scenario reports and their text and JSON renderings.
//!
//! The JSON form is a stability contract: keys appear in declaration order,
//! floats use the shortest representation that round-trips, and rendering a
//! parsed report reproduces the original bytes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::convexity::{CheckResult, Tolerance, Witness};
use crate::domain::{Point, Rectangle, SamplePlan};
use crate::expr::FunctionExpr;
use crate::inequalities::{BoundReport, ChainReport};
use crate::quadrature::QuadSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    AllHold,
    ViolationsFound,
    InputError,
}

impl Overall {
    pub fn as_str(self) -> &'static str {
        match self {
            Overall::AllHold => "all_hold",
            Overall::ViolationsFound => "violations_found",
            Overall::InputError => "input_error",
        }
    }

    /// Process exit code: 0, 1 or 2.
    pub fn exit_code(self) -> i32 {
        match self {
            Overall::AllHold => 0,
            Overall::ViolationsFound => 1,
            Overall::InputError => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Check(CheckResult),
    Chain(ChainReport),
    Bound(BoundReport),
    Skipped { reason: String },
    /// The check could not be evaluated, e.g. a function is undefined at a
    /// sample point.
    Failed { error: String },
}

impl Outcome {
    pub fn is_violation(&self) -> bool {
        match self {
            Outcome::Check(r) => !r.holds(),
            Outcome::Chain(r) => !r.all_ordered,
            Outcome::Bound(r) => !r.all_hold,
            Outcome::Failed { .. } => true,
            Outcome::Skipped { .. } => false,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Check(r) => r.verdict.as_str(),
            Outcome::Chain(r) if r.all_ordered => "ordered",
            Outcome::Chain(_) => "violated",
            Outcome::Bound(r) if r.all_hold => "holds",
            Outcome::Bound(_) => "violated",
            Outcome::Skipped { .. } => "skipped",
            Outcome::Failed { .. } => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub check_id: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionsEcho {
    pub f: FunctionExpr,
    pub g: Option<FunctionExpr>,
    pub p: Option<FunctionExpr>,
    pub h: Option<FunctionExpr>,
    pub k: Option<FunctionExpr>,
}

/// Every resolved setting a run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub domain: Rectangle,
    pub functions: FunctionsEcho,
    pub plan: SamplePlan,
    pub quadrature: QuadSpec,
    pub tolerance: Tolerance,
    pub t_grid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario_name: String,
    pub checks: Vec<CheckEntry>,
    pub overall: Overall,
    /// Absent when the scenario could not be loaded.
    pub config_echo: Option<ConfigEcho>,
    pub diagnostics: Vec<String>,
}

impl ScenarioReport {
    pub fn new(
        scenario_name: impl Into<String>,
        checks: Vec<CheckEntry>,
        config_echo: ConfigEcho,
        diagnostics: Vec<String>,
    ) -> Self {
        let overall = overall_of(&checks);
        ScenarioReport {
            scenario_name: scenario_name.into(),
            checks,
            overall,
            config_echo: Some(config_echo),
            diagnostics,
        }
    }

    pub fn input_error(scenario_name: impl Into<String>, diagnostics: Vec<String>) -> Self {
        ScenarioReport {
            scenario_name: scenario_name.into(),
            checks: Vec::new(),
            overall: Overall::InputError,
            config_echo: None,
            diagnostics,
        }
    }

    pub fn entry(&self, check_id: &str) -> Option<&Outcome> {
        self.checks
            .iter()
            .find(|c| c.check_id == check_id)
            .map(|c| &c.outcome)
    }
}

pub fn overall_of(checks: &[CheckEntry]) -> Overall {
    if checks.iter().any(|c| c.outcome.is_violation()) {
        Overall::ViolationsFound
    } else {
        Overall::AllHold
    }
}

pub fn render_json(report: &ScenarioReport) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("reports contain only finite numbers");
    out.push('\n');
    out
}

pub fn parse_json(text: &str) -> serde_json::Result<ScenarioReport> {
    serde_json::from_str(text)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn point(p: &Point) -> String {
    format!("({}, {})", num(p.x), num(p.y))
}

fn write_witness(out: &mut String, w: &Witness) {
    let _ = writeln!(out, "  witness:");
    let names: Vec<String> = match (w.lambda, w.points.len()) {
        (Some(_), 3) => ["P", "Q", "R"].map(String::from).to_vec(),
        (_, 1) => vec!["at".into()],
        (_, n) => (1..=n).map(|i| format!("#{i}")).collect(),
    };
    for (name, p) in names.iter().zip(&w.points) {
        let _ = writeln!(out, "    {name} = {}", point(p));
    }
    if let Some(lambda) = w.lambda {
        let _ = writeln!(out, "    lambda = {}", num(lambda));
    }
    let _ = writeln!(out, "    lhs = {}", num(w.lhs));
    let _ = writeln!(out, "    rhs = {}", num(w.rhs));
    let _ = writeln!(out, "    slack = {}", num(w.slack));
    for q in &w.quantities {
        let _ = writeln!(out, "    {} = {}", q.label, num(q.value));
    }
}

fn write_outcome(out: &mut String, outcome: &Outcome) {
    match outcome {
        Outcome::Check(r) => {
            let _ = writeln!(out, "  instances = {}", r.instances);
            let _ = writeln!(out, "  max_margin = {}", num(r.max_margin));
            for q in &r.summary {
                let _ = writeln!(out, "  {} = {}", q.label, num(q.value));
            }
            if let Some(w) = &r.witness {
                write_witness(out, w);
            }
        }
        Outcome::Chain(r) => {
            for t in &r.terms {
                let _ = writeln!(out, "  {} = {}", t.label, num(t.value));
            }
            for (i, (slack, threshold)) in r.slacks.iter().zip(&r.thresholds).enumerate() {
                let _ = writeln!(
                    out,
                    "  {} <= {}: slack = {} (threshold {})",
                    r.terms[i].label,
                    r.terms[i + 1].label,
                    num(*slack),
                    num(*threshold)
                );
            }
        }
        Outcome::Bound(r) => {
            for l in &r.inequalities {
                let _ = writeln!(
                    out,
                    "  {}: lhs = {}, rhs = {}, slack = {} (threshold {})",
                    l.label,
                    num(l.lhs),
                    num(l.rhs),
                    num(l.slack),
                    num(l.threshold)
                );
            }
        }
        Outcome::Skipped { reason } => {
            let _ = writeln!(out, "  reason: {reason}");
        }
        Outcome::Failed { error } => {
            let _ = writeln!(out, "  error: {error}");
        }
    }
}

pub fn render_text(report: &ScenarioReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", report.scenario_name);
    if let Some(cfg) = &report.config_echo {
        let r = &cfg.domain;
        let _ = writeln!(out, "domain: [{}, {}] x [{}, {}]", r.a(), r.b(), r.c(), r.d());
        let fs = &cfg.functions;
        let _ = writeln!(out, "f = {}", fs.f);
        for (name, func) in [("g", &fs.g), ("p", &fs.p), ("h", &fs.h), ("k", &fs.k)] {
            if let Some(func) = func {
                let _ = writeln!(out, "{name} = {func}");
            }
        }
        let _ = writeln!(
            out,
            "plan: grid_n = {}, random_count = {}, seed = {}, lambdas = {}",
            cfg.plan.grid_n,
            cfg.plan.random_count,
            cfg.plan.seed,
            cfg.plan.lambdas.len()
        );
        let _ = writeln!(
            out,
            "quadrature: {} order {} x {} panels, tolerance abs {:e} rel {:e}, t_grid = {}",
            cfg.quadrature.rule.name(),
            cfg.quadrature.order,
            cfg.quadrature.panels_per_axis,
            cfg.tolerance.abs_tol,
            cfg.tolerance.rel_tol,
            cfg.t_grid
        );
    }
    for d in &report.diagnostics {
        let _ = writeln!(out, "note: {d}");
    }
    for entry in &report.checks {
        let _ = writeln!(out);
        let _ = writeln!(out, "[{}] {}", entry.check_id, entry.outcome.status());
        write_outcome(&mut out, &entry.outcome);
    }
    let _ = writeln!(out);
    let violations = report.checks.iter().filter(|c| c.outcome.is_violation()).count();
    let overall = match report.overall {
        Overall::InputError => "OVERALL: input error".to_string(),
        Overall::AllHold if report.checks.is_empty() => "OVERALL: no checks requested".to_string(),
        Overall::AllHold => "OVERALL: all checks hold on samples".to_string(),
        Overall::ViolationsFound => format!("OVERALL: violations found in {violations} check(s)"),
    };
    let _ = writeln!(out, "{overall}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::{Quantity, Verdict};
    use crate::expr::parse;
    use crate::inequalities::{BoundLine, Term};

    fn config() -> ConfigEcho {
        ConfigEcho {
            domain: Rectangle::unit(),
            functions: FunctionsEcho {
                f: parse("x*y").unwrap(),
                g: Some(parse("x+y").unwrap()),
                p: None,
                h: None,
                k: None,
            },
            plan: SamplePlan::default(),
            quadrature: QuadSpec::default(),
            tolerance: Tolerance::default(),
            t_grid: 9,
        }
    }

    fn violated() -> CheckResult {
        CheckResult {
            verdict: Verdict::Violated,
            max_margin: -0.25,
            instances: 12,
            witness: Some(Witness {
                points: vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(0.5, 0.5)],
                lambda: Some(0.5),
                lhs: 0.25,
                rhs: 0.0,
                slack: -0.25,
                quantities: ["f(P)", "f(Q)", "f(R)", "g(P)", "g(Q)", "g(R)"]
                    .iter()
                    .zip([0.0, 1.0, 0.25, 0.0, 2.0, 1.0])
                    .map(|(l, v)| Quantity::new(*l, v))
                    .collect(),
            }),
            summary: vec![],
        }
    }

    fn sample_report() -> ScenarioReport {
        ScenarioReport::new(
            "sample",
            vec![
                CheckEntry {
                    check_id: "dominance.joint".into(),
                    outcome: Outcome::Check(violated()),
                },
                CheckEntry {
                    check_id: "hadamard.chain".into(),
                    outcome: Outcome::Chain(ChainReport {
                        terms: vec![
                            Term { label: "f_mid".into(), value: 0.1 },
                            Term { label: "mean".into(), value: 1.0 / 3.0 },
                        ],
                        slacks: vec![1.0 / 3.0 - 0.1],
                        thresholds: vec![2e-9],
                        all_ordered: true,
                    }),
                },
                CheckEntry {
                    check_id: "hadamard.dominated".into(),
                    outcome: Outcome::Bound(BoundReport {
                        inequalities: vec![BoundLine {
                            label: "mean_vs_mid".into(),
                            lhs: 0.0,
                            rhs: 1e-300,
                            slack: 1e-300,
                            threshold: 1e-9,
                        }],
                        all_hold: true,
                    }),
                },
                CheckEntry {
                    check_id: "fejer.chain".into(),
                    outcome: Outcome::Skipped { reason: "prerequisite failed".into() },
                },
            ],
            config(),
            vec!["added prerequisite".into()],
        )
    }

    #[test]
    fn overall_follows_contents() {
        let report = sample_report();
        assert_eq!(report.overall, Overall::ViolationsFound);
        assert_eq!(overall_of(&report.checks[1..]), Overall::AllHold);
        let failed = [CheckEntry {
            check_id: "x".into(),
            outcome: Outcome::Failed { error: "ln of 0".into() },
        }];
        assert_eq!(overall_of(&failed), Overall::ViolationsFound);
        assert_eq!(Overall::InputError.exit_code(), 2);
    }

    #[test]
    fn text_lines() {
        let text = render_text(&sample_report());
        assert!(text.contains("[dominance.joint] violated"));
        assert!(text.contains("    slack = -2.5000000000000000e-1"));
        for label in ["f(P)", "f(Q)", "f(R)", "g(P)", "g(Q)"] {
            assert!(text.contains(&format!("    {label} = ")), "{label}");
        }
        assert!(text.contains("reason: prerequisite failed"));
        assert!(text.ends_with("OVERALL: violations found in 1 check(s)\n"));

        let ok = ScenarioReport::new("ok", sample_report().checks[1..].to_vec(), config(), vec![]);
        assert!(render_text(&ok).contains("OVERALL: all checks hold on samples"));
        let empty = ScenarioReport::new("empty", vec![], config(), vec![]);
        assert!(render_text(&empty).contains("OVERALL: no checks requested"));
        let bad = ScenarioReport::input_error("bad", vec!["line 3: requires a < b".into()]);
        assert!(render_text(&bad).contains("OVERALL: input error"));
    }

    #[test]
    fn full_precision_numbers() {
        let text = render_text(&sample_report());
        assert!(text.contains(&format!("mean = {:.16e}", 1.0 / 3.0)));
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn json_is_a_fixed_point() {
        for report in [
            sample_report(),
            ScenarioReport::input_error("bad", vec!["x".into()]),
        ] {
            let first = render_json(&report);
            assert_eq!(first, render_json(&report));
            let parsed = parse_json(&first).unwrap();
            assert_eq!(parsed, report);
            assert_eq!(render_json(&parsed), first);
        }
    }

    #[test]
    fn json_key_order_and_tags() {
        let json = render_json(&sample_report());
        let pos = |k: &str| json.find(k).unwrap();
        assert!(pos("\"scenario_name\"") < pos("\"checks\""));
        assert!(pos("\"checks\"") < pos("\"overall\""));
        assert!(pos("\"overall\"") < pos("\"config_echo\""));
        assert!(json.contains("\"kind\": \"check\""));
        assert!(json.contains("\"kind\": \"skipped\""));
        assert!(json.contains("\"overall\": \"violations_found\""));
        assert!(json.contains("\"f\": \"x * y\""));
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["checks"][0]["outcome"]["max_margin"], -0.25);
    }
}
