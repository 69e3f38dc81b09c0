//! Scenario files, the verification pipeline and the `hhverify` command line.
//!
//! A scenario file is line oriented. `#` starts a comment, `[section]`
//! headers switch sections, and other lines are `key = value` pairs:
//!
//! ```text
//! name = dominated_pair_xy
//!
//! [domain]
//! a = 0
//! b = 1
//! c = 0
//! d = 1
//!
//! [functions]
//! f = x*y
//! g = (x^2+y^2)/2
//!
//! [checks]
//! dominance.coordinates
//! hadamard.dominated
//!
//! [settings]
//! grid_n = 9
//! lambdas = 0, 0.25, 0.5, 0.75, 1
//! ```
//!
//! `[functions]` takes `f` and `g` directly, or `h` and `k` from which
//! `f = (h - k) / 2` and `g = (h + k) / 2` are derived. `p` is the weight
//! for the Fejér checks. Every key in `[settings]` is optional.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::convexity::{self, Tolerance};
use crate::domain::{Rectangle, SamplePlan};
use crate::dominance::{self, DominancePair};
use crate::error::Error;
use crate::expr::{parse, FunctionExpr};
use crate::hmap::{self, DEFAULT_T_GRID};
use crate::inequalities;
use crate::quadrature::{QuadRule, QuadSpec};
use crate::report::{self, CheckEntry, ConfigEcho, FunctionsEcho, Outcome, ScenarioReport};

/// Every check, in the order a run executes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckId {
    ConvexityFJoint,
    ConvexityFCoordinates,
    ConvexityGJoint,
    ConvexityGCoordinates,
    ConvexityPWeight,
    DominanceJoint,
    DominanceCoordinates,
    DominanceSumDifference,
    HadamardChain,
    HadamardDominated,
    FejerChain,
    FejerDominated,
    HmapBounds,
    HmapMonotone,
    HmapDominated,
    HmapSandwich,
}

impl CheckId {
    pub const ALL: [CheckId; 16] = [
        CheckId::ConvexityFJoint,
        CheckId::ConvexityFCoordinates,
        CheckId::ConvexityGJoint,
        CheckId::ConvexityGCoordinates,
        CheckId::ConvexityPWeight,
        CheckId::DominanceJoint,
        CheckId::DominanceCoordinates,
        CheckId::DominanceSumDifference,
        CheckId::HadamardChain,
        CheckId::HadamardDominated,
        CheckId::FejerChain,
        CheckId::FejerDominated,
        CheckId::HmapBounds,
        CheckId::HmapMonotone,
        CheckId::HmapDominated,
        CheckId::HmapSandwich,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::ConvexityFJoint => "convexity.f.joint",
            CheckId::ConvexityFCoordinates => "convexity.f.coordinates",
            CheckId::ConvexityGJoint => "convexity.g.joint",
            CheckId::ConvexityGCoordinates => "convexity.g.coordinates",
            CheckId::ConvexityPWeight => "convexity.p.weight",
            CheckId::DominanceJoint => "dominance.joint",
            CheckId::DominanceCoordinates => "dominance.coordinates",
            CheckId::DominanceSumDifference => "dominance.sum_difference",
            CheckId::HadamardChain => "hadamard.chain",
            CheckId::HadamardDominated => "hadamard.dominated",
            CheckId::FejerChain => "fejer.chain",
            CheckId::FejerDominated => "fejer.dominated",
            CheckId::HmapBounds => "hmap.bounds",
            CheckId::HmapMonotone => "hmap.monotone",
            CheckId::HmapDominated => "hmap.dominated",
            CheckId::HmapSandwich => "hmap.sandwich",
        }
    }

    pub fn from_name(name: &str) -> Option<CheckId> {
        CheckId::ALL.into_iter().find(|c| c.as_str() == name)
    }

    /// Checks whose success this check presupposes.
    pub fn prerequisites(self) -> &'static [CheckId] {
        use CheckId::*;
        match self {
            DominanceJoint => &[ConvexityGJoint],
            DominanceCoordinates => &[ConvexityGCoordinates],
            HadamardChain | HmapBounds | HmapMonotone => &[ConvexityFCoordinates],
            FejerChain => &[ConvexityFCoordinates, ConvexityPWeight],
            FejerDominated => &[DominanceCoordinates, ConvexityPWeight],
            HadamardDominated | HmapDominated | HmapSandwich => &[DominanceCoordinates],
            _ => &[],
        }
    }

    fn needs_g(self) -> bool {
        use CheckId::*;
        matches!(
            self,
            ConvexityGJoint
                | ConvexityGCoordinates
                | DominanceJoint
                | DominanceCoordinates
                | DominanceSumDifference
                | HadamardDominated
                | FejerDominated
                | HmapDominated
                | HmapSandwich
        )
    }

    fn needs_p(self) -> bool {
        use CheckId::*;
        matches!(self, ConvexityPWeight | FejerChain | FejerDominated)
    }
}

/// A validated scenario with all defaults resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub rect: Rectangle,
    pub f: FunctionExpr,
    pub g: Option<FunctionExpr>,
    pub p: Option<FunctionExpr>,
    /// The `(h, k)` pair when `f` and `g` were derived from it.
    pub hk: Option<(FunctionExpr, FunctionExpr)>,
    /// Requested checks, sorted into run order.
    pub checks: Vec<CheckId>,
    pub plan: SamplePlan,
    pub spec: QuadSpec,
    pub tol: Tolerance,
    pub t_grid: usize,
    explicit_lambdas: bool,
}

/// A scenario file that could not be turned into a [`Scenario`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid scenario {name}:\n  {}", diagnostics.join("\n  "))]
pub struct LoadError {
    pub name: String,
    pub diagnostics: Vec<String>,
}

#[derive(Default)]
struct RawScenario {
    name: Option<String>,
    domain: BTreeMap<String, (usize, String)>,
    functions: BTreeMap<String, (usize, String)>,
    settings: BTreeMap<String, (usize, String)>,
    checks: Vec<CheckId>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Top,
    Domain,
    Functions,
    Checks,
    Settings,
}

const DOMAIN_KEYS: [&str; 4] = ["a", "b", "c", "d"];
const FUNCTION_KEYS: [&str; 5] = ["f", "g", "p", "h", "k"];
const SETTING_KEYS: [&str; 10] = [
    "grid_n",
    "random_count",
    "seed",
    "lambdas",
    "quad_rule",
    "quad_order",
    "panels",
    "abs_tol",
    "rel_tol",
    "t_grid",
];

fn unquote(value: &str) -> &str {
    let v = value.trim();
    v.strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .unwrap_or(v)
}

fn split_lines(text: &str, diags: &mut Vec<String>) -> RawScenario {
    let mut raw = RawScenario::default();
    let mut section = Section::Top;
    for (index, line) in text.lines().enumerate() {
        let lineno = index + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = match header.trim() {
                "domain" => Section::Domain,
                "functions" => Section::Functions,
                "checks" => Section::Checks,
                "settings" => Section::Settings,
                other => {
                    diags.push(format!("line {lineno}: unknown section [{other}]"));
                    section
                }
            };
            continue;
        }
        if section == Section::Checks {
            match CheckId::from_name(line) {
                Some(id) if raw.checks.contains(&id) => {
                    diags.push(format!("line {lineno}: check '{line}' listed twice"))
                }
                Some(id) => raw.checks.push(id),
                None => diags.push(format!("line {lineno}: unknown check_id '{line}'")),
            }
            continue;
        }
        let assignments: Vec<&str> = if section == Section::Domain {
            line.split(',').collect()
        } else {
            vec![line]
        };
        for assignment in assignments {
            let Some((key, value)) = assignment.split_once('=') else {
                diags.push(format!("line {lineno}: expected 'key = value', found '{}'", assignment.trim()));
                continue;
            };
            let (key, value) = (key.trim(), unquote(value).to_string());
            let (table, allowed): (&mut BTreeMap<_, _>, &[&str]) = match section {
                Section::Top => {
                    if key == "name" {
                        raw.name = Some(value);
                    } else {
                        diags.push(format!("line {lineno}: unexpected key '{key}' outside a section"));
                    }
                    continue;
                }
                Section::Domain => (&mut raw.domain, &DOMAIN_KEYS),
                Section::Functions => (&mut raw.functions, &FUNCTION_KEYS),
                Section::Settings => (&mut raw.settings, &SETTING_KEYS),
                Section::Checks => unreachable!(),
            };
            if !allowed.contains(&key) {
                diags.push(format!("line {lineno}: unknown key '{key}'"));
            } else if table.contains_key(key) {
                diags.push(format!("line {lineno}: duplicate key '{key}'"));
            } else {
                table.insert(key.to_string(), (lineno, value));
            }
        }
    }
    raw
}

fn parse_value<T: std::str::FromStr>(
    table: &BTreeMap<String, (usize, String)>,
    key: &str,
    default: T,
    diags: &mut Vec<String>,
) -> T {
    match table.get(key) {
        None => default,
        Some((lineno, text)) => text.parse().unwrap_or_else(|_| {
            diags.push(format!("line {lineno}: invalid value '{text}' for {key}"));
            default
        }),
    }
}

impl Scenario {
    /// Parses scenario text. `default_name` is used when the text has no
    /// `name = ...` line.
    pub fn parse(text: &str, default_name: &str) -> Result<Scenario, LoadError> {
        let mut diags = Vec::new();
        let raw = split_lines(text, &mut diags);
        let name = raw.name.clone().unwrap_or_else(|| default_name.to_string());
        let fail = |diagnostics| LoadError {
            name: name.clone(),
            diagnostics,
        };

        let mut bounds = [f64::NAN; 4];
        for (slot, key) in bounds.iter_mut().zip(DOMAIN_KEYS) {
            if raw.domain.contains_key(key) {
                *slot = parse_value(&raw.domain, key, f64::NAN, &mut diags);
            } else {
                diags.push(format!("[domain]: missing key '{key}'"));
            }
        }
        let domain_complete = bounds.iter().all(|v| !v.is_nan());
        let rect = if domain_complete {
            Rectangle::new(bounds[0], bounds[1], bounds[2], bounds[3])
        } else {
            Err(Error::InvalidRectangle("incomplete bounds".into()))
        };

        let mut functions = BTreeMap::new();
        for (key, (lineno, source)) in &raw.functions {
            match parse(source) {
                Ok(expr) => {
                    functions.insert(key.as_str(), expr);
                }
                Err(e) => diags.push(format!("line {lineno}: {key}: {e}")),
            }
        }
        let given = |k: &str| raw.functions.contains_key(k);
        let (f, g, hk) = match (given("f"), given("h"), given("k")) {
            (true, false, false) => (functions.get("f").cloned(), functions.get("g").cloned(), None),
            (false, true, true) => {
                if given("g") {
                    diags.push("[functions]: g cannot be given together with h and k".into());
                }
                match (functions.get("h"), functions.get("k")) {
                    (Some(h), Some(k)) => {
                        let pair = dominance::decompose(h, k);
                        (Some(pair.f), Some(pair.g), Some((h.clone(), k.clone())))
                    }
                    _ => (None, None, None),
                }
            }
            (false, false, false) => {
                diags.push("[functions]: f is required (or h and k)".into());
                (None, None, None)
            }
            (true, _, _) => {
                diags.push("[functions]: give either f or the pair h, k, not both".into());
                (None, None, None)
            }
            (false, _, _) => {
                diags.push("[functions]: h and k must be given together".into());
                (None, None, None)
            }
        };
        let p = functions.get("p").cloned();

        let checks = with_prerequisites(&raw.checks);
        for id in &checks {
            if id.needs_g() && !given("g") && hk.is_none() && f.is_some() {
                diags.push(format!("check {}: requires g", id.as_str()));
            }
            if id.needs_p() && !given("p") {
                diags.push(format!("check {}: requires p", id.as_str()));
            }
        }

        let s = &raw.settings;
        let grid_n = parse_value(s, "grid_n", 9usize, &mut diags);
        let random_count = parse_value(s, "random_count", 32usize, &mut diags);
        let seed = parse_value(s, "seed", 1u64, &mut diags);
        let explicit_lambdas = s.contains_key("lambdas");
        let plan = if let Some((lineno, text)) = s.get("lambdas") {
            let lambdas: Result<Vec<f64>, _> = text.split(',').map(|v| v.trim().parse::<f64>()).collect();
            match lambdas {
                Ok(lambdas) => SamplePlan::with_lambdas(grid_n, random_count, seed, lambdas),
                Err(_) => {
                    diags.push(format!("line {lineno}: invalid value '{text}' for lambdas"));
                    SamplePlan::new(grid_n, random_count, seed)
                }
            }
        } else {
            SamplePlan::new(grid_n, random_count, seed)
        };
        let defaults = QuadSpec::default();
        let rule = match s.get("quad_rule") {
            None => defaults.rule,
            Some((lineno, text)) => QuadRule::from_name(text).unwrap_or_else(|| {
                diags.push(format!(
                    "line {lineno}: quad_rule must be gauss_legendre or simpson, found '{text}'"
                ));
                defaults.rule
            }),
        };
        let spec = QuadSpec::new(
            rule,
            parse_value(s, "quad_order", defaults.order, &mut diags),
            parse_value(s, "panels", defaults.panels_per_axis, &mut diags),
        );
        let tol = Tolerance::new(
            parse_value(s, "abs_tol", 1e-9, &mut diags),
            parse_value(s, "rel_tol", 1e-9, &mut diags),
        );
        let t_grid = parse_value(s, "t_grid", DEFAULT_T_GRID, &mut diags);
        if t_grid < 2 {
            diags.push(format!("t_grid must be at least 2 (got {t_grid})"));
        }

        let mut note = |r: Result<(), Error>| {
            if let Err(e) = r {
                diags.push(e.to_string());
            }
        };
        if domain_complete {
            note(rect.as_ref().map(|_| ()).map_err(Clone::clone));
        }
        note(plan.as_ref().map(|_| ()).map_err(Clone::clone));
        note(spec.as_ref().map(|_| ()).map_err(Clone::clone));
        note(tol.as_ref().map(|_| ()).map_err(Clone::clone));

        match (diags.is_empty(), rect, f, plan, spec, tol) {
            (true, Ok(rect), Some(f), Ok(plan), Ok(spec), Ok(tol)) => Ok(Scenario {
                name,
                rect,
                f,
                g,
                p,
                hk,
                checks,
                plan,
                spec,
                tol,
                t_grid,
                explicit_lambdas,
            }),
            _ => Err(fail(diags)),
        }
    }

    /// Replaces the seed; the seeded lambdas are redrawn unless the scenario
    /// lists its lambdas explicitly.
    pub fn with_seed(mut self, seed: u64) -> Result<Scenario, Error> {
        self.plan = if self.explicit_lambdas {
            SamplePlan::with_lambdas(self.plan.grid_n, self.plan.random_count, seed, self.plan.lambdas)?
        } else {
            SamplePlan::new(self.plan.grid_n, self.plan.random_count, seed)?
        };
        Ok(self)
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Result<Scenario, Error> {
        tol.validate()?;
        self.tol = tol;
        Ok(self)
    }

    pub fn config_echo(&self) -> ConfigEcho {
        ConfigEcho {
            domain: self.rect,
            functions: FunctionsEcho {
                f: self.f.clone(),
                g: self.g.clone(),
                p: self.p.clone(),
                h: self.hk.as_ref().map(|(h, _)| h.clone()),
                k: self.hk.as_ref().map(|(_, k)| k.clone()),
            },
            plan: self.plan.clone(),
            quadrature: self.spec,
            tolerance: self.tol,
            t_grid: self.t_grid,
        }
    }
}

/// The requested checks plus everything they transitively presuppose, in
/// run order.
pub fn with_prerequisites(requested: &[CheckId]) -> Vec<CheckId> {
    let mut all: Vec<CheckId> = requested.to_vec();
    let mut i = 0;
    while i < all.len() {
        for &pre in all[i].prerequisites() {
            if !all.contains(&pre) {
                all.push(pre);
            }
        }
        i += 1;
    }
    all.sort();
    all
}

pub fn load_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    let text = std::fs::read_to_string(path).map_err(|e| LoadError {
        name: stem.clone(),
        diagnostics: vec![format!("cannot read {}: {e}", path.display())],
    })?;
    Scenario::parse(&text, &stem)
}

fn execute(id: CheckId, sc: &Scenario) -> Result<Outcome, Error> {
    use CheckId::*;
    let (rect, plan, spec, tol) = (&sc.rect, &sc.plan, &sc.spec, &sc.tol);
    let g = || sc.g.clone().expect("validated scenario has g");
    let p = || sc.p.as_ref().expect("validated scenario has p");
    let pair = || DominancePair::new(sc.f.clone(), g());
    Ok(match id {
        ConvexityFJoint => Outcome::Check(convexity::check_convex_joint(&sc.f, rect, plan, tol)?),
        ConvexityFCoordinates => Outcome::Check(convexity::check_convex_on_coordinates(&sc.f, rect, plan, tol)?),
        ConvexityGJoint => Outcome::Check(convexity::check_convex_joint(&g(), rect, plan, tol)?),
        ConvexityGCoordinates => {
            Outcome::Check(convexity::check_convex_on_coordinates_named("g", &g(), rect, plan, tol)?)
        }
        ConvexityPWeight => Outcome::Check(convexity::check_weight(p(), rect, plan, tol)?),
        DominanceJoint => Outcome::Check(dominance::check_dominated_joint(&pair(), rect, plan, tol)?),
        DominanceCoordinates => Outcome::Check(dominance::check_dominated_coordinates(&pair(), rect, plan, tol)?),
        DominanceSumDifference => Outcome::Check(dominance::check_via_sum_difference(&pair(), rect, plan, tol)?),
        HadamardChain => Outcome::Chain(inequalities::hadamard_chain(&sc.f, rect, spec, tol)?),
        HadamardDominated => Outcome::Bound(inequalities::dominated_hadamard(&pair(), rect, spec, tol)?),
        FejerChain => Outcome::Chain(inequalities::fejer_chain(&sc.f, p(), rect, spec, tol)?),
        FejerDominated => Outcome::Bound(inequalities::dominated_fejer(&pair(), p(), rect, spec, tol)?),
        HmapBounds => Outcome::Check(hmap::h_bounds(&sc.f, rect, spec, sc.t_grid, tol)?),
        HmapMonotone => Outcome::Check(hmap::check_h_monotone(&sc.f, rect, spec, sc.t_grid, tol)?),
        HmapDominated => Outcome::Check(hmap::check_h_dominated(&pair(), rect, spec, sc.t_grid, tol)?),
        HmapSandwich => Outcome::Bound(hmap::h_sandwich_diagonal(&pair(), rect, spec, sc.t_grid, tol)?),
    })
}

/// Runs the scenario's checks in order. A check whose prerequisite did not
/// hold is reported as skipped.
pub fn run(sc: &Scenario) -> ScenarioReport {
    let mut entries: Vec<CheckEntry> = Vec::with_capacity(sc.checks.len());
    let mut diagnostics = Vec::new();
    for &id in &sc.checks {
        let blocked = id.prerequisites().iter().find_map(|pre| {
            let outcome = &entries.iter().find(|e| e.check_id == pre.as_str())?.outcome;
            let state = match outcome {
                Outcome::Skipped { .. } => "was skipped",
                Outcome::Failed { .. } => "could not be evaluated",
                o if o.is_violation() => "was violated",
                _ => return None,
            };
            Some(format!("prerequisite {} {state}", pre.as_str()))
        });
        let outcome = match blocked {
            Some(reason) => Outcome::Skipped { reason },
            None => execute(id, sc).unwrap_or_else(|e| Outcome::Failed { error: e.to_string() }),
        };
        entries.push(CheckEntry {
            check_id: id.as_str().to_string(),
            outcome,
        });
    }
    for id in &sc.checks {
        let dependents: Vec<&str> = sc
            .checks
            .iter()
            .filter(|c| c.prerequisites().contains(id))
            .map(|c| c.as_str())
            .collect();
        if !dependents.is_empty() {
            diagnostics.push(format!("{} is a prerequisite of {}", id.as_str(), dependents.join(", ")));
        }
    }
    ScenarioReport::new(sc.name.clone(), entries, sc.config_echo(), diagnostics)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "hhverify", version, about = "Numerically verify convexity, dominance and Hadamard-type inequalities on rectangles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every check listed in a scenario file.
    Verify {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario's sampling seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override both the absolute and the relative tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

/// Entry point for the binary. Returns the process exit code: 0 when every
/// check holds, 1 when a violation was found, 2 on input errors.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let Command::Verify {
        scenario,
        report: format,
        out,
        seed,
        tolerance,
    } = cli.command;

    let loaded = load_scenario(&scenario).and_then(|sc| {
        let name = sc.name.clone();
        let apply = || -> Result<Scenario, Error> {
            let sc = match seed {
                Some(seed) => sc.with_seed(seed)?,
                None => sc,
            };
            match tolerance {
                Some(t) => sc.with_tolerance(Tolerance { abs_tol: t, rel_tol: t }),
                None => Ok(sc),
            }
        };
        apply().map_err(|e| LoadError {
            name,
            diagnostics: vec![format!("command line: {e}")],
        })
    });
    let report = match loaded {
        Ok(sc) => run(&sc),
        Err(e) => {
            for d in &e.diagnostics {
                let _ = writeln!(stderr, "error: {d}");
            }
            ScenarioReport::input_error(e.name, e.diagnostics)
        }
    };
    let rendered = match format {
        ReportFormat::Text => report::render_text(&report),
        ReportFormat::Json => report::render_json(&report),
    };
    let written = match &out {
        Some(path) => std::fs::write(path, rendered.as_bytes()),
        None => stdout.write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write report: {e}");
        return 2;
    }
    report.overall.exit_code()
}
