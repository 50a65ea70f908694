// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::time::Instant;

use num_rational::BigRational;
use serde_json::{json, Value};

use stochsep::dataset::generate::{gen_balls, gen_cluster_stress, gen_multipoint, gen_random_at, jitter, ProbLaw};
use stochsep::dataset::json::{parse_dataset, to_json_string};
use stochsep::dataset::{Color, Dataset, Locations};
use stochsep::esm::expected_separation_margin;
use stochsep::geom::position::{Level, PositionReport};
use stochsep::objects::{ball_expected_margin, ball_separable_probability, validate_balls, validate_balls_gp};
use stochsep::oracle;
use stochsep::scalar::parse_rational;
use stochsep::sch;
use stochsep::sp::{candidate_budget, separable_probability, Strategy};
use stochsep::{Error, Exact};

use crate::report::{decimal, float, rational, violations, Report};
use crate::{bench, Command, GenKind, LevelArg, Mode, OracleWhat, SchKind, StrategyArg};

/// Dimension above which `sp` and `esm` need `--force`.
const MAX_DIMENSION: u64 = 6;
const MAX_CANDIDATES: u64 = 1_000_000_000;

pub enum Output {
    /// A report and the exit code to use after printing it.
    Report(Report, u8),
    /// Verbatim text (CSV tables, datasets written to stdout).
    Raw(String),
}

pub enum Failure {
    Engine(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

type Run = Result<Output, Failure>;

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Transform { .. } => "transform",
        Command::Sp { .. } => "sp",
        Command::Esm { .. } => "esm",
        Command::SpObjects { .. } => "sp-objects",
        Command::EsmObjects { .. } => "esm-objects",
        Command::Sch { .. } => "sch",
        Command::Oracle { .. } => "oracle",
        Command::Gen { .. } => "gen",
        Command::Bench { .. } => "bench",
    }
}

pub fn run(c: Command, timings: bool) -> Run {
    let start = Instant::now();
    let out = match c {
        Command::Validate { input, level } => validate(&input.input, level),
        Command::Transform { input, output, jitter, seed } => {
            transform(&input.input, output.as_deref(), jitter.as_deref(), seed)
        }
        Command::Sp { input, mode, strategy, force } => sp(&input.input, mode, strategy, force),
        Command::Esm { input, mode, force } => esm(&input.input, mode, force),
        Command::SpObjects { input } => sp_objects(&input.input),
        Command::EsmObjects { input } => esm_objects(&input.input),
        Command::Sch { input, kind, query, polytope, eps, mode } => {
            sch_query(&input.input, kind, query.as_deref(), polytope.as_deref(), eps.as_deref(), mode)
        }
        Command::Oracle { input, what, mode, force } => oracle_run(&input.input, what, mode, force),
        Command::Gen {
            kind,
            reds,
            blues,
            dim,
            seed,
            level,
            probs,
            eps,
            zero_radius,
            max_locations,
            output,
        } => {
            let spec = GenSpec {
                kind,
                reds,
                blues,
                dim,
                seed,
                level: level_of(level),
                law: prob_law(&probs)?,
                eps: number(&eps, "--eps")?,
                zero_radius,
                max_locations,
            };
            generate(&spec, output.as_deref())
        }
        Command::Bench {
            dim,
            reds,
            blues,
            seed,
            strategy,
            compare,
            csv,
        } => bench::run(dim, reds, &blues, seed, strategy_of(strategy), compare, csv),
    }?;
    Ok(match out {
        Output::Report(mut r, code) => {
            if timings {
                r.diag("seconds", start.elapsed().as_secs_f64());
            }
            Output::Report(r, code)
        }
        raw => raw,
    })
}

fn load(path: &Path, report: &mut Report) -> Result<Dataset, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    report.digest_input(&bytes);
    Ok(parse_dataset(&bytes)?)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

pub fn strategy_of(s: StrategyArg) -> Strategy {
    match s {
        StrategyArg::Scan => Strategy::Scan,
        StrategyArg::Radial => Strategy::Radial,
    }
}

fn level_of(l: LevelArg) -> Level {
    match l {
        LevelArg::Gp => Level::Gp,
        LevelArg::Sgpp => Level::Sgpp,
    }
}

fn number(text: &str, flag: &str) -> Result<BigRational, Failure> {
    parse_rational(text).ok_or_else(|| Failure::Usage(format!("{flag}: cannot parse {text:?} as a number")))
}

/// `"1,1/2"` to a coordinate vector.
fn point(text: &str, flag: &str) -> Result<Vec<BigRational>, Failure> {
    text.split(',').map(|c| number(c, flag)).collect()
}

fn prob_law(text: &str) -> Result<ProbLaw, Failure> {
    let bad = || Failure::Usage(format!("--probs: expected uniform, grid:K or const:P, got {text:?}"));
    match text.split_once(':') {
        None if text == "uniform" => Ok(ProbLaw::Uniform),
        Some(("grid", k)) => k.parse().ok().filter(|&k: &u32| k > 0).map(ProbLaw::Grid).ok_or_else(bad),
        Some(("const", p)) => Ok(ProbLaw::Constant(number(p, "--probs")?)),
        _ => Err(bad()),
    }
}

fn position_report(report: &mut Report, level: Level, pr: &PositionReport) -> u8 {
    report.result("level", json!(level));
    report.result("passes", pr.passes());
    let v = violations(pr);
    report.result("violations", v["violations"].clone());
    report.result("truncated", pr.truncated);
    if pr.passes() {
        0
    } else {
        2
    }
}

fn validate(path: &Path, level: LevelArg) -> Run {
    let mut r = Report::new("validate");
    let ds = load(path, &mut r)?;
    let level = level_of(level);
    let pr = if ds.has_balls() {
        match level {
            Level::Gp => validate_balls_gp(&ds)?,
            Level::Sgpp => validate_balls(&ds)?,
        }
    } else {
        ds.validate(level)
    };
    r.diag("locations", ds.location_count());
    let code = position_report(&mut r, level, &pr);
    Ok(Output::Report(r, code))
}

fn matrix(m: &[Vec<BigRational>]) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(rational).collect())).collect())
}

fn transform(path: &Path, output: Option<&Path>, magnitude: Option<&str>, seed: u64) -> Run {
    let mut r = Report::new("transform");
    let mut ds = load(path, &mut r)?;
    if let Some(m) = magnitude {
        let m = number(m, "--jitter")?;
        if m <= BigRational::from_integer(0.into()) {
            return Err(Failure::Usage("--jitter must be positive".into()));
        }
        ds = jitter(&ds, &m, seed);
        r.warnings.push(format!("coordinates jittered by up to {} (seed {seed})", stochsep::scalar::format_rational(&m)));
    }
    let (t, moved) = ds.ensure_sgpp()?;
    r.result("identity", t.is_identity());
    r.result("matrix", matrix(&t.exact));
    r.diag("orthogonality_error", t.matrix.orthogonality_error());
    if let Some(out) = output {
        write(out, &to_json_string(&moved))?;
        r.result("output", out.display().to_string());
    }
    Ok(Output::Report(r, 0))
}

/// Red and blue location counts.
fn sizes(l: &Locations<Exact>) -> (u64, u64) {
    (l.count(Color::Red) as u64, l.count(Color::Blue) as u64)
}

fn guard(what: &'static str, value: u64, limit: u64, force: bool) -> Result<(), Failure> {
    if value > limit && !force {
        return Err(Error::GuardRail { what, value, limit }.into());
    }
    Ok(())
}

/// Number of location subsets the support-configuration enumeration visits.
fn esm_budget(m: u64, d: usize) -> u64 {
    let mut total = 0u64;
    for k in 2..=(d as u64 + 1).min(m) {
        let mut c = 1u64;
        for i in 0..k {
            c = c.saturating_mul(m - i) / (i + 1);
        }
        total = total.saturating_add(c);
    }
    total
}

/// The dataset in SGPP, with a warning when it had to be rotated.
fn sgpp(ds: Dataset, r: &mut Report) -> Result<Dataset, Failure> {
    let (t, moved) = ds.ensure_sgpp()?;
    r.diag("transformed", !t.is_identity());
    if !t.is_identity() {
        r.warnings
            .push("input was not in SGPP; computed on an exactly orthogonal rotation (SP is invariant)".into());
    }
    Ok(moved)
}

fn sp(path: &Path, mode: Mode, strategy: StrategyArg, force: bool) -> Run {
    let mut r = Report::new("sp");
    let ds = load(path, &mut r)?;
    let locs = ds.locations()?;
    let (red, blue) = sizes(&locs);
    guard("dimension", ds.dimension as u64, MAX_DIMENSION, force)?;
    let budget = candidate_budget(red, blue, ds.dimension);
    guard("candidates", budget, MAX_CANDIDATES, force)?;
    let locs = sgpp(ds, &mut r)?.locations()?;
    let strategy = strategy_of(strategy);
    r.diag("strategy", json!(strategy));
    r.diag("locations", locs.len());
    match mode {
        Mode::Exact => {
            let res = separable_probability(&locs, strategy)?;
            r.result("sp", rational(&res.sp));
            r.result("sp_decimal", decimal(&res.sp));
            r.diag("mode", "exact");
            r.diag(
                "levels",
                res.per_level
                    .iter()
                    .map(|l| {
                        json!({"dimension": l.dimension, "candidates": l.candidates,
                               "trivial": rational(&l.trivial), "tau_sum": rational(&l.tau_sum)})
                    })
                    .collect::<Vec<_>>(),
            );
        }
        Mode::Float => {
            let res = separable_probability(&locs.to_scalar::<f64>(), strategy)?;
            r.result("sp", float(res.sp));
            r.diag("mode", "float");
            r.diag(
                "levels",
                res.per_level
                    .iter()
                    .map(|l| {
                        json!({"dimension": l.dimension, "candidates": l.candidates,
                               "trivial": float(l.trivial), "tau_sum": float(l.tau_sum)})
                    })
                    .collect::<Vec<_>>(),
            );
        }
    }
    r.diag("candidate_budget", budget);
    Ok(Output::Report(r, 0))
}

fn esm(path: &Path, mode: Mode, force: bool) -> Run {
    let mut r = Report::new("esm");
    let ds = load(path, &mut r)?;
    let locs = ds.locations()?;
    guard("dimension", ds.dimension as u64, MAX_DIMENSION, force)?;
    let budget = esm_budget(locs.len() as u64, ds.dimension);
    guard("support subsets", budget, MAX_CANDIDATES, force)?;
    r.diag("locations", locs.len());
    r.diag("support_subsets", budget);
    match mode {
        Mode::Exact => {
            let res = expected_separation_margin(&locs)?;
            r.result("esm", float(res.emar));
            r.result("xi_sum", rational(&res.xi_sum));
            r.diag("mode", "exact");
            r.diag("configs", res.configs);
        }
        Mode::Float => {
            let res = expected_separation_margin(&locs.to_scalar::<f64>())?;
            r.result("esm", float(res.emar));
            r.result("xi_sum", float(res.xi_sum));
            r.diag("mode", "float");
            r.diag("configs", res.configs);
            r.diag("near_ties", res.near_ties);
            if res.near_ties > 0 {
                r.warnings.push(format!(
                    "{} side tests fell near zero in float mode; rerun with --mode exact",
                    res.near_ties
                ));
            }
        }
    }
    Ok(Output::Report(r, 0))
}

fn sp_objects(path: &Path) -> Run {
    let mut r = Report::new("sp-objects");
    let ds = load(path, &mut r)?;
    let moved = sgpp(ds, &mut r)?;
    if moved.has_balls() {
        let res = ball_separable_probability(&moved)?;
        r.result("sp", float(res.sp));
        r.diag("mode", "float");
        r.diag("trivial", float(res.trivial));
        r.diag("base", float(res.base));
        r.diag("lambda_sum", float(res.lambda_sum));
        r.diag("critical_sets", res.critical_sets);
    } else {
        // polytopes and points alone reduce to an exact point problem
        let (locs, _) = moved.ball_view();
        let res = separable_probability(&locs, Strategy::Radial)?;
        r.result("sp", rational(&res.sp));
        r.result("sp_decimal", decimal(&res.sp));
        r.diag("mode", "exact");
    }
    Ok(Output::Report(r, 0))
}

fn esm_objects(path: &Path) -> Run {
    let mut r = Report::new("esm-objects");
    let ds = load(path, &mut r)?;
    let res = ball_expected_margin(&ds)?;
    r.result("esm", float(res.emar));
    r.result("xi_sum", float(res.xi_sum));
    r.diag("mode", "float");
    r.diag("configs", res.configs.len());
    Ok(Output::Report(r, 0))
}

fn sch_query(
    path: &Path,
    kind: SchKind,
    query: Option<&str>,
    polytope: Option<&str>,
    eps: Option<&str>,
    mode: Mode,
) -> Run {
    let mut r = Report::new("sch");
    let a = load(path, &mut r)?;
    let need_query = || {
        query
            .ok_or_else(|| Failure::Usage("--query is required for this kind".into()))
            .and_then(|q| point(q, "--query"))
    };
    match kind {
        SchKind::Membership | SchKind::Intersection => {
            let (key, vertices) = if kind == SchKind::Membership {
                ("membership", vec![need_query()?])
            } else {
                let p = polytope.ok_or_else(|| Failure::Usage("--polytope is required for intersection".into()))?;
                let v = p.split(';').map(|v| point(v, "--polytope")).collect::<Result<Vec<_>, _>>()?;
                ("intersection", v)
            };
            match mode {
                Mode::Exact => {
                    let p: Exact = sch::sch_intersection_probability(&a, &vertices, Strategy::Radial)?;
                    r.result(key, rational(&p));
                    r.result(&format!("{key}_decimal"), decimal(&p));
                }
                Mode::Float => {
                    let p: f64 = sch::sch_intersection_probability(&a, &vertices, Strategy::Radial)?;
                    r.result(key, float(p));
                }
            }
        }
        SchKind::EpsDistant => {
            let e = number(eps.ok_or_else(|| Failure::Usage("--eps is required for eps-distant".into()))?, "--eps")?;
            let p = sch::sch_epsilon_distant_probability(&a, &need_query()?, &e)?;
            r.result("eps_distant", float(p));
            r.diag("eps", rational(&e));
        }
        SchKind::ExpectedDistance => {
            let q = need_query()?;
            let d = match mode {
                Mode::Exact => sch::sch_expected_distance::<Exact>(&a, &q)?,
                Mode::Float => sch::sch_expected_distance::<f64>(&a, &q)?,
            };
            r.result("expected_distance", float(d));
        }
    }
    Ok(Output::Report(r, 0))
}

fn oracle_run(path: &Path, what: OracleWhat, mode: Mode, force: bool) -> Run {
    let mut r = Report::new("oracle");
    let ds = load(path, &mut r)?;
    r.diag("locations", ds.location_count());
    if ds.has_balls() {
        match what {
            OracleWhat::Sp => r.result("sp", float(oracle::brute_ball_sp(&ds, force)?)),
            OracleWhat::Esm => r.result("esm", float(oracle::brute_ball_esm(&ds, force)?)),
            OracleWhat::Margins => {
                return Err(Error::InvalidArgument("the margin census is defined for point datasets".into()).into())
            }
        }
        r.diag("mode", "float");
        return Ok(Output::Report(r, 0));
    }
    let locs = ds.locations()?;
    match (what, mode) {
        (OracleWhat::Sp, Mode::Exact) => {
            let p = oracle::brute_sp(&locs, force)?;
            r.result("sp", rational(&p));
            r.result("sp_decimal", decimal(&p));
        }
        (OracleWhat::Sp, Mode::Float) => r.result("sp", float(oracle::brute_sp(&locs.to_scalar::<f64>(), force)?)),
        (OracleWhat::Esm, Mode::Exact) => r.result("esm", float(oracle::brute_esm(&locs, force)?)),
        (OracleWhat::Esm, Mode::Float) => r.result("esm", float(oracle::brute_esm(&locs.to_scalar::<f64>(), force)?)),
        (OracleWhat::Margins, _) => {
            let census = match mode {
                Mode::Exact => oracle::enumerate_margins(&locs, force)?,
                Mode::Float => oracle::enumerate_margins(&locs.to_scalar::<f64>(), force)?,
            };
            r.result("kappa", census.kappa);
            r.result("margins", census.margins.iter().map(|&m| float(m)).collect::<Vec<_>>());
            if let Some(sq) = &census.margins_sq {
                r.result("margins_sq", sq.iter().map(rational).collect::<Vec<_>>());
            }
            r.diag("tier", census.tier);
        }
    }
    r.diag("mode", if mode == Mode::Exact { "exact" } else { "float" });
    Ok(Output::Report(r, 0))
}

struct GenSpec {
    kind: GenKind,
    reds: usize,
    blues: usize,
    dim: usize,
    seed: u64,
    level: Level,
    law: ProbLaw,
    eps: BigRational,
    zero_radius: f64,
    max_locations: usize,
}

fn generate(g: &GenSpec, output: Option<&Path>) -> Run {
    if g.dim == 0 {
        return Err(Failure::Usage("--dim must be at least 1".into()));
    }
    let ds = match g.kind {
        GenKind::Random => gen_random_at(g.reds, g.blues, g.dim, &g.law, g.seed, g.level),
        GenKind::Multipoint => {
            if g.max_locations == 0 {
                return Err(Failure::Usage("--max-locations must be at least 1".into()));
            }
            gen_multipoint(g.reds, g.blues, g.max_locations, g.dim, g.seed, g.level)
        }
        GenKind::Cluster => gen_cluster_stress(g.reds, g.blues, g.dim, &g.eps, g.seed)?,
        GenKind::Balls => {
            if !(2..=3).contains(&g.dim) {
                return Err(Error::UnsupportedDimension(g.dim).into());
            }
            gen_balls(g.reds, g.blues, g.dim, &g.law, g.zero_radius, g.seed)
        }
    };
    let text = to_json_string(&ds);
    match output {
        None => Ok(Output::Raw(text)),
        Some(path) => {
            write(path, &text)?;
            let mut r = Report::new("gen");
            r.digest_input(text.as_bytes());
            r.result("output", path.display().to_string());
            r.result("locations", ds.location_count());
            r.diag("seed", g.seed);
            Ok(Output::Report(r, 0))
        }
    }
}
