//! The `expseries` command-line tool.
//!
//! Every subcommand reads one JSON document (`--input FILE`, or stdin for
//! `-` or no flag) and writes one JSON document, or a CSV table with `--csv`.
//! Exit codes: 0 success, 2 invalid input, 3 numeric non-certification,
//! 64 usage error.

use std::io::{Read, Write};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criterion::{decide_solvability, necessity_check, Confidence, CriterionError};
use crate::exponents::thin_sequence;
use crate::exppoly::{verify_left_bound, verify_sector_bound, zero_free_radius, BoundCheck, Lattice, ZeroFreeOptions};
use crate::geometry::{Direction, DirectionSet, DEFAULT_HULL_GRID};
use crate::interpolation::{abs_convergence_margin, solve_finite_section, CoeffModel, InterpolationError, SolveOptions};
use crate::product::CanonicalProduct;
use crate::schema::{
    from_complex, to_complex, AngleJson, Bound, DataJson, DomainJson, ExponentsJson, NodesJson, Pair, PolynomialJson,
    SchemaError, TailJson,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_CERTIFIED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable holding the seed of the sampling lattices.
pub const SEED_VAR: &str = "EXPSERIES_SEED";

const DEFAULT_TOL: f64 = 1e-9;
const DEFAULT_BOUND_SAMPLES: usize = 32;

#[derive(Parser, Debug)]
#[command(name = "expseries", version, about = "Multiple interpolation by exponential series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input JSON file, `-` for stdin.
    #[arg(long, global = true, value_name = "FILE")]
    input: Option<String>,
    /// Write a CSV table instead of JSON.
    #[arg(long, global = true)]
    csv: bool,
    /// Sampling grid size for plots and sampled checks.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    grid: Option<u32>,
    /// Worker threads for sampling.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Decide solvability and run the necessity check.
    Criterion,
    /// Hull of a domain over a set of directions.
    Hull,
    /// Contact directions at a boundary point.
    Contact,
    /// Thin exponents in an angle to a separated subsequence.
    Thin,
    /// Solve a finite Hermite interpolation section.
    Interpolate,
    /// Canonical product values, derivatives and condensation index.
    Gproduct,
    /// Zero-free radius and sampled sector lower bounds.
    Bounds,
    /// Absolute convergence of an exponential series.
    Converge,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    NotCertified(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::NotCertified(_) => EXIT_NOT_CERTIFIED,
        }
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Invalid(e.to_string())
            }
        }
    )*};
}

invalid_from!(
    SchemaError,
    CriterionError,
    crate::geometry::GeometryError,
    crate::exponents::ExponentError,
    crate::exppoly::ExpPolyError,
    crate::product::ProductError,
    serde_json::Error,
    std::io::Error
);

impl From<InterpolationError> for CliError {
    fn from(e: InterpolationError) -> Self {
        match e {
            InterpolationError::NearSingular { .. } => CliError::NotCertified(e.to_string()),
            InterpolationError::DuplicateExponents(..) => CliError::Invalid(format!("schema violation: {e}")),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

/// A CSV rendering of a result.
struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

/// A finished command: its JSON, its table, and the exit code to report.
struct Outcome {
    json: String,
    table: Table,
    code: i32,
}

impl Outcome {
    fn new(value: &impl Serialize, table: Table) -> Result<Self, CliError> {
        Ok(Self {
            json: serde_json::to_string(value)?,
            table,
            code: EXIT_OK,
        })
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x > 0.0 {
        "inf".into()
    } else if x < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

struct Settings {
    grid: Option<usize>,
    seed: Option<u64>,
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code. Never panics on malformed input.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    let seed = match std::env::var(SEED_VAR) {
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(v) => Some(v),
            Err(_) => {
                let _ = writeln!(stderr, "error: {SEED_VAR} must be an unsigned integer, got {s:?}");
                return EXIT_USAGE;
            }
        },
        Err(_) => None,
    };
    let settings = Settings {
        grid: cli.grid.map(|g| g as usize),
        seed,
    };

    let text = match read_input(cli.input.as_deref(), stdin) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.code();
        }
    };

    let execute = || dispatch(cli.command, &text, &settings);
    let result = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(execute),
            Err(e) => Err(CliError::Invalid(e.to_string())),
        },
        None => execute(),
    };

    match result {
        Ok(out) => {
            let written = if cli.csv {
                write_csv(stdout, &out.table)
            } else {
                writeln!(stdout, "{}", out.json).map_err(|e| e.to_string())
            };
            match written {
                Ok(()) => out.code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    EXIT_INVALID
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}

fn read_input(path: Option<&str>, stdin: &mut dyn Read) -> Result<String, CliError> {
    let mut text = String::new();
    match path {
        None | Some("-") => {
            stdin.read_to_string(&mut text)?;
        }
        Some(p) => {
            text = std::fs::read_to_string(p).map_err(|e| CliError::Invalid(format!("{p}: {e}")))?;
        }
    }
    Ok(text)
}

fn write_csv(out: &mut dyn Write, table: &Table) -> Result<(), String> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.headers).map_err(|e| e.to_string())?;
    for r in &table.rows {
        w.write_record(r).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("schema violation: {e}")))
}

fn dispatch(command: Command, text: &str, settings: &Settings) -> Result<Outcome, CliError> {
    match command {
        Command::Criterion => criterion(parse(text)?, settings),
        Command::Hull => hull(parse(text)?, settings),
        Command::Contact => contact(parse(text)?, settings),
        Command::Thin => thin(parse(text)?),
        Command::Interpolate => interpolate(parse(text)?),
        Command::Gproduct => gproduct(parse(text)?),
        Command::Bounds => bounds(parse(text)?, settings),
        Command::Converge => converge(parse(text)?, settings),
    }
}

fn arc_rows(set: &DirectionSet, label: &str) -> Vec<Vec<String>> {
    set.to_pairs()
        .into_iter()
        .map(|[lo, hi]| vec![label.to_string(), num(lo), num(hi)])
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CriterionInput {
    domain: DomainJson,
    exponents: ExponentsJson,
    nodes: NodesJson,
    #[serde(default)]
    tol: Option<f64>,
}

#[derive(Serialize, Deserialize)]
pub struct CriterionOutput {
    pub solvable: bool,
    pub witness: Option<f64>,
    #[serde(rename = "P")]
    pub p: Vec<Pair>,
    #[serde(rename = "T")]
    pub t: Vec<Pair>,
    pub hull_member: bool,
    pub confidence: String,
}

fn tolerance(tol: Option<f64>) -> Result<f64, CliError> {
    match tol {
        None => Ok(DEFAULT_TOL),
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) => Err(CliError::Invalid(format!("tol must be positive, got {t}"))),
    }
}

fn criterion(input: CriterionInput, settings: &Settings) -> Result<Outcome, CliError> {
    let domain = input.domain.build()?;
    let seq = input.exponents.build()?;
    let nodes = input.nodes.build()?;
    let tol = tolerance(input.tol)?;
    let decision = decide_solvability(&domain, &seq, &nodes, tol)?;
    let necessity = necessity_check(&domain, &seq, &nodes, settings.grid.unwrap_or(DEFAULT_HULL_GRID))?;
    let out = CriterionOutput {
        solvable: decision.solvable,
        witness: decision.witness.map(|d| d.angle()),
        p: decision.p.to_pairs(),
        t: decision.t.to_pairs(),
        hull_member: necessity.limit_point_in_hull,
        confidence: match decision.confidence {
            Confidence::Exact => "exact".into(),
            Confidence::PrefixEstimated => "prefix-estimated".into(),
        },
    };
    let mut rows = vec![vec![
        "summary".to_string(),
        out.solvable.to_string(),
        out.witness.map(num).unwrap_or_default(),
        out.hull_member.to_string(),
    ]];
    rows.extend(arc_rows(&decision.p, "P").into_iter().map(|mut r| {
        r.push(String::new());
        r
    }));
    rows.extend(arc_rows(&decision.t, "T").into_iter().map(|mut r| {
        r.push(String::new());
        r
    }));
    Outcome::new(
        &out,
        Table {
            headers: vec!["row", "a", "b", "c"],
            rows,
        },
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HullInput {
    domain: DomainJson,
    #[serde(default)]
    directions: Option<Vec<Pair>>,
    #[serde(default)]
    exponents: Option<ExponentsJson>,
    #[serde(default)]
    grid: Option<usize>,
}

#[derive(Serialize)]
struct SupportSample {
    angle: f64,
    support: Bound,
}

#[derive(Serialize)]
struct HullOutput {
    hull: DomainJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<SupportSample>>,
}

fn circle_angles(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| crate::geometry::normalize_angle(-std::f64::consts::PI + std::f64::consts::TAU * k as f64 / n as f64))
        .collect()
}

fn hull(input: HullInput, settings: &Settings) -> Result<Outcome, CliError> {
    let domain = input.domain.build()?;
    let dirs = match (&input.directions, &input.exponents) {
        (Some(pairs), None) => DirectionSet::from_pairs(pairs),
        (None, Some(e)) => crate::exponents::limit_directions(&e.build()?, None, crate::exponents::DEFAULT_CLUSTER_TOL)?,
        _ => {
            return Err(CliError::Invalid(
                "hull needs exactly one of \"directions\" and \"exponents\"".into(),
            ))
        }
    };
    let grid = input.grid.unwrap_or(DEFAULT_HULL_GRID);
    let h = domain.s_convex_hull(&dirs, grid)?;
    let samples = settings.grid.map(|n| {
        use rayon::prelude::*;
        circle_angles(n)
            .into_par_iter()
            .map(|a| SupportSample {
                angle: a,
                support: Bound(h.support_value(Direction::new(a))),
            })
            .collect::<Vec<_>>()
    });
    let out = HullOutput {
        hull: DomainJson::from_domain(&h),
        samples,
    };
    let table = match &out.samples {
        Some(s) => Table {
            headers: vec!["angle", "support"],
            rows: s.iter().map(|x| vec![num(x.angle), num(x.support.0.to_f64())]).collect(),
        },
        None => Table {
            headers: vec!["angle", "bound"],
            rows: out
                .hull
                .halfplanes
                .iter()
                .map(|hp| vec![num(hp.angle), num(hp.bound.0.to_f64())])
                .collect(),
        },
    };
    Outcome::new(&out, table)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContactInput {
    domain: DomainJson,
    point: Pair,
    #[serde(default)]
    tol: Option<f64>,
}

#[derive(Serialize)]
struct ContactOutput {
    #[serde(rename = "T")]
    t: Vec<Pair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<f64>>,
}

fn contact(input: ContactInput, settings: &Settings) -> Result<Outcome, CliError> {
    let domain = input.domain.build()?;
    let t = domain.contact_directions(to_complex(input.point), tolerance(input.tol)?)?;
    let samples = settings
        .grid
        .map(|n| t.arcs().iter().flat_map(|a| a.sample(n)).collect::<Vec<f64>>());
    let out = ContactOutput {
        t: t.to_pairs(),
        samples,
    };
    let table = match &out.samples {
        Some(s) => Table {
            headers: vec!["angle"],
            rows: s.iter().map(|&a| vec![num(a)]).collect(),
        },
        None => Table {
            headers: vec!["lo", "hi"],
            rows: out.t.iter().map(|[lo, hi]| vec![num(*lo), num(*hi)]).collect(),
        },
    };
    Outcome::new(&out, table)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThinInput {
    exponents: ExponentsJson,
    angle: AngleJson,
}

fn thin(input: ThinInput) -> Result<Outcome, CliError> {
    let seq = input.exponents.build()?;
    let angle = input.angle.build()?;
    let thinned = thin_sequence(&seq, &angle)?;
    let out = ExponentsJson::from_sequence(&thinned);
    let rows = out.values.iter().map(|[re, im]| vec![num(*re), num(*im)]).collect();
    Outcome::new(
        &out,
        Table {
            headers: vec!["re", "im"],
            rows,
        },
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InterpolateInput {
    exponents: Vec<Pair>,
    nodes: NodesJson,
    data: DataJson,
    #[serde(default)]
    pivot_tol: Option<f64>,
    #[serde(default)]
    scale_columns: Option<bool>,
}

#[derive(Serialize)]
struct InterpolateOutput {
    exponents: Vec<Pair>,
    coefficients: Vec<Pair>,
    residual: f64,
    relative_residual: f64,
    condition_estimate: f64,
}

fn interpolate(input: InterpolateInput) -> Result<Outcome, CliError> {
    let exps: Vec<Complex64> = input.exponents.iter().copied().map(to_complex).collect();
    if exps.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(CliError::Invalid("exponents must be finite".into()));
    }
    let nodes = input.nodes.build()?;
    let data = input.data.build();
    let defaults = SolveOptions::default();
    let options = SolveOptions {
        pivot_tol: input.pivot_tol.unwrap_or(defaults.pivot_tol),
        scale_columns: input.scale_columns.unwrap_or(defaults.scale_columns),
    };
    if !(options.pivot_tol > 0.0) {
        return Err(CliError::Invalid("pivot_tol must be positive".into()));
    }
    let sol = solve_finite_section(&exps, &nodes, &data, &options)?;
    let out = InterpolateOutput {
        exponents: input.exponents.clone(),
        coefficients: sol.sum.coefficients().iter().copied().map(from_complex).collect(),
        residual: sol.residual,
        relative_residual: sol.relative_residual,
        condition_estimate: sol.condition_estimate,
    };
    let rows = out
        .exponents
        .iter()
        .zip(&out.coefficients)
        .map(|(l, c)| vec![num(l[0]), num(l[1]), num(c[0]), num(c[1])])
        .collect();
    Outcome::new(
        &out,
        Table {
            headers: vec!["lambda_re", "lambda_im", "c_re", "c_im"],
            rows,
        },
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GproductInput {
    exponents: ExponentsJson,
    truncation: usize,
    #[serde(default)]
    points: Vec<Pair>,
    #[serde(default)]
    upto: Option<usize>,
}

#[derive(Serialize)]
struct ProductPoint {
    z: Pair,
    value: Pair,
    log_abs: Option<f64>,
    tail_bound: f64,
}

#[derive(Serialize)]
struct GproductOutput {
    values: Vec<ProductPoint>,
    derivatives: Vec<Pair>,
    profile: Vec<f64>,
    condensation_index: f64,
}

fn gproduct(input: GproductInput) -> Result<Outcome, CliError> {
    let seq = input.exponents.build()?;
    let g = CanonicalProduct::new(&seq, input.truncation)?;
    let upto = input.upto.unwrap_or(g.truncation());
    let values = input
        .points
        .iter()
        .map(|&p| {
            let v = g.eval(to_complex(p))?;
            Ok(ProductPoint {
                z: p,
                value: from_complex(v.value),
                log_abs: v.log_abs.is_finite().then_some(v.log_abs),
                tail_bound: v.tail_bound,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let derivatives = (1..=upto)
        .map(|n| g.derivative_at_zero(n).map(from_complex))
        .collect::<Result<Vec<_>, _>>()?;
    let out = GproductOutput {
        values,
        derivatives,
        profile: g.condensation_profile(upto)?,
        condensation_index: g.condensation_index(upto)?,
    };
    let rows = g
        .zeros()
        .iter()
        .take(upto)
        .zip(out.derivatives.iter().zip(&out.profile))
        .enumerate()
        .map(|(i, (z, (d, p)))| {
            vec![(i + 1).to_string(), num(z.re), num(z.im), num(d[0]), num(d[1]), num(*p)]
        })
        .collect();
    Outcome::new(
        &out,
        Table {
            headers: vec!["n", "lambda_re", "lambda_im", "dg_re", "dg_im", "delta_n"],
            rows,
        },
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsInput {
    polynomial: PolynomialJson,
    angle: AngleJson,
    r_max: f64,
    #[serde(default)]
    r: Option<f64>,
}

#[derive(Serialize)]
struct CheckJson {
    ok: bool,
    worst_ratio: f64,
    c_estimate: f64,
    samples: usize,
}

impl From<BoundCheck> for CheckJson {
    fn from(b: BoundCheck) -> Self {
        Self {
            ok: b.ok,
            worst_ratio: b.worst_ratio,
            c_estimate: b.c_estimate,
            samples: b.samples,
        }
    }
}

#[derive(Serialize)]
struct BoundsOutput {
    radius: f64,
    certified: bool,
    sector: CheckJson,
    left: CheckJson,
}

fn bounds(input: BoundsInput, settings: &Settings) -> Result<Outcome, CliError> {
    let p = input.polynomial.build()?;
    let angle = input.angle.build()?;
    let (radius, certified) = match input.r {
        Some(r) => (r, true),
        None => {
            let z = zero_free_radius(&p, &angle, input.r_max, &ZeroFreeOptions::default())?;
            (z.radius, z.certified)
        }
    };
    let lattice = Lattice::from_seed(settings.seed);
    let samples = settings.grid.unwrap_or(DEFAULT_BOUND_SAMPLES);
    let sector = verify_sector_bound(&p, &angle, radius, samples, &lattice)?;
    let left = verify_left_bound(&p, &angle, radius, samples, &lattice)?;
    let out = BoundsOutput {
        radius,
        certified,
        sector: sector.into(),
        left: left.into(),
    };
    let rows = [("sector", &out.sector), ("left", &out.left)]
        .iter()
        .map(|(name, c)| {
            vec![
                name.to_string(),
                num(out.radius),
                out.certified.to_string(),
                c.ok.to_string(),
                num(c.worst_ratio),
                num(c.c_estimate),
                c.samples.to_string(),
            ]
        })
        .collect();
    let mut outcome = Outcome::new(
        &out,
        Table {
            headers: vec!["check", "radius", "certified", "ok", "worst_ratio", "c_estimate", "samples"],
            rows,
        },
    )?;
    if !certified {
        outcome.code = EXIT_NOT_CERTIFIED;
    }
    Ok(outcome)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Window {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConvergeInput {
    tail: TailJson,
    model: CoeffModel,
    #[serde(default)]
    points: Vec<Pair>,
    #[serde(default)]
    window: Option<Window>,
}

#[derive(Serialize)]
struct ConvergePoint {
    z: Pair,
    converges: bool,
    margin: f64,
}

#[derive(Serialize)]
struct ConvergeOutput {
    points: Vec<ConvergePoint>,
}

fn converge(input: ConvergeInput, settings: &Settings) -> Result<Outcome, CliError> {
    let tail = input.tail.build()?;
    let mut zs = input.points.clone();
    match (&input.window, settings.grid) {
        (Some(w), Some(n)) => {
            let at = |a: f64, b: f64, k: usize| if n == 1 { 0.5 * (a + b) } else { a + (b - a) * k as f64 / (n - 1) as f64 };
            for iy in 0..n {
                for ix in 0..n {
                    zs.push([at(w.x0, w.x1, ix), at(w.y0, w.y1, iy)]);
                }
            }
        }
        (Some(_), None) => return Err(CliError::Invalid("a window needs --grid N".into())),
        _ => {}
    }
    if zs.is_empty() {
        return Err(CliError::Invalid("no points given (use \"points\" or \"window\" with --grid)".into()));
    }
    let points = zs
        .iter()
        .map(|&z| {
            let c = abs_convergence_margin(&tail, &input.model, to_complex(z))?;
            Ok(ConvergePoint {
                z,
                converges: c.converges,
                margin: c.margin,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let rows = points
        .iter()
        .map(|p| vec![num(p.z[0]), num(p.z[1]), p.converges.to_string(), num(p.margin)])
        .collect();
    Outcome::new(
        &ConvergeOutput { points },
        Table {
            headers: vec!["re", "im", "converges", "margin"],
            rows,
        },
    )
}
