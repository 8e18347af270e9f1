//! The `smw` command line.
//!
//! Every command writes machine-readable records to `out` (JSON lines by
//! default, CSV with `--output csv`) and diagnostics to `err`. Records carry
//! the seed, sample count, dimension and crate version.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::ascent::{ascend_with, check_necessary_conditions, AscentOptions, AscentTrajectory};
use crate::centroid::{
    centroid_uniqueness_experiment, strip_ratio_experiment, ExperimentOptions, StripRatioRecord, UniquenessRecord,
    VERDICT_SIGMAS,
};
use crate::error::{Error, Result};
use crate::inequalities::{reversed_simpson_antidote, simpson_antidote, EightTuple};
use crate::io::{read_simplex, read_spherical_simplex, write_json_line, write_simplex, ReadOptions};
use crate::meanwidth::{mean_width_cells, MeanWidthReport};
use crate::simplex::{EuclideanSimplex, SphericalSimplex};
use crate::sphere::SamplerKind;
use crate::suites::{run_suite, CheckResult, Suite, SuiteConfig, SuiteReport};

pub const DEFAULT_DIM: usize = 3;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
/// The switch checks are exact at any sample count.
pub const SWITCH_DEFAULT_SAMPLES: u64 = 20_000;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NON_CONVERGENCE: i32 = 4;
pub const EXIT_SUITE_VIOLATION: i32 = 5;

/// Generators of the default strip-ratio configuration on `S^2`.
pub const STRIP_RATIO_GENERATORS: [[f64; 3]; 3] = [[1.0, -0.3, -0.5], [1.0, 0.6, -0.4], [1.0, 0.1, 0.7]];
pub const STRIP_RATIO_S: f64 = 0.1;
pub const STRIP_RATIO_T1: f64 = 0.2;
pub const STRIP_RATIO_T2: f64 = 0.25;

/// Generators of the default centroid-uniqueness configuration on `S^3`.
pub const UNIQUENESS_GENERATORS: [[f64; 4]; 4] =
    [[0.0, -0.3, 1.0, 0.2], [0.0, 0.4, -0.2, 1.0], [0.0, 0.2, -1.0, -0.6], [1.0, 0.1, 0.2, 0.1]];
pub const UNIQUENESS_S_VALUES: [f64; 4] = [0.0, 0.05, 0.1, 0.2];

#[derive(Parser, Debug)]
#[command(name = "smw", version, about = "Mean width of simplexes inscribed in the unit ball")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Ambient dimension; defaults to the input file's, else 3.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Sample count; defaults to 10^6, or 2*10^4 for the switch suite.
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Simplex JSON file (Euclidean, or spherical for experiments).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Project input vertices onto the sphere instead of rejecting them.
    #[arg(long, global = true)]
    pub normalize: bool,
    /// Accept degenerate inputs (points, segments, s = 0).
    #[arg(long, global = true)]
    pub test_mode: bool,
    #[arg(long, global = true, value_enum)]
    pub suite: Option<SuiteName>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t2: Option<f64>,
    /// Comma-separated shear parameters for centroid-uniqueness.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub s_values: Option<Vec<f64>>,
    /// Point sampler; ascent defaults to sobol, everything else to iid.
    #[arg(long, global = true, value_enum)]
    pub sampler: Option<SamplerName>,
    /// Randomized trials per suite check.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Extra lemma tuple `a1,a2,b1,b2,alpha1,alpha2,beta1,beta2`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub tuple: Option<Vec<f64>>,
    /// Rotation angle for perturbed-regular.
    #[arg(long, global = true, default_value_t = 0.3)]
    pub angle: f64,
    /// Destination file for generate.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn dim(&self) -> usize {
        self.dim.unwrap_or(DEFAULT_DIM)
    }

    pub fn n_samples(&self) -> u64 {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Estimate the mean width and its per-cell decomposition.
    Meanwidth,
    /// Run centroid ascent from the input simplex.
    Ascend,
    /// Run a randomized property suite.
    Verify {
        #[arg(value_enum, id = "suite_name", value_name = "SUITE")]
        suite: Option<SuiteName>,
    },
    /// Run a strip experiment and report its verdict.
    Experiment {
        #[arg(value_enum)]
        which: ExperimentName,
    },
    /// Write a simplex file.
    Generate {
        #[arg(value_enum)]
        kind: GenerateKind,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    Shear,
    Lemma,
    Spl,
    Switch,
}

impl From<SuiteName> for Suite {
    fn from(s: SuiteName) -> Self {
        match s {
            SuiteName::Shear => Suite::Shear,
            SuiteName::Lemma => Suite::Lemma,
            SuiteName::Spl => Suite::Spl,
            SuiteName::Switch => Suite::Switch,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerName {
    Iid,
    Sobol,
}

impl From<SamplerName> for SamplerKind {
    fn from(s: SamplerName) -> Self {
        match s {
            SamplerName::Iid => SamplerKind::Iid,
            SamplerName::Sobol => SamplerKind::ScrambledSobol,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentName {
    StripRatio,
    CentroidUniqueness,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenerateKind {
    Regular,
    RandomCovering,
    PerturbedRegular,
}

/// Exit code for a library error: malformed input is 2, everything the
/// mathematics rejects is 3.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_)
        | Error::GridMismatch
        | Error::DimensionMismatch { .. }
        | Error::VertexCount { .. }
        | Error::NotUnit { .. }
        | Error::ZeroVector
        | Error::DimensionTooSmall { .. }
        | Error::InvalidParameter(_) => EXIT_INPUT,
        _ => EXIT_PRECONDITION,
    }
}

fn hint(e: &Error) -> Option<&'static str> {
    match e {
        Error::NotCovering => Some("the origin must lie in the interior of the simplex"),
        Error::NotUnit { .. } => Some("pass --normalize to project vertices onto the sphere"),
        Error::EmptyCell { .. } => Some("a vertex cell is nearly empty; the simplex is close to not covering the sphere"),
        Error::NonPositiveWeight => Some("alpha1, alpha2, beta1, beta2 must be positive"),
        _ => None,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T, O, E>(args: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Some(h) = hint(&e) {
                let _ = writeln!(err, "hint: {h}");
            }
            exit_code(&e)
        }
    }
}

pub fn execute<O: Write, E: Write>(cli: &Cli, out: &mut O, err: &mut E) -> Result<i32> {
    let config = &cli.config;
    validate_config(config)?;
    match &cli.command {
        Command::Meanwidth => cmd_meanwidth(config, out),
        Command::Ascend => cmd_ascend(config, out, err),
        Command::Verify { suite } => {
            let suite = suite.or(config.suite).ok_or_else(|| {
                Error::InvalidParameter("name a suite: shear, lemma, spl or switch".into())
            })?;
            let mut config = config.clone();
            if suite == SuiteName::Switch {
                config.samples.get_or_insert(SWITCH_DEFAULT_SAMPLES);
            }
            cmd_verify(&config, suite.into(), out, err)
        }
        Command::Experiment { which } => cmd_experiment(config, *which, out),
        Command::Generate { kind } => cmd_generate(config, *kind, out),
    }
}

fn validate_config(config: &RunConfig) -> Result<()> {
    if config.dim() < 3 && !config.test_mode || config.dim() < 2 {
        return Err(Error::DimensionTooSmall { dim: config.dim() });
    }
    if config.n_samples() == 0 || config.max_iters == 0 || !(config.tol > 0.0) {
        return Err(Error::InvalidParameter("--samples, --max-iters and --tol must be positive".into()));
    }
    Ok(())
}

fn read_options(config: &RunConfig) -> ReadOptions {
    ReadOptions { normalize: config.normalize, test_mode: config.test_mode }
}

fn input_simplex(config: &RunConfig) -> Result<EuclideanSimplex> {
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("--input PATH is required".into()))?;
    let simplex = read_simplex(path, read_options(config))?;
    match config.dim {
        Some(dim) if dim != simplex.dim() => Err(Error::DimensionMismatch { expected: dim, found: simplex.dim() }),
        _ => Ok(simplex),
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    dim: usize,
    n_samples: u64,
    seed: u64,
    #[serde(flatten)]
    body: T,
}

fn envelope<'a, T: Serialize>(command: &'a str, config: &RunConfig, dim: usize, body: T) -> Envelope<'a, T> {
    Envelope { command, version: VERSION, dim, n_samples: config.n_samples(), seed: config.seed, body }
}

fn csv_writer<O: Write>(out: &mut O) -> csv::Writer<&mut O> {
    csv::WriterBuilder::new().from_writer(out)
}

fn meta(config: &RunConfig, dim: usize) -> [String; 4] {
    [config.seed.to_string(), config.n_samples().to_string(), dim.to_string(), VERSION.to_string()]
}

const META_COLUMNS: [&str; 4] = ["seed", "n_samples", "dim", "version"];

fn cmd_meanwidth<O: Write>(config: &RunConfig, out: &mut O) -> Result<i32> {
    let simplex = input_simplex(config)?;
    let report = mean_width_cells(&simplex, config.n_samples(), config.seed)?;
    match config.output {
        OutputFormat::Json => write_json_line(out, &envelope("meanwidth", config, simplex.dim(), json!({ "report": report })))?,
        OutputFormat::Csv => write_meanwidth_csv(out, config, simplex.dim(), &report)?,
    }
    Ok(EXIT_OK)
}

/// Columns: `cell, measure, count, value, std_error` then the metadata;
/// the last row has `cell = total`.
fn write_meanwidth_csv<O: Write>(out: &mut O, config: &RunConfig, dim: usize, report: &MeanWidthReport) -> Result<()> {
    let mut w = csv_writer(out);
    let mut header = vec!["cell", "measure", "count", "value", "std_error"];
    header.extend(META_COLUMNS);
    w.write_record(&header)?;
    for (i, est) in report.per_cell.iter().enumerate() {
        let mut row = vec![
            i.to_string(),
            report.cell_measures[i].to_string(),
            report.cell_counts[i].to_string(),
            est.value.to_string(),
            est.std_error.to_string(),
        ];
        row.extend(meta(config, dim));
        w.write_record(&row)?;
    }
    let mut row = vec![
        "total".to_string(),
        "1".to_string(),
        report.total.n_samples.to_string(),
        report.total.value.to_string(),
        report.total.std_error.to_string(),
    ];
    row.extend(meta(config, dim));
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

fn cmd_ascend<O: Write, E: Write>(config: &RunConfig, out: &mut O, err: &mut E) -> Result<i32> {
    let simplex = input_simplex(config)?;
    if !simplex.covers_sphere()? {
        return Err(Error::NotCovering);
    }
    let options = AscentOptions {
        tol: config.tol,
        max_iters: config.max_iters,
        n_samples: config.n_samples(),
        seed: config.seed,
        sampler: config.sampler.map(Into::into).unwrap_or(SamplerKind::ScrambledSobol),
    };
    let trajectory = ascend_with(&simplex, &options)?;
    write_trajectory(out, config, &trajectory)?;
    if trajectory.converged {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "ascent did not converge within {} iterations", config.max_iters)?;
        Ok(EXIT_NON_CONVERGENCE)
    }
}

/// Columns: `iteration, mean_width, std_error, regularity_distance,
/// movement, converged` then the metadata.
fn write_trajectory<O: Write>(out: &mut O, config: &RunConfig, t: &AscentTrajectory) -> Result<()> {
    let dim = t.final_simplex().dim();
    let violations = t.monotonicity_violations(VERDICT_SIGMAS);
    match config.output {
        OutputFormat::Json => {
            for step in &t.steps {
                let body = json!({
                    "kind": "step",
                    "iteration": step.iteration,
                    "mean_width": step.report.total.value,
                    "mean_width_std_error": step.report.total.std_error,
                    "regularity_distance": step.regularity_distance,
                    "movement": step.movement,
                    "simplex": step.simplex,
                    "cell_measures": step.report.cell_measures,
                });
                write_json_line(out, &envelope("ascend", config, dim, body))?;
            }
            let body = json!({
                "kind": "summary",
                "converged": t.converged,
                "non_convergence": !t.converged,
                "iterations": t.iterations,
                "tol": t.options.tol,
                "max_iters": t.options.max_iters,
                "final_regularity_distance": t.final_regularity_distance(),
                "final_simplex": t.final_simplex(),
                "monotonicity_violations": violations,
            });
            write_json_line(out, &envelope("ascend", config, dim, body))?;
        }
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            let mut header = vec!["iteration", "mean_width", "std_error", "regularity_distance", "movement", "converged"];
            header.extend(META_COLUMNS);
            w.write_record(&header)?;
            for (k, step) in t.steps.iter().enumerate() {
                let last = k + 1 == t.steps.len();
                let mut row = vec![
                    step.iteration.to_string(),
                    step.report.total.value.to_string(),
                    step.report.total.std_error.to_string(),
                    step.regularity_distance.to_string(),
                    step.movement.to_string(),
                    (last && t.converged).to_string(),
                ];
                row.extend(meta(config, dim));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn parse_tuple(values: &[f64]) -> Result<EightTuple> {
    let [a1, a2, b1, b2, al1, al2, be1, be2] = values else {
        return Err(Error::InvalidParameter("--tuple takes eight numbers".into()));
    };
    EightTuple::new([*a1, *a2], [*b1, *b2], [*al1, *al2], [*be1, *be2])
}

/// Checks an explicitly supplied tuple against both lemma variants.
fn injected_tuple_check(t: &EightTuple) -> Result<CheckResult> {
    let mut check = CheckResult {
        check: "supplied tuple".into(),
        trials: 0,
        violations: 0,
        worst: 0.0,
        threshold: 1e-12,
        counterexample: None,
    };
    for c in [simpson_antidote(t)?, reversed_simpson_antidote(t)?] {
        check.trials += 1;
        check.worst = check.worst.max(c.identity_residual);
        if c.is_counterexample() || c.identity_residual > check.threshold {
            check.violations += 1;
            check.counterexample.get_or_insert_with(|| json!({"tuple": t, "check": c}));
        }
    }
    Ok(check)
}

fn cmd_verify<O: Write, E: Write>(config: &RunConfig, suite: Suite, out: &mut O, err: &mut E) -> Result<i32> {
    let injected = match (&config.tuple, suite) {
        (Some(values), Suite::Lemma) => Some(injected_tuple_check(&parse_tuple(values)?)?),
        (Some(_), _) => return Err(Error::InvalidParameter("--tuple applies to the lemma suite".into())),
        (None, _) => None,
    };
    let suite_config = SuiteConfig { dim: config.dim(), trials: config.trials, n_samples: config.n_samples(), seed: config.seed };
    let mut report = run_suite(suite, &suite_config)?;
    report.checks.extend(injected);
    write_suite(out, config, &report)?;
    for c in &report.checks {
        writeln!(err, "{:<56} {:>9} trials {:>6} violations  worst {:.3e}", c.check, c.trials, c.violations, c.worst)?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_SUITE_VIOLATION })
}

/// Columns: `suite, check, trials, violations, worst, threshold` then the
/// metadata.
fn write_suite<O: Write>(out: &mut O, config: &RunConfig, report: &SuiteReport) -> Result<()> {
    let name = report.suite.name();
    match config.output {
        OutputFormat::Json => {
            for c in &report.checks {
                write_json_line(out, &envelope("verify", config, config.dim(), json!({ "suite": name, "result": c })))?;
            }
            let body = json!({ "suite": name, "kind": "summary", "violations": report.violations(), "passed": report.passed() });
            write_json_line(out, &envelope("verify", config, config.dim(), body))?;
        }
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            let mut header = vec!["suite", "check", "trials", "violations", "worst", "threshold"];
            header.extend(META_COLUMNS);
            w.write_record(&header)?;
            for c in &report.checks {
                let mut row = vec![
                    name.to_string(),
                    c.check.clone(),
                    c.trials.to_string(),
                    c.violations.to_string(),
                    c.worst.to_string(),
                    c.threshold.to_string(),
                ];
                row.extend(meta(config, config.dim()));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn experiment_simplex(config: &RunConfig, default: &[Vec<f64>]) -> Result<SphericalSimplex> {
    match &config.input {
        Some(path) => read_spherical_simplex(path),
        None => SphericalSimplex::from_rows(default),
    }
}

fn cmd_experiment<O: Write>(config: &RunConfig, which: ExperimentName, out: &mut O) -> Result<i32> {
    let options = ExperimentOptions { test_mode: config.test_mode };
    match which {
        ExperimentName::StripRatio => {
            let rows: Vec<Vec<f64>> = STRIP_RATIO_GENERATORS.iter().map(|r| r.to_vec()).collect();
            let ss = experiment_simplex(config, &rows)?;
            let s = config.s.unwrap_or(STRIP_RATIO_S);
            let t1 = config.t1.unwrap_or(STRIP_RATIO_T1);
            let t2 = config.t2.unwrap_or(STRIP_RATIO_T2);
            let record = strip_ratio_experiment(&ss, s, t1, t2, config.n_samples(), config.seed, options)?;
            write_strip_ratio(out, config, &ss, &record)?;
        }
        ExperimentName::CentroidUniqueness => {
            let rows: Vec<Vec<f64>> = UNIQUENESS_GENERATORS.iter().map(|r| r.to_vec()).collect();
            let ss = experiment_simplex(config, &rows)?;
            let s_values = config.s_values.clone().unwrap_or(UNIQUENESS_S_VALUES.to_vec());
            let record = centroid_uniqueness_experiment(&ss, &s_values, config.n_samples(), config.seed)?;
            write_uniqueness(out, config, &ss, &record)?;
        }
    }
    Ok(EXIT_OK)
}

fn generator_rows(ss: &SphericalSimplex) -> Vec<Vec<f64>> {
    ss.generators().iter().map(|g| g.as_slice().to_vec()).collect()
}

/// Columns: `s, t1, t2, S_lo, T_lo, S_hi, T_hi, left_ratio, right_ratio,
/// difference, difference_std_error, verdict` then the metadata.
fn write_strip_ratio<O: Write>(out: &mut O, config: &RunConfig, ss: &SphericalSimplex, r: &StripRatioRecord) -> Result<()> {
    match config.output {
        OutputFormat::Json => {
            let body = json!({ "experiment": "strip-ratio", "generators": generator_rows(ss), "record": r });
            write_json_line(out, &envelope("experiment", config, r.dim, body))?;
        }
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            let mut header = vec![
                "s", "t1", "t2", "S_lo", "T_lo", "S_hi", "T_hi", "left_ratio", "right_ratio", "difference",
                "difference_std_error", "verdict",
            ];
            header.extend(META_COLUMNS);
            w.write_record(&header)?;
            let mut row: Vec<String> = [r.s, r.t1, r.t2].iter().chain(&r.integrals).chain(&r.ratios).map(f64::to_string).collect();
            row.push(r.difference.to_string());
            row.push(r.difference_std_error.to_string());
            row.push(r.verdict.to_string());
            row.extend(meta(config, r.dim));
            w.write_record(&row)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Columns: `s, slope, slope_std_error, resultant_x1, resultant_x2,
/// verdict` then the metadata; the verdict covers the whole sweep.
fn write_uniqueness<O: Write>(out: &mut O, config: &RunConfig, ss: &SphericalSimplex, r: &UniquenessRecord) -> Result<()> {
    match config.output {
        OutputFormat::Json => {
            let body = json!({ "experiment": "centroid-uniqueness", "generators": generator_rows(ss), "record": r });
            write_json_line(out, &envelope("experiment", config, r.dim, body))?;
        }
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            let mut header = vec!["s", "slope", "slope_std_error", "resultant_x1", "resultant_x2", "verdict"];
            header.extend(META_COLUMNS);
            w.write_record(&header)?;
            for e in &r.entries {
                let mut row: Vec<String> =
                    [e.s, e.slope, e.slope_std_error, e.resultant_x1, e.resultant_x2].iter().map(f64::to_string).collect();
                row.push(r.verdict.to_string());
                row.extend(meta(config, r.dim));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_generate<O: Write>(config: &RunConfig, kind: GenerateKind, out: &mut O) -> Result<i32> {
    let (name, simplex) = match kind {
        GenerateKind::Regular => ("regular", EuclideanSimplex::regular(config.dim())?),
        GenerateKind::RandomCovering => ("random-covering", EuclideanSimplex::random_covering(config.dim(), config.seed)?),
        GenerateKind::PerturbedRegular => ("perturbed-regular", EuclideanSimplex::perturbed_regular(config.dim(), config.angle)?),
    };
    let Some(path) = &config.out else {
        // no destination: the simplex file itself goes to stdout
        writeln!(out, "{}", crate::io::simplex_to_json(&simplex)?)?;
        return Ok(EXIT_OK);
    };
    write_simplex(path, &simplex)?;
    let conditions = check_necessary_conditions(&simplex)?;
    let summary: Value = json!({
        "kind": name,
        "path": path,
        "regularity_distance": simplex.regularity_distance(),
        "covers_sphere": conditions.covers_sphere,
        "enclosing_ball_radius": conditions.enclosing_ball.radius,
    });
    match config.output {
        OutputFormat::Json => write_json_line(out, &envelope("generate", config, simplex.dim(), summary))?,
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            let mut header = vec!["kind", "path", "regularity_distance", "covers_sphere"];
            header.extend(META_COLUMNS);
            w.write_record(&header)?;
            let mut row = vec![
                name.to_string(),
                path.display().to_string(),
                simplex.regularity_distance().to_string(),
                conditions.covers_sphere.to_string(),
            ];
            row.extend(meta(config, simplex.dim()));
            w.write_record(&row)?;
            w.flush()?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("smw").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_and_bad_flags() {
        assert_eq!(run_args(&["--help"]).0, 0);
        assert_eq!(run_args(&["meanwidth", "--samples", "lots"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_INPUT);
    }

    #[test]
    fn missing_input_is_an_input_error() {
        let (code, _, err) = run_args(&["meanwidth"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("--input"));
    }

    #[test]
    fn generate_to_stdout_parses_back() {
        let (code, out, _) = run_args(&["generate", "regular", "--dim", "4"]);
        assert_eq!(code, 0);
        let s = crate::io::parse_simplex(&out, ReadOptions::default()).unwrap();
        assert!(s.regularity_distance() < 1e-12);
    }

    #[test]
    fn nonpositive_tuple_is_a_precondition_failure() {
        let (code, _, err) = run_args(&["verify", "lemma", "--trials", "10", "--tuple", "1,1,1,1,-1,1,1,1"]);
        assert_eq!(code, EXIT_PRECONDITION);
        assert!(err.contains("positive"));
    }

    #[test]
    fn counterexample_tuple_is_a_suite_violation_only_without_hypothesis() {
        // the Simpson reversal fails the hypothesis, so it is not a counterexample
        let (code, _, _) = run_args(&["verify", "lemma", "--trials", "10", "--tuple", "0.1,300,10,31,1,10,10,1"]);
        assert_eq!(code, 0);
    }
}
