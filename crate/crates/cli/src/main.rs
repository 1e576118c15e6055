#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! `clm`: run complex Langevin experiments on the SU(n) Polyakov chain and
//! the reduced SU(2) eigen-angle model, and evaluate the exact integrals.
//!
//! Exit status is 0 on success, 1 when a run diverges or escapes (or a
//! `--verify` re-run disagrees), and 2 on configuration or I/O errors.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clm_core::cooling::CoolingStrategy;
use clm_core::langevin::{run_chain_with, ChainReport, RunStatus};
use clm_core::reduced::{
    flow_field, is_localized, localization_f, run_reduced_with, trace_boundary, FlowBounds, BOUNDARY_TOLERANCE,
    DEFAULT_ETA_SAMPLES,
};
use clm_core::{su2_expectation, su3_expectation, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use config::{
    parse_complex, ChainConfig, ChainPlan, ComplexValue, ConfigError, CoolBenchConfig, CoolBenchPlan, CouplingConfig,
    ReducedConfig, ReducedPlan, ScheduleConfig,
};
use output::{first_difference, pairs_csv, resolve_path, sibling, write_json, Csv, Envelope};

#[derive(Parser, Debug)]
#[command(name = "clm", version, about, args_conflicts_with_subcommands = true)]
struct Cli {
    /// Re-run the experiment recorded in a JSON report and check the result matches.
    #[arg(long, value_name = "REPORT")]
    verify: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Complex Langevin on the SU(n) Polyakov chain.
    Chain(ChainArgs),
    /// The reduced SU(2) eigen-angle process.
    Reduced(ReducedArgs),
    /// Exact expectation values by quadrature.
    Exact(ExactArgs),
    /// Test a coupling against the localization region, or trace its boundary.
    Region(RegionArgs),
    /// Tabulate the reduced drift field on a grid.
    Flow(FlowArgs),
    /// Compare cooling strategies on one shared noise stream.
    CoolBench(CoolBenchArgs),
}

fn complex_arg(s: &str) -> Result<ComplexValue, String> {
    parse_complex(s).map(ComplexValue::from_c64)
}

#[derive(Args, Debug, Default)]
struct CouplingArgs {
    /// Coupling of tr P, e.g. `2.27` or `1+0.5i`.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    beta1: Option<ComplexValue>,
    /// Coupling of tr P⁻¹.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    beta2: Option<ComplexValue>,
    /// Gauge coupling; with kappa and mu gives beta1 = beta + kappa e^mu, beta2 = conj(beta) + kappa e^-mu.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    beta: Option<ComplexValue>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// Chemical potential.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
}

impl CouplingArgs {
    fn to_config(&self) -> CouplingConfig {
        CouplingConfig {
            beta1: self.beta1,
            beta2: self.beta2,
            beta: self.beta,
            kappa: self.kappa,
            mu: self.mu,
        }
    }
}

#[derive(Args, Debug, Default)]
struct ScheduleArgs {
    /// Langevin step size.
    #[arg(long)]
    dt: Option<f64>,
    /// Langevin time discarded before sampling.
    #[arg(long)]
    burn_in: Option<f64>,
    /// Langevin time between samples.
    #[arg(long)]
    interval: Option<f64>,
    /// Number of samples.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl ScheduleArgs {
    fn to_config(&self) -> ScheduleConfig {
        ScheduleConfig {
            dt: self.dt,
            burn_in: self.burn_in,
            interval: self.interval,
            samples: self.samples,
            seed: self.seed,
        }
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ChainArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Gauge group SU(n).
    #[arg(long)]
    n: Option<usize>,
    /// Number of links.
    #[arg(long = "N", visible_alias = "links")]
    links: Option<usize>,
    #[command(flatten)]
    coupling: CouplingArgs,
    /// none, gradient or optimal.
    #[arg(long)]
    cooling: Option<String>,
    /// Gradient-descent step factor.
    #[arg(long)]
    alpha: Option<f64>,
    /// Gradient-descent iterations per Langevin step.
    #[arg(long)]
    iters: Option<u32>,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Observable powers k of tr P^k, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ks: Option<Vec<i32>>,
    /// Steps between logged ΔF values.
    #[arg(long)]
    stride: Option<u64>,
    /// Report path (default `chain.json` in the output directory).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the ΔF series as `<report>.series.csv`.
    #[arg(long)]
    emit_series: bool,
    /// Also write the eigenvalue samples as `<report>.samples.csv`.
    #[arg(long)]
    emit_samples: bool,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ReducedArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Real part of β.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Imaginary part of β.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<f64>,
    /// The run counts as escaped once |y| exceeds this.
    #[arg(long)]
    y_bound: Option<f64>,
    /// Drift displacement cap in units of √(2 dt).
    #[arg(long)]
    cap_factor: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ks: Option<Vec<i32>>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the (x, y) samples as `<report>.samples.csv`.
    #[arg(long)]
    emit_samples: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Group {
    Su2,
    Su3,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ExactArgs {
    #[arg(long, value_enum, default_value = "su3")]
    group: Group,
    /// Powers k of tr U^k, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    k: Vec<i32>,
    #[command(flatten)]
    coupling: CouplingArgs,
    /// SU(2): real part of β (alternative to --beta).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// SU(2): imaginary part of β.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Quadrature points per angle.
    #[arg(long, default_value_t = 512)]
    points: usize,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct RegionArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Trace the region boundary instead of testing one point.
    #[arg(long)]
    trace: bool,
    /// Number of A values on the traced boundary.
    #[arg(long, default_value_t = 60)]
    count: usize,
    /// Bisection tolerance in B.
    #[arg(long, default_value_t = BOUNDARY_TOLERANCE)]
    tol: f64,
    /// CSV path for the traced boundary (default `region.csv` in the output directory).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct FlowArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 64)]
    nx: usize,
    #[arg(long, default_value_t = 32)]
    ny: usize,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y_max: Option<f64>,
    /// CSV path (default `flow.csv` in the output directory).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct CoolBenchArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "N", visible_alias = "links")]
    links: Option<usize>,
    #[command(flatten)]
    coupling: CouplingArgs,
    #[arg(long)]
    dt: Option<f64>,
    /// Langevin time to run each strategy for.
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Gradient-descent step factors, comma separated.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    #[arg(long)]
    iters: Option<u32>,
    #[arg(long)]
    stride: Option<u64>,
    /// Summary path (default `cool-bench.json`); series go to `<summary>.<strategy>.csv`.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Config(ConfigError),
    Other(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

impl From<clm_core::Error> for CliError {
    fn from(e: clm_core::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Whether the experiment itself succeeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Success,
    Failure,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match (&cli.verify, cli.command) {
        (Some(path), _) => verify(path),
        (None, Some(cmd)) => dispatch(cmd),
        (None, None) => Err(CliError::Other(
            "a subcommand or --verify is required; see --help".into(),
        )),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failure) => ExitCode::from(1),
        Err(e) => {
            match e {
                CliError::Config(c) => eprintln!("error: {c}"),
                CliError::Other(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<Outcome> {
    match cmd {
        Command::Chain(a) => chain(a),
        Command::Reduced(a) => reduced(a),
        Command::Exact(a) => exact(a),
        Command::Region(a) => region(a),
        Command::Flow(a) => flow(a),
        Command::CoolBench(a) => cool_bench(a),
    }
}

fn format_complex(z: C64, digits: usize) -> String {
    if z.im.abs() < 0.5 * 10f64.powi(-(digits as i32)) {
        format!("{:.*}", digits, z.re)
    } else {
        format!("{:.*}{:+.*}i", digits, z.re, digits, z.im)
    }
}

fn status_line(status: &RunStatus) -> String {
    match status {
        RunStatus::Completed => "completed".into(),
        RunStatus::Truncated { time } => format!("truncated at t = {time}"),
        RunStatus::Diverged { time } => format!("diverged at t = {time}"),
        RunStatus::Escaped { time } => format!("escaped at t = {time}"),
    }
}

fn print_report(report: &ChainReport) {
    println!(
        "status: {} ({} steps, {} samples)",
        status_line(&report.status),
        report.diagnostics.steps,
        report.num_samples
    );
    for e in &report.estimates {
        println!(
            "k = {:>2}: {} (stderr {:.4}, {:.4})",
            e.k,
            format_complex(e.mean, 4),
            e.stderr.re,
            e.stderr.im
        );
    }
}

fn outcome_of(status: &RunStatus) -> Outcome {
    if status.is_failure() {
        Outcome::Failure
    } else {
        Outcome::Success
    }
}

fn write_envelope<C: Serialize, R: Serialize>(path: &Path, command: &str, config: &C, result: &R) -> CliResult<()> {
    let env = Envelope {
        command: command.into(),
        config: serde_json::to_value(config)?,
        result: serde_json::to_value(result)?,
    };
    write_json(path, &env)?;
    println!("report: {}", path.display());
    Ok(())
}

fn load_or_default<T>(path: &Option<PathBuf>) -> CliResult<T>
where
    T: Default + for<'de> Deserialize<'de>,
{
    match path {
        Some(p) => Ok(config::load_json(p)?),
        None => Ok(T::default()),
    }
}

fn execute_chain(plan: &ChainPlan) -> CliResult<ChainReport> {
    Ok(run_chain_with(
        &plan.params,
        &plan.schedule,
        &plan.strategy,
        &plan.ks,
        &plan.options,
    )?)
}

fn chain(args: ChainArgs) -> CliResult<Outcome> {
    let mut cfg: ChainConfig = load_or_default(&args.config)?;
    cfg.overlay(&ChainConfig {
        n: args.n,
        links: args.links,
        coupling: args.coupling.to_config(),
        cooling: args.cooling.clone(),
        alpha: args.alpha,
        iters: args.iters,
        schedule: args.schedule.to_config(),
        ks: args.ks.clone(),
        record_samples: args.emit_samples.then_some(true),
        delta_f_stride: args.stride,
    });
    let plan = cfg.resolve()?;
    let path = resolve_path(args.output.as_deref(), "chain.json");
    let report = execute_chain(&plan)?;
    print_report(&report);
    println!("max delta_f: {:e}", report.diagnostics.max_delta_f);
    write_envelope(&path, "chain", &ChainConfig::explicit(&plan), &report)?;
    if args.emit_series {
        let p = sibling(&path, "series.csv");
        pairs_csv(["t", "delta_f"], &report.delta_f_series).write(&p)?;
        println!("series: {}", p.display());
    }
    if let Some(samples) = report.samples.as_ref().filter(|_| args.emit_samples) {
        let p = sibling(&path, "samples.csv");
        pairs_csv(["x", "y"], samples).write(&p)?;
        println!("samples: {}", p.display());
    }
    Ok(outcome_of(&report.status))
}

fn execute_reduced(plan: &ReducedPlan) -> CliResult<ChainReport> {
    Ok(run_reduced_with(&plan.params, &plan.schedule, &plan.options)?)
}

fn reduced(args: ReducedArgs) -> CliResult<Outcome> {
    let mut cfg: ReducedConfig = load_or_default(&args.config)?;
    cfg.overlay(&ReducedConfig {
        a: args.a,
        b: args.b,
        schedule: args.schedule.to_config(),
        x0: args.x0,
        y0: args.y0,
        y_bound: args.y_bound,
        cap_factor: args.cap_factor,
        ks: args.ks.clone(),
        record_samples: args.emit_samples.then_some(true),
    });
    let plan = cfg.resolve()?;
    let path = resolve_path(args.output.as_deref(), "reduced.json");
    let report = execute_reduced(&plan)?;
    print_report(&report);
    println!("max |y|: {:.4}", report.diagnostics.max_abs_y);
    write_envelope(&path, "reduced", &ReducedConfig::explicit(&plan), &report)?;
    if let Some(samples) = report.samples.as_ref().filter(|_| args.emit_samples) {
        let p = sibling(&path, "samples.csv");
        pairs_csv(["x", "y"], samples).write(&p)?;
        println!("samples: {}", p.display());
    }
    Ok(outcome_of(&report.status))
}

fn exact(args: ExactArgs) -> CliResult<Outcome> {
    let quad = config::quadrature(args.points)?;
    if args.k.contains(&0) {
        return Err(ConfigError::new("k", "powers must be nonzero").into());
    }
    let values: Vec<(i32, C64)> = match args.group {
        Group::Su3 => {
            let (b1, b2) = args.coupling.to_config().resolve()?;
            args.k
                .iter()
                .map(|&k| Ok((k, su3_expectation(k, b1, b2, &quad)?)))
                .collect::<CliResult<_>>()?
        }
        Group::Su2 => {
            let c = &args.coupling;
            if c.beta1.is_some() || c.beta2.is_some() || c.kappa.is_some() || c.mu.is_some() {
                return Err(ConfigError::new("group", "su2 takes --beta or --a/--b only").into());
            }
            let beta = match (args.a, args.b, c.beta) {
                (None, None, Some(beta)) => beta.to_c64(),
                (a, b, None) if a.is_some() || b.is_some() => C64::new(a.unwrap_or(0.0), b.unwrap_or(0.0)),
                (_, _, Some(_)) => return Err(ConfigError::new("beta", "give either --beta or --a/--b").into()),
                _ => return Err(ConfigError::new("a", "su2 needs --a/--b or --beta").into()),
            };
            args.k
                .iter()
                .map(|&k| Ok((k, su2_expectation(k, beta, &quad)?)))
                .collect::<CliResult<_>>()?
        }
    };
    if let [(_, v)] = values.as_slice() {
        println!("{}", format_complex(*v, 4));
    } else {
        for (k, v) in values {
            println!("{k}\t{}", format_complex(v, 4));
        }
    }
    Ok(Outcome::Success)
}

fn region(args: RegionArgs) -> CliResult<Outcome> {
    if args.trace {
        if !(args.tol > 0.0) {
            return Err(ConfigError::new("tol", "must be positive").into());
        }
        if args.count == 0 {
            return Err(ConfigError::new("count", "must be positive").into());
        }
        let points = trace_boundary(args.count, args.tol)?;
        let rows: Vec<(f64, f64)> = points.iter().map(|p| (p.a, p.b)).collect();
        let path = resolve_path(args.output.as_deref(), "region.csv");
        pairs_csv(["a", "b"], &rows).write(&path)?;
        println!("boundary points: {}", rows.len());
        println!("region: {}", path.display());
        return Ok(Outcome::Success);
    }
    let a = args
        .a
        .ok_or_else(|| ConfigError::new("a", "required unless --trace is given"))?;
    let b = args
        .b
        .ok_or_else(|| ConfigError::new("b", "required unless --trace is given"))?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(ConfigError::new("a", "A and B must be finite").into());
    }
    println!("localized: {}", is_localized(a, b)?);
    if a == 0.0 {
        println!("criterion: |B| < 1/2");
    } else {
        println!("f: {:.6}", localization_f(a, b, DEFAULT_ETA_SAMPLES)?);
    }
    Ok(Outcome::Success)
}

fn flow(args: FlowArgs) -> CliResult<Outcome> {
    let d = FlowBounds::default();
    let bounds = config::flow_bounds(
        (args.x_min.unwrap_or(d.x_min), args.x_max.unwrap_or(d.x_max)),
        (args.y_min.unwrap_or(d.y_min), args.y_max.unwrap_or(d.y_max)),
    )?;
    if args.nx == 0 {
        return Err(ConfigError::new("nx", "must be positive").into());
    }
    if args.ny == 0 {
        return Err(ConfigError::new("ny", "must be positive").into());
    }
    let cells = flow_field(args.a, args.b, args.nx, args.ny, &bounds)?;
    let mut csv = Csv::new(&["x", "y", "kr", "ki", "norm"]);
    let mut skipped = 0;
    for c in &cells {
        if c.singular {
            skipped += 1;
        } else {
            csv.row(&[c.x, c.y, c.kr, c.ki, c.norm]);
        }
    }
    let path = resolve_path(args.output.as_deref(), "flow.csv");
    csv.write(&path)?;
    println!("cells: {} ({} singular skipped)", cells.len() - skipped, skipped);
    println!("flow: {}", path.display());
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BenchRun {
    label: String,
    strategy: CoolingStrategy,
    report: ChainReport,
}

fn execute_bench(plan: &CoolBenchPlan) -> CliResult<Vec<BenchRun>> {
    // each strategy regenerates the same noise stream from the shared seed
    let results: Vec<clm_core::Result<ChainReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = plan
            .strategies
            .iter()
            .map(|s| scope.spawn(move || run_chain_with(&plan.params, &plan.schedule, s, &[1], &plan.options)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(clm_core::Error::InvalidArgument("worker panicked".into())))
            })
            .collect()
    });
    plan.strategies
        .iter()
        .zip(results)
        .map(|(s, r)| {
            Ok(BenchRun {
                label: s.label(),
                strategy: *s,
                report: r?,
            })
        })
        .collect()
}

fn cool_bench(args: CoolBenchArgs) -> CliResult<Outcome> {
    let mut cfg: CoolBenchConfig = load_or_default(&args.config)?;
    cfg.overlay(&CoolBenchConfig {
        n: args.n,
        links: args.links,
        coupling: args.coupling.to_config(),
        dt: args.dt,
        t_max: args.t_max,
        seed: args.seed,
        alphas: args.alphas.clone(),
        iters: args.iters,
        delta_f_stride: args.stride,
    });
    let plan = cfg.resolve()?;
    let path = resolve_path(args.output.as_deref(), "cool-bench.json");
    let runs = execute_bench(&plan)?;
    let mut outcome = Outcome::Success;
    for run in &runs {
        let last = run.report.delta_f_series.last().map_or(f64::NAN, |p| p.1);
        println!(
            "{:<16} {:<28} max delta_f {:.3e}  final {:.3e}",
            run.label,
            status_line(&run.report.status),
            run.report.diagnostics.max_delta_f,
            last
        );
        // the uncooled run is expected to blow up
        if run.strategy != CoolingStrategy::NoCooling && run.report.status.is_failure() {
            outcome = Outcome::Failure;
        }
        let p = sibling(&path, &format!("{}.csv", run.label));
        pairs_csv(["t", "delta_f"], &run.report.delta_f_series).write(&p)?;
    }
    write_envelope(&path, "cool-bench", &CoolBenchConfig::explicit(&plan), &runs)?;
    Ok(outcome)
}

fn rerun(command: &str, config: Value) -> CliResult<Value> {
    let bad = |e: serde_json::Error| CliError::Config(ConfigError::new("config", e.to_string()));
    Ok(match command {
        "chain" => {
            let plan = serde_json::from_value::<ChainConfig>(config).map_err(bad)?.resolve()?;
            serde_json::to_value(execute_chain(&plan)?)?
        }
        "reduced" => {
            let plan = serde_json::from_value::<ReducedConfig>(config)
                .map_err(bad)?
                .resolve()?;
            serde_json::to_value(execute_reduced(&plan)?)?
        }
        "cool-bench" => {
            let plan = serde_json::from_value::<CoolBenchConfig>(config)
                .map_err(bad)?
                .resolve()?;
            serde_json::to_value(execute_bench(&plan)?)?
        }
        other => return Err(ConfigError::new("command", format!("cannot verify `{other}` reports")).into()),
    })
}

fn verify(path: &Path) -> CliResult<Outcome> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
    let env: Envelope = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(ConfigError::new("report", format!("{}: {e}", path.display()))))?;
    let fresh = rerun(&env.command, env.config)?;
    match first_difference(&env.result, &fresh) {
        None => {
            println!("verified: {} ({})", path.display(), env.command);
            Ok(Outcome::Success)
        }
        Some(at) => {
            println!("mismatch: {} differs at {at}", path.display());
            Ok(Outcome::Failure)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(format_complex(C64::new(2.09571, 1e-9), 4), "2.0957");
        assert_eq!(format_complex(C64::new(0.8759, 0.13), 4), "0.8759+0.1300i");
        assert_eq!(format_complex(C64::new(-0.48, -0.2), 4), "-0.4800-0.2000i");
    }

    #[test]
    fn negative_flag_values_parse() {
        let cli = Cli::try_parse_from([
            "clm", "exact", "--group", "su2", "--k", "-1,2", "--a", "-1", "--b", "-0.5",
        ])
        .unwrap();
        match cli.command {
            Some(Command::Exact(e)) => {
                assert_eq!(e.k, vec![-1, 2]);
                assert_eq!(e.a, Some(-1.0));
                assert_eq!(e.b, Some(-0.5));
            }
            other => panic!("{other:?}"),
        }
        let cli = Cli::try_parse_from(["clm", "chain", "--N", "4", "--beta1", "-0.5i", "--beta2", "1"]).unwrap();
        match cli.command {
            Some(Command::Chain(c)) => {
                assert_eq!(c.links, Some(4));
                assert_eq!(c.coupling.beta1, Some(ComplexValue::Pair([0.0, -0.5])));
            }
            other => panic!("{other:?}"),
        }
    }
}
