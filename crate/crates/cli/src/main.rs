//! `fermient` command-line tool.

mod config;

use std::f64::consts::LN_2;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fermient::analytic::{self, AnalyticReport, Geometry, QpcSwitchParams, MIN_U_NODES};
use fermient::numfmt::{serialize_f64, serialize_f64_slice, serialize_opt_f64};
use fermient::oracle;
use fermient::sweep::{self, OutputFormat, SweepRow, SweepTable};
use fermient::{fcs, spectrum, EntropyReport, OccupationSpectrum, RegionSpec};

use config::Params;

/// Oracle identity residual above which `oracle-check` fails.
const ORACLE_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "fermient", version, about = "Entanglement, number and accessible entropy of free fermions")]
struct Cli {
    /// Report entropies in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,

    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy report for a region of a Fermi sea.
    Entropy(ModelArgs),
    /// Particle-number distribution of a region, or of a given spectrum.
    Fcs(FcsArgs),
    /// Randomized check of S_res = S_A - S_m against exact Fock-space states.
    OracleCheck(OracleArgs),
    /// Closed-form and quadrature models.
    #[command(subcommand)]
    Analytic(AnalyticCommand),
    /// Size sweep with scaling fits.
    Sweep(SweepArgs),
    /// Widom coefficients and U(f) for the counting function.
    Widom(WidomArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// sine1d, square2d or ring.
    #[arg(long)]
    model: String,
    /// Fermi momentum; accepts a `pi` suffix, e.g. 0.5pi.
    #[arg(long)]
    kf: Option<String>,
    /// Ring size.
    #[arg(long)]
    sites: Option<usize>,
    /// Occupied ring orbitals.
    #[arg(long)]
    filled: Option<usize>,
    /// Interval length, or side of the square region in 2d.
    #[arg(long)]
    length: usize,
}

#[derive(Args)]
struct FcsArgs {
    /// Occupation spectrum as a comma-separated list, instead of a model.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["model", "kf", "sites", "filled", "length"])]
    nu: Option<Vec<f64>>,
    #[arg(long, requires = "length")]
    model: Option<String>,
    #[arg(long)]
    kf: Option<String>,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    filled: Option<usize>,
    #[arg(long)]
    length: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 8)]
    modes: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum AnalyticCommand {
    /// N independent attempts with transmission D.
    Binomial {
        #[arg(long = "N")]
        n: u64,
        #[arg(long = "D")]
        d: f64,
    },
    /// Quantum point contact switched on for Δt, with Δt/τ = ratio.
    Qpc {
        #[arg(long = "D")]
        d: f64,
        #[arg(long)]
        ratio: f64,
    },
    /// Luttinger liquid with parameter g at k_F L = kfl.
    Luttinger {
        #[arg(long)]
        g: f64,
        #[arg(long)]
        kfl: f64,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// File of `key = value` lines; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    kf: Option<String>,
    #[arg(long)]
    sites: Option<String>,
    #[arg(long)]
    filled: Option<String>,
    /// interval or square.
    #[arg(long)]
    geometry: Option<String>,
    /// Comma-separated, strictly increasing sizes.
    #[arg(long)]
    scales: Option<String>,
    /// Comma-separated subset of S_A,S_m,S_res,C_2,delta_S.
    #[arg(long)]
    quantities: Option<String>,
    /// csv, json or svg.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct WidomArgs {
    /// Side lengths of region A: one value in 1d, `width,height` in 2d.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    region: Vec<String>,
    /// Side lengths of the Fermi sea, `pi` suffix allowed.
    #[arg(long, value_delimiter = ',', default_value = "pi")]
    sea: Vec<String>,
    /// Also evaluate U(f) for the counting function at this λ.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long, default_value_t = MIN_U_NODES)]
    nodes: usize,
}

enum Failure {
    Usage(String),
    Library(fermient::Error),
    Check(String),
}

impl From<fermient::Error> for Failure {
    fn from(e: fermient::Error) -> Self {
        Failure::Library(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Library(e.into())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 1 } else { 2 })
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("FERMIENT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("FERMIENT_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> CliResult<()> {
    let unit = if cli.bits { 1.0 / LN_2 } else { 1.0 };
    let out = cli.output;
    match cli.command {
        Command::Entropy(m) => {
            let report = model_report(&m)?;
            emit_json(&report.scale_entropies(unit), out)
        }
        Command::Fcs(a) => emit_json(&fcs_command(a)?.in_units(unit), out),
        Command::OracleCheck(a) => oracle_check(a, unit, out),
        Command::Analytic(a) => emit_json(&scale_analytic(analytic_command(a)?, unit), out),
        Command::Sweep(a) => sweep_command(a, unit, out),
        Command::Widom(a) => emit_json(&widom_command(a)?, out),
    }
}

fn usage<T>(r: Result<T, String>) -> CliResult<T> {
    r.map_err(Failure::Usage)
}

fn region_for(model: &fermient::FermiSeaSpec, length: usize) -> CliResult<RegionSpec> {
    Ok(match model.dimension() {
        1 => RegionSpec::interval(length)?,
        _ => RegionSpec::square(length)?,
    })
}

fn model_report(m: &ModelArgs) -> CliResult<EntropyReport> {
    let model = usage(config::model(&m.model, m.kf.as_deref(), m.sites, m.filled))?;
    let region = region_for(&model, m.length)?;
    Ok(spectrum::report(&model.correlation(&region)?)?)
}

#[derive(Serialize)]
struct FcsOutput {
    #[serde(serialize_with = "serialize_f64_slice")]
    p: Vec<f64>,
    #[serde(rename = "C_1", serialize_with = "serialize_f64")]
    c_1: f64,
    #[serde(rename = "C_2", serialize_with = "serialize_f64")]
    c_2: f64,
    #[serde(rename = "S_m", serialize_with = "serialize_f64")]
    s_m: f64,
    #[serde(rename = "delta_S", serialize_with = "serialize_f64")]
    delta_s: f64,
}

impl FcsOutput {
    fn in_units(self, unit: f64) -> Self {
        Self {
            s_m: self.s_m * unit,
            delta_s: self.delta_s * unit,
            ..self
        }
    }
}

fn fcs_command(a: FcsArgs) -> CliResult<FcsOutput> {
    let spectrum = match (a.nu, a.model) {
        (Some(nu), _) => OccupationSpectrum::new(nu)?,
        (None, Some(model)) => {
            let model = usage(config::model(&model, a.kf.as_deref(), a.sites, a.filled))?;
            let region = region_for(&model, a.length.expect("clap requires length"))?;
            spectrum::occupation_spectrum(&model.correlation(&region)?)?
        }
        (None, None) => return usage(Err("give either --nu or --model".into())),
    };
    let dist = fcs::charge_distribution(&spectrum)?;
    let (c_1, c_2) = spectrum::cumulants(&spectrum);
    Ok(FcsOutput {
        s_m: fcs::measurement_entropy(&dist),
        delta_s: fcs::gaussian_bound(c_2)?,
        p: dist.probabilities().to_vec(),
        c_1,
        c_2,
    })
}

fn oracle_check(a: OracleArgs, unit: f64, out: Option<PathBuf>) -> CliResult<()> {
    if a.modes < 2 || a.modes > oracle::MAX_MODES {
        return usage(Err(format!("--modes must be in 2..={}", oracle::MAX_MODES)));
    }
    if a.trials == 0 {
        return usage(Err("--trials must be positive".into()));
    }
    let mut check = oracle::identity_check(a.modes, a.trials, a.seed)?;
    let passed = check.max_identity_error < ORACLE_TOL && check.sandwich_violations == 0;
    let residual = check.max_identity_error;
    check.max_identity_error *= unit;
    check.max_spectral_entropy_error *= unit;
    emit_json(&check, out)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "identity residual {residual:e} (limit {ORACLE_TOL:e}), {} sandwich violations",
            check.sandwich_violations
        )))
    }
}

fn analytic_command(a: AnalyticCommand) -> CliResult<AnalyticReport> {
    Ok(match a {
        AnalyticCommand::Binomial { n, d } => analytic::binomial_report(n, d)?,
        AnalyticCommand::Qpc { d, ratio } => analytic::qpc_switch_report(&QpcSwitchParams::new(d, ratio)?)?,
        AnalyticCommand::Luttinger { g, kfl } => analytic::luttinger_report(g, kfl)?,
    })
}

fn scale_analytic(r: AnalyticReport, unit: f64) -> AnalyticReport {
    AnalyticReport {
        report: r.report.scale_entropies(unit),
        s_m_asymptotic: r.s_m_asymptotic.map(|s| s * unit),
        note: r.note,
    }
}

fn sweep_command(a: SweepArgs, unit: f64, out: Option<PathBuf>) -> CliResult<()> {
    let mut params = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            usage(config::parse_config(&text).map_err(|e| format!("{}: {e}", path.display())))?
        }
        None => Params::new(),
    };
    let flags = [
        ("model", a.model),
        ("kf", a.kf),
        ("sites", a.sites),
        ("filled", a.filled),
        ("geometry", a.geometry),
        ("scales", a.scales),
        ("quantities", a.quantities),
        ("format", a.format),
        ("output", out.map(|p| p.display().to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            params.insert(k.to_string(), v);
        }
    }
    let cfg = usage(config::sweep_config(&params))?;
    let table = sweep::run_sweep(&cfg)?;
    let table = SweepTable {
        rows: table
            .rows
            .into_iter()
            .map(|r| SweepRow {
                scale: r.scale,
                report: r.report.scale_entropies(unit),
            })
            .collect(),
    };
    if cfg.output.is_some() {
        sweep::write_output(&cfg, &table)?;
        return Ok(());
    }
    let stdout = io::stdout().lock();
    match usage(config::stdout_format(&params))? {
        OutputFormat::Csv => sweep::write_csv(&table, stdout)?,
        OutputFormat::Json => sweep::write_json(&cfg, &table, stdout)?,
        OutputFormat::Svg => sweep::write_svg(&cfg, &table, stdout)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct WidomOutput {
    #[serde(flatten)]
    coefficients: analytic::WidomSpec,
    #[serde(serialize_with = "serialize_opt_f64", skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(rename = "U", serialize_with = "serialize_opt_f64", skip_serializing_if = "Option::is_none")]
    u: Option<f64>,
}

fn geometry(sides: &[String]) -> CliResult<Geometry> {
    let v = usage(sides.iter().map(|s| config::parse_real(s)).collect::<Result<Vec<_>, _>>())?;
    match v[..] {
        [length] => Ok(Geometry::Interval { length }),
        [width, height] => Ok(Geometry::Rectangle { width, height }),
        _ => usage(Err("give one side length in 1d or two in 2d".into())),
    }
}

fn widom_command(a: WidomArgs) -> CliResult<WidomOutput> {
    let region = geometry(&a.region)?;
    let sea = geometry(&a.sea)?;
    let coefficients = analytic::widom_coefficients(region, sea, a.region.len())?;
    let lambda = a.lambda.as_deref().map(config::parse_real).transpose();
    let lambda = usage(lambda)?;
    let u = lambda
        .map(|l| analytic::counting_function_u(l, a.nodes))
        .transpose()?;
    Ok(WidomOutput {
        coefficients,
        lambda,
        u,
    })
}

fn emit_json<T: Serialize>(value: &T, out: Option<PathBuf>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(fermient::Error::from)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
