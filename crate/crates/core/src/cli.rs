//! Command-line front end.
//!
//! ```text
//! gauss-tranche price (--preset NAME | --portfolio PATH) --detach LIST [--attach LIST]
//!                     [--method gaussian|hermite|mc|exact] [--order N] [--nodes K]
//!                     [--samples S] [--seed X] [--antithetic] [--out PATH]
//! gauss-tranche export-preset NAME [--out PATH]
//! gauss-tranche presets
//! ```
//!
//! All tranche points are decimal fractions (0.03, never 3). Exit codes: 0 on
//! success, 1 for usage errors, 2 for validation errors, 3 for I/O failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::io::{self, ResultRow};
use crate::model::{Portfolio, Preset, Tranche, ValidationOptions};
use crate::oracles::{self, McConfig};
use crate::pricer::{self, PricerConfig};

/// Default expansion order for `--method hermite` without `--order`.
pub const DEFAULT_HERMITE_ORDER: usize = 5;

#[derive(Debug, Parser)]
#[command(name = "gauss-tranche", version, about = "Expected tranche loss in the Gaussian factor model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Price one or more tranches.
    Price(PriceArgs),
    /// Write a built-in portfolio as CSV.
    ExportPreset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in portfolios.
    Presets,
}

#[derive(Debug, Args)]
struct PriceArgs {
    /// Portfolio CSV with header id,f,p,r,w1..wm.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    portfolio: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Attachment points; one value applies to every detachment.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    attach: Vec<f64>,
    /// Detachment points, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    detach: Vec<f64>,
    /// Engine; inferred from --order when omitted.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Expansion order N (1 = normal approximation).
    #[arg(long)]
    order: Option<usize>,
    /// Gauss-Hermite nodes per factor.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    antithetic: bool,
    #[arg(long)]
    sigma_floor: Option<f64>,
    /// Permit expansion orders up to 20.
    #[arg(long)]
    allow_high_order: bool,
    /// Accept portfolios whose notional fractions sum to less than one.
    #[arg(long)]
    allow_partial_notional: bool,
    /// Fill the runtime_ms column (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Gaussian,
    Hermite,
    Mc,
    Exact,
}

impl MethodArg {
    fn tag(self) -> &'static str {
        match self {
            MethodArg::Gaussian => "gaussian",
            MethodArg::Hermite => "hermite",
            MethodArg::Mc => "mc",
            MethodArg::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PortfolioSource {
    File(PathBuf),
    Preset(Preset),
}

/// A validated `price` request.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub source: PortfolioSource,
    pub tranches: Vec<Tranche>,
    pub method: MethodArg,
    pub pricer: PricerConfig,
    pub mc: McConfig,
    pub validation: ValidationOptions,
    pub timings: bool,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Invocation {
    Price(RunSpec),
    ExportPreset { preset: Preset, out: Option<PathBuf> },
    ListPresets,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// `--help` / `--version`: not a failure, the text goes to stdout.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Validation(Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Validation(other),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses a full argument vector (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    match cli.command {
        Command::Presets => Ok(Invocation::ListPresets),
        Command::ExportPreset { name, out } => Ok(Invocation::ExportPreset {
            preset: parse_preset(&name)?,
            out,
        }),
        Command::Price(args) => price_spec(args).map(Invocation::Price),
    }
}

fn parse_preset(name: &str) -> Result<Preset, CliError> {
    name.parse::<Preset>().map_err(|e| usage(e.to_string()))
}

fn price_spec(args: PriceArgs) -> Result<RunSpec, CliError> {
    let source = match (&args.portfolio, &args.preset) {
        (Some(path), None) => PortfolioSource::File(path.clone()),
        (None, Some(name)) => PortfolioSource::Preset(parse_preset(name)?),
        _ => return Err(usage("give exactly one of --portfolio or --preset")),
    };

    if args.detach.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(usage("--detach values must be strictly increasing"));
    }
    let attach: Vec<f64> = match args.attach.len() {
        1 => vec![args.attach[0]; args.detach.len()],
        n if n == args.detach.len() => args.attach.clone(),
        n => {
            return Err(usage(format!(
                "--attach has {n} values but --detach has {}",
                args.detach.len()
            )))
        }
    };
    let tranches = attach
        .iter()
        .zip(&args.detach)
        .map(|(&a, &d)| Tranche::new(a, d).map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;

    let method = match (args.method, args.order) {
        (Some(m), _) => m,
        (None, Some(n)) if n > 1 => MethodArg::Hermite,
        (None, _) => MethodArg::Gaussian,
    };

    let analytic = matches!(method, MethodArg::Gaussian | MethodArg::Hermite);
    let mc = method == MethodArg::Mc;
    if !mc && (args.samples.is_some() || args.seed.is_some() || args.antithetic) {
        return Err(usage("--samples, --seed and --antithetic apply only to --method mc"));
    }
    if !analytic && (args.order.is_some() || args.sigma_floor.is_some() || args.allow_high_order) {
        return Err(usage("--order, --sigma-floor and --allow-high-order apply only to gaussian/hermite"));
    }
    if mc && args.nodes.is_some() {
        return Err(usage("--nodes does not apply to --method mc"));
    }
    let order = match method {
        MethodArg::Gaussian => match args.order {
            None | Some(1) => 1,
            Some(n) => return Err(usage(format!("--method gaussian conflicts with --order {n}"))),
        },
        MethodArg::Hermite => args.order.unwrap_or(DEFAULT_HERMITE_ORDER),
        _ => 1,
    };

    let mut pricer = PricerConfig {
        order,
        allow_high_order: args.allow_high_order,
        ..PricerConfig::default()
    };
    if let Some(k) = args.nodes {
        pricer.nodes_per_factor = k;
    }
    if let Some(f) = args.sigma_floor {
        pricer.sigma_floor = f;
    }
    pricer.validate().map_err(|e| usage(e.to_string()))?;

    let mut mc_cfg = McConfig::default();
    if let Some(s) = args.samples {
        if s == 0 {
            return Err(usage("--samples must be positive"));
        }
        mc_cfg.samples = s;
    }
    if let Some(seed) = args.seed {
        mc_cfg.seed = seed;
    }
    mc_cfg.antithetic = args.antithetic;

    Ok(RunSpec {
        source,
        tranches,
        method,
        pricer,
        mc: mc_cfg,
        validation: ValidationOptions {
            allow_partial_notional: args.allow_partial_notional,
        },
        timings: args.timings,
        out: args.out,
    })
}

fn load_portfolio(spec: &RunSpec) -> Result<Portfolio, CliError> {
    match &spec.source {
        PortfolioSource::Preset(p) => Ok(p.portfolio()),
        PortfolioSource::File(path) => Ok(io::read_portfolio_file(path, spec.validation)?),
    }
}

/// Runs the selected engine and returns the result rows.
pub fn evaluate(spec: &RunSpec) -> Result<Vec<ResultRow>, CliError> {
    let portfolio = load_portfolio(spec)?;
    let started = std::time::Instant::now();
    let elapsed_ms = |spec: &RunSpec| spec.timings.then(|| started.elapsed().as_secs_f64() * 1e3);
    let method = spec.method.tag();

    let rows = match spec.method {
        MethodArg::Gaussian | MethodArg::Hermite => {
            let results = pricer::price_tranches(&portfolio, &spec.tranches, &spec.pricer)?;
            let ms = elapsed_ms(spec);
            results
                .iter()
                .map(|r| ResultRow {
                    attach: r.tranche.attach(),
                    detach: r.tranche.detach(),
                    method,
                    order: Some(spec.pricer.order),
                    nodes: Some(spec.pricer.nodes_per_factor),
                    value: r.value,
                    std_error: None,
                    runtime_ms: ms,
                    floored_points: Some(r.diagnostics.floored_points),
                })
                .collect()
        }
        MethodArg::Mc => {
            let results = oracles::mc_price_tranches(&portfolio, &spec.tranches, &spec.mc)?;
            let ms = elapsed_ms(spec);
            spec.tranches
                .iter()
                .zip(results)
                .map(|(t, r)| ResultRow {
                    attach: t.attach(),
                    detach: t.detach(),
                    method,
                    order: None,
                    nodes: None,
                    value: r.estimate,
                    std_error: Some(r.std_error),
                    runtime_ms: ms,
                    floored_points: None,
                })
                .collect()
        }
        MethodArg::Exact => {
            let values =
                oracles::exact_price_tranches(&portfolio, &spec.tranches, spec.pricer.nodes_per_factor)?;
            let ms = elapsed_ms(spec);
            spec.tranches
                .iter()
                .zip(values)
                .map(|(t, v)| ResultRow {
                    attach: t.attach(),
                    detach: t.detach(),
                    method,
                    order: None,
                    nodes: Some(spec.pricer.nodes_per_factor),
                    value: v,
                    std_error: None,
                    runtime_ms: ms,
                    floored_points: None,
                })
                .collect()
        }
    };
    Ok(rows)
}

fn with_output<F>(out: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> crate::error::Result<()>,
{
    let io_err = |path: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_err(path, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|e| io_err(path, e))
        }
        None => Ok(f(stdout)?),
    }
}

/// Executes a parsed invocation, writing tables to `--out` or `stdout`.
pub fn run(inv: &Invocation, stdout: &mut dyn Write) -> Result<(), CliError> {
    match inv {
        Invocation::ListPresets => {
            for p in Preset::ALL {
                writeln!(stdout, "{:<10} {}", p.name(), p.description())
                    .map_err(|e| CliError::Io(e.to_string()))?;
            }
            Ok(())
        }
        Invocation::ExportPreset { preset, out } => {
            let portfolio = preset.portfolio();
            with_output(out.as_deref(), stdout, |w| io::write_portfolio(&portfolio, w))
        }
        Invocation::Price(spec) => {
            let rows = evaluate(spec)?;
            with_output(spec.out.as_deref(), stdout, |w| io::write_results(&rows, w))
        }
    }
}

/// Parses, runs and reports; returns the process exit code.
pub fn main_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = parse_args(argv).and_then(|inv| run(&inv, stdout));
    match outcome {
        Ok(()) => 0,
        Err(CliError::Info(text)) => {
            let _ = write!(stdout, "{text}");
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.to_string().trim_end());
            e.exit_code()
        }
    }
}
