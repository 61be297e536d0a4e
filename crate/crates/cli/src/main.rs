use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use susy_cli::commands::{cmd_green, cmd_potential, cmd_propagator, RunOptions};
use susy_cli::config::{Format, LoadedConfig, Route};
use susy_cli::plot::{cmd_plot, PlotKind};
use susy_cli::table::ResultTable;
use susy_cli::verify::{run_suite, Report, Suite};
use susy_cli::CliError;

/// Number of worker threads; the only environment variable read.
const THREADS_VAR: &str = "SUSYPROP_THREADS";

#[derive(Parser)]
#[command(name = "susyprop", version, about = "Darboux/Crum partner potentials and their exact propagators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Model configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Overrides `[method] route`
    #[arg(long, global = true, value_enum)]
    method: Option<Route>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Omit wall-clock data (runtime, plot timestamp) from the output
    #[arg(long, global = true)]
    reproducible: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sample V_N on the x window
    Potential,
    /// Sample K(x, y; t) on the (x, y) window
    Propagator,
    /// Sample the Green function G(x, y; E)
    Green,
    /// Run a verification suite
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
    /// SVG plot of a result table, or of a table computed from --config
    Plot {
        #[arg(long, value_enum, default_value = "line")]
        kind: PlotKind,
        /// CSV table written by an earlier run
        #[arg(long)]
        table: Option<PathBuf>,
        /// Fixed y for line plots of K
        #[arg(long)]
        y0: Option<f64>,
    },
}

fn load(path: Option<&Path>) -> Result<LoadedConfig, CliError> {
    let path = path.ok_or_else(|| CliError::Config("--config is required".into()))?;
    LoadedConfig::from_path(path)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_csv(r: &Report, reproducible: bool) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["criterion", "check", "measured", "tolerance", "comparison", "passed", "note"]).map_err(io)?;
    for c in &r.checks {
        let measured = if reproducible && c.is_timing { f64::NAN } else { c.measured };
        w.write_record([
            c.criterion.to_string(),
            c.name.clone(),
            format!("{measured:?}"),
            format!("{:?}", c.tolerance),
            if c.at_least { ">=" } else { "<=" }.to_string(),
            c.passed.to_string(),
            c.note.clone(),
        ])
        .map_err(io)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(format!("# program = susyprop\n# version = {}\n# suite = {}\n# seed = {}\n# passed = {}\n{body}", r.version, r.suite, r.seed, r.passed))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let opts = RunOptions { seed: cli.seed, reproducible: cli.reproducible };
    let out = cli.out.as_deref();
    let table_out = |cfg: &LoadedConfig, t: ResultTable| -> Result<(), CliError> {
        let format = cli.format.or(cfg.config.output.format).unwrap_or(Format::Csv);
        emit(out, &t.render(format)?)
    };
    match cli.command {
        Command::Potential => {
            let cfg = load(cli.config.as_deref())?;
            let t = cmd_potential(&cfg, opts)?;
            table_out(&cfg, t)
        }
        Command::Propagator => {
            let cfg = load(cli.config.as_deref())?;
            let t = cmd_propagator(&cfg, cli.method.unwrap_or(cfg.config.method.route), opts)?;
            table_out(&cfg, t)
        }
        Command::Green => {
            let cfg = load(cli.config.as_deref())?;
            let t = cmd_green(&cfg, cli.method.unwrap_or(cfg.config.method.route), opts)?;
            table_out(&cfg, t)
        }
        Command::Verify { suite } => {
            let report = run_suite(suite, cli.seed);
            for c in &report.checks {
                eprintln!("{}", c.line());
            }
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => report.to_json(cli.reproducible),
                Format::Csv => report_csv(&report, cli.reproducible)?,
            };
            emit(out, &text)?;
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::Convergence(format!("{failed} of {} checks failed", report.checks.len())));
            }
            Ok(())
        }
        Command::Plot { kind, table, y0 } => {
            let t = match (table, cli.config.as_deref()) {
                (Some(p), _) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                    ResultTable::from_csv(&text)?
                }
                (None, Some(c)) => {
                    let cfg = LoadedConfig::from_path(c)?;
                    let route = cli.method.unwrap_or(cfg.config.method.route);
                    match (kind, y0) {
                        (PlotKind::Line, None) => cmd_potential(&cfg, opts)?,
                        _ => cmd_propagator(&cfg, route, opts)?,
                    }
                }
                (None, None) => return Err(CliError::Config("plot needs --table or --config".into())),
            };
            let stamp = if cli.reproducible {
                None
            } else {
                Some(SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0))
            };
            let plot = cmd_plot(&t, kind, y0, stamp)?;
            emit(out, &plot.svg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(n) = std::env::var(THREADS_VAR) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("susyprop: {THREADS_VAR} must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("susyprop: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
