//! `caustic`: usual and improved semiclassical density of the quartic double
//! well, caustic curves and classical branches, as CSV or JSON tables.

mod commands;
mod range;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Failure, Method, Sweep};
use range::Values;
use table::Table;

const RANGE_HELP: &str = "value, comma list, or start:stop:step (stop excluded)";

#[derive(Parser)]
#[command(name = "caustic", version, about = "Semiclassical thermal density of the quartic double well")]
#[command(after_help = "Ranges are half-open: 0:0.6:0.005 covers 0, 0.005, ..., 0.595.\n\
Exit codes: 0 ok, 1 validation failure, 2 configuration error, 3 numerical failure.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "CAUSTIC_THREADS")]
    threads: Option<usize>,
    /// Output file; stdout when absent or `-`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Absolute tolerance for turning-point root solves.
    #[arg(long, global = true)]
    tol_root: Option<f64>,
    /// Relative tolerance for action and fluctuation-factor quadratures.
    #[arg(long, global = true)]
    tol_quad: Option<f64>,
    /// Also write `<out>.gp`, a gnuplot script plotting the CSV.
    #[arg(long, global = true)]
    gnuplot: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Density at each (q0, theta).
    Rho {
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.3)]
        g: f64,
        #[arg(long, allow_hyphen_values = true, help = RANGE_HELP)]
        theta: Values,
        #[arg(long, allow_hyphen_values = true, help = RANGE_HELP, default_value = "0")]
        q0: Values,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Caustic curves (both arms) and their cusps.
    Caustic {
        #[arg(long, allow_hyphen_values = true, help = RANGE_HELP)]
        theta: Values,
        /// Only the lower caustic, q0 > 0.
        #[arg(long)]
        single: bool,
    },
    /// Classical paths: q0(q_t), -i q0(i xi), or all solutions at each q0.
    Branches {
        #[arg(long, allow_hyphen_values = true, help = RANGE_HELP)]
        theta: Values,
        #[arg(long, allow_hyphen_values = true, help = RANGE_HELP, group = "sweep")]
        q0: Option<Values>,
        #[arg(long, allow_hyphen_values = true, help = RANGE_HELP, group = "sweep")]
        qt: Option<Values>,
        #[arg(long, allow_hyphen_values = true, help = RANGE_HELP, group = "sweep")]
        xi: Option<Values>,
    },
    /// Acceptance checks; JSON report, exit 1 on any failure.
    Validate {
        /// Criterion id or number; repeatable.
        #[arg(long)]
        only: Vec<String>,
        /// Coupling for the oracle comparison.
        #[arg(long, allow_hyphen_values = true)]
        g: Option<f64>,
    },
}

fn open_out(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(Box::new(BufWriter::new(File::create(p)?))),
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn gnuplot_script(csv: &Path, table: &Table) -> String {
    let col = |name: &str| table.columns.iter().position(|c| *c == name);
    let varies = |j: usize| table.rows.windows(2).any(|w| w[0][j] != w[1][j]);
    let x = ["q0", "q_t", "xi", "theta"]
        .iter()
        .filter_map(|c| col(c))
        .find(|&j| varies(j))
        .unwrap_or(0);
    let ys: Vec<usize> = (0..table.columns.len())
        .filter(|&j| j != x)
        .filter(|&j| {
            let c = table.columns[j];
            c.starts_with("rho") || ["q0", "minus_i_q0", "q_t_re"].contains(&c)
        })
        .collect();
    let plots: Vec<String> = ys
        .iter()
        .map(|&y| format!("'{}' using {}:{} with lines title '{}'", csv.display(), x + 1, y + 1, table.columns[y]))
        .collect();
    format!(
        "set datafile separator ','\nset xlabel '{}'\nplot {}\n",
        table.columns[x],
        plots.join(", \\\n     ")
    )
}

fn emit(table: &Table, common: &Common) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Config(format!("cannot write output: {e}"));
    let mut w = open_out(&common.out).map_err(io_err)?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => table.write_csv(&mut w).map_err(|e| Failure::Config(format!("cannot write output: {e}")))?,
        Format::Json => {
            serde_json::to_writer(&mut w, &table.to_json()).map_err(|e| Failure::Config(e.to_string()))?;
            w.write_all(b"\n").map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)?;
    if common.gnuplot {
        let Some(out) = common.out.as_ref().filter(|p| p.as_os_str() != "-") else {
            return Err(Failure::Config("--gnuplot needs --out <file>".into()));
        };
        if common.format == Some(Format::Json) {
            return Err(Failure::Config("--gnuplot needs CSV output".into()));
        }
        let mut gp = out.clone().into_os_string();
        gp.push(".gp");
        std::fs::write(&gp, gnuplot_script(out, table)).map_err(io_err)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let common = &cli.common;
    for (name, tol) in [("--tol-root", common.tol_root), ("--tol-quad", common.tol_quad)] {
        if let Some(t) = tol {
            if !(t > 0.0 && t < 1e-3) {
                return Err(Failure::Config(format!("{name} must lie in (0, 1e-3), got {t}")));
            }
        }
    }
    caustic_core::numeric::set_tolerances(common.tol_root, common.tol_quad);
    if common.threads == Some(0) {
        return Err(Failure::Config("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Config(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Rho { g, theta, q0, method } => {
            emit(&commands::rho(*g, &theta.0, &q0.0, *method)?, common)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Caustic { theta, single } => {
            emit(&commands::caustic(&theta.0, *single)?, common)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Branches { theta, q0, qt, xi } => {
            let sweep = match (q0, qt, xi) {
                (Some(v), _, _) => Sweep::EndPoint(&v.0),
                (_, Some(v), _) => Sweep::TurningPoint(&v.0),
                (_, _, Some(v)) => Sweep::Imaginary(&v.0),
                _ => return Err(Failure::Config("branches needs one of --q0, --qt, --xi".into())),
            };
            emit(&commands::branches(&theta.0, sweep)?, common)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { only, g } => {
            let reports = commands::validate(only, *g)?;
            for r in &reports {
                eprintln!("{}", r.summary());
            }
            let passed = reports.iter().all(|r| r.passed);
            let io_err = |e: io::Error| Failure::Config(format!("cannot write output: {e}"));
            let mut w = open_out(&common.out).map_err(io_err)?;
            let report = serde_json::json!({ "passed": passed, "criteria": reports });
            serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Failure::Config(e.to_string()))?;
            w.write_all(b"\n").and_then(|_| w.flush()).map_err(io_err)?;
            Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical { at, err }) => {
            eprintln!("error: numerical failure at {at}: {err}");
            ExitCode::from(3)
        }
    }
}
