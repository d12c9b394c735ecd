//! `brown` — characteristic curves, support geometry, log-potential fields,
//! and random-matrix clouds for the Brown measure of `Y_t·P`.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 usage error, 3 numerical
//! failure. `BROWN_THREADS` caps worker parallelism.

mod checks;
mod commands;
mod output;

use brown_core::brown_eval::GridSpec;
use brown_core::Complex64;
use clap::{Parser, Subcommand, ValueEnum};
use commands::Format;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn usage(msg: impl ToString) -> Self {
        CliError::Usage(msg.to_string())
    }
}

impl From<brown_core::Error> for CliError {
    fn from(e: brown_core::Error) -> Self {
        match e {
            brown_core::Error::InvalidParameter(_) | brown_core::Error::InvalidMeasure(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Parse `re,im` into a complex number.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::usage(format!("expected `re,im`, got `{s}`")));
    }
    let re = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|e| CliError::usage(format!("bad real part `{}`: {e}", parts[0])))?;
    let im = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|e| CliError::usage(format!("bad imaginary part `{}`: {e}", parts[1])))?;
    Ok(Complex64::new(re, im))
}

/// Parse `re_lo:re_hi:n,im_lo:im_hi:n` into a grid.
pub fn parse_grid(s: &str) -> Result<GridSpec, CliError> {
    let axes: Vec<&str> = s.split(',').collect();
    if axes.len() != 2 {
        return Err(CliError::usage(format!(
            "expected `re_lo:re_hi:n,im_lo:im_hi:n`, got `{s}`"
        )));
    }
    let mut vals = [0.0f64; 4];
    let mut counts = [0usize; 2];
    for (k, axis) in axes.iter().enumerate() {
        let parts: Vec<&str> = axis.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::usage(format!("bad axis spec `{axis}`")));
        }
        vals[2 * k] = parts[0]
            .trim()
            .parse()
            .map_err(|e| CliError::usage(format!("bad bound `{}`: {e}", parts[0])))?;
        vals[2 * k + 1] = parts[1]
            .trim()
            .parse()
            .map_err(|e| CliError::usage(format!("bad bound `{}`: {e}", parts[1])))?;
        counts[k] = parts[2]
            .trim()
            .parse()
            .map_err(|e| CliError::usage(format!("bad count `{}`: {e}", parts[2])))?;
    }
    GridSpec::new(vals[0], vals[1], counts[0], vals[2], vals[3], counts[1]).map_err(CliError::from)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Parser)]
#[command(
    name = "brown",
    about = "Brown measure toolkit for free unitary Brownian motion times a projection",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the boundary curves (sigma, omega, circle, gamma, 1/gamma).
    Region {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[arg(long)]
        out: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Integrate one characteristic curve and audit its conserved quantities.
    Characteristic {
        /// Starting point as `re,im`.
        #[arg(long)]
        lambda0: String,
        #[arg(long)]
        x0: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 5.0)]
        u_max: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long)]
        out: String,
    },
    /// Evaluate the log-potential and its Laplacian on a grid.
    Field {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        alpha: f64,
        /// Grid as `re_lo:re_hi:n,im_lo:im_hi:n`.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: String,
    },
    /// Simulate eigenvalue clouds of `Y_t·P` and report containment.
    Rmt {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = brown_core::defaults::MARGIN)]
        margin: f64,
        #[arg(long)]
        out: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Run the invariant suites; exits nonzero if any fails.
    Check {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional machine-readable JSON report.
        #[arg(long)]
        out: Option<String>,
    },
    /// Re-run a command from its manifest.
    Replay {
        #[arg(long)]
        manifest: String,
    },
}

fn init_threads() {
    if let Ok(v) = std::env::var("BROWN_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Region {
            t,
            alpha,
            samples,
            out,
            format,
        } => {
            let format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Svg => Format::Svg,
            };
            commands::cmd_region(t, alpha, samples, &out, format)?;
            Ok(0)
        }
        Command::Characteristic {
            lambda0,
            x0,
            alpha,
            u_max,
            step,
            out,
        } => {
            let lam = parse_complex(&lambda0)?;
            commands::cmd_characteristic(lam, x0, alpha, u_max, step, &out)?;
            Ok(0)
        }
        Command::Field { t, alpha, grid, out } => {
            let grid = parse_grid(&grid)?;
            commands::cmd_field(t, alpha, &grid, &out)?;
            Ok(0)
        }
        Command::Rmt {
            n,
            t,
            alpha,
            steps,
            seed,
            reps,
            margin,
            out,
            format,
        } => {
            let format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Svg => Format::Svg,
            };
            commands::cmd_rmt(n, t, alpha, steps, seed, reps, margin, &out, format)?;
            Ok(0)
        }
        Command::Check { level, seed, out } => {
            let level = match level {
                LevelArg::Fast => "fast",
                LevelArg::Full => "full",
            };
            let results = checks::run_checks(level, seed);
            let mut all_ok = true;
            for r in &results {
                println!(
                    "{} {} — {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
                all_ok &= r.passed;
            }
            if let Some(out) = out {
                let report = serde_json::json!({
                    "level": level,
                    "seed": seed,
                    "passed": all_ok,
                    "suites": results,
                });
                output::write_text(
                    std::path::Path::new(&out),
                    &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
                )?;
            }
            Ok(if all_ok { 0 } else { 1 })
        }
        Command::Replay { manifest } => {
            commands::cmd_replay(&manifest)?;
            Ok(0)
        }
    }
}

fn main() {
    init_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            std::process::exit(3);
        }
        Err(CliError::Io(msg)) => {
            eprintln!("io error: {msg}");
            std::process::exit(3);
        }
    }
}
