//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or configuration
//! error, 3 drives not resonant, 4 eigensolver did not converge.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::closed_form::{self, EPS_DEGENERATE};
use crate::error::Error;
use crate::evolution::{time_series, Kernel};
use crate::model::{coupling_matrix, CouplingVector};
use crate::spectral::tridiag_eigen;
use crate::verify;

pub use config::{OutputFormat, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_RESONANT: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "rabi-ladder",
    version,
    about = "Rabi oscillations of resonantly driven n-level ladders (hbar = 1)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file and write populations over time.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Override the kernel from the config: auto, closed or spectral.
        #[arg(long)]
        kernel: Option<Kernel>,
        #[arg(long)]
        normalize_initial: bool,
        /// Output file; overrides `output.path`. Without either, data goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the spectrum of the coupling matrix for the given couplings.
    Eigs {
        #[arg(required = true, num_args = 1.., allow_negative_numbers = true)]
        couplings: Vec<f64>,
    },
    /// Run the seeded invariant battery.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotResonant(_) => EXIT_NOT_RESONANT,
        Error::ConvergenceFailure { .. } => EXIT_CONVERGENCE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match cli.command {
        Command::Simulate {
            config,
            kernel,
            normalize_initial,
            out,
        } => simulate(&config, kernel, normalize_initial, out, stdout, stderr),
        Command::Eigs { couplings } => eigs(&couplings, stdout, stderr),
        Command::Verify { seed, draws } => run_verify(seed, draws, stdout, stderr),
    }
}

fn simulate(
    config: &std::path::Path,
    kernel: Option<Kernel>,
    normalize_initial: bool,
    out: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let mut cfg = match ScenarioConfig::load(config) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", config.display());
            return EXIT_USAGE;
        }
    };
    if let Some(k) = kernel {
        cfg.kernel = k;
    }
    cfg.normalize_initial |= normalize_initial;
    if out.is_some() {
        cfg.output.path = out;
    }

    let result = cfg.model().and_then(|model| {
        for w in model.warnings() {
            let _ = writeln!(stderr, "warning: {w}");
        }
        time_series(
            &model,
            &cfg.grid(),
            cfg.initial_level,
            &cfg.propagator_options(),
            true,
        )
    });
    let mut series = match result {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let Error::NotResonant(report) = &e {
                let _ = write!(stderr, "{}", report.table());
            }
            return exit_code(&e);
        }
    };
    let defect = series.max_unitarity_defect().unwrap_or(0.0);
    if !cfg.output.include_propagator {
        series.propagators = None;
    }

    let summary = format!(
        "n={} kernel={} rows={} max_unitarity_defect={:.3e}\n",
        cfg.n,
        series.kernel,
        series.times.len(),
        defect
    );
    let written = match &cfg.output.path {
        Some(path) => File::create(path)
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                write_series(&mut w, &series, &cfg)?;
                w.flush()
            })
            .map(|_| stdout.write_all(summary.as_bytes())),
        None => write_series(stdout, &series, &cfg).map(|_| stderr.write_all(summary.as_bytes())),
    };
    match written {
        Ok(_) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot write output: {e}");
            EXIT_USAGE
        }
    }
}

fn write_series(
    out: &mut dyn Write,
    series: &crate::evolution::TimeSeries,
    cfg: &ScenarioConfig,
) -> std::io::Result<()> {
    match cfg.output.format {
        OutputFormat::Csv => output::write_csv(out, series, cfg.n),
        OutputFormat::Json => output::write_json(out, series, cfg.n),
    }
}

/// Closed-form spectrum details for the `eigs` table.
struct ClosedSummary {
    eigenvalues: Vec<f64>,
    a: Option<f64>,
    b: Option<f64>,
    x: Option<f64>,
    y: Option<f64>,
}

fn closed_summary(g: &CouplingVector) -> Option<Result<ClosedSummary, Error>> {
    let s = g.as_slice();
    Some(match s.len() {
        1 => Ok(ClosedSummary {
            eigenvalues: vec![s[0], -s[0]],
            a: None,
            b: None,
            x: None,
            y: None,
        }),
        2 => {
            let om = s[0].hypot(s[1]);
            Ok(ClosedSummary {
                eigenvalues: vec![om, 0.0, -om],
                a: None,
                b: None,
                x: None,
                y: None,
            })
        }
        3 => closed_form::spectrum4(g).map(|q| ClosedSummary {
            eigenvalues: q.eigenvalues().to_vec(),
            a: Some(q.a),
            b: Some(q.b),
            x: Some(q.x),
            y: Some(q.y),
        }),
        4 => closed_form::spectrum5(g).map(|q| ClosedSummary {
            eigenvalues: q.eigenvalues().to_vec(),
            a: Some(q.a),
            b: Some(q.b),
            x: Some(q.x),
            y: Some(q.y),
        }),
        _ => return None,
    })
}

/// Rounds values that print as zero to a positive zero.
fn tidy(x: f64) -> f64 {
    if x.abs() < 5e-11 {
        0.0
    } else {
        x
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.10}")).unwrap_or_else(|| "-".into())
}

fn eigs(couplings: &[f64], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let g = match CouplingVector::new(couplings.to_vec()) {
        Ok(g) => g,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let spectral = match tridiag_eigen(&coupling_matrix(&g)) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };

    let mut s = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(s, "n = {}, g = {:?}", g.levels(), g.as_slice());
    match closed_summary(&g) {
        Some(Ok(c)) => {
            let _ = writeln!(
                s,
                "A = {}  B = {}  X = {}  Y = {}",
                opt(c.a),
                opt(c.b),
                opt(c.x),
                opt(c.y)
            );
            let _ = writeln!(s, "{:>4}  {:>16}  {:>16}", "j", "closed", "spectral");
            let mut dev: f64 = 0.0;
            for (j, (cl, sp)) in c.eigenvalues.iter().zip(&spectral.eigenvalues).enumerate() {
                dev = dev.max((cl - sp).abs());
                let _ = writeln!(
                    s,
                    "{:>4}  {:>16.10}  {:>16.10}",
                    j + 1,
                    tidy(*cl),
                    tidy(*sp)
                );
            }
            let _ = writeln!(s, "max |closed - spectral| = {dev:.3e}");
        }
        Some(Err(e @ (Error::DegenerateSpectrum(_) | Error::AllZeroCouplings))) => {
            let _ = writeln!(
                s,
                "DEGENERATE: {e} (closed form threshold {EPS_DEGENERATE:e}); spectral only"
            );
            spectral_only(&mut s, &spectral.eigenvalues);
        }
        Some(Err(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
        None => {
            let _ = writeln!(s, "no closed form for n = {}; spectral only", g.levels());
            spectral_only(&mut s, &spectral.eigenvalues);
        }
    }
    let _ = stdout.write_all(s.as_bytes());
    EXIT_OK
}

fn spectral_only(s: &mut String, eigenvalues: &[f64]) {
    use std::fmt::Write as _;
    let _ = writeln!(s, "{:>4}  {:>16}", "j", "spectral");
    for (j, l) in eigenvalues.iter().enumerate() {
        let _ = writeln!(s, "{:>4}  {:>16.10}", j + 1, tidy(*l));
    }
}

fn run_verify(seed: u64, draws: usize, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match verify::run(seed, draws) {
        Ok(report) => {
            let _ = stdout.write_all(report.render().as_bytes());
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}
