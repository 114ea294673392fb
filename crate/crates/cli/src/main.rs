use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twisted_tf::report::AnalysisReport;
use twisted_tf::zak::DEFAULT_GUARD;

mod commands;
mod selftest;
mod windows;

/// Twisted time-frequency analysis on L²(ℂ): windows, Zak transforms, frame
/// bounds, Weyl kernels and audits.
#[derive(Parser, Debug)]
#[command(name = "twistf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Samples per unit length N (even, ≥ 4).
    #[arg(long, global = true, default_value_t = 16)]
    pub resolution: usize,
    /// Truncation K: the domain is [−K, K)².
    #[arg(long, global = true, default_value_t = 4)]
    pub truncation: usize,
    /// Zak w-resolution N_w (default max(2K, 8)).
    #[arg(long, global = true)]
    pub wres: Option<usize>,
    /// Lower bound on min |G| for exact duals.
    #[arg(long, global = true, default_value_t = DEFAULT_GUARD)]
    pub guard: f64,
    /// Tolerance of the subcommand's pass/fail check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Input field (TGF1).
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    /// Window generated in memory instead of --in: chi | gaussian | hermite M N |
    /// example31 M | example32 KMAX | perturbed-chi AMP.
    #[arg(long, global = true, num_args = 1..=3, value_name = "KIND [PARAMS]")]
    pub window: Option<Vec<String>>,
    /// Binary output (field, Zak field or kernel, depending on the subcommand).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON report path (stdout when absent).
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Number of refinement levels.
    #[arg(long, global = true)]
    pub refine: Option<usize>,
    /// Allow direct sums beyond the size limit.
    #[arg(long, global = true)]
    pub override_size: bool,
    /// Run the subcommand's built-in examples instead.
    #[arg(long, global = true)]
    pub selftest: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a window and write it as TGF1.
    Synth,
    /// Zak transform, unitarity and quasi-periodicity.
    Zak,
    /// Frame bounds from |Z^t g|², optionally refined.
    Framebounds,
    /// Dual window 1/conj(G), or the Tikhonov dual with --delta.
    Dual {
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Biorthogonality of a window and its dual.
    Biortho {
        /// Dual window (computed from the window when absent).
        #[arg(long)]
        dual: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        range: i64,
    },
    /// Weyl kernel, Plancherel ratio and ladder intertwining.
    Weyl {
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        k1: Option<usize>,
    },
    /// The functional ‖Zf‖² + ‖Z̄f‖² against 2‖f‖².
    Uncertainty {
        /// Use a seeded random expansion with these caps, e.g. 5,5.
        #[arg(long, value_parser = parse_pair_usize)]
        caps: Option<(usize, usize)>,
    },
    /// Divergence scans of the two counterexamples.
    BltScan {
        #[arg(long, value_enum)]
        kind: ScanArg,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long, value_enum, default_value_t = ComparatorArg::Verbatim)]
        comparator: ComparatorArg,
    },
    /// Beurling densities of lattice point sets.
    Density {
        /// Product lattice with these spacings, e.g. 1,1,2,2.
        #[arg(long, value_delimiter = ',')]
        spacings: Option<Vec<f64>>,
        /// The rank-2 twisted embedding with parameters a,b.
        #[arg(long, value_parser = parse_pair_f64)]
        twisted: Option<(f64, f64)>,
        #[arg(long, value_delimiter = ',', default_value = "10,20")]
        radii: Vec<f64>,
        /// Expected density; checked at the largest radius with relative --tol.
        #[arg(long)]
        expect: Option<f64>,
    },
    /// Named audit suites.
    Audit {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Phase winding of the Zak transform along a loop.
    Winding {
        #[arg(long = "loop", value_enum, default_value_t = LoopArg::Obstruction)]
        path: LoopArg,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        /// Expected total phase change; checked with --tol.
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<f64>,
    },
    /// The twisted average G_r and its bounds.
    Smooth {
        #[arg(long, default_value_t = 0.25)]
        radius: f64,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
    },
    /// Oscillation bounds for twisted translations of G.
    Oscillation {
        #[arg(long, value_parser = parse_pair_f64, default_value = "0.125,0", allow_hyphen_values = true)]
        eps: (f64, f64),
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ScanArg {
    #[value(name = "example31_zbar")]
    Example31Zbar,
    #[value(name = "example32_amalgam")]
    Example32Amalgam,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ComparatorArg {
    Verbatim,
    Squared,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Suite {
    Prop11,
    Lemma41,
    Zak,
    Convolution,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum LoopArg {
    Obstruction,
    Circle,
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated values, got {s:?}"));
    }
    let p = |v: &str| v.trim().parse::<T>().map_err(|_| format!("cannot parse {v:?}"));
    Ok((p(parts[0])?, p(parts[1])?))
}

fn parse_pair_usize(s: &str) -> Result<(usize, usize), String> {
    parse_pair(s)
}

fn parse_pair_f64(s: &str) -> Result<(f64, f64), String> {
    parse_pair(s)
}

/// Errors that end the run with exit code 1.
#[derive(Debug)]
pub struct CliError(pub String);

impl From<twisted_tf::Error> for CliError {
    fn from(e: twisted_tf::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn emit(report: &AnalysisReport, common: &Common) -> CliResult<()> {
    match &common.report {
        Some(path) => report.write_json(path)?,
        None => print!("{}", report.to_json_string()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = if cli.common.selftest {
        selftest::run(&cli.command)
    } else {
        commands::run(&cli.command, &cli.common)
    };
    match result {
        Ok(mut report) => {
            report.wall_time = Some(start.elapsed().as_secs_f64());
            if let Err(e) = emit(&report, &cli.common) {
                eprintln!("error: {}", e.0);
                return ExitCode::from(1);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("audit failed: {}", report.failed_flags().join(", "));
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.0);
            ExitCode::from(1)
        }
    }
}
