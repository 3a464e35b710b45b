//! Command-line front end for the fibdomain library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 domain error.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "fibdomain", version, about = "Fibonacci difference sequence spaces, exactly")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Weight sequence: linear:a,b | geometric:r,c | explicit:v0,v1,... | file:<path>
    #[arg(long, global = true, default_value = "linear:1,1")]
    pub lambda: String,
    /// Exponent p (a rational >= 1, or inf)
    #[arg(long, global = true)]
    pub p: Option<String>,
    /// Window size
    #[arg(short = 'N', long = "window", global = true)]
    pub window: Option<usize>,
    /// Working precision in bits for irrational quantities
    #[arg(long, global = true, default_value_t = 256)]
    pub precision: u32,
    /// Seed for randomized searches and samples
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Emit a JSON report instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the output here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Disable the parallel kernels
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Subcommand)]
pub enum Command {
    /// y = Ex, or x = E^-1 y with --inverse
    Transform {
        /// Input sequence: witness:<id> | unit:<k> | zero | ones | inv-fib-cube | list:... | file:<path>
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        inverse: bool,
    },
    /// Leading window of the inverse of a triangle (E by default)
    Invert {
        /// Matrix: a JSON file, inline JSON, or a kind name such as E
        #[arg(long = "A")]
        a: Option<String>,
    },
    /// Norm of x in the domain space, with a membership sweep
    Norm {
        #[arg(long)]
        x: String,
        /// Also check the inclusion inequalities
        #[arg(long)]
        bounds: bool,
    },
    /// The basis sequence b^(k)
    Basis {
        #[arg(long)]
        k: usize,
    },
    /// Membership of a in the alpha-, beta- or gamma-dual
    Dual {
        #[arg(long)]
        a: String,
        /// l1 | lp:<p> | linf (defaults to the space of --p)
        #[arg(long)]
        space: Option<String>,
        /// alpha | beta | gamma
        #[arg(long, default_value = "beta")]
        kind: String,
    },
    /// Checks the conditions characterizing A in (X, Y)
    Class {
        #[arg(long = "A")]
        a: String,
        /// l1 | lp:<p> | linf (defaults to the space of --p)
        #[arg(long = "X")]
        x: Option<String>,
        /// c0 | c | linf | l1 | lp:<p>
        #[arg(long = "Y", default_value = "linf")]
        y: String,
    },
    /// Operator norm of L_A from the domain of lp into Y
    Opnorm {
        #[arg(long = "A")]
        a: String,
        #[arg(long = "Y", default_value = "linf")]
        y: String,
    },
    /// Hausdorff measure of noncompactness of L_A, with a compactness verdict
    Mnc {
        #[arg(long = "A")]
        a: String,
        #[arg(long = "Y", default_value = "c0")]
        y: String,
        #[arg(long, default_value_t = 16)]
        rmax: usize,
    },
    /// Runs the golden-identity suite
    VerifyPaper {
        /// Run a single check
        #[arg(long)]
        only: Option<String>,
    },
    /// CSV of an mnc (r, s(r)) or norm (N, norm) sweep
    PlotData {
        #[arg(long, value_enum, default_value_t = SweepKind::Mnc)]
        sweep: SweepKind,
        /// A saved JSON report (or bare array of pairs) to read the sweep from
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long = "A")]
        a: Option<String>,
        #[arg(long = "Y", default_value = "c0")]
        y: String,
        #[arg(long, default_value_t = 16)]
        rmax: usize,
        #[arg(long)]
        x: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    Mnc,
    Norm,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = match commands::run(&cli) {
        Ok(report) => {
            let code = if report.passed { 0 } else { 1 };
            (report, code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            return ExitCode::from(e.code);
        }
    };
    let text = if cli.common.json {
        let mut json = report.json;
        if let Some(obj) = json.as_object_mut() {
            obj.insert("schema_version".into(), SCHEMA_VERSION.into());
            obj.insert("command".into(), report.command.into());
        }
        serde_json::to_string_pretty(&json).expect("reports serialize") + "\n"
    } else {
        report.text
    };
    let written = match &cli.common.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
