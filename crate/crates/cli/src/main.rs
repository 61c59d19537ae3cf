//! `padic`: command-line front end for the p-adic analysis toolkit.
//!
//! Exit status: 0 when everything passes, 1 when a check fails under
//! `--strict`, 2 on usage or parse errors, 3 on domain or precision errors.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use padic_analysis::Error;

use config::{GlobalArgs, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "padic",
    version,
    about = "Exact finite-precision p-adic analysis"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct FnArg {
    /// Function: an expression such as "x^2 + 1", or @file.json
    #[arg(short = 'f', long = "function")]
    function: String,
}

#[derive(clap::Args, Debug)]
struct BallArg {
    /// Ball as center:radius, e.g. 1:1 for 1 + pZ_p
    #[arg(long, default_value = "0:0")]
    ball: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a function at a point
    Eval {
        #[command(flatten)]
        f: FnArg,
        /// Point: integer, rational, or canonical p-adic text
        #[arg(long)]
        at: String,
    },
    /// Estimate the strict derivative, or a directional one with -n and --lambda
    Diff {
        #[command(flatten)]
        f: FnArg,
        #[arg(long)]
        at: String,
        /// Power n for a directional derivative
        #[arg(short = 'n')]
        n: Option<u32>,
        /// Index of the coset direction in the table for n
        #[arg(long, requires = "n")]
        lambda: Option<usize>,
    },
    /// Classify a point as differentiable, in S_n or in T_n
    ClassifyPoint {
        #[command(flatten)]
        f: FnArg,
        #[arg(long)]
        at: String,
        #[arg(short = 'n', default_value_t = 2)]
        n: u32,
    },
    /// Print the coset representatives of the n-th powers
    Cosets {
        #[arg(short = 'n', default_value_t = 2)]
        n: u32,
    },
    /// Solve f(z) = c near a point by contraction
    Solve {
        #[command(flatten)]
        f: FnArg,
        /// Starting point a
        #[arg(long)]
        at: String,
        /// Target value c
        #[arg(long)]
        target: String,
        /// Stop once v(f(z) - c) reaches this exponent
        #[arg(long, default_value_t = 20)]
        tol: i64,
        #[arg(long, default_value_t = 40)]
        max_iter: usize,
    },
    /// Certify the Jacobian property on a ball
    CertifyJacobian {
        #[command(flatten)]
        f: FnArg,
        #[command(flatten)]
        ball: BallArg,
        /// Enumeration precision: residues mod p^k
        #[arg(short = 'k')]
        k: i64,
    },
    /// Certify local strict monotonicity on a ball
    CertifyMonotone {
        #[command(flatten)]
        f: FnArg,
        #[command(flatten)]
        ball: BallArg,
        #[arg(short = 'k')]
        k: i64,
        /// Check the non-strict form instead
        #[arg(long)]
        weak: bool,
    },
    /// Split a ball into constant (U), certified (V) and exceptional (I) pieces
    Partition {
        #[command(flatten)]
        f: FnArg,
        #[command(flatten)]
        ball: BallArg,
        /// Scale: pieces have radius below k
        #[arg(short = 'k')]
        k: i64,
        #[arg(short = 'n', default_value_t = 2)]
        n: u32,
    },
    /// Integrate |Df| over a ball
    Integrate {
        #[command(flatten)]
        f: FnArg,
        #[command(flatten)]
        ball: BallArg,
        #[arg(short = 'k')]
        k: i64,
    },
    /// Compare the measure of the image with the integral of |Df|
    VerifyCov {
        #[command(flatten)]
        f: FnArg,
        #[command(flatten)]
        ball: BallArg,
        #[arg(long)]
        k_in: i64,
        #[arg(long)]
        k_out: i64,
    },
    /// Run a packaged demonstration
    Demo {
        #[arg(value_parser = ["pathological"])]
        name: String,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InvalidArgument(_) | Error::PrimeMismatch(..) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    match commands::run(&cli.command, &cfg) {
        Ok(out) => {
            if cfg.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("reports serialize")
                );
            } else {
                print!("{}", out.text);
            }
            if cfg.strict && !out.pass {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
