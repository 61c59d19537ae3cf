//! Run configuration: defaults, an optional TOML file, then command-line flags.

use std::path::Path;

use clap::Args;
use padic_analysis::calculus::DiffConfig;
use padic_analysis::certify::CertifyOptions;
use padic_analysis::padic::is_prime;
use padic_analysis::{Error, Result};
use serde::Deserialize;

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// The prime p
    #[arg(short = 'p', long = "prime", global = true)]
    pub prime: Option<u32>,
    /// Relative precision N for parsed points and evaluation
    #[arg(short = 'N', long = "precision", global = true)]
    pub precision: Option<i64>,
    /// Enumeration budget (residues per ball, quotients per estimate)
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Seed for sampled quotients
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Required agreement mod p^s for derivative estimates
    #[arg(short = 's', long = "agreement", global = true)]
    pub s: Option<i64>,
    /// First scale of derivative estimates
    #[arg(long, global = true)]
    pub j0: Option<i64>,
    /// Last scale of derivative estimates
    #[arg(long, global = true)]
    pub jmax: Option<i64>,
    /// Points sampled per scale when a scale is not exhaustive
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Emit one JSON document instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Exit with status 1 when a check fails
    #[arg(long, global = true)]
    pub strict: bool,
    /// TOML file with defaults for the flags above
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    prime: Option<u32>,
    precision: Option<i64>,
    budget: Option<u64>,
    seed: Option<u64>,
    s: Option<i64>,
    j0: Option<i64>,
    jmax: Option<i64>,
    samples: Option<usize>,
    json: Option<bool>,
    strict: Option<bool>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RunConfig {
    pub prime: u32,
    pub precision: i64,
    pub budget: u64,
    pub seed: u64,
    pub s: i64,
    pub j0: i64,
    pub jmax: i64,
    pub samples: usize,
    pub json: bool,
    pub strict: bool,
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<RunConfig> {
        let file = match &args.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let d = DiffConfig::default();
        let cfg = RunConfig {
            prime: args.prime.or(file.prime).unwrap_or(5),
            precision: args.precision.or(file.precision).unwrap_or(8),
            budget: args.budget.or(file.budget).unwrap_or(1_000_000),
            seed: args.seed.or(file.seed).unwrap_or(0),
            s: args.s.or(file.s).unwrap_or(d.s),
            j0: args.j0.or(file.j0).unwrap_or(d.j0),
            jmax: args.jmax.or(file.jmax).unwrap_or(d.jmax),
            samples: args.samples.or(file.samples).unwrap_or(d.samples),
            json: args.json || file.json.unwrap_or(false),
            strict: args.strict || file.strict.unwrap_or(false),
        };
        if !is_prime(cfg.prime) {
            return Err(Error::InvalidArgument(format!(
                "{} is not prime",
                cfg.prime
            )));
        }
        if cfg.precision < 1 {
            return Err(Error::InvalidArgument(
                "precision N must be at least 1".into(),
            ));
        }
        if cfg.budget < 1 {
            return Err(Error::InvalidArgument("budget must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn diff(&self) -> DiffConfig {
        DiffConfig {
            j0: self.j0,
            jmax: self.jmax,
            s: self.s,
            budget: self.budget,
            samples: self.samples,
            seed: self.seed,
        }
    }

    pub fn certify(&self) -> CertifyOptions {
        let mut opts = CertifyOptions {
            budget: self.budget,
            ..CertifyOptions::default()
        };
        opts.diff.seed = self.seed;
        opts
    }
}

fn read_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
