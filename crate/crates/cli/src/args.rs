use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use moment_spaces::Domain;

use crate::config::{
    collect_potential, parse_constraint_list, parse_potential_item, read_config, Command, Partial,
    RunConfig,
};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "moment-spaces",
    version,
    about = "Random moment vectors, their limits and spectral measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Limit measures: limit.json and density.csv
    Limit(Common),
    /// Random moment vectors: samples.csv and metadata.json
    Sample(Common),
    /// Monte Carlo checks of the limit theorems: verify.json
    Verify(Common),
    /// Spectral measure of the Jacobi matrix of a coordinate file: spectral.csv
    Spectral(Common),
    /// Repeat the run recorded in a metadata.json
    Replay {
        metadata: PathBuf,
        /// Output directory, instead of the recorded one
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Configuration file (key = value lines in [sections])
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// real-line-example, double-well or uniform
    #[arg(long)]
    pub preset: Option<String>,
    /// interval01, halfline or realline
    #[arg(long)]
    pub domain: Option<String>,
    /// Moment constraint such as m1=0.3 (repeatable, or comma separated)
    #[arg(long = "constraint")]
    pub constraint: Vec<String>,
    /// Coordinate potential such as v1=(y-1)^2 (repeatable)
    #[arg(long = "potential")]
    pub potential: Vec<String>,
    /// Dimension of the moment space
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thinning: Option<usize>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub target_acceptance: Option<f64>,
    #[arg(long)]
    pub rhat_threshold: Option<f64>,
    /// Number of leading moments written per sample
    #[arg(long)]
    pub output_len: Option<usize>,
    /// Moment count for covariances and checks
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub clt_tolerance: Option<f64>,
    #[arg(long)]
    pub lln_sigmas: Option<f64>,
    /// Canonical coordinates for spectral
    #[arg(long)]
    pub coordinates: Option<PathBuf>,
    /// Jacobi matrix size for spectral
    #[arg(long)]
    pub size: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    fn flags(&self, command: Command) -> Result<Partial, CliError> {
        let constraint = if self.constraint.is_empty() {
            None
        } else {
            let mut all = Vec::new();
            for c in &self.constraint {
                all.extend(parse_constraint_list(c)?);
            }
            all.sort_by_key(|e| e.0);
            Some(all)
        };
        let potential = if self.potential.is_empty() {
            None
        } else {
            let mut items = BTreeMap::new();
            for p in &self.potential {
                let (i, e) = parse_potential_item(p)?;
                items.insert(i, e);
            }
            Some(collect_potential(items)?)
        };
        Ok(Partial {
            command: Some(command),
            preset: self.preset.clone(),
            domain: self
                .domain
                .as_deref()
                .map(str::parse::<Domain>)
                .transpose()?,
            constraint,
            potential,
            n: self.n,
            seed: self.seed,
            samples: self.samples,
            burn_in: self.burn_in,
            thinning: self.thinning,
            chains: self.chains,
            target_acceptance: self.target_acceptance,
            rhat_threshold: self.rhat_threshold,
            output_len: self.output_len,
            l: self.l,
            clt_tolerance: self.clt_tolerance,
            lln_sigmas: self.lln_sigmas,
            coordinates: self.coordinates.clone(),
            size: self.size,
            out: self.out.clone(),
        })
    }

    pub fn resolve(&self, command: Command) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => read_config(p)?,
            None => Partial::default(),
        };
        RunConfig::resolve(file, self.flags(command)?)
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Sub::Replay { metadata, out } => crate::replay(&metadata, out).map(|_| ()),
        Sub::Limit(c) => c.resolve(Command::Limit).and_then(|cfg| crate::run(&cfg)),
        Sub::Sample(c) => c.resolve(Command::Sample).and_then(|cfg| crate::run(&cfg)),
        Sub::Verify(c) => c.resolve(Command::Verify).and_then(|cfg| crate::run(&cfg)),
        Sub::Spectral(c) => c
            .resolve(Command::Spectral)
            .and_then(|cfg| crate::run(&cfg)),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
