//! Run configuration: an INI-like file, named presets and flag overrides.
//!
//! ```text
//! [run]
//! domain = realline
//! n = 200
//! seed = 7
//!
//! [constraint]
//! m1 = 0
//!
//! [potential]
//! v1 = (y-1)^2
//! v2 = 8*y^2
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use moment_spaces::{Constraint, Domain, Potential, PotentialSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Limit,
    Sample,
    Verify,
    Spectral,
}

impl std::str::FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "limit" => Ok(Command::Limit),
            "sample" => Ok(Command::Sample),
            "verify" => Ok(Command::Verify),
            "spectral" => Ok(Command::Spectral),
            other => Err(CliError::Config(format!("unknown command `{other}`"))),
        }
    }
}

/// Fully resolved configuration. Written verbatim into every
/// `metadata.json`, and enough on its own to repeat the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub preset: Option<String>,
    pub domain: Domain,
    /// `(index, value)` pairs with increasing indices.
    pub constraint: Vec<(usize, f64)>,
    /// Expressions for `V_1, V_2, ...`; `None` selects the uniform ensemble.
    pub potential: Option<Vec<String>>,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub chains: usize,
    pub target_acceptance: f64,
    pub rhat_threshold: f64,
    pub output_len: Option<usize>,
    /// Moment count for covariances (limit) and for the checks of verify.
    pub l: Option<usize>,
    pub clt_tolerance: f64,
    pub lln_sigmas: f64,
    pub coordinates: Option<PathBuf>,
    pub size: Option<usize>,
    pub out: PathBuf,
}

/// Every setting optional, as read from one source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Partial {
    pub command: Option<Command>,
    pub preset: Option<String>,
    pub domain: Option<Domain>,
    pub constraint: Option<Vec<(usize, f64)>>,
    pub potential: Option<Vec<String>>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub burn_in: Option<usize>,
    pub thinning: Option<usize>,
    pub chains: Option<usize>,
    pub target_acceptance: Option<f64>,
    pub rhat_threshold: Option<f64>,
    pub output_len: Option<usize>,
    pub l: Option<usize>,
    pub clt_tolerance: Option<f64>,
    pub lln_sigmas: Option<f64>,
    pub coordinates: Option<PathBuf>,
    pub size: Option<usize>,
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl Partial {
    /// Values set in `top` win.
    pub fn overlay(mut self, top: Partial) -> Partial {
        overlay!(
            self,
            top,
            command,
            preset,
            domain,
            constraint,
            potential,
            n,
            seed,
            samples,
            burn_in,
            thinning,
            chains,
            target_acceptance,
            rhat_threshold,
            output_len,
            l,
            clt_tolerance,
            lln_sigmas,
            coordinates,
            size,
            out
        );
        self
    }
}

pub const PRESETS: [&str; 3] = ["real-line-example", "double-well", "uniform"];

pub fn preset(name: &str) -> Result<Partial, CliError> {
    let exprs = |v: &[&str]| Some(v.iter().map(|s| s.to_string()).collect());
    match name {
        "real-line-example" => Ok(Partial {
            domain: Some(Domain::RealLine),
            constraint: Some(vec![(1, 0.0)]),
            potential: exprs(&["(y-1)^2", "8*y^2"]),
            ..Partial::default()
        }),
        "double-well" => Ok(Partial {
            domain: Some(Domain::RealLine),
            constraint: Some(vec![(2, 1.0)]),
            potential: exprs(&["(y^2-1)^2", "y^2", "y^2", "y^2"]),
            ..Partial::default()
        }),
        "uniform" => Ok(Partial {
            domain: Some(Domain::Interval01),
            potential: None,
            ..Partial::default()
        }),
        other => Err(CliError::Config(format!(
            "unknown preset `{other}` (known: {})",
            PRESETS.join(", ")
        ))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{v}`")))
}

/// `m3` -> 3.
pub fn moment_index(key: &str) -> Result<usize, CliError> {
    key.strip_prefix(['m', 'M'])
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|i| *i > 0)
        .ok_or_else(|| {
            CliError::Config(format!(
                "constraint key `{key}` is not of the form m<index>"
            ))
        })
}

/// `v2` -> 2.
fn potential_index(key: &str) -> Result<usize, CliError> {
    key.strip_prefix(['v', 'V'])
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|i| *i > 0)
        .ok_or_else(|| {
            CliError::Config(format!("potential key `{key}` is not of the form v<index>"))
        })
}

/// `m1=0.3,m2=0.2` or a single `m1=0.3`.
pub fn parse_constraint_list(src: &str) -> Result<Vec<(usize, f64)>, CliError> {
    let mut out = Vec::new();
    for item in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected m<i>=<value>, got `{item}`")))?;
        out.push((moment_index(k.trim())?, parse_num::<f64>(k, v.trim())?));
    }
    Ok(out)
}

/// `v1=(y-1)^2`.
pub fn parse_potential_item(src: &str) -> Result<(usize, String), CliError> {
    let (k, v) = src
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected v<i>=<expression>, got `{src}`")))?;
    Ok((potential_index(k.trim())?, v.trim().to_string()))
}

pub fn collect_potential(items: BTreeMap<usize, String>) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (expect, (i, e)) in (1..).zip(items) {
        if i != expect {
            return Err(CliError::Config(format!("potential v{expect} is missing")));
        }
        out.push(e);
    }
    Ok(out)
}

fn unquote(v: &str) -> &str {
    let v = v.trim();
    if v.len() >= 2
        && ((v.starts_with('"') && v.ends_with('"')) || (v.starts_with('\'') && v.ends_with('\'')))
    {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

/// Parse configuration text. Unknown sections and keys are errors.
pub fn parse_config(text: &str) -> Result<Partial, CliError> {
    let mut p = Partial::default();
    let mut section = String::from("run");
    let mut constraint: Option<Vec<(usize, f64)>> = None;
    let mut potential: BTreeMap<usize, String> = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let at = |msg: String| CliError::Config(format!("line {}: {msg}", no + 1));
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| at("unterminated section header".into()))?
                .trim()
                .to_ascii_lowercase();
            match name.as_str() {
                "run" | "constraint" | "potential" | "sampler" | "verify" | "limit"
                | "spectral" | "output" => {
                    section = name;
                }
                other => return Err(at(format!("unknown section [{other}]"))),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at("expected key = value".into()))?;
        let key = key.trim().to_ascii_lowercase();
        let value = unquote(value);
        let wrap = |e: CliError| at(e.to_string());
        match (section.as_str(), key.as_str()) {
            ("run", "command") => p.command = Some(value.parse().map_err(wrap)?),
            ("run", "preset") | ("potential", "preset") => p.preset = Some(value.to_string()),
            ("run", "domain") => {
                p.domain = Some(
                    value
                        .parse()
                        .map_err(|e: moment_spaces::Error| at(e.to_string()))?,
                )
            }
            ("run", "n") => p.n = Some(parse_num(&key, value).map_err(wrap)?),
            ("run", "seed") => p.seed = Some(parse_num(&key, value).map_err(wrap)?),
            ("constraint", k) => {
                let i = moment_index(k).map_err(wrap)?;
                let v: f64 = parse_num(k, value).map_err(wrap)?;
                constraint.get_or_insert_with(Vec::new).push((i, v));
            }
            ("potential", k) => {
                let i = potential_index(k).map_err(wrap)?;
                if potential.insert(i, value.to_string()).is_some() {
                    return Err(at(format!("v{i} given twice")));
                }
            }
            ("sampler", "samples") => p.samples = Some(parse_num(&key, value).map_err(wrap)?),
            ("sampler", "burn_in") => p.burn_in = Some(parse_num(&key, value).map_err(wrap)?),
            ("sampler", "thinning") => p.thinning = Some(parse_num(&key, value).map_err(wrap)?),
            ("sampler", "chains") => p.chains = Some(parse_num(&key, value).map_err(wrap)?),
            ("sampler", "target_acceptance") => {
                p.target_acceptance = Some(parse_num(&key, value).map_err(wrap)?)
            }
            ("sampler", "rhat_threshold") => {
                p.rhat_threshold = Some(parse_num(&key, value).map_err(wrap)?)
            }
            ("sampler", "output_len") => p.output_len = Some(parse_num(&key, value).map_err(wrap)?),
            ("verify", "l") | ("limit", "l") => p.l = Some(parse_num(&key, value).map_err(wrap)?),
            ("verify", "clt_tolerance") => {
                p.clt_tolerance = Some(parse_num(&key, value).map_err(wrap)?)
            }
            ("verify", "lln_sigmas") => p.lln_sigmas = Some(parse_num(&key, value).map_err(wrap)?),
            ("spectral", "coordinates") => p.coordinates = Some(PathBuf::from(value)),
            ("spectral", "size") => p.size = Some(parse_num(&key, value).map_err(wrap)?),
            ("output", "dir") => p.out = Some(PathBuf::from(value)),
            (s, k) => return Err(at(format!("unknown key `{k}` in [{s}]"))),
        }
    }
    if let Some(mut c) = constraint {
        c.sort_by_key(|e| e.0);
        p.constraint = Some(c);
    }
    if !potential.is_empty() {
        p.potential = Some(collect_potential(potential)?);
    }
    Ok(p)
}

pub fn read_config(path: &Path) -> Result<Partial, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

impl RunConfig {
    /// Merge preset, file and flags (in increasing priority) and validate.
    pub fn resolve(file: Partial, flags: Partial) -> Result<Self, CliError> {
        let name = flags.preset.clone().or_else(|| file.preset.clone());
        let base = match &name {
            Some(n) => preset(n)?,
            None => Partial::default(),
        };
        let p = base.overlay(file).overlay(flags);
        let cfg = RunConfig {
            command: p
                .command
                .ok_or_else(|| CliError::Config("no command given".into()))?,
            preset: name,
            domain: p.domain.unwrap_or(Domain::Interval01),
            constraint: p.constraint.unwrap_or_default(),
            potential: p.potential,
            n: p.n.unwrap_or(100),
            seed: p.seed.unwrap_or(0),
            samples: p.samples.unwrap_or(10_000),
            burn_in: p.burn_in.unwrap_or(2000),
            thinning: p.thinning.unwrap_or(5),
            chains: p.chains.unwrap_or(4),
            target_acceptance: p.target_acceptance.unwrap_or(0.234),
            rhat_threshold: p.rhat_threshold.unwrap_or(1.05),
            output_len: p.output_len,
            l: p.l,
            clt_tolerance: p.clt_tolerance.unwrap_or(0.1),
            lln_sigmas: p.lln_sigmas.unwrap_or(4.0),
            coordinates: p.coordinates,
            size: p.size,
            out: p.out.unwrap_or_else(|| PathBuf::from(".")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.into()));
        self.constraint()?;
        if self.n == 0 {
            return bad("n must be positive");
        }
        if self.constraint.last().is_some_and(|c| c.0 > self.n) {
            return bad("a constrained index exceeds n");
        }
        if self.samples == 0 || self.chains == 0 || self.thinning == 0 {
            return bad("samples, chains and thinning must be positive");
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return bad("target_acceptance must lie in (0, 1)");
        }
        if self.potential.is_none()
            && self.domain != Domain::Interval01
            && self.command != Command::Spectral
        {
            return bad(
                "the uniform ensemble needs domain interval01; give a potential for other domains",
            );
        }
        self.potential_spec()?;
        if self.command == Command::Spectral && self.coordinates.is_none() {
            return bad("spectral needs a coordinate file");
        }
        Ok(())
    }

    pub fn constraint(&self) -> Result<Constraint, CliError> {
        Ok(Constraint::new(self.constraint.clone())?)
    }

    pub fn potential_spec(&self) -> Result<Option<PotentialSpec>, CliError> {
        match &self.potential {
            None => Ok(None),
            Some(exprs) => {
                let terms = exprs
                    .iter()
                    .map(|e| Potential::parse(e))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Some(PotentialSpec::new(terms)?))
            }
        }
    }
}
