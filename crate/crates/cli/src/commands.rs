use std::fs;
use std::path::{Path, PathBuf};

use moment_spaces::limits::{exact_log_volume_ratio, regime};
use moment_spaces::{
    canonical_to_recurrence, clt_covariance, jacobi_matrix, kl_arcsine, sample_general,
    sample_uniform, solve_general_limits, solve_uniform_limit, spectral_measure, volume_ratio,
    Atom, Coordinates, LimitResult, Model, ReferenceDensity, SampleRun, SamplerConfig,
    VolumeRegime,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::{Command, RunConfig};
use crate::CliError;

pub const SCHEMA: &str = "moment-spaces/1";
pub const DENSITY_GRID: usize = 512;

/// Shortest decimal that reads back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(SCHEMA) => Ok(serde_json::from_value(value)?),
        other => Err(CliError::Config(format!(
            "{}: expected schema {SCHEMA}, found {other:?}",
            path.display()
        ))),
    }
}

fn write_csv(
    path: &Path,
    header: &[String],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn model(cfg: &RunConfig) -> Result<Model, CliError> {
    Ok(match cfg.potential_spec()? {
        Some(p) => Model::Gibbs(p),
        None => Model::Uniform,
    })
}

fn solve(cfg: &RunConfig) -> Result<LimitResult, CliError> {
    let c = cfg.constraint()?;
    Ok(match model(cfg)? {
        Model::Uniform => solve_uniform_limit(&c)?,
        Model::Gibbs(p) => solve_general_limits(&p, &c, cfg.domain)?,
    })
}

fn sampler_config(cfg: &RunConfig, output_len: Option<usize>) -> Result<SamplerConfig, CliError> {
    let mut s = SamplerConfig::new(cfg.n, cfg.domain, cfg.constraint()?, cfg.samples, cfg.seed);
    s.burn_in = cfg.burn_in;
    s.thinning = cfg.thinning;
    s.chains = cfg.chains;
    s.target_acceptance = cfg.target_acceptance;
    s.rhat_threshold = cfg.rhat_threshold;
    s.output_len = output_len;
    Ok(s)
}

fn draw(cfg: &RunConfig, output_len: Option<usize>) -> Result<SampleRun, CliError> {
    let s = sampler_config(cfg, output_len)?;
    Ok(match model(cfg)? {
        Model::Uniform => sample_uniform(&s)?,
        Model::Gibbs(p) => sample_general(&s, &p)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizerOut {
    pub coordinates: Vec<f64>,
    pub tail: [f64; 2],
    pub weight: f64,
    pub moments: Vec<f64>,
    pub atoms: Vec<Atom>,
    pub support: Option<(f64, f64)>,
    pub reference: Option<ReferenceDensity>,
    pub prefactor: Option<f64>,
    /// Coefficients of the denominator polynomial, constant term first.
    pub denominator: Option<Vec<f64>>,
    pub covariance: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitFile {
    pub schema: String,
    pub config: RunConfig,
    pub model: String,
    pub minimizers: Vec<MinimizerOut>,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().copied().collect())
        .collect()
}

/// Limit measures: `limit.json` and `density.csv`.
pub fn cmd_limit(cfg: &RunConfig) -> Result<LimitFile, CliError> {
    fs::create_dir_all(&cfg.out)?;
    let lim = solve(cfg)?;
    let m = model(cfg)?;
    let ik = cfg.constraint.last().map_or(0, |c| c.0);
    let mut minimizers = Vec::new();
    for (q, mz) in lim.minimizers.iter().enumerate() {
        let covariance = match cfg.l {
            Some(l) => Some(matrix_rows(&clt_covariance(&m, &lim, q, l)?)),
            None => None,
        };
        let ac = mz.measure.ac.as_ref();
        minimizers.push(MinimizerOut {
            coordinates: mz.coordinates.clone(),
            tail: mz.tail,
            weight: mz.weight,
            moments: lim.moments(q, ik.max(cfg.l.unwrap_or(0)).max(4)),
            atoms: mz.measure.atoms.clone(),
            support: ac.map(|a| a.support),
            reference: ac.map(|a| a.reference),
            prefactor: ac.map(|a| a.prefactor),
            denominator: ac.map(|a| a.denominator.coeffs.clone()),
            covariance,
        });
    }
    let file = LimitFile {
        schema: SCHEMA.into(),
        config: cfg.clone(),
        model: match m {
            Model::Uniform => "uniform".into(),
            Model::Gibbs(_) => "gibbs".into(),
        },
        minimizers,
    };
    write_json(&cfg.out.join("limit.json"), &file)?;

    let mut rows = Vec::new();
    for (q, mz) in lim.minimizers.iter().enumerate() {
        if let Some(ac) = &mz.measure.ac {
            let (a, b) = ac.support;
            for i in 0..DENSITY_GRID {
                let x = a + (b - a) * (i as f64 + 0.5) / DENSITY_GRID as f64;
                rows.push(vec![fmt_f64(x), fmt_f64(ac.density(x)), q.to_string()]);
            }
        }
    }
    write_csv(
        &cfg.out.join("density.csv"),
        &["x".into(), "density".into(), "minimizer".into()],
        rows.into_iter(),
    )?;
    write_metadata(cfg, serde_json::Value::Null)?;
    Ok(file)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub schema: String,
    pub seed: u64,
    pub config: RunConfig,
    #[serde(default)]
    pub results: serde_json::Value,
}

fn write_metadata(cfg: &RunConfig, results: serde_json::Value) -> Result<(), CliError> {
    write_json(
        &cfg.out.join("metadata.json"),
        &Metadata {
            schema: SCHEMA.into(),
            seed: cfg.seed,
            config: cfg.clone(),
            results,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub samples: usize,
    pub acceptance: Vec<f64>,
    pub burn_in_acceptance: Vec<f64>,
    pub step_size: Vec<f64>,
    pub rhat: Vec<f64>,
    pub ks_statistic: Option<f64>,
}

fn summary(run: &SampleRun) -> SampleSummary {
    SampleSummary {
        samples: run.samples.len(),
        acceptance: run.chains.iter().map(|c| c.acceptance).collect(),
        burn_in_acceptance: run.chains.iter().map(|c| c.burn_in_acceptance).collect(),
        step_size: run.chains.iter().map(|c| c.step_size).collect(),
        rhat: run.rhat.clone(),
        ks_statistic: run.ks_statistic,
    }
}

/// Random moment vectors: `samples.csv` and `metadata.json`.
pub fn cmd_sample(cfg: &RunConfig) -> Result<SampleSummary, CliError> {
    fs::create_dir_all(&cfg.out)?;
    let run = draw(cfg, cfg.output_len)?;
    let width = run.samples.first().map_or(0, |m| m.len());
    let header: Vec<String> = (1..=width).map(|i| format!("m_{i}")).collect();
    write_csv(
        &cfg.out.join("samples.csv"),
        &header,
        run.samples
            .iter()
            .map(|m| m.values.iter().map(|v| fmt_f64(*v)).collect()),
    )?;
    let s = summary(&run);
    write_metadata(cfg, serde_json::to_value(&s)?)?;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyFile {
    pub schema: String,
    pub config: RunConfig,
    pub pass: bool,
    pub checks: Vec<Check>,
}

fn sample_moments(run: &SampleRun, l: usize) -> Vec<Vec<f64>> {
    run.samples.iter().map(|m| m.values[..l].to_vec()).collect()
}

fn mean_cov(xs: &[Vec<f64>]) -> (Vec<f64>, DMatrix<f64>) {
    let n = xs.len() as f64;
    let d = xs[0].len();
    let mean: Vec<f64> = (0..d)
        .map(|c| xs.iter().map(|x| x[c]).sum::<f64>() / n)
        .collect();
    let mut cov = DMatrix::zeros(d, d);
    for x in xs {
        for r in 0..d {
            for c in 0..d {
                cov[(r, c)] += (x[r] - mean[r]) * (x[c] - mean[c]);
            }
        }
    }
    (mean, cov / (n - 1.0))
}

/// Law of large numbers, central limit and volume checks: `verify.json`.
/// Returns `Err(CliError::VerifyFailed)` after writing when a check fails.
pub fn cmd_verify(cfg: &RunConfig) -> Result<VerifyFile, CliError> {
    fs::create_dir_all(&cfg.out)?;
    let c = cfg.constraint()?;
    let ik = c.last_index();
    let l = cfg.l.unwrap_or(ik.max(2)).max(ik).min(cfg.n);
    let m = model(cfg)?;
    let lim = solve(cfg)?;
    let run = draw(cfg, Some(l))?;
    let xs = sample_moments(&run, l);
    let (mean, cov) = mean_cov(&xs);
    let nf = cfg.n as f64;
    let count = xs.len() as f64;
    let mut checks = Vec::new();

    // mixture of the limit points, weighted
    let mut target = vec![0.0; l];
    for q in 0..lim.minimizers.len() {
        for (t, v) in target.iter_mut().zip(lim.moments(q, l)) {
            *t += lim.minimizers[q].weight * v;
        }
    }
    let mut worst = 0.0f64;
    let mut worst_at = 0;
    for i in 0..l {
        let se = (cov[(i, i)] / count).sqrt();
        // finite-n bias is O(1/n)
        let tol = cfg.lln_sigmas * se + 1.0 / nf;
        let r = (mean[i] - target[i]).abs() / tol;
        if r > worst {
            worst = r;
            worst_at = i;
        }
    }
    checks.push(Check {
        name: "lln_drift".into(),
        pass: worst <= 1.0,
        value: mean[worst_at],
        reference: target[worst_at],
        tolerance: cfg.lln_sigmas * (cov[(worst_at, worst_at)] / count).sqrt() + 1.0 / nf,
        detail: format!("largest scaled deviation {worst:.3} at m_{}", worst_at + 1),
    });

    if lim.minimizers.len() == 1 {
        let sigma = clt_covariance(&m, &lim, 0, l)?;
        let empirical = &cov * nf;
        let rel = (&empirical - &sigma).norm() / sigma.norm().max(1e-300);
        checks.push(Check {
            name: "clt_covariance".into(),
            pass: rel < cfg.clt_tolerance,
            value: rel,
            reference: 0.0,
            tolerance: cfg.clt_tolerance,
            detail: format!(
                "Frobenius relative error of n Cov(m_1..m_{l}) against the limit covariance"
            ),
        });
        if !c.is_constrained(1) {
            let tol = 0.08 * sigma[(0, 0)];
            checks.push(Check {
                name: "clt_variance_m1".into(),
                pass: (empirical[(0, 0)] - sigma[(0, 0)]).abs() < tol,
                value: empirical[(0, 0)],
                reference: sigma[(0, 0)],
                tolerance: tol,
                detail: "n Var(m_1)".into(),
            });
        }
    }

    if let Model::Uniform = m {
        let vol = volume_ratio(&c, cfg.n)?;
        let kl = kl_arcsine(&lim.minimizers[0].coordinates);
        let implied = if kl.abs() < 1e-8 {
            VolumeRegime::Polynomial
        } else {
            VolumeRegime::Exponential
        };
        checks.push(Check {
            name: "volume_regime".into(),
            pass: regime(&c) == implied,
            value: kl,
            reference: 0.0,
            tolerance: 1e-8,
            detail: format!(
                "{:?}; entropy of the arcsine law relative to the limit",
                vol.regime
            ),
        });
        if let Some(exact) = exact_log_volume_ratio(&c, cfg.n)? {
            let tol = 0.1;
            checks.push(Check {
                name: "volume_asymptotics".into(),
                pass: (exact - vol.log_ratio).abs() < tol,
                value: vol.log_ratio,
                reference: exact,
                tolerance: tol,
                detail: "log volume ratio, leading order against quadrature".into(),
            });
        }
    }

    let file = VerifyFile {
        schema: SCHEMA.into(),
        config: cfg.clone(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    };
    write_json(&cfg.out.join("verify.json"), &file)?;
    write_metadata(cfg, serde_json::to_value(summary(&run))?)?;
    if file.pass {
        Ok(file)
    } else {
        Err(CliError::VerifyFailed(
            file.checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.clone())
                .collect(),
        ))
    }
}

/// Numbers separated by commas, whitespace or newlines; a non-numeric
/// first line is taken as a header.
pub fn read_coordinates(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split([',', ' ', '\t'])
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) => out.extend(v),
            Err(_) if out.is_empty() && no == 0 => {}
            Err(_) => {
                return Err(CliError::Config(format!(
                    "{}: line {} is not numeric",
                    path.display(),
                    no + 1
                )));
            }
        }
    }
    Ok(out)
}

/// Spectral measure of the Jacobi matrix of a coordinate file: `spectral.csv`.
pub fn cmd_spectral(cfg: &RunConfig) -> Result<Vec<(f64, f64)>, CliError> {
    fs::create_dir_all(&cfg.out)?;
    let path: PathBuf = cfg
        .coordinates
        .clone()
        .ok_or_else(|| CliError::Config("spectral needs a coordinate file".into()))?;
    let ys = read_coordinates(&path)?;
    let coords = Coordinates::new(cfg.domain, ys)?;
    let rec = canonical_to_recurrence(&coords)?;
    let size = cfg.size.unwrap_or(rec.alphas.len());
    let mu = spectral_measure(&jacobi_matrix(&rec, size)?)?;
    let pairs: Vec<(f64, f64)> = mu
        .nodes
        .iter()
        .copied()
        .zip(mu.weights.iter().copied())
        .collect();
    write_csv(
        &cfg.out.join("spectral.csv"),
        &["eigenvalue".into(), "weight".into()],
        pairs.iter().map(|(x, w)| vec![fmt_f64(*x), fmt_f64(*w)]),
    )?;
    write_metadata(cfg, serde_json::Value::Null)?;
    Ok(pairs)
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.command {
        Command::Limit => cmd_limit(cfg).map(|_| ()),
        Command::Sample => cmd_sample(cfg).map(|_| ()),
        Command::Verify => cmd_verify(cfg).map(|_| ()),
        Command::Spectral => cmd_spectral(cfg).map(|_| ()),
    }
}

/// Re-run the configuration stored in a `metadata.json`, optionally into
/// another directory.
pub fn replay(metadata: &Path, out: Option<PathBuf>) -> Result<RunConfig, CliError> {
    let meta: Metadata = read_json(metadata)?;
    let mut cfg = meta.config;
    if let Some(o) = out {
        cfg.out = o;
    }
    cfg.validate()?;
    run(&cfg)?;
    Ok(cfg)
}
