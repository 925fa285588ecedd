//! Exact and Markov chain samplers for random moment vectors.
//!
//! Canonical coordinates beyond the constrained block are independent, so
//! they are drawn directly. The constrained block `y_1..y_{i_k}` has a
//! non-product density and is explored by random walk Metropolis.

use std::thread;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta as BetaDist, ContinuousCDF};

use crate::canonical::{
    coordinates_to_moments_raw, fill_targets, interior_point, solve_sequential, Constraint, Domain,
    MomentVector, Target,
};
use crate::error::{Error, Result};
use crate::potential::PotentialSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n: usize,
    pub domain: Domain,
    pub constraint: Constraint<f64>,
    pub samples: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub chains: usize,
    pub target_acceptance: f64,
    pub rhat_threshold: f64,
    pub seed: u64,
    /// Number of leading moments to emit; all `n` when `None`.
    pub output_len: Option<usize>,
}

impl SamplerConfig {
    pub fn new(
        n: usize,
        domain: Domain,
        constraint: Constraint<f64>,
        samples: usize,
        seed: u64,
    ) -> Self {
        Self {
            n,
            domain,
            constraint,
            samples,
            burn_in: 2000,
            thinning: 5,
            chains: 4,
            target_acceptance: 0.234,
            rhat_threshold: 1.05,
            seed,
            output_len: None,
        }
    }

    fn emitted(&self) -> usize {
        self.output_len.unwrap_or(self.n).min(self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    /// Acceptance rate over the final quarter of burn-in.
    pub burn_in_acceptance: f64,
    /// Acceptance rate after burn-in with the frozen proposal.
    pub acceptance: f64,
    pub step_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRun {
    pub samples: Vec<MomentVector<f64>>,
    /// Canonical coordinates of each sample, truncated like the moments.
    pub coordinates: Vec<Vec<f64>>,
    pub chains: Vec<ChainDiagnostics>,
    /// Split-chain potential scale reduction for each free head coordinate.
    pub rhat: Vec<f64>,
    /// Kolmogorov-Smirnov distance of coordinate `i_k + 1` from its exact law.
    pub ks_statistic: Option<f64>,
}

/// Seed of substream `stream`, by one SplitMix64 step from
/// `seed + (stream + 1) * 0x9E3779B97F4A7C15`.
pub fn substream_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add((stream + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Tabulated inverse CDF of a univariate density given by its logarithm.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

pub const INVERSE_CDF_POINTS: usize = 4096;

impl InverseCdf {
    /// `log_density` is searched over `map(u)` for `u` in `[-40, 40]`.
    pub fn build(log_density: &dyn Fn(f64) -> f64, map: &dyn Fn(f64) -> f64) -> Result<Self> {
        let ell = |u: f64| {
            let v = log_density(map(u));
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        };
        let steps = 8000;
        let mut best_u = 0.0;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            let u = -40.0 + 80.0 * i as f64 / steps as f64;
            let v = ell(u);
            if v > best {
                best = v;
                best_u = u;
            }
        }
        if !best.is_finite() {
            return Err(Error::InvalidInput("density vanishes everywhere".into()));
        }
        let (mut a, mut b) = (best_u - 0.01, best_u + 0.01);
        for _ in 0..200 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if ell(m1) < ell(m2) {
                a = m1;
            } else {
                b = m2;
            }
        }
        let mode_u = 0.5 * (a + b);
        let peak = ell(mode_u).max(best);
        let cut = peak - 700.0;
        let edge = |target_u: f64| -> f64 {
            if ell(target_u) >= cut {
                return target_u;
            }
            let (mut inside, mut outside) = (mode_u, target_u);
            for _ in 0..200 {
                let mid = 0.5 * (inside + outside);
                if ell(mid) >= cut {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            inside
        };
        let lo = map(edge(-40.0));
        let hi = map(edge(40.0));
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let grid: Vec<f64> = (0..INVERSE_CDF_POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (INVERSE_CDF_POINTS - 1) as f64)
            .collect();
        let dens: Vec<f64> = grid
            .iter()
            .map(|y| {
                let v = log_density(*y) - peak;
                if v.is_finite() {
                    v.exp()
                } else {
                    0.0
                }
            })
            .collect();
        let mut cdf = vec![0.0; grid.len()];
        for i in 1..grid.len() {
            cdf[i] = cdf[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * (grid[i] - grid[i - 1]);
        }
        let total = cdf[cdf.len() - 1];
        if !(total > 0.0) {
            return Err(Error::InvalidInput(
                "density has no mass on its grid".into(),
            ));
        }
        for c in &mut cdf {
            *c /= total;
        }
        Ok(Self { grid, cdf })
    }

    pub fn sample(&self, u: f64) -> f64 {
        let i = self
            .cdf
            .partition_point(|c| *c < u)
            .clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.grid[i - 1] + t * (self.grid[i] - self.grid[i - 1])
    }

    pub fn cdf(&self, y: f64) -> f64 {
        if y <= self.grid[0] {
            return 0.0;
        }
        let last = self.grid.len() - 1;
        if y >= self.grid[last] {
            return 1.0;
        }
        let i = self.grid.partition_point(|g| *g < y).clamp(1, last);
        let t = (y - self.grid[i - 1]) / (self.grid[i] - self.grid[i - 1]);
        self.cdf[i - 1] + t * (self.cdf[i] - self.cdf[i - 1])
    }
}

enum TailLaw {
    Beta(Beta<f64>, f64),
    Table(InverseCdf),
}

impl TailLaw {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            TailLaw::Beta(b, _) => b.sample(rng),
            TailLaw::Table(t) => t.sample(rng.random::<f64>()),
        }
    }

    fn cdf(&self, y: f64) -> f64 {
        match self {
            TailLaw::Beta(_, a) => BetaDist::new(*a, *a).map(|d| d.cdf(y)).unwrap_or(f64::NAN),
            TailLaw::Table(t) => t.cdf(y),
        }
    }
}

/// The constrained head block as seen by the chain.
struct Head<'a> {
    dim: usize,
    log_target: Box<dyn Fn(&[f64]) -> f64 + Sync + 'a>,
    coordinates: Box<dyn Fn(&[f64]) -> Vec<f64> + Sync + 'a>,
    start: Vec<f64>,
}

struct ChainOutput {
    states: Vec<Vec<f64>>,
    diagnostics: ChainDiagnostics,
    samples: Vec<(Vec<f64>, Vec<f64>)>,
}

fn run_chain(
    cfg: &SamplerConfig,
    head: &Head,
    tails: &[TailLaw],
    chain: usize,
    per_chain: usize,
) -> ChainOutput {
    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(cfg.seed, chain as u64));
    let d = head.dim;
    let mut x = head.start.clone();
    let mut lx = (head.log_target)(&x);
    let scale = x.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let mut log_step = (0.1 * (d.max(1) as f64).sqrt() * scale).ln();
    let mut chol = DMatrix::<f64>::identity(d, d);
    let mut history: Vec<Vec<f64>> = Vec::new();

    let propose = |x: &[f64], step: f64, chol: &DMatrix<f64>, rng: &mut ChaCha8Rng| -> Vec<f64> {
        let z = DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let dz = chol * z;
        x.iter().zip(dz.iter()).map(|(a, b)| a + step * b).collect()
    };

    let window_start = cfg.burn_in - cfg.burn_in / 4;
    let (mut window_acc, mut window_n) = (0usize, 0usize);
    for it in 0..cfg.burn_in {
        if d == 0 {
            break;
        }
        if it == cfg.burn_in / 2 && history.len() > 2 * d + 10 {
            if let Some(l) = empirical_cholesky(&history) {
                // keep the overall scale in the step size
                chol = l;
                log_step = (2.38 / (d as f64).sqrt()).ln();
            }
        }
        let y = propose(&x, log_step.exp(), &chol, &mut rng);
        let ly = (head.log_target)(&y);
        let accept = ly.is_finite() && (ly - lx >= 0.0 || rng.random::<f64>().ln() < ly - lx);
        if accept {
            x = y;
            lx = ly;
        }
        let a = if accept { 1.0 } else { 0.0 };
        let local = it % (cfg.burn_in / 2).max(1);
        log_step += (a - cfg.target_acceptance) / ((local + 1) as f64).powf(0.6);
        if it < cfg.burn_in / 2 {
            history.push(x.clone());
        }
        if it >= window_start {
            window_n += 1;
            window_acc += accept as usize;
        }
    }

    let step = log_step.exp();
    let mut accepted = 0usize;
    let mut total = 0usize;
    let mut states = Vec::with_capacity(per_chain);
    let mut samples = Vec::with_capacity(per_chain);
    let emitted = cfg.emitted();
    let ik = cfg.constraint.last_index();
    for _ in 0..per_chain {
        for _ in 0..cfg.thinning.max(1) {
            if d == 0 {
                break;
            }
            let y = propose(&x, step, &chol, &mut rng);
            let ly = (head.log_target)(&y);
            total += 1;
            if ly.is_finite() && (ly - lx >= 0.0 || rng.random::<f64>().ln() < ly - lx) {
                x = y;
                lx = ly;
                accepted += 1;
            }
        }
        let mut ys = (head.coordinates)(&x);
        ys.truncate(emitted);
        for j in ik + 1..=emitted {
            ys.push(tails[j - ik - 1].draw(&mut rng));
        }
        let mut m = coordinates_to_moments_raw(cfg.domain, &ys);
        // the head solve hits constrained moments up to rounding; emit them as given
        for (i, c) in cfg.constraint.pairs() {
            if i <= m.len() {
                m[i - 1] = *c;
            }
        }
        states.push(x.clone());
        samples.push((m, ys));
    }

    ChainOutput {
        states,
        diagnostics: ChainDiagnostics {
            burn_in_acceptance: if window_n > 0 {
                window_acc as f64 / window_n as f64
            } else {
                1.0
            },
            acceptance: if total > 0 {
                accepted as f64 / total as f64
            } else {
                1.0
            },
            step_size: step,
        },
        samples,
    }
}

fn empirical_cholesky(history: &[Vec<f64>]) -> Option<DMatrix<f64>> {
    let d = history[0].len();
    let n = history.len() as f64;
    let mean: Vec<f64> = (0..d)
        .map(|c| history.iter().map(|h| h[c]).sum::<f64>() / n)
        .collect();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for h in history {
        for r in 0..d {
            for c in 0..d {
                cov[(r, c)] += (h[r] - mean[r]) * (h[c] - mean[c]) / (n - 1.0);
            }
        }
    }
    let ridge = (0..d).map(|i| cov[(i, i)]).fold(0.0, f64::max) * 1e-6 + 1e-300;
    for i in 0..d {
        cov[(i, i)] += ridge;
    }
    cov.cholesky().map(|c| c.l())
}

/// Split-chain R-hat of one scalar across chains.
pub fn split_rhat(chains: &[Vec<f64>]) -> f64 {
    let half = chains.iter().map(|c| c.len() / 2).min().unwrap_or(0);
    if half < 2 {
        return f64::NAN;
    }
    let mut pieces: Vec<&[f64]> = Vec::new();
    for c in chains {
        pieces.push(&c[..half]);
        pieces.push(&c[c.len() - half..]);
    }
    let m = pieces.len() as f64;
    let n = half as f64;
    let means: Vec<f64> = pieces.iter().map(|p| p.iter().sum::<f64>() / n).collect();
    let grand = means.iter().sum::<f64>() / m;
    let b = n / (m - 1.0) * means.iter().map(|x| (x - grand).powi(2)).sum::<f64>();
    let w = pieces
        .iter()
        .zip(&means)
        .map(|(p, mu)| p.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1.0))
        .sum::<f64>()
        / m;
    if w == 0.0 {
        return if b == 0.0 { 1.0 } else { f64::INFINITY };
    }
    let var = (n - 1.0) / n * w + b / n;
    (var / w).sqrt()
}

fn ks_distance(mut xs: Vec<f64>, cdf: &dyn Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = cdf(*x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn run(cfg: &SamplerConfig, head: Head, tails: Vec<TailLaw>) -> Result<SampleRun> {
    if cfg.chains == 0 || cfg.samples == 0 {
        return Err(Error::InvalidInput(
            "need at least one chain and one sample".into(),
        ));
    }
    let per_chain = cfg.samples.div_ceil(cfg.chains);
    let outputs: Vec<ChainOutput> = thread::scope(|s| {
        let handles: Vec<_> = (0..cfg.chains)
            .map(|c| {
                let (head, tails) = (&head, &tails);
                s.spawn(move || run_chain(cfg, head, tails, c, per_chain))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread"))
            .collect()
    });

    let rhat: Vec<f64> = (0..head.dim)
        .map(|c| {
            let per: Vec<Vec<f64>> = outputs
                .iter()
                .map(|o| o.states.iter().map(|s| s[c]).collect())
                .collect();
            split_rhat(&per)
        })
        .collect();
    if let Some(worst) = rhat
        .iter()
        .copied()
        .filter(|r| !r.is_nan())
        .reduce(f64::max)
    {
        if worst > cfg.rhat_threshold {
            return Err(Error::ChainNotConverged { rhat: worst });
        }
    }

    let mut samples = Vec::with_capacity(cfg.samples);
    let mut coordinates = Vec::with_capacity(cfg.samples);
    let mut iters: Vec<_> = outputs.iter().map(|o| o.samples.iter()).collect();
    'merge: loop {
        for it in iters.iter_mut() {
            if samples.len() == cfg.samples {
                break 'merge;
            }
            match it.next() {
                Some((m, ys)) => {
                    samples.push(MomentVector::new(cfg.domain, m.clone()));
                    coordinates.push(ys.clone());
                }
                None => break 'merge,
            }
        }
    }

    let ik = cfg.constraint.last_index();
    let ks_statistic = if ik < cfg.emitted() {
        let xs: Vec<f64> = coordinates.iter().map(|c| c[ik]).collect();
        Some(ks_distance(xs, &|y| tails[0].cdf(y)))
    } else {
        None
    };

    Ok(SampleRun {
        samples,
        coordinates,
        chains: outputs.into_iter().map(|o| o.diagnostics).collect(),
        rhat,
        ks_statistic,
    })
}

fn check_dims(cfg: &SamplerConfig) -> Result<()> {
    if cfg.constraint.last_index() > cfg.n {
        return Err(Error::InvalidInput("constraint index exceeds n".into()));
    }
    if cfg.burn_in < 8 {
        return Err(Error::InvalidInput("burn-in is too short".into()));
    }
    Ok(())
}

/// Uniform ensemble on `M_n^C([0,1])`.
pub fn sample_uniform(cfg: &SamplerConfig) -> Result<SampleRun> {
    check_dims(cfg)?;
    if cfg.domain != Domain::Interval01 {
        return Err(Error::InvalidInput(
            "the uniform ensemble lives on [0,1]".into(),
        ));
    }
    let constraint = &cfg.constraint;
    let ik = constraint.last_index();
    let n = cfg.n;
    let start = interior_point(constraint, Domain::Interval01).ok_or(Error::NotAdmissible)?;
    let free = constraint.free_indices(ik);
    let m0 = coordinates_to_moments_raw(Domain::Interval01, &start.values);

    let to_coords = move |x: &[f64]| -> Vec<f64> {
        let mut it = x.iter();
        let targets: Vec<Target<f64>> = (1..=ik)
            .map(|j| Target::Moment(*constraint.value_at(j).unwrap_or_else(|| it.next().unwrap())))
            .collect();
        solve_sequential(Domain::Interval01, &targets)
    };
    let power = (n - ik) as f64;
    let head = Head {
        dim: free.len(),
        start: free.iter().map(|&j| m0[j - 1]).collect(),
        log_target: Box::new(move |x: &[f64]| {
            let mut acc = 0.0;
            for p in to_coords(x) {
                if !(p > 0.0 && p < 1.0) {
                    return f64::NEG_INFINITY;
                }
                acc += (p * (1.0 - p)).ln();
            }
            power * acc
        }),
        coordinates: Box::new(to_coords),
    };
    let tails = (ik + 1..=cfg.emitted())
        .map(|j| {
            let a = (n - j + 1) as f64;
            Beta::new(a, a)
                .map(|b| TailLaw::Beta(b, a))
                .map_err(|e| Error::InvalidInput(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    run(cfg, head, tails)
}

/// Gibbs ensemble with density `exp(-n sum_j V_j(y_j))` in canonical
/// coordinates, times the Jacobian to the unconstrained moments.
pub fn sample_general(cfg: &SamplerConfig, potential: &PotentialSpec) -> Result<SampleRun> {
    check_dims(cfg)?;
    let constraint = &cfg.constraint;
    let domain = cfg.domain;
    let ik = constraint.last_index();
    let n = cfg.n;
    potential.check_growth(domain, ik + 2)?;
    let start = interior_point(constraint, domain).ok_or(Error::NotAdmissible)?;
    let free = constraint.free_indices(ik);

    let log_weight = move |j: usize, y: f64, exponent: f64| -> f64 {
        if !domain.contains(j, &y) {
            return f64::NEG_INFINITY;
        }
        let v = -(n as f64) * potential.get(j).value(y);
        let w = match domain.log_factor(j, y) {
            Some(lf) if exponent != 0.0 => v + exponent * lf,
            _ => v,
        };
        if w.is_nan() {
            f64::NEG_INFINITY
        } else {
            w
        }
    };
    let to_coords = move |x: &[f64]| solve_sequential(domain, &fill_targets(x, constraint, ik));
    let head = Head {
        dim: free.len(),
        start: free.iter().map(|&j| start.values[j - 1]).collect(),
        log_target: Box::new(move |x: &[f64]| {
            to_coords(x)
                .iter()
                .enumerate()
                .map(|(i, y)| {
                    let j = i + 1;
                    let e = n as f64 - j as f64 - constraint.count_above(j) as f64;
                    log_weight(j, *y, e)
                })
                .sum()
        }),
        coordinates: Box::new(to_coords),
    };
    let tails = (ik + 1..=cfg.emitted())
        .map(|j| {
            let e = (n - j) as f64;
            let map = move |u: f64| match (domain, j % 2) {
                (Domain::RealLine, 1) => u.sinh(),
                _ => domain.from_unbounded(j, u),
            };
            InverseCdf::build(&|y| log_weight(j, y, e), &map).map(TailLaw::Table)
        })
        .collect::<Result<Vec<_>>>()?;
    run(cfg, head, tails)
}
