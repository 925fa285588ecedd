//! Limits of random moment vectors on constrained moment spaces.
//!
//! Two ensembles are covered. Under the uniform ensemble on
//! `M_n([0,1])` with a moment constraint, the canonical coordinates beyond
//! the constrained block behave like independent symmetric Beta variables
//! and the constrained block concentrates where the attainable range of
//! the next moment is largest. Under a Gibbs ensemble with coordinate
//! potentials `V_j`, everything concentrates on the minimizers of the
//! effective potentials `W_j`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::canonical::{
    arcsine_moments, coordinates_to_moments_raw, coordinates_to_recurrence_raw, fill_targets,
    interior_point, moment_range, moments_to_canonical, solve_sequential, Constraint, Domain,
    MomentVector, RecurrenceCoefficients, Target,
};
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::measures::{
    build_bs01_measure, build_tail_constant_measure, AcPart, Measure, ReferenceDensity,
    SumOfSquares, TailSpec,
};
use crate::optimize::{fd_hessian, fd_hessian_fine, fd_step, halton, minimize, NewtonOptions};
use crate::polynomial::Polynomial;
use crate::potential::PotentialSpec;

/// Which random moment ensemble is meant.
#[derive(Debug, Clone)]
pub enum Model {
    /// Uniform distribution on the constrained moment space of `[0, 1]`.
    Uniform,
    /// Density proportional to `exp(-n sum_j V_j(y_j))` in canonical coordinates.
    Gibbs(PotentialSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimizer {
    /// Canonical coordinates `y_1..y_{i_k}`, constrained ones included.
    pub coordinates: Vec<f64>,
    /// Limiting values of the odd and even coordinates beyond `i_k`.
    pub tail: [f64; 2],
    pub weight: f64,
    pub measure: Measure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariance: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitResult {
    pub domain: Domain,
    pub constraint: Constraint<f64>,
    pub minimizers: Vec<Minimizer>,
}

impl LimitResult {
    /// Canonical coordinates `y_1..y_n` of minimizer `q` with the tail filled in.
    pub fn coordinates(&self, q: usize, n: usize) -> Vec<f64> {
        let m = &self.minimizers[q];
        let mut ys = m.coordinates.clone();
        ys.truncate(n);
        for j in ys.len() + 1..=n {
            ys.push(m.tail[1 - j % 2]);
        }
        ys
    }

    /// First `n` moments of the limit measure of minimizer `q`.
    pub fn moments(&self, q: usize, n: usize) -> Vec<f64> {
        coordinates_to_moments_raw(self.domain, &self.coordinates(q, n))
    }
}

/// Relative entropy of the arcsine law with respect to the Bernstein-Szego
/// measure with canonical moments `ps` followed by `1/2`.
pub fn kl_arcsine(ps: &[f64]) -> f64 {
    -ps.iter().map(|p| (4.0 * p * (1.0 - p)).ln()).sum::<f64>()
}

/// `log(4^n (m_{n+1}^+ - m_{n+1}^-))` on the interior of `M_n([0,1])`,
/// `-inf` elsewhere. Strictly concave in `m`. Evaluated in double-double,
/// since the width is a ratio of Hankel determinants.
pub fn range_objective(m: &MomentVector<f64>) -> f64 {
    let md = MomentVector::new(
        m.domain,
        m.values.iter().map(|v| DoubleDouble::from(*v)).collect(),
    );
    match moment_range(&md).ok().and_then(|r| r.width()) {
        Some(w) if w.hi() > 0.0 => {
            m.len() as f64 * 4f64.ln() + w.hi().ln() + (w.lo() / w.hi()).ln_1p()
        }
        _ => f64::NEG_INFINITY,
    }
}

fn sum_log_pq(ys: &[f64]) -> f64 {
    let mut acc = 0.0;
    for y in ys {
        if !(*y > 0.0 && *y < 1.0) {
            return f64::NEG_INFINITY;
        }
        acc += (y * (1.0 - y)).ln();
    }
    acc
}

/// Head coordinates `p_1..p_{i_k}` when the free moments of the head are `x`.
fn uniform_head(constraint: &Constraint<f64>, x: &[f64]) -> Vec<f64> {
    let ik = constraint.last_index();
    let mut free = x.iter();
    let targets: Vec<Target<f64>> = (1..=ik)
        .map(|j| {
            Target::Moment(
                *constraint
                    .value_at(j)
                    .unwrap_or_else(|| free.next().unwrap()),
            )
        })
        .collect();
    solve_sequential(Domain::Interval01, &targets)
}

fn certify(gradient_norm: f64) -> Result<()> {
    if gradient_norm.is_finite() && gradient_norm < 1e-7 {
        Ok(())
    } else {
        Err(Error::DegenerateMinimizer(format!(
            "optimizer stopped with gradient norm {gradient_norm:e}"
        )))
    }
}

struct UniformOptimum {
    free_moments: Vec<f64>,
    head: Vec<f64>,
}

fn uniform_optimum(constraint: &Constraint<f64>) -> Result<UniformOptimum> {
    let ik = constraint.last_index();
    let start = interior_point(constraint, Domain::Interval01).ok_or(Error::NotAdmissible)?;
    let free = constraint.free_indices(ik);
    let m0 = coordinates_to_moments_raw(Domain::Interval01, &start.values);
    let x0: Vec<f64> = free.iter().map(|&j| m0[j - 1]).collect();
    let objective = |x: &[f64]| -> f64 { -sum_log_pq(&uniform_head(constraint, x)) };
    let opt = minimize(&objective, &x0, &NewtonOptions::default());
    certify(opt.gradient_norm)?;
    Ok(UniformOptimum {
        head: uniform_head(constraint, &opt.x),
        free_moments: opt.x,
    })
}

/// Limit of the uniform ensemble on `M_n^C([0,1])`: the Bernstein-Szego
/// measure whose first `i_k` canonical moments maximize the range of the
/// next moment, followed by `1/2, 1/2, ...`.
pub fn solve_uniform_limit(constraint: &Constraint<f64>) -> Result<LimitResult> {
    let opt = uniform_optimum(constraint)?;
    let measure = build_bs01_measure(&opt.head)?;
    Ok(LimitResult {
        domain: Domain::Interval01,
        constraint: constraint.clone(),
        minimizers: vec![Minimizer {
            coordinates: opt.head,
            tail: [0.5, 0.5],
            weight: 1.0,
            measure,
            covariance: None,
        }],
    })
}

/// `W_j = V_j - log(domain factor)`, `+inf` outside the coordinate range.
pub fn effective_potential(potential: &PotentialSpec, domain: Domain, j: usize, y: f64) -> f64 {
    if !domain.contains(j, &y) {
        return f64::INFINITY;
    }
    let v = potential.get(j).value(y);
    let w = match domain.log_factor(j, y) {
        Some(lf) => v - lf,
        None => v,
    };
    if w.is_nan() {
        f64::INFINITY
    } else {
        w
    }
}

fn effective_first(potential: &PotentialSpec, domain: Domain, j: usize, y: f64) -> f64 {
    let v = potential.get(j).first(y);
    match (domain, j % 2) {
        (Domain::Interval01, _) => v - (1.0 - 2.0 * y) / (y * (1.0 - y)),
        (Domain::HalfLine, _) | (Domain::RealLine, 0) => v - 1.0 / y,
        _ => v,
    }
}

fn effective_second(potential: &PotentialSpec, domain: Domain, j: usize, y: f64) -> f64 {
    let v = potential.get(j).second(y);
    match (domain, j % 2) {
        (Domain::Interval01, _) => v + 1.0 / (y * y) + 1.0 / ((1.0 - y) * (1.0 - y)),
        (Domain::HalfLine, _) | (Domain::RealLine, 0) => v + 1.0 / (y * y),
        _ => v,
    }
}

/// Map used to scan a single coordinate: fine near the origin, wide reach.
fn scan_map(domain: Domain, j: usize, u: f64) -> f64 {
    match (domain, j % 2) {
        (Domain::RealLine, 1) => u.sinh(),
        _ => domain.from_unbounded(j, u),
    }
}

/// Unique minimizer of `W_j` over the coordinate range.
pub fn minimize_coordinate(potential: &PotentialSpec, domain: Domain, j: usize) -> Result<f64> {
    let w = |y: f64| effective_potential(potential, domain, j, y);
    let lo = -40.0;
    let hi = 40.0;
    let steps = 8000;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|u| w(scan_map(domain, j, *u))).collect();

    // runs of equal values (rounding plateaus near the domain edges) count
    // as one point and must sit strictly below both neighbours
    let mut candidates = Vec::new();
    let mut i = 1;
    while i < steps {
        let mut k = i;
        while k + 1 < steps && vals[k + 1] == vals[i] {
            k += 1;
        }
        if vals[i].is_finite() && vals[i] < vals[i - 1] && vals[i] < vals[k + 1] {
            candidates.push(golden(
                &|u| w(scan_map(domain, j, u)),
                grid[i - 1],
                grid[k + 1],
            ));
        }
        i = k + 1;
    }
    if candidates.is_empty() {
        return Err(Error::DegenerateMinimizer(format!(
            "effective potential {j} has no interior minimizer"
        )));
    }
    let mut minima: Vec<(f64, f64)> = Vec::new();
    for u in candidates {
        let y = polish_coordinate(potential, domain, j, scan_map(domain, j, u));
        let v = w(y);
        if !minima
            .iter()
            .any(|(m, _)| (m - y).abs() <= 1e-6 * y.abs().max(1.0))
        {
            minima.push((y, v));
        }
    }
    let best = minima.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * best.abs().max(1.0);
    let global: Vec<f64> = minima
        .iter()
        .filter(|m| m.1 <= best + tol)
        .map(|m| m.0)
        .collect();
    if global.len() > 1 {
        return Err(Error::DegenerateMinimizer(format!(
            "effective potential {j} has {} minimizers",
            global.len()
        )));
    }
    let y = global[0];
    let curvature = effective_second(potential, domain, j, y);
    if !(curvature > 1e-10) {
        return Err(Error::DegenerateMinimizer(format!(
            "effective potential {j} is flat at its minimizer {y}"
        )));
    }
    Ok(y)
}

fn golden(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Newton on `W_j'` from a bracketed start, kept only while it improves.
fn polish_coordinate(potential: &PotentialSpec, domain: Domain, j: usize, mut y: f64) -> f64 {
    for _ in 0..50 {
        let g = effective_first(potential, domain, j, y);
        let h = effective_second(potential, domain, j, y);
        if !(h > 0.0) || !g.is_finite() {
            break;
        }
        let next = y - g / h;
        if !domain.contains(j, &next) {
            break;
        }
        let done = (next - y).abs() <= 1e-15 * y.abs().max(1e-300);
        y = next;
        if done {
            break;
        }
    }
    y
}

/// Objective of the constrained head block in free canonical coordinates.
fn head_objective(
    potential: &PotentialSpec,
    constraint: &Constraint<f64>,
    domain: Domain,
    x: &[f64],
) -> f64 {
    let ik = constraint.last_index();
    let ys = solve_sequential(domain, &fill_targets(x, constraint, ik));
    let mut acc = 0.0;
    for (i, y) in ys.iter().enumerate() {
        acc += effective_potential(potential, domain, i + 1, *y);
        if !acc.is_finite() {
            return f64::INFINITY;
        }
    }
    acc
}

/// Log of the finite-n density correction `sum_j (W_j - V_j)(y_j) (j + d_j)`
/// over the head block.
fn head_remainder(
    potential: &PotentialSpec,
    constraint: &Constraint<f64>,
    domain: Domain,
    ys: &[f64],
) -> f64 {
    ys.iter()
        .enumerate()
        .map(|(i, y)| {
            let j = i + 1;
            let wv = effective_potential(potential, domain, j, *y) - potential.get(j).value(*y);
            wv * (j + constraint.count_above(j)) as f64
        })
        .sum()
}

struct HeadMinimum {
    coordinates: Vec<f64>,
    log_weight: f64,
    value: f64,
}

fn head_minimizers(
    potential: &PotentialSpec,
    constraint: &Constraint<f64>,
    domain: Domain,
) -> Result<Vec<HeadMinimum>> {
    let ik = constraint.last_index();
    let start = interior_point(constraint, domain).ok_or(Error::NotAdmissible)?;
    let free_idx = constraint.free_indices(ik);
    let d = free_idx.len();
    let g = |x: &[f64]| head_objective(potential, constraint, domain, x);

    if d == 0 {
        return Ok(vec![HeadMinimum {
            value: g(&[]),
            log_weight: head_remainder(potential, constraint, domain, &start.values),
            coordinates: start.values,
        }]);
    }

    let mut starts: Vec<Vec<f64>> = vec![free_idx.iter().map(|&j| start.values[j - 1]).collect()];
    for s in 0..32 {
        let x: Vec<f64> = free_idx
            .iter()
            .enumerate()
            .map(|(c, &j)| {
                let h = halton(s + 1, c);
                domain.from_unbounded(j, (h / (1.0 - h)).ln())
            })
            .collect();
        if g(&x).is_finite() {
            starts.push(x);
        }
    }

    let mut found: Vec<(Vec<f64>, f64)> = Vec::new();
    for x0 in starts {
        let opt = minimize(&g, &x0, &NewtonOptions::default());
        if !opt.value.is_finite() || opt.gradient_norm > 1e-6 * opt.value.abs().max(1.0) {
            continue;
        }
        let close = found.iter_mut().find(|(x, _)| {
            x.iter()
                .zip(&opt.x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                < 1e-5
        });
        match close {
            Some(entry) if entry.1 <= opt.value => {}
            Some(entry) => *entry = (opt.x, opt.value),
            None => found.push((opt.x, opt.value)),
        }
    }
    if found.is_empty() {
        return Err(Error::DegenerateMinimizer("no start converged".into()));
    }
    let best = found.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
    let tol = 1e-8 * best.abs().max(1.0);

    let mut out = Vec::new();
    for (x, value) in found.into_iter().filter(|f| f.1 <= best + tol) {
        let h = fd_hessian_fine(&g, &x)
            .or_else(|| fd_hessian(&g, &x))
            .ok_or_else(|| Error::DegenerateMinimizer("Hessian not available".into()))?;
        let eig = SymmetricEigen::new(h.clone()).eigenvalues;
        let top = eig.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let low = eig.iter().fold(f64::INFINITY, |a, v| a.min(*v));
        if !(low > 1e-8 * top.max(1.0)) {
            return Err(Error::DegenerateMinimizer(format!(
                "Hessian at minimizer is singular (smallest eigenvalue {low:e})"
            )));
        }
        let coordinates = solve_sequential(domain, &fill_targets(&x, constraint, ik));
        let log_det: f64 = eig.iter().map(|v| v.ln()).sum();
        out.push(HeadMinimum {
            log_weight: head_remainder(potential, constraint, domain, &coordinates) - 0.5 * log_det,
            coordinates,
            value,
        });
    }
    out.sort_by(|a, b| {
        a.coordinates
            .partial_cmp(&b.coordinates)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Limit measures of a Gibbs ensemble with a moment constraint, one per
/// global minimizer of the head objective, with mixture weights.
pub fn solve_general_limits(
    potential: &PotentialSpec,
    constraint: &Constraint<f64>,
    domain: Domain,
) -> Result<LimitResult> {
    let ik = constraint.last_index();
    potential.check_growth(domain, ik + 2)?;
    let tail = gibbs_tail(potential, domain, ik)?;
    let heads = head_minimizers(potential, constraint, domain)?;

    let top = heads
        .iter()
        .map(|h| h.log_weight)
        .fold(f64::NEG_INFINITY, f64::max);
    let norm: f64 = heads.iter().map(|h| (h.log_weight - top).exp()).sum();
    let mut minimizers = Vec::with_capacity(heads.len());
    for h in heads {
        let measure = limit_measure(domain, &h.coordinates, tail)?;
        minimizers.push(Minimizer {
            weight: (h.log_weight - top).exp() / norm,
            coordinates: h.coordinates,
            tail,
            measure,
            covariance: None,
        });
    }
    Ok(LimitResult {
        domain,
        constraint: constraint.clone(),
        minimizers,
    })
}

/// Minimizers for odd and even coordinates beyond `i_k`.
fn gibbs_tail(potential: &PotentialSpec, domain: Domain, ik: usize) -> Result<[f64; 2]> {
    let a = minimize_coordinate(potential, domain, ik + 1)?;
    let b = minimize_coordinate(potential, domain, ik + 2)?;
    Ok(if (ik + 1) % 2 == 1 { [a, b] } else { [b, a] })
}

/// Measure with canonical coordinates `head` followed by `tail[0]` at odd
/// and `tail[1]` at even positions.
pub fn limit_measure(domain: Domain, head: &[f64], tail: [f64; 2]) -> Result<Measure> {
    let ik = head.len();
    let j = match domain {
        Domain::Interval01 => (ik + 4) / 2,
        Domain::HalfLine => (ik + 3) / 2,
        Domain::RealLine => ik / 2 + 1,
    };
    let mut ys = head.to_vec();
    for k in ik + 1..=2 * j + 2 {
        ys.push(tail[1 - k % 2]);
    }
    let rec = coordinates_to_recurrence_raw(domain, &ys);
    let spec = TailSpec::new(
        RecurrenceCoefficients {
            alphas: rec.alphas[..j].to_vec(),
            betas: rec.betas[..j - 1].to_vec(),
        },
        rec.alphas[j],
        rec.betas[j - 1],
    )?;
    Ok(simplify_edges(domain, build_tail_constant_measure(&spec)?))
}

/// Factor out `x` or `x (1 - x)` from the denominator when the support
/// reaches the edge of the domain, switching to the matching reference
/// density.
fn simplify_edges(domain: Domain, mut mu: Measure) -> Measure {
    let Some(ac) = mu.ac.take() else { return mu };
    let (a, b) = ac.support;
    let big = ac
        .denominator
        .coeffs
        .iter()
        .fold(0.0_f64, |m, c| m.max(c.abs()));
    let vanishes = |x: f64| ac.denominator.eval(&x).abs() <= 1e-10 * big;
    let factor = match domain {
        Domain::HalfLine if a.abs() < 1e-10 && vanishes(0.0) => Some((
            Polynomial::new(vec![0.0, 1.0]),
            ReferenceDensity::MarchenkoPasturLike,
        )),
        Domain::Interval01
            if a.abs() < 1e-10 && (b - 1.0).abs() < 1e-10 && vanishes(0.0) && vanishes(1.0) =>
        {
            Some((
                Polynomial::new(vec![0.0, 1.0, -1.0]),
                ReferenceDensity::ArcsineLike,
            ))
        }
        _ => None,
    };
    mu.ac = Some(match factor {
        Some((f, reference)) => {
            let (q, _) = ac.denominator.div_rem(&f);
            // on [0,1] the edge factor divides the plain square:
            // A^2 + x(1-x) P^2/4 = x(1-x) (x(1-x) B^2 + P^2/4)
            let squares = match (reference, &ac.squares) {
                (ReferenceDensity::ArcsineLike, Some(sq)) => {
                    let (edge, _) = sq.plain.div_rem(&f);
                    Some(SumOfSquares {
                        edge,
                        plain: sq.edge.clone(),
                        scale: sq.scale,
                    })
                }
                _ => None,
            };
            AcPart {
                reference,
                denominator: q,
                squares,
                ..ac
            }
        }
        None => ac,
    });
    mu
}

/// Asymptotic covariance of `sqrt(n) (m_1..m_l - limit)` for minimizer `q`.
/// Rows and columns of constrained indices are zero.
pub fn clt_covariance(
    model: &Model,
    limit: &LimitResult,
    q: usize,
    l: usize,
) -> Result<DMatrix<f64>> {
    let constraint = &limit.constraint;
    let domain = limit.domain;
    let ik = constraint.last_index();
    let big_l = l.max(ik);
    let free_head = constraint.free_indices(ik);
    let free_all = constraint.free_indices(big_l);
    let minimizer = &limit.minimizers[q];
    let ys_star = limit.coordinates(q, big_l);

    // head coordinates, their inverse-Hessian covariance, and the map
    // from (head, tail canonical coordinates) to all moments
    let (head_x, head_cov, map): (Vec<f64>, DMatrix<f64>, Box<dyn Fn(&[f64]) -> Vec<f64>>) =
        match model {
            Model::Uniform => {
                let m = coordinates_to_moments_raw(domain, &minimizer.coordinates);
                let x: Vec<f64> = free_head.iter().map(|&j| m[j - 1]).collect();
                let f = |x: &[f64]| -sum_log_pq(&uniform_head(constraint, x));
                let cov = inverse_hessian(&f, &x)?;
                let nh = x.len();
                let map = move |v: &[f64]| -> Vec<f64> {
                    let mut ys = uniform_head(constraint, &v[..nh]);
                    ys.extend_from_slice(&v[nh..]);
                    coordinates_to_moments_raw(Domain::Interval01, &ys)
                };
                (x, cov, Box::new(map))
            }
            Model::Gibbs(potential) => {
                let x: Vec<f64> = free_head
                    .iter()
                    .map(|&j| minimizer.coordinates[j - 1])
                    .collect();
                let f = |x: &[f64]| head_objective(potential, constraint, domain, x);
                let cov = inverse_hessian(&f, &x)?;
                let nh = x.len();
                let map = move |v: &[f64]| -> Vec<f64> {
                    let mut ys = solve_sequential(domain, &fill_targets(&v[..nh], constraint, ik));
                    ys.extend_from_slice(&v[nh..]);
                    coordinates_to_moments_raw(domain, &ys)
                };
                (x, cov, Box::new(map))
            }
        };

    let tail_vars: Vec<f64> = (ik + 1..=big_l)
        .map(|j| match model {
            Model::Uniform => 0.125,
            Model::Gibbs(p) => 1.0 / effective_second(p, domain, j, ys_star[j - 1]),
        })
        .collect();

    let mut point = head_x.clone();
    point.extend_from_slice(&ys_star[ik..big_l]);
    let dim = point.len();
    let mut cov = DMatrix::zeros(dim, dim);
    cov.view_mut((0, 0), (head_x.len(), head_x.len()))
        .copy_from(&head_cov);
    for (i, v) in tail_vars.iter().enumerate() {
        cov[(head_x.len() + i, head_x.len() + i)] = *v;
    }

    // Jacobian of the free moments with respect to the coordinates
    let mut jac = DMatrix::zeros(free_all.len(), dim);
    for c in 0..dim {
        let h = fd_step(point[c]) * 0.1;
        let mut up = point.clone();
        up[c] += h;
        let mut dn = point.clone();
        dn[c] -= h;
        let mu = map(&up);
        let md = map(&dn);
        for (r, &j) in free_all.iter().enumerate() {
            jac[(r, c)] = (mu[j - 1] - md[j - 1]) / (2.0 * h);
        }
    }
    let reduced = &jac * cov * jac.transpose();

    let mut full = DMatrix::zeros(l, l);
    for (r, &i) in free_all.iter().enumerate() {
        for (c, &j) in free_all.iter().enumerate() {
            if i <= l && j <= l {
                full[(i - 1, j - 1)] = reduced[(r, c)];
            }
        }
    }
    Ok(full)
}

fn inverse_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Result<DMatrix<f64>> {
    if x.is_empty() {
        return Ok(DMatrix::zeros(0, 0));
    }
    let h = fd_hessian_fine(f, x)
        .or_else(|| fd_hessian(f, x))
        .ok_or_else(|| Error::DegenerateMinimizer("Hessian not available".into()))?;
    h.try_inverse()
        .ok_or_else(|| Error::DegenerateMinimizer("singular Hessian".into()))
}

/// Rate function of the large deviation principle for the first `l`
/// moments, normalized to vanish at the limit.
#[derive(Debug, Clone)]
pub struct RateFunction {
    model: Model,
    constraint: Constraint<f64>,
    domain: Domain,
    head_min: f64,
    tail: [f64; 2],
}

impl RateFunction {
    pub fn new(model: &Model, constraint: &Constraint<f64>, domain: Domain) -> Result<Self> {
        let (head_min, tail) = match model {
            Model::Uniform => {
                if domain != Domain::Interval01 {
                    return Err(Error::InvalidInput(
                        "the uniform ensemble lives on [0,1]".into(),
                    ));
                }
                let opt = uniform_optimum(constraint)?;
                (-sum_log_pq(&opt.head), [0.5, 0.5])
            }
            Model::Gibbs(p) => {
                let ik = constraint.last_index();
                p.check_growth(domain, ik + 2)?;
                let tail = gibbs_tail(p, domain, ik)?;
                let heads = head_minimizers(p, constraint, domain)?;
                (
                    heads.iter().map(|h| h.value).fold(f64::INFINITY, f64::min),
                    tail,
                )
            }
        };
        Ok(Self {
            model: model.clone(),
            constraint: constraint.clone(),
            domain,
            head_min,
            tail,
        })
    }

    fn coordinate_cost(&self, j: usize, y: f64) -> f64 {
        match &self.model {
            Model::Uniform => {
                if y > 0.0 && y < 1.0 {
                    -(y * (1.0 - y)).ln()
                } else {
                    f64::INFINITY
                }
            }
            Model::Gibbs(p) => effective_potential(p, self.domain, j, y),
        }
    }

    /// `I(m)` for `m = (m_1..m_l)` with `l >= i_k`; `+inf` off the
    /// constrained moment space.
    pub fn eval(&self, m: &MomentVector<f64>) -> Result<f64> {
        let l = m.len();
        let ik = self.constraint.last_index();
        if l < ik {
            return Err(Error::InvalidInput(format!("need at least {ik} moments")));
        }
        for (i, c) in self.constraint.pairs() {
            if (m.values[i - 1] - c).abs() > 1e-10 * c.abs().max(1.0) {
                return Ok(f64::INFINITY);
            }
        }
        let Ok(coords) = moments_to_canonical(m) else {
            return Ok(f64::INFINITY);
        };
        let value: f64 = coords
            .values
            .iter()
            .enumerate()
            .map(|(i, y)| self.coordinate_cost(i + 1, *y))
            .sum();
        let floor: f64 = self.head_min
            + (ik + 1..=l)
                .map(|j| self.coordinate_cost(j, self.tail[1 - j % 2]))
                .sum::<f64>();
        Ok(value - floor)
    }
}

pub fn rate_eval_uniform(m: &MomentVector<f64>, constraint: &Constraint<f64>) -> Result<f64> {
    RateFunction::new(&Model::Uniform, constraint, Domain::Interval01)?.eval(m)
}

pub fn rate_eval_general(
    m: &MomentVector<f64>,
    potential: &PotentialSpec,
    constraint: &Constraint<f64>,
    domain: Domain,
) -> Result<f64> {
    RateFunction::new(&Model::Gibbs(potential.clone()), constraint, domain)?.eval(m)
}

/// Moderate deviation rate `x^T C^+ x / 2` for the Gaussian limit with
/// covariance `C`; `+inf` unless `x` vanishes on the constrained indices.
pub fn mdp_rate(x: &[f64], covariance: &DMatrix<f64>, constraint: &Constraint<f64>) -> f64 {
    let l = x.len();
    if constraint
        .indices()
        .iter()
        .any(|&i| i <= l && x[i - 1] != 0.0)
    {
        return f64::INFINITY;
    }
    let free: Vec<usize> = constraint.free_indices(l);
    let sub = DMatrix::from_fn(free.len(), free.len(), |r, c| {
        covariance[(free[r] - 1, free[c] - 1)]
    });
    let eig = SymmetricEigen::new(sub);
    let top = eig.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let xv = nalgebra::DVector::from_iterator(free.len(), free.iter().map(|&i| x[i - 1]));
    let proj = eig.eigenvectors.transpose() * xv;
    let mut acc = 0.0;
    for (k, lam) in eig.eigenvalues.iter().enumerate() {
        if *lam > 1e-12 * top.max(1e-300) {
            acc += proj[k] * proj[k] / lam;
        } else if proj[k].abs() > 1e-12 {
            return f64::INFINITY;
        }
    }
    0.5 * acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VolumeRegime {
    /// The arcsine law meets the constraint; the ratio decays like `n^{k/2}` times constants.
    Polynomial,
    /// The ratio decays geometrically.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeAsymptotics {
    /// Log of the leading-order approximation to `vol(M_n^C) / vol(M_n)`.
    pub log_ratio: f64,
    pub regime: VolumeRegime,
    /// `log prod_{j <= i_k} p_j q_j` at the limit.
    pub log_range: f64,
    /// Determinant of the Hessian of `-log range` in the free head moments.
    pub hessian_det: f64,
}

pub fn log_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `log vol(M_n([0,1])) = sum_{m=1}^n log B(m, m)`.
pub fn log_volume_unconstrained(n: usize) -> f64 {
    (1..=n).map(|m| log_beta(m as f64, m as f64)).sum()
}

pub fn regime(constraint: &Constraint<f64>) -> VolumeRegime {
    let arcsine = arcsine_moments(constraint.last_index());
    let hit = constraint
        .pairs()
        .all(|(i, c)| (arcsine[i - 1] - c).abs() <= 1e-10);
    if hit {
        VolumeRegime::Polynomial
    } else {
        VolumeRegime::Exponential
    }
}

/// Leading-order asymptotics of `vol_{n-k}(M_n^C) / vol_n(M_n)` on `[0,1]`.
pub fn volume_ratio(constraint: &Constraint<f64>, n: usize) -> Result<VolumeAsymptotics> {
    let ik = constraint.last_index();
    let k = constraint.k();
    if n < ik {
        return Err(Error::InvalidInput(format!(
            "n = {n} is below the constrained index {ik}"
        )));
    }
    let opt = uniform_optimum(constraint)?;
    let log_range = sum_log_pq(&opt.head);
    let f = |x: &[f64]| -sum_log_pq(&uniform_head(constraint, x));
    let det = if opt.free_moments.is_empty() {
        1.0
    } else {
        fd_hessian_fine(&f, &opt.free_moments)
            .or_else(|| fd_hessian(&f, &opt.free_moments))
            .ok_or_else(|| Error::DegenerateMinimizer("Hessian not available".into()))?
            .determinant()
    };
    let (nf, ikf, kf) = (n as f64, ik as f64, k as f64);
    let log_ratio = 0.5 * kf * nf.ln()
        + (nf - ikf) * (ikf * 4f64.ln() + log_range)
        + (ikf * ikf + 0.5 * (ikf - kf)) * 2f64.ln()
        - 0.5 * det.ln()
        - 0.5 * kf * std::f64::consts::PI.ln();
    Ok(VolumeAsymptotics {
        log_ratio,
        regime: regime(constraint),
        log_range,
        hessian_det: det,
    })
}

/// Log of the exact ratio `vol_{n-k}(M_n^C) / vol_n(M_n)` by quadrature,
/// available when at most one head moment is free.
pub fn exact_log_volume_ratio(constraint: &Constraint<f64>, n: usize) -> Result<Option<f64>> {
    let ik = constraint.last_index();
    let free = constraint.free_indices(ik);
    let denom: f64 = (1..=ik)
        .map(|j| log_beta((n - j + 1) as f64, (n - j + 1) as f64))
        .sum();
    let power = (n - ik) as f64;
    let opt = uniform_optimum(constraint)?;
    let peak = sum_log_pq(&opt.head);
    match free.len() {
        0 => Ok(Some(power * peak - denom)),
        1 => {
            let g = |x: f64| sum_log_pq(&uniform_head(constraint, &[x]));
            let x0 = opt.free_moments[0];
            let edge = |dir: f64| -> f64 {
                let (mut inside, mut outside) = (x0, x0 + dir);
                while g(outside).is_finite() {
                    outside += dir;
                }
                for _ in 0..100 {
                    let mid = 0.5 * (inside + outside);
                    if g(mid).is_finite() {
                        inside = mid;
                    } else {
                        outside = mid;
                    }
                }
                inside
            };
            let (a, b) = (edge(-1.0), edge(1.0));
            let panels = 20000;
            let h = (b - a) / panels as f64;
            let mut acc = 0.0;
            for i in 0..=panels {
                let x = a + h * i as f64;
                let w = if i == 0 || i == panels {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let v = g(x);
                if v.is_finite() {
                    acc += w * (power * (v - peak)).exp();
                }
            }
            Ok(Some((acc * h / 3.0).ln() + power * peak - denom))
        }
        _ => Ok(None),
    }
}
