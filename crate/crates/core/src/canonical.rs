//! Canonical coordinates, recurrence coefficients and power moments.
//!
//! Three parametrizations of the interior of a moment space are kept in sync:
//! power moments `m_1..m_n`, canonical coordinates `y_1..y_n` (one per moment,
//! each ranging over an interval) and the Jacobi recurrence coefficients
//! interleaved as `alpha_1, beta_1, alpha_2, ...`. On the real line the
//! canonical coordinates are the recurrence coefficients themselves.
//!
//! Everything except [`log_jacobian`] and the admissibility search only
//! needs field arithmetic, so the transforms run unchanged over exact
//! rationals.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{halton, nelder_mead, NelderMeadOptions};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Interval01,
    HalfLine,
    RealLine,
}

impl Domain {
    /// Whether `y` is an interior value of the `j`-th canonical coordinate (1-based).
    pub fn contains<T: Scalar>(self, j: usize, y: &T) -> bool {
        match self {
            Domain::Interval01 => *y > T::zero() && *y < T::one(),
            Domain::HalfLine => *y > T::zero(),
            Domain::RealLine => j % 2 == 1 || *y > T::zero(),
        }
    }

    /// Signed distance-like margin of `y` from the boundary of its coordinate
    /// range, capped at one. Negative outside.
    pub fn margin(self, j: usize, y: f64) -> f64 {
        match self {
            Domain::Interval01 => y.min(1.0 - y),
            Domain::HalfLine => y / (1.0 + y.abs()),
            Domain::RealLine if j.is_multiple_of(2) => y / (1.0 + y.abs()),
            Domain::RealLine => 1.0,
        }
    }

    /// Map an unconstrained real number onto the interior of coordinate `j`.
    pub fn from_unbounded(self, j: usize, u: f64) -> f64 {
        match self {
            Domain::Interval01 => 1.0 / (1.0 + (-u).exp()),
            Domain::HalfLine => u.exp(),
            Domain::RealLine if j.is_multiple_of(2) => u.exp(),
            Domain::RealLine => u,
        }
    }

    pub fn to_unbounded(self, j: usize, y: f64) -> f64 {
        match self {
            Domain::Interval01 => (y / (1.0 - y)).ln(),
            Domain::HalfLine => y.ln(),
            Domain::RealLine if j.is_multiple_of(2) => y.ln(),
            Domain::RealLine => y,
        }
    }

    /// Log of the factor whose power enters the Jacobian for coordinate `j`,
    /// or `None` when the coordinate carries no factor.
    pub fn log_factor(self, j: usize, y: f64) -> Option<f64> {
        match self {
            Domain::Interval01 => Some((y * (1.0 - y)).ln()),
            Domain::HalfLine => Some(y.ln()),
            Domain::RealLine if j.is_multiple_of(2) => Some(y.ln()),
            Domain::RealLine => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Interval01 => "interval01",
            Domain::HalfLine => "halfline",
            Domain::RealLine => "realline",
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "interval01" | "[0,1]" | "unit" => Ok(Domain::Interval01),
            "halfline" | "[0,inf)" | "positive" => Ok(Domain::HalfLine),
            "realline" | "real" | "r" => Ok(Domain::RealLine),
            other => Err(Error::InvalidInput(format!("unknown domain `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalCoordinates<T> {
    pub domain: Domain,
    pub values: Vec<T>,
}

impl<T: Scalar> CanonicalCoordinates<T> {
    /// Checked constructor: every coordinate must be interior.
    pub fn new(domain: Domain, values: Vec<T>) -> Result<Self> {
        for (i, y) in values.iter().enumerate() {
            if !domain.contains(i + 1, y) {
                return Err(Error::OutOfRange { index: i + 1 });
            }
        }
        Ok(Self { domain, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based access.
    pub fn get(&self, j: usize) -> &T {
        &self.values[j - 1]
    }
}

/// Jacobi recurrence coefficients `alpha_1..alpha_a`, `beta_1..beta_b` with
/// `b` equal to `a` or `a - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceCoefficients<T> {
    pub alphas: Vec<T>,
    pub betas: Vec<T>,
}

impl<T: Scalar> RecurrenceCoefficients<T> {
    pub fn new(alphas: Vec<T>, betas: Vec<T>) -> Result<Self> {
        let a = alphas.len();
        if betas.len() != a && betas.len() + 1 != a {
            return Err(Error::InvalidInput(format!(
                "{a} alphas need {a} or {} betas, got {}",
                a.saturating_sub(1),
                betas.len()
            )));
        }
        Ok(Self { alphas, betas })
    }

    /// Build from the interleaved sequence `alpha_1, beta_1, alpha_2, ...`.
    pub fn from_interleaved(seq: &[T]) -> Self {
        let alphas = seq.iter().step_by(2).cloned().collect();
        let betas = seq.iter().skip(1).step_by(2).cloned().collect();
        Self { alphas, betas }
    }

    pub fn interleaved(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len());
        for (i, a) in self.alphas.iter().enumerate() {
            out.push(a.clone());
            if let Some(b) = self.betas.get(i) {
                out.push(b.clone());
            }
        }
        out
    }

    /// Number of moments the coefficients determine.
    pub fn len(&self) -> usize {
        self.alphas.len() + self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector<T> {
    pub domain: Domain,
    /// `m_1..m_n`; `m_0 = 1` is implicit.
    pub values: Vec<T>,
}

impl<T: Scalar> MomentVector<T> {
    pub fn new(domain: Domain, values: Vec<T>) -> Self {
        Self { domain, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Moment constraint `m_{i_1} = c_1, ..., m_{i_k} = c_k` with `i_1 < ... < i_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint<T = f64> {
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Clone> Constraint<T> {
    pub fn new(pairs: Vec<(usize, T)>) -> Result<Self> {
        let mut last = 0;
        for (i, _) in &pairs {
            if *i <= last {
                return Err(Error::InvalidInput(
                    "constraint indices must be positive and strictly increasing".into(),
                ));
            }
            last = *i;
        }
        let (indices, values) = pairs.into_iter().unzip();
        Ok(Self { indices, values })
    }

    pub fn empty() -> Self {
        Self {
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    /// Largest constrained index `i_k`, zero when unconstrained.
    pub fn last_index(&self) -> usize {
        self.indices.last().copied().unwrap_or(0)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value_at(&self, j: usize) -> Option<&T> {
        self.indices
            .iter()
            .position(|&i| i == j)
            .map(|p| &self.values[p])
    }

    pub fn is_constrained(&self, j: usize) -> bool {
        self.indices.contains(&j)
    }

    /// Number of constrained indices strictly above `j`.
    pub fn count_above(&self, j: usize) -> usize {
        self.indices.iter().filter(|&&i| i > j).count()
    }

    /// Unconstrained indices in `1..=n`.
    pub fn free_indices(&self, n: usize) -> Vec<usize> {
        (1..=n).filter(|j| !self.is_constrained(*j)).collect()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, &T)> {
        self.indices.iter().copied().zip(self.values.iter())
    }
}

/// Recurrence coefficients from a coordinate prefix without range checks.
/// Boundary values are allowed, which is what [`moment_range`] relies on.
pub fn coordinates_to_recurrence_raw<T: Scalar>(
    domain: Domain,
    ys: &[T],
) -> RecurrenceCoefficients<T> {
    let n = ys.len();
    let y = |i: isize| -> T {
        if i <= 0 {
            T::zero()
        } else {
            ys[i as usize - 1].clone()
        }
    };
    let q = |i: isize| T::one() - y(i);
    let mut seq = Vec::with_capacity(n);
    for k in 1..=n as isize {
        let c = match (domain, k % 2) {
            (Domain::Interval01, 1) => q(k - 2) * y(k - 1) + q(k - 1) * y(k),
            (Domain::Interval01, _) => q(k - 2) * y(k - 1) * q(k - 1) * y(k),
            (Domain::HalfLine, 1) => y(k - 1) + y(k),
            (Domain::HalfLine, _) => y(k - 1) * y(k),
            (Domain::RealLine, _) => y(k),
        };
        seq.push(c);
    }
    RecurrenceCoefficients::from_interleaved(&seq)
}

pub fn canonical_to_recurrence<T: Scalar>(
    coords: &CanonicalCoordinates<T>,
) -> Result<RecurrenceCoefficients<T>> {
    for (i, y) in coords.values.iter().enumerate() {
        if !coords.domain.contains(i + 1, y) {
            return Err(Error::OutOfRange { index: i + 1 });
        }
    }
    Ok(coordinates_to_recurrence_raw(coords.domain, &coords.values))
}

pub fn recurrence_to_canonical<T: Scalar>(
    domain: Domain,
    rec: &RecurrenceCoefficients<T>,
) -> Result<CanonicalCoordinates<T>> {
    let seq = rec.interleaved();
    let mut ys: Vec<T> = Vec::with_capacity(seq.len());
    for (idx, c) in seq.iter().enumerate() {
        let k = idx + 1;
        let y = |i: usize| -> T {
            if i == 0 {
                T::zero()
            } else {
                ys[i - 1].clone()
            }
        };
        let yk = match (domain, k % 2) {
            (Domain::Interval01, 1) => {
                let prev = if k >= 2 {
                    (T::one() - if k >= 3 { y(k - 2) } else { T::zero() }) * y(k - 1)
                } else {
                    T::zero()
                };
                let denom = T::one() - y(k - 1);
                (c.clone() - prev) / denom
            }
            (Domain::Interval01, _) => {
                let q2 = T::one() - if k >= 3 { y(k - 2) } else { T::zero() };
                let denom = q2 * y(k - 1) * (T::one() - y(k - 1));
                c.clone() / denom
            }
            (Domain::HalfLine, 1) => c.clone() - y(k - 1),
            (Domain::HalfLine, _) => c.clone() / y(k - 1),
            (Domain::RealLine, _) => c.clone(),
        };
        if !domain.contains(k, &yk) {
            return Err(Error::OutOfRange { index: k });
        }
        ys.push(yk);
    }
    Ok(CanonicalCoordinates { domain, values: ys })
}

/// Moments `m_1..m_n` of any measure with the given leading recurrence
/// coefficients, computed as `(J^l)_{1,1}` through the unsymmetrized
/// tridiagonal matrix so no square roots are needed.
///
/// Coefficients that are not supplied are never reached by the paths that
/// contribute to `m_l` for `l <= rec.len()`.
pub fn recurrence_moments<T: Scalar>(rec: &RecurrenceCoefficients<T>, n: usize) -> Vec<T> {
    let levels = n / 2 + 2;
    let alpha = |i: usize| rec.alphas.get(i).cloned().unwrap_or_else(T::zero);
    let beta = |i: usize| {
        if i == 0 {
            T::zero()
        } else {
            rec.betas.get(i - 1).cloned().unwrap_or_else(T::zero)
        }
    };
    let mut row = vec![T::zero(); levels + 1];
    row[0] = T::one();
    let mut out = Vec::with_capacity(n);
    for step in 1..=n {
        // only levels that can still return to level 0 matter
        let reach = (n - step + 1).min(step).min(levels - 1);
        let mut next = vec![T::zero(); levels + 1];
        for j in 0..=reach {
            let mut v = row[j].clone() * alpha(j);
            if j > 0 {
                v = v + row[j - 1].clone() * beta(j);
            }
            v = v + row[j + 1].clone();
            next[j] = v;
        }
        row = next;
        out.push(row[0].clone());
    }
    out
}

pub fn canonical_to_moments<T: Scalar>(
    coords: &CanonicalCoordinates<T>,
) -> Result<MomentVector<T>> {
    let rec = canonical_to_recurrence(coords)?;
    Ok(MomentVector {
        domain: coords.domain,
        values: recurrence_moments(&rec, coords.len()),
    })
}

/// Moment sequence for a coordinate vector that may touch the boundary.
pub(crate) fn coordinates_to_moments_raw<T: Scalar>(domain: Domain, ys: &[T]) -> Vec<T> {
    recurrence_moments(&coordinates_to_recurrence_raw(domain, ys), ys.len())
}

/// Chebyshev's algorithm: recurrence coefficients from power moments.
///
/// Each Hankel ratio `beta_k` is the quotient of a difference of terms.
/// When that difference is within `tol` of the size of its terms the
/// vector is reported as [`Error::Boundary`]; when it is clearly negative,
/// as [`Error::NotAMomentVector`]. In binary64 the map is reliable up to
/// about twelve moments, less for fast growing moment sequences.
pub fn moments_to_recurrence<T: Scalar>(m: &MomentVector<T>) -> Result<RecurrenceCoefficients<T>> {
    let n = m.len();
    let mut mom = Vec::with_capacity(n + 1);
    mom.push(T::one());
    mom.extend(m.values.iter().cloned());
    let tol = T::boundary_tolerance();

    let mut alphas = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    if n == 0 {
        return Ok(RecurrenceCoefficients { alphas, betas });
    }
    alphas.push(mom[1].clone() / mom[0].clone());

    // rows of sigma_k(l) = int P_k(x) x^l dmu
    let mut prev2 = vec![T::zero(); n + 1];
    let mut prev = mom;
    let mut k = 1;
    while 2 * k <= n {
        let a_k = alphas[k - 1].clone();
        let b_km1 = if k >= 2 {
            betas[k - 2].clone()
        } else {
            T::zero()
        };
        let mut row = vec![T::zero(); n + 1];
        let mut size = T::zero();
        for l in k..=n - k {
            let t1 = prev[l + 1].clone();
            let t2 = a_k.clone() * prev[l].clone();
            let t3 = b_km1.clone() * prev2[l].clone();
            if l == k {
                size = t1.abs() + t2.abs() + t3.abs();
            }
            row[l] = t1 - t2 - t3;
        }
        let slack = tol.clone() * size;
        if row[k] < -slack.clone() {
            return Err(Error::NotAMomentVector { index: k });
        }
        if row[k] <= slack {
            return Err(Error::Boundary { index: k });
        }
        betas.push(row[k].clone() / prev[k - 1].clone());
        if 2 * k < n {
            let alpha = row[k + 1].clone() / row[k].clone() - prev[k].clone() / prev[k - 1].clone();
            alphas.push(alpha);
        }
        prev2 = prev;
        prev = row;
        k += 1;
    }
    Ok(RecurrenceCoefficients { alphas, betas })
}

/// What coordinate `j` is pinned to during a sequential solve.
#[derive(Debug, Clone)]
pub(crate) enum Target<T> {
    Coordinate(T),
    Moment(T),
}

/// Solve for canonical coordinates one index at a time. Each moment `m_j`
/// is affine in `y_j` once `y_1..y_{j-1}` are fixed, so a moment target is
/// met by one division. Solved coordinates are not range checked.
pub(crate) fn solve_sequential<T: Scalar>(domain: Domain, targets: &[Target<T>]) -> Vec<T> {
    let mut ys: Vec<T> = Vec::with_capacity(targets.len());
    for t in targets {
        match t {
            Target::Coordinate(y) => ys.push(y.clone()),
            Target::Moment(c) => {
                let j = ys.len() + 1;
                ys.push(T::zero());
                let lo = coordinates_to_moments_raw(domain, &ys)[j - 1].clone();
                ys[j - 1] = T::one();
                let hi = coordinates_to_moments_raw(domain, &ys)[j - 1].clone();
                ys[j - 1] = (c.clone() - lo.clone()) / (hi - lo);
            }
        }
    }
    ys
}

/// Canonical coordinates of an interior moment vector by the sequential
/// affine solve. Mathematically equal to
/// `recurrence_to_canonical(moments_to_recurrence(m))`.
pub fn moments_to_canonical<T: Scalar>(m: &MomentVector<T>) -> Result<CanonicalCoordinates<T>> {
    let targets: Vec<_> = m.values.iter().cloned().map(Target::Moment).collect();
    let ys = solve_sequential(m.domain, &targets);
    let tol = T::boundary_tolerance();
    for (i, y) in ys.iter().enumerate() {
        let j = i + 1;
        if !m.domain.contains(j, y) {
            let near = match m.domain {
                Domain::Interval01 => y.abs() <= tol || (y.clone() - T::one()).abs() <= tol,
                Domain::HalfLine => y.abs() <= tol,
                Domain::RealLine => y.abs() <= tol,
            };
            return Err(if near {
                Error::Boundary { index: j }
            } else {
                Error::OutOfRange { index: j }
            });
        }
    }
    Ok(CanonicalCoordinates {
        domain: m.domain,
        values: ys,
    })
}

/// Attainable range of `m_{n+1}` given `m_1..m_n`. `None` marks an
/// unbounded side.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRange<T> {
    pub lower: Option<T>,
    pub upper: Option<T>,
}

impl<T: Scalar> MomentRange<T> {
    pub fn width(&self) -> Option<T> {
        match (&self.lower, &self.upper) {
            (Some(a), Some(b)) => Some(b.clone() - a.clone()),
            _ => None,
        }
    }
}

pub fn moment_range<T: Scalar>(m: &MomentVector<T>) -> Result<MomentRange<T>> {
    let coords = moments_to_canonical(m)?;
    let n = m.len();
    let extended = |y: T| {
        let mut ys = coords.values.clone();
        ys.push(y);
        coordinates_to_moments_raw(m.domain, &ys)[n].clone()
    };
    Ok(match m.domain {
        Domain::Interval01 => MomentRange {
            lower: Some(extended(T::zero())),
            upper: Some(extended(T::one())),
        },
        Domain::HalfLine => MomentRange {
            lower: Some(extended(T::zero())),
            upper: None,
        },
        Domain::RealLine if n % 2 == 1 => MomentRange {
            // m_{n+1} is even: bounded below by beta_{(n+1)/2} = 0
            lower: Some(extended(T::zero())),
            upper: None,
        },
        Domain::RealLine => MomentRange {
            lower: None,
            upper: None,
        },
    })
}

/// Complete a vector of unconstrained coordinates so that the constraint
/// holds. `partial` lists `y_j` for the unconstrained indices in order; the
/// result has length `partial.len() + k`.
pub fn constrained_fill<T: Scalar>(
    partial: &[T],
    constraint: &Constraint<T>,
    domain: Domain,
) -> Result<CanonicalCoordinates<T>> {
    let n = partial.len() + constraint.k();
    if constraint.last_index() > n {
        return Err(Error::InvalidInput(format!(
            "constraint index {} exceeds dimension {n}",
            constraint.last_index()
        )));
    }
    let targets = fill_targets(partial, constraint, n);
    let ys = solve_sequential(domain, &targets);
    for (i, y) in ys.iter().enumerate() {
        if !domain.contains(i + 1, y) {
            return Err(if constraint.is_constrained(i + 1) {
                Error::Infeasible { index: i + 1 }
            } else {
                Error::OutOfRange { index: i + 1 }
            });
        }
    }
    Ok(CanonicalCoordinates { domain, values: ys })
}

pub(crate) fn fill_targets<T: Clone>(
    partial: &[T],
    constraint: &Constraint<T>,
    n: usize,
) -> Vec<Target<T>> {
    let mut free = partial.iter();
    (1..=n)
        .map(|j| match constraint.value_at(j) {
            Some(c) => Target::Moment(c.clone()),
            None => Target::Coordinate(free.next().expect("enough free coordinates").clone()),
        })
        .collect()
}

/// Log of the Jacobian of the map from the unconstrained canonical
/// coordinates to the unconstrained moments. `coords` holds all `n`
/// coordinates, constrained ones included. Returns `-inf` on the boundary.
pub fn log_jacobian<T: Scalar + Float>(
    coords: &CanonicalCoordinates<T>,
    constraint: &Constraint<T>,
) -> T {
    let n = coords.len();
    let mut acc = T::zero();
    for (i, y) in coords.values.iter().enumerate() {
        let j = i + 1;
        let exponent = n as isize - j as isize - constraint.count_above(j) as isize;
        let factor = match coords.domain {
            Domain::Interval01 => *y * (T::one() - *y),
            Domain::HalfLine => *y,
            Domain::RealLine if j % 2 == 0 => *y,
            Domain::RealLine => continue,
        };
        if exponent == 0 {
            continue;
        }
        if factor <= T::zero() {
            return T::neg_infinity();
        }
        acc = acc + T::from(exponent).unwrap() * factor.ln();
    }
    acc
}

/// Smallest boundary margin over the first `i_k` coordinates when the free
/// ones are `free` (already mapped into their ranges).
pub(crate) fn head_margin(
    free: &[f64],
    constraint: &Constraint<f64>,
    domain: Domain,
) -> (f64, Vec<f64>) {
    let ik = constraint.last_index();
    let targets = fill_targets(free, constraint, ik);
    let ys = solve_sequential(domain, &targets);
    let margin = ys
        .iter()
        .enumerate()
        .map(|(i, y)| {
            if y.is_finite() {
                domain.margin(i + 1, *y)
            } else {
                -1.0
            }
        })
        .fold(1.0, f64::min);
    (margin, ys)
}

/// Margin an interior point must clear to count as admissible.
pub const ADMISSIBILITY_MARGIN: f64 = 1e-9;

/// Search for a point of the constrained head block `y_1..y_{i_k}` whose
/// coordinates all lie well inside their ranges. Returns the point with
/// the largest boundary margin, or `None` if no start clears the margin.
pub fn interior_point(
    constraint: &Constraint<f64>,
    domain: Domain,
) -> Option<CanonicalCoordinates<f64>> {
    let ik = constraint.last_index();
    let free_idx = constraint.free_indices(ik);
    let d = free_idx.len();
    let to_free = |u: &[f64]| -> Vec<f64> {
        u.iter()
            .zip(&free_idx)
            .map(|(u, &j)| domain.from_unbounded(j, *u))
            .collect()
    };
    let objective = |u: &[f64]| -> f64 {
        let (m, _) = head_margin(&to_free(u), constraint, domain);
        if m.is_nan() {
            f64::INFINITY
        } else {
            -m
        }
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let starts = if d == 0 { 1 } else { 16 };
    for s in 0..starts {
        let u0: Vec<f64> = (0..d)
            .map(|c| {
                let h = halton(s + 1, c);
                (h / (1.0 - h)).ln()
            })
            .collect();
        let u = if d == 0 {
            u0
        } else {
            nelder_mead(
                &objective,
                &u0,
                &NelderMeadOptions {
                    initial_step: 0.5,
                    max_iter: 400 * d,
                    ftol: 1e-12,
                    xtol: 1e-10,
                },
            )
            .x
        };
        let value = -objective(&u);
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, u));
        }
        if let Some((b, _)) = &best {
            if *b > 0.05 {
                break;
            }
        }
    }
    let (margin, u) = best?;
    if margin <= ADMISSIBILITY_MARGIN {
        return None;
    }
    let (_, ys) = head_margin(&to_free(&u), constraint, domain);
    Some(CanonicalCoordinates { domain, values: ys })
}

/// Whether some measure on the domain satisfies the constraint with all
/// canonical coordinates interior.
pub fn is_admissible(constraint: &Constraint<f64>, domain: Domain) -> bool {
    interior_point(constraint, domain).is_some()
}

/// Moments of the arcsine law on `[0,1]`: `binom(2l, l) / 4^l`.
pub fn arcsine_moments(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut m = 1.0;
    for l in 1..=n {
        m *= (2 * l - 1) as f64 / (2 * l) as f64;
        out.push(m);
    }
    out
}
