//! Probability measures whose recurrence coefficients are eventually
//! constant, and the Bernstein-Szego family on `[0, 1]`.
//!
//! Such a measure has an absolutely continuous part of the form
//! `prefactor * reference(x) / D(x)` on an interval plus finitely many
//! atoms outside it, at real zeros of the polynomial `D`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::{coordinates_to_recurrence_raw, Domain, RecurrenceCoefficients};
use crate::error::{Error, Result};
use crate::polynomial::Polynomial;
use crate::spectral::SpectralMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceDensity {
    /// `1 / sqrt((x - a)(b - x))`
    ArcsineLike,
    /// `sqrt((x - a)(b - x))`
    SemicircleLike,
    /// `sqrt((x - a)(b - x)) / x`
    MarchenkoPasturLike,
}

/// The denominator written as `scale ((x - a)(b - x) edge(x)^2 + plain(x)^2)`.
/// Near the support edges this keeps full relative accuracy where the
/// expanded coefficients cancel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumOfSquares {
    pub edge: Polynomial<f64>,
    pub plain: Polynomial<f64>,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcPart {
    pub reference: ReferenceDensity,
    pub support: (f64, f64),
    pub prefactor: f64,
    pub denominator: Polynomial<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squares: Option<SumOfSquares>,
}

impl AcPart {
    pub fn denominator_at(&self, x: f64) -> f64 {
        match &self.squares {
            Some(sq) => {
                let (a, b) = self.support;
                let e = sq.edge.eval(&x);
                let p = sq.plain.eval(&x);
                sq.scale * ((x - a) * (b - x) * e * e + p * p)
            }
            None => self.denominator.eval(&x),
        }
    }

    /// Density at an interior point of the support.
    pub fn density(&self, x: f64) -> f64 {
        let (a, b) = self.support;
        let s = ((x - a) * (b - x)).sqrt();
        let r = match self.reference {
            ReferenceDensity::ArcsineLike => 1.0 / s,
            ReferenceDensity::SemicircleLike => s,
            ReferenceDensity::MarchenkoPasturLike => s / x,
        };
        self.prefactor * r / self.denominator_at(x)
    }

    /// `int g(x) density(x) dx` after the substitution
    /// `x = c - r cos(theta)`, which turns the edge behaviour into a smooth
    /// periodic integrand. Midpoint rule, refined until two levels agree.
    pub fn integrate(&self, g: &dyn Fn(f64) -> f64) -> f64 {
        let (a, b) = self.support;
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        let h = |theta: f64| -> f64 {
            let x = c - r * theta.cos();
            let s = theta.sin();
            let w = match self.reference {
                ReferenceDensity::ArcsineLike => 1.0,
                ReferenceDensity::SemicircleLike => r * r * s * s,
                ReferenceDensity::MarchenkoPasturLike => r * r * s * s / x,
            };
            g(x) * w / self.denominator_at(x)
        };
        let rule = |n: usize| -> f64 {
            let dt = PI / n as f64;
            (0..n).map(|i| h((i as f64 + 0.5) * dt)).sum::<f64>() * dt
        };
        let mut n = 64;
        let mut prev = rule(n);
        while n < 1 << 18 {
            n *= 2;
            let next = rule(n);
            if (next - prev).abs() <= 1e-14 * next.abs().max(1e-300) {
                return self.prefactor * next;
            }
            prev = next;
        }
        self.prefactor * prev
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub ac: Option<AcPart>,
    pub atoms: Vec<Atom>,
}

impl Measure {
    pub fn total_mass(&self) -> f64 {
        measure_moment(self, 0)
    }

    /// Smallest interval containing the support.
    pub fn hull(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        if let Some(ac) = &self.ac {
            lo = ac.support.0;
            hi = ac.support.1;
        }
        for a in &self.atoms {
            lo = lo.min(a.location);
            hi = hi.max(a.location);
        }
        (lo, hi)
    }
}

impl From<SpectralMeasure<f64>> for Measure {
    fn from(s: SpectralMeasure<f64>) -> Self {
        Measure {
            ac: None,
            atoms: s
                .nodes
                .into_iter()
                .zip(s.weights)
                .map(|(location, weight)| Atom { location, weight })
                .collect(),
        }
    }
}

pub fn measure_moment(mu: &Measure, k: usize) -> f64 {
    let atoms: f64 = mu
        .atoms
        .iter()
        .map(|a| a.weight * a.location.powi(k as i32))
        .sum();
    let ac = mu
        .ac
        .as_ref()
        .map_or(0.0, |ac| ac.integrate(&|x| x.powi(k as i32)));
    atoms + ac
}

pub fn density_at(mu: &Measure, x: f64) -> Result<f64> {
    match &mu.ac {
        Some(ac) if x > ac.support.0 && x < ac.support.1 => Ok(ac.density(x)),
        _ => Err(Error::OutsideSupport { x }),
    }
}

/// Head `alpha_1..alpha_j`, `beta_1..beta_{j-1}` followed by the constant
/// tail `alpha_l = alpha` for `l > j` and `beta_l = beta` for `l >= j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSpec {
    pub head: RecurrenceCoefficients<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl TailSpec {
    pub fn new(head: RecurrenceCoefficients<f64>, alpha: f64, beta: f64) -> Result<Self> {
        if head.alphas.is_empty() || head.betas.len() + 1 != head.alphas.len() {
            return Err(Error::InvalidInput(
                "tail head needs j >= 1 alphas and j - 1 betas".into(),
            ));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidInput("tail beta must be positive".into()));
        }
        if let Some(i) = head.betas.iter().position(|b| !(*b > 0.0)) {
            return Err(Error::OutOfRange { index: 2 * (i + 1) });
        }
        Ok(Self { head, alpha, beta })
    }

    /// Accept any coefficient prefix; a trailing `beta` is absorbed by
    /// appending the tail `alpha` to the head.
    pub fn padded(mut head: RecurrenceCoefficients<f64>, alpha: f64, beta: f64) -> Result<Self> {
        if head.betas.len() == head.alphas.len() {
            head.alphas.push(alpha);
        }
        Self::new(head, alpha, beta)
    }

    pub fn j(&self) -> usize {
        self.head.alphas.len()
    }

    pub fn support(&self) -> (f64, f64) {
        let w = 2.0 * self.beta.sqrt();
        (self.alpha - w, self.alpha + w)
    }

    /// Orthogonal polynomials `P_0..P_{j+1}` and secondary polynomials
    /// `Q_0..Q_{j+1}`, the last ones built with the tail coefficients.
    fn polynomials(&self) -> (Vec<Polynomial<f64>>, Vec<Polynomial<f64>>) {
        let j = self.j();
        let alpha = |i: usize| {
            if i <= j {
                self.head.alphas[i - 1]
            } else {
                self.alpha
            }
        };
        let beta = |i: usize| {
            if i < j {
                self.head.betas[i - 1]
            } else {
                self.beta
            }
        };
        let mut p = vec![Polynomial::constant(1.0), Polynomial::linear_root(alpha(1))];
        let mut q = vec![Polynomial::zero(), Polynomial::constant(1.0)];
        for i in 2..=j + 1 {
            let x_a = Polynomial::linear_root(alpha(i));
            let b = beta(i - 1);
            p.push(x_a.mul(&p[i - 1]).sub(&p[i - 2].scale(&b)));
            q.push(x_a.mul(&q[i - 1]).sub(&q[i - 2].scale(&b)));
        }
        (p, q)
    }

    fn head_norm(&self) -> f64 {
        self.head.betas.iter().product()
    }

    /// `D = P_j^2 - P_{j+1} P_{j-1}`.
    pub fn denominator(&self) -> Polynomial<f64> {
        let j = self.j();
        let (p, _) = self.polynomials();
        p[j].mul(&p[j]).sub(&p[j + 1].mul(&p[j - 1])).trimmed(1e-13)
    }
}

/// Stieltjes transform `int dmu(x) / (z - x)` of the semicircle law with
/// centre `alpha` and variance `beta`, on the branch that decays at infinity.
pub fn semicircle_stieltjes(alpha: f64, beta: f64, z: Complex64) -> Complex64 {
    let w = z - alpha;
    let mut root = (w * w - 4.0 * beta).sqrt();
    if root.im < 0.0 || (root.im == 0.0 && root.re * w.re < 0.0) {
        root = -root;
    }
    (w - root) / (2.0 * beta)
}

/// Stieltjes transform of the tail-constant measure, as a finite continued
/// fraction closed by the semicircle transform.
pub fn stieltjes_transform(spec: &TailSpec, z: Complex64) -> Complex64 {
    let j = spec.j();
    let mut acc = spec.beta * semicircle_stieltjes(spec.alpha, spec.beta, z);
    for i in (1..=j).rev() {
        let denom = z - spec.head.alphas[i - 1] - acc;
        if i == 1 {
            return 1.0 / denom;
        }
        acc = spec.head.betas[i - 2] / denom;
    }
    unreachable!("head has at least one alpha")
}

/// Atoms lighter than this are zero weights lost to rounding.
pub const PRUNE_WEIGHT: f64 = 1e-10;

pub fn build_tail_constant_measure(spec: &TailSpec) -> Result<Measure> {
    let j = spec.j();
    let (p, q) = spec.polynomials();
    let d = spec.denominator();
    let h = spec.head_norm();
    let (a, b) = spec.support();

    let (alpha, beta) = (spec.alpha, spec.beta);
    let f = |x: f64| -> f64 {
        let u = x - alpha;
        let z = if x > b { 1.0 } else { -1.0 };
        // (u - z sqrt(u^2 - 4 beta)) without cancellation
        let branch = 4.0 * beta / (u + z * (u * u - 4.0 * beta).max(0.0).sqrt());
        q[j].eval(&x) * p[j].eval(&x) - q[j + 1].eval(&x) * p[j - 1].eval(&x) + 0.5 * h * branch
    };

    let scale = (b - a).max(1.0);
    let mut roots: Vec<f64> = d
        .real_roots()
        .into_iter()
        .filter(|x| *x < a - 1e-12 * scale || *x > b + 1e-12 * scale)
        .collect();
    roots.dedup_by(|x, y| (*x - *y).abs() < 1e-7 * x.abs().max(1.0));

    let mut atoms = Vec::new();
    for x in roots {
        let (g, dg, size) = reciprocal_transform(spec, x);
        if !(g.abs() <= 1e-8 * size) {
            // root of D on the unphysical sheet: weight zero
            continue;
        }
        let weight = if dg.abs() > 1e-9 {
            1.0 / dg.abs()
        } else {
            degenerate_weight(&d, &f, x, a, b)?
        };
        if weight > PRUNE_WEIGHT {
            atoms.push(Atom {
                location: x,
                weight,
            });
        }
    }

    let mu = Measure {
        ac: Some(AcPart {
            reference: ReferenceDensity::SemicircleLike,
            support: (a, b),
            prefactor: h / (2.0 * PI),
            denominator: d,
            squares: Some(SumOfSquares {
                edge: p[j - 1].scale(&0.5),
                plain: p[j].sub(&Polynomial::new(vec![-0.5 * alpha, 0.5]).mul(&p[j - 1])),
                scale: 1.0,
            }),
        }),
        atoms,
    };
    check_mass(&mu)?;
    Ok(mu)
}

/// `1 / S(x)` and its derivative at a real `x` outside the support, by
/// the backward continued fraction, with the size of the largest term for
/// judging cancellation. An atom at `x` is a zero of `1 / S` and its weight
/// is the residue `1 / |(1/S)'(x)|`.
fn reciprocal_transform(spec: &TailSpec, x: f64) -> (f64, f64, f64) {
    let (alpha, beta) = (spec.alpha, spec.beta);
    let u = x - alpha;
    let root = (u * u - 4.0 * beta).max(0.0).sqrt();
    let sign = if u >= 0.0 { 1.0 } else { -1.0 };
    // beta * S_{alpha,beta}(x) on the decaying branch, without cancellation
    let mut acc = 2.0 * beta / (u + sign * root);
    let mut dacc = if root > 0.0 {
        -acc / (sign * root)
    } else {
        f64::INFINITY
    };
    let mut size = x.abs().max(1.0);
    for i in (1..=spec.j()).rev() {
        let den = x - spec.head.alphas[i - 1] - acc;
        let dden = 1.0 - dacc;
        size = size.max(spec.head.alphas[i - 1].abs()).max(acc.abs());
        if i == 1 {
            return (den, dden, size);
        }
        let b = spec.head.betas[i - 2];
        acc = b / den;
        dacc = -b * dden / (den * den);
    }
    unreachable!("head has at least one alpha")
}

/// Limit of `|(x - x0) f(x) / D(x)|` approached from outside the support.
fn degenerate_weight(
    d: &Polynomial<f64>,
    f: &dyn Fn(f64) -> f64,
    x0: f64,
    a: f64,
    b: f64,
) -> Result<f64> {
    let side = if x0 > b {
        1.0
    } else if x0 < a {
        -1.0
    } else {
        1.0
    };
    let vals: Vec<f64> = (3..=7)
        .map(|k| {
            let eps = side * 10f64.powi(-k) * x0.abs().max(1.0);
            (eps * f(x0 + eps) / d.eval(&(x0 + eps))).abs()
        })
        .collect();
    let last = vals[vals.len() - 1];
    let prev = vals[vals.len() - 2];
    if last.is_finite() && (last - prev).abs() <= 1e-6 * last.abs().max(1e-12) {
        Ok(last)
    } else {
        Err(Error::DegenerateRoot { location: x0 })
    }
}

fn check_mass(mu: &Measure) -> Result<()> {
    let mass = mu.total_mass();
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "reconstructed measure has mass {mass}, expected 1"
        )));
    }
    Ok(())
}

/// Bernstein-Szego measure on `[0, 1]` with canonical moments
/// `p_1..p_r` followed by `1/2, 1/2, ...`.
///
/// Its density is `prod(p_i q_i) / (pi R(x) sqrt(x (1 - x)))` with a
/// polynomial `R` of degree at most `r`.
pub fn build_bs01_measure(ps: &[f64]) -> Result<Measure> {
    let r = ps.len();
    for (i, p) in ps.iter().enumerate() {
        if !(*p > 0.0 && *p < 1.0) {
            return Err(Error::OutOfRange { index: i + 1 });
        }
    }
    let j = (r + 4) / 2;
    let mut ys = ps.to_vec();
    ys.resize(2 * j, 0.5);
    let rec = coordinates_to_recurrence_raw(Domain::Interval01, &ys);
    let head = RecurrenceCoefficients {
        alphas: rec.alphas[..j].to_vec(),
        betas: rec.betas[..j - 1].to_vec(),
    };
    let spec = TailSpec::new(head, 0.5, 1.0 / 16.0)?;
    let (p, _) = spec.polynomials();

    // D = A^2 + x(1-x) P_{j-1}^2 / 4 with A divisible by x(1-x)
    let a = p[j].sub(&Polynomial::new(vec![-0.25, 0.5]).mul(&p[j - 1]));
    let x1x = Polynomial::new(vec![0.0, 1.0, -1.0]);
    let (bq, rem) = a.div_rem(&x1x);
    let big = a.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if rem.coeffs.iter().any(|c| c.abs() > 1e-9 * big.max(1e-300)) {
        return Err(Error::InvalidInput("edge factor did not divide out".into()));
    }
    let k = if r.is_multiple_of(2) { 16.0 } else { 4.0 };
    let poly = x1x
        .mul(&bq.mul(&bq))
        .add(&p[j - 1].mul(&p[j - 1]).scale(&0.25))
        .scale(&k);
    let mut coeffs = poly.coeffs;
    let big = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if coeffs.iter().skip(r + 1).any(|c| c.abs() > 1e-9 * big) {
        return Err(Error::InvalidInput("denominator degree exceeds r".into()));
    }
    coeffs.truncate(r + 1);
    let denominator = Polynomial::new(coeffs);

    let prefactor = ps.iter().map(|p| p * (1.0 - p)).product::<f64>() / PI;
    let mu = Measure {
        ac: Some(AcPart {
            reference: ReferenceDensity::ArcsineLike,
            support: (0.0, 1.0),
            prefactor,
            denominator,
            squares: Some(SumOfSquares {
                edge: bq,
                plain: p[j - 1].scale(&0.5),
                scale: k,
            }),
        }),
        atoms: Vec::new(),
    };
    check_mass(&mu)?;
    Ok(mu)
}
