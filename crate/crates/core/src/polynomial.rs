//! Dense polynomials in the monomial basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Coefficients in ascending order: `c_0 + c_1 x + ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial<T> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut p = Self { coeffs };
        p.strip_zeros();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `x - a`
    pub fn linear_root(a: T) -> Self {
        Self::new(vec![-a, T::one()])
    }

    fn strip_zeros(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_usize(i))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(T::zero);
                    let b = other.coeffs.get(i).cloned().unwrap_or_else(T::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree();
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].clone() - c.clone() * d.clone();
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }
}

impl Polynomial<f64> {
    /// Drop leading coefficients below `rel` times the largest coefficient.
    pub fn trimmed(&self, rel: f64) -> Self {
        let big = self.coeffs.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.abs() <= rel * big) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// All complex roots: companion matrix eigenvalues, then Newton polish.
    pub fn roots(&self) -> Vec<Complex64> {
        let p = self.trimmed(1e-14);
        let n = p.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = p.leading();
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -p.coeffs[i] / lead;
        }
        let dp = p.derivative();
        companion
            .complex_eigenvalues()
            .iter()
            .map(|z0| {
                let mut z = *z0;
                for _ in 0..8 {
                    let d = dp.eval_complex(z);
                    if d.norm() == 0.0 {
                        break;
                    }
                    let step = p.eval_complex(z) / d;
                    let candidate = z - step;
                    if p.eval_complex(candidate).norm() > p.eval_complex(z).norm() {
                        break;
                    }
                    z = candidate;
                    if step.norm() <= 1e-16 * z.norm().max(1.0) {
                        break;
                    }
                }
                z
            })
            .collect()
    }

    /// Real roots in ascending order. A root counts as real when its
    /// imaginary part is below `1e-8 * max(1, |z|)`.
    pub fn real_roots(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .roots()
            .into_iter()
            .filter(|z| z.im.abs() < 1e-8 * z.norm().max(1.0))
            .map(|z| z.re)
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }
}
