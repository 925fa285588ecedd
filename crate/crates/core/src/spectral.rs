//! Jacobi matrices and their spectral measures.
//!
//! The spectral measure of a symmetric tridiagonal matrix `J` with respect
//! to `e_1` puts mass `v_1^2` at every eigenvalue `lambda` with unit
//! eigenvector `v`. Its first `2N - 1` moments agree with `(J^l)_{1,1}`.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::canonical::RecurrenceCoefficients;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiMatrix<T> {
    pub diagonal: Vec<T>,
    /// `sqrt(beta_1), ..., sqrt(beta_{N-1})`.
    pub offdiagonal: Vec<T>,
}

impl<T: Scalar + Float> JacobiMatrix<T> {
    /// The leading `size x size` block built from recurrence coefficients.
    pub fn from_recurrence(rec: &RecurrenceCoefficients<T>, size: usize) -> Result<Self> {
        if size == 0 || rec.alphas.len() < size || rec.betas.len() + 1 < size {
            return Err(Error::InvalidInput(format!(
                "need {size} alphas and {} betas, have {} and {}",
                size.saturating_sub(1),
                rec.alphas.len(),
                rec.betas.len()
            )));
        }
        let mut offdiagonal = Vec::with_capacity(size - 1);
        for (i, b) in rec.betas[..size - 1].iter().enumerate() {
            if *b <= T::zero() {
                return Err(Error::OutOfRange { index: 2 * (i + 1) });
            }
            offdiagonal.push(b.sqrt());
        }
        Ok(Self {
            diagonal: rec.alphas[..size].to_vec(),
            offdiagonal,
        })
    }

    pub fn size(&self) -> usize {
        self.diagonal.len()
    }

    pub fn trace(&self) -> T {
        self.diagonal.iter().fold(T::zero(), |a, b| a + *b)
    }

    /// `e_1^T J^l e_1` by repeated tridiagonal products.
    pub fn power_moment(&self, l: usize) -> T {
        let n = self.size();
        let mut v = vec![T::zero(); n];
        v[0] = T::one();
        let half = l / 2;
        for _ in 0..half {
            v = self.apply(&v);
        }
        if l.is_multiple_of(2) {
            v.iter().fold(T::zero(), |a, x| a + *x * *x)
        } else {
            let w = self.apply(&v);
            v.iter().zip(&w).fold(T::zero(), |a, (x, y)| a + *x * *y)
        }
    }

    fn apply(&self, v: &[T]) -> Vec<T> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut s = self.diagonal[i] * v[i];
                if i > 0 {
                    s = s + self.offdiagonal[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s = s + self.offdiagonal[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

pub fn jacobi_matrix<T: Scalar + Float>(
    rec: &RecurrenceCoefficients<T>,
    size: usize,
) -> Result<JacobiMatrix<T>> {
    JacobiMatrix::from_recurrence(rec, size)
}

/// Finitely supported measure `sum_i w_i delta_{x_i}` with sorted nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar + Float> SpectralMeasure<T> {
    pub fn moment(&self, l: usize) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |a, (x, w)| a + *w * x.powi(l as i32))
    }
}

/// Eigenvalues and squared first eigenvector components by the implicit
/// QL method, tracking only the first row of the eigenvector matrix.
pub fn spectral_measure<T: Scalar + Float>(j: &JacobiMatrix<T>) -> Result<SpectralMeasure<T>> {
    let n = j.size();
    let mut d = j.diagonal.clone();
    let mut e: Vec<T> = j.offdiagonal.clone();
    e.push(T::zero());
    let mut z = vec![T::zero(); n];
    z[0] = T::one();
    let two = T::one() + T::one();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::InvalidInput("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }

    let mut pairs: Vec<(T, T)> = d.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(SpectralMeasure { nodes, weights })
}
