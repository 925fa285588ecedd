//! Small unconstrained optimizers used by the limit solvers.
//!
//! Objectives may return `+inf` outside their feasible set; line searches
//! backtrack until the value is finite again.

use nalgebra::{DMatrix, DVector};

const PRIMES: [usize; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Component `dim` of the `index`-th Halton point, in `(0, 1)`.
pub fn halton(index: usize, dim: usize) -> f64 {
    let base = PRIMES[dim % PRIMES.len()];
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

pub fn fd_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// Five-point central difference gradient. `None` if any probe is not finite.
pub fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Option<Vec<f64>> {
    let mut scale = 1.0;
    'retry: for _ in 0..4 {
        let mut g = Vec::with_capacity(x.len());
        let mut xp = x.to_vec();
        for i in 0..x.len() {
            let h = fd_step(x[i]) * scale;
            let mut probe = |t: f64| {
                xp[i] = x[i] + t * h;
                let v = f(&xp);
                xp[i] = x[i];
                v
            };
            let v = [probe(2.0), probe(1.0), probe(-1.0), probe(-2.0)];
            if v.iter().any(|p| !p.is_finite()) {
                scale *= 0.1;
                continue 'retry;
            }
            g.push((8.0 * (v[1] - v[2]) - (v[0] - v[3])) / (12.0 * h));
        }
        return Some(g);
    }
    None
}

/// Central difference Hessian. `None` if any probe is not finite.
pub fn fd_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Option<DMatrix<f64>> {
    hessian_with_step(f, x, 1.0, 4)
}

/// Richardson-extrapolated Hessian on a coarser step. Fourth order, with
/// far less rounding noise than [`fd_hessian`].
pub fn fd_hessian_fine(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Option<DMatrix<f64>> {
    [200.0, 20.0, 2.0].into_iter().find_map(|s| {
        let coarse = hessian_with_step(f, x, s, 1)?;
        let fine = hessian_with_step(f, x, 0.5 * s, 1)?;
        Some((fine * 4.0 - coarse) / 3.0)
    })
}

fn hessian_with_step(
    f: &dyn Fn(&[f64]) -> f64,
    x: &[f64],
    mut scale: f64,
    tries: usize,
) -> Option<DMatrix<f64>> {
    let d = x.len();
    'retry: for _ in 0..tries {
        let f0 = f(x);
        let h: Vec<f64> = x.iter().map(|v| fd_step(*v) * scale).collect();
        let mut hess = DMatrix::zeros(d, d);
        let mut xp = x.to_vec();
        for i in 0..d {
            xp[i] = x[i] + h[i];
            let fp = f(&xp);
            xp[i] = x[i] - h[i];
            let fm = f(&xp);
            xp[i] = x[i];
            if !fp.is_finite() || !fm.is_finite() {
                scale *= 0.1;
                continue 'retry;
            }
            hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
            for j in 0..i {
                let mut probe = |si: f64, sj: f64| {
                    xp[i] = x[i] + si * h[i];
                    xp[j] = x[j] + sj * h[j];
                    let v = f(&xp);
                    xp[i] = x[i];
                    xp[j] = x[j];
                    v
                };
                let vals = [
                    probe(1.0, 1.0),
                    probe(1.0, -1.0),
                    probe(-1.0, 1.0),
                    probe(-1.0, -1.0),
                ];
                if vals.iter().any(|v| !v.is_finite()) {
                    scale *= 0.1;
                    continue 'retry;
                }
                let v = (vals[0] - vals[1] - vals[2] + vals[3]) / (4.0 * h[i] * h[j]);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        return Some(hess);
    }
    None
}

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    pub max_iter: usize,
    pub ftol: f64,
    pub xtol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            max_iter: 2000,
            ftol: 1e-14,
            xtol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
}

pub fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    let d = x0.len();
    if d == 0 {
        return NelderMeadResult {
            x: Vec::new(),
            value: f(x0),
        };
    }
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step * x0[i].abs().max(1.0);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for _ in 0..opts.max_iter {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[d] - values[0];
        let size = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.is_finite()
            && spread.abs() <= opts.ftol * (1.0 + values[0].abs())
            && size <= opts.xtol
        {
            break;
        }

        let centroid: Vec<f64> = (0..d)
            .map(|c| simplex[..d].iter().map(|v| v[c]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[d] = xe;
                values[d] = fe;
            } else {
                simplex[d] = xr;
                values[d] = fr;
            }
        } else if fr < values[d - 1] {
            simplex[d] = xr;
            values[d] = fr;
        } else {
            let (xc, fc) = if fr < values[d] {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < values[d].min(fr) {
                simplex[d] = xc;
                values[d] = fc;
            } else {
                for i in 1..=d {
                    let shrunk: Vec<f64> = simplex[i]
                        .iter()
                        .zip(&simplex[0])
                        .map(|(v, b)| b + 0.5 * (v - b))
                        .collect();
                    values[i] = f(&shrunk);
                    simplex[i] = shrunk;
                }
            }
        }
    }
    let best = (0..=d)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap();
    NelderMeadResult {
        x: simplex[best].clone(),
        value: values[best],
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOptions {
    pub step_tol: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            step_tol: 1e-10,
            grad_tol: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LocalMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub converged: bool,
}

/// Damped Newton with Armijo backtracking and finite-difference
/// derivatives. Falls back to Nelder-Mead once when Newton stalls away
/// from a stationary point.
pub fn minimize(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &NewtonOptions) -> LocalMinimum {
    let first = newton(f, x0, opts);
    if first.converged || x0.is_empty() {
        return first;
    }
    let nm = nelder_mead(f, &first.x, &NelderMeadOptions::default());
    let second = newton(f, &nm.x, opts);
    if second.value <= first.value {
        second
    } else {
        first
    }
}

fn newton(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &NewtonOptions) -> LocalMinimum {
    let d = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if d == 0 {
        return LocalMinimum {
            x,
            value: fx,
            gradient_norm: 0.0,
            converged: fx.is_finite(),
        };
    }
    let mut gnorm = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let Some(g) = fd_gradient(f, &x) else { break };
        gnorm = g.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let Some(h) = fd_hessian(f, &x) else { break };
        let gv = DVector::from_vec(g.clone());
        let dir = newton_direction(&h, &gv);

        let slope = gv.dot(&dir);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(dir.iter()).map(|(a, b)| a + t * b).collect();
            let ft = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * t * slope {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        // near the optimum f stops resolving the decrease; accept a full
        // step that shrinks the gradient instead
        let accepted = accepted.or_else(|| {
            let trial: Vec<f64> = x.iter().zip(dir.iter()).map(|(a, b)| a + b).collect();
            let ft = f(&trial);
            let gt = fd_gradient(f, &trial)?;
            let gt_norm = gt.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            (ft.is_finite() && gt_norm < 0.5 * gnorm).then_some((trial, ft))
        });
        let Some((xn, fxn)) = accepted else {
            return LocalMinimum {
                converged: gnorm < opts.grad_tol,
                x,
                value: fx,
                gradient_norm: gnorm,
            };
        };
        let step = xn
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = xn;
        fx = fxn;
        if step < opts.step_tol * (1.0 + x.iter().fold(0.0_f64, |a, v| a.max(v.abs())))
            || gnorm < opts.grad_tol * 1e-3
        {
            let g = fd_gradient(f, &x).unwrap_or_else(|| vec![f64::INFINITY]);
            gnorm = g.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            return LocalMinimum {
                converged: gnorm < opts.grad_tol,
                x,
                value: fx,
                gradient_norm: gnorm,
            };
        }
    }
    LocalMinimum {
        converged: gnorm < opts.grad_tol,
        x,
        value: fx,
        gradient_norm: gnorm,
    }
}

/// Newton direction with Levenberg shifts until the Hessian is positive
/// definite.
fn newton_direction(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let d = h.nrows();
    let scale = (0..d).map(|i| h[(i, i)].abs()).fold(1e-12, f64::max);
    let mut shift = 0.0;
    for _ in 0..30 {
        let shifted = h + DMatrix::identity(d, d) * shift;
        if let Some(ch) = shifted.cholesky() {
            return -ch.solve(g);
        }
        shift = if shift == 0.0 {
            1e-8 * scale
        } else {
            shift * 10.0
        };
    }
    -g / scale
}
