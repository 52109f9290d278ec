//! Primal-dual interior-point method for the separable power programs behind
//! modulus, gradients and capacity:
//!
//! ```text
//! minimize    sum_i w_i (x_i + o_i)^p      over x >= 0
//! subject to  G x >= h
//! ```
//!
//! with `p >= 1`, `w > 0`, `o >= 0`. Primal iterates stay strictly feasible, so
//! the returned primal value is always attained. The row multipliers are
//! turned into a Lagrangian lower bound, which certifies the relative gap.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub(crate) struct Program {
    pub weights: Vec<f64>,
    pub offsets: Vec<f64>,
    pub p: f64,
    /// Sparse rows of `G`.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Settings {
    pub tol: f64,
    pub max_newton: usize,
    /// Constant added to primal and dual values when the gap is made relative.
    pub shift: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub x: Vec<f64>,
    /// Row multipliers, rescaled to the best dual bound found.
    pub multipliers: Vec<f64>,
    pub primal: f64,
    #[cfg_attr(not(test), allow(dead_code))]
    pub dual: f64,
    /// `(primal - dual) / (primal + shift)`, clamped at zero.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl Program {
    fn n(&self) -> usize {
        self.weights.len()
    }

    pub(crate) fn objective(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.weights.iter().zip(&self.offsets))
            .map(|(xi, (w, o))| w * (xi + o).powf(self.p))
            .sum()
    }

    fn slacks(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, h)| row.iter().map(|&(i, g)| g * x[i]).sum::<f64>() - h)
            .collect()
    }

    /// `min_{x >= 0} w (x + o)^p - a x`, for one coordinate.
    fn conjugate_term(&self, i: usize, a: f64) -> f64 {
        let (w, o, p) = (self.weights[i], self.offsets[i], self.p);
        if p == 1.0 {
            return if a <= w { w * o } else { f64::NEG_INFINITY };
        }
        if a <= p * w * o.powf(p - 1.0) {
            return w * o.powf(p);
        }
        let u = (a / (p * w)).powf(1.0 / (p - 1.0));
        w * u.powf(p) - a * (u - o)
    }

    /// Lagrangian dual value at `y >= 0`.
    fn dual_value(&self, y: &[f64]) -> f64 {
        let mut a = vec![0.0; self.n()];
        for (row, yj) in self.rows.iter().zip(y) {
            for &(i, g) in row {
                a[i] += g * yj;
            }
        }
        let linear: f64 = y.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
        linear + (0..self.n()).map(|i| self.conjugate_term(i, a[i])).sum::<f64>()
    }

    /// Best dual value along the ray through `y`, with the maximizing scale.
    fn best_dual_on_ray(&self, y: &[f64]) -> (f64, f64) {
        let g = |alpha: f64| {
            let scaled: Vec<f64> = y.iter().map(|v| alpha * v).collect();
            self.dual_value(&scaled)
        };
        let mut hi = if self.p == 1.0 {
            let mut a = vec![0.0; self.n()];
            for (row, yj) in self.rows.iter().zip(y) {
                for &(i, gv) in row {
                    a[i] += gv * yj;
                }
            }
            a.iter()
                .zip(&self.weights)
                .filter(|(ai, _)| **ai > 0.0)
                .map(|(ai, w)| w / ai)
                .fold(f64::INFINITY, f64::min)
                .min(1e12)
        } else {
            4.0
        };
        if self.p == 1.0 {
            // dual is affine in the scale below the kink; back off so that
            // rounding in the row sums cannot cross it
            let hi = hi * (1.0 - 1e-12);
            return (hi, g(hi));
        }
        // grow the bracket until the dual starts to decrease
        while g(hi) > g(0.5 * hi) && hi < 1e12 {
            hi *= 4.0;
        }
        let (mut lo, phi) = (0.0_f64, 0.5 * (5.0_f64.sqrt() - 1.0));
        let mut a = hi - phi * (hi - lo);
        let mut b = lo + phi * (hi - lo);
        let (mut ga, mut gb) = (g(a), g(b));
        for _ in 0..200 {
            if ga < gb {
                lo = a;
                a = b;
                ga = gb;
                b = lo + phi * (hi - lo);
                gb = g(b);
            } else {
                hi = b;
                b = a;
                gb = ga;
                a = hi - phi * (hi - lo);
                ga = g(a);
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        let best = if ga > gb { a } else { b };
        let candidates = [(best, g(best)), (1.0, g(1.0))];
        candidates
            .into_iter()
            .fold((0.0, g(0.0)), |acc, c| if c.1 > acc.1 { c } else { acc })
    }
}

pub(crate) fn solve(prog: &Program, x0: Vec<f64>, settings: &Settings) -> Solution {
    let n = prog.n();
    let m = prog.rows.len();
    debug_assert!(x0.iter().all(|&v| v > 0.0));
    debug_assert!(prog.slacks(&x0).iter().all(|&s| s > 0.0));

    let mut x = x0;
    let mut s = prog.slacks(&x);
    let pairs = (m + n) as f64;
    let mu0 = (prog.objective(&x) / pairs).max(1e-300);
    let mut y: Vec<f64> = s.iter().map(|sj| mu0 / sj).collect();
    let mut z: Vec<f64> = x.iter().map(|xi| mu0 / xi).collect();
    let mut sigma: f64 = 0.1;
    let mut iterations = 0;
    let mut best: Option<Solution> = None;

    loop {
        let (scale, dual) = prog.best_dual_on_ray(&y);
        let primal = prog.objective(&x);
        let denom = primal + settings.shift;
        let gap = if denom > 0.0 { ((primal - dual) / denom).max(0.0) } else { 0.0 };
        if best.as_ref().map_or(true, |b| gap < b.gap) {
            best = Some(Solution {
                x: x.clone(),
                multipliers: y.iter().map(|v| v * scale).collect(),
                primal,
                dual,
                gap,
                iterations,
                converged: gap <= settings.tol,
            });
        }
        if best.as_ref().is_some_and(|b| b.converged) || iterations >= settings.max_newton {
            break;
        }
        iterations += 1;

        let comp = (y.iter().zip(&s).map(|(a, b)| a * b).sum::<f64>() + z.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()) / pairs;
        if !(comp > 0.0) || !comp.is_finite() {
            break;
        }
        let target = sigma * comp;

        // reduced Newton system on x for the perturbed KKT conditions
        let mut grad = DVector::from_fn(n, |i, _| {
            let base = x[i] + prog.offsets[i];
            prog.p * prog.weights[i] * base.powf(prog.p - 1.0) - target / x[i]
        });
        let mut hess = DMatrix::from_fn(n, n, |i, j| {
            if i != j {
                return 0.0;
            }
            let curv = if prog.p == 1.0 {
                0.0
            } else {
                prog.p * (prog.p - 1.0) * prog.weights[i] * (x[i] + prog.offsets[i]).powf(prog.p - 2.0)
            };
            curv + z[i] / x[i]
        });
        for ((row, sj), yj) in prog.rows.iter().zip(&s).zip(&y) {
            let inv = target / sj;
            let w = yj / sj;
            for &(a, ga) in row {
                grad[a] -= ga * inv;
                for &(b, gb) in row {
                    hess[(a, b)] += ga * gb * w;
                }
            }
        }
        let dx = match newton_direction(hess, &grad) {
            Some(d) => d,
            None => break,
        };
        let ds: Vec<f64> = prog
            .rows
            .iter()
            .map(|row| row.iter().map(|&(i, g)| g * dx[i]).sum())
            .collect();
        let dy: Vec<f64> = (0..m).map(|j| target / s[j] - y[j] - y[j] / s[j] * ds[j]).collect();
        let dz: Vec<f64> = (0..n).map(|i| target / x[i] - z[i] - z[i] / x[i] * dx[i]).collect();

        let to_boundary = |v: &[f64], dv: &[f64]| {
            v.iter()
                .zip(dv)
                .filter(|(_, d)| **d < 0.0)
                .map(|(a, d)| -a / d)
                .fold(f64::INFINITY, f64::min)
        };
        let mut ap = (0.99 * to_boundary(&x, dx.as_slice()).min(to_boundary(&s, &ds))).min(1.0);
        let ad = (0.99 * to_boundary(&y, &dy).min(to_boundary(&z, &dz))).min(1.0);
        // the primal must stay strictly feasible with slacks recomputed from x
        let mut moved = false;
        while ap > 1e-16 {
            let trial: Vec<f64> = (0..n).map(|i| x[i] + ap * dx[i]).collect();
            let trial_s = prog.slacks(&trial);
            if trial.iter().all(|&v| v > 0.0) && trial_s.iter().all(|&v| v > 0.0) {
                x = trial;
                s = trial_s;
                moved = true;
                break;
            }
            ap *= 0.5;
        }
        for (v, d) in y.iter_mut().zip(&dy) {
            *v += ad * d;
        }
        for (v, d) in z.iter_mut().zip(&dz) {
            *v += ad * d;
        }
        if !moved && ad < 1e-16 {
            break;
        }
        sigma = (1.0 - ap.min(ad)).powi(3).clamp(1e-3, 0.5);
    }
    let mut out = best.expect("at least one certificate");
    out.iterations = iterations;
    out
}

fn newton_direction(hess: DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = hess.diagonal().iter().fold(0.0_f64, |a, b| a.max(b.abs())).max(1e-300);
    let mut ridge = 0.0;
    for _ in 0..8 {
        let mut h = hess.clone();
        if ridge > 0.0 {
            for i in 0..h.nrows() {
                h[(i, i)] += ridge;
            }
        }
        if let Some(chol) = h.cholesky() {
            let d = chol.solve(&(-grad));
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
        ridge = if ridge == 0.0 { 1e-14 * scale } else { ridge * 100.0 };
    }
    None
}
