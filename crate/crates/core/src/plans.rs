//! Finitely supported plans on curves parametrized over `[0, 1]`.
//!
//! Time marginals `(e_t)_# pi` use [`DiscreteCurve::position_at`]: a curve sits
//! at the nearer endpoint of its current hop. Under that convention the time
//! spent at a vertex times the hop speed is exactly the half-hop arc-length
//! atom, which ties the parametric quantities (compression, parametric
//! barycenter) to the non-parametric barycenter.

use serde::Serialize;

use crate::curve::DiscreteCurve;
use crate::error::{invalid, Error, Result};
use crate::lipschitz::{asymptotic_slope, Density};
use crate::modulus::Lambda;
use crate::space::MetricMeasureSpace;

/// Mass tolerance for the probability test.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    support: Vec<(DiscreteCurve, f64)>,
}

impl Plan {
    /// Weights must be positive and finite; curves must live on `[0, 1]`.
    pub fn new(support: Vec<(DiscreteCurve, f64)>) -> Result<Self> {
        for (c, w) in &support {
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::InvalidPlan(format!("weight {w} is not positive and finite")));
            }
            let (a, b) = c.domain();
            let ok = if c.is_constant() { a == 0.0 } else { a == 0.0 && b == 1.0 };
            if !ok {
                return Err(Error::InvalidPlan(format!(
                    "curve on [{a}, {b}] is not parametrized on [0, 1]"
                )));
            }
        }
        Ok(Self { support })
    }

    pub fn empty() -> Self {
        Self { support: Vec::new() }
    }

    pub fn point_mass(curve: DiscreteCurve) -> Result<Self> {
        Self::new(vec![(curve, 1.0)])
    }

    pub fn support(&self) -> &[(DiscreteCurve, f64)] {
        &self.support
    }

    pub fn mass(&self) -> f64 {
        self.support.iter().map(|(_, w)| w).sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.mass() - 1.0).abs() <= MASS_TOLERANCE
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.support.iter().map(|(g, w)| (g.clone(), w * c)).collect())
    }

    /// `pi|_Gamma / pi(Gamma)` for the curves selected by `keep`.
    pub fn restricted(&self, keep: impl Fn(&DiscreteCurve) -> bool) -> Result<Self> {
        let kept: Vec<_> = self.support.iter().filter(|(c, _)| keep(c)).cloned().collect();
        let mass: f64 = kept.iter().map(|(_, w)| w).sum();
        if !(mass > 0.0) {
            return Err(Error::InvalidPlan("restriction to a null set of curves".into()));
        }
        Self::new(kept.into_iter().map(|(c, w)| (c, w / mass)).collect())
    }

    /// Same plan with every curve run backwards.
    pub fn reversed(&self) -> Self {
        Self {
            support: self.support.iter().map(|(c, w)| (c.reversed(), *w)).collect(),
        }
    }
}

/// Where time marginals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TimeGrid {
    /// Every time in `[0, 1]`; exact because marginals are piecewise constant.
    Exact,
    /// `t = k / n` for `k = 0..=n`.
    Uniform(usize),
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid::Uniform(64)
    }
}

/// `Bar_lambda(pi)` as an atomic density against `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycenterDensity {
    pub density: Density,
    pub lambda: Lambda,
}

impl BarycenterDensity {
    pub fn norm(&self, space: &MetricMeasureSpace, q: f64) -> f64 {
        space.lp_norm(&self.density, q)
    }
}

/// Endpoint marginals `(e_0)_# pi` and `(e_1)_# pi` as vertex masses.
pub fn endpoint_marginals(space: &MetricMeasureSpace, plan: &Plan) -> (Vec<f64>, Vec<f64>) {
    let mut start = vec![0.0; space.len()];
    let mut end = vec![0.0; space.len()];
    for (c, w) in plan.support() {
        start[c.start()] += w;
        end[c.end()] += w;
    }
    (start, end)
}

/// `Bar_lambda(pi)(v) m(v) = lambda (e_0)_# pi(v) + lambda (e_1)_# pi(v) + sum_gamma w_gamma s_gamma(v)`.
pub fn barycenter(space: &MetricMeasureSpace, plan: &Plan, lambda: Lambda) -> BarycenterDensity {
    let n = space.len();
    let mut mass = vec![0.0; n];
    for (c, w) in plan.support() {
        let arc = c.variation_measures(&vec![0.0; n]).arc;
        for (&v, a) in c.vertices().iter().zip(&arc.atoms) {
            mass[v] += w * a;
        }
        if lambda == Lambda::One {
            mass[c.start()] += w;
            mass[c.end()] += w;
        }
    }
    let density = mass.iter().zip(space.measure()).map(|(a, m)| a / m).collect();
    BarycenterDensity {
        density: Density::new(density).expect("non-negative masses"),
        lambda,
    }
}

/// `(e_t)_# pi` as vertex masses.
pub fn time_marginal(space: &MetricMeasureSpace, plan: &Plan, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; space.len()];
    for (c, w) in plan.support() {
        out[c.position_at(t)] += w;
    }
    out
}

fn evaluation_times(plan: &Plan, grid: TimeGrid) -> Vec<f64> {
    match grid {
        TimeGrid::Uniform(n) => {
            let n = n.max(1);
            (0..=n).map(|k| k as f64 / n as f64).collect()
        }
        TimeGrid::Exact => {
            // marginals only change at hop midpoints
            let mut ts = vec![0.0, 1.0];
            for (c, _) in plan.support() {
                ts.extend(c.times().windows(2).map(|w| 0.5 * (w[0] + w[1])));
            }
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            ts
        }
    }
}

/// Compression constant: `max_t max_v (e_t)_# pi(v) / m(v)` over `grid`.
pub fn compression(space: &MetricMeasureSpace, plan: &Plan, grid: TimeGrid) -> f64 {
    evaluation_times(plan, grid)
        .into_iter()
        .map(|t| {
            time_marginal(space, plan, t)
                .iter()
                .zip(space.measure())
                .map(|(a, m)| a / m)
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Parametric barycenter `pBar_lambda`: endpoint masses plus the time
/// average of `(e_t)_# pi`, divided by `m`.
///
/// With [`TimeGrid::Uniform`] the average is the left Riemann sum over
/// `t = k/n, k < n`; [`TimeGrid::Exact`] integrates the piecewise-constant
/// marginals exactly.
pub fn parametric_barycenter(space: &MetricMeasureSpace, plan: &Plan, lambda: Lambda, grid: TimeGrid) -> BarycenterDensity {
    let n = space.len();
    let mut mass = vec![0.0; n];
    match grid {
        TimeGrid::Exact => {
            for (c, w) in plan.support() {
                if c.is_constant() {
                    mass[c.start()] += w;
                    continue;
                }
                for (tw, vw) in c.times().windows(2).zip(c.vertices().windows(2)) {
                    let half = 0.5 * (tw[1] - tw[0]);
                    mass[vw[0]] += w * half;
                    mass[vw[1]] += w * half;
                }
            }
        }
        TimeGrid::Uniform(k) => {
            let k = k.max(1);
            for i in 0..k {
                let marg = time_marginal(space, plan, i as f64 / k as f64);
                for (acc, a) in mass.iter_mut().zip(marg) {
                    *acc += a / k as f64;
                }
            }
        }
    }
    if lambda == Lambda::One {
        let (s, e) = endpoint_marginals(space, plan);
        for v in 0..n {
            mass[v] += s[v] + e[v];
        }
    }
    let density = mass.iter().zip(space.measure()).map(|(a, m)| a / m).collect();
    BarycenterDensity {
        density: Density::new(density).expect("non-negative masses"),
        lambda,
    }
}

/// `E_q(pi) = sum_gamma w_gamma E_q(gamma)`; for `q = inf` the largest
/// `E_inf` over the support.
pub fn energy(plan: &Plan, q: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(invalid("q", "plan energy needs q in (1, inf]"));
    }
    if q.is_infinite() {
        return plan
            .support()
            .iter()
            .map(|(c, _)| c.q_energy(q))
            .try_fold(0.0_f64, |acc, e| e.map(|e| acc.max(e)));
    }
    plan.support()
        .iter()
        .map(|(c, w)| c.q_energy(q).map(|e| w * e))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestPlanReport {
    pub is_test_plan: bool,
    pub mass: f64,
    pub compression: f64,
    pub energy: f64,
}

/// Probability mass, finite compression and finite `q`-energy.
pub fn is_test_plan(space: &MetricMeasureSpace, plan: &Plan, q: f64, grid: TimeGrid) -> Result<TestPlanReport> {
    let energy = energy(plan, q)?;
    let compression = compression(space, plan, grid);
    Ok(TestPlanReport {
        is_test_plan: plan.is_probability() && compression.is_finite() && energy.is_finite(),
        mass: plan.mass(),
        compression,
        energy,
    })
}

/// Action of the plan-induced derivation on one probe function, and the
/// plan's divergence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derivation {
    /// `b_pi(f)` as a density against `m`.
    pub b: Vec<f64>,
    /// `(e_0)_# pi - (e_1)_# pi` as vertex masses.
    pub div: Vec<f64>,
}

impl Derivation {
    /// `sum_v b(v) m(v)`.
    pub fn integral(&self, space: &MetricMeasureSpace) -> f64 {
        self.b.iter().zip(space.measure()).map(|(b, m)| b * m).sum()
    }

    /// `-sum_v f(v) div(v)`.
    pub fn divergence_pairing(&self, f: &[f64]) -> f64 {
        -self.div.iter().zip(f).map(|(d, x)| d * x).sum::<f64>()
    }
}

/// `b(v) m(v) = sum_gamma w_gamma mu_{f o gamma}(atoms at v)`,
/// `div(v) = sum_gamma w_gamma (1[gamma_0 = v] - 1[gamma_1 = v])`.
pub fn plan_derivation(space: &MetricMeasureSpace, plan: &Plan, f: &[f64]) -> Derivation {
    let n = space.len();
    let mut bm = vec![0.0; n];
    for (c, w) in plan.support() {
        let signed = c.variation_measures(f).signed;
        for (&v, a) in c.vertices().iter().zip(&signed.atoms) {
            bm[v] += w * a;
        }
    }
    let (start, end) = endpoint_marginals(space, plan);
    Derivation {
        b: bm.iter().zip(space.measure()).map(|(a, m)| a / m).collect(),
        div: start.iter().zip(&end).map(|(s, e)| s - e).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormBoundReport {
    pub holds: bool,
    /// `max_v |b(v)| / (Bar(v) lip_a(f)(v))` over vertices with a positive bound.
    pub max_ratio: f64,
    pub worst_vertex: Option<usize>,
}

/// Checks `|b_pi(f)| <= Bar_0(pi) lip_a(f)` at every vertex. Meaningful for
/// plans on graph walks, where every hop joins neighbours.
pub fn derivation_norm_bound(space: &MetricMeasureSpace, plan: &Plan, f: &[f64]) -> NormBoundReport {
    let der = plan_derivation(space, plan, f);
    let bar = barycenter(space, plan, Lambda::Zero);
    let slope = asymptotic_slope(space, f);
    let mut holds = true;
    let mut max_ratio = 0.0_f64;
    let mut worst_vertex = None;
    for v in 0..space.len() {
        let bound = bar.density[v] * slope[v];
        if der.b[v].abs() > bound + 1e-12 {
            holds = false;
        }
        if bound > 0.0 {
            let r = der.b[v].abs() / bound;
            if r > max_ratio {
                max_ratio = r;
                worst_vertex = Some(v);
            }
        }
    }
    NormBoundReport {
        holds,
        max_ratio,
        worst_vertex,
    }
}
