use serde::Serialize;

use crate::error::{invalid, Result};
use crate::families::CurveFamily;
use crate::modulus::{conjugate, Lambda};
use crate::plans::{barycenter, Plan};
use crate::space::MetricMeasureSpace;

use super::GradientResult;

#[derive(Debug, Clone, Serialize)]
pub struct WCertificate {
    /// `v(pi) = sum_gamma w (f(gamma_1) - f(gamma_0)) - sum_v Bar_0(pi) g m`, per plan.
    pub violations: Vec<f64>,
    /// Largest entry of `violations`; zero when no plan is given.
    pub max_violation: f64,
}

/// Tests `g` against each plan: `g` passes when every violation is at most
/// the caller's tolerance.
pub fn w_certificate(space: &MetricMeasureSpace, f: &[f64], g: &[f64], plans: &[Plan]) -> WCertificate {
    let violations: Vec<f64> = plans
        .iter()
        .map(|plan| {
            let gain: f64 = plan.support().iter().map(|(c, w)| w * (f[c.end()] - f[c.start()])).sum();
            let bar = barycenter(space, plan, Lambda::Zero);
            let cost: f64 = (0..space.len()).map(|v| bar.density[v] * g[v] * space.mass(v)).sum();
            gain - cost
        })
        .collect();
    let max_violation = violations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    WCertificate {
        max_violation: if violations.is_empty() { 0.0 } else { max_violation },
        violations,
    }
}

/// Probability plan from the gradient multipliers, each curve run in the
/// direction along which `f` increases. `None` when `f` is constant along
/// every curve.
pub fn gradient_dual_plan(result: &GradientResult, family: &CurveFamily, f: &[f64]) -> Result<Option<Plan>> {
    if result.dual_weights.len() != family.len() {
        return Err(invalid("family", "multipliers do not match the family"));
    }
    let total: f64 = result.dual_weights.iter().sum();
    if !(total > 0.0) {
        return Ok(None);
    }
    let support = family
        .curves()
        .iter()
        .zip(&result.dual_weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(c, &w)| {
            let c = if f[c.end()] >= f[c.start()] { c.clone() } else { c.reversed() };
            (c.cs_reparam(), w / total)
        })
        .collect();
    Plan::new(support).map(Some)
}

/// `sum_gamma w (f(gamma_1) - f(gamma_0)) / ||Bar_0(pi)||_q`, a lower bound
/// for `||g||_p` over every `g` that passes the certificate on `pi`. Zero
/// for a plan along which `f` does not increase.
pub fn w_lower_bound(space: &MetricMeasureSpace, f: &[f64], plan: &Plan, p: f64) -> f64 {
    let gain: f64 = plan.support().iter().map(|(c, w)| w * (f[c.end()] - f[c.start()])).sum();
    let norm = barycenter(space, plan, Lambda::Zero).norm(space, conjugate(p));
    if gain > 0.0 && norm > 0.0 {
        gain / norm
    } else {
        0.0
    }
}
