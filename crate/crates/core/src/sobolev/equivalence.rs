use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::families::{family_through, CurveFamily};
use crate::lipschitz::asymptotic_slope;
use crate::modulus::{modulus, optimal_plan, ExtReal, Lambda, ModulusOptions};
use crate::plans::Plan;
use crate::space::MetricMeasureSpace;

use super::energy::{h_gradient_sequence, neighbor_average, HSequence};
use super::{gradient_dual_plan, n_gradient, w_certificate, w_lower_bound};

#[derive(Debug, Clone)]
pub struct EquivalenceOptions {
    /// Hop bound of the simple paths making up the family.
    pub max_hops: usize,
    /// Number of relaxation steps.
    pub n_steps: usize,
    pub solver: ModulusOptions,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        Self {
            max_hops: 3,
            n_steps: 4,
            solver: ModulusOptions::default(),
        }
    }
}

/// Per-vertex columns of the report.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceRow {
    pub vertex: String,
    pub f: f64,
    /// Least-energy upper gradient on the family.
    pub rho_n: f64,
    /// `lip_a(f)`.
    pub slope: f64,
    /// Last relaxation step.
    pub f_h: f64,
    pub slope_h: f64,
    /// `max_{u ~ v} (rho(u) + rho(v)) / 2` for the last step's density.
    pub neighbor_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub p: f64,
    pub max_hops: usize,
    pub family_size: usize,
    /// `sum rho_n^p m`.
    pub n_energy: f64,
    pub n_norm: f64,
    pub n_gap: f64,
    pub h_value_error: f64,
    pub h_gradient_error: f64,
    /// `||lip_a(f_h)||_p` at the last step; an upper bound for `n_norm`.
    pub h_norm: f64,
    pub h_fixed_point: bool,
    pub h_neighbor_bound: bool,
    /// Largest plan violation of `rho_n`.
    pub w_max_violation: f64,
    pub w_plans: usize,
    /// Lower bound for `n_norm` from the gradient's dual plan.
    pub w_lower: f64,
    /// `w_lower <= n_norm <= h_norm` up to the solver tolerance.
    pub sandwich_holds: bool,
    /// Plan-based gradients are tested on the same finite plan inequalities
    /// as the `W` certificate, so they share its column.
    pub b_identified_with_w: bool,
    pub rows: Vec<EquivalenceRow>,
    pub sequence: HSequence,
}

/// Optimal plans of `Mod_p` on the curves leaving each vertex, in vertex order.
fn subfamily_plans(space: &MetricMeasureSpace, family: &CurveFamily, p: f64, opts: &ModulusOptions) -> Result<Vec<Plan>> {
    let results: Vec<Result<Option<Plan>>> = (0..space.len())
        .into_par_iter()
        .map(|v| {
            let sub = CurveFamily::new(
                format!("from {}", space.id(v)),
                family.curves().iter().filter(|c| c.start() == v).cloned().collect(),
            );
            if sub.is_empty() {
                return Ok(None);
            }
            let r = modulus(space, &sub, p, Lambda::Zero, opts)?;
            match r.value {
                ExtReal::Finite(x) if x > 0.0 => optimal_plan(&r, &sub).map(Some),
                _ => Ok(None),
            }
        })
        .collect();
    results.into_iter().filter_map(|r| r.transpose()).collect()
}

/// Runs the `N`, `H` and `W` estimators for `f` on the simple paths with at
/// most `opts.max_hops` hops and collects the diagnostics.
pub fn equivalence_report(
    space: &MetricMeasureSpace,
    f: &[f64],
    p: f64,
    opts: &EquivalenceOptions,
) -> Result<EquivalenceReport> {
    let family = family_through(space, &space.all_vertices(), opts.max_hops)
        .with_label(format!("simple paths with at most {} hops", opts.max_hops));
    let grad = n_gradient(space, f, &family, p, &opts.solver)?;
    let sequence = h_gradient_sequence(space, f, &grad.rho, p, opts.n_steps)?;

    let mut plans = subfamily_plans(space, &family, p, &opts.solver)?;
    let dual = gradient_dual_plan(&grad, &family, f)?;
    let w_lower = dual.as_ref().map_or(0.0, |plan| w_lower_bound(space, f, plan, p));
    plans.extend(dual);
    let cert = w_certificate(space, f, &grad.rho, &plans);

    let slope = asymptotic_slope(space, f);
    let last = sequence.steps.last();
    let h_norm = last.map_or(space.lp_norm(&slope, p), |s| s.slope_norm);
    let sigma = last.map_or(0.0, |s| s.sigma);
    let rho_last: Vec<f64> = grad.rho.iter().map(|r| r + sigma).collect();
    let bound = neighbor_average(space, &rho_last);
    let rows = (0..space.len())
        .map(|v| EquivalenceRow {
            vertex: space.id(v).to_string(),
            f: f[v],
            rho_n: grad.rho[v],
            slope: slope[v],
            f_h: last.map_or(f[v], |s| s.f_n[v]),
            slope_h: last.map_or(slope[v], |s| s.slope[v]),
            neighbor_bound: bound[v],
        })
        .collect();

    let slack = opts.solver.tol * grad.p_norm + 1e-12;
    Ok(EquivalenceReport {
        p,
        max_hops: opts.max_hops,
        family_size: family.len(),
        n_energy: grad.energy,
        n_norm: grad.p_norm,
        n_gap: grad.gap,
        h_value_error: last.map_or(0.0, |s| s.value_error),
        h_gradient_error: last.map_or(0.0, |s| s.gradient_error),
        h_norm,
        h_fixed_point: sequence.steps.iter().all(|s| s.fixed_point),
        h_neighbor_bound: sequence.steps.iter().all(|s| s.neighbor_bound),
        w_max_violation: cert.max_violation,
        w_plans: plans.len(),
        w_lower,
        sandwich_holds: w_lower <= grad.p_norm + slack && grad.p_norm <= h_norm + slack,
        b_identified_with_w: true,
        rows,
        sequence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_path_table() {
        let s = MetricMeasureSpace::path(3);
        let r = equivalence_report(&s, &[0.0, 1.0, 2.0], 2.0, &EquivalenceOptions::default()).unwrap();
        assert!((r.n_energy - 8.0 / 3.0).abs() < 1e-6);
        assert!(r.h_fixed_point && r.h_neighbor_bound && r.sandwich_holds);
        assert!(r.w_max_violation <= 1e-7);
        assert!((r.rows[1].rho_n - 4.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn constant_function_zero_columns() {
        let s = MetricMeasureSpace::cycle(4);
        let r = equivalence_report(&s, &[1.0; 4], 2.0, &EquivalenceOptions::default()).unwrap();
        assert_eq!(r.n_energy, 0.0);
        assert_eq!(r.h_value_error, 0.0);
        assert_eq!(r.w_max_violation, 0.0);
        assert_eq!(r.w_lower, 0.0);
        assert!(r.rows.iter().all(|row| row.rho_n == 0.0 && row.slope == 0.0));
    }
}
