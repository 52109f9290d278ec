use serde::Serialize;

use crate::error::{invalid, Result};
use crate::lipschitz::{asymptotic_slope, path_relax};
use crate::space::MetricMeasureSpace;

/// One relaxation step `f_n = f~` with density `rho_n = rho_f + sigma_n`.
#[derive(Debug, Clone, Serialize)]
pub struct HStep {
    pub n: usize,
    pub sigma: f64,
    pub f_n: Vec<f64>,
    /// `lip_a(f_n)`.
    pub slope: Vec<f64>,
    /// `||f_n - f||_p`.
    pub value_error: f64,
    /// `||lip_a(f_n) - rho_f||_p`.
    pub gradient_error: f64,
    /// `||lip_a(f_n)||_p`.
    pub slope_norm: f64,
    /// `f_n == f` at every vertex, bit for bit.
    pub fixed_point: bool,
    /// `lip_a(f_n)(v) <= max_{u ~ v} (rho_n(u) + rho_n(v)) / 2` at every vertex.
    pub neighbor_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HSequence {
    pub p: f64,
    /// Mesh bound used for every step.
    pub delta: f64,
    /// Cap used for every step, in the shifted scale where `min f = 0`.
    pub cap: f64,
    pub steps: Vec<HStep>,
}

/// `max_{u ~ v} (rho(u) + rho(v)) / 2`; zero at isolated vertices.
pub fn neighbor_average(space: &MetricMeasureSpace, rho: &[f64]) -> Vec<f64> {
    (0..space.len())
        .map(|v| {
            space
                .neighbors(v)
                .iter()
                .map(|&(u, _)| 0.5 * (rho[u] + rho[v]))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Lipschitz approximants of `f` from the relaxation with sources at every
/// vertex, densities `rho_f + 2^-n` for `n = 1..=n_steps`, mesh bound the
/// longest graph edge (in the metric) and cap `max f - min f`.
///
/// The relaxation needs a non-negative function, so it runs on `f - min f`
/// and the result is shifted back; vertices where the relaxation returned
/// its input keep the original value of `f`.
pub fn h_gradient_sequence(
    space: &MetricMeasureSpace,
    f: &[f64],
    rho_f: &[f64],
    p: f64,
    n_steps: usize,
) -> Result<HSequence> {
    if f.len() != space.len() || rho_f.len() != space.len() {
        return Err(invalid("f", "one value per vertex expected"));
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(invalid("f", "values must be finite"));
    }
    if space.is_empty() {
        return Err(invalid("space", "no vertices"));
    }
    let low = f.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = f.iter().map(|x| x - low).collect();
    let top = shifted.iter().copied().fold(0.0, f64::max);
    let cap = if top > 0.0 { top } else { 1.0 };
    let delta = match space.max_hop() {
        d if d > 0.0 => d,
        _ => 1.0,
    };
    let sources = space.all_vertices();
    let mut steps = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        let sigma = 0.5_f64.powi(n as i32);
        let rho_n: Vec<f64> = rho_f.iter().map(|r| r + sigma).collect();
        let relaxed = path_relax(space, &shifted, &rho_n, &sources, delta, cap)?;
        let f_n: Vec<f64> = relaxed
            .iter()
            .zip(&shifted)
            .zip(f)
            .map(|((r, s), x)| if r == s { *x } else { r + low })
            .collect();
        let slope = asymptotic_slope(space, &f_n).into_inner();
        let bound = neighbor_average(space, &rho_n);
        let diff = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
        steps.push(HStep {
            n,
            sigma,
            value_error: space.lp_norm(&diff(&f_n, f), p),
            gradient_error: space.lp_norm(&diff(&slope, rho_f), p),
            slope_norm: space.lp_norm(&slope, p),
            fixed_point: f_n == f,
            neighbor_bound: slope.iter().zip(&bound).all(|(s, b)| s <= b),
            f_n,
            slope,
        });
    }
    Ok(HSequence { p, delta, cap, steps })
}
