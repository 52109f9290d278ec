use serde::Serialize;

use crate::error::{invalid, Error, Result, Unconverged};
use crate::families::CurveFamily;
use crate::lipschitz::Density;
use crate::modulus::{check_exponent, constraint_rows, solve_power_program, Lambda, ModulusOptions};
use crate::space::MetricMeasureSpace;

/// Which construction produced a gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Least `p`-energy density satisfying the curve inequalities.
    N,
    /// Slope of a Lipschitz approximant.
    H,
    /// Density certified against plans.
    WCertificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientResult {
    #[serde(serialize_with = "crate::io::ser_values")]
    pub rho: Density,
    /// `sum_v rho_v^p m_v`.
    pub energy: f64,
    /// `energy^(1/p)`.
    pub p_norm: f64,
    pub p: f64,
    pub family_label: String,
    pub gap: f64,
    pub estimator: Estimator,
    /// Multiplier of each curve's constraint, in family order; zero for
    /// curves along which `f` does not change.
    pub dual_weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Least `sum rho^p m` over `rho >= 0` with `|f(end) - f(start)| <= int_gamma rho`
/// for every curve of `family`.
pub fn n_gradient(
    space: &MetricMeasureSpace,
    f: &[f64],
    family: &CurveFamily,
    p: f64,
    opts: &ModulusOptions,
) -> Result<GradientResult> {
    check_exponent(p)?;
    if !(opts.tol > 0.0) {
        return Err(invalid("tol", "tolerance must be positive"));
    }
    if f.len() != space.len() {
        return Err(invalid("f", "one value per vertex expected"));
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(invalid("f", "values must be finite"));
    }
    let all_rows = constraint_rows(space, family, Lambda::Zero);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut active = Vec::new();
    for (i, (c, row)) in family.curves().iter().zip(all_rows).enumerate() {
        let jump = (f[c.end()] - f[c.start()]).abs();
        if jump > 0.0 {
            rows.push(row);
            rhs.push(jump);
            active.push(i);
        }
    }
    let mut result = GradientResult {
        rho: Density::zeros(space.len()),
        energy: 0.0,
        p_norm: 0.0,
        p,
        family_label: family.label().to_string(),
        gap: 0.0,
        estimator: Estimator::N,
        dual_weights: vec![0.0; family.len()],
        iterations: 0,
        converged: true,
    };
    if rows.is_empty() {
        return Ok(result);
    }
    let (rho, sol) = solve_power_program(space, &rows, &rhs, p, opts);
    for (&i, y) in active.iter().zip(&sol.multipliers) {
        result.dual_weights[i] = *y;
    }
    result.rho = Density::new(rho)?;
    result.energy = sol.primal;
    result.p_norm = sol.primal.powf(1.0 / p);
    result.gap = sol.gap;
    result.iterations = sol.iterations;
    result.converged = sol.converged;
    if result.converged {
        Ok(result)
    } else {
        Err(Error::NotConverged(Box::new(Unconverged::Gradient(result))))
    }
}
