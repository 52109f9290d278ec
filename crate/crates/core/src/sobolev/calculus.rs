use serde::Serialize;

use crate::curve::DiscreteCurve;
use crate::error::{invalid, Error, Result};
use crate::families::CurveFamily;
use crate::lipschitz::{asymptotic_slope, check_curves, is_upper_gradient, UpperGradientCheck};
use crate::space::MetricMeasureSpace;

/// Continuous piecewise-linear `phi: R -> R` through sorted knots, extended
/// linearly past the outer knots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(invalid("phi", "at least two knots are needed"));
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(invalid("phi", "knots must be finite"));
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(invalid("phi", "knot abscissae must increase strictly"));
        }
        Ok(Self { knots })
    }

    pub fn identity() -> Self {
        Self::linear(1.0, 0.0)
    }

    /// `t -> a t + b`.
    pub fn linear(a: f64, b: f64) -> Self {
        Self {
            knots: vec![(0.0, b), (1.0, a + b)],
        }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        let i = k.partition_point(|&(x, _)| x <= t).clamp(1, k.len() - 1);
        let (x0, y0) = k[i - 1];
        let (x1, y1) = k[i];
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }

    pub fn lipschitz(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max)
    }
}

/// Outcome of the upper-gradient calculus checks on one family.
#[derive(Debug, Clone, Serialize)]
pub struct CalculusReport {
    /// `rho_f + rho_g` for `f + g`.
    pub sum: UpperGradientCheck,
    /// `Lip(phi) rho_f` for `phi o f`.
    pub chain: UpperGradientCheck,
    /// `||f||_inf rho_g + ||g||_inf rho_f` for `f g`.
    pub leibniz: UpperGradientCheck,
    /// Per-hop minimum of the two upper gradients of `f`: along each curve
    /// `sum_hops min(int_hop rho_1, int_hop rho_2) >= |f(end) - f(start)|`.
    pub min_per_hop: UpperGradientCheck,
    /// Vertexwise `min(rho_1, rho_2)`; informative only, it can fail on
    /// graphs because a single hop sees both endpoint values.
    pub min_pointwise: UpperGradientCheck,
    /// Zero is an upper gradient of `f - g` on the curves along which `f`
    /// and `g` agree at every visited vertex.
    pub locality: UpperGradientCheck,
    /// Number of curves in that subfamily.
    pub locality_curves: usize,
}

impl CalculusReport {
    /// Whether every rule except the informative pointwise minimum holds.
    pub fn all_hold(&self) -> bool {
        self.sum.holds && self.chain.holds && self.leibniz.holds && self.min_per_hop.holds && self.locality.holds
    }
}

fn hop_integrals<'a>(c: &'a DiscreteCurve, rho: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
    c.vertices()
        .windows(2)
        .zip(c.hops())
        .map(move |(w, h)| 0.5 * (rho[w[0]] + rho[w[1]]) * h)
}

/// Checks the sum, chain, Leibniz, minimum and locality rules for upper
/// gradients on `family`.
///
/// `rho_f` and `rho_g` must be upper gradients of `f` and `g` on `family`.
/// The minimum rule pairs `rho_f` with `second` (an upper gradient of `f`),
/// defaulting to the asymptotic slope of `f`, which is an upper gradient
/// along every graph walk.
#[allow(clippy::too_many_arguments)]
pub fn ug_calculus(
    space: &MetricMeasureSpace,
    family: &CurveFamily,
    f: &[f64],
    g: &[f64],
    rho_f: &[f64],
    rho_g: &[f64],
    phi: &PiecewiseLinear,
    second: Option<&[f64]>,
) -> Result<CalculusReport> {
    let n = space.len();
    for (name, v) in [("f", f), ("g", g), ("rho_f", rho_f), ("rho_g", rho_g)] {
        if v.len() != n {
            return Err(invalid("f", format!("`{name}` needs one value per vertex")));
        }
    }
    if !is_upper_gradient(f, rho_f, family).holds {
        return Err(Error::InvalidDensity("rho_f is not an upper gradient of f".into()));
    }
    if !is_upper_gradient(g, rho_g, family).holds {
        return Err(Error::InvalidDensity("rho_g is not an upper gradient of g".into()));
    }
    let slope;
    let rho_2 = match second {
        Some(r) => {
            if r.len() != n || !is_upper_gradient(f, r, family).holds {
                return Err(Error::InvalidDensity("second density is not an upper gradient of f".into()));
            }
            r
        }
        None => {
            slope = asymptotic_slope(space, f);
            &slope[..]
        }
    };

    let zip = |a: &[f64], b: &[f64], op: fn(f64, f64) -> f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| op(*x, *y)).collect()
    };

    let sum = is_upper_gradient(&zip(f, g, |a, b| a + b), &zip(rho_f, rho_g, |a, b| a + b), family);

    let lip = phi.lipschitz();
    let phi_f: Vec<f64> = f.iter().map(|&x| phi.eval(x)).collect();
    let chain = is_upper_gradient(&phi_f, &rho_f.iter().map(|r| lip * r).collect::<Vec<_>>(), family);

    let sup = |v: &[f64]| v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let (fs, gs) = (sup(f), sup(g));
    let leibniz_rho: Vec<f64> = rho_f.iter().zip(rho_g).map(|(rf, rg)| fs * rg + gs * rf).collect();
    let leibniz = is_upper_gradient(&zip(f, g, |a, b| a * b), &leibniz_rho, family);

    let min_per_hop = check_curves(
        family.curves(),
        |c| (f[c.end()] - f[c.start()]).abs(),
        |c| hop_integrals(c, rho_f).zip(hop_integrals(c, rho_2)).map(|(a, b)| a.min(b)).sum(),
    );
    let min_pointwise = is_upper_gradient(f, &zip(rho_f, rho_2, f64::min), family);

    let agree: Vec<DiscreteCurve> = family
        .curves()
        .iter()
        .filter(|c| c.vertices().iter().all(|&v| f[v] == g[v]))
        .cloned()
        .collect();
    let diff = zip(f, g, |a, b| a - b);
    let locality = check_curves(&agree, |c| (diff[c.end()] - diff[c.start()]).abs(), |_| 0.0);

    Ok(CalculusReport {
        sum,
        chain,
        leibniz,
        min_per_hop,
        min_pointwise,
        locality,
        locality_curves: agree.len(),
    })
}
