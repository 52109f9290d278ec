//! Slopes, Lipschitz constants, McShane extension, upper-gradient checks and
//! the discrete-path relaxation `f~`.

use std::ops::Deref;

use crate::curve::DiscreteCurve;
use crate::error::{invalid, Error, Result};
use crate::families::CurveFamily;
use crate::shortest;
use crate::space::{MetricMeasureSpace, VertexSet};

/// Absolute slack allowed in upper-gradient inequalities.
pub const UG_TOLERANCE: f64 = 1e-12;

/// Non-negative extended-real vertex function; `+inf` is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Density(Vec<f64>);

impl Density {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidDensity(format!("value {v} is not in [0, inf]")));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn pointwise_min(&self, other: &Density) -> Density {
        Density(self.0.iter().zip(&other.0).map(|(a, b)| a.min(*b)).collect())
    }

    pub fn plus(&self, other: &Density) -> Density {
        Density(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, c: f64) -> Result<Density> {
        Density::new(self.0.iter().map(|a| if *a == 0.0 { 0.0 } else { a * c }).collect())
    }

    pub fn shifted(&self, c: f64) -> Result<Density> {
        Density::new(self.0.iter().map(|a| a + c).collect())
    }
}

impl AsRef<[f64]> for Density {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Density {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `lip_a(f)(v) = max_{u ~ v} |f(u) - f(v)| / d(u, v)`; zero at isolated vertices.
///
/// Graph neighbourhoods do not shrink, so the slope and the asymptotic slope
/// coincide.
pub fn asymptotic_slope(space: &MetricMeasureSpace, f: &[f64]) -> Density {
    Density(
        (0..space.len())
            .map(|v| {
                space
                    .neighbors(v)
                    .iter()
                    .map(|&(u, _)| (f[u] - f[v]).abs() / space.distance(u, v))
                    .fold(0.0, f64::max)
            })
            .collect(),
    )
}

/// `max_{u != v in E} |f(u) - f(v)| / d(u, v)`.
pub fn lipschitz_constant(space: &MetricMeasureSpace, f: &[f64], set: &VertexSet) -> Result<f64> {
    if set.is_empty() {
        return Err(invalid("E", "Lipschitz constant of an empty set"));
    }
    let pts: Vec<usize> = set.iter().collect();
    let mut best = 0.0_f64;
    for (i, &u) in pts.iter().enumerate() {
        for &v in &pts[i + 1..] {
            let d = space.distance(u, v);
            if d.is_finite() {
                best = best.max((f[u] - f[v]).abs() / d);
            }
        }
    }
    Ok(best)
}

/// McShane extension `inf_{y in K} f(y) + L d(y, x)` of `f|_K`.
///
/// Only the entries of `f` on `K` are read.
pub fn mcshane_extend(space: &MetricMeasureSpace, f: &[f64], set: &VertexSet, lip: f64) -> Result<Vec<f64>> {
    let own = lipschitz_constant(space, f, set)?;
    if !(lip >= 0.0) || lip < own * (1.0 - 1e-12) {
        return Err(invalid("L", format!("{lip} is below the Lipschitz constant {own} on K")));
    }
    Ok((0..space.len())
        .map(|x| {
            set.iter()
                .map(|y| {
                    let d = space.distance(y, x);
                    if d == 0.0 || lip == 0.0 {
                        f[y]
                    } else {
                        f[y] + lip * d
                    }
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// Outcome of an upper-gradient check over a finite family.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct UpperGradientCheck {
    pub holds: bool,
    /// Index of the curve with the largest `|f(end) - f(start)| - int rho`.
    pub worst: Option<usize>,
    /// That largest excess; negative when every inequality is strict.
    #[serde(serialize_with = "crate::io::ser_real")]
    pub worst_excess: f64,
}

/// Checks `|f(gamma_b) - f(gamma_a)| <= int_gamma rho` on every curve.
pub fn is_upper_gradient(f: &[f64], rho: &[f64], family: &CurveFamily) -> UpperGradientCheck {
    check_curves(family.curves(), |c| (f[c.end()] - f[c.start()]).abs(), |c| c.path_integral(rho))
}

pub(crate) fn check_curves(
    curves: &[DiscreteCurve],
    lhs: impl Fn(&DiscreteCurve) -> f64,
    rhs: impl Fn(&DiscreteCurve) -> f64,
) -> UpperGradientCheck {
    let mut worst = None;
    let mut worst_excess = f64::NEG_INFINITY;
    for (i, c) in curves.iter().enumerate() {
        let excess = lhs(c) - rhs(c);
        if excess > worst_excess {
            worst_excess = excess;
            worst = Some(i);
        }
    }
    UpperGradientCheck {
        holds: worst_excess <= UG_TOLERANCE,
        worst,
        worst_excess,
    }
}

/// Discrete-path relaxation
/// `f~(x) = min{M, inf_P f(p_0) + sum_k (g(p_k) + g(p_{k+1}))/2 * d(p_k, p_{k+1})}`
/// over paths starting in `C`, ending at `x`, with every step of length `<= delta`.
///
/// Steps may join any two vertices within `delta` in the shortest-path
/// metric, not only graph neighbours. Computed by multi-source Dijkstra with
/// source potentials `f|_C`; vertices no admissible path reaches get `M`.
pub fn path_relax(
    space: &MetricMeasureSpace,
    f: &[f64],
    g: &[f64],
    sources: &VertexSet,
    delta: f64,
    cap: f64,
) -> Result<Vec<f64>> {
    if sources.is_empty() {
        return Err(invalid("C", "source set must be non-empty"));
    }
    if !(delta > 0.0) {
        return Err(invalid("delta", "mesh bound must be positive"));
    }
    if !(cap > 0.0) {
        return Err(invalid("M", "cap must be positive"));
    }
    if g.iter().any(|x| !(*x >= 0.0)) {
        return Err(invalid("g", "density must be non-negative"));
    }
    if let Some(c) = sources.iter().find(|&c| !(f[c] >= 0.0)) {
        return Err(invalid("f", format!("negative or NaN value at source `{}`", space.id(c))));
    }
    let n = space.len();
    let arcs: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| v != u)
                .filter_map(|v| {
                    let d = space.distance(u, v);
                    (d <= delta).then(|| (v, 0.5 * (g[u] + g[v]) * d))
                })
                .collect()
        })
        .collect();
    let potentials: Vec<(usize, f64)> = sources.iter().map(|c| (c, f[c])).collect();
    Ok(shortest::multi_source(&arcs, &potentials)
        .into_iter()
        .map(|x| x.min(cap))
        .collect())
}
