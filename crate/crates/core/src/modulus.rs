//! `(p, lambda)`-modulus of finite curve families and extraction of the dual
//! optimal plan.
//!
//! The modulus is the convex program
//!
//! ```text
//! minimize    sum_v rho_v^p m_v
//! subject to  lambda (rho(a_gamma) + rho(b_gamma)) + int_gamma rho ds >= 1   for gamma in Gamma
//!             rho >= 0
//! ```
//!
//! Its Lagrange multipliers, normalized to a probability on `Gamma`, form a
//! plan whose `lambda`-barycenter has `L^q` norm `Mod^(-1/p)`.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result, Unconverged};
use crate::families::{family_through, CurveFamily};
use crate::lipschitz::Density;
use crate::plans::{barycenter, Plan};
use crate::solver::{self, Program, Settings};
use crate::space::{MetricMeasureSpace, VertexSet};

/// Endpoint weight in the admissibility constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Lambda {
    Zero,
    One,
}

impl Lambda {
    pub fn as_f64(self) -> f64 {
        match self {
            Lambda::Zero => 0.0,
            Lambda::One => 1.0,
        }
    }
}

impl From<Lambda> for u8 {
    fn from(l: Lambda) -> u8 {
        match l {
            Lambda::Zero => 0,
            Lambda::One => 1,
        }
    }
}

impl TryFrom<u8> for Lambda {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Lambda::Zero),
            1 => Ok(Lambda::One),
            other => Err(format!("lambda must be 0 or 1, got {other}")),
        }
    }
}

/// Non-negative extended real; `+inf` is a distinguished value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinite)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtReal;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtReal, E> {
                match v {
                    "inf" => Ok(ExtReal::Infinite),
                    other => Err(E::custom(format!("unexpected `{other}`"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone)]
pub struct ModulusOptions {
    /// Relative primal-dual gap at which the solve stops.
    pub tol: f64,
    /// Budget of Newton steps.
    pub max_iterations: usize,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iterations: 5000,
        }
    }
}

impl ModulusOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(invalid("tol", "tolerance must be positive"));
        }
        Ok(())
    }

    pub(crate) fn settings(&self) -> Settings {
        Settings {
            tol: self.tol,
            max_newton: self.max_iterations,
            shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulusResult {
    pub value: ExtReal,
    #[serde(serialize_with = "crate::io::ser_values")]
    pub rho: Density,
    /// One multiplier per curve of the family, in family order.
    pub dual_weights: Vec<f64>,
    pub gap: f64,
    pub p: f64,
    pub lambda: Lambda,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleCheck {
    pub admissible: bool,
    /// `min_gamma (lhs(gamma) - 1)`; `+inf` for the empty family.
    pub min_slack: f64,
}

/// Left-hand side `lambda (rho(a) + rho(b)) + int rho` for one curve, with
/// `lambda * inf = 0` when `lambda = 0`.
pub(crate) fn admissibility_lhs(curve: &crate::curve::DiscreteCurve, rho: &[f64], lambda: Lambda) -> f64 {
    let ends = match lambda {
        Lambda::Zero => 0.0,
        Lambda::One => rho[curve.start()] + rho[curve.end()],
    };
    ends + curve.path_integral(rho)
}

pub fn admissible_check(rho: &[f64], family: &CurveFamily, lambda: Lambda) -> AdmissibleCheck {
    let min_slack = family
        .curves()
        .iter()
        .map(|c| admissibility_lhs(c, rho, lambda) - 1.0)
        .fold(f64::INFINITY, f64::min);
    AdmissibleCheck {
        admissible: min_slack >= -1e-9,
        min_slack,
    }
}

/// Rows `lambda (e_a + e_b) + c_gamma`, with `c_gamma(v) = int_gamma 1_v`.
pub(crate) fn constraint_rows(
    space: &MetricMeasureSpace,
    family: &CurveFamily,
    lambda: Lambda,
) -> Vec<Vec<(usize, f64)>> {
    let n = space.len();
    let mut unit = vec![0.0; n];
    family
        .curves()
        .iter()
        .map(|c| {
            let mut verts: Vec<usize> = c.vertices().to_vec();
            verts.sort_unstable();
            verts.dedup();
            verts
                .into_iter()
                .map(|v| {
                    unit[v] = 1.0;
                    let coef = admissibility_lhs(c, &unit, lambda);
                    unit[v] = 0.0;
                    (v, coef)
                })
                .filter(|&(_, coef)| coef != 0.0)
                .collect()
        })
        .collect()
}

/// Solves `min sum rho^p m` over `rows . rho >= rhs`, `rho >= 0`, with every
/// `rhs > 0` and every row non-empty. Returns the density on all vertices.
pub(crate) fn solve_power_program(
    space: &MetricMeasureSpace,
    rows: &[Vec<(usize, f64)>],
    rhs: &[f64],
    p: f64,
    opts: &ModulusOptions,
) -> (Vec<f64>, solver::Solution) {
    let n = space.len();
    let mut var_of = vec![usize::MAX; n];
    let mut vertex_of = Vec::new();
    for row in rows {
        for &(v, _) in row {
            if var_of[v] == usize::MAX {
                var_of[v] = vertex_of.len();
                vertex_of.push(v);
            }
        }
    }
    let local_rows: Vec<Vec<(usize, f64)>> = rows
        .iter()
        .map(|row| row.iter().map(|&(v, g)| (var_of[v], g)).collect())
        .collect();
    let start = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| 2.0 * b / row.iter().map(|(_, g)| g).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let prog = Program {
        weights: vertex_of.iter().map(|&v| space.mass(v)).collect(),
        offsets: vec![0.0; vertex_of.len()],
        p,
        rows: local_rows,
        rhs: rhs.to_vec(),
    };
    let sol = solver::solve(&prog, vec![start; vertex_of.len()], &opts.settings());
    let mut rho = vec![0.0; n];
    for (k, &v) in vertex_of.iter().enumerate() {
        rho[v] = sol.x[k];
    }
    (rho, sol)
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("exponent must lie in [1, inf), got {p}")));
    }
    Ok(())
}

/// `Mod_p^lambda` of a finite family.
///
/// The empty family has modulus zero; with `lambda = 0` a constant curve makes
/// the admissible set empty and the modulus `+inf`.
pub fn modulus(
    space: &MetricMeasureSpace,
    family: &CurveFamily,
    p: f64,
    lambda: Lambda,
    opts: &ModulusOptions,
) -> Result<ModulusResult> {
    check_exponent(p)?;
    opts.validate()?;
    let n = space.len();
    let trivial = |value, iterations| ModulusResult {
        value,
        rho: Density::zeros(n),
        dual_weights: vec![0.0; family.len()],
        gap: 0.0,
        p,
        lambda,
        iterations,
        converged: true,
    };
    if family.is_empty() {
        return Ok(trivial(ExtReal::Finite(0.0), 0));
    }
    let rows = constraint_rows(space, family, lambda);
    if rows.iter().any(|r| r.is_empty()) {
        return Ok(trivial(ExtReal::Infinite, 0));
    }
    let rhs = vec![1.0; rows.len()];
    let (rho, sol) = solve_power_program(space, &rows, &rhs, p, opts);
    let result = ModulusResult {
        value: ExtReal::Finite(sol.primal),
        rho: Density::new(rho)?,
        dual_weights: sol.multipliers,
        gap: sol.gap,
        p,
        lambda,
        iterations: sol.iterations,
        converged: sol.converged,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(Error::NotConverged(Box::new(Unconverged::Modulus(result))))
    }
}

/// Normalizes the multipliers of `result` into a probability plan on `family`.
pub fn optimal_plan(result: &ModulusResult, family: &CurveFamily) -> Result<Plan> {
    let value = match result.value {
        ExtReal::Finite(v) if v > 0.0 => v,
        other => return Err(invalid("value", format!("optimal plan needs 0 < Mod < inf, got {other}"))),
    };
    debug_assert!(value.is_finite());
    if result.dual_weights.len() != family.len() {
        return Err(invalid("family", "multipliers do not match the family"));
    }
    let total: f64 = result.dual_weights.iter().sum();
    if !(total > 0.0) {
        return Err(invalid("dual_weights", "no dual mass available"));
    }
    let support = family
        .curves()
        .iter()
        .zip(&result.dual_weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(c, &w)| (c.cs_reparam(), w / total))
        .collect();
    Plan::new(support)
}

/// `||Bar_lambda(plan)||_q * value^(1/p)`; equals one at an exact optimum.
pub fn duality_product(space: &MetricMeasureSpace, plan: &Plan, result: &ModulusResult) -> Result<f64> {
    let value = result
        .value
        .finite()
        .ok_or_else(|| invalid("value", "duality product of an infinite modulus"))?;
    let q = conjugate(result.p);
    let bar = barycenter(space, plan, result.lambda);
    Ok(bar.norm(space, q) * value.powf(1.0 / result.p))
}

/// Hölder conjugate exponent.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Whether `Mod_p` of the non-constant simple paths meeting `set` (at most
/// `max_hops` hops) is at most `opts.tol`; also returns that modulus.
pub fn is_exceptional(
    space: &MetricMeasureSpace,
    set: &VertexSet,
    p: f64,
    max_hops: usize,
    opts: &ModulusOptions,
) -> Result<(bool, f64)> {
    let family = family_through(space, set, max_hops);
    let r = modulus(space, &family, p, Lambda::Zero, opts)?;
    let value = r.value.finite().unwrap_or(f64::INFINITY);
    Ok((value <= opts.tol, value))
}
