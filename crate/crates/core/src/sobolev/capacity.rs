use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{invalid, Error, Result, Unconverged};
use crate::families::CurveFamily;
use crate::lipschitz::Density;
use crate::modulus::{check_exponent, constraint_rows, Lambda, ModulusOptions};
use crate::solver::{self, Program, Settings};
use crate::space::{MetricMeasureSpace, VertexSet};

#[derive(Debug, Clone, Serialize)]
pub struct CapacityResult {
    /// `sum |f|^p m + sum rho^p m` at the witness.
    pub value: f64,
    #[serde(serialize_with = "crate::io::ser_values")]
    pub f: Vec<f64>,
    #[serde(serialize_with = "crate::io::ser_values")]
    pub rho: Density,
    pub gap: f64,
    pub p: f64,
    pub truncated: bool,
    pub iterations: usize,
    pub converged: bool,
}

/// `f(v)` as `constant + sum coef * x_var`.
struct Affine {
    constant: f64,
    terms: Vec<(usize, f64)>,
}

/// `Cap_p(E)` relative to `family`: the least `sum |f|^p m + sum rho^p m`
/// with `f >= 1` on `E` and `|f(end) - f(start)| <= int_gamma rho` along
/// every curve. The truncated variant also imposes `0 <= f <= 1`, with
/// `f = 1` on `E`.
pub fn capacity(
    space: &MetricMeasureSpace,
    set: &VertexSet,
    family: &CurveFamily,
    p: f64,
    truncated: bool,
    opts: &ModulusOptions,
) -> Result<CapacityResult> {
    check_exponent(p)?;
    if !(opts.tol > 0.0) {
        return Err(invalid("tol", "tolerance must be positive"));
    }
    if let Some(v) = set.iter().find(|&v| v >= space.len()) {
        return Err(Error::VertexIndex(v));
    }
    let n = space.len();
    if set.is_empty() {
        return Ok(CapacityResult {
            value: 0.0,
            f: vec![0.0; n],
            rho: Density::zeros(n),
            gap: 0.0,
            p,
            truncated,
            iterations: 0,
            converged: true,
        });
    }

    let mut weights = Vec::new();
    let mut offsets = Vec::new();
    let mut x0 = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut rhs = Vec::new();
    let mut constant = 0.0;
    let mut new_var = |w: f64, o: f64, start: f64, weights: &mut Vec<f64>, offsets: &mut Vec<f64>| {
        weights.push(w);
        offsets.push(o);
        x0.push(start);
        weights.len() - 1
    };

    // f(v) = 1 + u on E (untruncated) or 1 (truncated); f+ - f- or f in [0, 1] elsewhere
    let mut value_of = Vec::with_capacity(n);
    for v in 0..n {
        let m = space.mass(v);
        let affine = match (set.contains(v), truncated) {
            (true, false) => {
                let u = new_var(m, 1.0, 0.5, &mut weights, &mut offsets);
                Affine {
                    constant: 1.0,
                    terms: vec![(u, 1.0)],
                }
            }
            (true, true) => {
                constant += m;
                Affine {
                    constant: 1.0,
                    terms: vec![],
                }
            }
            (false, false) => {
                let plus = new_var(m, 0.0, 0.5, &mut weights, &mut offsets);
                let minus = new_var(m, 0.0, 0.5, &mut weights, &mut offsets);
                Affine {
                    constant: 0.0,
                    terms: vec![(plus, 1.0), (minus, -1.0)],
                }
            }
            (false, true) => {
                let x = new_var(m, 0.0, 0.5, &mut weights, &mut offsets);
                rows.push(vec![(x, -1.0)]);
                rhs.push(-1.0);
                Affine {
                    constant: 0.0,
                    terms: vec![(x, 1.0)],
                }
            }
        };
        value_of.push(affine);
    }

    let curve_rows = constraint_rows(space, family, Lambda::Zero);
    let mut rho_var = vec![usize::MAX; n];
    let min_length = family
        .curves()
        .iter()
        .map(|c| c.length())
        .filter(|&l| l > 0.0)
        .fold(f64::INFINITY, f64::min);
    // |f(b) - f(a)| <= 1.5 at the start point
    let rho_start = 4.0 / min_length;
    for (c, row) in family.curves().iter().zip(&curve_rows) {
        if row.is_empty() {
            continue;
        }
        for &(v, _) in row {
            if rho_var[v] == usize::MAX {
                rho_var[v] = new_var(space.mass(v), 0.0, rho_start, &mut weights, &mut offsets);
            }
        }
        let (a, b) = (&value_of[c.start()], &value_of[c.end()]);
        for sign in [1.0, -1.0] {
            // c . rho - sign (f(b) - f(a)) >= 0
            let mut entries: BTreeMap<usize, f64> = row.iter().map(|&(v, g)| (rho_var[v], g)).collect();
            for &(x, k) in &b.terms {
                *entries.entry(x).or_default() -= sign * k;
            }
            for &(x, k) in &a.terms {
                *entries.entry(x).or_default() += sign * k;
            }
            rows.push(entries.into_iter().filter(|&(_, k)| k != 0.0).collect());
            rhs.push(sign * (b.constant - a.constant));
        }
    }

    let prog = Program {
        weights,
        offsets,
        p,
        rows,
        rhs,
    };
    if prog.weights.is_empty() {
        // truncated with E = every vertex: the program has no variables
        return Ok(CapacityResult {
            value: constant,
            f: vec![1.0; n],
            rho: Density::zeros(n),
            gap: 0.0,
            p,
            truncated,
            iterations: 0,
            converged: true,
        });
    }
    let settings = Settings {
        shift: constant,
        ..opts.settings()
    };
    let sol = solver::solve(&prog, x0, &settings);
    let eval = |a: &Affine| a.constant + a.terms.iter().map(|&(x, k)| k * sol.x[x]).sum::<f64>();
    let f: Vec<f64> = value_of.iter().map(eval).collect();
    let rho: Vec<f64> = rho_var
        .iter()
        .map(|&x| if x == usize::MAX { 0.0 } else { sol.x[x] })
        .collect();
    let value = sol.primal + constant;
    let result = CapacityResult {
        value,
        f,
        rho: Density::new(rho)?,
        gap: sol.gap,
        p,
        truncated,
        iterations: sol.iterations,
        converged: sol.converged,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(Error::NotConverged(Box::new(Unconverged::Capacity(result))))
    }
}
