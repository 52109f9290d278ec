//! Discrete curves: time-stamped vertex walks with hop length `d(p_i, p_{i+1})`.
//!
//! Arc-length mass of each hop is split half-and-half onto its two endpoint
//! breakpoints. The path integral is the matching trapezoid sum, so it is
//! linear in the density, additive under concatenation and invariant under
//! reversal and retiming.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::space::MetricMeasureSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    times: Vec<f64>,
    vertices: Vec<usize>,
    hops: Vec<f64>,
}

/// Signed atoms indexed by breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasureOnCurve {
    pub atoms: Vec<f64>,
}

impl AtomicMeasureOnCurve {
    pub fn total(&self) -> f64 {
        self.atoms.iter().sum()
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.abs()).sum()
    }
}

/// `s_gamma`, `mu_{f o gamma}` and `s_{f o gamma}` of one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationMeasures {
    pub arc: AtomicMeasureOnCurve,
    pub signed: AtomicMeasureOnCurve,
    pub total: AtomicMeasureOnCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StieltjesRule {
    /// Integrand sampled at the start of each step.
    Left,
    /// Integrand sampled at the end of each step.
    Right,
}

/// The three terms of the path Leibniz identity `boundary = forward + backward`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbpTerms {
    /// `T(f1, f2)`: left-rule integral of `f1` against `f2`.
    pub forward: f64,
    /// `T(f2, f1)`: right-rule integral of `f2` against `f1`.
    pub backward: f64,
    /// `(f1 f2)(end) - (f1 f2)(start)`.
    pub boundary: f64,
}

impl IbpTerms {
    pub fn defect(&self) -> f64 {
        self.boundary - self.forward - self.backward
    }
}

impl DiscreteCurve {
    /// Validates breakpoints against `space`.
    ///
    /// Times must be finite and strictly increasing; consecutive vertices must
    /// differ and lie in one connected component.
    pub fn new(space: &MetricMeasureSpace, times: Vec<f64>, vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidCurve("no breakpoints".into()));
        }
        if times.len() != vertices.len() {
            return Err(Error::InvalidCurve(format!(
                "{} times for {} vertices",
                times.len(),
                vertices.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidCurve("non-finite time".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCurve("times must be strictly increasing".into()));
        }
        for &v in &vertices {
            space.check_vertex(v)?;
        }
        let mut hops = Vec::with_capacity(vertices.len() - 1);
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidCurve(format!(
                    "zero-length hop at `{}`",
                    space.id(w[0])
                )));
            }
            let d = space.distance(w[0], w[1]);
            if !d.is_finite() {
                return Err(Error::InvalidCurve(format!(
                    "`{}` and `{}` are in different components",
                    space.id(w[0]),
                    space.id(w[1])
                )));
            }
            hops.push(d);
        }
        Ok(Self { times, vertices, hops })
    }

    /// Constant-speed curve on `[0, 1]` through `vertices`.
    pub fn constant_speed(space: &MetricMeasureSpace, vertices: Vec<usize>) -> Result<Self> {
        let placeholder: Vec<f64> = (0..vertices.len()).map(|i| i as f64).collect();
        Ok(Self::new(space, placeholder, vertices)?.cs_reparam())
    }

    /// The single-breakpoint constant curve at `v`.
    pub fn constant(space: &MetricMeasureSpace, v: usize) -> Result<Self> {
        Self::new(space, vec![0.0], vec![v])
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Hop lengths `d(p_i, p_{i+1})`.
    pub fn hops(&self) -> &[f64] {
        &self.hops
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("non-empty curve")
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().expect("non-empty curve"))
    }

    pub fn is_constant(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn length(&self) -> f64 {
        self.hops.iter().sum()
    }

    /// Piecewise-constant metric speed on each hop.
    pub fn speeds(&self) -> Vec<f64> {
        self.hops
            .iter()
            .zip(self.times.windows(2))
            .map(|(d, w)| d / (w[1] - w[0]))
            .collect()
    }

    /// Same vertex sequence with new breakpoint times.
    pub fn retime(&self, times: Vec<f64>) -> Result<Self> {
        if times.len() != self.times.len() {
            return Err(Error::InvalidCurve("retiming must keep the breakpoint count".into()));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCurve("times must be finite and strictly increasing".into()));
        }
        Ok(Self {
            times,
            vertices: self.vertices.clone(),
            hops: self.hops.clone(),
        })
    }

    /// The curve run backwards on the same domain.
    pub fn reversed(&self) -> Self {
        let (a, b) = self.domain();
        Self {
            times: self.times.iter().rev().map(|t| a + b - t).collect(),
            vertices: self.vertices.iter().rev().copied().collect(),
            hops: self.hops.iter().rev().copied().collect(),
        }
    }

    /// Constant-speed reparametrization on `[0, 1]`: breakpoint `i` sits at the
    /// fraction of length travelled before it.
    pub fn cs_reparam(&self) -> Self {
        if self.is_constant() {
            return Self {
                times: vec![0.0],
                vertices: self.vertices.clone(),
                hops: Vec::new(),
            };
        }
        let total = self.length();
        let mut times = Vec::with_capacity(self.vertices.len());
        let mut acc = 0.0;
        times.push(0.0);
        for (i, d) in self.hops.iter().enumerate() {
            acc += d;
            times.push(if i + 1 == self.hops.len() { 1.0 } else { acc / total });
        }
        Self {
            times,
            vertices: self.vertices.clone(),
            hops: self.hops.clone(),
        }
    }

    /// Trapezoid path integral `sum_i (rho(p_i) + rho(p_{i+1}))/2 * d_i`.
    ///
    /// `+inf` values propagate; the constant curve integrates to zero.
    pub fn path_integral(&self, rho: &[f64]) -> f64 {
        self.hops
            .iter()
            .zip(self.vertices.windows(2))
            .map(|(d, w)| 0.5 * (rho[w[0]] + rho[w[1]]) * d)
            .sum()
    }

    /// Arc-length, signed and total variation atoms of `f` along the curve.
    pub fn variation_measures(&self, f: &[f64]) -> VariationMeasures {
        let n = self.vertices.len();
        let mut arc = vec![0.0; n];
        let mut signed = vec![0.0; n];
        let mut total = vec![0.0; n];
        for (i, (d, w)) in self.hops.iter().zip(self.vertices.windows(2)).enumerate() {
            let df = f[w[1]] - f[w[0]];
            for k in [i, i + 1] {
                arc[k] += 0.5 * d;
                signed[k] += 0.5 * df;
                total[k] += 0.5 * df.abs();
            }
        }
        VariationMeasures {
            arc: AtomicMeasureOnCurve { atoms: arc },
            signed: AtomicMeasureOnCurve { atoms: signed },
            total: AtomicMeasureOnCurve { atoms: total },
        }
    }

    /// Riemann-Stieltjes sum of `a` against `f`.
    pub fn stieltjes(&self, a: &[f64], f: &[f64], rule: StieltjesRule) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| {
                let sample = match rule {
                    StieltjesRule::Left => a[w[0]],
                    StieltjesRule::Right => a[w[1]],
                };
                sample * (f[w[1]] - f[w[0]])
            })
            .sum()
    }

    /// Terms of the path integration-by-parts identity; exact by Abel summation.
    pub fn ibp_identity(&self, f1: &[f64], f2: &[f64]) -> IbpTerms {
        let (a, b) = (self.start(), self.end());
        IbpTerms {
            forward: self.stieltjes(f1, f2, StieltjesRule::Left),
            backward: self.stieltjes(f2, f1, StieltjesRule::Right),
            boundary: f1[b] * f2[b] - f1[a] * f2[a],
        }
    }

    /// Sub-curve between breakpoint times `s < t`, affinely rescaled to `[0, 1]`.
    pub fn restrict(&self, s: f64, t: f64) -> Result<Self> {
        if !(s < t) {
            return Err(invalid("s", "restriction needs s < t"));
        }
        let i = self.breakpoint_at(s).ok_or_else(|| invalid("s", format!("{s} is not a breakpoint time")))?;
        let j = self.breakpoint_at(t).ok_or_else(|| invalid("t", format!("{t} is not a breakpoint time")))?;
        let span = t - s;
        let mut times: Vec<f64> = self.times[i..=j].iter().map(|x| (x - s) / span).collect();
        times[0] = 0.0;
        *times.last_mut().expect("non-empty") = 1.0;
        Ok(Self {
            times,
            vertices: self.vertices[i..=j].to_vec(),
            hops: self.hops[i..j].to_vec(),
        })
    }

    fn breakpoint_at(&self, t: f64) -> Option<usize> {
        let scale = 1.0 + t.abs();
        self.times.iter().position(|x| (x - t).abs() <= 1e-12 * scale)
    }

    /// `q`-energy `sum_i dt_i * speed_i^q`; `max speed` for `q = inf`.
    pub fn q_energy(&self, q: f64) -> Result<f64> {
        if !(q >= 1.0) {
            return Err(invalid("q", "energy exponent must be >= 1"));
        }
        let speeds = self.speeds();
        if q.is_infinite() {
            return Ok(speeds.into_iter().fold(0.0, f64::max));
        }
        Ok(speeds
            .iter()
            .zip(self.times.windows(2))
            .map(|(v, w)| (w[1] - w[0]) * v.powf(q))
            .sum())
    }

    /// Aggregated arc-length atoms per vertex (`gamma_# s_gamma`).
    pub fn arc_mass_by_vertex(&self, n_vertices: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_vertices];
        for (d, w) in self.hops.iter().zip(self.vertices.windows(2)) {
            out[w[0]] += 0.5 * d;
            out[w[1]] += 0.5 * d;
        }
        out
    }

    /// Vertex occupied at time `t`: the nearer endpoint of the current hop,
    /// the later one at the exact hop midpoint.
    pub fn position_at(&self, t: f64) -> usize {
        if self.is_constant() {
            return self.vertices[0];
        }
        let k = match self.times.partition_point(|&x| x <= t) {
            0 => return self.vertices[0],
            k if k >= self.times.len() => return self.end(),
            k => k - 1,
        };
        let mid = 0.5 * (self.times[k] + self.times[k + 1]);
        if t < mid {
            self.vertices[k]
        } else {
            self.vertices[k + 1]
        }
    }

    /// Vertex sequence rendered with ids, for reports.
    pub fn describe(&self, space: &MetricMeasureSpace) -> String {
        self.vertices.iter().map(|&v| space.id(v)).collect::<Vec<_>>().join("-")
    }
}
