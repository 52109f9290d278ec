//! JSON schemas for curves, vertex functions, families and plans, and
//! serializer helpers for vectors that may hold `inf`.

use std::collections::BTreeMap;

use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::curve::DiscreteCurve;
use crate::error::{invalid, Result};
use crate::families::{connecting_family, endpoints_in, family_through, CurveFamily};
use crate::plans::Plan;
use crate::space::MetricMeasureSpace;

/// Writes finite entries as numbers and non-finite ones as `"inf"`, `"-inf"`
/// or `"nan"`.
pub fn ser_values<S: Serializer, T: AsRef<[f64]>>(values: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    let values = values.as_ref();
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for &x in values {
        if x.is_finite() {
            seq.serialize_element(&x)?;
        } else if x.is_nan() {
            seq.serialize_element("nan")?;
        } else if x > 0.0 {
            seq.serialize_element("inf")?;
        } else {
            seq.serialize_element("-inf")?;
        }
    }
    seq.end()
}

/// Borrowed vector serialized through [`ser_values`].
#[derive(Debug, Clone, Copy)]
pub struct Values<'a>(pub &'a [f64]);

impl Serialize for Values<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ser_values(&self.0, s)
    }
}

/// `f64` counterpart of [`ser_values`].
pub fn ser_real<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// `{"times": [...], "vertices": [ids]}`; without `times` the curve is
/// constant-speed on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    pub vertices: Vec<String>,
}

impl CurveSpec {
    pub fn build(&self, space: &MetricMeasureSpace) -> Result<DiscreteCurve> {
        let vertices = self
            .vertices
            .iter()
            .map(|id| space.vertex(id))
            .collect::<Result<Vec<_>>>()?;
        match &self.times {
            Some(t) => DiscreteCurve::new(space, t.clone(), vertices),
            None => DiscreteCurve::constant_speed(space, vertices),
        }
    }

    pub fn from_curve(space: &MetricMeasureSpace, curve: &DiscreteCurve) -> Self {
        Self {
            times: Some(curve.times().to_vec()),
            vertices: curve.vertices().iter().map(|&v| space.id(v).to_string()).collect(),
        }
    }
}

/// `{"values": {id: value}}`; every vertex must be assigned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub values: BTreeMap<String, f64>,
}

impl FunctionSpec {
    pub fn build(&self, space: &MetricMeasureSpace) -> Result<Vec<f64>> {
        let mut out = vec![f64::NAN; space.len()];
        for (id, &x) in &self.values {
            if !x.is_finite() {
                return Err(invalid("values", format!("value at `{id}` is not finite")));
            }
            out[space.vertex(id)?] = x;
        }
        if let Some(v) = out.iter().position(|x| x.is_nan()) {
            return Err(invalid("values", format!("no value for vertex `{}`", space.id(v))));
        }
        Ok(out)
    }

    pub fn from_values(space: &MetricMeasureSpace, f: &[f64]) -> Self {
        Self {
            values: f.iter().enumerate().map(|(v, &x)| (space.id(v).to_string(), x)).collect(),
        }
    }
}

fn default_simple() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    /// Walks from `E` to `F`.
    Connecting {
        #[serde(rename = "E")]
        from: Vec<String>,
        #[serde(rename = "F")]
        to: Vec<String>,
        max_hops: usize,
        #[serde(default = "default_simple")]
        simple: bool,
    },
    /// Simple paths meeting `E`.
    Through {
        #[serde(rename = "E")]
        set: Vec<String>,
        max_hops: usize,
    },
    /// Walks with both endpoints in `E`, constant curves included.
    Endpoints {
        #[serde(rename = "E")]
        set: Vec<String>,
        max_hops: usize,
    },
    Explicit { curves: Vec<CurveSpec> },
}

impl FamilySpec {
    pub fn build(&self, space: &MetricMeasureSpace) -> Result<CurveFamily> {
        Ok(match self {
            FamilySpec::Connecting {
                from,
                to,
                max_hops,
                simple,
            } => connecting_family(space, &space.vertex_set(from)?, &space.vertex_set(to)?, *max_hops, *simple),
            FamilySpec::Through { set, max_hops } => family_through(space, &space.vertex_set(set)?, *max_hops),
            FamilySpec::Endpoints { set, max_hops } => endpoints_in(space, &space.vertex_set(set)?, *max_hops),
            FamilySpec::Explicit { curves } => CurveFamily::new(
                "explicit",
                curves.iter().map(|c| c.build(space)).collect::<Result<_>>()?,
            ),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedCurveSpec {
    pub curve: CurveSpec,
    pub w: f64,
}

/// `{"support": [{"curve": {...}, "w": weight}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    pub support: Vec<WeightedCurveSpec>,
}

impl PlanSpec {
    pub fn build(&self, space: &MetricMeasureSpace) -> Result<Plan> {
        Plan::new(
            self.support
                .iter()
                .map(|s| Ok((s.curve.build(space)?, s.w)))
                .collect::<Result<_>>()?,
        )
    }

    pub fn from_plan(space: &MetricMeasureSpace, plan: &Plan) -> Self {
        Self {
            support: plan
                .support()
                .iter()
                .map(|(c, w)| WeightedCurveSpec {
                    curve: CurveSpec::from_curve(space, c),
                    w: *w,
                })
                .collect(),
        }
    }
}
