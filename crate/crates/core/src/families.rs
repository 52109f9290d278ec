//! Finite curve families built by hop-bounded walk enumeration.
//!
//! Every enumerated curve is a graph walk, constant-speed parametrized on
//! `[0, 1]`. Families come out normalized: deduplicated by vertex sequence and
//! sorted lexicographically by it.

use crate::curve::DiscreteCurve;
use crate::space::{MetricMeasureSpace, VertexSet};

#[derive(Debug, Clone, PartialEq)]
pub struct CurveFamily {
    label: String,
    curves: Vec<DiscreteCurve>,
}

impl CurveFamily {
    pub fn new(label: impl Into<String>, curves: Vec<DiscreteCurve>) -> Self {
        Self {
            label: label.into(),
            curves,
        }
    }

    pub fn empty(label: impl Into<String>) -> Self {
        Self::new(label, Vec::new())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn curves(&self) -> &[DiscreteCurve] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn push(&mut self, curve: DiscreteCurve) {
        self.curves.push(curve);
    }

    /// Deduplicates by vertex sequence (first occurrence wins) and sorts.
    pub fn normalized(&self) -> Self {
        let mut curves = self.curves.clone();
        curves.sort_by(|a, b| a.vertices().cmp(b.vertices()));
        curves.dedup_by(|a, b| a.vertices() == b.vertices());
        Self::new(self.label.clone(), curves)
    }

    /// Normalized union.
    pub fn union(&self, other: &Self) -> Self {
        let mut curves = self.curves.clone();
        curves.extend(other.curves.iter().cloned());
        Self::new(format!("{} | {}", self.label, other.label), curves).normalized()
    }

    /// Whether every vertex sequence of `self` also occurs in `other`.
    pub fn is_subfamily_of(&self, other: &Self) -> bool {
        self.curves
            .iter()
            .all(|c| other.curves.iter().any(|d| d.vertices() == c.vertices()))
    }

    /// Vertices visited by at least one curve.
    pub fn touched(&self) -> VertexSet {
        self.curves.iter().flat_map(|c| c.vertices().iter().copied()).collect()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Walks (or simple paths) from `from` to `to` with `1..=max_hops` hops.
pub fn connecting_family(
    space: &MetricMeasureSpace,
    from: &VertexSet,
    to: &VertexSet,
    max_hops: usize,
    simple: bool,
) -> CurveFamily {
    let seqs = enumerate_walks(space, from, max_hops, simple, |w| w.len() > 1 && to.contains(*w.last().unwrap()));
    build(space, "connecting", seqs)
}

/// Non-constant simple paths with at most `max_hops` hops meeting `set`.
pub fn family_through(space: &MetricMeasureSpace, set: &VertexSet, max_hops: usize) -> CurveFamily {
    if set.is_empty() {
        return CurveFamily::empty("through");
    }
    let seqs = enumerate_walks(space, &space.all_vertices(), max_hops, true, |w| {
        w.len() > 1 && w.iter().any(|&v| set.contains(v))
    });
    build(space, "through", seqs)
}

/// Walks with both endpoints in `set` and at most `max_hops` hops, including
/// the constant curves at the vertices of `set`.
pub fn endpoints_in(space: &MetricMeasureSpace, set: &VertexSet, max_hops: usize) -> CurveFamily {
    let seqs = enumerate_walks(space, set, max_hops, false, |w| set.contains(*w.last().unwrap()));
    build(space, "endpoints", seqs)
}

fn build(space: &MetricMeasureSpace, label: &str, mut seqs: Vec<Vec<usize>>) -> CurveFamily {
    seqs.sort();
    seqs.dedup();
    let curves = seqs
        .into_iter()
        .map(|s| DiscreteCurve::constant_speed(space, s).expect("graph walks are valid curves"))
        .collect();
    CurveFamily::new(label, curves)
}

fn enumerate_walks(
    space: &MetricMeasureSpace,
    starts: &VertexSet,
    max_hops: usize,
    simple: bool,
    accept: impl Fn(&[usize]) -> bool,
) -> Vec<Vec<usize>> {
    fn extend(
        space: &MetricMeasureSpace,
        walk: &mut Vec<usize>,
        max_hops: usize,
        simple: bool,
        accept: &dyn Fn(&[usize]) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        if accept(walk) {
            out.push(walk.clone());
        }
        if walk.len() > max_hops {
            return;
        }
        let last = *walk.last().unwrap();
        for &(next, _) in space.neighbors(last) {
            if simple && walk.contains(&next) {
                continue;
            }
            walk.push(next);
            extend(space, walk, max_hops, simple, accept, out);
            walk.pop();
        }
    }
    let mut out = Vec::new();
    for s in starts.iter() {
        let mut walk = vec![s];
        extend(space, &mut walk, max_hops, simple, &accept, &mut out);
    }
    out
}
