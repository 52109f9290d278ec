//! Finite weighted graphs as metric measure spaces.
//!
//! Vertices carry strictly positive mass, edges strictly positive length, and
//! the metric is the shortest-path distance of the edge-length graph. All
//! pairwise distances are computed once at construction; the space is
//! immutable afterwards.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shortest;

/// JSON description of a space.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub vertices: Vec<VertexSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: String,
    pub m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub u: String,
    pub v: String,
    pub len: f64,
}

#[derive(Debug, Clone)]
pub struct MetricMeasureSpace {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    measure: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
    dist: Vec<f64>,
}

/// Validates `spec` and computes all shortest-path distances.
pub fn build_space(spec: &SpaceSpec) -> Result<MetricMeasureSpace> {
    let ids: Vec<String> = spec.vertices.iter().map(|v| v.id.clone()).collect();
    let measure: Vec<f64> = spec.vertices.iter().map(|v| v.m).collect();
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::DuplicateVertex(id.clone()));
        }
    }
    let lookup = |id: &str| index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()));
    let mut edges = Vec::with_capacity(spec.edges.len());
    for e in &spec.edges {
        edges.push((lookup(&e.u)?, lookup(&e.v)?, e.len));
    }
    MetricMeasureSpace::from_parts(ids, measure, &edges)
}

impl MetricMeasureSpace {
    /// Builds a space from vertex ids, masses and index-based edges.
    pub fn from_parts(ids: Vec<String>, measure: Vec<f64>, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if ids.len() != measure.len() {
            return Err(crate::error::invalid("measure", "one mass per vertex required"));
        }
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(id.clone()));
            }
        }
        for (id, &m) in ids.iter().zip(&measure) {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::VertexMeasure { id: id.clone(), m });
            }
        }
        let n = ids.len();
        let mut seen = HashSet::new();
        let mut adjacency = vec![Vec::new(); n];
        let mut stored = Vec::with_capacity(edges.len());
        for &(u, v, len) in edges {
            if u >= n {
                return Err(Error::VertexIndex(u));
            }
            if v >= n {
                return Err(Error::VertexIndex(v));
            }
            if u == v {
                return Err(Error::SelfLoop(ids[u].clone()));
            }
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::EdgeLength {
                    u: ids[u].clone(),
                    v: ids[v].clone(),
                    len,
                });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge(ids[u].clone(), ids[v].clone()));
            }
            adjacency[u].push((v, len));
            adjacency[v].push((u, len));
            stored.push((u, v, len));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_by_key(|&(v, _)| v);
        }
        let mut dist = Vec::with_capacity(n * n);
        for s in 0..n {
            dist.extend(shortest::multi_source(&adjacency, &[(s, 0.0)]));
        }
        // Float sums depend on the direction of the search; keep d exactly symmetric.
        for u in 0..n {
            for v in u + 1..n {
                let d = dist[u * n + v].min(dist[v * n + u]);
                dist[u * n + v] = d;
                dist[v * n + u] = d;
            }
        }
        Ok(Self {
            ids,
            index,
            measure,
            edges: stored,
            adjacency,
            dist,
        })
    }

    /// Unit-length path `0 - 1 - ... - (n-1)` with unit masses.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        Self::from_parts(numbered(n), vec![1.0; n], &edges).expect("valid path graph")
    }

    /// Unit-length cycle on `n >= 3` vertices with unit masses.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least three vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Self::from_parts(numbered(n), vec![1.0; n], &edges).expect("valid cycle graph")
    }

    /// `rows x cols` unit grid; vertex `(r, c)` has index `r * cols + c` and id `"r,c"`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut ids = Vec::with_capacity(rows * cols);
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                ids.push(format!("{r},{c}"));
                let i = r * cols + c;
                if c + 1 < cols {
                    edges.push((i, i + 1, 1.0));
                }
                if r + 1 < rows {
                    edges.push((i, i + cols, 1.0));
                }
            }
        }
        Self::from_parts(ids, vec![1.0; rows * cols], &edges).expect("valid grid graph")
    }

    /// Same graph with new vertex masses.
    pub fn with_measure(&self, measure: Vec<f64>) -> Result<Self> {
        Self::from_parts(self.ids.clone(), measure, &self.edges)
    }

    pub fn to_spec(&self) -> SpaceSpec {
        SpaceSpec {
            vertices: self
                .ids
                .iter()
                .zip(&self.measure)
                .map(|(id, &m)| VertexSpec { id: id.clone(), m })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v, len)| EdgeSpec {
                    u: self.ids[u].clone(),
                    v: self.ids[v].clone(),
                    len,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<usize> {
        if v < self.len() {
            Ok(v)
        } else {
            Err(Error::VertexIndex(v))
        }
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn mass(&self, v: usize) -> f64 {
        self.measure[v]
    }

    pub fn measure_of(&self, set: &VertexSet) -> f64 {
        set.iter().map(|v| self.measure[v]).sum()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Graph neighbours of `v` with the connecting edge length, sorted by index.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Shortest-path distance; `+inf` across components.
    pub fn distance(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.len() + v]
    }

    /// Checked variant of [`distance`](Self::distance) by vertex id.
    pub fn distance_by_id(&self, u: &str, v: &str) -> Result<f64> {
        Ok(self.distance(self.vertex(u)?, self.vertex(v)?))
    }

    /// Largest finite pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max)
    }

    /// Largest metric distance between graph neighbours.
    pub fn max_hop(&self) -> f64 {
        self.edges
            .iter()
            .map(|&(u, v, _)| self.distance(u, v))
            .fold(0.0, f64::max)
    }

    pub fn is_connected(&self) -> bool {
        self.dist.iter().all(|d| d.is_finite())
    }

    /// Open ball `{v : d(center, v) < r}`, or the closed ball when `closed`.
    pub fn ball(&self, center: usize, r: f64, closed: bool) -> Result<VertexSet> {
        self.check_vertex(center)?;
        if !(r >= 0.0) {
            return Err(crate::error::invalid("r", "radius must be non-negative"));
        }
        Ok((0..self.len())
            .filter(|&v| {
                let d = self.distance(center, v);
                if closed {
                    d <= r
                } else {
                    d < r
                }
            })
            .collect())
    }

    pub fn all_vertices(&self) -> VertexSet {
        (0..self.len()).collect()
    }

    pub fn vertex_set<S: AsRef<str>>(&self, ids: &[S]) -> Result<VertexSet> {
        ids.iter().map(|id| self.vertex(id.as_ref())).collect()
    }

    /// `(sum |h|^p m)^(1/p)`, or `max |h|` for `p = inf`.
    pub fn lp_norm(&self, h: &[f64], p: f64) -> f64 {
        if p.is_infinite() {
            return h.iter().fold(0.0, |a, x| a.max(x.abs()));
        }
        self.integral_pow(h, p).powf(1.0 / p)
    }

    /// `sum |h|^p m`.
    pub fn integral_pow(&self, h: &[f64], p: f64) -> f64 {
        h.iter()
            .zip(&self.measure)
            .map(|(x, m)| {
                let a = x.abs();
                if a == 0.0 {
                    0.0
                } else {
                    a.powf(p) * m
                }
            })
            .sum()
    }
}

fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Set of vertex indices of one space.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct VertexSet(BTreeSet<usize>);

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn insert(&mut self, v: usize) -> bool {
        self.0.insert(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &Self) -> Self {
        self.0.union(&other.0).copied().collect()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.0.intersection(&other.0).copied().collect()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Indicator vector of length `n`.
    pub fn indicator(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for v in self.iter() {
            out[v] = 1.0;
        }
        out
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}
