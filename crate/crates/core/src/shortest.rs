//! Multi-source Dijkstra over an adjacency list with non-negative costs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    vertex: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // min-heap on (cost, vertex); costs are never NaN here
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest potentials `min_s (pot(s) + cost(s -> v))` for every vertex.
///
/// `adjacency[u]` lists `(v, cost)` arcs. Unreachable vertices get `+inf`.
/// Arcs with infinite cost are ignored.
pub(crate) fn multi_source(adjacency: &[Vec<(usize, f64)>], sources: &[(usize, f64)]) -> Vec<f64> {
    let n = adjacency.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for &(s, pot) in sources {
        if pot < dist[s] {
            dist[s] = pot;
            heap.push(Entry { cost: pot, vertex: s });
        }
    }
    while let Some(Entry { cost, vertex }) = heap.pop() {
        if cost > dist[vertex] {
            continue;
        }
        for &(next, w) in &adjacency[vertex] {
            if !w.is_finite() {
                continue;
            }
            let cand = cost + w;
            if cand < dist[next] {
                dist[next] = cand;
                heap.push(Entry {
                    cost: cand,
                    vertex: next,
                });
            }
        }
    }
    dist
}
