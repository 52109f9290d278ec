#![allow(dead_code)]

use modcalc::families::CurveFamily;
use modcalc::{DiscreteCurve, MetricMeasureSpace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph: random spanning tree plus `extra` chords, edge lengths
/// in `[0.5, 2]` when `weighted`, masses in `[0.2, 5]`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize, weighted: bool) -> MetricMeasureSpace {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let len = |rng: &mut ChaCha8Rng| if weighted { rng.gen_range(0.5..2.0) } else { 1.0 };
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let l = len(rng);
        edges.push((u, v, l));
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && !edges.iter().any(|&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u)) {
            let l = len(rng);
            edges.push((u, v, l));
        }
    }
    let ids = (0..n).map(|i| format!("v{i}")).collect();
    let m = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
    MetricMeasureSpace::from_parts(ids, m, &edges).expect("valid random graph")
}

/// Random graph walk with exactly `hops` hops (fewer at isolated vertices).
pub fn random_walk(rng: &mut ChaCha8Rng, space: &MetricMeasureSpace, hops: usize) -> Vec<usize> {
    let mut walk = vec![rng.gen_range(0..space.len())];
    for _ in 0..hops {
        let nb = space.neighbors(*walk.last().unwrap());
        if nb.is_empty() {
            break;
        }
        walk.push(nb.choose(rng).unwrap().0);
    }
    walk
}

/// Strictly increasing times starting at 0 with random gaps.
pub fn random_times(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut t = 0.0;
    let mut out = vec![0.0];
    for _ in 1..k {
        t += rng.gen_range(0.05..2.0);
        out.push(t);
    }
    out
}

pub fn random_curve(rng: &mut ChaCha8Rng, space: &MetricMeasureSpace, max_hops: usize) -> DiscreteCurve {
    let hops = rng.gen_range(1..=max_hops);
    let walk = random_walk(rng, space, hops);
    let times = random_times(rng, walk.len());
    DiscreteCurve::new(space, times, walk).expect("valid walk")
}

pub fn random_family(rng: &mut ChaCha8Rng, space: &MetricMeasureSpace, curves: usize, max_hops: usize) -> CurveFamily {
    CurveFamily::new("random", (0..curves).map(|_| random_curve(rng, space, max_hops)).collect())
}

pub fn random_function(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// `(sum_v c_v^q m_v^(1-q))^(1-p)` with `c_v` the half-hop arc mass at `v`,
/// computed from the vertex sequence and the metric alone.
pub fn single_curve_closed_form(space: &MetricMeasureSpace, walk: &[usize], p: f64) -> f64 {
    let q = p / (p - 1.0);
    let mut c = vec![0.0; space.len()];
    for w in walk.windows(2) {
        let d = space.distance(w[0], w[1]);
        c[w[0]] += d / 2.0;
        c[w[1]] += d / 2.0;
    }
    c.iter()
        .zip(space.measure())
        .filter(|(cv, _)| **cv > 0.0)
        .map(|(cv, mv)| cv.powf(q) * mv.powf(1.0 - q))
        .sum::<f64>()
        .powf(1.0 - p)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}
