mod common;

use common::*;
use modcalc::families::{connecting_family, endpoints_in, family_through};
use modcalc::{CurveFamily, MetricMeasureSpace, VertexSet};
use rand::Rng;

fn set(v: &[usize]) -> VertexSet {
    v.iter().copied().collect()
}

fn seqs(f: &CurveFamily) -> Vec<Vec<usize>> {
    f.curves().iter().map(|c| c.vertices().to_vec()).collect()
}

/// Every vertex sequence of length `1..=max_hops + 1` whose consecutive
/// entries are graph neighbours, sorted.
fn brute_walks(s: &MetricMeasureSpace, max_hops: usize) -> Vec<Vec<usize>> {
    let n = s.len();
    let adjacent = |u: usize, v: usize| s.neighbors(u).iter().any(|&(w, _)| w == v);
    let mut out = Vec::new();
    for len in 1..=max_hops + 1 {
        let mut digits = vec![0usize; len];
        loop {
            if digits.windows(2).all(|w| adjacent(w[0], w[1])) {
                out.push(digits.clone());
            }
            let mut i = 0;
            while i < len && digits[i] + 1 == n {
                digits[i] = 0;
                i += 1;
            }
            if i == len {
                break;
            }
            digits[i] += 1;
        }
    }
    out.sort();
    out
}

fn is_simple(w: &[usize]) -> bool {
    (0..w.len()).all(|i| !w[i + 1..].contains(&w[i]))
}

#[test]
fn connecting_examples() {
    let split = MetricMeasureSpace::from_parts(vec!["a".into(), "b".into()], vec![1.0; 2], &[]).unwrap();
    assert!(connecting_family(&split, &set(&[0]), &set(&[1]), 4, false).is_empty());
    let p = MetricMeasureSpace::path(3);
    assert_eq!(seqs(&connecting_family(&p, &set(&[0]), &set(&[2]), 2, true)), vec![vec![0, 1, 2]]);
    let tri = MetricMeasureSpace::cycle(3);
    assert_eq!(
        seqs(&connecting_family(&tri, &set(&[0]), &set(&[1]), 2, true)),
        vec![vec![0, 1], vec![0, 2, 1]]
    );
}

#[test]
fn through_examples() {
    let p = MetricMeasureSpace::path(3);
    assert!(family_through(&p, &VertexSet::new(), 3).is_empty());
    assert_eq!(
        seqs(&family_through(&p, &set(&[1]), 1)),
        vec![vec![0, 1], vec![1, 0], vec![1, 2], vec![2, 1]]
    );
    let g = MetricMeasureSpace::grid(3, 3);
    assert_eq!(family_through(&g, &g.all_vertices(), 1).len(), 2 * 12);
}

#[test]
fn endpoint_examples() {
    let p = MetricMeasureSpace::path(3);
    let single = endpoints_in(&p, &set(&[1]), 0);
    assert_eq!(seqs(&single), vec![vec![1]]);
    assert!(single.curves()[0].is_constant());
    let ends = seqs(&endpoints_in(&p, &set(&[0, 2]), 2));
    for want in [vec![0, 1, 2], vec![2, 1, 0], vec![0], vec![2]] {
        assert!(ends.contains(&want), "{want:?} missing from {ends:?}");
    }
    assert!(endpoints_in(&p, &VertexSet::new(), 3).is_empty());
}

#[test]
fn enumeration_matches_brute_force() {
    let mut rng = rng(51);
    for _ in 0..40 {
        let n = rng.gen_range(2..=8);
        let extra = rng.gen_range(0..n);
        let s = random_graph(&mut rng, n, extra, true);
        let hops = rng.gen_range(1..=3);
        let e: VertexSet = (0..n).filter(|_| rng.gen_bool(0.4)).chain([0]).collect();
        let f: VertexSet = (0..n).filter(|_| rng.gen_bool(0.4)).chain([n - 1]).collect();
        let all = brute_walks(&s, hops);

        let want: Vec<_> = all
            .iter()
            .filter(|w| w.len() > 1 && e.contains(w[0]) && f.contains(*w.last().unwrap()))
            .cloned()
            .collect();
        assert_eq!(seqs(&connecting_family(&s, &e, &f, hops, false)), want);
        let simple: Vec<_> = want.iter().filter(|w| is_simple(w)).cloned().collect();
        assert_eq!(seqs(&connecting_family(&s, &e, &f, hops, true)), simple);

        let through: Vec<_> = all
            .iter()
            .filter(|w| w.len() > 1 && is_simple(w) && w.iter().any(|&v| e.contains(v)))
            .cloned()
            .collect();
        assert_eq!(seqs(&family_through(&s, &e, hops)), through);

        let ends: Vec<_> = all
            .iter()
            .filter(|w| e.contains(w[0]) && e.contains(*w.last().unwrap()))
            .cloned()
            .collect();
        assert_eq!(seqs(&endpoints_in(&s, &e, hops)), ends);
    }
}

#[test]
fn curves_are_valid_and_on_unit_interval() {
    let mut rng = rng(52);
    let s = random_graph(&mut rng, 8, 6, true);
    for c in endpoints_in(&s, &s.all_vertices(), 3).curves() {
        let (a, b) = c.domain();
        assert_eq!(a, 0.0);
        assert!(c.is_constant() || b == 1.0);
        for (w, &d) in c.vertices().windows(2).zip(c.hops()) {
            assert_eq!(d, s.distance(w[0], w[1]));
        }
    }
}

#[test]
fn connecting_is_monotone_in_hops() {
    let mut rng = rng(53);
    for _ in 0..30 {
        let n = rng.gen_range(2..=8);
        let s = random_graph(&mut rng, n, n, false);
        let e = set(&[0]);
        let f = set(&[n - 1]);
        let simple = rng.gen_bool(0.5);
        for k in 1..4 {
            let small = connecting_family(&s, &e, &f, k, simple).normalized();
            let big = connecting_family(&s, &e, &f, k + 1, simple).normalized();
            assert!(small.is_subfamily_of(&big));
        }
    }
}

#[test]
fn normalization_removes_duplicates() {
    let p = MetricMeasureSpace::path(3);
    let f = family_through(&p, &set(&[1]), 2);
    let mut doubled = f.clone();
    for c in f.curves() {
        doubled.push(c.clone());
    }
    assert_eq!(doubled.len(), 2 * f.len());
    assert_eq!(f.union(&f).len(), f.len());
    assert_eq!(seqs(&doubled.normalized()), seqs(&f.normalized()));
}
