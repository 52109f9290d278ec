mod common;

use common::*;
use modcalc::families::{connecting_family, family_through};
use modcalc::lipschitz::{asymptotic_slope, is_upper_gradient, lipschitz_constant, mcshane_extend, path_relax};
use modcalc::{CurveFamily, DiscreteCurve, MetricMeasureSpace, VertexSet};
use rand::Rng;

fn set(v: &[usize]) -> VertexSet {
    v.iter().copied().collect()
}

/// Every non-constant simple path of the graph.
fn all_paths(s: &MetricMeasureSpace) -> CurveFamily {
    family_through(s, &s.all_vertices(), s.len())
}

#[test]
fn slope_examples() {
    let s = MetricMeasureSpace::path(3);
    assert_eq!(asymptotic_slope(&s, &[2.0; 3]).values(), &[0.0; 3]);
    assert_eq!(asymptotic_slope(&s, &[0.0, 1.0, 2.0]).values(), &[1.0; 3]);
    assert_eq!(asymptotic_slope(&s, &[0.0, 1.0, 0.0]).values(), &[1.0; 3]);
    let lone = MetricMeasureSpace::from_parts(vec!["x".into()], vec![1.0], &[]).unwrap();
    assert_eq!(asymptotic_slope(&lone, &[7.0]).values(), &[0.0]);
}

#[test]
fn constant_examples() {
    let s = MetricMeasureSpace::path(3);
    assert_eq!(lipschitz_constant(&s, &[0.0, 5.0, 1.0], &set(&[1])).unwrap(), 0.0);
    assert_eq!(lipschitz_constant(&s, &[0.0, 1.0, 2.0], &s.all_vertices()).unwrap(), 1.0);
    let far = MetricMeasureSpace::from_parts(vec!["a".into(), "b".into()], vec![1.0; 2], &[(0, 1, 2.0)]).unwrap();
    assert_eq!(lipschitz_constant(&far, &[0.0, 3.0], &far.all_vertices()).unwrap(), 1.5);
    assert!(lipschitz_constant(&s, &[0.0; 3], &VertexSet::new()).is_err());
}

#[test]
fn mcshane_examples() {
    let s = MetricMeasureSpace::path(3);
    let f = [0.3, -1.0, 0.2];
    let l = lipschitz_constant(&s, &f, &s.all_vertices()).unwrap();
    assert_eq!(mcshane_extend(&s, &f, &s.all_vertices(), l).unwrap(), f.to_vec());
    assert_eq!(mcshane_extend(&s, &[0.0, 9.0, 9.0], &set(&[0]), 1.0).unwrap(), vec![0.0, 1.0, 2.0]);
    assert_eq!(mcshane_extend(&s, &[0.0, 9.0, 0.0], &set(&[0, 2]), 1.0).unwrap(), vec![0.0, 1.0, 0.0]);
    assert!(mcshane_extend(&s, &[0.0, 0.0, 4.0], &set(&[0, 2]), 1.0).is_err());
}

#[test]
fn mcshane_against_brute_force() {
    let mut rng = rng(41);
    for _ in 0..50 {
        let n = rng.gen_range(2..15);
        let s = random_graph(&mut rng, n, n, true);
        let k: VertexSet = (0..n).filter(|_| rng.gen_bool(0.4)).chain([0]).collect();
        let f = random_function(&mut rng, n, -3.0, 3.0);
        let own = lipschitz_constant(&s, &f, &k).unwrap();
        let l = own + rng.gen_range(0.0..1.0);
        let ext = mcshane_extend(&s, &f, &k, l).unwrap();
        for x in 0..n {
            let want = k.iter().map(|y| f[y] + l * s.distance(y, x)).fold(f64::INFINITY, f64::min);
            assert!((ext[x] - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
        for y in k.iter() {
            assert_eq!(ext[y], f[y]);
        }
        assert!(lipschitz_constant(&s, &ext, &s.all_vertices()).unwrap() <= l * (1.0 + 1e-12) + 1e-12);
        for (v, slope) in asymptotic_slope(&s, &ext).iter().enumerate() {
            assert!(*slope <= l * (1.0 + 1e-12) + 1e-12, "slope {slope} at {v} exceeds {l}");
        }
    }
}

#[test]
fn mcshane_is_monotone_and_nonexpansive() {
    let mut rng = rng(42);
    for _ in 0..50 {
        let n = rng.gen_range(2..12);
        let s = random_graph(&mut rng, n, n, false);
        let k: VertexSet = (0..n).filter(|_| rng.gen_bool(0.5)).chain([n - 1]).collect();
        let f = random_function(&mut rng, n, -2.0, 2.0);
        let bump = random_function(&mut rng, n, 0.0, 0.5);
        let g: Vec<f64> = f.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let l = lipschitz_constant(&s, &f, &k).unwrap().max(lipschitz_constant(&s, &g, &k).unwrap());
        let ef = mcshane_extend(&s, &f, &k, l).unwrap();
        let eg = mcshane_extend(&s, &g, &k, l).unwrap();
        let sup_k = k.iter().map(|v| (g[v] - f[v]).abs()).fold(0.0, f64::max);
        for x in 0..n {
            assert!(ef[x] <= eg[x] + 1e-12);
            assert!((eg[x] - ef[x]).abs() <= sup_k + 1e-12);
        }
    }
}

#[test]
fn upper_gradient_examples() {
    let s = MetricMeasureSpace::path(3);
    let f = [0.0, 1.0, 2.0];
    let through = connecting_family(&s, &set(&[0]), &set(&[2]), 2, true);
    let bad = is_upper_gradient(&f, &[0.0; 3], &through);
    assert!(!bad.holds);
    assert_eq!(bad.worst, Some(0));
    assert_eq!(bad.worst_excess, 2.0);

    let rho = [2.0 / 3.0, 4.0 / 3.0, 2.0 / 3.0];
    assert!(is_upper_gradient(&f, &rho, &all_paths(&s)).holds);

    let mut rng = rng(43);
    for _ in 0..30 {
        let n = rng.gen_range(2..12);
        let g = random_graph(&mut rng, n, n, true);
        let h = random_function(&mut rng, n, -3.0, 3.0);
        let hops = family_through(&g, &g.all_vertices(), 1);
        assert!(is_upper_gradient(&h, &asymptotic_slope(&g, &h), &hops).holds);
    }
}

#[test]
fn path_relax_examples() {
    let s = MetricMeasureSpace::path(3);
    let zero = set(&[0]);
    assert_eq!(path_relax(&s, &[0.0, 5.0, 5.0], &[1.0; 3], &zero, 1.0, 10.0).unwrap(), vec![0.0, 1.0, 2.0]);
    assert_eq!(path_relax(&s, &[0.0, 5.0, 5.0], &[1.0; 3], &zero, 1.0, 1.5).unwrap(), vec![0.0, 1.0, 1.5]);
    let c = set(&[0, 2]);
    assert_eq!(path_relax(&s, &[3.0, 9.0, 1.0], &[0.0; 3], &c, 1.0, 10.0).unwrap(), vec![1.0; 3]);
    assert_eq!(path_relax(&s, &[3.0, 9.0, 1.0], &[0.0; 3], &c, 1.0, 0.5).unwrap(), vec![0.5; 3]);
    // a mesh below every edge length isolates the sources
    assert_eq!(path_relax(&s, &[0.0; 3], &[1.0; 3], &zero, 0.5, 4.0).unwrap(), vec![0.0, 4.0, 4.0]);
    assert!(path_relax(&s, &[0.0; 3], &[1.0; 3], &VertexSet::new(), 1.0, 1.0).is_err());
    assert!(path_relax(&s, &[-1.0, 0.0, 0.0], &[1.0; 3], &zero, 1.0, 1.0).is_err());
}

fn dijkstra_oracle(s: &MetricMeasureSpace, f: &[f64], g: &[f64], c: &VertexSet, delta: f64, cap: f64) -> Vec<f64> {
    // Bellman-Ford on the proximity graph
    let n = s.len();
    let mut best: Vec<f64> = (0..n).map(|v| if c.contains(v) { f[v] } else { f64::INFINITY }).collect();
    for _ in 0..n {
        for u in 0..n {
            for v in 0..n {
                let d = s.distance(u, v);
                if u != v && d <= delta {
                    let cand = best[u] + 0.5 * (g[u] + g[v]) * d;
                    if cand < best[v] {
                        best[v] = cand;
                    }
                }
            }
        }
    }
    best.into_iter().map(|x| x.min(cap)).collect()
}

#[test]
fn path_relax_properties() {
    let mut rng = rng(44);
    for _ in 0..60 {
        let n = rng.gen_range(2..14);
        let s = random_graph(&mut rng, n, n, true);
        let f = random_function(&mut rng, n, 0.0, 4.0);
        let g = random_function(&mut rng, n, 0.0, 3.0);
        let seed = rng.gen_range(0..n);
        let c: VertexSet = (0..n).filter(|_| rng.gen_bool(0.3)).chain([seed]).collect();
        let delta = rng.gen_range(0.6..4.0);
        let cap = rng.gen_range(1.0..6.0);
        let r = path_relax(&s, &f, &g, &c, delta, cap).unwrap();
        let oracle = dijkstra_oracle(&s, &f, &g, &c, delta, cap);
        for v in 0..n {
            assert!((r[v] - oracle[v]).abs() <= 1e-12 * (1.0 + oracle[v]));
        }
        for v in c.iter() {
            assert!(r[v] <= f[v]);
        }
        for x in 0..n {
            for y in 0..n {
                let d = s.distance(x, y);
                if x != y && d <= delta {
                    assert!((r[x] - r[y]).abs() <= 0.5 * (g[x] + g[y]) * d + 1e-12);
                }
            }
        }
        let gmax = g.iter().copied().fold(0.0, f64::max);
        assert!(lipschitz_constant(&s, &r, &s.all_vertices()).unwrap() <= (cap / delta).max(gmax) + 1e-12);
        let slope = asymptotic_slope(&s, &r);
        for v in 0..n {
            let bound = s.neighbors(v).iter().map(|&(u, _)| 0.5 * (g[u] + g[v])).fold(0.0, f64::max);
            if s.neighbors(v).iter().all(|&(u, _)| s.distance(u, v) <= delta) {
                assert!(slope[v] <= bound + 1e-12);
            }
        }
    }
}

#[test]
fn path_relax_recovers_functions_with_trapezoid_gradients() {
    let mut rng = rng(45);
    for _ in 0..40 {
        let n = rng.gen_range(2..9);
        let f = random_function(&mut rng, n, 0.0, 3.0);
        let fmax = f.iter().copied().fold(0.0, f64::max);

        // proximity steps join arbitrary pairs, so g must bound f across every pair
        let s = random_graph(&mut rng, n, 3, true);
        let l = lipschitz_constant(&s, &f, &s.all_vertices()).unwrap();
        let g = vec![l; n];
        assert!(is_upper_gradient(&f, &g, &all_paths(&s)).holds);
        let r = path_relax(&s, &f, &g, &s.all_vertices(), s.diameter(), fmax + 1.0).unwrap();
        for v in 0..n {
            assert!((r[v] - f[v]).abs() <= 1e-12 * (1.0 + f[v]), "{} vs {}", r[v], f[v]);
        }

        // on a unit graph with mesh 1 only edges are steps and the slope suffices
        let u = random_graph(&mut rng, n, 3, false);
        let slope = asymptotic_slope(&u, &f);
        assert!(is_upper_gradient(&f, &slope, &all_paths(&u)).holds);
        let r = path_relax(&u, &f, &slope, &u.all_vertices(), 1.0, fmax + 1.0).unwrap();
        for v in 0..n {
            assert!((r[v] - f[v]).abs() <= 1e-12 * (1.0 + f[v]), "{} vs {}", r[v], f[v]);
        }
    }
}

#[test]
fn upper_gradient_check_reports_constant_curves_as_harmless() {
    let s = MetricMeasureSpace::path(2);
    let fam = CurveFamily::new("k", vec![DiscreteCurve::constant(&s, 0).unwrap()]);
    assert!(is_upper_gradient(&[0.0, 4.0], &[0.0, 0.0], &fam).holds);
}
