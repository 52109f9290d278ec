mod common;

use common::*;
use modcalc::families::{connecting_family, family_through};
use modcalc::modulus::{admissible_check, conjugate, duality_product, is_exceptional, modulus, optimal_plan};
use modcalc::plans::barycenter;
use modcalc::{CurveFamily, DiscreteCurve, ExtReal, Lambda, MetricMeasureSpace, ModulusOptions, Plan, VertexSet};
use rand::seq::SliceRandom;
use rand::Rng;

const TOL: f64 = 1e-8;

fn opts() -> ModulusOptions {
    ModulusOptions::with_tol(TOL)
}

fn value(s: &MetricMeasureSpace, f: &CurveFamily, p: f64, l: Lambda) -> f64 {
    modulus(s, f, p, l, &opts()).unwrap().value.finite().unwrap()
}

fn edge() -> (MetricMeasureSpace, CurveFamily) {
    let s = MetricMeasureSpace::path(2);
    let f = CurveFamily::new("edge", vec![DiscreteCurve::constant_speed(&s, vec![0, 1]).unwrap()]);
    (s, f)
}

#[test]
fn admissibility_examples() {
    let mut rng = rng(61);
    let s = random_graph(&mut rng, 10, 6, true);
    let fam = random_family(&mut rng, &s, 15, 4);
    let lmin = fam.curves().iter().map(|c| c.length()).fold(f64::INFINITY, f64::min);
    assert!(admissible_check(&vec![1.0 / lmin; 10], &fam, Lambda::Zero).admissible);

    let p = MetricMeasureSpace::path(3);
    let k = CurveFamily::new("k", vec![DiscreteCurve::constant(&p, 1).unwrap()]);
    let zero = admissible_check(&[1e6; 3], &k, Lambda::Zero);
    assert!(!zero.admissible);
    assert_eq!(zero.min_slack, -1.0);
    assert!(admissible_check(&[0.0, 0.5, 0.0], &k, Lambda::One).admissible);
    assert!(!admissible_check(&[0.0, 0.49, 0.0], &k, Lambda::One).admissible);
    assert!(admissible_check(&[0.0; 3], &CurveFamily::empty("e"), Lambda::Zero).admissible);
}

#[test]
fn trivial_values() {
    let p = MetricMeasureSpace::path(3);
    assert_eq!(modulus(&p, &CurveFamily::empty("e"), 2.0, Lambda::One, &opts()).unwrap().value, ExtReal::Finite(0.0));
    let k = CurveFamily::new("k", vec![DiscreteCurve::constant(&p, 0).unwrap()]);
    assert!(modulus(&p, &k, 1.5, Lambda::Zero, &opts()).unwrap().value.is_infinite());
    assert!(modulus(&p, &k, 0.5, Lambda::Zero, &opts()).is_err());
    assert!(modulus(&p, &k, 2.0, Lambda::Zero, &ModulusOptions::with_tol(0.0)).is_err());
}

#[test]
fn single_edge() {
    let (s, f) = edge();
    let r = modulus(&s, &f, 2.0, Lambda::Zero, &opts()).unwrap();
    assert!((r.value.finite().unwrap() - 2.0).abs() <= 1e-6);
    assert!(r.gap <= TOL);
    let plan = optimal_plan(&r, &f).unwrap();
    assert_eq!(plan.support().len(), 1);
    let bar = barycenter(&s, &plan, Lambda::Zero);
    assert_eq!(bar.density.values(), &[0.5, 0.5]);
    assert!((bar.norm(&s, 2.0) - 0.5_f64.sqrt()).abs() <= 1e-15);
    assert!((duality_product(&s, &plan, &r).unwrap() - 1.0).abs() <= 10.0 * TOL);
}

#[test]
fn single_curves_match_the_closed_form() {
    let mut rng = rng(62);
    for _ in 0..40 {
        let s = random_graph(&mut rng, 8, 5, true);
        let hops = rng.gen_range(1..6);
        let walk = random_walk(&mut rng, &s, hops);
        let p = [1.2, 1.5, 2.0, 3.0][rng.gen_range(0..4)];
        let c = DiscreteCurve::constant_speed(&s, walk.clone()).unwrap();
        let got = value(&s, &CurveFamily::new("one", vec![c]), p, Lambda::Zero);
        let want = single_curve_closed_form(&s, &walk, p);
        assert!(rel_err(got, want) <= 1e-6, "{got} vs {want}");
    }
}

#[test]
fn duplicates_do_not_change_the_product() {
    let (s, f) = edge();
    let mut twice = f.clone();
    twice.push(f.curves()[0].clone());
    let r = modulus(&s, &twice, 2.0, Lambda::Zero, &opts()).unwrap();
    assert!((r.value.finite().unwrap() - 2.0).abs() <= 1e-6);
    let plan = optimal_plan(&r, &twice).unwrap();
    assert!((duality_product(&s, &plan, &r).unwrap() - 1.0).abs() <= 10.0 * TOL);
}

#[test]
fn optimal_plan_rejects_degenerate_values() {
    let p = MetricMeasureSpace::path(3);
    let empty = CurveFamily::empty("e");
    let r = modulus(&p, &empty, 2.0, Lambda::Zero, &opts()).unwrap();
    assert!(optimal_plan(&r, &empty).is_err());
    let k = CurveFamily::new("k", vec![DiscreteCurve::constant(&p, 0).unwrap()]);
    let r = modulus(&p, &k, 2.0, Lambda::Zero, &opts()).unwrap();
    assert!(optimal_plan(&r, &k).is_err());
}

/// Weak duality gives two oracles independent of the solver: any admissible
/// density bounds the modulus from above, any probability plan on the family
/// bounds it from below by `||Bar(plan)||_q^(-p)`.
#[test]
fn grid_family_is_sandwiched_by_weak_duality() {
    let g = MetricMeasureSpace::grid(5, 5);
    let mut rng = rng(63);
    for p in [1.5, 2.0, 3.0] {
        let fam = random_family(&mut rng, &g, 20, 6);
        let r = modulus(&g, &fam, p, Lambda::Zero, &opts()).unwrap();
        let v = r.value.finite().unwrap();
        let plan = optimal_plan(&r, &fam).unwrap();
        assert!((duality_product(&g, &plan, &r).unwrap() - 1.0).abs() <= 1e-4);
        assert!(admissible_check(&r.rho, &fam, Lambda::Zero).min_slack >= -1e-9);

        let q = conjugate(p);
        for _ in 0..50 {
            let rho = random_function(&mut rng, 25, 0.0, 1.0);
            let low = fam.curves().iter().map(|c| c.path_integral(&rho)).fold(f64::INFINITY, f64::min);
            let scaled: Vec<f64> = rho.iter().map(|x| x / low).collect();
            assert!(v <= g.integral_pow(&scaled, p) * (1.0 + TOL));

            let mut support = Vec::new();
            for c in fam.curves().choose_multiple(&mut rng, 5) {
                support.push((c.cs_reparam(), rng.gen_range(0.1..1.0)));
            }
            let mass: f64 = support.iter().map(|(_, w)| w).sum();
            let pi = Plan::new(support.into_iter().map(|(c, w)| (c, w / mass)).collect()).unwrap();
            let bound = barycenter(&g, &pi, Lambda::Zero).norm(&g, q).powf(-p);
            assert!(v >= bound * (1.0 - 1e-6), "{v} below plan bound {bound}");
        }
    }
}

#[test]
fn exceptional_sets() {
    let g = MetricMeasureSpace::grid(4, 4);
    assert_eq!(is_exceptional(&g, &VertexSet::new(), 2.0, 3, &opts()).unwrap(), (true, 0.0));
    let centre: VertexSet = [g.vertex("1,1").unwrap()].into_iter().collect();
    let (hit, v) = is_exceptional(&g, &centre, 2.0, 2, &opts()).unwrap();
    assert!(!hit);
    // lower bound from the plan spreading mass evenly over the four 1-hop curves out of the centre
    let c = g.vertex("1,1").unwrap();
    let outs: Vec<_> = g
        .neighbors(c)
        .iter()
        .map(|&(u, _)| (DiscreteCurve::constant_speed(&g, vec![c, u]).unwrap(), 0.25))
        .collect();
    let bar = barycenter(&g, &Plan::new(outs).unwrap(), Lambda::Zero);
    assert!(v >= bar.norm(&g, 2.0).powi(-2) * (1.0 - 1e-6));
    let lone = MetricMeasureSpace::from_parts(vec!["x".into()], vec![2.0], &[]).unwrap();
    assert_eq!(is_exceptional(&lone, &lone.all_vertices(), 2.0, 3, &opts()).unwrap(), (true, 0.0));
}

#[test]
fn monotone_and_subadditive() {
    let mut rng = rng(64);
    for _ in 0..15 {
        let s = random_graph(&mut rng, 9, 6, true);
        let p = [1.0, 1.5, 2.0, 4.0][rng.gen_range(0..4)];
        let lambda = if rng.gen_bool(0.5) { Lambda::One } else { Lambda::Zero };
        let a = random_family(&mut rng, &s, 8, 4);
        let b = random_family(&mut rng, &s, 8, 4);
        let (va, vb) = (value(&s, &a, p, lambda), value(&s, &b, p, lambda));
        let vu = value(&s, &a.union(&b), p, lambda);
        let slack = 2.0 * TOL * vu.max(1.0);
        assert!(va <= vu + slack && vb <= vu + slack);
        assert!(vu <= va + vb + slack);
    }
}

#[test]
fn subcurves_dominate() {
    let mut rng = rng(65);
    for _ in 0..15 {
        let s = random_graph(&mut rng, 9, 6, true);
        let p = [1.0, 2.0, 3.0][rng.gen_range(0..3)];
        let fam = random_family(&mut rng, &s, 10, 5);
        let subs = CurveFamily::new(
            "subs",
            fam.curves()
                .iter()
                .map(|c| {
                    let k = c.times().len();
                    let i = rng.gen_range(0..k - 1);
                    let j = rng.gen_range(i + 1..k);
                    c.restrict(c.times()[i], c.times()[j]).unwrap()
                })
                .collect(),
        );
        let big = value(&s, &fam, p, Lambda::Zero);
        let small = value(&s, &subs, p, Lambda::Zero);
        assert!(big <= small + 2.0 * TOL * small.max(1.0), "{big} > {small}");
    }
}

#[test]
fn retiming_leaves_modulus_unchanged() {
    let mut rng = rng(66);
    for _ in 0..10 {
        let s = random_graph(&mut rng, 8, 5, true);
        let fam = random_family(&mut rng, &s, 10, 4);
        let cs = CurveFamily::new("cs", fam.curves().iter().map(|c| c.cs_reparam()).collect());
        for lambda in [Lambda::Zero, Lambda::One] {
            let r1 = modulus(&s, &fam, 2.0, lambda, &opts()).unwrap();
            let r2 = modulus(&s, &cs, 2.0, lambda, &opts()).unwrap();
            // identical constraint rows give identical iterates
            assert_eq!(r1.value, r2.value);
        }
    }
}

#[test]
fn endpoint_weight_never_increases_modulus() {
    let mut rng = rng(67);
    for _ in 0..15 {
        let s = random_graph(&mut rng, 9, 6, true);
        let p = [1.0, 1.5, 2.0, 3.0][rng.gen_range(0..4)];
        let fam = random_family(&mut rng, &s, 10, 4);
        let with = value(&s, &fam, p, Lambda::One);
        let without = value(&s, &fam, p, Lambda::Zero);
        assert!(with <= without * (1.0 + 2.0 * TOL));
    }
}

#[test]
fn p_one_products_are_certified() {
    let mut rng = rng(68);
    for _ in 0..10 {
        let s = random_graph(&mut rng, 10, 6, true);
        let e: VertexSet = [0].into_iter().collect();
        let f: VertexSet = [9].into_iter().collect();
        let fam = connecting_family(&s, &e, &f, 6, true);
        if fam.is_empty() {
            continue;
        }
        let r = modulus(&s, &fam, 1.0, Lambda::Zero, &opts()).unwrap();
        let plan = optimal_plan(&r, &fam).unwrap();
        assert!((duality_product(&s, &plan, &r).unwrap() - 1.0).abs() <= 1e-4);
    }
}

#[test]
fn fuglede_on_random_sequences() {
    let mut rng = rng(69);
    let s = random_graph(&mut rng, 12, 8, true);
    let fam = family_through(&s, &s.all_vertices(), 2);
    assert!(value(&s, &fam, 2.0, Lambda::Zero) > 0.0);
    for _ in 0..20 {
        let base = random_function(&mut rng, 12, 0.0, 10.0);
        let mut last = f64::INFINITY;
        for k in 0..30 {
            let scale = 0.5_f64.powi(k);
            let fk: Vec<f64> = base.iter().map(|x| x * scale).collect();
            let worst = fam.curves().iter().map(|c| c.path_integral(&fk)).fold(0.0, f64::max);
            assert!(worst <= last);
            last = worst;
        }
        assert!(last <= 1e-6);
        let norm = s.lp_norm(&base.iter().map(|x| x * 0.5_f64.powi(29)).collect::<Vec<_>>(), 2.0);
        assert!(norm <= 1e-6);
    }
}
