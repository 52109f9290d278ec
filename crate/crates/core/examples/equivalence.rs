//! Compares the three gradient estimators on a random function over a cycle.
use modcalc::sobolev::{equivalence_report, EquivalenceOptions};
use modcalc::MetricMeasureSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> modcalc::Result<()> {
    let s = MetricMeasureSpace::cycle(6);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let f: Vec<f64> = (0..s.len()).map(|_| rng.gen_range(0.0..3.0)).collect();
    let r = equivalence_report(&s, &f, 2.0, &EquivalenceOptions::default())?;
    println!("N energy {:.6}  W lower {:.6}  sandwich {}", r.n_energy, r.w_lower, r.sandwich_holds);
    println!("H errors: value {:.2e}  gradient {:.2e}", r.h_value_error, r.h_gradient_error);
    for row in &r.rows {
        println!("{:>3}  f {:.3}  rho {:.3}  slope {:.3}", row.vertex, row.f, row.rho_n, row.slope);
    }
    Ok(())
}
