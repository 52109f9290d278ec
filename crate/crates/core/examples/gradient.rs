//! Minimal weak upper gradient of a function on a path.
use modcalc::families::family_through;
use modcalc::sobolev::n_gradient;
use modcalc::{MetricMeasureSpace, ModulusOptions};

fn main() -> modcalc::Result<()> {
    let s = MetricMeasureSpace::path(3);
    let f = [0.0, 1.0, 2.0];
    let family = family_through(&s, &s.all_vertices(), 2);
    let r = n_gradient(&s, &f, &family, 2.0, &ModulusOptions::default())?;
    println!("rho = {:?}", r.rho.values());
    println!("energy {:.6} (expected 8/3)", r.energy);
    Ok(())
}
