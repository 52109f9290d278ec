//! Modulus of the connecting family on a grid, with its dual plan.
use modcalc::families::connecting_family;
use modcalc::modulus::{duality_product, modulus, optimal_plan};
use modcalc::{Lambda, MetricMeasureSpace, ModulusOptions};

fn main() -> modcalc::Result<()> {
    let s = MetricMeasureSpace::grid(3, 3);
    let left = s.vertex_set(&["0,0", "1,0", "2,0"])?;
    let right = s.vertex_set(&["0,2", "1,2", "2,2"])?;
    let family = connecting_family(&s, &left, &right, 4, true);
    println!("{} curves", family.len());

    for lambda in [Lambda::Zero, Lambda::One] {
        let r = modulus(&s, &family, 2.0, lambda, &ModulusOptions::default())?;
        let plan = optimal_plan(&r, &family)?;
        let product = duality_product(&s, &plan, &r)?;
        println!(
            "lambda {:?}: Mod = {:.6}  gap {:.1e}  Mod^(1/p) * ||Bar||_q = {:.6}",
            lambda,
            r.value.finite().unwrap_or(f64::INFINITY),
            r.gap,
            product
        );
    }
    Ok(())
}
