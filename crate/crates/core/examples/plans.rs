//! Barycenters, compression and energy of a two-curve plan.
use modcalc::plans::{barycenter, compression, energy, plan_derivation, TimeGrid};
use modcalc::{DiscreteCurve, Lambda, MetricMeasureSpace, Plan};

fn main() -> modcalc::Result<()> {
    let s = MetricMeasureSpace::cycle(4);
    let up = DiscreteCurve::constant_speed(&s, vec![0, 1, 2])?;
    let down = DiscreteCurve::constant_speed(&s, vec![0, 3, 2])?;
    let plan = Plan::new(vec![(up, 0.5), (down, 0.5)])?;

    for lambda in [Lambda::Zero, Lambda::One] {
        let bar = barycenter(&s, &plan, lambda);
        println!("Bar {:?} = {:?}  |.|_2 = {:.4}", lambda, bar.density.values(), bar.norm(&s, 2.0));
    }
    println!("compression {}", compression(&s, &plan, TimeGrid::Exact));
    println!("q = 2 energy {}", energy(&plan, 2.0)?);

    let f = [0.0, 1.0, 2.0, 1.0];
    let der = plan_derivation(&s, &plan, &f);
    println!("b = {:?}  div = {:?}  integral {}", der.b, der.div, der.integral(&s));
    Ok(())
}
