//! Path integrals, reparametrization and the discrete integration by parts.
use modcalc::{DiscreteCurve, MetricMeasureSpace};

fn main() -> modcalc::Result<()> {
    let s = MetricMeasureSpace::path(4);
    let c = DiscreteCurve::new(&s, vec![0.0, 0.1, 0.7, 1.0], vec![0, 1, 2, 3])?;
    let rho = [1.0, 2.0, 0.0, 1.0];
    println!("length {}  speeds {:?}", c.length(), c.speeds());
    println!("path integral {}", c.path_integral(&rho));
    println!("after constant-speed reparametrization {}", c.cs_reparam().path_integral(&rho));
    println!("q = 2 energy {:.4}  vs cs {:.4}", c.q_energy(2.0)?, c.cs_reparam().q_energy(2.0)?);

    let f1 = [0.0, 1.0, 4.0, 9.0];
    let f2 = [3.0, -1.0, 2.0, 0.5];
    let t = c.ibp_identity(&f1, &f2);
    println!(
        "forward {} + backward {} = {}  boundary {}",
        t.forward,
        t.backward,
        t.forward + t.backward,
        t.boundary
    );
    Ok(())
}
