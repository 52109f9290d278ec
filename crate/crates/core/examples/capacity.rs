//! Capacity of an endpoint of a path, plain and truncated.
use modcalc::families::family_through;
use modcalc::sobolev::capacity;
use modcalc::{MetricMeasureSpace, ModulusOptions};

fn main() -> modcalc::Result<()> {
    let s = MetricMeasureSpace::path(4);
    let e = s.vertex_set(&["0"])?;
    let family = family_through(&s, &s.all_vertices(), 3);
    for truncated in [false, true] {
        let r = capacity(&s, &e, &family, 2.0, truncated, &ModulusOptions::default())?;
        let f: Vec<String> = r.f.iter().map(|x| format!("{x:.3}")).collect();
        println!("truncated {truncated}: cap {:.6}  f = [{}]", r.value, f.join(", "));
    }
    Ok(())
}
