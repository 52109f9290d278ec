//! Builds a small weighted graph and prints its metric.
use modcalc::MetricMeasureSpace;

fn main() -> modcalc::Result<()> {
    let ids = ["a", "b", "c", "d"].map(String::from).to_vec();
    let edges = [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 0, 3.0)];
    let s = MetricMeasureSpace::from_parts(ids, vec![1.0, 2.0, 1.0, 0.5], &edges)?;

    for u in 0..s.len() {
        let row: Vec<String> = (0..s.len()).map(|v| format!("{:4.1}", s.distance(u, v))).collect();
        println!("{}  {}", s.id(u), row.join(" "));
    }
    println!("diameter {}  max hop {}", s.diameter(), s.max_hop());
    let ball = s.ball(0, 2.0, true)?;
    println!("closed ball B(a, 2) has measure {}", s.measure_of(&ball));
    Ok(())
}
