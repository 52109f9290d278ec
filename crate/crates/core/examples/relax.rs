//! Discrete path relaxation from a single source.
use modcalc::lipschitz::path_relax;
use modcalc::MetricMeasureSpace;

fn main() -> modcalc::Result<()> {
    let s = MetricMeasureSpace::grid(3, 3);
    let f = vec![0.0; s.len()];
    let g: Vec<f64> = (0..s.len()).map(|v| 1.0 + v as f64 / 4.0).collect();
    let sources = s.vertex_set(&["0,0"])?;
    for delta in [1.0, 2.0] {
        let out = path_relax(&s, &f, &g, &sources, delta, 100.0)?;
        let row: Vec<String> = out.iter().map(|x| format!("{x:.2}")).collect();
        println!("delta {delta}: {}", row.join(" "));
    }
    Ok(())
}
