//! Hybrid link rate, reliability and price against distance.

use backhaul::models::ModelParams;

fn main() -> backhaul::Result<()> {
    let lm = ModelParams::default().build()?;
    println!(
        "{:>6} {:>10} {:>10} {:>12} {:>10}",
        "km", "rate", "reliab.", "fiber $", "hybrid $"
    );
    for step in 1..=12 {
        let d = step as f64 * 500.0;
        println!(
            "{:>6.1} {:>10.1} {:>10.4} {:>12.0} {:>10.0}",
            d / 1000.0,
            lm.radio.hybrid_rate(d),
            lm.radio.hybrid_reliability(d),
            lm.cost.of_cost(d),
            lm.cost.hybrid_cost(d),
        );
    }
    Ok(())
}
