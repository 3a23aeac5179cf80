//! Heuristic against the branch-and-bound optimum on a batch of small instances.

use backhaul::experiments::{generate_scenario, ScenarioSpec};
use backhaul::models::{HybridCost, ModelParams};
use backhaul::{plan_exact, plan_hybrid, plan_of_only, ExactOptions, HybridOptions};

fn main() -> backhaul::Result<()> {
    let lm = ModelParams {
        hybrid_cost: HybridCost::Constant(10_000.0),
        ..ModelParams::default()
    }
    .build()?;
    let opts = ExactOptions {
        strong_bound: true,
        ..ExactOptions::default()
    };
    println!(
        "{:>4} {:>12} {:>12} {:>12} {:>9}",
        "seed", "fiber", "hybrid", "exact", "nodes"
    );
    let mut worst = 0.0f64;
    for seed in 0..12 {
        let t = generate_scenario(&ScenarioSpec::new(6, seed))?;
        let of = plan_of_only(&t, &lm.cost).cost(&t, &lm.cost);
        let hy = plan_hybrid(&t, &lm.cost, &lm.radio, &HybridOptions::default())?;
        let ex = plan_exact(&t, &lm.cost, &lm.radio, &opts)?;
        worst = worst.max(hy.cost / ex.cost - 1.0);
        println!(
            "{seed:>4} {of:>12.0} {:>12.0} {:>12.0} {:>9}",
            hy.cost, ex.cost, ex.stats.nodes_expanded
        );
    }
    println!("largest heuristic excess: {:.2}%", 100.0 * worst);
    Ok(())
}
