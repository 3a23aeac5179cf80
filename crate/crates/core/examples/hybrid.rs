//! Hybrid planning with a chosen neighbor policy, plus the search diagnostics.
//!
//! `cargo run --example hybrid -- knn:3 9`

use backhaul::experiments::{generate_scenario, percent_of_links, ScenarioSpec};
use backhaul::models::{HybridCost, ModelParams};
use backhaul::{plan_hybrid, plan_of_only, HybridOptions, NeighborPolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let policy: NeighborPolicy = args.next().as_deref().unwrap_or("eq4").parse()?;
    let m: usize = args.next().map_or(Ok(7), |s| s.parse())?;

    let params = ModelParams {
        hybrid_cost: HybridCost::Constant(15_000.0),
        ..ModelParams::default()
    };
    let lm = params.build()?;
    let t = generate_scenario(&ScenarioSpec::new(m, 1))?;
    let opts = HybridOptions {
        policy,
        ..HybridOptions::default()
    };
    let out = plan_hybrid(&t, &lm.cost, &lm.radio, &opts)?;

    for (i, j, kind) in out.plan.links() {
        println!("  {i} - {j}  {kind:<6} {:>6.0} m", t.distance(i, j)?);
    }
    println!(
        "hybrid plan {:.2} USD vs fiber-only {:.2} USD, {:.1}% fiber",
        out.cost,
        plan_of_only(&t, &lm.cost).cost(&t, &lm.cost),
        percent_of_links(&t, &out.plan, false)?
    );
    println!("{}", serde_json::to_string_pretty(&out.diagnostics)?);
    Ok(())
}
