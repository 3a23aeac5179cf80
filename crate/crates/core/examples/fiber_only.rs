//! Cheapest fiber-only plan on a random instance, and its cluster reduction.

use backhaul::experiments::{generate_scenario, ScenarioSpec};
use backhaul::models::ModelParams;
use backhaul::{plan_of_only, reduce_clusters};

fn main() -> backhaul::Result<()> {
    let t = generate_scenario(&ScenarioSpec::new(8, 7))?;
    let cm = ModelParams::default().build()?.cost;
    println!(
        "pre-deployed: {:?}",
        t.predeployed_pairs().collect::<Vec<_>>()
    );

    let plan = plan_of_only(&t, &cm);
    for (i, j, _) in plan.links() {
        let tag = if t.is_predeployed(i, j) {
            "existing"
        } else {
            "new"
        };
        println!("  {i} - {j}  {:>6.0} m  {tag}", t.distance(i, j)?);
    }
    println!("cost: {:.2} USD", plan.cost(&t, &cm));

    let clusters = reduce_clusters(&t, &plan, &cm);
    println!("clusters after reduction: {:?}", clusters.groups);
    Ok(())
}
