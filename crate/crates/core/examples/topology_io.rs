//! Build a topology, write it as JSON, read it back, and export a plan.

use backhaul::models::ModelParams;
use backhaul::{plan_of_only, Topology};

fn main() -> backhaul::Result<()> {
    let t = Topology::new(
        vec![
            (0.0, 0.0),
            (1200.0, 300.0),
            (2500.0, 2100.0),
            (400.0, 3000.0),
        ],
        &[(0, 1)],
    )?;
    let json = t.to_json();
    println!("{json}");
    let back = Topology::from_json(&json)?;
    assert_eq!(back, t);

    let cm = ModelParams::default().build()?.cost;
    let export = plan_of_only(&back, &cm).export(&back, &cm);
    println!("{}", serde_json::to_string_pretty(&export)?);
    Ok(())
}
