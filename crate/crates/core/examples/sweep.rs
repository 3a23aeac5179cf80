//! A reduced hybrid-price sweep written as CSV to stdout.

use backhaul::experiments::{
    run_sweep, write_csv, ExperimentConfig, ScenarioDefaults, SweepSpec, SweepVariable,
};
use backhaul::models::ModelParams;

fn main() -> backhaul::Result<()> {
    let mut sweep = SweepSpec::new(
        SweepVariable::HybridCost,
        vec![5_000.0, 10_000.0, 20_000.0, 30_000.0, 40_000.0],
    );
    sweep.trials = 20;
    let cfg = ExperimentConfig {
        scenario: ScenarioDefaults::default(),
        models: ModelParams::default(),
        sweep,
    };
    let rows = run_sweep(&cfg)?;
    write_csv(&rows, std::io::stdout().lock())
        .map_err(|e| backhaul::Error::Config(e.to_string()))?;
    Ok(())
}
