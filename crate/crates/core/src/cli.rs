//! Command-line front end: `plan` for one instance, `sweep` for CSV tables.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 infeasible
//! instance, 4 exact search stopped by its budget.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::approx::{plan_hybrid, HybridOptions, NeighborPolicy, DEFAULT_MAX_NEIGHBORS};
use crate::error::{Error, Result};
use crate::exact::{plan_exact, ExactOptions};
use crate::experiments::{
    generate_scenario, percent_of_links, run_sweep, write_csv, ExperimentConfig, ScenarioSpec,
};
use crate::feasibility::check_feasible;
use crate::models::ModelParams;
use crate::of_planner::plan_of_only;
use crate::topology::Topology;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Largest node count `plan --method exact` accepts without `--budget`:
/// the largest M whose M(M-1)/2 pairs fit the default free-pair cap.
pub const EXACT_MAX_NODES: usize = 9;

#[derive(Parser, Debug)]
#[command(name = "backhaul", version, about = "Backhaul topology planner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Plan one topology and write plan.json and report.json.
    Plan(PlanArgs),
    /// Run a Monte-Carlo sweep from a config file and write a CSV table.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanMethod {
    OfOnly,
    Hybrid,
    Exact,
}

#[derive(clap::Args, Debug)]
pub struct PlanArgs {
    #[arg(long, value_enum)]
    pub method: Option<PlanMethod>,
    /// Topology JSON file.
    #[arg(long, conflicts_with = "scenario")]
    pub topology: Option<PathBuf>,
    /// Random scenario, e.g. `M=7,seed=1` (also `area_km=`, `ratio=`).
    #[arg(long)]
    pub scenario: Option<String>,
    /// JSON run config; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `eq4`, `knn:<k>`, or `all`.
    #[arg(long)]
    pub neighbor_policy: Option<NeighborPolicy>,
    /// Node budget for the exact search.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Leave pre-deployed links out of the fiber percentage.
    #[arg(long)]
    pub exclude_predeployed: bool,
}

#[derive(clap::Args, Debug)]
pub struct SweepArgs {
    /// Experiment config (scenario, models, sweep).
    #[arg(long)]
    pub config: PathBuf,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed; trial k uses seed + k.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fill the wall_ms column.
    #[arg(long)]
    pub timing: bool,
}

/// Config file for `plan`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub topology: Option<PathBuf>,
    #[serde(default)]
    pub scenario: Option<ScenarioSpec>,
    #[serde(default)]
    pub models: ModelParams,
    #[serde(default)]
    pub method: Option<PlanMethod>,
    #[serde(default)]
    pub neighbor_policy: Option<NeighborPolicy>,
    #[serde(default)]
    pub max_neighbors: Option<usize>,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub exclude_predeployed: bool,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Maps an error to its process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) | Error::NeighborCapExceeded { .. } => EXIT_INFEASIBLE,
        Error::BudgetExhausted(_) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Plan(args) => cmd_plan(&args),
        Command::Sweep(args) => cmd_sweep(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn load_topology(args: &PlanArgs, cfg: &RunConfig, base: &Path) -> Result<Topology> {
    if let Some(path) = &args.topology {
        return Topology::load(path);
    }
    let mut spec = match &args.scenario {
        Some(s) => Some(ScenarioSpec::parse_inline(s)?),
        None => cfg.scenario,
    };
    if let Some(spec) = spec.as_mut() {
        if let Some(seed) = args.seed {
            spec.seed = seed;
        }
        return generate_scenario(spec);
    }
    match &cfg.topology {
        Some(path) => Topology::load(base.join(path)),
        None => Err(Error::Config(
            "no instance given: use --topology, --scenario, or a config with one".into(),
        )),
    }
}

pub fn cmd_plan(args: &PlanArgs) -> Result<i32> {
    let (cfg, base) = match &args.config {
        Some(path) => {
            let cfg: RunConfig = serde_json::from_str(&read(path)?)?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (cfg, base)
        }
        None => (RunConfig::default(), PathBuf::new()),
    };
    if cfg.scenario.is_some() && cfg.topology.is_some() {
        return Err(Error::Config(
            "config names both a scenario and a topology file".into(),
        ));
    }
    let method = args
        .method
        .or(cfg.method)
        .ok_or_else(|| Error::Config("no method given: use --method".into()))?;
    let models = cfg.models.build()?;
    let t = load_topology(args, &cfg, &base)?;
    let exclude = args.exclude_predeployed || cfg.exclude_predeployed;

    let mut code = EXIT_OK;
    let (plan, details) = match method {
        PlanMethod::OfOnly => (plan_of_only(&t, &models.cost), json!({})),
        PlanMethod::Hybrid => {
            let opts = HybridOptions {
                policy: args
                    .neighbor_policy
                    .or(cfg.neighbor_policy)
                    .unwrap_or_default(),
                max_neighbors: cfg.max_neighbors.unwrap_or(DEFAULT_MAX_NEIGHBORS),
            };
            let out = plan_hybrid(&t, &models.cost, &models.radio, &opts)?;
            let details = json!({
                "clique_weight": out.clique_weight,
                "neighbors": out.neighbors.neighbors,
                "diagnostics": out.diagnostics,
            });
            (out.plan, details)
        }
        PlanMethod::Exact => {
            let opts = ExactOptions {
                budget: args.budget.or(cfg.budget),
                ..ExactOptions::default()
            };
            if opts.budget.is_none() && t.len() > EXACT_MAX_NODES {
                return Err(Error::Precondition(format!(
                    "exact search is capped at {EXACT_MAX_NODES} nodes without --budget, instance has {}",
                    t.len()
                )));
            }
            let out = plan_exact(&t, &models.cost, &models.radio, &opts)?;
            if !out.optimal {
                eprintln!("warning: budget exhausted, reporting the best plan found");
                code = EXIT_BUDGET;
            }
            (
                out.plan,
                json!({ "optimal": out.optimal, "search": out.stats }),
            )
        }
    };
    let feasibility = check_feasible(&t, &plan, &models.cost, &models.radio);
    let export = plan.export(&t, &models.cost);
    let pct_of = percent_of_links(&t, &plan, exclude).ok();
    let report = json!({
        "method": method,
        "nodes": t.len(),
        "predeployed": t.predeployed_count(),
        "links": plan.link_count(),
        "total_cost": export.total_cost,
        "pct_of": pct_of,
        "feasibility": feasibility,
        "details": details,
    });

    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    write(
        &out_dir.join("plan.json"),
        &serde_json::to_string_pretty(&export)?,
    )?;
    write(
        &out_dir.join("report.json"),
        &serde_json::to_string_pretty(&report)?,
    )?;

    println!(
        "{method:?}: {} links, cost {:.2} USD, fiber share {}",
        plan.link_count(),
        export.total_cost,
        pct_of.map_or("n/a".to_string(), |p| format!("{p:.1}%"))
    );
    if !feasibility.all_pass() {
        eprintln!("plan violates: {}", feasibility.failures().join("; "));
        return Ok(EXIT_INFEASIBLE);
    }
    Ok(code)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    let mut cfg: ExperimentConfig = serde_json::from_str(&read(&args.config)?)?;
    if let Some(trials) = args.trials {
        cfg.sweep.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.sweep.base_seed = seed;
    }
    cfg.sweep.record_timing |= args.timing;
    let rows = run_sweep(&cfg)?;
    match &args.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
            write_csv(&rows, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))?;
            for r in &rows {
                println!(
                    "x={:<8} {:<8} cost {:>12.2} ± {:>9.2}  OF {:>6.2}%  ({} ok, {} failed)",
                    r.x,
                    r.method,
                    r.mean_cost_usd,
                    r.se_cost,
                    r.mean_pct_of,
                    r.trials,
                    r.infeasible
                );
            }
        }
        None => write_csv(&rows, std::io::stdout().lock()).map_err(|e| Error::io("<stdout>", e))?,
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plan_flags() {
        let cli = Cli::try_parse_from([
            "backhaul",
            "plan",
            "--method",
            "hybrid",
            "--scenario",
            "M=7,seed=1",
            "--neighbor-policy",
            "knn:3",
        ])
        .unwrap();
        let Command::Plan(args) = cli.command else {
            panic!()
        };
        assert_eq!(args.method, Some(PlanMethod::Hybrid));
        assert_eq!(args.neighbor_policy, Some(NeighborPolicy::Knn(3)));
    }

    #[test]
    fn topology_and_scenario_conflict() {
        let parsed = Cli::try_parse_from([
            "backhaul",
            "plan",
            "--method",
            "of-only",
            "--topology",
            "a.json",
            "--scenario",
            "M=3",
        ]);
        assert_eq!(parsed.unwrap_err().exit_code(), EXIT_USAGE);
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::Infeasible("x".into())), EXIT_INFEASIBLE);
        assert_eq!(exit_code(&Error::BudgetExhausted(5)), EXIT_BUDGET);
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
    }
}
