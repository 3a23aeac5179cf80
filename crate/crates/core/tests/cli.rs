use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use backhaul::topology::PlanExport;
use backhaul::Topology;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_backhaul"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn recipes() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("recipes");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    files
}

#[test]
fn plan_of_only_from_topology_file() {
    let dir = tempfile::tempdir().unwrap();
    let topo = dir.path().join("t.json");
    let t = Topology::new(vec![(0.0, 0.0), (1000.0, 0.0), (3000.0, 0.0)], &[]).unwrap();
    t.save(&topo).unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "plan",
        "--method",
        "of-only",
        "--topology",
        topo.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let export: PlanExport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("plan.json")).unwrap()).unwrap();
    assert_eq!(export.total_cost, 40_500.0);
    assert_eq!(export.links.len(), 2);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["feasibility"]["connected"], true);
    assert_eq!(report["pct_of"], 100.0);
}

#[test]
fn plan_hybrid_on_scenario_reports_neighbors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "plan",
        "--method",
        "hybrid",
        "--scenario",
        "M=7,seed=1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["details"]["neighbors"].as_array().unwrap().len(), 7);
    assert_eq!(
        report["details"]["diagnostics"]["links_outside_neighbors"]
            .as_array()
            .unwrap()
            .len(),
        0
    );
}

#[test]
fn exact_on_large_instance_is_refused_without_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "plan",
        "--method",
        "exact",
        "--scenario",
        "M=10",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn exhausted_budget_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "plan",
        "--method",
        "exact",
        "--scenario",
        "M=7,seed=2",
        "--budget",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(dir.path().join("plan.json").exists());
}

#[test]
fn infeasible_instance_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let topo = dir.path().join("t.json");
    std::fs::write(&topo, r#"{"nodes": [[0, 0]], "predeployed": []}"#).unwrap();
    let out = run(&[
        "plan",
        "--method",
        "hybrid",
        "--topology",
        topo.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_inputs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.json");
    std::fs::write(&cfg, r#"{"sweep": {"variable": "M", "grid": []}}"#).unwrap();
    assert_eq!(
        run(&["sweep", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["plan", "--scenario", "M=4"]).status.code(), Some(2));
    assert_eq!(
        run(&["plan", "--method", "bogus", "--scenario", "M=4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["plan", "--method", "hybrid", "--scenario", "N=4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn every_recipe_runs_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    for recipe in recipes() {
        let name = recipe.file_stem().unwrap().to_str().unwrap().to_owned();
        let csv = |tag: &str| {
            let path = dir.path().join(format!("{name}_{tag}.csv"));
            let out = run(&[
                "sweep",
                "--config",
                recipe.to_str().unwrap(),
                "--trials",
                "3",
                "--out",
                path.to_str().unwrap(),
            ]);
            assert_eq!(
                out.status.code(),
                Some(0),
                "{name}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            std::fs::read_to_string(path).unwrap()
        };
        let first = csv("a");
        assert!(first
            .starts_with("x,method,mean_cost_usd,se_cost,mean_pct_of,trials,infeasible,wall_ms\n"));
        assert!(first.lines().count() > 3, "{name}");
        assert_eq!(first, csv("b"), "{name}");
    }
}

#[test]
fn sweep_to_stdout() {
    let recipe = recipes()
        .into_iter()
        .find(|p| p.ends_with("cost_vs_alpha_20k.json"))
        .unwrap();
    let out = run(&[
        "sweep",
        "--config",
        recipe.to_str().unwrap(),
        "--trials",
        "2",
        "--seed",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 7 * 3);
    assert!(text.lines().nth(1).unwrap().starts_with("0.5,of_only,"));
}
