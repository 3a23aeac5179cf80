//! Neighbor-restricted hybrid planning via a maximum-weight clique.
//!
//! Pipeline: fiber-only plan, neighbor sets, per-node feasible local
//! assignments (with reliability linearized to `-ln(1 - alpha)`), planning
//! graph, clique search, and assembly of the agreed link kinds into a plan.
//! The assembled plan is re-checked against the exact product-form
//! constraints before it is returned.

pub mod clique;
pub mod clusters;
pub mod graph;
pub mod neighbors;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::{check_feasible, FeasibilityReport};
use crate::models::{CostModel, LinkTable, RateReliabilityModel};
use crate::of_planner::plan_of_only;
use crate::topology::{Plan, Topology};

pub use clique::{clique_weight, max_weight_clique, CliqueSolution, CliqueStats};
pub use clusters::{
    enumerate_clusters, reliability_threshold, LocalAssignment, ReliabilitySets,
    DEFAULT_MAX_NEIGHBORS,
};
pub use graph::{build_planning_graph, PlanningGraph};
pub use neighbors::{neighbor_sets, NeighborPolicy, NeighborSets};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HybridOptions {
    pub policy: NeighborPolicy,
    pub max_neighbors: usize,
}

impl Default for HybridOptions {
    fn default() -> Self {
        Self {
            policy: NeighborPolicy::Eq4,
            max_neighbors: DEFAULT_MAX_NEIGHBORS,
        }
    }
}

/// Sizes and counters from one run of the pipeline.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub policy: String,
    pub neighbor_sizes: Vec<usize>,
    pub cluster_sizes: Vec<usize>,
    pub graph_vertices: usize,
    pub graph_edges: u64,
    pub clique: CliqueStats,
    /// Non-neighbor pairs where a hybrid link undercuts the two endpoints'
    /// cheapest fiber links; the closeness guarantee weakens there.
    pub cost_assumption_violations: Vec<(usize, usize)>,
    /// Plan links joining nodes that are not mutual neighbors. Always empty.
    pub links_outside_neighbors: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct HybridOutcome {
    pub plan: Plan,
    pub cost: f64,
    pub clique_weight: f64,
    pub neighbors: NeighborSets,
    pub diagnostics: Diagnostics,
    pub feasibility: FeasibilityReport,
}

/// Hybrid RF/FSO plus fiber plan from the neighbor-restricted problem.
pub fn plan_hybrid(
    t: &Topology,
    cm: &CostModel,
    rrm: &RateReliabilityModel,
    opts: &HybridOptions,
) -> Result<HybridOutcome> {
    let m = t.len();
    if m < 2 {
        return Err(Error::Infeasible(
            "a single base station cannot meet the rate target".into(),
        ));
    }
    let table = LinkTable::new(t, cm, rrm);
    let of_plan = plan_of_only(t, cm);
    let ns = neighbor_sets(&table, &of_plan, opts.policy);
    let rs = ReliabilitySets::new(&table, rrm)?;

    let clusters: Vec<Vec<LocalAssignment>> = (0..m)
        .into_par_iter()
        .map(|i| enumerate_clusters(i, &ns, &rs, &table, rrm, opts.max_neighbors))
        .collect::<Result<_>>()?;
    let mut diagnostics = Diagnostics {
        policy: opts.policy.to_string(),
        neighbor_sizes: ns.neighbors.iter().map(Vec::len).collect(),
        cluster_sizes: clusters.iter().map(Vec::len).collect(),
        cost_assumption_violations: ns.cost_assumption_violations(&table),
        ..Diagnostics::default()
    };
    let graph = build_planning_graph(clusters, &ns)?;
    diagnostics.graph_vertices = graph.vertex_count();
    diagnostics.graph_edges = graph.edge_count();
    let solution = max_weight_clique(&graph)?;
    diagnostics.clique = solution.stats.clone();

    let mut plan = Plan::empty(m);
    for (i, &v) in solution.vertices.iter().enumerate() {
        let a = &graph.part(i)[v];
        for (&j, &kind) in ns.neighbors[i].iter().zip(&a.choices) {
            if kind.is_link() {
                plan.set(i, j, kind);
            }
        }
    }
    diagnostics.links_outside_neighbors = plan
        .links()
        .filter(|&(i, j, _)| !ns.mutual(i, j))
        .map(|(i, j, _)| (i, j))
        .collect();

    let feasibility = check_feasible(t, &plan, cm, rrm);
    if !feasibility.all_pass() {
        return Err(Error::Infeasible(format!(
            "assembled plan fails the exact constraints: {}",
            feasibility.failures().join("; ")
        )));
    }
    Ok(HybridOutcome {
        cost: plan.cost(t, cm),
        plan,
        clique_weight: solution.weight,
        neighbors: ns,
        diagnostics,
        feasibility,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::HybridCost;
    use crate::topology::LinkKind;

    fn models(hybrid: f64) -> (CostModel, RateReliabilityModel) {
        (
            CostModel::new(13.5, HybridCost::Constant(hybrid)).unwrap(),
            RateReliabilityModel::new(100.0, 3000.0, 0.9, 2000.0, 1000.0).unwrap(),
        )
    }

    #[test]
    fn close_pair_takes_cheap_hybrid() {
        let (cm, rrm) = models(10_000.0);
        let t = Topology::new(vec![(0.0, 0.0), (1500.0, 0.0)], &[]).unwrap();
        let out = plan_hybrid(&t, &cm, &rrm, &HybridOptions::default()).unwrap();
        assert_eq!(out.plan.kind(0, 1), LinkKind::Hybrid);
        assert_eq!(out.cost, 10_000.0);
        assert_eq!(out.clique_weight, -10_000.0);
    }

    #[test]
    fn expensive_hybrid_gives_fiber_plan() {
        let (cm, rrm) = models(40_000.0);
        let t = Topology::new(
            vec![(0.0, 0.0), (1000.0, 200.0), (2500.0, 0.0), (400.0, 1800.0)],
            &[(1, 3)],
        )
        .unwrap();
        let out = plan_hybrid(&t, &cm, &rrm, &HybridOptions::default()).unwrap();
        assert_eq!(out.plan, plan_of_only(&t, &cm));
        assert!(out.diagnostics.links_outside_neighbors.is_empty());
    }

    #[test]
    fn single_node_is_rejected() {
        let (cm, rrm) = models(10_000.0);
        let t = Topology::new(vec![(0.0, 0.0)], &[]).unwrap();
        assert!(plan_hybrid(&t, &cm, &rrm, &HybridOptions::default()).is_err());
    }

    #[test]
    fn neighbor_cap_propagates() {
        let (cm, rrm) = models(10_000.0);
        let coords: Vec<(f64, f64)> = (0..5).map(|i| (i as f64 * 100.0, 0.0)).collect();
        let t = Topology::new(coords, &[]).unwrap();
        let opts = HybridOptions {
            policy: NeighborPolicy::All,
            max_neighbors: 3,
        };
        assert!(matches!(
            plan_hybrid(&t, &cm, &rrm, &opts),
            Err(Error::NeighborCapExceeded { .. })
        ));
    }
}
