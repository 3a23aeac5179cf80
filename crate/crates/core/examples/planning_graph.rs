//! The hybrid pipeline step by step: neighbor sets, clusters, graph, clique.

use backhaul::approx::{
    build_planning_graph, enumerate_clusters, max_weight_clique, neighbor_sets, NeighborPolicy,
    ReliabilitySets, DEFAULT_MAX_NEIGHBORS,
};
use backhaul::experiments::{generate_scenario, ScenarioSpec};
use backhaul::models::{HybridCost, ModelParams};
use backhaul::{plan_of_only, LinkTable};

fn main() -> backhaul::Result<()> {
    let lm = ModelParams {
        hybrid_cost: HybridCost::Linear {
            fixed: 2_000.0,
            per_meter: 6.0,
        },
        ..ModelParams::default()
    }
    .build()?;
    let t = generate_scenario(&ScenarioSpec::new(6, 4))?;
    let table = LinkTable::new(&t, &lm.cost, &lm.radio);
    let of = plan_of_only(&t, &lm.cost);
    let ns = neighbor_sets(&table, &of, NeighborPolicy::Eq4);
    let rs = ReliabilitySets::new(&table, &lm.radio)?;
    println!("alpha tilde = {:.4}", rs.alpha_tilde);

    let clusters = (0..t.len())
        .map(|i| enumerate_clusters(i, &ns, &rs, &table, &lm.radio, DEFAULT_MAX_NEIGHBORS))
        .collect::<backhaul::Result<Vec<_>>>()?;
    for (i, c) in clusters.iter().enumerate() {
        println!(
            "node {i}: N = {:?}, {} local assignments",
            ns.neighbors[i],
            c.len()
        );
    }
    let g = build_planning_graph(clusters, &ns)?;
    println!(
        "planning graph: {} vertices, {} edges",
        g.vertex_count(),
        g.edge_count()
    );

    let clique = max_weight_clique(&g)?;
    println!("clique weight {:.2}, {:?}", clique.weight, clique.stats);
    for (i, &v) in clique.vertices.iter().enumerate() {
        println!("  node {i} picks {:?}", g.part(i)[v].choices);
    }
    Ok(())
}
