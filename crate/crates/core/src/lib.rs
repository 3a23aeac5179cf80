//! Minimum-cost backhaul topology planning.
//!
//! A backhaul network connects `M` base stations. Some pairs already share a
//! pre-deployed optical-fiber (OF) link; the planner may add more OF links
//! (cost proportional to length) or hybrid RF/FSO links (roughly fixed cost,
//! rate and reliability decaying with distance). Every plan must keep the
//! network connected and give each node enough rate and reliability.
//!
//! Three planners are provided:
//!
//! * [`plan_of_only`]: optimal fiber-only plan by cluster merging.
//! * [`plan_hybrid`]: neighbor-restricted approximation solved as a maximum
//!   weight clique over a planning graph.
//! * [`plan_exact`]: branch-and-bound over the ternary link encoding, used as
//!   the optimality oracle on small instances.
//!
//! The [`experiments`] module sweeps all three over random scenarios and
//! writes CSV tables; [`cli`] wires everything to the `backhaul` binary.

pub mod approx;
pub mod cli;
pub mod connectivity;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod feasibility;
pub mod models;
pub mod of_planner;
pub mod topology;

pub use approx::{plan_hybrid, HybridOptions, HybridOutcome, NeighborPolicy};
pub use connectivity::{fiedler_value, is_connected, DisjointSet};
pub use error::{Error, Result};
pub use exact::{plan_exact, ExactOptions, ExactOutcome};
pub use feasibility::{check_feasible, FeasibilityReport};
pub use models::{CostModel, HybridCost, LinkModels, LinkTable, RateReliabilityModel};
pub use of_planner::{plan_of_only, reduce_clusters, Clustering};
pub use topology::{LinkKind, Plan, Point, Topology};
