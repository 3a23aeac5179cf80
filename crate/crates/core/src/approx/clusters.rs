//! Per-node feasible local assignments.

use crate::error::{Error, Result};
use crate::feasibility::{rate_ok, CONSTRAINT_TOL};
use crate::models::{LinkTable, RateReliabilityModel};
use crate::topology::LinkKind;

use super::neighbors::NeighborSets;

/// Default cap on `|N_i|`; a node enumerates up to `3^cap` assignments.
pub const DEFAULT_MAX_NEIGHBORS: usize = 12;

/// `-ln(1 - alpha)`: the linearized reliability threshold.
pub fn reliability_threshold(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidModel(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    Ok(-(-alpha).ln_1p())
}

/// Partners whose hybrid link alone meets the reliability target.
#[derive(Clone, Debug)]
pub struct ReliabilitySets {
    m: usize,
    reliable: Vec<bool>,
    pub alpha_tilde: f64,
}

impl ReliabilitySets {
    pub fn new(table: &LinkTable, rrm: &RateReliabilityModel) -> Result<Self> {
        let m = table.len();
        let alpha = rrm.alpha();
        let mut reliable = vec![false; m * m];
        for i in 0..m {
            for j in 0..m {
                if i != j && table.hybrid_reliability(i, j) >= alpha {
                    reliable[i * m + j] = true;
                }
            }
        }
        Ok(Self {
            m,
            reliable,
            alpha_tilde: reliability_threshold(alpha)?,
        })
    }

    /// `j` in `R_i`.
    pub fn is_reliable(&self, i: usize, j: usize) -> bool {
        self.reliable[i * self.m + j]
    }

    /// The set `R_i`, sorted.
    pub fn reliable_set(&self, i: usize) -> Vec<usize> {
        (0..self.m).filter(|&j| self.is_reliable(i, j)).collect()
    }

    /// The complement of `R_i` among the other nodes, sorted.
    pub fn unreliable_set(&self, i: usize) -> Vec<usize> {
        (0..self.m)
            .filter(|&j| j != i && !self.is_reliable(i, j))
            .collect()
    }
}

/// One node's link choice toward each of its neighbors.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalAssignment {
    pub owner: usize,
    /// Aligned with the owner's sorted neighbor list.
    pub choices: Vec<LinkKind>,
    /// Minus half the added cost of the chosen links.
    pub weight: f64,
}

impl LocalAssignment {
    pub fn choice_toward(&self, ns: &NeighborSets, j: usize) -> Option<LinkKind> {
        ns.neighbors[self.owner]
            .binary_search(&j)
            .ok()
            .map(|slot| self.choices[slot])
    }
}

/// All feasible assignments for node `i`, in lexicographic order of the
/// choice vector (none < fiber < hybrid, first neighbor most significant).
///
/// Feasible means: fiber on pre-deployed pairs, some link on every
/// fiber-only-plan pair, rate at least the target, and the linearized
/// reliability at least `-ln(1 - alpha)`.
pub fn enumerate_clusters(
    i: usize,
    ns: &NeighborSets,
    rs: &ReliabilitySets,
    table: &LinkTable,
    rrm: &RateReliabilityModel,
    max_neighbors: usize,
) -> Result<Vec<LocalAssignment>> {
    let neighbors = &ns.neighbors[i];
    if neighbors.len() > max_neighbors {
        return Err(Error::NeighborCapExceeded {
            node: i,
            size: neighbors.len(),
            cap: max_neighbors,
        });
    }
    let domains: Vec<&[LinkKind]> = neighbors
        .iter()
        .map(|&j| -> &[LinkKind] {
            if table.is_predeployed(i, j) {
                &[LinkKind::Of]
            } else if ns.of_linked(i, j) {
                &[LinkKind::Of, LinkKind::Hybrid]
            } else {
                &LinkKind::ALL
            }
        })
        .collect();
    let ctx = Enumeration {
        owner: i,
        neighbors,
        domains: &domains,
        rs,
        table,
        target_rate: rrm.target_rate(),
    };
    let mut out = Vec::new();
    let mut choices = Vec::with_capacity(neighbors.len());
    ctx.walk(&mut choices, &mut out);
    Ok(out)
}

struct Enumeration<'a> {
    owner: usize,
    neighbors: &'a [usize],
    domains: &'a [&'a [LinkKind]],
    rs: &'a ReliabilitySets,
    table: &'a LinkTable,
    target_rate: f64,
}

impl Enumeration<'_> {
    fn walk(&self, choices: &mut Vec<LinkKind>, out: &mut Vec<LocalAssignment>) {
        let depth = choices.len();
        if depth == self.neighbors.len() {
            if let Some(a) = self.finish(choices) {
                out.push(a);
            }
            return;
        }
        for &kind in self.domains[depth] {
            choices.push(kind);
            self.walk(choices, out);
            choices.pop();
        }
    }

    fn finish(&self, choices: &[LinkKind]) -> Option<LocalAssignment> {
        let i = self.owner;
        let alpha_tilde = self.rs.alpha_tilde;
        let mut rate = 0.0;
        let mut reliability = 0.0;
        let mut cost = 0.0;
        for (&j, &kind) in self.neighbors.iter().zip(choices) {
            match kind {
                LinkKind::None => continue,
                LinkKind::Of => {
                    rate += self.target_rate;
                    reliability += alpha_tilde;
                }
                LinkKind::Hybrid => {
                    rate += self.table.hybrid_rate(i, j);
                    reliability += if self.rs.is_reliable(i, j) {
                        alpha_tilde
                    } else {
                        self.table.hybrid_reliability(i, j)
                    };
                }
            }
            cost += self.table.added_cost(i, j, kind);
        }
        let feasible =
            rate_ok(rate, self.target_rate) && reliability >= alpha_tilde * (1.0 - CONSTRAINT_TOL);
        feasible.then(|| LocalAssignment {
            owner: i,
            choices: choices.to_vec(),
            weight: -0.5 * cost,
        })
    }
}
