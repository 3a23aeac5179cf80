//! The M-partite planning graph.
//!
//! Part `i` holds node `i`'s feasible local assignments. Two vertices from
//! different parts are adjacent unless both nodes list each other as
//! neighbors and disagree on the kind of their shared link. Since that test
//! only looks at one pair of choices, edges are kept implicitly as per-part
//! bitsets indexed by (neighbor, kind) rather than as an explicit list.

use crate::error::{Error, Result};
use crate::topology::LinkKind;

use super::clusters::LocalAssignment;
use super::neighbors::NeighborSets;

pub(crate) type Bits = Vec<u64>;

pub(crate) fn bits_full(n: usize) -> Bits {
    let mut b = vec![u64::MAX; n.div_ceil(64)];
    if !n.is_multiple_of(64) {
        if let Some(last) = b.last_mut() {
            *last = (1u64 << (n % 64)) - 1;
        }
    }
    b
}

pub(crate) fn bits_test(b: &[u64], i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

pub(crate) fn bits_count(b: &[u64]) -> u64 {
    b.iter().map(|w| w.count_ones() as u64).sum()
}

#[derive(Clone, Debug)]
pub struct PlanningGraph {
    pub(crate) parts: Vec<Vec<LocalAssignment>>,
    pub(crate) neighbors: Vec<Vec<usize>>,
    /// `slot[i][k]`: position of `k` in `N_i` when `(i, k)` is a mutual pair.
    pub(crate) slot: Vec<Vec<Option<usize>>>,
    /// `masks[k][s][kind]`: vertices of part `k` whose choice toward its
    /// `s`-th neighbor is `kind`.
    pub(crate) masks: Vec<Vec<[Bits; 3]>>,
}

/// Builds the planning graph from per-node assignment lists.
pub fn build_planning_graph(
    clusters: Vec<Vec<LocalAssignment>>,
    ns: &NeighborSets,
) -> Result<PlanningGraph> {
    let m = clusters.len();
    if let Some(node) = clusters.iter().position(Vec::is_empty) {
        return Err(Error::Infeasible(format!(
            "node {node} has no feasible local assignment"
        )));
    }
    let slot: Vec<Vec<Option<usize>>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|k| {
                    if k != i && ns.mutual(i, k) {
                        ns.neighbors[i].binary_search(&k).ok()
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let masks = clusters
        .iter()
        .enumerate()
        .map(|(k, part)| {
            let words = part.len().div_ceil(64);
            (0..ns.neighbors[k].len())
                .map(|s| {
                    let mut by_kind: [Bits; 3] = std::array::from_fn(|_| vec![0u64; words]);
                    for (v, a) in part.iter().enumerate() {
                        by_kind[a.choices[s].code() as usize][v / 64] |= 1 << (v % 64);
                    }
                    by_kind
                })
                .collect()
        })
        .collect();
    Ok(PlanningGraph {
        parts: clusters,
        neighbors: ns.neighbors.clone(),
        slot,
        masks,
    })
}

impl PlanningGraph {
    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<LocalAssignment>] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &[LocalAssignment] {
        &self.parts[i]
    }

    /// Neighbor list of node `i`, in the order of its assignments' choices.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn vertex_count(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    fn choice(&self, i: usize, v: usize, k: usize) -> Option<LinkKind> {
        self.slot[i][k].map(|s| self.parts[i][v].choices[s])
    }

    /// Adjacency between vertex `a` of part `i` and vertex `b` of part `k`.
    pub fn adjacent(&self, (i, a): (usize, usize), (k, b): (usize, usize)) -> bool {
        if i == k {
            return false;
        }
        match (self.choice(i, a, k), self.choice(k, b, i)) {
            (Some(x), Some(y)) => x == y,
            _ => true,
        }
    }

    /// Vertices of part `k` adjacent to vertex `v` of part `i`, as a bitset.
    pub(crate) fn compatible(&self, i: usize, v: usize, k: usize) -> Option<&Bits> {
        let s_ik = self.slot[i][k]?;
        let s_ki = self.slot[k][i]?;
        let kind = self.parts[i][v].choices[s_ik];
        Some(&self.masks[k][s_ki][kind.code() as usize])
    }

    pub fn edge_count(&self) -> u64 {
        let m = self.part_count();
        let mut total = 0u64;
        for i in 0..m {
            for k in i + 1..m {
                match (self.slot[i][k], self.slot[k][i]) {
                    (Some(si), Some(sk)) => {
                        for kind in 0..3 {
                            total += bits_count(&self.masks[i][si][kind])
                                * bits_count(&self.masks[k][sk][kind]);
                        }
                    }
                    _ => total += (self.parts[i].len() * self.parts[k].len()) as u64,
                }
            }
        }
        total
    }
}
