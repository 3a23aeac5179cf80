//! Exact maximum-weight clique with one vertex per part.

use serde::Serialize;

use crate::error::{Error, Result};

use super::graph::{bits_test, Bits, PlanningGraph};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CliqueStats {
    pub nodes_expanded: u64,
    pub pruned_by_bound: u64,
    pub pruned_by_empty_part: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliqueSolution {
    /// Chosen vertex index within each part, indexed by node.
    pub vertices: Vec<usize>,
    /// Sum of vertex weights in node order.
    pub weight: f64,
    pub stats: CliqueStats,
}

/// Sum of the chosen vertices' weights, in node order.
pub fn clique_weight(g: &PlanningGraph, vertices: &[usize]) -> f64 {
    vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| g.parts[i][v].weight)
        .sum()
}

struct Search<'a> {
    g: &'a PlanningGraph,
    /// Parts in branching order: ascending size, then node index.
    order: Vec<usize>,
    /// Per part, vertex indices by descending weight (ascending index on ties).
    by_weight: Vec<Vec<usize>>,
    chosen: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    stats: CliqueStats,
}

impl Search<'_> {
    fn slack(&self) -> f64 {
        self.best
            .as_ref()
            .map_or(0.0, |(w, _)| 1e-9 * w.abs().max(1.0))
    }

    fn beaten(&self, bound: f64) -> bool {
        self.best
            .as_ref()
            .is_some_and(|(w, _)| bound < *w - self.slack())
    }

    fn max_weight_in(&self, part: usize, cand: &[u64]) -> Option<f64> {
        self.by_weight[part]
            .iter()
            .find(|&&v| bits_test(cand, v))
            .map(|&v| self.g.parts[part][v].weight)
    }

    fn leaf(&mut self) {
        let w = clique_weight(self.g, &self.chosen);
        let better = match &self.best {
            None => true,
            Some((bw, bv)) => w > *bw || (w == *bw && self.chosen < *bv),
        };
        if better {
            self.best = Some((w, self.chosen.clone()));
        }
    }

    /// `cands[d]` is the candidate set of part `order[d]` for every `d >= depth`.
    fn descend(&mut self, depth: usize, partial: f64, cands: &[Bits]) {
        self.stats.nodes_expanded += 1;
        if depth == self.order.len() {
            self.leaf();
            return;
        }
        let part = self.order[depth];
        let mut rest = 0.0;
        for (d, cand) in cands.iter().enumerate().skip(1) {
            match self.max_weight_in(self.order[depth + d], cand) {
                Some(w) => rest += w,
                None => {
                    self.stats.pruned_by_empty_part += 1;
                    return;
                }
            }
        }
        let candidates: Vec<usize> = self.by_weight[part]
            .iter()
            .copied()
            .filter(|&v| bits_test(&cands[0], v))
            .collect();
        for v in candidates {
            let w = self.g.parts[part][v].weight;
            // Candidates come in descending weight, so the first failure
            // rules out the rest.
            if self.beaten(partial + w + rest) {
                self.stats.pruned_by_bound += 1;
                break;
            }
            let mut next: Vec<Bits> = Vec::with_capacity(cands.len() - 1);
            let mut bound = partial + w;
            let mut dead = false;
            for (d, cand) in cands.iter().enumerate().skip(1) {
                let other = self.order[depth + d];
                let filtered: Bits = match self.g.compatible(part, v, other) {
                    Some(mask) => cand.iter().zip(mask).map(|(a, b)| a & b).collect(),
                    None => cand.clone(),
                };
                match self.max_weight_in(other, &filtered) {
                    Some(mw) => bound += mw,
                    None => {
                        dead = true;
                        break;
                    }
                }
                next.push(filtered);
            }
            if dead {
                self.stats.pruned_by_empty_part += 1;
                continue;
            }
            if self.beaten(bound) {
                self.stats.pruned_by_bound += 1;
                continue;
            }
            self.chosen[part] = v;
            self.descend(depth + 1, partial + w, &next);
        }
    }
}

/// Maximum-weight clique among cliques holding exactly one vertex per part.
///
/// Depth-first over parts in ascending size, with candidate sets narrowed by
/// each choice and an admissible bound from the best remaining candidate of
/// every unassigned part. Weight ties go to the lexicographically smallest
/// vertex vector (indexed by node).
pub fn max_weight_clique(g: &PlanningGraph) -> Result<CliqueSolution> {
    let m = g.part_count();
    if m == 0 {
        return Err(Error::Precondition("planning graph has no parts".into()));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (g.parts[i].len(), i));
    let by_weight = g
        .parts
        .iter()
        .map(|part| {
            let mut idx: Vec<usize> = (0..part.len()).collect();
            idx.sort_by(|&a, &b| part[b].weight.total_cmp(&part[a].weight).then(a.cmp(&b)));
            idx
        })
        .collect();
    let cands: Vec<Bits> = order
        .iter()
        .map(|&i| super::graph::bits_full(g.parts[i].len()))
        .collect();
    let mut search = Search {
        g,
        order,
        by_weight,
        chosen: vec![0; m],
        best: None,
        stats: CliqueStats::default(),
    };
    search.descend(0, 0.0, &cands);
    match search.best {
        Some((weight, vertices)) => Ok(CliqueSolution {
            vertices,
            weight,
            stats: search.stats,
        }),
        None => Err(Error::Infeasible(
            "planning graph has no clique with one vertex per node".into(),
        )),
    }
}
