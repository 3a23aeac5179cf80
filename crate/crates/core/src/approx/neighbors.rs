use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::models::LinkTable;
use crate::topology::Plan;

/// How each node's candidate partner set is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NeighborPolicy {
    /// Hybrid price no higher than the dearest hybrid price over the node's
    /// fiber-only links.
    #[default]
    Eq4,
    /// The `k` nearest nodes by fiber price.
    Knn(usize),
    /// Every other node.
    All,
}

impl fmt::Display for NeighborPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeighborPolicy::Eq4 => f.write_str("eq4"),
            NeighborPolicy::Knn(k) => write!(f, "knn:{k}"),
            NeighborPolicy::All => f.write_str("all"),
        }
    }
}

impl FromStr for NeighborPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "eq4" => Ok(NeighborPolicy::Eq4),
            "all" => Ok(NeighborPolicy::All),
            _ => {
                let k = s
                    .strip_prefix("knn:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "unknown neighbor policy {s:?}; use eq4, knn:<k>, or all"
                        ))
                    })?;
                Ok(NeighborPolicy::Knn(k))
            }
        }
    }
}

impl TryFrom<String> for NeighborPolicy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<NeighborPolicy> for String {
    fn from(p: NeighborPolicy) -> Self {
        p.to_string()
    }
}

/// Candidate partner sets, closed under symmetry.
#[derive(Clone, Debug)]
pub struct NeighborSets {
    /// Sorted neighbor list per node.
    pub neighbors: Vec<Vec<usize>>,
    /// Cheapest fiber partner of each node; `None` only for a lone node.
    pub closest: Vec<Option<usize>>,
    /// The fiber-only plan the sets were derived from.
    pub of_plan: Plan,
}

impl NeighborSets {
    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Whether `(i, j)` lies in `N_j x N_i`.
    pub fn mutual(&self, i: usize, j: usize) -> bool {
        self.contains(i, j) && self.contains(j, i)
    }

    /// Whether the fiber-only plan links `i` and `j`.
    pub fn of_linked(&self, i: usize, j: usize) -> bool {
        self.of_plan.kind(i, j).is_link()
    }

    /// Pairs outside the neighbor relation for which a hybrid link is
    /// cheaper than both endpoints' cheapest fiber links combined.
    pub fn cost_assumption_violations(&self, table: &LinkTable) -> Vec<(usize, usize)> {
        let m = self.len();
        let mut out = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                if self.mutual(i, j) {
                    continue;
                }
                let (Some(ci), Some(cj)) = (self.closest[i], self.closest[j]) else {
                    continue;
                };
                if table.of_cost(i, ci) + table.of_cost(j, cj) > table.hybrid_cost(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn closest_by_fiber(table: &LinkTable, i: usize) -> Option<usize> {
    (0..table.len()).filter(|&b| b != i).min_by(|&a, &b| {
        table
            .of_cost(i, a)
            .total_cmp(&table.of_cost(i, b))
            .then(a.cmp(&b))
    })
}

/// Builds the neighbor sets from the fiber-only plan.
///
/// Every fiber-only link and each node's closest partner are always
/// included, and the result is closed under symmetry by union.
pub fn neighbor_sets(table: &LinkTable, of_plan: &Plan, policy: NeighborPolicy) -> NeighborSets {
    let m = table.len();
    let closest: Vec<Option<usize>> = (0..m).map(|i| closest_by_fiber(table, i)).collect();
    let mut member = vec![false; m * m];
    for i in 0..m {
        let others = (0..m).filter(|&b| b != i);
        match policy {
            NeighborPolicy::All => others.for_each(|b| member[i * m + b] = true),
            NeighborPolicy::Eq4 => {
                let cap = (0..m)
                    .filter(|&j| j != i && of_plan.kind(i, j).is_link())
                    .map(|j| table.hybrid_cost(i, j))
                    .fold(f64::NEG_INFINITY, f64::max);
                for b in others {
                    if table.hybrid_cost(i, b) <= cap {
                        member[i * m + b] = true;
                    }
                }
            }
            NeighborPolicy::Knn(k) => {
                let mut by_price: Vec<usize> = others.collect();
                by_price.sort_by(|&a, &b| {
                    table
                        .of_cost(i, a)
                        .total_cmp(&table.of_cost(i, b))
                        .then(a.cmp(&b))
                });
                for &b in by_price.iter().take(k) {
                    member[i * m + b] = true;
                }
            }
        }
        for j in 0..m {
            if j != i && of_plan.kind(i, j).is_link() {
                member[i * m + j] = true;
            }
        }
        if let Some(c) = closest[i] {
            member[i * m + c] = true;
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let either = member[i * m + j] || member[j * m + i];
            member[i * m + j] = either;
            member[j * m + i] = either;
        }
    }
    let neighbors = (0..m)
        .map(|i| (0..m).filter(|&j| member[i * m + j]).collect())
        .collect();
    NeighborSets {
        neighbors,
        closest,
        of_plan: of_plan.clone(),
    }
}
