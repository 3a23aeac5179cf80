//! Optimal fiber-only planning by greedy cluster merging, plus the cluster
//! reduction used to certify such plans.

use std::cmp::Ordering;

use crate::connectivity::DisjointSet;
use crate::models::CostModel;
use crate::topology::{LinkKind, Plan, Topology};

/// Partition of the nodes into disjoint non-empty groups.
///
/// Groups are sorted internally and ordered by their smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    pub groups: Vec<Vec<usize>>,
}

impl Clustering {
    fn from_labels(dsu: &DisjointSet, m: usize) -> Self {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; m];
        for v in 0..m {
            let root = dsu.find(v);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(v);
        }
        Self { groups }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Ordering key of a candidate fiber link: price first, then the pair.
#[derive(Clone, Copy, Debug)]
struct PairKey {
    price: f64,
    lo: usize,
    hi: usize,
}

impl PairKey {
    fn new(t: &Topology, cm: &CostModel, a: usize, b: usize) -> Self {
        Self {
            price: cm.of_cost(t.dist(a, b)),
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        self.price
            .total_cmp(&other.price)
            .then(self.lo.cmp(&other.lo))
            .then(self.hi.cmp(&other.hi))
    }
}

/// Cheapest link between two node groups.
fn closest_pair(t: &Topology, cm: &CostModel, a: &[usize], b: &[usize]) -> PairKey {
    let mut best: Option<PairKey> = None;
    for &u in a {
        for &v in b {
            let key = PairKey::new(t, cm, u, v);
            if best.is_none_or(|b| key.cmp(&b) == Ordering::Less) {
                best = Some(key);
            }
        }
    }
    best.expect("groups are non-empty")
}

/// Groups connected by pre-deployed links.
fn predeployed_components(t: &Topology) -> DisjointSet {
    let mut dsu = DisjointSet::new(t.len());
    for (i, j) in t.predeployed_pairs() {
        dsu.union(i, j);
    }
    dsu
}

/// Minimum-cost connected fiber-only plan.
///
/// Starts from the pre-deployed components and repeatedly joins the two
/// cheapest-to-connect clusters through their cheapest node pair. Ties go to
/// the lexicographically smallest `(min index, max index)` pair.
pub fn plan_of_only(t: &Topology, cm: &CostModel) -> Plan {
    let m = t.len();
    let mut plan = Plan::from_predeployed(t);
    let mut dsu = predeployed_components(t);
    while dsu.components() > 1 {
        let clusters = Clustering::from_labels(&dsu, m).groups;
        let mut best: Option<PairKey> = None;
        for (x, a) in clusters.iter().enumerate() {
            for b in &clusters[x + 1..] {
                let key = closest_pair(t, cm, a, b);
                if best.is_none_or(|b| key.cmp(&b) == Ordering::Less) {
                    best = Some(key);
                }
            }
        }
        let key = best.expect("at least two clusters");
        plan.set(key.lo, key.hi, LinkKind::Of);
        dsu.union(key.lo, key.hi);
    }
    plan
}

/// Merges clusters that are each other's cheapest neighbor and whose
/// cheapest node pair carries a fiber link in `p`, until no merge applies.
///
/// Initial clusters are the pre-deployed components (singletons when there
/// are none). A plan produced by [`plan_of_only`] always reduces to a single
/// cluster.
pub fn reduce_clusters(t: &Topology, p: &Plan, cm: &CostModel) -> Clustering {
    let m = t.len();
    let mut dsu = predeployed_components(t);
    loop {
        let clusters = Clustering::from_labels(&dsu, m).groups;
        let k = clusters.len();
        if k < 2 {
            break;
        }
        // nearest[x] = (index of cheapest other cluster, key of that pair)
        let mut pair_keys = vec![None; k * k];
        for x in 0..k {
            for y in x + 1..k {
                let key = closest_pair(t, cm, &clusters[x], &clusters[y]);
                pair_keys[x * k + y] = Some(key);
                pair_keys[y * k + x] = Some(key);
            }
        }
        let nearest: Vec<usize> = (0..k)
            .map(|x| {
                (0..k)
                    .filter(|&y| y != x)
                    .min_by(|&a, &b| {
                        let ka = pair_keys[x * k + a].unwrap();
                        let kb = pair_keys[x * k + b].unwrap();
                        ka.cmp(&kb)
                    })
                    .unwrap()
            })
            .collect();
        let merge = (0..k)
            .flat_map(|x| (x + 1..k).map(move |y| (x, y)))
            .find(|&(x, y)| {
                let key = pair_keys[x * k + y].unwrap();
                nearest[x] == y && nearest[y] == x && p.kind(key.lo, key.hi) == LinkKind::Of
            });
        match merge {
            Some((x, y)) => {
                dsu.union(clusters[x][0], clusters[y][0]);
            }
            None => break,
        }
    }
    Clustering::from_labels(&dsu, m)
}
