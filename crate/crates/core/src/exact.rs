//! Globally optimal planning on small instances.
//!
//! Every pair without pre-deployed fiber takes one of three values (none,
//! fiber, hybrid). A depth-first branch-and-bound walks the pairs in order of
//! ascending fiber cost, checking each node's rate and product-form
//! reliability as soon as its last pair is decided and keeping connectivity
//! in a disjoint-set with rollback.

use serde::Serialize;

use crate::connectivity::DisjointSet;
use crate::error::{Error, Result};
use crate::feasibility::{rate_ok, reliability_ok};
use crate::models::{CostModel, LinkTable, RateReliabilityModel};
use crate::of_planner::plan_of_only;
use crate::topology::{LinkKind, Plan, Topology};

/// Free-pair count accepted without an explicit budget (M = 9, no fiber).
pub const DEFAULT_MAX_FREE_PAIRS: usize = 36;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactOptions {
    /// Node-expansion limit; `None` searches to completion.
    pub budget: Option<u64>,
    /// Bound partial plans by a minimum spanning completion over the
    /// undecided pairs instead of the committed cost alone.
    pub strong_bound: bool,
    /// Drops the reliability constraint. Only meaningful for analysis.
    pub relax_reliability: bool,
    pub max_free_pairs: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            budget: None,
            strong_bound: false,
            relax_reliability: false,
            max_free_pairs: DEFAULT_MAX_FREE_PAIRS,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub free_pairs: usize,
    pub nodes_expanded: u64,
    pub pruned_by_bound: u64,
    pub pruned_by_connectivity: u64,
    pub pruned_by_node_constraints: u64,
    pub incumbent_updates: u64,
}

#[derive(Clone, Debug)]
pub struct ExactOutcome {
    pub plan: Plan,
    pub cost: f64,
    /// `false` when the budget ran out before the search finished.
    pub optimal: bool,
    pub stats: SearchStats,
}

/// The ternary encoding of a plan over the pairs lacking pre-deployed fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryAssignment {
    /// `(i, j)` with `i < j`, lexicographic.
    pub free_pairs: Vec<(usize, usize)>,
    pub values: Vec<LinkKind>,
}

impl TernaryAssignment {
    pub fn free_pairs(t: &Topology) -> Vec<(usize, usize)> {
        let m = t.len();
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .filter(|&(i, j)| !t.is_predeployed(i, j))
            .collect()
    }

    pub fn from_plan(t: &Topology, p: &Plan) -> Self {
        let free_pairs = Self::free_pairs(t);
        let values = free_pairs.iter().map(|&(i, j)| p.kind(i, j)).collect();
        Self { free_pairs, values }
    }

    pub fn to_plan(&self, t: &Topology) -> Plan {
        let mut plan = Plan::from_predeployed(t);
        for (&(i, j), &kind) in self.free_pairs.iter().zip(&self.values) {
            plan.set(i, j, kind);
        }
        plan
    }

    /// Values as ternary digits.
    pub fn codes(&self) -> Vec<u8> {
        self.values.iter().map(|k| k.code()).collect()
    }
}

struct Search<'a> {
    table: &'a LinkTable,
    target_rate: f64,
    alpha: f64,
    opts: ExactOptions,
    m: usize,
    /// Free pairs in branching order.
    order: Vec<(usize, usize)>,
    /// Free pairs in lexicographic order, for the canonical cost sum.
    lex_pairs: Vec<(usize, usize)>,
    /// Position in lexicographic order of each branching slot.
    lex_slot: Vec<usize>,
    /// Nodes whose last free pair is at each depth.
    closes: Vec<Vec<usize>>,
    /// Branching slots sorted by cheapest link price, for the spanning bound.
    by_min_price: Vec<usize>,
    values: Vec<LinkKind>,
    rate: Vec<f64>,
    outage: Vec<f64>,
    dsu: DisjointSet,
    best_cost: f64,
    best_key: Vec<u8>,
    best_values: Vec<LinkKind>,
    stats: SearchStats,
    aborted: bool,
}

/// Tie-break rank: links before no link, hybrid before fiber.
fn tie_rank(kind: LinkKind) -> u8 {
    match kind {
        LinkKind::Hybrid => 0,
        LinkKind::Of => 1,
        LinkKind::None => 2,
    }
}

impl Search<'_> {
    fn slack(&self) -> f64 {
        1e-9 * self.best_cost.abs().max(1.0)
    }

    fn node_ok(&self, v: usize) -> bool {
        rate_ok(self.rate[v], self.target_rate)
            && (self.opts.relax_reliability || reliability_ok(self.outage[v], self.alpha))
    }

    /// Lower bound on the cost still to pay, or `None` if the undecided pairs
    /// cannot connect the graph.
    fn completion_bound(&mut self, depth: usize) -> Option<f64> {
        let cp = self.dsu.checkpoint();
        let mut extra = 0.0;
        if self.opts.strong_bound {
            for &slot in &self.by_min_price {
                if slot < depth || self.dsu.components() == 1 {
                    continue;
                }
                let (i, j) = self.order[slot];
                if self.dsu.union(i, j) {
                    extra += self.table.of_cost(i, j).min(self.table.hybrid_cost(i, j));
                }
            }
        } else {
            for &(i, j) in &self.order[depth..] {
                self.dsu.union(i, j);
            }
        }
        let connected = self.dsu.components() == 1;
        self.dsu.rollback(cp);
        connected.then_some(extra)
    }

    fn leaf(&mut self) {
        // Canonical cost: lexicographic pair order, matching `Plan::cost`.
        let mut lex = vec![LinkKind::None; self.order.len()];
        for (slot, &kind) in self.values.iter().enumerate() {
            lex[self.lex_slot[slot]] = kind;
        }
        let mut cost = 0.0;
        for (&(i, j), &kind) in self.lex_pairs.iter().zip(&lex) {
            if kind.is_link() {
                cost += self.table.added_cost(i, j, kind);
            }
        }
        if cost > self.best_cost {
            return;
        }
        let key: Vec<u8> = self.values.iter().map(|&k| tie_rank(k)).collect();
        if cost < self.best_cost || key < self.best_key {
            self.best_cost = cost;
            self.best_key = key;
            self.best_values.clone_from(&self.values);
            self.stats.incumbent_updates += 1;
        }
    }

    fn descend(&mut self, depth: usize, committed: f64) {
        if self.aborted {
            return;
        }
        self.stats.nodes_expanded += 1;
        if let Some(budget) = self.opts.budget {
            if self.stats.nodes_expanded > budget {
                self.aborted = true;
                return;
            }
        }
        if depth == self.order.len() {
            if self.dsu.components() <= 1 {
                self.leaf();
            } else {
                self.stats.pruned_by_connectivity += 1;
            }
            return;
        }
        let (i, j) = self.order[depth];
        let of = self.table.of_cost(i, j);
        let hy = self.table.hybrid_cost(i, j);
        let choices = if of <= hy {
            [LinkKind::Of, LinkKind::Hybrid, LinkKind::None]
        } else {
            [LinkKind::Hybrid, LinkKind::Of, LinkKind::None]
        };
        for kind in choices {
            let added = self.table.added_cost(i, j, kind);
            let cost = committed + added;
            if cost > self.best_cost + self.slack() {
                self.stats.pruned_by_bound += 1;
                continue;
            }
            let saved = (self.rate[i], self.rate[j], self.outage[i], self.outage[j]);
            let cp = self.dsu.checkpoint();
            match kind {
                LinkKind::None => {}
                LinkKind::Of => {
                    self.rate[i] += self.target_rate;
                    self.rate[j] += self.target_rate;
                    self.outage[i] *= 1.0 - self.alpha;
                    self.outage[j] *= 1.0 - self.alpha;
                    self.dsu.union(i, j);
                }
                LinkKind::Hybrid => {
                    let r = self.table.hybrid_rate(i, j);
                    let q = 1.0 - self.table.hybrid_reliability(i, j);
                    self.rate[i] += r;
                    self.rate[j] += r;
                    self.outage[i] *= q;
                    self.outage[j] *= q;
                    self.dsu.union(i, j);
                }
            }
            self.values[depth] = kind;
            if !self.closes[depth].iter().all(|&v| self.node_ok(v)) {
                self.stats.pruned_by_node_constraints += 1;
            } else {
                match self.completion_bound(depth + 1) {
                    None => self.stats.pruned_by_connectivity += 1,
                    Some(extra) if cost + extra > self.best_cost + self.slack() => {
                        self.stats.pruned_by_bound += 1
                    }
                    Some(_) => self.descend(depth + 1, cost),
                }
            }
            self.dsu.rollback(cp);
            (self.rate[i], self.rate[j], self.outage[i], self.outage[j]) = saved;
            self.values[depth] = LinkKind::None;
            if self.aborted {
                return;
            }
        }
    }
}

/// Minimum-cost plan satisfying rate, product-form reliability, pre-deployed
/// coverage, and connectivity.
///
/// Pairs are branched in ascending fiber cost. Among equal-cost optima the
/// plan whose assignment, read in that order, puts links earliest wins
/// (hybrid ahead of fiber ahead of no link). The fiber-only
/// plan seeds the incumbent, so a feasible plan is always available; when
/// the budget runs out the best plan found so far comes back with
/// `optimal == false`.
pub fn plan_exact(
    t: &Topology,
    cm: &CostModel,
    rrm: &RateReliabilityModel,
    opts: &ExactOptions,
) -> Result<ExactOutcome> {
    let m = t.len();
    if m < 2 {
        return Err(Error::Infeasible(
            "a single base station cannot meet the rate target".into(),
        ));
    }
    let lex_pairs = TernaryAssignment::free_pairs(t);
    if lex_pairs.len() > opts.max_free_pairs && opts.budget.is_none() {
        return Err(Error::Precondition(format!(
            "exact search over {} free pairs exceeds the cap of {}; set a budget or shrink the instance",
            lex_pairs.len(),
            opts.max_free_pairs
        )));
    }
    let table = LinkTable::new(t, cm, rrm);

    let mut order = lex_pairs.clone();
    order.sort_by(|&(a, b), &(c, d)| {
        table
            .of_cost(a, b)
            .total_cmp(&table.of_cost(c, d))
            .then((a, b).cmp(&(c, d)))
    });
    let lex_slot: Vec<usize> = order
        .iter()
        .map(|p| lex_pairs.binary_search(p).expect("pair present"))
        .collect();
    let mut last_slot: Vec<Option<usize>> = vec![None; m];
    for (slot, &(i, j)) in order.iter().enumerate() {
        last_slot[i] = Some(slot);
        last_slot[j] = Some(slot);
    }
    let mut closes = vec![Vec::new(); order.len()];
    let mut closed_at_root = Vec::new();
    for (v, slot) in last_slot.iter().enumerate() {
        match slot {
            Some(s) => closes[*s].push(v),
            None => closed_at_root.push(v),
        }
    }
    let mut by_min_price: Vec<usize> = (0..order.len()).collect();
    by_min_price.sort_by(|&a, &b| {
        let (i, j) = order[a];
        let (k, l) = order[b];
        let pa = table.of_cost(i, j).min(table.hybrid_cost(i, j));
        let pb = table.of_cost(k, l).min(table.hybrid_cost(k, l));
        pa.total_cmp(&pb).then(a.cmp(&b))
    });

    let seed = plan_of_only(t, cm);
    let seed_values: Vec<LinkKind> = order.iter().map(|&(i, j)| seed.kind(i, j)).collect();

    let mut search = Search {
        table: &table,
        target_rate: rrm.target_rate(),
        alpha: rrm.alpha(),
        opts: *opts,
        m,
        order,
        lex_pairs: lex_pairs.clone(),
        lex_slot,
        closes,
        by_min_price,
        values: vec![LinkKind::None; lex_pairs.len()],
        rate: vec![0.0; m],
        outage: vec![1.0; m],
        dsu: DisjointSet::new(m),
        best_cost: seed.cost(t, cm),
        best_key: seed_values.iter().map(|&k| tie_rank(k)).collect(),
        best_values: seed_values,
        stats: SearchStats {
            free_pairs: lex_pairs.len(),
            ..SearchStats::default()
        },
        aborted: false,
    };
    for (i, j) in t.predeployed_pairs() {
        search.rate[i] += rrm.target_rate();
        search.rate[j] += rrm.target_rate();
        search.outage[i] *= 1.0 - rrm.alpha();
        search.outage[j] *= 1.0 - rrm.alpha();
        search.dsu.union(i, j);
    }
    let root_ok = closed_at_root.iter().all(|&v| search.node_ok(v));
    debug_assert_eq!(search.m, m);
    if root_ok {
        if search.completion_bound(0).is_some() {
            search.descend(0, 0.0);
        } else {
            search.stats.pruned_by_connectivity += 1;
        }
    }

    let mut values = vec![LinkKind::None; lex_pairs.len()];
    for (slot, &kind) in search.best_values.iter().enumerate() {
        values[search.lex_slot[slot]] = kind;
    }
    let assignment = TernaryAssignment {
        free_pairs: lex_pairs,
        values,
    };
    let plan = assignment.to_plan(t);
    Ok(ExactOutcome {
        cost: plan.cost(t, cm),
        plan,
        optimal: !search.aborted,
        stats: search.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::check_feasible;
    use crate::models::HybridCost;
    use rand::{Rng, SeedableRng};

    fn models(hybrid: f64) -> (CostModel, RateReliabilityModel) {
        (
            CostModel::new(13.5, HybridCost::Constant(hybrid)).unwrap(),
            RateReliabilityModel::new(100.0, 3000.0, 0.9, 2000.0, 1000.0).unwrap(),
        )
    }

    /// Plain enumeration of all 3^n ternary vectors.
    fn exhaustive(
        t: &Topology,
        cm: &CostModel,
        rrm: &RateReliabilityModel,
        relax: bool,
    ) -> Option<(f64, Plan)> {
        let pairs = TernaryAssignment::free_pairs(t);
        let n = pairs.len();
        let mut by_length: Vec<usize> = (0..n).collect();
        by_length.sort_by(|&a, &b| {
            let (i, j) = pairs[a];
            let (k, l) = pairs[b];
            t.distance(i, j)
                .unwrap()
                .total_cmp(&t.distance(k, l).unwrap())
                .then(a.cmp(&b))
        });
        let mut best: Option<(f64, Vec<LinkKind>, Vec<u8>)> = None;
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            // Most significant digit first so enumeration is lexicographic.
            let mut values = vec![LinkKind::None; n];
            for slot in (0..n).rev() {
                values[slot] = LinkKind::ALL[c % 3];
                c /= 3;
            }
            let a = TernaryAssignment {
                free_pairs: pairs.clone(),
                values: values.clone(),
            };
            let plan = a.to_plan(t);
            let r = check_feasible(t, &plan, cm, rrm);
            let ok =
                r.predeployed_ok() && r.rate_ok() && (relax || r.reliability_ok()) && r.connected;
            if !ok {
                continue;
            }
            let cost = plan.cost(t, cm);
            // Ties: links on the shortest pairs first, hybrid before fiber.
            let key: Vec<u8> = by_length
                .iter()
                .map(|&k| match values[k] {
                    LinkKind::Hybrid => 0,
                    LinkKind::Of => 1,
                    LinkKind::None => 2,
                })
                .collect();
            if best
                .as_ref()
                .is_none_or(|(b, _, bk)| cost < *b || (cost == *b && key < *bk))
            {
                best = Some((cost, values, key));
            }
        }
        best.map(|(c, v, _)| {
            (
                c,
                TernaryAssignment {
                    free_pairs: pairs,
                    values: v,
                }
                .to_plan(t),
            )
        })
    }

    #[test]
    fn two_nodes_prefer_cheap_hybrid() {
        let (cm, rrm) = models(10_000.0);
        let t = Topology::new(vec![(0.0, 0.0), (1500.0, 0.0)], &[]).unwrap();
        let out = plan_exact(&t, &cm, &rrm, &ExactOptions::default()).unwrap();
        assert_eq!(out.plan.kind(0, 1), LinkKind::Hybrid);
        assert_eq!(out.cost, 10_000.0);
        assert!(out.optimal);
    }

    #[test]
    fn collinear_three_nodes_use_two_hybrids() {
        let (cm, rrm) = models(10_000.0);
        let t = Topology::new(vec![(0.0, 0.0), (1000.0, 0.0), (2000.0, 0.0)], &[]).unwrap();
        let out = plan_exact(&t, &cm, &rrm, &ExactOptions::default()).unwrap();
        let links: Vec<_> = out.plan.links().collect();
        assert_eq!(
            links,
            vec![(0, 1, LinkKind::Hybrid), (1, 2, LinkKind::Hybrid)]
        );
        assert_eq!(out.cost, 20_000.0);
        let (oracle_cost, oracle_plan) = exhaustive(&t, &cm, &rrm, false).unwrap();
        assert_eq!(oracle_cost, 20_000.0);
        assert_eq!(oracle_plan, out.plan);
    }

    #[test]
    fn single_node_is_infeasible() {
        let (cm, rrm) = models(10_000.0);
        let t = Topology::new(vec![(0.0, 0.0)], &[]).unwrap();
        assert!(matches!(
            plan_exact(&t, &cm, &rrm, &ExactOptions::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn refuses_large_instances_without_budget() {
        let (cm, rrm) = models(10_000.0);
        let coords: Vec<(f64, f64)> = (0..10)
            .map(|i| (i as f64 * 300.0, (i % 3) as f64 * 200.0))
            .collect();
        let t = Topology::new(coords, &[]).unwrap();
        assert!(matches!(
            plan_exact(&t, &cm, &rrm, &ExactOptions::default()),
            Err(Error::Precondition(_))
        ));
        let out = plan_exact(
            &t,
            &cm,
            &rrm,
            &ExactOptions {
                budget: Some(500),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!out.optimal);
        assert!(check_feasible(&t, &out.plan, &cm, &rrm).all_pass());
    }

    #[test]
    fn ternary_codes() {
        let t = Topology::new(vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], &[(0, 2)]).unwrap();
        let mut p = Plan::from_predeployed(&t);
        p.set(0, 1, LinkKind::Hybrid);
        let a = TernaryAssignment::from_plan(&t, &p);
        assert_eq!(a.free_pairs, vec![(0, 1), (1, 2)]);
        assert_eq!(a.codes(), vec![2, 0]);
        assert_eq!(a.to_plan(&t), p);
    }

    fn random_topology(rng: &mut impl Rng, m: usize) -> Topology {
        let coords: Vec<(f64, f64)> = (0..m)
            .map(|_| (rng.random_range(0.0..5000.0), rng.random_range(0.0..5000.0)))
            .collect();
        let mut pairs = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                if rng.random_bool(0.2) {
                    pairs.push((i, j));
                }
            }
        }
        Topology::new(coords, &pairs).unwrap()
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 40 {
            let m = rng.random_range(2..=5);
            let t = random_topology(&mut rng, m);
            if TernaryAssignment::free_pairs(&t).len() > 8 {
                continue;
            }
            checked += 1;
            let hybrid = [5_000.0, 10_000.0, 20_000.0, 40_000.0][checked % 4];
            let (cm, rrm) = models(hybrid);
            let (oracle_cost, oracle_plan) = exhaustive(&t, &cm, &rrm, false).unwrap();
            for strong_bound in [false, true] {
                let opts = ExactOptions {
                    strong_bound,
                    ..Default::default()
                };
                let out = plan_exact(&t, &cm, &rrm, &opts).unwrap();
                assert_eq!(out.cost, oracle_cost);
                assert_eq!(out.plan, oracle_plan);
                assert!(check_feasible(&t, &out.plan, &cm, &rrm).all_pass());
                assert!(out.cost <= plan_of_only(&t, &cm).cost(&t, &cm));
            }
            let relaxed = plan_exact(
                &t,
                &cm,
                &rrm,
                &ExactOptions {
                    relax_reliability: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(relaxed.cost <= oracle_cost);
            assert_eq!(relaxed.cost, exhaustive(&t, &cm, &rrm, true).unwrap().0);
        }
    }
}
