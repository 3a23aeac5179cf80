//! Exact constraint check of a plan against the full planning problem.

use serde::Serialize;

use crate::connectivity::{fiedler_value, is_connected, FIEDLER_EPS};
use crate::models::{CostModel, LinkTable, RateReliabilityModel};
use crate::topology::{LinkKind, Plan, Topology};

/// Slack allowed on the rate and reliability inequalities.
pub const CONSTRAINT_TOL: f64 = 1e-12;

pub(crate) fn rate_ok(rate: f64, target: f64) -> bool {
    rate >= target * (1.0 - CONSTRAINT_TOL)
}

/// `outage` is the product of per-link failure probabilities.
pub(crate) fn reliability_ok(outage: f64, alpha: f64) -> bool {
    1.0 - outage >= alpha - CONSTRAINT_TOL
}

/// Pass/fail per constraint, naming the offending nodes or pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    /// Asymmetric or self pairs; empty for any plan built through [`Plan`].
    pub structural_violations: Vec<(usize, usize)>,
    /// Pre-deployed pairs not carrying fiber.
    pub predeployed_violations: Vec<(usize, usize)>,
    /// Nodes whose summed rate falls short of the target.
    pub rate_violations: Vec<usize>,
    /// Nodes whose product-form reliability falls short of alpha.
    pub reliability_violations: Vec<usize>,
    pub connected: bool,
    /// Algebraic connectivity; absent for single-node plans.
    pub fiedler: Option<f64>,
}

impl FeasibilityReport {
    pub fn structural_ok(&self) -> bool {
        self.structural_violations.is_empty()
    }

    pub fn predeployed_ok(&self) -> bool {
        self.predeployed_violations.is_empty()
    }

    pub fn rate_ok(&self) -> bool {
        self.rate_violations.is_empty()
    }

    pub fn reliability_ok(&self) -> bool {
        self.reliability_violations.is_empty()
    }

    pub fn connectivity_ok(&self) -> bool {
        self.connected
    }

    pub fn all_pass(&self) -> bool {
        self.structural_ok()
            && self.predeployed_ok()
            && self.rate_ok()
            && self.reliability_ok()
            && self.connectivity_ok()
    }

    /// One line per failing constraint.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.structural_ok() {
            out.push(format!(
                "symmetry/exclusivity violated at {:?}",
                self.structural_violations
            ));
        }
        if !self.predeployed_ok() {
            out.push(format!(
                "pre-deployed fiber missing at {:?}",
                self.predeployed_violations
            ));
        }
        if !self.rate_ok() {
            out.push(format!(
                "rate below target at nodes {:?}",
                self.rate_violations
            ));
        }
        if !self.reliability_ok() {
            out.push(format!(
                "reliability below target at nodes {:?}",
                self.reliability_violations
            ));
        }
        if !self.connectivity_ok() {
            out.push(format!(
                "network disconnected (lambda2 = {:?})",
                self.fiedler
            ));
        }
        out
    }
}

/// Summed link rate at node `i`.
pub(crate) fn node_rate(table: &LinkTable, rrm: &RateReliabilityModel, p: &Plan, i: usize) -> f64 {
    (0..p.len())
        .map(|j| match p.kind(i, j) {
            LinkKind::None => 0.0,
            LinkKind::Of => rrm.target_rate(),
            LinkKind::Hybrid => table.hybrid_rate(i, j),
        })
        .sum()
}

/// Probability that every link at node `i` fails.
pub(crate) fn node_outage(
    table: &LinkTable,
    rrm: &RateReliabilityModel,
    p: &Plan,
    i: usize,
) -> f64 {
    (0..p.len())
        .map(|j| match p.kind(i, j) {
            LinkKind::None => 1.0,
            LinkKind::Of => 1.0 - rrm.alpha(),
            LinkKind::Hybrid => 1.0 - table.hybrid_reliability(i, j),
        })
        .product()
}

/// Evaluates every constraint of the original problem on `p`.
pub fn check_feasible(
    t: &Topology,
    p: &Plan,
    cm: &CostModel,
    rrm: &RateReliabilityModel,
) -> FeasibilityReport {
    let m = t.len().min(p.len());
    let table = LinkTable::new(t, cm, rrm);
    let mut report = FeasibilityReport {
        structural_violations: Vec::new(),
        predeployed_violations: Vec::new(),
        rate_violations: Vec::new(),
        reliability_violations: Vec::new(),
        connected: false,
        fiedler: None,
    };
    if t.len() != p.len() {
        report.structural_violations.push((t.len(), p.len()));
        return report;
    }
    for i in 0..m {
        if p.kind(i, i) != LinkKind::None {
            report.structural_violations.push((i, i));
        }
        for j in i + 1..m {
            if p.kind(i, j) != p.kind(j, i) {
                report.structural_violations.push((i, j));
            }
            if t.is_predeployed(i, j) && p.kind(i, j) != LinkKind::Of {
                report.predeployed_violations.push((i, j));
            }
        }
    }
    for i in 0..m {
        if !rate_ok(node_rate(&table, rrm, p, i), rrm.target_rate()) {
            report.rate_violations.push(i);
        }
        if !reliability_ok(node_outage(&table, rrm, p, i), rrm.alpha()) {
            report.reliability_violations.push(i);
        }
    }
    report.fiedler = fiedler_value(p).ok();
    let algebraic = report.fiedler.is_none_or(|l| l > FIEDLER_EPS);
    report.connected = algebraic && is_connected(p);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::HybridCost;

    fn models() -> (CostModel, RateReliabilityModel) {
        (
            CostModel::new(13.5, HybridCost::Constant(10_000.0)).unwrap(),
            RateReliabilityModel::new(100.0, 3000.0, 0.9, 2000.0, 1000.0).unwrap(),
        )
    }

    fn line(pre: &[(usize, usize)]) -> Topology {
        Topology::new(vec![(0.0, 0.0), (1000.0, 0.0), (2000.0, 0.0)], pre).unwrap()
    }

    #[test]
    fn missing_predeployed_link_is_named() {
        let (cm, rrm) = models();
        let t = line(&[(0, 1)]);
        let mut p = Plan::empty(3);
        p.set(0, 1, LinkKind::Hybrid);
        p.set(1, 2, LinkKind::Of);
        let r = check_feasible(&t, &p, &cm, &rrm);
        assert_eq!(r.predeployed_violations, vec![(0, 1)]);
        assert!(r.rate_ok() && r.reliability_ok() && r.connected);
        assert!(!r.all_pass());
    }

    #[test]
    fn isolated_node_fails_three_ways() {
        let (cm, rrm) = models();
        let t = line(&[]);
        let mut p = Plan::empty(3);
        p.set(0, 1, LinkKind::Of);
        let r = check_feasible(&t, &p, &cm, &rrm);
        assert_eq!(r.rate_violations, vec![2]);
        assert_eq!(r.reliability_violations, vec![2]);
        assert!(!r.connected);
        assert_eq!(r.failures().len(), 3);
    }

    #[test]
    fn fiber_meets_alpha_exactly() {
        let (cm, rrm) = models();
        let t = line(&[]);
        let mut p = Plan::empty(3);
        p.set(0, 1, LinkKind::Of);
        p.set(1, 2, LinkKind::Hybrid);
        assert!(check_feasible(&t, &p, &cm, &rrm).all_pass());
    }

    #[test]
    fn weak_hybrid_links_fail_reliability() {
        let (cm, rrm) = models();
        // 3.5 km apart: rate and reliability both decayed.
        let t = Topology::new(vec![(0.0, 0.0), (3500.0, 0.0)], &[]).unwrap();
        let mut p = Plan::empty(2);
        p.set(0, 1, LinkKind::Hybrid);
        let r = check_feasible(&t, &p, &cm, &rrm);
        assert_eq!(r.rate_violations, vec![0, 1]);
        assert_eq!(r.reliability_violations, vec![0, 1]);
        assert!(r.connected);
    }
}
