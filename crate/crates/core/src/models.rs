//! Link cost, rate, and reliability as functions of distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{LinkKind, Topology};

/// Price of a hybrid RF/FSO link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HybridCost {
    /// Transceiver-dominated, independent of distance.
    Constant(f64),
    /// `fixed + per_meter * d`.
    Linear { fixed: f64, per_meter: f64 },
}

impl HybridCost {
    pub fn at(&self, d: f64) -> f64 {
        match *self {
            HybridCost::Constant(c) => c,
            HybridCost::Linear { fixed, per_meter } => fixed + per_meter * d,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, HybridCost::Constant(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostModel {
    of_per_meter: f64,
    hybrid: HybridCost,
}

impl CostModel {
    pub fn new(of_per_meter: f64, hybrid: HybridCost) -> Result<Self> {
        if !(of_per_meter.is_finite() && of_per_meter > 0.0) {
            return Err(Error::InvalidModel(format!(
                "fiber price must be positive, got {of_per_meter}"
            )));
        }
        let ok = match hybrid {
            HybridCost::Constant(c) => c.is_finite() && c > 0.0,
            HybridCost::Linear { fixed, per_meter } => {
                fixed.is_finite()
                    && per_meter.is_finite()
                    && fixed >= 0.0
                    && per_meter >= 0.0
                    && fixed + per_meter > 0.0
            }
        };
        if !ok {
            return Err(Error::InvalidModel(format!(
                "hybrid price must be positive, got {hybrid:?}"
            )));
        }
        Ok(Self {
            of_per_meter,
            hybrid,
        })
    }

    pub fn of_per_meter(&self) -> f64 {
        self.of_per_meter
    }

    pub fn hybrid(&self) -> HybridCost {
        self.hybrid
    }

    pub fn with_hybrid(self, hybrid: HybridCost) -> Result<Self> {
        Self::new(self.of_per_meter, hybrid)
    }

    pub fn of_cost(&self, d: f64) -> f64 {
        self.of_per_meter * d
    }

    pub fn hybrid_cost(&self, d: f64) -> f64 {
        self.hybrid.at(d)
    }

    /// Cost of a link of the given kind. `None` costs nothing.
    pub(crate) fn cost(&self, kind: LinkKind, d: f64) -> f64 {
        match kind {
            LinkKind::None => 0.0,
            LinkKind::Of => self.of_cost(d),
            LinkKind::Hybrid => self.hybrid_cost(d),
        }
    }

    /// Price in dollars of building one link over `d` meters.
    pub fn link_cost(&self, kind: LinkKind, d: f64) -> Result<f64> {
        if kind == LinkKind::None {
            return Err(Error::Precondition(
                "link_cost needs a link kind, got none".into(),
            ));
        }
        if d.is_nan() || d <= 0.0 {
            return Err(Error::Precondition(format!(
                "link length must be positive, got {d}"
            )));
        }
        Ok(self.cost(kind, d))
    }
}

/// Distance model for hybrid link rate and reliability.
///
/// Both quantities hold a plateau up to a cutoff distance and then decay as
/// `exp(-(d - cutoff) / decay)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateReliabilityModel {
    target_rate: f64,
    rate_plateau_m: f64,
    alpha: f64,
    reliability_plateau_m: f64,
    plateau_reliability: f64,
    decay_m: f64,
}

impl RateReliabilityModel {
    /// Plateau reliability defaults to `alpha`.
    pub fn new(
        target_rate: f64,
        rate_plateau_m: f64,
        alpha: f64,
        reliability_plateau_m: f64,
        decay_m: f64,
    ) -> Result<Self> {
        Self::with_plateau(
            target_rate,
            rate_plateau_m,
            alpha,
            reliability_plateau_m,
            decay_m,
            alpha,
        )
    }

    pub fn with_plateau(
        target_rate: f64,
        rate_plateau_m: f64,
        alpha: f64,
        reliability_plateau_m: f64,
        decay_m: f64,
        plateau_reliability: f64,
    ) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("target rate", target_rate)?;
        positive("rate plateau distance", rate_plateau_m)?;
        positive("reliability plateau distance", reliability_plateau_m)?;
        positive("decay length", decay_m)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidModel(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        if !(plateau_reliability > 0.0 && plateau_reliability < 1.0) {
            return Err(Error::InvalidModel(format!(
                "plateau reliability must lie in (0,1), got {plateau_reliability}"
            )));
        }
        Ok(Self {
            target_rate,
            rate_plateau_m,
            alpha,
            reliability_plateau_m,
            plateau_reliability,
            decay_m,
        })
    }

    pub fn target_rate(&self) -> f64 {
        self.target_rate
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rate_plateau_m(&self) -> f64 {
        self.rate_plateau_m
    }

    pub fn reliability_plateau_m(&self) -> f64 {
        self.reliability_plateau_m
    }

    pub fn plateau_reliability(&self) -> f64 {
        self.plateau_reliability
    }

    pub fn decay_m(&self) -> f64 {
        self.decay_m
    }

    /// Rate in the units of the target rate.
    pub fn hybrid_rate(&self, d: f64) -> f64 {
        debug_assert!(d > 0.0);
        if d < self.rate_plateau_m {
            self.target_rate
        } else {
            self.target_rate * (-(d - self.rate_plateau_m) / self.decay_m).exp()
        }
    }

    pub fn hybrid_reliability(&self, d: f64) -> f64 {
        debug_assert!(d > 0.0);
        if d < self.reliability_plateau_m {
            self.plateau_reliability
        } else {
            self.plateau_reliability * (-(d - self.reliability_plateau_m) / self.decay_m).exp()
        }
    }
}

/// Scalar parameters as they appear in config files. Distances in km.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(default = "defaults::of_per_meter")]
    pub of_per_meter: f64,
    #[serde(default = "defaults::hybrid_cost")]
    pub hybrid_cost: HybridCost,
    #[serde(default = "defaults::target_rate")]
    pub target_rate: f64,
    #[serde(rename = "d_D_km", default = "defaults::d_d_km")]
    pub d_d_km: f64,
    #[serde(rename = "d_R_km", default = "defaults::d_r_km")]
    pub d_r_km: f64,
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    #[serde(default = "defaults::decay_km")]
    pub decay_km: f64,
    /// Hybrid reliability inside `d_R`; `alpha` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reliability_plateau: Option<f64>,
}

mod defaults {
    use super::HybridCost;

    pub fn of_per_meter() -> f64 {
        13.5
    }
    pub fn hybrid_cost() -> HybridCost {
        HybridCost::Constant(10_000.0)
    }
    pub fn target_rate() -> f64 {
        1000.0
    }
    pub fn d_d_km() -> f64 {
        3.0
    }
    pub fn d_r_km() -> f64 {
        2.0
    }
    pub fn alpha() -> f64 {
        0.9
    }
    pub fn decay_km() -> f64 {
        1.0
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            of_per_meter: defaults::of_per_meter(),
            hybrid_cost: defaults::hybrid_cost(),
            target_rate: defaults::target_rate(),
            d_d_km: defaults::d_d_km(),
            d_r_km: defaults::d_r_km(),
            alpha: defaults::alpha(),
            decay_km: defaults::decay_km(),
            reliability_plateau: None,
        }
    }
}

impl ModelParams {
    pub fn build(&self) -> Result<LinkModels> {
        let cost = CostModel::new(self.of_per_meter, self.hybrid_cost)?;
        let radio = RateReliabilityModel::with_plateau(
            self.target_rate,
            self.d_d_km * 1000.0,
            self.alpha,
            self.d_r_km * 1000.0,
            self.decay_km * 1000.0,
            self.reliability_plateau.unwrap_or(self.alpha),
        )?;
        Ok(LinkModels { cost, radio })
    }
}

/// Cost model plus rate/reliability model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkModels {
    pub cost: CostModel,
    pub radio: RateReliabilityModel,
}

/// Pairwise distances and model evaluations for one instance, row-major.
#[derive(Clone, Debug)]
pub struct LinkTable {
    m: usize,
    dist: Vec<f64>,
    of_cost: Vec<f64>,
    hybrid_cost: Vec<f64>,
    rate: Vec<f64>,
    reliability: Vec<f64>,
    predeployed: Vec<bool>,
}

impl LinkTable {
    pub fn new(t: &Topology, cm: &CostModel, rrm: &RateReliabilityModel) -> Self {
        let m = t.len();
        let mut table = Self {
            m,
            dist: vec![0.0; m * m],
            of_cost: vec![0.0; m * m],
            hybrid_cost: vec![0.0; m * m],
            rate: vec![0.0; m * m],
            reliability: vec![0.0; m * m],
            predeployed: vec![false; m * m],
        };
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let k = i * m + j;
                let d = t.dist(i, j);
                table.dist[k] = d;
                table.of_cost[k] = cm.of_cost(d);
                table.hybrid_cost[k] = cm.hybrid_cost(d);
                table.rate[k] = rrm.hybrid_rate(d);
                table.reliability[k] = rrm.hybrid_reliability(d);
                table.predeployed[k] = t.is_predeployed(i, j);
            }
        }
        table
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.m + j]
    }

    pub fn of_cost(&self, i: usize, j: usize) -> f64 {
        self.of_cost[i * self.m + j]
    }

    pub fn hybrid_cost(&self, i: usize, j: usize) -> f64 {
        self.hybrid_cost[i * self.m + j]
    }

    pub fn hybrid_rate(&self, i: usize, j: usize) -> f64 {
        self.rate[i * self.m + j]
    }

    pub fn hybrid_reliability(&self, i: usize, j: usize) -> f64 {
        self.reliability[i * self.m + j]
    }

    pub fn is_predeployed(&self, i: usize, j: usize) -> bool {
        self.predeployed[i * self.m + j]
    }

    /// What building `kind` on `(i, j)` adds to the plan cost.
    pub fn added_cost(&self, i: usize, j: usize, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::None => 0.0,
            LinkKind::Of if self.is_predeployed(i, j) => 0.0,
            LinkKind::Of => self.of_cost(i, j),
            LinkKind::Hybrid => self.hybrid_cost(i, j),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn radio(d_d_km: f64, d_r_km: f64, alpha: f64) -> RateReliabilityModel {
        RateReliabilityModel::new(100.0, d_d_km * 1e3, alpha, d_r_km * 1e3, 1e3).unwrap()
    }

    #[test]
    fn link_costs_at_reference_prices() {
        let cm = CostModel::new(13.5, HybridCost::Constant(10_000.0)).unwrap();
        assert_eq!(cm.link_cost(LinkKind::Of, 1000.0).unwrap(), 13_500.0);
        assert_eq!(cm.link_cost(LinkKind::Of, 2000.0).unwrap(), 27_000.0);
        assert_eq!(cm.link_cost(LinkKind::Hybrid, 1.0).unwrap(), 10_000.0);
        assert_eq!(cm.link_cost(LinkKind::Hybrid, 4800.0).unwrap(), 10_000.0);
        assert!(cm.link_cost(LinkKind::None, 10.0).is_err());
        assert!(cm.link_cost(LinkKind::Of, 0.0).is_err());
    }

    #[test]
    fn linear_hybrid_cost() {
        let cm = CostModel::new(
            13.5,
            HybridCost::Linear {
                fixed: 1000.0,
                per_meter: 2.0,
            },
        )
        .unwrap();
        assert_eq!(cm.link_cost(LinkKind::Hybrid, 500.0).unwrap(), 2000.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CostModel::new(0.0, HybridCost::Constant(1.0)).is_err());
        assert!(CostModel::new(1.0, HybridCost::Constant(-1.0)).is_err());
        assert!(RateReliabilityModel::new(1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(RateReliabilityModel::new(1.0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(RateReliabilityModel::new(0.0, 1.0, 0.5, 1.0, 1.0).is_err());
        assert!(RateReliabilityModel::new(1.0, -1.0, 0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn rate_plateau_and_decay() {
        let m = radio(3.0, 2.0, 0.9);
        assert_eq!(m.hybrid_rate(2000.0), 100.0);
        assert_eq!(m.hybrid_rate(3000.0), 100.0);
        assert!((m.hybrid_rate(4000.0) - 100.0 * (-1.0f64).exp()).abs() < 1e-12);
        assert!((m.hybrid_rate(4000.0) / 100.0 - 0.3679).abs() < 1e-4);
    }

    #[test]
    fn reliability_plateau_and_decay() {
        let m = radio(3.0, 2.0, 0.9);
        assert_eq!(m.hybrid_reliability(1000.0), 0.9);
        assert_eq!(m.hybrid_reliability(2000.0), 0.9);
        assert!((m.hybrid_reliability(3000.0) - 0.9 * (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn params_parse_with_defaults() {
        let p: ModelParams =
            serde_json::from_str(r#"{"hybrid_cost": 20000, "d_R_km": 4}"#).unwrap();
        assert_eq!(p.hybrid_cost, HybridCost::Constant(20_000.0));
        assert_eq!(p.d_r_km, 4.0);
        assert_eq!(p.of_per_meter, 13.5);
        let lm = p.build().unwrap();
        assert_eq!(lm.radio.reliability_plateau_m(), 4000.0);
        let p: ModelParams =
            serde_json::from_str(r#"{"hybrid_cost": {"fixed": 5000, "per_meter": 1.5}}"#).unwrap();
        assert!(!p.hybrid_cost.is_constant());
        assert!(serde_json::from_str::<ModelParams>(r#"{"bogus": 1}"#).is_err());
    }

    proptest! {
        #[test]
        fn decays_are_monotone(
            d_d in 0.5f64..5.0, d_r in 0.5f64..5.0, alpha in 0.01f64..0.99,
            mut ds in prop::collection::vec(1.0f64..20_000.0, 2..20),
        ) {
            let m = radio(d_d, d_r, alpha);
            ds.sort_by(f64::total_cmp);
            for w in ds.windows(2) {
                prop_assert!(m.hybrid_rate(w[1]) <= m.hybrid_rate(w[0]));
                prop_assert!(m.hybrid_reliability(w[1]) <= m.hybrid_reliability(w[0]));
            }
            for &d in &ds {
                let r = m.hybrid_reliability(d);
                prop_assert!(r > 0.0 && r < 1.0);
            }
        }

        #[test]
        fn fiber_cost_is_linear_and_increasing(price in 0.1f64..100.0, a in 1.0f64..1e4, b in 1.0f64..1e4) {
            let cm = CostModel::new(price, HybridCost::Constant(1.0)).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi > lo);
            let (clo, chi) = (cm.link_cost(LinkKind::Of, lo).unwrap(), cm.link_cost(LinkKind::Of, hi).unwrap());
            prop_assert!(chi > clo);
            prop_assert!((cm.link_cost(LinkKind::Of, lo + hi).unwrap() - (clo + chi)).abs() <= 1e-9 * (clo + chi));
        }
    }
}
