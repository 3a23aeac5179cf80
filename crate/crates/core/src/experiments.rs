//! Random scenarios and Monte-Carlo sweeps over the three planners.
//!
//! Trial `k` of every grid cell uses seed `base_seed + k` for all methods, so
//! per-trial comparisons between planners are paired.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{plan_hybrid, HybridOptions, NeighborPolicy, DEFAULT_MAX_NEIGHBORS};
use crate::error::{Error, Result};
use crate::exact::{plan_exact, ExactOptions, DEFAULT_MAX_FREE_PAIRS};
use crate::models::{HybridCost, LinkModels, ModelParams};
use crate::of_planner::plan_of_only;
use crate::topology::{LinkKind, Plan, Topology};

/// Random placement parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(default = "default_area_km")]
    pub area_km: f64,
    #[serde(default = "default_ratio")]
    pub predeploy_ratio: f64,
}

fn default_area_km() -> f64 {
    5.0
}

fn default_ratio() -> f64 {
    0.2
}

impl ScenarioSpec {
    pub fn new(m: usize, seed: u64) -> Self {
        Self {
            seed,
            m,
            area_km: default_area_km(),
            predeploy_ratio: default_ratio(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::Config(format!(
                "scenario needs M >= 2, got {}",
                self.m
            )));
        }
        if !(self.area_km.is_finite() && self.area_km > 0.0) {
            return Err(Error::Config(format!(
                "area_km must be positive, got {}",
                self.area_km
            )));
        }
        if !(0.0..1.0).contains(&self.predeploy_ratio) {
            return Err(Error::Config(format!(
                "predeploy_ratio must lie in [0,1), got {}",
                self.predeploy_ratio
            )));
        }
        Ok(())
    }

    /// Number of pre-deployed links: floor(ratio * M(M-1)/2).
    pub fn predeployed_links(&self) -> usize {
        let pairs = self.m * (self.m - 1) / 2;
        (self.predeploy_ratio * pairs as f64 + 1e-9).floor() as usize
    }

    /// Parses `M=7,seed=1[,area_km=5][,ratio=0.2]`.
    pub fn parse_inline(s: &str) -> Result<Self> {
        let mut spec = ScenarioSpec::new(0, 0);
        let mut have_m = false;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got {part:?}")))?;
            let bad = || Error::Config(format!("bad value for {key}: {value:?}"));
            match key {
                "M" | "m" => {
                    spec.m = value.parse().map_err(|_| bad())?;
                    have_m = true;
                }
                "seed" => spec.seed = value.parse().map_err(|_| bad())?,
                "area_km" => spec.area_km = value.parse().map_err(|_| bad())?,
                "ratio" | "predeploy_ratio" => {
                    spec.predeploy_ratio = value.parse().map_err(|_| bad())?
                }
                _ => return Err(Error::Config(format!("unknown scenario key {key:?}"))),
            }
        }
        if !have_m {
            return Err(Error::Config("scenario needs M=<nodes>".into()));
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Uniform node placement on the square plus uniformly chosen pre-deployed
/// pairs, fully determined by the seed.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Topology> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let side = spec.area_km * 1000.0;
    let mut coords: Vec<(f64, f64)> = Vec::with_capacity(spec.m);
    while coords.len() < spec.m {
        let p = (rng.random_range(0.0..side), rng.random_range(0.0..side));
        if !coords.contains(&p) {
            coords.push(p);
        }
    }
    let all_pairs: Vec<(usize, usize)> = (0..spec.m)
        .flat_map(|i| (i + 1..spec.m).map(move |j| (i, j)))
        .collect();
    let mut picked: Vec<usize> =
        sample(&mut rng, all_pairs.len(), spec.predeployed_links()).into_vec();
    picked.sort_unstable();
    let pairs: Vec<(usize, usize)> = picked.into_iter().map(|k| all_pairs[k]).collect();
    Topology::new(coords, &pairs)
}

/// Share of fiber among the plan's links, in percent.
pub fn percent_of_links(t: &Topology, p: &Plan, exclude_predeployed: bool) -> Result<f64> {
    let counted = |i: usize, j: usize| !(exclude_predeployed && t.is_predeployed(i, j));
    let of = p
        .links()
        .filter(|&(i, j, k)| k == LinkKind::Of && counted(i, j))
        .count();
    let hybrid = p.count(LinkKind::Hybrid);
    if of + hybrid == 0 {
        return Err(Error::Precondition("plan has no links to classify".into()));
    }
    Ok(100.0 * of as f64 / (of + hybrid) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    OfOnly,
    Hybrid,
    Exact,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::OfOnly, Method::Hybrid, Method::Exact];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Method::OfOnly => "of_only",
            Method::Hybrid => "hybrid",
            Method::Exact => "exact",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    M,
    #[serde(rename = "hybrid_cost")]
    HybridCost,
    #[serde(rename = "d_D")]
    RatePlateau,
    #[serde(rename = "d_R")]
    ReliabilityPlateau,
    #[serde(rename = "alpha")]
    Alpha,
}

/// Placement defaults shared by every trial; the seed comes from the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDefaults {
    #[serde(rename = "M", default = "default_m")]
    pub m: usize,
    #[serde(default = "default_area_km")]
    pub area_km: f64,
    #[serde(default = "default_ratio")]
    pub predeploy_ratio: f64,
}

fn default_m() -> usize {
    7
}

impl Default for ScenarioDefaults {
    fn default() -> Self {
        Self {
            m: default_m(),
            area_km: default_area_km(),
            predeploy_ratio: default_ratio(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_exact_max_m")]
    pub exact_max_m: usize,
    #[serde(default)]
    pub exact_budget: Option<u64>,
    #[serde(default = "default_true")]
    pub exact_strong_bound: bool,
    #[serde(default)]
    pub neighbor_policy: NeighborPolicy,
    #[serde(default = "default_max_neighbors")]
    pub max_neighbors: usize,
    #[serde(default)]
    pub exclude_predeployed: bool,
    /// Fill `wall_ms`; off keeps the CSV byte-reproducible.
    #[serde(default)]
    pub record_timing: bool,
}

fn default_trials() -> usize {
    100
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_exact_max_m() -> usize {
    7
}

fn default_true() -> bool {
    true
}

fn default_max_neighbors() -> usize {
    DEFAULT_MAX_NEIGHBORS
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, grid: Vec<f64>) -> Self {
        Self {
            variable,
            grid,
            trials: default_trials(),
            methods: default_methods(),
            base_seed: 0,
            exact_max_m: default_exact_max_m(),
            exact_budget: None,
            exact_strong_bound: true,
            neighbor_policy: NeighborPolicy::default(),
            max_neighbors: DEFAULT_MAX_NEIGHBORS,
            exclude_predeployed: false,
            record_timing: false,
        }
    }
}

/// Everything one sweep needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub scenario: ScenarioDefaults,
    #[serde(default)]
    pub models: ModelParams,
    pub sweep: SweepSpec,
}

impl ExperimentConfig {
    /// Scenario placement and models with the swept variable set to `x`.
    pub fn at(&self, x: f64) -> Result<(ScenarioDefaults, LinkModels)> {
        let mut scenario = self.scenario;
        let mut params = self.models;
        match self.sweep.variable {
            SweepVariable::M => {
                if x.fract() != 0.0 || x < 2.0 {
                    return Err(Error::Config(format!(
                        "M grid values must be integers >= 2, got {x}"
                    )));
                }
                scenario.m = x as usize;
            }
            SweepVariable::HybridCost => params.hybrid_cost = HybridCost::Constant(x),
            SweepVariable::RatePlateau => params.d_d_km = x,
            SweepVariable::ReliabilityPlateau => params.d_r_km = x,
            SweepVariable::Alpha => params.alpha = x,
        }
        Ok((scenario, params.build()?))
    }

    pub fn validate(&self) -> Result<()> {
        let sweep = &self.sweep;
        if sweep.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if sweep.trials == 0 {
            return Err(Error::Config("sweep needs at least one trial".into()));
        }
        if sweep.methods.is_empty() {
            return Err(Error::Config("sweep needs at least one method".into()));
        }
        for &x in &sweep.grid {
            let (scenario, _) = self.at(x)?;
            ScenarioSpec {
                seed: 0,
                m: scenario.m,
                area_km: scenario.area_km,
                predeploy_ratio: scenario.predeploy_ratio,
            }
            .validate()?;
            if sweep.methods.contains(&Method::Exact)
                && scenario.m > sweep.exact_max_m
                && sweep.exact_budget.is_none()
            {
                return Err(Error::Config(format!(
                    "exact method limited to M <= {} without a budget, grid asks for M = {}",
                    sweep.exact_max_m, scenario.m
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One method's result on one trial.
#[derive(Clone, Debug)]
pub enum MethodOutcome {
    Solved {
        plan: Plan,
        cost: f64,
        pct_of: Option<f64>,
        millis: f64,
    },
    /// Infeasible, over the neighbor cap, or out of budget.
    Failed { reason: String, millis: f64 },
}

impl MethodOutcome {
    pub fn cost(&self) -> Option<f64> {
        match self {
            MethodOutcome::Solved { cost, .. } => Some(*cost),
            MethodOutcome::Failed { .. } => None,
        }
    }

    pub fn pct_of(&self) -> Option<f64> {
        match self {
            MethodOutcome::Solved { pct_of, .. } => *pct_of,
            MethodOutcome::Failed { .. } => None,
        }
    }

    pub fn plan(&self) -> Option<&Plan> {
        match self {
            MethodOutcome::Solved { plan, .. } => Some(plan),
            MethodOutcome::Failed { .. } => None,
        }
    }

    fn millis(&self) -> f64 {
        match self {
            MethodOutcome::Solved { millis, .. } | MethodOutcome::Failed { millis, .. } => *millis,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub seed: u64,
    pub topology: Topology,
    /// In the order of `SweepSpec::methods`.
    pub outcomes: Vec<(Method, MethodOutcome)>,
}

impl TrialRecord {
    pub fn outcome(&self, method: Method) -> Option<&MethodOutcome> {
        self.outcomes
            .iter()
            .find(|(m, _)| *m == method)
            .map(|(_, o)| o)
    }
}

fn run_method(
    method: Method,
    t: &Topology,
    models: &LinkModels,
    sweep: &SweepSpec,
) -> MethodOutcome {
    let start = Instant::now();
    let result: Result<Plan> = match method {
        Method::OfOnly => Ok(plan_of_only(t, &models.cost)),
        Method::Hybrid => plan_hybrid(
            t,
            &models.cost,
            &models.radio,
            &HybridOptions {
                policy: sweep.neighbor_policy,
                max_neighbors: sweep.max_neighbors,
            },
        )
        .map(|o| o.plan),
        Method::Exact => {
            let opts = ExactOptions {
                budget: sweep.exact_budget,
                strong_bound: sweep.exact_strong_bound,
                relax_reliability: false,
                max_free_pairs: DEFAULT_MAX_FREE_PAIRS,
            };
            plan_exact(t, &models.cost, &models.radio, &opts).and_then(|o| {
                if o.optimal {
                    Ok(o.plan)
                } else {
                    Err(Error::BudgetExhausted(sweep.exact_budget.unwrap_or(0)))
                }
            })
        }
    };
    let millis = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(plan) => MethodOutcome::Solved {
            cost: plan.cost(t, &models.cost),
            pct_of: percent_of_links(t, &plan, sweep.exclude_predeployed).ok(),
            plan,
            millis,
        },
        Err(e) => MethodOutcome::Failed {
            reason: e.to_string(),
            millis,
        },
    }
}

/// Runs every trial of one grid cell, in parallel, returned in trial order.
pub fn run_trials(cfg: &ExperimentConfig, x: f64) -> Result<Vec<TrialRecord>> {
    let (scenario, models) = cfg.at(x)?;
    let sweep = &cfg.sweep;
    (0..sweep.trials as u64)
        .into_par_iter()
        .map(|k| {
            let seed = sweep.base_seed.wrapping_add(k);
            let topology = generate_scenario(&ScenarioSpec {
                seed,
                m: scenario.m,
                area_km: scenario.area_km,
                predeploy_ratio: scenario.predeploy_ratio,
            })?;
            let outcomes = sweep
                .methods
                .iter()
                .map(|&method| (method, run_method(method, &topology, &models, sweep)))
                .collect();
            Ok(TrialRecord {
                seed,
                topology,
                outcomes,
            })
        })
        .collect()
}

/// One CSV row: a grid value and a method.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub x: f64,
    pub method: Method,
    pub mean_cost_usd: f64,
    pub se_cost: f64,
    pub mean_pct_of: f64,
    /// Trials that produced a plan.
    pub trials: usize,
    /// Trials excluded from the means.
    pub infeasible: usize,
    pub wall_ms: f64,
}

/// Aggregates one method over a cell's trials, summing in trial order.
pub fn aggregate(
    x: f64,
    method: Method,
    records: &[TrialRecord],
    record_timing: bool,
) -> SweepResult {
    let outcomes: Vec<&MethodOutcome> = records.iter().filter_map(|r| r.outcome(method)).collect();
    let costs: Vec<f64> = outcomes.iter().filter_map(|o| o.cost()).collect();
    let pcts: Vec<f64> = outcomes.iter().filter_map(|o| o.pct_of()).collect();
    let n = costs.len();
    let mean = if n == 0 {
        f64::NAN
    } else {
        costs.iter().sum::<f64>() / n as f64
    };
    let se = if n < 2 {
        0.0
    } else {
        let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    let mean_pct = if pcts.is_empty() {
        f64::NAN
    } else {
        pcts.iter().sum::<f64>() / pcts.len() as f64
    };
    let wall_ms = if record_timing {
        outcomes.iter().map(|o| o.millis()).sum()
    } else {
        0.0
    };
    SweepResult {
        x,
        method,
        mean_cost_usd: mean,
        se_cost: se,
        mean_pct_of: mean_pct,
        trials: n,
        infeasible: outcomes.len() - n,
        wall_ms,
    }
}

/// Runs the whole sweep, one row per (grid value, method).
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepResult>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &x in &cfg.sweep.grid {
        let records = run_trials(cfg, x)?;
        for &method in &cfg.sweep.methods {
            rows.push(aggregate(x, method, &records, cfg.sweep.record_timing));
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "x,method,mean_cost_usd,se_cost,mean_pct_of,trials,infeasible,wall_ms";

pub fn write_csv<W: Write>(rows: &[SweepResult], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{:.4},{},{},{:.3}",
            r.x,
            r.method,
            r.mean_cost_usd,
            r.se_cost,
            r.mean_pct_of,
            r.trials,
            r.infeasible,
            r.wall_ms
        )?;
    }
    Ok(())
}

pub fn csv_string(rows: &[SweepResult]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}
