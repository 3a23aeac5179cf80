//! Node geometry, pre-deployed fiber, and the plan representation shared by
//! every planner.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::CostModel;

/// Planar position in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// On-disk layout of a [`Topology`].
#[derive(Clone, Debug, Serialize, Deserialize)]
struct TopologyFile {
    nodes: Vec<Point>,
    #[serde(default)]
    predeployed: Vec<[usize; 2]>,
}

/// Base stations and the symmetric pre-deployed fiber adjacency.
///
/// Immutable once built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TopologyFile", into = "TopologyFile")]
pub struct Topology {
    nodes: Vec<Point>,
    predeployed: Vec<bool>,
}

impl TryFrom<TopologyFile> for Topology {
    type Error = Error;

    fn try_from(file: TopologyFile) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = file.predeployed.iter().map(|&[i, j]| (i, j)).collect();
        Topology::new(file.nodes, &pairs)
    }
}

impl From<Topology> for TopologyFile {
    fn from(t: Topology) -> Self {
        let predeployed = t.predeployed_pairs().map(|(i, j)| [i, j]).collect();
        TopologyFile {
            nodes: t.nodes,
            predeployed,
        }
    }
}

impl Topology {
    /// Validates coordinates and symmetrizes the pre-deployed pairs.
    pub fn new<P: Into<Point>>(
        coords: Vec<P>,
        predeployed_pairs: &[(usize, usize)],
    ) -> Result<Self> {
        let nodes: Vec<Point> = coords.into_iter().map(Into::into).collect();
        let m = nodes.len();
        if m == 0 {
            return Err(Error::EmptyTopology);
        }
        for (i, p) in nodes.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::NonFiniteCoordinate(i));
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                if nodes[i] == nodes[j] {
                    return Err(Error::DuplicateCoordinates(i, j));
                }
            }
        }
        let mut predeployed = vec![false; m * m];
        for &(i, j) in predeployed_pairs {
            for index in [i, j] {
                if index >= m {
                    return Err(Error::IndexOutOfRange { index, nodes: m });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            predeployed[i * m + j] = true;
            predeployed[j * m + i] = true;
        }
        Ok(Self { nodes, predeployed })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn is_predeployed(&self, i: usize, j: usize) -> bool {
        self.predeployed[i * self.len() + j]
    }

    /// Pre-deployed pairs with `i < j`, in lexicographic order.
    pub fn predeployed_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.len();
        (0..m)
            .flat_map(move |i| (i + 1..m).map(move |j| (i, j)))
            .filter(|&(i, j)| self.is_predeployed(i, j))
    }

    pub fn predeployed_count(&self) -> usize {
        self.predeployed_pairs().count()
    }

    /// Euclidean distance in meters between two distinct nodes.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        let m = self.len();
        for index in [i, j] {
            if index >= m {
                return Err(Error::IndexOutOfRange { index, nodes: m });
            }
        }
        if i == j {
            return Err(Error::Precondition(format!(
                "distance needs two distinct nodes, got {i} twice"
            )));
        }
        Ok(self.dist(i, j))
    }

    pub(crate) fn dist(&self, i: usize, j: usize) -> f64 {
        self.nodes[i].distance(&self.nodes[j])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("topology serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    #[default]
    None,
    Of,
    Hybrid,
}

impl LinkKind {
    pub const ALL: [LinkKind; 3] = [LinkKind::None, LinkKind::Of, LinkKind::Hybrid];

    pub fn is_link(self) -> bool {
        self != LinkKind::None
    }

    /// Ternary code: 0 none, 1 fiber, 2 hybrid.
    pub fn code(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            LinkKind::None => "none",
            LinkKind::Of => "of",
            LinkKind::Hybrid => "hybrid",
        })
    }
}

/// Symmetric per-pair link assignment.
///
/// One enum per pair means a pair can never carry fiber and hybrid at once.
/// Symmetry and the empty diagonal are checked on construction; coverage of
/// the pre-deployed links is checked by [`Plan::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Plan {
    m: usize,
    links: Vec<LinkKind>,
}

impl Plan {
    pub fn empty(m: usize) -> Self {
        Self {
            m,
            links: vec![LinkKind::None; m * m],
        }
    }

    /// Builds a plan from a full matrix, rejecting asymmetry and self-links.
    pub fn from_matrix(matrix: &[Vec<LinkKind>]) -> Result<Self> {
        let m = matrix.len();
        let mut plan = Self::empty(m);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidPlan(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            if row[i] != LinkKind::None {
                return Err(Error::InvalidPlan(format!(
                    "diagonal entry ({i},{i}) is {}",
                    row[i]
                )));
            }
            for (j, &kind) in row.iter().enumerate() {
                if matrix[j][i] != kind {
                    return Err(Error::InvalidPlan(format!(
                        "asymmetric pair ({i},{j}): {kind} vs {}",
                        matrix[j][i]
                    )));
                }
                plan.links[i * m + j] = kind;
            }
        }
        Ok(plan)
    }

    pub fn to_matrix(&self) -> Vec<Vec<LinkKind>> {
        self.links
            .chunks(self.m.max(1))
            .take(self.m)
            .map(<[LinkKind]>::to_vec)
            .collect()
    }

    /// Plan holding exactly the pre-deployed links.
    pub fn from_predeployed(t: &Topology) -> Self {
        let mut plan = Self::empty(t.len());
        for (i, j) in t.predeployed_pairs() {
            plan.set(i, j, LinkKind::Of);
        }
        plan
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn kind(&self, i: usize, j: usize) -> LinkKind {
        self.links[i * self.m + j]
    }

    /// Sets both directions of a pair.
    ///
    /// # Panics
    /// If `i == j` or either index is out of range.
    pub fn set(&mut self, i: usize, j: usize, kind: LinkKind) {
        assert!(i != j, "self-link on node {i}");
        assert!(i < self.m && j < self.m, "pair ({i},{j}) out of range");
        self.links[i * self.m + j] = kind;
        self.links[j * self.m + i] = kind;
    }

    /// Links with `i < j`, in lexicographic pair order.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize, LinkKind)> + '_ {
        let m = self.m;
        (0..m)
            .flat_map(move |i| (i + 1..m).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.kind(i, j)))
            .filter(|&(_, _, k)| k.is_link())
    }

    pub fn count(&self, kind: LinkKind) -> usize {
        self.links().filter(|&(_, _, k)| k == kind).count()
    }

    pub fn link_count(&self) -> usize {
        self.links().count()
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.m).filter(|&j| self.kind(i, j).is_link()).count()
    }

    /// Checks all structural invariants against the topology.
    pub fn validate(&self, t: &Topology) -> Result<()> {
        if self.m != t.len() {
            return Err(Error::InvalidPlan(format!(
                "plan covers {} nodes, topology has {}",
                self.m,
                t.len()
            )));
        }
        for i in 0..self.m {
            if self.kind(i, i) != LinkKind::None {
                return Err(Error::InvalidPlan(format!(
                    "diagonal entry ({i},{i}) is set"
                )));
            }
            for j in i + 1..self.m {
                if self.kind(i, j) != self.kind(j, i) {
                    return Err(Error::InvalidPlan(format!("asymmetric pair ({i},{j})")));
                }
                if t.is_predeployed(i, j) && self.kind(i, j) != LinkKind::Of {
                    return Err(Error::InvalidPlan(format!(
                        "pre-deployed pair ({i},{j}) is {}",
                        self.kind(i, j)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Cost of the links this plan adds; pre-deployed fiber is free.
    ///
    /// Summed over pairs in lexicographic order so that equal plans always
    /// produce bit-identical totals.
    pub fn cost(&self, t: &Topology, cm: &CostModel) -> f64 {
        let mut total = 0.0;
        for (i, j, kind) in self.links() {
            if kind == LinkKind::Of && t.is_predeployed(i, j) {
                continue;
            }
            total += cm.cost(kind, t.dist(i, j));
        }
        total
    }

    pub fn export(&self, t: &Topology, cm: &CostModel) -> PlanExport {
        PlanExport {
            links: self
                .links()
                .map(|(i, j, kind)| LinkRecord { i, j, kind })
                .collect(),
            total_cost: self.cost(t, cm),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub i: usize,
    pub j: usize,
    pub kind: LinkKind,
}

/// Serialized plan: one record per link plus the added cost in dollars.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanExport {
    pub links: Vec<LinkRecord>,
    pub total_cost: f64,
}

impl PlanExport {
    pub fn to_plan(&self, m: usize) -> Result<Plan> {
        let mut plan = Plan::empty(m);
        for rec in &self.links {
            for index in [rec.i, rec.j] {
                if index >= m {
                    return Err(Error::IndexOutOfRange { index, nodes: m });
                }
            }
            if rec.i == rec.j {
                return Err(Error::SelfLoop(rec.i));
            }
            plan.set(rec.i, rec.j, rec.kind);
        }
        Ok(plan)
    }
}
