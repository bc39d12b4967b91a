//! Finite weighted point sets standing in for the housing, food and
//! population distributions, with exact expectations over them.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{NodeId, Point, RoadNetwork};
use crate::tables;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint {
    pub position: Point,
    pub weight: f64,
}

impl WeightedPoint {
    pub const fn unit(x: f64, y: f64) -> Self {
        WeightedPoint {
            position: Point::new(x, y),
            weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Housing,
    GoodFood,
    BadFood,
    Population,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 4] = [
        DistributionKind::Housing,
        DistributionKind::GoodFood,
        DistributionKind::BadFood,
        DistributionKind::Population,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistributionKind::Housing => "housing",
            DistributionKind::GoodFood => "good_food",
            DistributionKind::BadFood => "bad_food",
            DistributionKind::Population => "population",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialDistribution {
    kind: DistributionKind,
    points: Vec<WeightedPoint>,
    total_weight: f64,
    cumulative: Vec<f64>,
}

impl SpatialDistribution {
    pub fn new(kind: DistributionKind, points: Vec<WeightedPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config(format!("{} distribution has no points", kind.name())));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.weight >= 0.0 && p.weight.is_finite()) {
                return Err(Error::Config(format!(
                    "{} point {i} has invalid weight {}",
                    kind.name(),
                    p.weight
                )));
            }
            if !p.position.is_finite() {
                return Err(Error::Config(format!(
                    "{} point {i} has a non-finite position",
                    kind.name()
                )));
            }
        }
        let mut cumulative = Vec::with_capacity(points.len());
        let mut running = 0.0;
        for p in &points {
            running += p.weight;
            cumulative.push(running);
        }
        if running <= 0.0 {
            return Err(Error::Config(format!(
                "{} distribution has zero total weight",
                kind.name()
            )));
        }
        Ok(SpatialDistribution {
            kind,
            points,
            total_weight: running,
            cumulative,
        })
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn points(&self) -> &[WeightedPoint] {
        &self.points
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact weighted mean of `f` over the points.
    pub fn expectation<F: FnMut(&Point) -> f64>(&self, mut f: F) -> f64 {
        self.weighted_mean(self.points.iter().map(|p| f(&p.position)))
    }

    /// Weighted mean of precomputed per-point values, in point order.
    pub fn weighted_mean<I: IntoIterator<Item = f64>>(&self, values: I) -> f64 {
        let sum: f64 = self
            .points
            .iter()
            .zip(values)
            .map(|(p, v)| p.weight * v)
            .sum();
        sum / self.total_weight
    }

    /// Draws a point index with probability proportional to weight.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.total_weight;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        // zero-weight tails can leave idx past the last positive weight
        idx.min(self.points.len() - 1)
    }

    /// Returns a copy with `point` appended.
    pub fn with_point(&self, point: WeightedPoint) -> Result<Self> {
        let mut points = self.points.clone();
        points.push(point);
        Self::new(self.kind, points)
    }
}

/// Nearest node by Euclidean distance; ties go to the smallest id.
pub fn snap_to_node(network: &RoadNetwork, position: &Point) -> NodeId {
    let mut best = NodeId(0);
    let mut best_d = f64::INFINITY;
    for node in network.nodes() {
        let d = node.position.distance_squared(position);
        if d < best_d {
            best_d = d;
            best = node.id;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Bounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl From<[f64; 4]> for Bounds {
    fn from(b: [f64; 4]) -> Self {
        Bounds {
            min_x: b[0],
            min_y: b[1],
            max_x: b[2],
            max_y: b[3],
        }
    }
}

impl From<Bounds> for [f64; 4] {
    fn from(b: Bounds) -> Self {
        [b.min_x, b.min_y, b.max_x, b.max_y]
    }
}

impl Bounds {
    pub fn is_valid(&self) -> bool {
        [self.min_x, self.min_y, self.max_x, self.max_y]
            .iter()
            .all(|v| v.is_finite())
            && self.min_x < self.max_x
            && self.min_y < self.max_y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    UniformInBounds { bounds: Bounds, count: usize },
    GaussianCluster { center: Point, sigma: f64, count: usize },
    /// One unit-weight point per selected node. `nodes` lists them explicitly;
    /// otherwise `count` nodes are drawn without replacement, or all nodes
    /// when `count` is absent or equals the node count.
    AtNodes {
        nodes: Option<Vec<NodeId>>,
        count: Option<usize>,
    },
}

/// Discretizes a generator into a unit-weight point set, deterministically in `seed`.
pub fn generate(
    kind: DistributionKind,
    generator: &Generator,
    network: Option<&RoadNetwork>,
    seed: u64,
) -> Result<SpatialDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = match generator {
        Generator::UniformInBounds { bounds, count } => {
            if !bounds.is_valid() {
                return Err(Error::Config("bounds must be finite and ordered".into()));
            }
            if *count == 0 {
                return Err(Error::Config("count must be at least 1".into()));
            }
            (0..*count)
                .map(|_| {
                    WeightedPoint::unit(
                        rng.random_range(bounds.min_x..bounds.max_x),
                        rng.random_range(bounds.min_y..bounds.max_y),
                    )
                })
                .collect()
        }
        Generator::GaussianCluster {
            center,
            sigma,
            count,
        } => {
            if !(*sigma > 0.0 && sigma.is_finite()) || !center.is_finite() {
                return Err(Error::Config("cluster sigma must be positive and finite".into()));
            }
            if *count == 0 {
                return Err(Error::Config("count must be at least 1".into()));
            }
            let nx = Normal::new(center.x, *sigma).map_err(|e| Error::Config(e.to_string()))?;
            let ny = Normal::new(center.y, *sigma).map_err(|e| Error::Config(e.to_string()))?;
            (0..*count)
                .map(|_| {
                    let x = nx.sample(&mut rng);
                    let y = ny.sample(&mut rng);
                    WeightedPoint::unit(x, y)
                })
                .collect()
        }
        Generator::AtNodes { nodes, count } => {
            let network = network
                .ok_or_else(|| Error::Config("at_nodes generator needs a network".into()))?;
            let n = network.node_count();
            let ids: Vec<NodeId> = match (nodes, count) {
                (Some(ids), _) => {
                    if ids.is_empty() {
                        return Err(Error::Config("at_nodes node list is empty".into()));
                    }
                    if let Some(bad) = ids.iter().find(|id| id.0 >= n) {
                        return Err(Error::Config(format!("at_nodes references unknown node {bad}")));
                    }
                    ids.clone()
                }
                (None, None) => (0..n).map(NodeId).collect(),
                (None, Some(c)) if *c == n => (0..n).map(NodeId).collect(),
                (None, Some(c)) => {
                    if *c == 0 || *c > n {
                        return Err(Error::Config(format!(
                            "at_nodes count must lie in 1..={n}, got {c}"
                        )));
                    }
                    let mut picked = rand::seq::index::sample(&mut rng, n, *c).into_vec();
                    picked.sort_unstable();
                    picked.into_iter().map(NodeId).collect()
                }
            };
            ids.iter()
                .map(|id| {
                    let p = network.nodes()[id.0].position;
                    WeightedPoint::unit(p.x, p.y)
                })
                .collect()
        }
    };
    SpatialDistribution::new(kind, points)
}

/// Parses `[distribution.<name>]` sections with `x,y,weight` rows.
pub fn parse_distribution_text(
    source: &str,
    text: &str,
) -> Result<BTreeMap<String, Vec<WeightedPoint>>> {
    let mut out = BTreeMap::new();
    for section in tables::parse(source, text)? {
        let name = section
            .name
            .strip_prefix("distribution.")
            .filter(|n| !n.is_empty())
            .ok_or_else(|| Error::Parse {
                path: source.to_string(),
                line: section.line,
                message: format!("expected [distribution.<name>], found [{}]", section.name),
            })?;
        section.expect_columns(source, &["x", "y", "weight"])?;
        let mut points = Vec::with_capacity(section.rows.len());
        for row in &section.rows {
            let weight: f64 = row.parse(source, 2, "weight")?;
            if !(weight >= 0.0 && weight.is_finite()) {
                return Err(Error::Parse {
                    path: source.to_string(),
                    line: row.line,
                    message: format!("weight must be non-negative, got {weight}"),
                });
            }
            points.push(WeightedPoint {
                position: Point::new(row.parse(source, 0, "x")?, row.parse(source, 1, "y")?),
                weight,
            });
        }
        out.insert(name.to_string(), points);
    }
    Ok(out)
}

pub fn distribution_to_text(name: &str, points: &[WeightedPoint]) -> String {
    let mut out = format!("[distribution.{name}]\nx,y,weight\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.position.x, p.position.y, p.weight));
    }
    out
}

pub fn load_distribution_file(path: &Path) -> Result<BTreeMap<String, Vec<WeightedPoint>>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read distribution file {}: {e}", path.display()))
    })?;
    parse_distribution_text(&path.display().to_string(), &text)
}
