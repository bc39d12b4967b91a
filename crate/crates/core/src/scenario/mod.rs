//! Scenario files: one TOML document binding a network, the four spatial
//! distributions, a routing policy, and every model parameter.

pub mod generators;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};
use crate::metrics::{FoodDesertParams, PollutionParams};
use crate::network::{NodeId, Point, RoadNetwork, WearParams};
use crate::routing::{CostWeights, EdgeCostModel};
use crate::seeds;
use crate::sim::TripDemand;
use crate::spatial::{self, Bounds, DistributionKind, Generator, SpatialDistribution, WeightedPoint};

pub use generators::{build_grid, build_random_geometric};

pub const DEFAULT_EPOCHS: u64 = 50;
pub const DEFAULT_SPEED_MPS: f64 = 10.0;

fn default_name() -> String {
    "scenario".to_string()
}

fn default_epochs() -> u64 {
    DEFAULT_EPOCHS
}

fn default_speed() -> f64 {
    DEFAULT_SPEED_MPS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NetworkSpec {
    /// Network text file, relative to the scenario file.
    File { path: PathBuf },
    Grid {
        rows: usize,
        cols: usize,
        edge_length_m: f64,
        edge_time_s: f64,
    },
    RandomGeometric {
        n: usize,
        radius_m: f64,
        bounds: Bounds,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default = "default_speed")]
        speed_mps: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum DistributionSpec {
    UniformInBounds {
        bounds: Bounds,
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    GaussianCluster {
        center: [f64; 2],
        sigma: f64,
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    AtNodes {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<Vec<NodeId>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        count: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// `[distribution.<name>]` section of a distribution file; `name`
    /// defaults to the distribution's role (e.g. `housing`).
    File {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    /// Inline `[x, y, weight]` rows.
    Points { points: Vec<[f64; 3]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpecs {
    pub housing: DistributionSpec,
    pub good_food: DistributionSpec,
    pub bad_food: DistributionSpec,
    pub population: DistributionSpec,
}

impl DistributionSpecs {
    pub fn get(&self, kind: DistributionKind) -> &DistributionSpec {
        match kind {
            DistributionKind::Housing => &self.housing,
            DistributionKind::GoodFood => &self.good_food,
            DistributionKind::BadFood => &self.bad_food,
            DistributionKind::Population => &self.population,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    #[serde(alias = "time")]
    TravelTime,
    Wear,
    Pollution,
    WeightedSum,
}

/// Which wear cost a wear-aware policy minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WearCost {
    /// `j * q(s)`.
    Proportional,
    /// `j / q(s)`.
    #[default]
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicyWeights {
    pub travel_time: f64,
    pub wear: f64,
    pub pollution: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Only read by `weighted_sum`.
    #[serde(default)]
    pub weights: PolicyWeights,
    #[serde(default)]
    pub wear_cost: WearCost,
}

impl Default for PolicySpec {
    fn default() -> Self {
        PolicySpec::of(PolicyKind::TravelTime)
    }
}

impl PolicySpec {
    pub fn of(kind: PolicyKind) -> Self {
        PolicySpec {
            kind,
            weights: PolicyWeights::default(),
            wear_cost: WearCost::Inverse,
        }
    }

    pub fn model(&self) -> EdgeCostModel {
        match self.kind {
            PolicyKind::TravelTime => EdgeCostModel::TravelTime,
            PolicyKind::Wear => match self.wear_cost {
                WearCost::Proportional => EdgeCostModel::WearProportional,
                WearCost::Inverse => EdgeCostModel::WearInverse,
            },
            PolicyKind::Pollution => EdgeCostModel::PollutionExposure,
            PolicyKind::WeightedSum => {
                let w = self.weights;
                let (wear_proportional, wear_inverse) = match self.wear_cost {
                    WearCost::Proportional => (w.wear, 0.0),
                    WearCost::Inverse => (0.0, w.wear),
                };
                EdgeCostModel::WeightedSum(CostWeights {
                    travel_time: w.travel_time,
                    wear_proportional,
                    wear_inverse,
                    pollution: w.pollution,
                })
            }
        }
    }

    pub fn validate(&self, prefix: &str) -> Vec<FieldError> {
        let mut errors = Vec::new();
        let w = self.weights;
        for (name, v) in [
            ("travel_time", w.travel_time),
            ("wear", w.wear),
            ("pollution", w.pollution),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                errors.push(FieldError::new(
                    format!("{prefix}.weights.{name}"),
                    format!("must be non-negative and finite, got {v}"),
                ));
            }
        }
        if self.kind == PolicyKind::WeightedSum
            && errors.is_empty()
            && !(w.travel_time > 0.0 || w.wear > 0.0 || w.pollution > 0.0)
        {
            errors.push(FieldError::new(
                format!("{prefix}.weights"),
                "weighted_sum needs at least one positive weight",
            ));
        }
        errors
    }
}

/// Policy names every scenario understands without a `[policies]` entry.
pub const BUILTIN_POLICIES: &[&str] = &[
    "time",
    "wear",
    "wear_inverse",
    "wear_proportional",
    "pollution",
    "scenario",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_epochs")]
    pub epochs: u64,
    pub network: NetworkSpec,
    pub distributions: DistributionSpecs,
    #[serde(default)]
    pub policy: PolicySpec,
    /// Extra named policies for comparisons.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub policies: BTreeMap<String, PolicySpec>,
    #[serde(default)]
    pub wear: WearParams,
    #[serde(default)]
    pub food: FoodDesertParams,
    #[serde(default)]
    pub pollution: PollutionParams,
    #[serde(default)]
    pub demand: TripDemand,
    /// Directory that relative file paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// A scenario's network and distributions, materialized.
#[derive(Debug, Clone)]
pub struct World {
    pub network: RoadNetwork,
    pub housing: SpatialDistribution,
    pub good_food: SpatialDistribution,
    pub bad_food: SpatialDistribution,
    pub population: SpatialDistribution,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read scenario file {}: {e}", path.display()))
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&path.display().to_string(), &text, &base)
    }

    pub fn from_toml_str(source: &str, text: &str, base_dir: &Path) -> Result<Self> {
        let mut scenario: Scenario = toml::from_str(text).map_err(|e| Error::Parse {
            path: source.to_string(),
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
            message: e.message().trim().to_string(),
        })?;
        scenario.base_dir = base_dir.to_path_buf();
        let errors = scenario.validate();
        if errors.is_empty() {
            Ok(scenario)
        } else {
            Err(Error::Validation(errors))
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Internal(format!("cannot serialize scenario: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?).map_err(|e| Error::io(path, e))
    }

    /// Every field-level problem, with dotted paths such as `food.threshold_k`.
    pub fn validate(&self) -> Vec<FieldError> {
        let mut errors = Vec::new();
        if self.epochs == 0 {
            errors.push(FieldError::new("epochs", "must be at least 1"));
        }
        errors.extend(validate_network_spec(&self.network));
        for kind in DistributionKind::ALL {
            errors.extend(validate_distribution_spec(
                self.distributions.get(kind),
                &format!("distributions.{}", kind.name()),
            ));
        }
        errors.extend(self.policy.validate("policy"));
        for (name, p) in &self.policies {
            errors.extend(p.validate(&format!("policies.{name}")));
        }
        errors.extend(self.wear.validate("wear"));
        errors.extend(self.food.validate("food"));
        errors.extend(self.pollution.validate("pollution"));
        errors.extend(self.demand.validate("demand"));
        errors
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn build_network(&self) -> Result<RoadNetwork> {
        match &self.network {
            NetworkSpec::File { path } => RoadNetwork::load(&self.resolve(path)),
            NetworkSpec::Grid {
                rows,
                cols,
                edge_length_m,
                edge_time_s,
            } => build_grid(*rows, *cols, *edge_length_m, *edge_time_s),
            NetworkSpec::RandomGeometric {
                n,
                radius_m,
                bounds,
                seed,
                speed_mps,
            } => build_random_geometric(
                *n,
                *radius_m,
                bounds,
                *speed_mps,
                seed.unwrap_or_else(|| seeds::for_label(self.seed, "network")),
            ),
        }
    }

    pub fn build_distribution(
        &self,
        kind: DistributionKind,
        network: &RoadNetwork,
    ) -> Result<SpatialDistribution> {
        let default_seed = |seed: &Option<u64>| {
            seed.unwrap_or_else(|| seeds::for_label(self.seed, kind.name()))
        };
        let generated = |generator: Generator, seed: &Option<u64>| {
            spatial::generate(kind, &generator, Some(network), default_seed(seed))
        };
        let result = match self.distributions.get(kind) {
            DistributionSpec::UniformInBounds { bounds, count, seed } => generated(
                Generator::UniformInBounds {
                    bounds: *bounds,
                    count: *count,
                },
                seed,
            ),
            DistributionSpec::GaussianCluster {
                center,
                sigma,
                count,
                seed,
            } => generated(
                Generator::GaussianCluster {
                    center: Point::new(center[0], center[1]),
                    sigma: *sigma,
                    count: *count,
                },
                seed,
            ),
            DistributionSpec::AtNodes { nodes, count, seed } => generated(
                Generator::AtNodes {
                    nodes: nodes.clone(),
                    count: *count,
                },
                seed,
            ),
            DistributionSpec::File { path, name } => {
                let path = self.resolve(path);
                let mut sets = spatial::load_distribution_file(&path)?;
                let key = name.clone().unwrap_or_else(|| kind.name().to_string());
                let points = sets.remove(&key).ok_or_else(|| {
                    Error::Config(format!(
                        "{} has no [distribution.{key}] section",
                        path.display()
                    ))
                })?;
                SpatialDistribution::new(kind, points)
            }
            DistributionSpec::Points { points } => SpatialDistribution::new(
                kind,
                points
                    .iter()
                    .map(|p| WeightedPoint {
                        position: Point::new(p[0], p[1]),
                        weight: p[2],
                    })
                    .collect(),
            ),
        };
        result.map_err(|e| match e {
            Error::Config(msg) => Error::Validation(vec![FieldError::new(
                format!("distributions.{}", kind.name()),
                msg,
            )]),
            other => other,
        })
    }

    pub fn build_world(&self) -> Result<World> {
        let network = self.build_network()?;
        let build = |k| self.build_distribution(k, &network);
        Ok(World {
            housing: build(DistributionKind::Housing)?,
            good_food: build(DistributionKind::GoodFood)?,
            bad_food: build(DistributionKind::BadFood)?,
            population: build(DistributionKind::Population)?,
            network,
        })
    }

    /// Looks a policy up in `[policies]`, then among [`BUILTIN_POLICIES`].
    pub fn policy_named(&self, name: &str) -> Result<PolicySpec> {
        if let Some(p) = self.policies.get(name) {
            return Ok(*p);
        }
        let wear = |wear_cost| PolicySpec {
            wear_cost,
            ..PolicySpec::of(PolicyKind::Wear)
        };
        Ok(match name {
            "time" | "travel_time" => PolicySpec::of(PolicyKind::TravelTime),
            "wear" => wear(self.policy.wear_cost),
            "wear_inverse" => wear(WearCost::Inverse),
            "wear_proportional" => wear(WearCost::Proportional),
            "pollution" => PolicySpec::of(PolicyKind::Pollution),
            "scenario" => self.policy,
            other => {
                let mut known: Vec<&str> = self.policies.keys().map(String::as_str).collect();
                known.extend(BUILTIN_POLICIES);
                return Err(Error::Usage(format!(
                    "unknown policy `{other}`; expected one of: {}",
                    known.join(", ")
                )));
            }
        })
    }

    /// Documented default for every optional field, as `(key, value)` pairs.
    pub fn defaults() -> Vec<(&'static str, String)> {
        let wear = WearParams::default();
        let food = FoodDesertParams::default();
        let pollution = PollutionParams::default();
        let demand = TripDemand::default();
        vec![
            ("name", default_name()),
            ("seed", "0".into()),
            ("epochs", DEFAULT_EPOCHS.to_string()),
            ("policy.kind", "travel_time".into()),
            ("policy.wear_cost", "inverse".into()),
            ("wear.epsilon", wear.epsilon.to_string()),
            ("wear.quality_floor", wear.quality_floor.to_string()),
            ("wear.wear_coefficient", wear.wear_coefficient.to_string()),
            ("wear.repair_mode", "immediate_reset".into()),
            ("food.threshold_k", food.threshold_k.to_string()),
            ("food.semantics", food.semantics.label().into()),
            ("pollution.min_distance", pollution.min_distance.to_string()),
            ("pollution.sample_spacing", pollution.sample_spacing.to_string()),
            ("demand.origin", demand.origin.label().into()),
            ("demand.destination", demand.destination.label().into()),
            ("demand.p_good", demand.p_good.to_string()),
            ("demand.trips_per_epoch", demand.trips_per_epoch.to_string()),
            ("network.speed_mps", DEFAULT_SPEED_MPS.to_string()),
        ]
    }
}

fn positive(errors: &mut Vec<FieldError>, path: String, value: f64) {
    if !(value > 0.0 && value.is_finite()) {
        errors.push(FieldError::new(path, format!("must be positive and finite, got {value}")));
    }
}

fn validate_network_spec(spec: &NetworkSpec) -> Vec<FieldError> {
    let mut errors = Vec::new();
    match spec {
        NetworkSpec::File { .. } => {}
        NetworkSpec::Grid {
            rows,
            cols,
            edge_length_m,
            edge_time_s,
        } => {
            for (name, v) in [("rows", rows), ("cols", cols)] {
                if *v < 2 {
                    errors.push(FieldError::new(
                        format!("network.{name}"),
                        format!("must be at least 2, got {v}"),
                    ));
                }
            }
            positive(&mut errors, "network.edge_length_m".into(), *edge_length_m);
            positive(&mut errors, "network.edge_time_s".into(), *edge_time_s);
        }
        NetworkSpec::RandomGeometric {
            n,
            radius_m,
            bounds,
            speed_mps,
            ..
        } => {
            if *n < 2 {
                errors.push(FieldError::new("network.n", format!("must be at least 2, got {n}")));
            }
            positive(&mut errors, "network.radius_m".into(), *radius_m);
            positive(&mut errors, "network.speed_mps".into(), *speed_mps);
            if !bounds.is_valid() {
                errors.push(FieldError::new(
                    "network.bounds",
                    "must be [min_x, min_y, max_x, max_y] with min < max",
                ));
            }
        }
    }
    errors
}

fn validate_distribution_spec(spec: &DistributionSpec, prefix: &str) -> Vec<FieldError> {
    let mut errors = Vec::new();
    let count_ok = |errors: &mut Vec<FieldError>, count: usize| {
        if count == 0 {
            errors.push(FieldError::new(format!("{prefix}.count"), "must be at least 1"));
        }
    };
    match spec {
        DistributionSpec::UniformInBounds { bounds, count, .. } => {
            count_ok(&mut errors, *count);
            if !bounds.is_valid() {
                errors.push(FieldError::new(
                    format!("{prefix}.bounds"),
                    "must be [min_x, min_y, max_x, max_y] with min < max",
                ));
            }
        }
        DistributionSpec::GaussianCluster {
            center,
            sigma,
            count,
            ..
        } => {
            count_ok(&mut errors, *count);
            positive(&mut errors, format!("{prefix}.sigma"), *sigma);
            if !center.iter().all(|c| c.is_finite()) {
                errors.push(FieldError::new(format!("{prefix}.center"), "must be finite"));
            }
        }
        DistributionSpec::AtNodes { nodes, count, .. } => {
            if let Some(c) = count {
                count_ok(&mut errors, *c);
            }
            if nodes.as_ref().is_some_and(Vec::is_empty) {
                errors.push(FieldError::new(format!("{prefix}.nodes"), "must not be empty"));
            }
        }
        DistributionSpec::File { .. } => {}
        DistributionSpec::Points { points } => {
            if points.is_empty() {
                errors.push(FieldError::new(format!("{prefix}.points"), "must not be empty"));
            }
            for (i, p) in points.iter().enumerate() {
                if !(p[0].is_finite() && p[1].is_finite()) || !(p[2] >= 0.0 && p[2].is_finite()) {
                    errors.push(FieldError::new(
                        format!("{prefix}.points[{i}]"),
                        "needs finite x, y and a non-negative weight",
                    ));
                }
            }
            if !points.is_empty() && points.iter().map(|p| p[2]).sum::<f64>() <= 0.0 {
                errors.push(FieldError::new(
                    format!("{prefix}.points"),
                    "total weight must be positive",
                ));
            }
        }
    }
    errors
}
