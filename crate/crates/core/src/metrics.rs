//! Proxy metrics: food access (`eta`), road wear (`kappa`) and pollution
//! impact (`pollution_at`) with its time integral along routes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};
use crate::exec::Execution;
use crate::network::{NodeId, Point, RoadNetwork, Segment, WearParams};
use crate::routing::{CostContext, EdgeCostModel, Route, Router};
use crate::spatial::{snap_to_node, SpatialDistribution};

/// How the consumer compares good and bad food options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChoiceSemantics {
    /// Nearest good option against the nearest ("easiest") bad option.
    #[default]
    ProseNearest,
    /// Minimum of `t(h, g) - t(h, b)` over all pairs, i.e. nearest good
    /// against the farthest bad option.
    FormulaPairMin,
}

impl ChoiceSemantics {
    pub fn label(self) -> &'static str {
        match self {
            ChoiceSemantics::ProseNearest => "prose_nearest",
            ChoiceSemantics::FormulaPairMin => "formula_pair_min",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FoodDesertParams {
    /// Seconds of extra travel a consumer tolerates for good food.
    pub threshold_k: f64,
    pub semantics: ChoiceSemantics,
}

impl Default for FoodDesertParams {
    fn default() -> Self {
        FoodDesertParams {
            threshold_k: 60.0,
            semantics: ChoiceSemantics::ProseNearest,
        }
    }
}

impl FoodDesertParams {
    pub fn validate(&self, prefix: &str) -> Vec<FieldError> {
        if self.threshold_k > 0.0 && self.threshold_k.is_finite() {
            Vec::new()
        } else {
            vec![FieldError::new(
                format!("{prefix}.threshold_k"),
                format!("must be positive and finite, got {}", self.threshold_k),
            )]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PollutionParams {
    /// Distances below this are clamped, in meters.
    pub min_distance: f64,
    /// Spacing of exposure samples along a segment, in meters.
    pub sample_spacing: f64,
}

impl Default for PollutionParams {
    fn default() -> Self {
        PollutionParams {
            min_distance: 1.0,
            sample_spacing: 10.0,
        }
    }
}

impl PollutionParams {
    pub fn validate(&self, prefix: &str) -> Vec<FieldError> {
        let mut errors = Vec::new();
        for (name, value) in [
            ("min_distance", self.min_distance),
            ("sample_spacing", self.sample_spacing),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                errors.push(FieldError::new(
                    format!("{prefix}.{name}"),
                    format!("must be positive and finite, got {value}"),
                ));
            }
        }
        errors
    }
}

/// Metrics for one simulated epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub epoch: u64,
    pub eta: f64,
    pub total_wear_cost: f64,
    pub repair_count: u64,
    pub total_pollution_exposure: f64,
    pub mean_travel_time: f64,
    pub trips: u64,
    /// Traversals during this epoch, indexed by segment id.
    pub segment_traversals: Vec<u64>,
}

pub fn kappa(route: &Route, network: &RoadNetwork, params: &WearParams) -> f64 {
    route
        .segments
        .iter()
        .map(|s| params.wear_coefficient * network.segments()[s.0].quality)
        .sum()
}

/// Population-weighted mean of the clamped inverse-square distance to `v`.
pub fn pollution_at(v: &Point, population: &SpatialDistribution, params: &PollutionParams) -> f64 {
    let floor = params.min_distance * params.min_distance;
    population.expectation(|p| 1.0 / p.distance_squared(v).max(floor))
}

/// Exposure accumulated while driving one segment: samples every
/// `sample_spacing` meters along the straight line between its endpoints,
/// each weighted by the share of travel time closest to it (trapezoid rule).
pub fn segment_exposure(
    network: &RoadNetwork,
    segment: &Segment,
    population: &SpatialDistribution,
    params: &PollutionParams,
) -> f64 {
    let a = network.nodes()[segment.from.0].position;
    let b = network.nodes()[segment.to.0].position;
    let intervals = (a.distance(&b) / params.sample_spacing).ceil().max(1.0) as usize;
    let dt = segment.base_travel_time / intervals as f64;
    let mut total = 0.0;
    for i in 0..=intervals {
        let share = if i == 0 || i == intervals { 0.5 } else { 1.0 };
        let at = a.lerp(&b, i as f64 / intervals as f64);
        total += pollution_at(&at, population, params) * dt * share;
    }
    total
}

/// Exposure of every segment, indexed by segment id.
pub fn segment_exposures(
    network: &RoadNetwork,
    population: &SpatialDistribution,
    params: &PollutionParams,
    exec: Execution,
) -> Vec<f64> {
    exec.map(network.segments(), |s| {
        segment_exposure(network, s, population, params)
    })
}

/// Per-second pollution impact of each segment, for pollution-aware routing.
pub fn pollution_rates(network: &RoadNetwork, exposures: &[f64]) -> Vec<f64> {
    network
        .segments()
        .iter()
        .zip(exposures)
        .map(|(s, e)| e / s.base_travel_time)
        .collect()
}

pub fn route_pollution_exposure(
    network: &RoadNetwork,
    route: &Route,
    population: &SpatialDistribution,
    params: &PollutionParams,
) -> f64 {
    route
        .segments
        .iter()
        .map(|s| segment_exposure(network, &network.segments()[s.0], population, params))
        .sum()
}

fn choose(min_good: f64, min_bad: f64, max_bad: f64, params: &FoodDesertParams) -> bool {
    let margin = match params.semantics {
        ChoiceSemantics::ProseNearest => min_good - min_bad,
        ChoiceSemantics::FormulaPairMin => min_good - max_bad,
    };
    margin < params.threshold_k
}

/// Travel times of the policy's chosen routes from every node to each food option.
#[derive(Debug, Clone)]
pub struct FoodAccess {
    good: Vec<Vec<f64>>,
    bad: Vec<Vec<f64>>,
}

impl FoodAccess {
    pub fn build(
        router: &Router<'_>,
        good: &SpatialDistribution,
        bad: &SpatialDistribution,
        exec: Execution,
    ) -> Result<Self> {
        let network = router.network();
        let snap_all = |d: &SpatialDistribution| {
            let mut nodes: Vec<NodeId> = d
                .points()
                .iter()
                .map(|p| snap_to_node(network, &p.position))
                .collect();
            nodes.sort_unstable();
            nodes.dedup();
            nodes
        };
        let good_nodes = snap_all(good);
        let bad_nodes = snap_all(bad);
        let mut targets = good_nodes.clone();
        targets.extend(bad_nodes.iter().copied());
        targets.sort_unstable();
        targets.dedup();

        let tables = exec.map(&targets, |&dest| {
            router
                .tree_to(dest)
                .map(|tree| router.chosen_travel_times(&tree))
        });
        let mut by_node = BTreeMap::new();
        for (dest, times) in targets.iter().zip(tables) {
            by_node.insert(*dest, times?);
        }
        let pick = |nodes: &[NodeId]| nodes.iter().map(|n| by_node[n].clone()).collect();
        Ok(FoodAccess {
            good: pick(&good_nodes),
            bad: pick(&bad_nodes),
        })
    }

    /// `C(h)` for a consumer living at `home`.
    pub fn choice(&self, home: NodeId, params: &FoodDesertParams) -> Result<bool> {
        let min_good = self.good.iter().map(|t| t[home.0]).fold(f64::INFINITY, f64::min);
        let min_bad = self.bad.iter().map(|t| t[home.0]).fold(f64::INFINITY, f64::min);
        let max_bad = self.bad.iter().map(|t| t[home.0]).fold(f64::NEG_INFINITY, f64::max);
        if !min_good.is_finite() || !max_bad.is_finite() {
            return Err(Error::Routing(format!(
                "some food option is unreachable from node {home}"
            )));
        }
        Ok(choose(min_good, min_bad, max_bad, params))
    }
}

/// Whether a consumer at `home` picks good food when travel follows `model`.
#[allow(clippy::too_many_arguments)]
pub fn consumer_choice(
    network: &RoadNetwork,
    model: &EdgeCostModel,
    ctx: CostContext<'_>,
    home: &Point,
    good: &SpatialDistribution,
    bad: &SpatialDistribution,
    params: &FoodDesertParams,
) -> Result<bool> {
    let router = Router::new(network, model, ctx)?;
    let access = FoodAccess::build(&router, good, bad, Execution::Sequential)?;
    access.choice(snap_to_node(network, home), params)
}

/// Housing-weighted share of consumers choosing good food.
#[allow(clippy::too_many_arguments)]
pub fn eta(
    network: &RoadNetwork,
    model: &EdgeCostModel,
    ctx: CostContext<'_>,
    housing: &SpatialDistribution,
    good: &SpatialDistribution,
    bad: &SpatialDistribution,
    params: &FoodDesertParams,
    exec: Execution,
) -> Result<f64> {
    let router = Router::new(network, model, ctx)?;
    let access = FoodAccess::build(&router, good, bad, exec)?;
    let homes: Vec<NodeId> = housing
        .points()
        .iter()
        .map(|p| snap_to_node(network, &p.position))
        .collect();
    eta_from_access(&access, &homes, housing, params)
}

/// `eta` for pre-snapped housing nodes, listed in the same order as `housing`'s points.
pub fn eta_from_access(
    access: &FoodAccess,
    homes: &[NodeId],
    housing: &SpatialDistribution,
    params: &FoodDesertParams,
) -> Result<f64> {
    let choices = homes
        .iter()
        .map(|h| access.choice(*h, params).map(|c| if c { 1.0 } else { 0.0 }))
        .collect::<Result<Vec<f64>>>()?;
    Ok(housing.weighted_mean(choices).clamp(0.0, 1.0))
}
