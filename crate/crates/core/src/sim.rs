//! Epoch-based simulation: draw trips, route each under the active policy,
//! wear the traversed segments, and report the proxy metrics.
//!
//! Trips within an epoch run one after another, so wear left by one trip
//! changes the costs the next trip sees.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FieldError, Result};
use crate::exec::Execution;
use crate::metrics::{
    eta_from_access, pollution_rates, segment_exposures, FoodAccess, FoodDesertParams,
    MetricReport, PollutionParams,
};
use crate::network::{NodeId, RoadNetwork, SegmentId, WearParams};
use crate::routing::{CostContext, EdgeCostModel, Route, Router};
use crate::scenario::{PolicySpec, Scenario, World};
use crate::seeds;
use crate::spatial::{snap_to_node, SpatialDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginSource {
    /// Weighted draw from the housing distribution.
    #[default]
    #[serde(alias = "housing_distribution")]
    Housing,
    UniformNodes,
}

impl OriginSource {
    pub fn label(self) -> &'static str {
        match self {
            OriginSource::Housing => "housing",
            OriginSource::UniformNodes => "uniform_nodes",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DestinationSource {
    UniformNodes,
    GoodFood,
    BadFood,
    /// Good food with probability `p_good`, bad food otherwise.
    #[default]
    MixedFood,
}

impl DestinationSource {
    pub fn label(self) -> &'static str {
        match self {
            DestinationSource::UniformNodes => "uniform_nodes",
            DestinationSource::GoodFood => "good_food",
            DestinationSource::BadFood => "bad_food",
            DestinationSource::MixedFood => "mixed_food",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TripDemand {
    pub origin: OriginSource,
    pub destination: DestinationSource,
    /// Only read by `mixed_food`.
    pub p_good: f64,
    pub trips_per_epoch: u64,
}

impl Default for TripDemand {
    fn default() -> Self {
        TripDemand {
            origin: OriginSource::Housing,
            destination: DestinationSource::MixedFood,
            p_good: 0.5,
            trips_per_epoch: 100,
        }
    }
}

impl TripDemand {
    pub fn validate(&self, prefix: &str) -> Vec<FieldError> {
        let mut errors = Vec::new();
        if self.trips_per_epoch == 0 {
            errors.push(FieldError::new(
                format!("{prefix}.trips_per_epoch"),
                "must be at least 1",
            ));
        }
        if !(0.0..=1.0).contains(&self.p_good) {
            errors.push(FieldError::new(
                format!("{prefix}.p_good"),
                format!("must lie in [0, 1], got {}", self.p_good),
            ));
        }
        errors
    }
}

/// Everything a run needs besides the world itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub model: EdgeCostModel,
    pub wear: WearParams,
    pub food: FoodDesertParams,
    pub pollution: PollutionParams,
    pub demand: TripDemand,
    pub seed: u64,
}

impl SimConfig {
    pub fn from_scenario(scenario: &Scenario, policy: &PolicySpec, seed: u64) -> Self {
        SimConfig {
            model: policy.model(),
            wear: scenario.wear,
            food: scenario.food,
            pollution: scenario.pollution,
            demand: scenario.demand,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripOutcome {
    /// Totals reflect segment qualities at selection time.
    pub route: Route,
    pub repairs: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSummary {
    pub segment_id: SegmentId,
    pub traversals: u64,
    pub repairs: u64,
    pub final_quality: f64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    world: World,
    homes: Vec<NodeId>,
    good_nodes: Vec<NodeId>,
    bad_nodes: Vec<NodeId>,
    exposures: Vec<f64>,
    rates: Vec<f64>,
    epoch: u64,
    traversals: Vec<u64>,
    exec: Execution,
}

fn snap_all(network: &RoadNetwork, dist: &SpatialDistribution) -> Vec<NodeId> {
    dist.points()
        .iter()
        .map(|p| snap_to_node(network, &p.position))
        .collect()
}

impl Simulation {
    pub fn new(world: World, config: SimConfig) -> Result<Self> {
        Self::with_execution(world, config, Execution::default())
    }

    pub fn with_execution(world: World, config: SimConfig, exec: Execution) -> Result<Self> {
        world.network.ensure_valid()?;
        config.model.validate()?;
        let mut errors = config.wear.validate("wear");
        errors.extend(config.food.validate("food"));
        errors.extend(config.pollution.validate("pollution"));
        errors.extend(config.demand.validate("demand"));
        if !errors.is_empty() {
            return Err(crate::error::Error::Validation(errors));
        }
        let exposures = segment_exposures(&world.network, &world.population, &config.pollution, exec);
        let rates = pollution_rates(&world.network, &exposures);
        Ok(Simulation {
            homes: snap_all(&world.network, &world.housing),
            good_nodes: snap_all(&world.network, &world.good_food),
            bad_nodes: snap_all(&world.network, &world.bad_food),
            traversals: vec![0; world.network.segment_count()],
            config,
            world,
            exposures,
            rates,
            epoch: 0,
            exec,
        })
    }

    /// Builds the scenario's world and runs it under `policy` with `seed`.
    pub fn from_scenario(scenario: &Scenario, policy: &PolicySpec, seed: u64) -> Result<Self> {
        Self::new(
            scenario.build_world()?,
            SimConfig::from_scenario(scenario, policy, seed),
        )
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.world.network
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Cumulative traversals per segment.
    pub fn traversals(&self) -> &[u64] {
        &self.traversals
    }

    /// Exposure of driving each segment once, indexed by segment id.
    pub fn segment_exposures(&self) -> &[f64] {
        &self.exposures
    }

    pub fn cost_context(&self) -> CostContext<'_> {
        CostContext::new(self.config.wear.wear_coefficient).with_pollution(&self.rates)
    }

    fn router(&self) -> Result<Router<'_>> {
        Router::new(&self.world.network, &self.config.model, self.cost_context())
    }

    /// Routes one trip against current qualities, then wears its segments in order.
    pub fn run_trip(&mut self, origin: NodeId, destination: NodeId) -> Result<TripOutcome> {
        let route = self.router()?.shortest_route(origin, destination)?;
        let mut repairs = 0;
        for sid in &route.segments {
            if self.world.network.apply_traversal(*sid, &self.config.wear)?.repaired {
                repairs += 1;
            }
            self.traversals[sid.0] += 1;
        }
        Ok(TripOutcome { route, repairs })
    }

    fn draw_trip(&self, trip: u64) -> (NodeId, NodeId) {
        let mut rng = seeds::trip_rng(self.config.seed, self.epoch, trip);
        let n = self.world.network.node_count();
        let origin = match self.config.demand.origin {
            OriginSource::Housing => self.homes[self.world.housing.sample_index(&mut rng)],
            OriginSource::UniformNodes => NodeId(rng.random_range(0..n)),
        };
        let good = |rng: &mut rand_chacha::ChaCha8Rng| {
            self.good_nodes[self.world.good_food.sample_index(rng)]
        };
        let bad = |rng: &mut rand_chacha::ChaCha8Rng| {
            self.bad_nodes[self.world.bad_food.sample_index(rng)]
        };
        let destination = match self.config.demand.destination {
            DestinationSource::UniformNodes => NodeId(rng.random_range(0..n)),
            DestinationSource::GoodFood => good(&mut rng),
            DestinationSource::BadFood => bad(&mut rng),
            DestinationSource::MixedFood => {
                if rng.random::<f64>() < self.config.demand.p_good {
                    good(&mut rng)
                } else {
                    bad(&mut rng)
                }
            }
        };
        (origin, destination)
    }

    /// Food-access metric against the network as it is right now.
    pub fn current_eta(&self) -> Result<f64> {
        let router = self.router()?;
        let access = FoodAccess::build(&router, &self.world.good_food, &self.world.bad_food, self.exec)?;
        eta_from_access(&access, &self.homes, &self.world.housing, &self.config.food)
    }

    pub fn run_epoch(&mut self) -> Result<MetricReport> {
        let trips = self.config.demand.trips_per_epoch;
        let before = self.traversals.clone();
        let mut report = MetricReport {
            epoch: self.epoch,
            eta: 0.0,
            total_wear_cost: 0.0,
            repair_count: 0,
            total_pollution_exposure: 0.0,
            mean_travel_time: 0.0,
            trips,
            segment_traversals: Vec::new(),
        };
        let mut total_time = 0.0;
        for trip in 0..trips {
            let (origin, destination) = self.draw_trip(trip);
            let outcome = self.run_trip(origin, destination)?;
            report.total_wear_cost += outcome.route.wear_cost;
            report.total_pollution_exposure += outcome.route.pollution_exposure;
            report.repair_count += outcome.repairs;
            total_time += outcome.route.travel_time;
        }
        report.mean_travel_time = if trips > 0 { total_time / trips as f64 } else { 0.0 };
        report.eta = self.current_eta()?;
        report.segment_traversals = self
            .traversals
            .iter()
            .zip(&before)
            .map(|(now, then)| now - then)
            .collect();
        self.epoch += 1;
        Ok(report)
    }

    pub fn run(&mut self, epochs: u64) -> Result<Vec<MetricReport>> {
        (0..epochs).map(|_| self.run_epoch()).collect()
    }

    pub fn segment_summary(&self) -> Vec<SegmentSummary> {
        self.world
            .network
            .segments()
            .iter()
            .map(|s| SegmentSummary {
                segment_id: s.id,
                traversals: self.traversals[s.id.0],
                repairs: self.world.network.repair_counts()[s.id.0],
                final_quality: s.quality,
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub reports: Vec<MetricReport>,
    pub segments: Vec<SegmentSummary>,
}

/// Runs the scenario's own policy for `epochs` epochs.
pub fn run(scenario: &Scenario, epochs: u64, seed: u64) -> Result<RunOutput> {
    run_policy(scenario, &scenario.policy, epochs, seed)
}

pub fn run_policy(
    scenario: &Scenario,
    policy: &PolicySpec,
    epochs: u64,
    seed: u64,
) -> Result<RunOutput> {
    let mut sim = Simulation::from_scenario(scenario, policy, seed)?;
    let reports = sim.run(epochs)?;
    Ok(RunOutput {
        reports,
        segments: sim.segment_summary(),
    })
}
