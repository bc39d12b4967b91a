//! Deterministic road-network simulator for comparing routing policies on
//! societal proxy metrics: food access, pavement wear and pollution exposure.

pub mod cli;
pub mod error;
pub mod exec;
pub mod metrics;
pub mod network;
pub mod registry;
pub mod report;
pub mod routing;
pub mod scenario;
pub mod seeds;
pub mod sim;
pub mod spatial;
mod tables;

pub use error::{Error, FieldError, Result};
pub use exec::Execution;
pub use metrics::{
    consumer_choice, eta, kappa, pollution_at, route_pollution_exposure, ChoiceSemantics,
    FoodDesertParams, MetricReport, PollutionParams,
};
pub use network::{
    segment_quality_series, Node, NodeId, Point, RoadNetwork, Segment, SegmentId,
    TraversalOutcome, Violation, WearParams,
};
pub use routing::{
    edge_cost, route_travel_time, shortest_route, CostContext, CostWeights, EdgeCostModel,
    Route, Router,
};
pub use scenario::{PolicySpec, Scenario, World};
pub use sim::{SimConfig, Simulation, TripDemand};
pub use spatial::{snap_to_node, DistributionKind, SpatialDistribution, WeightedPoint};
