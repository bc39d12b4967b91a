//! Label-setting shortest paths over pluggable, non-negative edge costs.
//!
//! Every query runs a reverse Dijkstra from the destination and then walks
//! forward from the origin along cost-tight segments, always taking the
//! smallest segment id. That walk yields, among all minimum-cost routes, the
//! one whose segment-id sequence is lexicographically smallest.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::network::{NodeId, RoadNetwork, Segment, SegmentId};

/// Relative slack when deciding whether a segment lies on a minimum-cost route.
const TIGHT_TOLERANCE: f64 = 1e-12;

/// Per-component weights of a [`EdgeCostModel::WeightedSum`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostWeights {
    pub travel_time: f64,
    pub wear_proportional: f64,
    pub wear_inverse: f64,
    pub pollution: f64,
}

impl CostWeights {
    fn as_array(&self) -> [f64; 4] {
        [
            self.travel_time,
            self.wear_proportional,
            self.wear_inverse,
            self.pollution,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeCostModel {
    /// Free-flow seconds.
    TravelTime,
    /// `j * q(s)`: cheapest on worn segments.
    WearProportional,
    /// `j / q(s)`: cheapest on pristine segments, spreading wear out.
    WearInverse,
    /// Time-integrated pollution impact of driving the segment.
    PollutionExposure,
    WeightedSum(CostWeights),
}

impl EdgeCostModel {
    pub fn validate(&self) -> Result<()> {
        if let EdgeCostModel::WeightedSum(w) = self {
            let ws = w.as_array();
            if ws.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                return Err(Error::Config(
                    "weighted sum weights must be non-negative and finite".into(),
                ));
            }
            if !ws.iter().any(|x| *x > 0.0) {
                return Err(Error::Config(
                    "weighted sum needs at least one positive weight".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn needs_pollution(&self) -> bool {
        match self {
            EdgeCostModel::PollutionExposure => true,
            EdgeCostModel::WeightedSum(w) => w.pollution > 0.0,
            _ => false,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EdgeCostModel::TravelTime => "travel_time",
            EdgeCostModel::WearProportional => "wear_proportional",
            EdgeCostModel::WearInverse => "wear_inverse",
            EdgeCostModel::PollutionExposure => "pollution",
            EdgeCostModel::WeightedSum(_) => "weighted_sum",
        }
    }
}

/// Inputs an edge cost may need beyond the segment itself.
#[derive(Debug, Clone, Copy)]
pub struct CostContext<'a> {
    pub wear_coefficient: f64,
    /// Pollution impact per second of travel, indexed by segment id.
    pub pollution_rate: Option<&'a [f64]>,
}

impl<'a> CostContext<'a> {
    pub fn new(wear_coefficient: f64) -> Self {
        CostContext {
            wear_coefficient,
            pollution_rate: None,
        }
    }

    pub fn with_pollution(mut self, rates: &'a [f64]) -> Self {
        self.pollution_rate = Some(rates);
        self
    }

    fn rate(&self, segment: &Segment) -> Result<f64> {
        self.pollution_rate
            .and_then(|r| r.get(segment.id.0).copied())
            .ok_or_else(|| {
                Error::Config(format!(
                    "pollution-aware cost needs a pollution rate for segment {}",
                    segment.id
                ))
            })
    }
}

pub fn edge_cost(model: &EdgeCostModel, segment: &Segment, ctx: &CostContext<'_>) -> Result<f64> {
    let j = ctx.wear_coefficient;
    let cost = match model {
        EdgeCostModel::TravelTime => segment.base_travel_time,
        EdgeCostModel::WearProportional => j * segment.quality,
        EdgeCostModel::WearInverse => j / segment.quality,
        EdgeCostModel::PollutionExposure => ctx.rate(segment)? * segment.base_travel_time,
        EdgeCostModel::WeightedSum(w) => {
            let mut total = 0.0;
            let parts = [
                (w.travel_time, EdgeCostModel::TravelTime),
                (w.wear_proportional, EdgeCostModel::WearProportional),
                (w.wear_inverse, EdgeCostModel::WearInverse),
                (w.pollution, EdgeCostModel::PollutionExposure),
            ];
            for (weight, part) in parts {
                if weight > 0.0 {
                    total += weight * edge_cost(&part, segment, ctx)?;
                }
            }
            total
        }
    };
    if cost >= 0.0 && cost.is_finite() {
        Ok(cost)
    } else {
        Err(Error::Internal(format!(
            "{} cost of segment {} is {cost}",
            model.label(),
            segment.id
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub origin: NodeId,
    pub destination: NodeId,
    pub segments: Vec<SegmentId>,
    /// Sum of the routing model's edge costs.
    pub cost: f64,
    /// Seconds.
    pub travel_time: f64,
    /// `sum j * q(s)` against qualities when the route was chosen.
    pub wear_cost: f64,
    /// Zero when no pollution rates were available.
    pub pollution_exposure: f64,
}

impl Route {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }
}

/// Sum of free-flow travel times along the route.
pub fn route_travel_time(network: &RoadNetwork, route: &Route) -> f64 {
    route
        .segments
        .iter()
        .map(|s| network.segments()[s.0].base_travel_time)
        .sum()
}

/// Checks that `route` is a connected walk from its origin to its destination.
pub fn check_route(network: &RoadNetwork, route: &Route) -> Result<()> {
    let mut at = route.origin;
    for sid in &route.segments {
        let seg = network
            .segment(*sid)
            .ok_or_else(|| Error::Usage(format!("route uses unknown segment {sid}")))?;
        if seg.from != at {
            return Err(Error::Usage(format!(
                "segment {sid} starts at node {} but the route is at node {at}",
                seg.from
            )));
        }
        at = seg.to;
    }
    if at != route.destination {
        return Err(Error::Usage(format!(
            "route ends at node {at}, not at destination {}",
            route.destination
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
struct Label {
    cost: f64,
    node: usize,
}

impl Eq for Label {}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, then on node id
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum costs to one destination plus the tie-broken next segment from every node.
#[derive(Debug, Clone)]
pub struct DestinationTree {
    destination: NodeId,
    cost_to_go: Vec<f64>,
    next: Vec<Option<SegmentId>>,
}

impl DestinationTree {
    pub fn destination(&self) -> NodeId {
        self.destination
    }

    pub fn cost_from(&self, node: NodeId) -> f64 {
        self.cost_to_go[node.0]
    }

    pub fn next_segment(&self, node: NodeId) -> Option<SegmentId> {
        self.next[node.0]
    }
}

/// Routes one network snapshot under one cost model.
#[derive(Debug, Clone)]
pub struct Router<'a> {
    network: &'a RoadNetwork,
    ctx: CostContext<'a>,
    costs: Vec<f64>,
}

impl<'a> Router<'a> {
    pub fn new(network: &'a RoadNetwork, model: &EdgeCostModel, ctx: CostContext<'a>) -> Result<Self> {
        model.validate()?;
        let costs = network
            .segments()
            .iter()
            .map(|s| edge_cost(model, s, &ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(Router {
            network,
            ctx,
            costs,
        })
    }

    pub fn network(&self) -> &'a RoadNetwork {
        self.network
    }

    pub fn edge_costs(&self) -> &[f64] {
        &self.costs
    }

    fn check_node(&self, node: NodeId) -> Result<()> {
        if node.0 < self.network.node_count() {
            Ok(())
        } else {
            Err(Error::Usage(format!("unknown node id {node}")))
        }
    }

    pub fn tree_to(&self, destination: NodeId) -> Result<DestinationTree> {
        self.check_node(destination)?;
        let n = self.network.node_count();
        let segments = self.network.segments();
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[destination.0] = 0.0;
        heap.push(Label {
            cost: 0.0,
            node: destination.0,
        });
        while let Some(Label { cost, node }) = heap.pop() {
            if done[node] {
                continue;
            }
            done[node] = true;
            for sid in self.network.incoming(NodeId(node)) {
                let u = segments[sid.0].from.0;
                let candidate = cost + self.costs[sid.0];
                if candidate < dist[u] {
                    dist[u] = candidate;
                    heap.push(Label { cost: candidate, node: u });
                }
            }
        }

        let mut next = vec![None; n];
        for u in 0..n {
            if u == destination.0 || !dist[u].is_finite() {
                continue;
            }
            let limit = dist[u] * (1.0 + TIGHT_TOLERANCE);
            next[u] = self
                .network
                .outgoing(NodeId(u))
                .iter()
                .filter(|sid| {
                    let v = segments[sid.0].to.0;
                    dist[v] < dist[u] && self.costs[sid.0] + dist[v] <= limit
                })
                .min()
                .copied();
        }
        Ok(DestinationTree {
            destination,
            cost_to_go: dist,
            next,
        })
    }

    /// Follows `tree` from `origin` and packages the route with its totals.
    pub fn route_from(&self, tree: &DestinationTree, origin: NodeId) -> Result<Route> {
        self.check_node(origin)?;
        let mut path = Vec::new();
        let mut at = origin;
        while at != tree.destination {
            let sid = tree.next[at.0].ok_or_else(|| {
                Error::Routing(format!(
                    "node {} is unreachable from node {origin}",
                    tree.destination
                ))
            })?;
            path.push(sid);
            at = self.network.segments()[sid.0].to;
        }
        Ok(self.package(origin, tree.destination, path))
    }

    pub fn shortest_route(&self, origin: NodeId, destination: NodeId) -> Result<Route> {
        self.check_node(origin)?;
        let tree = self.tree_to(destination)?;
        self.route_from(&tree, origin)
    }

    /// Free-flow time of the chosen route from every node to the tree's
    /// destination; infinite where the destination is unreachable.
    pub fn chosen_travel_times(&self, tree: &DestinationTree) -> Vec<f64> {
        let n = self.network.node_count();
        let mut order: Vec<usize> = (0..n).filter(|&u| tree.cost_to_go[u].is_finite()).collect();
        order.sort_by(|&a, &b| tree.cost_to_go[a].total_cmp(&tree.cost_to_go[b]));
        let mut times = vec![f64::INFINITY; n];
        times[tree.destination.0] = 0.0;
        for u in order {
            if let Some(sid) = tree.next[u] {
                let seg = &self.network.segments()[sid.0];
                // successors always have strictly smaller cost-to-go
                times[u] = seg.base_travel_time + times[seg.to.0];
            }
        }
        times
    }

    fn package(&self, origin: NodeId, destination: NodeId, segments: Vec<SegmentId>) -> Route {
        let mut route = Route {
            origin,
            destination,
            segments,
            cost: 0.0,
            travel_time: 0.0,
            wear_cost: 0.0,
            pollution_exposure: 0.0,
        };
        for sid in &route.segments {
            let seg = &self.network.segments()[sid.0];
            route.cost += self.costs[sid.0];
            route.travel_time += seg.base_travel_time;
            route.wear_cost += self.ctx.wear_coefficient * seg.quality;
            if let Some(rates) = self.ctx.pollution_rate {
                route.pollution_exposure += rates[sid.0] * seg.base_travel_time;
            }
        }
        route
    }
}

/// Minimum-cost route from `origin` to `destination` under `model`.
pub fn shortest_route(
    network: &RoadNetwork,
    origin: NodeId,
    destination: NodeId,
    model: &EdgeCostModel,
    ctx: CostContext<'_>,
) -> Result<Route> {
    Router::new(network, model, ctx)?.shortest_route(origin, destination)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Node, Point};

    fn seg(id: usize, from: usize, to: usize, time: f64, quality: f64) -> Segment {
        Segment {
            id: SegmentId(id),
            from: NodeId(from),
            to: NodeId(to),
            length: time * 10.0,
            base_travel_time: time,
            quality,
        }
    }

    fn network(n: usize, segments: Vec<Segment>) -> RoadNetwork {
        let nodes = (0..n)
            .map(|i| Node { id: NodeId(i), position: Point::new(i as f64 * 10.0, 0.0) })
            .collect();
        RoadNetwork::new(nodes, segments).unwrap()
    }

    fn tt(net: &RoadNetwork, o: usize, d: usize) -> Route {
        shortest_route(net, NodeId(o), NodeId(d), &EdgeCostModel::TravelTime, CostContext::new(1.0)).unwrap()
    }

    #[test]
    fn edge_cost_examples() {
        let s = seg(0, 0, 1, 7.0, 0.5);
        let ctx = CostContext::new(2.0);
        assert_eq!(edge_cost(&EdgeCostModel::WearProportional, &s, &ctx).unwrap(), 1.0);
        assert_eq!(edge_cost(&EdgeCostModel::WearInverse, &s, &ctx).unwrap(), 4.0);
        assert_eq!(edge_cost(&EdgeCostModel::TravelTime, &s, &ctx).unwrap(), 7.0);
        let rates = [0.25];
        let ctx = ctx.with_pollution(&rates);
        assert_eq!(edge_cost(&EdgeCostModel::PollutionExposure, &s, &ctx).unwrap(), 1.75);
        let sum = EdgeCostModel::WeightedSum(CostWeights {
            travel_time: 1.0,
            wear_proportional: 0.0,
            ..Default::default()
        });
        assert_eq!(edge_cost(&sum, &s, &ctx).unwrap(), 7.0);
        let mix = EdgeCostModel::WeightedSum(CostWeights {
            travel_time: 0.5,
            wear_inverse: 2.0,
            pollution: 4.0,
            ..Default::default()
        });
        assert_eq!(edge_cost(&mix, &s, &ctx).unwrap(), 3.5 + 8.0 + 7.0);
    }

    #[test]
    fn pollution_cost_without_rates_is_an_error() {
        let s = seg(0, 0, 1, 7.0, 0.5);
        assert!(edge_cost(&EdgeCostModel::PollutionExposure, &s, &CostContext::new(1.0)).is_err());
    }

    #[test]
    fn weighted_sum_validation() {
        let none = EdgeCostModel::WeightedSum(CostWeights::default());
        assert!(none.validate().is_err());
        let neg = EdgeCostModel::WeightedSum(CostWeights { travel_time: -1.0, pollution: 1.0, ..Default::default() });
        assert!(neg.validate().is_err());
    }

    #[test]
    fn same_origin_and_destination_is_empty() {
        let net = network(2, vec![seg(0, 0, 1, 3.0, 1.0), seg(1, 1, 0, 3.0, 1.0)]);
        let r = tt(&net, 1, 1);
        assert!(r.is_empty());
        assert_eq!((r.travel_time, r.wear_cost, r.pollution_exposure), (0.0, 0.0, 0.0));
    }

    #[test]
    fn picks_cheaper_parallel_segment() {
        let net = network(
            2,
            vec![seg(0, 0, 1, 5.0, 1.0), seg(1, 0, 1, 3.0, 1.0), seg(2, 1, 0, 1.0, 1.0)],
        );
        let r = tt(&net, 0, 1);
        assert_eq!(r.segments, vec![SegmentId(1)]);
        assert_eq!(r.travel_time, 3.0);
        assert_eq!(route_travel_time(&net, &r), 3.0);
    }

    #[test]
    fn equal_cost_ties_take_lexicographically_smallest_ids() {
        // 0 -> 1 -> 3 uses ids [2, 5]; 0 -> 2 -> 3 uses ids [1, 4] and wins.
        let net = network(
            4,
            vec![
                seg(0, 3, 0, 1.0, 1.0),
                seg(1, 0, 2, 2.0, 1.0),
                seg(2, 0, 1, 1.0, 1.0),
                seg(3, 1, 0, 1.0, 1.0),
                seg(4, 2, 3, 1.0, 1.0),
                seg(5, 1, 3, 2.0, 1.0),
                seg(6, 2, 0, 1.0, 1.0),
            ],
        );
        let r = tt(&net, 0, 3);
        assert_eq!(r.segments, vec![SegmentId(1), SegmentId(4)]);
        check_route(&net, &r).unwrap();
    }

    #[test]
    fn wear_aware_route_can_be_slower() {
        // Fast path 0->1->3 (2 s) is worn; slow path 0->2->3 (4 s) is pristine.
        let mut net = network(
            4,
            vec![
                seg(0, 0, 1, 1.0, 0.6),
                seg(1, 1, 3, 1.0, 0.6),
                seg(2, 0, 2, 2.0, 1.0),
                seg(3, 2, 3, 2.0, 1.0),
                seg(4, 3, 0, 1.0, 1.0),
            ],
        );
        net.set_quality(SegmentId(0), 0.6).unwrap();
        let ctx = CostContext::new(1.0);
        let fast = shortest_route(&net, NodeId(0), NodeId(3), &EdgeCostModel::TravelTime, ctx).unwrap();
        let wear = shortest_route(&net, NodeId(0), NodeId(3), &EdgeCostModel::WearInverse, ctx).unwrap();
        assert_eq!(fast.travel_time, 2.0);
        assert_eq!(route_travel_time(&net, &wear), 4.0);
        assert!(wear.travel_time > fast.travel_time);
        assert!((wear.wear_cost - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_nodes_are_rejected() {
        let net = network(2, vec![seg(0, 0, 1, 3.0, 1.0), seg(1, 1, 0, 3.0, 1.0)]);
        let router = Router::new(&net, &EdgeCostModel::TravelTime, CostContext::new(1.0)).unwrap();
        assert!(router.shortest_route(NodeId(0), NodeId(5)).is_err());
        assert!(router.shortest_route(NodeId(5), NodeId(0)).is_err());
    }

    #[test]
    fn unreachable_is_routing_error() {
        let nodes = (0..2)
            .map(|i| Node { id: NodeId(i), position: Point::new(i as f64, 0.0) })
            .collect();
        let net = RoadNetwork::from_parts(nodes, vec![seg(0, 0, 1, 1.0, 1.0)]);
        let router = Router::new(&net, &EdgeCostModel::TravelTime, CostContext::new(1.0)).unwrap();
        let err = router.shortest_route(NodeId(1), NodeId(0)).unwrap_err();
        assert!(matches!(err, Error::Routing(_)));
    }

    #[test]
    fn chosen_times_match_routes() {
        let net = network(
            4,
            vec![
                seg(0, 0, 1, 1.0, 0.9),
                seg(1, 1, 2, 2.0, 0.5),
                seg(2, 2, 3, 3.0, 1.0),
                seg(3, 3, 0, 4.0, 0.7),
                seg(4, 0, 2, 2.5, 1.0),
                seg(5, 2, 1, 1.0, 0.8),
            ],
        );
        let router = Router::new(&net, &EdgeCostModel::WearInverse, CostContext::new(1.0)).unwrap();
        for d in 0..4 {
            let tree = router.tree_to(NodeId(d)).unwrap();
            let times = router.chosen_travel_times(&tree);
            for (o, t) in times.iter().enumerate() {
                let r = router.route_from(&tree, NodeId(o)).unwrap();
                assert!((t - r.travel_time).abs() < 1e-9);
            }
        }
    }
}
