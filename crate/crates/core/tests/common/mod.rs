#![allow(dead_code)]

use civicroute::{CostWeights, EdgeCostModel, Node, NodeId, Point, RoadNetwork, Segment, SegmentId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn shipped_scenario(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

/// Random strongly connected multigraph on `n` nodes: a directed ring plus
/// `extra` random segments.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize, integer_times: bool) -> RoadNetwork {
    let nodes = (0..n)
        .map(|i| Node {
            id: NodeId(i),
            position: Point::new(rng.random_range(0.0..500.0), rng.random_range(0.0..500.0)),
        })
        .collect();
    let mut ends: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n);
        while b == a {
            b = rng.random_range(0..n);
        }
        ends.push((a, b));
    }
    let segments = ends
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let time = if integer_times {
                rng.random_range(1..6) as f64
            } else {
                rng.random_range(1.0..20.0)
            };
            Segment {
                id: SegmentId(i),
                from: NodeId(a),
                to: NodeId(b),
                length: time * 10.0,
                base_travel_time: time,
                quality: rng.random_range(0.2..=1.0),
            }
        })
        .collect();
    RoadNetwork::new(nodes, segments).expect("ring keeps the graph strongly connected")
}

pub fn random_model(rng: &mut ChaCha8Rng) -> EdgeCostModel {
    match rng.random_range(0..5) {
        0 => EdgeCostModel::TravelTime,
        1 => EdgeCostModel::WearProportional,
        2 => EdgeCostModel::WearInverse,
        3 => EdgeCostModel::PollutionExposure,
        _ => EdgeCostModel::WeightedSum(CostWeights {
            travel_time: rng.random_range(0.0..2.0),
            wear_proportional: rng.random_range(0.0..2.0),
            wear_inverse: rng.random_range(0.0..2.0),
            pollution: rng.random_range(0.1..2.0),
        }),
    }
}

/// Edge cost written out independently of the library's cost code.
pub fn oracle_cost(model: &EdgeCostModel, s: &Segment, j: f64, rates: &[f64]) -> f64 {
    let rate = rates[s.id.0];
    match model {
        EdgeCostModel::TravelTime => s.base_travel_time,
        EdgeCostModel::WearProportional => j * s.quality,
        EdgeCostModel::WearInverse => j / s.quality,
        EdgeCostModel::PollutionExposure => rate * s.base_travel_time,
        EdgeCostModel::WeightedSum(w) => {
            w.travel_time * s.base_travel_time
                + w.wear_proportional * j * s.quality
                + w.wear_inverse * j / s.quality
                + w.pollution * rate * s.base_travel_time
        }
    }
}

/// Every simple path from `origin` to `destination`, as segment-id lists.
pub fn simple_paths(net: &RoadNetwork, origin: NodeId, destination: NodeId) -> Vec<Vec<SegmentId>> {
    fn walk(
        net: &RoadNetwork,
        at: NodeId,
        destination: NodeId,
        visited: &mut Vec<bool>,
        path: &mut Vec<SegmentId>,
        out: &mut Vec<Vec<SegmentId>>,
    ) {
        if at == destination {
            out.push(path.clone());
            return;
        }
        for seg in net.segments().iter().filter(|s| s.from == at) {
            if visited[seg.to.0] {
                continue;
            }
            visited[seg.to.0] = true;
            path.push(seg.id);
            walk(net, seg.to, destination, visited, path, out);
            path.pop();
            visited[seg.to.0] = false;
        }
    }
    let mut visited = vec![false; net.node_count()];
    visited[origin.0] = true;
    let mut out = Vec::new();
    walk(net, origin, destination, &mut visited, &mut Vec::new(), &mut out);
    out
}

/// Brute-force minimum cost and the lexicographically smallest path attaining it
/// (exact comparison; use with integer costs when checking the path itself).
pub fn brute_force(
    net: &RoadNetwork,
    origin: NodeId,
    destination: NodeId,
    cost: impl Fn(&Segment) -> f64,
) -> (f64, Vec<SegmentId>) {
    let mut best = (f64::INFINITY, Vec::new());
    for path in simple_paths(net, origin, destination) {
        let c: f64 = path.iter().map(|s| cost(&net.segments()[s.0])).sum();
        if c < best.0 || (c == best.0 && path < best.1) {
            best = (c, path);
        }
    }
    best
}
