//! Synthetic road networks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{Node, NodeId, Point, RoadNetwork, Segment, SegmentId};
use crate::seeds;
use crate::spatial::Bounds;

/// Regeneration attempts before a random geometric network is declared disconnected.
pub const GEOMETRIC_ATTEMPTS: u64 = 100;

fn push_pair(segments: &mut Vec<Segment>, a: NodeId, b: NodeId, length: f64, time: f64) {
    for (from, to) in [(a, b), (b, a)] {
        segments.push(Segment {
            id: SegmentId(segments.len()),
            from,
            to,
            length,
            base_travel_time: time,
            quality: 1.0,
        });
    }
}

/// 4-connected lattice; node `(r, c)` has id `r * cols + c` and sits at
/// `(c * edge_length, r * edge_length)`.
pub fn build_grid(rows: usize, cols: usize, edge_length: f64, edge_time: f64) -> Result<RoadNetwork> {
    if rows < 2 || cols < 2 {
        return Err(Error::Config(format!("grid needs at least 2x2 nodes, got {rows}x{cols}")));
    }
    if !(edge_length > 0.0 && edge_length.is_finite() && edge_time > 0.0 && edge_time.is_finite()) {
        return Err(Error::Config("grid edge length and time must be positive".into()));
    }
    let id = |r: usize, c: usize| NodeId(r * cols + c);
    let mut nodes = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            nodes.push(Node {
                id: id(r, c),
                position: Point::new(c as f64 * edge_length, r as f64 * edge_length),
            });
        }
    }
    let mut segments = Vec::with_capacity(2 * (rows * (cols - 1) + (rows - 1) * cols));
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                push_pair(&mut segments, id(r, c), id(r, c + 1), edge_length, edge_time);
            }
            if r + 1 < rows {
                push_pair(&mut segments, id(r, c), id(r + 1, c), edge_length, edge_time);
            }
        }
    }
    RoadNetwork::new(nodes, segments)
}

/// One draw of a random geometric graph: `n` uniform nodes, two-way roads
/// between every pair closer than `radius`. May be disconnected.
pub fn random_geometric_once(
    n: usize,
    radius: f64,
    bounds: &Bounds,
    speed: f64,
    seed: u64,
) -> RoadNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<Node> = (0..n)
        .map(|i| Node {
            id: NodeId(i),
            position: Point::new(
                rng.random_range(bounds.min_x..bounds.max_x),
                rng.random_range(bounds.min_y..bounds.max_y),
            ),
        })
        .collect();
    let mut segments = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = nodes[i].position.distance(&nodes[j].position);
            if d > 0.0 && d <= radius {
                push_pair(&mut segments, NodeId(i), NodeId(j), d, d / speed);
            }
        }
    }
    RoadNetwork::from_parts(nodes, segments)
}

/// Random geometric graph, redrawn with successive sub-seeds until strongly connected.
pub fn build_random_geometric(
    n: usize,
    radius: f64,
    bounds: &Bounds,
    speed: f64,
    seed: u64,
) -> Result<RoadNetwork> {
    if n < 2 {
        return Err(Error::Config(format!("random geometric network needs n >= 2, got {n}")));
    }
    if !(radius > 0.0 && radius.is_finite()) || !(speed > 0.0 && speed.is_finite()) {
        return Err(Error::Config("radius and speed must be positive".into()));
    }
    if !bounds.is_valid() {
        return Err(Error::Config("bounds must be finite and ordered".into()));
    }
    for attempt in 0..GEOMETRIC_ATTEMPTS {
        let net = random_geometric_once(n, radius, bounds, speed, seeds::derive(&[seed, attempt]));
        if net.validate().is_empty() {
            return Ok(net);
        }
    }
    Err(Error::Config(format!(
        "random geometric network (n={n}, radius={radius} m) is not strongly connected after {GEOMETRIC_ATTEMPTS} attempts; increase the radius"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        for (rows, cols, nodes, segs) in [(2, 2, 4, 8), (3, 3, 9, 24), (2, 3, 6, 14)] {
            let g = build_grid(rows, cols, 100.0, 10.0).unwrap();
            assert_eq!(g.node_count(), nodes);
            assert_eq!(g.segment_count(), segs);
            assert!(g.validate().is_empty());
            assert!(g.segments().iter().all(|s| s.quality == 1.0));
        }
        let g = build_grid(3, 4, 50.0, 5.0).unwrap();
        assert_eq!(g.nodes()[6].position, Point::new(100.0, 50.0));
    }

    #[test]
    fn grid_rejects_degenerate_params() {
        assert!(build_grid(1, 5, 1.0, 1.0).is_err());
        assert!(build_grid(3, 3, 0.0, 1.0).is_err());
        assert!(build_grid(3, 3, 1.0, -1.0).is_err());
    }

    #[test]
    fn geometric_is_deterministic_and_connected() {
        let b = Bounds::from([0.0, 0.0, 1000.0, 1000.0]);
        let a = build_random_geometric(30, 400.0, &b, 10.0, 3).unwrap();
        let c = build_random_geometric(30, 400.0, &b, 10.0, 3).unwrap();
        assert_eq!(a, c);
        assert!(a.validate().is_empty());
        for s in a.segments() {
            assert!((s.base_travel_time - s.length / 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_too_sparse_fails() {
        let b = Bounds::from([0.0, 0.0, 1000.0, 1000.0]);
        let err = build_random_geometric(20, 1.0, &b, 10.0, 3).unwrap_err();
        assert!(err.to_string().contains("strongly connected"));
    }
}
