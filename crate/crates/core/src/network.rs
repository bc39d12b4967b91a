//! Road graph, per-segment pavement quality, and traversal wear with repair.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};
use crate::tables;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SegmentId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for SegmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Planar coordinate in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance_squared(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_squared(other).sqrt()
    }

    /// Point at fraction `t` of the way from `self` to `other`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub position: Point,
}

/// A directed road segment. Two-way roads are two segments that wear independently.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub id: SegmentId,
    pub from: NodeId,
    pub to: NodeId,
    /// Meters.
    pub length: f64,
    /// Free-flow traversal time in seconds.
    pub base_travel_time: f64,
    /// Pavement quality in (0, 1].
    pub quality: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairMode {
    /// A segment whose quality drops below the floor is repaved to 1.0 on the spot.
    #[default]
    ImmediateReset,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WearParams {
    /// Fraction of quality lost per traversal.
    pub epsilon: f64,
    /// Quality below which a segment must be repaired.
    pub quality_floor: f64,
    /// Cost per unit of quality, `j`.
    pub wear_coefficient: f64,
    pub repair_mode: RepairMode,
}

impl Default for WearParams {
    fn default() -> Self {
        WearParams {
            epsilon: 0.01,
            quality_floor: 0.5,
            wear_coefficient: 1.0,
            repair_mode: RepairMode::ImmediateReset,
        }
    }
}

impl WearParams {
    pub fn new(epsilon: f64, quality_floor: f64, wear_coefficient: f64) -> Result<Self> {
        let params = WearParams {
            epsilon,
            quality_floor,
            wear_coefficient,
            repair_mode: RepairMode::ImmediateReset,
        };
        let errors = params.validate("wear");
        if errors.is_empty() {
            Ok(params)
        } else {
            Err(Error::Validation(errors))
        }
    }

    pub fn validate(&self, prefix: &str) -> Vec<FieldError> {
        let mut errors = Vec::new();
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            errors.push(FieldError::new(
                format!("{prefix}.epsilon"),
                format!("must lie in (0, 1), got {}", self.epsilon),
            ));
        }
        if !(self.quality_floor > 0.0 && self.quality_floor < 1.0) {
            errors.push(FieldError::new(
                format!("{prefix}.quality_floor"),
                format!("must lie in (0, 1), got {}", self.quality_floor),
            ));
        }
        if !(self.wear_coefficient > 0.0 && self.wear_coefficient.is_finite()) {
            errors.push(FieldError::new(
                format!("{prefix}.wear_coefficient"),
                format!("must be positive and finite, got {}", self.wear_coefficient),
            ));
        }
        errors
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraversalOutcome {
    pub new_quality: f64,
    pub repaired: bool,
}

/// Quality after `n` repair-free traversals: `q0 * (1 - epsilon)^n`.
pub fn segment_quality_series(q0: f64, epsilon: f64, n: u64) -> f64 {
    let keep = 1.0 - epsilon;
    match i32::try_from(n) {
        Ok(n) => q0 * keep.powi(n),
        Err(_) => q0 * keep.powf(n as f64),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Empty,
    NodeIdMismatch { index: usize, id: NodeId },
    SegmentIdMismatch { index: usize, id: SegmentId },
    NonFinitePosition(NodeId),
    UnknownNode { segment: SegmentId, node: NodeId },
    SelfLoop(SegmentId),
    NonPositiveLength(SegmentId),
    NonPositiveTravelTime(SegmentId),
    QualityOutOfRange(SegmentId),
    NotStronglyConnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "network has no nodes"),
            Violation::NodeIdMismatch { index, id } => {
                write!(f, "node at position {index} has id {id}; ids must be dense and 0-based")
            }
            Violation::SegmentIdMismatch { index, id } => {
                write!(f, "segment at position {index} has id {id}; ids must be dense and 0-based")
            }
            Violation::NonFinitePosition(n) => write!(f, "node {n} has a non-finite position"),
            Violation::UnknownNode { segment, node } => {
                write!(f, "segment {segment} references unknown node {node}")
            }
            Violation::SelfLoop(s) => write!(f, "segment {s} starts and ends at the same node"),
            Violation::NonPositiveLength(s) => write!(f, "segment {s} has non-positive length"),
            Violation::NonPositiveTravelTime(s) => {
                write!(f, "segment {s} has non-positive base travel time")
            }
            Violation::QualityOutOfRange(s) => write!(f, "segment {s} has quality outside (0, 1]"),
            Violation::NotStronglyConnected => write!(f, "network is not strongly connected"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    nodes: Vec<Node>,
    segments: Vec<Segment>,
    outgoing: Vec<Vec<SegmentId>>,
    incoming: Vec<Vec<SegmentId>>,
    repairs: Vec<u64>,
}

impl RoadNetwork {
    /// Assembles a network without validating it; see [`RoadNetwork::validate`].
    /// Segments with out-of-range endpoints are kept but left out of the adjacency.
    pub fn from_parts(nodes: Vec<Node>, segments: Vec<Segment>) -> Self {
        let mut outgoing = vec![Vec::new(); nodes.len()];
        let mut incoming = vec![Vec::new(); nodes.len()];
        for (idx, seg) in segments.iter().enumerate() {
            if seg.from.0 < nodes.len() && seg.to.0 < nodes.len() {
                outgoing[seg.from.0].push(SegmentId(idx));
                incoming[seg.to.0].push(SegmentId(idx));
            }
        }
        let repairs = vec![0; segments.len()];
        RoadNetwork {
            nodes,
            segments,
            outgoing,
            incoming,
            repairs,
        }
    }

    /// Like [`RoadNetwork::from_parts`] but rejects networks with violations.
    pub fn new(nodes: Vec<Node>, segments: Vec<Segment>) -> Result<Self> {
        let network = Self::from_parts(nodes, segments);
        network.ensure_valid()?;
        Ok(network)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(
                violations
                    .iter()
                    .map(|v| FieldError::new("network", v.to_string()))
                    .collect(),
            ))
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0)
    }

    pub fn segment(&self, id: SegmentId) -> Option<&Segment> {
        self.segments.get(id.0)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn outgoing(&self, node: NodeId) -> &[SegmentId] {
        &self.outgoing[node.0]
    }

    pub fn incoming(&self, node: NodeId) -> &[SegmentId] {
        &self.incoming[node.0]
    }

    /// Number of repairs performed on each segment so far.
    pub fn repair_counts(&self) -> &[u64] {
        &self.repairs
    }

    pub fn total_repairs(&self) -> u64 {
        self.repairs.iter().sum()
    }

    pub fn set_quality(&mut self, id: SegmentId, quality: f64) -> Result<()> {
        if !(quality > 0.0 && quality <= 1.0) {
            return Err(Error::Usage(format!("quality {quality} outside (0, 1]")));
        }
        let seg = self
            .segments
            .get_mut(id.0)
            .ok_or_else(|| Error::Usage(format!("unknown segment id {id}")))?;
        seg.quality = quality;
        Ok(())
    }

    /// Wears `segment` by one traversal, repairing it if it falls below the floor.
    pub fn apply_traversal(
        &mut self,
        segment: SegmentId,
        params: &WearParams,
    ) -> Result<TraversalOutcome> {
        let seg = self
            .segments
            .get_mut(segment.0)
            .ok_or_else(|| Error::Usage(format!("unknown segment id {segment}")))?;
        let worn = seg.quality * (1.0 - params.epsilon);
        if worn < params.quality_floor {
            match params.repair_mode {
                RepairMode::ImmediateReset => seg.quality = 1.0,
            }
            self.repairs[segment.0] += 1;
            Ok(TraversalOutcome {
                new_quality: seg.quality,
                repaired: true,
            })
        } else {
            seg.quality = worn;
            Ok(TraversalOutcome {
                new_quality: worn,
                repaired: false,
            })
        }
    }

    /// Lists every broken invariant; empty iff the network is usable for routing.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            out.push(Violation::Empty);
            return out;
        }
        for (index, node) in self.nodes.iter().enumerate() {
            if node.id.0 != index {
                out.push(Violation::NodeIdMismatch { index, id: node.id });
            }
            if !node.position.is_finite() {
                out.push(Violation::NonFinitePosition(node.id));
            }
        }
        let mut endpoints_ok = true;
        for (index, seg) in self.segments.iter().enumerate() {
            if seg.id.0 != index {
                out.push(Violation::SegmentIdMismatch { index, id: seg.id });
            }
            for node in [seg.from, seg.to] {
                if node.0 >= self.nodes.len() {
                    endpoints_ok = false;
                    out.push(Violation::UnknownNode {
                        segment: seg.id,
                        node,
                    });
                }
            }
            if seg.from == seg.to {
                out.push(Violation::SelfLoop(seg.id));
            }
            if !(seg.length > 0.0 && seg.length.is_finite()) {
                out.push(Violation::NonPositiveLength(seg.id));
            }
            if !(seg.base_travel_time > 0.0 && seg.base_travel_time.is_finite()) {
                out.push(Violation::NonPositiveTravelTime(seg.id));
            }
            if !(seg.quality > 0.0 && seg.quality <= 1.0) {
                out.push(Violation::QualityOutOfRange(seg.id));
            }
        }
        if endpoints_ok && !self.is_strongly_connected() {
            out.push(Violation::NotStronglyConnected);
        }
        out
    }

    pub fn is_strongly_connected(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return false;
        }
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            let mut count = 1;
            while let Some(u) = queue.pop_front() {
                let edges = if forward {
                    &self.outgoing[u]
                } else {
                    &self.incoming[u]
                };
                for sid in edges {
                    let seg = &self.segments[sid.0];
                    let v = if forward { seg.to.0 } else { seg.from.0 };
                    if !seen[v] {
                        seen[v] = true;
                        count += 1;
                        queue.push_back(v);
                    }
                }
            }
            count
        };
        reach(true) == n && reach(false) == n
    }

    /// Serializes to the `[nodes]` / `[segments]` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::from("[nodes]\nid,x,y\n");
        for node in &self.nodes {
            out.push_str(&format!("{},{},{}\n", node.id, node.position.x, node.position.y));
        }
        out.push_str("\n[segments]\nid,from,to,length_m,base_time_s,quality\n");
        for s in &self.segments {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.id, s.from, s.to, s.length, s.base_travel_time, s.quality
            ));
        }
        out
    }

    /// Parses the text format and validates the result.
    pub fn from_text(source: &str, text: &str) -> Result<Self> {
        let sections = tables::parse(source, text)?;
        let mut nodes = None;
        let mut segments = None;
        for section in &sections {
            match section.name.as_str() {
                "nodes" => {
                    section.expect_columns(source, &["id", "x", "y"])?;
                    let mut parsed = Vec::with_capacity(section.rows.len());
                    for row in &section.rows {
                        parsed.push(Node {
                            id: NodeId(row.parse(source, 0, "id")?),
                            position: Point::new(row.parse(source, 1, "x")?, row.parse(source, 2, "y")?),
                        });
                    }
                    nodes = Some(parsed);
                }
                "segments" => {
                    section.expect_columns(
                        source,
                        &["id", "from", "to", "length_m", "base_time_s", "quality"],
                    )?;
                    let mut parsed = Vec::with_capacity(section.rows.len());
                    for row in &section.rows {
                        parsed.push(Segment {
                            id: SegmentId(row.parse(source, 0, "id")?),
                            from: NodeId(row.parse(source, 1, "from")?),
                            to: NodeId(row.parse(source, 2, "to")?),
                            length: row.parse(source, 3, "length_m")?,
                            base_travel_time: row.parse(source, 4, "base_time_s")?,
                            quality: row.parse(source, 5, "quality")?,
                        });
                    }
                    segments = Some(parsed);
                }
                other => {
                    return Err(Error::Parse {
                        path: source.to_string(),
                        line: section.line,
                        message: format!("unknown section [{other}]"),
                    })
                }
            }
        }
        let missing = |name: &str| Error::Parse {
            path: source.to_string(),
            line: text.lines().count().max(1),
            message: format!("missing [{name}] section"),
        };
        let mut nodes = nodes.ok_or_else(|| missing("nodes"))?;
        let mut segments = segments.ok_or_else(|| missing("segments"))?;
        // rows may be listed in any order; ids must still be dense
        nodes.sort_by_key(|n| n.id);
        segments.sort_by_key(|s| s.id);
        let network = RoadNetwork::from_parts(nodes, segments);
        network.ensure_valid()?;
        Ok(network)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read network file {}: {e}", path.display())))?;
        Self::from_text(&path.display().to_string(), &text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}
