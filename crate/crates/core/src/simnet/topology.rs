use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::SimRng;
use crate::kernel::{Millis, NodeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: NodeId },
    #[error("line {line}: duplicate link {a}-{b}")]
    DuplicateLink { line: usize, a: NodeId, b: NodeId },
    #[error("line {line}: node {node} is not declared")]
    UnknownNode { line: usize, node: NodeId },
    #[error("no link between {0} and {1}")]
    NoSuchLink(NodeId, NodeId),
}

/// Properties of an undirected link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub latency_ms: Millis,
    pub drop_prob: f64,
    pub quality: u8,
}

impl Default for Link {
    fn default() -> Self {
        Link {
            latency_ms: 1,
            drop_prob: 0.0,
            quality: 255,
        }
    }
}

/// Nodes `0..n` and the undirected links between them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Topology {
    node_count: usize,
    links: BTreeMap<(NodeId, NodeId), Link>,
    neighbors: Vec<Vec<NodeId>>,
}

fn key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Topology {
    pub fn new(node_count: usize) -> Self {
        Topology {
            node_count,
            links: BTreeMap::new(),
            neighbors: vec![Vec::new(); node_count],
        }
    }

    /// Path `0 - 1 - ... - (n-1)` with default links.
    pub fn path(n: usize) -> Self {
        let mut t = Topology::new(n);
        for i in 1..n {
            t.add_link(NodeId(i as u64 - 1), NodeId(i as u64), Link::default())
                .expect("fresh path link");
        }
        t
    }

    /// Connected graph on `n` nodes with `edges` links (capped at the
    /// complete graph): a random spanning tree plus uniformly drawn extras.
    pub fn random_connected(n: usize, edges: usize, seed: u64) -> Self {
        let mut rng = SimRng::new(seed);
        let mut t = Topology::new(n);
        for i in 1..n {
            let j = rng.below(i as u64);
            t.add_link(NodeId(i as u64), NodeId(j), Link::default())
                .expect("tree edges are distinct");
        }
        let target = edges.min(n * n.saturating_sub(1) / 2);
        while t.link_count() < target {
            let a = NodeId(rng.below(n as u64));
            let b = NodeId(rng.below(n as u64));
            if a != b && !t.has_link(a, b) {
                t.add_link(a, b, Link::default()).expect("checked");
            }
        }
        t
    }

    pub fn parse(text: &str) -> Result<Self, TopologyError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (first, header) = lines.next().ok_or(TopologyError::Parse {
            line: 1,
            message: "missing node count".into(),
        })?;
        let node_count: usize = header.parse().map_err(|_| TopologyError::Parse {
            line: first,
            message: format!("invalid node count {header:?}"),
        })?;
        let mut topology = Topology::new(node_count);
        for (line, text) in lines {
            let fields: Vec<&str> = text.split_whitespace().collect();
            if !(2..=5).contains(&fields.len()) {
                return Err(TopologyError::Parse {
                    line,
                    message: format!("expected 2 to 5 fields, found {}", fields.len()),
                });
            }
            let field = |i: usize, default: &'static str| fields.get(i).copied().unwrap_or(default);
            let parse_err = |message: String| TopologyError::Parse { line, message };
            let a: u64 = fields[0]
                .parse()
                .map_err(|_| parse_err(format!("invalid node {:?}", fields[0])))?;
            let b: u64 = fields[1]
                .parse()
                .map_err(|_| parse_err(format!("invalid node {:?}", fields[1])))?;
            let latency_ms: Millis = field(2, "1")
                .parse()
                .map_err(|_| parse_err(format!("invalid latency {:?}", fields[2])))?;
            let drop_prob: f64 = field(3, "0")
                .parse()
                .map_err(|_| parse_err(format!("invalid drop probability {:?}", fields[3])))?;
            if !(0.0..=1.0).contains(&drop_prob) {
                return Err(parse_err(format!(
                    "drop probability {drop_prob} outside [0, 1]"
                )));
            }
            let quality: u8 = field(4, "255")
                .parse()
                .map_err(|_| parse_err(format!("invalid quality {:?}", fields[4])))?;
            let (a, b) = (NodeId(a), NodeId(b));
            for node in [a, b] {
                if !topology.contains(node) {
                    return Err(TopologyError::UnknownNode { line, node });
                }
            }
            if a == b {
                return Err(TopologyError::SelfLoop { line, node: a });
            }
            if topology.has_link(a, b) {
                return Err(TopologyError::DuplicateLink { line, a, b });
            }
            topology
                .add_link(
                    a,
                    b,
                    Link {
                        latency_ms,
                        drop_prob,
                        quality,
                    },
                )
                .expect("validated");
        }
        Ok(topology)
    }

    /// Serializes back to the edge-list format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.node_count);
        for ((a, b), l) in &self.links {
            writeln!(
                out,
                "{a} {b} {} {} {}",
                l.latency_ms, l.drop_prob, l.quality
            )
            .expect("write to String");
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count as u64).map(NodeId)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.get() < self.node_count as u64
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> impl Iterator<Item = (NodeId, NodeId, &Link)> {
        self.links.iter().map(|((a, b), l)| (*a, *b, l))
    }

    pub fn add_link(&mut self, a: NodeId, b: NodeId, link: Link) -> Result<(), TopologyError> {
        for node in [a, b] {
            if !self.contains(node) {
                return Err(TopologyError::UnknownNode { line: 0, node });
            }
        }
        if a == b {
            return Err(TopologyError::SelfLoop { line: 0, node: a });
        }
        if self.links.insert(key(a, b), link).is_some() {
            return Err(TopologyError::DuplicateLink { line: 0, a, b });
        }
        for (x, y) in [(a, b), (b, a)] {
            let list = &mut self.neighbors[x.get() as usize];
            let pos = list.binary_search(&y).unwrap_err();
            list.insert(pos, y);
        }
        Ok(())
    }

    pub fn remove_link(&mut self, a: NodeId, b: NodeId) -> Result<Link, TopologyError> {
        let link = self
            .links
            .remove(&key(a, b))
            .ok_or(TopologyError::NoSuchLink(a, b))?;
        for (x, y) in [(a, b), (b, a)] {
            self.neighbors[x.get() as usize].retain(|n| *n != y);
        }
        Ok(link)
    }

    pub fn link(&self, a: NodeId, b: NodeId) -> Option<&Link> {
        self.links.get(&key(a, b))
    }

    pub fn link_mut(&mut self, a: NodeId, b: NodeId) -> Option<&mut Link> {
        self.links.get_mut(&key(a, b))
    }

    pub fn has_link(&self, a: NodeId, b: NodeId) -> bool {
        self.link(a, b).is_some()
    }

    pub fn link_quality(&self, a: NodeId, b: NodeId) -> Result<u8, TopologyError> {
        self.link(a, b)
            .map(|l| l.quality)
            .ok_or(TopologyError::NoSuchLink(a, b))
    }

    /// Neighbors in ascending id order.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        self.neighbors
            .get(node.get() as usize)
            .map_or(&[], Vec::as_slice)
    }

    pub fn max_latency(&self) -> Millis {
        self.links.values().map(|l| l.latency_ms).max().unwrap_or(0)
    }

    /// Applies `f` to every link, e.g. to set a uniform drop probability.
    pub fn for_each_link_mut(&mut self, f: impl FnMut(&mut Link)) {
        self.links.values_mut().for_each(f);
    }
}

impl FromStr for Topology {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, TopologyError> {
        Topology::parse(s)
    }
}
