use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kernel::{Millis, NodeId};
use crate::simnet::{SimRng, Topology};

/// Bytes every application payload needs for its message index.
pub const MIN_PAYLOAD: usize = 4;

/// A validation failure, tagged with the offending field.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid {field}: {message}")]
pub struct ScenarioError {
    pub field: &'static str,
    pub message: String,
}

impl ScenarioError {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        ScenarioError {
            field,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Flood,
    Tree,
    Dsdv,
    Dsr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Flood,
        Algorithm::Tree,
        Algorithm::Dsdv,
        Algorithm::Dsr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Flood => "flood",
            Algorithm::Tree => "tree",
            Algorithm::Dsdv => "dsdv",
            Algorithm::Dsr => "dsr",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| ScenarioError::new("algo", format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CryptoChoice {
    None,
    Identity,
    Xor,
}

impl CryptoChoice {
    pub const ALL: [CryptoChoice; 3] = [
        CryptoChoice::None,
        CryptoChoice::Identity,
        CryptoChoice::Xor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CryptoChoice::None => "none",
            CryptoChoice::Identity => "identity",
            CryptoChoice::Xor => "xor",
        }
    }
}

impl fmt::Display for CryptoChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CryptoChoice {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ScenarioError::new("crypto", format!("unknown crypto {s:?}")))
    }
}

/// One application message to inject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficItem {
    pub at_ms: Millis,
    pub src: NodeId,
    pub dst: NodeId,
    pub payload_len: usize,
}

/// Parses `at_ms src dst payload_len` lines. Blank lines and `#` comments
/// are skipped.
pub fn parse_traffic(text: &str) -> Result<Vec<TrafficItem>, ScenarioError> {
    let mut items = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| ScenarioError::new("traffic", format!("line {}: {what}", i + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [at, src, dst, len] = fields[..] else {
            return Err(bad("expected `at_ms src dst payload_len`"));
        };
        items.push(TrafficItem {
            at_ms: at.parse().map_err(|_| bad("bad at_ms"))?,
            src: NodeId(src.parse().map_err(|_| bad("bad src"))?),
            dst: NodeId(dst.parse().map_err(|_| bad("bad dst"))?),
            payload_len: len.parse().map_err(|_| bad("bad payload_len"))?,
        });
    }
    Ok(items)
}

/// Messages per run in a paired comparison.
pub const DEFAULT_TRAFFIC_COUNT: usize = 200;

/// Shape of generated traffic: `count` messages, one every `interval_ms`
/// from `start_ms`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrafficPlan {
    pub count: usize,
    pub start_ms: Millis,
    pub interval_ms: Millis,
    pub payload_len: usize,
    /// Send everything here instead of to random destinations.
    pub sink: Option<NodeId>,
}

impl Default for TrafficPlan {
    fn default() -> Self {
        TrafficPlan {
            count: DEFAULT_TRAFFIC_COUNT,
            start_ms: 3000,
            interval_ms: 25,
            payload_len: 16,
            sink: None,
        }
    }
}

/// Random source/destination pairs (never a node to itself) following `plan`.
pub fn generate_traffic(
    topology: &Topology,
    plan: &TrafficPlan,
    seed: u64,
) -> Result<Vec<TrafficItem>, ScenarioError> {
    let n = topology.node_count() as u64;
    if n < 2 {
        return Err(ScenarioError::new(
            "topology",
            "need at least two nodes for traffic",
        ));
    }
    if let Some(s) = plan.sink.filter(|s| !topology.contains(*s)) {
        return Err(ScenarioError::new(
            "sink",
            format!("node {s} not in topology"),
        ));
    }
    if plan.payload_len < MIN_PAYLOAD {
        return Err(ScenarioError::new(
            "traffic",
            format!("payload_len must be at least {MIN_PAYLOAD}"),
        ));
    }
    let mut rng = SimRng::new(seed);
    let mut other_than = |avoid: NodeId| NodeId((avoid.get() + 1 + rng.below(n - 1)) % n);
    Ok((0..plan.count)
        .map(|i| {
            let (src, dst) = match plan.sink {
                Some(sink) => (other_than(sink), sink),
                None => {
                    let src = other_than(NodeId(n - 1));
                    (src, other_than(src))
                }
            };
            TrafficItem {
                at_ms: plan.start_ms + i as Millis * plan.interval_ms,
                src,
                dst,
                payload_len: plan.payload_len,
            }
        })
        .collect())
}

/// Inverse of [`parse_traffic`].
pub fn format_traffic(items: &[TrafficItem]) -> String {
    let mut out = String::from("# at_ms src dst payload_len\n");
    for t in items {
        out.push_str(&format!(
            "{} {} {} {}\n",
            t.at_ms,
            t.src.get(),
            t.dst.get(),
            t.payload_len
        ));
    }
    out
}

/// Everything needed for one run.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Name recorded in the report, usually the topology file path.
    pub topology_name: String,
    pub topology: Topology,
    pub algorithm: Algorithm,
    pub crypto: CryptoChoice,
    pub seed: u64,
    pub duration_ms: Millis,
    pub traffic: Vec<TrafficItem>,
    /// Converge-cast root; required for tree routing.
    pub sink: Option<NodeId>,
}

impl Scenario {
    /// Checks everything that can be checked without building the stack.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let n = self.topology.node_count();
        if n == 0 {
            return Err(ScenarioError::new("topology", "no nodes"));
        }
        if self.duration_ms == 0 {
            return Err(ScenarioError::new("duration", "must be positive"));
        }
        match (self.algorithm, self.sink) {
            (Algorithm::Tree, None) => {
                return Err(ScenarioError::new("sink", "tree routing needs a sink"));
            }
            (_, Some(s)) if !self.topology.contains(s) => {
                return Err(ScenarioError::new(
                    "sink",
                    format!("node {s} not in topology"),
                ));
            }
            _ => {}
        }
        for (i, t) in self.traffic.iter().enumerate() {
            let bad =
                |what: String| ScenarioError::new("traffic", format!("entry {}: {what}", i + 1));
            for node in [t.src, t.dst] {
                if !self.topology.contains(node) {
                    return Err(bad(format!("node {node} not in topology")));
                }
            }
            if t.at_ms > self.duration_ms {
                return Err(bad(format!(
                    "at_ms {} after duration {}",
                    t.at_ms, self.duration_ms
                )));
            }
            if t.payload_len < MIN_PAYLOAD {
                return Err(bad(format!("payload_len must be at least {MIN_PAYLOAD}")));
            }
        }
        Ok(())
    }
}
