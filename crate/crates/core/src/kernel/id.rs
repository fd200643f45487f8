use std::fmt;

use serde::{Deserialize, Serialize};

/// Simulated or platform time in milliseconds.
pub type Millis = u64;

/// Logical network address of a node.
///
/// [`NodeId::BROADCAST`] is reserved and never names a concrete node.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl NodeId {
    pub const BROADCAST: NodeId = NodeId(u64::MAX);

    pub const fn new(value: u64) -> Self {
        NodeId(value)
    }

    pub const fn get(self) -> u64 {
        self.0
    }

    pub const fn is_broadcast(self) -> bool {
        self.0 == u64::MAX
    }
}

impl From<u64> for NodeId {
    fn from(value: u64) -> Self {
        NodeId(value)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_broadcast() {
            f.write_str("*")
        } else {
            write!(f, "{}", self.0)
        }
    }
}
