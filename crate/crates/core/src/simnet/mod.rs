//! Deterministic discrete-event network simulator.
//!
//! A [`Simulator`] owns a [`Topology`], a seeded generator and a queue of
//! events ordered by `(fire_at, seq)`. It hands out per-node facet models
//! ([`SimRadio`], [`SimTimer`], [`SimClock`], [`SimDebug`]) that algorithms
//! are built on. Node-local processing takes no simulated time; only link
//! latency and timers advance the clock.

mod facets;
mod rng;
mod scheduler;
mod topology;

pub use facets::{SimClock, SimDebug, SimFacets, SimRadio, SimTimer};
pub use rng::SimRng;
pub use scheduler::{EventTrace, KindStats, LinkStats, Simulator, TraceEvent, TraceKind};
pub use topology::{Link, Topology, TopologyError};
