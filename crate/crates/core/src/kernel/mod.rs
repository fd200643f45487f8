//! Facet contracts and the primitives shared by every algorithm.
//!
//! Algorithms never talk to a platform directly. They are handed facet
//! instances (radio, timer, clock, debug) at construction time and program
//! against the traits in [`facet`]. Any type satisfying a trait can be
//! swapped in, including another algorithm: a routing model is itself a
//! radio, which is what makes protocol layers stackable.

mod error;
mod facet;
mod id;
mod registry;

pub use error::{Error, Result};
pub use facet::{
    Clock, DebugOutput, ExtendedRadio, ExtendedReceiveHandler, Radio, ReceiveHandler, Routing,
    Timer, TimerHandler,
};
pub use id::{Millis, NodeId};
pub use registry::{CallbackHandle, CallbackRegistry};

/// Largest payload a physical radio frame carries, in bytes.
pub const MTU: usize = 116;

/// Receive handlers a single facet instance can hold.
pub const HANDLER_CAPACITY: usize = 4;

/// Pending one-shot timers a single node can hold.
pub const TIMER_CAPACITY: usize = 64;
