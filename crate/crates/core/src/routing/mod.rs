//! Routing models. Each is a [`Layer`] over a lower radio and implements
//! both [`Radio`](crate::kernel::Radio) and [`Routing`](crate::kernel::Routing),
//! so any of them can serve as the radio of another layer.

mod dsdv;
mod dsr;
mod flood;
mod layer;
mod tree;

pub use dsdv::{
    Dsdv, DsdvConfig, DsdvEntry, DsdvState, DsdvStats, DSDV_TABLE_CAPACITY, HOPS_INFINITE,
};
pub use dsr::{Dsr, DsrConfig, DsrState, DsrStats, DSR_CACHE_CAPACITY, DSR_PENDING_CAPACITY};
pub use flood::{FloodState, FloodStats, Flooding, SEEN_CAPACITY, TTL_MAX};
pub use layer::{Base, Ctx, Delivery, Layer, ProtocolState, RoutingState};
pub use tree::{TreeConfig, TreeRouting, TreeState, TreeStats};
