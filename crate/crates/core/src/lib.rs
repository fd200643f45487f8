//! Portable sensor-network algorithms written against small facet contracts
//! (radio, timer, clock, debug), together with the pieces needed to run and
//! check them on a desk:
//!
//! - [`kernel`]: identifiers, errors, callback registries and the facet traits.
//! - [`pstl`]: fixed-capacity vector, map and list.
//! - [`wire`]: big-endian, byte-wise serialization and the frame layouts.
//! - [`pmp`]: allocation-free multiprecision arithmetic.
//! - [`simnet`]: a deterministic discrete-event network simulator providing
//!   facet models.
//! - [`routing`]: flooding, tree converge-cast, DSDV and DSR.
//! - [`crypto`]: cipher models, secure routing, virtual radio and debug
//!   forwarding combinators.
//! - [`harness`]: scenario files, runs, reports and paired-run comparison.

pub mod crypto;
pub mod harness;
pub mod kernel;
pub mod pmp;
pub mod pstl;
pub mod routing;
pub mod simnet;
pub mod wire;

pub use kernel::{Error, NodeId, Result, MTU};
