//! Network-byte-order serialization.
//!
//! Multi-byte integers are written and read one byte at a time, most
//! significant first, so the encoding is independent of host endianness and
//! never performs an unaligned multi-byte load or store.

mod buffer;
mod message;

pub use buffer::{Reader, Width, WireError, Writer};
pub use message::{
    AdvertisedRoute, Frame, Message, MessageKind, Path, MAX_PATH, MAX_UPDATE_ROUTES,
};
