//! Fixed-capacity containers.
//!
//! Every container keeps its elements in an in-place array sized by a const
//! generic. Nothing allocates after construction; running out of room is
//! reported as [`Error::BufferFull`](crate::kernel::Error::BufferFull) and
//! leaves the container untouched.

mod list;
mod map;
mod vector;

pub use list::StaticList;
pub use map::StaticMap;
pub use vector::StaticVector;
