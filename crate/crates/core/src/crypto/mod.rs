//! Cipher models and the combinators that stack them with routing.
//!
//! [`SecureRouting`] encrypts on the way down and decrypts on the way up,
//! [`VirtualRadio`] exposes a routing model as a plain radio, and
//! [`DebugOverRouting`] ships debug text to a gateway node.

mod cipher;
mod debug;
mod secure;
mod virtual_radio;

pub use cipher::{Crypto, IdentityCrypto, XorCipher, KEY_LEN, KEY_RING_CAPACITY};
pub use debug::{DebugGateway, DebugOverRouting, DEBUG_TEXT_LIMIT};
pub use secure::{SecureRouting, SecureState};
pub use virtual_radio::{AppAddress, VirtualRadio, VirtualState, ADDRESS_MAP_CAPACITY};
