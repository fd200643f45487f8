use std::cell::{Cell, RefCell};
use std::rc::Rc;

use crate::kernel::{Error, NodeId, Result, MTU};
use crate::pstl::StaticMap;

/// Key length accepted by [`XorCipher`].
pub const KEY_LEN: usize = 16;

/// Peers a node can hold keys for.
pub const KEY_RING_CAPACITY: usize = 64;

/// Length-preserving symmetric cipher with per-peer keys.
///
/// `encrypt` and `decrypt` use the key installed for `peer` and write exactly
/// `input.len()` bytes to the front of `output`.
pub trait Crypto {
    fn enable(&self) -> Result<()>;

    fn disable(&self);

    fn key_setup(&self, peer: NodeId, key: &[u8]) -> Result<()>;

    fn has_key(&self, peer: NodeId) -> bool;

    fn encrypt(&self, peer: NodeId, input: &[u8], output: &mut [u8]) -> Result<()>;

    fn decrypt(&self, peer: NodeId, input: &[u8], output: &mut [u8]) -> Result<()>;
}

fn check_lengths(input: &[u8], output: &[u8]) -> Result<()> {
    if input.len() > MTU || output.len() < input.len() {
        return Err(Error::PayloadTooLarge);
    }
    Ok(())
}

#[derive(Default)]
struct KeyRing {
    enabled: Cell<bool>,
    keys: RefCell<StaticMap<NodeId, [u8; KEY_LEN], KEY_RING_CAPACITY>>,
}

impl KeyRing {
    fn install(&self, peer: NodeId, key: [u8; KEY_LEN]) -> Result<()> {
        self.keys.borrow_mut().insert(peer, key).map(drop)
    }

    fn key(&self, peer: NodeId) -> Result<[u8; KEY_LEN]> {
        self.keys.borrow().get(&peer).copied().ok_or(Error::NoKey)
    }
}

/// Passes bytes through unchanged. Any key is accepted.
#[derive(Clone, Default)]
pub struct IdentityCrypto {
    ring: Rc<KeyRing>,
}

impl IdentityCrypto {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_enabled(&self) -> bool {
        self.ring.enabled.get()
    }
}

impl Crypto for IdentityCrypto {
    fn enable(&self) -> Result<()> {
        self.ring.enabled.set(true);
        Ok(())
    }

    fn disable(&self) {
        self.ring.enabled.set(false);
    }

    fn key_setup(&self, peer: NodeId, _key: &[u8]) -> Result<()> {
        self.ring.install(peer, [0; KEY_LEN])
    }

    fn has_key(&self, peer: NodeId) -> bool {
        self.ring.key(peer).is_ok()
    }

    fn encrypt(&self, _peer: NodeId, input: &[u8], output: &mut [u8]) -> Result<()> {
        check_lengths(input, output)?;
        output[..input.len()].copy_from_slice(input);
        Ok(())
    }

    fn decrypt(&self, peer: NodeId, input: &[u8], output: &mut [u8]) -> Result<()> {
        self.encrypt(peer, input, output)
    }
}

/// Repeating-key XOR with a per-block tweak: keystream byte `i` is
/// `key[i % 16] ^ (i / 16) as u8`. Encryption and decryption coincide.
///
/// This is a structural stand-in for a real cipher and offers no security.
#[derive(Clone, Default)]
pub struct XorCipher {
    ring: Rc<KeyRing>,
}

impl XorCipher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_enabled(&self) -> bool {
        self.ring.enabled.get()
    }

    pub fn keystream_byte(key: &[u8; KEY_LEN], i: usize) -> u8 {
        key[i % KEY_LEN] ^ (i / KEY_LEN) as u8
    }

    pub fn apply(key: &[u8; KEY_LEN], input: &[u8], output: &mut [u8]) {
        for (i, (o, b)) in output.iter_mut().zip(input).enumerate() {
            *o = b ^ Self::keystream_byte(key, i);
        }
    }
}

impl Crypto for XorCipher {
    fn enable(&self) -> Result<()> {
        self.ring.enabled.set(true);
        Ok(())
    }

    fn disable(&self) {
        self.ring.enabled.set(false);
    }

    fn key_setup(&self, peer: NodeId, key: &[u8]) -> Result<()> {
        let key: [u8; KEY_LEN] = key.try_into().map_err(|_| Error::InvalidKey)?;
        self.ring.install(peer, key)
    }

    fn has_key(&self, peer: NodeId) -> bool {
        self.ring.key(peer).is_ok()
    }

    fn encrypt(&self, peer: NodeId, input: &[u8], output: &mut [u8]) -> Result<()> {
        check_lengths(input, output)?;
        let key = self.ring.key(peer)?;
        Self::apply(&key, input, output);
        Ok(())
    }

    fn decrypt(&self, peer: NodeId, input: &[u8], output: &mut [u8]) -> Result<()> {
        self.encrypt(peer, input, output)
    }
}

impl<C: Crypto + ?Sized> Crypto for Rc<C> {
    fn enable(&self) -> Result<()> {
        (**self).enable()
    }

    fn disable(&self) {
        (**self).disable()
    }

    fn key_setup(&self, peer: NodeId, key: &[u8]) -> Result<()> {
        (**self).key_setup(peer, key)
    }

    fn has_key(&self, peer: NodeId) -> bool {
        (**self).has_key(peer)
    }

    fn encrypt(&self, peer: NodeId, input: &[u8], output: &mut [u8]) -> Result<()> {
        (**self).encrypt(peer, input, output)
    }

    fn decrypt(&self, peer: NodeId, input: &[u8], output: &mut [u8]) -> Result<()> {
        (**self).decrypt(peer, input, output)
    }
}
