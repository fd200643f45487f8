use super::cipher::Crypto;
use crate::kernel::{Error, NodeId, Result, Routing, MTU};
use crate::routing::{Base, Ctx, Delivery, Layer, ProtocolState, RoutingState};
use crate::wire::{Message, MessageKind};

/// Encrypts payloads before handing them to the inner routing and decrypts
/// them before they reach registered receivers.
pub struct SecureState<R, C> {
    base: Base<R>,
    crypto: C,
    undecryptable: u64,
}

pub type SecureRouting<R, C> = Layer<SecureState<R, C>>;

impl<R: Routing + 'static, C: Crypto + 'static> Layer<SecureState<R, C>> {
    pub fn new(routing: R, crypto: C) -> Self {
        Layer::from_state(SecureState {
            base: Base::new(routing),
            crypto,
            undecryptable: 0,
        })
    }

    pub fn key_setup(&self, peer: NodeId, key: &[u8]) -> Result<()> {
        self.state().crypto.key_setup(peer, key)
    }

    /// Frames dropped because no key was installed for their sender.
    pub fn undecryptable(&self) -> u64 {
        self.state().undecryptable
    }
}

impl<R: Routing + 'static, C: Crypto + 'static> ProtocolState for SecureState<R, C> {
    type Radio = R;

    fn base(&self) -> &Base<R> {
        &self.base
    }

    fn base_mut(&mut self) -> &mut Base<R> {
        &mut self.base
    }

    fn header_len(&self) -> usize {
        MessageKind::Secure.header_len()
    }

    fn started(&mut self, _ctx: &Ctx<Self>) -> Result<()> {
        self.crypto.enable()
    }

    fn stopped(&mut self) {
        self.crypto.disable();
    }

    fn send(&mut self, _ctx: &Ctx<Self>, dest: NodeId, payload: &[u8]) -> Result<()> {
        let mut sealed = [0u8; MTU];
        let sealed = &mut sealed[..payload.len()];
        self.crypto.encrypt(dest, payload, sealed)?;
        let frame = Message::Secure { ciphertext: sealed }
            .encode()
            .map_err(|_| Error::PayloadTooLarge)?;
        self.base.radio.send(dest, &frame)
    }

    fn on_frame(&mut self, _ctx: &Ctx<Self>, from: NodeId, frame: &[u8]) -> Option<Delivery> {
        let Ok(Message::Secure { ciphertext }) = Message::decode(frame) else {
            return None;
        };
        let mut plain = [0u8; MTU];
        let plain = &mut plain[..ciphertext.len()];
        if self.crypto.decrypt(from, ciphertext, plain).is_err() {
            self.undecryptable += 1;
            return None;
        }
        Some(Delivery::new(from, plain))
    }
}

impl<R: Routing + 'static, C: Crypto + 'static> RoutingState for SecureState<R, C> {}
