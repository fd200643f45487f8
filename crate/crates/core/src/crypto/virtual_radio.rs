use crate::kernel::{Error, NodeId, Radio, Result, Routing, MTU};
use crate::pstl::StaticMap;
use crate::routing::{Base, Ctx, Delivery, Layer, ProtocolState};
use crate::wire::{Reader, Writer};

/// Application-level address, wide enough for 128-bit schemes.
pub type AppAddress = u128;

/// Application addresses one virtual radio can translate.
pub const ADDRESS_MAP_CAPACITY: usize = 64;

const HEADER_LEN: usize = 8;

/// A routing model presented as a radio. Every frame carries its final
/// destination so nodes the routing passes it to can filter.
pub struct VirtualState<R> {
    base: Base<R>,
    addresses: StaticMap<AppAddress, NodeId, ADDRESS_MAP_CAPACITY>,
}

pub type VirtualRadio<R> = Layer<VirtualState<R>>;

impl<R: Routing + 'static> Layer<VirtualState<R>> {
    pub fn new(routing: R) -> Self {
        Layer::from_state(VirtualState {
            base: Base::new(routing),
            addresses: StaticMap::new(),
        })
    }

    pub fn map_address(&self, address: AppAddress, node: NodeId) -> Result<()> {
        self.with_state_mut(|s, _| s.addresses.insert(address, node).map(drop))
    }

    pub fn resolve(&self, address: AppAddress) -> Result<NodeId> {
        self.state()
            .addresses
            .get(&address)
            .copied()
            .ok_or(Error::NoRoute)
    }

    pub fn address_of(&self, node: NodeId) -> Option<AppAddress> {
        self.state()
            .addresses
            .iter()
            .find(|(_, n)| **n == node)
            .map(|(a, _)| *a)
    }

    pub fn send_to_address(&self, address: AppAddress, payload: &[u8]) -> Result<()> {
        let node = self.resolve(address)?;
        self.send(node, payload)
    }
}

impl<R: Routing + 'static> ProtocolState for VirtualState<R> {
    type Radio = R;

    fn base(&self) -> &Base<R> {
        &self.base
    }

    fn base_mut(&mut self) -> &mut Base<R> {
        &mut self.base
    }

    fn header_len(&self) -> usize {
        HEADER_LEN
    }

    fn send(&mut self, _ctx: &Ctx<Self>, dest: NodeId, payload: &[u8]) -> Result<()> {
        let mut buf = [0u8; MTU];
        let mut w = Writer::new(&mut buf);
        w.write_u64(dest.get())
            .map_err(|_| Error::PayloadTooLarge)?;
        w.write_bytes(payload).map_err(|_| Error::PayloadTooLarge)?;
        let len = w.position();
        self.base.radio.send(dest, &buf[..len])
    }

    fn on_frame(&mut self, _ctx: &Ctx<Self>, from: NodeId, frame: &[u8]) -> Option<Delivery> {
        let mut r = Reader::new(frame);
        let dest = NodeId(r.read_u64().ok()?);
        if dest != self.base.id && !dest.is_broadcast() {
            return None;
        }
        Some(Delivery::new(from, r.rest()))
    }
}
