use super::layer::{Base, Ctx, Delivery, Layer, ProtocolState, RoutingState};
use crate::kernel::{NodeId, Radio, Result};
use crate::pstl::StaticMap;
use crate::wire::{Message, MessageKind};

/// Default hop budget of a flood.
pub const TTL_MAX: u8 = 16;

/// Originators a node remembers for duplicate suppression.
pub const SEEN_CAPACITY: usize = 64;

/// Sequence numbers below the highest one that are still tracked
/// individually, so copies arriving out of order are not lost.
const WINDOW: u16 = 32;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Seen {
    highest: u16,
    /// Bit `i` set: `highest - 1 - i` was seen.
    window: u32,
    last_used: u64,
}

impl Seen {
    /// Records `seq`; false if it was already seen or is too old to tell.
    fn record(&mut self, seq: u16) -> bool {
        let ahead = seq.wrapping_sub(self.highest) as i16;
        if ahead > 0 {
            let shift = ahead as u32;
            self.window = if shift > WINDOW as u32 {
                0
            } else {
                ((self.window as u64) << shift | 1u64 << (shift - 1)) as u32
            };
            self.highest = seq;
            return true;
        }
        if ahead == 0 {
            return false;
        }
        let behind = ahead.unsigned_abs();
        if behind > WINDOW {
            return false;
        }
        let bit = 1u32 << (behind - 1);
        if self.window & bit != 0 {
            return false;
        }
        self.window |= bit;
        true
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FloodStats {
    pub originated: u64,
    pub forwarded: u64,
    pub delivered: u64,
    pub suppressed: u64,
}

/// Sequence-numbered flooding with per-originator duplicate suppression.
pub struct FloodState<R> {
    base: Base<R>,
    ttl: u8,
    seq: u16,
    clock: u64,
    seen: StaticMap<NodeId, Seen, SEEN_CAPACITY>,
    stats: FloodStats,
}

pub type Flooding<R> = Layer<FloodState<R>>;

impl<R: Radio + 'static> Layer<FloodState<R>> {
    pub fn new(radio: R) -> Self {
        Self::with_ttl(radio, TTL_MAX)
    }

    pub fn with_ttl(radio: R, ttl: u8) -> Self {
        Layer::from_state(FloodState {
            base: Base::new(radio),
            ttl,
            seq: 0,
            clock: 0,
            seen: StaticMap::new(),
            stats: FloodStats::default(),
        })
    }

    pub fn stats(&self) -> FloodStats {
        self.state().stats
    }

    /// Originators currently tracked for duplicate suppression.
    pub fn seen_len(&self) -> usize {
        self.state().seen.len()
    }

    /// Sequence number of the last flood this node originated.
    pub fn last_seq(&self) -> u16 {
        self.state().seq
    }

    /// Re-broadcasts an already used sequence number, as a misbehaving or
    /// restarted originator would.
    pub fn replay(&self, seq: u16, payload: &[u8]) -> Result<()> {
        self.with_state_mut(|s, _| s.broadcast(seq, payload))
    }
}

impl<R: Radio> FloodState<R> {
    fn broadcast(&mut self, seq: u16, payload: &[u8]) -> Result<()> {
        let frame = Message::Flood {
            originator: self.base.id,
            seq,
            ttl: self.ttl,
            payload,
        }
        .encode()
        .map_err(|_| crate::Error::PayloadTooLarge)?;
        self.base.radio.send(NodeId::BROADCAST, &frame)
    }

    fn is_new(&mut self, originator: NodeId, seq: u16) -> bool {
        self.clock += 1;
        let now = self.clock;
        if let Some(seen) = self.seen.get_mut(&originator) {
            seen.last_used = now;
            return seen.record(seq);
        }
        if self.seen.len() == SEEN_CAPACITY {
            let oldest = self
                .seen
                .iter()
                .min_by_key(|(_, s)| s.last_used)
                .map(|(k, _)| *k);
            if let Some(k) = oldest {
                let _ = self.seen.remove(&k);
            }
        }
        let entry = Seen {
            highest: seq,
            window: 0,
            last_used: now,
        };
        let _ = self.seen.insert(originator, entry);
        true
    }
}

impl<R: Radio + 'static> ProtocolState for FloodState<R> {
    type Radio = R;

    fn base(&self) -> &Base<R> {
        &self.base
    }

    fn base_mut(&mut self) -> &mut Base<R> {
        &mut self.base
    }

    fn header_len(&self) -> usize {
        MessageKind::Flood.header_len()
    }

    fn send(&mut self, _ctx: &Ctx<Self>, _dest: NodeId, payload: &[u8]) -> Result<()> {
        self.seq = self.seq.wrapping_add(1);
        self.stats.originated += 1;
        self.broadcast(self.seq, payload)
    }

    fn on_frame(&mut self, _ctx: &Ctx<Self>, _from: NodeId, frame: &[u8]) -> Option<Delivery> {
        let Ok(Message::Flood {
            originator,
            seq,
            ttl,
            payload,
        }) = Message::decode(frame)
        else {
            return None;
        };
        if originator == self.base.id {
            return None;
        }
        if !self.is_new(originator, seq) {
            self.stats.suppressed += 1;
            return None;
        }
        if ttl > 1 {
            let forward = Message::Flood {
                originator,
                seq,
                ttl: ttl - 1,
                payload,
            };
            if let Ok(out) = forward.encode() {
                if self.base.radio.send(NodeId::BROADCAST, &out).is_ok() {
                    self.stats.forwarded += 1;
                }
            }
        }
        self.stats.delivered += 1;
        Some(Delivery::new(originator, payload))
    }
}

impl<R: Radio + 'static> RoutingState for FloodState<R> {}
