use std::cell::{Cell, RefCell};
use std::rc::Rc;

use crate::kernel::{CallbackHandle, DebugOutput, Error, NodeId, Radio, Result, MTU};
use crate::pstl::{StaticMap, StaticVector};

/// Longest text forwarded per `emit`; the rest is cut off.
pub const DEBUG_TEXT_LIMIT: usize = 4 * MTU;

const CHUNK_HEADER: usize = 2;
const LAST_CHUNK: u8 = 0x80;
const PARTIAL_CAPACITY: usize = 8;

/// Debug facet that forwards text to a gateway node over a routing model.
///
/// Each chunk starts with a message id and a chunk index; the high bit of
/// the index marks the final chunk.
pub struct DebugOverRouting<R> {
    routing: R,
    gateway: NodeId,
    next_id: Cell<u8>,
}

impl<R: Radio> DebugOverRouting<R> {
    pub fn new(routing: R, gateway: NodeId) -> Self {
        DebugOverRouting {
            routing,
            gateway,
            next_id: Cell::new(0),
        }
    }

    /// Payload bytes per chunk on the current routing model.
    pub fn chunk_size(&self) -> usize {
        self.routing.max_payload().saturating_sub(CHUNK_HEADER)
    }

    /// Chunks `emit` would send for a text of `len` bytes.
    pub fn chunk_count(&self, len: usize) -> usize {
        let len = len.min(DEBUG_TEXT_LIMIT);
        len.div_ceil(self.chunk_size()).max(1)
    }
}

impl<R: Radio> DebugOutput for DebugOverRouting<R> {
    fn emit(&self, text: &str) -> Result<()> {
        let bytes = &text.as_bytes()[..text.len().min(DEBUG_TEXT_LIMIT)];
        let size = self.chunk_size();
        if size == 0 {
            return Err(Error::PayloadTooLarge);
        }
        let id = self.next_id.get();
        self.next_id.set(id.wrapping_add(1));
        let count = self.chunk_count(bytes.len());
        let mut frame = [0u8; MTU];
        for index in 0..count {
            let body =
                &bytes[(index * size).min(bytes.len())..((index + 1) * size).min(bytes.len())];
            frame[0] = id;
            frame[1] = index as u8 | if index + 1 == count { LAST_CHUNK } else { 0 };
            frame[CHUNK_HEADER..CHUNK_HEADER + body.len()].copy_from_slice(body);
            self.routing
                .send(self.gateway, &frame[..CHUNK_HEADER + body.len()])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    next_index: u8,
    text: StaticVector<u8, DEBUG_TEXT_LIMIT>,
}

struct GatewayState<D> {
    sink: D,
    partial: StaticMap<(NodeId, u8), Partial, PARTIAL_CAPACITY>,
    completed: u64,
    discarded: u64,
}

/// Gateway side of [`DebugOverRouting`]: reassembles chunks in order and
/// appends each finished text to a local debug sink.
pub struct DebugGateway<D> {
    state: Rc<RefCell<GatewayState<D>>>,
    handle: CallbackHandle,
}

impl<D: DebugOutput + 'static> DebugGateway<D> {
    pub fn attach<R: Radio>(routing: &R, sink: D) -> Result<Self> {
        let state = Rc::new(RefCell::new(GatewayState {
            sink,
            partial: StaticMap::new(),
            completed: 0,
            discarded: 0,
        }));
        let weak = Rc::downgrade(&state);
        let handle = routing.register_receiver(Rc::new(move |from, chunk| {
            if let Some(state) = weak.upgrade() {
                state.borrow_mut().accept(from, chunk);
            }
        }))?;
        Ok(DebugGateway { state, handle })
    }

    pub fn handle(&self) -> CallbackHandle {
        self.handle
    }

    /// Texts reassembled and handed to the sink.
    pub fn completed(&self) -> u64 {
        self.state.borrow().completed
    }

    /// Partial texts thrown away after a gap or an overflow.
    pub fn discarded(&self) -> u64 {
        self.state.borrow().discarded
    }
}

impl<D: DebugOutput> GatewayState<D> {
    fn accept(&mut self, from: NodeId, chunk: &[u8]) {
        let [id, index, body @ ..] = chunk else {
            return;
        };
        let key = (from, *id);
        let last = index & LAST_CHUNK != 0;
        let index = index & !LAST_CHUNK;
        let mut partial = if index == 0 {
            Partial::default()
        } else {
            match self.partial.remove(&key) {
                Ok(p) if p.next_index == index => p,
                Ok(_) => {
                    self.discarded += 1;
                    return;
                }
                Err(_) => return,
            }
        };
        if partial.text.extend_from_slice(body).is_err() {
            self.discarded += 1;
            return;
        }
        if last {
            let _ = self.partial.remove(&key);
            let _ = self.sink.emit(&String::from_utf8_lossy(&partial.text));
            self.completed += 1;
            return;
        }
        partial.next_index = index + 1;
        if self.partial.insert(key, partial).is_err() {
            self.discarded += 1;
        }
    }
}
