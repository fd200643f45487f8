use std::cell::RefCell;
use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::{self, Write as _};
use std::rc::Rc;

use super::{SimFacets, SimRng, Topology, TopologyError};
use crate::kernel::{
    CallbackHandle, CallbackRegistry, Error, ExtendedReceiveHandler, Millis, NodeId,
    ReceiveHandler, Result, TimerHandler, HANDLER_CAPACITY, TIMER_CAPACITY,
};
use crate::wire::Frame;

#[derive(Clone)]
pub(super) enum Receiver {
    Plain(ReceiveHandler),
    Extended(ExtendedReceiveHandler),
}

struct PendingTimer {
    token: u64,
    handler: TimerHandler,
}

struct NodeState {
    radio_on: bool,
    receivers: CallbackRegistry<Receiver, HANDLER_CAPACITY>,
    timers: CallbackRegistry<PendingTimer, TIMER_CAPACITY>,
    log: Vec<String>,
}

impl NodeState {
    fn new() -> Self {
        NodeState {
            radio_on: false,
            receivers: CallbackRegistry::new(),
            timers: CallbackRegistry::new(),
            log: Vec::new(),
        }
    }
}

enum Event {
    Deliver {
        dest: NodeId,
        sender: NodeId,
        quality: u8,
        frame: Frame,
    },
    TimerFire {
        node: NodeId,
        handle: CallbackHandle,
        token: u64,
    },
}

struct Scheduled {
    fire_at: Millis,
    seq: u64,
    event: Event,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        (self.fire_at, self.seq) == (other.fire_at, other.seq)
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.fire_at, self.seq).cmp(&(other.fire_at, other.seq))
    }
}

/// Radio counters for one message kind (the first byte of a frame).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KindStats {
    /// `send` calls, one per unicast or broadcast.
    pub transmissions: u64,
    /// Bytes handed to `send`, counted once per transmission.
    pub bytes: u64,
    /// Per-link delivery attempts.
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
}

impl KindStats {
    fn merge(&mut self, other: &KindStats) {
        self.transmissions += other.transmissions;
        self.bytes += other.bytes;
        self.sent += other.sent;
        self.delivered += other.delivered;
        self.dropped += other.dropped;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkStats {
    pub by_kind: BTreeMap<u8, KindStats>,
}

impl LinkStats {
    pub fn kind(&self, kind: u8) -> KindStats {
        self.by_kind.get(&kind).copied().unwrap_or_default()
    }

    pub fn total(&self) -> KindStats {
        let mut total = KindStats::default();
        self.by_kind.values().for_each(|k| total.merge(k));
        total
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceKind {
    /// A frame reached `dest`. `accepted` is false when the receiving radio
    /// was off.
    Deliver {
        dest: NodeId,
        sender: NodeId,
        quality: u8,
        accepted: bool,
        payload: Vec<u8>,
    },
    TimerFire {
        node: NodeId,
        handle: CallbackHandle,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub at: Millis,
    pub seq: u64,
    pub kind: TraceKind,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} #{} ", self.at, self.seq)?;
        match &self.kind {
            TraceKind::Deliver {
                dest,
                sender,
                quality,
                accepted,
                payload,
            } => {
                let state = if *accepted { "rx" } else { "off" };
                write!(f, "{state} {sender}->{dest} q{quality} ")?;
                payload.iter().try_for_each(|b| write!(f, "{b:02x}"))
            }
            TraceKind::TimerFire { node, handle } => write!(f, "timer {node} h{}", handle.0),
        }
    }
}

/// Events in the order they were processed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventTrace(pub Vec<TraceEvent>);

impl EventTrace {
    pub fn events(&self) -> &[TraceEvent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Deliveries accepted by a radio, as `(at, sender, dest, payload)`.
    pub fn deliveries(&self) -> impl Iterator<Item = (Millis, NodeId, NodeId, &[u8])> {
        self.0.iter().filter_map(|e| match &e.kind {
            TraceKind::Deliver {
                dest,
                sender,
                accepted: true,
                payload,
                ..
            } => Some((e.at, *sender, *dest, payload.as_slice())),
            _ => None,
        })
    }

    /// One line per event.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for event in &self.0 {
            writeln!(out, "{event}").expect("write to String");
        }
        out
    }
}

struct World {
    topology: Topology,
    rng: SimRng,
    now: Millis,
    next_seq: u64,
    next_token: u64,
    queue: BinaryHeap<Reverse<Scheduled>>,
    nodes: Vec<NodeState>,
    stats: LinkStats,
    trace: Vec<TraceEvent>,
}

impl World {
    fn schedule(&mut self, fire_at: Millis, event: Event) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Reverse(Scheduled {
            fire_at,
            seq,
            event,
        }));
    }

    fn node(&mut self, node: NodeId) -> &mut NodeState {
        assert!(
            self.topology.contains(node),
            "node {node} is not part of the topology"
        );
        &mut self.nodes[node.get() as usize]
    }

    fn attempt(&mut self, kind: u8, from: NodeId, to: NodeId, frame: &Frame) {
        let link = self.topology.link(from, to).copied();
        let stats = self.stats.by_kind.entry(kind).or_default();
        stats.sent += 1;
        let Some(link) = link else {
            stats.dropped += 1;
            return;
        };
        if self.rng.next_f64() < link.drop_prob {
            stats.dropped += 1;
            return;
        }
        let fire_at = self.now + link.latency_ms;
        self.schedule(
            fire_at,
            Event::Deliver {
                dest: to,
                sender: from,
                quality: link.quality,
                frame: *frame,
            },
        );
    }
}

/// Handle to one simulated network. Clones share the same world.
#[derive(Clone)]
pub struct Simulator {
    world: Rc<RefCell<World>>,
}

impl Simulator {
    pub fn new(topology: Topology, seed: u64) -> Self {
        let nodes = (0..topology.node_count())
            .map(|_| NodeState::new())
            .collect();
        Simulator {
            world: Rc::new(RefCell::new(World {
                topology,
                rng: SimRng::new(seed),
                now: 0,
                next_seq: 0,
                next_token: 0,
                queue: BinaryHeap::new(),
                nodes,
                stats: LinkStats::default(),
                trace: Vec::new(),
            })),
        }
    }

    pub fn now(&self) -> Millis {
        self.world.borrow().now
    }

    pub fn node_count(&self) -> usize {
        self.world.borrow().topology.node_count()
    }

    pub fn topology(&self) -> Topology {
        self.world.borrow().topology.clone()
    }

    /// Events waiting in the queue.
    pub fn pending_events(&self) -> usize {
        self.world.borrow().queue.len()
    }

    pub fn stats(&self) -> LinkStats {
        self.world.borrow().stats.clone()
    }

    /// Every event processed since the simulator was created.
    pub fn trace(&self) -> EventTrace {
        EventTrace(self.world.borrow().trace.clone())
    }

    pub fn link_quality(&self, a: NodeId, b: NodeId) -> Result<u8, TopologyError> {
        self.world.borrow().topology.link_quality(a, b)
    }

    /// Takes a link down. Frames already in flight over it still arrive.
    pub fn remove_link(&self, a: NodeId, b: NodeId) -> Result<(), TopologyError> {
        self.world.borrow_mut().topology.remove_link(a, b).map(drop)
    }

    pub fn debug_log(&self, node: NodeId) -> Vec<String> {
        self.world.borrow_mut().node(node).log.clone()
    }

    /// Facet models for `node`.
    ///
    /// # Panics
    ///
    /// If `node` is not part of the topology.
    pub fn facets(&self, node: NodeId) -> SimFacets {
        assert!(
            self.world.borrow().topology.contains(node),
            "node {node} is not part of the topology"
        );
        SimFacets::new(self.clone(), node)
    }

    /// Transmits `payload` from `from` to one neighbor or, for
    /// [`NodeId::BROADCAST`], to every neighbor with an independent loss
    /// draw per link. Unicast to a node that is not a neighbor is counted as
    /// sent and dropped.
    pub fn send(&self, from: NodeId, to: NodeId, payload: &[u8]) -> Result<()> {
        let frame = Frame::from_slice(payload).map_err(|_| Error::PayloadTooLarge)?;
        let kind = payload.first().copied().unwrap_or(0);
        let mut world = self.world.borrow_mut();
        world.node(from);
        let stats = world.stats.by_kind.entry(kind).or_default();
        stats.transmissions += 1;
        stats.bytes += payload.len() as u64;
        if to.is_broadcast() {
            let neighbors = world.topology.neighbors(from).to_vec();
            for n in neighbors {
                world.attempt(kind, from, n, &frame);
            }
        } else {
            world.attempt(kind, from, to, &frame);
        }
        Ok(())
    }

    pub(super) fn radio_on(&self, node: NodeId) -> bool {
        self.world.borrow_mut().node(node).radio_on
    }

    pub(super) fn set_radio_on(&self, node: NodeId, on: bool) {
        self.world.borrow_mut().node(node).radio_on = on;
    }

    pub(super) fn register_receiver(
        &self,
        node: NodeId,
        receiver: Receiver,
    ) -> Result<CallbackHandle> {
        self.world
            .borrow_mut()
            .node(node)
            .receivers
            .register(receiver)
    }

    pub(super) fn unregister_receiver(&self, node: NodeId, handle: CallbackHandle) -> Result<()> {
        self.world
            .borrow_mut()
            .node(node)
            .receivers
            .unregister(handle)
    }

    /// Arms a one-shot timer on `node`. A zero delay fires at the current
    /// time, after every event already queued for that time.
    pub fn set_timer(
        &self,
        node: NodeId,
        delay_ms: Millis,
        handler: TimerHandler,
    ) -> Result<CallbackHandle> {
        let mut world = self.world.borrow_mut();
        let token = world.next_token;
        let handle = world
            .node(node)
            .timers
            .register(PendingTimer { token, handler })?;
        world.next_token += 1;
        let fire_at = world.now + delay_ms;
        world.schedule(
            fire_at,
            Event::TimerFire {
                node,
                handle,
                token,
            },
        );
        Ok(handle)
    }

    pub fn cancel_timer(&self, node: NodeId, handle: CallbackHandle) -> Result<()> {
        self.world.borrow_mut().node(node).timers.unregister(handle)
    }

    pub(super) fn log(&self, node: NodeId, text: &str) {
        self.world
            .borrow_mut()
            .node(node)
            .log
            .push(text.to_string());
    }

    /// Processes every event due at or before `t_end`, then sets the clock
    /// to `t_end`. Returns the events processed by this call.
    pub fn run_until(&self, t_end: Millis) -> EventTrace {
        let start = self.world.borrow().trace.len();
        while let Some(action) = self.step(t_end) {
            action.invoke();
        }
        let mut world = self.world.borrow_mut();
        world.now = world.now.max(t_end);
        EventTrace(world.trace[start..].to_vec())
    }

    /// Advances the clock by `duration_ms`.
    pub fn run_for(&self, duration_ms: Millis) -> EventTrace {
        let end = self.now() + duration_ms;
        self.run_until(end)
    }

    /// Pops the next due event and prepares its callbacks. The world is
    /// released before any callback runs, so callbacks may send or arm
    /// timers freely.
    fn step(&self, t_end: Millis) -> Option<Action> {
        let mut world = self.world.borrow_mut();
        loop {
            if world.queue.peek()?.0.fire_at > t_end {
                return None;
            }
            let Reverse(Scheduled {
                fire_at,
                seq,
                event,
            }) = world.queue.pop().expect("peeked");
            debug_assert!(fire_at >= world.now, "event scheduled in the past");
            world.now = fire_at;
            match event {
                Event::Deliver {
                    dest,
                    sender,
                    quality,
                    frame,
                } => {
                    let kind = frame.first().copied().unwrap_or(0);
                    let state = world.node(dest);
                    let accepted = state.radio_on;
                    let receivers = if accepted {
                        state.receivers.snapshot()
                    } else {
                        Vec::new()
                    };
                    let stats = world.stats.by_kind.entry(kind).or_default();
                    if accepted {
                        stats.delivered += 1;
                    } else {
                        stats.dropped += 1;
                    }
                    world.trace.push(TraceEvent {
                        at: fire_at,
                        seq,
                        kind: TraceKind::Deliver {
                            dest,
                            sender,
                            quality,
                            accepted,
                            payload: frame.to_vec(),
                        },
                    });
                    return Some(Action::Deliver {
                        receivers,
                        sender,
                        quality,
                        frame,
                    });
                }
                Event::TimerFire {
                    node,
                    handle,
                    token,
                } => {
                    let timers = &mut world.node(node).timers;
                    // A cancelled timer's slot may since have been reused.
                    if timers.get(handle).map(|t| t.token) != Some(token) {
                        continue;
                    }
                    let pending = timers.take(handle).expect("checked live");
                    world.trace.push(TraceEvent {
                        at: fire_at,
                        seq,
                        kind: TraceKind::TimerFire { node, handle },
                    });
                    return Some(Action::Timer(pending.handler));
                }
            }
        }
    }
}

enum Action {
    Deliver {
        receivers: Vec<Receiver>,
        sender: NodeId,
        quality: u8,
        frame: Frame,
    },
    Timer(TimerHandler),
}

impl Action {
    fn invoke(self) {
        match self {
            Action::Deliver {
                receivers,
                sender,
                quality,
                frame,
            } => {
                for receiver in receivers {
                    match receiver {
                        Receiver::Plain(h) => h(sender, &frame),
                        Receiver::Extended(h) => h(sender, &frame, quality),
                    }
                }
            }
            Action::Timer(handler) => handler(),
        }
    }
}

impl fmt::Debug for Simulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let world = self.world.borrow();
        f.debug_struct("Simulator")
            .field("now", &world.now)
            .field("nodes", &world.topology.node_count())
            .field("pending", &world.queue.len())
            .finish()
    }
}
