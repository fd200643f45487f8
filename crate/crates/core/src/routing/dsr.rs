use super::layer::{Base, Ctx, Delivery, Layer, ProtocolState, RoutingState};
use crate::kernel::{CallbackHandle, Clock, Error, Millis, NodeId, Radio, Result, Timer};
use crate::pstl::{StaticList, StaticMap, StaticVector};
use crate::wire::{Frame, Message, MessageKind, Path, MAX_PATH};

/// Destinations with a cached source route.
pub const DSR_CACHE_CAPACITY: usize = 32;

/// Payloads waiting for route discovery.
pub const DSR_PENDING_CAPACITY: usize = 4;

const SEEN_WINDOW: usize = 16;
const UNACKED_CAPACITY: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DsrConfig {
    /// How long a discovery may run before buffered payloads are dropped.
    pub rreq_timeout_ms: Millis,
    /// How long a delivered-data acknowledgement may take before the route
    /// is dropped and the payload retried once.
    pub ack_timeout_ms: Millis,
}

impl DsrConfig {
    /// Timeouts for links no slower than `max_link_latency_ms`.
    pub fn for_max_latency(max_link_latency_ms: Millis) -> Self {
        let timeout = 10 * max_link_latency_ms.max(1) * MAX_PATH as Millis;
        DsrConfig {
            rreq_timeout_ms: timeout,
            ack_timeout_ms: timeout,
        }
    }
}

impl Default for DsrConfig {
    fn default() -> Self {
        Self::for_max_latency(1)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DsrStats {
    pub requests_sent: u64,
    pub replies_sent: u64,
    pub routes_discovered: u64,
    pub discovery_failures: u64,
    pub data_sent: u64,
    pub data_forwarded: u64,
    pub delivered: u64,
    pub acks_received: u64,
    pub retries: u64,
    pub lost: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Pending {
    dest: NodeId,
    payload: Frame,
    retried: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct Discovery {
    req_id: u16,
    timer: Option<CallbackHandle>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Unacked {
    dest: NodeId,
    sent_at: Millis,
    retried: bool,
    payload: Frame,
}

/// Dynamic source routing: on-demand discovery, source-routed data and an
/// end-to-end acknowledgement that triggers one rediscovery on loss.
pub struct DsrState<R, T, C> {
    base: Base<R>,
    timer: T,
    clock: C,
    config: DsrConfig,
    req_id: u16,
    cache: StaticMap<NodeId, Path, DSR_CACHE_CAPACITY>,
    pending: StaticVector<Pending, DSR_PENDING_CAPACITY>,
    discoveries: StaticMap<NodeId, Discovery, DSR_PENDING_CAPACITY>,
    seen: StaticList<(NodeId, u16), SEEN_WINDOW>,
    unacked: StaticVector<Unacked, UNACKED_CAPACITY>,
    ack_timer: Option<CallbackHandle>,
    stats: DsrStats,
}

pub type Dsr<R, T, C> = Layer<DsrState<R, T, C>>;

impl<R, T, C> Layer<DsrState<R, T, C>>
where
    R: Radio + 'static,
    T: Timer + 'static,
    C: Clock + 'static,
{
    pub fn new(radio: R, timer: T, clock: C) -> Self {
        Self::with_config(radio, timer, clock, DsrConfig::default())
    }

    pub fn with_config(radio: R, timer: T, clock: C, config: DsrConfig) -> Self {
        Layer::from_state(DsrState {
            base: Base::new(radio),
            timer,
            clock,
            config,
            req_id: 0,
            cache: StaticMap::new(),
            pending: StaticVector::new(),
            discoveries: StaticMap::new(),
            seen: StaticList::new(),
            unacked: StaticVector::new(),
            ack_timer: None,
            stats: DsrStats::default(),
        })
    }

    /// Cached source route to `dest`, source first.
    pub fn route(&self, dest: NodeId) -> Option<Path> {
        self.state().cache.get(&dest).copied()
    }

    pub fn cache_len(&self) -> usize {
        self.state().cache.len()
    }

    pub fn pending_len(&self) -> usize {
        self.state().pending.len()
    }

    pub fn stats(&self) -> DsrStats {
        self.state().stats
    }
}

fn reversed(path: &Path) -> Path {
    let mut out = *path;
    out.as_mut_slice().reverse();
    out
}

impl<R, T, C> DsrState<R, T, C>
where
    R: Radio + 'static,
    T: Timer + 'static,
    C: Clock + 'static,
{
    fn start_discovery(&mut self, ctx: &Ctx<Self>, dest: NodeId) -> Result<()> {
        if self.discoveries.contains_key(&dest) {
            return Ok(());
        }
        self.req_id = self.req_id.wrapping_add(1);
        let req_id = self.req_id;
        let me = self.base.id;
        self.remember(me, req_id);
        let timer = ctx.schedule(&self.timer, self.config.rreq_timeout_ms, move |s, _| {
            s.discovery_expired(dest, req_id);
            None
        })?;
        let discovery = Discovery {
            req_id,
            timer: Some(timer),
        };
        if let Err(e) = self.discoveries.insert(dest, discovery) {
            let _ = self.timer.cancel_timer(timer);
            return Err(e);
        }
        let mut path = Path::new();
        let _ = path.push(me);
        let frame = Message::DsrRequest {
            req_id,
            target: dest,
            path,
        }
        .encode()
        .expect("request fits");
        self.stats.requests_sent += 1;
        self.base.radio.send(NodeId::BROADCAST, &frame)
    }

    fn discovery_expired(&mut self, dest: NodeId, req_id: u16) {
        if self.discoveries.get(&dest).map(|d| d.req_id) != Some(req_id) {
            return;
        }
        let _ = self.discoveries.remove(&dest);
        let before = self.pending.len();
        self.pending.retain(|p| p.dest != dest);
        self.stats.discovery_failures += (before - self.pending.len()) as u64;
    }

    /// Records a request; false if it was already seen.
    fn remember(&mut self, origin: NodeId, req_id: u16) -> bool {
        if self.seen.contains(&(origin, req_id)) {
            return false;
        }
        if self.seen.len() == SEEN_WINDOW {
            self.seen.pop_back();
        }
        let _ = self.seen.push_front((origin, req_id));
        true
    }

    fn send_data(
        &mut self,
        ctx: &Ctx<Self>,
        path: Path,
        payload: &[u8],
        retried: bool,
    ) -> Result<()> {
        let frame = Message::DsrData {
            path,
            cursor: 1,
            payload,
        }
        .encode()
        .map_err(|_| Error::PayloadTooLarge)?;
        self.base.radio.send(path[1], &frame)?;
        self.stats.data_sent += 1;
        let record = Unacked {
            dest: path[path.len() - 1],
            sent_at: self.clock.now(),
            retried,
            payload: Frame::from_slice(payload).expect("payload within MTU"),
        };
        if self.unacked.push(record).is_ok() && self.ack_timer.is_none() {
            self.arm_ack_timer(ctx, self.config.ack_timeout_ms);
        }
        Ok(())
    }

    fn arm_ack_timer(&mut self, ctx: &Ctx<Self>, delay: Millis) {
        self.ack_timer = ctx
            .schedule(&self.timer, delay, |s, ctx| {
                s.ack_timer = None;
                s.check_acks(ctx);
                None
            })
            .ok();
    }

    fn check_acks(&mut self, ctx: &Ctx<Self>) {
        let now = self.clock.now();
        let timeout = self.config.ack_timeout_ms;
        let mut i = 0;
        while i < self.unacked.len() {
            let u = self.unacked[i];
            if u.sent_at + timeout > now {
                i += 1;
                continue;
            }
            self.unacked.remove(i);
            let _ = self.cache.remove(&u.dest);
            if u.retried {
                self.stats.lost += 1;
                continue;
            }
            let retry = Pending {
                dest: u.dest,
                payload: u.payload,
                retried: true,
            };
            if self.pending.push(retry).is_ok() && self.start_discovery(ctx, u.dest).is_ok() {
                self.stats.retries += 1;
            } else {
                self.pending
                    .retain(|p| p.dest != u.dest || self.discoveries.contains_key(&p.dest));
                self.stats.lost += 1;
            }
        }
        if let Some(oldest) = self.unacked.iter().map(|u| u.sent_at).min() {
            self.arm_ack_timer(ctx, oldest + timeout - now);
        }
    }

    fn on_request(&mut self, req_id: u16, target: NodeId, path: Path) {
        let me = self.base.id;
        let Some(&origin) = path.first() else { return };
        if !self.remember(origin, req_id) || path.contains(&me) {
            return;
        }
        let mut path = path;
        if path.push(me).is_err() {
            return;
        }
        if target == me {
            let back = reversed(&path);
            let frame = Message::DsrReply {
                req_id,
                target,
                path: back,
            }
            .encode()
            .expect("reply fits");
            if self.base.radio.send(back[1], &frame).is_ok() {
                self.stats.replies_sent += 1;
            }
        } else {
            let frame = Message::DsrRequest {
                req_id,
                target,
                path,
            }
            .encode()
            .expect("request fits");
            let _ = self.base.radio.send(NodeId::BROADCAST, &frame);
        }
    }

    fn on_reply(&mut self, ctx: &Ctx<Self>, frame: &[u8], target: NodeId, path: Path) {
        let me = self.base.id;
        let Some(at) = path.iter().position(|n| *n == me) else {
            return;
        };
        if at + 1 < path.len() {
            let _ = self.base.radio.send(path[at + 1], frame);
            return;
        }
        let route = reversed(&path);
        if route.first() != Some(&me) || route.last() != Some(&target) {
            return;
        }
        if let Ok(d) = self.discoveries.remove(&target) {
            if let Some(t) = d.timer {
                let _ = self.timer.cancel_timer(t);
            }
        }
        if !self.cache.contains_key(&target) && self.cache.len() == DSR_CACHE_CAPACITY {
            let victim = self.cache.keys().next().copied();
            if let Some(victim) = victim {
                let _ = self.cache.remove(&victim);
            }
        }
        let _ = self.cache.insert(target, route);
        self.stats.routes_discovered += 1;
        let mut i = 0;
        while i < self.pending.len() {
            if self.pending[i].dest != target {
                i += 1;
                continue;
            }
            let p = self.pending.remove(i).expect("index in range");
            if self.send_data(ctx, route, &p.payload, p.retried).is_err() {
                self.stats.lost += 1;
            }
        }
    }

    fn on_data(&mut self, path: Path, cursor: u8, payload: &[u8]) -> Option<Delivery> {
        let me = self.base.id;
        let c = cursor as usize;
        if path.get(c) != Some(&me) {
            return None;
        }
        if c + 1 == path.len() {
            let back = reversed(&path);
            let ack = Message::DsrAck {
                path: back,
                cursor: 1,
            }
            .encode()
            .expect("ack fits");
            let _ = self.base.radio.send(back[1], &ack);
            self.stats.delivered += 1;
            return Some(Delivery::new(path[0], payload));
        }
        let out = Message::DsrData {
            path,
            cursor: cursor + 1,
            payload,
        }
        .encode()
        .expect("re-encoding a decoded frame");
        if self.base.radio.send(path[c + 1], &out).is_ok() {
            self.stats.data_forwarded += 1;
        }
        None
    }

    fn on_ack(&mut self, path: Path, cursor: u8) {
        let me = self.base.id;
        let c = cursor as usize;
        if path.get(c) != Some(&me) {
            return;
        }
        if c + 1 < path.len() {
            let out = Message::DsrAck {
                path,
                cursor: cursor + 1,
            }
            .encode()
            .expect("re-encoding a decoded frame");
            let _ = self.base.radio.send(path[c + 1], &out);
            return;
        }
        let dest = path[0];
        if let Some(i) = self.unacked.iter().position(|u| u.dest == dest) {
            self.unacked.remove(i);
            self.stats.acks_received += 1;
        }
    }
}

impl<R, T, C> ProtocolState for DsrState<R, T, C>
where
    R: Radio + 'static,
    T: Timer + 'static,
    C: Clock + 'static,
{
    type Radio = R;

    fn base(&self) -> &Base<R> {
        &self.base
    }

    fn base_mut(&mut self) -> &mut Base<R> {
        &mut self.base
    }

    fn header_len(&self) -> usize {
        MessageKind::DsrData.header_len()
    }

    fn stopped(&mut self) {
        if let Some(h) = self.ack_timer.take() {
            let _ = self.timer.cancel_timer(h);
        }
        let discoveries: Vec<Discovery> = self.discoveries.values().copied().collect();
        for d in discoveries {
            if let Some(h) = d.timer {
                let _ = self.timer.cancel_timer(h);
            }
        }
        self.discoveries.clear();
        self.pending.clear();
        self.unacked.clear();
    }

    fn send(&mut self, ctx: &Ctx<Self>, dest: NodeId, payload: &[u8]) -> Result<()> {
        let me = self.base.id;
        if dest == me {
            return ctx.deliver_locally(&self.timer, me, payload);
        }
        if dest.is_broadcast() {
            return Err(Error::NoRoute);
        }
        if let Some(path) = self.cache.get(&dest).copied() {
            return self.send_data(ctx, path, payload, false);
        }
        let pending = Pending {
            dest,
            payload: Frame::from_slice(payload).map_err(|_| Error::PayloadTooLarge)?,
            retried: false,
        };
        self.pending.push(pending)?;
        if let Err(e) = self.start_discovery(ctx, dest) {
            self.pending.pop();
            return Err(e);
        }
        Ok(())
    }

    fn on_frame(&mut self, ctx: &Ctx<Self>, _from: NodeId, frame: &[u8]) -> Option<Delivery> {
        match Message::decode(frame).ok()? {
            Message::DsrRequest {
                req_id,
                target,
                path,
            } => self.on_request(req_id, target, path),
            Message::DsrReply { target, path, .. } => self.on_reply(ctx, frame, target, path),
            Message::DsrData {
                path,
                cursor,
                payload,
            } => return self.on_data(path, cursor, payload),
            Message::DsrAck { path, cursor } => self.on_ack(path, cursor),
            _ => {}
        }
        None
    }
}

impl<R, T, C> RoutingState for DsrState<R, T, C>
where
    R: Radio + 'static,
    T: Timer + 'static,
    C: Clock + 'static,
{
}
