use super::layer::{Base, Ctx, Delivery, Layer, ProtocolState, RoutingState};
use crate::kernel::{CallbackHandle, Clock, Error, Millis, NodeId, Radio, Result, Timer};
use crate::pstl::{StaticMap, StaticVector};
use crate::wire::{AdvertisedRoute, Message, MessageKind, MAX_UPDATE_ROUTES};

/// Default routing table size.
pub const DSDV_TABLE_CAPACITY: usize = 64;

/// Hop count of a broken route.
pub const HOPS_INFINITE: u16 = u16::MAX;

const DATA_TTL: u8 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DsdvConfig {
    pub update_period_ms: Millis,
    /// Update periods a neighbor may stay silent before its routes break.
    pub missed_updates: u32,
}

impl Default for DsdvConfig {
    fn default() -> Self {
        DsdvConfig {
            update_period_ms: 1000,
            missed_updates: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DsdvEntry {
    pub dest: NodeId,
    pub next_hop: NodeId,
    pub hops: u16,
    pub seq: u32,
}

impl DsdvEntry {
    pub fn is_broken(&self) -> bool {
        self.seq % 2 == 1
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DsdvStats {
    pub update_frames: u64,
    pub data_forwarded: u64,
    pub data_dropped: u64,
    pub delivered: u64,
    pub evictions: u64,
    /// Simulated time of the last change to a next hop or hop count.
    pub last_change_ms: Millis,
}

/// Destination-sequenced distance vector routing with periodic full dumps.
pub struct DsdvState<R, T, C, const CAP: usize = DSDV_TABLE_CAPACITY> {
    base: Base<R>,
    timer: T,
    clock: C,
    config: DsdvConfig,
    own_seq: u32,
    table: StaticMap<NodeId, DsdvEntry, CAP>,
    heard: StaticMap<NodeId, Millis, CAP>,
    tick_timer: Option<CallbackHandle>,
    stats: DsdvStats,
}

pub type Dsdv<R, T, C, const CAP: usize = DSDV_TABLE_CAPACITY> = Layer<DsdvState<R, T, C, CAP>>;

impl<R, T, C, const CAP: usize> Layer<DsdvState<R, T, C, CAP>>
where
    R: Radio + 'static,
    T: Timer + 'static,
    C: Clock + 'static,
{
    pub fn new(radio: R, timer: T, clock: C) -> Self {
        Self::with_config(radio, timer, clock, DsdvConfig::default())
    }

    pub fn with_config(radio: R, timer: T, clock: C, config: DsdvConfig) -> Self {
        Layer::from_state(DsdvState {
            base: Base::new(radio),
            timer,
            clock,
            config,
            own_seq: 0,
            table: StaticMap::new(),
            heard: StaticMap::new(),
            tick_timer: None,
            stats: DsdvStats::default(),
        })
    }

    pub fn route(&self, dest: NodeId) -> Option<DsdvEntry> {
        self.state().table.get(&dest).copied()
    }

    pub fn table(&self) -> Vec<DsdvEntry> {
        self.state().table.values().copied().collect()
    }

    pub fn stats(&self) -> DsdvStats {
        self.state().stats
    }

    /// Feeds an update as if `from` had broadcast it. Meant for tests.
    pub fn inject_update(&self, from: NodeId, routes: &[AdvertisedRoute]) {
        self.with_state_mut(|s, _| s.on_update(from, routes))
    }
}

impl<R, T, C, const CAP: usize> DsdvState<R, T, C, CAP>
where
    R: Radio + 'static,
    T: Timer + 'static,
    C: Clock + 'static,
{
    fn write(&mut self, entry: DsdvEntry) {
        let previous = self.table.get(&entry.dest).copied();
        if let Some(old) = previous {
            assert!(
                entry.seq >= old.seq,
                "sequence number for {} went backwards",
                entry.dest
            );
        } else if self.table.len() == CAP && !self.evict() {
            return;
        }
        if previous.map(|o| (o.next_hop, o.hops)) != Some((entry.next_hop, entry.hops)) {
            self.stats.last_change_ms = self.clock.now();
        }
        let _ = self.table.insert(entry.dest, entry);
    }

    /// Drops the lowest-seq entry that is neither this node nor a neighbor.
    fn evict(&mut self) -> bool {
        let me = self.base.id;
        let victim = self
            .table
            .values()
            .filter(|e| e.dest != me && e.hops != 1)
            .min_by_key(|e| e.seq)
            .map(|e| e.dest);
        match victim {
            Some(dest) => {
                let _ = self.table.remove(&dest);
                self.stats.evictions += 1;
                true
            }
            None => false,
        }
    }

    fn tick(&mut self, ctx: &Ctx<Self>) {
        self.tick_timer = None;
        let me = self.base.id;
        self.own_seq += 2;
        self.write(DsdvEntry {
            dest: me,
            next_hop: me,
            hops: 0,
            seq: self.own_seq,
        });
        self.expire_neighbors();
        self.advertise();
        self.tick_timer = ctx
            .schedule(&self.timer, self.config.update_period_ms, |s, ctx| {
                s.tick(ctx);
                None
            })
            .ok();
    }

    fn expire_neighbors(&mut self) {
        let now = self.clock.now();
        let limit = self.config.update_period_ms * Millis::from(self.config.missed_updates);
        let lost: Vec<NodeId> = self
            .heard
            .iter()
            .filter(|(_, at)| now.saturating_sub(**at) > limit)
            .map(|(n, _)| *n)
            .collect();
        for n in lost {
            let _ = self.heard.remove(&n);
            let broken: Vec<DsdvEntry> = self
                .table
                .values()
                .filter(|e| e.next_hop == n && e.dest != self.base.id && !e.is_broken())
                .copied()
                .collect();
            for e in broken {
                self.write(DsdvEntry {
                    seq: e.seq + 1,
                    hops: HOPS_INFINITE,
                    ..e
                });
            }
        }
    }

    fn advertise(&mut self) {
        let entries: Vec<DsdvEntry> = self.table.values().copied().collect();
        for chunk in entries.chunks(MAX_UPDATE_ROUTES) {
            let mut routes = StaticVector::<AdvertisedRoute, MAX_UPDATE_ROUTES>::new();
            for e in chunk {
                let _ = routes.push(AdvertisedRoute {
                    dest: e.dest,
                    next_hop: e.next_hop,
                    hops: e.hops,
                    seq: e.seq,
                });
            }
            let frame = Message::DsdvUpdate { routes }
                .encode()
                .expect("update fits");
            if self.base.radio.send(NodeId::BROADCAST, &frame).is_ok() {
                self.stats.update_frames += 1;
            }
        }
    }

    fn on_update(&mut self, from: NodeId, routes: &[AdvertisedRoute]) {
        let me = self.base.id;
        if from == me {
            return;
        }
        let now = self.clock.now();
        let _ = self.heard.insert(from, now);
        for r in routes {
            if r.dest == me {
                continue;
            }
            let hops = r.hops.saturating_add(1);
            let adopt = match self.table.get(&r.dest) {
                None => r.seq % 2 == 0,
                Some(cur) => r.seq > cur.seq || (r.seq == cur.seq && hops < cur.hops),
            };
            if adopt {
                self.write(DsdvEntry {
                    dest: r.dest,
                    next_hop: from,
                    hops,
                    seq: r.seq,
                });
            }
        }
    }

    fn next_hop(&self, dest: NodeId) -> Option<NodeId> {
        self.table
            .get(&dest)
            .filter(|e| !e.is_broken())
            .map(|e| e.next_hop)
    }
}

impl<R, T, C, const CAP: usize> ProtocolState for DsdvState<R, T, C, CAP>
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
        MessageKind::DsdvData.header_len()
    }

    fn started(&mut self, ctx: &Ctx<Self>) -> Result<()> {
        self.tick_timer = Some(ctx.schedule(&self.timer, 0, |s, ctx| {
            s.tick(ctx);
            None
        })?);
        Ok(())
    }

    fn stopped(&mut self) {
        if let Some(h) = self.tick_timer.take() {
            let _ = self.timer.cancel_timer(h);
        }
    }

    fn send(&mut self, ctx: &Ctx<Self>, dest: NodeId, payload: &[u8]) -> Result<()> {
        let me = self.base.id;
        if dest == me {
            return ctx.deliver_locally(&self.timer, me, payload);
        }
        let (next, ttl) = if dest.is_broadcast() {
            (NodeId::BROADCAST, 1)
        } else {
            (self.next_hop(dest).ok_or(Error::NoRoute)?, DATA_TTL)
        };
        let frame = Message::DsdvData {
            origin: me,
            dest,
            ttl,
            payload,
        }
        .encode()
        .map_err(|_| Error::PayloadTooLarge)?;
        self.base.radio.send(next, &frame)
    }

    fn on_frame(&mut self, _ctx: &Ctx<Self>, from: NodeId, frame: &[u8]) -> Option<Delivery> {
        match Message::decode(frame).ok()? {
            Message::DsdvUpdate { routes } => {
                self.on_update(from, &routes);
                None
            }
            Message::DsdvData {
                origin,
                dest,
                ttl,
                payload,
            } => {
                if dest == self.base.id || dest.is_broadcast() {
                    self.stats.delivered += 1;
                    return Some(Delivery::new(origin, payload));
                }
                let next = self.next_hop(dest).filter(|_| ttl > 1);
                let forwarded = next.is_some_and(|next| {
                    let out = Message::DsdvData {
                        origin,
                        dest,
                        ttl: ttl - 1,
                        payload,
                    }
                    .encode()
                    .expect("re-encoding a decoded frame");
                    self.base.radio.send(next, &out).is_ok()
                });
                if forwarded {
                    self.stats.data_forwarded += 1;
                } else {
                    self.stats.data_dropped += 1;
                }
                None
            }
            _ => None,
        }
    }
}

impl<R, T, C, const CAP: usize> RoutingState for DsdvState<R, T, C, CAP>
where
    R: Radio + 'static,
    T: Timer + 'static,
    C: Clock + 'static,
{
}
