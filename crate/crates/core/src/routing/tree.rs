use super::layer::{Base, Ctx, Delivery, Layer, ProtocolState, RoutingState};
use crate::kernel::{CallbackHandle, Error, Millis, NodeId, Radio, Result, Timer};
use crate::wire::{Message, MessageKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeConfig {
    pub is_sink: bool,
    pub beacon_period_ms: Millis,
}

impl TreeConfig {
    pub const DEFAULT_BEACON_PERIOD_MS: Millis = 1000;

    pub fn sink() -> Self {
        TreeConfig {
            is_sink: true,
            beacon_period_ms: Self::DEFAULT_BEACON_PERIOD_MS,
        }
    }

    pub fn node() -> Self {
        TreeConfig {
            is_sink: false,
            beacon_period_ms: Self::DEFAULT_BEACON_PERIOD_MS,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TreeStats {
    pub beacons_sent: u64,
    pub parent_changes: u64,
    pub data_forwarded: u64,
    pub data_dropped: u64,
    pub delivered: u64,
}

/// Converge-cast toward a single sink along a beacon-built spanning tree.
pub struct TreeState<R, T> {
    base: Base<R>,
    timer: T,
    config: TreeConfig,
    parent: Option<NodeId>,
    my_hops: u8,
    sink: Option<NodeId>,
    beacon_timer: Option<CallbackHandle>,
    stats: TreeStats,
}

pub type TreeRouting<R, T> = Layer<TreeState<R, T>>;

impl<R: Radio + 'static, T: Timer + 'static> Layer<TreeState<R, T>> {
    pub fn new(radio: R, timer: T, config: TreeConfig) -> Self {
        Layer::from_state(TreeState {
            base: Base::new(radio),
            timer,
            config,
            parent: None,
            my_hops: u8::MAX,
            sink: None,
            beacon_timer: None,
            stats: TreeStats::default(),
        })
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.state().parent
    }

    /// Hop distance to the sink; `None` while not attached.
    pub fn hops(&self) -> Option<u8> {
        let s = self.state();
        (s.my_hops != u8::MAX).then_some(s.my_hops)
    }

    pub fn sink(&self) -> Option<NodeId> {
        self.state().sink
    }

    pub fn stats(&self) -> TreeStats {
        self.state().stats
    }
}

impl<R: Radio + 'static, T: Timer + 'static> TreeState<R, T> {
    fn beacon(&mut self) {
        let Some(sink) = self.sink else { return };
        let frame = Message::TreeBeacon {
            sink,
            hops: self.my_hops,
        }
        .encode()
        .expect("beacon fits");
        if self.base.radio.send(NodeId::BROADCAST, &frame).is_ok() {
            self.stats.beacons_sent += 1;
        }
    }

    fn arm(&mut self, ctx: &Ctx<Self>, delay: Millis) {
        self.beacon_timer = ctx
            .schedule(&self.timer, delay, |s, ctx| {
                s.beacon_timer = None;
                s.beacon();
                s.arm(ctx, s.config.beacon_period_ms);
                None
            })
            .ok();
    }

    fn on_beacon(&mut self, from: NodeId, sink: NodeId, hops: u8) {
        if self.config.is_sink {
            return;
        }
        let offered = hops.saturating_add(1);
        if offered >= self.my_hops {
            return;
        }
        if self.parent != Some(from) {
            self.stats.parent_changes += 1;
        }
        self.parent = Some(from);
        self.my_hops = offered;
        self.sink = Some(sink);
        self.beacon();
    }
}

impl<R: Radio + 'static, T: Timer + 'static> ProtocolState for TreeState<R, T> {
    type Radio = R;

    fn base(&self) -> &Base<R> {
        &self.base
    }

    fn base_mut(&mut self) -> &mut Base<R> {
        &mut self.base
    }

    fn header_len(&self) -> usize {
        MessageKind::TreeData.header_len()
    }

    fn started(&mut self, ctx: &Ctx<Self>) -> Result<()> {
        if self.config.is_sink {
            self.sink = Some(self.base.id);
            self.my_hops = 0;
            self.arm(ctx, 0);
        }
        Ok(())
    }

    fn stopped(&mut self) {
        if let Some(h) = self.beacon_timer.take() {
            let _ = self.timer.cancel_timer(h);
        }
    }

    fn send(&mut self, ctx: &Ctx<Self>, dest: NodeId, payload: &[u8]) -> Result<()> {
        if self.sink != Some(dest) {
            return Err(Error::NoRoute);
        }
        if self.config.is_sink {
            return ctx.deliver_locally(&self.timer, self.base.id, payload);
        }
        let parent = self.parent.ok_or(Error::NoRoute)?;
        let frame = Message::TreeData {
            originator: self.base.id,
            payload,
        }
        .encode()
        .map_err(|_| Error::PayloadTooLarge)?;
        self.base.radio.send(parent, &frame)
    }

    fn on_frame(&mut self, _ctx: &Ctx<Self>, from: NodeId, frame: &[u8]) -> Option<Delivery> {
        match Message::decode(frame).ok()? {
            Message::TreeBeacon { sink, hops } => {
                self.on_beacon(from, sink, hops);
                None
            }
            Message::TreeData {
                originator,
                payload,
            } => {
                if self.config.is_sink {
                    self.stats.delivered += 1;
                    return Some(Delivery::new(originator, payload));
                }
                match self.parent {
                    Some(parent) if self.base.radio.send(parent, frame).is_ok() => {
                        self.stats.data_forwarded += 1;
                    }
                    _ => self.stats.data_dropped += 1,
                }
                None
            }
            _ => None,
        }
    }
}

impl<R: Radio + 'static, T: Timer + 'static> RoutingState for TreeState<R, T> {}
