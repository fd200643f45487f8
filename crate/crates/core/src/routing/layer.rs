use std::cell::{Ref, RefCell};
use std::fmt;
use std::rc::{Rc, Weak};

use crate::kernel::{
    CallbackHandle, CallbackRegistry, Error, Millis, NodeId, Radio, ReceiveHandler, Result,
    Routing, Timer, HANDLER_CAPACITY,
};
use crate::wire::Frame;

/// A payload to hand to the layer's receive handlers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub from: NodeId,
    pub payload: Frame,
}

impl Delivery {
    pub fn new(from: NodeId, payload: &[u8]) -> Self {
        Delivery {
            from,
            payload: Frame::from_slice(payload).expect("payload within MTU"),
        }
    }
}

/// State every layer carries: its lower radio and its own receivers.
pub struct Base<R> {
    pub(crate) id: NodeId,
    pub(crate) radio: R,
    pub(crate) enabled: bool,
    radio_handle: Option<CallbackHandle>,
    receivers: CallbackRegistry<ReceiveHandler, HANDLER_CAPACITY>,
}

impl<R: Radio> Base<R> {
    pub fn new(radio: R) -> Self {
        Base {
            id: radio.id(),
            radio,
            enabled: false,
            radio_handle: None,
            receivers: CallbackRegistry::new(),
        }
    }
}

/// Protocol logic plugged into a [`Layer`].
///
/// The layer owns enable/disable bookkeeping, payload size checks and the
/// receiver registry. The state only decides what a frame from below or a
/// send from above means.
pub trait ProtocolState: Sized + 'static {
    type Radio: Radio;

    fn base(&self) -> &Base<Self::Radio>;

    fn base_mut(&mut self) -> &mut Base<Self::Radio>;

    /// Bytes this layer adds in front of a payload.
    fn header_len(&self) -> usize;

    /// Called once the layer is registered with its radio.
    fn started(&mut self, _ctx: &Ctx<Self>) -> Result<()> {
        Ok(())
    }

    /// Called when the layer is disabled; cancel timers here.
    fn stopped(&mut self) {}

    fn send(&mut self, ctx: &Ctx<Self>, dest: NodeId, payload: &[u8]) -> Result<()>;

    /// Handles a frame from the radio below. A returned delivery is handed to
    /// this layer's receivers once the state has been released.
    fn on_frame(&mut self, ctx: &Ctx<Self>, from: NodeId, frame: &[u8]) -> Option<Delivery>;
}

/// Marker for states that route across multiple hops.
pub trait RoutingState: ProtocolState {}

/// Lets protocol code schedule callbacks back into its own state.
pub struct Ctx<S> {
    weak: Weak<RefCell<S>>,
}

impl<S> Clone for Ctx<S> {
    fn clone(&self) -> Self {
        Ctx {
            weak: self.weak.clone(),
        }
    }
}

impl<S: ProtocolState> Ctx<S> {
    /// Runs `f` against the state after `delay_ms`. Deliveries it returns go
    /// to the layer's receivers.
    pub fn schedule<T: Timer + ?Sized>(
        &self,
        timer: &T,
        delay_ms: Millis,
        f: impl FnOnce(&mut S, &Ctx<S>) -> Option<Delivery> + 'static,
    ) -> Result<CallbackHandle> {
        let ctx = self.clone();
        timer.set_timer(
            delay_ms,
            Box::new(move || {
                let Some(cell) = ctx.weak.upgrade() else {
                    return;
                };
                let delivery = {
                    let mut state = cell.borrow_mut();
                    f(&mut state, &ctx).map(|d| (d, state.base().receivers.snapshot()))
                };
                if let Some((d, receivers)) = delivery {
                    dispatch(&receivers, &d);
                }
            }),
        )
    }

    /// Delivers `payload` to this node's own receivers from a zero-delay
    /// timer, so receivers never run inside `send`.
    pub fn deliver_locally<T: Timer + ?Sized>(
        &self,
        timer: &T,
        from: NodeId,
        payload: &[u8],
    ) -> Result<()> {
        let delivery = Delivery::new(from, payload);
        self.schedule(timer, 0, move |_, _| Some(delivery))
            .map(drop)
    }
}

fn dispatch(receivers: &[ReceiveHandler], delivery: &Delivery) {
    for r in receivers {
        r(delivery.from, &delivery.payload);
    }
}

/// Shared handle to a protocol layer. Implements [`Radio`], and
/// [`Routing`] when the state routes, so layers stack on each other.
///
/// Enabling a layer enables the radio below it; disabling it disables that
/// radio as well. Protocol state survives a disable.
///
/// The receiver registered with the radio below holds only a weak
/// reference, so a layer whose last handle is dropped goes silent.
pub struct Layer<S> {
    state: Rc<RefCell<S>>,
}

impl<S> Clone for Layer<S> {
    fn clone(&self) -> Self {
        Layer {
            state: self.state.clone(),
        }
    }
}

impl<S: ProtocolState> Layer<S> {
    pub fn from_state(state: S) -> Self {
        Layer {
            state: Rc::new(RefCell::new(state)),
        }
    }

    /// Read access for inspection. Do not hold across a simulator step.
    pub fn state(&self) -> Ref<'_, S> {
        self.state.borrow()
    }

    pub(crate) fn with_state_mut<T>(&self, f: impl FnOnce(&mut S, &Ctx<S>) -> T) -> T {
        let ctx = self.ctx();
        f(&mut self.state.borrow_mut(), &ctx)
    }

    fn ctx(&self) -> Ctx<S> {
        Ctx {
            weak: Rc::downgrade(&self.state),
        }
    }

    fn on_radio_frame(ctx: &Ctx<S>, from: NodeId, frame: &[u8]) {
        let Some(cell) = ctx.weak.upgrade() else {
            return;
        };
        let delivery = {
            let mut state = cell.borrow_mut();
            if !state.base().enabled {
                return;
            }
            state
                .on_frame(ctx, from, frame)
                .map(|d| (d, state.base().receivers.snapshot()))
        };
        if let Some((d, receivers)) = delivery {
            dispatch(&receivers, &d);
        }
    }
}

impl<S: ProtocolState> Radio for Layer<S> {
    fn id(&self) -> NodeId {
        self.state.borrow().base().id
    }

    fn enable(&self) -> Result<()> {
        let ctx = self.ctx();
        let mut state = self.state.borrow_mut();
        if state.base().enabled {
            return Ok(());
        }
        let base = state.base_mut();
        base.radio.enable()?;
        let frame_ctx = ctx.clone();
        let handle = base.radio.register_receiver(Rc::new(move |from, frame| {
            Self::on_radio_frame(&frame_ctx, from, frame)
        }))?;
        base.radio_handle = Some(handle);
        base.enabled = true;
        if let Err(e) = state.started(&ctx) {
            let base = state.base_mut();
            base.enabled = false;
            if let Some(h) = base.radio_handle.take() {
                let _ = base.radio.unregister_receiver(h);
            }
            return Err(e);
        }
        Ok(())
    }

    fn disable(&self) {
        let mut state = self.state.borrow_mut();
        if !state.base().enabled {
            return;
        }
        let base = state.base_mut();
        base.enabled = false;
        if let Some(h) = base.radio_handle.take() {
            let _ = base.radio.unregister_receiver(h);
        }
        state.stopped();
        state.base().radio.disable();
    }

    fn is_enabled(&self) -> bool {
        self.state.borrow().base().enabled
    }

    fn send(&self, dest: NodeId, payload: &[u8]) -> Result<()> {
        let ctx = self.ctx();
        let mut state = self.state.borrow_mut();
        if !state.base().enabled {
            return Err(Error::Disabled);
        }
        let limit = state
            .base()
            .radio
            .max_payload()
            .saturating_sub(state.header_len());
        if payload.len() > limit {
            return Err(Error::PayloadTooLarge);
        }
        state.send(&ctx, dest, payload)
    }

    fn max_payload(&self) -> usize {
        let state = self.state.borrow();
        state
            .base()
            .radio
            .max_payload()
            .saturating_sub(state.header_len())
    }

    fn register_receiver(&self, handler: ReceiveHandler) -> Result<CallbackHandle> {
        self.state
            .borrow_mut()
            .base_mut()
            .receivers
            .register(handler)
    }

    fn unregister_receiver(&self, handle: CallbackHandle) -> Result<()> {
        self.state
            .borrow_mut()
            .base_mut()
            .receivers
            .unregister(handle)
    }
}

impl<S: RoutingState> Routing for Layer<S> {}

impl<S: ProtocolState> fmt::Debug for Layer<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let state = self.state.borrow();
        f.debug_struct("Layer")
            .field("id", &state.base().id)
            .field("enabled", &state.base().enabled)
            .finish_non_exhaustive()
    }
}
