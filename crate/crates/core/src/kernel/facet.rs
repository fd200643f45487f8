use std::rc::Rc;

use super::{CallbackHandle, Millis, NodeId, Result};

/// Invoked with the sender and payload of every message a radio hands up.
pub type ReceiveHandler = Rc<dyn Fn(NodeId, &[u8])>;

/// Like [`ReceiveHandler`], plus the link quality the message arrived with.
pub type ExtendedReceiveHandler = Rc<dyn Fn(NodeId, &[u8], u8)>;

/// One-shot timer callback.
pub type TimerHandler = Box<dyn FnOnce()>;

/// Basic radio contract: send a payload to a neighbor (or everyone in range)
/// and hand received payloads to registered handlers.
///
/// Methods take `&self`. Models are cheap shared handles so that callbacks
/// registered with lower layers can reach back into them.
///
/// Implementations never invoke receive handlers synchronously from
/// [`Radio::send`]; delivery always happens from a later event.
pub trait Radio {
    fn id(&self) -> NodeId;

    fn enable(&self) -> Result<()>;

    /// Idempotent.
    fn disable(&self);

    fn is_enabled(&self) -> bool;

    /// Sends `payload` to `dest`, or to every node in range when `dest` is
    /// [`NodeId::BROADCAST`].
    fn send(&self, dest: NodeId, payload: &[u8]) -> Result<()>;

    /// Largest payload [`Radio::send`] accepts.
    fn max_payload(&self) -> usize;

    fn register_receiver(&self, handler: ReceiveHandler) -> Result<CallbackHandle>;

    fn unregister_receiver(&self, handle: CallbackHandle) -> Result<()>;
}

/// A radio that also reports per-message link quality (RSSI/LQI style).
pub trait ExtendedRadio: Radio {
    fn register_extended_receiver(&self, handler: ExtendedReceiveHandler)
        -> Result<CallbackHandle>;
}

/// Multi-hop routing. A routing model is a radio whose reach is the whole
/// network, so it can be used wherever a [`Radio`] is expected.
///
/// Receive handlers get the originator of a message as the sender.
pub trait Routing: Radio {}

pub trait Timer {
    /// Arms a one-shot timer firing `delay_ms` from now.
    fn set_timer(&self, delay_ms: Millis, handler: TimerHandler) -> Result<CallbackHandle>;

    fn cancel_timer(&self, handle: CallbackHandle) -> Result<()>;
}

pub trait Clock {
    fn now(&self) -> Millis;
}

/// Text output channel, a UART on real hardware.
pub trait DebugOutput {
    fn emit(&self, text: &str) -> Result<()>;
}

macro_rules! forward_radio {
    ($ty:ty) => {
        fn id(&self) -> NodeId {
            <$ty>::id(self)
        }
        fn enable(&self) -> Result<()> {
            <$ty>::enable(self)
        }
        fn disable(&self) {
            <$ty>::disable(self)
        }
        fn is_enabled(&self) -> bool {
            <$ty>::is_enabled(self)
        }
        fn send(&self, dest: NodeId, payload: &[u8]) -> Result<()> {
            <$ty>::send(self, dest, payload)
        }
        fn max_payload(&self) -> usize {
            <$ty>::max_payload(self)
        }
        fn register_receiver(&self, handler: ReceiveHandler) -> Result<CallbackHandle> {
            <$ty>::register_receiver(self, handler)
        }
        fn unregister_receiver(&self, handle: CallbackHandle) -> Result<()> {
            <$ty>::unregister_receiver(self, handle)
        }
    };
}

impl<R: Radio + ?Sized> Radio for Rc<R> {
    forward_radio!(R);
}

impl<R: Routing + ?Sized> Routing for Rc<R> {}

impl<R: Radio + ?Sized> Radio for Box<R> {
    forward_radio!(R);
}

impl<R: Routing + ?Sized> Routing for Box<R> {}

impl<T: Timer + ?Sized> Timer for Rc<T> {
    fn set_timer(&self, delay_ms: Millis, handler: TimerHandler) -> Result<CallbackHandle> {
        T::set_timer(self, delay_ms, handler)
    }

    fn cancel_timer(&self, handle: CallbackHandle) -> Result<()> {
        T::cancel_timer(self, handle)
    }
}

impl<T: Timer + ?Sized> Timer for Box<T> {
    fn set_timer(&self, delay_ms: Millis, handler: TimerHandler) -> Result<CallbackHandle> {
        T::set_timer(self, delay_ms, handler)
    }

    fn cancel_timer(&self, handle: CallbackHandle) -> Result<()> {
        T::cancel_timer(self, handle)
    }
}

impl<C: Clock + ?Sized> Clock for Rc<C> {
    fn now(&self) -> Millis {
        C::now(self)
    }
}
