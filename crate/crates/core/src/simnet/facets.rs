use super::scheduler::Receiver;
use super::Simulator;
use crate::kernel::{
    CallbackHandle, Clock, DebugOutput, Error, ExtendedRadio, ExtendedReceiveHandler, Millis,
    NodeId, Radio, ReceiveHandler, Result, Timer, TimerHandler, MTU,
};

/// Radio of one simulated node. Starts switched off.
#[derive(Clone, Debug)]
pub struct SimRadio {
    sim: Simulator,
    id: NodeId,
}

impl Radio for SimRadio {
    fn id(&self) -> NodeId {
        self.id
    }

    fn enable(&self) -> Result<()> {
        self.sim.set_radio_on(self.id, true);
        Ok(())
    }

    fn disable(&self) {
        self.sim.set_radio_on(self.id, false);
    }

    fn is_enabled(&self) -> bool {
        self.sim.radio_on(self.id)
    }

    fn send(&self, dest: NodeId, payload: &[u8]) -> Result<()> {
        if !self.is_enabled() {
            return Err(Error::Disabled);
        }
        self.sim.send(self.id, dest, payload)
    }

    fn max_payload(&self) -> usize {
        MTU
    }

    fn register_receiver(&self, handler: ReceiveHandler) -> Result<CallbackHandle> {
        self.sim
            .register_receiver(self.id, Receiver::Plain(handler))
    }

    fn unregister_receiver(&self, handle: CallbackHandle) -> Result<()> {
        self.sim.unregister_receiver(self.id, handle)
    }
}

impl ExtendedRadio for SimRadio {
    fn register_extended_receiver(
        &self,
        handler: ExtendedReceiveHandler,
    ) -> Result<CallbackHandle> {
        self.sim
            .register_receiver(self.id, Receiver::Extended(handler))
    }
}

#[derive(Clone, Debug)]
pub struct SimTimer {
    sim: Simulator,
    node: NodeId,
}

impl Timer for SimTimer {
    fn set_timer(&self, delay_ms: Millis, handler: TimerHandler) -> Result<CallbackHandle> {
        self.sim.set_timer(self.node, delay_ms, handler)
    }

    fn cancel_timer(&self, handle: CallbackHandle) -> Result<()> {
        self.sim.cancel_timer(self.node, handle)
    }
}

#[derive(Clone, Debug)]
pub struct SimClock {
    sim: Simulator,
}

impl Clock for SimClock {
    fn now(&self) -> Millis {
        self.sim.now()
    }
}

/// Appends to the node's log, readable with [`Simulator::debug_log`].
#[derive(Clone, Debug)]
pub struct SimDebug {
    sim: Simulator,
    node: NodeId,
}

impl DebugOutput for SimDebug {
    fn emit(&self, text: &str) -> Result<()> {
        self.sim.log(self.node, text);
        Ok(())
    }
}

/// All facet models of one node.
#[derive(Clone, Debug)]
pub struct SimFacets {
    pub radio: SimRadio,
    pub timer: SimTimer,
    pub clock: SimClock,
    pub debug: SimDebug,
}

impl SimFacets {
    pub(super) fn new(sim: Simulator, node: NodeId) -> Self {
        SimFacets {
            radio: SimRadio {
                sim: sim.clone(),
                id: node,
            },
            timer: SimTimer {
                sim: sim.clone(),
                node,
            },
            clock: SimClock { sim: sim.clone() },
            debug: SimDebug { sim, node },
        }
    }

    pub fn id(&self) -> NodeId {
        self.radio.id
    }
}
