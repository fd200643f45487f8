#![allow(dead_code)]

pub mod contract;
pub mod oracle;
pub mod pmp_checks;
pub mod pstl_checks;
pub mod stacks;
pub mod wire_checks;

use std::cell::RefCell;
use std::rc::Rc;

use wsn_core::kernel::{Millis, NodeId, Radio};
use wsn_core::simnet::Simulator;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Received {
    pub at: Millis,
    pub node: NodeId,
    pub from: NodeId,
    pub payload: Vec<u8>,
}

pub type Inbox = Rc<RefCell<Vec<Received>>>;

/// Records every reception on every model.
pub fn listen<M: Radio>(sim: &Simulator, models: &[M]) -> Inbox {
    let inbox: Inbox = Rc::default();
    for m in models {
        let inbox = inbox.clone();
        let clock = sim.clone();
        let node = m.id();
        m.register_receiver(Rc::new(move |from, payload| {
            inbox.borrow_mut().push(Received {
                at: clock.now(),
                node,
                from,
                payload: payload.to_vec(),
            })
        }))
        .expect("receiver slot");
    }
    inbox
}

pub fn enable_all<M: Radio>(models: &[M]) {
    for m in models {
        m.enable().expect("enable");
    }
}

/// Receptions of `payload` grouped by receiving node.
pub fn receivers_of(inbox: &Inbox, payload: &[u8]) -> Vec<NodeId> {
    let mut nodes: Vec<NodeId> = inbox
        .borrow()
        .iter()
        .filter(|r| r.payload == payload)
        .map(|r| r.node)
        .collect();
    nodes.sort();
    nodes
}
