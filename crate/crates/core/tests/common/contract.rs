//! Contract suites shared by every model claiming the Radio or Routing
//! contract. Each check returns a description of the first violation.

use std::rc::Rc;

use wsn_core::kernel::{Millis, NodeId, Radio, HANDLER_CAPACITY, MTU};
use wsn_core::simnet::{Simulator, Topology};
use wsn_core::Error;

use super::stacks;
use super::{enable_all, listen, receivers_of};

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Builds one model per node of a simulator, none of them enabled.
type Build<M> = Box<dyn Fn(&Simulator) -> Vec<M>>;

pub struct Fixture<M> {
    pub name: String,
    pub build: Build<M>,
    /// Time the stack needs after enabling before it carries traffic.
    pub settle_ms: Millis,
}

impl<M> Fixture<M> {
    pub fn new(
        name: &str,
        settle_ms: Millis,
        build: impl Fn(&Simulator) -> Vec<M> + 'static,
    ) -> Self {
        Fixture {
            name: name.to_string(),
            build: Box::new(build),
            settle_ms,
        }
    }
}

fn triangle() -> Topology {
    "3\n0 1\n1 2\n0 2\n".parse().unwrap()
}

const RUN_MS: Millis = 500;

fn check_lifecycle<M: Radio>(models: &[M]) -> Result<(), String> {
    let m = &models[0];
    ensure!(m.id() == NodeId(0), "id() is {} for node 0", m.id());
    ensure!(!m.is_enabled(), "model starts enabled");
    m.enable().map_err(|e| format!("enable failed: {e}"))?;
    ensure!(m.is_enabled(), "not enabled after enable");
    m.enable()
        .map_err(|e| format!("second enable failed: {e}"))?;
    m.disable();
    ensure!(!m.is_enabled(), "still enabled after disable");
    m.disable();
    ensure!(!m.is_enabled(), "second disable re-enabled");
    Ok(())
}

fn check_disabled_send<M: Radio>(sim: &Simulator, models: &[M]) -> Result<(), String> {
    let r = models[0].send(NodeId(1), b"x");
    ensure!(
        r == Err(Error::Disabled),
        "send while disabled returned {r:?}"
    );
    sim.run_for(RUN_MS);
    let sent = sim.stats().total().transmissions;
    ensure!(sent == 0, "{sent} transmissions after a disabled send");
    Ok(())
}

fn check_receivers<M: Radio>(m: &M) -> Result<(), String> {
    let mut handles = Vec::new();
    for _ in 0..HANDLER_CAPACITY {
        handles.push(
            m.register_receiver(Rc::new(|_, _| {}))
                .map_err(|e| format!("register failed below capacity: {e}"))?,
        );
    }
    let over = m.register_receiver(Rc::new(|_, _| {}));
    ensure!(
        over == Err(Error::CapacityExceeded),
        "register over capacity returned {over:?}"
    );
    for h in &handles {
        m.unregister_receiver(*h)
            .map_err(|e| format!("unregister failed: {e}"))?;
    }
    let again = m.unregister_receiver(handles[0]);
    ensure!(
        again == Err(Error::NotRegistered),
        "double unregister returned {again:?}"
    );
    Ok(())
}

fn check_payload_limits<M: Radio>(m: &M) -> Result<(), String> {
    let max = m.max_payload();
    ensure!(max > 0 && max <= MTU, "max_payload {max} outside 1..={MTU}");
    let r = m.send(NodeId(1), &vec![0; max + 1]);
    ensure!(
        r == Err(Error::PayloadTooLarge),
        "oversize send returned {r:?}"
    );
    Ok(())
}

/// Radio contract on a fully linked triangle.
pub fn radio_contract<M: Radio>(f: &Fixture<M>) -> Result<(), String> {
    let sim = Simulator::new(triangle(), 7);
    check_lifecycle(&(f.build)(&sim)).map_err(|e| format!("{}: {e}", f.name))?;
    let sim = Simulator::new(triangle(), 7);
    check_disabled_send(&sim, &(f.build)(&sim)).map_err(|e| format!("{}: {e}", f.name))?;
    radio_traffic(f).map_err(|e| format!("{}: {e}", f.name))
}

fn radio_traffic<M: Radio>(f: &Fixture<M>) -> Result<(), String> {
    let sim = Simulator::new(triangle(), 7);
    let models = (f.build)(&sim);
    check_receivers(&models[1])?;
    let inbox = listen(&sim, &models);
    enable_all(&models);
    sim.run_for(f.settle_ms);
    check_payload_limits(&models[0])?;

    let max = models[0].max_payload();
    let unicast: Vec<u8> = (0..max).map(|i| i as u8 ^ 0x5a).collect();
    models[0]
        .send(NodeId(1), &unicast)
        .map_err(|e| format!("unicast failed: {e}"))?;
    ensure!(
        receivers_of(&inbox, &unicast).is_empty(),
        "receiver ran inside send"
    );
    sim.run_for(RUN_MS);
    let got = receivers_of(&inbox, &unicast);
    ensure!(got == [NodeId(1)], "unicast 0->1 reached {got:?}");
    let from = inbox
        .borrow()
        .iter()
        .find(|r| r.payload == unicast)
        .map(|r| r.from);
    ensure!(
        from == Some(NodeId(0)),
        "unicast sender reported as {from:?}"
    );

    models[0]
        .send(NodeId::BROADCAST, b"all")
        .map_err(|e| format!("broadcast failed: {e}"))?;
    sim.run_for(RUN_MS);
    let got = receivers_of(&inbox, b"all");
    ensure!(got == [NodeId(1), NodeId(2)], "broadcast reached {got:?}");

    models[2].disable();
    models[0]
        .send(NodeId::BROADCAST, b"off")
        .map_err(|e| format!("broadcast failed: {e}"))?;
    sim.run_for(RUN_MS);
    let got = receivers_of(&inbox, b"off");
    ensure!(
        got == [NodeId(1)],
        "broadcast with node 2 disabled reached {got:?}"
    );

    models[2]
        .enable()
        .map_err(|e| format!("re-enable failed: {e}"))?;
    sim.run_for(f.settle_ms);
    models[0]
        .send(NodeId::BROADCAST, b"back")
        .map_err(|e| format!("broadcast failed: {e}"))?;
    sim.run_for(RUN_MS);
    let got = receivers_of(&inbox, b"back");
    ensure!(
        got == [NodeId(1), NodeId(2)],
        "broadcast after re-enable reached {got:?}"
    );
    Ok(())
}

/// Routing contract on the path 0-1-2. Node 0 is the destination of all
/// traffic, which every routing model, converge-cast included, supports.
pub fn routing_contract<M: Radio>(f: &Fixture<M>) -> Result<(), String> {
    let sim = Simulator::new(Topology::path(3), 11);
    check_lifecycle(&(f.build)(&sim)).map_err(|e| format!("{}: {e}", f.name))?;
    let sim = Simulator::new(Topology::path(3), 11);
    check_disabled_send(&sim, &(f.build)(&sim)).map_err(|e| format!("{}: {e}", f.name))?;
    routing_traffic(f).map_err(|e| format!("{}: {e}", f.name))
}

fn routing_traffic<M: Radio>(f: &Fixture<M>) -> Result<(), String> {
    let sim = Simulator::new(Topology::path(3), 11);
    let models = (f.build)(&sim);
    check_receivers(&models[0])?;
    let inbox = listen(&sim, &models);
    enable_all(&models);
    sim.run_for(f.settle_ms);
    check_payload_limits(&models[2])?;

    let max = models[2].max_payload();
    let far: Vec<u8> = (0..max).map(|i| (i * 7) as u8).collect();
    models[2]
        .send(NodeId(0), &far)
        .map_err(|e| format!("send 2->0 failed: {e}"))?;
    ensure!(
        receivers_of(&inbox, &far).is_empty(),
        "receiver ran inside send"
    );
    sim.run_for(RUN_MS);
    let at_sink: Vec<_> = inbox
        .borrow()
        .iter()
        .filter(|r| r.node == NodeId(0) && r.payload == far)
        .map(|r| r.from)
        .collect();
    ensure!(
        at_sink == [NodeId(2)],
        "2->0 over two hops delivered {at_sink:?} at node 0"
    );

    models[1]
        .send(NodeId(0), b"near")
        .map_err(|e| format!("send 1->0 failed: {e}"))?;
    sim.run_for(RUN_MS);
    let got = receivers_of(&inbox, b"near");
    ensure!(got.contains(&NodeId(0)), "1->0 not delivered: {got:?}");
    ensure!(
        !got.contains(&NodeId(1)),
        "1->0 delivered back to the sender"
    );

    models[0].disable();
    let _ = models[2].send(NodeId(0), b"sink-off");
    sim.run_for(RUN_MS);
    let got = receivers_of(&inbox, b"sink-off");
    ensure!(!got.contains(&NodeId(0)), "disabled destination received");

    models[0]
        .enable()
        .map_err(|e| format!("re-enable failed: {e}"))?;
    sim.run_for(f.settle_ms);
    models[1].disable();
    let _ = models[2].send(NodeId(0), b"relay-off");
    sim.run_for(RUN_MS);
    let got = receivers_of(&inbox, b"relay-off");
    ensure!(
        !got.contains(&NodeId(0)),
        "message crossed a disabled relay"
    );

    models[1]
        .enable()
        .map_err(|e| format!("re-enable failed: {e}"))?;
    sim.run_for(f.settle_ms);
    models[2]
        .send(NodeId(0), b"again")
        .map_err(|e| format!("send after re-enable failed: {e}"))?;
    sim.run_for(RUN_MS);
    let got = receivers_of(&inbox, b"again");
    ensure!(
        got.contains(&NodeId(0)),
        "not delivered after re-enable: {got:?}"
    );
    Ok(())
}

const KEY: [u8; 16] = *b"contract-suite-k";

/// Runs the radio contract against every radio model.
pub fn all_radio_suites() -> Vec<(String, Result<(), String>)> {
    let sim_radio = Fixture::new("SimRadio", 0, |sim| {
        (0..sim.node_count() as u64)
            .map(|n| sim.facets(NodeId(n)).radio)
            .collect()
    });
    let over_flood = Fixture::new("VirtualRadio(flooding)", 0, |sim| {
        stacks::virtual_radios(stacks::flood(sim))
    });
    let over_dsdv = Fixture::new("VirtualRadio(dsdv)", 3000, |sim| {
        stacks::virtual_radios(stacks::dsdv(sim))
    });
    vec![
        (sim_radio.name.clone(), radio_contract(&sim_radio)),
        (over_flood.name.clone(), radio_contract(&over_flood)),
        (over_dsdv.name.clone(), radio_contract(&over_dsdv)),
    ]
}

/// Runs the routing contract against every routing model.
pub fn all_routing_suites() -> Vec<(String, Result<(), String>)> {
    let n = 3;
    let mut out = Vec::new();
    let mut run = |f: Result<(), String>, name: &str| out.push((name.to_string(), f));
    let f = Fixture::new("flooding", 0, stacks::flood);
    run(routing_contract(&f), &f.name);
    let f = Fixture::new("tree", 1000, |sim| stacks::tree(sim, NodeId(0)));
    run(routing_contract(&f), &f.name);
    let f = Fixture::new("dsdv", 3000, stacks::dsdv);
    run(routing_contract(&f), &f.name);
    let f = Fixture::new("dsr", 0, stacks::dsr);
    run(routing_contract(&f), &f.name);
    let f = Fixture::new("SecureRouting(flooding, xor)", 0, move |sim| {
        stacks::secure_xor(stacks::flood(sim), &KEY, n)
    });
    run(routing_contract(&f), &f.name);
    let f = Fixture::new("SecureRouting(tree, identity)", 1000, move |sim| {
        stacks::secure_identity(stacks::tree(sim, NodeId(0)), n)
    });
    run(routing_contract(&f), &f.name);
    let f = Fixture::new("SecureRouting(dsdv, identity)", 3000, move |sim| {
        stacks::secure_identity(stacks::dsdv(sim), n)
    });
    run(routing_contract(&f), &f.name);
    let f = Fixture::new("SecureRouting(dsr, xor)", 0, move |sim| {
        stacks::secure_xor(stacks::dsr(sim), &KEY, n)
    });
    run(routing_contract(&f), &f.name);
    out
}
