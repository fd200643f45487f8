use std::cell::RefCell;
use std::rc::Rc;

use proptest::prelude::*;
use wsn_core::kernel::{ExtendedRadio, NodeId, Radio, Timer};
use wsn_core::simnet::{Simulator, Topology, TraceKind};
use wsn_core::Error;

type Inbox = Rc<RefCell<Vec<(u64, NodeId, NodeId, Vec<u8>)>>>;

/// Enables every radio and records what each node receives.
fn listen_all(sim: &Simulator) -> Inbox {
    let inbox: Inbox = Rc::default();
    for n in 0..sim.node_count() as u64 {
        let facets = sim.facets(NodeId(n));
        facets.radio.enable().unwrap();
        let inbox = inbox.clone();
        let clock = sim.clone();
        facets
            .radio
            .register_receiver(Rc::new(move |from, data| {
                inbox
                    .borrow_mut()
                    .push((clock.now(), from, NodeId(n), data.to_vec()))
            }))
            .unwrap();
    }
    inbox
}

#[test]
fn broadcast_reaches_only_neighbors() {
    let sim = Simulator::new(Topology::path(3), 1);
    let inbox = listen_all(&sim);
    sim.facets(NodeId(0))
        .radio
        .send(NodeId::BROADCAST, b"m")
        .unwrap();
    sim.run_until(10);
    let got = inbox.borrow();
    assert_eq!(got.len(), 1);
    assert_eq!(got[0], (1, NodeId(0), NodeId(1), b"m".to_vec()));
}

#[test]
fn unicast_to_non_neighbor_is_dropped() {
    let sim = Simulator::new(Topology::path(3), 1);
    let inbox = listen_all(&sim);
    sim.facets(NodeId(0)).radio.send(NodeId(2), b"m").unwrap();
    sim.run_until(10);
    assert!(inbox.borrow().is_empty());
    let total = sim.stats().total();
    assert_eq!((total.sent, total.dropped, total.delivered), (1, 1, 0));
}

#[test]
fn certain_loss_delivers_nothing() {
    let mut topology = Topology::random_connected(6, 10, 3);
    topology.for_each_link_mut(|l| l.drop_prob = 1.0);
    let sim = Simulator::new(topology, 9);
    let inbox = listen_all(&sim);
    let radio = sim.facets(NodeId(0)).radio;
    for _ in 0..100 {
        radio.send(NodeId::BROADCAST, b"x").unwrap();
    }
    sim.run_until(100);
    assert!(inbox.borrow().is_empty());
    assert_eq!(sim.stats().total().delivered, 0);
}

#[test]
fn oversize_payload_and_disabled_radio() {
    let sim = Simulator::new(Topology::path(2), 1);
    let radio = sim.facets(NodeId(0)).radio;
    assert_eq!(radio.send(NodeId(1), b"x"), Err(Error::Disabled));
    radio.enable().unwrap();
    assert_eq!(
        radio.send(NodeId(1), &[0u8; wsn_core::MTU + 1]),
        Err(Error::PayloadTooLarge)
    );
    assert_eq!(radio.send(NodeId(1), &[0u8; wsn_core::MTU]), Ok(()));
}

#[test]
fn frames_to_a_switched_off_radio_are_dropped() {
    let sim = Simulator::new(Topology::path(2), 1);
    let a = sim.facets(NodeId(0)).radio;
    let b = sim.facets(NodeId(1)).radio;
    a.enable().unwrap();
    let hits = Rc::new(RefCell::new(0));
    let h = hits.clone();
    b.register_receiver(Rc::new(move |_, _| *h.borrow_mut() += 1))
        .unwrap();
    a.send(NodeId(1), b"x").unwrap();
    sim.run_until(5);
    assert_eq!(*hits.borrow(), 0);
    let total = sim.stats().total();
    assert_eq!((total.sent, total.delivered, total.dropped), (1, 0, 1));
    assert!(matches!(
        sim.trace().events()[0].kind,
        TraceKind::Deliver {
            accepted: false,
            ..
        }
    ));
}

fn fire_log(
    sim: &Simulator,
    node: NodeId,
    delay: u64,
    label: &'static str,
    log: &Rc<RefCell<Vec<(u64, &'static str)>>>,
) {
    let log = log.clone();
    let clock = sim.clone();
    sim.facets(node)
        .timer
        .set_timer(
            delay,
            Box::new(move || log.borrow_mut().push((clock.now(), label))),
        )
        .unwrap();
}

#[test]
fn timer_delay_is_additive() {
    let sim = Simulator::new(Topology::path(1), 1);
    sim.run_until(5);
    let log = Rc::default();
    fire_log(&sim, NodeId(0), 10, "h", &log);
    sim.run_until(14);
    assert!(log.borrow().is_empty());
    sim.run_until(20);
    assert_eq!(*log.borrow(), vec![(15, "h")]);
}

#[test]
fn zero_delay_timer_runs_after_events_already_queued_for_now() {
    let sim = Simulator::new(Topology::path(1), 1);
    let log: Rc<RefCell<Vec<(u64, &'static str)>>> = Rc::default();
    fire_log(&sim, NodeId(0), 0, "a", &log);
    {
        // "b" arms a zero-delay timer while "c" is already queued for t=0.
        let log2 = log.clone();
        let sim2 = sim.clone();
        let clock = sim.clone();
        sim.facets(NodeId(0))
            .timer
            .set_timer(
                0,
                Box::new(move || {
                    log2.borrow_mut().push((clock.now(), "b"));
                    fire_log(&sim2, NodeId(0), 0, "d", &log2);
                }),
            )
            .unwrap();
    }
    fire_log(&sim, NodeId(0), 0, "c", &log);
    let trace = sim.run_until(0);
    assert_eq!(*log.borrow(), vec![(0, "a"), (0, "b"), (0, "c"), (0, "d")]);
    let seqs: Vec<u64> = trace.events().iter().map(|e| e.seq).collect();
    assert!(seqs.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn equal_delays_fire_in_arming_order() {
    let sim = Simulator::new(Topology::path(2), 1);
    let log = Rc::default();
    fire_log(&sim, NodeId(1), 10, "first", &log);
    fire_log(&sim, NodeId(0), 10, "second", &log);
    sim.run_until(10);
    assert_eq!(*log.borrow(), vec![(10, "first"), (10, "second")]);
}

#[test]
fn cancelled_timer_never_fires_even_if_slot_is_reused() {
    let sim = Simulator::new(Topology::path(1), 1);
    let timer = sim.facets(NodeId(0)).timer;
    let log = Rc::default();
    let h = {
        let log: Rc<RefCell<Vec<(u64, &'static str)>>> = Rc::clone(&log);
        timer
            .set_timer(5, Box::new(move || log.borrow_mut().push((5, "old"))))
            .unwrap()
    };
    timer.cancel_timer(h).unwrap();
    assert_eq!(timer.cancel_timer(h), Err(Error::NotRegistered));
    fire_log(&sim, NodeId(0), 10, "new", &log);
    sim.run_until(20);
    assert_eq!(*log.borrow(), vec![(10, "new")]);
}

#[test]
fn run_until_on_empty_queue_advances_clock() {
    let sim = Simulator::new(Topology::path(1), 1);
    assert!(sim.run_until(100).is_empty());
    assert_eq!(sim.now(), 100);
}

#[test]
fn run_until_stops_at_horizon() {
    let sim = Simulator::new(Topology::path(1), 1);
    let log = Rc::default();
    fire_log(&sim, NodeId(0), 3, "early", &log);
    fire_log(&sim, NodeId(0), 7, "late", &log);
    let trace = sim.run_until(5);
    assert_eq!(trace.len(), 1);
    assert_eq!(trace.events()[0].at, 3);
    assert_eq!(sim.now(), 5);
    assert_eq!(sim.pending_events(), 1);
}

#[test]
fn extended_receivers_see_link_quality() {
    let sim = Simulator::new(Topology::parse("3\n0 1 1 0 200\n1 2\n").unwrap(), 1);
    assert_eq!(sim.link_quality(NodeId(0), NodeId(1)), Ok(200));
    assert_eq!(sim.link_quality(NodeId(1), NodeId(2)), Ok(255));
    assert!(sim.link_quality(NodeId(0), NodeId(2)).is_err());
    let seen = Rc::new(RefCell::new(Vec::new()));
    let r1 = sim.facets(NodeId(1)).radio;
    r1.enable().unwrap();
    let s = seen.clone();
    r1.register_extended_receiver(Rc::new(move |from, _, q| s.borrow_mut().push((from, q))))
        .unwrap();
    for n in [0, 2] {
        let r = sim.facets(NodeId(n)).radio;
        r.enable().unwrap();
        r.send(NodeId(1), b"q").unwrap();
    }
    sim.run_until(5);
    assert_eq!(*seen.borrow(), vec![(NodeId(0), 200), (NodeId(2), 255)]);
}

#[test]
fn debug_facet_collects_lines() {
    use wsn_core::kernel::DebugOutput;
    let sim = Simulator::new(Topology::path(2), 1);
    sim.facets(NodeId(1)).debug.emit("hello").unwrap();
    assert_eq!(sim.debug_log(NodeId(1)), vec!["hello".to_string()]);
    assert!(sim.debug_log(NodeId(0)).is_empty());
}

/// Lossy random traffic; returns the rendered trace and the stats.
fn lossy_run(seed: u64) -> (String, wsn_core::simnet::LinkStats) {
    let mut topology = Topology::random_connected(12, 24, 5);
    let mut i = 0;
    topology.for_each_link_mut(|l| {
        l.drop_prob = 0.3;
        l.latency_ms = 1 + i % 4;
        i += 1;
    });
    let sim = Simulator::new(topology, seed);
    let inbox = listen_all(&sim);
    for round in 0..20u64 {
        for n in 0..12u64 {
            let dest = if (n + round) % 3 == 0 {
                NodeId::BROADCAST
            } else {
                NodeId((n * 7 + round) % 12)
            };
            let _ = sim
                .facets(NodeId(n))
                .radio
                .send(dest, &[round as u8, n as u8]);
        }
        sim.run_for(3);
    }
    sim.run_for(100);
    drop(inbox);
    (sim.trace().render(), sim.stats())
}

#[test]
fn equal_seeds_give_identical_traces() {
    let (a, stats_a) = lossy_run(77);
    let (b, stats_b) = lossy_run(77);
    assert_eq!(a, b);
    assert_eq!(stats_a, stats_b);
    let (c, _) = lossy_run(78);
    assert_ne!(a, c);
}

#[test]
fn sent_equals_delivered_plus_dropped_once_drained() {
    for seed in 0..5 {
        let (_, stats) = lossy_run(seed);
        let total = stats.total();
        assert_eq!(total.sent, total.delivered + total.dropped);
        assert!(total.dropped > 0 && total.delivered > 0);
    }
}

proptest! {
    #[test]
    fn lossless_links_deliver_once_at_exact_latency(
        seed in any::<u64>(),
        n in 2usize..12,
        sends in proptest::collection::vec((any::<u8>(), any::<u8>(), any::<bool>()), 1..30),
    ) {
        let mut topology = Topology::random_connected(n, 2 * n, seed);
        let mut i = 0u64;
        topology.for_each_link_mut(|l| { l.latency_ms = i % 5; i += 1; });
        let sim = Simulator::new(topology.clone(), seed);
        let inbox = listen_all(&sim);
        let mut expected = Vec::new();
        for (k, (from, to, broadcast)) in sends.iter().enumerate() {
            let from = NodeId(u64::from(*from) % n as u64);
            let to = NodeId(u64::from(*to) % n as u64);
            let payload = vec![k as u8];
            let now = sim.now();
            if *broadcast {
                for &nb in topology.neighbors(from) {
                    expected.push((now + topology.link(from, nb).unwrap().latency_ms, from, nb, payload.clone()));
                }
                sim.facets(from).radio.send(NodeId::BROADCAST, &payload).unwrap();
            } else {
                if let Some(link) = topology.link(from, to) {
                    expected.push((now + link.latency_ms, from, to, payload.clone()));
                }
                sim.facets(from).radio.send(to, &payload).unwrap();
            }
            sim.run_for(1);
        }
        sim.run_for(10);
        let mut got = inbox.borrow().clone();
        got.sort();
        expected.sort();
        prop_assert_eq!(got, expected);
    }
}
