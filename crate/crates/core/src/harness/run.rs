use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use super::report::{KindCount, MessageRecord, MessageStatus, MetricsReport};
use super::scenario::{Algorithm, CryptoChoice, Scenario, ScenarioError, TrafficItem};
use crate::crypto::{Crypto, IdentityCrypto, SecureRouting, XorCipher, KEY_LEN};
use crate::kernel::{Millis, NodeId, Radio, Routing};
use crate::routing::{Dsdv, DsdvConfig, Dsr, DsrConfig, Flooding, TreeConfig, TreeRouting};
use crate::simnet::{EventTrace, SimRng, Simulator};
use crate::wire::MessageKind;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Validation(#[from] ScenarioError),
    #[error("runs are not comparable: {0}")]
    NotComparable(String),
    #[error("simulation failed: {0}")]
    Runtime(String),
}

impl HarnessError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) | HarnessError::NotComparable(_) => 1,
            HarnessError::Runtime(_) => 2,
        }
    }
}

pub struct RunOutput {
    pub report: MetricsReport,
    pub trace: EventTrace,
}

/// Per-node routing state, reduced to what the report needs.
type Inspect = Box<dyn Fn(usize) -> (usize, Vec<(u64, u64, u64)>)>;

struct Stack {
    top: Vec<Rc<dyn Radio>>,
    inspect: Inspect,
    round_ms: Option<Millis>,
}

fn runtime(context: &str) -> impl Fn(crate::Error) -> HarnessError + '_ {
    move |e| HarnessError::Runtime(format!("{context}: {e}"))
}

fn secure_all<R: Routing + Clone + 'static, C: Crypto + 'static>(
    routings: &[R],
    make: impl Fn() -> C,
    key: &[u8],
) -> Result<Vec<Rc<dyn Radio>>, HarnessError> {
    let n = routings.len() as u64;
    routings
        .iter()
        .map(|r| {
            let s = SecureRouting::new(r.clone(), make());
            for peer in 0..n {
                s.key_setup(NodeId(peer), key)
                    .map_err(runtime("key setup"))?;
            }
            Ok(Rc::new(s) as Rc<dyn Radio>)
        })
        .collect()
}

fn top_of<R: Routing + Clone + 'static>(
    routings: &[R],
    crypto: CryptoChoice,
    seed: u64,
) -> Result<Vec<Rc<dyn Radio>>, HarnessError> {
    match crypto {
        CryptoChoice::None => Ok(routings
            .iter()
            .map(|r| Rc::new(r.clone()) as Rc<dyn Radio>)
            .collect()),
        CryptoChoice::Identity => secure_all(routings, IdentityCrypto::new, &[]),
        CryptoChoice::Xor => {
            let mut rng = SimRng::new(seed ^ 0x6b65_795f_7365_6564);
            let key: Vec<u8> = (0..KEY_LEN).map(|_| rng.next_u64() as u8).collect();
            secure_all(routings, XorCipher::new, &key)
        }
    }
}

fn build(sim: &Simulator, scenario: &Scenario) -> Result<Stack, HarnessError> {
    let nodes: Vec<NodeId> = scenario.topology.nodes().collect();
    let crypto = scenario.crypto;
    let seed = scenario.seed;
    Ok(match scenario.algorithm {
        Algorithm::Flood => {
            let r: Vec<_> = nodes
                .iter()
                .map(|n| Flooding::new(sim.facets(*n).radio))
                .collect();
            let top = top_of(&r, crypto, seed)?;
            Stack {
                top,
                inspect: Box::new(move |i| (r[i].seen_len(), Vec::new())),
                round_ms: None,
            }
        }
        Algorithm::Tree => {
            let sink = scenario.sink.expect("validated");
            let r: Vec<_> = nodes
                .iter()
                .map(|n| {
                    let f = sim.facets(*n);
                    let config = if *n == sink {
                        TreeConfig::sink()
                    } else {
                        TreeConfig::node()
                    };
                    TreeRouting::new(f.radio, f.timer, config)
                })
                .collect();
            let top = top_of(&r, crypto, seed)?;
            Stack {
                top,
                inspect: Box::new(move |i| {
                    let parent = r[i].parent();
                    let hops = r[i].hops().map_or(u64::MAX, u64::from);
                    let fp = vec![(parent.map_or(u64::MAX, NodeId::get), hops, 0)];
                    (usize::from(parent.is_some()), fp)
                }),
                round_ms: Some(TreeConfig::DEFAULT_BEACON_PERIOD_MS),
            }
        }
        Algorithm::Dsdv => {
            let r: Vec<_> = nodes
                .iter()
                .map(|n| {
                    let f = sim.facets(*n);
                    Dsdv::<_, _, _>::new(f.radio, f.timer, f.clock)
                })
                .collect();
            let top = top_of(&r, crypto, seed)?;
            Stack {
                top,
                inspect: Box::new(move |i| {
                    let table = r[i].table();
                    let fp = table
                        .iter()
                        .map(|e| (e.dest.get(), e.next_hop.get(), u64::from(e.hops)))
                        .collect();
                    (table.len(), fp)
                }),
                round_ms: Some(DsdvConfig::default().update_period_ms),
            }
        }
        Algorithm::Dsr => {
            let config = DsrConfig::for_max_latency(scenario.topology.max_latency());
            let r: Vec<_> = nodes
                .iter()
                .map(|n| {
                    let f = sim.facets(*n);
                    Dsr::with_config(f.radio, f.timer, f.clock, config)
                })
                .collect();
            let top = top_of(&r, crypto, seed)?;
            Stack {
                top,
                inspect: Box::new(move |i| (r[i].cache_len(), Vec::new())),
                round_ms: None,
            }
        }
    })
}

/// Application payload for message `index`: the index, then filler.
pub(crate) fn payload_for(index: usize, len: usize) -> Vec<u8> {
    let mut p = (index as u32).to_be_bytes().to_vec();
    p.extend((4..len).map(|i| (index.wrapping_mul(31) + i) as u8));
    p
}

#[derive(Default)]
struct Observed {
    delivered_at: BTreeMap<usize, Millis>,
    corrupted: usize,
    duplicates: usize,
}

fn observe(
    sim: &Simulator,
    stack: &Stack,
    traffic: &[TrafficItem],
) -> Result<Rc<RefCell<Observed>>, HarnessError> {
    let observed = Rc::new(RefCell::new(Observed::default()));
    let traffic: Rc<[TrafficItem]> = traffic.into();
    for model in &stack.top {
        let node = model.id();
        let observed = observed.clone();
        let traffic = traffic.clone();
        let clock = sim.clone();
        model
            .register_receiver(Rc::new(move |from, payload| {
                let Some(head) = payload.get(..4) else { return };
                let index = u32::from_be_bytes(head.try_into().expect("4 bytes")) as usize;
                let Some(item) = traffic.get(index) else {
                    return;
                };
                if item.dst != node || item.src != from {
                    return;
                }
                let mut o = observed.borrow_mut();
                if payload != payload_for(index, item.payload_len).as_slice() {
                    o.corrupted += 1;
                } else if let std::collections::btree_map::Entry::Vacant(slot) =
                    o.delivered_at.entry(index)
                {
                    slot.insert(clock.now());
                } else {
                    o.duplicates += 1;
                }
            }))
            .map_err(runtime("register receiver"))?;
    }
    Ok(observed)
}

/// Runs `scenario` to completion. The same scenario always produces the
/// same report and trace.
pub fn run_scenario(scenario: &Scenario) -> Result<RunOutput, HarnessError> {
    scenario.validate()?;
    let sim = Simulator::new(scenario.topology.clone(), scenario.seed);
    let stack = build(&sim, scenario)?;
    let limit = stack.top[0].max_payload();
    if let Some((i, t)) = scenario
        .traffic
        .iter()
        .enumerate()
        .find(|(_, t)| t.payload_len > limit)
    {
        return Err(ScenarioError::new(
            "traffic",
            format!(
                "entry {}: payload_len {} exceeds {limit} for this stack",
                i + 1,
                t.payload_len
            ),
        )
        .into());
    }
    let observed = observe(&sim, &stack, &scenario.traffic)?;
    for model in &stack.top {
        model.enable().map_err(runtime("enable"))?;
    }

    let mut order: Vec<usize> = (0..scenario.traffic.len()).collect();
    order.sort_by_key(|i| (scenario.traffic[*i].at_ms, *i));
    let polls: Vec<Millis> = match stack.round_ms {
        Some(r) => (0..=scenario.duration_ms / r).map(|k| k * r).collect(),
        None => Vec::new(),
    };
    let mut checkpoints: Vec<Millis> = polls
        .iter()
        .copied()
        .chain(order.iter().map(|i| scenario.traffic[*i].at_ms))
        .collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let mut rejected: BTreeMap<usize, String> = BTreeMap::new();
    let mut snapshots: Vec<Vec<Vec<(u64, u64, u64)>>> = Vec::new();
    let mut next = 0;
    for t in checkpoints {
        sim.run_until(t);
        if polls.binary_search(&t).is_ok() {
            snapshots.push((0..stack.top.len()).map(|i| (stack.inspect)(i).1).collect());
        }
        while next < order.len() && scenario.traffic[order[next]].at_ms == t {
            let index = order[next];
            let item = scenario.traffic[index];
            let payload = payload_for(index, item.payload_len);
            if let Err(e) = stack.top[item.src.get() as usize].send(item.dst, &payload) {
                rejected.insert(index, format!("{e:?}"));
            }
            next += 1;
        }
    }
    sim.run_until(scenario.duration_ms);

    let observed = observed.borrow();
    let messages: Vec<MessageRecord> = scenario
        .traffic
        .iter()
        .enumerate()
        .map(|(index, item)| {
            let delivered_at_ms = observed.delivered_at.get(&index).copied();
            let status = match (&rejected.get(&index), delivered_at_ms) {
                (Some(e), _) => MessageStatus::Rejected((*e).clone()),
                (None, Some(_)) => MessageStatus::Delivered,
                (None, None) => MessageStatus::Lost,
            };
            MessageRecord {
                index,
                traffic: *item,
                status,
                delivered_at_ms,
                latency_ms: delivered_at_ms.map(|at| at - item.at_ms),
            }
        })
        .collect();
    let latencies: Vec<Millis> = messages.iter().filter_map(|m| m.latency_ms).collect();
    let delivered = latencies.len();
    let sent = scenario.traffic.len();
    let mut send_errors = BTreeMap::new();
    for e in rejected.values() {
        *send_errors.entry(e.clone()).or_insert(0) += 1;
    }
    let stats = sim.stats();
    let radio_sends = stats
        .by_kind
        .iter()
        .map(|(kind, s)| {
            let name = MessageKind::from_byte(*kind)
                .map(|k| k.name().to_string())
                .unwrap_or_else(|_| format!("0x{kind:02x}"));
            let count = KindCount {
                transmissions: s.transmissions,
                bytes: s.bytes,
            };
            (name, count)
        })
        .collect();
    let convergence_round = stack.round_ms.map(|_| {
        snapshots
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] != w[1])
            .map(|(k, _)| k as u64 + 1)
            .max()
            .unwrap_or(0)
    });
    let report = MetricsReport {
        topology: scenario.topology_name.clone(),
        nodes: scenario.topology.node_count(),
        algorithm: scenario.algorithm,
        crypto: scenario.crypto,
        seed: scenario.seed,
        duration_ms: scenario.duration_ms,
        sent,
        delivered,
        delivery_ratio: if sent == 0 {
            0.0
        } else {
            delivered as f64 / sent as f64
        },
        send_errors,
        corrupted: observed.corrupted,
        duplicates: observed.duplicates,
        mean_latency_ms: (!latencies.is_empty())
            .then(|| latencies.iter().sum::<Millis>() as f64 / latencies.len() as f64),
        max_latency_ms: latencies.iter().copied().max(),
        radio_sends,
        table_sizes: (0..stack.top.len()).map(|i| (stack.inspect)(i).0).collect(),
        convergence_round,
        messages,
    };
    Ok(RunOutput {
        report,
        trace: sim.trace(),
    })
}
