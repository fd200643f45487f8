use wsn_core::crypto::{Crypto, IdentityCrypto, SecureRouting, VirtualRadio, XorCipher};
use wsn_core::kernel::{NodeId, Routing};
use wsn_core::routing::{Dsdv, Dsr, DsrConfig, Flooding, TreeConfig, TreeRouting};
use wsn_core::simnet::{SimClock, SimRadio, SimTimer, Simulator};

pub type SimFlood = Flooding<SimRadio>;
pub type SimTree = TreeRouting<SimRadio, SimTimer>;
pub type SimDsdv = Dsdv<SimRadio, SimTimer, SimClock>;
pub type SimDsr = Dsr<SimRadio, SimTimer, SimClock>;

fn nodes(sim: &Simulator) -> impl Iterator<Item = NodeId> {
    (0..sim.node_count() as u64).map(NodeId)
}

pub fn flood(sim: &Simulator) -> Vec<SimFlood> {
    nodes(sim)
        .map(|n| Flooding::new(sim.facets(n).radio))
        .collect()
}

pub fn flood_ttl(sim: &Simulator, ttl: u8) -> Vec<SimFlood> {
    nodes(sim)
        .map(|n| Flooding::with_ttl(sim.facets(n).radio, ttl))
        .collect()
}

pub fn tree(sim: &Simulator, sink: NodeId) -> Vec<SimTree> {
    nodes(sim)
        .map(|n| {
            let f = sim.facets(n);
            let config = if n == sink {
                TreeConfig::sink()
            } else {
                TreeConfig::node()
            };
            TreeRouting::new(f.radio, f.timer, config)
        })
        .collect()
}

pub fn dsdv(sim: &Simulator) -> Vec<SimDsdv> {
    nodes(sim)
        .map(|n| {
            let f = sim.facets(n);
            Dsdv::new(f.radio, f.timer, f.clock)
        })
        .collect()
}

pub fn dsr(sim: &Simulator) -> Vec<SimDsr> {
    let config = DsrConfig::for_max_latency(sim.topology().max_latency());
    nodes(sim)
        .map(|n| {
            let f = sim.facets(n);
            Dsr::with_config(f.radio, f.timer, f.clock, config)
        })
        .collect()
}

/// Wraps each routing model with a cipher sharing one network-wide key.
pub fn secure<R: Routing + 'static, C: Crypto + Clone + 'static>(
    routings: Vec<R>,
    make: impl Fn() -> C,
    key: &[u8],
    node_count: usize,
) -> Vec<SecureRouting<R, C>> {
    routings
        .into_iter()
        .map(|r| {
            let s = SecureRouting::new(r, make());
            for peer in 0..node_count as u64 {
                s.key_setup(NodeId(peer), key).expect("key");
            }
            s
        })
        .collect()
}

pub fn secure_identity<R: Routing + 'static>(
    routings: Vec<R>,
    node_count: usize,
) -> Vec<SecureRouting<R, IdentityCrypto>> {
    secure(routings, IdentityCrypto::new, &[], node_count)
}

pub fn secure_xor<R: Routing + 'static>(
    routings: Vec<R>,
    key: &[u8; 16],
    node_count: usize,
) -> Vec<SecureRouting<R, XorCipher>> {
    secure(routings, XorCipher::new, key, node_count)
}

pub fn virtual_radios<R: Routing + 'static>(routings: Vec<R>) -> Vec<VirtualRadio<R>> {
    routings.into_iter().map(VirtualRadio::new).collect()
}
