use std::collections::VecDeque;

use wsn_core::kernel::NodeId;
use wsn_core::simnet::Topology;

/// Hop distances from `src`, `None` for unreachable nodes.
pub fn bfs(topology: &Topology, src: NodeId) -> Vec<Option<usize>> {
    let n = topology.node_count();
    let mut adjacency = vec![Vec::new(); n];
    for (a, b, _) in topology.links() {
        adjacency[a.0 as usize].push(b.0 as usize);
        adjacency[b.0 as usize].push(a.0 as usize);
    }
    let mut dist = vec![None; n];
    let mut queue = VecDeque::new();
    dist[src.0 as usize] = Some(0);
    queue.push_back(src.0 as usize);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &v in &adjacency[u] {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn diameter(topology: &Topology) -> usize {
    topology
        .nodes()
        .flat_map(|s| bfs(topology, s).into_iter().flatten())
        .max()
        .unwrap_or(0)
}

/// True if `path` repeats no node and every consecutive pair is a link.
pub fn is_valid_path(topology: &Topology, path: &[NodeId]) -> bool {
    let mut seen = std::collections::HashSet::new();
    path.iter().all(|n| seen.insert(*n)) && path.windows(2).all(|w| topology.has_link(w[0], w[1]))
}
