#![allow(dead_code)]

use std::sync::Arc;

use resilient_sdn::topology::{generate_random_planar, DeploymentArea, NetworkGraph, NodeId};

pub fn area() -> DeploymentArea {
    DeploymentArea::new(1200.0, 1200.0).unwrap()
}

/// A biconnected random planar graph, trying successive seeds from `seed`.
pub fn biconnected(n: usize, m: usize, seed: u64) -> Arc<NetworkGraph> {
    (seed..seed + 1000)
        .filter_map(|s| generate_random_planar(n, m, area(), s).ok())
        .find(|g| g.is_biconnected())
        .map(Arc::new)
        .expect("a biconnected sample within 1000 seeds")
}

pub fn ids(v: &[u32]) -> Vec<NodeId> {
    v.iter().map(|&x| NodeId(x)).collect()
}

/// Every simple path from `s` to `t` as index sequences.
pub fn simple_paths(g: &NetworkGraph, s: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(g: &NetworkGraph, t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if u == t {
            out.push(path.clone());
            return;
        }
        for &(v, _) in g.neighbors(u) {
            if !path.contains(&v) {
                path.push(v);
                walk(g, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(g, t, &mut vec![s], &mut out);
    out
}
