//! Path Splicing baseline: several routing slices over randomly perturbed
//! link weights, with random slice switching when a next hop is dead.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataplane::{Classification, FlowOutcome};
use crate::failure::SurvivingGraph;
use crate::topology::{LinkId, NetworkGraph, NodeId, PathTree};

/// Upper bound of the relative perturbation of a link: `(d_i + d_j) / d_max`, in `[0, 2]`.
pub fn perturbation_bound(d_i: usize, d_j: usize, d_max: usize) -> f64 {
    (d_i + d_j) as f64 / d_max as f64
}

/// Per-slice shortest-path trees toward every destination.
#[derive(Debug, Clone)]
pub struct PathSlices {
    base: Arc<NetworkGraph>,
    weights: Vec<Vec<f64>>,
    trees: Vec<Vec<PathTree>>,
}

impl PathSlices {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// Link weights of slice `i` (0-based; slice 0 is unperturbed).
    pub fn weights(&self, i: usize) -> &[f64] {
        &self.weights[i]
    }

    pub fn next_hop(&self, slice: usize, from: usize, to: usize) -> Option<usize> {
        self.trees[slice][to].next_hop(from)
    }

    pub fn route(&self, slice: usize, s: NodeId, t: NodeId) -> Option<Vec<NodeId>> {
        let (a, b) = (self.base.idx(s).ok()?, self.base.idx(t).ok()?);
        let p = self.trees[slice][b].path_from(a)?;
        Some(p.into_iter().map(|u| self.base.id(u)).collect())
    }
}

/// Builds `k` slices; slice `i > 0` scales each link weight by `1 + U[0, bound]`.
pub fn path_splicing_baseline_routes(g: &Arc<NetworkGraph>, k: usize, seed: u64) -> PathSlices {
    let k = k.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_max = (0..g.node_count()).map(|u| g.degree(u)).max().unwrap_or(1).max(1);
    let mut weights = vec![g.weights()];
    for _ in 1..k {
        weights.push(
            g.links()
                .iter()
                .map(|l| {
                    let bound = perturbation_bound(g.degree(l.u), g.degree(l.v), d_max);
                    l.weight * (1.0 + rng.gen_range(0.0..=bound))
                })
                .collect(),
        );
    }
    let trees = weights
        .iter()
        .map(|w| {
            (0..g.node_count())
                .map(|t| PathTree::toward(g, t, |l: LinkId| Some(w[l.0]), |_| true))
                .collect()
        })
        .collect();
    PathSlices { base: g.clone(), weights, trees }
}

/// Forwards along slice 0, switching to a random other slice whenever the
/// next hop is dead; gives up after `k` switches or `2|V|` hops.
pub fn simulate_path_splicing(slices: &PathSlices, sg: &SurvivingGraph, s: NodeId, t: NodeId, rng: &mut impl Rng) -> FlowOutcome {
    let g = &slices.base;
    let outcome = |classification, path| FlowOutcome { source: s, dest: t, classification, path };
    let (Ok(si), Ok(ti)) = (g.idx(s), g.idx(t)) else {
        return outcome(Classification::NonRecoverable, Vec::new());
    };
    if !sg.connected(si, ti) {
        return outcome(Classification::NonRecoverable, Vec::new());
    }
    let k = slices.k();
    let limit = 2 * g.node_count();
    let mut slice = 0;
    let mut switches = 0;
    let mut path = vec![s];
    let mut cur = si;
    while cur != ti {
        let here = g.id(cur);
        if path.len() > limit {
            return outcome(Classification::Escalated { at: here, tag: Some(slice) }, path);
        }
        let next = loop {
            match slices.next_hop(slice, cur, ti) {
                Some(n) if sg.hop_alive(cur, n) => break n,
                _ if switches < k && k > 1 => {
                    switches += 1;
                    slice = (slice + rng.gen_range(1..k)) % k;
                }
                _ => return outcome(Classification::Escalated { at: here, tag: Some(slice) }, path),
            }
        };
        path.push(g.id(next));
        cur = next;
    }
    let class = if switches == 0 { Classification::DeliveredPrimary } else { Classification::DeliveredLocal(slice) };
    outcome(class, path)
}
