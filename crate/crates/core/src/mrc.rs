//! Multiple routing configurations: backup topologies in which nodes and
//! links are isolated so that any single failure can be routed around locally.
//!
//! In backup topology `G_i` a link is
//! * `Normal`: routed at its base weight,
//! * `Restricted`: connects an isolated node to the backbone and is only used
//!   as a first or last hop,
//! * `Isolated`: removed from routing.
//!
//! The generator also keeps the backbone (non-isolated nodes over normal links)
//! connected, which is what stops restricted links from carrying transit traffic.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::error::MrcError;
use crate::topology::{LinkId, NetworkGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkState {
    Normal,
    Restricted,
    Isolated,
}

/// Weight tiers shared by the backup topologies and backup route generation.
///
/// A penalized link costs its base weight plus `penalty`, which exceeds any
/// simple path of unpenalized links. A restricted link costs its base weight
/// plus `restricted`, which exceeds any simple path of normal and penalized
/// links. Composition takes the larger surcharge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightTiers {
    pub penalty: f64,
    pub restricted: f64,
}

impl WeightTiers {
    pub fn new(g: &NetworkGraph, k: usize) -> Self {
        let links = g.link_count() as f64;
        let max_w = g.max_weight();
        let penalty = links * max_w * k.max(1) as f64 + 1.0;
        let restricted = links * (penalty + max_w) + 1.0;
        Self { penalty, restricted }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackupTopology {
    index: usize,
    link_state: Vec<LinkState>,
    isolated: Vec<bool>,
}

impl BackupTopology {
    fn empty(index: usize, g: &NetworkGraph) -> Self {
        Self {
            index,
            link_state: vec![LinkState::Normal; g.link_count()],
            isolated: vec![false; g.node_count()],
        }
    }

    /// 1-based topology number.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn link_state(&self, link: LinkId) -> LinkState {
        self.link_state[link.0]
    }

    pub fn is_isolated(&self, node_idx: usize) -> bool {
        self.isolated[node_idx]
    }

    pub fn isolated_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.isolated.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    /// Routing weight of a link in this topology, `None` when isolated.
    pub fn weight(&self, g: &NetworkGraph, tiers: &WeightTiers, link: LinkId) -> Option<f64> {
        let base = g.link(link).weight;
        match self.link_state[link.0] {
            LinkState::Normal => Some(base),
            LinkState::Restricted => Some(base + tiers.restricted),
            LinkState::Isolated => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BackupTopologySet {
    base: Arc<NetworkGraph>,
    topologies: Vec<BackupTopology>,
}

impl BackupTopologySet {
    pub fn base(&self) -> &Arc<NetworkGraph> {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.topologies.len()
    }

    /// Topology by 1-based index.
    pub fn topology(&self, index: usize) -> &BackupTopology {
        &self.topologies[index - 1]
    }

    pub fn topologies(&self) -> &[BackupTopology] {
        &self.topologies
    }

    pub fn tiers(&self) -> WeightTiers {
        WeightTiers::new(&self.base, self.k())
    }

    /// Topology in which `node_idx` is isolated, if any.
    pub fn isolating_topology(&self, node_idx: usize) -> Option<usize> {
        self.topologies.iter().find(|t| t.isolated[node_idx]).map(|t| t.index)
    }
}

impl PartialEq for BackupTopologySet {
    fn eq(&self, other: &Self) -> bool {
        self.topologies == other.topologies && *self.base == *other.base
    }
}

/// Numbered constraint a backup topology set can violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    /// Every node and every link is isolated in at least one topology.
    IsolatedSomewhere = 1,
    /// Every link is isolated together with an adjacent isolated node.
    IsolatedWithNode = 2,
    /// All node pairs are mutually reachable in every topology.
    Reachable = 3,
    /// A node is marked isolated iff all of its links are restricted or isolated.
    Consistency = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Node(NodeId),
    Link(NodeId, NodeId),
    Topology,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Violation {
    pub constraint: Constraint,
    pub element: Element,
    pub topology: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "constraint {:?} violated by {:?}", self.constraint, self.element)?;
        if let Some(t) = self.topology {
            write!(f, " in topology {t}")?;
        }
        Ok(())
    }
}

fn usable_connected(g: &NetworkGraph, t: &BackupTopology) -> bool {
    let n = g.node_count();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        for &(v, l) in g.neighbors(u) {
            if !seen[v] && t.link_state[l.0] != LinkState::Isolated {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Lists every violated constraint; an empty report means the set is valid.
pub fn verify_mrc_constraints(bts: &BackupTopologySet) -> Vec<Violation> {
    let g = &*bts.base;
    let mut report = Vec::new();
    for u in 0..g.node_count() {
        if !bts.topologies.iter().any(|t| t.isolated[u]) {
            report.push(Violation {
                constraint: Constraint::IsolatedSomewhere,
                element: Element::Node(g.id(u)),
                topology: None,
            });
        }
    }
    for (i, l) in g.links().iter().enumerate() {
        let (a, b) = g.link_ids(LinkId(i));
        let element = Element::Link(a, b);
        let isolated_in: Vec<&BackupTopology> = bts
            .topologies
            .iter()
            .filter(|t| t.link_state[i] == LinkState::Isolated)
            .collect();
        if isolated_in.is_empty() {
            report.push(Violation { constraint: Constraint::IsolatedSomewhere, element, topology: None });
        }
        if !isolated_in.iter().any(|t| t.isolated[l.u] || t.isolated[l.v]) {
            report.push(Violation { constraint: Constraint::IsolatedWithNode, element, topology: None });
        }
    }
    for t in &bts.topologies {
        if !usable_connected(g, t) {
            report.push(Violation {
                constraint: Constraint::Reachable,
                element: Element::Topology,
                topology: Some(t.index),
            });
        }
        for u in 0..g.node_count() {
            let all_blocked = g
                .neighbors(u)
                .iter()
                .all(|&(_, l)| t.link_state[l.0] != LinkState::Normal);
            if all_blocked != t.isolated[u] {
                report.push(Violation {
                    constraint: Constraint::Consistency,
                    element: Element::Node(g.id(u)),
                    topology: Some(t.index),
                });
            }
        }
    }
    report
}

/// Greedy construction state for one topology during node isolation.
struct Builder<'g> {
    g: &'g NetworkGraph,
    topo: BackupTopology,
}

impl Builder<'_> {
    fn backbone_connected_without(&self, extra: usize) -> bool {
        let g = self.g;
        let in_backbone = |x: usize| x != extra && !self.topo.isolated[x];
        let Some(start) = (0..g.node_count()).find(|&x| in_backbone(x)) else {
            return false;
        };
        let mut seen = vec![false; g.node_count()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in g.neighbors(u) {
                if in_backbone(v) && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        let backbone = (0..g.node_count()).filter(|&x| in_backbone(x)).count();
        count == backbone && backbone >= 2
    }

    fn can_isolate(&self, u: usize) -> bool {
        let g = self.g;
        if self.topo.isolated[u] || !self.backbone_connected_without(u) {
            return false;
        }
        let attached = |x: usize| {
            g.neighbors(x)
                .iter()
                .any(|&(w, _)| w != u && !self.topo.isolated[w])
        };
        attached(u)
            && g.neighbors(u)
                .iter()
                .filter(|&&(w, _)| self.topo.isolated[w])
                .all(|&(w, _)| attached(w))
    }

    fn isolate(&mut self, u: usize) {
        self.topo.isolated[u] = true;
        for &(w, l) in self.g.neighbors(u) {
            self.topo.link_state[l.0] = if self.topo.isolated[w] {
                LinkState::Isolated
            } else {
                LinkState::Restricted
            };
        }
    }
}

fn restricted_count(g: &NetworkGraph, t: &BackupTopology, u: usize) -> usize {
    g.neighbors(u)
        .iter()
        .filter(|&&(_, l)| t.link_state[l.0] == LinkState::Restricted)
        .count()
}

/// Node placements tried before giving up on a `k`.
const SEARCH_BUDGET: usize = 200_000;

struct Search<'g> {
    base: &'g Arc<NetworkGraph>,
    g: &'g NetworkGraph,
    k: usize,
    builders: Vec<Builder<'g>>,
    home: Vec<usize>,
    budget: usize,
}

impl Search<'_> {
    /// Places node `u` and all later nodes, preferring topology `next` and
    /// then the ones after it.
    fn place(&mut self, u: usize, next: usize) -> Option<Vec<BackupTopology>> {
        if u == self.g.node_count() {
            let topologies: Vec<BackupTopology> = self.builders.iter().map(|b| b.topo.clone()).collect();
            let topologies = isolate_crossing_links(self.g, &self.home, topologies)?;
            let set = BackupTopologySet { base: self.base.clone(), topologies };
            return verify_mrc_constraints(&set).is_empty().then_some(set.topologies);
        }
        for off in 0..self.k {
            let slot = (next + off) % self.k;
            if self.budget == 0 {
                return None;
            }
            if !self.builders[slot].can_isolate(u) {
                continue;
            }
            self.budget -= 1;
            let saved = self.builders[slot].topo.clone();
            self.builders[slot].isolate(u);
            self.home[u] = slot;
            if let Some(done) = self.place(u + 1, (slot + 1) % self.k) {
                return Some(done);
            }
            self.builders[slot].topo = saved;
        }
        None
    }
}

/// Isolates each link joining nodes isolated in different topologies in one
/// endpoint's topology, most constrained link first.
fn isolate_crossing_links(
    g: &NetworkGraph,
    home: &[usize],
    mut topologies: Vec<BackupTopology>,
) -> Option<Vec<BackupTopology>> {
    let mut pending: Vec<usize> = (0..g.link_count())
        .filter(|&i| {
            let l = g.link(LinkId(i));
            home[l.u] != home[l.v]
        })
        .collect();
    while !pending.is_empty() {
        // (position in pending, topology slot, options, inverted slack)
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for (pos, &i) in pending.iter().enumerate() {
            let l = g.link(LinkId(i));
            let options: Vec<(usize, usize)> = [l.u, l.v]
                .into_iter()
                .map(|end| (home[end], restricted_count(g, &topologies[home[end]], end)))
                .filter(|&(_, restricted)| restricted >= 2)
                .collect();
            let &(slot, slack) = options
                .iter()
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))?;
            let key = (options.len(), usize::MAX - slack);
            if best.is_none_or(|(_, _, n, s)| key < (n, s)) {
                best = Some((pos, slot, key.0, key.1));
            }
        }
        let (pos, slot, _, _) = best.expect("pending is non-empty");
        let i = pending.remove(pos);
        topologies[slot].link_state[i] = LinkState::Isolated;
    }
    Some(topologies)
}

/// Builds `k` backup topologies satisfying the isolation and reachability constraints.
///
/// Nodes are isolated in increasing id order, round-robin over topologies,
/// moving on to the next topology whenever isolation would cut the backbone
/// and backtracking when a later node fits nowhere. Links not already isolated between two co-isolated nodes are then isolated
/// next to one of their isolated endpoints, most constrained link first.
pub fn generate_backup_topologies(g: Arc<NetworkGraph>, k: usize) -> Result<BackupTopologySet, MrcError> {
    if k == 0 {
        return Err(MrcError::ZeroK);
    }
    if let Some(cut) = g.cut_node() {
        return Err(MrcError::NotBiconnected(cut));
    }
    let mut search = Search {
        base: &g,
        g: &g,
        k,
        builders: (1..=k).map(|i| Builder { g: &g, topo: BackupTopology::empty(i, &g) }).collect(),
        home: vec![0; g.node_count()],
        budget: SEARCH_BUDGET,
    };
    let topologies = search.place(0, 0).ok_or(MrcError::InfeasibleK(k))?;
    Ok(BackupTopologySet { base: g, topologies })
}

/// Picks the topology a detecting node tags packets with after its next hop
/// `failed_next_hop` becomes unreachable.
///
/// Prefers the smallest-index topology isolating the far node, which routes
/// around both a failed link and a failed neighbour. When the far node is the
/// destination itself, the smallest-index topology isolating the link is used.
pub fn select_backup_topology(
    bts: &BackupTopologySet,
    detecting_node: NodeId,
    failed_next_hop: NodeId,
    destination: NodeId,
) -> Option<usize> {
    let g = &*bts.base;
    let (u, v) = (g.idx(detecting_node).ok()?, g.idx(failed_next_hop).ok()?);
    let link = g.link_between(u, v)?;
    if failed_next_hop != destination {
        if let Some(i) = bts.isolating_topology(v) {
            return Some(i);
        }
    }
    bts.topologies
        .iter()
        .find(|t| t.link_state[link.0] == LinkState::Isolated)
        .map(|t| t.index)
}

/// Serializes the set as `topology`, `isolated-node`, `restricted` and `isolated` lines.
pub fn emit_backup_topologies(bts: &BackupTopologySet) -> String {
    let g = &*bts.base;
    let mut out = String::new();
    for t in &bts.topologies {
        let _ = writeln!(out, "topology {}", t.index);
        for u in t.isolated_nodes() {
            let _ = writeln!(out, "isolated-node {}", g.id(u));
        }
        for state in [LinkState::Restricted, LinkState::Isolated] {
            let word = if state == LinkState::Restricted { "restricted" } else { "isolated" };
            for (i, s) in t.link_state.iter().enumerate() {
                if *s == state {
                    let (a, b) = g.link_ids(LinkId(i));
                    let _ = writeln!(out, "{word} {a} {b}");
                }
            }
        }
    }
    out
}

/// Parses the backup topology format against its base graph. Unlisted links are normal.
/// The result is not verified; run [`verify_mrc_constraints`] on it.
pub fn parse_backup_topologies(g: Arc<NetworkGraph>, text: &str) -> Result<BackupTopologySet, MrcError> {
    let mut topologies: Vec<BackupTopology> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let err = |message: String| MrcError::Parse { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let node = |tok: &str| -> Result<usize, MrcError> {
            let id: u32 = tok.parse().map_err(|_| err(format!("invalid node `{tok}`")))?;
            g.idx(NodeId(id)).map_err(|e| err(e.to_string()))
        };
        match toks.as_slice() {
            ["topology", i] => {
                let i: usize = i.parse().map_err(|_| err(format!("invalid index `{i}`")))?;
                if i != topologies.len() + 1 {
                    return Err(err(format!("expected topology {}, found {i}", topologies.len() + 1)));
                }
                topologies.push(BackupTopology::empty(i, &g));
            }
            [kind, rest @ ..] => {
                let t = topologies.last_mut().ok_or_else(|| err("entry before any topology line".into()))?;
                match (*kind, rest) {
                    ("isolated-node", [u]) => t.isolated[node(u)?] = true,
                    ("restricted" | "isolated", [a, b]) => {
                        let l = g
                            .link_between(node(a)?, node(b)?)
                            .ok_or_else(|| err(format!("no link {a}-{b}")))?;
                        t.link_state[l.0] = if *kind == "restricted" {
                            LinkState::Restricted
                        } else {
                            LinkState::Isolated
                        };
                    }
                    _ => return Err(err(format!("malformed line `{content}`"))),
                }
            }
            [] => unreachable!(),
        }
    }
    Ok(BackupTopologySet { base: g, topologies })
}

/// Isolated nodes and explicit link states of one hand-built topology.
pub type TopologyParts = (Vec<NodeId>, Vec<((NodeId, NodeId), LinkState)>);

/// Assembles a set from explicit per-topology states, for hand-built scenarios.
pub fn backup_set_from_parts(
    g: Arc<NetworkGraph>,
    parts: Vec<TopologyParts>,
) -> Result<BackupTopologySet, MrcError> {
    let mut text = String::new();
    for (i, (nodes, links)) in parts.iter().enumerate() {
        let _ = writeln!(text, "topology {}", i + 1);
        for n in nodes {
            let _ = writeln!(text, "isolated-node {n}");
        }
        for ((a, b), s) in links {
            match s {
                LinkState::Restricted => {
                    let _ = writeln!(text, "restricted {a} {b}");
                }
                LinkState::Isolated => {
                    let _ = writeln!(text, "isolated {a} {b}");
                }
                LinkState::Normal => {}
            }
        }
    }
    parse_backup_topologies(g, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::topology::parse_topology;

    fn cycle(n: u32) -> Arc<NetworkGraph> {
        let mut text = String::from("area 100 100\n");
        for i in 0..n {
            let a = i as f64 * std::f64::consts::TAU / n as f64;
            text += &format!("node {i} {} {}\n", 50.0 + 40.0 * a.cos(), 50.0 + 40.0 * a.sin());
        }
        for i in 0..n {
            text += &format!("link {i} {}\n", (i + 1) % n);
        }
        Arc::new(parse_topology(&text).unwrap())
    }

    #[test]
    fn eight_node_generation_isolates_each_node_once() {
        let g = Arc::new(fixtures::eight_node());
        let bts = generate_backup_topologies(g.clone(), 3).unwrap();
        assert!(verify_mrc_constraints(&bts).is_empty());
        for u in 0..g.node_count() {
            let count = bts.topologies().iter().filter(|t| t.is_isolated(u)).count();
            assert_eq!(count, 1, "node {}", g.id(u));
        }
    }

    #[test]
    fn two_nodes_are_not_biconnected() {
        let g = Arc::new(parse_topology("area 10 10\nnode 0 1 1\nnode 1 2 2\nlink 0 1\n").unwrap());
        assert!(matches!(generate_backup_topologies(g, 2), Err(MrcError::NotBiconnected(_))));
    }

    #[test]
    fn six_cycle() {
        // A cycle can drop only one link per topology, so six links need six topologies.
        assert!(matches!(generate_backup_topologies(cycle(6), 3), Err(MrcError::InfeasibleK(3))));
        let bts = generate_backup_topologies(cycle(6), 6).unwrap();
        assert!(verify_mrc_constraints(&bts).is_empty());
        let g = bts.base();
        for (i, _) in g.links().iter().enumerate() {
            assert!(bts.topologies().iter().any(|t| t.link_state(LinkId(i)) == LinkState::Isolated));
        }
    }

    #[test]
    fn zero_k_rejected() {
        assert!(matches!(generate_backup_topologies(cycle(4), 0), Err(MrcError::ZeroK)));
    }

    #[test]
    fn report_lists_node_isolated_nowhere() {
        let g = Arc::new(fixtures::eight_node());
        let mut bts = fixtures::eight_node_backups(g.clone());
        assert!(verify_mrc_constraints(&bts).is_empty());
        // un-isolate node 2 in topology 1 and make its links normal again
        let u = g.idx(NodeId(2)).unwrap();
        bts.topologies[0].isolated[u] = false;
        for &(_, l) in g.neighbors(u) {
            bts.topologies[0].link_state[l.0] = LinkState::Normal;
        }
        let report = verify_mrc_constraints(&bts);
        assert!(report.contains(&Violation {
            constraint: Constraint::IsolatedSomewhere,
            element: Element::Node(NodeId(2)),
            topology: None,
        }));
    }

    #[test]
    fn report_lists_disconnected_topology() {
        let g = Arc::new(fixtures::eight_node());
        let mut bts = fixtures::eight_node_backups(g.clone());
        // isolate every restricted link of node 8 in topology 3
        let l = g.link_by_ids(NodeId(7), NodeId(8)).unwrap();
        bts.topologies[2].link_state[l.0] = LinkState::Isolated;
        let report = verify_mrc_constraints(&bts);
        assert!(report.contains(&Violation {
            constraint: Constraint::Reachable,
            element: Element::Topology,
            topology: Some(3),
        }));
    }

    #[test]
    fn selection_on_eight_node() {
        let g = Arc::new(fixtures::eight_node());
        let bts = fixtures::eight_node_backups(g);
        assert_eq!(select_backup_topology(&bts, NodeId(1), NodeId(2), NodeId(3)), Some(1));
        // destination is the far node: use the topology isolating link 1-2
        assert_eq!(select_backup_topology(&bts, NodeId(1), NodeId(2), NodeId(2)), Some(2));
        assert_eq!(select_backup_topology(&bts, NodeId(1), NodeId(3), NodeId(3)), None);
    }

    #[test]
    fn single_topology_candidate() {
        // triangle with k = 3: each node isolated alone, the far node decides
        let g = Arc::new(
            parse_topology("area 10 10\nnode 0 0 0\nnode 1 4 0\nnode 2 2 3\nlink 0 1\nlink 1 2\nlink 0 2\n").unwrap(),
        );
        let bts = generate_backup_topologies(g.clone(), 3).unwrap();
        assert!(verify_mrc_constraints(&bts).is_empty());
        let home = bts.isolating_topology(2).unwrap();
        assert_eq!(select_backup_topology(&bts, NodeId(0), NodeId(2), NodeId(1)), Some(home));
    }

    #[test]
    fn text_format_round_trip() {
        let g = Arc::new(fixtures::eight_node());
        let bts = generate_backup_topologies(g.clone(), 4).unwrap();
        let again = parse_backup_topologies(g, &emit_backup_topologies(&bts)).unwrap();
        assert_eq!(bts, again);
    }
}
