//! Abstract per-switch pipeline: routing tables `T_0..T_k`, fast-failover
//! groups, topology tags and escalation to the controller.
//!
//! Table entries are keyed by flow `(source, destination)`, so every flow
//! carries its own primary route and its own geography-aware backup routes.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::controller::SpliceAction;
use crate::error::DataplaneError;
use crate::failure::SurvivingGraph;
use crate::mrc::{select_backup_topology, BackupTopologySet};
use crate::routes::{RoutePlan, RoutePlanTable};
use crate::topology::{NetworkGraph, NodeId};

pub type Flow = (NodeId, NodeId);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Forward(NodeId),
    TagAndForward { tag: usize, next: NodeId },
    Escalate,
}

/// A group bucket, live when its watched neighbour is reachable. `Escalate` watches nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bucket {
    pub watch: Option<NodeId>,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchState {
    node: NodeId,
    /// `tables[i]` is `T_i`; `T_0` holds primary next hops.
    tables: Vec<HashMap<Flow, NodeId>>,
    /// Buckets for clean packets of each flow passing through.
    clean_groups: HashMap<Flow, Vec<Bucket>>,
}

impl SwitchState {
    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn next_hop(&self, table: usize, flow: Flow) -> Option<NodeId> {
        self.tables.get(table)?.get(&flow).copied()
    }

    pub fn table_len(&self, table: usize) -> usize {
        self.tables.get(table).map_or(0, HashMap::len)
    }

    pub fn clean_group(&self, flow: Flow) -> Option<&[Bucket]> {
        self.clean_groups.get(&flow).map(Vec::as_slice)
    }

    /// Buckets for packets tagged with `tag`: forward per `T_tag`, else escalate.
    pub fn dirty_group(&self, flow: Flow, tag: usize) -> Vec<Bucket> {
        let mut buckets = Vec::with_capacity(2);
        if let Some(next) = self.next_hop(tag, flow) {
            buckets.push(Bucket { watch: Some(next), action: Action::Forward(next) });
        }
        buckets.push(Bucket { watch: None, action: Action::Escalate });
        buckets
    }
}

/// All switches of a network, indexed like the base graph's nodes.
#[derive(Debug, Clone)]
pub struct DataPlane {
    base: Arc<NetworkGraph>,
    k: usize,
    switches: Vec<SwitchState>,
}

impl DataPlane {
    pub fn base(&self) -> &Arc<NetworkGraph> {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn switch(&self, id: NodeId) -> Option<&SwitchState> {
        self.base.idx(id).ok().map(|i| &self.switches[i])
    }

    pub fn switches(&self) -> &[SwitchState] {
        &self.switches
    }
}

fn check_hops(g: &NetworkGraph, plan: &RoutePlan, hops: impl Iterator<Item = (NodeId, NodeId)>) -> Result<(), DataplaneError> {
    for (u, v) in hops {
        if g.link_by_ids(u, v).is_none() {
            return Err(DataplaneError::InconsistentPlan(plan.source, plan.dest, u, v));
        }
    }
    Ok(())
}

/// Compiles route plans into per-switch tables and groups.
pub fn install_routes(plans: &RoutePlanTable, bts: &BackupTopologySet) -> Result<DataPlane, DataplaneError> {
    let g = bts.base().clone();
    let k = bts.k();
    let mut switches: Vec<SwitchState> = g
        .node_ids()
        .iter()
        .map(|&node| SwitchState {
            node,
            tables: vec![HashMap::new(); k + 1],
            clean_groups: HashMap::new(),
        })
        .collect();
    let slot = |id: NodeId| g.idx(id).expect("hops checked against the graph");
    for plan in plans.iter() {
        let flow = (plan.source, plan.dest);
        check_hops(&g, plan, plan.primary.windows(2).map(|w| (w[0], w[1])))?;
        for d in plan.detours.iter().take(k) {
            check_hops(&g, plan, d.iter().map(|(&u, &v)| (u, v)))?;
        }
        for b in plan.backups.iter().take(k).flatten() {
            check_hops(&g, plan, b.windows(2).map(|w| (w[0], w[1])))?;
        }
        for w in plan.primary.windows(2) {
            switches[slot(w[0])].tables[0].insert(flow, w[1]);
        }
        for (i, d) in plan.detours.iter().take(k).enumerate() {
            for (&u, &v) in d {
                switches[slot(u)].tables[i + 1].insert(flow, v);
            }
        }
        for (i, b) in plan.backups.iter().take(k).enumerate() {
            for w in b.iter().flat_map(|p| p.windows(2)) {
                switches[slot(w[0])].tables[i + 1].insert(flow, w[1]);
            }
        }
        for w in plan.primary.windows(2) {
            let (u, next) = (w[0], w[1]);
            let mut buckets = vec![Bucket { watch: Some(next), action: Action::Forward(next) }];
            if let Some(tag) = select_backup_topology(bts, u, next, plan.dest) {
                if let Some(alt) = switches[slot(u)].next_hop(tag, flow) {
                    buckets.push(Bucket { watch: Some(alt), action: Action::TagAndForward { tag, next: alt } });
                }
            }
            switches[slot(u)].clean_groups.insert(flow, buckets);
        }
    }
    Ok(DataPlane { base: g, k, switches })
}

/// Controller-installed diversions: at a node, retag a flow onto a topology.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpliceOverlay {
    rules: HashMap<Flow, HashMap<NodeId, usize>>,
}

impl SpliceOverlay {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn install(&mut self, actions: &[SpliceAction]) {
        for a in actions {
            self.rules.entry(a.flow).or_default().insert(a.at, a.topology);
        }
    }

    pub fn rule(&self, flow: Flow, at: NodeId) -> Option<usize> {
        self.rules.get(&flow)?.get(&at).copied()
    }

    pub fn has_flow(&self, flow: Flow) -> bool {
        self.rules.contains_key(&flow)
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    DeliveredPrimary,
    DeliveredLocal(usize),
    /// Delivered along controller-installed splice rules.
    DeliveredSpliced,
    Escalated { at: NodeId, tag: Option<usize> },
    NonRecoverable,
}

impl Classification {
    pub fn is_delivered(&self) -> bool {
        matches!(self, Self::DeliveredPrimary | Self::DeliveredLocal(_) | Self::DeliveredSpliced)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DeliveredPrimary => write!(f, "primary"),
            Self::DeliveredLocal(i) => write!(f, "local:{i}"),
            Self::DeliveredSpliced => write!(f, "spliced"),
            Self::Escalated { at, tag: Some(i) } => write!(f, "escalated:{at}:{i}"),
            Self::Escalated { at, tag: None } => write!(f, "escalated:{at}:-"),
            Self::NonRecoverable => write!(f, "nonrecoverable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowOutcome {
    pub source: NodeId,
    pub dest: NodeId,
    pub classification: Classification,
    /// Nodes visited, ending at the destination or the escalating node.
    pub path: Vec<NodeId>,
}

impl FlowOutcome {
    /// `flow <s> <t> <outcome> <path...>`
    pub fn log_line(&self) -> String {
        let mut line = format!("flow {} {} {}", self.source, self.dest, self.classification);
        for n in &self.path {
            let _ = write!(line, " {n}");
        }
        line
    }
}

/// Walks one packet of flow `(s, t)` through the surviving network.
pub fn simulate_flow(dp: &DataPlane, sg: &SurvivingGraph, s: NodeId, t: NodeId) -> FlowOutcome {
    simulate_flow_with(dp, sg, None, s, t)
}

/// As [`simulate_flow`], honouring splice rules where installed.
pub fn simulate_flow_with(
    dp: &DataPlane,
    sg: &SurvivingGraph,
    overlay: Option<&SpliceOverlay>,
    s: NodeId,
    t: NodeId,
) -> FlowOutcome {
    let g = &dp.base;
    let flow = (s, t);
    let outcome = |classification, path| FlowOutcome { source: s, dest: t, classification, path };
    let (Ok(si), Ok(ti)) = (g.idx(s), g.idx(t)) else {
        return outcome(Classification::NonRecoverable, Vec::new());
    };
    if !sg.connected(si, ti) {
        return outcome(Classification::NonRecoverable, Vec::new());
    }
    let overlay = overlay.filter(|o| o.has_flow(flow));
    let limit = 2 * g.node_count();
    let mut path = vec![s];
    let mut tag: Option<usize> = None;
    let mut spliced = false;
    let mut cur = si;
    while cur != ti {
        let here = g.id(cur);
        if path.len() > limit {
            return outcome(Classification::Escalated { at: here, tag }, path);
        }
        if let Some(label) = overlay.and_then(|o| o.rule(flow, here)) {
            tag = Some(label);
            spliced = true;
        }
        let sw = &dp.switches[cur];
        let live = |b: &Bucket| b.watch.is_none_or(|w| sg.hop_alive(cur, g.idx(w).expect("installed hop")));
        let action = match tag {
            None => match sw.clean_group(flow).and_then(|bs| bs.iter().find(|b| live(b))) {
                Some(b) => b.action,
                None => {
                    // every bucket dead: the packet is dirty under its would-be tag
                    let would = sw.clean_group(flow).and_then(|bs| {
                        bs.iter().find_map(|b| match b.action {
                            Action::TagAndForward { tag, .. } => Some(tag),
                            _ => None,
                        })
                    });
                    return outcome(Classification::Escalated { at: here, tag: would }, path);
                }
            },
            Some(i) => sw
                .dirty_group(flow, i)
                .into_iter()
                .find(|b| live(b))
                .expect("escalate bucket is always live")
                .action,
        };
        let next = match action {
            Action::Forward(n) => n,
            Action::TagAndForward { tag: i, next } => {
                tag = Some(i);
                next
            }
            Action::Escalate => return outcome(Classification::Escalated { at: here, tag }, path),
        };
        path.push(next);
        cur = g.idx(next).expect("installed hop");
    }
    let class = match (spliced, tag) {
        (true, _) => Classification::DeliveredSpliced,
        (false, None) => Classification::DeliveredPrimary,
        (false, Some(i)) => Classification::DeliveredLocal(i),
    };
    outcome(class, path)
}
