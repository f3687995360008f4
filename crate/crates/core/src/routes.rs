//! Geography-aware backup route generation.
//!
//! For each demand `(s, t)` the primary route is the shortest path in the base
//! graph. In backup topology `G_i` every link whose vulnerable zone at radius
//! `r_i` meets the primary route's zone at `r_i` is penalized, and the backup
//! route is the shortest path under the penalized weights. Backup topologies
//! with larger `i` hedge against larger failures.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::RouteError;
use crate::geometry::{segment_segment_distance, TOLERANCE};
use crate::mrc::{BackupTopologySet, LinkState, WeightTiers};
use crate::topology::{LinkId, NetworkGraph, NodeId, PathTree};

/// Per-topology hedging radii `r_i = r_a + (i-1)(r_b-r_a)/(k-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSchedule {
    r_a: f64,
    r_b: f64,
    values: Vec<f64>,
}

impl RadiusSchedule {
    pub fn r_a(&self) -> f64 {
        self.r_a
    }

    pub fn r_b(&self) -> f64 {
        self.r_b
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Radius for 1-based topology `i`.
    pub fn radius(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }
}

pub fn radius_schedule(r_a: f64, r_b: f64, k: usize) -> Result<RadiusSchedule, RouteError> {
    if !(r_a > 0.0 && r_a <= r_b && r_b.is_finite()) || k == 0 {
        return Err(RouteError::InvalidRange(r_a, r_b));
    }
    let values = if k == 1 {
        vec![r_a]
    } else {
        let step = (r_b - r_a) / (k - 1) as f64;
        (0..k).map(|i| if i + 1 == k { r_b } else { r_a + i as f64 * step }).collect()
    };
    Ok(RadiusSchedule { r_a, r_b, values })
}

/// Primary and backup routes of one demand.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutePlan {
    pub source: NodeId,
    pub dest: NodeId,
    pub primary: Vec<NodeId>,
    /// `backups[i-1]` is the route in topology `i`, absent if `G_i` cannot connect the pair.
    pub backups: Vec<Option<Vec<NodeId>>>,
    /// `detours[i-1]` maps a node to its next hop toward `dest` in topology `i`,
    /// covering the topology-`i` route from every node of the primary route.
    pub detours: Vec<BTreeMap<NodeId, NodeId>>,
}

impl RoutePlan {
    /// Plan with explicit routes and no detour entries beyond the backups.
    pub fn from_routes(primary: Vec<NodeId>, backups: Vec<Option<Vec<NodeId>>>) -> Self {
        let source = primary[0];
        let dest = *primary.last().expect("non-empty route");
        let detours = backups
            .iter()
            .map(|b| {
                b.as_ref()
                    .map(|p| p.windows(2).map(|w| (w[0], w[1])).collect())
                    .unwrap_or_default()
            })
            .collect();
        Self { source, dest, primary, backups, detours }
    }

    pub fn k(&self) -> usize {
        self.backups.len()
    }

    pub fn backup(&self, i: usize) -> Option<&[NodeId]> {
        self.backups.get(i - 1)?.as_deref()
    }
}

/// Shared per-graph state for planning many demands.
pub struct RoutePlanner<'a> {
    g: &'a NetworkGraph,
    bts: &'a BackupTopologySet,
    schedule: Option<&'a RadiusSchedule>,
    tiers: WeightTiers,
    /// Pairwise minimum distances between link segments.
    link_distance: Vec<Vec<f64>>,
    primary_trees: Vec<PathTree>,
}

impl<'a> RoutePlanner<'a> {
    /// `schedule = None` disables penalization, giving plain MRC backup routes.
    pub fn new(bts: &'a BackupTopologySet, schedule: Option<&'a RadiusSchedule>) -> Self {
        let g: &NetworkGraph = bts.base();
        let segs: Vec<_> = (0..g.link_count()).map(|i| g.segment(LinkId(i))).collect();
        let link_distance = if schedule.is_some() {
            segs.iter()
                .map(|a| segs.iter().map(|b| segment_segment_distance(a, b)).collect())
                .collect()
        } else {
            Vec::new()
        };
        let primary_trees = (0..g.node_count())
            .into_par_iter()
            .map(|t| PathTree::toward(g, t, |l| Some(g.link(l).weight), |_| true))
            .collect();
        Self { g, bts, schedule, tiers: bts.tiers(), link_distance, primary_trees }
    }

    pub fn tiers(&self) -> WeightTiers {
        self.tiers
    }

    /// Links penalized in topology `i` for a primary route given as link ids.
    pub fn penalized(&self, primary_links: &[LinkId], i: usize) -> Vec<bool> {
        let Some(schedule) = self.schedule else {
            return vec![false; self.g.link_count()];
        };
        let reach = 2.0 * schedule.radius(i) + TOLERANCE;
        (0..self.g.link_count())
            .map(|e| primary_links.iter().any(|f| self.link_distance[e][f.0] <= reach))
            .collect()
    }

    /// Routing weight of each link in topology `i` with the given penalties.
    pub fn topology_weights(&self, i: usize, penalized: &[bool]) -> Vec<Option<f64>> {
        let topo = self.bts.topology(i);
        (0..self.g.link_count())
            .map(|e| {
                let l = LinkId(e);
                let base = self.g.link(l).weight;
                match topo.link_state(l) {
                    LinkState::Isolated => None,
                    LinkState::Restricted => Some(base + self.tiers.restricted),
                    LinkState::Normal if penalized[e] => Some(base + self.tiers.penalty),
                    LinkState::Normal => Some(base),
                }
            })
            .collect()
    }

    pub fn plan(&self, s: NodeId, t: NodeId) -> Result<RoutePlan, RouteError> {
        let g = self.g;
        let si = g.idx(s).map_err(|_| RouteError::UnknownNode(s))?;
        let ti = g.idx(t).map_err(|_| RouteError::UnknownNode(t))?;
        if si == ti {
            return Err(RouteError::SameEndpoints(s));
        }
        let primary_idx = self.primary_trees[ti]
            .path_from(si)
            .ok_or(RouteError::NoPrimary(s, t))?;
        let primary_links: Vec<LinkId> = primary_idx
            .windows(2)
            .map(|w| g.link_between(w[0], w[1]).expect("tree hops follow links"))
            .collect();
        let mut backups = Vec::with_capacity(self.bts.k());
        let mut detours = Vec::with_capacity(self.bts.k());
        for i in 1..=self.bts.k() {
            let penalized = self.penalized(&primary_links, i);
            let weights = self.topology_weights(i, &penalized);
            let tree = PathTree::toward(g, ti, |l| weights[l.0], |_| true);
            backups.push(tree.path_from(si).map(|p| p.into_iter().map(|x| g.id(x)).collect()));
            let mut entries = BTreeMap::new();
            for &u in &primary_idx[..primary_idx.len() - 1] {
                let mut cur = u;
                while cur != ti {
                    let Some(next) = tree.next_hop(cur) else { break };
                    if entries.insert(g.id(cur), g.id(next)).is_some() {
                        break;
                    }
                    cur = next;
                }
            }
            detours.push(entries);
        }
        Ok(RoutePlan {
            source: s,
            dest: t,
            primary: primary_idx.into_iter().map(|x| g.id(x)).collect(),
            backups,
            detours,
        })
    }
}

/// Routes for one demand pair.
pub fn generate_backup_routes(
    bts: &BackupTopologySet,
    s: NodeId,
    t: NodeId,
    schedule: Option<&RadiusSchedule>,
) -> Result<RoutePlan, RouteError> {
    RoutePlanner::new(bts, schedule).plan(s, t)
}

/// Route plans keyed by demand pair.
#[derive(Debug, Clone, Default)]
pub struct RoutePlanTable {
    plans: HashMap<(NodeId, NodeId), RoutePlan>,
    order: Vec<(NodeId, NodeId)>,
}

impl RoutePlanTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, plan: RoutePlan) {
        let key = (plan.source, plan.dest);
        if self.plans.insert(key, plan).is_none() {
            self.order.push(key);
        }
    }

    pub fn get(&self, s: NodeId, t: NodeId) -> Option<&RoutePlan> {
        self.plans.get(&(s, t))
    }

    /// Plans in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &RoutePlan> {
        self.order.iter().map(|k| &self.plans[k])
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn demands(&self) -> &[(NodeId, NodeId)] {
        &self.order
    }
}

/// One demand per unordered node pair, oriented from the smaller id.
pub fn all_pairs(g: &NetworkGraph) -> Vec<(NodeId, NodeId)> {
    let ids = g.node_ids();
    let mut out = Vec::with_capacity(ids.len() * ids.len().saturating_sub(1) / 2);
    for (i, &s) in ids.iter().enumerate() {
        for &t in &ids[i + 1..] {
            out.push((s, t));
        }
    }
    out
}

/// Both orientations of every node pair.
pub fn ordered_pairs(g: &NetworkGraph) -> Vec<(NodeId, NodeId)> {
    let ids = g.node_ids();
    ids.iter()
        .flat_map(|&s| ids.iter().filter(move |&&t| t != s).map(move |&t| (s, t)))
        .collect()
}

pub fn plan_demands(
    bts: &BackupTopologySet,
    schedule: Option<&RadiusSchedule>,
    demands: &[(NodeId, NodeId)],
) -> Result<RoutePlanTable, RouteError> {
    let planner = RoutePlanner::new(bts, schedule);
    let plans: Vec<RoutePlan> = demands
        .par_iter()
        .map(|&(s, t)| planner.plan(s, t))
        .collect::<Result<_, _>>()?;
    let mut table = RoutePlanTable::new();
    for p in plans {
        table.insert(p);
    }
    Ok(table)
}

/// `route <s> <t> <topology> <nodes...>` lines, topology 0 being the primary.
pub fn emit_route_plans(table: &RoutePlanTable) -> String {
    let mut out = String::new();
    let join = |p: &[NodeId]| p.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ");
    for plan in table.iter() {
        let _ = writeln!(out, "route {} {} 0 {}", plan.source, plan.dest, join(&plan.primary));
        for (i, b) in plan.backups.iter().enumerate() {
            if let Some(p) = b {
                let _ = writeln!(out, "route {} {} {} {}", plan.source, plan.dest, i + 1, join(p));
            }
        }
    }
    out
}
