//! Controller-side restoration: splicing surviving backup-route segments with
//! load-aware weights, the Maximal Load ledger, a hop-count splicing baseline
//! and an exhaustive min-max oracle for small instances.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use crate::dataplane::Flow;
use crate::error::{OracleError, SpliceError};
use crate::failure::SurvivingGraph;
use crate::routes::{RoutePlan, RoutePlanTable};
use crate::topology::NodeId;

/// Joint assignments the oracle is willing to search.
pub const ORACLE_LIMIT: u128 = 1_000_000;

/// Per-node primary load `P_u` and rerouted load `R'_u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadLedger {
    primary: Vec<u32>,
    rerouted: Vec<u32>,
}

impl LoadLedger {
    /// `P_u` counts the primary routes through `u` that survived the failure.
    pub fn from_primaries(sg: &SurvivingGraph, plans: &RoutePlanTable) -> Self {
        let g = sg.graph();
        let mut primary = vec![0; g.node_count()];
        for plan in plans.iter() {
            let idx: Vec<usize> = plan.primary.iter().map(|&n| g.idx(n).expect("plan nodes exist")).collect();
            if sg.path_alive(&idx) {
                for u in idx {
                    primary[u] += 1;
                }
            }
        }
        Self { primary, rerouted: vec![0; g.node_count()] }
    }

    pub fn with_counts(primary: Vec<u32>, rerouted: Vec<u32>) -> Self {
        assert_eq!(primary.len(), rerouted.len());
        Self { primary, rerouted }
    }

    pub fn primary(&self, idx: usize) -> u32 {
        self.primary[idx]
    }

    pub fn rerouted(&self, idx: usize) -> u32 {
        self.rerouted[idx]
    }

    /// Counts one rerouted path through each distinct node of `path`.
    pub fn add_rerouted(&mut self, sg: &SurvivingGraph, path: &[NodeId]) {
        let g = sg.graph();
        let distinct: BTreeSet<usize> = path.iter().filter_map(|&n| g.idx(n).ok()).collect();
        for u in distinct {
            self.rerouted[u] += 1;
        }
    }

    pub fn load(&self, idx: usize) -> u32 {
        self.primary[idx] + self.rerouted[idx]
    }
}

/// `(R'_u + R'_v) / 2`
pub fn splice_weight(ledger: &LoadLedger, u: usize, v: usize) -> f64 {
    (ledger.rerouted[u] as f64 + ledger.rerouted[v] as f64) / 2.0
}

/// Maximum of `P_u + R'_u` over surviving nodes.
pub fn maximal_load(ledger: &LoadLedger, sg: &SurvivingGraph) -> u32 {
    sg.surviving_nodes().map(|u| ledger.load(u)).max().unwrap_or(0)
}

/// Divert flow `flow` at node `at` onto backup topology `topology`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpliceAction {
    pub flow: Flow,
    pub at: NodeId,
    pub topology: usize,
}

/// A spliced route and the rules realizing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Splice {
    pub path: Vec<NodeId>,
    /// `labels[j]` is the topology of hop `path[j] -> path[j+1]`.
    pub labels: Vec<usize>,
    pub actions: Vec<SpliceAction>,
    pub weight: f64,
}

/// Directed labelled edges `u -> v` from surviving hops of each backup route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TempSpliceGraph {
    source: usize,
    dest: usize,
    out: HashMap<usize, Vec<(usize, usize)>>,
}

impl TempSpliceGraph {
    pub fn build(sg: &SurvivingGraph, plan: &RoutePlan) -> Self {
        let g = sg.graph();
        let idx = |n: NodeId| g.idx(n).expect("plan nodes exist");
        let mut edges = BTreeSet::new();
        for (i, route) in plan.backups.iter().enumerate() {
            for w in route.iter().flat_map(|p| p.windows(2)) {
                let (u, v) = (idx(w[0]), idx(w[1]));
                if sg.node_alive(u) && sg.hop_alive(u, v) {
                    edges.insert((u, v, i + 1));
                }
            }
        }
        let mut out: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for (u, v, l) in edges {
            out.entry(u).or_default().push((v, l));
        }
        Self { source: idx(plan.source), dest: idx(plan.dest), out }
    }

    /// Outgoing `(head, label)` pairs sorted by head then label.
    pub fn out_edges(&self, u: usize) -> &[(usize, usize)] {
        self.out.get(&u).map_or(&[], Vec::as_slice)
    }

    pub fn edge_count(&self) -> usize {
        self.out.values().map(Vec::len).sum()
    }

    /// Distinct simple node sequences from source to destination, at most `cap` of them.
    pub fn simple_paths(&self, cap: usize) -> Vec<Vec<usize>> {
        let mut found = BTreeSet::new();
        let mut stack = vec![self.source];
        let mut on_path = HashMap::new();
        on_path.insert(self.source, ());
        self.walk(&mut stack, &mut on_path, &mut found, cap);
        found.into_iter().collect()
    }

    fn walk(
        &self,
        stack: &mut Vec<usize>,
        on_path: &mut HashMap<usize, ()>,
        found: &mut BTreeSet<Vec<usize>>,
        cap: usize,
    ) {
        let u = *stack.last().expect("non-empty");
        if u == self.dest {
            found.insert(stack.clone());
            return;
        }
        let mut heads: Vec<usize> = self.out_edges(u).iter().map(|&(v, _)| v).collect();
        heads.dedup();
        for v in heads {
            if found.len() >= cap {
                return;
            }
            if on_path.contains_key(&v) {
                continue;
            }
            on_path.insert(v, ());
            stack.push(v);
            self.walk(stack, on_path, found, cap);
            stack.pop();
            on_path.remove(&v);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Key {
    weight: f64,
    hops: usize,
    switches: usize,
    nodes: Vec<usize>,
    labels: Vec<usize>,
}

impl Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then(self.hops.cmp(&other.hops))
            .then(self.switches.cmp(&other.switches))
            .then_with(|| self.nodes.cmp(&other.nodes))
            .then_with(|| self.labels.cmp(&other.labels))
    }
}

struct Entry(Key, (usize, usize));

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

/// Least (weight, hops, label switches, node sequence) path over the temp graph.
fn best_splice(temp: &TempSpliceGraph, weight: impl Fn(usize, usize) -> f64) -> Option<Key> {
    let start = Key { weight: 0.0, hops: 0, switches: 0, nodes: vec![temp.source], labels: Vec::new() };
    // state: (node, label of the arriving hop, 0 at the source)
    let mut best: HashMap<(usize, usize), Key> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert((temp.source, 0), start.clone());
    heap.push(Entry(start, (temp.source, 0)));
    while let Some(Entry(key, (u, last))) = heap.pop() {
        if best.get(&(u, last)).is_some_and(|b| b.cmp(&key) == Ordering::Less) {
            continue;
        }
        if u == temp.dest {
            return Some(key);
        }
        for &(v, l) in temp.out_edges(u) {
            if key.nodes.contains(&v) {
                continue;
            }
            let mut next = key.clone();
            next.weight += weight(u, v);
            next.hops += 1;
            next.switches += usize::from(last != 0 && last != l);
            next.nodes.push(v);
            next.labels.push(l);
            if best.get(&(v, l)).is_none_or(|b| next.cmp(b) == Ordering::Less) {
                best.insert((v, l), next.clone());
                heap.push(Entry(next, (v, l)));
            }
        }
    }
    None
}

fn to_splice(sg: &SurvivingGraph, plan: &RoutePlan, key: Key) -> Splice {
    let g = sg.graph();
    let flow = (plan.source, plan.dest);
    let mut actions = Vec::new();
    for (j, &l) in key.labels.iter().enumerate() {
        if j == 0 || key.labels[j - 1] != l {
            actions.push(SpliceAction { flow, at: g.id(key.nodes[j]), topology: l });
        }
    }
    Splice {
        path: key.nodes.iter().map(|&u| g.id(u)).collect(),
        labels: key.labels,
        actions,
        weight: key.weight,
    }
}

fn plan_for(plans: &RoutePlanTable, s: NodeId, t: NodeId) -> Result<&RoutePlan, SpliceError> {
    plans.get(s, t).ok_or(SpliceError::NoSplicePath)
}

/// Load-aware splicing; on success the spliced route is added to the ledger.
pub fn splice(
    sg: &SurvivingGraph,
    plans: &RoutePlanTable,
    ledger: &mut LoadLedger,
    s: NodeId,
    t: NodeId,
) -> Result<Splice, SpliceError> {
    let plan = check(sg, plans, s, t)?;
    let temp = TempSpliceGraph::build(sg, plan);
    let key = best_splice(&temp, |u, v| splice_weight(ledger, u, v)).ok_or(SpliceError::NoSplicePath)?;
    let out = to_splice(sg, plan, key);
    ledger.add_rerouted(sg, &out.path);
    Ok(out)
}

/// Hop-count splicing, blind to load. The caller records the result in its ledger.
pub fn shortest_splice(sg: &SurvivingGraph, plans: &RoutePlanTable, s: NodeId, t: NodeId) -> Result<Splice, SpliceError> {
    let plan = check(sg, plans, s, t)?;
    let temp = TempSpliceGraph::build(sg, plan);
    let key = best_splice(&temp, |_, _| 1.0).ok_or(SpliceError::NoSplicePath)?;
    Ok(to_splice(sg, plan, key))
}

fn check<'p>(sg: &SurvivingGraph, plans: &'p RoutePlanTable, s: NodeId, t: NodeId) -> Result<&'p RoutePlan, SpliceError> {
    let g = sg.graph();
    match (g.idx(s), g.idx(t)) {
        (Ok(a), Ok(b)) if sg.connected(a, b) => plan_for(plans, s, t),
        _ => Err(SpliceError::Disconnected),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplicePolicy {
    LoadAware,
    Shortest,
}

/// Controller decision for one escalated request.
#[derive(Debug, Clone, PartialEq)]
pub struct SpliceRecord {
    pub flow: Flow,
    pub result: Result<Splice, SpliceError>,
    /// Maximal Load after handling this request.
    pub ml_after: u32,
}

impl SpliceRecord {
    /// `splice <s> <t> <status> <action-count> <ml-after>`
    pub fn log_line(&self) -> String {
        let (status, count) = match &self.result {
            Ok(sp) => ("ok", sp.actions.len()),
            Err(SpliceError::Disconnected) => ("disconnected", 0),
            Err(SpliceError::NoSplicePath) => ("nosplicepath", 0),
        };
        format!("splice {} {} {status} {count} {}", self.flow.0, self.flow.1, self.ml_after)
    }
}

/// Handles escalated requests in ascending `(s, t)` order, updating the ledger.
pub fn splice_all(
    sg: &SurvivingGraph,
    plans: &RoutePlanTable,
    ledger: &mut LoadLedger,
    requests: &[Flow],
    policy: SplicePolicy,
) -> Vec<SpliceRecord> {
    let mut ordered = requests.to_vec();
    ordered.sort();
    ordered
        .into_iter()
        .map(|flow| {
            let result = match policy {
                SplicePolicy::LoadAware => splice(sg, plans, ledger, flow.0, flow.1),
                SplicePolicy::Shortest => {
                    let r = shortest_splice(sg, plans, flow.0, flow.1);
                    if let Ok(sp) = &r {
                        ledger.add_rerouted(sg, &sp.path);
                    }
                    r
                }
            };
            SpliceRecord { flow, result, ml_after: maximal_load(ledger, sg) }
        })
        .collect()
}

/// Optimal joint assignment of splice paths to requests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSolution {
    /// Chosen node sequence per request, `None` when the request has no splice path.
    pub assignment: Vec<Option<Vec<NodeId>>>,
    pub ml: u32,
}

/// Exhaustively minimizes Maximal Load over all simple splice paths of every request.
///
/// `base` carries the primary loads and the data-plane reroutes, which stay fixed.
pub fn minmax_oracle(
    sg: &SurvivingGraph,
    plans: &RoutePlanTable,
    base: &LoadLedger,
    requests: &[Flow],
) -> Result<OracleSolution, OracleError> {
    let g = sg.graph();
    let cap = (ORACLE_LIMIT + 1) as usize;
    let mut candidates: Vec<Vec<Vec<usize>>> = Vec::with_capacity(requests.len());
    let mut product: u128 = 1;
    for &(s, t) in requests {
        let paths = match check(sg, plans, s, t) {
            Ok(plan) => TempSpliceGraph::build(sg, plan).simple_paths(cap),
            Err(_) => Vec::new(),
        };
        product = product.saturating_mul(paths.len().max(1) as u128);
        if product > ORACLE_LIMIT {
            return Err(OracleError::TooLarge(product));
        }
        candidates.push(paths);
    }
    let alive: Vec<usize> = sg.surviving_nodes().collect();
    let mut load: Vec<u32> = (0..g.node_count()).map(|u| base.load(u)).collect();
    let floor = alive.iter().map(|&u| load[u]).max().unwrap_or(0);
    let mut search = Oracle {
        candidates: &candidates,
        alive: &alive,
        best_ml: u32::MAX,
        best: vec![None; requests.len()],
        current: vec![None; requests.len()],
        floor,
    };
    search.dfs(0, &mut load);
    let assignment = search
        .best
        .iter()
        .zip(&candidates)
        .map(|(c, paths)| c.map(|j| paths[j].iter().map(|&u| g.id(u)).collect()))
        .collect();
    Ok(OracleSolution { assignment, ml: search.best_ml })
}

struct Oracle<'a> {
    candidates: &'a [Vec<Vec<usize>>],
    alive: &'a [usize],
    best_ml: u32,
    best: Vec<Option<usize>>,
    current: Vec<Option<usize>>,
    floor: u32,
}

impl Oracle<'_> {
    fn dfs(&mut self, r: usize, load: &mut [u32]) {
        let ml = self.alive.iter().map(|&u| load[u]).max().unwrap_or(0);
        if ml >= self.best_ml || self.best_ml == self.floor {
            return;
        }
        if r == self.candidates.len() {
            self.best_ml = ml;
            self.best = self.current.clone();
            return;
        }
        if self.candidates[r].is_empty() {
            self.current[r] = None;
            self.dfs(r + 1, load);
            return;
        }
        for j in 0..self.candidates[r].len() {
            for &u in &self.candidates[r][j] {
                load[u] += 1;
            }
            self.current[r] = Some(j);
            self.dfs(r + 1, load);
            for &u in &self.candidates[r][j] {
                load[u] -= 1;
            }
        }
        self.current[r] = None;
    }
}
