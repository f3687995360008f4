//! Planar network graphs: validation, text I/O, random generation and
//! deterministic shortest paths.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::io::Read;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::TopologyError;
use crate::geometry::{segments_cross, Point, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index of a link inside its graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentArea {
    pub width: f64,
    pub height: f64,
}

impl DeploymentArea {
    pub fn new(width: f64, height: f64) -> Result<Self, TopologyError> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(TopologyError::InvariantViolation(format!(
                "deployment area {width} x {height} must be positive"
            )));
        }
        Ok(Self { width, height })
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }
}

/// Undirected link between node indices `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl Link {
    pub fn other(&self, end: usize) -> usize {
        if end == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A connected, planar-embedded, undirected graph with positive link weights.
///
/// Nodes are stored in increasing id order, so node indices compare the same
/// way ids do.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    area: DeploymentArea,
    ids: Vec<NodeId>,
    positions: Vec<Point>,
    index: HashMap<NodeId, usize>,
    links: Vec<Link>,
    adjacency: Vec<Vec<(usize, LinkId)>>,
    link_index: HashMap<(usize, usize), LinkId>,
}

impl NetworkGraph {
    /// Builds and validates a graph. `None` weights default to the Euclidean length.
    pub fn new(
        area: DeploymentArea,
        nodes: Vec<(NodeId, Point)>,
        links: Vec<(NodeId, NodeId, Option<f64>)>,
    ) -> Result<Self, TopologyError> {
        let mut nodes = nodes;
        nodes.sort_by_key(|(id, _)| *id);
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, (id, p)) in nodes.iter().enumerate() {
            if index.insert(*id, i).is_some() {
                return Err(TopologyError::InvariantViolation(format!("duplicate node {id}")));
            }
            if !area.contains(*p) {
                return Err(TopologyError::InvariantViolation(format!(
                    "node {id} at {p} lies outside the deployment area"
                )));
            }
        }
        let ids: Vec<NodeId> = nodes.iter().map(|(id, _)| *id).collect();
        let positions: Vec<Point> = nodes.iter().map(|(_, p)| *p).collect();

        let mut built = Vec::with_capacity(links.len());
        let mut link_index = HashMap::with_capacity(links.len());
        for (a, b, w) in links {
            let ia = *index.get(&a).ok_or(TopologyError::UnknownNode(a))?;
            let ib = *index.get(&b).ok_or(TopologyError::UnknownNode(b))?;
            if ia == ib {
                return Err(TopologyError::InvariantViolation(format!("self-loop at {a}")));
            }
            let (u, v) = (ia.min(ib), ia.max(ib));
            let weight = w.unwrap_or_else(|| positions[u].distance(&positions[v]));
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(TopologyError::InvariantViolation(format!(
                    "link {a}-{b} has non-positive weight {weight}"
                )));
            }
            if link_index.insert((u, v), LinkId(usize::MAX)).is_some() {
                return Err(TopologyError::InvariantViolation(format!("parallel link {a}-{b}")));
            }
            built.push(Link { u, v, weight });
        }
        built.sort_by_key(|l| (l.u, l.v));
        let mut adjacency = vec![Vec::new(); ids.len()];
        for (i, l) in built.iter().enumerate() {
            link_index.insert((l.u, l.v), LinkId(i));
            adjacency[l.u].push((l.v, LinkId(i)));
            adjacency[l.v].push((l.u, LinkId(i)));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }

        let g = Self { area, ids, positions, index, links: built, adjacency, link_index };
        g.check_planar()?;
        if !g.is_connected() {
            return Err(TopologyError::InvariantViolation("graph is disconnected".into()));
        }
        Ok(g)
    }

    fn check_planar(&self) -> Result<(), TopologyError> {
        let segs: Vec<Segment> = (0..self.links.len()).map(|i| self.segment(LinkId(i))).collect();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                if segments_cross(&segs[i], &segs[j]) {
                    let (a, b) = self.link_ids(LinkId(i));
                    let (c, d) = self.link_ids(LinkId(j));
                    return Err(TopologyError::InvariantViolation(format!(
                        "links {a}-{b} and {c}-{d} cross"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn area(&self) -> DeploymentArea {
        self.area
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, idx: usize) -> NodeId {
        self.ids[idx]
    }

    pub fn idx(&self, id: NodeId) -> Result<usize, TopologyError> {
        self.index.get(&id).copied().ok_or(TopologyError::UnknownNode(id))
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn position(&self, idx: usize) -> Point {
        self.positions[idx]
    }

    pub fn position_of(&self, id: NodeId) -> Result<Point, TopologyError> {
        Ok(self.positions[self.idx(id)?])
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> Link {
        self.links[id.0]
    }

    /// Endpoint ids of a link, smaller first.
    pub fn link_ids(&self, id: LinkId) -> (NodeId, NodeId) {
        let l = self.links[id.0];
        (self.ids[l.u], self.ids[l.v])
    }

    /// Neighbours of a node index with the connecting link, in id order.
    pub fn neighbors(&self, idx: usize) -> &[(usize, LinkId)] {
        &self.adjacency[idx]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adjacency[idx].len()
    }

    pub fn link_between(&self, a: usize, b: usize) -> Option<LinkId> {
        self.link_index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn link_by_ids(&self, a: NodeId, b: NodeId) -> Option<LinkId> {
        let (ia, ib) = (self.idx(a).ok()?, self.idx(b).ok()?);
        self.link_between(ia, ib)
    }

    pub fn segment(&self, id: LinkId) -> Segment {
        let l = self.links[id.0];
        Segment::new(self.positions[l.u], self.positions[l.v])
            .expect("distinct nodes never share a position in a planar embedding")
    }

    pub fn weights(&self) -> Vec<f64> {
        self.links.iter().map(|l| l.weight).collect()
    }

    pub fn max_weight(&self) -> f64 {
        self.links.iter().map(|l| l.weight).fold(0.0, f64::max)
    }

    pub fn total_weight(&self) -> f64 {
        self.links.iter().map(|l| l.weight).sum()
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_without(None)
    }

    fn is_connected_without(&self, removed: Option<usize>) -> bool {
        let n = self.node_count();
        let start = match (0..n).find(|&i| Some(i) != removed) {
            Some(s) => s,
            None => return true,
        };
        let mut seen = vec![false; n];
        if let Some(r) = removed {
            seen[r] = true;
        }
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// First cut node (by id) if the graph is not biconnected.
    pub fn cut_node(&self) -> Option<NodeId> {
        if self.node_count() < 3 {
            return self.ids.first().copied();
        }
        (0..self.node_count())
            .find(|&i| !self.is_connected_without(Some(i)))
            .map(|i| self.ids[i])
    }

    pub fn is_biconnected(&self) -> bool {
        self.cut_node().is_none()
    }

    /// Total base weight of a node path, `None` if two consecutive nodes are not adjacent.
    pub fn path_weight(&self, path: &[NodeId]) -> Option<f64> {
        let mut total = 0.0;
        for w in path.windows(2) {
            let l = self.link_by_ids(w[0], w[1])?;
            total += self.links[l.0].weight;
        }
        Some(total)
    }

    pub fn path_points(&self, path: &[NodeId]) -> Result<Vec<Point>, TopologyError> {
        path.iter().map(|&id| self.position_of(id)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Tolerance used when deciding whether two path weights tie.
pub(crate) fn weight_tolerance(d: f64) -> f64 {
    1e-9 + 1e-12 * d.abs()
}

/// Shortest-path tree toward a single target.
///
/// Every node's next hop is the smallest-id neighbour that lies on some
/// shortest path, which makes each extracted path the lexicographically
/// smallest shortest path and keeps suffixes consistent across sources.
#[derive(Debug, Clone)]
pub struct PathTree {
    target: usize,
    dist: Vec<f64>,
    next: Vec<Option<usize>>,
}

impl PathTree {
    /// `weight` returns `None` for links that may not be used; `node_ok` masks nodes out.
    pub fn toward(
        g: &NetworkGraph,
        target: usize,
        weight: impl Fn(LinkId) -> Option<f64>,
        node_ok: impl Fn(usize) -> bool,
    ) -> Self {
        let n = g.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut next = vec![None; n];
        if !node_ok(target) {
            return Self { target, dist, next };
        }
        let link_w: Vec<Option<f64>> = (0..g.link_count()).map(|i| weight(LinkId(i))).collect();
        dist[target] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry { dist: 0.0, node: target });
        let mut done = vec![false; n];
        while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &(v, l) in g.neighbors(u) {
                if done[v] || !node_ok(v) {
                    continue;
                }
                if let Some(w) = link_w[l.0] {
                    let nd = d + w;
                    if nd < dist[v] {
                        dist[v] = nd;
                        heap.push(HeapEntry { dist: nd, node: v });
                    }
                }
            }
        }
        for u in 0..n {
            if u == target || !dist[u].is_finite() {
                continue;
            }
            let tol = weight_tolerance(dist[u]);
            next[u] = g.neighbors(u).iter().find_map(|&(v, l)| {
                let w = link_w[l.0]?;
                (dist[v].is_finite() && (dist[v] + w - dist[u]).abs() <= tol).then_some(v)
            });
        }
        Self { target, dist, next }
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn distance(&self, from: usize) -> Option<f64> {
        self.dist[from].is_finite().then_some(self.dist[from])
    }

    pub fn next_hop(&self, from: usize) -> Option<usize> {
        self.next[from]
    }

    /// Node indices from `from` to the target, inclusive.
    pub fn path_from(&self, from: usize) -> Option<Vec<usize>> {
        if !self.dist[from].is_finite() {
            return None;
        }
        let mut path = vec![from];
        let mut cur = from;
        while cur != self.target {
            cur = self.next[cur]?;
            path.push(cur);
            if path.len() > self.dist.len() {
                return None;
            }
        }
        Some(path)
    }
}

/// Minimum-weight path from `s` to `t`, ties broken by the lexicographically
/// smallest node sequence. `weights` overrides the base link weights (indexed
/// by [`LinkId`]); infinite entries exclude a link.
pub fn shortest_path(
    g: &NetworkGraph,
    weights: Option<&[f64]>,
    s: NodeId,
    t: NodeId,
) -> Result<Option<Vec<NodeId>>, TopologyError> {
    let (si, ti) = (g.idx(s)?, g.idx(t)?);
    let tree = PathTree::toward(
        g,
        ti,
        |l| {
            let w = weights.map_or(g.link(l).weight, |ws| ws[l.0]);
            w.is_finite().then_some(w)
        },
        |_| true,
    );
    Ok(tree
        .path_from(si)
        .map(|p| p.into_iter().map(|i| g.id(i)).collect()))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, TopologyError> {
    let tok = tok.ok_or_else(|| TopologyError::Parse { line, message: format!("missing {what}") })?;
    tok.parse().map_err(|_| TopologyError::Parse {
        line,
        message: format!("invalid {what} `{tok}`"),
    })
}

/// Parses the line-oriented topology format (`area`, `node`, `link` lines, `#` comments).
pub fn parse_topology(text: &str) -> Result<NetworkGraph, TopologyError> {
    let mut area = None;
    let mut nodes = Vec::new();
    let mut links = Vec::new();
    let mut seen_nodes = HashSet::new();
    let mut seen_links = HashSet::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let kind = toks.next().unwrap_or_default();
        match kind {
            "area" => {
                if area.is_some() {
                    return Err(TopologyError::Parse { line, message: "duplicate area line".into() });
                }
                let w: f64 = parse_num(toks.next(), line, "width")?;
                let h: f64 = parse_num(toks.next(), line, "height")?;
                area = Some(DeploymentArea::new(w, h).map_err(|e| TopologyError::Parse {
                    line,
                    message: e.to_string(),
                })?);
            }
            "node" => {
                let id: u32 = parse_num(toks.next(), line, "node id")?;
                let x: f64 = parse_num(toks.next(), line, "x")?;
                let y: f64 = parse_num(toks.next(), line, "y")?;
                if !(x.is_finite() && y.is_finite()) {
                    return Err(TopologyError::Parse { line, message: "non-finite coordinate".into() });
                }
                if !seen_nodes.insert(id) {
                    return Err(TopologyError::Parse { line, message: format!("duplicate node {id}") });
                }
                nodes.push((NodeId(id), Point::new(x, y)));
            }
            "link" => {
                let u: u32 = parse_num(toks.next(), line, "link endpoint")?;
                let v: u32 = parse_num(toks.next(), line, "link endpoint")?;
                let w = match toks.next() {
                    Some(tok) => Some(parse_num::<f64>(Some(tok), line, "weight")?),
                    None => None,
                };
                if !seen_links.insert((u.min(v), u.max(v))) {
                    return Err(TopologyError::Parse { line, message: format!("duplicate link {u}-{v}") });
                }
                links.push((NodeId(u), NodeId(v), w));
            }
            other => {
                return Err(TopologyError::Parse { line, message: format!("unknown directive `{other}`") })
            }
        }
        if toks.next().is_some() {
            return Err(TopologyError::Parse { line, message: "trailing tokens".into() });
        }
    }
    let area = area.ok_or(TopologyError::Parse { line: 1, message: "missing area line".into() })?;
    NetworkGraph::new(area, nodes, links)
}

pub fn load_topology(mut source: impl Read) -> Result<NetworkGraph, TopologyError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_topology(&text)
}

/// Writes `g` in the topology file format with explicit weights.
pub fn emit_topology(g: &NetworkGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "area {} {}", g.area.width, g.area.height);
    for (id, p) in g.ids.iter().zip(&g.positions) {
        let _ = writeln!(out, "node {} {} {}", id, p.x, p.y);
    }
    for l in &g.links {
        let _ = writeln!(out, "link {} {} {}", g.ids[l.u], g.ids[l.v], l.weight);
    }
    out
}

const GENERATION_ATTEMPTS: usize = 100;

fn delaunay_edges(points: &[Point]) -> Vec<(usize, usize)> {
    let pts: Vec<delaunator::Point> = points
        .iter()
        .map(|p| delaunator::Point { x: p.x, y: p.y })
        .collect();
    let tri = delaunator::triangulate(&pts);
    let mut edges: Vec<(usize, usize)> = tri
        .triangles
        .chunks(3)
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Edge-list connectivity helper used while thinning a triangulation.
fn connected_without(n: usize, edges: &[(usize, usize)], skip_edge: usize, skip_node: Option<usize>) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        if i != skip_edge && Some(a) != skip_node && Some(b) != skip_node {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let start = (0..n).find(|&i| Some(i) != skip_node).unwrap_or(0);
    let mut seen = vec![false; n];
    if let Some(s) = skip_node {
        seen[s] = true;
    }
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn keeps_biconnected(n: usize, edges: &[(usize, usize)], skip: usize) -> bool {
    n < 3 || (0..n).all(|node| connected_without(n, edges, skip, Some(node)))
}

/// Random connected planar graph: Delaunay triangulation of uniform points,
/// thinned by random edge deletions down to exactly `m` links.
///
/// Deletions keep the graph biconnected while that is possible and fall back to
/// plain connectivity afterwards.
pub fn generate_random_planar(
    n: usize,
    m: usize,
    area: DeploymentArea,
    seed: u64,
) -> Result<NetworkGraph, TopologyError> {
    if n < 2 {
        return Err(TopologyError::InfeasibleRequest(format!("need at least 2 nodes, got {n}")));
    }
    let max_links = if n == 2 { 1 } else { 3 * n - 6 };
    if m < n - 1 || m > max_links {
        return Err(TopologyError::InfeasibleRequest(format!(
            "{m} links outside [{}, {max_links}] for {n} nodes",
            n - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERATION_ATTEMPTS {
        let points: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.gen_range(0.0..area.width), rng.gen_range(0.0..area.height)))
            .collect();
        let mut edges = if n == 2 { vec![(0, 1)] } else { delaunay_edges(&points) };
        if edges.len() < m || (n > 2 && edges.len() < 3) {
            continue;
        }
        let mut order: Vec<(usize, usize)> = edges.clone();
        order.shuffle(&mut rng);
        for strict in [true, false] {
            for e in &order {
                if edges.len() == m {
                    break;
                }
                let Some(pos) = edges.iter().position(|x| x == e) else { continue };
                let ok = if strict {
                    keeps_biconnected(n, &edges, pos)
                } else {
                    connected_without(n, &edges, pos, None)
                };
                if ok {
                    edges.remove(pos);
                }
            }
        }
        if edges.len() != m {
            continue;
        }
        let nodes = points
            .iter()
            .enumerate()
            .map(|(i, p)| (NodeId(i as u32), *p))
            .collect();
        let links = edges
            .iter()
            .map(|&(a, b)| (NodeId(a as u32), NodeId(b as u32), None))
            .collect();
        match NetworkGraph::new(area, nodes, links) {
            Ok(g) => return Ok(g),
            Err(TopologyError::InvariantViolation(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(TopologyError::GenerationFailure(GENERATION_ATTEMPTS))
}
