//! Geographically correlated disk failures.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;

use crate::error::FailureError;
use crate::geometry::{point_segment_distance, Point, TOLERANCE};
use crate::topology::{DeploymentArea, LinkId, NetworkGraph, NodeId, PathTree};

/// A disk failure: everything within `radius` of `center` is destroyed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionalFailure {
    center: Point,
    radius: f64,
}

impl RegionalFailure {
    pub fn new(center: Point, radius: f64) -> Result<Self, FailureError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(FailureError::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Truncated power law with density proportional to `r^-exponent` on `[r_min, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusDistribution {
    r_min: f64,
    r_max: f64,
    exponent: f64,
}

impl RadiusDistribution {
    pub fn new(r_min: f64, r_max: f64, exponent: f64) -> Result<Self, FailureError> {
        if !(r_min > 0.0 && r_min <= r_max && r_max.is_finite()) {
            return Err(FailureError::InvalidDistribution(format!("need 0 < r_min <= r_max, got [{r_min}, {r_max}]")));
        }
        if !(exponent >= 0.0 && exponent.is_finite()) {
            return Err(FailureError::InvalidDistribution(format!("exponent must be >= 0, got {exponent}")));
        }
        Ok(Self { r_min, r_max, exponent })
    }

    pub fn fixed(radius: f64) -> Result<Self, FailureError> {
        Self::new(radius, radius, 0.0)
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Maps a uniform draw in `[0, 1)` to a radius by inverting the CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        let (a, b, alpha) = (self.r_min, self.r_max, self.exponent);
        if a == b {
            return a;
        }
        let r = if (alpha - 1.0).abs() < 1e-12 {
            a * (b / a).powf(u)
        } else {
            let e = 1.0 - alpha;
            (a.powf(e) + u * (b.powf(e) - a.powf(e))).powf(1.0 / e)
        };
        r.clamp(a, b)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        self.quantile(rng.gen::<f64>())
    }
}

/// Draws a failure with a uniform epicenter over the area.
pub fn sample_failure(dist: &RadiusDistribution, area: DeploymentArea, rng: &mut impl Rng) -> RegionalFailure {
    let center = Point::new(rng.gen::<f64>() * area.width, rng.gen::<f64>() * area.height);
    let radius = dist.sample(rng);
    RegionalFailure { center, radius }
}

/// The network after a failure, as alive masks over the base graph.
#[derive(Debug, Clone)]
pub struct SurvivingGraph {
    base: Arc<NetworkGraph>,
    node_alive: Vec<bool>,
    link_alive: Vec<bool>,
    component: Vec<Option<usize>>,
}

impl SurvivingGraph {
    /// Builds the remnant from explicit destroyed sets; incident links of dead nodes die too.
    pub fn from_destroyed(base: Arc<NetworkGraph>, dead_nodes: &[usize], dead_links: &[LinkId]) -> Self {
        let mut node_alive = vec![true; base.node_count()];
        for &u in dead_nodes {
            node_alive[u] = false;
        }
        let mut link_alive: Vec<bool> = base
            .links()
            .iter()
            .map(|l| node_alive[l.u] && node_alive[l.v])
            .collect();
        for l in dead_links {
            link_alive[l.0] = false;
        }
        let component = label_components(&base, &node_alive, &link_alive);
        Self { base, node_alive, link_alive, component }
    }

    pub fn intact(base: Arc<NetworkGraph>) -> Self {
        Self::from_destroyed(base, &[], &[])
    }

    pub fn graph(&self) -> &Arc<NetworkGraph> {
        &self.base
    }

    pub fn node_alive(&self, idx: usize) -> bool {
        self.node_alive[idx]
    }

    pub fn link_alive(&self, link: LinkId) -> bool {
        self.link_alive[link.0]
    }

    pub fn is_alive(&self, id: NodeId) -> bool {
        self.base.idx(id).is_ok_and(|i| self.node_alive[i])
    }

    /// Liveness as seen by a switch watching the port toward `to`: link and neighbour both up.
    pub fn hop_alive(&self, from: usize, to: usize) -> bool {
        self.node_alive[to]
            && self
                .base
                .link_between(from, to)
                .is_some_and(|l| self.link_alive[l.0])
    }

    pub fn destroyed_nodes(&self) -> Vec<NodeId> {
        (0..self.base.node_count())
            .filter(|&i| !self.node_alive[i])
            .map(|i| self.base.id(i))
            .collect()
    }

    pub fn destroyed_links(&self) -> Vec<LinkId> {
        (0..self.base.link_count())
            .filter(|&i| !self.link_alive[i])
            .map(LinkId)
            .collect()
    }

    pub fn surviving_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.base.node_count()).filter(|&i| self.node_alive[i])
    }

    pub fn component(&self, idx: usize) -> Option<usize> {
        self.component[idx]
    }

    /// Both endpoints alive and in the same surviving component.
    pub fn connected(&self, a: usize, b: usize) -> bool {
        matches!((self.component[a], self.component[b]), (Some(x), Some(y)) if x == y)
    }

    /// True if every node and link of the path survived.
    pub fn path_alive(&self, path: &[usize]) -> bool {
        path.iter().all(|&u| self.node_alive[u]) && path.windows(2).all(|w| self.hop_alive(w[0], w[1]))
    }

    pub fn is_untouched(&self) -> bool {
        self.node_alive.iter().all(|&a| a) && self.link_alive.iter().all(|&a| a)
    }

    /// Shortest-path tree over surviving elements at base weights.
    pub fn tree_toward(&self, target: usize) -> PathTree {
        PathTree::toward(
            &self.base,
            target,
            |l| self.link_alive[l.0].then(|| self.base.link(l).weight),
            |u| self.node_alive[u],
        )
    }
}

fn label_components(g: &NetworkGraph, node_alive: &[bool], link_alive: &[bool]) -> Vec<Option<usize>> {
    let mut label = vec![None; g.node_count()];
    let mut next = 0;
    for start in 0..g.node_count() {
        if !node_alive[start] || label[start].is_some() {
            continue;
        }
        label[start] = Some(next);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(v, l) in g.neighbors(u) {
                if node_alive[v] && link_alive[l.0] && label[v].is_none() {
                    label[v] = Some(next);
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    label
}

/// Removes every node within the disk and every link whose segment touches it.
pub fn apply_failure(g: &Arc<NetworkGraph>, f: &RegionalFailure) -> SurvivingGraph {
    let reach = f.radius + TOLERANCE;
    let dead_nodes: Vec<usize> = (0..g.node_count())
        .filter(|&i| g.position(i).distance(&f.center) <= reach)
        .collect();
    let dead_links: Vec<LinkId> = (0..g.link_count())
        .map(LinkId)
        .filter(|&l| point_segment_distance(f.center, &g.segment(l)) <= reach)
        .collect();
    SurvivingGraph::from_destroyed(g.clone(), &dead_nodes, &dead_links)
}

/// Demand pairs whose endpoints both survive in one connected component.
pub fn recoverable_pairs(sg: &SurvivingGraph, demands: &[(NodeId, NodeId)]) -> Vec<(NodeId, NodeId)> {
    demands
        .iter()
        .copied()
        .filter(|&(s, t)| {
            s != t
                && match (sg.base.idx(s), sg.base.idx(t)) {
                    (Ok(a), Ok(b)) => sg.connected(a, b),
                    _ => false,
                }
        })
        .collect()
}

pub fn emit_failure(f: &RegionalFailure) -> String {
    format!("failure {} {} {}", f.center.x, f.center.y, f.radius)
}

pub fn emit_failure_log(failures: &[RegionalFailure]) -> String {
    let mut out = String::new();
    for f in failures {
        let _ = writeln!(out, "{}", emit_failure(f));
    }
    out
}

/// Parses `failure <cx> <cy> <r>` lines, skipping blanks and `#` comments.
pub fn parse_failure_log(text: &str) -> Result<Vec<RegionalFailure>, (usize, String)> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let parsed = match toks.as_slice() {
            ["failure", x, y, r] => match (x.parse(), y.parse(), r.parse()) {
                (Ok(x), Ok(y), Ok(r)) => RegionalFailure::new(Point::new(x, y), r).map_err(|e| e.to_string()),
                _ => Err(format!("invalid number in `{content}`")),
            },
            _ => Err(format!("malformed failure line `{content}`")),
        };
        out.push(parsed.map_err(|m| (no + 1, m))?);
    }
    Ok(out)
}
