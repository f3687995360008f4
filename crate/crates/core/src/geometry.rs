//! Planar primitives for vulnerable zones.
//!
//! A vulnerable zone is the set of failure epicenters at which a disk of a
//! given radius touches a link (a "hippodrome" around the segment) or any link
//! of a path (a union of hippodromes). Zones are closed: a point at exactly the
//! radius counts as inside.

use std::fmt;

use crate::error::GeometryError;

/// Absolute tolerance for every boundary decision in the crate.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn sub(&self, other: &Point) -> (f64, f64) {
        (self.x - other.x, self.y - other.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A non-degenerate straight segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    a: Point,
    b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self, GeometryError> {
        if !(a.x.is_finite() && a.y.is_finite() && b.x.is_finite() && b.y.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if a == b {
            return Err(GeometryError::DegenerateSegment(a));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> Point {
        self.a
    }

    pub fn b(&self) -> Point {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.a.distance(&self.b)
    }
}

/// Euclidean distance from `p` to the closest point of `s`.
pub fn point_segment_distance(p: Point, s: &Segment) -> f64 {
    let (dx, dy) = s.b.sub(&s.a);
    let (px, py) = p.sub(&s.a);
    let len2 = dx * dx + dy * dy;
    let t = ((px * dx + py * dy) / len2).clamp(0.0, 1.0);
    let foot = Point::new(s.a.x + t * dx, s.a.y + t * dy);
    p.distance(&foot)
}

fn orientation(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn properly_cross(s1: &Segment, s2: &Segment) -> bool {
    let d1 = orientation(s2.a, s2.b, s1.a);
    let d2 = orientation(s2.a, s2.b, s1.b);
    let d3 = orientation(s1.a, s1.b, s2.a);
    let d4 = orientation(s1.a, s1.b, s2.b);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Minimum distance between any two points of the segments; zero if they meet.
pub fn segment_segment_distance(s1: &Segment, s2: &Segment) -> f64 {
    if properly_cross(s1, s2) {
        return 0.0;
    }
    // Touching and collinear overlaps show up as a zero endpoint distance.
    point_segment_distance(s1.a, s2)
        .min(point_segment_distance(s1.b, s2))
        .min(point_segment_distance(s2.a, s1))
        .min(point_segment_distance(s2.b, s1))
}

/// True if the segments share a point other than a common endpoint.
pub fn segments_cross(s1: &Segment, s2: &Segment) -> bool {
    let shared = |p: Point| p == s2.a || p == s2.b;
    match (shared(s1.a), shared(s1.b)) {
        (false, false) => segment_segment_distance(s1, s2) <= TOLERANCE,
        // One common endpoint: they cross only when collinear and overlapping
        // beyond that endpoint.
        (true, false) | (false, true) => {
            let (common, s1_far) = if shared(s1.a) { (s1.a, s1.b) } else { (s1.b, s1.a) };
            let s2_far = if s2.a == common { s2.b } else { s2.a };
            point_segment_distance(s1_far, s2) <= TOLERANCE
                || point_segment_distance(s2_far, s1) <= TOLERANCE
        }
        (true, true) => true,
    }
}

/// Vulnerable zone of a link (single-segment spine) or path (polyline spine).
#[derive(Debug, Clone, PartialEq)]
pub struct VulnerableZone {
    spine: Vec<Segment>,
    radius: f64,
}

impl VulnerableZone {
    pub fn new(spine: Vec<Segment>, radius: f64) -> Result<Self, GeometryError> {
        if spine.is_empty() {
            return Err(GeometryError::EmptySpine);
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidRadius(radius));
        }
        for pair in spine.windows(2) {
            if pair[0].b != pair[1].a {
                return Err(GeometryError::BrokenSpine);
            }
        }
        Ok(Self { spine, radius })
    }

    pub fn of_link(link: Segment, radius: f64) -> Result<Self, GeometryError> {
        Self::new(vec![link], radius)
    }

    /// Zone of a path given its node positions in travel order.
    pub fn of_path(points: &[Point], radius: f64) -> Result<Self, GeometryError> {
        let spine = points
            .windows(2)
            .map(|w| Segment::new(w[0], w[1]))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(spine, radius)
    }

    pub fn spine(&self) -> &[Segment] {
        &self.spine
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Distance from `p` to the spine.
    pub fn distance_to(&self, p: Point) -> f64 {
        self.spine
            .iter()
            .map(|s| point_segment_distance(p, s))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.distance_to(p) <= self.radius + TOLERANCE
    }

    /// Two equal-radius zones intersect iff their spines come within twice the radius.
    pub fn intersects(&self, other: &VulnerableZone) -> Result<bool, GeometryError> {
        if (self.radius - other.radius).abs() > TOLERANCE {
            return Err(GeometryError::RadiusMismatch(self.radius, other.radius));
        }
        let reach = self.radius + other.radius + TOLERANCE;
        Ok(self.spine.iter().any(|u| {
            other
                .spine
                .iter()
                .any(|v| segment_segment_distance(u, v) <= reach)
        }))
    }
}

pub fn zone_contains(zone: &VulnerableZone, p: Point) -> bool {
    zone.contains(p)
}

pub fn zones_intersect(z1: &VulnerableZone, z2: &VulnerableZone) -> Result<bool, GeometryError> {
    z1.intersects(z2)
}
