//! Vulnerable zones of links and paths, and which links a disk failure takes out.

use std::sync::Arc;

use resilient_sdn::failure::{apply_failure, RegionalFailure};
use resilient_sdn::fixtures;
use resilient_sdn::geometry::{segment_segment_distance, zones_intersect, Point, Segment, VulnerableZone};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = Segment::new(Point::new(0.0, 0.0), Point::new(100.0, 0.0))?;
    let b = Segment::new(Point::new(50.0, 70.0), Point::new(150.0, 70.0))?;
    println!("segment distance: {:.1}", segment_segment_distance(&a, &b));
    for r in [20.0, 35.0, 50.0] {
        let meet = zones_intersect(&VulnerableZone::of_link(a, r)?, &VulnerableZone::of_link(b, r)?)?;
        println!("r = {r:>4}: zones intersect = {meet}");
    }

    let path = VulnerableZone::of_path(&[Point::new(0.0, 0.0), Point::new(100.0, 0.0), Point::new(100.0, 100.0)], 10.0)?;
    for p in [Point::new(50.0, 9.0), Point::new(109.0, 50.0), Point::new(60.0, 60.0)] {
        println!("{p} inside path zone: {}", path.contains(p));
    }

    let g = Arc::new(fixtures::eight_node());
    let sg = apply_failure(&g, &RegionalFailure::new(Point::new(450.0, 175.0), 95.0)?);
    let dead: Vec<String> = sg.destroyed_nodes().iter().map(ToString::to_string).collect();
    println!("disk at (450,175) r=95 destroys nodes {}", dead.join(" "));
    for l in sg.destroyed_links() {
        let (u, v) = g.link_ids(l);
        println!("  link {u}-{v}");
    }
    Ok(())
}
