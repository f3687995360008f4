//! Generates a random planar topology and prints it in the text format.
//!
//! Usage: `cargo run --example random_topology [nodes] [links] [seed]`

use resilient_sdn::topology::{emit_topology, generate_random_planar, DeploymentArea};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let nodes = args.get(1).map_or(Ok(50), |s| s.parse())?;
    let links = args.get(2).map_or(Ok(120), |s| s.parse())?;
    let seed = args.get(3).map_or(Ok(1), |s| s.parse())?;
    let g = generate_random_planar(nodes, links, DeploymentArea::new(1200.0, 1200.0)?, seed)?;
    let degrees: Vec<usize> = (0..g.node_count()).map(|u| g.degree(u)).collect();
    eprintln!(
        "{} nodes, {} links, degree {}..{}, biconnected {}, total length {:.0}",
        g.node_count(),
        g.link_count(),
        degrees.iter().min().unwrap_or(&0),
        degrees.iter().max().unwrap_or(&0),
        g.is_biconnected(),
        g.total_weight()
    );
    print!("{}", emit_topology(&g));
    Ok(())
}
