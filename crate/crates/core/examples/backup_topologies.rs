//! Builds k backup topologies for the bundled 50-node network and checks them.
//!
//! Usage: `cargo run --example backup_topologies [k]`

use std::sync::Arc;

use resilient_sdn::fixtures;
use resilient_sdn::mrc::{emit_backup_topologies, generate_backup_topologies, verify_mrc_constraints, LinkState};
use resilient_sdn::topology::LinkId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = std::env::args().nth(1).map_or(Ok(6), |s| s.parse())?;
    let g = Arc::new(fixtures::random50());
    let bts = generate_backup_topologies(g.clone(), k)?;
    for t in bts.topologies() {
        let count = |s: LinkState| (0..g.link_count()).filter(|&e| t.link_state(LinkId(e)) == s).count();
        let isolated: Vec<String> = t.isolated_nodes().map(|u| g.id(u).to_string()).collect();
        println!(
            "G{}: isolates {} nodes [{}], {} restricted links, {} isolated links",
            t.index(),
            isolated.len(),
            isolated.join(" "),
            count(LinkState::Restricted),
            count(LinkState::Isolated)
        );
    }
    let violations = verify_mrc_constraints(&bts);
    println!("constraint violations: {}", violations.len());
    if std::env::var_os("EMIT").is_some() {
        print!("{}", emit_backup_topologies(&bts));
    }
    Ok(())
}
