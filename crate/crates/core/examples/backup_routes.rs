//! Plain versus geography-aware backup routes on the eight-node network.

use std::sync::Arc;

use resilient_sdn::fixtures;
use resilient_sdn::routes::{generate_backup_routes, radius_schedule};
use resilient_sdn::topology::NodeId;

fn show(route: Option<&[NodeId]>) -> String {
    route.map_or("-".into(), |r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join("-"))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Arc::new(fixtures::eight_node());
    let bts = fixtures::eight_node_backups(g);
    let schedule = radius_schedule(20.0, 60.0, bts.k())?;
    println!("radius schedule: {:?}", schedule.values());
    let (s, t) = (NodeId(6), NodeId(3));
    let plain = generate_backup_routes(&bts, s, t, None)?;
    let geo = generate_backup_routes(&bts, s, t, Some(&schedule))?;
    println!("primary {s}->{t}: {}", show(Some(&plain.primary)));
    for i in 1..=bts.k() {
        println!("G{i}: plain {:<10} zone-aware {}", show(plain.backup(i)), show(geo.backup(i)));
    }
    Ok(())
}
