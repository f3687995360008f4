//! Local fast reroute in the switch pipeline: a single node failure and a disk failure.

use std::sync::Arc;

use resilient_sdn::dataplane::{install_routes, simulate_flow};
use resilient_sdn::failure::{apply_failure, SurvivingGraph};
use resilient_sdn::fixtures;
use resilient_sdn::routes::{ordered_pairs, plan_demands};
use resilient_sdn::topology::NodeId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Arc::new(fixtures::eight_node());
    let bts = fixtures::eight_node_backups(g.clone());
    let plans = plan_demands(&bts, None, &ordered_pairs(&g))?;
    let dp = install_routes(&plans, &bts)?;
    let sw = dp.switch(NodeId(1)).expect("switch 1");
    println!("switch 1 holds {} primary entries", sw.table_len(0));
    if let Some(buckets) = sw.clean_group((NodeId(1), NodeId(3))) {
        println!("group for flow 1->3: {buckets:?}");
    }

    let node2 = SurvivingGraph::from_destroyed(g.clone(), &[g.idx(NodeId(2))?], &[]);
    println!("{}", simulate_flow(&dp, &SurvivingGraph::intact(g.clone()), NodeId(1), NodeId(3)).log_line());
    println!("{}", simulate_flow(&dp, &node2, NodeId(1), NodeId(3)).log_line());

    let disk = apply_failure(&g, &fixtures::eight_node_disk());
    let dead: Vec<String> = disk.destroyed_nodes().iter().map(ToString::to_string).collect();
    println!("disk failure destroys nodes {}", dead.join(" "));
    for (s, t) in [(1, 3), (6, 3), (4, 2)] {
        println!("{}", simulate_flow(&dp, &disk, NodeId(s), NodeId(t)).log_line());
    }
    Ok(())
}
