//! Controller splicing across two crossing backup routes, then Maximal Load.

use std::sync::Arc;

use resilient_sdn::controller::{maximal_load, minmax_oracle, splice, LoadLedger};
use resilient_sdn::failure::SurvivingGraph;
use resilient_sdn::fixtures::{self, CROSSING_A, CROSSING_B, CROSSING_E, CROSSING_S, CROSSING_T};
use resilient_sdn::routes::{RoutePlan, RoutePlanTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Arc::new(fixtures::crossing_paths());
    let [p1, p2] = fixtures::crossing_paths_routes();
    let mut plans = RoutePlanTable::new();
    plans.insert(RoutePlan::from_routes(p1.clone(), vec![Some(p1), Some(p2)]));
    let dead = [
        g.link_by_ids(CROSSING_A, CROSSING_E).expect("link a-e"),
        g.link_by_ids(CROSSING_E, CROSSING_B).expect("link e-b"),
    ];
    let sg = SurvivingGraph::from_destroyed(g.clone(), &[], &dead);

    let base = LoadLedger::from_primaries(&sg, &plans);
    let mut ledger = base.clone();
    let sp = splice(&sg, &plans, &mut ledger, CROSSING_S, CROSSING_T)?;
    let path: Vec<String> = sp.path.iter().map(ToString::to_string).collect();
    println!("spliced path {} labels {:?}", path.join("-"), sp.labels);
    for a in &sp.actions {
        println!("  at {} retag flow {}->{} onto G{}", a.at, a.flow.0, a.flow.1, a.topology);
    }
    println!("maximal load after splicing: {}", maximal_load(&ledger, &sg));
    let oracle = minmax_oracle(&sg, &plans, &base, &[(CROSSING_S, CROSSING_T)])?;
    println!("min-max oracle load: {}", oracle.ml);
    Ok(())
}
