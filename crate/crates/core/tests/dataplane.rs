mod common;

use std::sync::Arc;

use common::{biconnected, ids};
use resilient_sdn::dataplane::{install_routes, simulate_flow, Action, Classification, DataPlane};
use resilient_sdn::failure::{apply_failure, RegionalFailure, SurvivingGraph};
use resilient_sdn::fixtures;
use resilient_sdn::mrc::{generate_backup_topologies, select_backup_topology, BackupTopologySet};
use resilient_sdn::routes::{all_pairs, ordered_pairs, plan_demands, radius_schedule, RoutePlanTable};
use resilient_sdn::topology::{LinkId, NetworkGraph, NodeId};
use resilient_sdn::Point;

fn build(g: &Arc<NetworkGraph>, k: usize, geographic: bool) -> (BackupTopologySet, RoutePlanTable, DataPlane) {
    let bts = generate_backup_topologies(g.clone(), k).unwrap();
    let schedule = radius_schedule(50.0, 150.0, k).unwrap();
    let plans = plan_demands(&bts, geographic.then_some(&schedule), &ordered_pairs(g)).unwrap();
    let dp = install_routes(&plans, &bts).unwrap();
    (bts, plans, dp)
}

#[test]
fn tables_hold_exactly_the_planned_hops() {
    let g = biconnected(15, 33, 5);
    let (bts, plans, dp) = build(&g, 4, true);
    for sw in dp.switches() {
        let node = sw.node();
        let mut primary = 0;
        for plan in plans.iter() {
            let flow = (plan.source, plan.dest);
            let expected = plan.primary.windows(2).find(|w| w[0] == node).map(|w| w[1]);
            assert_eq!(sw.next_hop(0, flow), expected);
            primary += usize::from(expected.is_some());
            for i in 1..=bts.k() {
                let on_backup = plan.backup(i).and_then(|b| b.windows(2).find(|w| w[0] == node).map(|w| w[1]));
                let expected = on_backup.or_else(|| plan.detours[i - 1].get(&node).copied());
                assert_eq!(sw.next_hop(i, flow), expected);
            }
            match sw.clean_group(flow) {
                None => assert!(expected_none(plan, node)),
                Some(buckets) => {
                    let next = plan.primary.windows(2).find(|w| w[0] == node).unwrap()[1];
                    assert_eq!(buckets[0].action, Action::Forward(next));
                    if let Some(b) = buckets.get(1) {
                        let tag = select_backup_topology(&bts, node, next, plan.dest).unwrap();
                        assert_eq!(b.action, Action::TagAndForward { tag, next: sw.next_hop(tag, flow).unwrap() });
                    }
                    assert!(buckets.len() <= 2);
                }
            }
        }
        assert_eq!(sw.table_len(0), primary);
    }
}

fn expected_none(plan: &resilient_sdn::routes::RoutePlan, node: NodeId) -> bool {
    !plan.primary[..plan.primary.len() - 1].contains(&node)
}

/// Checks the walk against the tables: primary hops until one tag, then `T_tag` only.
fn check_walk(dp: &DataPlane, sg: &SurvivingGraph, s: NodeId, t: NodeId) -> Classification {
    let out = simulate_flow(dp, sg, s, t);
    let flow = (s, t);
    let g = dp.base();
    let mut tag = None;
    for w in out.path.windows(2) {
        let sw = dp.switch(w[0]).unwrap();
        let hi = (g.idx(w[0]).unwrap(), g.idx(w[1]).unwrap());
        assert!(sg.hop_alive(hi.0, hi.1), "walk crosses a dead element");
        match tag {
            None if sw.next_hop(0, flow) == Some(w[1]) => {}
            None => match sw.clean_group(flow).unwrap()[1].action {
                Action::TagAndForward { tag: i, next } => {
                    assert_eq!(next, w[1]);
                    tag = Some(i);
                }
                a => panic!("unexpected action {a:?}"),
            },
            Some(i) => assert_eq!(sw.next_hop(i, flow), Some(w[1]), "tagged packet left T_{i}"),
        }
    }
    match out.classification {
        Classification::DeliveredPrimary => assert_eq!(tag, None),
        Classification::DeliveredLocal(i) => assert_eq!(tag, Some(i)),
        Classification::Escalated { .. } => {}
        c => assert!(c == Classification::NonRecoverable && out.path.is_empty()),
    }
    if out.classification.is_delivered() {
        assert_eq!(out.path.last(), Some(&t));
    }
    out.classification
}

#[test]
fn single_failures_never_escalate() {
    for seed in 0..20u64 {
        let g = biconnected(20, 45, seed * 31 + 1);
        for geographic in [false, true] {
            let (_, plans, dp) = build(&g, 4, geographic);
            for v in 0..g.node_count() {
                let sg = SurvivingGraph::from_destroyed(g.clone(), &[v], &[]);
                for plan in plans.iter() {
                    if plan.source == g.id(v) || plan.dest == g.id(v) {
                        continue;
                    }
                    let c = check_walk(&dp, &sg, plan.source, plan.dest);
                    assert!(c.is_delivered(), "seed {seed} node {v} flow {}->{}: {c}", plan.source, plan.dest);
                }
            }
            for e in 0..g.link_count() {
                let sg = SurvivingGraph::from_destroyed(g.clone(), &[], &[LinkId(e)]);
                for plan in plans.iter() {
                    let c = check_walk(&dp, &sg, plan.source, plan.dest);
                    assert!(c.is_delivered(), "seed {seed} link {e} flow {}->{}: {c}", plan.source, plan.dest);
                }
            }
        }
    }
}

#[test]
fn regional_walks_follow_the_tables() {
    let g = Arc::new(fixtures::random50());
    let (_, plans, dp) = build(&g, 6, true);
    for (i, (x, y, r)) in [(600.0, 600.0, 150.0), (200.0, 900.0, 100.0), (1000.0, 300.0, 60.0)].into_iter().enumerate() {
        let sg = apply_failure(&g, &RegionalFailure::new(Point::new(x, y), r).unwrap());
        let first: Vec<_> = plans.iter().map(|p| check_walk(&dp, &sg, p.source, p.dest)).collect();
        let again: Vec<_> = plans.iter().map(|p| simulate_flow(&dp, &sg, p.source, p.dest).classification).collect();
        assert_eq!(first, again, "failure {i} not deterministic");
    }
}

#[test]
fn intact_network_delivers_on_primaries() {
    let g = Arc::new(fixtures::eight_node());
    let bts = fixtures::eight_node_backups(g.clone());
    let plans = plan_demands(&bts, None, &all_pairs(&g)).unwrap();
    let dp = install_routes(&plans, &bts).unwrap();
    let sg = SurvivingGraph::intact(g.clone());
    for plan in plans.iter() {
        let out = simulate_flow(&dp, &sg, plan.source, plan.dest);
        assert_eq!(out.classification, Classification::DeliveredPrimary);
        assert_eq!(out.path, plan.primary);
    }
    let out = simulate_flow(&dp, &SurvivingGraph::from_destroyed(g.clone(), &[g.idx(NodeId(2)).unwrap()], &[]), NodeId(1), NodeId(3));
    assert_eq!(out.path, ids(&[1, 4, 7, 8, 3]));
}
