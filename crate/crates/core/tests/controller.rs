mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::{area, biconnected, ids};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resilient_sdn::controller::{
    maximal_load, minmax_oracle, shortest_splice, splice, splice_all, splice_weight, LoadLedger, SplicePolicy,
    TempSpliceGraph,
};
use resilient_sdn::dataplane::{install_routes, simulate_flow, simulate_flow_with, Classification, SpliceOverlay};
use resilient_sdn::failure::{apply_failure, RegionalFailure, SurvivingGraph};
use resilient_sdn::mrc::generate_backup_topologies;
use resilient_sdn::routes::{all_pairs, plan_demands, radius_schedule, RoutePlan, RoutePlanTable};
use resilient_sdn::topology::{NetworkGraph, NodeId};
use resilient_sdn::{OracleError, Point, SpliceError};

struct Scenario {
    sg: SurvivingGraph,
    plans: RoutePlanTable,
    /// Primary loads plus the data-plane reroutes.
    base: LoadLedger,
    requests: Vec<(NodeId, NodeId)>,
    dp: resilient_sdn::dataplane::DataPlane,
}

fn scenario(n: usize, m: usize, seed: u64) -> Scenario {
    let g = biconnected(n, m, seed);
    let bts = generate_backup_topologies(g.clone(), 3).unwrap();
    let schedule = radius_schedule(50.0, 150.0, 3).unwrap();
    let plans = plan_demands(&bts, Some(&schedule), &all_pairs(&g)).unwrap();
    let dp = install_routes(&plans, &bts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = RegionalFailure::new(
        Point::new(rng.gen_range(0.0..area().width), rng.gen_range(0.0..area().height)),
        rng.gen_range(80.0..250.0),
    )
    .unwrap();
    let sg = apply_failure(&g, &f);
    let mut base = LoadLedger::from_primaries(&sg, &plans);
    let mut requests = Vec::new();
    for plan in plans.iter() {
        let o = simulate_flow(&dp, &sg, plan.source, plan.dest);
        match o.classification {
            Classification::DeliveredLocal(_) => base.add_rerouted(&sg, &o.path),
            Classification::Escalated { .. } => requests.push((plan.source, plan.dest)),
            _ => {}
        }
    }
    Scenario { sg, plans, base, requests, dp }
}

/// Minimum total splice weight over labelled simple paths, by enumeration.
fn brute_min_weight(temp: &TempSpliceGraph, ledger: &LoadLedger, s: usize, t: usize) -> Option<f64> {
    fn walk(temp: &TempSpliceGraph, ledger: &LoadLedger, t: usize, path: &mut Vec<usize>, w: f64, best: &mut Option<f64>) {
        let u = *path.last().unwrap();
        if u == t {
            *best = Some(best.map_or(w, |b: f64| b.min(w)));
            return;
        }
        let heads: BTreeSet<usize> = temp.out_edges(u).iter().map(|&(v, _)| v).collect();
        for v in heads {
            if !path.contains(&v) {
                path.push(v);
                walk(temp, ledger, t, path, w + splice_weight(ledger, u, v), best);
                path.pop();
            }
        }
    }
    let mut best = None;
    walk(temp, ledger, t, &mut vec![s], 0.0, &mut best);
    best
}

fn check_splice_rules(sc: &Scenario, flow: (NodeId, NodeId), sp: &resilient_sdn::controller::Splice) {
    let g = sc.sg.graph();
    let plan = sc.plans.get(flow.0, flow.1).unwrap();
    assert_eq!((sp.path[0], *sp.path.last().unwrap()), flow);
    assert_eq!(sp.labels.len(), sp.path.len() - 1);
    for (j, w) in sp.path.windows(2).enumerate() {
        let (u, v) = (g.idx(w[0]).unwrap(), g.idx(w[1]).unwrap());
        assert!(sc.sg.node_alive(u) && sc.sg.hop_alive(u, v));
        let route = plan.backup(sp.labels[j]).unwrap();
        assert!(route.windows(2).any(|x| x == w), "hop {}->{} not on backup {}", w[0], w[1], sp.labels[j]);
    }
    let changes: Vec<(NodeId, usize)> = (0..sp.labels.len())
        .filter(|&j| j == 0 || sp.labels[j] != sp.labels[j - 1])
        .map(|j| (sp.path[j], sp.labels[j]))
        .collect();
    let got: Vec<(NodeId, usize)> = sp.actions.iter().map(|a| (a.at, a.topology)).collect();
    assert_eq!(got, changes);
    let mut overlay = SpliceOverlay::new();
    overlay.install(&sp.actions);
    let out = simulate_flow_with(&sc.dp, &sc.sg, Some(&overlay), flow.0, flow.1);
    assert_eq!(out.classification, Classification::DeliveredSpliced);
    assert_eq!(out.path, sp.path);
}

#[test]
fn splices_are_minimal_and_deliver() {
    let mut checked = 0;
    for seed in 0..300u64 {
        let n = 8 + (seed % 5) as usize;
        let sc = scenario(n, 2 * n, seed);
        let g = sc.sg.graph().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000);
        let rerouted: Vec<u32> = (0..g.node_count()).map(|_| rng.gen_range(0..5)).collect();
        let primary: Vec<u32> = (0..g.node_count()).map(|u| sc.base.primary(u)).collect();
        for &(s, t) in &sc.requests {
            let mut ledger = LoadLedger::with_counts(primary.clone(), rerouted.clone());
            let plan = sc.plans.get(s, t).unwrap();
            let temp = TempSpliceGraph::build(&sc.sg, plan);
            let (si, ti) = (g.idx(s).unwrap(), g.idx(t).unwrap());
            let expected = brute_min_weight(&temp, &ledger, si, ti);
            match splice(&sc.sg, &sc.plans, &mut ledger, s, t) {
                Ok(sp) => {
                    let best = expected.expect("splice found where enumeration found none");
                    assert!((sp.weight - best).abs() < 1e-9, "weight {} vs {best}", sp.weight);
                    check_splice_rules(&sc, (s, t), &sp);
                    let nodes: BTreeSet<usize> = sp.path.iter().map(|&n| g.idx(n).unwrap()).collect();
                    for (u, &before) in rerouted.iter().enumerate() {
                        assert_eq!(ledger.rerouted(u), before + u32::from(nodes.contains(&u)));
                    }
                    checked += 1;
                }
                Err(SpliceError::NoSplicePath) => assert_eq!(expected, None),
                Err(SpliceError::Disconnected) => assert!(!sc.sg.connected(si, ti)),
            }
        }
    }
    assert!(checked > 20, "only {checked} splices exercised");
}

#[test]
fn ledger_counts_distinct_nodes_of_spliced_paths() {
    for seed in 0..30u64 {
        let sc = scenario(14, 33, seed);
        let mut ledger = sc.base.clone();
        let before: u32 = (0..sc.sg.graph().node_count()).map(|u| ledger.rerouted(u)).sum();
        let records = splice_all(&sc.sg, &sc.plans, &mut ledger, &sc.requests, SplicePolicy::LoadAware);
        let after: u32 = (0..sc.sg.graph().node_count()).map(|u| ledger.rerouted(u)).sum();
        let expected: usize = records
            .iter()
            .filter_map(|r| r.result.as_ref().ok())
            .map(|sp| sp.path.iter().collect::<BTreeSet<_>>().len())
            .sum();
        assert_eq!((after - before) as usize, expected);
        assert_eq!(records.last().map_or(maximal_load(&sc.base, &sc.sg), |r| r.ml_after), maximal_load(&ledger, &sc.sg));
        for r in &records {
            if let Ok(sp) = &r.result {
                check_splice_rules(&sc, r.flow, sp);
            }
        }
        for r in records.iter().filter(|r| r.result.is_ok()) {
            let sp = shortest_splice(&sc.sg, &sc.plans, r.flow.0, r.flow.1).unwrap();
            check_splice_rules(&sc, r.flow, &sp);
        }
    }
}

#[test]
fn oracle_never_exceeds_greedy() {
    let mut compared = 0;
    for seed in 0..250u64 {
        let n = 10 + (seed % 5) as usize;
        let sc = scenario(n, n * 12 / 5, seed * 13 + 7);
        if sc.requests.is_empty() {
            continue;
        }
        let oracle = match minmax_oracle(&sc.sg, &sc.plans, &sc.base, &sc.requests) {
            Ok(o) => o,
            Err(OracleError::TooLarge(_)) => continue,
        };
        let mut ledger = sc.base.clone();
        let records = splice_all(&sc.sg, &sc.plans, &mut ledger, &sc.requests, SplicePolicy::LoadAware);
        assert!(oracle.ml <= maximal_load(&ledger, &sc.sg), "seed {seed}");
        assert!(oracle.ml >= maximal_load(&sc.base, &sc.sg));
        // same requests are spliceable
        let served = |ok: bool| ok as usize;
        assert_eq!(
            oracle.assignment.iter().map(|a| served(a.is_some())).sum::<usize>(),
            records.iter().map(|r| served(r.result.is_ok())).sum::<usize>()
        );
        // the assignment realizes the reported load
        let mut check = sc.base.clone();
        for p in oracle.assignment.iter().flatten() {
            check.add_rerouted(&sc.sg, p);
        }
        assert_eq!(maximal_load(&check, &sc.sg), oracle.ml);
        compared += 1;
    }
    assert!(compared >= 50, "only {compared} scenarios compared");
}

/// Requests (1,2) and (3,4) lose their direct links. Greedy routes (1,2) over the
/// two-hop path through 5, forcing (3,4) to pile onto 5 as well.
fn bottleneck() -> (SurvivingGraph, RoutePlanTable) {
    let pos = [(1, 100.0, 100.0), (2, 500.0, 100.0), (3, 100.0, 500.0), (4, 500.0, 500.0), (5, 300.0, 300.0), (6, 200.0, 20.0), (7, 400.0, 20.0)];
    let links = [(1, 5), (5, 2), (1, 6), (6, 7), (7, 2), (3, 5), (5, 4), (1, 2), (3, 4)];
    let g = Arc::new(
        NetworkGraph::new(
            area(),
            pos.iter().map(|&(i, x, y)| (NodeId(i), Point::new(x, y))).collect(),
            links.iter().map(|&(a, b)| (NodeId(a), NodeId(b), Some(1.0))).collect(),
        )
        .unwrap(),
    );
    let mut plans = RoutePlanTable::new();
    plans.insert(RoutePlan::from_routes(ids(&[1, 2]), vec![Some(ids(&[1, 5, 2])), Some(ids(&[1, 6, 7, 2]))]));
    plans.insert(RoutePlan::from_routes(ids(&[3, 4]), vec![Some(ids(&[3, 5, 4])), None]));
    let dead = [g.link_by_ids(NodeId(1), NodeId(2)).unwrap(), g.link_by_ids(NodeId(3), NodeId(4)).unwrap()];
    let sg = SurvivingGraph::from_destroyed(g.clone(), &[], &dead);
    (sg, plans)
}

#[test]
fn oracle_beats_greedy_on_a_shared_bottleneck() {
    let (sg, plans) = bottleneck();
    let requests = [(NodeId(1), NodeId(2)), (NodeId(3), NodeId(4))];
    let base = LoadLedger::from_primaries(&sg, &plans);
    assert_eq!(maximal_load(&base, &sg), 0);
    let mut ledger = base.clone();
    let records = splice_all(&sg, &plans, &mut ledger, &requests, SplicePolicy::LoadAware);
    assert_eq!(records[0].result.as_ref().unwrap().path, ids(&[1, 5, 2]));
    assert_eq!(records[1].result.as_ref().unwrap().path, ids(&[3, 5, 4]));
    assert_eq!(maximal_load(&ledger, &sg), 2);
    let oracle = minmax_oracle(&sg, &plans, &base, &requests).unwrap();
    assert_eq!(oracle.ml, 1);
    assert_eq!(oracle.assignment[0].as_deref(), Some(ids(&[1, 6, 7, 2]).as_slice()));
}
