mod common;

use std::sync::Arc;

use common::{area, ids};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resilient_sdn::failure::{
    apply_failure, recoverable_pairs, sample_failure, RadiusDistribution, RegionalFailure, SurvivingGraph,
};
use resilient_sdn::fixtures;
use resilient_sdn::geometry::{zone_contains, Point, VulnerableZone};
use resilient_sdn::routes::all_pairs;
use resilient_sdn::topology::{generate_random_planar, LinkId, NetworkGraph};

#[test]
fn uniform_radius_mean() {
    let d = RadiusDistribution::new(50.0, 150.0, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    let mean = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
    let sigma = (100.0f64.powi(2) / 12.0).sqrt() / (n as f64).sqrt();
    assert!((mean - 100.0).abs() < 3.0 * sigma, "mean {mean}");
}

#[test]
fn power_law_matches_analytic_cdf() {
    let (lo, hi, alpha) = (50.0f64, 150.0f64, 2.0f64);
    let d = RadiusDistribution::new(lo, hi, alpha).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 100_000;
    let mut xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    // density proportional to r^-alpha on [lo, hi]
    let cdf = |r: f64| (lo.powf(1.0 - alpha) - r.powf(1.0 - alpha)) / (lo.powf(1.0 - alpha) - hi.powf(1.0 - alpha));
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    let critical = 1.63 / (n as f64).sqrt();
    assert!(ks < critical, "KS statistic {ks} exceeds {critical}");
}

fn brute_force_destroyed(g: &NetworkGraph, f: &RegionalFailure) -> Vec<LinkId> {
    (0..g.link_count())
        .map(LinkId)
        .filter(|&l| zone_contains(&VulnerableZone::of_link(g.segment(l), f.radius()).unwrap(), f.center()))
        .collect()
}

#[test]
fn destroyed_links_match_zone_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..20 {
        let g = Arc::new(generate_random_planar(30, 60, area(), seed).unwrap());
        let dist = RadiusDistribution::new(5.0, 200.0, 1.0).unwrap();
        for _ in 0..50 {
            let f = sample_failure(&dist, area(), &mut rng);
            assert_eq!(apply_failure(&g, &f).destroyed_links(), brute_force_destroyed(&g, &f));
        }
    }
}

#[test]
fn growing_radius_never_shrinks_damage() {
    let g = Arc::new(fixtures::random50());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let c = Point::new(rng.gen_range(0.0..1200.0), rng.gen_range(0.0..1200.0));
        let r = rng.gen_range(1.0..150.0);
        let small = apply_failure(&g, &RegionalFailure::new(c, r).unwrap());
        let big = apply_failure(&g, &RegionalFailure::new(c, r + rng.gen_range(0.0..50.0)).unwrap());
        assert!(small.destroyed_links().iter().all(|l| big.destroyed_links().contains(l)));
        assert!(small.destroyed_nodes().iter().all(|n| big.destroyed_nodes().contains(n)));
    }
}

fn flood_connected(sg: &SurvivingGraph, a: usize, b: usize) -> bool {
    let g = sg.graph();
    if !sg.node_alive(a) || !sg.node_alive(b) {
        return false;
    }
    let mut seen = vec![false; g.node_count()];
    let mut queue = std::collections::VecDeque::from([a]);
    seen[a] = true;
    while let Some(u) = queue.pop_front() {
        for &(v, l) in g.neighbors(u) {
            if !seen[v] && sg.node_alive(v) && sg.link_alive(l) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen[b]
}

#[test]
fn recoverable_pairs_match_flood_fill() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let dist = RadiusDistribution::new(50.0, 250.0, 0.0).unwrap();
    for seed in 0..100 {
        let g = Arc::new(generate_random_planar(25, 45, area(), seed).unwrap());
        let sg = apply_failure(&g, &sample_failure(&dist, area(), &mut rng));
        let demands = all_pairs(&g);
        let expected: Vec<_> = demands
            .iter()
            .copied()
            .filter(|&(s, t)| flood_connected(&sg, g.idx(s).unwrap(), g.idx(t).unwrap()))
            .collect();
        assert_eq!(recoverable_pairs(&sg, &demands), expected);
        let flipped: Vec<_> = demands.iter().map(|&(s, t)| (t, s)).collect();
        let mut back: Vec<_> = recoverable_pairs(&sg, &flipped).into_iter().map(|(t, s)| (s, t)).collect();
        back.sort();
        assert_eq!(back, expected);
    }
}

#[test]
fn worked_example_disk() {
    let g = Arc::new(fixtures::eight_node());
    let sg = apply_failure(&g, &fixtures::eight_node_disk());
    assert_eq!(sg.destroyed_nodes(), ids(&[5, 8]));
    let demands = all_pairs(&g);
    assert_eq!(recoverable_pairs(&SurvivingGraph::intact(g.clone()), &demands).len(), 28);
    assert!(recoverable_pairs(&sg, &demands).iter().all(|&(s, t)| ![s, t].contains(&ids(&[5])[0])));
}
