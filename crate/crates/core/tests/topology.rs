mod common;

use std::sync::Arc;

use common::{area, biconnected, ids, simple_paths};
use proptest::prelude::*;
use resilient_sdn::fixtures;
use resilient_sdn::geometry::segments_cross;
use resilient_sdn::topology::{emit_topology, generate_random_planar, load_topology, shortest_path, LinkId, NetworkGraph};

fn check_invariants(g: &NetworkGraph) {
    assert!(g.is_connected());
    for (i, l) in g.links().iter().enumerate() {
        assert!(l.u < l.v);
        assert!(l.weight > 0.0);
        for j in i + 1..g.link_count() {
            let o = g.link(LinkId(j));
            assert!((l.u, l.v) != (o.u, o.v), "parallel links");
            let shared = [l.u, l.v].iter().any(|x| *x == o.u || *x == o.v);
            if !shared {
                assert!(!segments_cross(&g.segment(LinkId(i)), &g.segment(LinkId(j))), "links {i} and {j} cross");
            }
        }
    }
    for u in 0..g.node_count() {
        assert!(g.area().contains(g.position(u)));
    }
}

#[test]
fn generator_satisfies_invariants_over_many_seeds() {
    for seed in 0..100 {
        let g = generate_random_planar(50, 120, area(), seed).unwrap();
        assert_eq!((g.node_count(), g.link_count()), (50, 120));
        check_invariants(&g);
    }
}

#[test]
fn generator_sizes() {
    let g = generate_random_planar(50, 120, area(), 7).unwrap();
    check_invariants(&g);
    assert_eq!(g.link_count(), 120);
    let g = generate_random_planar(100, 211, area(), 7).unwrap();
    check_invariants(&g);
    assert_eq!((g.node_count(), g.link_count()), (100, 211));
    let g = generate_random_planar(2, 1, area(), 7).unwrap();
    assert_eq!((g.node_count(), g.link_count()), (2, 1));
}

#[test]
fn bundled_random50() {
    let g = fixtures::random50();
    assert_eq!((g.node_count(), g.link_count()), (50, 120));
    check_invariants(&g);
}

#[test]
fn text_round_trip() {
    for g in [fixtures::eight_node(), fixtures::random50(), fixtures::crossing_paths()] {
        let again = load_topology(emit_topology(&g).as_bytes()).unwrap();
        assert_eq!(again, g);
    }
}

#[test]
fn worked_example_primary() {
    let g = fixtures::eight_node();
    assert_eq!(shortest_path(&g, None, ids(&[1])[0], ids(&[3])[0]).unwrap().unwrap(), ids(&[1, 2, 3]));
    assert_eq!(shortest_path(&g, None, ids(&[3])[0], ids(&[3])[0]).unwrap().unwrap(), ids(&[3]));
}

#[test]
fn shortest_path_matches_enumeration_on_small_graphs() {
    for seed in 0..30 {
        let g = biconnected(8, 12, seed * 31);
        for s in 0..g.node_count() {
            for t in 0..g.node_count() {
                if s == t {
                    continue;
                }
                let weight = |p: &[usize]| p.windows(2).map(|w| g.link(g.link_between(w[0], w[1]).unwrap()).weight).sum::<f64>();
                let best = simple_paths(&g, s, t).iter().map(|p| weight(p)).fold(f64::INFINITY, f64::min);
                let found = shortest_path(&g, None, g.id(s), g.id(t)).unwrap().unwrap();
                let w = g.path_weight(&found).unwrap();
                assert!((w - best).abs() <= 1e-9 * best.max(1.0), "seed {seed} {s}->{t}: {w} vs {best}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn shortest_path_symmetric(seed in 0u64..10_000, s in 0usize..20, t in 0usize..20) {
        let g = Arc::new(generate_random_planar(20, 40, area(), seed).unwrap());
        let (a, b) = (g.id(s), g.id(t));
        let ab = g.path_weight(&shortest_path(&g, None, a, b).unwrap().unwrap()).unwrap();
        let ba = g.path_weight(&shortest_path(&g, None, b, a).unwrap().unwrap()).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-9 * ab.max(1.0));
    }
}
