mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use minvol::gog::{propagate_bound, BoundDirection, GraphOfGroups, OrientedEdge};

fn ab(g: &GraphOfGroups) -> minvol::snf::Abelianization {
    g.presentation(&g.default_tree()).unwrap().abelianization()
}

#[test]
fn every_single_collapse_preserves_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut collapses = 0;
    for _ in 0..200 {
        let g = random_gog(&mut rng);
        for index in 0..g.edges().len() {
            for reversed in [false, true] {
                let e = OrientedEdge { index, reversed };
                if !g.is_collapsible(e) {
                    continue;
                }
                let c = g.collapse(e).unwrap();
                collapses += 1;
                assert_eq!(ab(&g), ab(&c));
                assert_eq!(g.euler_characteristic(), c.euler_characteristic());
                assert_eq!(g.shape_verdict().status, c.shape_verdict().status);
            }
        }
    }
    assert!(collapses > 50, "only {collapses} collapsible edges sampled");
}

#[test]
fn reduction_terminates_in_a_reduced_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..200 {
        let g = random_gog(&mut rng);
        let r = g.reduce();
        assert!(r.is_reduced());
        assert!(r.edges().len() <= g.edges().len());
        assert_eq!(r.edges().len() + g.vertices().len(), g.edges().len() + r.vertices().len());
    }
}

#[test]
fn presentation_does_not_depend_on_the_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..100 {
        let g = random_gog(&mut rng);
        let base = ab(&g);
        // any spanning tree: try every edge subset of the right size that is a tree
        let n = g.vertices().len();
        let m = g.edges().len();
        for mask in 0u32..1 << m {
            if mask.count_ones() as usize + 1 != n {
                continue;
            }
            let tree: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            if let Ok(p) = g.presentation(&tree) {
                assert_eq!(p.abelianization(), base);
            }
        }
    }
}

#[test]
fn json_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..50 {
        let g = random_gog(&mut rng);
        let text = serde_json::to_string(&g).unwrap();
        let back: GraphOfGroups = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }
}

#[test]
fn torus_hnn_is_vanishing() {
    let g: GraphOfGroups = read_data("torus_hnn.json");
    assert_eq!(g.shape_verdict().status, minvol::verdict::Status::Vanishing);
}

#[test]
fn bounds_scale_by_the_root_of_the_degree() {
    for direction in [BoundDirection::Index, BoundDirection::Monotone] {
        let b = propagate_bound(8, 3, 1.0, direction);
        assert!((b - 0.5).abs() < 1e-12);
        assert_eq!(propagate_bound(1, 2, 0.7, direction), 0.7);
    }
}
