use g2rm_core::cmorder::{KSplitting, LatticePosition};
use g2rm_core::dfs::{endomorphism_ring_local, DfsConfig, IsogenyOracle, WithoutImages};
use g2rm_core::graphmodel::{build_graph, Direction, GraphSpec, LazyGraph, Tag};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ALL: [KSplitting; 3] = [KSplitting::Split, KSplitting::Ramified, KSplitting::Inert];

fn rims(s: [KSplitting; 2]) -> [u32; 2] {
    s.map(|x| match x {
        KSplitting::Split => 3,
        KSplitting::Ramified => 2,
        KSplitting::Inert => 1,
    })
}

fn check_all_vertices(spec: &GraphSpec) {
    let g = build_graph(spec).unwrap();
    let cfg = DfsConfig::default();
    for v in g.vertices() {
        let r = endomorphism_ring_local(&g, v.id, spec.depth, &cfg)
            .unwrap_or_else(|e| panic!("{spec:?} at {v:?}: {e}"));
        assert_eq!(r.position(), v.position, "{spec:?}");
    }
}

#[test]
fn soundness_with_torsion_caps() {
    for ell in [3, 5] {
        for s1 in ALL {
            for s2 in ALL {
                let spec = GraphSpec::new(ell, LatticePosition::new(3, 2), [s1, s2])
                    .with_rim(rims([s1, s2]))
                    .with_torsion_cap([Some(1), Some(1)])
                    .with_seed(ell);
                check_all_vertices(&spec);
            }
        }
    }
}

#[test]
fn soundness_when_ell_divides_the_working_degree() {
    for (delta, cap) in [([1, 2], [None, None]), ([1, 1], [Some(1), Some(1)]), ([2, 0], [Some(2), Some(1)])] {
        for s1 in ALL {
            let spec = GraphSpec::new(3, LatticePosition::new(3, 2), [s1, KSplitting::Split])
                .with_delta(delta, 6)
                .with_torsion_cap(cap)
                .with_seed(17);
            check_all_vertices(&spec);
        }
    }
}

#[test]
fn soundness_through_dual_enumeration() {
    let spec = GraphSpec::new(3, LatticePosition::new(4, 2), [KSplitting::Split, KSplitting::Ramified])
        .with_rim([1, 1])
        .with_torsion_cap([Some(1), Some(1)]);
    let g = build_graph(&spec).unwrap();
    let o = WithoutImages(&g);
    for v in g.vertices() {
        let r = endomorphism_ring_local(&o, v.id, spec.depth, &DfsConfig::default()).unwrap();
        assert_eq!(r.position(), v.position);
    }
}

#[test]
fn lazy_deep_graph() {
    let spec = GraphSpec::new(3, LatticePosition::new(10, 3), [KSplitting::Split, KSplitting::Split])
        .with_torsion_cap([Some(2), Some(1)])
        .with_delta([0, 0], 2);
    let g = LazyGraph::new(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2013);
    for _ in 0..50 {
        let v = g.random_vertex(&mut rng);
        let r = endomorphism_ring_local(&g, v, spec.depth, &DfsConfig::default()).unwrap();
        assert_eq!(r.position(), g.vertex(v).unwrap().position);
    }
    let r = endomorphism_ring_local(&g, g.rim_vertex(), spec.depth, &DfsConfig::default()).unwrap();
    assert_eq!((r.l1.distance_step1, r.l1.nu), (7, 10));
}

#[test]
fn out_edges_nonempty_exactly_off_the_floor_or_on_the_rim() {
    for s in ALL {
        let g = build_graph(&GraphSpec::new(5, LatticePosition::new(2, 0), [s, KSplitting::Ramified])).unwrap();
        for v in g.vertices() {
            let es = g.out_edges(v.id, Tag::L1).unwrap();
            let full = es.len() == 6;
            assert_eq!(full, v.n[0] >= 1);
            assert_eq!(g.rational_kernels(v.id, Tag::L1).unwrap().len(), es.len());
            if !full {
                let expect = if v.position.nu1 == 0 { 0 } else { 1 };
                assert_eq!(es.iter().filter(|e| e.direction == Direction::Ascending).count(), expect);
            }
        }
    }
}
