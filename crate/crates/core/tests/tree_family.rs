use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use turan_core::hypergraph::RootedGraph;
use turan_core::tree::{
    build_tree, check_balanced, enumerate_power, enumerate_power_with, epsilon, Hypertree, PowerLimits, TreeParams,
};

fn grid() -> Vec<TreeParams> {
    let mut out = Vec::new();
    for k in 2..=4usize {
        for a in k - 1..=k + 2 {
            for b in a + 1..=a + 4 {
                out.push(TreeParams::new(k, a, b).unwrap());
            }
        }
    }
    out
}

#[test]
fn shape_and_partition_over_grid() {
    for p in grid() {
        let t = build_tree(p).unwrap();
        let g = t.graph();
        assert_eq!(g.n_edges(), p.b, "{p:?}");
        assert_eq!(g.n_vertices(), p.b + p.k - 1, "{p:?}");
        assert_eq!(t.roots().len(), p.b - p.a + p.k - 1);
        assert_eq!(t.whites().len(), p.a);
        let part = g.partition().expect("tree is k-partite");
        for e in g.edges() {
            let mut parts: Vec<usize> = e.iter().map(|&v| part[v as usize]).collect();
            parts.sort();
            assert_eq!(parts, (0..p.k).collect::<Vec<_>>(), "{p:?} edge {e:?}");
        }
        // the stored order replays as a valid hypertree build
        Hypertree::new(g.clone(), t.build_order().to_vec()).unwrap();
    }
}

#[test]
fn balanced_over_grid() {
    for p in grid() {
        let t = build_tree(p).unwrap();
        let r = check_balanced(t.rooted(), 20).unwrap();
        assert!(r.balanced, "{p:?} worst {:?}", r.worst);
        assert_eq!(r.total_epsilon, p.b);
        assert_eq!(r.non_roots, p.a);
    }
}

#[test]
fn sidecar_round_trips() {
    let t = build_tree(TreeParams::new(3, 3, 5).unwrap()).unwrap();
    let s = serde_json::to_string(&t.sidecar()).unwrap();
    let back: turan_core::tree::TreeSidecar = serde_json::from_str(&s).unwrap();
    assert_eq!(back, t.sidecar());
}

fn forms(ms: &[turan_core::tree::PowerMember]) -> Vec<(String, usize)> {
    let mut f: Vec<_> = ms.iter().map(|m| (format!("{:?}", m.canonical), m.min_s)).collect();
    f.sort();
    f
}

#[test]
fn power_tags_are_monotone() {
    let t = build_tree(TreeParams::new(2, 2, 3).unwrap()).unwrap();
    let s2 = enumerate_power(&t, 2, true).unwrap();
    let s3 = enumerate_power(&t, 3, true).unwrap();
    // everything reachable with two copies is reachable with three
    let f3 = forms(&s3);
    for f in forms(&s2) {
        assert!(f3.contains(&f), "{f:?}");
    }
    assert!(s3.iter().any(|m| m.min_s == 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn copy_order_does_not_matter(seed in any::<u64>(), s in 2usize..=3) {
        let t = build_tree(TreeParams::new(2, 1, 2).unwrap()).unwrap();
        let mut order: Vec<usize> = (0..s).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let base = enumerate_power(&t, s, true).unwrap();
        let shuffled = enumerate_power_with(&t, s, true, PowerLimits::default(), &order).unwrap();
        prop_assert_eq!(forms(&base), forms(&shuffled));
    }

    #[test]
    fn epsilon_is_relabeling_invariant(seed in any::<u64>(), mask in 1u32..32) {
        let t = build_tree(TreeParams::new(3, 3, 5).unwrap()).unwrap();
        let n = t.graph().n_vertices();
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let g = t.graph().relabel(&perm, n).unwrap();
        let roots: Vec<u32> = t.roots().iter().map(|&r| perm[r as usize]).collect();
        let moved = RootedGraph::new(g, roots).unwrap();
        let whites = t.whites();
        let s: Vec<u32> = (0..whites.len()).filter(|i| mask >> i & 1 == 1).map(|i| whites[i]).collect();
        let s2: Vec<u32> = s.iter().map(|&v| perm[v as usize]).collect();
        prop_assert_eq!(epsilon(t.rooted(), &s).unwrap(), epsilon(&moved, &s2).unwrap());
    }
}
