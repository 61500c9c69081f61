use turan_core::hypergraph::{all_k_subsets, Hypergraph};
use turan_core::lifting::{
    build_sunflower, exact_ex, lift_member, lifted_freeness_check, FamilyOracle, FreenessOracle, LiftedFamilySpec,
};

fn p3() -> Hypergraph {
    Hypergraph::path(3)
}

fn graph_from_mask(n: usize, mask: u32) -> Hypergraph {
    let pairs = all_k_subsets(n, 2);
    let edges = pairs.into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e);
    Hypergraph::new(2, n, edges, None).unwrap()
}

#[test]
fn lift_preserves_freeness_on_all_small_graphs() {
    let base = FamilyOracle::new(2, vec![p3()]).unwrap();
    for k in [3usize, 4] {
        let spec = LiftedFamilySpec::new(vec![p3()], k, 2).unwrap();
        for n in 2..=5usize {
            let pairs = n * (n - 1) / 2;
            for mask in 0..1u32 << pairs {
                let g = graph_from_mask(n, mask);
                let lifted = lift_member(&g, k).unwrap();
                assert_eq!(base.is_free(&g), lifted_freeness_check(&lifted, &spec), "k={k} n={n} mask={mask:b}");
            }
        }
    }
}

#[test]
fn an_edge_off_the_apex_is_wrong_form() {
    let spec = LiftedFamilySpec::new(vec![p3()], 3, 2).unwrap();
    // lift of a single edge {0,1} with apex 2, plus an edge avoiding 2
    let g = Hypergraph::new(3, 6, vec![vec![0, 1, 2], vec![3, 4, 5]], None).unwrap();
    assert!(!lifted_freeness_check(&g, &spec));
    let one = Hypergraph::new(3, 6, vec![vec![0, 1, 2]], None).unwrap();
    assert!(lifted_freeness_check(&one, &spec));
}

#[test]
fn extremal_numbers_are_monotone() {
    let mut last = 0;
    for n in 3..=8 {
        let r = exact_ex(n, &[p3()], 2).unwrap();
        assert!(r.ex >= last, "n={n}");
        assert_eq!(r.witness.len(), r.ex);
        last = r.ex;
    }
}

#[test]
fn triangle_free_matches_mantel() {
    for n in 3..=8usize {
        let r = exact_ex(n, &[Hypergraph::triangle()], 2).unwrap();
        assert_eq!(r.ex, n * n / 4, "n={n} mode {}", r.mode);
    }
}

#[test]
fn sunflower_petals_meet_in_kernel() {
    for k in 2..=4usize {
        for t in 0..k {
            let g = build_sunflower(k, t, 14).unwrap();
            let es = g.edges();
            for i in 0..es.len() {
                for j in i + 1..es.len() {
                    let common: Vec<u32> = es[i].iter().copied().filter(|v| es[j].contains(v)).collect();
                    assert_eq!(common, (0..t as u32).collect::<Vec<_>>());
                }
            }
            assert_eq!(es.len(), (14 - t) / (k - t));
        }
    }
}
