use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use turan_core::entropy::{
    build_mu, find_power_copy, noninjective_mass, sidorenko_check, verify_property1, verify_property2, HostProfile,
};
use turan_core::harness::{entropy_patterns, random_hosts};
use turan_core::hypergraph::{count_homs, enumerate_homs, Hypergraph};
use turan_core::tree::{minimal_power_tag, build_tree, TreeParams};

#[test]
fn distribution_over_random_hosts() {
    for k in [2usize, 3] {
        let hosts = random_hosts(k, 40, 10, 17).unwrap();
        for (name, h) in entropy_patterns(k).unwrap() {
            for x in &hosts {
                let host = HostProfile::new(x).unwrap();
                let t = build_mu(&h, &host).unwrap();
                assert_eq!(t.total(), BigRational::one(), "{name}");
                let mut support: Vec<Vec<u32>> = t.images().iter().map(|i| i.to_vec()).collect();
                let mut homs: Vec<Vec<u32>> = enumerate_homs(h.graph(), x, &[]).into_iter().map(|m| m.image).collect();
                support.sort();
                homs.sort();
                assert_eq!(support, homs, "{name}");
                // no distribution beats the uniform one on its support
                assert!(t.shannon() <= (t.len() as f64).ln() + 1e-9, "{name}");
                assert!(verify_property1(&t, &host).holds, "{name}");
                assert!(verify_property2(&t, &host).holds, "{name}");
                assert!(sidorenko_check(h.graph(), &host).exact_holds, "{name}");
                let inj = noninjective_mass(&t, &host);
                assert!(inj.holds, "{name}");
                if inj.injective_applicable {
                    assert!(inj.injective_holds, "{name}: {inj:?}");
                }
            }
        }
    }
}

#[test]
fn hom_count_on_complete_graph() {
    // every map of a tree into K_n that respects edges: n (n-1)^e
    let x = Hypergraph::new(2, 6, (0..6u32).flat_map(|i| (i + 1..6).map(move |j| vec![i, j])), None).unwrap();
    let t = build_tree(TreeParams::new(2, 2, 3).unwrap()).unwrap();
    assert_eq!(count_homs(t.graph(), &x, &[]), 6 * 5u64.pow(3));
    let r = sidorenko_check(t.graph(), &HostProfile::new(&x).unwrap());
    assert!(r.holds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn power_witness_lives_in_host(seed in any::<u64>(), p in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Hypergraph::random(2, 9, 28, &mut rng).unwrap();
        let params = TreeParams::new(2, 1, 2).unwrap();
        if let Some(w) = find_power_copy(&x, params, p).unwrap() {
            prop_assert_eq!(w.tag, p);
            for e in w.member.graph.edges() {
                let img: Vec<u32> = e.iter().map(|&v| w.host_vertices[v as usize]).collect();
                prop_assert!(x.has_edge(&img));
            }
            let t = build_tree(params).unwrap();
            prop_assert_eq!(minimal_power_tag(&w.member, &t), Some(p));
        }
    }
}
