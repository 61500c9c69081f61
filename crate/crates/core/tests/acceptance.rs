//! Acceptance battery. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use turan_core::algebraic::{lemma6_expectation, nonempty_rate, AlgebraicInstance, AlgebraicParams};
use turan_core::entropy::{
    build_mu, find_power_copy, noninjective_mass, sidorenko_check, verify_property1, verify_property2, HostProfile,
};
use turan_core::field::{derive_constants, MonomialBasis, MultiPoly, PrimeField, DEFAULT_MONOMIAL_LIMIT};
use turan_core::hypergraph::{all_k_subsets, contains_any, count_homs, Hypergraph};
use turan_core::lifting::{build_sunflower, exact_ex, sunflower_kernel, verify_lemma9};
use turan_core::tree::{
    build_tree, check_balanced, check_edge_bound, enumerate_power, enumerate_power_with, Hypertree, PowerLimits,
    TreeParams,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let secs = start.elapsed().as_secs_f64();
    println!(
        "criterion {id:>2} {} {title} ({secs:.2}s): {}",
        if out.pass { "PASS" } else { "FAIL" },
        out.detail
    );
    out.pass
}

fn timed<T>(limit: Duration, f: impl FnOnce() -> T) -> (T, bool, Duration) {
    let start = Instant::now();
    let v = f();
    let el = start.elapsed();
    (v, el < limit, el)
}

fn tree_grid() -> Vec<TreeParams> {
    let mut out = Vec::new();
    for k in 2..=4usize {
        for a in k - 1..=k + 3 {
            let b_min = (a + 1).max((a + 3).saturating_sub(k));
            for b in b_min..=a + 6 {
                out.push(TreeParams::new(k, a, b).unwrap());
            }
        }
    }
    out
}

fn criterion1() -> Outcome {
    let grid = tree_grid();
    let ((bad, count), fast, el) = timed(Duration::from_secs(10), || {
        let mut bad = Vec::new();
        for &p in &grid {
            let t = build_tree(p).unwrap();
            let shape = t.graph().n_edges() == p.b && t.graph().n_vertices() == p.b + p.k - 1;
            let bal = check_balanced(t.rooted(), 20).unwrap();
            if !shape || !bal.balanced {
                bad.push((p.k, p.a, p.b));
            }
        }
        (bad, grid.len())
    });
    Outcome {
        pass: bad.is_empty() && fast,
        detail: format!("{count} trees, failures {bad:?}, {:.2}s of 10s", el.as_secs_f64()),
    }
}

const POWER_GRID: [(usize, usize, usize); 3] = [(2, 1, 2), (2, 2, 3), (3, 2, 3)];

fn criterion2() -> Outcome {
    let ((ok, members, notes), fast, el) = timed(Duration::from_secs(60), || {
        let mut ok = true;
        let mut members = 0;
        let mut notes = Vec::new();
        for (k, a, b) in POWER_GRID {
            let p = TreeParams::new(k, a, b).unwrap();
            let t = build_tree(p).unwrap();
            for s in 1..=3 {
                let forward = enumerate_power(&t, s, true).unwrap();
                let all = enumerate_power(&t, s, false).unwrap();
                let reversed: Vec<usize> = (0..s).rev().collect();
                let backward = enumerate_power_with(&t, s, true, PowerLimits::default(), &reversed).unwrap();
                let backward_all = enumerate_power_with(&t, s, false, PowerLimits::default(), &reversed).unwrap();
                let forms = |ms: &[turan_core::tree::PowerMember]| {
                    let mut f: Vec<_> = ms.iter().map(|m| (m.canonical.clone(), m.min_s)).collect();
                    f.sort();
                    f
                };
                let order_free = forms(&forward) == forms(&backward) && forms(&all) == forms(&backward_all);
                let mut distinct: Vec<_> = forward.iter().map(|m| m.canonical.clone()).collect();
                distinct.sort();
                distinct.dedup();
                let deduped = distinct.len() == forward.len();
                let bound = all.iter().all(|m| check_edge_bound(&m.rooted, p));
                members += all.len();
                if !(order_free && deduped && bound) {
                    ok = false;
                    notes.push(format!("({k},{a},{b}) s={s}: order {order_free} dedupe {deduped} bound {bound}"));
                }
            }
        }
        (ok, members, notes)
    });
    Outcome {
        pass: ok && fast,
        detail: format!("{members} gluings checked {notes:?}, {:.2}s of 60s", el.as_secs_f64()),
    }
}

fn criterion3() -> Outcome {
    let t = build_tree(TreeParams::new(2, 1, 2).unwrap()).unwrap();
    let (rows, fast, el) = timed(Duration::from_secs(120), || {
        [3u32, 5, 7]
            .iter()
            .map(|&q| lemma6_expectation(t.rooted(), &AlgebraicParams::derived(2, 1, 2, q, 2024), 500).unwrap())
            .collect::<Vec<_>>()
    });
    // prediction q^(b m - a e) with m = 1, e = 2: q^0
    let (m, e) = (1, 2);
    let ok = rows.iter().all(|r| {
        let expected = (r.params.q as f64).powi((r.params.b * m) as i32 - (r.params.a * e) as i32);
        (r.prediction - expected).abs() < 1e-12 && r.within_3se
    });
    let detail: Vec<String> = rows
        .iter()
        .map(|r| format!("q={} mean {:.3} se {:.3}", r.params.q, r.estimate.mean, r.estimate.std_error))
        .collect();
    Outcome {
        pass: ok && fast,
        detail: format!("{} (prediction 1), {:.1}s of 120s", detail.join("; "), el.as_secs_f64()),
    }
}

fn criterion4() -> Outcome {
    let rows: Vec<_> = [3u32, 5]
        .iter()
        .map(|&q| nonempty_rate(&AlgebraicParams::derived(2, 1, 2, q, 77), 500).unwrap())
        .collect();
    let ok = rows.iter().all(|r| r.seeds >= 500 && r.rate >= 1.0 / r.params.q as f64 - r.half_width);
    let detail: Vec<String> = rows
        .iter()
        .map(|r| format!("q={} rate {:.3} >= {:.3} - {:.3}", r.params.q, r.rate, r.bound, r.half_width))
        .collect();
    Outcome { pass: ok, detail: detail.join("; ") }
}

struct Case {
    name: String,
    tree: Hypertree,
}

fn patterns(k: usize) -> Vec<Case> {
    let mut out = vec![Case {
        name: format!("edge{k}"),
        tree: Hypertree::from_graph(Hypergraph::single_edge(k)).unwrap(),
    }];
    if k == 2 {
        out.push(Case { name: "cherry".into(), tree: Hypertree::from_graph(Hypergraph::cherry()).unwrap() });
        for (a, b) in [(1, 2), (2, 3)] {
            let t = build_tree(TreeParams::new(2, a, b).unwrap()).unwrap();
            out.push(Case { name: format!("T(2,{a},{b})"), tree: t.hypertree() });
        }
    } else {
        let t = build_tree(TreeParams::new(3, 2, 3).unwrap()).unwrap();
        out.push(Case { name: "T(3,2,3)".into(), tree: t.hypertree() });
    }
    out
}

fn random_hosts(k: usize, count: usize, seed: u64) -> Vec<Hypergraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(k + 1..=12);
            let max_m = (all_k_subsets(n, k).len()).min(4 * n);
            let m = rng.random_range(1..=max_m);
            Hypergraph::random(k, n, m, &mut rng).unwrap()
        })
        .collect()
}

fn host_grid() -> Vec<(usize, Vec<Hypergraph>)> {
    vec![(2, random_hosts(2, 100, 5)), (3, random_hosts(3, 100, 6))]
}

/// Independent count of all maps preserving edges.
fn naive_hom_count(h: &Hypergraph, x: &Hypergraph) -> u64 {
    let (hn, xn) = (h.n_vertices(), x.n_vertices());
    let mut img = vec![0u32; hn];
    let mut count = 0;
    loop {
        if h.edges().iter().all(|e| {
            let im: Vec<u32> = e.iter().map(|&v| img[v as usize]).collect();
            x.has_edge(&im)
        }) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == hn {
                return count;
            }
            img[i] += 1;
            if (img[i] as usize) < xn {
                break;
            }
            img[i] = 0;
            i += 1;
        }
    }
}

fn criterion5() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut min_slack = f64::INFINITY;
    for (k, hosts) in host_grid() {
        for case in patterns(k) {
            for (hi, x) in hosts.iter().enumerate() {
                let host = HostProfile::new(x).unwrap();
                let table = build_mu(&case.tree, &host).unwrap();
                let p1 = verify_property1(&table, &host);
                let p2 = verify_property2(&table, &host);
                min_slack = min_slack.min(p1.slack);
                checked += 1;
                if !(p1.slack >= -1e-9 && p2.holds && p2.max_deviation == "0") {
                    failures.push(format!("{} host {hi}", case.name));
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{checked} (pattern, host) pairs, min slack {min_slack:.3e}, failures {failures:?}"),
    }
}

fn criterion6() -> Outcome {
    let mut checked = 0;
    let mut cross = 0;
    let mut failures = Vec::new();
    for (k, hosts) in host_grid() {
        for case in patterns(k) {
            let h = case.tree.graph().without_partition();
            for (hi, x) in hosts.iter().enumerate() {
                let host = HostProfile::new(x).unwrap();
                let r = sidorenko_check(&h, &host);
                checked += 1;
                let mut ok = r.holds && r.hom_count as f64 >= r.bound * (1.0 - 1e-9);
                if (x.n_vertices() as f64).powi(h.n_vertices() as i32) <= 2e5 {
                    cross += 1;
                    ok &= naive_hom_count(&h, x) == r.hom_count;
                }
                ok &= count_homs(&h, x, &[]) == r.hom_count;
                if !ok {
                    failures.push(format!("{} host {hi}", case.name));
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{checked} pairs, {cross} hom counts cross-checked by brute force, failures {failures:?}"),
    }
}

fn criterion7() -> (Outcome, String) {
    let mut checked = 0;
    let mut failures = Vec::new();
    let (mut l8_applicable, mut l8_holds) = (0, 0);
    let mut worst_ratio = f64::INFINITY;
    for (k, hosts) in host_grid() {
        for case in patterns(k) {
            for (hi, x) in hosts.iter().enumerate() {
                let host = HostProfile::new(x).unwrap();
                let table = build_mu(&case.tree, &host).unwrap();
                let r = noninjective_mass(&table, &host);
                // independent recount of the non-injective mass in floating point
                let g = table.pattern().graph().n_vertices() as f64;
                let bound = (x.n_vertices() as f64).powf(host.r_eff() - 1.0)
                    * (g * g - (2.0 * k as f64 - 1.0) * g + (k * (k - 1)) as f64)
                    / 2.0;
                let mass: f64 = table
                    .images()
                    .iter()
                    .zip(table.weights())
                    .filter(|(img, _)| {
                        let mut s = img.to_vec();
                        s.sort_unstable();
                        s.dedup();
                        s.len() < img.len()
                    })
                    .map(|(_, w)| turan_core::entropy::ratio_to_f64(w))
                    .sum();
                checked += 1;
                let ok = r.holds
                    && (mass - r.mass_f64).abs() < 1e-9
                    && (bound - r.bound_f64).abs() <= 1e-9 * bound.max(1.0)
                    && mass <= bound * (1.0 + 1e-12);
                if !ok {
                    failures.push(format!("{} host {hi}", case.name));
                }
                if r.injective_applicable {
                    l8_applicable += 1;
                    if r.injective_holds {
                        l8_holds += 1;
                    }
                    worst_ratio = worst_ratio.min(r.inj_count as f64 / r.injective_rhs);
                }
            }
        }
    }
    (
        Outcome {
            pass: failures.is_empty(),
            detail: format!("{checked} pairs, failures {failures:?}"),
        },
        format!(
            "injective-count inequality holds on {l8_holds}/{l8_applicable} applicable pairs (min |Inj|/rhs {worst_ratio:.3})"
        ),
    )
}

fn naive_p3_ex(n: usize) -> usize {
    let pairs = all_k_subsets(n, 2);
    let p3 = Hypergraph::path(3);
    let mut best = 0;
    for mask in 0u32..1 << pairs.len() {
        let m = mask.count_ones() as usize;
        if m <= best {
            continue;
        }
        let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e.clone());
        let g = Hypergraph::new(2, n, edges, None).unwrap();
        if contains_any(&g, std::slice::from_ref(&p3)).is_none() {
            best = m;
        }
    }
    best
}

fn criterion8() -> Outcome {
    let p3 = Hypergraph::path(3);
    let (rows, fast, el) = timed(Duration::from_secs(300), || verify_lemma9(std::slice::from_ref(&p3), 3, 2, 4..=6).unwrap());
    let equal = rows.iter().all(|r| r.equal);
    let mut range_ok = true;
    let mut values = Vec::new();
    for n in 4..=7 {
        let ex = exact_ex(n, std::slice::from_ref(&p3), 2).unwrap().ex;
        values.push((n, ex));
        range_ok &= ex == n || ex + 1 == n;
        if n <= 6 {
            range_ok &= ex == naive_p3_ex(n);
        }
    }
    let table: Vec<String> = rows.iter().map(|r| format!("n={} {}={}", r.n, r.ex_base, r.ex_lifted)).collect();
    Outcome {
        pass: equal && range_ok && fast,
        detail: format!(
            "lifted {} ; ex(n,P3) {values:?}; oracle {:.1}s of 300s",
            table.join(", "),
            el.as_secs_f64()
        ),
    }
}

fn criterion9() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for k in 2..=4usize {
        for n in k..=k + 4 {
            let ex = exact_ex(n, &[Hypergraph::single_edge(k)], k).unwrap().ex;
            if ex != 0 {
                ok = false;
                notes.push(format!("ex({n}, edge{k}) = {ex}"));
            }
        }
    }
    let mut flowers = 0;
    for k in 2..=3usize {
        for t in 0..k {
            for n in k..=k + 8 {
                let g = build_sunflower(k, t, n).unwrap();
                flowers += 1;
                let petals = (n - t) / (k - t);
                let kernel: Vec<u32> = (0..t as u32).collect();
                let pair_ok = g.edges().iter().enumerate().all(|(i, a)| {
                    g.edges()[i + 1..]
                        .iter()
                        .all(|b| a.iter().copied().filter(|v| b.contains(v)).collect::<Vec<u32>>() == kernel)
                });
                let shape_ok = g.n_edges() == petals && (petals < 2 || sunflower_kernel(&g) == Some(kernel.clone()));
                if !(pair_ok && shape_ok) {
                    ok = false;
                    notes.push(format!("sunflower k={k} t={t} n={n}"));
                }
            }
        }
    }
    Outcome {
        pass: ok,
        detail: format!("single-edge ex = 0 for k in 2..=4, {flowers} sunflowers checked {notes:?}"),
    }
}

fn criterion10() -> (Outcome, String) {
    let params = TreeParams::new(2, 1, 2).unwrap();
    let t = build_tree(params).unwrap();
    let (_, d) = derive_constants(2, 1, 2);
    let q = 5;
    let field = PrimeField::new(q).unwrap();
    let basis = Arc::new(MonomialBasis::new(4, d as usize, DEFAULT_MONOMIAL_LIMIT).unwrap());
    // x1 + y1 - x2 y2 over (x1, x2, y1, y2)
    let f = MultiPoly::from_terms(
        field,
        basis,
        &[(vec![1, 0, 0, 0], 1), (vec![0, 0, 1, 0], 1), (vec![0, 1, 0, 1], q - 1)],
    )
    .unwrap();
    let inst = AlgebraicInstance::from_polys(2, 2, q, vec![f]).unwrap();
    let family: Vec<Hypergraph> = enumerate_power(&t, 3, true)
        .unwrap()
        .into_iter()
        .filter(|m| m.min_s == 3)
        .map(|m| m.rooted.graph)
        .collect();
    let free = contains_any(inst.graph(), &family).is_none();
    let none_found = find_power_copy(inst.graph(), params, 3).unwrap().is_none();

    let fixture = Hypergraph::new(
        2,
        5,
        vec![vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![0, 4], vec![1, 4]],
        None,
    )
    .unwrap();
    let witness = find_power_copy(&fixture, params, 3).unwrap();
    let witness_ok = witness.as_ref().is_some_and(|w| {
        w.tag == 3 && {
            let mut r = w.roots.clone();
            r.sort();
            r == vec![0, 1]
        }
    });

    // random instances at the same parameters, for comparison only
    let mut survey = BTreeMap::new();
    for seed in 0..20u64 {
        let x = turan_core::algebraic::build_instance(&AlgebraicParams::derived(2, 1, 2, q, seed)).unwrap();
        let free = contains_any(x.graph(), &family).is_none();
        *survey.entry(free).or_insert(0) += 1;
    }
    (
        Outcome {
            pass: free && none_found && witness_ok && inst.graph().n_edges() == 125,
            detail: format!(
                "explicit instance: {} edges, T^3-free {free}, find_power_copy none {none_found}; fixture witness tag {:?}",
                inst.graph().n_edges(),
                witness.map(|w| w.tag)
            ),
        },
        format!(
            "T^3-free random instances at q=5: {} of 20",
            survey.get(&true).copied().unwrap_or(0)
        ),
    )
}

fn main() {
    let mut all = true;
    all &= run(1, "tree grid shape and balancedness", criterion1);
    all &= run(2, "power families: edge bound, dedupe, order independence", criterion2);
    all &= run(3, "rooted copy expectation, Monte Carlo", criterion3);
    all &= run(4, "non-emptiness rate", criterion4);
    all &= run(5, "entropy properties (1) and (2)", criterion5);
    all &= run(6, "Sidorenko-type counting bound", criterion6);
    let mut l8 = String::new();
    all &= run(7, "non-injective mass bound", || {
        let (o, note) = criterion7();
        l8 = note;
        o
    });
    all &= run(8, "lifting equality and ex(n, P3)", criterion8);
    all &= run(9, "single-edge and sunflower boundary cases", criterion9);
    let mut survey = String::new();
    all &= run(10, "algebraic instance free of T^3; power-copy search", || {
        let (o, note) = criterion10();
        survey = note;
        o
    });
    println!("report-only: {l8}");
    println!("report-only: {survey}");
    if !all {
        std::process::exit(1);
    }
}
