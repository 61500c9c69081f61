//! Reproducible experiment suites and their JSON reports.
//!
//! Each check is classified once and for all: exact finite checks are
//! PASS/FAIL, asymptotic diagnostics are REPORT-ONLY and never fail a run.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebraic::{edge_stats, lemma5_diagnostic, lemma6_expectation, nonempty_rate, AlgebraicParams};
use crate::entropy::{build_mu, noninjective_mass, sidorenko_check, verify_property1, verify_property2, HostProfile};
use crate::error::{Error, Result};
use crate::hypergraph::{all_k_subsets, Hypergraph};
use crate::lifting::{build_sunflower, exact_ex, sunflower_kernel, verify_lemma9};
use crate::seed::trial_rng;
use crate::tree::{build_tree, check_balanced, check_edge_bound, enumerate_power, enumerate_power_with, Hypertree, PowerLimits, TreeParams};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "REPORT-ONLY")]
    ReportOnly,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: Value,
}

/// Columnar sweep data for plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub version: u32,
    pub config: Value,
    pub checks: Vec<Check>,
    pub sweeps: Vec<Sweep>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// Everything except timing; identical for identical configs.
    pub fn payload(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("elapsed_ms");
        v
    }
}

/// Tab-separated columns with a header row; header only for an empty sweep.
pub fn emit_plotdata(sweep: &Sweep) -> String {
    let mut out = sweep.columns.join("\t");
    out.push('\n');
    for row in &sweep.rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeSuiteConfig {
    pub ks: Vec<usize>,
    /// `a` ranges over `[k-1, k-1+a_span]`.
    pub a_span: usize,
    /// `b` ranges up to `a + b_span`.
    pub b_span: usize,
    pub balance_limit: usize,
    pub power_grid: Vec<[usize; 3]>,
    pub max_s: usize,
}

impl Default for TreeSuiteConfig {
    fn default() -> Self {
        TreeSuiteConfig {
            ks: vec![2, 3, 4],
            a_span: 4,
            b_span: 6,
            balance_limit: 20,
            power_grid: vec![[2, 1, 2], [2, 2, 3], [3, 2, 3]],
            max_s: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgebraicSuiteConfig {
    /// `[k, a, b]`.
    pub tree: [usize; 3],
    pub seed: u64,
    pub degree: Option<usize>,
    pub expectation_q: Vec<u32>,
    pub expectation_seeds: usize,
    pub nonempty_q: Vec<u32>,
    pub nonempty_seeds: usize,
    pub edge_q: Vec<u32>,
    pub edge_seeds: usize,
    pub gap_p: u64,
    pub gap_q: Vec<u32>,
    pub gap_seeds: usize,
}

impl Default for AlgebraicSuiteConfig {
    fn default() -> Self {
        AlgebraicSuiteConfig {
            tree: [2, 1, 2],
            seed: 2024,
            degree: None,
            expectation_q: vec![3, 5, 7],
            expectation_seeds: 500,
            nonempty_q: vec![3, 5],
            nonempty_seeds: 500,
            edge_q: vec![3, 5, 7, 11, 13],
            edge_seeds: 200,
            gap_p: 3,
            gap_q: vec![5, 7, 11],
            gap_seeds: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropySuiteConfig {
    pub hosts: usize,
    pub seed: u64,
    pub n_max: usize,
    /// Host arities; patterns are chosen per arity.
    pub ks: Vec<usize>,
}

impl Default for EntropySuiteConfig {
    fn default() -> Self {
        EntropySuiteConfig { hosts: 100, seed: 5, n_max: 12, ks: vec![2, 3] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LiftingSuiteConfig {
    pub k: usize,
    pub l: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub p3_n_min: usize,
    pub p3_n_max: usize,
    pub sunflower_ks: Vec<usize>,
    pub sunflower_extra: usize,
}

impl Default for LiftingSuiteConfig {
    fn default() -> Self {
        LiftingSuiteConfig {
            k: 3,
            l: 2,
            n_min: 4,
            n_max: 6,
            p3_n_min: 4,
            p3_n_max: 7,
            sunflower_ks: vec![2, 3],
            sunflower_extra: 8,
        }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(config: &Value) -> Result<T> {
    serde_json::from_value(config.clone()).map_err(|e| Error::InvalidParams(format!("config: {e}")))
}

pub const SUITES: [&str; 4] = ["tree", "algebraic", "entropy", "lifting"];

/// Runs a named suite. `config` may be `null` or a partial object; missing
/// fields take defaults, unknown fields are rejected.
pub fn run_suite(name: &str, config: &Value) -> Result<Report> {
    let config = if config.is_null() { json!({}) } else { config.clone() };
    let start = Instant::now();
    let (echo, checks, sweeps) = match name {
        "tree" => {
            let c: TreeSuiteConfig = parse(&config)?;
            let (checks, sweeps) = tree_suite(&c)?;
            (serde_json::to_value(&c)?, checks, sweeps)
        }
        "algebraic" => {
            let c: AlgebraicSuiteConfig = parse(&config)?;
            let (checks, sweeps) = algebraic_suite(&c)?;
            (serde_json::to_value(&c)?, checks, sweeps)
        }
        "entropy" => {
            let c: EntropySuiteConfig = parse(&config)?;
            let (checks, sweeps) = entropy_suite(&c)?;
            (serde_json::to_value(&c)?, checks, sweeps)
        }
        "lifting" => {
            let c: LiftingSuiteConfig = parse(&config)?;
            let (checks, sweeps) = lifting_suite(&c)?;
            (serde_json::to_value(&c)?, checks, sweeps)
        }
        other => {
            return Err(Error::InvalidParams(format!(
                "unknown suite {other:?}; expected one of {SUITES:?}"
            )))
        }
    };
    Ok(Report {
        suite: name.into(),
        version: REPORT_VERSION,
        config: echo,
        checks,
        sweeps,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

type SuiteOut = (Vec<Check>, Vec<Sweep>);

fn tree_suite(c: &TreeSuiteConfig) -> Result<SuiteOut> {
    let mut checks = Vec::new();
    for &k in &c.ks {
        if k < 2 {
            return Err(Error::InvalidParams(format!("config: ks entry {k} below 2")));
        }
        for a in k - 1..=k - 1 + c.a_span {
            for b in (a + 1).max((a + 3).saturating_sub(k))..=a + c.b_span {
                let p = TreeParams::new(k, a, b)?;
                let t = build_tree(p)?;
                let bal = check_balanced(t.rooted(), c.balance_limit)?;
                let shape = t.graph().n_edges() == b && t.graph().n_vertices() == b + k - 1;
                checks.push(Check {
                    name: format!("tree k={k} a={a} b={b}"),
                    status: Status::of(shape && bal.balanced),
                    detail: json!({
                        "edges": t.graph().n_edges(),
                        "vertices": t.graph().n_vertices(),
                        "balanced": bal.balanced,
                        "worst_subset": bal.worst,
                        "worst_epsilon": bal.worst_epsilon,
                    }),
                });
            }
        }
    }
    for &[k, a, b] in &c.power_grid {
        let p = TreeParams::new(k, a, b)?;
        let t = build_tree(p)?;
        for s in 1..=c.max_s {
            let all = enumerate_power(&t, s, false)?;
            let dedup = enumerate_power(&t, s, true)?;
            let rev: Vec<usize> = (0..s).rev().collect();
            let back = enumerate_power_with(&t, s, true, PowerLimits::default(), &rev)?;
            let forms = |ms: &[crate::tree::PowerMember]| {
                let mut f: Vec<_> = ms.iter().map(|m| (m.canonical.clone(), m.min_s)).collect();
                f.sort();
                f
            };
            let order_free = forms(&dedup) == forms(&back);
            let bound = all.iter().all(|m| check_edge_bound(&m.rooted, p));
            let exact = dedup.iter().filter(|m| m.min_s == s).count();
            checks.push(Check {
                name: format!("power k={k} a={a} b={b} s={s}"),
                status: Status::of(order_free && bound),
                detail: json!({
                    "gluings": all.len(),
                    "members": dedup.len(),
                    "members_with_tag_s": exact,
                    "edge_bound": bound,
                    "order_independent": order_free,
                }),
            });
        }
    }
    Ok((checks, Vec::new()))
}

fn algebraic_suite(c: &AlgebraicSuiteConfig) -> Result<SuiteOut> {
    let [k, a, b] = c.tree;
    let t = build_tree(TreeParams::new(k, a, b)?)?;
    let base = {
        let p = AlgebraicParams::derived(k, a, b, 3, c.seed);
        match c.degree {
            Some(d) => p.with_degree(d),
            None => p,
        }
    };
    let mut checks = Vec::new();
    for &q in &c.expectation_q {
        let r = lemma6_expectation(t.rooted(), &AlgebraicParams { q, ..base }, c.expectation_seeds)?;
        checks.push(Check {
            name: format!("rooted copy expectation q={q}"),
            status: Status::of(r.within_3se),
            detail: serde_json::to_value(&r)?,
        });
    }
    for &q in &c.nonempty_q {
        let r = nonempty_rate(&AlgebraicParams { q, ..base }, c.nonempty_seeds)?;
        checks.push(Check {
            name: format!("nonempty rate q={q}"),
            status: Status::of(r.pass),
            detail: serde_json::to_value(&r)?,
        });
    }
    let rows = edge_stats(&base, &c.edge_q, c.edge_seeds)?;
    if let Some(last) = rows.last() {
        checks.push(Check {
            name: "edge count trend".into(),
            status: Status::ReportOnly,
            detail: serde_json::to_value(&rows)?,
        });
        checks.push(Check {
            name: format!("edge count ratio at q={}", last.q),
            status: Status::of((0.25..=4.0).contains(&last.ratio)),
            detail: json!({ "ratio": last.ratio, "range": [0.25, 4.0] }),
        });
    }
    let l5 = lemma5_diagnostic(&t, &base, &c.gap_q, c.gap_p, c.gap_seeds)?;
    checks.push(Check {
        name: "copy count dichotomy".into(),
        status: Status::ReportOnly,
        detail: serde_json::to_value(&l5)?,
    });
    let sweep = Sweep {
        name: "lang_weil".into(),
        columns: vec!["q".into(), "mean_edges".into(), "mean_edges_over_prediction".into()],
        rows: rows
            .iter()
            .map(|r| vec![r.q.to_string(), format!("{:.6}", r.mean_edges), format!("{:.6}", r.ratio)])
            .collect(),
    };
    Ok((checks, vec![sweep]))
}

/// Hypertree patterns checked against hosts of arity `k`.
pub fn entropy_patterns(k: usize) -> Result<Vec<(String, Hypertree)>> {
    let mut out = vec![(format!("edge k={k}"), Hypertree::from_graph(Hypergraph::single_edge(k))?)];
    match k {
        2 => {
            out.push(("cherry".into(), Hypertree::from_graph(Hypergraph::cherry())?));
            for (a, b) in [(1, 2), (2, 3)] {
                out.push((format!("T(2,{a},{b})"), build_tree(TreeParams::new(2, a, b)?)?.hypertree()));
            }
        }
        3 => out.push(("T(3,2,3)".into(), build_tree(TreeParams::new(3, 2, 3)?)?.hypertree())),
        _ => {}
    }
    Ok(out)
}

/// `count` random hosts: `n` uniform in `[k+1, n_max]`, `m` uniform in `[1, min(C(n,k), 4n)]`.
pub fn random_hosts(k: usize, count: usize, n_max: usize, seed: u64) -> Result<Vec<Hypergraph>> {
    if n_max < k + 1 {
        return Err(Error::InvalidParams(format!("config: n_max {n_max} below k + 1")));
    }
    (0..count as u64)
        .map(|i| {
            let mut rng: ChaCha8Rng = trial_rng(seed, i);
            let n = rng.random_range(k + 1..=n_max);
            let m = rng.random_range(1..=all_k_subsets(n, k).len().min(4 * n));
            Hypergraph::random(k, n, m, &mut rng)
        })
        .collect()
}

fn entropy_suite(c: &EntropySuiteConfig) -> Result<SuiteOut> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for &k in &c.ks {
        let hosts = random_hosts(k, c.hosts, c.n_max, c.seed ^ k as u64)?;
        for (name, h) in entropy_patterns(k)? {
            let (mut p1, mut p2, mut sid, mut inj, mut inj_count_ok, mut inj_app) = (true, true, true, true, true, 0);
            let mut min_slack = f64::INFINITY;
            for (hi, x) in hosts.iter().enumerate() {
                let host = HostProfile::new(x)?;
                let table = build_mu(&h, &host)?;
                let r1 = verify_property1(&table, &host);
                min_slack = min_slack.min(r1.slack);
                p1 &= r1.holds;
                p2 &= verify_property2(&table, &host).holds;
                let s = sidorenko_check(h.graph(), &host);
                sid &= s.holds;
                let ni = noninjective_mass(&table, &host);
                inj &= ni.holds;
                if ni.injective_applicable {
                    inj_app += 1;
                    inj_count_ok &= ni.injective_holds;
                }
                rows.push(vec![
                    name.clone(),
                    hi.to_string(),
                    x.n_vertices().to_string(),
                    s.hom_count.to_string(),
                    format!("{:.6}", s.bound),
                ]);
            }
            let hosts_n = hosts.len();
            checks.push(Check {
                name: format!("property (1) {name}"),
                status: Status::of(p1),
                detail: json!({ "hosts": hosts_n, "min_slack": min_slack }),
            });
            checks.push(Check {
                name: format!("property (2) {name}"),
                status: Status::of(p2),
                detail: json!({ "hosts": hosts_n, "exact": true }),
            });
            checks.push(Check {
                name: format!("counting bound {name}"),
                status: Status::of(sid),
                detail: json!({ "hosts": hosts_n }),
            });
            checks.push(Check {
                name: format!("non-injective mass {name}"),
                status: Status::of(inj),
                detail: json!({ "hosts": hosts_n }),
            });
            checks.push(Check {
                name: format!("injective count {name}"),
                status: Status::of(inj_count_ok),
                detail: json!({ "applicable_hosts": inj_app }),
            });
        }
    }
    let sweep = Sweep {
        name: "sidorenko".into(),
        columns: vec!["pattern".into(), "host".into(), "n".into(), "hom_count".into(), "bound".into()],
        rows,
    };
    Ok((checks, vec![sweep]))
}

fn lifting_suite(c: &LiftingSuiteConfig) -> Result<SuiteOut> {
    let mut checks = Vec::new();
    let p3 = Hypergraph::path(3);
    if c.l != 2 {
        return Err(Error::InvalidParams("config: l must be 2 for the path base family".into()));
    }
    let rows = verify_lemma9(std::slice::from_ref(&p3), c.k, c.l, c.n_min..=c.n_max)?;
    for r in &rows {
        checks.push(Check {
            name: format!("lifting equality n={}", r.n),
            status: Status::of(r.equal),
            detail: serde_json::to_value(r)?,
        });
    }
    for n in c.p3_n_min..=c.p3_n_max {
        let r = exact_ex(n, std::slice::from_ref(&p3), 2)?;
        checks.push(Check {
            name: format!("ex(n, P3) n={n}"),
            status: Status::of(r.ex == n || r.ex + 1 == n),
            detail: json!({ "ex": r.ex, "mode": r.mode, "witness": r.witness }),
        });
    }
    for &k in &c.sunflower_ks {
        for n in k..=k + 4 {
            let r = exact_ex(n, &[Hypergraph::single_edge(k)], k)?;
            checks.push(Check {
                name: format!("ex(n, edge) k={k} n={n}"),
                status: Status::of(r.ex == 0),
                detail: json!({ "ex": r.ex }),
            });
        }
        for t in 0..k {
            let mut ok = true;
            for n in k..=k + c.sunflower_extra {
                let g = build_sunflower(k, t, n)?;
                let petals = (n - t) / (k - t);
                let kernel: Vec<u32> = (0..t as u32).collect();
                ok &= g.n_edges() == petals && (petals < 2 || sunflower_kernel(&g).as_ref() == Some(&kernel));
            }
            checks.push(Check {
                name: format!("sunflower k={k} t={t}"),
                status: Status::of(ok),
                detail: json!({ "n_max": k + c.sunflower_extra }),
            });
        }
    }
    Ok((checks, Vec::new()))
}
