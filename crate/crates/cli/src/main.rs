use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use turan_core::algebraic::{
    build_instance, edge_stats, find_family_copy, lemma5_diagnostic, lemma6_expectation, AlgebraicParams,
};
use turan_core::entropy::{
    build_mu, find_power_copy, noninjective_mass, ratio_to_f64, sidorenko_check, verify_property1, verify_property2,
    HostProfile,
};
use turan_core::field::regime_warning;
use turan_core::harness::{emit_plotdata, run_suite, Report};
use turan_core::hypergraph::{Hypergraph, HypergraphJson, RootedGraph};
use turan_core::lifting::{build_sunflower, exact_ex_with, lift_member, verify_lemma9, FamilyOracle, DEFAULT_NODE_BUDGET};
use turan_core::tree::{build_tree, check_balanced, enumerate_power, Hypertree, TreeParams, DEFAULT_BALANCE_LIMIT};
use turan_core::Error;

/// Workbench for hypergraph Turán problems with rational exponents.
#[derive(Parser)]
#[command(name = "turan", version)]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "TURAN_THREADS")]
    threads: Option<usize>,
    /// Compact single-line JSON.
    #[arg(long, global = true)]
    compact: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rooted hypertrees and their powers.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Random algebraic instances over F_q.
    #[command(subcommand)]
    Alg(AlgCmd),
    /// Homomorphism distributions and counting bounds.
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Lifted families.
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Exact extremal numbers.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Sunflower constructions.
    #[command(subcommand)]
    Sunflower(SunflowerCmd),
    /// Run an experiment suite: tree, algebraic, entropy or lifting.
    Suite {
        name: String,
        /// JSON config file; missing fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Tab-separated sweep data from a saved suite report.
    Plotdata {
        report: PathBuf,
        /// Sweep name; defaults to the first sweep.
        #[arg(long)]
        sweep: Option<String>,
    },
}

#[derive(Args, Clone, Copy)]
struct TreeArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    a: usize,
    #[arg(long)]
    b: usize,
}

impl TreeArgs {
    fn params(self) -> turan_core::Result<TreeParams> {
        TreeParams::new(self.k, self.a, self.b)
    }
}

#[derive(Subcommand)]
enum TreeCmd {
    /// Build T(a, b, k) with its roots, whites and build order.
    Build(TreeArgs),
    /// Balancedness of T(a, b, k), or of `--h` rooted at `--roots`.
    CheckBalanced {
        #[command(flatten)]
        tree: Option<TreeArgs>,
        /// Hypergraph JSON (inline or a path).
        #[arg(long = "H", alias = "h", requires = "roots", conflicts_with_all = ["k", "a", "b"])]
        h: Option<String>,
        #[arg(long, value_delimiter = ',')]
        roots: Option<Vec<u32>>,
        #[arg(long, default_value_t = DEFAULT_BALANCE_LIMIT)]
        limit: usize,
    },
    /// Members of the s-th power.
    Power {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        s: usize,
        /// Keep one member per isomorphism class.
        #[arg(long)]
        dedupe: bool,
    },
}

#[derive(Args, Clone, Copy)]
struct AlgArgs {
    #[command(flatten)]
    tree: TreeArgs,
    /// Degree bound; derived from (k, a, b) when omitted.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl AlgArgs {
    fn params(self, q: u32) -> anyhow::Result<AlgebraicParams> {
        let t = self.tree.params()?;
        let p = AlgebraicParams::derived(t.k, t.a, t.b, q, self.seed);
        Ok(match self.d {
            Some(d) => p.with_degree(d),
            None => p,
        })
    }
}

#[derive(Subcommand)]
enum AlgCmd {
    /// Sample an instance and emit its hypergraph and polynomials.
    Build {
        #[command(flatten)]
        alg: AlgArgs,
        #[arg(long)]
        q: u32,
    },
    /// Mean edge counts against q^{k b - a}.
    EdgeStats {
        #[command(flatten)]
        alg: AlgArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        q_list: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
    },
    /// Mean rooted copy count of a rooted graph at a random root tuple.
    Lemma6 {
        #[command(flatten)]
        alg: AlgArgs,
        /// Rooted hypergraph JSON; the tree itself when omitted.
        #[arg(long = "H", alias = "h", requires = "roots")]
        h: Option<String>,
        #[arg(long, value_delimiter = ',')]
        roots: Option<Vec<u32>>,
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 500)]
        seeds: usize,
    },
    /// Histogram of rooted tree copy counts.
    Lemma5 {
        #[command(flatten)]
        alg: AlgArgs,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        q_list: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
    },
    /// Search an instance for a member of the p-th power with tag exactly p.
    Freeness {
        #[command(flatten)]
        alg: AlgArgs,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        p: usize,
    },
}

#[derive(Args)]
struct PairArgs {
    /// Pattern hypertree JSON (inline or a path).
    #[arg(long = "H", alias = "h")]
    h: String,
    /// Host hypergraph JSON (inline or a path).
    #[arg(long = "X", alias = "x")]
    x: String,
}

#[derive(Subcommand)]
enum EntropyCmd {
    /// The weighted homomorphism table.
    Mu(PairArgs),
    /// Check the edge-entropy and marginal properties.
    Verify {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [1u8, 2])]
        props: Vec<u8>,
    },
    /// Hom(H, X) against n^{|H|} (M / n^k)^{e(H)}.
    Sidorenko(PairArgs),
    /// Non-injective mass against its bound.
    InjBound(PairArgs),
    /// Find a power member of T(a, b, k) with tag p in a host.
    FindPower {
        #[arg(long = "X", alias = "x")]
        x: String,
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        p: usize,
    },
}

#[derive(Subcommand)]
enum LiftCmd {
    /// Lift every family member to arity k.
    Build {
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: usize,
    },
    /// ex(n, F) against ex(n + k - l, lifted F).
    VerifyLemma9 {
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Exact ex(n, F) by search.
    Ex {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand)]
enum SunflowerCmd {
    /// Kernel of size t plus as many disjoint petals as fit in n vertices.
    Build {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
    },
}

/// Output plus whether every hard check held.
struct Outcome {
    value: Value,
    ok: bool,
}

fn ok(value: Value) -> Outcome {
    Outcome { value, ok: true }
}

fn read_source(s: &str) -> anyhow::Result<String> {
    let t = s.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(s.to_string());
    }
    std::fs::read_to_string(s).with_context(|| format!("reading {s}"))
}

fn graph_from_value(v: &Value) -> anyhow::Result<Hypergraph> {
    // Accept the output of `tree build` / `alg build` directly.
    let v = v.get("graph").unwrap_or(v);
    let j: HypergraphJson = serde_json::from_value(v.clone()).map_err(Error::from)?;
    Ok(Hypergraph::from_json(&j)?)
}

fn load_graph(s: &str) -> anyhow::Result<Hypergraph> {
    let v: Value = serde_json::from_str(&read_source(s)?).map_err(Error::from)?;
    graph_from_value(&v)
}

fn load_family(s: &str) -> anyhow::Result<Vec<Hypergraph>> {
    let v: Value = serde_json::from_str(&read_source(s)?).map_err(Error::from)?;
    match v {
        Value::Array(items) => items.iter().map(graph_from_value).collect(),
        other => Ok(vec![graph_from_value(&other)?]),
    }
}

fn rooted_json(r: &RootedGraph) -> Value {
    json!({ "graph": r.graph.to_json(), "roots": r.roots })
}

fn warn(q: u32, d: usize) -> Option<String> {
    let w = regime_warning(q, d as u64);
    if let Some(w) = &w {
        eprintln!("warning: {w}");
    }
    w
}

fn run(cmd: Cmd) -> anyhow::Result<Outcome> {
    Ok(match cmd {
        Cmd::Tree(TreeCmd::Build(t)) => {
            let tree = build_tree(t.params()?)?;
            ok(json!({
                "params": tree.params(),
                "graph": tree.graph().to_json(),
                "sidecar": tree.sidecar(),
                "root_windows": tree.root_windows(),
            }))
        }
        Cmd::Tree(TreeCmd::CheckBalanced { tree, h, roots, limit }) => {
            let rooted = match (tree, h) {
                (_, Some(h)) => RootedGraph::new(load_graph(&h)?, roots.unwrap_or_default())?,
                (Some(t), None) => build_tree(t.params()?)?.rooted().clone(),
                (None, None) => bail!(Error::InvalidParams("give --k/--a/--b or --H with --roots".into())),
            };
            let r = check_balanced(&rooted, limit)?;
            Outcome { ok: r.balanced, value: serde_json::to_value(r)? }
        }
        Cmd::Tree(TreeCmd::Power { tree, s, dedupe }) => {
            let t = build_tree(tree.params()?)?;
            let members = enumerate_power(&t, s, dedupe)?;
            let list: Vec<Value> = members
                .iter()
                .map(|m| {
                    json!({
                        "rooted": rooted_json(&m.rooted),
                        "min_s": m.min_s,
                        "copies": m.copies,
                        "part_consistent": m.part_consistent(),
                    })
                })
                .collect();
            ok(json!({ "params": tree.params()?, "s": s, "dedupe": dedupe, "count": list.len(), "members": list }))
        }
        Cmd::Alg(AlgCmd::Build { alg, q }) => {
            let p = alg.params(q)?;
            let w = warn(q, p.d);
            let inst = build_instance(&p)?;
            ok(json!({
                "params": p,
                "warning": w,
                "edges": inst.graph().n_edges(),
                "graph": inst.graph().to_json(),
                "polys": inst.polys_json(),
            }))
        }
        Cmd::Alg(AlgCmd::EdgeStats { alg, q_list, seeds }) => {
            let base = alg.params(q_list.first().copied().unwrap_or(3))?;
            let warnings: Vec<_> = q_list.iter().filter_map(|&q| warn(q, base.d)).collect();
            let rows = edge_stats(&base, &q_list, seeds)?;
            ok(json!({ "params": base, "seed": base.seed, "seeds": seeds, "warnings": warnings, "rows": rows }))
        }
        Cmd::Alg(AlgCmd::Lemma6 { alg, h, roots, q, seeds }) => {
            let p = alg.params(q)?;
            warn(q, p.d);
            let rooted = match h {
                Some(h) => RootedGraph::new(load_graph(&h)?, roots.unwrap_or_default())?,
                None => build_tree(alg.tree.params()?)?.rooted().clone(),
            };
            let r = lemma6_expectation(&rooted, &p, seeds)?;
            Outcome { ok: r.pass, value: json!({ "params": p, "seed": p.seed, "report": r }) }
        }
        Cmd::Alg(AlgCmd::Lemma5 { alg, p, q_list, seeds }) => {
            let base = alg.params(q_list.first().copied().unwrap_or(3))?;
            let t = build_tree(alg.tree.params()?)?;
            let rows = lemma5_diagnostic(&t, &base, &q_list, p, seeds)?;
            ok(json!({ "params": base, "seed": base.seed, "p": p, "status": "REPORT-ONLY", "rows": rows }))
        }
        Cmd::Alg(AlgCmd::Freeness { alg, q, p }) => {
            let params = alg.params(q)?;
            warn(q, params.d);
            let t = build_tree(alg.tree.params()?)?;
            let family: Vec<Hypergraph> = enumerate_power(&t, p, true)?
                .into_iter()
                .filter(|m| m.min_s == p)
                .map(|m| m.rooted.graph.without_partition())
                .collect();
            let inst = build_instance(&params)?;
            let hit = find_family_copy(&inst, &family);
            ok(json!({
                "params": params,
                "seed": params.seed,
                "family_size": family.len(),
                "free": hit.is_none(),
                "witness": hit.map(|(i, map)| json!({ "member": i, "map": map })),
            }))
        }
        Cmd::Entropy(cmd) => entropy(cmd)?,
        Cmd::Lift(LiftCmd::Build { family, k }) => {
            let fam = load_family(&family)?;
            let lifted: Vec<HypergraphJson> =
                fam.iter().map(|f| lift_member(f, k).map(|g| g.to_json())).collect::<Result<_, _>>()?;
            ok(json!({ "k": k, "family": lifted }))
        }
        Cmd::Lift(LiftCmd::VerifyLemma9 { family, k, l, n_min, n_max }) => {
            let rows = verify_lemma9(&load_family(&family)?, k, l, n_min..=n_max)?;
            Outcome { ok: rows.iter().all(|r| r.equal), value: json!({ "k": k, "l": l, "rows": rows }) }
        }
        Cmd::Oracle(OracleCmd::Ex { n, k, family, budget }) => {
            let oracle = FamilyOracle::new(k, load_family(&family)?)?;
            ok(serde_json::to_value(exact_ex_with(n, &oracle, budget)?)?)
        }
        Cmd::Sunflower(SunflowerCmd::Build { k, t, n }) => {
            let g = build_sunflower(k, t, n)?;
            ok(json!({ "k": k, "kernel_size": t, "petals": g.n_edges(), "graph": g.to_json() }))
        }
        Cmd::Suite { name, config } => {
            let cfg = match config {
                Some(path) => serde_json::from_str(&read_source(&path.to_string_lossy())?).map_err(Error::from)?,
                None => Value::Null,
            };
            let report = run_suite(&name, &cfg)?;
            for c in &report.checks {
                eprintln!("{:<11} {}", serde_json::to_value(c.status)?.as_str().unwrap_or(""), c.name);
            }
            Outcome { ok: report.passed(), value: serde_json::to_value(&report)? }
        }
        Cmd::Plotdata { report, sweep } => {
            let r: Report = serde_json::from_str(&read_source(&report.to_string_lossy())?).map_err(Error::from)?;
            let s = match &sweep {
                Some(name) => r.sweeps.iter().find(|s| &s.name == name),
                None => r.sweeps.first(),
            };
            let Some(s) = s else {
                bail!(Error::InvalidParams(format!("report has no sweep {}", sweep.as_deref().unwrap_or(""))));
            };
            Outcome { ok: true, value: Value::String(emit_plotdata(s)) }
        }
    })
}

fn entropy(cmd: EntropyCmd) -> anyhow::Result<Outcome> {
    let load_pair = |p: &PairArgs| -> anyhow::Result<(Hypertree, HostProfile)> {
        let h = Hypertree::from_graph(load_graph(&p.h)?.without_partition())?;
        Ok((h, HostProfile::new(&load_graph(&p.x)?)?))
    };
    Ok(match cmd {
        EntropyCmd::Mu(p) => {
            let (h, host) = load_pair(&p)?;
            let t = build_mu(&h, &host)?;
            let rows: Vec<Value> = t
                .images()
                .iter()
                .zip(t.weights())
                .map(|(img, w)| json!({ "image": img, "weight": w.to_string(), "weight_f64": ratio_to_f64(w) }))
                .collect();
            ok(json!({
                "entries": t.len(),
                "total": t.total().to_string(),
                "entropy": t.entropy_d(),
                "d_epsilon": host.d_epsilon(),
                "table": rows,
            }))
        }
        EntropyCmd::Verify { pair, props } => {
            let (h, host) = load_pair(&pair)?;
            let t = build_mu(&h, &host)?;
            let mut out = serde_json::Map::new();
            let mut all = true;
            for prop in props {
                match prop {
                    1 => {
                        let r = verify_property1(&t, &host);
                        all &= r.holds;
                        out.insert("property1".into(), serde_json::to_value(r)?);
                    }
                    2 => {
                        let r = verify_property2(&t, &host);
                        all &= r.holds;
                        out.insert("property2".into(), serde_json::to_value(r)?);
                    }
                    other => bail!(Error::InvalidParams(format!("--props: unknown property {other}"))),
                }
            }
            Outcome { ok: all, value: Value::Object(out) }
        }
        EntropyCmd::Sidorenko(p) => {
            let (h, host) = load_pair(&p)?;
            let r = sidorenko_check(h.graph(), &host);
            Outcome { ok: r.holds, value: serde_json::to_value(r)? }
        }
        EntropyCmd::InjBound(p) => {
            let (h, host) = load_pair(&p)?;
            let r = noninjective_mass(&build_mu(&h, &host)?, &host);
            Outcome { ok: r.holds, value: serde_json::to_value(r)? }
        }
        EntropyCmd::FindPower { x, tree, p } => {
            let w = find_power_copy(&load_graph(&x)?, tree.params()?, p)?;
            ok(json!({
                "params": tree.params()?,
                "p": p,
                "found": w.is_some(),
                "witness": w.map(|w| json!({
                    "roots": w.roots,
                    "member": rooted_json(&w.member),
                    "host_vertices": w.host_vertices,
                    "copies_used": w.copies_used,
                    "tag": w.tag,
                    "p_prime": w.p_prime.to_string(),
                })),
            }))
        }
    })
}

fn is_usage(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<Error>(),
        Some(Error::InvalidParams(_) | Error::Domain(_) | Error::Json(_) | Error::LimitExceeded { .. })
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: thread pool: {e}");
        }
    }
    match run(cli.cmd) {
        Ok(out) => {
            match &out.value {
                Value::String(s) => print!("{s}"),
                v if cli.compact => println!("{v}"),
                v => println!("{}", serde_json::to_string_pretty(v).expect("json")),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
