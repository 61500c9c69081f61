//! The balanced rooted hypertree `T(a, b, k)` and its powers.
//!
//! `T(a, b, k)` has `a` white vertices in a row and `b - a + k - 1` roots.
//! Every `k` consecutive whites form a red edge; root `i` forms a green edge
//! with the `(k-1)`-window of consecutive whites numbered
//! `floor(1 + (i-1)(a-k+2)/(b-a+k-2))`, except the last root, which takes
//! the last window `a-k+2`. That gives `b` edges on `b + k - 1` vertices and
//! edge density `b/a` over the whites.
//!
//! Vertex layout: whites are `0..a`, roots are `a..a+roots`.

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{limit, Error, Result};
use crate::hypergraph::{visit_inj, CanonicalForm, Hypergraph, RootedGraph, DEFAULT_CANON_LIMIT};

/// Shape parameters of `T(a, b, k)`; the exponent is `r = a / b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeParams {
    pub k: usize,
    pub a: usize,
    pub b: usize,
}

impl TreeParams {
    pub fn new(k: usize, a: usize, b: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!("k >= 2 violated: k = {k}")));
        }
        if a + 1 < k {
            return Err(Error::InvalidParams(format!(
                "a >= k - 1 violated: a = {a}, k = {k}"
            )));
        }
        if b <= a {
            return Err(Error::InvalidParams(format!("b > a violated: a = {a}, b = {b}")));
        }
        if b + k < a + 3 {
            return Err(Error::InvalidParams(format!(
                "b >= a - k + 3 violated: a = {a}, b = {b}, k = {k}"
            )));
        }
        Ok(TreeParams { k, a, b })
    }

    pub fn root_count(&self) -> usize {
        self.b + self.k - 1 - self.a
    }

    /// Number of `(k-1)`-windows of consecutive whites.
    pub fn window_count(&self) -> usize {
        self.a + 2 - self.k
    }

    pub fn red_count(&self) -> usize {
        self.a + 1 - self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.b + self.k - 1
    }

    /// 1-based window for 1-based root `i`.
    pub fn window_of_root(&self, i: usize) -> usize {
        let g = self.root_count();
        if i == g {
            return self.window_count();
        }
        let num = (i - 1) * (self.a + 2 - self.k);
        let den = self.b + self.k - 2 - self.a;
        1 + num / den
    }
}

/// One step of a hypertree construction: the edge and the `(k-1)`-set along
/// which it attaches (`None` for the seed edge).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStep {
    pub edge: Vec<u32>,
    pub attach: Option<Vec<u32>>,
}

impl BuildStep {
    /// The vertex this step introduces (the seed edge introduces all of its vertices).
    pub fn new_vertex(&self) -> Option<u32> {
        let attach = self.attach.as_ref()?;
        self.edge.iter().copied().find(|v| !attach.contains(v))
    }
}

/// A hypergraph together with a witnessed hypertree construction order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypertree {
    graph: Hypergraph,
    order: Vec<BuildStep>,
}

impl Hypertree {
    pub fn new(graph: Hypergraph, order: Vec<BuildStep>) -> Result<Self> {
        validate_order(&graph, &order)?;
        Ok(Hypertree { graph, order })
    }

    /// Finds a construction order greedily, trying every seed edge.
    pub fn from_graph(graph: Hypergraph) -> Result<Self> {
        let k = graph.k();
        for seed in 0..graph.n_edges() {
            let mut covered = vec![false; graph.n_vertices()];
            let mut used = vec![false; graph.n_edges()];
            let mut order = vec![BuildStep {
                edge: graph.edge(seed).to_vec(),
                attach: None,
            }];
            used[seed] = true;
            for &v in graph.edge(seed) {
                covered[v as usize] = true;
            }
            loop {
                let next = (0..graph.n_edges()).find_map(|ei| {
                    if used[ei] {
                        return None;
                    }
                    let e = graph.edge(ei);
                    let inside: Vec<u32> = e.iter().copied().filter(|&v| covered[v as usize]).collect();
                    if inside.len() != k - 1 {
                        return None;
                    }
                    let adjacent = order
                        .iter()
                        .any(|st| inside.iter().all(|v| st.edge.contains(v)));
                    adjacent.then_some((ei, inside))
                });
                match next {
                    Some((ei, inside)) => {
                        used[ei] = true;
                        for &v in graph.edge(ei) {
                            covered[v as usize] = true;
                        }
                        order.push(BuildStep {
                            edge: graph.edge(ei).to_vec(),
                            attach: Some(inside),
                        });
                    }
                    None => break,
                }
            }
            if order.len() == graph.n_edges() && covered.iter().all(|&c| c) {
                return Hypertree::new(graph, order);
            }
        }
        Err(Error::Domain("graph is not a hypertree".into()))
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn order(&self) -> &[BuildStep] {
        &self.order
    }
}

fn validate_order(graph: &Hypergraph, order: &[BuildStep]) -> Result<()> {
    let k = graph.k();
    let bad = |msg: String| Err(Error::Domain(format!("invalid build order: {msg}")));
    if order.len() != graph.n_edges() {
        return bad(format!("{} steps for {} edges", order.len(), graph.n_edges()));
    }
    let mut covered = vec![false; graph.n_vertices()];
    let mut seen = Vec::with_capacity(order.len());
    for (i, step) in order.iter().enumerate() {
        let mut e = step.edge.clone();
        e.sort_unstable();
        if !graph.has_sorted_edge(&e) {
            return bad(format!("step {i} edge {e:?} is not an edge"));
        }
        if seen.contains(&e) {
            return bad(format!("step {i} repeats edge {e:?}"));
        }
        match (&step.attach, i) {
            (None, 0) => {}
            (None, _) => return bad(format!("step {i} has no attachment set")),
            (Some(_), 0) => return bad("seed step has an attachment set".into()),
            (Some(att), _) => {
                if att.len() != k - 1 || !att.iter().all(|v| e.contains(v)) {
                    return bad(format!("step {i} attachment {att:?} is not a (k-1)-subset of its edge"));
                }
                let meet: Vec<u32> = e.iter().copied().filter(|&v| covered[v as usize]).collect();
                let mut att_sorted = att.clone();
                att_sorted.sort_unstable();
                if meet != att_sorted {
                    return bad(format!("step {i} meets earlier edges in {meet:?}, not {att:?}"));
                }
                if !seen.iter().any(|p: &Vec<u32>| att.iter().all(|v| p.contains(v))) {
                    return bad(format!("step {i} attachment {att:?} lies in no earlier edge"));
                }
            }
        }
        for &v in &e {
            covered[v as usize] = true;
        }
        seen.push(e);
    }
    if !covered.iter().all(|&c| c) {
        return bad("some vertex lies in no edge".into());
    }
    Ok(())
}

/// `T(a, b, k)` with its roots, whites and construction order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    params: TreeParams,
    rooted: RootedGraph,
    whites: Vec<u32>,
    order: Vec<BuildStep>,
    windows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSidecar {
    pub roots: Vec<u32>,
    pub whites: Vec<u32>,
    pub build_order: Vec<BuildStep>,
}

pub fn build_tree(p: TreeParams) -> Result<RootedTree> {
    let p = TreeParams::new(p.k, p.a, p.b)?;
    let (k, a) = (p.k, p.a);
    let g = p.root_count();
    let whites: Vec<u32> = (0..a as u32).collect();
    let roots: Vec<u32> = (a as u32..(a + g) as u32).collect();

    let mut order = Vec::with_capacity(p.b);
    for j in 0..p.red_count() {
        let edge: Vec<u32> = (j as u32..(j + k) as u32).collect();
        let attach = (j > 0).then(|| (j as u32..(j + k - 1) as u32).collect());
        order.push(BuildStep { edge, attach });
    }
    let mut windows = Vec::with_capacity(g);
    for i in 1..=g {
        let w = p.window_of_root(i);
        windows.push(w);
        let window: Vec<u32> = ((w - 1) as u32..(w - 1 + k - 1) as u32).collect();
        let mut edge = window.clone();
        edge.push(roots[i - 1]);
        let attach = (!order.is_empty()).then_some(window);
        order.push(BuildStep { edge, attach });
    }

    let mut partition = vec![0usize; a + g];
    for (j, part) in partition.iter_mut().enumerate().take(a) {
        *part = j % k;
    }
    for (i, &w) in windows.iter().enumerate() {
        partition[a + i] = (w - 1 + k - 1) % k;
    }
    let graph = Hypergraph::new(k, a + g, order.iter().map(|s| s.edge.clone()), Some(partition))?;
    validate_order(&graph, &order)?;
    Ok(RootedTree {
        params: p,
        rooted: RootedGraph::new(graph, roots)?,
        whites,
        order,
        windows,
    })
}

impl RootedTree {
    pub fn params(&self) -> TreeParams {
        self.params
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.rooted.graph
    }

    pub fn rooted(&self) -> &RootedGraph {
        &self.rooted
    }

    pub fn roots(&self) -> &[u32] {
        &self.rooted.roots
    }

    pub fn whites(&self) -> &[u32] {
        &self.whites
    }

    pub fn build_order(&self) -> &[BuildStep] {
        &self.order
    }

    /// 1-based window index of each root, in root order.
    pub fn root_windows(&self) -> &[usize] {
        &self.windows
    }

    pub fn hypertree(&self) -> Hypertree {
        Hypertree {
            graph: self.rooted.graph.clone(),
            order: self.order.clone(),
        }
    }

    pub fn sidecar(&self) -> TreeSidecar {
        TreeSidecar {
            roots: self.rooted.roots.clone(),
            whites: self.whites.clone(),
            build_order: self.order.clone(),
        }
    }

    /// Part label of every root in the k-partition of the tree.
    pub fn root_parts(&self) -> Vec<usize> {
        let parts = self.graph().partition().expect("trees carry a partition");
        self.roots().iter().map(|&r| parts[r as usize]).collect()
    }
}

/// Number of edges meeting `s`; `s` must avoid the roots.
pub fn epsilon(rg: &RootedGraph, s: &[u32]) -> Result<usize> {
    if let Some(r) = s.iter().find(|&&v| rg.is_root(v)) {
        return Err(Error::Domain(format!("vertex {r} is a root")));
    }
    Ok(rg
        .graph
        .edges()
        .iter()
        .filter(|e| e.iter().any(|v| s.contains(v)))
        .count())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub balanced: bool,
    /// Non-root subset minimizing `epsilon(S) / |S|` (first in subset order on ties).
    pub worst: Vec<u32>,
    pub worst_epsilon: usize,
    pub total_epsilon: usize,
    pub non_roots: usize,
}

pub const DEFAULT_BALANCE_LIMIT: usize = 20;

/// Exhaustive balancedness check over all nonempty non-root subsets.
pub fn check_balanced(rg: &RootedGraph, max_non_roots: usize) -> Result<BalanceReport> {
    let nr = rg.non_roots();
    let m = nr.len();
    if m > max_non_roots || m >= 32 {
        return Err(limit("balancedness non-root", max_non_roots as u128, m as u128));
    }
    if m == 0 {
        return Err(Error::Domain("rooted graph has no non-roots".into()));
    }
    let mut pos = HashMap::new();
    for (i, &v) in nr.iter().enumerate() {
        pos.insert(v, i);
    }
    let masks: Vec<u32> = rg
        .graph
        .edges()
        .iter()
        .map(|e| {
            e.iter()
                .filter_map(|v| pos.get(v))
                .fold(0u32, |acc, &i| acc | (1 << i))
        })
        .collect();
    let eps = |s: u32| masks.iter().filter(|&&em| em & s != 0).count();
    let full: u32 = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    let total = eps(full);

    let mut best = (usize::MAX, 1usize, 0u32);
    for s in 1..=full {
        let e = eps(s);
        let size = s.count_ones() as usize;
        // e / size < best.0 / best.1
        if best.0 == usize::MAX || e * best.1 < best.0 * size {
            best = (e, size, s);
        }
    }
    let (we, ws, wmask) = best;
    let worst = (0..m).filter(|i| wmask >> i & 1 == 1).map(|i| nr[i]).collect();
    Ok(BalanceReport {
        balanced: we * m >= total * ws,
        worst,
        worst_epsilon: we,
        total_epsilon: total,
        non_roots: m,
    })
}

/// A member of the power family: a union of copies of `T` sharing the root tuple.
#[derive(Clone, Debug)]
pub struct PowerMember {
    /// Roots occupy vertices `0..roots` in root order.
    pub rooted: RootedGraph,
    /// Smallest `t` with the member in `T^{<=t}`.
    pub min_s: usize,
    /// For each copy, the image of every tree vertex.
    pub copies: Vec<Vec<u32>>,
    pub canonical: CanonicalForm,
}

impl PowerMember {
    /// Whether the member inherits a k-partition from the tree (it does when
    /// every glued class joins whites with the same part label).
    pub fn part_consistent(&self) -> bool {
        self.rooted.graph.partition().is_some()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PowerLimits {
    /// Maximum `s * a` glued non-roots.
    pub max_glued: usize,
    pub canon_limit: usize,
}

impl Default for PowerLimits {
    fn default() -> Self {
        PowerLimits {
            max_glued: 12,
            canon_limit: DEFAULT_CANON_LIMIT,
        }
    }
}

pub fn enumerate_power(t: &RootedTree, s: usize, dedupe: bool) -> Result<Vec<PowerMember>> {
    let order: Vec<usize> = (0..s).collect();
    enumerate_power_with(t, s, dedupe, PowerLimits::default(), &order)
}

/// Enumerates all gluings of `s` copies of `t`, processing copies in
/// `copy_order`. With `dedupe`, keeps one member per root-fixing isomorphism
/// class (the first encountered).
pub fn enumerate_power_with(
    t: &RootedTree,
    s: usize,
    dedupe: bool,
    limits: PowerLimits,
    copy_order: &[usize],
) -> Result<Vec<PowerMember>> {
    if s == 0 {
        return Err(Error::Domain("power s must be >= 1".into()));
    }
    let mut sorted_order = copy_order.to_vec();
    sorted_order.sort_unstable();
    if sorted_order != (0..s).collect::<Vec<_>>() {
        return Err(Error::Domain(format!("copy order {copy_order:?} is not a permutation of 0..{s}")));
    }
    let a = t.params.a;
    if s * a > limits.max_glued {
        return Err(limit("glued non-root", limits.max_glued as u128, (s * a) as u128));
    }

    // Canonical forms of the lower levels, for the minimal tag.
    let mut lower: Vec<std::collections::HashSet<CanonicalForm>> = Vec::new();
    for level in 1..s {
        let ord: Vec<usize> = (0..level).collect();
        let forms = gluings(t, level, &ord, limits.canon_limit)?
            .into_iter()
            .map(|m| m.canonical)
            .collect();
        lower.push(forms);
    }

    let mut members = gluings(t, s, copy_order, limits.canon_limit)?;
    for m in &mut members {
        m.min_s = lower
            .iter()
            .position(|set| set.contains(&m.canonical))
            .map_or(s, |i| i + 1);
    }
    if dedupe {
        let mut seen = std::collections::HashSet::new();
        members.retain(|m| seen.insert(m.canonical.clone()));
    }
    Ok(members)
}

/// All set partitions of the `s * a` copy-whites with no class holding two
/// whites of one copy.
fn gluings(t: &RootedTree, s: usize, copy_order: &[usize], canon_limit: usize) -> Result<Vec<PowerMember>> {
    let a = t.params.a;
    let items: Vec<(usize, usize)> = copy_order
        .iter()
        .flat_map(|&c| (0..a).map(move |j| (c, j)))
        .collect();
    let mut out = Vec::new();
    let mut assign = vec![0usize; items.len()];
    let mut class_copies: Vec<u64> = Vec::new();
    fn rec(
        idx: usize,
        items: &[(usize, usize)],
        assign: &mut [usize],
        class_copies: &mut Vec<u64>,
        emit: &mut dyn FnMut(&[usize], usize) -> Result<()>,
    ) -> Result<()> {
        if idx == items.len() {
            return emit(assign, class_copies.len());
        }
        let bit = 1u64 << items[idx].0;
        for c in 0..class_copies.len() {
            if class_copies[c] & bit == 0 {
                class_copies[c] |= bit;
                assign[idx] = c;
                rec(idx + 1, items, assign, class_copies, emit)?;
                class_copies[c] &= !bit;
            }
        }
        class_copies.push(bit);
        assign[idx] = class_copies.len() - 1;
        rec(idx + 1, items, assign, class_copies, emit)?;
        class_copies.pop();
        Ok(())
    }
    let mut emit = |assign: &[usize], classes: usize| -> Result<()> {
        out.push(glue(t, s, &items, assign, classes, canon_limit)?);
        Ok(())
    };
    rec(0, &items, &mut assign, &mut class_copies, &mut emit)?;
    Ok(out)
}

fn glue(
    t: &RootedTree,
    s: usize,
    items: &[(usize, usize)],
    assign: &[usize],
    classes: usize,
    canon_limit: usize,
) -> Result<PowerMember> {
    let k = t.params.k;
    let g = t.params.root_count();
    let tree_n = t.graph().n_vertices();
    let tree_parts = t.graph().partition().expect("trees carry a partition");

    let mut copies = vec![vec![u32::MAX; tree_n]; s];
    for (i, &(c, j)) in items.iter().enumerate() {
        copies[c][t.whites[j] as usize] = (g + assign[i]) as u32;
    }
    for copy in copies.iter_mut() {
        for (ri, &r) in t.roots().iter().enumerate() {
            copy[r as usize] = ri as u32;
        }
    }
    let n = g + classes;
    let mut part = vec![usize::MAX; n];
    let mut consistent = true;
    for (ri, &r) in t.roots().iter().enumerate() {
        part[ri] = tree_parts[r as usize];
    }
    for (i, &(_, j)) in items.iter().enumerate() {
        let v = g + assign[i];
        let p = tree_parts[t.whites[j] as usize];
        if part[v] == usize::MAX {
            part[v] = p;
        } else if part[v] != p {
            consistent = false;
        }
    }
    let edges = copies.iter().flat_map(|copy| {
        t.graph()
            .edges()
            .iter()
            .map(move |e| e.iter().map(|&v| copy[v as usize]).collect::<Vec<u32>>())
    });
    let graph = Hypergraph::new(k, n, edges, consistent.then_some(part))?;
    let rooted = RootedGraph::new(graph, (0..g as u32).collect())?;
    let canonical = rooted.canonical_form(canon_limit)?;
    Ok(PowerMember {
        rooted,
        min_s: s,
        copies,
        canonical,
    })
}

/// `e(H) >= (|H| - |R|) * b / a`, compared exactly.
pub fn check_edge_bound(h: &RootedGraph, p: TreeParams) -> bool {
    let m = h.graph.n_vertices() - h.roots.len();
    h.graph.n_edges() * p.a >= m * p.b
}

/// Smallest number of root-respecting copies of `t` whose union is exactly
/// `u`, or `None` when `u` is not such a union.
pub fn minimal_power_tag(u: &RootedGraph, t: &RootedTree) -> Option<usize> {
    if u.roots.len() != t.roots().len() || u.graph.k() != t.params.k {
        return None;
    }
    let pattern = t.graph().without_partition();
    let host = u.graph.without_partition();
    let constraint: Vec<(u32, u32)> = t.roots().iter().copied().zip(u.roots.iter().copied()).collect();
    let e = host.n_edges();
    let mut sets: BTreeMap<Vec<usize>, FixedBitSet> = BTreeMap::new();
    visit_inj(&pattern, &host, &constraint, |img| {
        let mut idx: Vec<usize> = pattern
            .edges()
            .iter()
            .map(|pe| {
                let mut im: Vec<u32> = pe.iter().map(|&v| img[v as usize]).collect();
                im.sort_unstable();
                host.edge_index(&im).expect("homomorphic image is an edge")
            })
            .collect();
        idx.sort_unstable();
        let mut bits = FixedBitSet::with_capacity(e);
        for &i in &idx {
            bits.insert(i);
        }
        sets.insert(idx, bits);
        ControlFlow::Continue(())
    });
    let copies: Vec<FixedBitSet> = sets.into_values().collect();
    let mut all = FixedBitSet::with_capacity(e);
    for c in &copies {
        all.union_with(c);
    }
    if all.count_ones(..) != e || e == 0 {
        return None;
    }
    let covered_vertices = (0..host.n_vertices() as u32).all(|v| host.degree(v) > 0);
    if !covered_vertices {
        return None;
    }
    fn cover(copies: &[FixedBitSet], covered: &FixedBitSet, e: usize, budget: usize) -> bool {
        let Some(first) = (0..e).find(|&i| !covered.contains(i)) else {
            return true;
        };
        if budget == 0 {
            return false;
        }
        copies.iter().filter(|c| c.contains(first)).any(|c| {
            let mut next = covered.clone();
            next.union_with(c);
            cover(copies, &next, e, budget - 1)
        })
    }
    (1..=copies.len()).find(|&t| cover(&copies, &FixedBitSet::with_capacity(e), e, t))
}
