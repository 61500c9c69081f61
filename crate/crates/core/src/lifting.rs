//! Lifting `l`-uniform families to `k`-uniform ones, sunflowers, and an
//! exact Turán-number oracle for tiny instances.
//!
//! The lifted family is never materialized. A k-graph `G` contains one of
//! its members iff either some `<= l+2` edges of `G` have common intersection
//! smaller than `k-l`, or all edges share a `(k-l)`-set `S` and the
//! `l`-uniform residue `{e \ S}` contains a base member.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::binomial;
use crate::hypergraph::{all_k_subsets, contains_any, visit_inj, Hypergraph};

/// A base family of `l`-graphs, each with two disjoint edges, lifted to arity `k`.
#[derive(Clone, Debug)]
pub struct LiftedFamilySpec {
    base: Vec<Hypergraph>,
    k: usize,
    l: usize,
}

impl LiftedFamilySpec {
    pub fn new(base: Vec<Hypergraph>, k: usize, l: usize) -> Result<Self> {
        if l < 2 || k <= l {
            return Err(Error::InvalidParams(format!("need k > l >= 2, got k = {k}, l = {l}")));
        }
        for (i, f) in base.iter().enumerate() {
            if f.k() != l {
                return Err(Error::InvalidParams(format!("member {i} has arity {}, expected {l}", f.k())));
            }
            if !has_disjoint_pair(f) {
                return Err(Error::InvalidParams(format!("member {i} has no two disjoint edges")));
            }
        }
        Ok(LiftedFamilySpec { base, k, l })
    }

    pub fn base(&self) -> &[Hypergraph] {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }
}

fn has_disjoint_pair(f: &Hypergraph) -> bool {
    let es = f.edges();
    es.iter()
        .enumerate()
        .any(|(i, a)| es[i + 1..].iter().any(|b| a.iter().all(|v| !b.contains(v))))
}

/// Adds `k - l` fresh apex vertices (numbered after `F`'s) to every edge.
pub fn lift_member(f: &Hypergraph, k: usize) -> Result<Hypergraph> {
    let l = f.k();
    if k <= l {
        return Err(Error::InvalidParams(format!("target arity {k} must exceed {l}")));
    }
    let n = f.n_vertices();
    let apex: Vec<u32> = (n as u32..(n + k - l) as u32).collect();
    let edges = f.edges().iter().map(|e| {
        let mut e = e.to_vec();
        e.extend(&apex);
        e
    });
    Hypergraph::new(k, n + k - l, edges, None)
}

/// Vertices common to every edge (all vertices for an edgeless graph).
fn global_intersection(g: &Hypergraph) -> Vec<u32> {
    match g.edges().first() {
        None => (0..g.n_vertices() as u32).collect(),
        Some(first) => first
            .iter()
            .copied()
            .filter(|v| g.edges().iter().all(|e| e.contains(v)))
            .collect(),
    }
}

/// At most `l + 2` edges whose common intersection has fewer than `k - l`
/// vertices, found by repeatedly adding an edge that misses part of the
/// running intersection.
pub fn wrong_form_witness(g: &Hypergraph, l: usize) -> Option<Vec<usize>> {
    let k = g.k();
    let first = g.edges().first()?;
    let mut chosen = vec![0usize];
    let mut common: Vec<u32> = first.to_vec();
    while common.len() + l >= k {
        let next = (0..g.n_edges()).find(|&i| !common.iter().all(|v| g.edge(i).contains(v)))?;
        common.retain(|v| g.edge(next).contains(v));
        chosen.push(next);
    }
    debug_assert!(chosen.len() <= l + 2);
    Some(chosen)
}

/// True iff `g` contains no member of the lifted family.
pub fn lifted_freeness_check(g: &Hypergraph, spec: &LiftedFamilySpec) -> bool {
    if g.k() != spec.k || g.n_edges() == 0 {
        return true;
    }
    let g = g.without_partition();
    if wrong_form_witness(&g, spec.l).is_some() {
        return false;
    }
    let common = global_intersection(&g);
    for s in all_k_subsets(common.len(), spec.k - spec.l) {
        let apex: Vec<u32> = s.iter().map(|&i| common[i as usize]).collect();
        let residue = g.edges().iter().map(|e| e.iter().copied().filter(|v| !apex.contains(v)).collect::<Vec<u32>>());
        let residue = Hypergraph::new(spec.l, g.n_vertices(), residue, None).expect("residue edges have l vertices");
        if contains_any(&residue, &spec.base).is_some() {
            return false;
        }
    }
    true
}

/// Decides freeness of hypergraphs for the Turán oracle. Freeness must be
/// inherited by subgraphs.
pub trait FreenessOracle {
    fn arity(&self) -> usize;

    fn is_free(&self, g: &Hypergraph) -> bool;

    /// Given free `g`, whether `g + e` is still free.
    fn stays_free(&self, g: &Hypergraph, e: &[u32]) -> bool {
        match g.with_edge(e.to_vec()) {
            Ok(h) => self.is_free(&h),
            Err(_) => false,
        }
    }
}

/// Freeness from an explicit finite family.
#[derive(Clone, Debug)]
pub struct FamilyOracle {
    k: usize,
    family: Vec<Hypergraph>,
}

impl FamilyOracle {
    pub fn new(k: usize, family: Vec<Hypergraph>) -> Result<Self> {
        if let Some(f) = family.iter().find(|f| f.k() != k) {
            return Err(Error::InvalidParams(format!("family member of arity {} in a {k}-uniform family", f.k())));
        }
        let family = family.iter().map(|f| f.without_partition()).collect();
        Ok(FamilyOracle { k, family })
    }
}

impl FreenessOracle for FamilyOracle {
    fn arity(&self) -> usize {
        self.k
    }

    fn is_free(&self, g: &Hypergraph) -> bool {
        contains_any(g, &self.family).is_none()
    }

    /// Only copies through the new edge need checking.
    fn stays_free(&self, g: &Hypergraph, e: &[u32]) -> bool {
        let Ok(h) = g.with_edge(e.to_vec()) else {
            return false;
        };
        let mut sorted = e.to_vec();
        sorted.sort_unstable();
        for f in &self.family {
            if f.n_edges() == 0 {
                if f.n_vertices() <= h.n_vertices() {
                    return false;
                }
                continue;
            }
            for fe in f.edges() {
                // map fe onto e in every order
                let mut found = false;
                for_each_perm(&sorted, &mut |perm| {
                    if found {
                        return;
                    }
                    let constraint: Vec<(u32, u32)> = fe.iter().copied().zip(perm.iter().copied()).collect();
                    visit_inj(f, &h, &constraint, |_| {
                        found = true;
                        ControlFlow::Break(())
                    });
                });
                if found {
                    return false;
                }
            }
        }
        true
    }
}

impl FreenessOracle for LiftedFamilySpec {
    fn arity(&self) -> usize {
        self.k
    }

    fn is_free(&self, g: &Hypergraph) -> bool {
        lifted_freeness_check(g, self)
    }
}

fn for_each_perm(e: &[u32], f: &mut dyn FnMut(&[u32])) {
    fn rec(cur: &mut Vec<u32>, used: &mut Vec<bool>, e: &[u32], f: &mut dyn FnMut(&[u32])) {
        if cur.len() == e.len() {
            f(cur);
            return;
        }
        for i in 0..e.len() {
            if !used[i] {
                used[i] = true;
                cur.push(e[i]);
                rec(cur, used, e, f);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(&mut Vec::new(), &mut vec![false; e.len()], e, f);
}

pub const EXHAUSTIVE_LIMIT: usize = 24;
pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExResult {
    pub n: usize,
    pub k: usize,
    pub ex: usize,
    pub witness: Vec<Vec<u32>>,
    /// `exhaustive` or `branch-and-bound`.
    pub mode: String,
    pub nodes: u64,
}

pub fn exact_ex(n: usize, family: &[Hypergraph], k: usize) -> Result<ExResult> {
    exact_ex_with(n, &FamilyOracle::new(k, family.to_vec())?, DEFAULT_NODE_BUDGET)
}

/// Maximum edge count of a free k-graph on `n` labeled vertices. Searches
/// include/exclude decisions over the k-sets in lexicographic order;
/// above [`EXHAUSTIVE_LIMIT`] k-sets, branches that cannot beat the
/// incumbent even with every remaining k-set are cut.
pub fn exact_ex_with(n: usize, oracle: &dyn FreenessOracle, budget: u64) -> Result<ExResult> {
    let k = oracle.arity();
    if n < k {
        return Err(Error::InvalidParams(format!("need n >= k, got n = {n}, k = {k}")));
    }
    let total = binomial(n as u64, k as u64);
    if total > 128 {
        return Err(crate::error::limit("oracle k-set", 128u128, total));
    }
    let sets = all_k_subsets(n, k);
    let exhaustive = sets.len() <= EXHAUSTIVE_LIMIT;
    let empty = Hypergraph::empty(k, n)?;
    if !oracle.is_free(&empty) {
        return Ok(ExResult {
            n,
            k,
            ex: 0,
            witness: Vec::new(),
            mode: mode_name(exhaustive),
            nodes: 0,
        });
    }
    let mut s = Search {
        oracle,
        sets: &sets,
        exhaustive,
        best: Vec::new(),
        nodes: 0,
        budget,
    };
    s.rec(0, &empty, &mut Vec::new())?;
    Ok(ExResult {
        n,
        k,
        ex: s.best.len(),
        witness: s.best.iter().map(|&i| sets[i].clone()).collect(),
        mode: mode_name(exhaustive),
        nodes: s.nodes,
    })
}

fn mode_name(exhaustive: bool) -> String {
    if exhaustive { "exhaustive" } else { "branch-and-bound" }.into()
}

struct Search<'a> {
    oracle: &'a dyn FreenessOracle,
    sets: &'a [Vec<u32>],
    exhaustive: bool,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn rec(&mut self, i: usize, g: &Hypergraph, chosen: &mut Vec<usize>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
                lower: self.best.len(),
                upper: self.sets.len(),
            });
        }
        if chosen.len() > self.best.len() {
            self.best = chosen.clone();
        }
        if i == self.sets.len() {
            return Ok(());
        }
        if !self.exhaustive && chosen.len() + (self.sets.len() - i) <= self.best.len() {
            return Ok(());
        }
        if self.oracle.stays_free(g, &self.sets[i]) {
            let h = g.with_edge(self.sets[i].clone())?;
            chosen.push(i);
            self.rec(i + 1, &h, chosen)?;
            chosen.pop();
        }
        self.rec(i + 1, g, chosen)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma9Row {
    pub n: usize,
    pub ex_base: usize,
    pub ex_lifted: usize,
    pub equal: bool,
}

/// `ex(n, F)` against `ex(n + k - l, F')` for each `n` in the range.
pub fn verify_lemma9(base: &[Hypergraph], k: usize, l: usize, n_range: std::ops::RangeInclusive<usize>) -> Result<Vec<Lemma9Row>> {
    let spec = LiftedFamilySpec::new(base.to_vec(), k, l)?;
    let base_oracle = FamilyOracle::new(l, base.to_vec())?;
    n_range
        .map(|n| {
            let ex_base = exact_ex_with(n, &base_oracle, DEFAULT_NODE_BUDGET)?.ex;
            let ex_lifted = exact_ex_with(n + k - l, &spec, DEFAULT_NODE_BUDGET)?.ex;
            Ok(Lemma9Row { n, ex_base, ex_lifted, equal: ex_base == ex_lifted })
        })
        .collect()
}

/// A sunflower: kernel `0..t` and `petals` disjoint petals of size `k - t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sunflower {
    pub k: usize,
    pub kernel_size: usize,
    pub petal_count: usize,
}

impl Sunflower {
    pub fn new(k: usize, t: usize, petals: usize) -> Result<Self> {
        if k < 2 || t >= k {
            return Err(Error::Domain(format!("need k >= 2 and 0 <= t <= k - 1, got k = {k}, t = {t}")));
        }
        Ok(Sunflower { k, kernel_size: t, petal_count: petals })
    }

    pub fn vertex_count(&self) -> usize {
        self.kernel_size + self.petal_count * (self.k - self.kernel_size)
    }

    pub fn graph(&self, n: usize) -> Result<Hypergraph> {
        if n < self.vertex_count() {
            return Err(Error::Domain(format!("{n} vertices cannot hold {} sunflower vertices", self.vertex_count())));
        }
        let (k, t) = (self.k, self.kernel_size);
        let edges = (0..self.petal_count).map(|i| {
            let mut e: Vec<u32> = (0..t as u32).collect();
            let start = t + i * (k - t);
            e.extend(start as u32..(start + k - t) as u32);
            e
        });
        Hypergraph::new(k, n, edges, None)
    }
}

/// Kernel `0..t` and `floor((n - t) / (k - t))` petals on `n` vertices.
pub fn build_sunflower(k: usize, t: usize, n: usize) -> Result<Hypergraph> {
    if n < k {
        return Err(Error::Domain(format!("need n >= k, got n = {n}, k = {k}")));
    }
    let s = Sunflower::new(k, t, 0)?;
    Sunflower { petal_count: (n - t) / (k - t), ..s }.graph(n)
}

/// The common pairwise intersection, if every pair of edges meets in exactly it.
pub fn sunflower_kernel(g: &Hypergraph) -> Option<Vec<u32>> {
    let es = g.edges();
    if es.len() < 2 {
        return None;
    }
    let meet = |a: &[u32], b: &[u32]| a.iter().copied().filter(|v| b.contains(v)).collect::<Vec<u32>>();
    let kernel = meet(&es[0], &es[1]);
    for i in 0..es.len() {
        for j in i + 1..es.len() {
            if meet(&es[i], &es[j]) != kernel {
                return None;
            }
        }
    }
    Some(kernel)
}
