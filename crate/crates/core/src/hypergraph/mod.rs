//! k-uniform hypergraphs with dense vertex ids.
//!
//! Edges are kept as sorted vertex arrays in lexicographic order. Alongside the
//! edge list every graph carries a hash index for membership tests and one
//! bitset per vertex marking the edges incident to it; the embedding search
//! intersects those bitsets to generate candidates.

mod canon;
mod embed;

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use canon::{canonical_form, canonical_form_colored, CanonicalForm, DEFAULT_CANON_LIMIT};
pub use embed::{
    contains_any, count_homs, count_inj, enumerate_homs, enumerate_inj, visit_homs, visit_inj,
    HomMap,
};

/// A k-uniform hypergraph on vertices `0..n`.
#[derive(Clone)]
pub struct Hypergraph {
    k: usize,
    n: usize,
    edges: Vec<Box<[u32]>>,
    partition: Option<Vec<usize>>,
    index: HashMap<Box<[u32]>, usize>,
    incidence: Vec<FixedBitSet>,
}

/// Interchange form used by every CLI subcommand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub k: usize,
    pub n: usize,
    pub edges: Vec<Vec<u32>>,
    pub partition: Option<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a hypergraph, sorting and deduplicating the edges.
    pub fn new(
        k: usize,
        n: usize,
        edges: impl IntoIterator<Item = Vec<u32>>,
        partition: Option<Vec<usize>>,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!("arity k must be >= 2, got {k}")));
        }
        let mut sorted: Vec<Box<[u32]>> = Vec::new();
        for mut e in edges {
            e.sort_unstable();
            if e.len() != k {
                return Err(Error::Domain(format!(
                    "edge {e:?} has {} vertices, expected {k}",
                    e.len()
                )));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Domain(format!("edge {e:?} repeats a vertex")));
            }
            if let Some(&v) = e.iter().find(|&&v| v as usize >= n) {
                return Err(Error::Domain(format!("vertex {v} out of range for n = {n}")));
            }
            sorted.push(e.into_boxed_slice());
        }
        sorted.sort_unstable();
        sorted.dedup();

        if let Some(parts) = &partition {
            if parts.len() != n {
                return Err(Error::Domain(format!(
                    "partition has {} labels for {n} vertices",
                    parts.len()
                )));
            }
            if let Some(p) = parts.iter().find(|&&p| p >= k) {
                return Err(Error::Domain(format!("part label {p} not in [0, {k})")));
            }
            for e in &sorted {
                let mut seen = vec![false; k];
                for &v in e.iter() {
                    let p = parts[v as usize];
                    if seen[p] {
                        return Err(Error::Domain(format!(
                            "edge {e:?} has two vertices in part {p}"
                        )));
                    }
                    seen[p] = true;
                }
            }
        }

        let index = sorted
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let mut incidence = vec![FixedBitSet::with_capacity(sorted.len()); n];
        for (i, e) in sorted.iter().enumerate() {
            for &v in e.iter() {
                incidence[v as usize].insert(i);
            }
        }
        Ok(Hypergraph {
            k,
            n,
            edges: sorted,
            partition,
            index,
            incidence,
        })
    }

    pub fn empty(k: usize, n: usize) -> Result<Self> {
        Self::new(k, n, Vec::new(), None)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Box<[u32]>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &[u32] {
        &self.edges[i]
    }

    pub fn partition(&self) -> Option<&[usize]> {
        self.partition.as_deref()
    }

    /// Membership test for a vertex set given in any order.
    pub fn has_edge(&self, vertices: &[u32]) -> bool {
        if vertices.len() != self.k {
            return false;
        }
        let mut buf: Vec<u32> = vertices.to_vec();
        buf.sort_unstable();
        self.index.contains_key(buf.as_slice())
    }

    /// Membership test for an already sorted vertex set.
    pub fn has_sorted_edge(&self, sorted: &[u32]) -> bool {
        self.index.contains_key(sorted)
    }

    pub fn edge_index(&self, sorted: &[u32]) -> Option<usize> {
        self.index.get(sorted).copied()
    }

    /// Edges incident to `v`, as a bitset over edge indices.
    pub fn incident(&self, v: u32) -> &FixedBitSet {
        &self.incidence[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.incidence[v as usize].count_ones(..)
    }

    /// Number of ordered edges, `k! * e(G)`.
    pub fn ordered_edge_count(&self) -> u128 {
        factorial(self.k) * self.edges.len() as u128
    }

    pub fn without_partition(&self) -> Self {
        let mut g = self.clone();
        g.partition = None;
        g
    }

    pub fn with_partition(&self, partition: Vec<usize>) -> Result<Self> {
        Self::new(
            self.k,
            self.n,
            self.edges.iter().map(|e| e.to_vec()),
            Some(partition),
        )
    }

    /// A copy with one more edge.
    pub fn with_edge(&self, edge: Vec<u32>) -> Result<Self> {
        let edges = self.edges.iter().map(|e| e.to_vec()).chain(std::iter::once(edge));
        Self::new(self.k, self.n, edges, self.partition.clone())
    }

    /// Relabels vertices through `map` (old id -> new id) onto `n` vertices.
    pub fn relabel(&self, map: &[u32], n: usize) -> Result<Self> {
        let edges = self
            .edges
            .iter()
            .map(|e| e.iter().map(|&v| map[v as usize]).collect::<Vec<_>>());
        Self::new(self.k, n, edges, None)
    }

    /// Vertex-disjoint union; the second graph's ids are shifted by `self.n`.
    pub fn disjoint_union(&self, other: &Hypergraph) -> Result<Self> {
        if self.k != other.k {
            return Err(Error::Domain("arity mismatch in disjoint union".into()));
        }
        let shift = self.n as u32;
        let edges = self.edges.iter().map(|e| e.to_vec()).chain(
            other
                .edges
                .iter()
                .map(|e| e.iter().map(|&v| v + shift).collect()),
        );
        Self::new(self.k, self.n + other.n, edges, None)
    }

    pub fn to_json(&self) -> HypergraphJson {
        HypergraphJson {
            k: self.k,
            n: self.n,
            edges: self.edges.iter().map(|e| e.to_vec()).collect(),
            partition: self.partition.clone(),
        }
    }

    pub fn from_json(j: &HypergraphJson) -> Result<Self> {
        Self::new(j.k, j.n, j.edges.iter().cloned(), j.partition.clone())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("hypergraph serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: HypergraphJson = serde_json::from_str(s)?;
        Self::from_json(&j)
    }

    // Small named patterns.

    /// One edge on vertices `0..k`.
    pub fn single_edge(k: usize) -> Self {
        Self::new(k, k, vec![(0..k as u32).collect()], None).expect("valid edge")
    }

    /// Graph path with `len` edges: 0-1-...-len.
    pub fn path(len: usize) -> Self {
        let edges = (0..len as u32).map(|i| vec![i, i + 1]);
        Self::new(2, len + 1, edges, None).expect("valid path")
    }

    /// Two graph edges sharing vertex 0.
    pub fn cherry() -> Self {
        Self::new(2, 3, vec![vec![0, 1], vec![0, 2]], None).expect("valid cherry")
    }

    pub fn triangle() -> Self {
        Self::new(2, 3, vec![vec![0, 1], vec![1, 2], vec![0, 2]], None).expect("valid triangle")
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges = (1..=leaves as u32).map(|v| vec![0, v]);
        Self::new(2, leaves + 1, edges, None).expect("valid star")
    }

    /// Two disjoint edges of arity `k`.
    pub fn matching(k: usize, edges: usize) -> Self {
        let es = (0..edges).map(|i| ((i * k) as u32..((i + 1) * k) as u32).collect());
        Self::new(k, k * edges, es, None).expect("valid matching")
    }

    /// Uniformly random k-graph on `n` vertices with exactly `m` edges.
    pub fn random<R: Rng + ?Sized>(k: usize, n: usize, m: usize, rng: &mut R) -> Result<Self> {
        let all = all_k_subsets(n, k);
        if m > all.len() {
            return Err(Error::Domain(format!(
                "cannot place {m} edges among {} possible",
                all.len()
            )));
        }
        let chosen = sample(rng, all.len(), m);
        Self::new(k, n, chosen.into_iter().map(|i| all[i].clone()), None)
    }
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.n == other.n
            && self.edges == other.edges
            && self.partition == other.partition
    }
}

impl Eq for Hypergraph {}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hypergraph")
            .field("k", &self.k)
            .field("n", &self.n)
            .field("edges", &self.edges)
            .field("partition", &self.partition)
            .finish()
    }
}

pub(crate) fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn all_k_subsets(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: u32, n: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = (k - cur.len()) as u32;
        let mut v = start;
        while v + need <= n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
            v += 1;
        }
    }
    rec(0, n as u32, k, &mut cur, &mut out);
    out
}

/// A hypergraph with an ordered tuple of distinguished root vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    pub graph: Hypergraph,
    pub roots: Vec<u32>,
}

impl RootedGraph {
    pub fn new(graph: Hypergraph, roots: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; graph.n_vertices()];
        for &r in &roots {
            let slot = seen
                .get_mut(r as usize)
                .ok_or_else(|| Error::Domain(format!("root {r} out of range")))?;
            if *slot {
                return Err(Error::Domain(format!("root {r} listed twice")));
            }
            *slot = true;
        }
        Ok(RootedGraph { graph, roots })
    }

    pub fn is_root(&self, v: u32) -> bool {
        self.roots.contains(&v)
    }

    /// Vertices that are not roots, ascending.
    pub fn non_roots(&self) -> Vec<u32> {
        (0..self.graph.n_vertices() as u32)
            .filter(|v| !self.is_root(*v))
            .collect()
    }

    /// Canonical form under isomorphisms fixing every root pointwise.
    pub fn canonical_form(&self, limit: usize) -> Result<CanonicalForm> {
        let mut colors = vec![0u32; self.graph.n_vertices()];
        for (i, &r) in self.roots.iter().enumerate() {
            colors[r as usize] = i as u32 + 1;
        }
        canonical_form_colored(&self.graph, &colors, limit)
    }
}
