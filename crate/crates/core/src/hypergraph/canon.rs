//! Canonical forms for small hypergraphs by exhaustive relabeling.
//!
//! Vertices are first split into cells by iterated color refinement (initial
//! color, then the multiset of co-edge colors); the canonical form is the
//! lexicographically least relabeled edge list over all permutations that
//! keep every vertex inside its cell.

use serde::{Deserialize, Serialize};

use super::Hypergraph;
use crate::error::{limit, Result};

pub const DEFAULT_CANON_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm(pub Vec<u8>);

pub fn canonical_form(g: &Hypergraph, max_vertices: usize) -> Result<CanonicalForm> {
    canonical_form_colored(g, &vec![0; g.n_vertices()], max_vertices)
}

/// Canonical form under color-preserving relabelings. Equal forms mean
/// isomorphic (with colors), for graphs with at most `max_vertices` vertices.
pub fn canonical_form_colored(g: &Hypergraph, colors: &[u32], max_vertices: usize) -> Result<CanonicalForm> {
    let n = g.n_vertices();
    if n > max_vertices || n > u8::MAX as usize {
        return Err(limit("canonicalization vertex", max_vertices as u128, n as u128));
    }
    assert_eq!(colors.len(), n, "one color per vertex");

    let ranks = refine(g, colors);
    let mut by_rank: Vec<u32> = (0..n as u32).collect();
    by_rank.sort_by_key(|&v| (ranks[v as usize], v));
    // cell boundaries over positions
    let cell_of_pos: Vec<usize> = by_rank.iter().map(|&v| ranks[v as usize]).collect();

    let mut best: Option<Vec<u8>> = None;
    let mut label = vec![u8::MAX; n];
    let mut used = vec![false; n];
    search(g, &by_rank, &cell_of_pos, &ranks, 0, &mut label, &mut used, &mut best);

    let mut sorted_colors = colors.to_vec();
    sorted_colors.sort_unstable();
    let mut out = Vec::with_capacity(2 + 4 * n + n + g.n_edges() * g.k());
    out.push(g.k() as u8);
    out.push(n as u8);
    for c in sorted_colors {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out.extend(cell_of_pos.iter().map(|&r| r as u8));
    out.extend(best.unwrap_or_default());
    Ok(CanonicalForm(out))
}

#[allow(clippy::too_many_arguments)]
fn search(
    g: &Hypergraph,
    by_rank: &[u32],
    cell_of_pos: &[usize],
    ranks: &[usize],
    pos: usize,
    label: &mut [u8],
    used: &mut [bool],
    best: &mut Option<Vec<u8>>,
) {
    let n = by_rank.len();
    if pos == n {
        let mut edges: Vec<Vec<u8>> = g
            .edges()
            .iter()
            .map(|e| {
                let mut r: Vec<u8> = e.iter().map(|&v| label[v as usize]).collect();
                r.sort_unstable();
                r
            })
            .collect();
        edges.sort_unstable();
        let flat: Vec<u8> = edges.concat();
        if best.as_ref().is_none_or(|b| flat < *b) {
            *best = Some(flat);
        }
        return;
    }
    let cell = cell_of_pos[pos];
    for v in 0..n {
        if used[v] || ranks[v] != cell {
            continue;
        }
        used[v] = true;
        label[v] = pos as u8;
        search(g, by_rank, cell_of_pos, ranks, pos + 1, label, used, best);
        used[v] = false;
    }
}

/// Stable color refinement; returns dense canonical ranks.
fn refine(g: &Hypergraph, colors: &[u32]) -> Vec<usize> {
    let n = g.n_vertices();
    let mut ranks = dense_ranks(&colors.iter().map(|&c| vec![c as usize]).collect::<Vec<_>>());
    loop {
        let sigs: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                let mut co: Vec<Vec<usize>> = g
                    .incident(v as u32)
                    .ones()
                    .map(|ei| {
                        let mut r: Vec<usize> = g
                            .edge(ei)
                            .iter()
                            .filter(|&&u| u as usize != v)
                            .map(|&u| ranks[u as usize])
                            .collect();
                        r.sort_unstable();
                        r
                    })
                    .collect();
                co.sort_unstable();
                let mut sig = vec![ranks[v], co.len()];
                for c in co {
                    sig.extend(c);
                }
                sig
            })
            .collect();
        let next = dense_ranks(&sigs);
        let classes = |r: &[usize]| r.iter().max().map_or(0, |m| m + 1);
        if classes(&next) == classes(&ranks) {
            return next;
        }
        ranks = next;
    }
}

fn dense_ranks(sigs: &[Vec<usize>]) -> Vec<usize> {
    let mut uniq: Vec<&Vec<usize>> = sigs.iter().collect();
    uniq.sort();
    uniq.dedup();
    sigs.iter()
        .map(|s| uniq.binary_search(&s).expect("present"))
        .collect()
}
