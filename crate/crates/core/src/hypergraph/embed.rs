//! Backtracking enumeration of homomorphisms and injective embeddings.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::Hypergraph;

const UNSET: u32 = u32::MAX;

/// A vertex map from a pattern into a host, indexed by pattern vertex id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomMap {
    pub image: Vec<u32>,
}

impl HomMap {
    pub fn pattern_size(&self) -> usize {
        self.image.len()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen: Vec<u32> = self.image.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// True if every pattern edge lands on a host edge.
    pub fn is_hom(&self, pattern: &Hypergraph, host: &Hypergraph) -> bool {
        pattern.edges().iter().all(|e| {
            let img: Vec<u32> = e.iter().map(|&v| self.image[v as usize]).collect();
            host.has_edge(&img)
        })
    }
}

struct Plan {
    order: Vec<u32>,
    fixed: Vec<Option<u32>>,
    anchor: Vec<Vec<u32>>,
    checks: Vec<Vec<usize>>,
}

impl Plan {
    /// Constrained vertices first, then repeatedly the vertex sharing an edge
    /// with the most already-placed vertices (smallest id on ties).
    fn new(h: &Hypergraph, constraint: &[(u32, u32)]) -> Option<Plan> {
        let n = h.n_vertices();
        let mut pos = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut fixed = Vec::with_capacity(n);
        for &(p, x) in constraint {
            let pi = p as usize;
            if pi >= n {
                return None;
            }
            if pos[pi] != usize::MAX {
                if fixed[pos[pi]] != Some(x) {
                    return None;
                }
                continue;
            }
            pos[pi] = order.len();
            order.push(p);
            fixed.push(Some(x));
        }
        while order.len() < n {
            let mut best: Option<(usize, u32)> = None;
            for v in 0..n as u32 {
                if pos[v as usize] != usize::MAX {
                    continue;
                }
                let score = h
                    .incident(v)
                    .ones()
                    .map(|ei| {
                        h.edge(ei)
                            .iter()
                            .filter(|&&u| pos[u as usize] != usize::MAX)
                            .count()
                    })
                    .max()
                    .unwrap_or(0);
                if best.is_none_or(|(s, _)| score > s) {
                    best = Some((score, v));
                }
            }
            let (_, v) = best.expect("an unplaced vertex exists");
            pos[v as usize] = order.len();
            order.push(v);
            fixed.push(None);
        }

        let mut anchor = vec![Vec::new(); n];
        for (i, &v) in order.iter().enumerate() {
            if fixed[i].is_some() {
                continue;
            }
            for ei in h.incident(v).ones() {
                let placed: Vec<u32> = h
                    .edge(ei)
                    .iter()
                    .copied()
                    .filter(|&u| pos[u as usize] < i)
                    .collect();
                if placed.len() > anchor[i].len() {
                    anchor[i] = placed;
                }
            }
        }
        let mut checks = vec![Vec::new(); n];
        for (ei, e) in h.edges().iter().enumerate() {
            let last = e.iter().map(|&u| pos[u as usize]).max().expect("non-empty edge");
            checks[last].push(ei);
        }
        Some(Plan {
            order,
            fixed,
            anchor,
            checks,
        })
    }
}

struct Search<'a> {
    h: &'a Hypergraph,
    x: &'a Hypergraph,
    plan: Plan,
    injective: bool,
    parts: Option<(&'a [usize], &'a [usize])>,
    image: Vec<u32>,
    used: FixedBitSet,
    edge_buf: Vec<u32>,
}

impl<'a> Search<'a> {
    fn edge_ok(&mut self, ei: usize) -> bool {
        self.edge_buf.clear();
        self.edge_buf
            .extend(self.h.edge(ei).iter().map(|&v| self.image[v as usize]));
        self.edge_buf.sort_unstable();
        if self.edge_buf.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        self.x.has_sorted_edge(&self.edge_buf)
    }

    fn candidates(&self, depth: usize) -> Vec<u32> {
        if let Some(x) = self.plan.fixed[depth] {
            return if (x as usize) < self.x.n_vertices() {
                vec![x]
            } else {
                Vec::new()
            };
        }
        let anchor = &self.plan.anchor[depth];
        if anchor.is_empty() {
            return (0..self.x.n_vertices() as u32).collect();
        }
        let anchor_img: Vec<u32> = anchor.iter().map(|&u| self.image[u as usize]).collect();
        let mut edges = self.x.incident(anchor_img[0]).clone();
        for &a in &anchor_img[1..] {
            edges.intersect_with(self.x.incident(a));
        }
        let mut verts = FixedBitSet::with_capacity(self.x.n_vertices());
        for ei in edges.ones() {
            for &u in self.x.edge(ei) {
                verts.insert(u as usize);
            }
        }
        for &a in &anchor_img {
            verts.set(a as usize, false);
        }
        verts.ones().map(|u| u as u32).collect()
    }

    fn run<F: FnMut(&[u32]) -> ControlFlow<()>>(&mut self, depth: usize, f: &mut F) -> ControlFlow<()> {
        if depth == self.plan.order.len() {
            return f(&self.image);
        }
        let v = self.plan.order[depth] as usize;
        for c in self.candidates(depth) {
            if self.injective && self.used.contains(c as usize) {
                continue;
            }
            if let Some((hp, xp)) = self.parts {
                if hp[v] != xp[c as usize] {
                    continue;
                }
            }
            self.image[v] = c;
            let checks = std::mem::take(&mut self.plan.checks[depth]);
            let ok = checks.iter().all(|&ei| self.edge_ok(ei));
            self.plan.checks[depth] = checks;
            if ok {
                if self.injective {
                    self.used.insert(c as usize);
                }
                let flow = self.run(depth + 1, f);
                if self.injective {
                    self.used.set(c as usize, false);
                }
                if flow.is_break() {
                    self.image[v] = UNSET;
                    return flow;
                }
            }
        }
        self.image[v] = UNSET;
        ControlFlow::Continue(())
    }
}

fn visit<F>(h: &Hypergraph, x: &Hypergraph, constraint: &[(u32, u32)], injective: bool, mut f: F)
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    if h.k() != x.k() {
        return;
    }
    if injective && h.n_vertices() > x.n_vertices() {
        return;
    }
    let Some(plan) = Plan::new(h, constraint) else {
        return;
    };
    let parts = match (h.partition(), x.partition()) {
        (Some(hp), Some(xp)) => Some((hp, xp)),
        _ => None,
    };
    let mut search = Search {
        h,
        x,
        plan,
        injective,
        parts,
        image: vec![UNSET; h.n_vertices()],
        used: FixedBitSet::with_capacity(x.n_vertices()),
        edge_buf: Vec::with_capacity(h.k()),
    };
    let _ = search.run(0, &mut f);
}

/// Calls `f` with every homomorphism `h -> x` extending `constraint`
/// (pairs of pattern vertex, host vertex). Stops early on `Break`.
///
/// When both graphs carry a partition, pattern vertices only map into the
/// host part carrying the same label.
pub fn visit_homs<F>(h: &Hypergraph, x: &Hypergraph, constraint: &[(u32, u32)], f: F)
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    visit(h, x, constraint, false, f)
}

/// Like [`visit_homs`] restricted to injective maps.
pub fn visit_inj<F>(h: &Hypergraph, x: &Hypergraph, constraint: &[(u32, u32)], f: F)
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    visit(h, x, constraint, true, f)
}

pub fn enumerate_homs(h: &Hypergraph, x: &Hypergraph, constraint: &[(u32, u32)]) -> Vec<HomMap> {
    let mut out = Vec::new();
    visit_homs(h, x, constraint, |img| {
        out.push(HomMap { image: img.to_vec() });
        ControlFlow::Continue(())
    });
    out
}

pub fn enumerate_inj(h: &Hypergraph, x: &Hypergraph, constraint: &[(u32, u32)]) -> Vec<HomMap> {
    let mut out = Vec::new();
    visit_inj(h, x, constraint, |img| {
        out.push(HomMap { image: img.to_vec() });
        ControlFlow::Continue(())
    });
    out
}

pub fn count_homs(h: &Hypergraph, x: &Hypergraph, constraint: &[(u32, u32)]) -> u64 {
    let mut count = 0u64;
    visit_homs(h, x, constraint, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}

pub fn count_inj(h: &Hypergraph, x: &Hypergraph, constraint: &[(u32, u32)]) -> u64 {
    let mut count = 0u64;
    visit_inj(h, x, constraint, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}

/// Plain subgraph containment: returns the index of the first family member
/// with an injective homomorphism into `x`, together with the witness.
/// Partition labels are ignored on both sides.
pub fn contains_any(x: &Hypergraph, family: &[Hypergraph]) -> Option<(usize, HomMap)> {
    let host = x.without_partition();
    for (i, member) in family.iter().enumerate() {
        let pattern = member.without_partition();
        let mut witness = None;
        visit_inj(&pattern, &host, &[], |img| {
            witness = Some(HomMap { image: img.to_vec() });
            ControlFlow::Break(())
        });
        if let Some(w) = witness {
            return Some((i, w));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Oracle: filter all |X|^|H| maps.
    fn naive(h: &Hypergraph, x: &Hypergraph, injective: bool) -> Vec<Vec<u32>> {
        let nh = h.n_vertices();
        let nx = x.n_vertices() as u32;
        let mut out = Vec::new();
        let mut img = vec![0u32; nh];
        let total = (nx as u64).pow(nh as u32);
        for code in 0..total {
            let mut c = code;
            for slot in img.iter_mut() {
                *slot = (c % nx as u64) as u32;
                c /= nx as u64;
            }
            let map = HomMap { image: img.clone() };
            if map.is_hom(h, x) && (!injective || map.is_injective()) {
                out.push(img.clone());
            }
        }
        out.sort();
        out
    }

    fn sorted(maps: Vec<HomMap>) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> = maps.into_iter().map(|m| m.image).collect();
        v.sort();
        v
    }

    #[test]
    fn single_edge_into_host_gives_ordered_edges() {
        let x = Hypergraph::new(2, 5, vec![vec![0, 1], vec![1, 2], vec![3, 4]], None).unwrap();
        assert_eq!(count_homs(&Hypergraph::single_edge(2), &x, &[]), 6);
    }

    #[test]
    fn triangle_and_cherry_counts() {
        let t = Hypergraph::triangle();
        assert_eq!(count_homs(&t, &t, &[]), 6);
        assert_eq!(naive(&t, &t, false).len(), 6);
        let c = Hypergraph::cherry();
        assert_eq!(count_homs(&c, &t, &[]), 12);
        assert_eq!(naive(&c, &t, false).len(), 12);
        assert_eq!(count_inj(&c, &t, &[]), 6);
        assert_eq!(naive(&c, &t, true).len(), 6);
    }

    #[test]
    fn single_three_edge_has_six_injective_maps() {
        let e = Hypergraph::single_edge(3);
        assert_eq!(count_inj(&e, &e, &[]), 6);
    }

    #[test]
    fn pigeonhole_gives_no_injection() {
        let p = Hypergraph::path(3);
        let t = Hypergraph::triangle();
        assert_eq!(count_inj(&p, &t, &[]), 0);
        assert!(count_homs(&p, &t, &[]) > 0);
    }

    #[test]
    fn root_constraint_restricts_enumeration() {
        let c = Hypergraph::cherry();
        let t = Hypergraph::triangle();
        let homs = enumerate_homs(&c, &t, &[(0, 2)]);
        assert_eq!(homs.len(), 4);
        assert!(homs.iter().all(|m| m.image[0] == 2));
        // conflicting constraint
        assert_eq!(count_homs(&c, &t, &[(0, 1), (0, 2)]), 0);
        // constraint that is not an edge
        let p = Hypergraph::single_edge(2);
        let x = Hypergraph::path(2);
        assert_eq!(count_homs(&p, &x, &[(0, 0), (1, 2)]), 0);
    }

    #[test]
    fn partitions_are_enforced_when_both_present() {
        let x = Hypergraph::new(2, 4, vec![vec![0, 1], vec![2, 3]], Some(vec![0, 1, 0, 1])).unwrap();
        let e = Hypergraph::new(2, 2, vec![vec![0, 1]], Some(vec![0, 1])).unwrap();
        assert_eq!(count_homs(&e, &x, &[]), 2);
        assert_eq!(count_homs(&e.without_partition(), &x, &[]), 4);
    }

    #[test]
    fn contains_any_examples() {
        let edge = Hypergraph::single_edge(2);
        assert!(contains_any(&Hypergraph::empty(2, 4).unwrap(), std::slice::from_ref(&edge)).is_none());
        assert!(contains_any(&Hypergraph::path(1), &[edge]).is_some());
        let two_triangles = Hypergraph::triangle().disjoint_union(&Hypergraph::triangle()).unwrap();
        assert!(naive(&Hypergraph::path(3), &two_triangles, true).is_empty());
        assert!(contains_any(&two_triangles, &[Hypergraph::path(3)]).is_none());
        let (i, w) = contains_any(&two_triangles, &[Hypergraph::path(3), Hypergraph::path(2)]).unwrap();
        assert_eq!(i, 1);
        assert!(w.is_injective() && w.is_hom(&Hypergraph::path(2), &two_triangles));
    }

    fn arb_graph(k: usize, max_n: usize) -> impl Strategy<Value = Hypergraph> {
        (k..=max_n).prop_flat_map(move |n| {
            let all = super::super::all_k_subsets(n, k);
            let m = all.len();
            proptest::collection::vec(any::<bool>(), m).prop_map(move |mask| {
                let edges = all
                    .iter()
                    .zip(&mask)
                    .filter(|(_, &b)| b)
                    .map(|(e, _)| e.clone());
                Hypergraph::new(k, n, edges, None).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hom_counts_match_naive_k2(h in arb_graph(2, 4), x in arb_graph(2, 6)) {
            prop_assert_eq!(sorted(enumerate_homs(&h, &x, &[])), naive(&h, &x, false));
            prop_assert_eq!(sorted(enumerate_inj(&h, &x, &[])), naive(&h, &x, true));
        }

        #[test]
        fn hom_counts_match_naive_k3(h in arb_graph(3, 4), x in arb_graph(3, 5)) {
            prop_assert_eq!(sorted(enumerate_homs(&h, &x, &[])), naive(&h, &x, false));
            prop_assert_eq!(sorted(enumerate_inj(&h, &x, &[])), naive(&h, &x, true));
        }

        #[test]
        fn injective_subset_of_homs(h in arb_graph(2, 4), x in arb_graph(2, 6)) {
            let homs = sorted(enumerate_homs(&h, &x, &[]));
            for m in sorted(enumerate_inj(&h, &x, &[])) {
                prop_assert!(homs.binary_search(&m).is_ok());
            }
        }

        #[test]
        fn single_edge_patterns_are_always_injective(x in arb_graph(3, 6)) {
            let e = Hypergraph::single_edge(3);
            prop_assert_eq!(count_homs(&e, &x, &[]), count_inj(&e, &x, &[]));
        }

        #[test]
        fn containment_is_monotone(x in arb_graph(2, 6), extra in 0usize..15) {
            let family = [Hypergraph::path(3), Hypergraph::cherry().disjoint_union(&Hypergraph::single_edge(2)).unwrap()];
            let before = contains_any(&x, &family).is_some();
            let all = super::super::all_k_subsets(x.n_vertices(), 2);
            let bigger = x.with_edge(all[extra % all.len()].clone()).unwrap();
            let after = contains_any(&bigger, &family).is_some();
            prop_assert!(!before || after);
        }
    }
}
