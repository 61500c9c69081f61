//! Random algebraic k-partite hypergraphs over `F_q^b`.
//!
//! Part `j` holds the vectors of `F_q^b`; vertex `j * q^b + i` is the vector
//! whose base-`q` digits (most significant first) spell `i`. A cross-part
//! tuple `(x_1, ..., x_k)` is an edge iff every sampled polynomial in the
//! `k b` coordinates vanishes there.
//!
//! Rooted-copy expectations use the exponent `b m - a e(H)` with
//! `m = |H| - |R|` non-root vertices.

use std::collections::BTreeMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{limit, Error, Result};
use crate::field::{derive_constants, regime_warning, MonomialBasis, MultiPoly, PrimeField, DEFAULT_MONOMIAL_LIMIT};
use crate::hypergraph::{contains_any, HomMap, Hypergraph, RootedGraph};
use crate::seed::trial_seed;
use crate::tree::RootedTree;

pub const DEFAULT_TUPLE_LIMIT: u128 = 10_000_000;

/// Raw construction parameters. `d` defaults to `b s - 1` from
/// [`derive_constants`] but may be overridden.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicParams {
    pub k: usize,
    pub a: usize,
    pub b: usize,
    pub q: u32,
    pub d: usize,
    pub seed: u64,
}

impl AlgebraicParams {
    pub fn derived(k: usize, a: usize, b: usize, q: u32, seed: u64) -> Self {
        let (_, d) = derive_constants(k as u64, a as u64, b as u64);
        AlgebraicParams { k, a, b, q, d: d as usize, seed }
    }

    pub fn with_degree(self, d: usize) -> Self {
        AlgebraicParams { d, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        AlgebraicParams { seed, ..self }
    }

    pub fn part_size(&self) -> u128 {
        (self.q as u128).pow(self.b as u32)
    }

    pub fn tuple_count(&self) -> u128 {
        (self.q as u128).pow((self.b * self.k) as u32)
    }

    pub fn warning(&self) -> Option<String> {
        regime_warning(self.q, self.d as u64)
    }

    fn validate(&self) -> Result<PrimeField> {
        if self.k < 2 || self.b < 1 {
            return Err(Error::InvalidParams(format!("need k >= 2 and b >= 1, got k = {}, b = {}", self.k, self.b)));
        }
        let field = PrimeField::new(self.q)?;
        let t = (self.q as u128).checked_pow((self.b * self.k) as u32).unwrap_or(u128::MAX);
        if t > DEFAULT_TUPLE_LIMIT {
            return Err(limit("cross-part tuple", DEFAULT_TUPLE_LIMIT, t));
        }
        Ok(field)
    }
}

/// Which cross-part tuples are edges, indexed by `sum_j i_j P^(k-1-j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMask {
    k: usize,
    part_size: usize,
    bits: FixedBitSet,
}

impl EdgeMask {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn part_size(&self) -> usize {
        self.part_size
    }

    pub fn edge_count(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn n_vertices(&self) -> usize {
        self.k * self.part_size
    }

    pub fn part_of(&self, v: u32) -> usize {
        v as usize / self.part_size
    }

    /// Whether the tuple with `verts[j]` in part `j` is an edge.
    pub fn is_edge_by_part(&self, verts: &[u32]) -> bool {
        let mut idx = 0usize;
        for (j, &v) in verts.iter().enumerate() {
            idx = idx * self.part_size + (v as usize - j * self.part_size);
        }
        self.bits.contains(idx)
    }

    /// Whether an arbitrary vertex set is an edge (one vertex per part).
    pub fn is_edge(&self, verts: &[u32]) -> bool {
        if verts.len() != self.k {
            return false;
        }
        let mut by_part = vec![u32::MAX; self.k];
        for &v in verts {
            let p = self.part_of(v);
            if p >= self.k || by_part[p] != u32::MAX {
                return false;
            }
            by_part[p] = v;
        }
        self.is_edge_by_part(&by_part)
    }

    pub fn to_hypergraph(&self) -> Result<Hypergraph> {
        let p = self.part_size;
        let edges = self.bits.ones().map(|mut idx| {
            let mut e = vec![0u32; self.k];
            for j in (0..self.k).rev() {
                e[j] = (j * p + idx % p) as u32;
                idx /= p;
            }
            e
        });
        let partition = (0..self.k * p).map(|v| v / p).collect();
        Hypergraph::new(self.k, self.k * p, edges, Some(partition))
    }
}

/// A concrete instance: its polynomials, edge mask and hypergraph.
#[derive(Clone, Debug)]
pub struct AlgebraicInstance {
    pub k: usize,
    pub b: usize,
    pub q: u32,
    /// Present for sampled instances.
    pub params: Option<AlgebraicParams>,
    pub polys: Vec<MultiPoly>,
    mask: EdgeMask,
    graph: Hypergraph,
}

fn sample_polys(params: &AlgebraicParams, field: PrimeField) -> Result<Vec<MultiPoly>> {
    if params.a == 0 {
        return Ok(Vec::new());
    }
    let basis = Arc::new(MonomialBasis::new(params.k * params.b, params.d, DEFAULT_MONOMIAL_LIMIT)?);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    Ok((0..params.a)
        .map(|_| MultiPoly::sample_with(field, basis.clone(), &mut rng))
        .collect())
}

fn mask_from_polys(k: usize, b: usize, q: u32, polys: &[MultiPoly]) -> Result<EdgeMask> {
    let part_size = (q as usize).pow(b as u32);
    let total = part_size.pow(k as u32);
    let grids: Vec<Vec<u32>> = polys.par_iter().map(|p| p.eval_grid()).collect::<Result<_>>()?;
    let mut bits = FixedBitSet::with_capacity(total);
    for i in 0..total {
        if grids.iter().all(|g| g[i] == 0) {
            bits.insert(i);
        }
    }
    Ok(EdgeMask { k, part_size, bits })
}

/// Edge mask and polynomials of a sampled instance, without the hypergraph.
pub fn build_mask(params: &AlgebraicParams) -> Result<(Vec<MultiPoly>, EdgeMask)> {
    let field = params.validate()?;
    let polys = sample_polys(params, field)?;
    let mask = mask_from_polys(params.k, params.b, params.q, &polys)?;
    Ok((polys, mask))
}

pub fn build_instance(params: &AlgebraicParams) -> Result<AlgebraicInstance> {
    let (polys, mask) = build_mask(params)?;
    let graph = mask.to_hypergraph()?;
    Ok(AlgebraicInstance {
        k: params.k,
        b: params.b,
        q: params.q,
        params: Some(*params),
        polys,
        mask,
        graph,
    })
}

impl AlgebraicInstance {
    /// Instance defined by explicit polynomials in `k b` variables.
    pub fn from_polys(k: usize, b: usize, q: u32, polys: Vec<MultiPoly>) -> Result<Self> {
        let probe = AlgebraicParams { k, a: polys.len(), b, q, d: 0, seed: 0 };
        let field = probe.validate()?;
        if let Some(p) = polys.iter().find(|p| p.vars() != k * b || p.field() != field) {
            return Err(Error::Domain(format!(
                "polynomial over q = {} in {} variables; expected q = {q} and {} variables",
                p.field().q(),
                p.vars(),
                k * b
            )));
        }
        let mask = mask_from_polys(k, b, q, &polys)?;
        let graph = mask.to_hypergraph()?;
        Ok(AlgebraicInstance { k, b, q, params: None, polys, mask, graph })
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn mask(&self) -> &EdgeMask {
        &self.mask
    }

    pub fn part_size(&self) -> usize {
        self.mask.part_size
    }

    pub fn vertex_id(&self, part: usize, v: &[u32]) -> Result<u32> {
        if part >= self.k || v.len() != self.b || v.iter().any(|&x| x >= self.q) {
            return Err(Error::Domain(format!("no vertex for part {part}, vector {v:?}")));
        }
        let idx = v.iter().fold(0usize, |acc, &x| acc * self.q as usize + x as usize);
        Ok((part * self.part_size() + idx) as u32)
    }

    pub fn decode(&self, id: u32) -> Result<(usize, Vec<u32>)> {
        let p = self.part_size();
        if id as usize >= self.k * p {
            return Err(Error::Domain(format!("vertex {id} out of range")));
        }
        let mut idx = id as usize % p;
        let mut v = vec![0u32; self.b];
        for x in v.iter_mut().rev() {
            *x = (idx % self.q as usize) as u32;
            idx /= self.q as usize;
        }
        Ok((id as usize / p, v))
    }

    /// Edge test straight from the polynomials.
    pub fn edge_by_eval(&self, verts: &[u32]) -> Result<bool> {
        let mut point = vec![0u32; self.k * self.b];
        for &v in verts {
            let (part, vec) = self.decode(v)?;
            point[part * self.b..(part + 1) * self.b].copy_from_slice(&vec);
        }
        for p in &self.polys {
            if p.eval(&point)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn polys_json(&self) -> Vec<crate::field::MultiPolyJson> {
        self.polys.iter().map(|p| p.to_json()).collect()
    }
}

/// Counts injective copies of the k-partite rooted pattern `h` in the
/// instance with root `i` sent to `w[i]`. Walks the edge mask directly.
pub fn count_rooted(mask: &EdgeMask, h: &RootedGraph, w: &[u32]) -> Result<u64> {
    let parts = h
        .graph
        .partition()
        .ok_or_else(|| Error::Domain("pattern carries no k-partition".into()))?;
    if h.graph.k() != mask.k {
        return Err(Error::Domain("pattern arity differs from instance arity".into()));
    }
    if w.len() != h.roots.len() {
        return Err(Error::Domain(format!("{} root images for {} roots", w.len(), h.roots.len())));
    }
    let n = h.graph.n_vertices();
    let mut image = vec![u32::MAX; n];
    for (&r, &x) in h.roots.iter().zip(w) {
        if x as usize >= mask.n_vertices() || mask.part_of(x) != parts[r as usize] {
            return Err(Error::Domain(format!(
                "root image {x} is not in part {} of the instance",
                parts[r as usize]
            )));
        }
        image[r as usize] = x;
    }
    let mut ws = w.to_vec();
    ws.sort_unstable();
    if ws.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::Domain("root images are not distinct".into()));
    }
    let order = h.non_roots();
    let pos: Vec<usize> = {
        let mut pos = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v as usize] = i + 1;
        }
        pos
    };
    // edges checked once their last non-root is placed (root-only edges up front)
    let mut checks: Vec<Vec<Vec<u32>>> = vec![Vec::new(); order.len() + 1];
    for e in h.graph.edges() {
        let last = e.iter().map(|&v| pos[v as usize]).max().unwrap_or(0);
        let mut by_part = vec![0u32; mask.k];
        for &v in e.iter() {
            by_part[parts[v as usize]] = v;
        }
        checks[last].push(by_part);
    }
    let ok = |image: &[u32], at: usize| {
        checks[at].iter().all(|e| {
            let verts: Vec<u32> = e.iter().map(|&v| image[v as usize]).collect();
            mask.is_edge_by_part(&verts)
        })
    };
    if !ok(&image, 0) {
        return Ok(0);
    }
    let mut used = FixedBitSet::with_capacity(mask.n_vertices());
    for &x in w {
        used.insert(x as usize);
    }
    fn rec(
        i: usize,
        order: &[u32],
        parts: &[usize],
        mask: &EdgeMask,
        image: &mut [u32],
        used: &mut FixedBitSet,
        ok: &dyn Fn(&[u32], usize) -> bool,
    ) -> u64 {
        if i == order.len() {
            return 1;
        }
        let v = order[i] as usize;
        let start = parts[v] * mask.part_size;
        let mut total = 0;
        for x in start..start + mask.part_size {
            if used.contains(x) {
                continue;
            }
            image[v] = x as u32;
            if ok(image, i + 1) {
                used.insert(x);
                total += rec(i + 1, order, parts, mask, image, used, ok);
                used.set(x, false);
            }
        }
        image[v] = u32::MAX;
        total
    }
    Ok(rec(0, &order, parts, mask, &mut image, &mut used, &ok))
}

pub fn count_rooted_copies(inst: &AlgebraicInstance, t: &RootedTree, w: &[u32]) -> Result<u64> {
    count_rooted(&inst.mask, t.rooted(), w)
}

/// Distinct root images drawn uniformly from the parts of `h`'s roots.
pub fn sample_root_tuple<R: Rng + ?Sized>(h: &RootedGraph, part_size: usize, rng: &mut R) -> Result<Vec<u32>> {
    let parts = h
        .graph
        .partition()
        .ok_or_else(|| Error::Domain("pattern carries no k-partition".into()))?;
    let mut w: Vec<u32> = Vec::with_capacity(h.roots.len());
    for &r in &h.roots {
        let p = parts[r as usize];
        let taken = w.iter().filter(|&&x| x as usize / part_size == p).count();
        if taken >= part_size {
            return Err(Error::Domain(format!("part {p} too small for the roots")));
        }
        loop {
            let x = (p * part_size + rng.random_range(0..part_size)) as u32;
            if !w.contains(&x) {
                w.push(x);
                break;
            }
        }
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub samples: usize,
    pub mean: f64,
    pub std_error: f64,
}

impl MeanEstimate {
    pub fn from_counts(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        MeanEstimate {
            samples: xs.len(),
            mean,
            std_error: (var / n).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma6Report {
    pub params: AlgebraicParams,
    pub seeds: usize,
    pub roots: Vec<u32>,
    pub non_roots: usize,
    pub edges: usize,
    /// `q^(b m - a e)`.
    pub prediction: f64,
    /// Exact expectation when every sampled degree is at least `e - 1`:
    /// injective placements times `q^(-a e)`.
    pub exact_expectation: f64,
    pub estimate: MeanEstimate,
    pub within_3se: bool,
    pub pass: bool,
    pub warning: Option<String>,
}

/// Monte Carlo over `seeds` instances (trial seeds split from `params.seed`)
/// of the rooted copy count of `h`, with one fixed root tuple.
pub fn lemma6_expectation(h: &RootedGraph, params: &AlgebraicParams, seeds: usize) -> Result<Lemma6Report> {
    params.validate()?;
    if h.graph.k() != params.k {
        return Err(Error::Domain("pattern arity differs from k".into()));
    }
    let part_size = params.part_size() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x9e37_79b9_7f4a_7c15);
    let w = sample_root_tuple(h, part_size, &mut rng)?;
    let counts: Vec<f64> = (0..seeds as u64)
        .into_par_iter()
        .map(|i| {
            let p = params.with_seed(trial_seed(params.seed, i));
            let (_, mask) = build_mask(&p)?;
            Ok(count_rooted(&mask, h, &w)? as f64)
        })
        .collect::<Result<_>>()?;
    let estimate = MeanEstimate::from_counts(&counts);

    let m = h.graph.n_vertices() - h.roots.len();
    let e = h.graph.n_edges();
    let q = params.q as f64;
    let exponent = (params.b * m) as f64 - (params.a * e) as f64;
    let prediction = q.powf(exponent);
    let parts = h.graph.partition().expect("checked by sample_root_tuple");
    let mut per_part = vec![0usize; params.k];
    for &r in &h.roots {
        per_part[parts[r as usize]] += 1;
    }
    let mut placements = 1f64;
    for v in h.non_roots() {
        let p = parts[v as usize];
        placements *= (part_size - per_part[p]) as f64;
        per_part[p] += 1;
    }
    let exact_expectation = placements * q.powf(-((params.a * e) as f64));
    let diff = (estimate.mean - prediction).abs();
    let within_3se = diff <= 3.0 * estimate.std_error;
    let pass = diff <= (3.0 * estimate.std_error).max(0.25 * prediction);
    Ok(Lemma6Report {
        params: *params,
        seeds,
        roots: w,
        non_roots: m,
        edges: e,
        prediction,
        exact_expectation,
        estimate,
        within_3se,
        pass,
        warning: params.warning(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonemptyReport {
    pub params: AlgebraicParams,
    pub seeds: usize,
    pub nonempty: usize,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub half_width: f64,
    /// `q^(-a)`.
    pub bound: f64,
    pub pass: bool,
}

/// 95% Wilson score interval `(low, high, half_width)`.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64, f64) {
    let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.975);
    let n = n as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    (center - half, center + half, half)
}

pub fn nonempty_rate(params: &AlgebraicParams, seeds: usize) -> Result<NonemptyReport> {
    if seeds < 100 {
        return Err(Error::InvalidParams(format!("at least 100 seeds required, got {seeds}")));
    }
    params.validate()?;
    let hits: Vec<bool> = (0..seeds as u64)
        .into_par_iter()
        .map(|i| {
            let (_, mask) = build_mask(&params.with_seed(trial_seed(params.seed, i)))?;
            Ok(mask.edge_count() > 0)
        })
        .collect::<Result<_>>()?;
    let nonempty = hits.iter().filter(|&&h| h).count();
    let rate = nonempty as f64 / seeds as f64;
    let (lo, hi, half) = wilson_interval(nonempty, seeds);
    let bound = (params.q as f64).powi(-(params.a as i32));
    Ok(NonemptyReport {
        params: *params,
        seeds,
        nonempty,
        rate,
        wilson_low: lo,
        wilson_high: hi,
        half_width: half,
        bound,
        pass: rate >= bound - half,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeStatsRow {
    pub q: u32,
    pub seeds: usize,
    pub nonempty: usize,
    /// Mean edge count over nonempty instances.
    pub mean_edges: f64,
    /// `q^(b k - a)`.
    pub prediction: f64,
    pub ratio: f64,
}

pub fn edge_stats(base: &AlgebraicParams, q_list: &[u32], seeds: usize) -> Result<Vec<EdgeStatsRow>> {
    q_list
        .iter()
        .map(|&q| {
            let p = AlgebraicParams { q, ..*base };
            p.validate()?;
            let counts: Vec<usize> = (0..seeds as u64)
                .into_par_iter()
                .map(|i| Ok(build_mask(&p.with_seed(trial_seed(p.seed, i)))?.1.edge_count()))
                .collect::<Result<_>>()?;
            let nonempty: Vec<f64> = counts.iter().filter(|&&c| c > 0).map(|&c| c as f64).collect();
            let mean_edges = if nonempty.is_empty() {
                0.0
            } else {
                nonempty.iter().sum::<f64>() / nonempty.len() as f64
            };
            let prediction = (q as f64).powi((p.b * p.k) as i32 - p.a as i32);
            Ok(EdgeStatsRow {
                q,
                seeds,
                nonempty: nonempty.len(),
                mean_edges,
                prediction,
                ratio: mean_edges / prediction,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma5Row {
    pub q: u32,
    pub p: u64,
    pub samples: usize,
    /// `|C|` value to number of samples.
    pub histogram: BTreeMap<u64, u64>,
    /// Fraction of samples with `p <= |C| < q/2`.
    pub gap_fraction: f64,
}

/// Histogram of rooted tree copy counts over seeds, one random root tuple per seed.
pub fn lemma5_diagnostic(tree: &RootedTree, base: &AlgebraicParams, q_list: &[u32], p: u64, seeds: usize) -> Result<Vec<Lemma5Row>> {
    q_list
        .iter()
        .map(|&q| {
            let params = AlgebraicParams { q, ..*base };
            params.validate()?;
            let part_size = params.part_size() as usize;
            let counts: Vec<u64> = (0..seeds as u64)
                .into_par_iter()
                .map(|i| {
                    let s = trial_seed(params.seed, i);
                    let (_, mask) = build_mask(&params.with_seed(s))?;
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    let w = sample_root_tuple(tree.rooted(), part_size, &mut rng)?;
                    count_rooted(&mask, tree.rooted(), &w)
                })
                .collect::<Result<_>>()?;
            let mut histogram = BTreeMap::new();
            for &c in &counts {
                *histogram.entry(c).or_insert(0) += 1;
            }
            let gap = counts.iter().filter(|&&c| in_gap(c, p, q)).count();
            Ok(Lemma5Row {
                q,
                p,
                samples: seeds,
                histogram,
                gap_fraction: gap as f64 / seeds as f64,
            })
        })
        .collect()
}

/// `p <= c < q/2`.
pub fn in_gap(c: u64, p: u64, q: u32) -> bool {
    c >= p && 2 * c < q as u64
}

/// Searches the instance for any member of `family`.
pub fn find_family_copy(inst: &AlgebraicInstance, family: &[Hypergraph]) -> Option<(usize, HomMap)> {
    contains_any(&inst.graph, family)
}
