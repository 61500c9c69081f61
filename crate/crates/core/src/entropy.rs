//! Homomorphism distributions of hypertrees into a host, built one edge at a time.
//!
//! The seed edge of the pattern is placed uniformly on the `M = k! e(X)`
//! ordered edges of the host. Each later edge, attached along a `(k-1)`-set
//! `A` whose image is `D`, picks one of the `deg(D)` host edges through `D`
//! uniformly. Every weight is therefore `1 / (M * prod deg)` and is kept as an
//! exact rational; only entropies use floating point.

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{limit, Error, Result};
use crate::hypergraph::{count_homs, visit_inj, Hypergraph, RootedGraph};
use crate::tree::{build_tree, minimal_power_tag, Hypertree, TreeParams};

pub const DEFAULT_TABLE_LIMIT: usize = 5_000_000;

/// `deg(T)` for every `(k-1)`-set of host vertices lying in some edge.
#[derive(Clone, Debug)]
pub struct DegIndex {
    k: usize,
    deg: HashMap<Box<[u32]>, u32>,
}

impl DegIndex {
    pub fn new(x: &Hypergraph) -> Self {
        let k = x.k();
        let mut deg: HashMap<Box<[u32]>, u32> = HashMap::new();
        for e in x.edges() {
            for skip in 0..k {
                let sub: Box<[u32]> = e.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                *deg.entry(sub).or_insert(0) += 1;
            }
        }
        DegIndex { k, deg }
    }

    /// Degree of the set underlying an ordered tuple (0 for repeated vertices).
    pub fn get(&self, tuple: &[u32]) -> u32 {
        let mut s = tuple.to_vec();
        s.sort_unstable();
        self.get_sorted(&s)
    }

    pub fn get_sorted(&self, sorted: &[u32]) -> u32 {
        self.deg.get(sorted).copied().unwrap_or(0)
    }

    /// `(k-1)`-sets with positive degree.
    pub fn sets(&self) -> impl Iterator<Item = (&[u32], u32)> {
        self.deg.iter().map(|(s, &d)| (&s[..], d))
    }

    /// `sum_T deg(T)` over ordered `(k-1)`-tuples.
    pub fn ordered_sum(&self) -> u128 {
        let perms: u128 = (1..self.k as u128).product();
        self.deg.values().map(|&d| d as u128).sum::<u128>() * perms
    }
}

/// A host hypergraph with its ordered-edge count and effective exponent.
#[derive(Clone, Debug)]
pub struct HostProfile {
    x: Hypergraph,
    m: u128,
    r_eff: f64,
    deg: DegIndex,
}

impl HostProfile {
    pub fn new(x: &Hypergraph) -> Result<Self> {
        let n = x.n_vertices();
        if n < 2 {
            return Err(Error::Domain(format!("host needs at least 2 vertices, has {n}")));
        }
        let x = x.without_partition();
        let m = x.ordered_edge_count();
        let r_eff = x.k() as f64 - (m as f64).ln() / (n as f64).ln();
        let deg = DegIndex::new(&x);
        Ok(HostProfile { x, m, r_eff, deg })
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.n_vertices()
    }

    pub fn k(&self) -> usize {
        self.x.k()
    }

    /// Ordered edge count `k! e(X)`.
    pub fn m(&self) -> u128 {
        self.m
    }

    /// `k - ln M / ln n` (infinite for an edgeless host).
    pub fn r_eff(&self) -> f64 {
        self.r_eff
    }

    pub fn deg(&self) -> &DegIndex {
        &self.deg
    }

    /// `D(epsilon) = k ln n - ln M`.
    pub fn d_epsilon(&self) -> f64 {
        self.k() as f64 * (self.n() as f64).ln() - (self.m as f64).ln()
    }
}

/// Exact distribution on `Hom(H, X)`. Entry `i` maps pattern vertex `v` to `images[i][v]`.
#[derive(Clone, Debug)]
pub struct WeightedHomTable {
    pattern: Hypertree,
    n: usize,
    m: u128,
    images: Vec<Box<[u32]>>,
    weights: Vec<BigRational>,
    /// `M * prod deg` per entry.
    denominators: Vec<u128>,
    edited: bool,
}

pub fn build_mu(h: &Hypertree, host: &HostProfile) -> Result<WeightedHomTable> {
    build_mu_with_limit(h, host, DEFAULT_TABLE_LIMIT)
}

pub fn build_mu_with_limit(h: &Hypertree, host: &HostProfile, max_entries: usize) -> Result<WeightedHomTable> {
    let k = host.k();
    if h.graph().k() != k {
        return Err(Error::Domain(format!("pattern arity {} differs from host arity {k}", h.graph().k())));
    }
    if host.m == 0 {
        return Err(Error::NoDistribution);
    }
    let x = host.graph();
    let hn = h.graph().n_vertices();
    let order = h.order();

    // Partial images with denominators, extended step by step.
    let seed = &order[0].edge;
    let mut entries: Vec<(Vec<u32>, u128)> = Vec::new();
    for e in x.edges() {
        permutations(e, &mut |perm| {
            let mut img = vec![u32::MAX; hn];
            for (i, &v) in seed.iter().enumerate() {
                img[v as usize] = perm[i];
            }
            entries.push((img, host.m));
        });
    }
    let mut overflow = false;
    for (si, step) in order.iter().enumerate().skip(1) {
        let attach = step.attach.as_ref().expect("validated order");
        let new_v = step.new_vertex().expect("validated order") as usize;
        let mut next = Vec::new();
        for (img, den) in &entries {
            let d: Vec<u32> = attach.iter().map(|&v| img[v as usize]).collect();
            let mut sorted = d.clone();
            sorted.sort_unstable();
            let deg = host.deg.get_sorted(&sorted);
            if deg == 0 {
                return Err(Error::Internal(format!(
                    "step {si}: attachment image {d:?} lies in no host edge"
                )));
            }
            let den2 = den.checked_mul(deg as u128);
            overflow |= den2.is_none();
            let den2 = den2.unwrap_or(u128::MAX);
            extensions(x, &sorted, &mut |w| {
                let mut img2 = img.clone();
                img2[new_v] = w;
                next.push((img2, den2));
            });
            if next.len() > max_entries {
                return Err(limit("distribution support", max_entries as u128, next.len() as u128));
            }
        }
        entries = next;
    }
    if overflow {
        return Err(Error::Internal("weight denominator overflowed 128 bits".into()));
    }
    if entries.len() > max_entries {
        return Err(limit("distribution support", max_entries as u128, entries.len() as u128));
    }
    let mut images = Vec::with_capacity(entries.len());
    let mut weights = Vec::with_capacity(entries.len());
    let mut denominators = Vec::with_capacity(entries.len());
    for (img, den) in entries {
        images.push(img.into_boxed_slice());
        weights.push(BigRational::new_raw(BigInt::one(), BigInt::from(den)));
        denominators.push(den);
    }
    Ok(WeightedHomTable {
        pattern: h.clone(),
        n: host.n(),
        m: host.m,
        images,
        weights,
        denominators,
        edited: false,
    })
}

fn permutations(e: &[u32], f: &mut dyn FnMut(&[u32])) {
    fn rec(cur: &mut Vec<u32>, rest: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if rest.is_empty() {
            f(cur);
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            cur.push(v);
            rec(cur, rest, f);
            cur.pop();
            rest.insert(i, v);
        }
    }
    rec(&mut Vec::new(), &mut e.to_vec(), f);
}

/// Calls `f(w)` for every host edge `D + {w}`.
fn extensions(x: &Hypergraph, d_sorted: &[u32], f: &mut dyn FnMut(u32)) {
    let mut common = x.incident(d_sorted[0]).clone();
    for &v in &d_sorted[1..] {
        common.intersect_with(x.incident(v));
    }
    for ei in common.ones() {
        let w = x.edge(ei).iter().copied().find(|v| !d_sorted.contains(v)).expect("edge has k vertices");
        f(w);
    }
}

impl WeightedHomTable {
    pub fn pattern(&self) -> &Hypertree {
        &self.pattern
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[Box<[u32]>] {
        &self.images
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn total(&self) -> BigRational {
        self.weights.iter().fold(BigRational::zero(), |acc, w| acc + w)
    }

    /// `ln n^|H| + sum mu ln mu`.
    pub fn entropy_d(&self) -> f64 {
        let hn = self.pattern.graph().n_vertices() as f64;
        hn * (self.n as f64).ln() + self.sum_mu_ln_mu()
    }

    fn sum_mu_ln_mu(&self) -> f64 {
        self.weights.iter().map(ratio_mu_ln_mu).sum()
    }

    /// Shannon entropy of the distribution.
    pub fn shannon(&self) -> f64 {
        -self.sum_mu_ln_mu()
    }

    /// Replaces one weight; the table is then no longer a valid distribution.
    #[doc(hidden)]
    pub fn corrupt_weight(&mut self, i: usize, w: BigRational) {
        self.weights[i] = w;
        self.edited = true;
    }

    fn is_injective(img: &[u32]) -> bool {
        let mut s = img.to_vec();
        s.sort_unstable();
        s.windows(2).all(|p| p[0] != p[1])
    }
}

fn ratio_mu_ln_mu(w: &BigRational) -> f64 {
    if w.is_zero() {
        return 0.0;
    }
    let ln = big_ln(w.numer()) - big_ln(w.denom());
    ratio_to_f64(w) * ln
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().expect("finite").ln()
    } else {
        let shift = bits - 900;
        (x >> shift as usize).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| (big_ln(r.numer()) - big_ln(r.denom())).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Property1Report {
    pub d_mu: f64,
    pub d_epsilon: f64,
    pub edges: usize,
    /// `e(H) D(epsilon) - D(mu)`.
    pub slack: f64,
    pub holds: bool,
}

pub fn verify_property1(table: &WeightedHomTable, host: &HostProfile) -> Property1Report {
    let d_mu = table.entropy_d();
    let d_epsilon = host.d_epsilon();
    let e = table.pattern.graph().n_edges();
    let slack = e as f64 * d_epsilon - d_mu;
    Property1Report {
        d_mu,
        d_epsilon,
        edges: e,
        slack,
        holds: slack >= -1e-9,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Property2Report {
    pub holds: bool,
    /// Whether the weights sum to exactly 1.
    pub normalized: bool,
    pub adjacent_tuples: usize,
    /// Largest `|marginal - deg(T)/M|`, as an exact fraction string.
    pub max_deviation: String,
    pub worst: Option<(Vec<u32>, Vec<u32>)>,
}

/// Exact marginal audit over every ordered adjacent `(k-1)`-tuple `S` of
/// the pattern and every ordered `(k-1)`-tuple `T` of the host.
pub fn verify_property2(table: &WeightedHomTable, host: &HostProfile) -> Property2Report {
    let h = table.pattern.graph();
    let k = h.k();
    let mut adjacent: Vec<Vec<u32>> = Vec::new();
    for e in h.edges() {
        for skip in 0..k {
            let sub: Vec<u32> = e.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            permutations(&sub, &mut |p| adjacent.push(p.to_vec()));
        }
    }
    adjacent.sort();
    adjacent.dedup();

    // Common denominator: every entry denominator divides M * L^(steps).
    let sums = Numerators::new(table, host);
    let total = sums.total();
    let normalized = total == sums.scale;

    let mut max_dev = BigRational::zero();
    let mut worst = None;
    let mut consider = |s: &[u32], t: &[u32], got: &BigInt, want: &BigInt| {
        if got != want {
            let dev = BigRational::new((got - want).abs(), sums.scale.clone());
            if dev > max_dev {
                max_dev = dev;
                worst = Some((s.to_vec(), t.to_vec()));
            }
        }
    };
    let per_m = &sums.scale / BigInt::from(table.m);
    for s in &adjacent {
        let marg = sums.marginal(table, s);
        for (t, got) in &marg {
            let want = BigInt::from(host.deg.get(t)) * &per_m;
            consider(s, t, got, &want);
        }
        for (set, d) in host.deg.sets() {
            permutations(set, &mut |t| {
                if !marg.contains_key(t) {
                    consider(s, t, &BigInt::zero(), &(BigInt::from(d) * &per_m));
                }
            });
        }
    }
    Property2Report {
        holds: normalized && max_dev.is_zero(),
        normalized,
        adjacent_tuples: adjacent.len(),
        max_deviation: max_dev.to_string(),
        worst,
    }
}

/// Weights rescaled to integers over a common denominator `scale`.
struct Numerators {
    scale: BigInt,
    fast: Option<Vec<u128>>,
    slow: Vec<BigInt>,
}

impl Numerators {
    fn new(table: &WeightedHomTable, host: &HostProfile) -> Self {
        let steps = table.pattern.order().len().saturating_sub(1) as u32;
        let mut l = BigUint::one();
        for (_, d) in host.deg.sets() {
            l = lcm(&l, &BigUint::from(d));
        }
        let mut scale = BigUint::from(table.m) * l.pow(steps);
        if table.edited {
            for w in &table.weights {
                scale = lcm(&scale, w.denom().magnitude());
            }
        }
        let scale_i = BigInt::from(scale.clone());
        if let (Some(s), false) = (scale.to_u128(), table.edited) {
            let nums: Vec<u128> = table.denominators.iter().map(|&d| s / d).collect();
            if nums.iter().try_fold(0u128, |acc, &x| acc.checked_add(x)).is_some() {
                return Numerators { scale: scale_i, fast: Some(nums), slow: Vec::new() };
            }
        }
        let slow = table.weights.iter().map(|w| (&scale_i / w.denom()) * w.numer()).collect();
        Numerators { scale: scale_i, fast: None, slow }
    }

    fn total(&self) -> BigInt {
        match &self.fast {
            Some(nums) => BigInt::from(nums.iter().sum::<u128>()),
            None => self.slow.iter().sum(),
        }
    }

    fn marginal(&self, table: &WeightedHomTable, s: &[u32]) -> HashMap<Vec<u32>, BigInt> {
        match &self.fast {
            Some(nums) => {
                let mut acc: HashMap<Vec<u32>, u128> = HashMap::new();
                for (img, &x) in table.images.iter().zip(nums) {
                    let t: Vec<u32> = s.iter().map(|&v| img[v as usize]).collect();
                    *acc.entry(t).or_insert(0) += x;
                }
                acc.into_iter().map(|(t, x)| (t, BigInt::from(x))).collect()
            }
            None => {
                let mut acc: HashMap<Vec<u32>, BigInt> = HashMap::new();
                for (img, x) in table.images.iter().zip(&self.slow) {
                    let t: Vec<u32> = s.iter().map(|&v| img[v as usize]).collect();
                    *acc.entry(t).or_insert_with(BigInt::zero) += x;
                }
                acc
            }
        }
    }
}

fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    if a.is_zero() || b.is_zero() {
        return BigUint::zero();
    }
    a / gcd(a, b) * b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidorenkoReport {
    pub hom_count: u64,
    /// `n^|H| (M / n^k)^e(H)`.
    pub bound: f64,
    /// Exact comparison `|Hom| n^(k e) >= n^|H| M^e`.
    pub exact_holds: bool,
    pub holds: bool,
}

pub fn sidorenko_check(h: &Hypergraph, host: &HostProfile) -> SidorenkoReport {
    let pattern = h.without_partition();
    let hom_count = count_homs(&pattern, host.graph(), &[]);
    let n = BigUint::from(host.n());
    let (hv, e, k) = (pattern.n_vertices() as u32, pattern.n_edges() as u32, host.k() as u32);
    let lhs = BigUint::from(hom_count) * n.pow(k * e);
    let rhs = n.pow(hv) * BigUint::from(host.m).pow(e);
    let exact_holds = lhs >= rhs;
    let nf = host.n() as f64;
    let bound = (hv as f64 * nf.ln() + e as f64 * ((host.m as f64).ln() - k as f64 * nf.ln())).exp();
    SidorenkoReport {
        hom_count,
        bound,
        exact_holds,
        holds: exact_holds || hom_count as f64 >= bound * (1.0 - 1e-9),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    /// Exact non-injective mass as a fraction string.
    pub mass: String,
    pub mass_f64: f64,
    /// `n^(r-1) (|G|^2 - (2k-1)|G| + k(k-1)) / 2` with `r = r_eff`, exact.
    pub bound: String,
    pub bound_f64: f64,
    pub holds: bool,
    pub inj_count: u64,
    pub hom_count: u64,
    /// `n^((1-r)|G| + (k-1) r) (1 - bound)`, meaningful when `bound < 1`.
    pub injective_rhs: f64,
    pub injective_applicable: bool,
    pub injective_holds: bool,
    /// Entropy of the distribution conditioned on injective maps; never exceeds `ln |Inj|`.
    pub conditional_entropy: f64,
}

pub fn noninjective_mass(table: &WeightedHomTable, host: &HostProfile) -> InjectivityReport {
    let g = table.pattern.graph().n_vertices() as i64;
    let k = host.k() as i64;
    let mut mass = BigRational::zero();
    let mut inj_weights = Vec::new();
    for (img, w) in table.images.iter().zip(&table.weights) {
        if WeightedHomTable::is_injective(img) {
            inj_weights.push(w);
        } else {
            mass += w;
        }
    }
    let inj_count = inj_weights.len() as u64;
    // n^(r-1) = n^(k-1) / M exactly
    let poly = BigInt::from((g - k) * (g - k + 1));
    let nk1 = BigInt::from(host.n()).pow((k - 1) as u32);
    let bound = BigRational::new(nk1 * poly, BigInt::from(2u8) * BigInt::from(host.m));
    let holds = mass <= bound;

    let bound_f64 = ratio_to_f64(&bound);
    let r = host.r_eff();
    let nf = host.n() as f64;
    let expo = (1.0 - r) * g as f64 + (k - 1) as f64 * r;
    let injective_applicable = bound < BigRational::one();
    let injective_rhs = nf.powf(expo) * (1.0 - bound_f64);
    let injective_holds = !injective_applicable || inj_count as f64 >= injective_rhs * (1.0 - 1e-9);

    let p_inj = BigRational::one() - &mass;
    let conditional_entropy = if p_inj.is_positive() {
        let pf = ratio_to_f64(&p_inj);
        -inj_weights
            .iter()
            .map(|w| {
                let c = ratio_to_f64(w) / pf;
                c * c.ln()
            })
            .sum::<f64>()
    } else {
        0.0
    };
    InjectivityReport {
        mass: mass.to_string(),
        mass_f64: ratio_to_f64(&mass),
        bound: bound.to_string(),
        bound_f64,
        holds,
        inj_count,
        hom_count: table.len() as u64,
        injective_rhs,
        injective_applicable,
        injective_holds,
        conditional_entropy,
    }
}

/// `[(p-1)a]! / [(p-2)a]! + 1`.
pub fn p_prime(p: usize, a: usize) -> Result<u128> {
    if p < 2 {
        return Err(Error::Domain(format!("p must be >= 2, got {p}")));
    }
    let mut acc: u128 = 1;
    for i in (p - 2) * a + 1..=(p - 1) * a {
        acc = acc
            .checked_mul(i as u128)
            .ok_or_else(|| limit("copy threshold", u128::MAX, u128::MAX))?;
    }
    Ok(acc + 1)
}

/// Edge count `(2p')^(1/b) n^(k - a/b)` above which a power copy is forced.
pub fn density_threshold(n: usize, t: TreeParams, p_prime: u128) -> f64 {
    (2.0 * p_prime as f64).powf(1.0 / t.b as f64) * (n as f64).powf(t.k as f64 - t.a as f64 / t.b as f64)
}

#[derive(Clone, Debug)]
pub struct PowerWitness {
    /// Root images in the host.
    pub roots: Vec<u32>,
    /// The witness relabeled with roots first; `host_vertices[i]` is vertex `i` in the host.
    pub member: RootedGraph,
    pub host_vertices: Vec<u32>,
    pub copies_used: usize,
    pub tag: usize,
    pub p_prime: u128,
}

/// Looks for a root tuple carrying at least `p'` rooted copies of
/// `T(a, b, k)`; unions the first `p'` copies, then drops copies from the
/// end until the union's minimal power tag is exactly `p`.
pub fn find_power_copy(x: &Hypergraph, params: TreeParams, p: usize) -> Result<Option<PowerWitness>> {
    let pp = p_prime(p, params.a)?;
    let t = build_tree(params)?;
    if x.k() != params.k {
        return Err(Error::Domain("host arity differs from tree arity".into()));
    }
    let pattern = t.graph().without_partition();
    let host = x.without_partition();
    let root_ids = t.roots().to_vec();

    // root tuple -> distinct copies (as sorted edge sets), in discovery order
    let mut groups: BTreeMap<Vec<u32>, Vec<Vec<Vec<u32>>>> = BTreeMap::new();
    visit_inj(&pattern, &host, &[], |img| {
        let key: Vec<u32> = root_ids.iter().map(|&r| img[r as usize]).collect();
        let mut edges: Vec<Vec<u32>> = pattern
            .edges()
            .iter()
            .map(|e| {
                let mut im: Vec<u32> = e.iter().map(|&v| img[v as usize]).collect();
                im.sort_unstable();
                im
            })
            .collect();
        edges.sort();
        let copies = groups.entry(key).or_default();
        if !copies.contains(&edges) {
            copies.push(edges);
        }
        ControlFlow::Continue(())
    });

    for (roots, copies) in groups {
        if (copies.len() as u128) < pp {
            continue;
        }
        let mut used = pp as usize;
        loop {
            let (member, host_vertices) = union_member(&copies[..used], &roots, params.k)?;
            let tag = minimal_power_tag(&member, &t)
                .ok_or_else(|| Error::Internal("union of copies has no power tag".into()))?;
            if tag == p {
                return Ok(Some(PowerWitness {
                    roots,
                    member,
                    host_vertices,
                    copies_used: used,
                    tag,
                    p_prime: pp,
                }));
            }
            if tag < p || used == 1 {
                break;
            }
            used -= 1;
        }
    }
    Ok(None)
}

fn union_member(copies: &[Vec<Vec<u32>>], roots: &[u32], k: usize) -> Result<(RootedGraph, Vec<u32>)> {
    let mut host_vertices: Vec<u32> = roots.to_vec();
    let mut rest: Vec<u32> = copies.iter().flatten().flatten().copied().filter(|v| !roots.contains(v)).collect();
    rest.sort_unstable();
    rest.dedup();
    host_vertices.extend(rest);
    let local: HashMap<u32, u32> = host_vertices.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let edges = copies
        .iter()
        .flatten()
        .map(|e| e.iter().map(|v| local[v]).collect::<Vec<u32>>());
    let g = Hypergraph::new(k, host_vertices.len(), edges, None)?;
    Ok((RootedGraph::new(g, (0..roots.len() as u32).collect())?, host_vertices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::enumerate_homs;

    fn ht(g: Hypergraph) -> Hypertree {
        Hypertree::from_graph(g).unwrap()
    }

    #[test]
    fn single_edge_is_uniform_on_ordered_edges() {
        let x = Hypergraph::triangle();
        let host = HostProfile::new(&x).unwrap();
        let t = build_mu(&ht(Hypergraph::single_edge(2)), &host).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.weights().iter().all(|w| *w == BigRational::new(1.into(), 6.into())));
        let p1 = verify_property1(&t, &host);
        assert!(p1.slack.abs() < 1e-12);
    }

    #[test]
    fn cherry_into_triangle_weights() {
        let host = HostProfile::new(&Hypergraph::triangle()).unwrap();
        let t = build_mu(&ht(Hypergraph::cherry()), &host).unwrap();
        assert_eq!(t.len(), 12);
        let w = BigRational::new(1.into(), 12.into());
        assert!(t.weights().iter().all(|x| *x == w));
        assert_eq!(t.total(), BigRational::one());
        // factorized form: ln n^|H| - ln M - E[ln deg]
        let fact = 3.0 * 3f64.ln() - 6f64.ln() - 2f64.ln();
        assert!((t.entropy_d() - fact).abs() < 1e-12);
    }

    #[test]
    fn cherry_into_triangle_noninjective_mass() {
        // both leaves may land on the same vertex: 6 of the 12 homomorphisms
        let host = HostProfile::new(&Hypergraph::triangle()).unwrap();
        let t = build_mu(&ht(Hypergraph::cherry()), &host).unwrap();
        let r = noninjective_mass(&t, &host);
        assert_eq!(r.mass, "1/2");
        assert_eq!(r.bound, "1/2");
        assert!(r.holds);
        assert_eq!(r.inj_count, 6);
    }

    #[test]
    fn edgeless_host_has_no_distribution() {
        let x = Hypergraph::empty(2, 4).unwrap();
        let host = HostProfile::new(&x).unwrap();
        assert!(matches!(build_mu(&ht(Hypergraph::single_edge(2)), &host), Err(Error::NoDistribution)));
    }

    #[test]
    fn support_is_hom_set() {
        let x = Hypergraph::new(2, 5, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![1, 3], vec![3, 4]], None).unwrap();
        let host = HostProfile::new(&x).unwrap();
        let h = ht(Hypergraph::path(3));
        let t = build_mu(&h, &host).unwrap();
        let mut a: Vec<Vec<u32>> = t.images().iter().map(|i| i.to_vec()).collect();
        let mut b: Vec<Vec<u32>> = enumerate_homs(h.graph(), &x, &[]).into_iter().map(|m| m.image).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn property2_negative_control() {
        let x = Hypergraph::new(2, 4, vec![vec![0, 1], vec![1, 2], vec![2, 3]], None).unwrap();
        let host = HostProfile::new(&x).unwrap();
        let mut t = build_mu(&ht(Hypergraph::path(2)), &host).unwrap();
        assert!(verify_property2(&t, &host).holds);
        let w = t.weights()[0].clone();
        t.corrupt_weight(0, w * BigRational::from_integer(2.into()));
        let r = verify_property2(&t, &host);
        assert!(!r.holds);
        assert_ne!(r.max_deviation, "0");
    }

    #[test]
    fn sidorenko_star_example() {
        let host = HostProfile::new(&Hypergraph::star(5)).unwrap();
        let r = sidorenko_check(&Hypergraph::cherry(), &host);
        assert_eq!(r.hom_count, 30);
        assert!((r.bound - 216.0 * (10.0f64 / 36.0).powi(2)).abs() < 1e-9);
        assert!(r.holds && r.exact_holds);
    }

    #[test]
    fn p_prime_values() {
        assert_eq!(p_prime(3, 1).unwrap(), 3);
        assert_eq!(p_prime(2, 2).unwrap(), 3);
        assert_eq!(p_prime(3, 2).unwrap(), 13);
        assert!(p_prime(1, 2).is_err());
    }

    #[test]
    fn power_copy_fixture() {
        // K_{2,3}: roots 0,1 and three whites joined to both
        let x = Hypergraph::new(2, 5, vec![vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![0, 4], vec![1, 4]], None).unwrap();
        let w = find_power_copy(&x, TreeParams::new(2, 1, 2).unwrap(), 3).unwrap().unwrap();
        assert_eq!(w.tag, 3);
        assert_eq!(w.member.graph.n_edges(), 6);
        let mut roots = w.roots.clone();
        roots.sort();
        assert_eq!(roots, vec![0, 1]);
        assert!(find_power_copy(&Hypergraph::empty(2, 5).unwrap(), TreeParams::new(2, 1, 2).unwrap(), 3)
            .unwrap()
            .is_none());
    }

    #[test]
    fn power_copy_trims_to_tag() {
        // K_{2,4} carries 4 copies; p = 2 needs p' = 2 and tag 2
        let mut edges = Vec::new();
        for w in 2..6u32 {
            edges.push(vec![0, w]);
            edges.push(vec![1, w]);
        }
        let x = Hypergraph::new(2, 6, edges, None).unwrap();
        let w = find_power_copy(&x, TreeParams::new(2, 1, 2).unwrap(), 2).unwrap().unwrap();
        assert_eq!((w.tag, w.copies_used), (2, 2));
    }
}
