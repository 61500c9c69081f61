//! Prime-field arithmetic and dense multivariate polynomials over `F_q`.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{limit, Error, Result};

pub const DEFAULT_MONOMIAL_LIMIT: u128 = 1_000_000;

/// The field `F_q` for a prime `q < 2^16`. Elements are plain `u32` in `[0, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    q: u32,
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q as u64) {
            return Err(Error::InvalidParams(format!("q = {q} is not prime")));
        }
        if q >= 1 << 16 {
            return Err(limit("field size", 1u128 << 16, q as u128));
        }
        Ok(PrimeField { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        let s = x + y;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, x: u32, y: u32) -> u32 {
        if x >= y {
            x - y
        } else {
            x + self.q - y
        }
    }

    #[inline]
    pub fn neg(&self, x: u32) -> u32 {
        if x == 0 {
            0
        } else {
            self.q - x
        }
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        (x * y) % self.q
    }

    pub fn pow(&self, mut x: u32, mut e: u64) -> u32 {
        let mut acc = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, x: u32) -> Option<u32> {
        (!x.is_multiple_of(self.q)).then(|| self.pow(x, self.q as u64 - 2))
    }

    pub fn elem(&self, x: u64) -> u32 {
        (x % self.q as u64) as u32
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.random_range(0..self.q)
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of monomials of total degree `<= d` in `vars` variables.
pub fn monomial_count(vars: usize, d: usize) -> u128 {
    binomial((vars + d) as u64, d as u64)
}

/// All exponent vectors of total degree `<= d`, in graded-lex order: by
/// degree, then lexicographically descending (`x0^d` before `x1^d`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    vars: usize,
    d: usize,
    exps: Vec<Box<[u8]>>,
}

impl MonomialBasis {
    pub fn new(vars: usize, d: usize, max_monomials: u128) -> Result<Self> {
        let count = monomial_count(vars, d);
        if count > max_monomials {
            return Err(limit("monomial count", max_monomials, count));
        }
        if d > u8::MAX as usize {
            return Err(limit("polynomial degree", u8::MAX as u128, d as u128));
        }
        let mut exps = Vec::with_capacity(count as usize);
        let mut cur = vec![0u8; vars];
        for deg in 0..=d {
            if vars == 0 {
                if deg == 0 {
                    exps.push(Box::from([]));
                }
                continue;
            }
            compositions(&mut cur, 0, deg, &mut exps);
        }
        debug_assert_eq!(exps.len() as u128, count);
        Ok(MonomialBasis { vars, d, exps })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[Box<[u8]>] {
        &self.exps
    }
}

fn compositions(cur: &mut [u8], i: usize, left: usize, out: &mut Vec<Box<[u8]>>) {
    if i + 1 == cur.len() {
        cur[i] = left as u8;
        out.push(cur.into());
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e as u8;
        compositions(cur, i + 1, left - e, out);
    }
    cur[i] = 0;
}

/// Dense polynomial over `F_q` in `vars` variables of total degree `<= d`.
#[derive(Clone, Debug)]
pub struct MultiPoly {
    field: PrimeField,
    basis: Arc<MonomialBasis>,
    coeffs: Vec<u32>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.basis.vars == other.basis.vars
            && self.basis.d == other.basis.d
            && self.coeffs == other.coeffs
    }
}

impl Eq for MultiPoly {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiPolyJson {
    pub q: u32,
    pub vars: usize,
    pub d: usize,
    pub coeffs: Vec<(Vec<u8>, u32)>,
}

impl MultiPoly {
    pub fn zero(field: PrimeField, basis: Arc<MonomialBasis>) -> Self {
        let coeffs = vec![0; basis.len()];
        MultiPoly { field, basis, coeffs }
    }

    /// Uniform coefficients for every monomial, drawn from a ChaCha8 stream seeded by `seed`.
    pub fn sample(field: PrimeField, basis: Arc<MonomialBasis>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::sample_with(field, basis, &mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(field: PrimeField, basis: Arc<MonomialBasis>, rng: &mut R) -> Self {
        let coeffs = (0..basis.len()).map(|_| field.random(rng)).collect();
        MultiPoly { field, basis, coeffs }
    }

    pub fn from_terms(field: PrimeField, basis: Arc<MonomialBasis>, terms: &[(Vec<u8>, u32)]) -> Result<Self> {
        let index: HashMap<&[u8], usize> = basis.exps.iter().enumerate().map(|(i, e)| (&e[..], i)).collect();
        let mut coeffs = vec![0; basis.len()];
        for (exp, c) in terms {
            let &i = index.get(&exp[..]).ok_or_else(|| {
                Error::Domain(format!(
                    "monomial {exp:?} outside {} variables of degree <= {}",
                    basis.vars, basis.d
                ))
            })?;
            coeffs[i] = field.add(coeffs[i], field.elem(*c as u64));
        }
        Ok(MultiPoly { field, basis, coeffs })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn vars(&self) -> usize {
        self.basis.vars
    }

    pub fn degree_bound(&self) -> usize {
        self.basis.d
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn eval(&self, point: &[u32]) -> Result<u32> {
        if point.len() != self.basis.vars {
            return Err(Error::Domain(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.basis.vars
            )));
        }
        let f = self.field;
        let d = self.basis.d;
        let powers: Vec<Vec<u32>> = point
            .iter()
            .map(|&x| {
                let x = f.elem(x as u64);
                let mut p = Vec::with_capacity(d + 1);
                let mut acc = 1 % f.q;
                for _ in 0..=d {
                    p.push(acc);
                    acc = f.mul(acc, x);
                }
                p
            })
            .collect();
        let mut acc = 0u64;
        for (exp, &c) in self.basis.exps.iter().zip(&self.coeffs) {
            if c == 0 {
                continue;
            }
            let mut term = c;
            for (v, &e) in exp.iter().enumerate() {
                if e > 0 {
                    term = f.mul(term, powers[v][e as usize]);
                }
            }
            acc += term as u64;
        }
        Ok(f.elem(acc))
    }

    /// Values at every point of `F_q^vars`, the point `(x_0, ..., x_{v-1})`
    /// at index `sum x_i q^(v-1-i)`. Substitutes one variable at a time.
    pub fn eval_grid(&self) -> Result<Vec<u32>> {
        let vars = self.basis.vars;
        let q = self.field.q as u128;
        let total = q.checked_pow(vars as u32).unwrap_or(u128::MAX);
        if total > 1 << 32 {
            return Err(limit("grid point", 1u128 << 32, total));
        }
        let d = self.basis.d;
        // level j: basis over vars j..; step maps level j to level j+1
        let mut bases = vec![self.basis.clone()];
        for j in 1..=vars {
            bases.push(Arc::new(MonomialBasis::new(vars - j, d, u128::MAX)?));
        }
        let mut steps = Vec::with_capacity(vars);
        for j in 0..vars {
            let next: HashMap<&[u8], u32> = bases[j + 1]
                .exps
                .iter()
                .enumerate()
                .map(|(i, e)| (&e[..], i as u32))
                .collect();
            let step: Vec<(u8, u32)> = bases[j]
                .exps
                .iter()
                .map(|e| (e[0], next[&e[1..]]))
                .collect();
            steps.push(step);
        }
        let mut out = Vec::with_capacity(total as usize);
        self.grid_rec(0, &self.coeffs, &bases, &steps, &mut out);
        Ok(out)
    }

    fn grid_rec(&self, j: usize, coeffs: &[u32], bases: &[Arc<MonomialBasis>], steps: &[Vec<(u8, u32)>], out: &mut Vec<u32>) {
        let f = self.field;
        if j == steps.len() {
            out.push(coeffs[0]);
            return;
        }
        let d = self.basis.d;
        let mut next = vec![0u32; bases[j + 1].len()];
        let mut pw = vec![0u32; d + 1];
        for c in 0..f.q {
            let mut acc = 1 % f.q;
            for p in pw.iter_mut() {
                *p = acc;
                acc = f.mul(acc, c);
            }
            next.iter_mut().for_each(|x| *x = 0);
            for (&coef, &(e0, to)) in coeffs.iter().zip(&steps[j]) {
                if coef != 0 {
                    let t = &mut next[to as usize];
                    *t = f.add(*t, f.mul(coef, pw[e0 as usize]));
                }
            }
            self.grid_rec(j + 1, &next, bases, steps, out);
        }
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.compatible(other)?;
        let (big, small) = if self.basis.d >= other.basis.d { (self, other) } else { (other, self) };
        let mut out = big.clone();
        // graded order: the smaller basis is a prefix of the larger
        for (o, &c) in out.coeffs.iter_mut().zip(&small.coeffs) {
            *o = self.field.add(*o, c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.compatible(other)?;
        let f = self.field;
        let basis = Arc::new(MonomialBasis::new(
            self.basis.vars,
            self.basis.d + other.basis.d,
            DEFAULT_MONOMIAL_LIMIT,
        )?);
        let index: HashMap<&[u8], usize> = basis.exps.iter().enumerate().map(|(i, e)| (&e[..], i)).collect();
        let mut coeffs = vec![0u32; basis.len()];
        let mut exp = vec![0u8; basis.vars];
        for (e1, &c1) in self.basis.exps.iter().zip(&self.coeffs) {
            if c1 == 0 {
                continue;
            }
            for (e2, &c2) in other.basis.exps.iter().zip(&other.coeffs) {
                if c2 == 0 {
                    continue;
                }
                for v in 0..exp.len() {
                    exp[v] = e1[v] + e2[v];
                }
                let i = index[&exp[..]];
                coeffs[i] = f.add(coeffs[i], f.mul(c1, c2));
            }
        }
        drop(index);
        Ok(MultiPoly { field: f, basis, coeffs })
    }

    fn compatible(&self, other: &MultiPoly) -> Result<()> {
        if self.field != other.field || self.basis.vars != other.basis.vars {
            return Err(Error::Domain("polynomials over different fields or variable counts".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> MultiPolyJson {
        MultiPolyJson {
            q: self.field.q,
            vars: self.basis.vars,
            d: self.basis.d,
            coeffs: self
                .basis
                .exps
                .iter()
                .zip(&self.coeffs)
                .filter(|(_, &c)| c != 0)
                .map(|(e, &c)| (e.to_vec(), c))
                .collect(),
        }
    }

    pub fn from_json(j: &MultiPolyJson) -> Result<MultiPoly> {
        let field = PrimeField::new(j.q)?;
        let basis = Arc::new(MonomialBasis::new(j.vars, j.d, DEFAULT_MONOMIAL_LIMIT)?);
        if let Some((_, c)) = j.coeffs.iter().find(|(_, c)| *c >= j.q) {
            return Err(Error::Domain(format!("coefficient {c} not reduced mod {}", j.q)));
        }
        MultiPoly::from_terms(field, basis, &j.coeffs)
    }
}

/// `s = b(b - a + k - 1) + a + 1` and `d = b s - 1`.
pub fn derive_constants(k: u64, a: u64, b: u64) -> (u64, u64) {
    let s = b * (b + k - 1 - a) + a + 1;
    (s, b * s - 1)
}

/// Warning text when `q < C(d+1, 2)`, the regime the construction assumes.
pub fn regime_warning(q: u32, d: u64) -> Option<String> {
    let need = binomial(d + 1, 2);
    ((q as u128) < need).then(|| format!("q = {q} is below C(d+1, 2) = {need} for d = {d}"))
}
