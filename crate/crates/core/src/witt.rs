//! Finite-length `p`-typical Witt vectors over any [`CoeffRing`].
//!
//! Addition and multiplication use the universal integer polynomials
//! `S_k, M_k`, built once per `(p, m)` by ghost recursion and memoized. Over a
//! ring of characteristic `p`, Frobenius raises components to the `p`-th power;
//! elsewhere it evaluates universal polynomials defined by
//! `w_k(F a) = w_{k+1}(a)`.
//!
//! Components are numbered from 1.
//!
//! ```
//! use wittquant::chainring::PModulus;
//! use wittquant::witt::WittVector;
//!
//! let f3 = PModulus::field(3).unwrap();
//! let one = WittVector::new(f3, vec![1, 0]).unwrap();
//! let two = WittVector::new(f3, vec![2, 0]).unwrap();
//! assert!(one.add(&two).unwrap().is_zero());
//! ```

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polyring::{PolyRing, Polynomial};
use crate::ring::CoeffRing;

/// Integer polynomial in `a_0..a_{m-1}, b_0..b_{m-1}` (or just `a_*`).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPoly {
    nvars: usize,
    terms: HashMap<Vec<u32>, BigInt>,
}

impl IntPoly {
    pub fn zero(nvars: usize) -> Self {
        IntPoly {
            nvars,
            terms: HashMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        Self::term(nvars, vec![0; nvars], c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::term(nvars, e, BigInt::one())
    }

    pub fn term(nvars: usize, exps: Vec<u32>, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let slot = out.terms.entry(e.clone()).or_insert_with(BigInt::zero);
            *slot += c;
            if slot.is_zero() {
                out.terms.remove(e);
            }
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        if k.is_zero() {
            return IntPoly::zero(self.nvars);
        }
        IntPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut acc: HashMap<Vec<u32>, BigInt> = HashMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        IntPoly {
            nvars: self.nvars,
            terms: acc,
        }
    }

    pub fn pow(&self, mut e: u64) -> IntPoly {
        let mut acc = IntPoly::constant(self.nvars, BigInt::one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division by an integer; panics if some coefficient is not divisible.
    pub fn exact_div(&self, d: &BigInt) -> IntPoly {
        IntPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let (q, r) = c.div_rem(d);
                    assert!(r.is_zero(), "inexact division of {c} by {d}");
                    (e.clone(), q)
                })
                .collect(),
        }
    }

    /// Substitutes `vals` for the variables in `ring`; terms whose coefficient
    /// vanishes in `ring` are skipped.
    pub fn eval<R: CoeffRing>(&self, ring: &R, vals: &[R::Elem]) -> R::Elem {
        assert_eq!(vals.len(), self.nvars);
        let mut powers: Vec<HashMap<u32, R::Elem>> = vec![HashMap::new(); self.nvars];
        let mut acc = ring.zero();
        for (e, c) in &self.terms {
            let c = ring.from_int(c);
            if ring.is_zero(&c) {
                continue;
            }
            let mut t = c;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if ring.is_zero(&vals[i]) {
                    t = ring.zero();
                    break;
                }
                let pw = powers[i]
                    .entry(k)
                    .or_insert_with(|| ring.pow(&vals[i], k as u64))
                    .clone();
                t = ring.mul(&t, &pw);
            }
            if !ring.is_zero(&t) {
                acc = ring.add(&acc, &t);
            }
        }
        acc
    }
}

/// `w_k(z) = Σ_{i≤k} p^i z_i^(p^(k-i))` over integer polynomials.
fn ghost_poly(p: u64, z: &[IntPoly], k: usize) -> IntPoly {
    let nv = z[0].nvars;
    let mut acc = IntPoly::zero(nv);
    for (i, zi) in z.iter().enumerate().take(k + 1) {
        let scale = BigInt::from(p).pow(i as u32);
        acc = acc.add(&zi.pow(p.pow((k - i) as u32)).scale(&scale));
    }
    acc
}

/// Solves `w_k(out) = target_k` for `out_k`, given `out_0..out_{k-1}`.
fn ghost_solve(p: u64, known: &[IntPoly], target: &IntPoly) -> IntPoly {
    let k = known.len();
    let mut rest = target.clone();
    for (i, zi) in known.iter().enumerate() {
        let scale = BigInt::from(p).pow(i as u32);
        rest = rest.sub(&zi.pow(p.pow((k - i) as u32)).scale(&scale));
    }
    rest.exact_div(&BigInt::from(p).pow(k as u32))
}

/// Limits on `p` and the length of structure tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WittGuard {
    pub max_p: u64,
    pub max_length: usize,
}

impl Default for WittGuard {
    fn default() -> Self {
        WittGuard {
            max_p: 7,
            max_length: 4,
        }
    }
}

static GUARD: RwLock<WittGuard> = RwLock::new(WittGuard {
    max_p: 7,
    max_length: 4,
});

/// Replaces the process-wide guard.
pub fn set_guard(guard: WittGuard) {
    *GUARD.write().unwrap() = guard;
}

pub fn guard() -> WittGuard {
    *GUARD.read().unwrap()
}

/// Universal sum and product polynomials for `W_m`.
#[derive(Debug)]
pub struct WittStructureTable {
    p: u64,
    length: usize,
    sum_polys: Vec<IntPoly>,
    prod_polys: Vec<IntPoly>,
    frob_polys: OnceLock<Vec<IntPoly>>,
}

impl WittStructureTable {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// `S_0..S_{m-1}` in `a_0..a_{m-1}, b_0..b_{m-1}`.
    pub fn sum_polys(&self) -> &[IntPoly] {
        &self.sum_polys
    }

    /// `M_0..M_{m-1}` in `a_0..a_{m-1}, b_0..b_{m-1}`.
    pub fn prod_polys(&self) -> &[IntPoly] {
        &self.prod_polys
    }

    /// `F_0..F_{m-2}` in `a_0..a_{m-1}`, with `w_k(F a) = w_{k+1}(a)`.
    pub fn frobenius_polys(&self) -> &[IntPoly] {
        self.frob_polys.get_or_init(|| {
            let m = self.length;
            let a: Vec<IntPoly> = (0..m).map(|i| IntPoly::var(m, i)).collect();
            let mut out: Vec<IntPoly> = Vec::new();
            for k in 0..m.saturating_sub(1) {
                let target = ghost_poly(self.p, &a, k + 1);
                let next = ghost_solve(self.p, &out, &target);
                out.push(next);
            }
            out
        })
    }

    fn build(p: u64, m: usize) -> Self {
        let nv = 2 * m;
        let a: Vec<IntPoly> = (0..m).map(|i| IntPoly::var(nv, i)).collect();
        let b: Vec<IntPoly> = (0..m).map(|i| IntPoly::var(nv, m + i)).collect();
        let mut sums: Vec<IntPoly> = Vec::with_capacity(m);
        let mut prods: Vec<IntPoly> = Vec::with_capacity(m);
        for k in 0..m {
            let wa = ghost_poly(p, &a, k);
            let wb = ghost_poly(p, &b, k);
            let s = ghost_solve(p, &sums, &wa.add(&wb));
            let t = ghost_solve(p, &prods, &wa.mul(&wb));
            sums.push(s);
            prods.push(t);
        }
        WittStructureTable {
            p,
            length: m,
            sum_polys: sums,
            prod_polys: prods,
            frob_polys: OnceLock::new(),
        }
    }
}

type TableCache = RwLock<HashMap<(u64, usize), Arc<WittStructureTable>>>;

fn cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// The memoized structure table for `W_m` at the prime `p` (odd, within the guard).
pub fn witt_structure_polynomials(p: u64, m: usize) -> Result<Arc<WittStructureTable>> {
    if !is_prime(p) || p == 2 {
        return Err(Error::InvalidModulus(format!("{p} is not an odd prime")));
    }
    if m == 0 {
        return Err(Error::LengthMismatch(0, 1));
    }
    let g = guard();
    if p > g.max_p || m > g.max_length {
        return Err(Error::GuardExceeded { p, length: m });
    }
    if let Some(t) = cache().read().unwrap().get(&(p, m)) {
        return Ok(t.clone());
    }
    let mut w = cache().write().unwrap();
    let t = w
        .entry((p, m))
        .or_insert_with(|| Arc::new(WittStructureTable::build(p, m)))
        .clone();
    Ok(t)
}

/// A Witt vector `(z_1, …, z_m)` over `ring` at the prime `p`.
#[derive(Clone)]
pub struct WittVector<R: CoeffRing> {
    ring: R,
    p: u64,
    comps: Vec<R::Elem>,
}

impl<R: CoeffRing> WittVector<R> {
    /// Takes `p` from the residue characteristic of `ring`.
    pub fn new(ring: R, comps: Vec<R::Elem>) -> Result<Self> {
        let p = ring
            .residue_char()
            .ok_or(Error::UnsupportedRing("ring has no residue characteristic; use with_prime"))?;
        Self::with_prime(ring, p, comps)
    }

    pub fn with_prime(ring: R, p: u64, comps: Vec<R::Elem>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::LengthMismatch(0, 1));
        }
        if !is_prime(p) || p == 2 {
            return Err(Error::InvalidModulus(format!("{p} is not an odd prime")));
        }
        Ok(WittVector { ring, p, comps })
    }

    pub fn zero(ring: R, p: u64, m: usize) -> Result<Self> {
        let z = ring.zero();
        Self::with_prime(ring, p, vec![z; m])
    }

    pub fn one(ring: R, p: u64, m: usize) -> Result<Self> {
        Self::teichmuller(ring.clone(), p, ring.one(), m)
    }

    /// `τ(x) = (x, 0, …, 0)`.
    pub fn teichmuller(ring: R, p: u64, x: R::Elem, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::LengthMismatch(0, 1));
        }
        let mut comps = vec![ring.zero(); m];
        comps[0] = x;
        Self::with_prime(ring, p, comps)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `z_i`, for `1 ≤ i ≤ m`.
    pub fn component(&self, i: usize) -> &R::Elem {
        assert!(i >= 1 && i <= self.comps.len(), "component index {i} out of 1..={}", self.comps.len());
        &self.comps[i - 1]
    }

    pub fn components(&self) -> &[R::Elem] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<R::Elem> {
        self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| self.ring.is_zero(c))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !self.ring.same_ring(&other.ring) || self.p != other.p {
            return Err(Error::RingMismatch);
        }
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(())
    }

    fn binary(&self, other: &Self, polys: impl Fn(&WittStructureTable) -> &[IntPoly]) -> Result<Self> {
        self.check(other)?;
        let table = witt_structure_polynomials(self.p, self.len())?;
        let vals: Vec<R::Elem> = self.comps.iter().chain(&other.comps).cloned().collect();
        let comps = polys(&table)
            .iter()
            .map(|s| s.eval(&self.ring, &vals))
            .collect();
        Ok(WittVector {
            ring: self.ring.clone(),
            p: self.p,
            comps,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.binary(other, |t| t.sum_polys())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.binary(other, |t| t.prod_polys())
    }

    /// Componentwise negation (valid since `p` is odd).
    pub fn neg(&self) -> Self {
        WittVector {
            ring: self.ring.clone(),
            p: self.p,
            comps: self.comps.iter().map(|c| self.ring.neg(c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// `k · a` by repeated doubling.
    pub fn scale_int(&self, k: u64) -> Result<Self> {
        let mut acc = WittVector::zero(self.ring.clone(), self.p, self.len())?;
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.add(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.add(&base)?;
            }
        }
        Ok(acc)
    }

    /// `V(z) = (0, z_1, …, z_m)`.
    pub fn verschiebung(&self) -> Self {
        let mut comps = Vec::with_capacity(self.len() + 1);
        comps.push(self.ring.zero());
        comps.extend(self.comps.iter().cloned());
        WittVector {
            ring: self.ring.clone(),
            p: self.p,
            comps,
        }
    }

    /// `F : W_m → W_{m-1}`.
    pub fn frobenius(&self) -> Result<Self> {
        let m = self.len();
        if m < 2 {
            return Err(Error::LengthMismatch(m, 2));
        }
        let comps = if self.ring.char_p() == Some(self.p) {
            self.comps[..m - 1]
                .iter()
                .map(|c| self.ring.pth_power(c, self.p))
                .collect()
        } else {
            let table = witt_structure_polynomials(self.p, m)?;
            table
                .frobenius_polys()
                .iter()
                .map(|f| f.eval(&self.ring, &self.comps))
                .collect()
        };
        Ok(WittVector {
            ring: self.ring.clone(),
            p: self.p,
            comps,
        })
    }

    /// Restriction `W_m → W_k`, keeping the first `k` components.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.len() {
            return Err(Error::LengthMismatch(k, self.len()));
        }
        Ok(WittVector {
            ring: self.ring.clone(),
            p: self.p,
            comps: self.comps[..k].to_vec(),
        })
    }

    /// `(w_1, …, w_m)` with `w_{k+1} = Σ_{i≤k} p^i z_{i+1}^(p^(k-i))`.
    pub fn ghost(&self) -> Result<Vec<R::Elem>> {
        if !self.ring.torsion_free() {
            return Err(Error::UnsupportedRing("ghost components need a torsion-free ring"));
        }
        let r = &self.ring;
        Ok((0..self.len())
            .map(|k| {
                let mut acc = r.zero();
                for i in 0..=k {
                    let c = r.from_int(&BigInt::from(self.p).pow(i as u32));
                    let t = r.mul(&c, &r.pow(&self.comps[i], self.p.pow((k - i) as u32)));
                    acc = r.add(&acc, &t);
                }
                acc
            })
            .collect())
    }

    /// Maps every component through `f` into another ring.
    pub fn map<S: CoeffRing>(&self, ring: S, f: impl Fn(&R::Elem) -> S::Elem) -> WittVector<S> {
        WittVector {
            ring,
            p: self.p,
            comps: self.comps.iter().map(f).collect(),
        }
    }
}

impl<R: CoeffRing> PartialEq for WittVector<R> {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.ring.same_ring(&other.ring) && self.comps == other.comps
    }
}

impl<R: CoeffRing> fmt::Debug for WittVector<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WittVector(p={}, {:?})", self.p, self.comps)
    }
}

impl<R: CoeffRing> fmt::Display for WittVector<R>
where
    R::Elem: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl WittVector<Arc<PolyRing>> {
    /// Parses `[u^3 + v, 0, 2*u]`.
    pub fn parse(ring: &Arc<PolyRing>, text: &str) -> Result<Self> {
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected [..] around {text:?}")))?;
        let comps = inner
            .split(',')
            .map(|c| Polynomial::parse(ring, c))
            .collect::<Result<Vec<_>>>()?;
        WittVector::new(ring.clone(), comps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chainring::PModulus;
    use crate::polyring::QuotientRing;
    use crate::polyring::MonomialIdeal;
    use crate::ring::Integers;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// `T(a) = a^(p^(m-1)) mod p^m`, the Teichmüller representative in `Z/p^m`.
    fn teich_mod(p: u64, m: u32, a: u64) -> u64 {
        let q = p.pow(m);
        let mut r = 1u64;
        for _ in 0..p.pow(m - 1) {
            r = r * a % q;
        }
        r
    }

    /// `(a_1, …, a_m) ↦ Σ p^(i-1) T(a_i) mod p^m`.
    fn to_zpm(p: u64, a: &[u64]) -> u64 {
        let m = a.len() as u32;
        let q = p.pow(m);
        a.iter()
            .enumerate()
            .map(|(i, &x)| p.pow(i as u32) * teich_mod(p, m - i as u32, x) % q)
            .sum::<u64>()
            % q
    }

    #[test]
    fn structure_polynomials_low_degree() {
        let t = witt_structure_polynomials(3, 2).unwrap();
        let v = |i| IntPoly::var(4, i);
        assert_eq!(t.sum_polys()[0], v(0).add(&v(2)));
        assert_eq!(t.prod_polys()[0], v(0).mul(&v(2)));
        // S_1 = a_1 + b_1 - a_0^2 b_0 - a_0 b_0^2
        let s1 = v(1)
            .add(&v(3))
            .sub(&v(0).pow(2).mul(&v(2)))
            .sub(&v(0).mul(&v(2).pow(2)));
        assert_eq!(t.sum_polys()[1], s1);
        // independent: (a_0^3 + b_0^3 - (a_0 + b_0)^3) / 3
        let direct = v(1)
            .add(&v(3))
            .add(&v(0).pow(3).add(&v(2).pow(3)).sub(&v(0).add(&v(2)).pow(3)).exact_div(&big(3)));
        assert_eq!(t.sum_polys()[1], direct);
    }

    #[test]
    fn structure_tables_satisfy_ghost_identities() {
        for (p, m) in [(3, 3), (5, 2), (7, 2)] {
            let t = witt_structure_polynomials(p, m).unwrap();
            let nv = 2 * m;
            let a: Vec<IntPoly> = (0..m).map(|i| IntPoly::var(nv, i)).collect();
            let b: Vec<IntPoly> = (0..m).map(|i| IntPoly::var(nv, m + i)).collect();
            for k in 0..m {
                let wa = ghost_poly(p, &a, k);
                let wb = ghost_poly(p, &b, k);
                assert_eq!(ghost_poly(p, &t.sum_polys()[..=k], k), wa.add(&wb));
                assert_eq!(ghost_poly(p, &t.prod_polys()[..=k], k), wa.mul(&wb));
            }
        }
    }

    #[test]
    fn guard_and_argument_errors() {
        assert_eq!(
            witt_structure_polynomials(11, 2).unwrap_err(),
            Error::GuardExceeded { p: 11, length: 2 }
        );
        assert!(witt_structure_polynomials(3, 5).is_err());
        assert!(witt_structure_polynomials(9, 2).is_err());
        assert!(witt_structure_polynomials(3, 0).is_err());
    }

    #[test]
    fn memoized_tables_are_shared() {
        let a = witt_structure_polynomials(3, 2).unwrap();
        let b = witt_structure_polynomials(3, 2).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn w2_f3_examples() {
        let f3 = PModulus::field(3).unwrap();
        let w = |a, b| WittVector::new(f3, vec![a, b]).unwrap();
        assert_eq!(w(1, 0).add(&w(2, 0)).unwrap(), w(0, 0));
        assert_eq!(w(2, 0).mul(&w(2, 0)).unwrap(), w(1, 0));
        assert_eq!(w(2, 1).add(&w(0, 0)).unwrap(), w(2, 1));
        assert_eq!(teich_mod(3, 2, 2), 8);
    }

    #[test]
    fn w2_f3_matches_z9_exhaustively() {
        let f3 = PModulus::field(3).unwrap();
        let all: Vec<_> = (0..9u64)
            .map(|c| WittVector::new(f3, vec![c % 3, c / 3]).unwrap())
            .collect();
        let image = |v: &WittVector<PModulus>| to_zpm(3, v.components());
        let mut seen: Vec<u64> = all.iter().map(image).collect();
        seen.sort();
        assert_eq!(seen, (0..9).collect::<Vec<_>>());
        for a in &all {
            for b in &all {
                assert_eq!(image(&a.add(b).unwrap()), (image(a) + image(b)) % 9);
                assert_eq!(image(&a.mul(b).unwrap()), (image(a) * image(b)) % 9);
            }
        }
    }

    #[test]
    fn w3_f5_matches_z125_sampled() {
        let f5 = PModulus::field(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let a = WittVector::new(f5, (0..3).map(|_| rng.gen_range(0..5)).collect()).unwrap();
            let b = WittVector::new(f5, (0..3).map(|_| rng.gen_range(0..5)).collect()).unwrap();
            let (ia, ib) = (to_zpm(5, a.components()), to_zpm(5, b.components()));
            assert_eq!(to_zpm(5, a.add(&b).unwrap().components()), (ia + ib) % 125);
            assert_eq!(to_zpm(5, a.mul(&b).unwrap().components()), (ia * ib) % 125);
        }
    }

    #[test]
    fn ghost_examples() {
        let z = |c: Vec<i64>| WittVector::with_prime(Integers, 3, c.into_iter().map(big).collect()).unwrap();
        assert_eq!(z(vec![0, 1]).ghost().unwrap(), vec![big(0), big(3)]);
        assert_eq!(z(vec![2, 0]).ghost().unwrap(), vec![big(2), big(8)]);
        let f3 = PModulus::field(3).unwrap();
        assert!(WittVector::new(f3, vec![1, 1]).unwrap().ghost().is_err());
        // symbolic: ghost((x, 0)) = (x, x^3) over Z[x]
        let zx = IntRing;
        let x = IntPoly::var(1, 0);
        let g = WittVector::with_prime(zx, 3, vec![x.clone(), IntPoly::zero(1)])
            .unwrap()
            .ghost()
            .unwrap();
        assert_eq!(g, vec![x.clone(), x.pow(3)]);
    }

    /// `Z[x]` as a torsion-free test ring.
    #[derive(Clone, Debug)]
    struct IntRing;

    impl CoeffRing for IntRing {
        type Elem = IntPoly;
        fn zero(&self) -> IntPoly {
            IntPoly::zero(1)
        }
        fn one(&self) -> IntPoly {
            IntPoly::constant(1, BigInt::one())
        }
        fn add(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
            a.add(b)
        }
        fn mul(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
            a.mul(b)
        }
        fn neg(&self, a: &IntPoly) -> IntPoly {
            a.scale(&big(-1))
        }
        fn char_p(&self) -> Option<u64> {
            None
        }
        fn torsion_free(&self) -> bool {
            true
        }
        fn same_ring(&self, _: &Self) -> bool {
            true
        }
        fn from_int(&self, c: &BigInt) -> IntPoly {
            IntPoly::constant(1, c.clone())
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn ghost_is_additive_and_multiplicative(
            a in proptest::collection::vec(-20i64..20, 3),
            b in proptest::collection::vec(-20i64..20, 3),
        ) {
            let wa = WittVector::with_prime(Integers, 3, a.into_iter().map(big).collect()).unwrap();
            let wb = WittVector::with_prime(Integers, 3, b.into_iter().map(big).collect()).unwrap();
            let (ga, gb) = (wa.ghost().unwrap(), wb.ghost().unwrap());
            let gs = wa.add(&wb).unwrap().ghost().unwrap();
            let gp = wa.mul(&wb).unwrap().ghost().unwrap();
            for k in 0..3 {
                prop_assert_eq!(&gs[k], &(&ga[k] + &gb[k]));
                prop_assert_eq!(&gp[k], &(&ga[k] * &gb[k]));
            }
        }

        #[test]
        fn integer_frobenius_shifts_ghosts(a in proptest::collection::vec(-9i64..9, 3)) {
            let wa = WittVector::with_prime(Integers, 3, a.into_iter().map(big).collect()).unwrap();
            let g = wa.ghost().unwrap();
            let gf = wa.frobenius().unwrap().ghost().unwrap();
            prop_assert_eq!(&gf[..], &g[1..]);
        }
    }

    fn small_quotient() -> QuotientRing {
        let r = PolyRing::symplectic(1, PModulus::field(3).unwrap());
        QuotientRing::new(MonomialIdeal::zero(&r)).with_degree_cap(4)
    }

    fn random_elem(rng: &mut impl Rng, b: &QuotientRing) -> Polynomial {
        let basis = b.monomial_basis().unwrap();
        let terms = (0..3).map(|_| (basis[rng.gen_range(0..basis.len())].clone(), rng.gen_range(0..3)));
        Polynomial::from_terms(b.base(), terms)
    }

    fn random_vec(rng: &mut impl Rng, b: &QuotientRing, m: usize) -> WittVector<QuotientRing> {
        WittVector::new(b.clone(), (0..m).map(|_| random_elem(rng, b)).collect()).unwrap()
    }

    #[test]
    fn ring_axioms_over_truncated_polynomials() {
        let b = small_quotient();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for case in 0..100 {
            let m = 1 + case % 3;
            let (x, y, z) = (random_vec(&mut rng, &b, m), random_vec(&mut rng, &b, m), random_vec(&mut rng, &b, m));
            assert_eq!(x.add(&y).unwrap().add(&z).unwrap(), x.add(&y.add(&z).unwrap()).unwrap());
            assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
            assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
            assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
            assert_eq!(
                x.mul(&y.add(&z).unwrap()).unwrap(),
                x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
            );
            assert!(x.sub(&x).unwrap().is_zero());
            let one = WittVector::one(b.clone(), 3, m).unwrap();
            assert_eq!(x.mul(&one).unwrap(), x);
        }
    }

    #[test]
    fn frobenius_and_verschiebung() {
        let r = PolyRing::symplectic(1, PModulus::field(3).unwrap());
        let u = Polynomial::parse(&r, "u").unwrap();
        let v = Polynomial::parse(&r, "v").unwrap();
        let z = WittVector::new(r.clone(), vec![u.clone(), v]).unwrap();
        let fz = z.frobenius().unwrap();
        assert_eq!(fz.components(), &[Polynomial::parse(&r, "u^3").unwrap()]);
        let zero = WittVector::zero(r.clone(), 3, 2).unwrap();
        assert!(zero.verschiebung().is_zero());
        assert_eq!(zero.verschiebung().len(), 3);
        let one = WittVector::new(r.clone(), vec![u]).unwrap();
        assert_eq!(one.frobenius(), Err(Error::LengthMismatch(1, 2)));

        let b = small_quotient();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for case in 0..40 {
            let m = 1 + case % 3;
            let a = random_vec(&mut rng, &b, m);
            let pa = a.add(&a).unwrap().add(&a).unwrap();
            // VF: both sides in W_m
            if m >= 2 {
                assert_eq!(a.frobenius().unwrap().verschiebung(), pa);
            }
            // FV: W_m -> W_{m+1} -> W_m
            assert_eq!(a.verschiebung().frobenius().unwrap(), pa);
            assert_eq!(a.scale_int(3).unwrap(), pa);
        }
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let b = small_quotient();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let (x, y) = (random_elem(&mut rng, &b), random_elem(&mut rng, &b));
            let tx = WittVector::teichmuller(b.clone(), 3, x.clone(), 3).unwrap();
            let ty = WittVector::teichmuller(b.clone(), 3, y.clone(), 3).unwrap();
            let txy = WittVector::teichmuller(b.clone(), 3, b.mul(&x, &y), 3).unwrap();
            assert_eq!(tx.mul(&ty).unwrap(), txy);
        }
    }

    #[test]
    fn universal_frobenius_over_z9_matches_ghost_definition() {
        // over Z/9, F via universal polynomials agrees with the integer computation reduced mod 9
        let z9 = PModulus::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let a: Vec<i64> = (0..3).map(|_| rng.gen_range(0..9)).collect();
            let wz = WittVector::with_prime(Integers, 3, a.iter().map(|&x| big(x)).collect()).unwrap();
            let w9 = WittVector::new(z9, a.iter().map(|&x| x as u64).collect()).unwrap();
            let fz = wz.frobenius().unwrap();
            let f9 = w9.frobenius().unwrap();
            let reduced: Vec<u64> = fz
                .components()
                .iter()
                .map(|c| CoeffRing::from_int(&z9, c))
                .collect();
            assert_eq!(f9.components(), reduced.as_slice());
        }
    }

    #[test]
    fn text_round_trip() {
        let r = PolyRing::symplectic(1, PModulus::field(3).unwrap());
        let z = WittVector::parse(&r, "[u^3+v, 0, 2*u]").unwrap();
        assert_eq!(z.to_string(), "[u^3 + v, 0, 2*u]");
        assert_eq!(WittVector::parse(&r, &z.to_string()).unwrap(), z);
        assert!(WittVector::parse(&r, "u, v").is_err());
    }

    #[test]
    fn mismatch_errors() {
        let f3 = PModulus::field(3).unwrap();
        let a = WittVector::new(f3, vec![1, 0]).unwrap();
        let b = WittVector::new(f3, vec![1, 0, 0]).unwrap();
        assert_eq!(a.add(&b), Err(Error::LengthMismatch(2, 3)));
        let c = WittVector::new(PModulus::field(5).unwrap(), vec![1, 0]).unwrap();
        assert_eq!(a.mul(&c.map(f3, |x| *x)), Err(Error::RingMismatch));
    }
}
