//! Sparse multivariate polynomials over `Z/p^n` (usually `F_p`), monomial
//! ideals and their quotients, Kähler 1-forms, the inverse Cartier operator
//! and the symplectic Poisson structure.
//!
//! A ring may carry a symplectic pairing of its variables into pairs
//! `(u_i, v_i)`; the Poisson bracket is then normalized so that
//! `{u_i, v_i} = +1` (or `-1` when the pairing sign is flipped, which is only
//! useful for mutation testing).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::chainring::PModulus;
use crate::error::{Error, Result};
use crate::ring::CoeffRing;
use crate::witt::WittVector;

/// Exponent vector, one entry per ring variable.
pub type Monomial = Vec<u32>;

/// Variables, coefficient modulus and optional symplectic pairing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    vars: Vec<String>,
    modulus: PModulus,
    pairs: Vec<(usize, usize)>,
    pairing_sign: i8,
}

impl PolyRing {
    pub fn new(vars: &[&str], modulus: PModulus) -> Result<Arc<PolyRing>> {
        Self::with_pairs(vars, modulus, &[])
    }

    /// `pairs` lists `(u, v)` variable indices with `{u, v} = 1`.
    pub fn with_pairs(
        vars: &[&str],
        modulus: PModulus,
        pairs: &[(usize, usize)],
    ) -> Result<Arc<PolyRing>> {
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::Parse(format!("bad variable name {v:?}")));
            }
            if vars[..i].contains(v) {
                return Err(Error::Parse(format!("duplicate variable {v}")));
            }
        }
        let mut seen = vec![false; vars.len()];
        for &(a, b) in pairs {
            if a >= vars.len() || b >= vars.len() || a == b || seen[a] || seen[b] {
                return Err(Error::Parse("pairing must be a partial matching".into()));
            }
            seen[a] = true;
            seen[b] = true;
        }
        Ok(Arc::new(PolyRing {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            modulus,
            pairs: pairs.to_vec(),
            pairing_sign: 1,
        }))
    }

    /// `F_p[u, v]` for `r = 1`, else `F_p[u1..ur, v1..vr]`, paired as `(u_i, v_i)`.
    pub fn symplectic(r: usize, modulus: PModulus) -> Arc<PolyRing> {
        let names = paired_names("u", "v", r);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let pairs: Vec<_> = (0..r).map(|i| (i, r + i)).collect();
        Self::with_pairs(&refs, modulus, &pairs).expect("generated names are valid")
    }

    /// Copy of this ring whose bracket has the opposite global sign.
    pub fn with_pairing_sign(&self, sign: i8) -> Arc<PolyRing> {
        assert!(sign == 1 || sign == -1);
        Arc::new(PolyRing {
            pairing_sign: sign,
            ..self.clone()
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn modulus(&self) -> PModulus {
        self.modulus
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pairing_sign(&self) -> i8 {
        self.pairing_sign
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn is_fully_paired(&self) -> bool {
        !self.pairs.is_empty() && 2 * self.pairs.len() == self.vars.len()
    }

    /// `{x_a, x_b}` for variables, as a scalar in `{-1, 0, 1}`.
    fn var_bracket(&self, a: usize, b: usize) -> i64 {
        let s = self.pairing_sign as i64;
        for &(u, v) in &self.pairs {
            if (a, b) == (u, v) {
                return s;
            }
            if (a, b) == (v, u) {
                return -s;
            }
        }
        0
    }
}

pub(crate) fn paired_names(a: &str, b: &str, r: usize) -> Vec<String> {
    if r == 1 {
        vec![a.to_string(), b.to_string()]
    } else {
        (1..=r)
            .map(|i| format!("{a}{i}"))
            .chain((1..=r).map(|i| format!("{b}{i}")))
            .collect()
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && s != "d"
}

/// Graded order, highest first: total degree, then exponent vector.
pub fn graded_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

/// A polynomial with canonical coefficients and no zero terms.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    ring: Arc<PolyRing>,
    terms: BTreeMap<Monomial, u64>,
}

impl Polynomial {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: i128) -> Self {
        Self::monomial(ring, vec![0; ring.nvars()], c)
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Self::constant(ring, 1)
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Self {
        let mut e = vec![0; ring.nvars()];
        e[i] = 1;
        Self::monomial(ring, e, 1)
    }

    pub fn var_named(ring: &Arc<PolyRing>, name: &str) -> Result<Self> {
        let i = ring
            .var_index(name)
            .ok_or_else(|| Error::Parse(format!("unknown variable {name}")))?;
        Ok(Self::var(ring, i))
    }

    pub fn monomial(ring: &Arc<PolyRing>, exps: Monomial, c: i128) -> Self {
        assert_eq!(exps.len(), ring.nvars());
        let mut terms = BTreeMap::new();
        let c = ring.modulus.reduce(c);
        if c != 0 {
            terms.insert(exps, c);
        }
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    /// Collects `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(ring: &Arc<PolyRing>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, u64)>,
    {
        let md = ring.modulus;
        let mut out: BTreeMap<Monomial, u64> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), ring.nvars());
            let c = md.reduce_u64(c);
            if c == 0 {
                continue;
            }
            let slot = out.entry(e).or_insert(0);
            *slot = md.add(*slot, c);
        }
        out.retain(|_, c| *c != 0);
        Polynomial {
            ring: ring.clone(),
            terms: out,
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> u64 {
        self.terms.get(exps).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn check(&self, other: &Polynomial) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        let md = self.ring.modulus;
        let mut terms = self.terms.clone();
        for (e, &c) in &other.terms {
            let slot = terms.entry(e.clone()).or_insert(0);
            *slot = md.add(*slot, c);
        }
        terms.retain(|_, c| *c != 0);
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        let md = self.ring.modulus;
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, &c)| (e.clone(), md.neg(c))).collect(),
        }
    }

    pub fn scale(&self, c: i128) -> Polynomial {
        let md = self.ring.modulus;
        let c = md.reduce(c);
        let mut terms: BTreeMap<_, _> = self
            .terms
            .iter()
            .map(|(e, &t)| (e.clone(), md.mul(t, c)))
            .collect();
        terms.retain(|_, c| *c != 0);
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        let md = self.ring.modulus;
        let mut acc: HashMap<Monomial, u64> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let slot = acc.entry(e).or_insert(0);
                *slot = md.add(*slot, md.mul(ca, cb));
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn pow(&self, e: u64) -> Polynomial {
        self.ring.pow(self, e)
    }

    /// `f^(p^k)`; over `F_p` this is the termwise Frobenius.
    pub fn pth_power(&self, k: u32) -> Polynomial {
        let p = self.ring.p();
        let q = p.pow(k);
        if self.ring.modulus.n() == 1 {
            let md = self.ring.modulus;
            let terms = self
                .terms
                .iter()
                .map(|(e, &c)| (e.iter().map(|x| x * q as u32).collect(), md.pow(c, q)))
                .collect();
            return Polynomial {
                ring: self.ring.clone(),
                terms,
            };
        }
        let mut out = self.clone();
        for _ in 0..k {
            out = out.pow(p);
        }
        out
    }

    /// `∂f/∂x_i`.
    pub fn partial(&self, i: usize) -> Polynomial {
        let md = self.ring.modulus;
        let terms = self.terms.iter().filter_map(|(e, &c)| {
            if e[i] == 0 {
                return None;
            }
            let mut d = e.clone();
            d[i] -= 1;
            Some((d, md.mul(c, md.reduce_u64(e[i] as u64))))
        });
        Polynomial::from_terms(&self.ring, terms)
    }

    /// `q` with `self = q · d`, if it exists. The leading coefficient of `d`
    /// must be a unit.
    pub fn divide_exact(&self, d: &Polynomial) -> Result<Option<Polynomial>> {
        self.check(d)?;
        let md = self.ring.modulus;
        let Some((lead, lc)) = d.sorted_terms().first().map(|(e, c)| ((*e).clone(), *c)) else {
            return Err(Error::NotUnit(0));
        };
        let inv = md.inv_unit(lc).ok_or(Error::NotUnit(lc))?;
        let mut rest = self.clone();
        let mut quot = Vec::new();
        while let Some((e, c)) = rest.sorted_terms().first().map(|(e, c)| ((*e).clone(), *c)) {
            if e.iter().zip(&lead).any(|(a, b)| a < b) {
                return Ok(None);
            }
            let qe: Monomial = e.iter().zip(&lead).map(|(a, b)| a - b).collect();
            let qc = md.mul(c, inv);
            let step = Polynomial::from_terms(&self.ring, [(qe.clone(), qc)]);
            rest = rest.try_sub(&step.try_mul(d)?)?;
            quot.push((qe, qc));
        }
        Ok(Some(Polynomial::from_terms(&self.ring, quot)))
    }

    /// Termwise map to another ring with the same variables (e.g. reduction mod p).
    pub fn change_ring(&self, ring: &Arc<PolyRing>) -> Result<Polynomial> {
        if ring.nvars() != self.ring.nvars() {
            return Err(Error::RingMismatch);
        }
        Ok(Polynomial::from_terms(
            ring,
            self.terms.iter().map(|(e, &c)| (e.clone(), c)),
        ))
    }

    /// Terms in display order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, u64)> {
        let mut v: Vec<_> = self.terms().collect();
        v.sort_by(|a, b| graded_cmp(a.0, b.0));
        v
    }

    pub fn parse(ring: &Arc<PolyRing>, text: &str) -> Result<Polynomial> {
        let names: Vec<&str> = ring.vars.iter().map(String::as_str).collect();
        let terms = parse_sparse(text, &names)?;
        Ok(Polynomial::from_terms(
            ring,
            terms
                .into_iter()
                .map(|(e, c)| (e, ring.modulus.reduce(c))),
        ))
    }
}

/// Parses `term (('+'|'-') term)*` over the given variable names into signed
/// integer terms. Shared by the polynomial and Weyl-element text forms.
pub(crate) fn parse_sparse(text: &str, names: &[&str]) -> Result<Vec<(Monomial, i128)>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let bytes = s.as_bytes();
    let mut pos = 0;
    let mut out = Vec::new();
    let mut first = true;
    while pos < bytes.len() {
        let mut sign: i128 = 1;
        if bytes[pos] == b'+' || bytes[pos] == b'-' {
            if bytes[pos] == b'-' {
                sign = -1;
            }
            pos += 1;
        } else if !first {
            return Err(Error::Parse(format!("expected '+' at offset {pos} in {s:?}")));
        }
        first = false;
        let mut coeff: i128 = sign;
        let mut exps = vec![0u32; names.len()];
        let mut factors = 0;
        loop {
            if pos >= bytes.len() {
                break;
            }
            let c = bytes[pos];
            if c.is_ascii_digit() {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let v: i128 = s[start..pos]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {:?}", &s[start..pos])))?;
                coeff = coeff
                    .checked_mul(v)
                    .ok_or_else(|| Error::Parse("coefficient overflow".into()))?;
            } else if c.is_ascii_alphabetic() || c == b'_' {
                let start = pos;
                while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                    pos += 1;
                }
                let name = &s[start..pos];
                let idx = names
                    .iter()
                    .position(|n| *n == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name}")))?;
                let mut e = 1u32;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    let st = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    e = s[st..pos]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent after {name}")))?;
                }
                exps[idx] += e;
            } else {
                return Err(Error::Parse(format!("unexpected {:?} in {s:?}", c as char)));
            }
            factors += 1;
            if pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1;
                continue;
            }
            break;
        }
        if factors == 0 {
            return Err(Error::Parse(format!("empty term in {s:?}")));
        }
        out.push((exps, coeff));
    }
    Ok(out)
}

/// Writes sorted terms as `c*x^a*y^b + ...`.
pub(crate) fn write_sparse(
    f: &mut fmt::Formatter<'_>,
    names: &[String],
    terms: &[(&Monomial, u64)],
) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (k, (e, c)) in terms.iter().enumerate() {
        if k > 0 {
            write!(f, " + ")?;
        }
        let mut parts: Vec<String> = Vec::new();
        let is_const = e.iter().all(|&x| x == 0);
        if *c != 1 || is_const {
            parts.push(c.to_string());
        }
        for (i, &x) in e.iter().enumerate() {
            match x {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], x)),
            }
        }
        write!(f, "{}", parts.join("*"))?;
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sparse(f, &self.ring.vars, &self.sorted_terms())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self} over {})", self.ring.modulus)
    }
}

impl CoeffRing for Arc<PolyRing> {
    type Elem = Polynomial;

    fn zero(&self) -> Polynomial {
        Polynomial::zero(self)
    }
    fn one(&self) -> Polynomial {
        Polynomial::one(self)
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.try_add(b).expect("ring mismatch")
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.try_mul(b).expect("ring mismatch")
    }
    fn neg(&self, a: &Polynomial) -> Polynomial {
        a.neg()
    }
    fn is_zero(&self, a: &Polynomial) -> bool {
        a.is_zero()
    }
    fn char_p(&self) -> Option<u64> {
        (self.modulus.n() == 1).then_some(self.modulus.p())
    }
    fn residue_char(&self) -> Option<u64> {
        Some(self.modulus.p())
    }
    fn torsion_free(&self) -> bool {
        false
    }
    fn same_ring(&self, other: &Self) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
    fn pth_power(&self, a: &Polynomial, p: u64) -> Polynomial {
        if p == self.p() {
            a.pth_power(1)
        } else {
            self.pow(a, p)
        }
    }
    fn from_int(&self, c: &num_bigint::BigInt) -> Polynomial {
        let v = CoeffRing::from_int(&self.modulus, c);
        Polynomial::constant(self, v as i128)
    }
}

/// A monomial ideal given by an inclusion-minimal generator set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIdeal {
    ring: Arc<PolyRing>,
    gens: Vec<Monomial>,
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl MonomialIdeal {
    pub fn new(ring: &Arc<PolyRing>, gens: Vec<Monomial>) -> Self {
        for g in &gens {
            assert_eq!(g.len(), ring.nvars());
        }
        MonomialIdeal {
            ring: ring.clone(),
            gens: minimalize(gens),
        }
    }

    /// Parses generators such as `["u", "v^2"]`.
    pub fn parse(ring: &Arc<PolyRing>, gens: &[&str]) -> Result<Self> {
        let mut out = Vec::new();
        for g in gens {
            let p = Polynomial::parse(ring, g)?;
            if p.num_terms() != 1 {
                return Err(Error::Parse(format!("{g} is not a monomial")));
            }
            out.push(p.terms().next().unwrap().0.clone());
        }
        Ok(Self::new(ring, out))
    }

    /// The zero ideal.
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        MonomialIdeal {
            ring: ring.clone(),
            gens: Vec::new(),
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.gens
    }

    pub fn contains_monomial(&self, e: &[u32]) -> bool {
        self.gens.iter().any(|g| divides(g, e))
    }

    pub fn contains(&self, f: &Polynomial) -> bool {
        f.terms().all(|(e, _)| self.contains_monomial(e))
    }

    /// Minimal generators of `m^e`.
    pub fn power(&self, e: u32) -> MonomialIdeal {
        assert!(e >= 1);
        let mut acc = self.gens.clone();
        for _ in 1..e {
            let mut next = Vec::with_capacity(acc.len() * self.gens.len());
            for a in &acc {
                for g in &self.gens {
                    next.push(a.iter().zip(g).map(|(x, y)| x + y).collect());
                }
            }
            acc = minimalize(next);
        }
        MonomialIdeal {
            ring: self.ring.clone(),
            gens: acc,
        }
    }

    /// Generators of `(m ∩ S^p) S`: each generator with exponents rounded up to multiples of `p`.
    pub fn pth_power_part(&self) -> MonomialIdeal {
        let p = self.ring.p() as u32;
        let gens = self
            .gens
            .iter()
            .map(|g| g.iter().map(|&x| x.div_ceil(p) * p).collect())
            .collect();
        MonomialIdeal::new(&self.ring, gens)
    }

    /// Whether the ideal is generated by `p`-th powers, i.e. `m = (m ∩ S^p) S`.
    pub fn generated_by_pth_powers(&self) -> bool {
        self.pth_power_part() == *self
    }

    /// The ideal generated by the `p^k`-th powers of the generators.
    pub fn frobenius_power(&self, k: u32) -> MonomialIdeal {
        let q = (self.ring.p() as u32).pow(k);
        MonomialIdeal::new(
            &self.ring,
            self.gens
                .iter()
                .map(|g| g.iter().map(|x| x * q).collect())
                .collect(),
        )
    }
}

fn minimalize(mut gens: Vec<Monomial>) -> Vec<Monomial> {
    gens.sort_by(|a, b| graded_cmp(b, a));
    gens.dedup();
    let mut out: Vec<Monomial> = Vec::new();
    for g in gens {
        if !out.iter().any(|h| divides(h, &g)) {
            out.push(g);
        }
    }
    out.sort_by(|a, b| graded_cmp(a, b));
    out
}

/// `S / I` for a monomial ideal `I`, optionally also truncated above a total degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientRing {
    base: Arc<PolyRing>,
    ideal: MonomialIdeal,
    degree_cap: Option<u32>,
}

impl QuotientRing {
    pub fn new(ideal: MonomialIdeal) -> Self {
        QuotientRing {
            base: ideal.ring.clone(),
            ideal,
            degree_cap: None,
        }
    }

    pub fn with_degree_cap(mut self, cap: u32) -> Self {
        self.degree_cap = Some(cap);
        self
    }

    pub fn base(&self) -> &Arc<PolyRing> {
        &self.base
    }

    pub fn ideal(&self) -> &MonomialIdeal {
        &self.ideal
    }

    pub fn degree_cap(&self) -> Option<u32> {
        self.degree_cap
    }

    fn vanishes(&self, e: &[u32]) -> bool {
        self.ideal.contains_monomial(e)
            || self
                .degree_cap
                .is_some_and(|cap| e.iter().sum::<u32>() > cap)
    }

    /// Drops every term that lies in the ideal.
    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        let terms = f
            .terms()
            .filter(|(e, _)| !self.vanishes(e))
            .map(|(e, c)| (e.clone(), c));
        Polynomial::from_terms(&self.base, terms)
    }

    pub fn has_finite_basis(&self) -> bool {
        self.degree_cap.is_some()
            || (0..self.base.nvars()).all(|i| {
                self.ideal
                    .gens
                    .iter()
                    .any(|g| g.iter().enumerate().all(|(j, &x)| j == i || x == 0))
            })
    }

    /// Standard monomials, in graded order.
    pub fn monomial_basis(&self) -> Result<Vec<Monomial>> {
        if !self.has_finite_basis() {
            return Err(Error::NoFiniteBasis);
        }
        let nv = self.base.nvars();
        // per-variable bound from pure powers or the cap
        let bound: Vec<u32> = (0..nv)
            .map(|i| {
                let pure = self
                    .ideal
                    .gens
                    .iter()
                    .filter(|g| g.iter().enumerate().all(|(j, &x)| j == i || x == 0))
                    .map(|g| g[i])
                    .min();
                match (pure, self.degree_cap) {
                    (Some(a), Some(c)) => a.min(c + 1),
                    (Some(a), None) => a,
                    (None, Some(c)) => c + 1,
                    (None, None) => unreachable!(),
                }
            })
            .collect();
        let mut out = Vec::new();
        let mut e = vec![0u32; nv];
        'outer: loop {
            if !self.vanishes(&e) {
                out.push(e.clone());
            }
            let mut i = 0;
            loop {
                if i == nv {
                    break 'outer;
                }
                e[i] += 1;
                if e[i] < bound[i] {
                    break;
                }
                e[i] = 0;
                i += 1;
            }
        }
        out.sort_by(|a, b| graded_cmp(a, b));
        Ok(out)
    }
}

impl CoeffRing for QuotientRing {
    type Elem = Polynomial;

    fn zero(&self) -> Polynomial {
        Polynomial::zero(&self.base)
    }
    fn one(&self) -> Polynomial {
        self.normal_form(&Polynomial::one(&self.base))
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.try_add(b).expect("ring mismatch")
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        self.normal_form(&a.try_mul(b).expect("ring mismatch"))
    }
    fn neg(&self, a: &Polynomial) -> Polynomial {
        a.neg()
    }
    fn is_zero(&self, a: &Polynomial) -> bool {
        a.is_zero()
    }
    fn char_p(&self) -> Option<u64> {
        self.base.char_p()
    }
    fn residue_char(&self) -> Option<u64> {
        self.base.residue_char()
    }
    fn torsion_free(&self) -> bool {
        false
    }
    fn same_ring(&self, other: &Self) -> bool {
        self == other
    }
    fn pth_power(&self, a: &Polynomial, p: u64) -> Polynomial {
        self.normal_form(&self.base.pth_power(a, p))
    }
    fn from_int(&self, c: &num_bigint::BigInt) -> Polynomial {
        self.normal_form(&self.base.from_int(c))
    }
}

/// Coefficient rings whose elements are polynomials in a fixed variable set.
pub trait PolyCoeffRing: CoeffRing<Elem = Polynomial> {
    fn poly_ring(&self) -> &Arc<PolyRing>;
    fn normalize(&self, f: &Polynomial) -> Polynomial;
}

impl PolyCoeffRing for Arc<PolyRing> {
    fn poly_ring(&self) -> &Arc<PolyRing> {
        self
    }
    fn normalize(&self, f: &Polynomial) -> Polynomial {
        f.clone()
    }
}

impl PolyCoeffRing for QuotientRing {
    fn poly_ring(&self) -> &Arc<PolyRing> {
        &self.base
    }
    fn normalize(&self, f: &Polynomial) -> Polynomial {
        self.normal_form(f)
    }
}

/// `Σ f_i dx_i`, stored by variable index.
#[derive(Clone, PartialEq, Eq)]
pub struct OneForm {
    ring: Arc<PolyRing>,
    coeffs: BTreeMap<usize, Polynomial>,
}

impl OneForm {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        OneForm {
            ring: ring.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    /// `f dx_i`.
    pub fn term(f: Polynomial, i: usize) -> Self {
        let mut w = OneForm::zero(f.ring());
        if !f.is_zero() {
            w.coeffs.insert(i, f);
        }
        w
    }

    pub fn from_coeffs(ring: &Arc<PolyRing>, coeffs: Vec<Polynomial>) -> Self {
        assert_eq!(coeffs.len(), ring.nvars());
        OneForm {
            ring: ring.clone(),
            coeffs: coeffs
                .into_iter()
                .enumerate()
                .filter(|(_, f)| !f.is_zero())
                .collect(),
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn coeff(&self, i: usize) -> Polynomial {
        self.coeffs
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(&self.ring))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn try_add(&self, other: &OneForm) -> Result<OneForm> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let mut coeffs = self.coeffs.clone();
        for (i, f) in &other.coeffs {
            let s = match coeffs.get(i) {
                Some(g) => g.try_add(f)?,
                None => f.clone(),
            };
            if s.is_zero() {
                coeffs.remove(i);
            } else {
                coeffs.insert(*i, s);
            }
        }
        Ok(OneForm {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> OneForm {
        self.map_coeffs(|f| f.neg())
    }

    pub fn mul_poly(&self, g: &Polynomial) -> Result<OneForm> {
        let mut out = OneForm::zero(&self.ring);
        for (i, f) in &self.coeffs {
            out = out.try_add(&OneForm::term(f.try_mul(g)?, *i))?;
        }
        Ok(out)
    }

    pub fn map_coeffs(&self, mut op: impl FnMut(&Polynomial) -> Polynomial) -> OneForm {
        OneForm::from_coeffs(
            &self.ring,
            (0..self.ring.nvars()).map(|i| op(&self.coeff(i))).collect(),
        )
    }

    /// Coefficients of `dω` on `dx_i ∧ dx_j`, `i < j`; empty iff closed.
    pub fn exterior_d(&self) -> BTreeMap<(usize, usize), Polynomial> {
        let n = self.ring.nvars();
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let c = self
                    .coeff(j)
                    .partial(i)
                    .try_sub(&self.coeff(i).partial(j))
                    .expect("same ring");
                if !c.is_zero() {
                    out.insert((i, j), c);
                }
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.exterior_d().is_empty()
    }

    /// A primitive `F` with `dF = ω`, if one exists (coefficients in `F_p`).
    pub fn primitive(&self) -> Option<Polynomial> {
        let md = self.ring.modulus;
        assert_eq!(md.n(), 1, "primitives are only searched over F_p");
        let mut terms: BTreeMap<Monomial, u64> = BTreeMap::new();
        for (&i, f) in &self.coeffs {
            for (e, c) in f.terms() {
                let mut b = e.clone();
                b[i] += 1;
                let Some(inv) = md.inv_unit(md.reduce_u64(b[i] as u64)) else {
                    return None;
                };
                let coef = md.mul(c, inv);
                match terms.get(&b) {
                    Some(&old) if old != coef => return None,
                    _ => {
                        terms.insert(b, coef);
                    }
                }
            }
        }
        let prim = Polynomial::from_terms(&self.ring, terms);
        (exterior_d(&prim) == *self).then_some(prim)
    }

    pub fn is_exact(&self) -> bool {
        self.primitive().is_some()
    }

    /// Parses `f d(x) + (g + h) d(y)`.
    pub fn parse(ring: &Arc<PolyRing>, text: &str) -> Result<OneForm> {
        let s = text.trim();
        if s == "0" {
            return Ok(OneForm::zero(ring));
        }
        let mut out = OneForm::zero(ring);
        let mut depth = 0i32;
        let mut start = 0;
        let mut pieces = Vec::new();
        for (k, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' if depth == 0 => {
                    pieces.push(&s[start..k]);
                    start = k + 1;
                }
                _ => {}
            }
        }
        pieces.push(&s[start..]);
        for piece in pieces {
            let piece = piece.trim();
            let at = piece
                .rfind("d(")
                .ok_or_else(|| Error::Parse(format!("missing d(..) in {piece:?}")))?;
            let var = piece[at + 2..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unclosed d( in {piece:?}")))?;
            let idx = ring
                .var_index(var.trim())
                .ok_or_else(|| Error::Parse(format!("unknown variable {var}")))?;
            let coeff_text = piece[..at].trim();
            let coeff_text = coeff_text
                .strip_prefix('(')
                .and_then(|c| c.strip_suffix(')'))
                .unwrap_or(coeff_text);
            let f = if coeff_text.is_empty() {
                Polynomial::one(ring)
            } else {
                Polynomial::parse(ring, coeff_text)?
            };
            out = out.try_add(&OneForm::term(f, idx))?;
        }
        Ok(out)
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (k, (i, c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let name = &self.ring.vars[*i];
            if *c == Polynomial::one(&self.ring) {
                write!(f, "d({name})")?;
            } else if c.num_terms() > 1 {
                write!(f, "({c}) d({name})")?;
            } else {
                write!(f, "{c} d({name})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneForm({self})")
    }
}

/// `df = Σ ∂f/∂x_i dx_i`.
pub fn exterior_d(f: &Polynomial) -> OneForm {
    let n = f.ring().nvars();
    OneForm::from_coeffs(f.ring(), (0..n).map(|i| f.partial(i)).collect())
}

/// Inverse Cartier operator on a presentation `Σ f_i dg_i`:
/// `Σ f_i^p g_i^(p-1) dg_i`.
pub fn cartier_inverse(ring: &Arc<PolyRing>, presentation: &[(Polynomial, Polynomial)]) -> Result<OneForm> {
    let p = ring.p();
    let mut out = OneForm::zero(ring);
    for (f, g) in presentation {
        if f.ring() != ring || g.ring() != ring {
            return Err(Error::RingMismatch);
        }
        let scale = f.pth_power(1).try_mul(&g.pow(p - 1))?;
        out = out.try_add(&exterior_d(g).mul_poly(&scale)?)?;
    }
    Ok(out)
}

/// `F^(n-1) d` on `W_n` of a characteristic-`p` ring:
/// `Σ_{i=1}^{n} z_i^(p^(n-i) - 1) dz_i`, with `n` the length of `z`.
pub fn fd_composite<R: PolyCoeffRing>(z: &WittVector<R>, n: usize) -> Result<OneForm> {
    if z.len() != n {
        return Err(Error::LengthMismatch(z.len(), n));
    }
    let ring = z.ring();
    let p = ring
        .char_p()
        .ok_or(Error::UnsupportedRing("F^(n-1)d needs characteristic p"))?;
    let base = ring.poly_ring().clone();
    let mut out = OneForm::zero(&base);
    for i in 1..=n {
        let zi = z.component(i);
        let e = p.pow((n - i) as u32) - 1;
        let scale = ring.pow(zi, e);
        let term = exterior_d(zi).mul_poly(&scale)?;
        out = out.try_add(&term)?;
    }
    Ok(out.map_coeffs(|f| ring.normalize(f)))
}

/// `{f, g} = Σ_i ±(∂f/∂u_i ∂g/∂v_i − ∂f/∂v_i ∂g/∂u_i)`.
pub fn std_poisson(f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    let ring = f.ring();
    if ring != g.ring() {
        return Err(Error::RingMismatch);
    }
    if ring.pairs.is_empty() {
        return Err(Error::NoPairing);
    }
    let mut out = Polynomial::zero(ring);
    for &(u, v) in &ring.pairs {
        let t = f
            .partial(u)
            .try_mul(&g.partial(v))?
            .try_sub(&f.partial(v).try_mul(&g.partial(u))?)?;
        out = out.try_add(&t)?;
    }
    Ok(out.scale(ring.pairing_sign as i128))
}

/// A derivation of a polynomial ring, stored by its values on the variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    ring: Arc<PolyRing>,
    values: Vec<Polynomial>,
}

impl Derivation {
    pub fn new(ring: &Arc<PolyRing>, values: Vec<Polynomial>) -> Result<Self> {
        if values.len() != ring.nvars() {
            return Err(Error::LengthMismatch(values.len(), ring.nvars()));
        }
        Ok(Derivation {
            ring: ring.clone(),
            values,
        })
    }

    /// `h ↦ {f, h}`.
    pub fn hamiltonian(f: &Polynomial) -> Result<Self> {
        let ring = f.ring();
        let values = (0..ring.nvars())
            .map(|k| std_poisson(f, &Polynomial::var(ring, k)))
            .collect::<Result<_>>()?;
        Derivation::new(ring, values)
    }

    pub fn values(&self) -> &[Polynomial] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Polynomial::is_zero)
    }

    pub fn apply(&self, h: &Polynomial) -> Result<Polynomial> {
        let mut out = Polynomial::zero(&self.ring);
        for (k, v) in self.values.iter().enumerate() {
            out = out.try_add(&h.partial(k).try_mul(v)?)?;
        }
        Ok(out)
    }
}

/// `ι(g df) = g {f, -}`, evaluated on the variables.
pub fn iota(omega: &OneForm) -> Result<Derivation> {
    let ring = omega.ring();
    if ring.pairs.is_empty() {
        return Err(Error::NoPairing);
    }
    let values = (0..ring.nvars())
        .map(|k| {
            let mut acc = Polynomial::zero(ring);
            for (j, g) in &omega.coeffs {
                let b = ring.var_bracket(*j, k);
                if b != 0 {
                    acc = acc.try_add(&g.scale(b as i128))?;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Derivation::new(ring, values)
}

/// Inverse of [`iota`]; every variable must belong to a symplectic pair.
pub fn iota_inverse(der: &Derivation) -> Result<OneForm> {
    let ring = &der.ring;
    if !ring.is_fully_paired() {
        return Err(Error::NoPairing);
    }
    let s = ring.pairing_sign as i128;
    let mut coeffs = vec![Polynomial::zero(ring); ring.nvars()];
    for &(u, v) in &ring.pairs {
        // ι(a du + b dv)(u) = -s b,  ι(a du + b dv)(v) = s a
        coeffs[u] = der.values[v].scale(s);
        coeffs[v] = der.values[u].scale(-s);
    }
    Ok(OneForm::from_coeffs(ring, coeffs))
}

/// Minimal monomial generators of `m^e`.
pub fn ideal_power_generators(m: &MonomialIdeal, e: u32) -> MonomialIdeal {
    m.power(e)
}

/// Certificate `z = a^p + b` with `b ∈ m^(p^i) B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PthPowerDecomposition {
    pub root: Polynomial,
    pub remainder: Polynomial,
}

/// Decides `z ∈ B^p + m^(p^i) B` in a quotient `B` over `F_p`.
///
/// Both summands are spanned by monomials (the Frobenius is additive and fixes
/// `F_p`), so membership is a support check. `p`-th power terms go to the root
/// first.
pub fn pth_power_decomposition_check(
    z: &Polynomial,
    i: u32,
    m: &MonomialIdeal,
    b: &QuotientRing,
) -> Result<Option<PthPowerDecomposition>> {
    if !b.has_finite_basis() {
        return Err(Error::NoFiniteBasis);
    }
    let ring = b.base();
    if z.ring() != ring || m.ring() != ring {
        return Err(Error::RingMismatch);
    }
    if ring.modulus().n() != 1 {
        return Err(Error::UnsupportedRing("p-th power decomposition needs F_p coefficients"));
    }
    let p = ring.p() as u32;
    let big = m.power(p.pow(i));
    let mut root = Vec::new();
    let mut rest = Vec::new();
    for (e, c) in b.normal_form(z).terms() {
        if e.iter().all(|x| x % p == 0) {
            root.push((e.iter().map(|x| x / p).collect(), c));
        } else if big.contains_monomial(e) {
            rest.push((e.clone(), c));
        } else {
            return Ok(None);
        }
    }
    let root = Polynomial::from_terms(ring, root);
    let remainder = Polynomial::from_terms(ring, rest);
    debug_assert_eq!(
        b.normal_form(&root.pth_power(1).try_add(&remainder)?),
        b.normal_form(z)
    );
    Ok(Some(PthPowerDecomposition { root, remainder }))
}
