//! The Weyl algebra `A = Z/p^n<x_1..x_r, y_1..y_r>` with `[y_i, x_i] = 1`,
//! its reductions `A_m = A / p^m`, the map `φ_m : W_m(Z_1) → A_m`, truncated
//! centers and two-sided ideals.
//!
//! Elements are stored in normal order (all `x` to the left of all `y`).
//! `Z_1 = F_p[x_i^p, y_i^p]` is modelled by a [`PolyRing`] in `u_i = x_i^p`,
//! `v_i = y_i^p`.
//!
//! ```
//! use wittquant::quantization::WeylAlgebra;
//!
//! let a = WeylAlgebra::new(3, 2, 1).unwrap();
//! let x3 = a.parse("x^3", 2).unwrap();
//! let y3 = a.parse("y^3", 2).unwrap();
//! assert_eq!(y3.commutator(&x3).unwrap().to_string(), "6");
//! assert_eq!(y3.divided_commutator(&x3, 1).unwrap().to_string(), "2");
//! ```

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::chainring::{HowellBasis, PModulus, ZpnMatrix};
use crate::error::{Error, Result};
use crate::polyring::{graded_cmp, paired_names, parse_sparse, write_sparse, std_poisson, PolyRing, Polynomial};
use crate::witt::WittVector;

const EXP_BITS: u32 = 16;
const EXP_MASK: u128 = (1 << EXP_BITS) - 1;

/// Largest supported number of symplectic pairs.
pub const MAX_PAIRS: usize = 4;

/// Packed exponent vector `(a_1..a_r, b_1..b_r)` for `x^a y^b`.
pub type Key = u128;

fn pack(exps: &[u32]) -> Key {
    exps.iter().enumerate().fold(0u128, |k, (i, &e)| {
        assert!(e <= EXP_MASK as u32, "exponent {e} too large");
        k | ((e as u128) << (EXP_BITS * i as u32))
    })
}

fn unpack(key: Key, len: usize) -> Vec<u32> {
    (0..len)
        .map(|i| ((key >> (EXP_BITS * i as u32)) & EXP_MASK) as u32)
        .collect()
}

fn exp_at(key: Key, i: usize) -> u32 {
    ((key >> (EXP_BITS * i as u32)) & EXP_MASK) as u32
}

fn key_degree(key: Key, len: usize) -> u32 {
    (0..len).map(|i| exp_at(key, i)).sum()
}

/// Parameters of the Weyl algebra: `p`, top level `n`, pairs `r` and the sign `s` in `[y, x] = s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylAlgebra {
    modulus: PModulus,
    r: usize,
    relation_sign: i8,
}

impl WeylAlgebra {
    pub fn new(p: u64, n: u32, r: usize) -> Result<Arc<WeylAlgebra>> {
        let modulus = PModulus::new(p, n)?;
        if r == 0 || r > MAX_PAIRS {
            return Err(Error::DimensionMismatch {
                expected: MAX_PAIRS,
                got: r,
            });
        }
        Ok(Arc::new(WeylAlgebra {
            modulus,
            r,
            relation_sign: 1,
        }))
    }

    /// Copy with `[y, x] = sign`; `-1` is only useful for mutation testing.
    pub fn with_relation_sign(&self, sign: i8) -> Arc<WeylAlgebra> {
        assert!(sign == 1 || sign == -1);
        Arc::new(WeylAlgebra {
            relation_sign: sign,
            ..self.clone()
        })
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    pub fn n(&self) -> u32 {
        self.modulus.n()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn relation_sign(&self) -> i8 {
        self.relation_sign
    }

    fn nexp(&self) -> usize {
        2 * self.r
    }

    /// `Z/p^m`.
    pub fn level_modulus(&self, m: u32) -> Result<PModulus> {
        if m == 0 || m > self.n() {
            return Err(Error::LevelOutOfRange { level: m, max: self.n() });
        }
        self.modulus.with_length(m)
    }

    /// `x, y` or `x1..xr, y1..yr`.
    pub fn var_names(&self) -> Vec<String> {
        paired_names("x", "y", self.r)
    }

    /// `Z_1 = F_p[u, v]` with `u_i = x_i^p`, `v_i = y_i^p`, `{u_i, v_i} = 1`.
    pub fn center_ring(&self) -> Arc<PolyRing> {
        PolyRing::symplectic(self.r, PModulus::field(self.p()).expect("valid prime"))
    }

    pub fn zero(self: &Arc<Self>, level: u32) -> Result<WeylElement> {
        self.level_modulus(level)?;
        Ok(WeylElement {
            alg: self.clone(),
            level,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(self: &Arc<Self>, level: u32, c: i128) -> Result<WeylElement> {
        self.monomial(level, &vec![0; self.nexp()], c)
    }

    pub fn one(self: &Arc<Self>, level: u32) -> Result<WeylElement> {
        self.constant(level, 1)
    }

    /// `c · x^a y^b` with `exps = (a_1..a_r, b_1..b_r)`.
    pub fn monomial(self: &Arc<Self>, level: u32, exps: &[u32], c: i128) -> Result<WeylElement> {
        if exps.len() != self.nexp() {
            return Err(Error::DimensionMismatch {
                expected: self.nexp(),
                got: exps.len(),
            });
        }
        let md = self.level_modulus(level)?;
        let mut terms = BTreeMap::new();
        let c = md.reduce(c);
        if c != 0 {
            terms.insert(pack(exps), c);
        }
        Ok(WeylElement {
            alg: self.clone(),
            level,
            terms,
        })
    }

    pub fn x(self: &Arc<Self>, i: usize, level: u32) -> Result<WeylElement> {
        let mut e = vec![0; self.nexp()];
        e[i] = 1;
        self.monomial(level, &e, 1)
    }

    pub fn y(self: &Arc<Self>, i: usize, level: u32) -> Result<WeylElement> {
        let mut e = vec![0; self.nexp()];
        e[self.r + i] = 1;
        self.monomial(level, &e, 1)
    }

    /// All generators `x_1..x_r, y_1..y_r` at `level`.
    pub fn generators(self: &Arc<Self>, level: u32) -> Result<Vec<WeylElement>> {
        (0..self.r)
            .map(|i| self.x(i, level))
            .chain((0..self.r).map(|i| self.y(i, level)))
            .collect()
    }

    /// Parses a normally ordered polynomial in the `x, y` variables.
    pub fn parse(self: &Arc<Self>, text: &str, level: u32) -> Result<WeylElement> {
        let md = self.level_modulus(level)?;
        let names = self.var_names();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut out = self.zero(level)?;
        for (e, c) in parse_sparse(text, &refs)? {
            out.add_term(pack(&e), md.reduce(c));
        }
        Ok(out)
    }

    /// Reads the header form `p=3 n=2 level=2 r=1` followed by an element.
    pub fn parse_with_header(text: &str) -> Result<WeylElement> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header".into()))?;
        let mut fields = HashMap::new();
        for part in header.split_whitespace() {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {part:?}")))?;
            let v: u64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad header value {part:?}")))?;
            fields.insert(k.to_string(), v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Parse(format!("header lacks {k}")))
        };
        let alg = WeylAlgebra::new(get("p")?, get("n")? as u32, get("r")? as usize)?;
        let body: Vec<&str> = lines.collect();
        alg.parse(&body.join(" "), get("level")? as u32)
    }

    /// Canonical lift of `f ∈ Z_1` to `A_level`: `u_i ↦ x_i^p`, `v_i ↦ y_i^p`.
    pub fn lift_center_poly(self: &Arc<Self>, f: &Polynomial, level: u32) -> Result<WeylElement> {
        if f.ring().nvars() != self.nexp() || f.ring().p() != self.p() {
            return Err(Error::RingMismatch);
        }
        let p = self.p() as u32;
        let md = self.level_modulus(level)?;
        let mut out = self.zero(level)?;
        for (e, c) in f.terms() {
            let scaled: Vec<u32> = e.iter().map(|x| x * p).collect();
            out.add_term(pack(&scaled), md.reduce_u64(c));
        }
        Ok(out)
    }

    /// `φ_m(z) = Σ p^(i-1) lift(z_i)^(p^(m-i))` in `A_m`, `m` the length of `z`.
    pub fn phi_map(self: &Arc<Self>, z: &WittVector<Arc<PolyRing>>) -> Result<WeylElement> {
        let m = z.len() as u32;
        self.level_modulus(m)?;
        if z.prime() != self.p() {
            return Err(Error::RingMismatch);
        }
        let p = self.p();
        let mut acc = self.zero(m)?;
        for i in 1..=m {
            let lifted = self.lift_center_poly(z.component(i as usize), m)?;
            let term = lifted.pow_p_power(m - i)?.scale(p.pow(i - 1) as i128);
            acc = acc.add(&term)?;
        }
        debug_assert!(acc.is_central()?, "φ image not central");
        Ok(acc)
    }

    /// Monomials of total degree `≤ d`, highest degree first.
    pub fn graded_index(self: &Arc<Self>, d: u32) -> MonomialIndex {
        let mut monos = Vec::new();
        let mut e = vec![0u32; self.nexp()];
        enumerate_bounded(&mut e, 0, d, &mut monos);
        MonomialIndex::new(self.nexp(), monos)
    }

    /// Howell basis of `Z(A_m) ∩ {deg ≤ d}` over `Z/p^m`, columns from [`graded_index`](Self::graded_index).
    pub fn center_basis(self: &Arc<Self>, m: u32, d: u32) -> Result<(MonomialIndex, ZpnMatrix)> {
        let idx = self.graded_index(d);
        let basis = self.center_in(m, &idx)?;
        Ok((idx, basis))
    }

    /// Howell basis of the elements supported on `idx` that commute with every
    /// generator, in `A_m` or any quotient by monomials outside `idx`'s
    /// downward closure.
    ///
    /// `ad(x_i)` and `ad(y_i)` lower total degree by one, so the kernel is
    /// computed one homogeneous degree at a time.
    pub fn center_in(self: &Arc<Self>, m: u32, idx: &MonomialIndex) -> Result<ZpnMatrix> {
        let md = self.level_modulus(m)?;
        let s = self.relation_sign as i128;
        let ne = self.nexp();
        let mut by_degree: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (col, &k) in idx.monos.iter().enumerate() {
            by_degree.entry(key_degree(k, ne)).or_default().push(col);
        }
        let mut rows = Vec::new();
        for cols in by_degree.values() {
            // targets: ad images, indexed locally
            let mut targets: HashMap<(usize, Key), usize> = HashMap::new();
            let mut images: Vec<Vec<(usize, u64)>> = Vec::with_capacity(cols.len());
            for &col in cols {
                let k = idx.monos[col];
                let mut img = Vec::new();
                for i in 0..self.r {
                    // [x_i, x^a y^b] = -s b_i x^a y^(b - e_i)
                    let b = exp_at(k, self.r + i);
                    if b > 0 {
                        let t = k - (1u128 << (EXP_BITS * (self.r + i) as u32));
                        let c = md.reduce(-s * b as i128);
                        let nt = targets.len();
                        let j = *targets.entry((i, t)).or_insert(nt);
                        img.push((j, c));
                    }
                    // [y_i, x^a y^b] = s a_i x^(a - e_i) y^b
                    let a = exp_at(k, i);
                    if a > 0 {
                        let t = k - (1u128 << (EXP_BITS * i as u32));
                        let c = md.reduce(s * a as i128);
                        let nt = targets.len();
                        let j = *targets.entry((self.r + i, t)).or_insert(nt);
                        img.push((j, c));
                    }
                }
                images.push(img);
            }
            let width = targets.len();
            if width == 0 {
                for &col in cols {
                    let mut row = vec![0u64; idx.len()];
                    row[col] = 1 % md.order();
                    rows.push(row);
                }
                continue;
            }
            let local: Vec<Vec<u64>> = images
                .iter()
                .map(|img| {
                    let mut row = vec![0u64; width];
                    for &(j, c) in img {
                        row[j] = md.add(row[j], c);
                    }
                    row
                })
                .collect();
            let ker = ZpnMatrix::from_raw_rows(md, width, local).kernel();
            for krow in ker.rows() {
                let mut row = vec![0u64; idx.len()];
                for (loc, &c) in krow.iter().enumerate() {
                    row[cols[loc]] = c;
                }
                rows.push(row);
            }
        }
        Ok(ZpnMatrix::from_raw_rows(md, idx.len(), rows).howell_form())
    }

    /// Two-sided ideal generated by `gens` inside `A_m`, truncated at total degree `d`.
    pub fn ideal_span_basis(self: &Arc<Self>, gens: &[WeylElement], m: u32, d: u32) -> Result<TruncatedIdealSpan> {
        let md = self.level_modulus(m)?;
        let idx = Arc::new(self.graded_index(d));
        let mut gens_m = Vec::with_capacity(gens.len());
        for g in gens {
            self.check_same(g)?;
            let g = g.reduce_mod(m)?;
            if let Some(deg) = g.degree() {
                if deg > d {
                    return Err(Error::DegreeExceedsCap { degree: deg, cap: d });
                }
            }
            gens_m.push(g);
        }
        // A g A is the left ideal generated by the iterated commutators
        // ad_w(g); a word of length k stands for a right factor of degree k.
        let vars = self.generators(m)?;
        let mut rows = Vec::new();
        for g in &gens_m {
            let Some(dg) = g.degree() else { continue };
            let mut layer = vec![g.clone()];
            let mut orbit: Vec<(u32, WeylElement)> = Vec::new();
            let mut k = 0;
            while !layer.is_empty() && dg + k <= d {
                let mut next = Vec::new();
                for h in layer {
                    if orbit.iter().any(|(_, o)| *o == h) {
                        continue;
                    }
                    for v in &vars {
                        let c = v.commutator(&h)?;
                        if !c.is_zero() {
                            next.push(c);
                        }
                    }
                    orbit.push((dg + k, h));
                }
                layer = next;
                k += 1;
            }
            for (nominal, h) in &orbit {
                for &key in &idx.monos {
                    if key_degree(key, self.nexp()) + nominal <= d {
                        rows.push(idx.row_of(&WeylElement::from_key(self, m, key).mul(h)?)?);
                    }
                }
            }
        }
        let mut basis = ZpnMatrix::from_raw_rows(md, idx.len(), rows).howell_form();
        // close under multiplication by generators until stable
        loop {
            let mut next: Vec<Vec<u64>> = basis.rows().to_vec();
            for row in basis.rows() {
                let f = idx.element_of_row(self, m, row)?;
                for v in &vars {
                    for prod in [v.mul(&f)?, f.mul(v)?] {
                        if prod.degree().is_none_or(|dd| dd <= d) {
                            next.push(idx.row_of(&prod)?);
                        }
                    }
                }
            }
            let grown = ZpnMatrix::from_raw_rows(md, idx.len(), next).howell_form();
            if grown == basis {
                break;
            }
            basis = grown;
        }
        Ok(TruncatedIdealSpan {
            alg: self.clone(),
            level: m,
            degree_cap: d,
            index: idx,
            basis,
        })
    }

    /// `I ∩ Z(A_m)` within the degree cap of `span`.
    pub fn ideal_intersect_center(self: &Arc<Self>, span: &TruncatedIdealSpan) -> Result<ZpnMatrix> {
        let center = self.center_in(span.level, &span.index)?;
        center.span_intersection(&span.basis)
    }

    /// Compares the ideal generated by `gens` with `(I ∩ Z) A` on the window
    /// `deg ≤ d - p`.
    pub fn central_generation_check(self: &Arc<Self>, gens: &[WeylElement], m: u32, d: u32) -> Result<CentralGenReport> {
        let span = self.ideal_span_basis(gens, m, d)?;
        let md = self.level_modulus(m)?;
        let idx = &span.index;
        let central = self.ideal_intersect_center(&span)?;
        // J = span{c · mono}
        let mut jrows = Vec::new();
        for row in central.rows() {
            let c = idx.element_of_row(self, m, row)?;
            let dc = c.degree().unwrap_or(0);
            for &k in &idx.monos {
                if dc + key_degree(k, self.nexp()) > d {
                    continue;
                }
                let prod = c.mul(&WeylElement::from_key(self, m, k))?;
                jrows.push(idx.row_of(&prod)?);
            }
        }
        let j = HowellBasis::new(&ZpnMatrix::from_raw_rows(md, idx.len(), jrows));
        let window = d.saturating_sub(self.p() as u32);
        let max_gen = gens.iter().filter_map(|g| g.degree()).max().unwrap_or(0);
        let truncated = d < self.p() as u32 || window < max_gen;
        let mut witness: Option<WeylElement> = None;
        for row in span.window_rows(window) {
            if !j.contains(row) {
                let f = idx.element_of_row(self, m, row)?;
                let better = match &witness {
                    None => true,
                    Some(w) => f.degree() < w.degree(),
                };
                if better {
                    witness = Some(f);
                }
            }
        }
        if let Some(w) = &witness {
            assert!(span.contains(w)?, "witness must lie in the ideal");
        }
        let verdict = if witness.is_none() {
            CentralGenVerdict::Generated
        } else {
            CentralGenVerdict::NotGeneratedWithinCap
        };
        Ok(CentralGenReport {
            verdict,
            witness,
            center_intersection_basis: central,
            central_span: j,
            index: span.index.clone(),
            truncated,
        })
    }

    fn check_same(&self, e: &WeylElement) -> Result<()> {
        if *e.alg != *self {
            Err(Error::RingMismatch)
        } else {
            Ok(())
        }
    }
}

fn enumerate_bounded(e: &mut Vec<u32>, i: usize, budget: u32, out: &mut Vec<Key>) {
    if i == e.len() {
        out.push(pack(e));
        return;
    }
    for a in 0..=budget {
        e[i] = a;
        enumerate_bounded(e, i + 1, budget - a, out);
    }
    e[i] = 0;
}

/// Column order for coefficient vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIndex {
    nexp: usize,
    monos: Vec<Key>,
    pos: HashMap<Key, usize>,
}

impl MonomialIndex {
    /// Sorts `monos` by [`graded_cmp`] (highest degree first).
    pub fn new(nexp: usize, mut monos: Vec<Key>) -> Self {
        monos.sort_by(|a, b| graded_cmp(&unpack(*a, nexp), &unpack(*b, nexp)));
        monos.dedup();
        Self::with_order(nexp, monos)
    }

    /// Keeps the given column order.
    pub fn with_order(nexp: usize, monos: Vec<Key>) -> Self {
        let pos = monos.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        MonomialIndex { nexp, monos, pos }
    }

    /// Columns from exponent vectors, in the given order.
    pub fn from_exponents(nexp: usize, exps: &[Vec<u32>]) -> Self {
        Self::with_order(nexp, exps.iter().map(|e| pack(e)).collect())
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn position(&self, exps: &[u32]) -> Option<usize> {
        self.pos.get(&pack(exps)).copied()
    }

    pub fn exponents(&self, col: usize) -> Vec<u32> {
        unpack(self.monos[col], self.nexp)
    }

    pub fn degree(&self, col: usize) -> u32 {
        key_degree(self.monos[col], self.nexp)
    }

    /// First column of degree `≤ w` (columns must be in graded order).
    pub fn window_start(&self, w: u32) -> usize {
        self.monos
            .iter()
            .position(|&k| key_degree(k, self.nexp) <= w)
            .unwrap_or(self.monos.len())
    }

    /// Coefficient vector; errors if a term is not indexed.
    pub fn row_of(&self, f: &WeylElement) -> Result<Vec<u64>> {
        let mut row = vec![0u64; self.monos.len()];
        for (&k, &c) in &f.terms {
            let j = self.pos.get(&k).ok_or(Error::DegreeExceedsCap {
                degree: key_degree(k, self.nexp),
                cap: self.monos.iter().map(|&m| key_degree(m, self.nexp)).max().unwrap_or(0),
            })?;
            row[*j] = c;
        }
        Ok(row)
    }

    /// Coefficient vector keeping only indexed terms.
    pub fn row_of_truncated(&self, f: &WeylElement) -> Vec<u64> {
        let mut row = vec![0u64; self.monos.len()];
        for (k, &c) in &f.terms {
            if let Some(&j) = self.pos.get(k) {
                row[j] = c;
            }
        }
        row
    }

    pub fn element_of_row(&self, alg: &Arc<WeylAlgebra>, level: u32, row: &[u64]) -> Result<WeylElement> {
        let md = alg.level_modulus(level)?;
        let mut out = alg.zero(level)?;
        for (j, &c) in row.iter().enumerate() {
            out.add_term(self.monos[j], md.reduce_u64(c));
        }
        Ok(out)
    }
}

/// A two-sided ideal of `A_m` truncated at a total degree.
#[derive(Clone, Debug)]
pub struct TruncatedIdealSpan {
    alg: Arc<WeylAlgebra>,
    level: u32,
    degree_cap: u32,
    index: Arc<MonomialIndex>,
    basis: ZpnMatrix,
}

impl TruncatedIdealSpan {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn index(&self) -> &MonomialIndex {
        &self.index
    }

    pub fn basis(&self) -> &ZpnMatrix {
        &self.basis
    }

    pub fn elements(&self) -> Result<Vec<WeylElement>> {
        self.basis
            .rows()
            .iter()
            .map(|r| self.index.element_of_row(&self.alg, self.level, r))
            .collect()
    }

    pub fn contains(&self, f: &WeylElement) -> Result<bool> {
        let f = f.reduce_mod(self.level)?;
        Ok(match self.index.row_of(&f) {
            Ok(row) => HowellBasis::new(&self.basis).contains(&row),
            Err(_) => false,
        })
    }

    /// Howell rows spanning `I ∩ {deg ≤ w}`.
    pub fn window_rows(&self, w: u32) -> impl Iterator<Item = &Vec<u64>> {
        let start = self.index.window_start(w);
        self.basis
            .rows()
            .iter()
            .filter(move |r| ZpnMatrix::pivot_of(r).is_some_and(|c| c >= start))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CentralGenVerdict {
    Generated,
    NotGeneratedWithinCap,
}

#[derive(Clone, Debug)]
pub struct CentralGenReport {
    pub verdict: CentralGenVerdict,
    /// A window element of least degree in `I` but not in `(I ∩ Z) A`.
    pub witness: Option<WeylElement>,
    pub center_intersection_basis: ZpnMatrix,
    /// `(I ∩ Z) A` within the cap.
    pub central_span: HowellBasis,
    pub index: Arc<MonomialIndex>,
    /// The comparison window is too small to contain every generator.
    pub truncated: bool,
}

impl CentralGenReport {
    /// Whether `f` lies in `(I ∩ Z) A` within the cap.
    pub fn centrally_generated_contains(&self, f: &WeylElement) -> Result<bool> {
        Ok(self.central_span.contains(&self.index.row_of(f)?))
    }
}

thread_local! {
    static BINOMIALS: RefCell<HashMap<(u64, usize), Vec<Vec<u64>>>> = RefCell::new(HashMap::new());
}

/// Rows `C(b, 0..kmax)` mod `q` for `b ≤ bmax`.
fn with_binomials<T>(q: u64, kmax: usize, bmax: usize, f: impl FnOnce(&[Vec<u64>]) -> T) -> T {
    BINOMIALS.with(|cell| {
        let mut map = cell.borrow_mut();
        let table = map.entry((q, kmax)).or_default();
        while table.len() <= bmax {
            let b = table.len();
            let mut row = vec![0u64; kmax];
            if kmax > 0 {
                row[0] = 1 % q;
            }
            if b > 0 {
                let prev = &table[b - 1];
                for k in 1..kmax {
                    row[k] = (prev[k - 1] + prev[k]) % q;
                }
            }
            table.push(row);
        }
        f(table)
    })
}

/// An element of `A_level`, normally ordered.
#[derive(Clone)]
pub struct WeylElement {
    alg: Arc<WeylAlgebra>,
    level: u32,
    terms: BTreeMap<Key, u64>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && *self.alg == *other.alg && self.terms == other.terms
    }
}

impl Eq for WeylElement {}

impl WeylElement {
    fn from_key(alg: &Arc<WeylAlgebra>, level: u32, k: Key) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(k, 1);
        WeylElement {
            alg: alg.clone(),
            level,
            terms,
        }
    }

    fn add_term(&mut self, k: Key, c: u64) {
        if c == 0 {
            return;
        }
        let md = self.modulus();
        let slot = self.terms.entry(k).or_insert(0);
        *slot = md.add(*slot, c);
        if *slot == 0 {
            self.terms.remove(&k);
        }
    }

    pub fn algebra(&self) -> &Arc<WeylAlgebra> {
        &self.alg
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> PModulus {
        self.alg.modulus.with_length(self.level).expect("level checked at construction")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `(exponents, coefficient)` pairs, exponents ordered `(a_1..a_r, b_1..b_r)`.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, u64)> + '_ {
        let ne = self.alg.nexp();
        self.terms.iter().map(move |(&k, &c)| (unpack(k, ne), c))
    }

    pub fn coeff(&self, exps: &[u32]) -> u64 {
        self.terms.get(&pack(exps)).copied().unwrap_or(0)
    }

    /// Total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        let ne = self.alg.nexp();
        self.terms.keys().map(|&k| key_degree(k, ne)).max()
    }

    /// Least `p`-adic valuation of the coefficients (`level` for zero).
    pub fn valuation(&self) -> u32 {
        let md = self.modulus();
        self.terms
            .values()
            .map(|&c| md.valuation(c))
            .min()
            .unwrap_or(self.level)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if *self.alg != *other.alg {
            return Err(Error::RingMismatch);
        }
        if self.level != other.level {
            return Err(Error::LevelOutOfRange {
                level: other.level,
                max: self.level,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (&k, &c) in &other.terms {
            out.add_term(k, c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let md = self.modulus();
        WeylElement {
            alg: self.alg.clone(),
            level: self.level,
            terms: self.terms.iter().map(|(&k, &c)| (k, md.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: i128) -> Self {
        let md = self.modulus();
        let c = md.reduce(c);
        let mut terms = BTreeMap::new();
        for (&k, &t) in &self.terms {
            let v = md.mul(t, c);
            if v != 0 {
                terms.insert(k, v);
            }
        }
        WeylElement {
            alg: self.alg.clone(),
            level: self.level,
            terms,
        }
    }

    /// Normally ordered product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let md = self.modulus();
        let q = md.order();
        let r = self.alg.r;
        let s_neg = self.alg.relation_sign < 0;
        // k! vanishes mod q beyond kmax
        let mut fact = vec![1 % q];
        while *fact.last().unwrap() != 0 {
            let k = fact.len() as u64;
            fact.push(md.mul(*fact.last().unwrap(), md.reduce_u64(k)));
        }
        let kmax = fact.len() - 1;
        let bmax = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .flat_map(|&k| (0..2 * r).map(move |i| exp_at(k, i)))
            .max()
            .unwrap_or(0) as usize;
        let mut acc: HashMap<Key, u64> = HashMap::new();
        with_binomials(q, kmax, bmax, |binom| {
            let mut choices: Vec<Vec<(u32, u64)>> = vec![Vec::new(); r];
            for (&ka, &ca) in &self.terms {
                for (&kb, &cb) in &other.terms {
                    let base = md.mul(ca, cb);
                    // y_i^b x_i^c = Σ_k s^k k! C(b,k) C(c,k) x_i^(c-k) y_i^(b-k)
                    let mut ok = true;
                    for i in 0..r {
                        let b = exp_at(ka, r + i) as usize;
                        let c = exp_at(kb, i) as usize;
                        let top = b.min(c).min(kmax.saturating_sub(1));
                        let list = &mut choices[i];
                        list.clear();
                        for k in 0..=top {
                            let mut t = md.mul(fact[k], md.mul(binom[b][k], binom[c][k]));
                            if s_neg && k % 2 == 1 {
                                t = md.neg(t);
                            }
                            if t != 0 {
                                list.push((k as u32, t));
                            }
                        }
                        if list.is_empty() {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let sum = ka + kb;
                    let mut pick = vec![0usize; r];
                    loop {
                        let mut key = sum;
                        let mut coef = base;
                        for i in 0..r {
                            let (k, t) = choices[i][pick[i]];
                            let drop = (k as u128) << (EXP_BITS * i as u32) | (k as u128) << (EXP_BITS * (r + i) as u32);
                            key -= drop;
                            coef = md.mul(coef, t);
                        }
                        if coef != 0 {
                            let slot = acc.entry(key).or_insert(0);
                            *slot = md.add(*slot, coef);
                        }
                        let mut i = 0;
                        while i < r {
                            pick[i] += 1;
                            if pick[i] < choices[i].len() {
                                break;
                            }
                            pick[i] = 0;
                            i += 1;
                        }
                        if i == r {
                            break;
                        }
                    }
                }
            }
        });
        Ok(WeylElement {
            alg: self.alg.clone(),
            level: self.level,
            terms: acc.into_iter().filter(|(_, c)| *c != 0).collect(),
        })
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let mut acc = self.alg.one(self.level)?;
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `self^(p^k)`.
    pub fn pow_p_power(&self, k: u32) -> Result<Self> {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.pow(self.alg.p())?;
        }
        Ok(out)
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `(1/p^m) [a, b]` in `A_(level - m)`.
    pub fn divided_commutator(&self, other: &Self, m: u32) -> Result<Self> {
        if m >= self.level {
            return Err(Error::LevelOutOfRange {
                level: m,
                max: self.level - 1,
            });
        }
        self.commutator(other)?.divide_by_p_power(m)
    }

    /// Exact division by `p^m`, landing in `A_(level - m)`.
    pub fn divide_by_p_power(&self, m: u32) -> Result<Self> {
        if m >= self.level {
            return Err(Error::LevelOutOfRange {
                level: m,
                max: self.level - 1,
            });
        }
        let v = self.valuation();
        if v < m {
            return Err(Error::InsufficientValuation { valuation: v, requested: m });
        }
        let pm = self.alg.p().pow(m);
        Ok(WeylElement {
            alg: self.alg.clone(),
            level: self.level - m,
            terms: self.terms.iter().map(|(&k, &c)| (k, c / pm)).collect(),
        })
    }

    /// `r : A_level → A_m`.
    pub fn reduce_mod(&self, m: u32) -> Result<Self> {
        if m == 0 || m > self.level {
            return Err(Error::LevelOutOfRange { level: m, max: self.level });
        }
        let md = self.alg.level_modulus(m)?;
        let mut terms = BTreeMap::new();
        for (&k, &c) in &self.terms {
            let v = md.reduce_u64(c);
            if v != 0 {
                terms.insert(k, v);
            }
        }
        Ok(WeylElement {
            alg: self.alg.clone(),
            level: m,
            terms,
        })
    }

    /// Canonical lift to `A_m`, `m ≥ level`: same representatives.
    pub fn lift(&self, m: u32) -> Result<Self> {
        self.alg.level_modulus(m)?;
        if m < self.level {
            return Err(Error::LevelOutOfRange { level: m, max: self.level });
        }
        Ok(WeylElement {
            alg: self.alg.clone(),
            level: m,
            terms: self.terms.clone(),
        })
    }

    /// `v : A_level → A_(level+1)`, `a ↦ p · lift(a)`.
    pub fn v_map(&self) -> Result<Self> {
        Ok(self.lift(self.level + 1)?.scale(self.alg.p() as i128))
    }

    /// Commutes with every `x_i` and `y_i`.
    pub fn is_central(&self) -> Result<bool> {
        for g in self.alg.generators(self.level)? {
            if !self.commutator(&g)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Reads a level-1 element of `F_p[x^p, y^p]` as a polynomial in `ring` (`u = x^p`, `v = y^p`).
    pub fn to_center_poly(&self, ring: &Arc<PolyRing>) -> Result<Polynomial> {
        if self.level != 1 {
            return Err(Error::LevelOutOfRange { level: self.level, max: 1 });
        }
        if ring.nvars() != self.alg.nexp() || ring.p() != self.alg.p() {
            return Err(Error::RingMismatch);
        }
        let p = self.alg.p() as u32;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in self.terms() {
            if e.iter().any(|x| x % p != 0) {
                return Err(Error::NotCentral(self.to_string()));
            }
            terms.push((e.iter().map(|x| x / p).collect(), c));
        }
        Ok(Polynomial::from_terms(ring, terms))
    }

    /// Text form with a `p=.. n=.. level=.. r=..` header line.
    pub fn to_text(&self) -> String {
        format!(
            "p={} n={} level={} r={}\n{}",
            self.alg.p(),
            self.alg.n(),
            self.level,
            self.alg.r,
            self
        )
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ne = self.alg.nexp();
        let owned: Vec<(Vec<u32>, u64)> = self.terms.iter().map(|(&k, &c)| (unpack(k, ne), c)).collect();
        let mut sorted: Vec<(&Vec<u32>, u64)> = owned.iter().map(|(e, c)| (e, *c)).collect();
        sorted.sort_by(|a, b| graded_cmp(a.0, b.0));
        write_sparse(f, &self.alg.var_names(), &sorted)
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElement(level {}: {self})", self.level)
    }
}

/// `{ā, b̄} = ((1/p) [a, b]) mod p` for `ā, b̄ ∈ Z(A_1)`, returned in `Z_1`.
pub fn deformation_bracket(a: &WeylElement, b: &WeylElement) -> Result<Polynomial> {
    deformation_bracket_in(a, b, &a.alg.center_ring())
}

/// [`deformation_bracket`] with an explicit `Z_1` ring for the result.
pub fn deformation_bracket_in(a: &WeylElement, b: &WeylElement, ring: &Arc<PolyRing>) -> Result<Polynomial> {
    for e in [a, b] {
        if e.level != 1 {
            return Err(Error::LevelOutOfRange { level: e.level, max: 1 });
        }
        if !e.is_central()? {
            return Err(Error::NotCentral(e.to_string()));
        }
    }
    if a.alg.n() < 2 {
        return Err(Error::LevelOutOfRange { level: 2, max: a.alg.n() });
    }
    a.lift(2)?
        .divided_commutator(&b.lift(2)?, 1)?
        .to_center_poly(ring)
}

/// `Σ_i z_i^(p^(m-i) - 1) {z_i, w}` in `Z_1`.
pub fn eq1_rhs(z: &WittVector<Arc<PolyRing>>, w: &Polynomial) -> Result<Polynomial> {
    let m = z.len() as u32;
    let p = z.prime();
    let ring = z.ring();
    let mut acc = Polynomial::zero(ring);
    for i in 1..=m {
        let zi = z.component(i as usize);
        let scale = zi.pow(p.pow(m - i) - 1);
        acc = acc.try_add(&scale.try_mul(&std_poisson(zi, w)?)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn alg(p: u64, n: u32) -> Arc<WeylAlgebra> {
        WeylAlgebra::new(p, n, 1).unwrap()
    }

    /// Integer normal ordering of `y^b x^c` by repeated use of `yx = xy + 1`.
    fn reorder_oracle(b: u32, c: u32) -> BTreeMap<(u32, u32), BigInt> {
        // state: words as (x-power, y-power) after fully ordering; recurse on y * (x^c y^e)
        let mut cur: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
        cur.insert((c, 0), BigInt::one());
        for _ in 0..b {
            // y · x^a y^e = x^a y^(e+1) + a x^(a-1) y^e
            let mut next = BTreeMap::new();
            for ((a, e), coef) in cur {
                *next.entry((a, e + 1)).or_insert_with(BigInt::zero) += &coef;
                if a > 0 {
                    *next.entry((a - 1, e)).or_insert_with(BigInt::zero) += coef * BigInt::from(a);
                }
            }
            cur = next;
        }
        cur
    }

    fn random_elem(rng: &mut impl Rng, a: &Arc<WeylAlgebra>, level: u32, deg: u32, terms: usize) -> WeylElement {
        let mut out = a.zero(level).unwrap();
        let q = a.level_modulus(level).unwrap().order();
        for _ in 0..terms {
            let mut e = vec![0u32; 2 * a.r()];
            for _ in 0..rng.gen_range(0..=deg) {
                let i = rng.gen_range(0..e.len());
                e[i] += 1;
            }
            out = out.add(&a.monomial(level, &e, rng.gen_range(0..q) as i128).unwrap()).unwrap();
        }
        out
    }

    fn random_z1(rng: &mut impl Rng, ring: &Arc<PolyRing>, deg: u32, terms: usize) -> Polynomial {
        let n = ring.nvars();
        Polynomial::from_terms(
            ring,
            (0..terms).map(|_| {
                let mut e = vec![0u32; n];
                for _ in 0..rng.gen_range(0..=deg) {
                    e[rng.gen_range(0..n)] += 1;
                }
                (e, rng.gen_range(0..ring.p()))
            }),
        )
    }

    #[test]
    fn multiplication_examples() {
        let a = alg(3, 2);
        let x = a.x(0, 2).unwrap();
        let y = a.y(0, 2).unwrap();
        assert_eq!(y.mul(&x).unwrap(), a.parse("x*y + 1", 2).unwrap());
        let y3x3 = a.parse("y^3", 2).unwrap().mul(&a.parse("x^3", 2).unwrap()).unwrap();
        assert_eq!(y3x3, a.parse("x^3*y^3 + 6", 2).unwrap());
        let one = a.one(2).unwrap();
        assert_eq!(one.mul(&y3x3).unwrap(), y3x3);
        let other = alg(5, 2);
        assert_eq!(x.mul(&other.x(0, 2).unwrap()), Err(Error::RingMismatch));
    }

    #[test]
    fn normal_order_matches_integer_oracle() {
        for (p, n) in [(3u64, 2u32), (3, 3), (5, 2), (7, 1)] {
            let a = alg(p, n);
            let q = BigInt::from(p.pow(n));
            for b in 0..8u32 {
                for c in 0..8u32 {
                    let got = a
                        .monomial(n, &[0, b], 1)
                        .unwrap()
                        .mul(&a.monomial(n, &[c, 0], 1).unwrap())
                        .unwrap();
                    let mut expect = a.zero(n).unwrap();
                    for ((xa, yb), coef) in reorder_oracle(b, c) {
                        let r: BigInt = ((coef % &q) + &q) % &q;
                        let v: i128 = r.try_into().unwrap();
                        expect = expect.add(&a.monomial(n, &[xa, yb], v).unwrap()).unwrap();
                    }
                    assert_eq!(got, expect, "y^{b} x^{c} at p={p} n={n}");
                }
            }
        }
    }

    #[test]
    fn flipped_relation() {
        let a = alg(3, 2).with_relation_sign(-1);
        let x = a.x(0, 2).unwrap();
        let y = a.y(0, 2).unwrap();
        assert_eq!(y.commutator(&x).unwrap(), a.constant(2, -1).unwrap());
        assert_eq!(
            a.parse("y^3", 2).unwrap().commutator(&a.parse("x^3", 2).unwrap()).unwrap(),
            a.constant(2, 3).unwrap()
        );
    }

    #[test]
    fn several_pairs_commute_across() {
        let a = WeylAlgebra::new(3, 2, 2).unwrap();
        let x1 = a.x(0, 2).unwrap();
        let y2 = a.y(1, 2).unwrap();
        let y1 = a.y(0, 2).unwrap();
        assert!(y2.commutator(&x1).unwrap().is_zero());
        assert_eq!(y1.commutator(&x1).unwrap(), a.one(2).unwrap());
        assert_eq!(y1.mul(&x1).unwrap().to_string(), "x1*y1 + 1");
    }

    #[test]
    fn associativity_and_filtration() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for case in 0..200 {
            let (p, n) = [(3, 1), (3, 2), (3, 3), (5, 2), (5, 3)][case % 5];
            let r = 1 + case % 2;
            let a = WeylAlgebra::new(p, n, r).unwrap();
            let f = random_elem(&mut rng, &a, n, 5, 3);
            let g = random_elem(&mut rng, &a, n, 5, 3);
            let h = random_elem(&mut rng, &a, n, 5, 3);
            let lhs = f.mul(&g).unwrap().mul(&h).unwrap();
            let rhs = f.mul(&g.mul(&h).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let fg = f.mul(&g).unwrap();
            if let (Some(df), Some(dg), Some(dfg)) = (f.degree(), g.degree(), fg.degree()) {
                assert!(dfg <= df + dg);
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let a = alg(3, 2);
        let x = a.x(0, 2).unwrap();
        assert!(x.commutator(&x).unwrap().is_zero());
        let y3 = a.parse("y^3", 2).unwrap();
        let x3 = a.parse("x^3", 2).unwrap();
        assert_eq!(y3.commutator(&x3).unwrap(), a.constant(2, 6).unwrap());
        let d = y3.divided_commutator(&x3, 1).unwrap();
        assert_eq!(d, a.constant(1, 2).unwrap());
        let y = a.y(0, 2).unwrap();
        assert_eq!(
            y.divided_commutator(&x, 1),
            Err(Error::InsufficientValuation { valuation: 0, requested: 1 })
        );
    }

    #[test]
    fn reduction_and_v_map() {
        let a = alg(3, 2);
        assert_eq!(a.one(1).unwrap().v_map().unwrap(), a.constant(2, 3).unwrap());
        let f = a.parse("x^3 + 3*y", 2).unwrap();
        assert_eq!(f.reduce_mod(1).unwrap(), a.parse("x^3", 1).unwrap());
        assert!(f.reduce_mod(3).is_err());
        assert!(a.one(2).unwrap().v_map().is_err());
        let a3 = alg(3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let m = rng.gen_range(2..=3);
            let g = random_elem(&mut rng, &a3, m - 1, 4, 4);
            // r(v(g)) = p g at level m-1
            assert_eq!(g.v_map().unwrap().reduce_mod(m - 1).unwrap(), g.scale(3));
            let h = random_elem(&mut rng, &a3, m, 4, 4);
            let k = random_elem(&mut rng, &a3, m, 4, 4);
            assert_eq!(
                h.mul(&k).unwrap().reduce_mod(m - 1).unwrap(),
                h.reduce_mod(m - 1).unwrap().mul(&k.reduce_mod(m - 1).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn text_forms() {
        let a = alg(3, 2);
        let f = a.parse("x^3*y^3 + 2*x*y + 6", 2).unwrap();
        assert_eq!(f.to_string(), "x^3*y^3 + 2*x*y + 6");
        let t = f.to_text();
        assert_eq!(t, "p=3 n=2 level=2 r=1\nx^3*y^3 + 2*x*y + 6");
        assert_eq!(WeylAlgebra::parse_with_header(&t).unwrap(), f);
        assert!(WeylAlgebra::parse_with_header("p=3 n=2\nx").is_err());
        let b = WeylAlgebra::new(3, 1, 2).unwrap();
        assert_eq!(b.parse("y2*x2", 1).unwrap().to_string(), "x2*y2");
    }

    #[test]
    fn deformation_bracket_examples() {
        let a = alg(3, 2);
        let u = a.parse("x^3", 1).unwrap();
        let v = a.parse("y^3", 1).unwrap();
        let z1 = a.center_ring();
        assert!(deformation_bracket(&u, &u).unwrap().is_zero());
        assert_eq!(deformation_bracket(&u, &v).unwrap(), Polynomial::one(&z1));
        assert_eq!(deformation_bracket(&v, &u).unwrap(), Polynomial::constant(&z1, -1));
        let uv = u.mul(&v).unwrap();
        assert_eq!(deformation_bracket(&uv, &v).unwrap(), Polynomial::parse(&z1, "v").unwrap());
        let x = a.x(0, 1).unwrap();
        assert!(matches!(deformation_bracket(&x, &v), Err(Error::NotCentral(_))));
    }

    #[test]
    fn deformation_bracket_orientation_is_positive_for_p5() {
        let a = alg(5, 2);
        let u = a.parse("x^5", 1).unwrap();
        let v = a.parse("y^5", 1).unwrap();
        assert_eq!(deformation_bracket(&u, &v).unwrap(), Polynomial::one(&a.center_ring()));
    }

    #[test]
    fn deformation_bracket_matches_std_poisson_and_is_lift_independent() {
        let a = alg(3, 2);
        let z1 = a.center_ring();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let f = random_z1(&mut rng, &z1, 2, 3);
            let g = random_z1(&mut rng, &z1, 2, 3);
            let fa = a.lift_center_poly(&f, 1).unwrap();
            let ga = a.lift_center_poly(&g, 1).unwrap();
            let br = deformation_bracket(&fa, &ga).unwrap();
            assert_eq!(br, std_poisson(&f, &g).unwrap());
            // perturbed lifts: a + p·e
            let e1 = random_elem(&mut rng, &a, 1, 6, 3).lift(2).unwrap().scale(3);
            let e2 = random_elem(&mut rng, &a, 1, 6, 3).lift(2).unwrap().scale(3);
            let alt = fa
                .lift(2)
                .unwrap()
                .add(&e1)
                .unwrap()
                .divided_commutator(&ga.lift(2).unwrap().add(&e2).unwrap(), 1)
                .unwrap()
                .to_center_poly(&z1)
                .unwrap();
            assert_eq!(alt, br);
        }
    }

    #[test]
    fn phi_examples() {
        let a = alg(3, 2);
        let z1 = a.center_ring();
        let u = Polynomial::parse(&z1, "u").unwrap();
        let w = Polynomial::parse(&z1, "u*v + 2").unwrap();
        let one = WittVector::new(z1.clone(), vec![w.clone()]).unwrap();
        assert_eq!(a.phi_map(&one).unwrap(), a.lift_center_poly(&w, 1).unwrap());
        let z = WittVector::new(z1.clone(), vec![u, Polynomial::zero(&z1)]).unwrap();
        assert_eq!(a.phi_map(&z).unwrap(), a.parse("x^9", 2).unwrap());
        let vw = WittVector::new(z1.clone(), vec![Polynomial::zero(&z1), w.clone()]).unwrap();
        assert_eq!(
            a.phi_map(&vw).unwrap(),
            a.lift_center_poly(&w, 1).unwrap().v_map().unwrap()
        );
        let long = WittVector::new(z1.clone(), vec![w.clone(), w.clone(), w]).unwrap();
        assert_eq!(a.phi_map(&long), Err(Error::LevelOutOfRange { level: 3, max: 2 }));
    }

    fn random_witt(rng: &mut impl Rng, z1: &Arc<PolyRing>, m: usize, deg: u32) -> WittVector<Arc<PolyRing>> {
        WittVector::new(z1.clone(), (0..m).map(|_| random_z1(rng, z1, deg, 2)).collect()).unwrap()
    }

    #[test]
    fn phi_is_a_central_ring_map() {
        let a = alg(3, 3);
        let z1 = a.center_ring();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for case in 0..100 {
            let m = 1 + case % 3;
            let deg = if m == 3 { 1 } else { 2 };
            let z = random_witt(&mut rng, &z1, m, deg);
            let w = random_witt(&mut rng, &z1, m, deg);
            let pz = a.phi_map(&z).unwrap();
            let pw = a.phi_map(&w).unwrap();
            assert!(pz.is_central().unwrap());
            assert_eq!(a.phi_map(&z.add(&w).unwrap()).unwrap(), pz.add(&pw).unwrap());
            assert_eq!(a.phi_map(&z.mul(&w).unwrap()).unwrap(), pz.mul(&pw).unwrap());
        }
    }

    #[test]
    fn phi_compatibilities() {
        let a = alg(3, 3);
        let z1 = a.center_ring();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for case in 0..60 {
            let m = 2 + case % 2;
            let z = random_witt(&mut rng, &z1, m, 2);
            // φ_{m-1} F = r φ_m
            assert_eq!(
                a.phi_map(&z.frobenius().unwrap()).unwrap(),
                a.phi_map(&z).unwrap().reduce_mod(m as u32 - 1).unwrap()
            );
            // φ_m V = v φ_{m-1}
            let y = random_witt(&mut rng, &z1, m - 1, 2);
            assert_eq!(
                a.phi_map(&y.verschiebung()).unwrap(),
                a.phi_map(&y).unwrap().v_map().unwrap()
            );
        }
    }

    #[test]
    fn eq1_examples() {
        let z1 = PolyRing::symplectic(1, PModulus::field(3).unwrap());
        let u = Polynomial::parse(&z1, "u").unwrap();
        let v = Polynomial::parse(&z1, "v").unwrap();
        let w = Polynomial::parse(&z1, "u*v^2").unwrap();
        let single = WittVector::new(z1.clone(), vec![v.clone()]).unwrap();
        assert_eq!(eq1_rhs(&single, &w).unwrap(), std_poisson(&v, &w).unwrap());
        let zu = WittVector::new(z1.clone(), vec![u.clone(), Polynomial::zero(&z1)]).unwrap();
        assert_eq!(
            eq1_rhs(&zu, &w).unwrap(),
            u.pow(2).try_mul(&std_poisson(&u, &w).unwrap()).unwrap()
        );
        let zuv = WittVector::new(z1.clone(), vec![u.clone(), v]).unwrap();
        assert_eq!(eq1_rhs(&zuv, &u).unwrap(), Polynomial::constant(&z1, -1));
    }

    /// `(1/p^m)[lift φ_m(z), lift w] mod p` as a `Z_1` element.
    fn eq1_lhs(a: &Arc<WeylAlgebra>, z: &WittVector<Arc<PolyRing>>, w: &Polynomial) -> Polynomial {
        let m = z.len() as u32;
        let phi = a.phi_map(z).unwrap().lift(m + 1).unwrap();
        let wl = a.lift_center_poly(w, m + 1).unwrap();
        phi.divided_commutator(&wl, m)
            .unwrap()
            .reduce_mod(1)
            .unwrap()
            .to_center_poly(&a.center_ring())
            .unwrap()
    }

    #[test]
    fn eq1_identity_random() {
        let a = alg(3, 3);
        let z1 = a.center_ring();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for case in 0..40 {
            let m = 1 + case % 2;
            let z = random_witt(&mut rng, &z1, m, 2);
            let w = random_z1(&mut rng, &z1, 3, 3);
            assert_eq!(eq1_lhs(&a, &z, &w), eq1_rhs(&z, &w).unwrap(), "z={z} w={w}");
        }
    }

    #[test]
    fn eq1_fails_under_flipped_relation() {
        let a = alg(3, 3).with_relation_sign(-1);
        let z1 = a.center_ring();
        let z = WittVector::new(z1.clone(), vec![Polynomial::parse(&z1, "u").unwrap()]).unwrap();
        let w = Polynomial::parse(&z1, "v").unwrap();
        assert_ne!(eq1_lhs(&a, &z, &w), eq1_rhs(&z, &w).unwrap());
    }

    fn span_elems(a: &Arc<WeylAlgebra>, m: u32, idx: &MonomialIndex, basis: &ZpnMatrix) -> Vec<WeylElement> {
        basis.rows().iter().map(|r| idx.element_of_row(a, m, r).unwrap()).collect()
    }

    fn contains(idx: &MonomialIndex, basis: &ZpnMatrix, f: &WeylElement) -> bool {
        HowellBasis::new(basis).contains(&idx.row_of(f).unwrap())
    }

    #[test]
    fn center_examples() {
        let a = alg(3, 2);
        let (idx, basis) = a.center_basis(1, 6).unwrap();
        let mut got: Vec<String> = span_elems(&a, 1, &idx, &basis).iter().map(|e| e.to_string()).collect();
        got.sort();
        let mut expect: Vec<String> = ["1", "x^3", "y^3", "x^6", "x^3*y^3", "y^6"].iter().map(|s| s.to_string()).collect();
        expect.sort();
        assert_eq!(got, expect);
        for e in span_elems(&a, 1, &idx, &basis) {
            assert!(e.is_central().unwrap());
        }
        let (idx, basis) = a.center_basis(2, 9).unwrap();
        assert!(contains(&idx, &basis, &a.parse("x^9", 2).unwrap()));
        assert!(!contains(&idx, &basis, &a.parse("x^3", 2).unwrap()));
        assert!(contains(&idx, &basis, &a.parse("3*x^3", 2).unwrap()));
        assert!(contains(&idx, &basis, &a.one(2).unwrap()));
        for e in span_elems(&a, 2, &idx, &basis) {
            assert!(e.is_central().unwrap());
        }
    }

    #[test]
    fn center_mod_p_is_frobenius_power() {
        // reduce_mod(Z(A_{m+1}), 1) = Z_1^{p^m} in degree ≤ d
        let a = alg(3, 3);
        for m in 0..=2u32 {
            let d = 9;
            let (idx, basis) = a.center_basis(m + 1, d).unwrap();
            let reduced: Vec<Vec<u64>> = basis.rows().iter().map(|r| r.iter().map(|c| c % 3).collect()).collect();
            let md1 = a.level_modulus(1).unwrap();
            let got = ZpnMatrix::from_raw_rows(md1, idx.len(), reduced).howell_form();
            let step = 3u32.pow(m + 1);
            let mut rows = Vec::new();
            for i in (0..=d).step_by(step as usize) {
                for j in (0..=d - i).step_by(step as usize) {
                    rows.push(idx.row_of(&a.monomial(1, &[i, j], 1).unwrap()).unwrap());
                }
            }
            let expect = ZpnMatrix::from_raw_rows(md1, idx.len(), rows).howell_form();
            assert_eq!(got, expect, "m={m}");
        }
    }

    #[test]
    fn ideal_span_examples() {
        let a = alg(3, 2);
        let full = a.ideal_span_basis(&[a.one(2).unwrap()], 2, 4).unwrap();
        assert_eq!(full.basis().nrows(), full.index().len());
        let three = a.ideal_span_basis(&[a.constant(2, 3).unwrap()], 2, 4).unwrap();
        for row in three.basis().rows() {
            assert!(row.iter().all(|c| c % 3 == 0));
        }
        assert_eq!(three.basis().nrows(), three.index().len());
        let x3 = a.ideal_span_basis(&[a.parse("x^3", 1).unwrap()], 1, 4).unwrap();
        let mut got: Vec<String> = x3.elements().unwrap().iter().map(|e| e.to_string()).collect();
        got.sort();
        assert_eq!(got, vec!["x^3", "x^3*y", "x^4"]);
        assert!(matches!(
            a.ideal_span_basis(&[a.parse("x^5", 1).unwrap()], 1, 4),
            Err(Error::DegreeExceedsCap { degree: 5, cap: 4 })
        ));
    }

    #[test]
    fn ideal_intersect_center_examples() {
        let a = alg(3, 2);
        let full = a.ideal_span_basis(&[a.one(2).unwrap()], 2, 9).unwrap();
        let (_, center) = a.center_basis(2, 9).unwrap();
        assert_eq!(a.ideal_intersect_center(&full).unwrap(), center);
        let none = a.ideal_span_basis(&[], 2, 9).unwrap();
        assert_eq!(a.ideal_intersect_center(&none).unwrap().nrows(), 0);
        let x9 = a.ideal_span_basis(&[a.parse("x^9", 2).unwrap()], 2, 9).unwrap();
        let c = a.ideal_intersect_center(&x9).unwrap();
        assert!(contains(x9.index(), &c, &a.parse("x^9", 2).unwrap()));
    }

    #[test]
    fn central_generation_examples() {
        let a = alg(3, 2);
        let rep = a.central_generation_check(&[a.parse("x^9", 2).unwrap()], 2, 12).unwrap();
        assert_eq!(rep.verdict, CentralGenVerdict::Generated);
        let rep = a.central_generation_check(&[a.one(2).unwrap()], 2, 8).unwrap();
        assert_eq!(rep.verdict, CentralGenVerdict::Generated);
        let rep = a
            .central_generation_check(&[a.parse("x^3", 2).unwrap(), a.constant(2, 3).unwrap()], 2, 12)
            .unwrap();
        assert_eq!(rep.verdict, CentralGenVerdict::NotGeneratedWithinCap);
        assert_eq!(rep.witness.unwrap(), a.parse("x^3", 2).unwrap());
        assert!(!rep.truncated);
    }

    #[test]
    fn central_generation_for_phi_images() {
        let a = alg(3, 2);
        let z1 = a.center_ring();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..3 {
            let z = WittVector::new(
                z1.clone(),
                vec![random_z1(&mut rng, &z1, 1, 2), random_z1(&mut rng, &z1, 1, 2)],
            )
            .unwrap();
            let g = a.phi_map(&z).unwrap();
            let Some(dg) = g.degree() else { continue };
            let rep = a.central_generation_check(&[g], 2, dg + 6).unwrap();
            assert_eq!(rep.verdict, CentralGenVerdict::Generated);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn distributive(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = alg(3, 2);
            let f = random_elem(&mut rng, &a, 2, 4, 3);
            let g = random_elem(&mut rng, &a, 2, 4, 3);
            let h = random_elem(&mut rng, &a, 2, 4, 3);
            prop_assert_eq!(
                f.mul(&g.add(&h).unwrap()).unwrap(),
                f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
            );
        }
    }
}
