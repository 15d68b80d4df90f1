//! Single checks, addressable by name.
//!
//! Every check reads its inputs from element text, so a witness stored in a
//! report can be replayed with [`run`]. Scenarios call the typed functions
//! directly and serialize the inputs only when a check fails.

use std::sync::Arc;

use wittquant::chainring::{HowellBasis, ZpnMatrix};
use wittquant::polyring::{
    cartier_inverse, fd_composite, pth_power_decomposition_check, std_poisson, MonomialIdeal, PolyRing, Polynomial,
    QuotientRing,
};
use wittquant::quantization::{deformation_bracket_in, eq1_rhs, CentralGenReport, MonomialIndex, WeylAlgebra, WeylElement};
use wittquant::witt::WittVector;
use wittquant::chainring::PModulus;

use crate::config::{Mutation, ScenarioConfig};
use crate::error::{HarnessError, Result};
use crate::spans;

pub type Witt = WittVector<Arc<PolyRing>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Violated(String),
    /// The hypothesis of an implication does not hold; nothing was tested.
    Vacuous,
}

impl Outcome {
    fn from_eq<T: std::fmt::Display + PartialEq>(lhs: &T, rhs: &T) -> Outcome {
        if lhs == rhs {
            Outcome::Holds
        } else {
            Outcome::Violated(format!("{lhs} ≠ {rhs}"))
        }
    }

    fn from_membership(name_a: &str, in_a: bool, name_b: &str, in_b: bool) -> Outcome {
        if in_a == in_b {
            Outcome::Holds
        } else {
            let (yes, no) = if in_a { (name_a, name_b) } else { (name_b, name_a) };
            Outcome::Violated(format!("in {yes} but not in {no}"))
        }
    }
}

/// Algebras and rings for one configuration, with its mutation applied.
#[derive(Clone, Debug)]
pub struct Context {
    pub cfg: ScenarioConfig,
}

impl Context {
    pub fn new(cfg: ScenarioConfig) -> Self {
        Context { cfg }
    }

    pub fn p(&self) -> u64 {
        self.cfg.p
    }

    pub fn algebra(&self, n: u32) -> Result<Arc<WeylAlgebra>> {
        let a = WeylAlgebra::new(self.cfg.p, n, self.cfg.r)?;
        Ok(match self.cfg.mutation {
            Some(Mutation::FlipRelation) => a.with_relation_sign(-1),
            _ => a,
        })
    }

    pub fn center_ring(&self, alg: &Arc<WeylAlgebra>) -> Arc<PolyRing> {
        let ring = alg.center_ring();
        match self.cfg.mutation {
            Some(Mutation::FlipPairing) => ring.with_pairing_sign(-1),
            _ => ring,
        }
    }

    /// `F_p[u]`, the ring of the one-variable form lemmas.
    pub fn line_ring(&self) -> Result<Arc<PolyRing>> {
        Ok(PolyRing::new(&["u"], PModulus::field(self.cfg.p)?)?)
    }

    /// Parses a header-form element into this context's algebra of the same `n`.
    pub fn parse_weyl(&self, text: &str) -> Result<WeylElement> {
        let plain = WeylAlgebra::parse_with_header(text)?;
        if plain.algebra().p() != self.cfg.p || plain.algebra().r() != self.cfg.r {
            return Err(HarnessError::Witness(format!("element header does not match p and r: {text:?}")));
        }
        let alg = self.algebra(plain.algebra().n())?;
        let body: Vec<&str> = text.lines().skip(1).collect();
        Ok(alg.parse(&body.join(" "), plain.level())?)
    }

    pub fn parse_witt(&self, ring: &Arc<PolyRing>, text: &str) -> Result<Witt> {
        Ok(WittVector::parse(ring, text)?)
    }

    pub fn parse_poly(&self, ring: &Arc<PolyRing>, text: &str) -> Result<Polynomial> {
        Ok(Polynomial::parse(ring, text)?)
    }

    /// Algebra with at least `n` levels.
    fn algebra_with(&self, n: u32) -> Result<Arc<WeylAlgebra>> {
        self.algebra(self.cfg.n.max(n))
    }

    /// Center ring of `algebra_with`.
    fn center_ring_with(&self, n: u32) -> Result<(Arc<WeylAlgebra>, Arc<PolyRing>)> {
        let alg = self.algebra_with(n)?;
        let ring = self.center_ring(&alg);
        Ok((alg, ring))
    }

    /// The monomial ideal `m` of the configuration, in `ring`.
    pub fn ideal_in(&self, ring: &Arc<PolyRing>) -> Result<MonomialIdeal> {
        let gens: Vec<&str> = match &self.cfg.ideal {
            Some(g) => g.iter().map(String::as_str).collect(),
            None => vec!["u"],
        };
        Ok(MonomialIdeal::parse(ring, &gens)?)
    }
}

// Witt vectors and the center map.

pub fn phi_add(ctx: &Context, z: &Witt, w: &Witt) -> Result<Outcome> {
    let alg = ctx.algebra_with(z.len() as u32)?;
    let lhs = alg.phi_map(&z.add(w)?)?;
    let rhs = alg.phi_map(z)?.add(&alg.phi_map(w)?)?;
    Ok(Outcome::from_eq(&lhs, &rhs))
}

pub fn phi_mul(ctx: &Context, z: &Witt, w: &Witt) -> Result<Outcome> {
    let alg = ctx.algebra_with(z.len() as u32)?;
    let lhs = alg.phi_map(&z.mul(w)?)?;
    let rhs = alg.phi_map(z)?.mul(&alg.phi_map(w)?)?;
    Ok(Outcome::from_eq(&lhs, &rhs))
}

pub fn phi_central(ctx: &Context, z: &Witt) -> Result<Outcome> {
    let alg = ctx.algebra_with(z.len() as u32)?;
    let f = alg.phi_map(z)?;
    for g in alg.generators(f.level())? {
        let c = f.commutator(&g)?;
        if !c.is_zero() {
            return Ok(Outcome::Violated(format!("[φ(z), {g}] = {c}")));
        }
    }
    Ok(Outcome::Holds)
}

/// `φ_(m-1)(F z) = r(φ_m(z))`.
pub fn phi_frobenius(ctx: &Context, z: &Witt) -> Result<Outcome> {
    let m = z.len() as u32;
    if m < 2 {
        return Err(HarnessError::Witness("phi-frobenius needs length ≥ 2".into()));
    }
    let alg = ctx.algebra_with(m)?;
    let lhs = alg.phi_map(&z.frobenius()?)?;
    let rhs = alg.phi_map(z)?.reduce_mod(m - 1)?;
    Ok(Outcome::from_eq(&lhs, &rhs))
}

/// `φ_m(V z) = v(φ_(m-1)(z))`.
pub fn phi_verschiebung(ctx: &Context, z: &Witt) -> Result<Outcome> {
    let alg = ctx.algebra_with(z.len() as u32 + 1)?;
    let lhs = alg.phi_map(&z.verschiebung())?;
    let rhs = alg.phi_map(z)?.v_map()?;
    Ok(Outcome::from_eq(&lhs, &rhs))
}

/// `(1/p^m)[lift φ_m(z), lift w] mod p = Σ z_i^(p^(m-i)-1) {z_i, w}`.
pub fn eq1(ctx: &Context, z: &Witt, w: &Polynomial) -> Result<Outcome> {
    let m = z.len() as u32;
    let alg = ctx.algebra_with(m + 1)?;
    let ring = ctx.center_ring(&alg);
    let big = alg.phi_map(z)?.lift(m + 1)?;
    let wl = alg.lift_center_poly(w, m + 1)?;
    let lhs = big.divided_commutator(&wl, m)?.reduce_mod(1)?.to_center_poly(&ring)?;
    let rhs = eq1_rhs(z, w)?;
    Ok(Outcome::from_eq(&lhs, &rhs))
}

// Deformation bracket.

/// `[y^p, x^p]` over the integers is `Σ_(k≥1) k! C(p,k)^2 x^(p-k) y^(p-k)`;
/// dividing by `p` and reducing leaves the constant `(p-1)! ≡ -1`.
fn integer_orientation(p: u64) -> std::result::Result<i64, String> {
    let mut binom = vec![1u128; p as usize + 1];
    for k in 1..=p as usize {
        binom[k] = binom[k - 1] * (p as u128 - k as u128 + 1) / k as u128;
    }
    let mut fact = 1u128;
    let mut constant = 0i64;
    for k in 1..=p as usize {
        fact *= k as u128;
        let c = fact * binom[k] * binom[k];
        assert_eq!(c % p as u128, 0, "commutator coefficient not divisible by p");
        let reduced = ((c / p as u128) % p as u128) as i64;
        if k == p as usize {
            constant = reduced;
        } else if reduced != 0 {
            return Err(format!("x^{0} y^{0} survives with coefficient {reduced}", p as usize - k));
        }
    }
    // {ȳ^p, x̄^p} = constant, so {x̄^p, ȳ^p} = -constant
    Ok((p as i64 - constant) % p as i64)
}

/// `{x̄^p, ȳ^p}` against the integer expansion and against `{u, v}`.
pub fn bracket_orientation(ctx: &Context) -> Result<Outcome> {
    let (alg, ring) = ctx.center_ring_with(2)?;
    let expected = match integer_orientation(ctx.p()) {
        Ok(c) => Polynomial::constant(&ring, c as i128),
        Err(e) => return Ok(Outcome::Violated(e)),
    };
    let xp = alg.x(0, 1)?.pow(ctx.p())?;
    let yp = alg.y(0, 1)?.pow(ctx.p())?;
    let quantized = deformation_bracket_in(&xp, &yp, &ring)?;
    if quantized != expected {
        return Ok(Outcome::Violated(format!(
            "deformation bracket {{x^p, y^p}} = {quantized}, integer expansion gives {expected}"
        )));
    }
    let u = Polynomial::var(&ring, ring.pairs()[0].0);
    let v = Polynomial::var(&ring, ring.pairs()[0].1);
    let symplectic = std_poisson(&u, &v)?;
    Ok(if symplectic == expected {
        Outcome::Holds
    } else {
        Outcome::Violated(format!("{{u, v}} = {symplectic}, integer expansion gives {expected}"))
    })
}

/// `(1/p)[ã, b̃] mod p = {a, b}` with canonical lifts of `a, b ∈ Z_1`.
pub fn bracket_agreement(ctx: &Context, f: &Polynomial, g: &Polynomial) -> Result<Outcome> {
    let (alg, ring) = ctx.center_ring_with(2)?;
    let a = alg.lift_center_poly(f, 1)?;
    let b = alg.lift_center_poly(g, 1)?;
    let lhs = deformation_bracket_in(&a, &b, &ring)?;
    let rhs = std_poisson(f, g)?;
    Ok(Outcome::from_eq(&lhs, &rhs))
}

/// The bracket does not see `p`-multiples added to the lifts.
pub fn lift_independence(ctx: &Context, f: &Polynomial, g: &Polynomial, h1: &WeylElement, h2: &WeylElement) -> Result<Outcome> {
    let (alg, ring) = ctx.center_ring_with(2)?;
    let p = ctx.p() as i128;
    let a = alg.lift_center_poly(f, 2)?.add(&h1.reduce_mod(2)?.scale(p))?;
    let b = alg.lift_center_poly(g, 2)?.add(&h2.reduce_mod(2)?.scale(p))?;
    let lhs = a.divided_commutator(&b, 1)?.to_center_poly(&ring)?;
    let rhs = deformation_bracket_in(&alg.lift_center_poly(f, 1)?, &alg.lift_center_poly(g, 1)?, &ring)?;
    Ok(Outcome::from_eq(&lhs, &rhs))
}

// Differential forms.

pub fn cartier_closed(f: &Polynomial, g: &Polynomial) -> Result<Outcome> {
    let w = cartier_inverse(f.ring(), &[(f.clone(), g.clone())])?;
    Ok(if w.is_closed() {
        Outcome::Holds
    } else {
        Outcome::Violated(format!("d C⁻¹(f dg) ≠ 0 for C⁻¹(f dg) = {w}"))
    })
}

/// `C⁻¹(f d(gh)) - C⁻¹(fg dh) - C⁻¹(fh dg)` is exact.
pub fn cartier_well_defined(f: &Polynomial, g: &Polynomial, h: &Polynomial) -> Result<Outcome> {
    let ring = f.ring();
    let lhs = cartier_inverse(ring, &[(f.clone(), g.try_mul(h)?)])?;
    let rhs = cartier_inverse(ring, &[(f.try_mul(g)?, h.clone()), (f.try_mul(h)?, g.clone())])?;
    let diff = lhs.try_add(&rhs.neg())?;
    Ok(if diff.is_exact() {
        Outcome::Holds
    } else {
        Outcome::Violated(format!("difference {diff} is not exact"))
    })
}

/// `B = F_p[u] / m^(p^n)` with `m` from the configuration.
pub fn line_quotient(ctx: &Context, n: usize) -> Result<(Arc<PolyRing>, MonomialIdeal, QuotientRing)> {
    let ring = ctx.line_ring()?;
    let m = ctx.ideal_in(&ring)?;
    let b = QuotientRing::new(m.power(ctx.p().pow(n as u32) as u32));
    Ok((ring, m, b))
}

/// `Σ z_i^(p^(n-i)-1) dz_i = 0` in `Ω_B` implies `z_i ∈ B^p + m̄^(p^i) B`.
pub fn muh(ctx: &Context, z: &Witt) -> Result<Outcome> {
    let n = z.len();
    let (_, m, b) = line_quotient(ctx, n)?;
    let zb = z.map(b.clone(), |c| b.normal_form(c));
    if !fd_composite(&zb, n)?.is_zero() {
        return Ok(Outcome::Vacuous);
    }
    for i in 1..=n {
        if pth_power_decomposition_check(zb.component(i), i as u32, &m, &b)?.is_none() {
            return Ok(Outcome::Violated(format!("z_{i} = {} is not in B^p + m^(p^{i}) B", zb.component(i))));
        }
    }
    Ok(Outcome::Holds)
}

/// For the ideal of `W_n(S)` generated by `gens`: if `F^(n-1) d` of every
/// generator lies in `(F^(n-1) g)Ω`, the first components generate an ideal
/// generated by `p`-th powers.
///
/// Supported shapes: every first component a monomial, or a single generator.
pub fn frob(gens: &[Witt]) -> Result<Outcome> {
    let Some(first) = gens.first() else {
        return Err(HarnessError::Witness("frob needs at least one generator".into()));
    };
    let n = first.len();
    if gens.iter().any(|g| g.len() != n) {
        return Err(HarnessError::Witness("generators of different lengths".into()));
    }
    let ring = first.ring().clone();
    let p = ring.p() as u32;
    let firsts: Vec<&Polynomial> = gens.iter().map(|g| g.component(1)).filter(|f| !f.is_zero()).collect();
    let monomial = firsts.iter().all(|f| f.num_terms() == 1);
    if !monomial && gens.len() > 1 {
        return Err(HarnessError::Witness("only monomial or principal ideals are supported".into()));
    }
    let powers: Vec<Polynomial> = firsts.iter().map(|f| f.pth_power(n as u32 - 1)).collect();
    let in_ideal = |h: &Polynomial| -> Result<bool> {
        if h.is_zero() {
            return Ok(true);
        }
        if powers.is_empty() {
            return Ok(false);
        }
        if monomial {
            let gens = powers.iter().map(|f| f.terms().next().unwrap().0.clone()).collect();
            Ok(MonomialIdeal::new(&ring, gens).contains(h))
        } else {
            Ok(h.divide_exact(&powers[0])?.is_some())
        }
    };
    for g in gens {
        let form = fd_composite(g, n)?;
        for i in 0..ring.nvars() {
            if !in_ideal(&form.coeff(i))? {
                return Ok(Outcome::Vacuous);
            }
        }
    }
    let conclusion = if monomial {
        let gens = firsts.iter().map(|f| f.terms().next().unwrap().0.clone()).collect();
        MonomialIdeal::new(&ring, gens).generated_by_pth_powers()
    } else {
        firsts.iter().all(|f| f.terms().all(|(e, _)| e.iter().all(|x| x % p == 0)))
    };
    Ok(if conclusion {
        Outcome::Holds
    } else {
        let list: Vec<String> = firsts.iter().map(|f| f.to_string()).collect();
        Outcome::Violated(format!("({}) is not generated by p-th powers", list.join(", ")))
    })
}

// Centers and ideals.

/// Degree cap for a central-generation comparison.
pub fn generation_cap(ctx: &Context, gens: &[WeylElement]) -> u32 {
    let top = gens.iter().filter_map(|g| g.degree()).max().unwrap_or(0);
    ctx.cfg.cap.unwrap_or(top + 2 * ctx.p() as u32)
}

pub fn generation_report(ctx: &Context, gens: &[WeylElement]) -> Result<CentralGenReport> {
    let first = gens.first().ok_or_else(|| HarnessError::Witness("no generators".into()))?;
    let alg = first.algebra().clone();
    Ok(alg.central_generation_check(gens, first.level(), generation_cap(ctx, gens))?)
}

/// `candidate ∈ (I ∩ Z) A` for `I = (gens)`, within the cap.
pub fn central_generation(ctx: &Context, candidate: &WeylElement, gens: &[WeylElement]) -> Result<Outcome> {
    let rep = generation_report(ctx, gens)?;
    Ok(if rep.centrally_generated_contains(candidate)? {
        Outcome::Holds
    } else {
        Outcome::Violated(format!("{candidate} is in the ideal but not in (I ∩ Z) A"))
    })
}

/// Default cap of the center comparisons.
pub fn center_cap(ctx: &Context) -> u32 {
    ctx.cfg.cap.unwrap_or(9)
}

/// `Z(A_L) mod p` against `Z_1^(p^(L-1))`, truncated; `L` is the algebra's `n`.
pub struct CenterModP {
    pub alg: Arc<WeylAlgebra>,
    pub idx: MonomialIndex,
    pub reduced: HowellBasis,
    pub expected: HowellBasis,
}

impl CenterModP {
    pub fn new(ctx: &Context, level: u32) -> Result<Self> {
        let alg = ctx.algebra(level)?;
        let (idx, reduced) = spans::center_mod_p(&alg, level, center_cap(ctx))?;
        let expected = spans::monomials_divisible_by(&alg, &idx, ctx.p().pow(level) as u32)?;
        Ok(CenterModP { alg, idx, reduced, expected })
    }

    pub fn differences(&self) -> Vec<Vec<u64>> {
        spans::span_difference(self.reduced.matrix(), self.expected.matrix())
    }

    pub fn check(&self, f: &WeylElement) -> Result<Outcome> {
        let row = self.idx.row_of(&f.reduce_mod(1)?)?;
        Ok(Outcome::from_membership(
            "Z mod p",
            self.reduced.contains(&row),
            "Z_1^(p^(L-1))",
            self.expected.contains(&row),
        ))
    }
}

/// A basis element of `Z(A_L)`: commutes with the generators and reduces into `Z_1^(p^(L-1))`.
pub fn center_element(f: &WeylElement) -> Result<Outcome> {
    let alg = f.algebra();
    for g in alg.generators(f.level())? {
        let c = f.commutator(&g)?;
        if !c.is_zero() {
            return Ok(Outcome::Violated(format!("[f, {g}] = {c}")));
        }
    }
    let q = alg.p().pow(f.level()) as u32;
    for (e, _) in f.reduce_mod(1)?.terms() {
        if e.iter().any(|x| x % q != 0) {
            return Ok(Outcome::Violated(format!("f mod p has an exponent vector {e:?} outside p^{}ℕ", f.level())));
        }
    }
    Ok(Outcome::Holds)
}

/// Extra degree allowed for `φ` images whose top terms cancel.
pub fn phi_slack(p: u64, level: u32) -> u32 {
    p.pow(level) as u32
}

/// Exponent vectors in `nvars` variables of total degree `≤ bound`.
pub fn monomials_up_to(nvars: usize, bound: u32) -> Vec<Vec<u32>> {
    fn go(e: &mut Vec<u32>, i: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
        if i == e.len() {
            out.push(e.clone());
            return;
        }
        for a in 0..=budget {
            e[i] = a;
            go(e, i + 1, budget - a, out);
        }
        e[i] = 0;
    }
    let mut out = Vec::new();
    go(&mut vec![0; nvars], 0, bound, &mut out);
    out
}

/// `Z(A_L)` against the span of `φ_L` images, truncated at the center cap.
pub struct PhiOntoCenter {
    pub alg: Arc<WeylAlgebra>,
    pub idx: MonomialIndex,
    pub center: ZpnMatrix,
    pub phi: ZpnMatrix,
}

impl PhiOntoCenter {
    pub fn new(ctx: &Context, level: u32) -> Result<Self> {
        let alg = ctx.algebra(level)?;
        let d = center_cap(ctx);
        let p = ctx.p();
        let idx = alg.graded_index(d);
        let center = alg.center_in(level, &idx)?;
        let bound = d + phi_slack(p, level);
        let mut gens = Vec::new();
        for i in 1..=level as usize {
            let scale = p.pow(level - i as u32 + 1) as u32;
            for mono in monomials_up_to(2 * ctx.cfg.r, bound / scale) {
                gens.push((i, mono));
            }
        }
        let phi = spans::phi_span_in(&alg, level, &gens, &idx, |_| true)?;
        Ok(PhiOntoCenter { alg, idx, center, phi })
    }

    pub fn differences(&self) -> Vec<Vec<u64>> {
        spans::span_difference(&self.center, &self.phi)
    }

    pub fn check(&self, f: &WeylElement) -> Result<Outcome> {
        let row = self.idx.row_of(f)?;
        Ok(Outcome::from_membership(
            "Z(A_L)",
            HowellBasis::new(&self.center).contains(&row),
            "φ_L(W_L(Z_1))",
            HowellBasis::new(&self.phi).contains(&row),
        ))
    }
}

/// The quotient `R = A_n / (x^N)`, `N = a p^(n+1)`, for `m = (u^a)`, so that
/// `Z(R/pR) = Z_1/(u^(a p^n)) = B`. Everything is truncated to the box
/// `x-degree < N`, `y-degree ≤ D`.
pub struct QuotientCenter {
    pub alg: Arc<WeylAlgebra>,
    pub n: u32,
    pub x_cap: u32,
    pub y_cap: u32,
    pub idx: MonomialIndex,
    /// `Z(R)`, from the kernel of the ad operators on the box.
    pub center: ZpnMatrix,
    /// `Z(R) ∩ pR`, as `p · Z(R_(n-1))`.
    pub center_p: ZpnMatrix,
    /// `φ_n(W_n(B))`.
    pub phi: ZpnMatrix,
    /// `φ_n(V W_(n-1)(B))`.
    pub phi_v: ZpnMatrix,
    /// `Z(R/pR)`.
    pub residue_center: ZpnMatrix,
    /// `B`, lifted to `F_p[x^p, y^p]`.
    pub residue_b: ZpnMatrix,
}

impl QuotientCenter {
    pub fn new(ctx: &Context) -> Result<Self> {
        if ctx.cfg.r != 1 {
            return Err(HarnessError::Guard("the quotient center instance uses r = 1".into()));
        }
        let n = ctx.cfg.n;
        let p = ctx.p();
        let alg = ctx.algebra(n)?;
        let ring = alg.center_ring();
        let a = match ctx.ideal_in(&ring)?.generators() {
            [g] if g[1] == 0 && g[0] > 0 => g[0],
            _ => {
                return Err(HarnessError::Guard(
                    "the quotient center instance needs m = (u^a) with a ≥ 1".into(),
                ))
            }
        };
        let x_cap = a * p.pow(n + 1) as u32;
        let y_cap = center_cap(ctx);
        let idx = spans::box_index(x_cap, y_cap);
        let center = alg.center_in(n, &idx)?;
        let center_p = if n >= 2 {
            let lower = alg.center_in(n - 1, &idx)?;
            let rows = lower
                .rows()
                .iter()
                .map(|r| idx.row_of(&idx.element_of_row(&alg, n - 1, r)?.v_map()?))
                .collect::<wittquant::Result<Vec<_>>>()?;
            ZpnMatrix::from_raw_rows(alg.level_modulus(n)?, idx.len(), rows).howell_form()
        } else {
            ZpnMatrix::empty(alg.level_modulus(n)?, idx.len())
        };
        let b_exp = a * p.pow(n) as u32;
        let bound = y_cap + phi_slack(p, n + 1);
        let mut gens = Vec::new();
        for i in 1..=n as usize {
            let scale = p.pow(n - i as u32 + 1) as u32;
            for alpha in 0..b_exp {
                for beta in 0..=bound / scale {
                    gens.push((i, vec![alpha, beta]));
                }
            }
        }
        let keep = |e: &[u32]| e[0] < x_cap;
        let phi = spans::phi_span_in(&alg, n, &gens, &idx, keep)?;
        let shifted: Vec<_> = gens.iter().filter(|(i, _)| *i >= 2).cloned().collect();
        let phi_v = spans::phi_span_in(&alg, n, &shifted, &idx, keep)?;
        let residue_center = alg.center_in(1, &idx)?;
        let residue_b = spans::monomials_divisible_by(&alg, &idx, p as u32)?.matrix().clone();
        Ok(QuotientCenter {
            alg,
            n,
            x_cap,
            y_cap,
            idx,
            center,
            center_p,
            phi,
            phi_v,
            residue_center,
            residue_b,
        })
    }

    fn member(m: &ZpnMatrix, row: &[u64]) -> bool {
        HowellBasis::new(m).contains(row)
    }

    pub fn check_center(&self, f: &WeylElement) -> Result<Outcome> {
        let row = self.idx.row_of(f)?;
        Ok(Outcome::from_membership("Z(R)", Self::member(&self.center, &row), "φ_n(W_n(B))", Self::member(&self.phi, &row)))
    }

    pub fn check_p_part(&self, f: &WeylElement) -> Result<Outcome> {
        let row = self.idx.row_of(f)?;
        Ok(Outcome::from_membership(
            "Z(R) ∩ pR",
            Self::member(&self.center_p, &row),
            "φ_n(V W_(n-1)(B))",
            Self::member(&self.phi_v, &row),
        ))
    }

    pub fn check_residue(&self, f: &WeylElement) -> Result<Outcome> {
        let row = self.idx.row_of(f)?;
        Ok(Outcome::from_membership(
            "Z(R/pR)",
            Self::member(&self.residue_center, &row),
            "B",
            Self::member(&self.residue_b, &row),
        ))
    }
}

/// Names accepted by [`run`].
pub const CHECKS: &[&str] = &[
    "phi-add",
    "phi-mul",
    "phi-central",
    "phi-frobenius",
    "phi-verschiebung",
    "eq1",
    "bracket-orientation",
    "bracket-agreement",
    "lift-independence",
    "cartier-closed",
    "cartier-well-defined",
    "muh",
    "frob",
    "central-generation",
    "center-mod-p",
    "center-element",
    "phi-onto-center",
    "quotient-center",
    "quotient-center-p",
    "quotient-residue",
];

/// Runs the named check on element text, under `ctx`.
pub fn run(ctx: &Context, check: &str, elements: &[String]) -> Result<Outcome> {
    let arity = |k: usize| -> Result<()> {
        if elements.len() == k {
            Ok(())
        } else {
            Err(HarnessError::Witness(format!("{check} takes {k} elements, got {}", elements.len())))
        }
    };
    let z1 = || -> Result<Arc<PolyRing>> { Ok(ctx.center_ring_with(2)?.1) };
    let witt = |i: usize| -> Result<Witt> { ctx.parse_witt(&z1()?, &elements[i]) };
    let poly = |i: usize| -> Result<Polynomial> { ctx.parse_poly(&z1()?, &elements[i]) };
    let weyl = |i: usize| -> Result<WeylElement> { ctx.parse_weyl(&elements[i]) };
    if !CHECKS.contains(&check) {
        return Err(HarnessError::UnknownCheck(check.to_string()));
    }
    // element parse failures return early; what remains is the evaluation
    let evaluated = match check {
        "phi-add" => {
            arity(2)?;
            phi_add(ctx, &witt(0)?, &witt(1)?)
        }
        "phi-mul" => {
            arity(2)?;
            phi_mul(ctx, &witt(0)?, &witt(1)?)
        }
        "phi-central" => {
            arity(1)?;
            phi_central(ctx, &witt(0)?)
        }
        "phi-frobenius" => {
            arity(1)?;
            phi_frobenius(ctx, &witt(0)?)
        }
        "phi-verschiebung" => {
            arity(1)?;
            phi_verschiebung(ctx, &witt(0)?)
        }
        "eq1" => {
            arity(2)?;
            eq1(ctx, &witt(0)?, &poly(1)?)
        }
        "bracket-orientation" => {
            arity(0)?;
            bracket_orientation(ctx)
        }
        "bracket-agreement" => {
            arity(2)?;
            bracket_agreement(ctx, &poly(0)?, &poly(1)?)
        }
        "lift-independence" => {
            arity(4)?;
            lift_independence(ctx, &poly(0)?, &poly(1)?, &weyl(2)?, &weyl(3)?)
        }
        "cartier-closed" => {
            arity(2)?;
            cartier_closed(&poly(0)?, &poly(1)?)
        }
        "cartier-well-defined" => {
            arity(3)?;
            cartier_well_defined(&poly(0)?, &poly(1)?, &poly(2)?)
        }
        "muh" => {
            arity(1)?;
            muh(ctx, &ctx.parse_witt(&ctx.line_ring()?, &elements[0])?)
        }
        "frob" => {
            let ring = z1()?;
            let gens = elements.iter().map(|e| ctx.parse_witt(&ring, e)).collect::<Result<Vec<_>>>()?;
            frob(&gens)
        }
        "central-generation" => {
            if elements.len() < 2 {
                return Err(HarnessError::Witness("central-generation takes a candidate and generators".into()));
            }
            let gens = (1..elements.len()).map(weyl).collect::<Result<Vec<_>>>()?;
            central_generation(ctx, &weyl(0)?, &gens)
        }
        "center-mod-p" => {
            arity(1)?;
            let f = weyl(0)?;
            CenterModP::new(ctx, f.algebra().n())?.check(&f)
        }
        "center-element" => {
            arity(1)?;
            center_element(&weyl(0)?)
        }
        "phi-onto-center" => {
            arity(1)?;
            let f = weyl(0)?;
            PhiOntoCenter::new(ctx, f.level())?.check(&f)
        }
        "quotient-center" | "quotient-center-p" | "quotient-residue" => {
            arity(1)?;
            let f = weyl(0)?;
            let q = QuotientCenter::new(ctx)?;
            match check {
                "quotient-center" => q.check_center(&f),
                "quotient-center-p" => q.check_p_part(&f),
                _ => q.check_residue(&f),
            }
        }
        other => Err(HarnessError::UnknownCheck(other.to_string())),
    };
    settle(evaluated)
}

/// Runs a typed check and turns algebra errors into violations.
///
/// A failed precondition inside a check (for instance a commutator that is
/// not divisible by `p^m`) is a finding, not a crash.
pub fn settle(result: Result<Outcome>) -> Result<Outcome> {
    match result {
        Err(HarnessError::Algebra(e)) => Ok(Outcome::Violated(format!("error: {e}"))),
        other => other,
    }
}
