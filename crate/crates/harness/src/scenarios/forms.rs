use std::sync::Arc;

use wittquant::polyring::{fd_composite, PolyRing, Polynomial, QuotientRing};
use wittquant::witt::WittVector;

use crate::checks::{self, settle, Context, Witt};
use crate::error::Result;
use crate::sampling::Sampler;

use super::{Recorder, SAMPLE_TERMS};

pub fn cartier(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let alg = ctx.algebra(ctx.cfg.n)?;
    let ring = ctx.center_ring(&alg);
    let mut s = Sampler::new(ctx.cfg.seed, 0);
    for _ in 0..ctx.cfg.samples {
        let f = s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS);
        let g = s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS);
        let h = s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS);
        rec.record(
            "cartier-closed",
            || vec![f.to_string(), g.to_string()],
            settle(checks::cartier_closed(&f, &g))?,
        );
        rec.record(
            "cartier-well-defined",
            || vec![f.to_string(), g.to_string(), h.to_string()],
            settle(checks::cartier_well_defined(&f, &g, &h))?,
        );
    }
    Ok(())
}

/// Prefix tuples `(z_1..z_(n-1))` beyond this count are sampled, not enumerated.
pub const MUH_EXHAUSTIVE_LIMIT: u64 = 20_000;

/// All elements of a finite `B` over `F_p`.
fn enumerate(b: &QuotientRing, basis: &[Vec<u32>]) -> Vec<Polynomial> {
    let ring = b.base();
    let p = ring.p();
    let total = p.pow(basis.len() as u32);
    (0..total)
        .map(|mut code| {
            let terms: Vec<_> = basis
                .iter()
                .map(|e| {
                    let c = code % p;
                    code /= p;
                    (e.clone(), c)
                })
                .collect();
            Polynomial::from_terms(ring, terms)
        })
        .collect()
}

/// Solves `dz_n = -Σ_(i<n) z_i^(p^(n-i)-1) dz_i` in `B`; `None` if the right side is not exact.
fn last_component(prefix: &[Polynomial], b: &QuotientRing, n: usize) -> Result<Option<Polynomial>> {
    let ring = b.base();
    let mut comps = prefix.to_vec();
    comps.push(Polynomial::zero(ring));
    let z = WittVector::with_prime(b.clone(), ring.p(), comps)?;
    let form = fd_composite(&z, n)?.neg();
    Ok(form.primitive().map(|f| b.normal_form(&f)))
}

/// `ker d` on `B = F_p[u]/(u^N)`, `p | N`: the span of `u^(pk)`.
fn closed_elements(b: &QuotientRing, basis: &[Vec<u32>]) -> Vec<Polynomial> {
    let p = b.base().p() as u32;
    let kernel: Vec<Vec<u32>> = basis.iter().filter(|e| e[0] % p == 0).cloned().collect();
    enumerate(b, &kernel)
}

fn witt_of(ring: &Arc<PolyRing>, comps: Vec<Polynomial>) -> Result<Witt> {
    Ok(WittVector::with_prime(ring.clone(), ring.p(), comps)?)
}

/// One-variable instances `B = F_p[u]/m^(p^n)`. Small cases enumerate every
/// prefix `z_1..z_(n-1)` and solve for `z_n`, shifted by a rotating element of
/// `ker d`; larger ones sample prefixes biased towards `B^p + m̄^(p^i)`.
pub fn muh(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let n = ctx.cfg.witt_length.unwrap_or(ctx.cfg.n as usize);
    let (ring, m, b) = checks::line_quotient(ctx, n)?;
    let basis = b.monomial_basis()?;
    let p = ring.p();
    let closed = closed_elements(&b, &basis);
    let prefixes = (p as u128).checked_pow((basis.len() * (n - 1)) as u32);
    let check = |prefix: &[Polynomial], last: Polynomial, rec: &mut Recorder| -> Result<()> {
        let mut comps = prefix.to_vec();
        comps.push(last);
        let z = witt_of(&ring, comps)?;
        rec.record("muh", || vec![z.to_string()], settle(checks::muh(ctx, &z))?);
        Ok(())
    };
    if prefixes.is_some_and(|c| c <= MUH_EXHAUSTIVE_LIMIT as u128) {
        let all = enumerate(&b, &basis);
        let mut prefix = vec![0usize; n - 1];
        let mut turn = 0;
        loop {
            let zs: Vec<Polynomial> = prefix.iter().map(|&i| all[i].clone()).collect();
            match last_component(&zs, &b, n)? {
                Some(base) => {
                    let k = &closed[turn % closed.len()];
                    turn += 1;
                    check(&zs, b.normal_form(&base.try_add(k)?), rec)?;
                }
                None => rec.vacuous += 1,
            }
            // next prefix
            let mut i = 0;
            while i < prefix.len() {
                prefix[i] += 1;
                if prefix[i] < all.len() {
                    break;
                }
                prefix[i] = 0;
                i += 1;
            }
            if i == prefix.len() {
                break;
            }
        }
        return Ok(());
    }
    let mut s = Sampler::new(ctx.cfg.seed, 0);
    let mgens: Vec<Polynomial> = m.generators().iter().map(|g| Polynomial::monomial(&ring, g.clone(), 1)).collect();
    for _ in 0..ctx.cfg.samples {
        let mut zs = Vec::with_capacity(n - 1);
        for i in 1..n {
            let a = s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS).pth_power(1);
            let g = &mgens[s.below(mgens.len() as u64) as usize];
            let tail = s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS).try_mul(&g.pth_power(i as u32))?;
            let mut zi = a.try_add(&tail)?;
            if s.coin() {
                zi = zi.try_add(&s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS))?;
            }
            zs.push(b.normal_form(&zi));
        }
        match last_component(&zs, &b, n)? {
            Some(base) => {
                let k = &closed[s.below(closed.len() as u64) as usize];
                check(&zs, b.normal_form(&base.try_add(k)?), rec)?;
            }
            None => rec.vacuous += 1,
        }
    }
    Ok(())
}

/// Largest exponent per variable in the enumerated monomial ideals.
pub const FROB_MAX_EXPONENT: u32 = 6;

/// Monomial ideals generated by one or two Teichmüller lifts `τ(u^a v^b)`,
/// enumerated, then principal ideals `(τ(a^p + ε) + V(noise))` sampled.
pub fn frob(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let alg = ctx.algebra(ctx.cfg.n)?;
    let ring = ctx.center_ring(&alg);
    let nv = ring.nvars();
    let max_len = ctx.cfg.witt_length.unwrap_or(ctx.cfg.n as usize);
    let mut monos = Vec::new();
    for a in 0..=FROB_MAX_EXPONENT {
        for b in 0..=FROB_MAX_EXPONENT {
            if a + b == 0 {
                continue;
            }
            let mut e = vec![0u32; nv];
            e[0] = a;
            e[ctx.cfg.r] = b;
            monos.push(e);
        }
    }
    for len in 1..=max_len {
        let tau = |e: &Vec<u32>| -> Result<Witt> {
            let mut comps = vec![Polynomial::zero(&ring); len];
            comps[0] = Polynomial::monomial(&ring, e.clone(), 1);
            Ok(WittVector::with_prime(ring.clone(), ring.p(), comps)?)
        };
        for i in 0..monos.len() {
            for j in i..monos.len() {
                let gens = if i == j {
                    vec![tau(&monos[i])?]
                } else {
                    vec![tau(&monos[i])?, tau(&monos[j])?]
                };
                rec.record(
                    "frob",
                    || gens.iter().map(|g| g.to_string()).collect(),
                    settle(checks::frob(&gens))?,
                );
            }
        }
    }
    let mut s = Sampler::new(ctx.cfg.seed, 0);
    let p = ring.p();
    for t in 0..ctx.cfg.samples {
        let len = 1 + t % max_len;
        let a = s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS);
        if a.is_zero() {
            continue;
        }
        let mut first = a.pth_power(1);
        if s.coin() {
            first = first.try_add(&s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS))?;
        }
        let big = a.pth_power(len as u32);
        let mut comps = vec![first];
        for _ in 1..len {
            let h = s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS);
            comps.push(if s.coin() { big.try_mul(&h)? } else { h });
        }
        let g = WittVector::with_prime(ring.clone(), p, comps)?;
        let gens = vec![g];
        rec.record(
            "frob",
            || gens.iter().map(|g| g.to_string()).collect(),
            settle(checks::frob(&gens))?,
        );
    }
    Ok(())
}
