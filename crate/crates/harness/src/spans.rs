//! Truncated spans shared by the center scenarios.

use std::collections::HashMap;
use std::sync::Arc;

use wittquant::chainring::{HowellBasis, ZpnMatrix};
use wittquant::polyring::{PolyRing, Polynomial};
use wittquant::quantization::{MonomialIndex, WeylAlgebra, WeylElement};
use wittquant::witt::WittVector;
use wittquant::Result;

/// `Z(A_level) ∩ {deg ≤ d}` reduced mod `p`, as a Howell basis over `F_p`.
pub fn center_mod_p(alg: &Arc<WeylAlgebra>, level: u32, d: u32) -> Result<(MonomialIndex, HowellBasis)> {
    let (idx, basis) = alg.center_basis(level, d)?;
    let reduced = basis.reduce_to(1)?;
    Ok((idx, HowellBasis::new(&reduced)))
}

/// Span over `F_p` of the monomials in `idx` whose exponents are all divisible by `q`.
pub fn monomials_divisible_by(alg: &Arc<WeylAlgebra>, idx: &MonomialIndex, q: u32) -> Result<HowellBasis> {
    let md = alg.level_modulus(1)?;
    let rows = (0..idx.len())
        .filter(|&c| idx.exponents(c).iter().all(|e| e % q == 0))
        .map(|c| {
            let mut row = vec![0u64; idx.len()];
            row[c] = 1;
            row
        })
        .collect();
    Ok(HowellBasis::new(&ZpnMatrix::from_raw_rows(md, idx.len(), rows)))
}

/// `V^(i-1) τ(mono)` in `W_length` of the center ring.
pub fn shifted_teichmuller(ring: &Arc<PolyRing>, length: usize, i: usize, mono: &[u32]) -> Result<WittVector<Arc<PolyRing>>> {
    let mut comps = vec![Polynomial::zero(ring); length];
    comps[i - 1] = Polynomial::monomial(ring, mono.to_vec(), 1);
    WittVector::with_prime(ring.clone(), ring.p(), comps)
}

/// Span of the elements `φ_level(V^(i-1) τ(mono))` for `(i, mono)` in
/// `gens`, after dropping the terms rejected by `keep`, intersected with the
/// coordinates of `idx`.
///
/// Terms outside `idx` get their own columns, placed first; the rows of the
/// Howell form that vanish there are exactly the span elements supported on
/// `idx`.
pub fn phi_span_in(
    alg: &Arc<WeylAlgebra>,
    level: u32,
    gens: &[(usize, Vec<u32>)],
    idx: &MonomialIndex,
    keep: impl Fn(&[u32]) -> bool,
) -> Result<ZpnMatrix> {
    let md = alg.level_modulus(level)?;
    let ring = alg.center_ring();
    let mut images: Vec<Vec<(Vec<u32>, u64)>> = Vec::with_capacity(gens.len());
    let mut outer: HashMap<Vec<u32>, usize> = HashMap::new();
    for (i, mono) in gens {
        let z = shifted_teichmuller(&ring, level as usize, *i, mono)?;
        let img: Vec<(Vec<u32>, u64)> = alg.phi_map(&z)?.terms().filter(|(e, _)| keep(e)).collect();
        for (e, _) in &img {
            if idx.position(e).is_none() {
                let next = outer.len();
                outer.entry(e.clone()).or_insert(next);
            }
        }
        images.push(img);
    }
    let n_out = outer.len();
    let width = n_out + idx.len();
    let rows: Vec<Vec<u64>> = images
        .iter()
        .map(|img| {
            let mut row = vec![0u64; width];
            for (e, c) in img {
                let col = match idx.position(e) {
                    Some(j) => n_out + j,
                    None => outer[e],
                };
                row[col] = *c;
            }
            row
        })
        .collect();
    let h = ZpnMatrix::from_raw_rows(md, width, rows).howell_form();
    let inner: Vec<Vec<u64>> = h
        .rows()
        .iter()
        .filter(|r| ZpnMatrix::pivot_of(r).is_some_and(|c| c >= n_out))
        .map(|r| r[n_out..].to_vec())
        .collect();
    Ok(ZpnMatrix::from_raw_rows(md, idx.len(), inner).howell_form())
}

/// Elements of `A_level` for the rows of `m`.
pub fn elements(alg: &Arc<WeylAlgebra>, level: u32, idx: &MonomialIndex, m: &ZpnMatrix) -> Result<Vec<WeylElement>> {
    m.rows().iter().map(|r| idx.element_of_row(alg, level, r)).collect()
}

/// Rows of `a` outside `span_b`, and rows of `b` outside `span_a`.
pub fn span_difference(a: &ZpnMatrix, b: &ZpnMatrix) -> Vec<Vec<u64>> {
    let ha = HowellBasis::new(a);
    let hb = HowellBasis::new(b);
    let mut out: Vec<Vec<u64>> = a.rows().iter().filter(|r| !hb.contains(r)).cloned().collect();
    out.extend(b.rows().iter().filter(|r| !ha.contains(r)).cloned());
    out
}

/// The box `x_1-degree < x_cap`, `y_1-degree ≤ y_cap` for one pair.
pub fn box_index(x_cap: u32, y_cap: u32) -> MonomialIndex {
    let mut exps = Vec::new();
    for a in 0..x_cap {
        for b in 0..=y_cap {
            exps.push(vec![a, b]);
        }
    }
    MonomialIndex::from_exponents(2, &exps)
}
