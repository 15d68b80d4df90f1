use wittquant::polyring::Polynomial;
use wittquant::quantization::{CentralGenVerdict, WeylElement};

use crate::checks::{self, settle, Context, Outcome};
use crate::error::Result;
use crate::report::Verdict;
use crate::sampling::Sampler;

use super::{center, Recorder, SAMPLE_TERMS};

/// `I = (m̃, p)` in `A_n`, with `m̃` the lifted generators of the configured
/// ideal. For `m = (u)` and `n = 2` this is the preimage of `x̄^p A_1`.
///
/// The expected verdict is a failure carrying a witness of non-generation.
/// If `Z(A_n) mod p` does not come out as expected the example is not
/// trustworthy and the verdict is inconclusive.
pub fn remark(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let n = ctx.cfg.n;
    let alg = ctx.algebra(n)?;
    let ring = ctx.center_ring(&alg);
    let m = ctx.ideal_in(&ring)?;
    let mut gens = m
        .generators()
        .iter()
        .map(|e| alg.lift_center_poly(&Polynomial::monomial(&ring, e.clone(), 1), n))
        .collect::<wittquant::Result<Vec<WeylElement>>>()?;
    if n > 1 {
        gens.push(alg.constant(n, ctx.p() as i128)?);
    }
    let texts = |w: &WeylElement| {
        let mut v = vec![w.to_text()];
        v.extend(gens.iter().map(WeylElement::to_text));
        v
    };
    let report = checks::generation_report(ctx, &gens)?;
    match (&report.verdict, &report.witness) {
        (CentralGenVerdict::NotGeneratedWithinCap, Some(w)) => {
            let outcome = settle(checks::central_generation(ctx, w, &gens))?;
            rec.record("central-generation", || texts(w), outcome);
        }
        _ => rec.record("central-generation", Vec::new, Outcome::Holds),
    }
    let mut sub = Recorder::default();
    center::mod_p_rows(ctx, n, &mut sub)?;
    if sub.failures > 0 || report.truncated {
        rec.force(Verdict::Inconclusive);
    }
    Ok(())
}

/// Ideals generated by one or two `φ_n` images, which are central.
pub fn flat(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let n = ctx.cfg.n;
    let alg = ctx.algebra(n)?;
    let ring = ctx.center_ring(&alg);
    let mut s = Sampler::new(ctx.cfg.seed, 0);
    for _ in 0..ctx.cfg.samples {
        let k = 1 + s.below(2) as usize;
        let mut gens = Vec::with_capacity(k);
        for _ in 0..k {
            let z = s.witt(&ring, n as usize, ctx.cfg.degree, SAMPLE_TERMS)?;
            let g = alg.phi_map(&z)?;
            if !g.is_zero() {
                gens.push(g);
            }
        }
        if gens.is_empty() {
            rec.record("central-generation", Vec::new, Outcome::Vacuous);
            continue;
        }
        let report = checks::generation_report(ctx, &gens)?;
        let outcome = match &report.witness {
            None if report.truncated => Outcome::Vacuous,
            None => Outcome::Holds,
            Some(w) => settle(checks::central_generation(ctx, w, &gens))?,
        };
        let w = report.witness.clone();
        rec.record(
            "central-generation",
            || {
                let mut v = vec![w.map(|w| w.to_text()).unwrap_or_default()];
                v.extend(gens.iter().map(WeylElement::to_text));
                v
            },
            outcome,
        );
    }
    Ok(())
}
