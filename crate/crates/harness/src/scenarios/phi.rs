use crate::checks::{self, settle, Context};
use crate::error::Result;
use crate::sampling::Sampler;

use super::{Recorder, SAMPLE_TERMS};

/// Witt lengths to sample: the configured one, or every length up to `n`.
fn lengths(ctx: &Context, min: usize) -> Vec<usize> {
    match ctx.cfg.witt_length {
        Some(m) => vec![m.max(min)],
        None => (min..=(ctx.cfg.n as usize).max(min)).collect(),
    }
}

pub fn ring_hom(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    for m in lengths(ctx, 1) {
        let alg = ctx.algebra(ctx.cfg.n.max(m as u32))?;
        let ring = ctx.center_ring(&alg);
        let mut s = Sampler::new(ctx.cfg.seed, m as u64);
        for _ in 0..ctx.cfg.samples {
            let z = s.witt(&ring, m, ctx.cfg.degree, SAMPLE_TERMS)?;
            let w = s.witt(&ring, m, ctx.cfg.degree, SAMPLE_TERMS)?;
            let texts = || vec![z.to_string(), w.to_string()];
            rec.record("phi-add", texts, settle(checks::phi_add(ctx, &z, &w))?);
            rec.record("phi-mul", texts, settle(checks::phi_mul(ctx, &z, &w))?);
        }
    }
    Ok(())
}

pub fn central(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    for m in lengths(ctx, 1) {
        let alg = ctx.algebra(ctx.cfg.n.max(m as u32))?;
        let ring = ctx.center_ring(&alg);
        let mut s = Sampler::new(ctx.cfg.seed, m as u64);
        for _ in 0..ctx.cfg.samples {
            let z = s.witt(&ring, m, ctx.cfg.degree, SAMPLE_TERMS)?;
            rec.record("phi-central", || vec![z.to_string()], settle(checks::phi_central(ctx, &z))?);
        }
    }
    Ok(())
}

pub fn compat(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    for m in lengths(ctx, 2) {
        let alg = ctx.algebra(ctx.cfg.n.max(m as u32))?;
        let ring = ctx.center_ring(&alg);
        let mut s = Sampler::new(ctx.cfg.seed, m as u64);
        for _ in 0..ctx.cfg.samples {
            let z = s.witt(&ring, m, ctx.cfg.degree, SAMPLE_TERMS)?;
            rec.record("phi-frobenius", || vec![z.to_string()], settle(checks::phi_frobenius(ctx, &z))?);
            let y = s.witt(&ring, m - 1, ctx.cfg.degree, SAMPLE_TERMS)?;
            rec.record("phi-verschiebung", || vec![y.to_string()], settle(checks::phi_verschiebung(ctx, &y))?);
        }
    }
    Ok(())
}
