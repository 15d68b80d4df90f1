use crate::checks::{self, settle, Context};
use crate::error::Result;
use crate::sampling::Sampler;

use super::{Recorder, SAMPLE_TERMS};

pub fn eq1(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let m = ctx.cfg.witt_length.unwrap_or(ctx.cfg.n as usize);
    let alg = ctx.algebra(ctx.cfg.n.max(m as u32 + 1))?;
    let ring = ctx.center_ring(&alg);
    let mut s = Sampler::new(ctx.cfg.seed, 0);
    for _ in 0..ctx.cfg.samples {
        let z = s.witt(&ring, m, ctx.cfg.degree, SAMPLE_TERMS)?;
        let w = s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS);
        rec.record("eq1", || vec![z.to_string(), w.to_string()], settle(checks::eq1(ctx, &z, &w))?);
    }
    Ok(())
}

pub fn deformation(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    rec.record("bracket-orientation", Vec::new, settle(checks::bracket_orientation(ctx))?);
    let alg = ctx.algebra(ctx.cfg.n.max(2))?;
    let ring = ctx.center_ring(&alg);
    let mut s = Sampler::new(ctx.cfg.seed, 0);
    for _ in 0..ctx.cfg.samples {
        let f = s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS);
        let g = s.poly(&ring, ctx.cfg.degree, SAMPLE_TERMS);
        rec.record(
            "bracket-agreement",
            || vec![f.to_string(), g.to_string()],
            settle(checks::bracket_agreement(ctx, &f, &g))?,
        );
        let top = ctx.p() as u32 * ctx.cfg.degree;
        let h1 = s.weyl(&alg, 2, top, SAMPLE_TERMS)?;
        let h2 = s.weyl(&alg, 2, top, SAMPLE_TERMS)?;
        rec.record(
            "lift-independence",
            || vec![f.to_string(), g.to_string(), h1.to_text(), h2.to_text()],
            settle(checks::lift_independence(ctx, &f, &g, &h1, &h2))?,
        );
    }
    Ok(())
}
