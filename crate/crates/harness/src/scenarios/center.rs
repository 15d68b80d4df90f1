use crate::checks::{self, settle, CenterModP, Context, PhiOntoCenter, QuotientCenter};
use crate::error::Result;
use crate::spans;

use super::Recorder;

/// Every level `L ≤ n`: `Z(A_L) mod p` against `Z_1^(p^(L-1))`, and `Z(A_L)`
/// against the `φ_L` images.
pub fn structure(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    for level in 1..=ctx.cfg.n {
        mod_p_rows(ctx, level, rec)?;
        let onto = PhiOntoCenter::new(ctx, level)?;
        for m in [&onto.center, &onto.phi] {
            for f in spans::elements(&onto.alg, level, &onto.idx, m)? {
                rec.record("phi-onto-center", || vec![f.to_text()], settle(onto.check(&f))?);
            }
        }
    }
    Ok(())
}

pub(crate) fn mod_p_rows(ctx: &Context, level: u32, rec: &mut Recorder) -> Result<()> {
    let c = CenterModP::new(ctx, level)?;
    for m in [c.reduced.matrix(), c.expected.matrix()] {
        for f in spans::elements(&c.alg, 1, &c.idx, m)? {
            rec.record("center-mod-p", || vec![f.to_text()], settle(c.check(&f))?);
        }
    }
    Ok(())
}

/// The top level only: each center basis element checked by commutators and
/// by its residue, then the spans compared.
pub fn shrink(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let n = ctx.cfg.n;
    let alg = ctx.algebra(n)?;
    let (idx, basis) = alg.center_basis(n, checks::center_cap(ctx))?;
    for f in spans::elements(&alg, n, &idx, &basis)? {
        rec.record("center-element", || vec![f.to_text()], settle(checks::center_element(&f))?);
    }
    mod_p_rows(ctx, n, rec)
}

pub fn quotient(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let q = QuotientCenter::new(ctx)?;
    let n = q.n;
    for m in [&q.center, &q.phi, &q.center_p] {
        for f in spans::elements(&q.alg, n, &q.idx, m)? {
            rec.record("quotient-center", || vec![f.to_text()], settle(q.check_center(&f))?);
        }
    }
    for m in [&q.center_p, &q.phi_v] {
        for f in spans::elements(&q.alg, n, &q.idx, m)? {
            rec.record("quotient-center-p", || vec![f.to_text()], settle(q.check_p_part(&f))?);
        }
    }
    for m in [&q.residue_center, &q.residue_b] {
        for f in spans::elements(&q.alg, 1, &q.idx, m)? {
            rec.record("quotient-residue", || vec![f.to_text()], settle(q.check_residue(&f))?);
        }
    }
    Ok(())
}
