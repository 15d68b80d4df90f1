//! Seeded random elements.
//!
//! Every sampler draws from a ChaCha8 stream fixed by the config seed, so a
//! scenario sees the same elements on every run. The distributions:
//!
//! - term count: uniform in `1..=max_terms`;
//! - monomial: total degree uniform in `0..=max_degree`, spread over the
//!   variables one unit at a time, each unit going to a uniformly chosen
//!   variable;
//! - coefficient: uniform over the residues of the coefficient ring, zero
//!   included (repeated monomials are summed).
//!
//! Witt vectors draw each component independently with the polynomial
//! distribution.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wittquant::polyring::{PolyRing, Polynomial};
use wittquant::quantization::{WeylAlgebra, WeylElement};
use wittquant::witt::WittVector;
use wittquant::Result;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    /// A stream for `seed`; `stream` separates independent uses of one seed.
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.rng.gen_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen()
    }

    pub fn exponents(&mut self, nvars: usize, max_degree: u32) -> Vec<u32> {
        let mut e = vec![0u32; nvars];
        let d = self.rng.gen_range(0..=max_degree);
        for _ in 0..d {
            e[self.rng.gen_range(0..nvars)] += 1;
        }
        e
    }

    pub fn poly(&mut self, ring: &Arc<PolyRing>, max_degree: u32, max_terms: usize) -> Polynomial {
        let q = ring.modulus().order();
        let terms = self.rng.gen_range(1..=max_terms.max(1));
        let v: Vec<_> = (0..terms)
            .map(|_| {
                let e = self.exponents(ring.nvars(), max_degree);
                (e, self.rng.gen_range(0..q))
            })
            .collect();
        Polynomial::from_terms(ring, v)
    }

    pub fn witt(
        &mut self,
        ring: &Arc<PolyRing>,
        length: usize,
        max_degree: u32,
        max_terms: usize,
    ) -> Result<WittVector<Arc<PolyRing>>> {
        let comps = (0..length).map(|_| self.poly(ring, max_degree, max_terms)).collect();
        WittVector::with_prime(ring.clone(), ring.p(), comps)
    }

    pub fn weyl(
        &mut self,
        alg: &Arc<WeylAlgebra>,
        level: u32,
        max_degree: u32,
        max_terms: usize,
    ) -> Result<WeylElement> {
        let q = alg.level_modulus(level)?.order();
        let terms = self.rng.gen_range(1..=max_terms.max(1));
        let mut out = alg.zero(level)?;
        for _ in 0..terms {
            let e = self.exponents(2 * alg.r(), max_degree);
            let c = self.rng.gen_range(0..q);
            out = out.add(&alg.monomial(level, &e, c as i128)?)?;
        }
        Ok(out)
    }
}
