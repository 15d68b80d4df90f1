//! The fixed list of scenarios.

use crate::checks::Context;
use crate::error::{HarnessError, Result};
use crate::report::Verdict;
use crate::scenarios::{self, Recorder};

pub struct Defaults {
    pub degree: u32,
    pub samples: usize,
    pub cap: Option<u32>,
    pub ideal: Option<&'static [&'static str]>,
}

pub struct Entry {
    pub name: &'static str,
    /// The statement being checked, as a formula.
    pub statement: &'static str,
    /// The verdict a correct build produces.
    pub expected: Verdict,
    pub defaults: Defaults,
    pub run: fn(&Context, &mut Recorder) -> Result<()>,
}

const fn defaults(degree: u32, samples: usize, cap: Option<u32>) -> Defaults {
    Defaults {
        degree,
        samples,
        cap,
        ideal: None,
    }
}

pub static REGISTRY: &[Entry] = &[
    Entry {
        name: "phi-ring-hom",
        statement: "φ_m(z) = Σ p^(i-1) z̃_i^(p^(m-i)) is additive and multiplicative on W_m(Z_1)",
        expected: Verdict::Pass,
        defaults: defaults(2, 100, None),
        run: scenarios::phi::ring_hom,
    },
    Entry {
        name: "phi-central",
        statement: "φ_m(W_m(Z_1)) lies in the center of A_m",
        expected: Verdict::Pass,
        defaults: defaults(2, 100, None),
        run: scenarios::phi::central,
    },
    Entry {
        name: "phi-compat",
        statement: "φ_(m-1) F = r φ_m and φ_m V = v φ_(m-1)",
        expected: Verdict::Pass,
        defaults: defaults(2, 100, None),
        run: scenarios::phi::compat,
    },
    Entry {
        name: "eq1",
        statement: "(1/p^m)[φ_m(z)~, w̃] mod p = Σ z_i^(p^(m-i)-1) {z_i, w}",
        expected: Verdict::Pass,
        defaults: defaults(2, 50, None),
        run: scenarios::bracket::eq1,
    },
    Entry {
        name: "center-structure",
        statement: "Z_(m+1) mod p = Z_1^(p^m), and φ_(m+1) maps W_(m+1)(Z_1) onto Z_(m+1)",
        expected: Verdict::Pass,
        defaults: defaults(0, 0, Some(9)),
        run: scenarios::center::structure,
    },
    Entry {
        name: "prop-center",
        statement: "Z(R/pR) = B = O/m^(p^n) implies Z(R) = φ_n(W_n(B)) and Z(R) ∩ pR = φ_n(V W_(n-1)(B))",
        expected: Verdict::Pass,
        defaults: Defaults {
            degree: 0,
            samples: 0,
            cap: Some(9),
            ideal: Some(&["u"]),
        },
        run: scenarios::center::quotient,
    },
    Entry {
        name: "lemma-muh",
        statement: "Σ z_i^(p^(n-i)-1) dz_i = 0 in Ω_B implies z_i ∈ B^p + m̄^(p^i) B",
        expected: Verdict::Pass,
        defaults: Defaults {
            degree: 2,
            samples: 200,
            cap: None,
            ideal: Some(&["u"]),
        },
        run: scenarios::forms::muh,
    },
    Entry {
        name: "cartier",
        statement: "C⁻¹(f dg) = f^p g^(p-1) dg is closed and additive in dg modulo exact forms",
        expected: Verdict::Pass,
        defaults: defaults(3, 50, None),
        run: scenarios::forms::cartier,
    },
    Entry {
        name: "lemma-frob",
        statement: "F^(n-1)(dm) ⊂ F^(n-1)(m)Ω implies m̄ = (m̄ ∩ S^p) S",
        expected: Verdict::Pass,
        defaults: defaults(1, 100, None),
        run: scenarios::forms::frob,
    },
    Entry {
        name: "remark-counterexample",
        statement: "the preimage I of x̄^p A_1 in A_2 satisfies I ≠ (I ∩ Z(A)) A",
        expected: Verdict::Fail,
        defaults: Defaults {
            degree: 0,
            samples: 0,
            cap: Some(12),
            ideal: Some(&["u"]),
        },
        run: scenarios::ideals::remark,
    },
    Entry {
        name: "theorem-flat-ideal",
        statement: "a flat two-sided ideal satisfies I = (Z(A) ∩ I) A",
        expected: Verdict::Pass,
        defaults: defaults(1, 20, None),
        run: scenarios::ideals::flat,
    },
    Entry {
        name: "center-shrink",
        statement: "Z(A_n) mod p = Z_1^(p^(n-1))",
        expected: Verdict::Pass,
        defaults: defaults(0, 0, Some(12)),
        run: scenarios::center::shrink,
    },
    Entry {
        name: "deformation-vs-std-poisson",
        statement: "{ā, b̄} = (1/p)[a, b] mod p equals the symplectic bracket on Z_1, with {x̄^p, ȳ^p} = 1",
        expected: Verdict::Pass,
        defaults: defaults(2, 50, None),
        run: scenarios::bracket::deformation,
    },
];

pub fn lookup(name: &str) -> Result<&'static Entry> {
    REGISTRY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| HarnessError::UnknownScenario(name.to_string()))
}

pub fn names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|e| e.name)
}
