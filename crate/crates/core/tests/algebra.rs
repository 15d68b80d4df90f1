use proptest::prelude::*;

use wittquant::chainring::{PModulus, ZpnMatrix};
use wittquant::polyring::{std_poisson, PolyRing, Polynomial};
use wittquant::quantization::{deformation_bracket, WeylAlgebra};
use wittquant::witt::WittVector;

fn text(vars: (&'static str, &'static str), max_coef: u32) -> impl Strategy<Value = String> {
    proptest::collection::vec((1..max_coef, 0u32..3, 0u32..3), 1..4).prop_map(move |terms| {
        terms
            .iter()
            .map(|(c, i, j)| format!("{c}*{}^{i}*{}^{j}", vars.0, vars.1))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

fn weyl() -> impl Strategy<Value = String> {
    text(("x", "y"), 9)
}

fn center() -> impl Strategy<Value = String> {
    text(("u", "v"), 3)
}

fn witt2() -> impl Strategy<Value = String> {
    (center(), center()).prop_map(|(a, b)| format!("[{a}, {b}]"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weyl_multiplication_is_associative(f in weyl(), g in weyl(), h in weyl()) {
        let a = WeylAlgebra::new(3, 2, 1).unwrap();
        let (f, g, h) = (a.parse(&f, 2).unwrap(), a.parse(&g, 2).unwrap(), a.parse(&h, 2).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
    }

    #[test]
    fn phi_is_additive_and_multiplicative(z in witt2(), w in witt2()) {
        let a = WeylAlgebra::new(3, 2, 1).unwrap();
        let ring = a.center_ring();
        let z = WittVector::parse(&ring, &z).unwrap();
        let w = WittVector::parse(&ring, &w).unwrap();
        let (pz, pw) = (a.phi_map(&z).unwrap(), a.phi_map(&w).unwrap());
        prop_assert_eq!(a.phi_map(&z.add(&w).unwrap()).unwrap(), pz.add(&pw).unwrap());
        prop_assert_eq!(a.phi_map(&z.mul(&w).unwrap()).unwrap(), pz.mul(&pw).unwrap());
        // images are central
        prop_assert!(pz.commutator(&a.parse("x", 2).unwrap()).unwrap().is_zero());
        prop_assert!(pz.commutator(&a.parse("y", 2).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn deformation_bracket_is_the_symplectic_bracket(f in center(), g in center()) {
        let a = WeylAlgebra::new(3, 2, 1).unwrap();
        let ring = a.center_ring();
        let (f, g) = (Polynomial::parse(&ring, &f).unwrap(), Polynomial::parse(&ring, &g).unwrap());
        let lhs = deformation_bracket(&a.lift_center_poly(&f, 1).unwrap(), &a.lift_center_poly(&g, 1).unwrap()).unwrap();
        prop_assert_eq!(lhs, std_poisson(&f, &g).unwrap());
    }

    #[test]
    fn howell_form_is_idempotent(rows in proptest::collection::vec(proptest::collection::vec(0i64..27, 3), 1..4)) {
        let m = ZpnMatrix::from_rows(PModulus::new(3, 3).unwrap(), 3, &rows).unwrap();
        let h = m.howell_form();
        prop_assert_eq!(h.howell_form(), h);
    }
}

#[test]
fn witt_ring_axioms_over_polynomials() {
    let ring = PolyRing::symplectic(1, PModulus::field(3).unwrap());
    let z = WittVector::parse(&ring, "[u + 1, v^2]").unwrap();
    let w = WittVector::parse(&ring, "[2*v, u*v]").unwrap();
    let t = WittVector::parse(&ring, "[u, 1]").unwrap();
    assert_eq!(z.add(&w).unwrap(), w.add(&z).unwrap());
    assert_eq!(z.mul(&w).unwrap(), w.mul(&z).unwrap());
    let lhs = z.mul(&w.add(&t).unwrap()).unwrap();
    let rhs = z.mul(&w).unwrap().add(&z.mul(&t).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
    assert!(z.add(&z.neg()).unwrap().is_zero());
}
