//! The minimal commutative-ring interface shared by Witt vectors over
//! different coefficient rings.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// A handle to a commutative ring; elements are separate values.
pub trait CoeffRing: Clone + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;

    /// `Some(p)` when the ring has prime characteristic `p`.
    fn char_p(&self) -> Option<u64>;

    /// Whether multiplication by every nonzero integer is injective.
    fn torsion_free(&self) -> bool;

    /// The prime `p` of a ring of `p`-power characteristic.
    fn residue_char(&self) -> Option<u64> {
        self.char_p()
    }

    fn same_ring(&self, other: &Self) -> bool;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn pth_power(&self, a: &Self::Elem, p: u64) -> Self::Elem {
        self.pow(a, p)
    }

    /// Image of an integer; double-and-add unless overridden.
    fn from_int(&self, c: &BigInt) -> Self::Elem {
        let mut acc = self.zero();
        let one = self.one();
        let mag = c.abs();
        for i in (0..mag.bits()).rev() {
            acc = self.add(&acc, &acc);
            if mag.bit(i) {
                acc = self.add(&acc, &one);
            }
        }
        if c.is_negative() {
            self.neg(&acc)
        } else {
            acc
        }
    }
}

/// The integers, as the torsion-free reference ring.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

impl CoeffRing for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn char_p(&self) -> Option<u64> {
        None
    }
    fn torsion_free(&self) -> bool {
        true
    }
    fn same_ring(&self, _: &Self) -> bool {
        true
    }
    fn from_int(&self, c: &BigInt) -> BigInt {
        c.clone()
    }
}

/// `Z/p^n` as a coefficient ring with `u64` elements.
impl CoeffRing for crate::chainring::PModulus {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.order()
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        crate::chainring::PModulus::add(self, *a, *b)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        crate::chainring::PModulus::mul(self, *a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        crate::chainring::PModulus::neg(self, *a)
    }
    fn char_p(&self) -> Option<u64> {
        (self.n() == 1).then_some(self.p())
    }
    fn residue_char(&self) -> Option<u64> {
        Some(self.p())
    }
    fn torsion_free(&self) -> bool {
        false
    }
    fn same_ring(&self, other: &Self) -> bool {
        self == other
    }
    fn from_int(&self, c: &BigInt) -> u64 {
        let q = BigInt::from(self.order());
        let r = ((c % &q) + &q) % &q;
        r.iter_u64_digits().next().unwrap_or(0)
    }
}
