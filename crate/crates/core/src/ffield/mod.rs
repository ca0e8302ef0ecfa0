//! Finite fields: table-driven fields up to 2^16 elements, polynomial-basis
//! extensions of arbitrary degree on top of them, and univariate polynomial
//! utilities (irreducibility, root finding, Artin-Schreier equations).

mod ext;
pub mod poly;
mod small;

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use rand::RngCore;
use thiserror::Error;

pub use ext::ExtField;
pub use poly::UniPoly;
pub use small::{is_prime, prime_factors, prime_power, Gf, SmallField, MAX_TABLE_ORDER};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree list is empty")]
    EmptyChain,
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {0} is too large for table arithmetic")]
    TooLarge(u64),
    #[error("no irreducible polynomial found")]
    NoIrreducible,
    #[error("the zero polynomial has no well-defined root set")]
    ZeroPolynomial,
    #[error("equation T^q + T = c has no solution in this field")]
    NoSolution,
    #[error("field handle is not F_(q^2) for q = {0}")]
    WrongField(u64),
    #[error("random search exceeded {0} attempts")]
    RetryCap(usize),
}

/// Arithmetic shared by every field representation in the crate.
///
/// Each field carries a distinguished coefficient field (F_{q²} in practice):
/// `from_coef` embeds it and `coords` decomposes an element over it.
pub trait FieldOps {
    type Elem: Clone + PartialEq + Eq + Hash + Ord + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn characteristic(&self) -> u32;
    fn order(&self) -> BigUint;
    fn random(&self, rng: &mut dyn RngCore) -> Self::Elem;
    fn from_coef(&self, c: Gf) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, c: Gf) -> Self::Elem;
    fn coords(&self, a: &Self::Elem) -> Vec<Gf>;

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn pow_u64(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.square(&b);
            }
        }
        r
    }

    fn pow_big(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut r = self.one();
        for i in (0..e.bits()).rev() {
            r = self.square(&r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }
}

/// The set Ω = {α ∈ F_{q²} : α^q + α = 0}, in increasing element order.
pub fn omega_set(fq2: &SmallField, q: u64) -> Result<Vec<Gf>, FieldError> {
    if fq2.size() as u64 != q * q {
        return Err(FieldError::WrongField(q));
    }
    Ok(fq2
        .elements()
        .filter(|&a| fq2.add(fq2.pow(a, q), a).is_zero())
        .collect())
}

/// Builds the field chain F_p extended by `degrees` (table based).
pub fn field_make(p: u32, degrees: &[u32]) -> Result<SmallField, FieldError> {
    SmallField::make(p, degrees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn small_moduli_are_the_first_irreducibles() {
        let f4 = field_make(2, &[2]).unwrap();
        assert_eq!(f4.moduli()[0], vec![1, 1, 1]);
        let f9 = field_make(3, &[2]).unwrap();
        assert_eq!(f9.moduli()[0], vec![1, 0, 1]);
        assert_eq!(field_make(4, &[1]).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(field_make(2, &[2, 0]).unwrap_err(), FieldError::ZeroDegree);
    }

    #[test]
    fn construction_is_reproducible() {
        let a = field_make(2, &[2, 2]).unwrap();
        let b = field_make(2, &[2, 2]).unwrap();
        assert!(a == b);
        for x in a.elements() {
            for y in a.elements() {
                assert_eq!(a.mul(x, y), b.mul(x, y));
            }
        }
    }

    fn exhaustive_axioms(f: &SmallField) {
        let n = f.size();
        assert!(n <= 1024);
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), Gf::ZERO);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Gf::ONE);
            }
            let p = f.p() as u64;
            assert_eq!(f.pow(a, n as u64), a);
            for b in f.elements().step_by(7) {
                let lhs = f.pow(f.add(a, b), p);
                let rhs = f.add(f.pow(a, p), f.pow(b, p));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn field_axioms_on_the_chains_used() {
        for (p, d) in [(2u32, vec![2u32]), (3, vec![2]), (2, vec![2, 2]), (5, vec![2]), (2, vec![3, 2]), (11, vec![2]), (3, vec![2, 3])] {
            let f = field_make(p, &d).unwrap();
            exhaustive_axioms(&f);
        }
    }

    #[test]
    fn random_triples_associate_and_distribute() {
        let f = field_make(3, &[2, 3]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let a = FieldOps::random(&f, &mut rng);
            let b = FieldOps::random(&f, &mut rng);
            let c = FieldOps::random(&f, &mut rng);
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        }
    }

    #[test]
    fn subfields_embed_as_prefix_integers() {
        let f9 = field_make(3, &[2]).unwrap();
        let f729 = f9.extension(3).unwrap();
        for a in f9.elements() {
            for b in f9.elements() {
                assert_eq!(f9.mul(a, b), f729.mul(a, b));
                assert_eq!(f9.add(a, b), f729.add(a, b));
            }
        }
        assert_eq!(f729.subfield_elements(9), f9.elements().collect::<Vec<_>>());
        assert_eq!(f729.digits(Gf(9 * 9 * 2 + 9 * 4 + 7)), vec![Gf(7), Gf(4), Gf(2)]);
    }

    #[test]
    fn omega_has_q_elements() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11] {
            let f = SmallField::for_q_squared(q).unwrap();
            let om = omega_set(&f, q).unwrap();
            assert_eq!(om.len() as u64, q);
            assert_eq!(om[0], Gf::ZERO);
            for &a in &om {
                for &b in &om {
                    assert!(om.contains(&f.add(a, b)));
                }
            }
        }
        let f4 = SmallField::for_q_squared(2).unwrap();
        assert_eq!(omega_set(&f4, 2).unwrap(), vec![Gf(0), Gf(1)]);
        let f9 = SmallField::for_q_squared(3).unwrap();
        // z² + 1 is the modulus, so z and −z = 2z square to −1.
        assert_eq!(omega_set(&f9, 3).unwrap(), vec![Gf(0), Gf(3), Gf(6)]);
        assert!(omega_set(&f9, 2).is_err());
    }
}
