use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::RngCore;

use super::poly;
use super::{FieldOps, Gf, SmallField};

const KARATSUBA_MIN: usize = 24;

/// The extension base[z]/(f) of a table field by a monic irreducible f of
/// arbitrary degree D. Elements are coefficient vectors of length exactly D.
#[derive(Clone)]
pub struct ExtField {
    base: Arc<SmallField>,
    modulus: Vec<Gf>,
    order: BigUint,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtField(order {}^{})", self.base.size(), self.degree())
    }
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        *self.base == *other.base && self.modulus == other.modulus
    }
}

impl ExtField {
    /// `modulus` must be monic and irreducible over `base`; this is not
    /// rechecked here.
    pub fn new(base: Arc<SmallField>, modulus: Vec<Gf>) -> ExtField {
        assert!(modulus.len() >= 2, "extension degree must be positive");
        assert_eq!(*modulus.last().unwrap(), Gf::ONE, "modulus must be monic");
        let d = modulus.len() - 1;
        let order = BigUint::from(base.size()).pow(d as u32);
        ExtField { base, modulus, order }
    }

    pub fn base(&self) -> &Arc<SmallField> {
        &self.base
    }

    pub fn modulus(&self) -> &[Gf] {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// The class of z, a root of the modulus.
    pub fn generator(&self) -> Vec<Gf> {
        let mut v = vec![Gf::ZERO; self.degree()];
        if self.degree() == 1 {
            v[0] = self.base.neg(self.modulus[0]);
        } else {
            v[1] = Gf::ONE;
        }
        v
    }

    fn pad(&self, mut v: Vec<Gf>) -> Vec<Gf> {
        v.resize(self.degree(), Gf::ZERO);
        v
    }

    fn product(&self, a: &[Gf], b: &[Gf]) -> Vec<Gf> {
        let f = &*self.base;
        let n = a.len();
        if n >= KARATSUBA_MIN {
            return poly::mul(f, a, b);
        }
        let mut r = vec![Gf::ZERO; 2 * n - 1];
        if f.p() == 2 {
            for (i, &x) in a.iter().enumerate() {
                if let Some(lx) = f.log(x) {
                    for (j, &y) in b.iter().enumerate() {
                        if let Some(ly) = f.log(y) {
                            r[i + j].0 ^= f.exp(lx + ly).0;
                        }
                    }
                }
            }
        } else {
            for (i, &x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, &y) in b.iter().enumerate() {
                    r[i + j] = f.add(r[i + j], f.mul(x, y));
                }
            }
        }
        r
    }

    fn reduce(&self, mut r: Vec<Gf>) -> Vec<Gf> {
        let f = &*self.base;
        let d = self.degree();
        for i in (d..r.len()).rev() {
            let c = r[i];
            if c.is_zero() {
                continue;
            }
            for j in 0..d {
                let m = self.modulus[j];
                if !m.is_zero() {
                    r[i - d + j] = f.sub(r[i - d + j], f.mul(c, m));
                }
            }
        }
        r.truncate(d);
        self.pad(r)
    }

    /// x ↦ x^{|base|}, the Frobenius of the extension over its base.
    pub fn frobenius(&self, a: &[Gf]) -> Vec<Gf> {
        self.pow_u64(&a.to_vec(), self.base.size() as u64)
    }

    /// Trace down to the base field: Σ_{j<D} a^{|base|^j}.
    pub fn trace_to_base(&self, a: &[Gf]) -> Gf {
        let mut acc = a.to_vec();
        let mut cur = a.to_vec();
        for _ in 1..self.degree() {
            cur = self.frobenius(&cur);
            acc = FieldOps::add(self, &acc, &cur);
        }
        debug_assert!(acc[1..].iter().all(|c| c.is_zero()));
        acc[0]
    }
}

impl FieldOps for ExtField {
    type Elem = Vec<Gf>;

    fn zero(&self) -> Vec<Gf> {
        vec![Gf::ZERO; self.degree()]
    }
    fn one(&self) -> Vec<Gf> {
        let mut v = self.zero();
        v[0] = Gf::ONE;
        v
    }
    fn is_zero(&self, a: &Vec<Gf>) -> bool {
        a.iter().all(|c| c.is_zero())
    }
    fn add(&self, a: &Vec<Gf>, b: &Vec<Gf>) -> Vec<Gf> {
        a.iter().zip(b).map(|(&x, &y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Vec<Gf>, b: &Vec<Gf>) -> Vec<Gf> {
        a.iter().zip(b).map(|(&x, &y)| self.base.sub(x, y)).collect()
    }
    fn neg(&self, a: &Vec<Gf>) -> Vec<Gf> {
        a.iter().map(|&x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Vec<Gf>, b: &Vec<Gf>) -> Vec<Gf> {
        let p = self.product(a, b);
        self.reduce(p)
    }
    fn inv(&self, a: &Vec<Gf>) -> Option<Vec<Gf>> {
        if self.is_zero(a) {
            return None;
        }
        let f = &*self.base;
        let mut at = a.clone();
        poly::trim(f, &mut at);
        let (g, s) = poly::gcd_inverse(f, &at, &self.modulus);
        debug_assert_eq!(g, vec![Gf::ONE]);
        Some(self.pad(s))
    }
    fn characteristic(&self) -> u32 {
        self.base.p()
    }
    fn order(&self) -> BigUint {
        self.order.clone()
    }
    fn random(&self, rng: &mut dyn RngCore) -> Vec<Gf> {
        (0..self.degree())
            .map(|_| Gf((rng.next_u32() % self.base.size()) as u16))
            .collect()
    }
    fn from_coef(&self, c: Gf) -> Vec<Gf> {
        let mut v = self.zero();
        v[0] = c;
        v
    }
    fn scale(&self, a: &Vec<Gf>, c: Gf) -> Vec<Gf> {
        a.iter().map(|&x| self.base.mul(x, c)).collect()
    }
    fn coords(&self, a: &Vec<Gf>) -> Vec<Gf> {
        a.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::poly::irreducible_random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn matches_table_field_of_same_order() {
        // F_16 as a degree-2 extension of F_4 with the same minimal modulus.
        let f4 = Arc::new(SmallField::for_q_squared(2).unwrap());
        let f16 = f4.extension(2).unwrap();
        let m: Vec<Gf> = f16.moduli()[1].iter().map(|&c| Gf(c)).collect();
        let e = ExtField::new(f4.clone(), m);
        let to_vec = |a: Gf| f16.digits(a);
        for a in f16.elements() {
            for b in f16.elements() {
                assert_eq!(e.mul(&to_vec(a), &to_vec(b)), to_vec(f16.mul(a, b)));
            }
            if !a.is_zero() {
                assert_eq!(e.inv(&to_vec(a)).unwrap(), to_vec(f16.inv(a).unwrap()));
            }
        }
    }

    #[test]
    fn large_extension_axioms() {
        let f16 = Arc::new(SmallField::for_q_squared(4).unwrap());
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let m = irreducible_random(&*f16, 37, &mut rng).unwrap().coeffs;
        let e = ExtField::new(f16.clone(), m);
        for _ in 0..20 {
            let a = e.random(&mut rng);
            let b = e.random(&mut rng);
            let c = e.random(&mut rng);
            assert_eq!(e.mul(&e.mul(&a, &b), &c), e.mul(&a, &e.mul(&b, &c)));
            assert_eq!(e.mul(&a, &e.add(&b, &c)), e.add(&e.mul(&a, &b), &e.mul(&a, &c)));
            if !e.is_zero(&a) {
                assert_eq!(e.mul(&a, &e.inv(&a).unwrap()), e.one());
            }
            // Frobenius over F_2 is additive.
            let s = e.add(&a, &b);
            assert_eq!(e.square(&s), e.add(&e.square(&a), &e.square(&b)));
        }
        // z^{|F|} = z.
        let z = e.generator();
        assert_eq!(e.pow_big(&z, &e.order()), z);
        // The trace of any element lands in the base field (asserted inside).
        e.trace_to_base(&z);
    }
}
