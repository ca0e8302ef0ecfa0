use crate::ffield::{poly, FieldOps, Gf, SmallField};

/// A reduced fraction num/den of polynomials in x_0 over F_{q²}, with a monic
/// denominator. Zero is represented as 0/1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn {
    pub num: Vec<Gf>,
    pub den: Vec<Gf>,
}

impl RatFn {
    pub fn zero() -> RatFn {
        RatFn { num: Vec::new(), den: vec![Gf::ONE] }
    }

    pub fn one() -> RatFn {
        RatFn::constant(Gf::ONE)
    }

    pub fn constant(c: Gf) -> RatFn {
        if c.is_zero() {
            RatFn::zero()
        } else {
            RatFn { num: vec![c], den: vec![Gf::ONE] }
        }
    }

    pub fn poly(f: &SmallField, mut num: Vec<Gf>) -> RatFn {
        poly::trim(f, &mut num);
        RatFn { num, den: vec![Gf::ONE] }
    }

    /// The function x_0.
    pub fn x() -> RatFn {
        RatFn { num: vec![Gf::ZERO, Gf::ONE], den: vec![Gf::ONE] }
    }

    /// Builds num/den in lowest terms. `den` must be nonzero.
    pub fn new(f: &SmallField, mut num: Vec<Gf>, mut den: Vec<Gf>) -> RatFn {
        poly::trim(f, &mut num);
        poly::trim(f, &mut den);
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return RatFn::zero();
        }
        if den.len() > 1 {
            let g = poly::gcd(f, &num, &den);
            if g.len() > 1 {
                num = poly::divrem(f, &num, &g).0;
                den = poly::divrem(f, &den, &g).0;
            }
        }
        let lead = *den.last().unwrap();
        if lead != Gf::ONE {
            let li = f.inv(lead).unwrap();
            num = poly::scale(f, &num, &li);
            den = poly::scale(f, &den, &li);
        }
        RatFn { num, den }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.len() == 1
    }

    pub fn add(&self, f: &SmallField, b: &RatFn) -> RatFn {
        if self.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return self.clone();
        }
        if self.den == b.den {
            let num = poly::add(f, &self.num, &b.num);
            if self.den.len() == 1 {
                return RatFn { num, den: self.den.clone() };
            }
            return RatFn::new(f, num, self.den.clone());
        }
        let num = poly::add(f, &poly::mul(f, &self.num, &b.den), &poly::mul(f, &b.num, &self.den));
        RatFn::new(f, num, poly::mul(f, &self.den, &b.den))
    }

    pub fn neg(&self, f: &SmallField) -> RatFn {
        RatFn { num: self.num.iter().map(|&c| f.neg(c)).collect(), den: self.den.clone() }
    }

    pub fn sub(&self, f: &SmallField, b: &RatFn) -> RatFn {
        self.add(f, &b.neg(f))
    }

    pub fn scale(&self, f: &SmallField, c: Gf) -> RatFn {
        if c.is_zero() {
            return RatFn::zero();
        }
        RatFn { num: poly::scale(f, &self.num, &c), den: self.den.clone() }
    }

    pub fn mul(&self, f: &SmallField, b: &RatFn) -> RatFn {
        if self.is_zero() || b.is_zero() {
            return RatFn::zero();
        }
        if self.den.len() == 1 && b.den.len() == 1 {
            return RatFn { num: poly::mul(f, &self.num, &b.num), den: vec![Gf::ONE] };
        }
        RatFn::new(f, poly::mul(f, &self.num, &b.num), poly::mul(f, &self.den, &b.den))
    }

    pub fn inv(&self, f: &SmallField) -> Option<RatFn> {
        if self.is_zero() {
            return None;
        }
        Some(RatFn::new(f, self.den.clone(), self.num.clone()))
    }

    /// The substitution x_0 ↦ 1/x_0.
    pub fn reciprocal_arg(&self, f: &SmallField) -> RatFn {
        if self.is_zero() {
            return RatFn::zero();
        }
        let dn = self.num.len() - 1;
        let dd = self.den.len() - 1;
        let mut num: Vec<Gf> = self.num.iter().rev().copied().collect();
        let mut den: Vec<Gf> = self.den.iter().rev().copied().collect();
        if dd >= dn {
            let mut v = vec![Gf::ZERO; dd - dn];
            v.extend(num);
            num = v;
        } else {
            let mut v = vec![Gf::ZERO; dn - dd];
            v.extend(den);
            den = v;
        }
        RatFn::new(f, num, den)
    }

    /// Value at a point of any field containing F_{q²}; `None` at a pole.
    pub fn eval<F: FieldOps>(&self, field: &F, x: &F::Elem) -> Option<F::Elem> {
        let n = horner(field, &self.num, x);
        if self.den.len() == 1 {
            return Some(field.scale(&n, self.den[0]));
        }
        let d = horner(field, &self.den, x);
        field.inv(&d).map(|di| field.mul(&n, &di))
    }

    pub fn degree_bound(&self) -> usize {
        self.num.len().max(self.den.len())
    }
}

pub(crate) fn horner<F: FieldOps>(field: &F, p: &[Gf], x: &F::Elem) -> F::Elem {
    let mut acc = field.zero();
    for &c in p.iter().rev() {
        acc = field.mul(&acc, x);
        if !c.is_zero() {
            acc = field.add(&acc, &field.from_coef(c));
        }
    }
    acc
}
