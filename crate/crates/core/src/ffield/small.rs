use std::fmt;

use num_bigint::BigUint;
use rand::RngCore;

use super::poly;
use super::{FieldError, FieldOps};

/// Element of a table-driven field, stored as the integer whose base-p digits
/// are its coordinates in the tower polynomial basis.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf(pub u16);

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Gf {
    pub const ZERO: Gf = Gf(0);
    pub const ONE: Gf = Gf(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Largest field order we are willing to tabulate.
pub const MAX_TABLE_ORDER: u64 = 1 << 16;
const ADD_TABLE_LIMIT: u32 = 1024;

/// A finite field of order at most 2^16 built as a chain of extensions of F_p.
///
/// Each level of the chain is F_{prev}[z]/(m(z)) with m the first monic
/// irreducible of its degree when polynomials are ordered by the integer value
/// of their coefficient vector. Elements of every intermediate level keep their
/// integer encoding in the larger field, so a subfield on the chain embeds as
/// the identity on `Gf`.
#[derive(Clone)]
pub struct SmallField {
    p: u32,
    order: u32,
    degrees: Vec<u32>,
    moduli: Vec<Vec<u16>>,
    coef_order: u32,
    exp: Vec<u16>,
    log: Vec<u32>,
    add_tab: Option<Vec<u16>>,
    neg_tab: Vec<u16>,
}

impl fmt::Debug for SmallField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{:?}) order {}", self.p, self.degrees, self.order)
    }
}

impl PartialEq for SmallField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degrees == other.degrees && self.moduli == other.moduli
    }
}

impl Eq for SmallField {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits a prime power into (p, r) with q = p^r.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let fs = prime_factors(q);
    if fs.len() != 1 {
        return None;
    }
    let p = fs[0];
    let mut r = 0;
    let mut t = q;
    while t > 1 {
        t /= p;
        r += 1;
    }
    Some((p, r))
}

impl SmallField {
    /// Builds the field F_p extended successively by the given degrees.
    pub fn make(p: u32, degrees: &[u32]) -> Result<SmallField, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        if degrees.is_empty() {
            return Err(FieldError::EmptyChain);
        }
        if degrees.contains(&0) {
            return Err(FieldError::ZeroDegree);
        }
        let mut total: u64 = 1;
        for &d in degrees {
            for _ in 0..d {
                total = total.saturating_mul(p as u64);
            }
        }
        if total > MAX_TABLE_ORDER {
            return Err(FieldError::TooLarge(total));
        }
        let mut field = SmallField::prime(p);
        for &d in degrees {
            field = field.extend(d)?;
        }
        field.coef_order = field.order;
        Ok(field)
    }

    /// The field F_{q²} for a prime power q, on the chain (p, [r, 2]).
    pub fn for_q_squared(q: u64) -> Result<SmallField, FieldError> {
        let (p, r) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if r == 1 {
            SmallField::make(p as u32, &[2])
        } else {
            SmallField::make(p as u32, &[r, 2])
        }
    }

    /// Extends `self` by degree `d`, keeping `self` as the coefficient field
    /// reported by `FieldOps::coords`.
    pub fn extension(&self, d: u32) -> Result<SmallField, FieldError> {
        if d == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let total = (self.order as u64).saturating_pow(d);
        if total > MAX_TABLE_ORDER {
            return Err(FieldError::TooLarge(total));
        }
        let mut f = self.extend(d)?;
        f.coef_order = self.order;
        Ok(f)
    }

    fn prime(p: u32) -> SmallField {
        let order = p;
        let n1 = order - 1;
        let mut g = 1u32;
        if p > 2 {
            let fs = prime_factors(n1 as u64);
            g = (2..p)
                .find(|&g| fs.iter().all(|&r| pow_mod(g as u64, n1 as u64 / r, p as u64) != 1))
                .expect("primitive root exists");
        }
        let mut exp = vec![0u16; 2 * n1.max(1) as usize];
        let mut log = vec![0u32; order as usize];
        let mut x = 1u32;
        for i in 0..n1 {
            exp[i as usize] = x as u16;
            log[x as usize] = i;
            x = x * g % p;
        }
        for i in n1..2 * n1 {
            exp[i as usize] = exp[(i - n1) as usize];
        }
        let mut f = SmallField {
            p,
            order,
            degrees: Vec::new(),
            moduli: Vec::new(),
            coef_order: order,
            exp,
            log,
            add_tab: None,
            neg_tab: Vec::new(),
        };
        f.build_additive();
        f
    }

    fn extend(&self, d: u32) -> Result<SmallField, FieldError> {
        let base = self;
        let bq = base.order as u64;
        let modulus = if d == 1 {
            vec![Gf(0), Gf(1)]
        } else {
            // Scan monic polynomials by the integer value of their low-to-high
            // coefficient vector.
            let count = bq.pow(d);
            let mut found = None;
            for code in 0..count {
                let mut c = Vec::with_capacity(d as usize + 1);
                let mut t = code;
                for _ in 0..d {
                    c.push(Gf((t % bq) as u16));
                    t /= bq;
                }
                c.push(Gf(1));
                if c[0].is_zero() {
                    continue;
                }
                if poly::is_irreducible(base, &c) {
                    found = Some(c);
                    break;
                }
            }
            found.ok_or(FieldError::NoIrreducible)?
        };
        let order = (bq.pow(d)) as u32;
        let n1 = order - 1;
        let rep = PolyRep { base, modulus: &modulus, d: d as usize };
        let g = if d == 1 {
            None
        } else {
            let fs = prime_factors(n1 as u64);
            let one = 1u32;
            (2..order).find(|&g| {
                fs.iter()
                    .all(|&r| rep.pow(g, (n1 as u64) / r) != one)
            })
        };
        let mut degrees = base.degrees.clone();
        degrees.push(d);
        let mut moduli = base.moduli.clone();
        moduli.push(modulus.iter().map(|g| g.0).collect());
        let (exp, log) = match g {
            None => (base.exp.clone(), base.log.clone()),
            Some(g) => {
                let mut exp = vec![0u16; 2 * n1 as usize];
                let mut log = vec![0u32; order as usize];
                let mut x = 1u32;
                for i in 0..n1 {
                    exp[i as usize] = x as u16;
                    log[x as usize] = i;
                    x = rep.mul(x, g);
                }
                debug_assert_eq!(x, 1);
                for i in n1..2 * n1 {
                    exp[i as usize] = exp[(i - n1) as usize];
                }
                (exp, log)
            }
        };
        let mut f = SmallField {
            p: base.p,
            order,
            degrees,
            moduli,
            coef_order: base.coef_order,
            exp,
            log,
            add_tab: None,
            neg_tab: Vec::new(),
        };
        f.build_additive();
        Ok(f)
    }

    fn build_additive(&mut self) {
        let n = self.order as usize;
        self.neg_tab = (0..n).map(|a| self.neg_digits(a as u32) as u16).collect();
        if self.p != 2 && self.order <= ADD_TABLE_LIMIT {
            let mut t = vec![0u16; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = self.add_digits(a as u32, b as u32) as u16;
                }
            }
            self.add_tab = Some(t);
        }
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let p = self.p;
        let (mut r, mut w) = (0u32, 1u32);
        while a > 0 || b > 0 {
            r += ((a % p + b % p) % p) * w;
            a /= p;
            b /= p;
            w *= p;
        }
        r
    }

    fn neg_digits(&self, mut a: u32) -> u32 {
        let p = self.p;
        let (mut r, mut w) = (0u32, 1u32);
        while a > 0 {
            r += ((p - a % p) % p) * w;
            a /= p;
            w *= p;
        }
        r
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn size(&self) -> u32 {
        self.order
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Moduli of every chain level as integer-coded coefficients, low to high.
    pub fn moduli(&self) -> &[Vec<u16>] {
        &self.moduli
    }

    /// Order of the field that `coords` decomposes over.
    pub fn coef_order(&self) -> u32 {
        self.coef_order
    }

    pub fn elements(&self) -> impl Iterator<Item = Gf> {
        (0..self.order).map(|a| Gf(a as u16))
    }

    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        if self.p == 2 {
            Gf(a.0 ^ b.0)
        } else if let Some(t) = &self.add_tab {
            Gf(t[a.0 as usize * self.order as usize + b.0 as usize])
        } else {
            Gf(self.add_digits(a.0 as u32, b.0 as u32) as u16)
        }
    }

    #[inline]
    pub fn neg(&self, a: Gf) -> Gf {
        Gf(self.neg_tab[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Gf, b: Gf) -> Gf {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if a.0 == 0 || b.0 == 0 {
            Gf(0)
        } else {
            Gf(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
        }
    }

    #[inline]
    pub fn inv(&self, a: Gf) -> Option<Gf> {
        if a.0 == 0 {
            None
        } else {
            let n1 = self.order - 1;
            Some(Gf(self.exp[((n1 - self.log[a.0 as usize]) % n1) as usize]))
        }
    }

    #[inline]
    pub fn div(&self, a: Gf, b: Gf) -> Option<Gf> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Gf, e: u64) -> Gf {
        if e == 0 {
            return Gf(1);
        }
        if a.0 == 0 {
            return Gf(0);
        }
        let n1 = (self.order - 1) as u64;
        let l = (self.log[a.0 as usize] as u64 * (e % n1)) % n1;
        Gf(self.exp[l as usize])
    }

    /// Discrete logarithm with respect to the fixed primitive element.
    #[inline]
    pub fn log(&self, a: Gf) -> Option<u32> {
        if a.0 == 0 {
            None
        } else {
            Some(self.log[a.0 as usize])
        }
    }

    #[inline]
    pub fn exp(&self, l: u32) -> Gf {
        Gf(self.exp[(l % (self.order - 1)) as usize])
    }

    /// Splits `a` into its coordinates over the coefficient field.
    pub fn digits(&self, a: Gf) -> Vec<Gf> {
        let c = self.coef_order;
        let mut n = 1;
        let mut t = self.order;
        while t > c {
            t /= c;
            n += 1;
        }
        let mut out = Vec::with_capacity(n);
        let mut x = a.0 as u32;
        for _ in 0..n {
            out.push(Gf((x % c) as u16));
            x /= c;
        }
        out
    }

    /// The elements of the subfield of order `sub` (which must lie on the chain
    /// or be the prime field), in increasing integer order.
    pub fn subfield_elements(&self, sub: u32) -> Vec<Gf> {
        self.elements().filter(|&a| self.pow(a, sub as u64) == a).collect()
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Arithmetic on integer-coded elements of base[z]/(modulus) used while the
/// tables of a new level are being built.
struct PolyRep<'a> {
    base: &'a SmallField,
    modulus: &'a [Gf],
    d: usize,
}

impl PolyRep<'_> {
    fn split(&self, mut x: u32) -> Vec<Gf> {
        let b = self.base.order;
        (0..self.d)
            .map(|_| {
                let c = Gf((x % b) as u16);
                x /= b;
                c
            })
            .collect()
    }

    fn join(&self, c: &[Gf]) -> u32 {
        let b = self.base.order;
        c.iter().rev().fold(0u32, |acc, g| acc * b + g.0 as u32)
    }

    fn mul(&self, x: u32, y: u32) -> u32 {
        let f = self.base;
        let a = self.split(x);
        let b = self.split(y);
        let mut r = vec![Gf(0); 2 * self.d - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] = f.add(r[i + j], f.mul(ai, bj));
            }
        }
        for i in (self.d..r.len()).rev() {
            let c = r[i];
            if c.is_zero() {
                continue;
            }
            for j in 0..self.d {
                let t = f.mul(c, self.modulus[j]);
                r[i - self.d + j] = f.sub(r[i - self.d + j], t);
            }
            r[i] = Gf(0);
        }
        self.join(&r[..self.d])
    }

    fn pow(&self, x: u32, mut e: u64) -> u32 {
        let mut r = 1u32;
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }
}

impl FieldOps for SmallField {
    type Elem = Gf;

    fn zero(&self) -> Gf {
        Gf(0)
    }
    fn one(&self) -> Gf {
        Gf(1)
    }
    fn is_zero(&self, a: &Gf) -> bool {
        a.0 == 0
    }
    fn add(&self, a: &Gf, b: &Gf) -> Gf {
        SmallField::add(self, *a, *b)
    }
    fn sub(&self, a: &Gf, b: &Gf) -> Gf {
        SmallField::sub(self, *a, *b)
    }
    fn neg(&self, a: &Gf) -> Gf {
        SmallField::neg(self, *a)
    }
    fn mul(&self, a: &Gf, b: &Gf) -> Gf {
        SmallField::mul(self, *a, *b)
    }
    fn inv(&self, a: &Gf) -> Option<Gf> {
        SmallField::inv(self, *a)
    }
    fn characteristic(&self) -> u32 {
        self.p
    }
    fn order(&self) -> BigUint {
        BigUint::from(self.order)
    }
    fn random(&self, rng: &mut dyn RngCore) -> Gf {
        Gf((rng.next_u32() % self.order) as u16)
    }
    fn from_coef(&self, c: Gf) -> Gf {
        c
    }
    fn scale(&self, a: &Gf, c: Gf) -> Gf {
        SmallField::mul(self, *a, c)
    }
    fn coords(&self, a: &Gf) -> Vec<Gf> {
        self.digits(*a)
    }
    fn pow_big(&self, a: &Gf, e: &BigUint) -> Gf {
        let n1 = BigUint::from(self.order - 1);
        if e.bits() == 0 {
            return Gf(1);
        }
        let r = (e % &n1).to_u64_digits().first().copied().unwrap_or(0);
        if a.0 == 0 {
            Gf(0)
        } else if r == 0 {
            Gf(1)
        } else {
            self.pow(*a, r)
        }
    }
}
