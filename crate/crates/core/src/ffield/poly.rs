//! Dense univariate polynomials over any `FieldOps` field.
//!
//! Polynomials are coefficient vectors, low degree first, with no trailing
//! zeros (the zero polynomial is the empty vector).

use num_bigint::BigUint;
use num_traits::One;
use rand::RngCore;

use super::{FieldError, FieldOps};

const KARATSUBA_THRESHOLD: usize = 32;

/// A polynomial together with nothing else: the field is always passed
/// explicitly to the free functions below.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly<E> {
    pub coeffs: Vec<E>,
}

impl<E: Clone> UniPoly<E> {
    pub fn new<F: FieldOps<Elem = E>>(f: &F, mut coeffs: Vec<E>) -> Self {
        trim(f, &mut coeffs);
        UniPoly { coeffs }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
}

pub fn trim<F: FieldOps>(f: &F, a: &mut Vec<F::Elem>) {
    while let Some(last) = a.last() {
        if f.is_zero(last) {
            a.pop();
        } else {
            break;
        }
    }
}

pub fn degree<E>(a: &[E]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn add<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let mut r = Vec::with_capacity(n);
    for i in 0..n {
        r.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => f.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        });
    }
    trim(f, &mut r);
    r
}

pub fn sub<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let mut r = Vec::with_capacity(n);
    for i in 0..n {
        r.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => f.sub(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => f.neg(y),
            (None, None) => unreachable!(),
        });
    }
    trim(f, &mut r);
    r
}

pub fn scale<F: FieldOps>(f: &F, a: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
    if f.is_zero(c) {
        return Vec::new();
    }
    a.iter().map(|x| f.mul(x, c)).collect()
}

pub fn mul<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![f.zero(); a.len() + b.len() - 1];
    mul_into(f, a, b, &mut r);
    trim(f, &mut r);
    r
}

fn schoolbook_into<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem], out: &mut [F::Elem]) {
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = f.mul(x, y);
            out[i + j] = f.add(&out[i + j], &t);
        }
    }
}

/// Accumulates a·b into `out` (which must have room for the full product).
fn mul_into<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem], out: &mut [F::Elem]) {
    if a.len() < KARATSUBA_THRESHOLD || b.len() < KARATSUBA_THRESHOLD {
        schoolbook_into(f, a, b, out);
        return;
    }
    let h = a.len().max(b.len()) / 2;
    let (a0, a1) = a.split_at(h.min(a.len()));
    let (b0, b1) = b.split_at(h.min(b.len()));
    if a1.is_empty() || b1.is_empty() {
        schoolbook_into(f, a, b, out);
        return;
    }
    let mut z0 = vec![f.zero(); a0.len() + b0.len() - 1];
    mul_into(f, a0, b0, &mut z0);
    let mut z2 = vec![f.zero(); a1.len() + b1.len() - 1];
    mul_into(f, a1, b1, &mut z2);
    let sa = add_raw(f, a0, a1);
    let sb = add_raw(f, b0, b1);
    let mut z1 = vec![f.zero(); sa.len() + sb.len() - 1];
    mul_into(f, &sa, &sb, &mut z1);
    for (i, x) in z0.iter().enumerate() {
        z1[i] = f.sub(&z1[i], x);
        out[i] = f.add(&out[i], x);
    }
    for (i, x) in z2.iter().enumerate() {
        z1[i] = f.sub(&z1[i], x);
        out[i + 2 * h] = f.add(&out[i + 2 * h], x);
    }
    for (i, x) in z1.iter().enumerate() {
        if i + h < out.len() {
            out[i + h] = f.add(&out[i + h], x);
        }
    }
}

fn add_raw<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => f.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

/// Quotient and remainder of a by a nonzero b.
pub fn divrem<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
    let db = degree(b).expect("division by the zero polynomial");
    if a.len() <= db {
        return (Vec::new(), a.to_vec());
    }
    let lead_inv = f.inv(&b[db]).expect("trimmed divisor");
    let mut r = a.to_vec();
    let mut quo = vec![f.zero(); a.len() - db];
    for i in (db..a.len()).rev() {
        if f.is_zero(&r[i]) {
            continue;
        }
        let c = f.mul(&r[i], &lead_inv);
        for j in 0..db {
            let t = f.mul(&c, &b[j]);
            r[i - db + j] = f.sub(&r[i - db + j], &t);
        }
        r[i] = f.zero();
        quo[i - db] = c;
    }
    r.truncate(db);
    trim(f, &mut r);
    trim(f, &mut quo);
    (quo, r)
}

pub fn rem<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let db = degree(b).expect("division by the zero polynomial");
    if a.len() <= db {
        return a.to_vec();
    }
    let lead_inv = f.inv(&b[db]).expect("trimmed divisor");
    let mut r = a.to_vec();
    for i in (db..a.len()).rev() {
        if f.is_zero(&r[i]) {
            continue;
        }
        let c = f.mul(&r[i], &lead_inv);
        for j in 0..db {
            let t = f.mul(&c, &b[j]);
            r[i - db + j] = f.sub(&r[i - db + j], &t);
        }
    }
    r.truncate(db);
    trim(f, &mut r);
    r
}

pub fn monic<F: FieldOps>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(l) => {
            let li = f.inv(l).expect("nonzero leading coefficient");
            a.iter().map(|x| f.mul(x, &li)).collect()
        }
    }
}

/// Monic greatest common divisor (zero if both inputs are zero).
pub fn gcd<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(f, &mut x);
    trim(f, &mut y);
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

/// Extended gcd: returns (g, s) with s·a ≡ g (mod b), g monic.
pub fn gcd_inverse<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
    let mut r0 = b.to_vec();
    let mut r1 = rem(f, a, b);
    let mut s0: Vec<F::Elem> = Vec::new();
    let mut s1 = vec![f.one()];
    while !r1.is_empty() {
        let (qt, r2) = divrem(f, &r0, &r1);
        let s2 = sub(f, &s0, &mul(f, &qt, &s1));
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    let li = f.inv(r0.last().expect("nonzero gcd")).unwrap();
    (scale(f, &r0, &li), scale(f, &s0, &li))
}

pub fn mulmod<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem], m: &[F::Elem]) -> Vec<F::Elem> {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod<F: FieldOps>(f: &F, a: &[F::Elem], e: &BigUint, m: &[F::Elem]) -> Vec<F::Elem> {
    let mut r = rem(f, &[f.one()], m);
    let base = rem(f, a, m);
    for i in (0..e.bits()).rev() {
        r = mulmod(f, &r, &r, m);
        if e.bit(i) {
            r = mulmod(f, &r, &base, m);
        }
    }
    r
}

pub fn eval<F: FieldOps>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
    let mut acc = f.zero();
    for c in a.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

pub fn derivative<F: FieldOps>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    let p = f.characteristic() as usize;
    let mut r: Vec<F::Elem> = Vec::with_capacity(a.len().saturating_sub(1));
    for (i, c) in a.iter().enumerate().skip(1) {
        let k = i % p;
        let mut t = f.zero();
        for _ in 0..k {
            t = f.add(&t, c);
        }
        r.push(t);
    }
    trim(f, &mut r);
    r
}

/// Ben-Or irreducibility test: f of degree d is irreducible iff
/// gcd(T^{|F|^i} − T, f) = 1 for 1 ≤ i ≤ d/2.
pub fn is_irreducible<F: FieldOps>(f: &F, a: &[F::Elem]) -> bool {
    let d = match degree(a) {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(d) => d,
    };
    let a = monic(f, a);
    let qf = f.order();
    let t = vec![f.zero(), f.one()];
    let mut h = t.clone();
    for _ in 1..=d / 2 {
        h = powmod(f, &h, &qf, &a);
        let g = gcd(f, &sub(f, &h, &t), &a);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Random monic irreducible polynomial of degree `d` (Las Vegas).
pub fn irreducible_random<F: FieldOps>(
    f: &F,
    d: usize,
    rng: &mut dyn RngCore,
) -> Result<UniPoly<F::Elem>, FieldError> {
    let cap = 64 * d.max(1) + 256;
    for _ in 0..cap {
        let mut c: Vec<F::Elem> = (0..d).map(|_| f.random(rng)).collect();
        c.push(f.one());
        if d > 1 && f.is_zero(&c[0]) {
            continue;
        }
        if is_irreducible(f, &c) {
            return Ok(UniPoly { coeffs: c });
        }
    }
    Err(FieldError::RetryCap(cap))
}

/// Distinct roots of a nonzero polynomial, in increasing element order.
pub fn poly_roots<F: FieldOps>(
    f: &F,
    a: &[F::Elem],
    rng: &mut dyn RngCore,
) -> Result<Vec<F::Elem>, FieldError> {
    let mut a = a.to_vec();
    trim(f, &mut a);
    if a.is_empty() {
        return Err(FieldError::ZeroPolynomial);
    }
    let a = monic(f, &a);
    if a.len() == 1 {
        return Ok(Vec::new());
    }
    let t = vec![f.zero(), f.one()];
    let tq = powmod(f, &t, &f.order(), &a);
    let g = gcd(f, &sub(f, &tq, &t), &a);
    let mut roots = Vec::new();
    split_linear(f, &g, rng, &mut roots);
    roots.sort();
    roots.dedup();
    Ok(roots)
}

/// Splits a squarefree product of distinct linear factors.
fn split_linear<F: FieldOps>(f: &F, g: &[F::Elem], rng: &mut dyn RngCore, out: &mut Vec<F::Elem>) {
    match degree(g) {
        None | Some(0) => {}
        Some(1) => out.push(f.neg(&f.mul(&g[0], &f.inv(&g[1]).unwrap()))),
        Some(d) => loop {
            let r: Vec<F::Elem> = {
                let mut r: Vec<F::Elem> = (0..d).map(|_| f.random(rng)).collect();
                trim(f, &mut r);
                r
            };
            if r.len() < 2 {
                continue;
            }
            let s = if f.characteristic() == 2 {
                trace_poly(f, &r, g)
            } else {
                let e = (f.order() - BigUint::one()) >> 1;
                let h = powmod(f, &r, &e, g);
                sub(f, &h, &[f.one()])
            };
            let h = gcd(f, &s, g);
            let dh = h.len().saturating_sub(1);
            if dh > 0 && dh < d {
                let (other, _) = divrem(f, g, &h);
                split_linear(f, &h, rng, out);
                split_linear(f, &other, rng, out);
                return;
            }
        },
    }
}

/// r + r² + r⁴ + ... + r^{2^{m−1}} mod g, for a field of order 2^m.
fn trace_poly<F: FieldOps>(f: &F, r: &[F::Elem], g: &[F::Elem]) -> Vec<F::Elem> {
    let m = f.order().bits() - 1;
    let mut acc = rem(f, r, g);
    let mut cur = acc.clone();
    for _ in 1..m {
        cur = mulmod(f, &cur, &cur, g);
        acc = add(f, &acc, &cur);
    }
    acc
}

/// The smallest β with β^q + β = c, or an error if the equation has no
/// solution in the field.
pub fn solve_artin_schreier<F: FieldOps>(
    f: &F,
    q: u64,
    c: &F::Elem,
    rng: &mut dyn RngCore,
) -> Result<F::Elem, FieldError> {
    let roots = artin_schreier_roots(f, q, c, rng)?;
    roots.into_iter().next().ok_or(FieldError::NoSolution)
}

/// All solutions of T^q + T = c.
pub fn artin_schreier_roots<F: FieldOps>(
    f: &F,
    q: u64,
    c: &F::Elem,
    rng: &mut dyn RngCore,
) -> Result<Vec<F::Elem>, FieldError> {
    let mut p = vec![f.zero(); q as usize + 1];
    p[0] = f.neg(c);
    p[1] = f.add(&p[1], &f.one());
    p[q as usize] = f.add(&p[q as usize], &f.one());
    poly_roots(f, &p, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::{omega_set, Gf, SmallField};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn brute_roots(f: &SmallField, a: &[Gf]) -> Vec<Gf> {
        f.elements().filter(|x| eval(f, a, x).is_zero()).collect()
    }

    fn brute_irreducible(f: &SmallField, a: &[Gf]) -> bool {
        // Trial division by every monic polynomial of degree ≤ d/2.
        let d = a.len() - 1;
        let n = f.size() as u64;
        for k in 1..=d / 2 {
            for code in 0..n.pow(k as u32) {
                let mut c = Vec::new();
                let mut t = code;
                for _ in 0..k {
                    c.push(Gf((t % n) as u16));
                    t /= n;
                }
                c.push(Gf(1));
                if rem(f, a, &c).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let f = SmallField::for_q_squared(4).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for len in [1usize, 20, 33, 64, 100, 157] {
            let a: Vec<Gf> = (0..len).map(|_| FieldOps::random(&f, &mut rng)).collect();
            let b: Vec<Gf> = (0..len + 3).map(|_| FieldOps::random(&f, &mut rng)).collect();
            let mut s = vec![Gf(0); a.len() + b.len() - 1];
            schoolbook_into(&f, &a, &b, &mut s);
            trim(&f, &mut s);
            assert_eq!(mul(&f, &a, &b), s);
        }
    }

    #[test]
    fn irreducible_random_passes_brute_force() {
        let f4 = SmallField::for_q_squared(2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for d in 1..=4 {
            for _ in 0..5 {
                let p = irreducible_random(&f4, d, &mut rng).unwrap();
                assert_eq!(p.degree(), Some(d));
                assert!(brute_irreducible(&f4, &p.coeffs));
            }
        }
        // The Ben-Or test agrees with trial division on every monic cubic over F_4.
        for code in 0..64u32 {
            let c = vec![Gf((code % 4) as u16), Gf((code / 4 % 4) as u16), Gf((code / 16) as u16), Gf(1)];
            assert_eq!(is_irreducible(&f4, &c), brute_irreducible(&f4, &c));
        }
    }

    #[test]
    fn roots_of_simple_polynomials() {
        let f9 = SmallField::for_q_squared(3).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let minus_one = f9.neg(Gf(1));
        let r = poly_roots(&f9, &[minus_one, Gf(0), Gf(1)], &mut rng).unwrap();
        assert_eq!(r, vec![Gf(1), minus_one]);
        for q in [2u64, 3, 4, 5] {
            let f = SmallField::for_q_squared(q).unwrap();
            let r = artin_schreier_roots(&f, q, &Gf(0), &mut rng).unwrap();
            assert_eq!(r, omega_set(&f, q).unwrap());
        }
        assert_eq!(poly_roots(&f9, &[], &mut rng), Err(FieldError::ZeroPolynomial));
    }

    #[test]
    fn planted_roots_with_irreducible_cofactor() {
        let f = SmallField::for_q_squared(4).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..20 {
            let mut planted: Vec<Gf> = Vec::new();
            while planted.len() < 3 {
                let x = FieldOps::random(&f, &mut rng);
                if !planted.contains(&x) {
                    planted.push(x);
                }
            }
            let quad = irreducible_random(&f, 2, &mut rng).unwrap().coeffs;
            let mut p = quad;
            for &x in &planted {
                p = mul(&f, &p, &[f.neg(x), Gf(1)]);
            }
            let mut got = poly_roots(&f, &p, &mut rng).unwrap();
            planted.sort();
            got.sort();
            assert_eq!(got, planted);
        }
    }

    #[test]
    fn artin_schreier_solutions_verify() {
        let q = 5u64;
        let f = SmallField::for_q_squared(q).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let mut solvable = 0;
        for c in f.elements() {
            match solve_artin_schreier(&f, q, &c, &mut rng) {
                Ok(b) => {
                    solvable += 1;
                    assert_eq!(f.add(f.pow(b, q), b), c);
                }
                Err(e) => assert_eq!(e, FieldError::NoSolution),
            }
        }
        // The map T ↦ T^q + T is F_q-linear with kernel Ω, so its image has q elements.
        assert_eq!(solvable, q as usize);
    }

    proptest! {
        #[test]
        fn returned_roots_are_exactly_the_zeros(coeffs in proptest::collection::vec(0u16..16, 1..9), seed in any::<u64>()) {
            let f = SmallField::for_q_squared(4).unwrap();
            let a: Vec<Gf> = coeffs.into_iter().map(Gf).collect();
            let mut t = a.clone();
            trim(&f, &mut t);
            prop_assume!(!t.is_empty());
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let r = poly_roots(&f, &t, &mut rng).unwrap();
            prop_assert_eq!(r, brute_roots(&f, &t));
        }

        #[test]
        fn divrem_reconstructs(a in proptest::collection::vec(0u16..9, 0..20), b in proptest::collection::vec(0u16..9, 1..8)) {
            let f = SmallField::for_q_squared(3).unwrap();
            let a: Vec<Gf> = a.into_iter().map(Gf).collect();
            let mut b: Vec<Gf> = b.into_iter().map(Gf).collect();
            trim(&f, &mut b);
            prop_assume!(!b.is_empty());
            let mut at = a.clone();
            trim(&f, &mut at);
            let (qt, r) = divrem(&f, &at, &b);
            prop_assert!(r.len() < b.len());
            prop_assert_eq!(add(&f, &mul(&f, &qt, &b), &r), at);
        }
    }
}
