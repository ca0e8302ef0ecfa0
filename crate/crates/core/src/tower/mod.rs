//! Exact arithmetic in the function fields F_m of the tower
//! x_{i+1}^q + x_{i+1} = x_i^q / (x_i^{q−1} + 1) over F_{q²}.
//!
//! An element of F_m is stored in the basis x_1^{e_1}···x_m^{e_m}
//! (0 ≤ e_i < q) over F_{q²}(x_0). The coefficient of that monomial sits at
//! index Σ e_i q^{i−1}, so x_m is the most significant digit and the
//! coefficient vector of F_m splits into q consecutive blocks, each an element
//! of F_{m−1}.

mod places;
mod ratfn;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::ffield::{omega_set, prime_power, FieldError, FieldOps, Gf, SmallField};

pub use places::{code_places, place_digest, CodePlaces};
pub use ratfn::RatFn;

pub const MAX_LEVEL: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("function has a pole at the evaluation point")]
    Pole,
    #[error("zero has no inverse")]
    NotInvertible,
    #[error("level {0} exceeds the supported maximum")]
    LevelTooLarge(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Shared context for one tower: q, F_{q²}, Ω and cached constants.
pub struct Tower {
    q: u64,
    field: Arc<SmallField>,
    omega: Vec<Gf>,
    consts: Vec<OnceLock<TowerFunction>>,
    inv_x: Vec<OnceLock<TowerFunction>>,
}

impl std::fmt::Debug for Tower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Tower(q={})", self.q)
    }
}

/// An element of F_m in canonical form.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct TowerFunction {
    level: usize,
    coeffs: Vec<RatFn>,
}

impl TowerFunction {
    pub fn level(&self) -> usize {
        self.level
    }

    /// Coefficients indexed by Σ e_i q^{i−1}.
    pub fn coeffs(&self) -> &[RatFn] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RatFn::is_zero)
    }

    pub fn from_coeffs(level: usize, coeffs: Vec<RatFn>) -> TowerFunction {
        TowerFunction { level, coeffs }
    }
}

/// A product x_0^s · Π f_j[shift_j]^{exp_j} kept unexpanded.
#[derive(Clone, Debug)]
pub struct FactoredFunction {
    pub level: usize,
    pub x0_power: u32,
    pub factors: Vec<(Arc<TowerFunction>, usize, u32)>,
}

fn binomial_mod(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    (r % p as u128) as u64
}

impl Tower {
    pub fn new(q: u64) -> Result<Arc<Tower>, TowerError> {
        let field = Arc::new(SmallField::for_q_squared(q)?);
        let omega = omega_set(&field, q)?;
        Ok(Arc::new(Tower {
            q,
            field,
            omega,
            consts: (0..MAX_LEVEL).map(|_| OnceLock::new()).collect(),
            inv_x: (0..MAX_LEVEL).map(|_| OnceLock::new()).collect(),
        }))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn p(&self) -> u64 {
        prime_power(self.q).unwrap().0
    }

    pub fn field(&self) -> &Arc<SmallField> {
        &self.field
    }

    pub fn omega(&self) -> &[Gf] {
        &self.omega
    }

    fn qu(&self) -> usize {
        self.q as usize
    }

    pub fn dim(&self, level: usize) -> usize {
        self.qu().pow(level as u32)
    }

    pub fn zero(&self, level: usize) -> TowerFunction {
        TowerFunction { level, coeffs: vec![RatFn::zero(); self.dim(level)] }
    }

    pub fn from_ratfn(&self, level: usize, r: RatFn) -> TowerFunction {
        let mut z = self.zero(level);
        z.coeffs[0] = r;
        z
    }

    pub fn one(&self, level: usize) -> TowerFunction {
        self.from_ratfn(level, RatFn::one())
    }

    pub fn constant(&self, level: usize, c: Gf) -> TowerFunction {
        self.from_ratfn(level, RatFn::constant(c))
    }

    /// The generator x_j viewed in F_level (j ≤ level).
    pub fn x(&self, level: usize, j: usize) -> TowerFunction {
        assert!(j <= level);
        if j == 0 {
            return self.from_ratfn(level, RatFn::x());
        }
        let mut z = self.zero(level);
        z.coeffs[self.dim(j - 1)] = RatFn::one();
        z
    }

    /// The monomial Π x_i^{e_i} (e_i < q) at `level` with coefficient `c`.
    pub fn monomial(&self, level: usize, exps: &[usize], c: RatFn) -> TowerFunction {
        let mut z = self.zero(level);
        let mut idx = 0;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e < self.qu());
            idx += e * self.dim(i);
        }
        z.coeffs[idx] = c;
        z
    }

    /// Views a lower-level function as an element of a higher level.
    pub fn embed(&self, f: &TowerFunction, level: usize) -> TowerFunction {
        assert!(level >= f.level);
        let mut c = f.coeffs.clone();
        c.resize(self.dim(level), RatFn::zero());
        TowerFunction { level, coeffs: c }
    }

    fn check(&self, a: &TowerFunction, b: &TowerFunction) -> Result<(), TowerError> {
        if a.level != b.level {
            Err(TowerError::LevelMismatch(a.level, b.level))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, a: &TowerFunction, b: &TowerFunction) -> Result<TowerFunction, TowerError> {
        self.check(a, b)?;
        let f = &*self.field;
        Ok(TowerFunction {
            level: a.level,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.add(f, y)).collect(),
        })
    }

    pub fn sub(&self, a: &TowerFunction, b: &TowerFunction) -> Result<TowerFunction, TowerError> {
        self.check(a, b)?;
        let f = &*self.field;
        Ok(TowerFunction {
            level: a.level,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.sub(f, y)).collect(),
        })
    }

    pub fn neg(&self, a: &TowerFunction) -> TowerFunction {
        let f = &*self.field;
        TowerFunction { level: a.level, coeffs: a.coeffs.iter().map(|x| x.neg(f)).collect() }
    }

    pub fn scale(&self, a: &TowerFunction, c: Gf) -> TowerFunction {
        let f = &*self.field;
        TowerFunction { level: a.level, coeffs: a.coeffs.iter().map(|x| x.scale(f, c)).collect() }
    }

    pub fn scale_ratfn(&self, a: &TowerFunction, c: &RatFn) -> TowerFunction {
        let f = &*self.field;
        TowerFunction { level: a.level, coeffs: a.coeffs.iter().map(|x| x.mul(f, c)).collect() }
    }

    /// c_j = x_j^q / (x_j^{q−1} + 1), the right-hand side of the relation
    /// defining x_{j+1}, as an element of F_j.
    pub fn relation_constant(&self, j: usize) -> &TowerFunction {
        self.consts[j].get_or_init(|| {
            let f = &*self.field;
            if j == 0 {
                let mut num = vec![Gf::ZERO; self.qu() + 1];
                num[self.qu()] = Gf::ONE;
                let mut den = vec![Gf::ZERO; self.qu()];
                den[0] = Gf::ONE;
                den[self.qu() - 1] = Gf::ONE;
                return self.from_ratfn(0, RatFn::new(f, num, den));
            }
            // x_j^q + x_j = c_{j−1}, so 1/(x_j^{q−1}+1) = x_j / c_{j−1}.
            let xj = self.x(j, j);
            let xq1 = self.pow(&xj, self.q + 1);
            let cinv = self.inv(self.relation_constant(j - 1)).expect("c_j is nonzero");
            self.mul(&xq1, &self.embed(&cinv, j)).unwrap()
        })
    }

    fn is_zero_slice(s: &[RatFn]) -> bool {
        s.iter().all(RatFn::is_zero)
    }

    fn add_into(&self, acc: &mut [RatFn], t: &[RatFn]) {
        let f = &*self.field;
        for (a, b) in acc.iter_mut().zip(t) {
            if !b.is_zero() {
                *a = a.add(f, b);
            }
        }
    }

    fn sub_into(&self, acc: &mut [RatFn], t: &[RatFn]) {
        let f = &*self.field;
        for (a, b) in acc.iter_mut().zip(t) {
            if !b.is_zero() {
                *a = a.sub(f, b);
            }
        }
    }

    fn mul_rec(&self, a: &[RatFn], b: &[RatFn], m: usize) -> Vec<RatFn> {
        let f = &*self.field;
        if m == 0 {
            return vec![a[0].mul(f, &b[0])];
        }
        let q = self.qu();
        let bs = self.dim(m - 1);
        let mut prod: Vec<Option<Vec<RatFn>>> = vec![None; 2 * q - 1];
        for i in 0..q {
            let ai = &a[i * bs..(i + 1) * bs];
            if Self::is_zero_slice(ai) {
                continue;
            }
            for j in 0..q {
                let bj = &b[j * bs..(j + 1) * bs];
                if Self::is_zero_slice(bj) {
                    continue;
                }
                let t = self.mul_rec(ai, bj, m - 1);
                match &mut prod[i + j] {
                    Some(acc) => self.add_into(acc, &t),
                    slot @ None => *slot = Some(t),
                }
            }
        }
        // x_m^q = −x_m + c_{m−1}
        let c = &self.relation_constant(m - 1).coeffs;
        for k in (q..2 * q - 1).rev() {
            if let Some(t) = prod[k].take() {
                match &mut prod[k - q + 1] {
                    Some(acc) => self.sub_into(acc, &t),
                    slot @ None => *slot = Some(t.iter().map(|x| x.neg(f)).collect()),
                }
                let tc = self.mul_rec(&t, c, m - 1);
                match &mut prod[k - q] {
                    Some(acc) => self.add_into(acc, &tc),
                    slot @ None => *slot = Some(tc),
                }
            }
        }
        let mut out = Vec::with_capacity(q * bs);
        for blk in prod.into_iter().take(q) {
            match blk {
                Some(v) => out.extend(v),
                None => out.extend(std::iter::repeat_n(RatFn::zero(), bs)),
            }
        }
        out
    }

    /// Product in canonical form (reducing with the tower relation).
    pub fn mul(&self, a: &TowerFunction, b: &TowerFunction) -> Result<TowerFunction, TowerError> {
        self.check(a, b)?;
        Ok(TowerFunction { level: a.level, coeffs: self.mul_rec(&a.coeffs, &b.coeffs, a.level) })
    }

    pub fn pow(&self, a: &TowerFunction, mut e: u64) -> TowerFunction {
        let mut r = self.one(a.level);
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b).unwrap();
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b).unwrap();
            }
        }
        r
    }

    /// Image under the automorphism x_m ↦ x_m + ω of F_m over F_{m−1}.
    fn conjugate(&self, y: &TowerFunction, w: Gf) -> TowerFunction {
        let f = &*self.field;
        let m = y.level;
        let q = self.qu();
        let bs = self.dim(m - 1);
        let p = self.p();
        let mut out = vec![RatFn::zero(); q * bs];
        for j in 0..q {
            let yj = &y.coeffs[j * bs..(j + 1) * bs];
            if Self::is_zero_slice(yj) {
                continue;
            }
            for i in 0..=j {
                let b = binomial_mod(j as u64, i as u64, p);
                if b == 0 {
                    continue;
                }
                let s = f.mul(Gf(b as u16), f.pow(w, (j - i) as u64));
                if s.is_zero() {
                    continue;
                }
                for (k, c) in yj.iter().enumerate() {
                    if !c.is_zero() {
                        out[i * bs + k] = out[i * bs + k].add(f, &c.scale(f, s));
                    }
                }
            }
        }
        TowerFunction { level: m, coeffs: out }
    }

    /// Multiplicative inverse, via the norm down the Artin-Schreier layers.
    pub fn inv(&self, y: &TowerFunction) -> Option<TowerFunction> {
        if y.is_zero() {
            return None;
        }
        let m = y.level;
        if m == 0 {
            return Some(self.from_ratfn(0, y.coeffs[0].inv(&self.field)?));
        }
        let mut prod = self.one(m);
        for &w in &self.omega[1..] {
            prod = self.mul(&prod, &self.conjugate(y, w)).unwrap();
        }
        let n = self.mul(y, &prod).unwrap();
        let bs = self.dim(m - 1);
        debug_assert!(Self::is_zero_slice(&n.coeffs[bs..]));
        let low = TowerFunction { level: m - 1, coeffs: n.coeffs[..bs].to_vec() };
        let low_inv = self.inv(&low)?;
        Some(self.mul(&prod, &self.embed(&low_inv, m)).unwrap())
    }

    pub fn div(&self, a: &TowerFunction, b: &TowerFunction) -> Result<TowerFunction, TowerError> {
        let bi = self.inv(b).ok_or(TowerError::NotInvertible)?;
        self.mul(a, &bi)
    }

    /// 1/x_t as an element of F_t.
    pub fn inv_x(&self, t: usize) -> &TowerFunction {
        self.inv_x[t].get_or_init(|| self.inv(&self.x(t, t)).expect("x_t is nonzero"))
    }

    /// Evaluates each coefficient polynomial p(x_0) as p(x_t) in F_t.
    fn poly_in(&self, p: &[Gf], powers: &[TowerFunction], level: usize) -> TowerFunction {
        let mut acc = self.zero(level);
        for (k, &c) in p.iter().enumerate() {
            if !c.is_zero() {
                acc = self.add(&acc, &self.scale(&powers[k], c)).unwrap();
            }
        }
        acc
    }

    fn powers_of(&self, base: &TowerFunction, n: usize) -> Vec<TowerFunction> {
        let mut v = Vec::with_capacity(n + 1);
        v.push(self.one(base.level));
        for k in 1..=n {
            let next = self.mul(&v[k - 1], base).unwrap();
            v.push(next);
        }
        v
    }

    /// The shift f[i]: every x_j is replaced by x_{j+i}.
    pub fn shift(&self, f: &TowerFunction, i: usize) -> Result<TowerFunction, TowerError> {
        let m = f.level;
        if m + i >= MAX_LEVEL {
            return Err(TowerError::LevelTooLarge(m + i));
        }
        if i == 0 {
            return Ok(f.clone());
        }
        let maxdeg = f.coeffs.iter().map(RatFn::degree_bound).max().unwrap_or(1);
        let xi = self.x(i, i);
        let powers = self.powers_of(&xi, maxdeg);
        let mut den_cache: HashMap<Vec<Gf>, TowerFunction> = HashMap::new();
        let lo = self.dim(i);
        let mut out = vec![RatFn::zero(); self.dim(m + i)];
        for (e, r) in f.coeffs.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let mut val = self.poly_in(&r.num, &powers, i);
            if !r.is_polynomial() {
                let dinv = match den_cache.get(&r.den) {
                    Some(d) => d.clone(),
                    None => {
                        let d = self.poly_in(&r.den, &powers, i);
                        let di = self.inv(&d).ok_or(TowerError::NotInvertible)?;
                        den_cache.insert(r.den.clone(), di.clone());
                        di
                    }
                };
                val = self.mul(&val, &dinv)?;
            }
            for (u, c) in val.coeffs.into_iter().enumerate() {
                out[u + lo * e] = c;
            }
        }
        Ok(TowerFunction { level: m + i, coeffs: out })
    }

    /// The involution φ_j of F_j sending x_k to 1/x_{j−k}.
    pub fn phi(&self, f: &TowerFunction) -> TowerFunction {
        let j = f.level;
        let fld = &*self.field;
        if j == 0 {
            return self.from_ratfn(0, f.coeffs[0].reciprocal_arg(fld));
        }
        let q = self.qu();
        let maxdeg = f.coeffs.iter().map(RatFn::degree_bound).max().unwrap_or(1);
        let xj = self.x(j, j);
        let powers = self.powers_of(&xj, maxdeg);
        let inv_xs: Vec<TowerFunction> = (0..=j).map(|t| self.embed(self.inv_x(t), j)).collect();
        let inv_pows: Vec<Vec<TowerFunction>> =
            inv_xs.iter().map(|ix| self.powers_of(ix, maxdeg.max(q))).collect();
        let mut den_cache: HashMap<Vec<Gf>, TowerFunction> = HashMap::new();
        let mut acc = self.zero(j);
        for (e, r) in f.coeffs.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            // r(1/x_j) = x_j^{dd−dn} · rev(num)(x_j) / rev(den)(x_j)
            let dn = r.num.len() - 1;
            let dd = r.den.len() - 1;
            let rnum: Vec<Gf> = r.num.iter().rev().copied().collect();
            let rden: Vec<Gf> = r.den.iter().rev().copied().collect();
            let mut term = self.poly_in(&rnum, &powers, j);
            if dd > 0 {
                let di = match den_cache.get(&rden) {
                    Some(d) => d.clone(),
                    None => {
                        let d = self.poly_in(&rden, &powers, j);
                        let di = self.inv(&d).expect("nonzero denominator");
                        den_cache.insert(rden.clone(), di.clone());
                        di
                    }
                };
                term = self.mul(&term, &di).unwrap();
            }
            if dd >= dn {
                term = self.mul(&term, &powers[dd - dn]).unwrap();
            } else {
                term = self.mul(&term, &inv_pows[j][dn - dd]).unwrap();
            }
            let mut rest = e;
            for k in 1..=j {
                let ek = rest % q;
                rest /= q;
                if ek > 0 {
                    term = self.mul(&term, &inv_pows[j - k][ek]).unwrap();
                }
            }
            acc = self.add(&acc, &term).unwrap();
        }
        acc
    }

    /// Value of f at the point (α_0, ..., α_m), whose coordinates live in any
    /// field containing F_{q²}.
    pub fn evaluate<F: FieldOps>(
        &self,
        f: &TowerFunction,
        field: &F,
        pt: &[F::Elem],
    ) -> Result<F::Elem, TowerError> {
        let m = f.level;
        assert!(pt.len() > m, "point has too few coordinates");
        let q = self.qu();
        let pows: Vec<Vec<F::Elem>> = (1..=m)
            .map(|k| {
                let mut v = Vec::with_capacity(q);
                v.push(field.one());
                for e in 1..q {
                    let t = field.mul(&v[e - 1], &pt[k]);
                    v.push(t);
                }
                v
            })
            .collect();
        let mut acc = field.zero();
        let mut cache: HashMap<&[Gf], F::Elem> = HashMap::new();
        for (e, r) in f.coeffs.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let n = ratfn::horner(field, &r.num, &pt[0]);
            let mut v = if r.is_polynomial() {
                n
            } else {
                let di = match cache.get(r.den.as_slice()) {
                    Some(d) => d.clone(),
                    None => {
                        let d = ratfn::horner(field, &r.den, &pt[0]);
                        let di = field.inv(&d).ok_or(TowerError::Pole)?;
                        cache.insert(r.den.as_slice(), di.clone());
                        di
                    }
                };
                field.mul(&n, &di)
            };
            let mut rest = e;
            for pk in &pows {
                let ek = rest % q;
                rest /= q;
                if ek > 0 {
                    v = field.mul(&v, &pk[ek]);
                }
            }
            acc = field.add(&acc, &v);
        }
        Ok(acc)
    }

    /// Evaluates a factored product at a point of F_level.
    pub fn evaluate_factored<F: FieldOps>(
        &self,
        g: &FactoredFunction,
        field: &F,
        pt: &[F::Elem],
    ) -> Result<F::Elem, TowerError> {
        let mut acc = field.pow_u64(&pt[0], g.x0_power as u64);
        for (fct, shift, e) in &g.factors {
            let v = self.evaluate(fct, field, &pt[*shift..])?;
            acc = field.mul(&acc, &field.pow_u64(&v, *e as u64));
        }
        Ok(acc)
    }

    /// Multiplies out a factored product into canonical form.
    pub fn expand(&self, g: &FactoredFunction) -> Result<TowerFunction, TowerError> {
        let x0 = self.x(g.level, 0);
        let mut acc = self.pow(&x0, g.x0_power as u64);
        for (fct, shift, e) in &g.factors {
            let s = self.shift(fct, *shift)?;
            let s = self.embed(&s, g.level);
            acc = self.mul(&acc, &self.pow(&s, *e as u64))?;
        }
        Ok(acc)
    }

    /// The defining relation residual x_{j+1}^q + x_{j+1} − c_j, which must be
    /// zero in F_level for every j < level.
    pub fn relation_residual(&self, level: usize, j: usize) -> TowerFunction {
        let x = self.x(level, j + 1);
        let lhs = self.add(&self.pow(&x, self.q), &x).unwrap();
        self.sub(&lhs, &self.embed(self.relation_constant(j), level)).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedRng;
    use rand::RngCore;

    fn random_poly(t: &Tower, rng: &mut SeedRng, deg: usize) -> Vec<Gf> {
        (0..=deg).map(|_| FieldOps::random(&**t.field(), rng)).collect()
    }

    /// Random element with coefficients of the shape p(x_0)/(x_0^{q−1}+1)^b.
    fn random_fn(t: &Tower, level: usize, rng: &mut SeedRng, density: u32) -> TowerFunction {
        let f = &**t.field();
        let mut den = vec![Gf::ZERO; t.q() as usize];
        den[0] = Gf::ONE;
        den[t.q() as usize - 1] = Gf::ONE;
        let mut z = t.zero(level);
        for c in z.coeffs.iter_mut() {
            if rng.next_u32() % 100 < density {
                let num = random_poly(t, rng, 3);
                *c = if rng.next_u32() % 2 == 0 {
                    RatFn::poly(f, num)
                } else {
                    RatFn::new(f, num, den.clone())
                };
            }
        }
        z
    }

    #[test]
    fn reduction_of_x1_to_the_q() {
        let t = Tower::new(3).unwrap();
        let x1 = t.x(1, 1);
        let lhs = t.mul(&x1, &t.pow(&x1, 2)).unwrap();
        let mut expect = t.neg(&x1);
        expect = t.add(&expect, &t.embed(t.relation_constant(0), 1)).unwrap();
        assert_eq!(lhs, expect);
        let c0 = &t.relation_constant(0).coeffs[0];
        assert_eq!(c0.num, vec![Gf(0), Gf(0), Gf(0), Gf(1)]);
        assert_eq!(c0.den, vec![Gf(1), Gf(0), Gf(1)]);
    }

    #[test]
    fn relations_hold_canonically() {
        for q in [2u64, 3, 4] {
            let t = Tower::new(q).unwrap();
            for level in 1..=3 {
                for j in 0..level {
                    assert!(t.relation_residual(level, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn inverse_and_ring_laws() {
        let t = Tower::new(3).unwrap();
        let mut rng = SeedRng::new(11);
        for level in 0..=2 {
            for _ in 0..6 {
                let a = random_fn(&t, level, &mut rng, 40);
                let b = random_fn(&t, level, &mut rng, 40);
                let c = random_fn(&t, level, &mut rng, 40);
                let ab = t.mul(&a, &b).unwrap();
                assert_eq!(t.mul(&ab, &c).unwrap(), t.mul(&a, &t.mul(&b, &c).unwrap()).unwrap());
                assert_eq!(ab, t.mul(&b, &a).unwrap());
                assert_eq!(t.mul(&a, &t.one(level)).unwrap(), a);
                if !a.is_zero() {
                    let ai = t.inv(&a).unwrap();
                    assert_eq!(t.mul(&a, &ai).unwrap(), t.one(level));
                }
            }
        }
    }

    #[test]
    fn products_evaluate_pointwise() {
        let t = Tower::new(4).unwrap();
        let places = code_places(&t, 2);
        let mut rng = SeedRng::new(12);
        let f = &**t.field();
        for _ in 0..5 {
            let a = random_fn(&t, 2, &mut rng, 50);
            let b = random_fn(&t, 2, &mut rng, 50);
            let ab = t.mul(&a, &b).unwrap();
            for _ in 0..10 {
                let i = (rng.next_u32() as usize) % places.len();
                let pt = places.place(i);
                let va = t.evaluate(&a, f, pt).unwrap();
                let vb = t.evaluate(&b, f, pt).unwrap();
                assert_eq!(t.evaluate(&ab, f, pt).unwrap(), f.mul(va, vb));
            }
        }
    }

    #[test]
    fn phi_is_an_involution_and_shift_factors_through_it() {
        let t = Tower::new(2).unwrap();
        let mut rng = SeedRng::new(13);
        // φ_1(x_0) = 1/x_1
        assert_eq!(t.phi(&t.x(1, 0)), *t.inv_x(1));
        for level in 0..=2 {
            for _ in 0..4 {
                let a = random_fn(&t, level, &mut rng, 40);
                assert_eq!(t.phi(&t.phi(&a)), a);
            }
        }
        for _ in 0..4 {
            let a = random_fn(&t, 1, &mut rng, 60);
            let via_phi = t.phi(&t.embed(&t.phi(&a), 2));
            assert_eq!(t.shift(&a, 1).unwrap(), via_phi);
        }
    }

    #[test]
    fn shift_is_a_ring_homomorphism() {
        let t = Tower::new(3).unwrap();
        let mut rng = SeedRng::new(14);
        assert_eq!(t.shift(&t.x(0, 0), 1).unwrap(), t.x(1, 1));
        for _ in 0..4 {
            let a = random_fn(&t, 1, &mut rng, 50);
            let b = random_fn(&t, 1, &mut rng, 50);
            let ab = t.mul(&a, &b).unwrap();
            let sa = t.shift(&a, 1).unwrap();
            let sb = t.shift(&b, 1).unwrap();
            assert_eq!(t.shift(&ab, 1).unwrap(), t.mul(&sa, &sb).unwrap());
            assert_eq!(t.shift(&t.add(&a, &b).unwrap(), 1).unwrap(), t.add(&sa, &sb).unwrap());
        }
    }

    #[test]
    fn factored_evaluation_matches_expansion() {
        let t = Tower::new(2).unwrap();
        let mut rng = SeedRng::new(15);
        let f = &**t.field();
        let places = code_places(&t, 2);
        for _ in 0..10 {
            let g1 = Arc::new(random_fn(&t, 1, &mut rng, 60));
            let g2 = Arc::new(random_fn(&t, 1, &mut rng, 60));
            let fac = FactoredFunction {
                level: 2,
                x0_power: rng.next_u32() % 3,
                factors: vec![(g1, 0, 1), (g2, 1, 2)],
            };
            let ex = t.expand(&fac).unwrap();
            for i in 0..places.len() {
                let pt = places.place(i);
                let a = t.evaluate_factored(&fac, f, pt);
                let b = t.evaluate(&ex, f, pt);
                match (a, b) {
                    (Ok(a), Ok(b)) => assert_eq!(a, b),
                    (Err(_), _) | (_, Err(_)) => {}
                }
            }
        }
    }

    #[test]
    fn level_mismatch_is_reported() {
        let t = Tower::new(2).unwrap();
        assert_eq!(t.mul(&t.one(1), &t.one(2)), Err(TowerError::LevelMismatch(1, 2)));
    }
}
