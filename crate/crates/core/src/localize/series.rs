use crate::ffield::{poly, Gf, SmallField};

/// Absolute precision of a series known exactly.
pub const EXACT: i64 = i64::MAX / 4;

fn clamp(p: i64) -> i64 {
    if p > EXACT / 2 {
        EXACT
    } else {
        p
    }
}

/// A truncated Laurent series Σ c_j t^j over a table field. Coefficients are
/// known for every exponent below `prec`; `coeffs[i]` is the coefficient of
/// t^{val+i} and `coeffs[0]` is nonzero whenever `coeffs` is nonempty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Laurent {
    val: i64,
    coeffs: Vec<Gf>,
    prec: i64,
}

impl Laurent {
    pub fn new(val: i64, mut coeffs: Vec<Gf>, prec: i64) -> Laurent {
        let prec = clamp(prec);
        let lead = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        let val = val + lead as i64;
        if prec < EXACT {
            let keep = (prec - val).max(0) as usize;
            coeffs.truncate(keep);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Laurent { val: prec, coeffs, prec };
        }
        Laurent { val, coeffs, prec }
    }

    pub fn zero() -> Laurent {
        Laurent { val: EXACT, coeffs: Vec::new(), prec: EXACT }
    }

    /// O(t^prec).
    pub fn big_o(prec: i64) -> Laurent {
        Laurent::new(prec, Vec::new(), prec)
    }

    pub fn constant(c: Gf) -> Laurent {
        Laurent::mono(c, 0)
    }

    pub fn mono(c: Gf, e: i64) -> Laurent {
        Laurent::new(e, vec![c], EXACT)
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// The valuation, when some nonzero coefficient is known.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Lower bound on the valuation (the precision when nothing is known).
    pub fn val_bound(&self) -> i64 {
        self.val
    }

    pub fn lead(&self) -> Option<Gf> {
        self.coeffs.first().copied()
    }

    pub fn coef(&self, e: i64) -> Gf {
        let i = e - self.val;
        if i >= 0 && (i as usize) < self.coeffs.len() {
            self.coeffs[i as usize]
        } else {
            Gf::ZERO
        }
    }

    pub fn truncate(&self, prec: i64) -> Laurent {
        if prec >= self.prec {
            return self.clone();
        }
        Laurent::new(self.val, self.coeffs.clone(), prec)
    }

    pub fn add(&self, f: &SmallField, b: &Laurent) -> Laurent {
        let prec = self.prec.min(b.prec);
        if self.coeffs.is_empty() {
            return b.truncate(prec);
        }
        if b.coeffs.is_empty() {
            return self.truncate(prec);
        }
        let lo = self.val.min(b.val);
        let mut hi = (self.val + self.coeffs.len() as i64).max(b.val + b.coeffs.len() as i64);
        hi = hi.min(prec);
        if hi <= lo {
            return Laurent::big_o(prec);
        }
        let mut c = vec![Gf::ZERO; (hi - lo) as usize];
        for (i, &x) in self.coeffs.iter().enumerate() {
            let k = self.val - lo + i as i64;
            if k < c.len() as i64 {
                c[k as usize] = x;
            }
        }
        for (i, &x) in b.coeffs.iter().enumerate() {
            let k = b.val - lo + i as i64;
            if k < c.len() as i64 {
                c[k as usize] = f.add(c[k as usize], x);
            }
        }
        Laurent::new(lo, c, prec)
    }

    pub fn neg(&self, f: &SmallField) -> Laurent {
        Laurent {
            val: self.val,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, f: &SmallField, b: &Laurent) -> Laurent {
        self.add(f, &b.neg(f))
    }

    pub fn scale(&self, f: &SmallField, c: Gf) -> Laurent {
        if c.is_zero() {
            return Laurent::big_o(self.prec);
        }
        Laurent {
            val: self.val,
            coeffs: self.coeffs.iter().map(|&x| f.mul(x, c)).collect(),
            prec: self.prec,
        }
    }

    /// Multiplication by t^k.
    pub fn shift_exp(&self, k: i64) -> Laurent {
        Laurent::new(self.val + k, self.coeffs.clone(), clamp(self.prec + k))
    }

    pub fn mul(&self, f: &SmallField, b: &Laurent) -> Laurent {
        let prec = clamp((self.prec + b.val).min(b.prec + self.val));
        if self.coeffs.is_empty() || b.coeffs.is_empty() {
            return Laurent::big_o(prec);
        }
        let v = self.val + b.val;
        let full = self.coeffs.len() + b.coeffs.len() - 1;
        let n = if prec < EXACT { full.min((prec - v).max(0) as usize) } else { full };
        if n == 0 {
            return Laurent::big_o(prec);
        }
        let a = &self.coeffs[..self.coeffs.len().min(n)];
        let bb = &b.coeffs[..b.coeffs.len().min(n)];
        let mut c = poly::mul(f, a, bb);
        c.truncate(n);
        Laurent::new(v, c, prec)
    }

    pub fn square(&self, f: &SmallField) -> Laurent {
        self.mul(f, self)
    }

    pub fn pow(&self, f: &SmallField, mut e: u64) -> Laurent {
        let mut r = Laurent::constant(Gf::ONE);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(f, &b);
            }
            e >>= 1;
            if e > 0 {
                b = b.square(f);
            }
        }
        r
    }

    /// The q-th power for q a power of the characteristic, which only raises
    /// coefficients and scales exponents.
    pub fn frob_pow(&self, f: &SmallField, q: u64) -> Laurent {
        let qi = q as i64;
        if self.coeffs.is_empty() {
            return Laurent::big_o(clamp(self.prec.saturating_mul(qi)));
        }
        let mut c = vec![Gf::ZERO; (self.coeffs.len() - 1) * q as usize + 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            c[i * q as usize] = f.pow(x, q);
        }
        Laurent::new(self.val * qi, c, clamp(self.prec.saturating_mul(qi)))
    }

    /// Coefficientwise map, used for Frobenius conjugation.
    pub fn map_coeffs(&self, g: impl Fn(Gf) -> Gf) -> Laurent {
        Laurent { val: self.val, coeffs: self.coeffs.iter().map(|&c| g(c)).collect(), prec: self.prec }
    }

    /// Inverse. For an exact input the result keeps `cap` terms; for an
    /// inexact one the relative precision is preserved. `None` when no
    /// nonzero coefficient is known.
    pub fn inv(&self, f: &SmallField, cap: usize) -> Option<Laurent> {
        let c0 = *self.coeffs.first()?;
        let n = if self.is_exact() {
            if self.coeffs.len() == 1 {
                return Some(Laurent::new(-self.val, vec![f.inv(c0).unwrap()], EXACT));
            }
            cap.max(1)
        } else {
            (self.prec - self.val).max(1) as usize
        };
        let c0i = f.inv(c0).unwrap();
        let a = &self.coeffs;
        let mut r = vec![Gf::ZERO; n];
        r[0] = c0i;
        for k in 1..n {
            let mut acc = Gf::ZERO;
            for j in 1..=k.min(a.len() - 1) {
                if !a[j].is_zero() && !r[k - j].is_zero() {
                    acc = f.add(acc, f.mul(a[j], r[k - j]));
                }
            }
            r[k] = f.mul(f.neg(acc), c0i);
        }
        Some(Laurent::new(-self.val, r, -self.val + n as i64))
    }

    /// Formal derivative with respect to t.
    pub fn derivative(&self, f: &SmallField) -> Laurent {
        if self.coeffs.is_empty() {
            return Laurent::big_o(clamp(self.prec - 1));
        }
        let p = f.p() as i64;
        let c: Vec<Gf> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let e = (self.val + i as i64).rem_euclid(p);
                f.mul(x, Gf(e as u16))
            })
            .collect();
        Laurent::new(self.val - 1, c, clamp(self.prec - 1))
    }

    /// Substitutes t = s, where s has positive valuation.
    pub fn compose(&self, f: &SmallField, s: &Laurent) -> Laurent {
        let sv = s.valuation().expect("substituted series must have a known leading term");
        assert!(sv >= 1, "substituted series must have positive valuation");
        if self.coeffs.is_empty() {
            let p = if self.is_exact() { EXACT } else { clamp(self.prec.saturating_mul(sv)) };
            return Laurent::big_o(p);
        }
        let rel = self.prec - self.val;
        let tp = if self.is_exact() { EXACT } else { clamp(rel.saturating_mul(sv)) };
        // Paterson–Stockmeyer: blocks of k coefficients against s^0..s^{k−1},
        // then Horner in s^k.
        let k = ((self.coeffs.len() as f64).sqrt().ceil() as usize).max(1);
        let mut pw = vec![Laurent::constant(Gf::ONE)];
        for i in 1..=k {
            let next = pw[i - 1].mul(f, s).truncate(tp);
            pw.push(next);
        }
        let mut acc = Laurent::zero();
        for chunk in self.coeffs.chunks(k).rev() {
            let mut blk = Laurent::zero();
            for (i, &c) in chunk.iter().enumerate() {
                if !c.is_zero() {
                    blk = blk.add(f, &pw[i].scale(f, c));
                }
            }
            acc = acc.mul(f, &pw[k]).truncate(tp).add(f, &blk);
        }
        let acc = acc.truncate(tp);
        if self.val >= 0 {
            acc.mul(f, &s.pow(f, self.val as u64))
        } else {
            let sinv = s.inv(f, tp.min(4096) as usize).expect("nonzero substitution");
            acc.mul(f, &sinv.pow(f, (-self.val) as u64))
        }
    }

    /// For h = h_1 t + ... with h_1 ≠ 0, the series φ with h(φ(y)) = y,
    /// known to absolute precision `n` (bounded by that of h).
    pub fn revert(&self, f: &SmallField, n: i64) -> Laurent {
        assert_eq!(self.valuation(), Some(1), "reversion needs valuation one");
        let n = n.min(self.prec);
        let h1i = f.inv(self.coef(1)).unwrap();
        let dh = self.derivative(f);
        let y = Laurent::mono(Gf::ONE, 1);
        let mut phi = Laurent::new(1, vec![h1i], EXACT).truncate(n);
        let mut known = 2i64;
        loop {
            let err = self.compose(f, &phi).sub(f, &y);
            let d = dh.compose(f, &phi);
            let di = d.inv(f, n as usize).unwrap();
            phi = phi.sub(f, &err.mul(f, &di)).truncate(n);
            if known >= n {
                break;
            }
            known *= 2;
        }
        phi
    }
}
