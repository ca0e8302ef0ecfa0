//! Local expansions at the places of F_m over x_0 ∈ Ω ∪ {∞}, valuations,
//! weights, and a pole-cancelling construction of regular functions of
//! prescribed weight.

mod branch;
pub mod series;

use std::collections::HashMap;
use std::sync::Arc;

use rand::RngCore;
use thiserror::Error;

use crate::ffield::{FieldError, FieldOps, Gf, SmallField};
use crate::linalg::Matrix;
use crate::tower::{RatFn, Tower, TowerError, TowerFunction};

pub use branch::{BasePoint, BranchExpansion, BranchSet, BranchTag};
pub use series::{Laurent, EXACT};

const START_PRECISION: i64 = 24;
const MAX_PRECISION: i64 = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalizeError {
    #[error("series precision insufficient")]
    Precision,
    #[error("precision limit reached without determining the result")]
    PrecisionLimit,
    #[error("branch constants need a larger coefficient field")]
    NeedExtension,
    #[error("unexpected pole order {0} while lifting a branch")]
    UnexpectedPole(i64),
    #[error("fiber degrees do not add up to the extension degree")]
    FiberMismatch,
    #[error("the zero function has infinite valuation")]
    ZeroFunction,
    #[error("no regular function of weight {0} in the candidate space")]
    BasisExhausted(u64),
    #[error("level {0} out of range")]
    BadLevel(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Computes the bad places of F_level, enlarging the constant field and the
/// precision as needed.
pub fn bad_branches(tower: &Tower, level: usize, precision: i64) -> Result<BranchSet, LocalizeError> {
    let p = tower.p() as u32;
    let mut degrees = vec![1u32, p, p * p];
    degrees.dedup();
    for d in degrees {
        let field = if d == 1 {
            tower.field().clone()
        } else {
            match tower.field().extension(d) {
                Ok(f) => Arc::new(f),
                Err(FieldError::TooLarge(_)) => break,
                Err(e) => return Err(e.into()),
            }
        };
        match build_with_retries(tower, &field, level, precision.max(1)) {
            Err(LocalizeError::NeedExtension) => continue,
            r => return r,
        }
    }
    Err(LocalizeError::NeedExtension)
}

fn build_with_retries(
    tower: &Tower,
    field: &Arc<SmallField>,
    level: usize,
    mut prec: i64,
) -> Result<BranchSet, LocalizeError> {
    loop {
        match branch::build(tower, field, level, prec) {
            Err(LocalizeError::Precision) if prec < MAX_PRECISION => prec *= 2,
            Err(LocalizeError::Precision) => return Err(LocalizeError::PrecisionLimit),
            r => return r,
        }
    }
}

/// Laurent expansion of f[shift] at a branch of F_level.
pub fn function_series(
    field: &SmallField,
    q: u64,
    br: &BranchExpansion,
    f: &TowerFunction,
    shift: usize,
) -> Result<Laurent, LocalizeError> {
    let m = f.level();
    if shift + m > br.level {
        return Err(LocalizeError::BadLevel(shift + m));
    }
    if f.is_zero() {
        return Err(LocalizeError::ZeroFunction);
    }
    let xs = &br.xs[shift..=shift + m];
    let maxdeg = f.coeffs().iter().map(|r| r.num.len().max(r.den.len())).max().unwrap_or(1);
    let mut p0 = vec![Laurent::constant(Gf::ONE)];
    for k in 1..maxdeg {
        let next = p0[k - 1].mul(field, &xs[0]);
        p0.push(next);
    }
    let qu = q as usize;
    let pk: Vec<Vec<Laurent>> = (1..=m)
        .map(|k| {
            let mut v = vec![Laurent::constant(Gf::ONE)];
            for e in 1..qu {
                let next = v[e - 1].mul(field, &xs[k]);
                v.push(next);
            }
            v
        })
        .collect();
    let lin = |c: &[Gf]| {
        let mut acc = Laurent::zero();
        for (k, &a) in c.iter().enumerate() {
            if !a.is_zero() {
                acc = acc.add(field, &p0[k].scale(field, a));
            }
        }
        acc
    };
    let mut den_cache: HashMap<&[Gf], Laurent> = HashMap::new();
    let mut acc = Laurent::zero();
    for (e, r) in f.coeffs().iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        let mut term = lin(&r.num);
        if !r.is_polynomial() {
            let di = match den_cache.get(r.den.as_slice()) {
                Some(d) => d.clone(),
                None => {
                    let d = lin(&r.den).inv(field, 0).ok_or(LocalizeError::Precision)?;
                    den_cache.insert(r.den.as_slice(), d.clone());
                    d
                }
            };
            term = term.mul(field, &di);
        }
        let mut rest = e;
        for pw in &pk {
            let ek = rest % qu;
            rest /= qu;
            if ek > 0 {
                term = term.mul(field, &pw[ek]);
            }
        }
        acc = acc.add(field, &term);
    }
    Ok(acc)
}

/// Owns the branch sets of each level and raises their precision on demand.
/// Not meant to be shared across threads while refining.
pub struct Localizer {
    tower: Arc<Tower>,
    sets: HashMap<usize, BranchSet>,
}

impl Localizer {
    pub fn new(tower: Arc<Tower>) -> Localizer {
        Localizer { tower, sets: HashMap::new() }
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn branches(&mut self, level: usize) -> Result<&BranchSet, LocalizeError> {
        if !self.sets.contains_key(&level) {
            let s = bad_branches(&self.tower, level, START_PRECISION)?;
            self.sets.insert(level, s);
        }
        Ok(&self.sets[&level])
    }

    /// Rebuilds the branches of `level` at twice the current precision.
    pub fn refine(&mut self, level: usize) -> Result<(), LocalizeError> {
        let (field, prec) = {
            let s = self.branches(level)?;
            (s.field.clone(), s.precision)
        };
        if prec >= MAX_PRECISION {
            return Err(LocalizeError::PrecisionLimit);
        }
        let s = build_with_retries(&self.tower, &field, level, prec * 2)?;
        self.sets.insert(level, s);
        Ok(())
    }

    /// Valuation of f[shift] at branch `idx` of F_level.
    pub fn valuation(
        &mut self,
        f: &TowerFunction,
        shift: usize,
        level: usize,
        idx: usize,
    ) -> Result<i64, LocalizeError> {
        let q = self.tower.q();
        loop {
            let set = self.branches(level)?;
            match function_series(&set.field, q, &set.branches[idx], f, shift) {
                Ok(s) => {
                    if let Some(v) = s.valuation() {
                        return Ok(v);
                    }
                }
                Err(LocalizeError::Precision) => {}
                Err(e) => return Err(e),
            }
            self.refine(level)?;
        }
    }

    /// Valuations of f[shift] at every branch of F_level, in branch order.
    pub fn valuations(&mut self, f: &TowerFunction, shift: usize, level: usize) -> Result<Vec<i64>, LocalizeError> {
        let n = self.branches(level)?.branches.len();
        (0..n).map(|i| self.valuation(f, shift, level, i)).collect()
    }

    /// −v_{P_∞}(f) in F_{f.level}.
    pub fn weight(&mut self, f: &TowerFunction) -> Result<i64, LocalizeError> {
        let m = f.level();
        let idx = self.branches(m)?.infinity_index();
        Ok(-self.valuation(f, 0, m, idx)?)
    }

    /// Whether f has no pole at any bad place other than P_∞.
    pub fn is_regular(&mut self, f: &TowerFunction) -> Result<bool, LocalizeError> {
        let m = f.level();
        let inf = self.branches(m)?.infinity_index();
        let v = self.valuations(f, 0, m)?;
        Ok(v.iter().enumerate().all(|(i, &x)| i == inf || x >= 0))
    }
}

/// Regular functions g_0..g_smax of F_m with weight(g_s) = q^{m+1} + s.
#[derive(Clone, Debug)]
pub struct RegularBasis {
    pub level: usize,
    pub functions: Vec<TowerFunction>,
    pub weights: Vec<u64>,
}

/// An echelon family of regular functions of F_m with pairwise distinct
/// weights, ascending; every weight up to `wmax` attained inside the
/// candidate space appears.
#[derive(Clone, Debug)]
pub struct RegularEchelon {
    pub level: usize,
    pub elements: Vec<(u64, TowerFunction)>,
}

impl RegularEchelon {
    pub fn weights(&self) -> Vec<u64> {
        self.elements.iter().map(|e| e.0).collect()
    }
}

fn candidate_series(
    field: &SmallField,
    q: u64,
    br: &BranchExpansion,
    amax: usize,
    c: u32,
) -> Result<Vec<Laurent>, LocalizeError> {
    let m = br.level;
    let x0 = &br.xs[0];
    let d = x0.frob_pow(field, q).add(field, x0).pow(field, c as u64);
    let dinv = d.inv(field, 0).ok_or(LocalizeError::Precision)?;
    let qu = q as usize;
    let mut monos = vec![dinv];
    for k in 1..=m {
        let mut pw = vec![Laurent::constant(Gf::ONE)];
        for e in 1..qu {
            let next = pw[e - 1].mul(field, &br.xs[k]);
            pw.push(next);
        }
        let mut next = Vec::with_capacity(monos.len() * qu);
        for p in pw.iter() {
            for mo in &monos {
                next.push(mo.mul(field, p));
            }
        }
        monos = next;
    }
    let mut p0 = vec![Laurent::constant(Gf::ONE)];
    for a in 1..=amax {
        let next = p0[a - 1].mul(field, x0);
        p0.push(next);
    }
    let mut out = Vec::with_capacity(monos.len() * (amax + 1));
    for mo in &monos {
        for pa in &p0 {
            out.push(pa.mul(field, mo));
        }
    }
    Ok(out)
}

fn coords_over(field: &SmallField, c: Gf) -> Vec<Gf> {
    FieldOps::coords(field, &c)
}

/// Regular functions of F_m inside the span of
/// x_0^a x_1^{e_1}···x_m^{e_m} / (x_0^q + x_0)^c, echelonized by weight.
pub fn regular_echelon(
    loc: &mut Localizer,
    m: usize,
    wmax: u64,
    c: u32,
) -> Result<RegularEchelon, LocalizeError> {
    let tower = loc.tower.clone();
    let q = tower.q();
    let qm = q.pow(m as u32);
    let amax = (q * c as u64 + wmax.div_ceil(qm) + 2) as usize;
    let nmono = qm as usize;
    let ncand = nmono * (amax + 1);
    let fq2 = tower.field().clone();

    let (constraints, inf_rows, wall) = loop {
        let set = loc.branches(m)?;
        let field = set.field.clone();
        let inf = set.infinity_index();
        let mut rows: Vec<Vec<Gf>> = Vec::new();
        let mut ok = true;
        let mut inf_data = None;
        for (bi, br) in set.branches.iter().enumerate() {
            let cs = match candidate_series(&field, q, br, amax, c) {
                Ok(v) => v,
                Err(LocalizeError::Precision) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            };
            if bi == inf {
                if cs.iter().any(|s| s.prec() < 1) {
                    ok = false;
                    break;
                }
                inf_data = Some(cs);
                continue;
            }
            if cs.iter().any(|s| s.prec() < 0) {
                ok = false;
                break;
            }
            let vmin = cs.iter().map(|s| s.val_bound()).min().unwrap_or(0);
            for j in vmin..0 {
                let digits: Vec<Vec<Gf>> = cs.iter().map(|s| coords_over(&field, s.coef(j))).collect();
                for dg in 0..digits[0].len() {
                    let row: Vec<Gf> = digits.iter().map(|d| d[dg]).collect();
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
        if !ok {
            loc.refine(m)?;
            continue;
        }
        let cs = inf_data.unwrap();
        let wall = -cs.iter().map(|s| s.val_bound()).min().unwrap().min(0);
        let mut einf: Vec<Vec<Gf>> = Vec::with_capacity(ncand);
        for s in &cs {
            let mut row = Vec::new();
            for j in -wall..=0 {
                row.extend(coords_over(&field, s.coef(j)));
            }
            einf.push(row);
        }
        break (rows, einf, wall);
    };

    let kernel = if constraints.is_empty() {
        (0..ncand)
            .map(|i| {
                let mut v = vec![Gf::ZERO; ncand];
                v[i] = Gf::ONE;
                v
            })
            .collect()
    } else {
        Matrix::from_rows(&constraints).kernel(&fq2)
    };
    if kernel.is_empty() {
        return Ok(RegularEchelon { level: m, elements: Vec::new() });
    }
    let ecols = inf_rows[0].len();
    let digits_per = ecols / (wall as usize + 1);
    let mut aug = Matrix::zeros(kernel.len(), ecols + ncand);
    for (r, kv) in kernel.iter().enumerate() {
        for (ci, &kc) in kv.iter().enumerate() {
            if kc.is_zero() {
                continue;
            }
            for (j, &x) in inf_rows[ci].iter().enumerate() {
                if !x.is_zero() {
                    aug[(r, j)] = fq2.add(aug[(r, j)], fq2.mul(kc, x));
                }
            }
            aug[(r, ecols + ci)] = kc;
        }
    }
    let pivots = aug.rref(&fq2);
    let mut elements = Vec::new();
    for (r, &pc) in pivots.iter().enumerate() {
        assert!(pc < ecols, "expansion at P_∞ must be injective on regular functions");
        let exp = (pc / digits_per) as i64 - wall;
        let w = (-exp) as u64;
        if w > wmax {
            continue;
        }
        let combo = &aug.row(r)[ecols..];
        elements.push((w, assemble(&tower, m, combo, amax, c)));
    }
    elements.sort_by_key(|e| e.0);
    Ok(RegularEchelon { level: m, elements })
}

fn assemble(tower: &Tower, m: usize, combo: &[Gf], amax: usize, c: u32) -> TowerFunction {
    let f = &**tower.field();
    let q = tower.q() as usize;
    let mut xq = vec![Gf::ZERO; q + 1];
    xq[1] = Gf::ONE;
    xq[q] = Gf::ONE;
    let mut den = vec![Gf::ONE];
    for _ in 0..c {
        den = crate::ffield::poly::mul(f, &den, &xq);
    }
    let nmono = tower.dim(m);
    let coeffs = (0..nmono)
        .map(|e| {
            let num = combo[e * (amax + 1)..(e + 1) * (amax + 1)].to_vec();
            RatFn::new(f, num, den.clone())
        })
        .collect();
    TowerFunction::from_coeffs(m, coeffs)
}

/// Builds g_0..g_smax for F_m and verifies each one with the valuation engine.
pub fn regular_basis(loc: &mut Localizer, m: usize, smax: u64) -> Result<RegularBasis, LocalizeError> {
    let q = loc.tower.q();
    let base = q.pow(m as u32 + 1);
    let wmax = base + smax;
    let mut last_missing = base;
    for c in [1u32, 2, 4, 8] {
        let ech = regular_echelon(loc, m, wmax, c)?;
        let by_w: HashMap<u64, &TowerFunction> = ech.elements.iter().map(|(w, f)| (*w, f)).collect();
        let missing = (0..=smax).map(|s| base + s).find(|w| !by_w.contains_key(w));
        if let Some(w) = missing {
            last_missing = w;
            continue;
        }
        let functions: Vec<TowerFunction> = (0..=smax).map(|s| by_w[&(base + s)].clone()).collect();
        for (s, g) in functions.iter().enumerate() {
            let w = loc.weight(g)?;
            assert_eq!(w as u64, base + s as u64, "regular basis weight check");
            assert!(loc.is_regular(g)?, "regular basis pole check");
        }
        return Ok(RegularBasis { level: m, functions, weights: (0..=smax).map(|s| base + s).collect() });
    }
    Err(LocalizeError::BasisExhausted(last_missing))
}

/// The predicted v(f[i]) at a bad place of
/// F_{m+i} when f ∈ F_m is regular of weight r.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectedValuation {
    Exact(i64),
    Regular,
}

pub fn expected_shift_valuation(q: u64, m: usize, i: usize, tag: BranchTag, r: u64) -> ExpectedValuation {
    let u = m + i;
    match tag {
        BranchTag::Infinity => ExpectedValuation::Exact(-(r as i64)),
        BranchTag::S(t) if t < i => {
            if 2 * t <= u {
                ExpectedValuation::Exact(-(r as i64))
            } else {
                ExpectedValuation::Exact(-((r * q.pow((2 * t - u) as u32)) as i64))
            }
        }
        BranchTag::S(_) => ExpectedValuation::Regular,
    }
}

/// One row of a shifted-valuation comparison.
#[derive(Clone, Debug)]
pub struct ShiftValuation {
    pub tag: BranchTag,
    pub measured: i64,
    pub expected: ExpectedValuation,
}

impl ShiftValuation {
    pub fn holds(&self) -> bool {
        match self.expected {
            ExpectedValuation::Exact(v) => self.measured == v,
            ExpectedValuation::Regular => self.measured >= 0,
        }
    }
}

/// Measures v(f[i]) at every bad place of F_{m+i} and pairs it with the
/// predicted value for a regular f of weight r.
pub fn shift_valuations(
    loc: &mut Localizer,
    f: &TowerFunction,
    r: u64,
    i: usize,
) -> Result<Vec<ShiftValuation>, LocalizeError> {
    let m = f.level();
    let q = loc.tower.q();
    let vals = loc.valuations(f, i, m + i)?;
    let set = loc.branches(m + i)?;
    Ok(set
        .branches
        .iter()
        .zip(vals)
        .map(|(b, v)| ShiftValuation {
            tag: b.tag,
            measured: v,
            expected: expected_shift_valuation(q, m, i, b.tag, r),
        })
        .collect())
}

/// A random nonzero regular function of F_m with weight at most `wmax`,
/// together with its weight.
pub fn random_regular(
    loc: &mut Localizer,
    m: usize,
    wmax: u64,
    rng: &mut dyn RngCore,
) -> Result<(u64, TowerFunction), LocalizeError> {
    let ech = regular_echelon(loc, m, wmax, 1)?;
    if ech.elements.is_empty() {
        return Err(LocalizeError::BasisExhausted(wmax));
    }
    let tower = loc.tower.clone();
    let f = &**tower.field();
    loop {
        let mut acc = tower.zero(m);
        let mut top = None;
        for (w, g) in &ech.elements {
            let c = FieldOps::random(f, rng);
            if !c.is_zero() {
                acc = tower.add(&acc, &tower.scale(g, c))?;
                top = Some(*w);
            }
        }
        if let Some(w) = top {
            return Ok((w, acc));
        }
    }
}

#[cfg(test)]
mod tests;
