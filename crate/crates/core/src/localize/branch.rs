use std::collections::HashMap;
use std::sync::Arc;

use super::series::Laurent;
use super::{LocalizeError, MAX_PRECISION};
use crate::ffield::{Gf, SmallField};
use crate::tower::Tower;

/// Where a place of F_m lies over the rational function field F_0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasePoint {
    Infinity,
    Finite(Gf),
}

/// Classification of a bad place. `S(0)` marks the totally ramified places
/// over x_0 = α with α ∈ Ω \ {0}; `S(t)` for t ≥ 1 the places over x_0 = 0
/// where x_t is the first coordinate with value in Ω \ {0} (t = m+1 if none).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchTag {
    Infinity,
    S(usize),
}

/// One place of F_m over Ω ∪ {∞}: Laurent expansions of x_0..x_m in a local
/// parameter, with the ramification index and residue degree over F_0.
#[derive(Clone, Debug)]
pub struct BranchExpansion {
    pub level: usize,
    pub base: BasePoint,
    pub ramification: u64,
    pub residue_degree: u32,
    pub tag: BranchTag,
    pub xs: Vec<Laurent>,
}

/// All bad places of one level, one representative per Frobenius orbit of
/// geometric branches. Coefficients live in `field`, an extension of F_{q²}.
#[derive(Clone, Debug)]
pub struct BranchSet {
    pub level: usize,
    pub precision: i64,
    pub field: Arc<SmallField>,
    pub branches: Vec<BranchExpansion>,
    pub geometric: usize,
}

impl BranchSet {
    pub fn infinity(&self) -> &BranchExpansion {
        self.branches.iter().find(|b| b.tag == BranchTag::Infinity).expect("P_∞ is always present")
    }

    pub fn infinity_index(&self) -> usize {
        self.branches.iter().position(|b| b.tag == BranchTag::Infinity).unwrap()
    }
}

struct Geo {
    base: BasePoint,
    e: u64,
    xs: Vec<Laurent>,
}

struct Ctx<'a> {
    f: &'a SmallField,
    q: u64,
    roots: &'a [Vec<Gf>],
    prec: i64,
}

impl Ctx<'_> {
    fn qth_root(&self, a: Gf) -> Gf {
        self.f.pow(a, self.f.size() as u64 / self.q)
    }

    fn lift(&self, g: Geo) -> Result<Vec<Geo>, LocalizeError> {
        let f = self.f;
        let q = self.q;
        // Exact coordinates are cut to a working precision proportional to
        // the ramification so that inverses stay finite.
        let xi = &g.xs.last().unwrap().truncate(self.prec.saturating_mul(g.e as i64));
        let den = xi.pow(f, q - 1).add(f, &Laurent::constant(Gf::ONE));
        let den_inv = den.inv(f, 0).ok_or(LocalizeError::Precision)?;
        let c = xi.frob_pow(f, q).mul(f, &den_inv);
        let mut t = Laurent::zero();
        let mut cp = c;
        loop {
            let v = match cp.valuation() {
                Some(v) => v,
                None if cp.prec() > 0 => cp.prec(),
                None => return Err(LocalizeError::Precision),
            };
            if v < 0 {
                let lead = cp.lead().unwrap();
                if v % q as i64 == 0 {
                    let gam = self.qth_root(lead);
                    let m1 = Laurent::mono(gam, v / q as i64);
                    t = t.add(f, &m1);
                    cp = cp.sub(f, &Laurent::mono(f.pow(gam, q), v)).sub(f, &m1);
                } else if v == -1 {
                    return self.ramify(g, t, cp);
                } else {
                    return Err(LocalizeError::UnexpectedPole(v));
                }
            } else {
                if cp.prec() < 1 {
                    return Err(LocalizeError::Precision);
                }
                let c0 = cp.coef(0);
                let sols = &self.roots[c0.0 as usize];
                if sols.is_empty() {
                    return Err(LocalizeError::NeedExtension);
                }
                let cpp = cp.sub(f, &Laurent::constant(c0));
                // T'' = cpp − T''^q, i.e. the alternating sum of cpp^{q^k}.
                let mut tpp = Laurent::big_o(cpp.prec());
                let mut term = cpp.clone();
                let mut sign = false;
                while term.valuation().is_some_and(|v| v < cpp.prec()) {
                    tpp = if sign { tpp.sub(f, &term) } else { tpp.add(f, &term) };
                    term = term.frob_pow(f, q);
                    sign = !sign;
                }
                let base = t.add(f, &tpp);
                return Ok(sols
                    .iter()
                    .map(|&d| {
                        let mut xs = g.xs.clone();
                        xs.push(base.add(f, &Laurent::constant(d)));
                        Geo { base: g.base, e: g.e, xs }
                    })
                    .collect());
            }
        }
    }

    /// y^q + y = cp with v(cp) = −1: the new parameter σ satisfies
    /// 1/cp = σ^q/(1+σ^{q−1}) and y = 1/σ.
    fn ramify(&self, g: Geo, t: Laurent, cp: Laurent) -> Result<Vec<Geo>, LocalizeError> {
        let f = self.f;
        let q = self.q;
        let h = cp.inv(f, 0).ok_or(LocalizeError::Precision)?;
        if h.prec() < 2 {
            return Err(LocalizeError::Precision);
        }
        let target = h.prec().saturating_mul(q as i64) + q as i64;
        let one = Laurent::constant(Gf::ONE);
        let r_den = one.add(f, &Laurent::mono(Gf::ONE, q as i64 - 1)).truncate(target);
        let r = Laurent::mono(Gf::ONE, q as i64).mul(f, &r_den.inv(f, 0).unwrap());
        let hinv = h.revert(f, h.prec());
        let sn = hinv.compose(f, &r);
        let mut xs: Vec<Laurent> = g.xs.iter().map(|x| x.compose(f, &sn)).collect();
        let top = t.compose(f, &sn).add(f, &Laurent::mono(Gf::ONE, -1));
        xs.push(top);
        Ok(vec![Geo { base: g.base, e: g.e * q, xs }])
    }
}

fn classify(tower: &Tower, g: &Geo) -> BranchTag {
    match g.base {
        BasePoint::Infinity => BranchTag::Infinity,
        BasePoint::Finite(a) if !a.is_zero() => BranchTag::S(0),
        BasePoint::Finite(_) => {
            let om = tower.omega();
            for (t, x) in g.xs.iter().enumerate().skip(1) {
                if x.valuation() == Some(0) {
                    let c = x.coef(0);
                    if !c.is_zero() && om.contains(&c) {
                        return BranchTag::S(t);
                    }
                }
            }
            BranchTag::S(g.xs.len())
        }
    }
}

pub(crate) fn build(
    tower: &Tower,
    field: &Arc<SmallField>,
    level: usize,
    prec: i64,
) -> Result<BranchSet, LocalizeError> {
    let f = &**field;
    let q = tower.q();
    let mut roots = vec![Vec::new(); f.size() as usize];
    for x in f.elements() {
        roots[f.add(f.pow(x, q), x).0 as usize].push(x);
    }
    let mut starts = vec![BasePoint::Infinity];
    starts.extend(tower.omega().iter().map(|&a| BasePoint::Finite(a)));
    // Each base point gets its own precision schedule; the deep unramified
    // branches over 0 often need far more terms than the ramified ones.
    let mut cur = Vec::new();
    for start in starts {
        let mut p = prec;
        loop {
            let ctx = Ctx { f, q, roots: &roots, prec: p };
            let x0 = match start {
                BasePoint::Infinity => Laurent::new(-1, vec![Gf::ONE], p),
                BasePoint::Finite(a) => Laurent::new(0, vec![a, Gf::ONE], p),
            };
            let mut layer = vec![Geo { base: start, e: 1, xs: vec![x0] }];
            let res: Result<(), LocalizeError> = (|| {
                for _ in 0..level {
                    let mut next = Vec::new();
                    for g in layer.drain(..) {
                        next.extend(ctx.lift(g)?);
                    }
                    layer = next;
                }
                Ok(())
            })();
            match res {
                Ok(()) => {
                    cur.extend(layer);
                    break;
                }
                Err(LocalizeError::Precision) if p < MAX_PRECISION => p *= 2,
                Err(e) => return Err(e),
            }
        }
    }

    let full = q.pow(level as u32);
    let mut per_base: HashMap<BasePoint, u64> = HashMap::new();
    for g in &cur {
        *per_base.entry(g.base).or_default() += g.e;
    }
    if per_base.len() != tower.omega().len() + 1 || per_base.values().any(|&s| s != full) {
        return Err(LocalizeError::FiberMismatch);
    }

    let qq = q * q;
    let index: HashMap<&Vec<Laurent>, usize> = cur.iter().enumerate().map(|(i, g)| (&g.xs, i)).collect();
    let mut seen = vec![false; cur.len()];
    let mut branches = Vec::new();
    for i in 0..cur.len() {
        if seen[i] {
            continue;
        }
        seen[i] = true;
        let mut size = 1u32;
        if f.size() as u64 > qq {
            let mut xs = cur[i].xs.clone();
            loop {
                xs = xs.iter().map(|x| x.map_coeffs(|c| f.pow(c, qq))).collect();
                let j = *index.get(&xs).ok_or(LocalizeError::Precision)?;
                if j == i {
                    break;
                }
                seen[j] = true;
                size += 1;
            }
        }
        branches.push(BranchExpansion {
            level,
            base: cur[i].base,
            ramification: cur[i].e,
            residue_degree: size,
            tag: classify(tower, &cur[i]),
            xs: cur[i].xs.clone(),
        });
    }
    let mut per_base: HashMap<BasePoint, u64> = HashMap::new();
    for b in &branches {
        *per_base.entry(b.base).or_default() += b.ramification * b.residue_degree as u64;
    }
    if per_base.values().any(|&s| s != full) {
        return Err(LocalizeError::FiberMismatch);
    }
    Ok(BranchSet { level, precision: prec, field: field.clone(), branches, geometric: cur.len() })
}
