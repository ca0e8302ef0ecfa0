//! Interpolation decoding: parameter selection, the implicit constraint
//! matrix and its kernel, reduction at a place of large degree, and the
//! list and unique decoders.

mod lift;
mod wiedemann;

use std::collections::BTreeSet;

use rand::RngCore;
use serde::Serialize;
use thiserror::Error;

use crate::agcode::{CodeError, CodeInstance, CodeParams};
use crate::fastenc::{encode, encode_any, EvalTable, FastEncError};
use crate::ffield::{poly, FieldError, FieldOps, Gf};
use crate::linalg::Matrix;

pub use lift::{build_lift_tables, find_place_of_degree, DegreePlace, LiftTables};
pub use wiedemann::{berlekamp_massey, dense_nullvector, wiedemann_nullvector, MatVec};

/// Below this block length the constraint system is solved densely.
pub const DENSE_LIMIT: usize = 300;
pub const DEFAULT_RETRIES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("infeasible decoder parameters: {0}")]
    Infeasible(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("retry cap exceeded in {0}")]
    RetryCap(&'static str),
    #[error("evaluation at the lifting place has only {got} pivots, need {want}")]
    PivotDeficiency { got: usize, want: usize },
    #[error("interpolation result violates {0} constraints")]
    Unverified(usize),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Encode(#[from] FastEncError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Unique,
    List,
    Explicit { ell: u64, b: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecoderParams {
    pub ell: u64,
    #[serde(rename = "B")]
    pub b: u64,
    /// w_j = B − (ℓ+1)·deg G − (K−1)·j.
    pub weights: Vec<i64>,
}

impl DecoderParams {
    fn new(p: &CodeParams, ell: u64, b: u64) -> DecoderParams {
        let weights = (0..=ell)
            .map(|j| b as i64 - ((ell + 1) * p.deg_g) as i64 - ((p.dim - 1) * j) as i64)
            .collect();
        DecoderParams { ell, b, weights }
    }

    /// Σ_j max(w_j + 1, 0): the number of interpolation unknowns.
    pub fn unknowns(&self) -> usize {
        self.weights.iter().map(|&w| (w + 1).max(0) as usize).sum()
    }

    pub fn max_weight(&self) -> i64 {
        self.weights.iter().copied().max().unwrap_or(-1)
    }

    /// Offsets of each a_j inside the stacked unknown vector.
    fn offsets(&self) -> Vec<usize> {
        let mut o = vec![0];
        for &w in &self.weights {
            o.push(o.last().unwrap() + (w + 1).max(0) as usize);
        }
        o
    }

    /// B ≥ (N+1)/(ℓ+1) + ℓ(K−1+2·deg G)/2 + deg G − 1, in integers.
    pub fn feasible(&self, p: &CodeParams) -> bool {
        let (n, k, g) = (p.len as i128, p.dim as i128, p.deg_g as i128);
        let (l, b) = (self.ell as i128, self.b as i128);
        let lhs = 2 * (l + 1) * b;
        let rhs = 2 * (n + 1) + (l + 1) * l * (k - 1 + 2 * g) + 2 * (l + 1) * (g - 1);
        lhs >= rhs && self.unknowns() > p.len as usize
    }

    /// Errors the guarantee covers: N − B − 1.
    pub fn radius(&self, p: &CodeParams) -> u64 {
        p.len.saturating_sub(self.b + 1)
    }
}

pub fn choose_params(p: &CodeParams, mode: Mode) -> Result<DecoderParams, DecodeError> {
    let (n, k, g) = (p.len, p.dim, p.deg_g);
    let dp = match mode {
        Mode::Unique => DecoderParams::new(p, 1, (n + k) / 2 + 2 * g),
        Mode::List => {
            let denom = (k - 1 + 2 * g) as f64;
            let ell = ((2.0 * n as f64 / denom).sqrt().floor() as u64).max(1);
            let b = (2.0 * n as f64 * denom).sqrt().ceil() as u64 + g;
            DecoderParams::new(p, ell, b)
        }
        Mode::Explicit { ell, b } => {
            if ell == 0 {
                return Err(DecodeError::Infeasible("ℓ must be at least 1".into()));
            }
            DecoderParams::new(p, ell, b)
        }
    };
    if !dp.feasible(p) {
        return Err(DecodeError::Infeasible(format!(
            "ℓ = {}, B = {} violates B ≥ (N+1)/(ℓ+1) + ℓ(K−1+2degG)/2 + degG − 1 or leaves too few unknowns",
            dp.ell, dp.b
        )));
    }
    Ok(dp)
}

fn split<'a>(params: &DecoderParams, a: &'a [Gf]) -> Vec<&'a [Gf]> {
    let o = params.offsets();
    (0..params.weights.len()).map(|j| &a[o[j]..o[j + 1]]).collect()
}

/// (M a)_i = Σ_j y_i^j · (Σ_r a_{j,r} f_r(P_i)), one fast encoding per j.
pub fn blackbox_matvec(
    code: &CodeInstance,
    table: &EvalTable,
    y: &[Gf],
    params: &DecoderParams,
    a: &[Gf],
) -> Result<Vec<Gf>, DecodeError> {
    let f = &**code.tower().field();
    let n = code.params.len as usize;
    if y.len() != n || a.len() != params.unknowns() {
        return Err(DecodeError::Shape(format!("y has {} entries, a has {}", y.len(), a.len())));
    }
    let mut out = vec![Gf::ZERO; n];
    let mut ypow = vec![Gf::ONE; n];
    for (j, aj) in split(params, a).into_iter().enumerate() {
        if j > 0 {
            for (p, &yi) in ypow.iter_mut().zip(y) {
                *p = f.mul(*p, yi);
            }
        }
        if aj.iter().all(|x| x.is_zero()) {
            continue;
        }
        let e = encode_any(code, table, aj)?;
        for i in 0..n {
            out[i] = f.add(out[i], f.mul(ypow[i], e[i]));
        }
    }
    Ok(out)
}

/// M written out, from direct evaluations; for small instances and checks.
pub fn dense_matrix(code: &CodeInstance, y: &[Gf], params: &DecoderParams) -> Result<Matrix, DecodeError> {
    let f = &**code.tower().field();
    let n = code.params.len as usize;
    let cols = params.unknowns();
    let count = (params.max_weight() + 1).max(0) as u64;
    let gen = code.generator_columns(count)?;
    let o = params.offsets();
    let mut m = Matrix::zeros(n, cols);
    for i in 0..n {
        let mut yp = Gf::ONE;
        for (j, &w) in params.weights.iter().enumerate() {
            if j > 0 {
                yp = f.mul(yp, y[i]);
            }
            for r in 0..(w + 1).max(0) as usize {
                m[(i, o[j] + r)] = f.mul(yp, gen[i * count as usize + r]);
            }
        }
    }
    Ok(m)
}

/// H(T) = Σ_j u_j T^j with u_j = Σ_{r ≤ w_j} a_{j,r} f_r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationPoly {
    pub coeffs: Vec<Vec<Gf>>,
}

impl InterpolationPoly {
    pub fn flat(&self) -> Vec<Gf> {
        self.coeffs.concat()
    }
}

/// A nonzero H vanishing at every (P_i, y_i), checked by one last matvec.
pub fn interpolate(
    code: &CodeInstance,
    table: &EvalTable,
    y: &[Gf],
    params: &DecoderParams,
    rng: &mut dyn RngCore,
) -> Result<InterpolationPoly, DecodeError> {
    let f = &**code.tower().field();
    let n = code.params.len as usize;
    if y.len() != n {
        return Err(DecodeError::Shape(format!("received word has {} symbols, expected {n}", y.len())));
    }
    let cols = params.unknowns();
    let a = if n < DENSE_LIMIT {
        let m = dense_matrix(code, y, params)?;
        dense_nullvector(f, &m, rng).ok_or(DecodeError::Infeasible("constraint matrix has full column rank".into()))?
    } else {
        let mut mv = |x: &[Gf]| blackbox_matvec(code, table, y, params, x);
        wiedemann_nullvector(f, &mut mv, n, cols, rng, DEFAULT_RETRIES)?
    };
    let res = blackbox_matvec(code, table, y, params, &a)?;
    let bad = res.iter().filter(|x| !x.is_zero()).count();
    if bad > 0 || a.iter().all(|x| x.is_zero()) {
        return Err(DecodeError::Unverified(bad));
    }
    Ok(InterpolationPoly { coeffs: split(params, &a).into_iter().map(<[Gf]>::to_vec).collect() })
}

/// Number of positions where the two words agree.
pub fn agreement(a: &[Gf], b: &[Gf]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub message: Vec<u16>,
    pub agreement: usize,
}

fn to_u16(v: &[Gf]) -> Vec<u16> {
    v.iter().map(|g| g.0).collect()
}

/// Re-encodes `v` and keeps it if it agrees with y in more than B places.
fn verify(
    code: &CodeInstance,
    table: &EvalTable,
    y: &[Gf],
    b: u64,
    v: &[Gf],
) -> Result<Option<Candidate>, DecodeError> {
    let c = encode(code, table, v)?;
    let agr = agreement(&c, y);
    Ok((agr as u64 > b).then(|| Candidate { message: to_u16(v), agreement: agr }))
}

/// Reduces H at the lifting place; None when every coefficient vanishes
/// there.
fn reduced(lift: &LiftTables, h: &InterpolationPoly) -> Option<Vec<Vec<Gf>>> {
    let ext = &*lift.place.ext;
    let mut red: Vec<Vec<Gf>> = h.coeffs.iter().map(|a| lift.combine(a)).collect();
    while red.last().is_some_and(|c| ext.is_zero(c)) {
        red.pop();
    }
    (!red.is_empty()).then_some(red)
}

pub fn list_decode(
    code: &CodeInstance,
    table: &EvalTable,
    lift: &LiftTables,
    params: &DecoderParams,
    y: &[Gf],
    rng: &mut dyn RngCore,
) -> Result<Vec<Candidate>, DecodeError> {
    let ext = &*lift.place.ext;
    for _ in 0..DEFAULT_RETRIES {
        let h = interpolate(code, table, y, params, rng)?;
        let Some(red) = reduced(lift, &h) else { continue };
        let mut found = BTreeSet::new();
        let mut out = Vec::new();
        if red.len() > 1 {
            for root in poly::poly_roots(ext, &red, rng)? {
                if let Some(v) = lift.lift(&root) {
                    if let Some(c) = verify(code, table, y, params.b, &v)? {
                        if found.insert(c.message.clone()) {
                            out.push(c);
                        }
                    }
                }
            }
        }
        out.sort_by(|a, b| a.message.cmp(&b.message));
        return Ok(out);
    }
    Err(DecodeError::RetryCap("list decoding reduction"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum UniqueOutcome {
    Decoded(Candidate),
    Declined,
}

/// ℓ = 1: the root −u_0(P)/u_1(P), lifted and verified.
pub fn unique_decode(
    code: &CodeInstance,
    table: &EvalTable,
    lift: &LiftTables,
    params: &DecoderParams,
    y: &[Gf],
    rng: &mut dyn RngCore,
) -> Result<UniqueOutcome, DecodeError> {
    if params.ell != 1 {
        return Err(DecodeError::Infeasible("unique decoding uses ℓ = 1".into()));
    }
    let ext = &*lift.place.ext;
    for _ in 0..DEFAULT_RETRIES {
        let h = interpolate(code, table, y, params, rng)?;
        let u0 = lift.combine(&h.coeffs[0]);
        let u1 = lift.combine(&h.coeffs[1]);
        let Some(u1i) = ext.inv(&u1) else { continue };
        let root = ext.neg(&ext.mul(&u0, &u1i));
        return Ok(match lift.lift(&root) {
            Some(v) => match verify(code, table, y, params.b, &v)? {
                Some(c) => UniqueOutcome::Decoded(c),
                None => UniqueOutcome::Declined,
            },
            None => UniqueOutcome::Declined,
        });
    }
    Err(DecodeError::RetryCap("unique decoding: u_1 vanishes at the lifting place"))
}

#[cfg(test)]
mod tests;
