//! Encoding by block matrix products: the g-evaluation table of level n/k,
//! the index maps splitting a place of F_{i·n/k} into (α, P′, P″), the
//! level-by-level encoder, and the long-message wrapper.

mod matmul;

use std::collections::HashMap;

use thiserror::Error;

use crate::agcode::{CodeError, CodeInstance};
use crate::ffield::{Gf, SmallField};
use crate::linalg::Matrix;
use crate::tower::{code_places, TowerError};

pub use matmul::{matmul, Strategy, STRASSEN_THRESHOLD};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FastEncError {
    #[error("cannot multiply {left:?} by {right:?}")]
    Shape { left: (usize, usize), right: (usize, usize) },
    #[error("vector has length {got}, expected {want}")]
    Length { got: usize, want: usize },
    #[error("table was built for a different code (place digest mismatch)")]
    DigestMismatch,
    #[error("index map is not a bijection at level {0}")]
    NotBijective(usize),
    #[error("a basis function has a pole at a code place")]
    Pole,
    #[error(transparent)]
    Code(#[from] CodeError),
}

impl From<TowerError> for FastEncError {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::Pole => FastEncError::Pole,
            other => FastEncError::Code(CodeError::Tower(other)),
        }
    }
}

/// How the places of F_{i·m} (m = n/k) split over a middle coordinate α.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelMap {
    /// For each α (index into the places of F_0), the places Q_s of
    /// F_{(i−1)m} with top coordinate α.
    pub lower: Vec<Vec<u32>>,
    /// For each α, the index in F_{i·m} of the place (α, Q_s, R_t), stored
    /// at s·q^m + t.
    pub target: Vec<Vec<u32>>,
}

/// Precomputed evaluations g_ℓ(R) at the code places R of F_{n/k}, plus
/// the index maps of every level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalTable {
    pub q: u64,
    pub n: u64,
    pub k: u64,
    /// q^{n/k} × |places of F_{n/k}|.
    pub g: Matrix,
    /// First index of the places of F_{n/k} with x_0 = α, per α; each group
    /// has q^{n/k} members.
    pub r_start: Vec<u32>,
    /// Maps for levels i = 1..=k.
    pub levels: Vec<LevelMap>,
    pub digest: [u8; 32],
}

impl EvalTable {
    pub fn entry_count(&self) -> usize {
        self.g.rows() * self.g.cols()
    }

    /// B^α of size q^{n/k} × q^{n/k}: entry (ℓ, t) is g_ℓ(R_t^α).
    pub fn b_block(&self, alpha_idx: usize) -> Matrix {
        let b = self.g.rows();
        let start = self.r_start[alpha_idx] as usize;
        let mut out = Matrix::zeros(b, b);
        for l in 0..b {
            out.row_mut(l).copy_from_slice(&self.g.row(l)[start..start + b]);
        }
        out
    }

    fn check(&self, code: &CodeInstance) -> Result<(), FastEncError> {
        let p = &code.params;
        if (self.q, self.n, self.k) != (p.q, p.n, p.k) || self.digest != code.place_digest() {
            return Err(FastEncError::DigestMismatch);
        }
        Ok(())
    }
}

pub fn precompute_tables(code: &CodeInstance) -> Result<EvalTable, FastEncError> {
    let p = code.params;
    let tower = code.tower().clone();
    let f = &**tower.field();
    let m = p.sublevel();
    let b = p.base() as usize;
    let k = p.k as usize;

    let low = code_places(&tower, m);
    let mut g = Matrix::zeros(b, low.len());
    for (j, pt) in low.iter().enumerate() {
        for (l, gf) in code.basis().iter().enumerate() {
            g[(l, j)] = tower.evaluate(gf, f, pt)?;
        }
    }

    let base = code_places(&tower, 0);
    let alpha_idx: HashMap<Gf, usize> = base.iter().enumerate().map(|(i, c)| (c[0], i)).collect();
    let na = base.len();
    let mut r_start = vec![u32::MAX; na];
    for (j, pt) in low.iter().enumerate().rev() {
        r_start[alpha_idx[&pt[0]]] = j as u32;
    }
    let low_index: HashMap<&[Gf], usize> = low.iter().enumerate().map(|(i, c)| (c, i)).collect();

    let mut levels = Vec::with_capacity(k);
    let mut prev = base.clone();
    for i in 1..=k {
        let cur = if i == k { code.places().clone() } else { code_places(&tower, i * m) };
        let lm = (i - 1) * m;
        let mut lower = vec![Vec::new(); na];
        let mut pos_in_lower = vec![0u32; prev.len()];
        for (s, c) in prev.iter().enumerate() {
            let a = alpha_idx[&c[lm]];
            pos_in_lower[s] = lower[a].len() as u32;
            lower[a].push(s as u32);
        }
        let prev_index: HashMap<&[Gf], usize> = prev.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let nq = b.pow((i - 1) as u32);
        let mut target: Vec<Vec<u32>> = vec![vec![u32::MAX; nq * b]; na];
        let mut hits = 0usize;
        for (pi, c) in cur.iter().enumerate() {
            let a = alpha_idx[&c[lm]];
            let s = pos_in_lower[prev_index[&c[..=lm]]] as usize;
            let t = low_index[&c[lm..]] - r_start[a] as usize;
            if s >= nq || t >= b {
                return Err(FastEncError::NotBijective(i));
            }
            let slot = &mut target[a][s * b + t];
            if *slot != u32::MAX {
                return Err(FastEncError::NotBijective(i));
            }
            *slot = pi as u32;
            hits += 1;
        }
        if hits != cur.len() || lower.iter().any(|l| l.len() != nq) || target.iter().flatten().any(|&x| x == u32::MAX)
        {
            return Err(FastEncError::NotBijective(i));
        }
        levels.push(LevelMap { lower, target });
        prev = cur;
    }
    Ok(EvalTable { q: p.q, n: p.n, k: p.k, g, r_start, levels, digest: code.place_digest() })
}

/// Splits w of length b·L into the b vectors w^{(ℓ)}_j = w[j·b + ℓ].
pub fn block_decompose(w: &[Gf], b: usize, len: usize) -> Result<Vec<Vec<Gf>>, FastEncError> {
    if w.len() != b * len {
        return Err(FastEncError::Length { got: w.len(), want: b * len });
    }
    Ok((0..b).map(|l| (0..len).map(|j| w[j * b + l]).collect()).collect())
}

/// Inverse of `block_decompose`: Σ_ℓ ι_ℓ(w^{(ℓ)}) with ι_ℓ(e_j) = e_{j·b+ℓ}.
pub fn block_reassemble(blocks: &[Vec<Gf>]) -> Vec<Gf> {
    let b = blocks.len();
    let len = blocks.first().map_or(0, Vec::len);
    let mut w = vec![Gf::ZERO; b * len];
    for (l, blk) in blocks.iter().enumerate() {
        for (j, &x) in blk.iter().enumerate() {
            w[j * b + l] = x;
        }
    }
    w
}

/// Evaluations of ψ(v) at every code place of F_n, for |v| = q^n.
pub fn matrix_encode(code: &CodeInstance, table: &EvalTable, v: &[Gf]) -> Result<Vec<Gf>, FastEncError> {
    let qn = code.params.qn() as usize;
    if v.len() != qn {
        return Err(FastEncError::Length { got: v.len(), want: qn });
    }
    table.check(code)?;
    Ok(run_levels(code.tower().field(), table, level_zero(code, qn, v, 1)))
}

/// The full encoder for |v| = K.
pub fn encode(code: &CodeInstance, table: &EvalTable, v: &[Gf]) -> Result<Vec<Gf>, FastEncError> {
    let want = code.params.dim as usize;
    if v.len() != want {
        return Err(FastEncError::Length { got: v.len(), want });
    }
    encode_any(code, table, v)
}

/// Encodes Σ_r v_r f_r for a coefficient vector of any length. Chunk s of
/// q^n coefficients carries the factor x_0^s; since x_0 is the coordinate
/// fixed by the level-one split, that factor is applied to the level-zero
/// scalars before the products rather than to each chunk's output.
pub fn encode_any(code: &CodeInstance, table: &EvalTable, v: &[Gf]) -> Result<Vec<Gf>, FastEncError> {
    table.check(code)?;
    let qn = code.params.qn() as usize;
    let chunks = v.len().div_ceil(qn).max(1);
    Ok(run_levels(code.tower().field(), table, level_zero(code, qn, v, chunks)))
}

/// The literal chunked form: one `matrix_encode` per chunk of q^n
/// coefficients, scaled pointwise by α_0(P)^s and summed.
pub fn encode_chunked(code: &CodeInstance, table: &EvalTable, v: &[Gf]) -> Result<Vec<Gf>, FastEncError> {
    let f = &**code.tower().field();
    let qn = code.params.qn() as usize;
    let places = code.places();
    let mut out = vec![Gf::ZERO; places.len()];
    for (s, chunk) in v.chunks(qn).enumerate() {
        let mut c = chunk.to_vec();
        c.resize(qn, Gf::ZERO);
        let e = matrix_encode(code, table, &c)?;
        for (i, pt) in places.iter().enumerate() {
            out[i] = f.add(out[i], f.mul(f.pow(pt[0], s as u64), e[i]));
        }
    }
    Ok(out)
}

/// E_0[u][α] = Σ_s v[s·q^n + u]·α^s, laid out u-major over the places of F_0.
fn level_zero(code: &CodeInstance, qn: usize, v: &[Gf], chunks: usize) -> Vec<Gf> {
    let f = &**code.tower().field();
    let base = code_places(code.tower(), 0);
    let na = base.len();
    let mut e0 = vec![Gf::ZERO; qn * na];
    for u in 0..qn {
        for (ai, c) in base.iter().enumerate() {
            let a = c[0];
            let mut acc = Gf::ZERO;
            for s in (0..chunks).rev() {
                acc = f.mul(acc, a);
                if let Some(&x) = v.get(s * qn + u) {
                    acc = f.add(acc, x);
                }
            }
            e0[u * na + ai] = acc;
        }
    }
    e0
}

/// Levels 1..=k. Before level i the buffer holds, for every u below
/// q^{(k−i+1)m}, the values at the places of F_{(i−1)m} of the function
/// encoded by the coefficients v[j·q^{(k−i+1)m} + u]. Level i multiplies the
/// stacked matrix Ā^α (rows (u, s), columns ℓ) by B^α for each α.
fn run_levels(field: &SmallField, table: &EvalTable, e0: Vec<Gf>) -> Vec<Gf> {
    let b = table.g.rows();
    let k = table.k as usize;
    let na = table.r_start.len();
    let mut prev = e0;
    let mut prev_len = na;
    for (i, lm) in table.levels.iter().enumerate() {
        let i = i + 1;
        let count = b.pow((k - i) as u32);
        let nq = b.pow((i - 1) as u32);
        let cur_len = nq * b * na;
        let mut cur = vec![Gf::ZERO; count * cur_len];
        for a in 0..na {
            let lower = &lm.lower[a];
            let mut abar = Matrix::zeros(count * nq, b);
            for u in 0..count {
                for (s, &qs) in lower.iter().enumerate() {
                    let row = abar.row_mut(u * nq + s);
                    for (l, x) in row.iter_mut().enumerate() {
                        *x = prev[(l * count + u) * prev_len + qs as usize];
                    }
                }
            }
            let c = matmul(field, &abar, &table.b_block(a), Strategy::default()).expect("conformable by construction");
            let tgt = &lm.target[a];
            for u in 0..count {
                for s in 0..nq {
                    let crow = c.row(u * nq + s);
                    for t in 0..b {
                        cur[u * cur_len + tgt[s * b + t] as usize] = crow[t];
                    }
                }
            }
        }
        prev = cur;
        prev_len = cur_len;
    }
    prev
}

#[cfg(test)]
mod tests;
