//! The evaluation codes of the tower: parameters, the mostly regular family
//! f_r, the direct (oracle) encoder, the comparison with the
//! Gilbert-Varshamov bound, and the k = 2 systematic subcode.

mod gv;
mod subcode;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::ffield::{prime_power, FieldOps, Gf};
use crate::localize::{regular_basis, LocalizeError, Localizer, RegularBasis};
use crate::tower::{code_places, place_digest, CodePlaces, FactoredFunction, Tower, TowerError, TowerFunction};

pub use gv::{entropy, gv_compare, gv_verdict, GvReport, GvVerdict};
pub use subcode::{systematic_subcode, SubcodeReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("q = {0} is not a prime power in the supported range")]
    BadQ(u64),
    #[error("k = {0} must be at least 2")]
    SmallK(u64),
    #[error("k = {k} does not divide n = {n}")]
    KDoesNotDivideN { n: u64, k: u64 },
    #[error("n = {0} is out of range")]
    BadN(u64),
    #[error("K = {kk} outside the admissible range 1 ≤ K ≤ q^n(q²−q−kq−k+1) = {max}")]
    DimensionOutOfRange { kk: i128, max: i128 },
    #[error("index {0} is outside the message range")]
    IndexOutOfRange(u64),
    #[error("message has length {got}, expected {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("basis does not match the code: {0}")]
    BasisMismatch(String),
    #[error(transparent)]
    Localize(#[from] LocalizeError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// The arithmetic of one code of the family; no functions are built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CodeParams {
    pub q: u64,
    pub n: u64,
    pub k: u64,
    #[serde(rename = "K")]
    pub dim: u64,
    #[serde(rename = "N")]
    pub len: u64,
    #[serde(rename = "degG_bound")]
    pub deg_g: u64,
    pub g_weight: u64,
    #[serde(rename = "Dstar")]
    pub dstar: u64,
    #[serde(rename = "K_max")]
    pub dim_max: u64,
}

impl CodeParams {
    pub fn new(q: u64, n: u64, k: u64, dim: u64) -> Result<CodeParams, CodeError> {
        if !(2..=256).contains(&q) || prime_power(q).is_none() {
            return Err(CodeError::BadQ(q));
        }
        if k < 2 {
            return Err(CodeError::SmallK(k));
        }
        if n == 0 || n as usize >= crate::tower::MAX_LEVEL {
            return Err(CodeError::BadN(n));
        }
        if n % k != 0 {
            return Err(CodeError::KDoesNotDivideN { n, k });
        }
        let qn = (q as i128).checked_pow(n as u32).ok_or(CodeError::BadN(n))?;
        let (qi, ki) = (q as i128, k as i128);
        let max = qn * (qi * qi - qi - ki * qi - ki + 1);
        let len = qn * (qi * qi - qi);
        if len > u32::MAX as i128 {
            return Err(CodeError::BadN(n));
        }
        if dim == 0 || dim as i128 > max {
            return Err(CodeError::DimensionOutOfRange { kk: dim as i128, max });
        }
        let deg_g = qn * (ki * qi + ki - 1);
        let m = n / k;
        let g_weight = (1..=k).map(|i| q.pow((n - (i - 1) * m + 1) as u32)).sum();
        let dstar = len - dim as i128 - deg_g + 1;
        Ok(CodeParams {
            q,
            n,
            k,
            dim,
            len: len as u64,
            deg_g: deg_g as u64,
            g_weight,
            dstar: dstar as u64,
            dim_max: max as u64,
        })
    }

    /// Level of the regular basis, n/k.
    pub fn sublevel(&self) -> usize {
        (self.n / self.k) as usize
    }

    /// q^{n/k}, the size of the regular basis and the digit base.
    pub fn base(&self) -> u64 {
        self.q.pow(self.sublevel() as u32)
    }

    pub fn qn(&self) -> u64 {
        self.q.pow(self.n as u32)
    }

    pub fn rate(&self) -> f64 {
        self.dim as f64 / self.len as f64
    }

    pub fn delta(&self) -> f64 {
        self.dstar as f64 / self.len as f64
    }

    /// 1 − (kq+k−1)/(q²−q), the line R + δ lies on.
    pub fn line_bound(&self) -> f64 {
        let (q, k) = (self.q as f64, self.k as f64);
        1.0 - (k * q + k - 1.0) / (q * q - q)
    }

    /// K/N + D*/N ≥ 1 − (kq+k−1)/(q²−q), checked with integers only.
    pub fn rate_distance_holds(&self) -> bool {
        let (q, k) = (self.q as i128, self.k as i128);
        let lhs = (self.dim as i128 + self.dstar as i128) * (q * q - q);
        let rhs = self.len as i128 * (q * q - q - (k * q + k - 1));
        lhs >= rhs
    }

    /// Digits (r_1, ..., r_k) of r mod q^n in base q^{n/k}, most significant
    /// first, and the x_0 exponent s = ⌊r / q^n⌋.
    pub fn digits(&self, r: u64) -> (Vec<u64>, u32) {
        let qn = self.qn();
        let b = self.base();
        let s = (r / qn) as u32;
        let mut t = r % qn;
        let mut d = vec![0u64; self.k as usize];
        for i in (0..self.k as usize).rev() {
            d[i] = t % b;
            t /= b;
        }
        (d, s)
    }

    /// Predicted weight of f_r: r mod q^n plus s·q^n plus the weight of G.
    pub fn f_weight(&self, r: u64) -> u64 {
        let qn = self.qn();
        (r / qn) * qn + r % qn + self.g_weight
    }
}

/// Descriptor of f_r = x_0^s Π_i g_{r_i}[(i−1)(n/k)].
#[derive(Clone, Debug)]
pub struct MostlyRegular {
    pub r: u64,
    pub digits: Vec<u64>,
    pub x0_power: u32,
    pub factored: FactoredFunction,
}

/// A code together with the regular basis it is built from and its places.
#[derive(Clone, Debug)]
pub struct CodeInstance {
    pub params: CodeParams,
    tower: Arc<Tower>,
    basis: Arc<Vec<Arc<TowerFunction>>>,
    weights: Arc<Vec<u64>>,
    places: Arc<CodePlaces>,
    digest: [u8; 32],
}

/// Builds the code, including its regular basis at level n/k.
pub fn make_code(q: u64, n: u64, k: u64, dim: u64) -> Result<CodeInstance, CodeError> {
    let params = CodeParams::new(q, n, k, dim)?;
    let tower = Tower::new(q)?;
    let m = params.sublevel();
    let mut loc = Localizer::new(tower.clone());
    let rb = regular_basis(&mut loc, m, params.base() - 1)?;
    CodeInstance::from_basis(params, tower, rb)
}

impl CodeInstance {
    /// Assembles a code from an already computed basis (for instance one read
    /// back from a table file). The weights recorded in `rb` are trusted.
    pub fn from_basis(params: CodeParams, tower: Arc<Tower>, rb: RegularBasis) -> Result<CodeInstance, CodeError> {
        let m = params.sublevel();
        if rb.level != m || rb.functions.len() as u64 != params.base() {
            return Err(CodeError::BasisMismatch(format!(
                "expected {} functions at level {m}, got {} at level {}",
                params.base(),
                rb.functions.len(),
                rb.level
            )));
        }
        if rb.functions.iter().any(|g| g.level() != m) {
            return Err(CodeError::BasisMismatch("function level".into()));
        }
        let places = code_places(&tower, params.n as usize);
        let digest = place_digest(params.q, &places);
        Ok(CodeInstance {
            params,
            tower,
            basis: Arc::new(rb.functions.into_iter().map(Arc::new).collect()),
            weights: Arc::new(rb.weights),
            places: Arc::new(places),
            digest,
        })
    }

    /// The same code with another dimension; shares basis and places.
    pub fn with_dimension(&self, dim: u64) -> Result<CodeInstance, CodeError> {
        let p = &self.params;
        let params = CodeParams::new(p.q, p.n, p.k, dim)?;
        Ok(CodeInstance { params, ..self.clone() })
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn basis(&self) -> &[Arc<TowerFunction>] {
        &self.basis
    }

    /// Weights of the basis functions, as recorded when the basis was built.
    pub fn basis_weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn places(&self) -> &CodePlaces {
        &self.places
    }

    pub fn place_digest(&self) -> [u8; 32] {
        self.digest
    }

    pub fn f_family(&self, r: u64) -> Result<MostlyRegular, CodeError> {
        if r >= self.params.dim {
            return Err(CodeError::IndexOutOfRange(r));
        }
        Ok(self.descriptor(r))
    }

    /// f_r for any r, not only those below K; the decoder needs indices up
    /// to its interpolation weights.
    pub fn descriptor(&self, r: u64) -> MostlyRegular {
        let (digits, s) = self.params.digits(r);
        let m = self.params.sublevel();
        let factors = digits
            .iter()
            .enumerate()
            .map(|(i, &d)| (self.basis[d as usize].clone(), i * m, 1))
            .collect();
        MostlyRegular {
            r,
            digits,
            x0_power: s,
            factored: FactoredFunction { level: self.params.n as usize, x0_power: s, factors },
        }
    }

    /// g_ℓ[(i−1)(n/k)] at `pt` for every i ∈ 1..=k and ℓ < q^{n/k}, indexed
    /// [i−1][ℓ].
    pub fn shifted_basis_values<F: FieldOps>(&self, field: &F, pt: &[F::Elem]) -> Result<Vec<Vec<F::Elem>>, CodeError> {
        let m = self.params.sublevel();
        (0..self.params.k as usize)
            .map(|i| {
                self.basis
                    .iter()
                    .map(|g| self.tower.evaluate(g, field, &pt[i * m..]).map_err(CodeError::from))
                    .collect()
            })
            .collect()
    }

    /// f_0(pt), ..., f_{count−1}(pt).
    pub fn f_values<F: FieldOps>(&self, field: &F, pt: &[F::Elem], count: u64) -> Result<Vec<F::Elem>, CodeError> {
        let gv = self.shifted_basis_values(field, pt)?;
        let qn = self.params.qn();
        let mut out = Vec::with_capacity(count as usize);
        let mut x0s = field.one();
        let mut block = Vec::new();
        for r in 0..count {
            let t = r % qn;
            if t == 0 {
                if r > 0 {
                    x0s = field.mul(&x0s, &pt[0]);
                }
                if block.is_empty() {
                    block = (0..qn.min(count)).map(|t| self.product_of_digits(field, &gv, t)).collect();
                }
            }
            out.push(field.mul(&x0s, &block[t as usize]));
        }
        Ok(out)
    }

    fn product_of_digits<F: FieldOps>(&self, field: &F, gv: &[Vec<F::Elem>], t: u64) -> F::Elem {
        let (d, _) = self.params.digits(t);
        let mut acc = gv[0][d[0] as usize].clone();
        for (i, &di) in d.iter().enumerate().skip(1) {
            acc = field.mul(&acc, &gv[i][di as usize]);
        }
        acc
    }

    /// f_r(P_i) for every code place, row-major by place: entry
    /// [i·count + r]. Dense; meant for small instances and oracles.
    pub fn generator_columns(&self, count: u64) -> Result<Vec<Gf>, CodeError> {
        let f = &**self.tower.field();
        let mut out = Vec::with_capacity(self.places.len() * count as usize);
        for pt in self.places.iter() {
            out.extend(self.f_values(f, pt, count)?);
        }
        Ok(out)
    }
}

/// Σ_r v_r f_r(P_i) for every code place, by direct factored evaluation.
pub fn naive_encode(code: &CodeInstance, v: &[Gf]) -> Result<Vec<Gf>, CodeError> {
    let want = code.params.dim as usize;
    if v.len() != want {
        return Err(CodeError::LengthMismatch { got: v.len(), want });
    }
    naive_encode_any(code, v)
}

/// As `naive_encode`, for a coefficient vector of any length (indices past
/// K use the same f_r recipe).
pub fn naive_encode_any(code: &CodeInstance, v: &[Gf]) -> Result<Vec<Gf>, CodeError> {
    let f = &**code.tower.field();
    let count = v.len() as u64;
    code.places
        .iter()
        .map(|pt| {
            if v.iter().all(|x| x.is_zero()) {
                return Ok(Gf::ZERO);
            }
            let vals = code.f_values(f, pt, count)?;
            Ok(crate::linalg::dot(f, v, &vals))
        })
        .collect()
}
