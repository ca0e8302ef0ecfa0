use std::sync::Arc;

use rand::RngCore;

use super::{DecodeError, DecoderParams};
use crate::agcode::CodeInstance;
use crate::ffield::{poly, ExtField, FieldOps, Gf};
use crate::linalg::Matrix;

/// A place of F_n of degree D: coordinates (α_0, ..., α_n) in F_{q^{2D}}.
#[derive(Clone, Debug)]
pub struct DegreePlace {
    pub ext: Arc<ExtField>,
    pub coords: Vec<Vec<Gf>>,
}

impl DegreePlace {
    pub fn degree(&self) -> usize {
        self.ext.degree()
    }
}

/// Whether T^q + T = c has a root in F_{q^{2D}}: the image of T ↦ T^q + T
/// is the trace-orthogonal complement of Ω.
fn artin_schreier_solvable(ext: &ExtField, q: u64, omega0: Gf, c: &[Gf]) -> bool {
    let fq2 = ext.base();
    let t = ext.trace_to_base(&ext.scale(&c.to_vec(), omega0));
    fq2.add(fq2.pow(t, q), t).is_zero()
}

/// Draws α_0 as a root of a random irreducible of degree D over F_{q²} and
/// lifts it through the tower, redrawing whenever α_0 lies in Ω or some
/// lifting equation has no solution.
pub fn find_place_of_degree(
    code: &CodeInstance,
    d: usize,
    rng: &mut dyn RngCore,
    retries: usize,
) -> Result<DegreePlace, DecodeError> {
    if d == 0 {
        return Err(DecodeError::Shape("place degree must be positive".into()));
    }
    let tower = code.tower();
    let q = tower.q();
    let fq2 = tower.field().clone();
    let omega0 = *tower.omega().iter().find(|a| !a.is_zero()).expect("Ω has q elements");
    let n = code.params.n as usize;
    'outer: for _ in 0..retries.max(1) {
        let m = poly::irreducible_random(&*fq2, d, rng)?;
        let ext = Arc::new(ExtField::new(fq2.clone(), m.coeffs));
        let a0 = ext.generator();
        let not_in_omega = |a: &Vec<Gf>| !ext.is_zero(&ext.add(&ext.pow_u64(a, q), a));
        if !not_in_omega(&a0) {
            continue;
        }
        let mut coords = vec![a0];
        for _ in 0..n {
            let a = coords.last().unwrap();
            let den = ext.add(&ext.pow_u64(a, q - 1), &ext.one());
            let Some(di) = ext.inv(&den) else { continue 'outer };
            let c = ext.mul(&ext.pow_u64(a, q), &di);
            if !artin_schreier_solvable(&ext, q, omega0, &c) {
                continue 'outer;
            }
            let next = poly::solve_artin_schreier(&*ext, q, &c, rng)?;
            if !not_in_omega(&next) {
                continue 'outer;
            }
            coords.push(next);
        }
        return Ok(DegreePlace { ext, coords });
    }
    Err(DecodeError::RetryCap("place of degree D"))
}

/// Values of f_r at a degree-D place and the column-reduced evaluation
/// matrix of the message space.
#[derive(Clone, Debug)]
pub struct LiftTables {
    pub place: DegreePlace,
    /// f_0(P), ..., f_{count−1}(P).
    pub values: Vec<Vec<Gf>>,
    /// D × K, column j zero above row pivots[j] and 1 there; zero at the
    /// other pivot rows.
    pub l: Matrix,
    pub pivots: Vec<usize>,
    /// K × K with L = V·R, V the coordinate matrix of f_0(P)..f_{K−1}(P).
    pub r: Matrix,
}

impl LiftTables {
    pub fn dim(&self) -> usize {
        self.r.rows()
    }

    /// The message v with Σ v_r f_r(P) = x, if x lies in the image.
    pub fn lift(&self, x: &[Gf]) -> Option<Vec<Gf>> {
        let f = &**self.place.ext.base();
        let z: Vec<Gf> = self.pivots.iter().map(|&p| x[p]).collect();
        let back = self.l.mul_vec(f, &z);
        if back != x {
            return None;
        }
        Some(self.r.mul_vec(f, &z))
    }

    /// Σ_r a_r f_r(P) for a coefficient vector shorter than `values`.
    pub fn combine(&self, a: &[Gf]) -> Vec<Gf> {
        let ext = &*self.place.ext;
        let mut acc = ext.zero();
        for (c, v) in a.iter().zip(&self.values) {
            if !c.is_zero() {
                acc = ext.add(&acc, &ext.scale(v, *c));
            }
        }
        acc
    }
}

/// Evaluates f_0..f_{max(w_0, K−1)} at `place` and column-reduces the first
/// K of them.
pub fn build_lift_tables(
    code: &CodeInstance,
    params: &DecoderParams,
    place: DegreePlace,
) -> Result<LiftTables, DecodeError> {
    let ext = place.ext.clone();
    let fq2 = ext.base().clone();
    let kk = code.params.dim as usize;
    let count = (params.max_weight().max(0) as u64 + 1).max(kk as u64);
    let values = code.f_values(&*ext, &place.coords, count)?;
    let d = ext.degree();
    let mut aug = Matrix::zeros(kk, d + kk);
    for r in 0..kk {
        aug.row_mut(r)[..d].copy_from_slice(&values[r]);
        aug[(r, d + r)] = Gf::ONE;
    }
    let piv = aug.rref(&fq2);
    let pivots: Vec<usize> = piv.iter().copied().filter(|&c| c < d).collect();
    if pivots.len() < kk {
        return Err(DecodeError::PivotDeficiency { got: pivots.len(), want: kk });
    }
    let mut l = Matrix::zeros(d, kk);
    let mut r = Matrix::zeros(kk, kk);
    for j in 0..kk {
        let row = aug.row(j);
        for i in 0..d {
            l[(i, j)] = row[i];
        }
        for i in 0..kk {
            r[(i, j)] = row[d + i];
        }
    }
    Ok(LiftTables { place, values, l, pivots, r })
}
