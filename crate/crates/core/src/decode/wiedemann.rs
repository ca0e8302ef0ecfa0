use rand::RngCore;

use super::DecodeError;
use crate::ffield::{FieldOps, Gf, SmallField};
use crate::linalg::{dot, Matrix};

/// An implicit matrix, applied to a vector.
pub type MatVec<'a> = dyn FnMut(&[Gf]) -> Result<Vec<Gf>, DecodeError> + 'a;

/// Connection polynomial Λ (Λ_0 = 1) and linear complexity L of `s`.
pub fn berlekamp_massey(f: &SmallField, s: &[Gf]) -> (Vec<Gf>, usize) {
    let mut c = vec![Gf::ONE];
    let mut b = vec![Gf::ONE];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = Gf::ONE;
    for i in 0..s.len() {
        let mut d = s[i];
        for j in 1..=l.min(c.len() - 1) {
            d = f.add(d, f.mul(c[j], s[i - j]));
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = f.div(d, bd).unwrap();
        let t = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, Gf::ZERO);
        }
        for (j, &bj) in b.iter().enumerate() {
            c[j + m] = f.sub(c[j + m], f.mul(coef, bj));
        }
        if 2 * l <= i {
            l = i + 1 - l;
            b = t;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.resize(l + 1, Gf::ZERO);
    (c, l)
}

/// The minimal polynomial λ^L Λ(1/λ), coefficients from degree 0 upward.
fn reversed(conn: &[Gf], l: usize) -> Vec<Gf> {
    (0..=l).map(|j| conn.get(l - j).copied().unwrap_or(Gf::ZERO)).collect()
}

/// A nonzero a with M a = 0 for an implicit N × C matrix M with C > N.
///
/// M is padded with zero rows to a C × C matrix A. The projected Krylov
/// sequence u·A^i·v gives (with high probability) the minimal polynomial
/// m(λ) = λ^s h(λ) of v; then A^j h(A) v is a kernel vector for the
/// first j ≤ s at which the next product vanishes.
pub fn wiedemann_nullvector(
    f: &SmallField,
    matvec: &mut MatVec<'_>,
    rows: usize,
    cols: usize,
    rng: &mut dyn RngCore,
    retries: usize,
) -> Result<Vec<Gf>, DecodeError> {
    if cols <= rows {
        return Err(DecodeError::Shape(format!("need more columns than rows, got {rows}×{cols}")));
    }
    let mut apply = |x: &[Gf]| -> Result<Vec<Gf>, DecodeError> {
        let mut y = matvec(x)?;
        if y.len() != rows {
            return Err(DecodeError::Shape(format!("matvec returned {} entries, expected {rows}", y.len())));
        }
        y.resize(cols, Gf::ZERO);
        Ok(y)
    };
    for _ in 0..retries.max(1) {
        let u: Vec<Gf> = (0..cols).map(|_| FieldOps::random(f, rng)).collect();
        let v: Vec<Gf> = (0..cols).map(|_| FieldOps::random(f, rng)).collect();
        let mut seq = Vec::with_capacity(2 * cols);
        let mut x = v.clone();
        for i in 0..2 * cols {
            seq.push(dot(f, &u, &x));
            if i + 1 < 2 * cols {
                x = apply(&x)?;
            }
        }
        let (conn, l) = berlekamp_massey(f, &seq);
        let m = reversed(&conn, l);
        let Some(s) = m.iter().position(|c| !c.is_zero()) else { continue };
        if s == 0 {
            continue;
        }
        let h = &m[s..];
        let mut w = vec![Gf::ZERO; cols];
        let mut x = v.clone();
        for (j, &hj) in h.iter().enumerate() {
            if !hj.is_zero() {
                for (wi, &xi) in w.iter_mut().zip(&x) {
                    *wi = f.add(*wi, f.mul(hj, xi));
                }
            }
            if j + 1 < h.len() {
                x = apply(&x)?;
            }
        }
        for _ in 0..=s {
            if w.iter().all(|c| c.is_zero()) {
                break;
            }
            let aw = apply(&w)?;
            if aw.iter().all(|c| c.is_zero()) {
                return Ok(w);
            }
            w = aw;
        }
    }
    Err(DecodeError::RetryCap("wiedemann"))
}

/// A random nonzero element of the kernel of an explicit matrix.
pub fn dense_nullvector(f: &SmallField, m: &Matrix, rng: &mut dyn RngCore) -> Option<Vec<Gf>> {
    let basis = m.kernel(f);
    if basis.is_empty() {
        return None;
    }
    loop {
        let coefs: Vec<Gf> = basis.iter().map(|_| FieldOps::random(f, rng)).collect();
        if coefs.iter().all(|c| c.is_zero()) {
            continue;
        }
        let mut v = vec![Gf::ZERO; m.cols()];
        for (c, b) in coefs.iter().zip(&basis) {
            for (x, &y) in v.iter_mut().zip(b) {
                *x = f.add(*x, f.mul(*c, y));
            }
        }
        return Some(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedRng;

    #[test]
    fn bm_finds_a_recurrence() {
        let f = SmallField::for_q_squared(4).unwrap();
        // s_{i} = 3·s_{i−1} + s_{i−2} over F_16
        let mut s = vec![Gf(1), Gf(5)];
        for i in 2..20 {
            let v = f.add(f.mul(Gf(3), s[i - 1]), s[i - 2]);
            s.push(v);
        }
        let (c, l) = berlekamp_massey(&f, &s);
        assert_eq!(l, 2);
        for i in 2..20 {
            let mut acc = s[i];
            for j in 1..=2 {
                acc = f.add(acc, f.mul(c[j], s[i - j]));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn kernel_of_a_wide_matrix() {
        let f = SmallField::for_q_squared(4).unwrap();
        let mut rng = SeedRng::new(1);
        for (r, c) in [(20usize, 21usize), (60, 61), (40, 45)] {
            let m = Matrix::random(&f, r, c, &mut rng);
            let mut mv = |x: &[Gf]| Ok(m.mul_vec(&f, x));
            let w = wiedemann_nullvector(&f, &mut mv, r, c, &mut rng, 8).unwrap();
            assert!(w.iter().any(|x| !x.is_zero()));
            assert!(m.mul_vec(&f, &w).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn planted_kernel_vector_is_recovered() {
        let f = SmallField::for_q_squared(11).unwrap();
        let mut rng = SeedRng::new(2);
        let n = 30;
        let z: Vec<Gf> = (0..n + 1).map(|_| FieldOps::random(&f, &mut rng)).collect();
        // Rows orthogonal to z: random rows corrected in the last column.
        let zl_inv = f.inv(z[n]).unwrap();
        let mut rows = Vec::new();
        for _ in 0..n {
            let mut r: Vec<Gf> = (0..n + 1).map(|_| FieldOps::random(&f, &mut rng)).collect();
            r[n] = Gf::ZERO;
            let d = dot(&f, &r, &z);
            r[n] = f.neg(f.mul(d, zl_inv));
            rows.push(r);
        }
        let m = Matrix::from_rows(&rows);
        if m.rank(&f) < n {
            return;
        }
        let mut mv = |x: &[Gf]| Ok(m.mul_vec(&f, x));
        let w = wiedemann_nullvector(&f, &mut mv, n, n + 1, &mut rng, 8).unwrap();
        let ratio = f.div(w[n], z[n]).unwrap();
        for i in 0..=n {
            assert_eq!(w[i], f.mul(ratio, z[i]));
        }
    }
}
