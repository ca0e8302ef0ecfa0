use crate::ffield::{Gf, SmallField};
use crate::linalg::Matrix;

use super::FastEncError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Naive,
    /// Strassen recursion down to blocks whose largest side is at most the
    /// threshold.
    Strassen(usize),
}

pub const STRASSEN_THRESHOLD: usize = 64;

impl Default for Strategy {
    fn default() -> Self {
        Strategy::Strassen(STRASSEN_THRESHOLD)
    }
}

pub fn matmul(f: &SmallField, a: &Matrix, b: &Matrix, strategy: Strategy) -> Result<Matrix, FastEncError> {
    if a.cols() != b.rows() {
        return Err(FastEncError::Shape { left: (a.rows(), a.cols()), right: (b.rows(), b.cols()) });
    }
    Ok(match strategy {
        Strategy::Naive => kernel(f, a, b),
        Strategy::Strassen(t) => strassen(f, a, b, t.max(1)),
    })
}

/// Row-times-matrix product with the right operand's logarithms hoisted.
fn kernel(f: &SmallField, a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m, p) = (a.rows(), a.cols(), b.cols());
    let blog: Vec<Option<u32>> = b.data().iter().map(|&x| f.log(x)).collect();
    let mut c = Matrix::zeros(n, p);
    for i in 0..n {
        let crow = c.row_mut(i);
        for k in 0..m {
            let Some(la) = f.log(a[(i, k)]) else { continue };
            let bl = &blog[k * p..(k + 1) * p];
            for (x, y) in crow.iter_mut().zip(bl) {
                if let Some(lb) = y {
                    *x = f.add(*x, f.exp(la + lb));
                }
            }
        }
    }
    c
}

fn sub_block(a: &Matrix, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
    let mut out = Matrix::zeros(rows, cols);
    for i in 0..rows.min(a.rows().saturating_sub(r0)) {
        for j in 0..cols.min(a.cols().saturating_sub(c0)) {
            out[(i, j)] = a[(r0 + i, c0 + j)];
        }
    }
    out
}

fn plus(f: &SmallField, a: &Matrix, b: &Matrix) -> Matrix {
    let d: Vec<Gf> = a.data().iter().zip(b.data()).map(|(&x, &y)| f.add(x, y)).collect();
    Matrix::from_vec(a.rows(), a.cols(), d)
}

fn minus(f: &SmallField, a: &Matrix, b: &Matrix) -> Matrix {
    let d: Vec<Gf> = a.data().iter().zip(b.data()).map(|(&x, &y)| f.sub(x, y)).collect();
    Matrix::from_vec(a.rows(), a.cols(), d)
}

fn strassen(f: &SmallField, a: &Matrix, b: &Matrix, t: usize) -> Matrix {
    let (n, m, p) = (a.rows(), a.cols(), b.cols());
    if n.max(m).max(p) <= t || n.min(m).min(p) < 2 {
        return kernel(f, a, b);
    }
    // Odd sides are padded with a zero row/column inside the quadrants.
    let (n2, m2, p2) = (n.div_ceil(2), m.div_ceil(2), p.div_ceil(2));
    let a11 = sub_block(a, 0, 0, n2, m2);
    let a12 = sub_block(a, 0, m2, n2, m2);
    let a21 = sub_block(a, n2, 0, n2, m2);
    let a22 = sub_block(a, n2, m2, n2, m2);
    let b11 = sub_block(b, 0, 0, m2, p2);
    let b12 = sub_block(b, 0, p2, m2, p2);
    let b21 = sub_block(b, m2, 0, m2, p2);
    let b22 = sub_block(b, m2, p2, m2, p2);

    let m1 = strassen(f, &plus(f, &a11, &a22), &plus(f, &b11, &b22), t);
    let m2_ = strassen(f, &plus(f, &a21, &a22), &b11, t);
    let m3 = strassen(f, &a11, &minus(f, &b12, &b22), t);
    let m4 = strassen(f, &a22, &minus(f, &b21, &b11), t);
    let m5 = strassen(f, &plus(f, &a11, &a12), &b22, t);
    let m6 = strassen(f, &minus(f, &a21, &a11), &plus(f, &b11, &b12), t);
    let m7 = strassen(f, &minus(f, &a12, &a22), &plus(f, &b21, &b22), t);

    let c11 = plus(f, &minus(f, &plus(f, &m1, &m4), &m5), &m7);
    let c12 = plus(f, &m3, &m5);
    let c21 = plus(f, &m2_, &m4);
    let c22 = plus(f, &plus(f, &minus(f, &m1, &m2_), &m3), &m6);

    let mut c = Matrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            let (bi, bj) = (i / n2, j / p2);
            let (ii, jj) = (i % n2, j % p2);
            let blk = match (bi, bj) {
                (0, 0) => &c11,
                (0, _) => &c12,
                (_, 0) => &c21,
                _ => &c22,
            };
            c[(i, j)] = blk[(ii, jj)];
        }
    }
    c
}
