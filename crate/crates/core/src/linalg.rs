//! Dense matrices over a table field: products, row reduction, kernels.

use rand::RngCore;

use crate::ffield::{FieldOps, Gf, SmallField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Gf>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Gf::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Gf::ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Gf>) -> Matrix {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Gf>]) -> Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn random(f: &SmallField, rows: usize, cols: usize, rng: &mut dyn RngCore) -> Matrix {
        let data = (0..rows * cols).map(|_| FieldOps::random(f, rng)).collect();
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Gf] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Gf] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Gf] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, f: &SmallField, v: &[Gf]) -> Vec<Gf> {
        assert_eq!(v.len(), self.cols, "vector length does not match");
        (0..self.rows).map(|i| dot(f, self.row(i), v)).collect()
    }

    /// Schoolbook product; `fastenc` has the blocked variants.
    pub fn mul(&self, f: &SmallField, b: &Matrix) -> Matrix {
        assert_eq!(self.cols, b.rows, "shape mismatch");
        let mut c = Matrix::zeros(self.rows, b.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let brow = b.row(k);
                let crow = c.row_mut(i);
                for (x, &y) in crow.iter_mut().zip(brow) {
                    if !y.is_zero() {
                        *x = f.add(*x, f.mul(a, y));
                    }
                }
            }
        }
        c
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self, f: &SmallField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = f.inv(self[(r, c)]).unwrap();
            for x in self.row_mut(r)[c..].iter_mut() {
                *x = f.mul(*x, inv);
            }
            let pivot_row: Vec<Gf> = self.row(r)[c..].to_vec();
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self[(i, c)];
                if factor.is_zero() {
                    continue;
                }
                let row = &mut self.row_mut(i)[c..];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x = f.sub(*x, f.mul(factor, y));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &SmallField) -> usize {
        self.clone().rref(f).len()
    }

    /// A basis of {x : Ax = 0}, one vector per free column, each with a 1 in
    /// its free column.
    pub fn kernel(&self, f: &SmallField) -> Vec<Vec<Gf>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Gf::ZERO; self.cols];
            v[free] = Gf::ONE;
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(m[(r, free)]);
            }
            basis.push(v);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Gf;
    fn index(&self, (i, j): (usize, usize)) -> &Gf {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Gf {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(f: &SmallField, a: &[Gf], b: &[Gf]) -> Gf {
    let mut acc = Gf::ZERO;
    for (&x, &y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = f.add(acc, f.mul(x, y));
        }
    }
    acc
}
