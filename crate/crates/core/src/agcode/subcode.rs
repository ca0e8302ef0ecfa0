use std::collections::HashMap;

use super::{CodeError, CodeInstance};
use crate::ffield::Gf;
use crate::linalg::Matrix;
use crate::tower::code_places;

/// Per-α ranks of the two half-level restrictions and the chosen block.
#[derive(Clone, Debug)]
pub struct SubcodeReport {
    /// (α, r1, r2) for each α ∈ F_{q²} \ Ω in increasing order.
    pub ranks: Vec<(Gf, usize, usize)>,
    pub alpha: Gf,
    /// Global place indices of the α-block in Kronecker order (P′ major).
    pub block_columns: Vec<usize>,
    /// Global place indices on which the restricted generator has full rank
    /// r1·r2.
    pub pivots: Vec<usize>,
    pub dim: usize,
    /// A (rows (s, r_1), columns P′) and B (rows r_2, columns P″) at α.
    pub a: Matrix,
    pub b: Matrix,
    /// Entries of the restricted generator where f_r(P) ≠ A ⊗ B.
    pub tensor_mismatches: usize,
}

impl SubcodeReport {
    pub fn rank_sum(&self) -> usize {
        self.ranks.iter().map(|&(_, a, b)| a * b).sum()
    }
}

/// Splits the code places of F_n (n = 2m) by their middle coordinate α and
/// factors the generator restricted to each α-block as A ⊗ B.
pub fn systematic_subcode(code: &CodeInstance) -> Result<SubcodeReport, CodeError> {
    let p = code.params;
    if p.k != 2 {
        return Err(CodeError::BasisMismatch(format!("systematic subcode needs k = 2, got {}", p.k)));
    }
    let tower = code.tower().clone();
    let f = &**tower.field();
    let m = p.sublevel();
    let b = p.base() as usize;
    let kk = p.dim as usize;
    let arows = kk.div_ceil(b);
    let half = code_places(&tower, m);
    let full = code.places();
    let index: HashMap<&[Gf], usize> = full.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let basis = code.basis();

    let mut best: Option<(usize, Gf, Matrix, Matrix, Vec<usize>)> = None;
    let mut ranks = Vec::new();
    let alphas: Vec<Gf> = f.elements().filter(|a| !tower.omega().contains(a)).collect();
    for &alpha in &alphas {
        let tops: Vec<&[Gf]> = half.iter().filter(|c| c[m] == alpha).collect();
        let bottoms: Vec<&[Gf]> = half.iter().filter(|c| c[0] == alpha).collect();
        let mut a = Matrix::zeros(arows, tops.len());
        for (j, c) in tops.iter().enumerate() {
            for row in 0..arows {
                let (s, r1) = (row / b, row % b);
                let g = tower.evaluate(&basis[r1], f, c)?;
                a[(row, j)] = f.mul(f.pow(c[0], s as u64), g);
            }
        }
        let mut bm = Matrix::zeros(b, bottoms.len());
        for (j, c) in bottoms.iter().enumerate() {
            for (r2, g) in basis.iter().enumerate() {
                bm[(r2, j)] = tower.evaluate(g, f, c)?;
            }
        }
        let (r1, r2) = (a.rank(f), bm.rank(f));
        ranks.push((alpha, r1, r2));
        let cols: Vec<usize> = tops
            .iter()
            .flat_map(|t| {
                bottoms.iter().map(|u| {
                    let mut c = t.to_vec();
                    c.extend_from_slice(&u[1..]);
                    index[c.as_slice()]
                })
            })
            .collect();
        if best.as_ref().is_none_or(|x| r1 * r2 > x.0) {
            best = Some((r1 * r2, alpha, a, bm, cols));
        }
    }
    let (dim, alpha, a, bm, block_columns) = best.expect("F_{q²} \\ Ω is nonempty");

    let pa = a.clone().rref(f);
    let pb = bm.clone().rref(f);
    let nb = bm.cols();
    let pivots = pa.iter().flat_map(|&i| pb.iter().map(move |&j| i * nb + j)).map(|c| block_columns[c]).collect();

    let mut tensor_mismatches = 0;
    for (ci, &col) in block_columns.iter().enumerate() {
        let (i1, i2) = (ci / nb, ci % nb);
        let vals = code.f_values(f, full.place(col), p.dim)?;
        for (r, v) in vals.iter().enumerate() {
            let (row, r2) = (r / b, r % b);
            if f.mul(a[(row, i1)], bm[(r2, i2)]) != *v {
                tensor_mismatches += 1;
            }
        }
    }

    Ok(SubcodeReport { ranks, alpha, block_columns, pivots, dim, a, b: bm, tensor_mismatches })
}
