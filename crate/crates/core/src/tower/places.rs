use sha2::{Digest, Sha256};

use super::Tower;
use crate::ffield::{Gf, SmallField};

/// The rational code places of F_m in lexicographic order of their
/// coordinate tuples. Stored flat with stride m+1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodePlaces {
    level: usize,
    coords: Vec<Gf>,
}

impl CodePlaces {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.coords.len() / (self.level + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinates (α_0, ..., α_m) of the i-th place.
    pub fn place(&self, i: usize) -> &[Gf] {
        let s = self.level + 1;
        &self.coords[i * s..(i + 1) * s]
    }

    pub fn iter(&self) -> std::slice::Chunks<'_, Gf> {
        self.coords.chunks(self.level + 1)
    }

    pub fn flat(&self) -> &[Gf] {
        &self.coords
    }
}

/// Roots of T^q + T = c for every c ∈ F_{q²}, each list sorted.
pub(crate) fn artin_schreier_buckets(f: &SmallField, q: u64) -> Vec<Vec<Gf>> {
    let mut b = vec![Vec::new(); f.size() as usize];
    for x in f.elements() {
        let c = f.add(f.pow(x, q), x);
        b[c.0 as usize].push(x);
    }
    b
}

fn relation_rhs(f: &SmallField, q: u64, a: Gf) -> Option<Gf> {
    let d = f.add(f.pow(a, q - 1), Gf::ONE);
    f.inv(d).map(|di| f.mul(f.pow(a, q), di))
}

pub fn code_places(t: &Tower, level: usize) -> CodePlaces {
    let f = &**t.field();
    let q = t.q();
    let buckets = artin_schreier_buckets(f, q);
    let in_omega = |a: Gf| t.omega().contains(&a);
    let mut coords = Vec::new();
    let mut stack = Vec::with_capacity(level + 1);
    fn dfs(
        f: &SmallField,
        q: u64,
        level: usize,
        buckets: &[Vec<Gf>],
        in_omega: &dyn Fn(Gf) -> bool,
        stack: &mut Vec<Gf>,
        out: &mut Vec<Gf>,
    ) {
        if stack.len() == level + 1 {
            out.extend_from_slice(stack);
            return;
        }
        let last = *stack.last().unwrap();
        let c = relation_rhs(f, q, last).expect("code place coordinate outside Ω");
        for &b in &buckets[c.0 as usize] {
            debug_assert!(!in_omega(b));
            stack.push(b);
            dfs(f, q, level, buckets, in_omega, stack, out);
            stack.pop();
        }
    }
    for a in f.elements().filter(|&a| !in_omega(a)) {
        stack.push(a);
        dfs(f, q, level, &buckets, &in_omega, &mut stack, &mut coords);
        stack.pop();
    }
    CodePlaces { level, coords }
}

/// SHA-256 over (q, level) as u32 LE followed by every coordinate as u16 LE.
pub fn place_digest(q: u64, places: &CodePlaces) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((q as u32).to_le_bytes());
    h.update((places.level as u32).to_le_bytes());
    for c in &places.coords {
        h.update(c.0.to_le_bytes());
    }
    h.finalize().into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FieldOps;

    #[test]
    fn counts_and_relations() {
        for q in [2u64, 3, 4] {
            let t = Tower::new(q).unwrap();
            let f = &**t.field();
            for m in 0..=3usize {
                let pl = code_places(&t, m);
                assert_eq!(pl.len() as u64, q.pow(m as u32) * (q * q - q));
                for pt in pl.iter() {
                    for &a in pt {
                        assert!(!t.omega().contains(&a));
                    }
                    for j in 0..m {
                        let c = relation_rhs(f, q, pt[j]).unwrap();
                        assert_eq!(f.add(f.pow(pt[j + 1], q), pt[j + 1]), c);
                    }
                }
                let v: Vec<&[Gf]> = pl.iter().collect();
                assert!(v.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn q2_level1_has_four_places() {
        let t = Tower::new(2).unwrap();
        let pl = code_places(&t, 1);
        assert_eq!(pl.len(), 4);
        assert_eq!(pl.place(0)[0], Gf(2));
    }

    #[test]
    fn relation_residual_vanishes_at_every_place() {
        let t = Tower::new(3).unwrap();
        let f = &**t.field();
        let pl = code_places(&t, 2);
        for j in 0..2 {
            let r = t.relation_residual(2, j);
            for pt in pl.iter() {
                assert_eq!(t.evaluate(&r, f, pt).unwrap(), f.zero());
            }
        }
    }

    #[test]
    fn top_coordinate_is_uniform() {
        for q in [2u64, 3, 4] {
            let t = Tower::new(q).unwrap();
            for m in 1..=4usize {
                if q == 4 && m == 4 {
                    continue;
                }
                let pl = code_places(&t, m);
                let mut count = std::collections::HashMap::new();
                for pt in pl.iter() {
                    *count.entry(pt[m]).or_insert(0u64) += 1;
                }
                assert_eq!(count.len() as u64, q * q - q);
                assert!(count.values().all(|&c| c == q.pow(m as u32)));
            }
        }
    }

    #[test]
    fn digest_is_stable() {
        let t = Tower::new(2).unwrap();
        let a = place_digest(2, &code_places(&t, 2));
        let b = place_digest(2, &code_places(&t, 2));
        assert_eq!(a, b);
        assert_ne!(a, place_digest(2, &code_places(&t, 1)));
    }
}
