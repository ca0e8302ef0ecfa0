use super::*;
use crate::agcode::{make_code, naive_encode, naive_encode_any};
use crate::ffield::FieldOps;
use crate::rng::SeedRng;
use proptest::prelude::*;

fn random_vec(f: &SmallField, n: usize, rng: &mut SeedRng) -> Vec<Gf> {
    (0..n).map(|_| FieldOps::random(f, rng)).collect()
}

#[test]
fn table_shape_and_entries() {
    let code = make_code(4, 2, 2, 10).unwrap();
    let t = precompute_tables(&code).unwrap();
    assert_eq!((t.g.rows(), t.g.cols()), (4, 48));
    assert_eq!(t.entry_count(), 16 * 12);
    let tower = code.tower();
    let f = &**tower.field();
    let low = code_places(tower, 1);
    let mut rng = SeedRng::new(2);
    for _ in 0..100 {
        let l = (rand::RngCore::next_u32(&mut rng) % 4) as usize;
        let j = (rand::RngCore::next_u32(&mut rng) % 48) as usize;
        assert_eq!(t.g[(l, j)], tower.evaluate(&code.basis()[l], f, low.place(j)).unwrap());
    }
}

#[test]
fn unit_vectors_hit_one_block() {
    let mut w = vec![Gf::ZERO; 64];
    w[37] = Gf::ONE;
    let blocks = block_decompose(&w, 4, 16).unwrap();
    let nz: Vec<usize> = (0..4).filter(|&l| blocks[l].iter().any(|x| !x.is_zero())).collect();
    assert_eq!(nz, vec![37 % 4]);
    assert_eq!(blocks[1].iter().position(|x| !x.is_zero()), Some(37 / 4));
    assert!(block_decompose(&w, 4, 15).is_err());
}

#[test]
fn decomposition_matches_the_family_recursion() {
    // ψ_2(w)(P) = Σ_ℓ ψ_1(w^{(ℓ)})(P′)·g_ℓ(P″) with P′ = (α_0, α_1), P″ = (α_1, α_2).
    let code = make_code(4, 2, 2, 16).unwrap();
    let f = &**code.tower().field();
    let level1 = make_code(4, 2, 2, 4).unwrap();
    let mut rng = SeedRng::new(3);
    let w = random_vec(f, 16, &mut rng);
    let blocks = block_decompose(&w, 4, 4).unwrap();
    let full = naive_encode(&code, &w).unwrap();
    for idx in (0..code.places().len()).step_by(4).take(50) {
        let pt = code.places().place(idx);
        let mut acc = Gf::ZERO;
        for (l, blk) in blocks.iter().enumerate() {
            let mut inner = Gf::ZERO;
            for (j, &x) in blk.iter().enumerate() {
                let g = code.tower().evaluate(&level1.basis()[j], f, &pt[..2]).unwrap();
                inner = f.add(inner, f.mul(x, g));
            }
            let gl = code.tower().evaluate(&code.basis()[l], f, &pt[1..]).unwrap();
            acc = f.add(acc, f.mul(inner, gl));
        }
        assert_eq!(acc, full[idx]);
    }
}

#[test]
fn matrix_encode_matches_oracle() {
    let code = make_code(4, 2, 2, 16).unwrap();
    let t = precompute_tables(&code).unwrap();
    let f = &**code.tower().field();
    let mut rng = SeedRng::new(4);
    for _ in 0..20 {
        let v = random_vec(f, 16, &mut rng);
        assert_eq!(matrix_encode(&code, &t, &v).unwrap(), naive_encode(&code, &v).unwrap());
    }
    let mut e0 = vec![Gf::ZERO; 16];
    e0[0] = Gf::ONE;
    let c = matrix_encode(&code, &t, &e0).unwrap();
    let f0 = code.f_family(0).unwrap().factored;
    for (i, pt) in code.places().iter().enumerate() {
        assert_eq!(c[i], code.tower().evaluate_factored(&f0, f, pt).unwrap());
    }
}

#[test]
fn full_encoder_matches_oracle_and_chunks() {
    let code = make_code(4, 2, 2, 48).unwrap();
    let t = precompute_tables(&code).unwrap();
    let f = &**code.tower().field();
    let mut rng = SeedRng::new(5);
    for _ in 0..5 {
        let v = random_vec(f, 48, &mut rng);
        let fast = encode(&code, &t, &v).unwrap();
        assert_eq!(fast, naive_encode(&code, &v).unwrap());
        assert_eq!(fast, encode_chunked(&code, &t, &v).unwrap());
    }
    assert!(encode(&code, &t, &[Gf::ZERO; 47]).is_err());
    let short = code.with_dimension(5).unwrap();
    let v = random_vec(f, 5, &mut rng);
    let mut padded = v.clone();
    padded.resize(16, Gf::ZERO);
    assert_eq!(encode(&short, &t, &v).unwrap(), matrix_encode(&short, &t, &padded).unwrap());
}

#[test]
fn three_level_encoder() {
    let code = make_code(8, 3, 3, 20).unwrap();
    let t = precompute_tables(&code).unwrap();
    let f = &**code.tower().field();
    let mut rng = SeedRng::new(6);
    let v = random_vec(f, 600, &mut rng);
    assert_eq!(encode_any(&code, &t, &v).unwrap(), naive_encode_any(&code, &v).unwrap());
}

#[test]
fn foreign_table_is_rejected() {
    let a = make_code(4, 2, 2, 3).unwrap();
    let b = make_code(5, 2, 2, 3).unwrap();
    let t = precompute_tables(&a).unwrap();
    assert_eq!(encode(&b, &t, &[Gf::ZERO; 3]), Err(FastEncError::DigestMismatch));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn decompose_then_reassemble(vals in proptest::collection::vec(0u16..16, 64), b in prop_oneof![Just(2usize), Just(4), Just(8)]) {
        let w: Vec<Gf> = vals.into_iter().map(Gf).collect();
        let blocks = block_decompose(&w, b, 64 / b).unwrap();
        prop_assert_eq!(block_reassemble(&blocks), w);
    }
}
