use super::*;
use crate::agcode::{make_code, naive_encode, CodeParams};
use crate::fastenc::precompute_tables;
use crate::rng::SeedRng;

fn random_vec(f: &crate::ffield::SmallField, n: usize, rng: &mut SeedRng) -> Vec<Gf> {
    (0..n).map(|_| FieldOps::random(f, rng)).collect()
}

#[test]
fn parameter_formulas() {
    let p = CodeParams::new(4, 2, 2, 3).unwrap();
    let d = choose_params(&p, Mode::List).unwrap();
    assert_eq!((d.ell, d.b), (1, 478));
    assert!(d.feasible(&p));
    let p11 = CodeParams::new(11, 2, 2, 1).unwrap();
    let u = choose_params(&p11, Mode::Unique).unwrap();
    assert_eq!(u.b, 12221);
    assert_eq!(u.radius(&p11), 1088);
    assert!(u.unknowns() > p11.len as usize);
    assert!(choose_params(&p, Mode::Explicit { ell: 1, b: 300 }).is_err());
    assert!(choose_params(&p, Mode::Explicit { ell: 0, b: 900 }).is_err());
}

#[test]
fn matvec_matches_dense_matrix() {
    let code = make_code(4, 2, 2, 3).unwrap();
    let t = precompute_tables(&code).unwrap();
    let f = &**code.tower().field();
    let params = choose_params(&code.params, Mode::Explicit { ell: 1, b: 478 }).unwrap();
    let mut rng = SeedRng::new(1);
    let y = random_vec(f, 192, &mut rng);
    let m = dense_matrix(&code, &y, &params).unwrap();
    let c = params.unknowns();
    for _ in 0..3 {
        let a = random_vec(f, c, &mut rng);
        assert_eq!(blackbox_matvec(&code, &t, &y, &params, &a).unwrap(), m.mul_vec(f, &a));
    }
    let mut e = vec![Gf::ZERO; c];
    e[5] = Gf::ONE;
    let col = blackbox_matvec(&code, &t, &y, &params, &e).unwrap();
    let gen = code.generator_columns(6).unwrap();
    for i in 0..192 {
        assert_eq!(col[i], gen[i * 6 + 5]);
    }
}

#[test]
fn interpolation_satisfies_constraints() {
    let code = make_code(4, 2, 2, 3).unwrap();
    let t = precompute_tables(&code).unwrap();
    let f = &**code.tower().field();
    let params = choose_params(&code.params, Mode::List).unwrap();
    let mut rng = SeedRng::new(2);
    let v = random_vec(f, 3, &mut rng);
    let y = naive_encode(&code, &v).unwrap();
    let h = interpolate(&code, &t, &y, &params, &mut rng).unwrap();
    let m = dense_matrix(&code, &y, &params).unwrap();
    assert!(m.mul_vec(f, &h.flat()).iter().all(|x| x.is_zero()));
}

#[test]
fn wiedemann_path_agrees_with_dense_kernel() {
    let f = crate::ffield::SmallField::for_q_squared(4).unwrap();
    let mut rng = SeedRng::new(3);
    let m = Matrix::random(&f, 50, 51, &mut rng);
    let dense = m.kernel(&f);
    assert_eq!(dense.len(), 1);
    let mut mv = |x: &[Gf]| Ok(m.mul_vec(&f, x));
    let w = wiedemann_nullvector(&f, &mut mv, 50, 51, &mut rng, 8).unwrap();
    let i = w.iter().position(|x| !x.is_zero()).unwrap();
    let ratio = f.div(w[i], dense[0][i]).unwrap();
    assert!(w.iter().zip(&dense[0]).all(|(a, b)| *a == f.mul(ratio, *b)));
}

#[test]
fn place_of_small_degree_satisfies_relations() {
    let code = make_code(4, 2, 2, 3).unwrap();
    let mut rng = SeedRng::new(4);
    for d in [1usize, 3, 7] {
        let pl = find_place_of_degree(&code, d, &mut rng, 64).unwrap();
        let e = &*pl.ext;
        assert_eq!(pl.coords.len(), 3);
        for i in 0..2 {
            let (a, b) = (&pl.coords[i], &pl.coords[i + 1]);
            let lhs = e.mul(&e.add(&e.pow_u64(b, 4), b), &e.add(&e.pow_u64(a, 3), &e.one()));
            assert_eq!(lhs, e.pow_u64(a, 4));
        }
        for a in &pl.coords {
            assert!(!e.is_zero(&e.add(&e.pow_u64(a, 4), a)));
        }
    }
}

#[test]
fn lifting_round_trip() {
    let code = make_code(4, 2, 2, 3).unwrap();
    let f = &**code.tower().field();
    let params = choose_params(&code.params, Mode::List).unwrap();
    let mut rng = SeedRng::new(5);
    let pl = find_place_of_degree(&code, 20, &mut rng, 64).unwrap();
    let lt = build_lift_tables(&code, &params, pl).unwrap();
    assert_eq!(lt.pivots.len(), 3);
    assert!(lt.pivots.windows(2).all(|w| w[0] < w[1]));
    for (j, &p) in lt.pivots.iter().enumerate() {
        assert!((0..p).all(|i| lt.l[(i, j)].is_zero()));
        assert_eq!(lt.l[(p, j)], Gf::ONE);
    }
    for _ in 0..20 {
        let v = random_vec(f, 3, &mut rng);
        let x = lt.combine(&v);
        assert_eq!(lt.lift(&x), Some(v));
    }
}

#[test]
fn list_decoder_is_sound_when_b_exceeds_n() {
    let code = make_code(4, 2, 2, 3).unwrap();
    let t = precompute_tables(&code).unwrap();
    let f = &**code.tower().field();
    let mut rng = SeedRng::new(6);
    for ell in [1u64, 2] {
        let b = if ell == 1 { 478 } else { 900 };
        let params = choose_params(&code.params, Mode::Explicit { ell, b }).unwrap();
        let pl = find_place_of_degree(&code, 20, &mut rng, 64).unwrap();
        let lt = build_lift_tables(&code, &params, pl).unwrap();
        let v = random_vec(f, 3, &mut rng);
        let y = naive_encode(&code, &v).unwrap();
        let out = list_decode(&code, &t, &lt, &params, &y, &mut rng).unwrap();
        assert!(out.len() as u64 <= ell);
        for c in &out {
            assert!(c.agreement as u64 > params.b);
        }
    }
}
