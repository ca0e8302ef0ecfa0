use super::*;
use crate::rng::SeedRng;
use crate::tower::code_places;
use rand::RngCore;

fn count_tags(set: &BranchSet) -> HashMap<BranchTag, (usize, u64)> {
    let mut m = HashMap::new();
    for b in &set.branches {
        let e = m.entry(b.tag).or_insert((0usize, 0u64));
        e.0 += 1;
        e.1 += b.ramification * b.residue_degree as u64;
    }
    m
}

#[test]
fn level_zero_has_q_plus_one_places() {
    for q in [2u64, 3, 4, 5] {
        let t = Tower::new(q).unwrap();
        let set = bad_branches(&t, 0, 8).unwrap();
        assert_eq!(set.branches.len() as u64, q + 1);
        assert!(set.branches.iter().all(|b| b.ramification == 1 && b.residue_degree == 1));
    }
}

#[test]
fn fiber_over_zero_splits_at_level_one() {
    for q in [2u64, 3, 4] {
        let t = Tower::new(q).unwrap();
        let set = bad_branches(&t, 1, 16).unwrap();
        let over0: Vec<_> = set.branches.iter().filter(|b| b.base == BasePoint::Finite(Gf::ZERO)).collect();
        assert_eq!(over0.len() as u64, q);
        let mut consts: Vec<Gf> = over0.iter().map(|b| b.xs[1].coef(0)).collect();
        consts.sort();
        assert_eq!(consts, t.omega().to_vec());
        let inf = set.infinity();
        assert_eq!(inf.ramification, q);
    }
}

#[test]
fn s1_places_are_totally_ramified_from_level_two() {
    let t = Tower::new(2).unwrap();
    let l2 = count_tags(&bad_branches(&t, 2, 16).unwrap());
    let l3 = count_tags(&bad_branches(&t, 3, 16).unwrap());
    let (n2, d2) = l2[&BranchTag::S(1)];
    let (n3, d3) = l3[&BranchTag::S(1)];
    assert_eq!(n2, n3);
    assert_eq!(d3, 2 * d2);
}

#[test]
fn fiber_degrees_add_up() {
    for (q, mmax) in [(2u64, 4usize), (3, 3), (4, 2), (5, 1)] {
        let t = Tower::new(q).unwrap();
        for m in 0..=mmax {
            let set = bad_branches(&t, m, 16).unwrap();
            let mut per: HashMap<BasePoint, u64> = HashMap::new();
            for b in &set.branches {
                *per.entry(b.base).or_default() += b.ramification * b.residue_degree as u64;
            }
            assert_eq!(per.len() as u64, q + 1);
            assert!(per.values().all(|&s| s == q.pow(m as u32)), "q={q} m={m}");
        }
    }
}

#[test]
fn expansions_satisfy_the_relation() {
    for (q, m) in [(2u64, 3usize), (3, 2), (4, 2)] {
        let t = Tower::new(q).unwrap();
        let set = bad_branches(&t, m, 32).unwrap();
        let f = &*set.field;
        for b in &set.branches {
            for i in 0..m {
                let x = &b.xs[i];
                let y = &b.xs[i + 1];
                let den = x.pow(f, q - 1).add(f, &Laurent::constant(Gf::ONE));
                let lhs = y.frob_pow(f, q).add(f, y).mul(f, &den);
                let r = lhs.sub(f, &x.frob_pow(f, q));
                assert_eq!(r.valuation(), None, "q={q} level {i} tag {:?}", b.tag);
                assert!(r.prec() > x.frob_pow(f, q).val_bound());
            }
        }
    }
}

#[test]
fn known_valuations() {
    for (q, m) in [(2u64, 2usize), (3, 2), (4, 1)] {
        let t = Tower::new(q).unwrap();
        let mut loc = Localizer::new(t.clone());
        assert_eq!(loc.weight(&t.x(m, 0)).unwrap(), q.pow(m as u32) as i64);
        assert_eq!(loc.weight(&t.x(m, m)).unwrap(), 1);
    }
}

#[test]
fn valuation_is_additive() {
    let t = Tower::new(3).unwrap();
    let mut loc = Localizer::new(t.clone());
    let mut rng = SeedRng::new(3);
    let f = &**t.field();
    let mut den = vec![Gf::ZERO; 3];
    den[0] = Gf::ONE;
    den[2] = Gf::ONE;
    let rnd = |rng: &mut SeedRng| {
        let mut z = t.zero(1);
        let mut c = z.coeffs().to_vec();
        for x in c.iter_mut() {
            let num: Vec<Gf> = (0..3).map(|_| FieldOps::random(f, rng)).collect();
            *x = if rng.next_u32() % 2 == 0 { RatFn::poly(f, num) } else { RatFn::new(f, num, den.clone()) };
        }
        z = TowerFunction::from_coeffs(1, c);
        z
    };
    for _ in 0..5 {
        let a = rnd(&mut rng);
        let b = rnd(&mut rng);
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let ab = t.mul(&a, &b).unwrap();
        let va = loc.valuations(&a, 0, 1).unwrap();
        let vb = loc.valuations(&b, 0, 1).unwrap();
        let vab = loc.valuations(&ab, 0, 1).unwrap();
        for i in 0..va.len() {
            assert_eq!(vab[i], va[i] + vb[i]);
        }
    }
    assert_eq!(loc.valuation(&t.zero(1), 0, 1, 0), Err(LocalizeError::ZeroFunction));
}

#[test]
fn level_zero_basis_is_monomial() {
    let t = Tower::new(3).unwrap();
    let mut loc = Localizer::new(t.clone());
    let rb = regular_basis(&mut loc, 0, 2).unwrap();
    for (s, g) in rb.functions.iter().enumerate() {
        assert_eq!(*g, t.pow(&t.x(0, 0), 3 + s as u64));
    }
}

#[test]
fn regular_basis_weights_and_regularity() {
    for (q, m) in [(2u64, 1usize), (2, 2), (3, 1), (4, 1)] {
        let t = Tower::new(q).unwrap();
        let mut loc = Localizer::new(t.clone());
        let smax = q.pow(m as u32) - 1;
        let rb = regular_basis(&mut loc, m, smax).unwrap();
        let base = q.pow(m as u32 + 1);
        assert_eq!(rb.weights, (0..=smax).map(|s| base + s).collect::<Vec<_>>());
        let f = &**t.field();
        for g in &rb.functions {
            assert_eq!(loc.weight(g).unwrap() as u64, rb.weights[rb.functions.iter().position(|x| x == g).unwrap()]);
            for pt in code_places(&t, m).iter() {
                assert!(t.evaluate(g, f, pt).is_ok());
            }
        }
    }
}

#[test]
fn shifted_regular_functions_follow_the_valuation_table() {
    let mut rng = SeedRng::new(31);
    for (q, m, i) in [(2u64, 1usize, 1usize), (2, 1, 2), (3, 1, 1), (2, 2, 1)] {
        let t = Tower::new(q).unwrap();
        let mut loc = Localizer::new(t.clone());
        let wmax = q.pow(m as u32 + 1) + q.pow(m as u32);
        for _ in 0..2 {
            let (r, f) = random_regular(&mut loc, m, wmax, &mut rng).unwrap();
            assert_eq!(loc.weight(&f).unwrap() as u64, r);
            for row in shift_valuations(&mut loc, &f, r, i).unwrap() {
                assert!(row.holds(), "q={q} m={m} i={i} {row:?}");
            }
        }
    }
}
