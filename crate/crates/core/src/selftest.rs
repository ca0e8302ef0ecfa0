//! The acceptance checks, runnable from the library, the CLI and the test
//! suite alike. Every check is deterministic given its seed.

use std::time::Instant;

use rand::RngCore;
use serde::Serialize;

use crate::agcode::{gv_compare, make_code, naive_encode, systematic_subcode, CodeInstance, CodeParams};
use crate::decode::{
    build_lift_tables, choose_params, dense_matrix, dense_nullvector, find_place_of_degree, interpolate,
    list_decode, unique_decode, wiedemann_nullvector, LiftTables, Mode, UniqueOutcome,
};
use crate::fastenc::{encode, precompute_tables};
use crate::ffield::{poly, FieldOps, Gf, SmallField};
use crate::linalg::Matrix;
use crate::localize::{random_regular, shift_valuations, Localizer};
use crate::rng::SeedRng;
use crate::tablefile::TableFile;
use crate::tower::Tower;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Ci,
    Extended,
}

/// Deliberate corruption used to confirm that integrity failures surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    GTable,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub passed: bool,
    /// Informational checks never fail a run.
    pub blocking: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        let status = match (self.passed, self.blocking) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "WARN",
        };
        format!("[{status}] {:<4} {} ({:.1}s): {}", self.id, self.name, self.seconds, self.detail)
    }
}

type Outcome = Result<(bool, String), String>;

fn timed(id: &str, name: &str, blocking: bool, f: impl FnOnce() -> Outcome) -> Check {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Check { id: id.into(), name: name.into(), passed, blocking, detail, seconds: t.elapsed().as_secs_f64() }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_vec(f: &SmallField, n: usize, rng: &mut dyn RngCore) -> Vec<Gf> {
    (0..n).map(|_| FieldOps::random(f, rng)).collect()
}

/// Ids of the checks that `run` knows, in execution order.
pub const CI_IDS: &[&str] = &["1", "2", "3", "4", "5", "6", "7", "8", "10a", "10b", "10c", "11", "T"];

pub fn run(level: Level, seed: u64, only: Option<&str>, fault: Option<Fault>) -> Vec<Check> {
    let root = SeedRng::new(seed);
    let want = |id: &str| only.is_none_or(|o| o == id || (o == "10" && id.starts_with("10")));
    let mut out = Vec::new();
    if want("1") {
        out.push(encoder_oracle(&mut root.split(1)));
    }
    if want("2") {
        out.push(distance_bound());
    }
    if want("3") {
        out.push(valuation_table(&mut root.split(3)));
    }
    if want("4") {
        out.push(weight_law());
    }
    if want("5") {
        out.push(gv_table());
    }
    if want("6") {
        out.push(wiedemann_vs_dense(&mut root.split(6)));
    }
    if want("7") {
        out.push(lift_round_trip(&mut root.split(7)));
    }
    if want("8") {
        out.push(list_soundness(&mut root.split(8)));
    }
    if level == Level::Extended && want("9") {
        out.push(unique_at_capacity(&mut root.split(9), 10, 8));
    }
    if ["10a", "10b", "10c"].iter().any(|id| want(id)) {
        out.extend(subcode_checks().into_iter().filter(|c| want(&c.id)));
    }
    if want("11") {
        out.push(trend(&mut root.split(11)));
    }
    if want("T") {
        out.push(table_integrity(fault));
    }
    out
}

pub fn encoder_oracle(rng: &mut dyn RngCore) -> Check {
    timed("1", "fast encoder equals naive encoder", true, || {
        let mut cases = Vec::new();
        for (q, n, kk, trials) in [(4u64, 2u64, 48u64, 5usize), (4, 4, 768, 20), (5, 2, 100, 5)] {
            let code = make_code(q, n, 2, kk).map_err(err)?;
            let t = precompute_tables(&code).map_err(err)?;
            let f = &**code.tower().field();
            for i in 0..trials {
                let v = random_vec(f, kk as usize, rng);
                if encode(&code, &t, &v).map_err(err)? != naive_encode(&code, &v).map_err(err)? {
                    return Ok((false, format!("mismatch at q={q} n={n} K={kk}, message {i}")));
                }
            }
            cases.push(format!("q={q} n={n} K={kk}: {trials} messages"));
        }
        Ok((true, cases.join("; ")))
    })
}

pub fn distance_bound() -> Check {
    timed("2", "exhaustive minimum distance at least N-K-degG+1", true, || {
        let mut parts = Vec::new();
        let mut ok = true;
        let code = make_code(4, 2, 2, 3).map_err(err)?;
        let f = &**code.tower().field();
        let n = code.params.len as usize;
        let gen = code.generator_columns(3).map_err(err)?;
        for kk in 1..=3usize {
            let bound = CodeParams::new(4, 2, 2, kk as u64).map_err(err)?.dstar;
            let mut min = usize::MAX;
            let total = 16usize.pow(kk as u32);
            for idx in 1..total {
                let v: Vec<Gf> = (0..kk).map(|j| Gf(((idx >> (4 * j)) & 15) as u16)).collect();
                let w = (0..n)
                    .filter(|&i| {
                        let mut acc = Gf::ZERO;
                        for (j, &c) in v.iter().enumerate() {
                            acc = f.add(acc, f.mul(c, gen[i * 3 + j]));
                        }
                        !acc.is_zero()
                    })
                    .count();
                min = min.min(w);
            }
            ok &= min as u64 >= bound;
            parts.push(format!("K={kk}: min weight {min} vs bound {bound}"));
        }
        Ok((ok, parts.join("; ")))
    })
}

pub fn valuation_table(rng: &mut dyn RngCore) -> Check {
    timed("3", "valuations of shifted regular functions", true, || {
        let mut rows = 0usize;
        for q in [2u64, 3] {
            let t = Tower::new(q).map_err(err)?;
            let mut loc = Localizer::new(t);
            for m in [1usize, 2] {
                let wmax = q.pow(m as u32 + 1) + q.pow(m as u32);
                for i in [1usize, 2] {
                    for _ in 0..5 {
                        let (r, g) = random_regular(&mut loc, m, wmax, rng).map_err(err)?;
                        for row in shift_valuations(&mut loc, &g, r, i).map_err(err)? {
                            if !row.holds() {
                                return Ok((false, format!("q={q} m={m} i={i} r={r}: {row:?}")));
                            }
                            rows += 1;
                        }
                    }
                }
            }
        }
        Ok((true, format!("{rows} place valuations matched over 40 functions")))
    })
}

pub fn weight_law() -> Check {
    timed("4", "weight of every f_r with r < q^n", true, || {
        let code = make_code(4, 2, 2, 16).map_err(err)?;
        let t = code.tower().clone();
        let mut loc = Localizer::new(t.clone());
        for r in 0..16u64 {
            let g = t.expand(&code.f_family(r).map_err(err)?.factored).map_err(err)?;
            let w = loc.weight(&g).map_err(err)?;
            let want = code.params.f_weight(r);
            if w != want as i64 {
                return Ok((false, format!("r={r}: weight {w}, expected {want}")));
            }
        }
        Ok((true, "16 of 16 weights exact".into()))
    })
}

pub fn gv_table() -> Check {
    timed("5", "smallest q whose family beats GV", true, || {
        let a = gv_compare(2, 2..=64, 4000).smallest;
        let b = gv_compare(3, 2..=64, 4000).smallest;
        Ok((a == Some(19) && b == Some(32), format!("k=2: {a:?} (want 19), k=3: {b:?} (want 32)")))
    })
}

/// Whether every vector lies in the row span of `basis`.
fn in_span(f: &SmallField, basis: &[Vec<Gf>], v: &[Gf]) -> bool {
    let r0 = Matrix::from_rows(basis).rank(f);
    let mut rows = basis.to_vec();
    rows.push(v.to_vec());
    Matrix::from_rows(&rows).rank(f) == r0
}

pub fn wiedemann_vs_dense(rng: &mut dyn RngCore) -> Check {
    timed("6", "Wiedemann kernel vectors agree with dense elimination", true, || {
        let mut n = 0;
        for q in [4u64, 11] {
            let f = SmallField::for_q_squared(q).map_err(err)?;
            for i in 0..25usize {
                let rows = 12 * i + 12;
                let (rows, cols) = if i == 24 { (300, 301) } else { (rows, rows + 1 + i % 3) };
                let mut m = Matrix::random(&f, rows, cols, rng);
                if i % 5 == 4 {
                    // Rank-deficient: repeat a row so the kernel grows.
                    let r0 = m.row(0).to_vec();
                    m.row_mut(rows - 1).copy_from_slice(&r0);
                }
                let dense = m.kernel(&f);
                let mut mv = |x: &[Gf]| Ok(m.mul_vec(&f, x));
                let w = wiedemann_nullvector(&f, &mut mv, rows, cols, rng, 16).map_err(err)?;
                let zero = m.mul_vec(&f, &w).iter().all(|x| x.is_zero());
                if !zero || w.iter().all(|x| x.is_zero()) || !in_span(&f, &dense, &w) {
                    return Ok((false, format!("Q={} system {rows}x{cols} disagrees", q * q)));
                }
                let dn = dense_nullvector(&f, &m, rng).ok_or("dense kernel empty")?;
                if m.mul_vec(&f, &dn).iter().any(|x| !x.is_zero()) {
                    return Ok((false, format!("dense kernel vector fails at {rows}x{cols}")));
                }
                n += 1;
            }
        }
        Ok((true, format!("{n} systems over F_16 and F_121 up to 300x301")))
    })
}

fn guaranteed_lift(code: &CodeInstance, mode: Mode, rng: &mut dyn RngCore) -> Result<LiftTables, String> {
    let params = choose_params(&code.params, mode).map_err(err)?;
    let d = (code.params.deg_g + code.params.dim) as usize;
    let place = find_place_of_degree(code, d, rng, 256).map_err(err)?;
    build_lift_tables(code, &params, place).map_err(err)
}

pub fn lift_round_trip(rng: &mut dyn RngCore) -> Check {
    timed("7", "lifting through L and R at D = degG + K", true, || {
        let code = make_code(4, 2, 2, 3).map_err(err)?;
        let f = &**code.tower().field();
        let lt = guaranteed_lift(&code, Mode::List, rng)?;
        let d = lt.place.degree();
        if lt.pivots.len() != 3 {
            return Ok((false, format!("{} pivots", lt.pivots.len())));
        }
        for (j, &p) in lt.pivots.iter().enumerate() {
            if (0..p).any(|i| !lt.l[(i, j)].is_zero()) || lt.l[(p, j)] != Gf::ONE {
                return Ok((false, "L is not lower triangular".into()));
            }
        }
        for i in 0..100 {
            let v = random_vec(f, 3, rng);
            if lt.lift(&lt.combine(&v)).as_ref() != Some(&v) {
                return Ok((false, format!("message {i} did not round-trip")));
            }
        }
        let ext = &*lt.place.ext;
        let planted: Vec<Vec<Gf>> = (0..4).map(|_| FieldOps::random(ext, rng)).collect();
        let mut p = vec![ext.one()];
        for r in &planted {
            p = poly::mul(ext, &p, &[ext.neg(r), ext.one()]);
        }
        p = poly::mul(ext, &p, &[ext.one(), ext.zero(), ext.one()]);
        let mut want = planted.clone();
        want.sort();
        want.dedup();
        let mut got = poly::poly_roots(ext, &p, rng).map_err(err)?;
        got.retain(|r| !ext.is_zero(&ext.add(&ext.mul(r, r), &ext.one())));
        let ok = got == want;
        Ok((ok, format!("D={d}, pivots {:?}, 100/100 messages, {} planted roots recovered", lt.pivots, got.len())))
    })
}

pub fn list_soundness(rng: &mut dyn RngCore) -> Check {
    timed("8", "list decoder soundness and interpolation constraints", true, || {
        let code = make_code(4, 2, 2, 3).map_err(err)?;
        let t = precompute_tables(&code).map_err(err)?;
        let f = &**code.tower().field();
        let mut parts = Vec::new();
        for (ell, b) in [(1u64, 478u64), (2, 700)] {
            let params = choose_params(&code.params, Mode::Explicit { ell, b }).map_err(err)?;
            let d = (code.params.deg_g + code.params.dim) as usize;
            let place = find_place_of_degree(&code, d, rng, 256).map_err(err)?;
            let lt = build_lift_tables(&code, &params, place).map_err(err)?;
            let v = random_vec(f, 3, rng);
            let mut y = naive_encode(&code, &v).map_err(err)?;
            for i in (0..y.len()).step_by(7) {
                y[i] = f.add(y[i], Gf::ONE);
            }
            let h = interpolate(&code, &t, &y, &params, rng).map_err(err)?;
            let m = dense_matrix(&code, &y, &params).map_err(err)?;
            let bad = m.mul_vec(f, &h.flat()).iter().filter(|x| !x.is_zero()).count();
            let out = list_decode(&code, &t, &lt, &params, &y, rng).map_err(err)?;
            let unsound = out.iter().filter(|c| c.agreement as u64 <= b).count();
            if bad > 0 || unsound > 0 || out.len() as u64 > ell {
                return Ok((false, format!("ℓ={ell}: {bad} violated constraints, {unsound} unsound candidates")));
            }
            parts.push(format!("ℓ={ell} B={b}: 192/192 constraints, {} candidates", out.len()));
        }
        Ok((true, parts.join("; ")))
    })
}

/// q = 11, K = 1, exactly N − B − 1 errors per trial.
pub fn unique_at_capacity(rng: &mut dyn RngCore, trials: usize, degree: usize) -> Check {
    timed("9", "unique decoding at capacity, q=11", true, || {
        let code = make_code(11, 2, 2, 1).map_err(err)?;
        let t = precompute_tables(&code).map_err(err)?;
        let f = &**code.tower().field();
        let params = choose_params(&code.params, Mode::Unique).map_err(err)?;
        let radius = params.radius(&code.params) as usize;
        let mut wins = 0;
        for _ in 0..trials {
            let place = find_place_of_degree(&code, degree, rng, 256).map_err(err)?;
            let lt = build_lift_tables(&code, &params, place).map_err(err)?;
            let v = random_vec(f, 1, rng);
            let c = encode(&code, &t, &v).map_err(err)?;
            let y = crate::channel::corrupt(f, &c, radius, rng).map_err(err)?;
            if let UniqueOutcome::Decoded(cand) = unique_decode(&code, &t, &lt, &params, &y, rng).map_err(err)? {
                if cand.message == vec![v[0].0] {
                    wins += 1;
                }
            }
        }
        Ok((wins == trials, format!("{wins}/{trials} recovered with {radius} errors, D={degree}")))
    })
}

pub fn subcode_checks() -> Vec<Check> {
    let t = Instant::now();
    let rep = make_code(4, 2, 2, 16).map_err(err).and_then(|c| systematic_subcode(&c).map_err(err));
    let secs = t.elapsed().as_secs_f64();
    let mk = |id: &str, name: &str, r: Outcome| {
        let (passed, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
        Check { id: id.into(), name: name.into(), passed, blocking: true, detail, seconds: secs }
    };
    match rep {
        Err(e) => ["10a", "10b", "10c"].iter().map(|id| mk(id, "systematic subcode", Err(e.clone()))).collect(),
        Ok(rep) => {
            let sum = rep.rank_sum();
            let best = rep.ranks.iter().map(|&(_, a, b)| a * b).max().unwrap_or(0);
            let emitted = rep.ranks.iter().find(|r| r.0 == rep.alpha).map(|&(_, a, b)| a * b).unwrap_or(0);
            vec![
                mk(
                    "10a",
                    "sum over α of r1·r2 equals K",
                    Ok((sum == 16, format!("sum {sum}, K 16, largest single term {best}"))),
                ),
                mk(
                    "10b",
                    "emitted α maximizes r1·r2",
                    Ok((emitted == best, format!("α={} with r1·r2={emitted}", rep.alpha.0))),
                ),
                mk(
                    "10c",
                    "restricted generator equals A ⊗ B",
                    Ok((
                        rep.tensor_mismatches == 0,
                        format!("{} mismatching entries over {} columns", rep.tensor_mismatches, rep.block_columns.len()),
                    )),
                ),
            ]
        }
    }
}

pub fn trend(rng: &mut dyn RngCore) -> Check {
    timed("11", "encoder growth from n=2 to n=4 beats naive growth by 2x", false, || {
        let mut fast = Vec::new();
        let mut slow = Vec::new();
        for (n, kk) in [(2u64, 48u64), (4, 768)] {
            let code = make_code(4, n, 2, kk).map_err(err)?;
            let t = precompute_tables(&code).map_err(err)?;
            let f = &**code.tower().field();
            let v = random_vec(f, kk as usize, rng);
            let reps = if n == 2 { 20 } else { 2 };
            let s = Instant::now();
            for _ in 0..reps {
                encode(&code, &t, &v).map_err(err)?;
            }
            fast.push(s.elapsed().as_secs_f64() / reps as f64);
            let s = Instant::now();
            for _ in 0..reps {
                naive_encode(&code, &v).map_err(err)?;
            }
            slow.push(s.elapsed().as_secs_f64() / reps as f64);
        }
        let (gf, gs) = (fast[1] / fast[0], slow[1] / slow[0]);
        Ok((2.0 * gf <= gs, format!("fast growth {gf:.1}x, naive growth {gs:.1}x")))
    })
}

pub fn table_integrity(fault: Option<Fault>) -> Check {
    timed("T", "table file round trip and digests", true, || {
        let code = make_code(4, 2, 2, 3).map_err(err)?;
        let t = precompute_tables(&code).map_err(err)?;
        let tf = TableFile::new(code, t);
        let mut bytes = tf.to_bytes();
        if fault == Some(Fault::GTable) {
            let at = tf.g_entry_offset(0);
            bytes[at] ^= 1;
        }
        match TableFile::from_bytes(&bytes) {
            Ok(back) if back.table == tf.table && back.to_bytes() == bytes => {
                Ok((true, format!("{} bytes, digests verified", bytes.len())))
            }
            Ok(_) => Ok((false, "reloaded table differs".into())),
            Err(e) => Ok((false, e.to_string())),
        }
    })
}
