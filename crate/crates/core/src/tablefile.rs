//! The on-disk table artifact shared by encoder and decoder.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "GSAG" u32 version
//! u64 q, n, k, K
//! u32 #moduli, each: u32 len, u16 coefficients
//! [32] place digest
//! u32 basis level, u32 #functions, each: u64 weight, u32 #coeffs,
//!     each coefficient: u32 len + u16 numerator, u32 len + u16 denominator
//! u32 rows, u32 cols, u16 g entries (row-major), [32] SHA-256 of the entries
//! u32 #r_start, u32 entries
//! u32 #levels, each: u32 #α, each list u32 len + u32; same again for targets
//! optional sections: [4] tag, u64 payload length, payload, [32] SHA-256 of payload
//! ```
//!
//! The only section tag so far is "LIFT": decoder mode and parameters, the
//! modulus of F_{q^{2D}} over F_{q²}, the place coordinates, f_r(P), L, its
//! pivots and R.

use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::agcode::{CodeInstance, CodeParams};
use crate::decode::{choose_params, DecoderParams, DegreePlace, LiftTables, Mode};
use crate::fastenc::{EvalTable, LevelMap};
use crate::ffield::{ExtField, Gf};
use crate::linalg::Matrix;
use crate::localize::RegularBasis;
use crate::tower::{RatFn, Tower, TowerFunction};

pub const MAGIC: &[u8; 4] = b"GSAG";
pub const VERSION: u32 = 1;
const LIFT_TAG: &[u8; 4] = b"LIFT";

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot access table file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed table file: {0}")]
    Format(String),
    #[error("integrity check failed: {0}")]
    Integrity(String),
}

/// Which decoder the lift section was prepared for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeMode {
    Unique,
    List,
}

#[derive(Clone, Debug)]
pub struct LiftSection {
    pub mode: DecodeMode,
    pub params: DecoderParams,
    pub tables: LiftTables,
}

#[derive(Clone, Debug)]
pub struct TableFile {
    pub code: CodeInstance,
    pub table: EvalTable,
    pub lift: Option<LiftSection>,
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, x: u32) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn len(&mut self, n: usize) {
        self.u32(u32::try_from(n).expect("section too large"));
    }
    fn gfs(&mut self, v: &[Gf]) {
        self.len(v.len());
        for g in v {
            self.0.extend_from_slice(&g.0.to_le_bytes());
        }
    }
    fn u32s(&mut self, v: &[u32]) {
        self.len(v.len());
        for &x in v {
            self.u32(x);
        }
    }
    fn matrix(&mut self, m: &Matrix) {
        self.len(m.rows());
        self.len(m.cols());
        for g in m.data() {
            self.0.extend_from_slice(&g.0.to_le_bytes());
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], TableError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| TableError::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u16(&mut self) -> Result<u16, TableError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32, TableError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, TableError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    /// A length prefix, rejected if the remaining bytes cannot hold that
    /// many items of `item` bytes each.
    fn len(&mut self, item: usize) -> Result<usize, TableError> {
        let n = self.u32()? as usize;
        if n.saturating_mul(item) > self.buf.len() - self.pos {
            return Err(TableError::Format(format!("length {n} at byte {} exceeds file", self.pos - 4)));
        }
        Ok(n)
    }
    fn gfs(&mut self) -> Result<Vec<Gf>, TableError> {
        let n = self.len(2)?;
        (0..n).map(|_| self.u16().map(Gf)).collect()
    }
    fn u32s(&mut self) -> Result<Vec<u32>, TableError> {
        let n = self.len(4)?;
        (0..n).map(|_| self.u32()).collect()
    }
    fn digest(&mut self) -> Result<[u8; 32], TableError> {
        Ok(self.take(32)?.try_into().unwrap())
    }
    fn matrix(&mut self) -> Result<Matrix, TableError> {
        let rows = self.u32()? as usize;
        let cols = self.u32()? as usize;
        let count = rows.checked_mul(cols).filter(|&c| c.saturating_mul(2) <= self.buf.len() - self.pos);
        let count = count.ok_or_else(|| TableError::Format(format!("matrix {rows}×{cols} exceeds file")))?;
        let data = (0..count).map(|_| self.u16().map(Gf)).collect::<Result<_, _>>()?;
        Ok(Matrix::from_vec(rows, cols, data))
    }
    fn done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

fn sha(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

fn g_digest(g: &Matrix) -> [u8; 32] {
    let mut h = Sha256::new();
    for x in g.data() {
        h.update(x.0.to_le_bytes());
    }
    h.finalize().into()
}

impl TableFile {
    pub fn new(code: CodeInstance, table: EvalTable) -> TableFile {
        TableFile { code, table, lift: None }
    }

    /// Byte offset of the `idx`-th g entry (row-major) in `to_bytes()`.
    pub fn g_entry_offset(&self, idx: usize) -> usize {
        let mut w = Writer::default();
        self.write_header(&mut w);
        w.0.len() + 8 + 2 * idx
    }

    fn write_header(&self, w: &mut Writer) {
        let p = &self.code.params;
        w.0.extend_from_slice(MAGIC);
        w.u32(VERSION);
        for x in [p.q, p.n, p.k, p.dim] {
            w.u64(x);
        }
        let moduli = self.code.tower().field().moduli();
        w.len(moduli.len());
        for m in moduli {
            w.gfs(&m.iter().map(|&c| Gf(c)).collect::<Vec<_>>());
        }
        w.0.extend_from_slice(&self.code.place_digest());
        w.len(p.sublevel());
        w.len(self.code.basis().len());
        for (g, &wt) in self.code.basis().iter().zip(self.code.basis_weights()) {
            w.u64(wt);
            w.len(g.coeffs().len());
            for c in g.coeffs() {
                w.gfs(&c.num);
                w.gfs(&c.den);
            }
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        self.write_header(&mut w);
        w.matrix(&self.table.g);
        w.0.extend_from_slice(&g_digest(&self.table.g));
        w.u32s(&self.table.r_start);
        w.len(self.table.levels.len());
        for lm in &self.table.levels {
            for lists in [&lm.lower, &lm.target] {
                w.len(lists.len());
                for l in lists {
                    w.u32s(l);
                }
            }
        }
        if let Some(lift) = &self.lift {
            let payload = lift_payload(lift);
            w.0.extend_from_slice(LIFT_TAG);
            w.u64(payload.len() as u64);
            w.0.extend_from_slice(&payload);
            w.0.extend_from_slice(&sha(&payload));
        }
        w.0
    }

    pub fn from_bytes(buf: &[u8]) -> Result<TableFile, TableError> {
        let mut r = Reader { buf, pos: 0 };
        if r.take(4).ok() != Some(MAGIC.as_slice()) {
            return Err(TableError::Format("missing GSAG magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(TableError::Format(format!("unsupported version {version}")));
        }
        let (q, n, k, kk) = (r.u64()?, r.u64()?, r.u64()?, r.u64()?);
        let params = CodeParams::new(q, n, k, kk).map_err(|e| TableError::Format(e.to_string()))?;
        let tower = Tower::new(q).map_err(|e| TableError::Format(e.to_string()))?;
        let nm = r.len(4)?;
        let mut moduli = Vec::with_capacity(nm);
        for _ in 0..nm {
            moduli.push(r.gfs()?.into_iter().map(|g| g.0).collect::<Vec<u16>>());
        }
        if moduli.as_slice() != tower.field().moduli() {
            return Err(TableError::Integrity("field moduli differ from the canonical field".into()));
        }
        let place_digest = r.digest()?;
        let level = r.u32()? as usize;
        let nf = r.len(12)?;
        let mut functions = Vec::with_capacity(nf);
        let mut weights = Vec::with_capacity(nf);
        let qq = tower.field().size() as u16;
        for _ in 0..nf {
            weights.push(r.u64()?);
            let nc = r.len(8)?;
            let mut coeffs = Vec::with_capacity(nc);
            for _ in 0..nc {
                let num = r.gfs()?;
                let den = r.gfs()?;
                if num.iter().chain(&den).any(|g| g.0 >= qq) || den.is_empty() {
                    return Err(TableError::Format("basis coefficient out of range".into()));
                }
                coeffs.push(RatFn { num, den });
            }
            if nc != tower.dim(level) {
                return Err(TableError::Format(format!("basis function with {nc} coefficients")));
            }
            functions.push(TowerFunction::from_coeffs(level, coeffs));
        }
        let rb = RegularBasis { level, functions, weights };
        let code = CodeInstance::from_basis(params, tower, rb).map_err(|e| TableError::Format(e.to_string()))?;
        if code.place_digest() != place_digest {
            return Err(TableError::Integrity("place digest does not match the enumerated code places".into()));
        }
        let g = r.matrix()?;
        if r.digest()? != g_digest(&g) {
            return Err(TableError::Integrity("g-table digest mismatch".into()));
        }
        let r_start = r.u32s()?;
        let nl = r.len(8)?;
        let mut levels = Vec::with_capacity(nl);
        for _ in 0..nl {
            let mut two = Vec::with_capacity(2);
            for _ in 0..2 {
                let na = r.len(4)?;
                two.push((0..na).map(|_| r.u32s()).collect::<Result<Vec<_>, _>>()?);
            }
            let target = two.pop().unwrap();
            let lower = two.pop().unwrap();
            levels.push(LevelMap { lower, target });
        }
        let table = EvalTable { q, n, k, g, r_start, levels, digest: place_digest };
        let mut lift = None;
        while !r.done() {
            let tag = r.take(4)?;
            let len = r.u64()? as usize;
            let payload = r.take(len)?;
            let stored = r.digest()?;
            if stored != sha(payload) {
                return Err(TableError::Integrity(format!("{} section digest mismatch", String::from_utf8_lossy(tag))));
            }
            if tag == LIFT_TAG {
                lift = Some(parse_lift(&code, payload)?);
            }
        }
        Ok(TableFile { code, table, lift })
    }

    pub fn write(&self, path: &Path) -> Result<(), TableError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<TableFile, TableError> {
        TableFile::from_bytes(&std::fs::read(path)?)
    }
}

fn lift_payload(lift: &LiftSection) -> Vec<u8> {
    let mut w = Writer::default();
    w.u32(match lift.mode {
        DecodeMode::Unique => 0,
        DecodeMode::List => 1,
    });
    w.u64(lift.params.ell);
    w.u64(lift.params.b);
    let t = &lift.tables;
    w.gfs(t.place.ext.modulus());
    w.len(t.place.coords.len());
    for c in &t.place.coords {
        w.gfs(c);
    }
    w.len(t.values.len());
    for v in &t.values {
        w.gfs(v);
    }
    w.matrix(&t.l);
    w.u32s(&t.pivots.iter().map(|&p| p as u32).collect::<Vec<_>>());
    w.matrix(&t.r);
    w.0
}

fn parse_lift(code: &CodeInstance, payload: &[u8]) -> Result<LiftSection, TableError> {
    let mut r = Reader { buf: payload, pos: 0 };
    let mode = match r.u32()? {
        0 => DecodeMode::Unique,
        1 => DecodeMode::List,
        m => return Err(TableError::Format(format!("unknown decoder mode {m}"))),
    };
    let (ell, b) = (r.u64()?, r.u64()?);
    let params =
        choose_params(&code.params, Mode::Explicit { ell, b }).map_err(|e| TableError::Format(e.to_string()))?;
    let modulus = r.gfs()?;
    if modulus.len() < 2 || modulus.last() != Some(&Gf::ONE) {
        return Err(TableError::Format("lifting modulus must be monic of positive degree".into()));
    }
    let ext = Arc::new(ExtField::new(code.tower().field().clone(), modulus));
    let d = ext.degree();
    let read_elems = |r: &mut Reader| -> Result<Vec<Vec<Gf>>, TableError> {
        let n = r.len(4)?;
        (0..n)
            .map(|_| {
                let v = r.gfs()?;
                if v.len() != d {
                    return Err(TableError::Format("element of the wrong degree".into()));
                }
                Ok(v)
            })
            .collect()
    };
    let coords = read_elems(&mut r)?;
    let values = read_elems(&mut r)?;
    let l = r.matrix()?;
    let pivots: Vec<usize> = r.u32s()?.into_iter().map(|p| p as usize).collect();
    let rr = r.matrix()?;
    let kk = code.params.dim as usize;
    if coords.len() != code.params.n as usize + 1
        || values.len() < kk
        || (l.rows(), l.cols()) != (d, kk)
        || (rr.rows(), rr.cols()) != (kk, kk)
        || pivots.len() != kk
        || pivots.iter().any(|&p| p >= d)
        || !r.done()
    {
        return Err(TableError::Format("inconsistent lift section shapes".into()));
    }
    let tables = LiftTables { place: DegreePlace { ext, coords }, values, l, pivots, r: rr };
    Ok(LiftSection { mode, params, tables })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agcode::make_code;
    use crate::decode::{build_lift_tables, find_place_of_degree};
    use crate::fastenc::precompute_tables;
    use crate::rng::SeedRng;

    fn sample(with_lift: bool) -> TableFile {
        let code = make_code(4, 2, 2, 3).unwrap();
        let table = precompute_tables(&code).unwrap();
        let mut tf = TableFile::new(code.clone(), table);
        if with_lift {
            let params = choose_params(&code.params, Mode::List).unwrap();
            let mut rng = SeedRng::new(9);
            let place = find_place_of_degree(&code, 11, &mut rng, 64).unwrap();
            let tables = build_lift_tables(&code, &params, place).unwrap();
            tf.lift = Some(LiftSection { mode: DecodeMode::List, params, tables });
        }
        tf
    }

    #[test]
    fn round_trip_is_byte_exact() {
        for lift in [false, true] {
            let tf = sample(lift);
            let bytes = tf.to_bytes();
            let back = TableFile::from_bytes(&bytes).unwrap();
            assert_eq!(back.table, tf.table);
            assert_eq!(back.code.basis_weights(), tf.code.basis_weights());
            assert_eq!(back.lift.is_some(), lift);
            assert_eq!(back.to_bytes(), bytes);
        }
    }

    #[test]
    fn corruption_is_named() {
        let tf = sample(true);
        let bytes = tf.to_bytes();
        let g_at = tf.g_entry_offset(17);
        let mut bad = bytes.clone();
        bad[g_at] ^= 1;
        match TableFile::from_bytes(&bad) {
            Err(TableError::Integrity(m)) => assert!(m.contains("g-table"), "{m}"),
            other => panic!("expected integrity failure, got {other:?}"),
        }
        let mut bad = bytes.clone();
        let last = bad.len() - 40;
        bad[last] ^= 1;
        assert!(matches!(TableFile::from_bytes(&bad), Err(TableError::Integrity(m)) if m.contains("LIFT")));
        assert!(matches!(TableFile::from_bytes(&bytes[..100]), Err(TableError::Format(_))));
        assert!(matches!(TableFile::from_bytes(b"GSAX"), Err(TableError::Format(_))));
        let mut bad = bytes;
        bad[4 + 4 + 32 + 4 + 4 + 2] ^= 1;
        assert!(TableFile::from_bytes(&bad).is_err());
    }
}
