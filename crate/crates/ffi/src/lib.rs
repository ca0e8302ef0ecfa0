//! C interface to gsag. Codes live behind an opaque `GsagCode` handle that
//! owns the code, its encoding tables and, once prepared, the decoder
//! tables. Every entry point returns a `GsagStatus`; panics are caught and
//! reported as `GSAG_STATUS_INTERNAL`.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use gsag::agcode::{make_code, CodeError};
use gsag::channel::corrupt;
use gsag::decode::{build_lift_tables, choose_params, find_place_of_degree, unique_decode, Mode, UniqueOutcome};
use gsag::fastenc::{encode, precompute_tables};
use gsag::ffield::{Gf, SmallField};
use gsag::rng::SeedRng;
use gsag::tablefile::{DecodeMode, LiftSection, TableError, TableFile};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GsagStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    Integrity = 3,
    Declined = 4,
    BufferSize = 5,
    Io = 6,
    NoDecoder = 7,
    Internal = 8,
}

/// Opaque handle.
pub struct GsagCode {
    file: TableFile,
}

fn guard(f: impl FnOnce() -> GsagStatus) -> GsagStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(GsagStatus::Internal)
}

fn table_status(e: &TableError) -> GsagStatus {
    match e {
        TableError::Io(_) => GsagStatus::Io,
        _ => GsagStatus::Integrity,
    }
}

unsafe fn path_arg<'a>(p: *const c_char) -> Option<&'a Path> {
    if p.is_null() {
        return None;
    }
    CStr::from_ptr(p).to_str().ok().map(Path::new)
}

unsafe fn symbols(p: *const u16, len: usize) -> Vec<Gf> {
    std::slice::from_raw_parts(p, len).iter().map(|&x| Gf(x)).collect()
}

/// A static, NUL-terminated description of `status`.
#[no_mangle]
pub extern "C" fn gsag_status_message(status: GsagStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        GsagStatus::Ok => b"ok\0",
        GsagStatus::NullPointer => b"null pointer argument\0",
        GsagStatus::InvalidParams => b"invalid code or decoder parameters\0",
        GsagStatus::Integrity => b"data integrity check failed\0",
        GsagStatus::Declined => b"decoder declined\0",
        GsagStatus::BufferSize => b"buffer has the wrong length\0",
        GsagStatus::Io => b"file access failed\0",
        GsagStatus::NoDecoder => b"decoder tables not prepared\0",
        GsagStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}

/// Builds the code with parameters (q, n, k, K) and its encoding tables.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn gsag_code_new(q: u64, n: u64, k: u64, dim: u64, out: *mut *mut GsagCode) -> GsagStatus {
    guard(|| {
        if out.is_null() {
            return GsagStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let code = match make_code(q, n, k, dim) {
            Ok(c) => c,
            Err(CodeError::Localize(_)) | Err(CodeError::Tower(_)) => return GsagStatus::Internal,
            Err(_) => return GsagStatus::InvalidParams,
        };
        let Ok(table) = precompute_tables(&code) else { return GsagStatus::Internal };
        *out = Box::into_raw(Box::new(GsagCode { file: TableFile::new(code, table) }));
        GsagStatus::Ok
    })
}

/// Reads a table file written by `gsag_code_save` or the command-line tool.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` as for `gsag_code_new`.
#[no_mangle]
pub unsafe extern "C" fn gsag_code_load(path: *const c_char, out: *mut *mut GsagCode) -> GsagStatus {
    guard(|| {
        if out.is_null() {
            return GsagStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let Some(p) = path_arg(path) else { return GsagStatus::NullPointer };
        match TableFile::read(p) {
            Ok(file) => {
                *out = Box::into_raw(Box::new(GsagCode { file }));
                GsagStatus::Ok
            }
            Err(e) => table_status(&e),
        }
    })
}

/// # Safety
/// `code` must be a live handle; `path` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn gsag_code_save(code: *const GsagCode, path: *const c_char) -> GsagStatus {
    guard(|| {
        let (Some(c), Some(p)) = (code.as_ref(), path_arg(path)) else { return GsagStatus::NullPointer };
        match c.file.write(p) {
            Ok(()) => GsagStatus::Ok,
            Err(e) => table_status(&e),
        }
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `code` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gsag_code_free(code: *mut GsagCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Block length N, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gsag_code_length(code: *const GsagCode) -> u64 {
    code.as_ref().map_or(0, |c| c.file.code.params.len)
}

/// Dimension K, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gsag_code_dimension(code: *const GsagCode) -> u64 {
    code.as_ref().map_or(0, |c| c.file.code.params.dim)
}

/// Encodes K symbols of `msg` into N symbols of `out`.
///
/// # Safety
/// `msg` must hold `msg_len` readable symbols and `out` `out_len` writable ones.
#[no_mangle]
pub unsafe extern "C" fn gsag_encode(
    code: *const GsagCode,
    msg: *const u16,
    msg_len: usize,
    out: *mut u16,
    out_len: usize,
) -> GsagStatus {
    guard(|| {
        let Some(c) = code.as_ref() else { return GsagStatus::NullPointer };
        if msg.is_null() || out.is_null() {
            return GsagStatus::NullPointer;
        }
        let p = &c.file.code.params;
        if msg_len as u64 != p.dim || out_len as u64 != p.len {
            return GsagStatus::BufferSize;
        }
        let v = symbols(msg, msg_len);
        let q2 = c.file.code.tower().field().size();
        if v.iter().any(|g| g.0 as u32 >= q2) {
            return GsagStatus::Integrity;
        }
        match encode(&c.file.code, &c.file.table, &v) {
            Ok(w) => {
                let dst = std::slice::from_raw_parts_mut(out, out_len);
                for (d, g) in dst.iter_mut().zip(&w) {
                    *d = g.0;
                }
                GsagStatus::Ok
            }
            Err(_) => GsagStatus::Internal,
        }
    })
}

/// Prepares unique decoding. `degree` = 0 selects the guaranteed lifting
/// degree degG + K; a smaller positive value is the optimistic mode.
///
/// # Safety
/// `code` must be a live handle not used concurrently.
#[no_mangle]
pub unsafe extern "C" fn gsag_code_prepare_decoder(code: *mut GsagCode, degree: usize, seed: u64) -> GsagStatus {
    guard(|| {
        let Some(c) = code.as_mut() else { return GsagStatus::NullPointer };
        let code = &c.file.code;
        let p = code.params;
        let Ok(params) = choose_params(&p, Mode::Unique) else { return GsagStatus::InvalidParams };
        let d = if degree == 0 { (p.deg_g + p.dim) as usize } else { degree };
        let mut rng = SeedRng::new(seed).split(1);
        let Ok(place) = find_place_of_degree(code, d, &mut rng, 256) else { return GsagStatus::Internal };
        match build_lift_tables(code, &params, place) {
            Ok(tables) => {
                c.file.lift = Some(LiftSection { mode: DecodeMode::Unique, params, tables });
                GsagStatus::Ok
            }
            Err(_) => GsagStatus::InvalidParams,
        }
    })
}

/// Unique decoding of N received symbols. On success writes K symbols to
/// `msg` and the agreement count to `agreement` (which may be null).
///
/// # Safety
/// Buffers as for `gsag_encode`; `agreement` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gsag_decode(
    code: *const GsagCode,
    received: *const u16,
    len: usize,
    seed: u64,
    msg: *mut u16,
    msg_len: usize,
    agreement: *mut usize,
) -> GsagStatus {
    guard(|| {
        let Some(c) = code.as_ref() else { return GsagStatus::NullPointer };
        if received.is_null() || msg.is_null() {
            return GsagStatus::NullPointer;
        }
        let Some(lift) = &c.file.lift else { return GsagStatus::NoDecoder };
        let p = &c.file.code.params;
        if len as u64 != p.len || msg_len as u64 != p.dim {
            return GsagStatus::BufferSize;
        }
        let y = symbols(received, len);
        if y.iter().any(|g| g.0 as u32 >= c.file.code.tower().field().size()) {
            return GsagStatus::Integrity;
        }
        let mut rng = SeedRng::new(seed).split(3);
        match unique_decode(&c.file.code, &c.file.table, &lift.tables, &lift.params, &y, &mut rng) {
            Ok(UniqueOutcome::Decoded(cand)) => {
                std::slice::from_raw_parts_mut(msg, msg_len).copy_from_slice(&cand.message);
                if let Some(a) = agreement.as_mut() {
                    *a = cand.agreement;
                }
                GsagStatus::Ok
            }
            Ok(UniqueOutcome::Declined) => GsagStatus::Declined,
            Err(_) => GsagStatus::Internal,
        }
    })
}

/// Changes exactly `errors` of the `len` symbols of `word` over F_{q²},
/// writing the result to `out` (which may equal `word`).
///
/// # Safety
/// `word` readable and `out` writable for `len` symbols.
#[no_mangle]
pub unsafe extern "C" fn gsag_corrupt(
    q: u64,
    word: *const u16,
    len: usize,
    errors: usize,
    seed: u64,
    out: *mut u16,
) -> GsagStatus {
    guard(|| {
        if word.is_null() || out.is_null() {
            return GsagStatus::NullPointer;
        }
        let Ok(f) = SmallField::for_q_squared(q) else { return GsagStatus::InvalidParams };
        let w = symbols(word, len);
        let mut rng = SeedRng::new(seed).split(2);
        match corrupt(&f, &w, errors, &mut rng) {
            Ok(y) => {
                let dst = std::slice::from_raw_parts_mut(out, len);
                for (d, g) in dst.iter_mut().zip(&y) {
                    *d = g.0;
                }
                GsagStatus::Ok
            }
            Err(gsag::channel::ChannelError::TooManyErrors { .. }) => GsagStatus::InvalidParams,
            Err(_) => GsagStatus::Integrity,
        }
    })
}
