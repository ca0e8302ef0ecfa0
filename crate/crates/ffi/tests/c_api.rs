use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use gsag_ffi::*;

fn new_code(q: u64, k: u64) -> *mut GsagCode {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { gsag_code_new(q, 2, 2, k, &mut h) }, GsagStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn encode_through_the_handle() {
    let h = new_code(4, 3);
    unsafe {
        assert_eq!(gsag_code_length(h), 192);
        assert_eq!(gsag_code_dimension(h), 3);
        let msg = [1u16, 0, 7];
        let mut cw = vec![0u16; 192];
        assert_eq!(gsag_encode(h, msg.as_ptr(), 3, cw.as_mut_ptr(), 192), GsagStatus::Ok);
        assert!(cw.iter().any(|&x| x != 0));
        assert_eq!(gsag_encode(h, msg.as_ptr(), 2, cw.as_mut_ptr(), 192), GsagStatus::BufferSize);
        let bad = [1u16, 16, 0];
        assert_eq!(gsag_encode(h, bad.as_ptr(), 3, cw.as_mut_ptr(), 192), GsagStatus::Integrity);
        let mut y = cw.clone();
        assert_eq!(gsag_corrupt(4, cw.as_ptr(), 192, 20, 9, y.as_mut_ptr()), GsagStatus::Ok);
        assert_eq!(cw.iter().zip(&y).filter(|(a, b)| a != b).count(), 20);
        assert_eq!(gsag_corrupt(4, cw.as_ptr(), 192, 193, 9, y.as_mut_ptr()), GsagStatus::InvalidParams);
        let mut out = [0u16; 3];
        assert_eq!(gsag_decode(h, cw.as_ptr(), 192, 1, out.as_mut_ptr(), 3, ptr::null_mut()), GsagStatus::NoDecoder);
        gsag_code_free(h);
    }
}

#[test]
fn invalid_parameters_and_null_pointers() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(gsag_code_new(3, 2, 2, 1, &mut h), GsagStatus::InvalidParams);
        assert!(h.is_null());
        assert_eq!(gsag_code_new(4, 2, 2, 3, ptr::null_mut()), GsagStatus::NullPointer);
        assert_eq!(gsag_code_length(ptr::null()), 0);
        gsag_code_free(ptr::null_mut());
        let msg = CStr::from_ptr(gsag_status_message(GsagStatus::Declined));
        assert_eq!(msg.to_str().unwrap(), "decoder declined");
    }
}

#[test]
fn save_load_and_decoder_preparation() {
    let h = new_code(4, 3);
    let dir = std::env::temp_dir().join(format!("gsag-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = CString::new(dir.join("t.bin").to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(gsag_code_prepare_decoder(h, 20, 5), GsagStatus::Ok);
        assert_eq!(gsag_code_save(h, path.as_ptr()), GsagStatus::Ok);
        let mut g = ptr::null_mut();
        assert_eq!(gsag_code_load(path.as_ptr(), &mut g), GsagStatus::Ok);
        let msg = [3u16, 2, 1];
        let mut cw = vec![0u16; 192];
        assert_eq!(gsag_encode(g, msg.as_ptr(), 3, cw.as_mut_ptr(), 192), GsagStatus::Ok);
        // B exceeds N at q = 4, so even an intact codeword is declined.
        let mut out = [0u16; 3];
        let mut agr = 0usize;
        assert_eq!(gsag_decode(g, cw.as_ptr(), 192, 1, out.as_mut_ptr(), 3, &mut agr), GsagStatus::Declined);
        gsag_code_free(g);

        let mut bytes = std::fs::read(dir.join("t.bin")).unwrap();
        let n = bytes.len();
        bytes[n - 1] ^= 0xff;
        std::fs::write(dir.join("bad.bin"), &bytes).unwrap();
        let bad = CString::new(dir.join("bad.bin").to_str().unwrap()).unwrap();
        let mut b = ptr::null_mut();
        assert_eq!(gsag_code_load(bad.as_ptr(), &mut b), GsagStatus::Integrity);
        let missing = CString::new(dir.join("missing.bin").to_str().unwrap()).unwrap();
        assert_eq!(gsag_code_load(missing.as_ptr(), &mut b), GsagStatus::Io);
        gsag_code_free(h);
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn generated_header_declares_the_interface() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/gsag.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "typedef struct GsagCode GsagCode",
        "GSAG_STATUS_DECLINED = 4",
        "gsag_code_new",
        "gsag_code_load",
        "gsag_code_save",
        "gsag_code_free",
        "gsag_encode",
        "gsag_decode",
        "gsag_code_prepare_decoder",
        "gsag_corrupt",
        "gsag_status_message",
    ] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
    if Command::new("cc").arg("--version").output().is_ok() {
        let st = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).status().unwrap();
        assert!(st.success(), "header does not compile as C");
    }
}
