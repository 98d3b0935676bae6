use std::ffi::{c_char, CStr, CString};
use std::ptr;

use injfactor_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    injf_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(injf_last_error()).to_str().unwrap().to_owned()
}

#[test]
fn synthesize_verify_and_round_trip() {
    unsafe {
        let (tf, tg, th) = (c(r#"{"fwd":1,"finite":{"2":1}}"#), c(r#"{"fwd":1}"#), c(r#"{"fwd":2,"open":1}"#));
        let mut w = ptr::null_mut();
        assert_eq!(injf_synthesize(tf.as_ptr(), tg.as_ptr(), th.as_ptr(), &mut w), InjfStatus::Ok);
        let mut failures = usize::MAX;
        assert_eq!(injf_witness_verify(w, 300, &mut failures), InjfStatus::Ok);
        assert_eq!(failures, 0);

        let mut s = ptr::null_mut();
        assert_eq!(injf_witness_bundle(w, &mut s), InjfStatus::Ok);
        let bundle = c(&take(s));
        let mut w2 = ptr::null_mut();
        assert_eq!(injf_witness_from_bundle(bundle.as_ptr(), &mut w2), InjfStatus::Ok);

        let mut h0 = ptr::null_mut();
        assert_eq!(injf_witness_map(w2, c("h0").as_ptr(), &mut h0), InjfStatus::Ok);
        let mut win = ptr::null_mut();
        assert_eq!(injf_map_window(h0, 40, &mut win), InjfStatus::Ok);
        let win: Vec<String> = serde_json::from_str(&take(win)).unwrap();
        assert_eq!(win.len(), 40);
        for x in &win {
            let x = c(x);
            let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
            assert_eq!(injf_witness_chain(w, x.as_ptr(), &mut a), InjfStatus::Ok);
            assert_eq!(injf_map_apply(h0, x.as_ptr(), &mut b), InjfStatus::Ok);
            assert_eq!(take(a), take(b));
        }
        let mut census = ptr::null_mut();
        assert_eq!(injf_map_census(h0, &mut census), InjfStatus::Ok);
        assert!(take(census).contains("\"fwd\":2"));

        injf_map_free(h0);
        injf_witness_free(w2);
        injf_witness_free(w);
    }
}

#[test]
fn map_handles() {
    unsafe {
        let mut m = ptr::null_mut();
        let d = c(r#"{"kind":"shift","on":"nat"}"#);
        assert_eq!(injf_map_from_description(d.as_ptr(), &mut m), InjfStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(injf_map_apply(m, c("4").as_ptr(), &mut s), InjfStatus::Ok);
        assert_eq!(take(s), "5");
        assert_eq!(injf_map_preimage(m, c("0").as_ptr(), &mut s), InjfStatus::Ok);
        assert!(s.is_null());
        assert_eq!(injf_map_preimage(m, c("9").as_ptr(), &mut s), InjfStatus::Ok);
        assert_eq!(take(s), "8");
        assert_eq!(injf_map_apply(m, c("-3").as_ptr(), &mut s), InjfStatus::OutOfCarrier);
        injf_map_free(m);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let o = c(r#"{"open":1}"#);
        let mut w = ptr::null_mut();
        assert_eq!(injf_synthesize(o.as_ptr(), o.as_ptr(), o.as_ptr(), &mut w), InjfStatus::Validation);
        assert!(last_error().contains("both inputs are permutations"));
        assert!(w.is_null());

        let bad = c("{bad");
        assert_eq!(injf_synthesize(bad.as_ptr(), o.as_ptr(), o.as_ptr(), &mut w), InjfStatus::Malformed);
        assert_eq!(injf_synthesize(ptr::null(), o.as_ptr(), o.as_ptr(), &mut w), InjfStatus::NullArgument);
        let f1 = c(r#"{"fwd":1}"#);
        let f3 = c(r#"{"fwd":3}"#);
        assert_eq!(injf_synthesize(f1.as_ptr(), f1.as_ptr(), f3.as_ptr(), &mut w), InjfStatus::Validation);
        assert!(last_error().contains("coimage"));

        let mut n = 0;
        assert_eq!(injf_witness_verify(ptr::null(), 10, &mut n), InjfStatus::NullArgument);
        injf_witness_free(ptr::null_mut());
        injf_map_free(ptr::null_mut());
        injf_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/injfactor.h")).unwrap();
    for name in ["injf_synthesize", "injf_witness_verify", "injf_map_apply", "injf_string_free", "INJF_STATUS_OK", "typedef struct InjfWitness"] {
        assert!(h.contains(name), "{name} missing from header");
    }
}
