use std::ffi::{CStr, CString};
use std::ptr;

use tracelab_ffi::*;

fn last_error() -> String {
    let p = tl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn field_arithmetic_round_trips() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(tl_field_new(7, 2, &mut f), TlStatus::Ok);
        assert_eq!(tl_field_order(f), 49);
        let mut desc = ptr::null_mut();
        assert_eq!(tl_field_describe(f, &mut desc), TlStatus::Ok);
        assert!(CStr::from_ptr(desc).to_str().unwrap().starts_with("7^2:"));
        tl_string_free(desc);

        let (mut prod, mut back) = (0u64, 0u64);
        assert_eq!(tl_field_op(f, TlOp::Mul, 10, 23, &mut prod), TlStatus::Ok);
        assert_eq!(tl_field_op(f, TlOp::Div, prod, 23, &mut back), TlStatus::Ok);
        assert_eq!(back, 10);
        assert_eq!(tl_field_op(f, TlOp::Div, 1, 0, &mut back), TlStatus::DivisionByZero);
        assert_eq!(tl_field_op(f, TlOp::Add, 49, 0, &mut back), TlStatus::InvalidArgument);
        tl_field_free(f);
    }
}

#[test]
fn errors_are_reported_per_thread() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(tl_field_new(9, 1, &mut f), TlStatus::InvalidArgument);
        assert!(f.is_null());
        assert!(last_error().contains("not prime"));
        let other = std::thread::spawn(|| tl_last_error().is_null()).join().unwrap();
        assert!(other);
        assert_eq!(tl_field_new(7, 1, ptr::null_mut()), TlStatus::NullPointer);
        assert_eq!(tl_field_op(ptr::null(), TlOp::Add, 0, 0, &mut 0), TlStatus::NullPointer);
        let mut g = ptr::null_mut();
        assert_eq!(tl_field_new(5, 1, &mut g), TlStatus::Ok);
        assert!(tl_last_error().is_null());
        tl_field_free(g);
        tl_field_free(ptr::null_mut());
    }
}

#[test]
fn legendre_symbol_values() {
    let cfg = CString::new(r#"{"p": 11, "kind": "kummer", "order": 2, "ell": 3}"#).unwrap();
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(tl_trace_new(cfg.as_ptr(), &mut t), TlStatus::Ok);
        let (mut dom, mut res) = (0, 0);
        assert_eq!(tl_trace_orders(t, &mut dom, &mut res), TlStatus::Ok);
        assert_eq!((dom, res), (11, 3));
        // Squares mod 11 map to 1, non-squares to -1 = 2 in F_3.
        let squares = [1u64, 3, 4, 5, 9];
        for x in 1..11u64 {
            let (mut v, mut s) = (0, 0);
            assert_eq!(tl_trace_value(t, x, &mut v, &mut s), TlStatus::Ok);
            assert_eq!(s, 0);
            assert_eq!(v, if squares.contains(&x) { 1 } else { 2 });
        }
        let (mut v, mut s) = (9, 0);
        assert_eq!(tl_trace_value(t, 0, &mut v, &mut s), TlStatus::Ok);
        assert_eq!((v, s), (0, 1));
        tl_trace_free(t);
    }
}

#[test]
fn bad_trace_configs_fail_cleanly() {
    for (json, status) in [
        (r#"{"p": 11, "colour": 1}"#, TlStatus::Parse),
        (r#"{"p": 11, "order": 3, "ell": 3}"#, TlStatus::InvalidArgument),
        (r#"not json"#, TlStatus::Parse),
    ] {
        let cfg = CString::new(json).unwrap();
        let mut t = ptr::null_mut();
        assert_eq!(unsafe { tl_trace_new(cfg.as_ptr(), &mut t) }, status, "{json}");
        assert!(t.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn experiments_return_report_json() {
    let name = CString::new("gauss-sum").unwrap();
    let cfg = CString::new(r#"{"kind": "SL", "n": 2, "ell": 3}"#).unwrap();
    unsafe {
        let mut json = ptr::null_mut();
        let mut ok = 0u8;
        assert_eq!(tl_run_experiment(name.as_ptr(), cfg.as_ptr(), &mut json, &mut ok), TlStatus::Ok);
        assert_eq!(ok, 1);
        let report: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(report["config"]["experiment"], "gauss-sum");
        tl_string_free(json);

        let bogus = CString::new("nothing").unwrap();
        assert_eq!(
            tl_run_experiment(bogus.as_ptr(), cfg.as_ptr(), &mut json, &mut ok),
            TlStatus::InvalidArgument
        );
    }
}
