use std::ffi::{CStr, CString};
use std::ptr;

use urnlab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(urnlab_last_error()) }.to_string_lossy().into_owned()
}

fn from_json(text: &str) -> (UrnlabStatus, *mut UrnlabUrn) {
    let c = CString::new(text).unwrap();
    let mut urn = ptr::null_mut();
    let status = unsafe { urnlab_urn_from_json(c.as_ptr(), &mut urn) };
    (status, urn)
}

#[test]
fn classify_critical_fixture() {
    let (status, urn) = from_json(r#"{"R": [[3,1],[1,3]], "X0": [1,1]}"#);
    assert_eq!(status, UrnlabStatus::Ok);
    let mut class = UrnlabClass { kind: UrnlabKind::Large, d: 9, nu: 9, sigma2: 0.0, exact: 0 };
    assert_eq!(unsafe { urnlab_classify(urn, &mut class) }, UrnlabStatus::Ok);
    assert_eq!(class.kind, UrnlabKind::CriticallySmall);
    assert_eq!((class.d, class.nu, class.exact), (0, 1, 1));
    assert_eq!(class.sigma2, 0.5);
    let (mut re, mut im) = ([0.0; 2], [0.0; 2]);
    assert_eq!(unsafe { urnlab_eigenvalues(urn, re.as_mut_ptr(), im.as_mut_ptr(), 2) }, UrnlabStatus::Ok);
    assert_eq!(re, [1.0, 0.5]);
    assert_eq!(im, [0.0, 0.0]);
    unsafe { urnlab_urn_free(urn) };
}

#[test]
fn integer_constructor_and_simulation() {
    let r = [2i64, 1, 1, 2];
    let x0 = [1i64, 1];
    let mut urn = ptr::null_mut();
    assert_eq!(unsafe { urnlab_urn_new(2, r.as_ptr(), x0.as_ptr(), &mut urn) }, UrnlabStatus::Ok);
    assert_eq!(unsafe { urnlab_urn_colors(urn) }, 2);
    let mut out = vec![0.0; 2 * 11];
    assert_eq!(unsafe { urnlab_simulate(urn, 10, 7, out.as_mut_ptr(), out.len()) }, UrnlabStatus::Ok);
    for (i, row) in out.chunks(2).enumerate() {
        assert_eq!(row[0] + row[1], 2.0 + 3.0 * i as f64);
    }
    let mut short = vec![0.0; 4];
    assert_eq!(unsafe { urnlab_simulate(urn, 10, 7, short.as_mut_ptr(), short.len()) }, UrnlabStatus::BufferTooSmall);
    assert!(!last_error().is_empty());
    unsafe { urnlab_urn_free(urn) };
}

#[test]
fn exact_moments_of_total_mass() {
    let (_, urn) = from_json(r#"{"R": [[2,1],[1,2]], "X0": [1,1]}"#);
    let alpha = [1u32, 0];
    let (mut re, mut im) = (vec![0.0; 6], vec![0.0; 6]);
    let status = unsafe { urnlab_exact_moments(urn, alpha.as_ptr(), 5, re.as_mut_ptr(), im.as_mut_ptr(), 6) };
    assert_eq!(status, UrnlabStatus::Ok);
    for (n, v) in re.iter().enumerate() {
        assert!((v - (2.0 / 3.0 + n as f64)).abs() < 1e-12);
    }
    assert!(im.iter().all(|v| *v == 0.0));
    unsafe { urnlab_urn_free(urn) };
}

#[test]
fn degenerate_direction_is_reported() {
    let (_, urn) = from_json(r#"{"R": [[2,1],[1,2]], "X0": [1,1]}"#);
    let w = [1.0, 1.0];
    let (mut values, mut stderrs) = ([0.0; 4], [0.0; 4]);
    let status = unsafe { urnlab_mc_moments(urn, w.as_ptr(), 50, 100, 1, 4, values.as_mut_ptr(), stderrs.as_mut_ptr()) };
    assert_eq!(status, UrnlabStatus::DegenerateDirection);
    let w = [1.0, -1.0];
    let status = unsafe { urnlab_mc_moments(urn, w.as_ptr(), 50, 400, 1, 4, values.as_mut_ptr(), stderrs.as_mut_ptr()) };
    assert_eq!(status, UrnlabStatus::Ok);
    assert!((values[1] - 1.0).abs() < 1e-9);
    unsafe { urnlab_urn_free(urn) };
}

#[test]
fn errors_map_to_status_codes() {
    let (status, urn) = from_json("{not json");
    assert_eq!(status, UrnlabStatus::Schema);
    assert!(urn.is_null());
    assert!(last_error().contains("schema"));

    let (status, _) = from_json(r#"{"R": [[3,1],[1,2]], "X0": [1,1]}"#);
    assert_eq!(status, UrnlabStatus::InvalidUrn);

    let mut urn = ptr::null_mut();
    assert_eq!(unsafe { urnlab_urn_from_json(ptr::null(), &mut urn) }, UrnlabStatus::NullArgument);
    let mut class = UrnlabClass { kind: UrnlabKind::Large, d: 0, nu: 0, sigma2: 0.0, exact: 0 };
    assert_eq!(unsafe { urnlab_classify(ptr::null(), &mut class) }, UrnlabStatus::NullArgument);
    unsafe { urnlab_urn_free(ptr::null_mut()) };
    unsafe { urnlab_string_free(ptr::null_mut()) };
}

#[test]
fn verify_refuses_large_urns() {
    let (_, urn) = from_json(r#"{"R": [[4,1],[1,4]], "X0": [1,1]}"#);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { urnlab_verify_json(urn, 10, 0, &mut out) }, UrnlabStatus::NotSmall);
    assert!(out.is_null());
    unsafe { urnlab_urn_free(urn) };
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/urnlab.h")).unwrap();
    for name in [
        "typedef struct UrnlabUrn UrnlabUrn",
        "URNLAB_STATUS_OK = 0",
        "urnlab_urn_from_json",
        "urnlab_urn_new",
        "urnlab_urn_free",
        "urnlab_classify",
        "urnlab_eigenvalues",
        "urnlab_simulate",
        "urnlab_exact_moments",
        "urnlab_mc_moments",
        "urnlab_verify_json",
        "urnlab_string_free",
        "urnlab_last_error",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
