use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use debris_linker::elements::KeplerianElements;
use debris_linker::observer::StationSpec;
use debris_linker::radar::{exact_attributable, write_attributable};
use debris_linker::time::Epoch;
use debris_linker::MU_EARTH;
use debris_linker_ffi::*;

const HEADER: &str = include_str!("../include/debris_linker.h");

fn att(day_fraction: f64) -> *mut DlAttributable {
    let el = KeplerianElements::reference();
    let a = exact_attributable(&el, &StationSpec::reference(), Epoch::from_parts(54127, day_fraction), MU_EARTH).unwrap();
    let json = CString::new(write_attributable(&a)).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dl_attributable_from_json(json.as_ptr(), &mut out) }, DlStatus::Ok);
    out
}

fn last_error() -> String {
    let p = dl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn links_exact_attributables() {
    let (a1, a2) = (att(0.155035), att(0.582118));
    let truth = KeplerianElements::reference();
    for method in [DlMethod::InfangQuadratic, DlMethod::InfangLinear, DlMethod::KeplerianIntegrals] {
        let mut set = ptr::null_mut();
        assert_eq!(unsafe { dl_link(a1, a2, method, &mut set) }, DlStatus::Ok, "{method:?}");
        let n = unsafe { dl_solution_set_len(set) };
        assert!(n >= 1);
        let mut s = DlSolution::default();
        assert_eq!(unsafe { dl_solution_set_get(set, 0, &mut s) }, DlStatus::Ok);
        assert!(s.preferred);
        assert!((s.first.a_km - truth.a).abs() < 1e-3, "{method:?}: a = {}", s.first.a_km);
        assert!((s.first.e - truth.e).abs() < 1e-6);
        if method == DlMethod::KeplerianIntegrals {
            assert_eq!((s.method, s.revolutions, s.lambert_case), (3, -1, 0));
        } else {
            assert_eq!(s.revolutions, 5);
            assert!((1..=4).contains(&s.lambert_case));
        }
        assert_eq!(unsafe { dl_solution_set_get(set, n, &mut s) }, DlStatus::OutOfRange);
        unsafe { dl_solution_set_free(set) };
    }
    unsafe {
        dl_attributable_free(a1);
        dl_attributable_free(a2);
    }
}

#[test]
fn equal_epochs_are_rejected() {
    let a = att(0.155035);
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { dl_link(a, a, DlMethod::InfangQuadratic, &mut set) }, DlStatus::DegenerateTimes);
    assert!(set.is_null());
    assert!(!last_error().is_empty());
    unsafe { dl_attributable_free(a) };
}

#[test]
fn null_and_malformed_input() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dl_attributable_from_json(ptr::null(), &mut out) }, DlStatus::NullPointer);
    let bad = CString::new("{\n \"t_bar\": 1\n}").unwrap();
    assert_eq!(unsafe { dl_attributable_from_json(bad.as_ptr(), &mut out) }, DlStatus::Parse);
    assert!(out.is_null());
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { dl_link(ptr::null(), ptr::null(), DlMethod::KeplerianIntegrals, &mut set) }, DlStatus::NullPointer);
    assert_eq!(last_error(), "first is null");
    assert_eq!(unsafe { dl_solution_set_len(ptr::null()) }, 0);
    unsafe {
        dl_attributable_free(ptr::null_mut());
        dl_solution_set_free(ptr::null_mut());
        dl_track_free(ptr::null_mut());
    }
    let status = unsafe { dl_attributable_new(54127, 0.1, 10.0, 20.0, 2000.0, 0.0, 0.0, 10.0, 0.0, 7000.0, &mut out) };
    assert_eq!(status, DlStatus::InvalidInput);
    assert!(last_error().contains("radius"));
    let status = unsafe { dl_attributable_new(54127, 0.1, 10.0, 20.0, 2000.0, 0.0, 0.0, 10.0, 0.0, 6378.0, &mut out) };
    assert_eq!(status, DlStatus::Ok);
    unsafe { dl_attributable_free(out) };
}

#[test]
fn track_gibbs_and_interpolation() {
    let text = "\
# station S 10 20 6378.0
54127.10000000, 2000.0, 50.00, -2.80, S
54127.10011574, 1990.0, 50.70, -4.60, S
54127.10023148, 1981.0, 51.40, -6.40, S
54127.10034722, 1973.0, 52.10, -8.20, S
";
    let text = CString::new(text).unwrap();
    let mut track = ptr::null_mut();
    let status = unsafe { dl_track_parse(text.as_ptr(), &mut track) };
    assert_eq!(status, DlStatus::Ok, "{}", if status == DlStatus::Ok { String::new() } else { last_error() });
    let mut el = DlElements::default();
    assert_eq!(unsafe { dl_gibbs(track, &mut el) }, DlStatus::Ok);
    assert!(el.a_km.is_finite() && (el.epoch_mjd - 54127.10011574).abs() < 1e-8);
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { dl_track_attributable(track, &mut a) }, DlStatus::Ok);
    unsafe {
        dl_attributable_free(a);
        dl_track_free(track);
    }
}

#[test]
fn header_declares_the_api() {
    for name in [
        "DlStatus dl_attributable_new(",
        "DlStatus dl_attributable_from_json(",
        "void dl_attributable_free(",
        "DlStatus dl_track_parse(",
        "void dl_track_free(",
        "DlStatus dl_track_attributable(",
        "DlStatus dl_gibbs(",
        "DlStatus dl_link(",
        "size_t dl_solution_set_len(",
        "DlStatus dl_solution_set_get(",
        "void dl_solution_set_free(",
        "const char *dl_last_error_message(",
        "typedef struct DlAttributable DlAttributable;",
        "DL_STATUS_DEGENERATE_TIMES = 4",
    ] {
        assert!(HEADER.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else { return };
    if !cc.status.success() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(&src, format!("#include \"{}/include/debris_linker.h\"\nint main(void) {{ return 0; }}\n", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let out = Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"]).arg(&src).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
