use std::ffi::CString;
use std::ptr;

use lerayflux_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let len = unsafe { lf_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..len.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn taylor_green(n: usize) -> *mut LfState {
    let spec = lf_initial_spec_default();
    let mut state = ptr::null_mut();
    let st = unsafe { lf_state_initial(LfInitialKind::TaylorGreen, 3, n, 0.25, &spec, &mut state) };
    assert_eq!(st, LfStatus::Ok);
    state
}

#[test]
fn step_conserves_energy_through_the_handles() {
    let params = lf_params_default();
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { lf_model_new(&params, &mut model) }, LfStatus::Ok);
    let state = taylor_green(16);
    let (mut e0, mut e1, mut t) = (0.0, 0.0, 0.0);
    let (mut dim, mut n) = (0usize, 0usize);
    unsafe {
        lf_state_info(state, &mut t, &mut dim, &mut n, &mut e0, ptr::null_mut());
        assert_eq!(lf_state_step(model, state, 0.01, 10), LfStatus::Ok);
        lf_state_info(state, &mut t, ptr::null_mut(), ptr::null_mut(), &mut e1, ptr::null_mut());
    }
    assert_eq!((dim, n), (3, 16));
    assert!((t - 0.1).abs() < 1e-15);
    assert!(((e1 - e0) / e0).abs() < 1e-10);
    unsafe {
        lf_state_free(state);
        lf_model_free(model);
    }
}

#[test]
fn cfl_violation_maps_to_its_code() {
    let params = lf_params_default();
    let mut model = ptr::null_mut();
    unsafe { lf_model_new(&params, &mut model) };
    let state = taylor_green(16);
    let st = unsafe { lf_state_step(model, state, 10.0, 1) };
    assert_eq!(st, LfStatus::Cfl);
    assert!(last_error().contains("CFL"));
    unsafe {
        lf_state_free(state);
        lf_model_free(model);
    }
}

#[test]
fn invalid_parameters_and_null_pointers_are_reported() {
    let mut params = lf_params_default();
    params.alpha = -1.0;
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { lf_model_new(&params, &mut model) }, LfStatus::InvalidParameter);
    assert!(model.is_null());
    assert!(last_error().contains("alpha"));
    assert_eq!(unsafe { lf_model_new(ptr::null(), &mut model) }, LfStatus::NullPointer);
    let mut out = 0.0;
    assert_eq!(unsafe { lf_besov_norm(ptr::null(), LfField::U, 0.0, 2.0, 2.0, &mut out) }, LfStatus::NullPointer);
    unsafe {
        lf_state_free(ptr::null_mut());
        lf_model_free(ptr::null_mut());
    }
}

#[test]
fn truncated_error_buffer_stays_terminated() {
    let mut params = lf_params_default();
    params.nu = f64::NAN;
    let mut model = ptr::null_mut();
    unsafe { lf_model_new(&params, &mut model) };
    let mut buf = [1 as std::ffi::c_char; 8];
    let full = unsafe { lf_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(full > 8);
    assert_eq!(buf[7], 0);
    assert_eq!(unsafe { lf_last_error(ptr::null_mut(), 0) }, full);
}

#[test]
fn flux_beyond_the_band_vanishes() {
    let state = taylor_green(16);
    let kappas = [1.0, 2.0, 4.0, 8.0];
    let mut pi = [f64::NAN; 4];
    assert_eq!(unsafe { lf_flux(state, kappas.as_ptr(), 4, pi.as_mut_ptr()) }, LfStatus::Ok);
    assert!(pi[0].abs() < 1e-12);
    assert!(pi[3].abs() < 1e-12);
    let bad = [2.0, 1.0];
    assert_eq!(unsafe { lf_flux(state, bad.as_ptr(), 2, pi.as_mut_ptr()) }, LfStatus::InvalidParameter);
    unsafe { lf_state_free(state) };
}

#[test]
fn snapshot_round_trip_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("s.lfs").to_str().unwrap()).unwrap();
    let state = taylor_green(8);
    assert_eq!(unsafe { lf_state_save(state, path.as_ptr()) }, LfStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { lf_state_load(path.as_ptr(), &mut back) }, LfStatus::Ok);
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        lf_state_info(state, ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), &mut a, ptr::null_mut());
        lf_state_info(back, ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), &mut b, ptr::null_mut());
    }
    assert!((a - b).abs() < 1e-12 * a);
    let missing = CString::new(dir.path().join("none.lfs").to_str().unwrap()).unwrap();
    let mut other = ptr::null_mut();
    assert_eq!(unsafe { lf_state_load(missing.as_ptr(), &mut other) }, LfStatus::Io);
    unsafe {
        lf_state_free(state);
        lf_state_free(back);
    }
}

#[test]
fn defect_and_besov_entry_points() {
    let state = taylor_green(16);
    let (mut d1, mut d2) = (f64::NAN, f64::NAN);
    assert_eq!(unsafe { lf_defect(state, 0.4, 1, 0, &mut d1, &mut d2) }, LfStatus::Ok);
    assert!(d1.is_finite() && d1 >= 0.0 && d2 >= 0.0);
    let mut norm = 0.0;
    assert_eq!(
        unsafe { lf_besov_norm(state, LfField::U, 0.0, 2.0, 2.0, &mut norm) },
        LfStatus::Ok
    );
    assert!(norm > 0.0 && norm.is_finite());
    assert_eq!(unsafe { lf_defect(state, 5.0, 1, 0, &mut d1, &mut d2) }, LfStatus::InvalidParameter);
    unsafe { lf_state_free(state) };
}

#[test]
fn burgers_needs_resolution() {
    let eps = [0.4, 0.2, 0.1, 0.05];
    let mut out = 0.0;
    assert_eq!(
        unsafe { lf_burgers_dissipation(256, 1.0, eps.as_ptr(), 4, &mut out) },
        LfStatus::Resolution
    );
    assert_eq!(
        unsafe { lf_burgers_dissipation(2048, 1.0, eps.as_ptr(), 4, &mut out) },
        LfStatus::Ok
    );
    assert!((out * 12.0 - 1.0).abs() < 0.02);
}

#[test]
fn header_declares_every_entry_point() {
    let header = include_str!("../include/lerayflux.h");
    let source = include_str!("../src/lib.rs");
    let exported: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 14, "{exported:?}");
    for name in exported {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct LfState LfState;"));
}
