use std::ffi::CString;
use std::ptr;

use gpvortex_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { gpv_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn pade_handle_lifecycle() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(gpv_pade_new(2, &mut p), GpvStatus::Ok);
        let (mut rho, mut d) = (0.0, 0.0);
        assert_eq!(gpv_pade_eval(p, 0.0, &mut rho, &mut d), GpvStatus::Ok);
        assert_eq!((rho, d), (0.0, 0.0));
        let mut coeffs = [0.0; 3];
        let mut len = 0;
        assert_eq!(gpv_pade_coefficients(p, coeffs.as_mut_ptr(), 3, &mut len), GpvStatus::Ok);
        assert_eq!(len, 3);
        assert_eq!(coeffs[0], 11.0 / 32.0);
        assert_eq!(gpv_pade_coefficients(p, coeffs.as_mut_ptr(), 2, &mut len), GpvStatus::BufferTooSmall);
        assert_eq!(gpv_pade_eval(p, -1.0, &mut rho, ptr::null_mut()), GpvStatus::InvalidArgument);
        gpv_pade_free(p);
        gpv_pade_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(gpv_pade_new(5, &mut p), GpvStatus::InvalidArgument);
        assert!(p.is_null());
        assert!(last_error().contains("q = 5"), "{}", last_error());
        assert_eq!(gpv_pade_eval(ptr::null(), 1.0, ptr::null_mut(), ptr::null_mut()), GpvStatus::NullPointer);
        assert_eq!(gpv_pade_new(2, ptr::null_mut()), GpvStatus::NullPointer);
        let mut r = ptr::null_mut();
        let bad = CString::new("tau = 0.03\nT = 1\n").unwrap();
        assert_eq!(gpv_run_new(bad.as_ptr(), &mut r), GpvStatus::InvalidArgument);
        let mut prof = ptr::null_mut();
        assert_eq!(gpv_profile_new(10, &mut prof), GpvStatus::InvalidArgument);
    }
}

#[test]
fn run_series_round_trip() {
    unsafe {
        let cfg = CString::new("m = 32\nL = 8\ntau = 0.1\nT = 0.5\ndisks = 2, 5\n").unwrap();
        let mut r = ptr::null_mut();
        assert_eq!(gpv_run_new(cfg.as_ptr(), &mut r), GpvStatus::Ok, "{}", last_error());
        let (mut rec, mut disks, mut evals) = (0, 0, 0);
        assert_eq!(gpv_run_shape(r, &mut rec, &mut disks, &mut evals), GpvStatus::Ok);
        assert_eq!((rec, disks, evals), (5, 2, 1));
        let mut t = vec![0.0; rec];
        let mut len = 0;
        assert_eq!(gpv_run_times(r, t.as_mut_ptr(), rec, &mut len), GpvStatus::Ok);
        assert!((t[4] - 0.5).abs() < 1e-12);
        let mut e = vec![0.0; rec];
        assert_eq!(gpv_run_errors(r, 0, 1, e.as_mut_ptr(), rec, &mut len), GpvStatus::Ok);
        assert!(e.iter().all(|v| *v > 0.0 && *v < 0.1));
        assert_eq!(gpv_run_errors(r, 1, 0, e.as_mut_ptr(), rec, &mut len), GpvStatus::InvalidArgument);
        let mut drift = 1.0;
        assert_eq!(gpv_run_mass_drift(r, &mut drift), GpvStatus::Ok);
        assert!(drift < 1e-12);
        gpv_run_free(r);
    }
}

#[test]
fn stepper_is_reversible() {
    unsafe {
        let cfg = CString::new("backend = fd\nL = 4\nhmin = 0.1\nmean = 0.4\ntau = 0.02\nT = 1\n").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(gpv_stepper_new(cfg.as_ptr(), &mut s), GpvStatus::Ok, "{}", last_error());
        let (mut nx, mut ny) = (0, 0);
        assert_eq!(gpv_stepper_values(s, ptr::null_mut(), 0, &mut nx, &mut ny), GpvStatus::BufferTooSmall);
        let mut v0 = vec![0.0; 2 * nx * ny];
        assert_eq!(gpv_stepper_values(s, v0.as_mut_ptr(), v0.len(), &mut nx, &mut ny), GpvStatus::Ok);
        let (mut t, mut m0, mut m1) = (0.0, 0.0, 0.0);
        gpv_stepper_state(s, ptr::null_mut(), &mut m0);
        assert_eq!(gpv_stepper_advance(s, 3, 0.0), GpvStatus::Ok);
        gpv_stepper_state(s, &mut t, &mut m1);
        assert!((t - 0.06).abs() < 1e-12);
        assert!(((m1 - m0) / m0).abs() < 1e-12);
        assert_eq!(gpv_stepper_advance(s, 3, -0.02), GpvStatus::Ok);
        let mut v1 = vec![0.0; v0.len()];
        gpv_stepper_values(s, v1.as_mut_ptr(), v1.len(), ptr::null_mut(), ptr::null_mut());
        let err = v0.iter().zip(&v1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-11, "{err}");
        gpv_stepper_free(s);
    }
}
