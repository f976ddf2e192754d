//! C ABI for `gpvortex`.
//!
//! Objects are opaque handles created by `gpv_*_new` functions and released
//! with the matching `gpv_*_free`. Every fallible call returns a
//! [`GpvStatus`]; on failure the message is kept per thread and can be
//! copied out with [`gpv_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gpvortex::config::parse_config;
use gpvortex::dynamics::{
    build_vortex, run_preservation, strang_step, Backend, BackendChoice, Density, PreservationRun, PreserveConfig,
    WaveField,
};
use gpvortex::grid::{Grid2D, Layout};
use gpvortex::pade::PadeProfile;
use gpvortex::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpvStatus {
    Ok = 0,
    /// A parameter is out of range or a text argument is malformed.
    InvalidArgument = 1,
    /// A required pointer was null.
    NullPointer = 2,
    /// The computation failed (no convergence, blow-up, ...).
    Numerical = 3,
    /// An internal panic was caught.
    Internal = 4,
    /// The output buffer is too small; the required size was reported.
    BufferTooSmall = 5,
}

/// Padé density `ρ_q`.
pub struct GpvPade(PadeProfile);

/// Boundary-value density profile.
pub struct GpvProfile(gpvortex::bvp::RadialProfile);

/// Completed steady-vortex run.
pub struct GpvRun(PreservationRun);

/// Incremental Strang stepper seeded with the steady vortex.
pub struct GpvStepper {
    config: PreserveConfig,
    backend: Backend,
    field: WaveField,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> GpvStatus {
    if e.is_invalid_input() {
        GpvStatus::InvalidArgument
    } else {
        GpvStatus::Numerical
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (GpvStatus, String)>) -> GpvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GpvStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GpvStatus::Internal
        }
    }
}

fn lib<T>(r: gpvortex::Result<T>) -> Result<T, (GpvStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (GpvStatus, String) {
    (GpvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (GpvStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (GpvStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Copies `src` into `(dst, cap)` and reports the length through `len`.
unsafe fn copy_slice(src: &[f64], dst: *mut f64, cap: usize, len: *mut usize) -> Result<(), (GpvStatus, String)> {
    if !len.is_null() {
        len.write(src.len());
    }
    if cap < src.len() {
        return Err((GpvStatus::BufferTooSmall, format!("need room for {} values, got {cap}", src.len())));
    }
    if dst.is_null() {
        return Err(null("buffer"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Copies the last error message of this thread as a NUL-terminated string,
/// truncating to `cap` bytes. Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gpv_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gpv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds `ρ_q` for q ∈ {2, 3, 4}.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn gpv_pade_new(q: usize, out: *mut *mut GpvPade) -> GpvStatus {
    guard(|| {
        let p = lib(gpvortex::pade::build_pade(q))?;
        write_out(out, Box::into_raw(Box::new(GpvPade(p))))
    })
}

/// # Safety
/// `p` must be null or a handle from [`gpv_pade_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gpv_pade_free(p: *mut GpvPade) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `ρ_q(r)` and `ρ_q'(r)`; either output may be null.
///
/// # Safety
/// `p` must be a live handle; outputs must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn gpv_pade_eval(p: *const GpvPade, r: f64, rho: *mut f64, rho_prime: *mut f64) -> GpvStatus {
    guard(|| {
        let p = &as_ref(p, "profile handle")?.0;
        if !r.is_finite() || r < 0.0 {
            return Err((GpvStatus::InvalidArgument, format!("radius must be finite and >= 0, got {r}")));
        }
        if !rho.is_null() {
            rho.write(p.rho(r));
        }
        if !rho_prime.is_null() {
            rho_prime.write(p.rho_prime(r));
        }
        Ok(())
    })
}

/// Numerator coefficients `a_1..a_q` followed by denominator coefficients
/// `b_1..b_{q-1}`: `2q - 1` values in total.
///
/// # Safety
/// `buf` must point to `cap` writable doubles; `len` may be null.
#[no_mangle]
pub unsafe extern "C" fn gpv_pade_coefficients(
    p: *const GpvPade,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> GpvStatus {
    guard(|| {
        let p = &as_ref(p, "profile handle")?.0;
        let all: Vec<f64> = p.a().iter().chain(p.b()).copied().collect();
        copy_slice(&all, buf, cap, len)
    })
}

/// Solves the profile boundary-value problem on `n` subdivisions.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn gpv_profile_new(n: usize, out: *mut *mut GpvProfile) -> GpvStatus {
    guard(|| {
        let p = lib(gpvortex::bvp::solve_profile(n))?;
        write_out(out, Box::into_raw(Box::new(GpvProfile(p))))
    })
}

/// # Safety
/// `p` must be null or a handle from [`gpv_profile_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gpv_profile_free(p: *mut GpvProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Interpolated numerical density at `r`.
///
/// # Safety
/// `p` must be a live handle and `rho` writable.
#[no_mangle]
pub unsafe extern "C" fn gpv_profile_rho(p: *const GpvProfile, r: f64, rho: *mut f64) -> GpvStatus {
    guard(|| {
        let p = &as_ref(p, "profile handle")?.0;
        if r.is_nan() {
            return Err((GpvStatus::InvalidArgument, "radius is NaN".into()));
        }
        write_out(rho, p.rho(r))
    })
}

unsafe fn config_from(text: *const c_char) -> Result<PreserveConfig, (GpvStatus, String)> {
    if text.is_null() {
        return Err(null("configuration text"));
    }
    let s = CStr::from_ptr(text)
        .to_str()
        .map_err(|_| (GpvStatus::InvalidArgument, "configuration is not UTF-8".to_string()))?;
    lib(parse_config(s))
}

/// Parses a `key = value` configuration and runs it to completion.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn gpv_run_new(config: *const c_char, out: *mut *mut GpvRun) -> GpvStatus {
    guard(|| {
        let cfg = config_from(config)?;
        let run = lib(run_preservation(&cfg))?;
        write_out(out, Box::into_raw(Box::new(GpvRun(run))))
    })
}

/// # Safety
/// `r` must be null or a handle from [`gpv_run_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gpv_run_free(r: *mut GpvRun) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of records, disks and evaluation sets of a run.
///
/// # Safety
/// `r` must be a live handle; outputs must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn gpv_run_shape(
    r: *const GpvRun,
    records: *mut usize,
    disks: *mut usize,
    evals: *mut usize,
) -> GpvStatus {
    guard(|| {
        let run = &as_ref(r, "run handle")?.0;
        for (p, v) in [(records, run.times.len()), (disks, run.config.disks.len()), (evals, run.errors.len())] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Recorded times.
///
/// # Safety
/// `buf` must point to `cap` writable doubles; `len` may be null.
#[no_mangle]
pub unsafe extern "C" fn gpv_run_times(r: *const GpvRun, buf: *mut f64, cap: usize, len: *mut usize) -> GpvStatus {
    guard(|| copy_slice(&as_ref(r, "run handle")?.0.times, buf, cap, len))
}

/// Relative-error series of evaluation set `eval` on disk `disk`.
///
/// # Safety
/// `buf` must point to `cap` writable doubles; `len` may be null.
#[no_mangle]
pub unsafe extern "C" fn gpv_run_errors(
    r: *const GpvRun,
    eval: usize,
    disk: usize,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> GpvStatus {
    guard(|| {
        let run = &as_ref(r, "run handle")?.0;
        if eval >= run.errors.len() || disk >= run.config.disks.len() {
            return Err((GpvStatus::InvalidArgument, format!("no series for eval {eval}, disk {disk}")));
        }
        copy_slice(&run.series(eval, disk), buf, cap, len)
    })
}

/// Discrete mass series.
///
/// # Safety
/// `buf` must point to `cap` writable doubles; `len` may be null.
#[no_mangle]
pub unsafe extern "C" fn gpv_run_mass(r: *const GpvRun, buf: *mut f64, cap: usize, len: *mut usize) -> GpvStatus {
    guard(|| copy_slice(&as_ref(r, "run handle")?.0.mass, buf, cap, len))
}

/// `max_n |m_n - m_0| / m_0`.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gpv_run_mass_drift(r: *const GpvRun, out: *mut f64) -> GpvStatus {
    guard(|| write_out(out, as_ref(r, "run handle")?.0.mass_drift()))
}

/// Creates a stepper from a configuration; `tau` from the configuration is
/// the default step and the evaluation settings are ignored.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn gpv_stepper_new(config: *const c_char, out: *mut *mut GpvStepper) -> GpvStatus {
    guard(|| {
        let cfg = config_from(config)?;
        let backend = match cfg.backend {
            BackendChoice::Spectral => lib(Backend::spectral(cfg.l, cfg.m))?,
            BackendChoice::Fd => {
                let g = lib(cfg.fd_grid_1d())?;
                lib(Backend::fd(&Grid2D::square(g, Layout::Physical), cfg.lanczos))?
            }
        };
        let density: Density = lib(cfg.profile.build())?;
        let field = lib(backend.grid().and_then(|g| build_vortex(&g, &density)))?;
        write_out(out, Box::into_raw(Box::new(GpvStepper { config: cfg, backend, field })))
    })
}

/// # Safety
/// `s` must be null or a handle from [`gpv_stepper_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gpv_stepper_free(s: *mut GpvStepper) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Advances by `steps` Strang steps of size `tau` (`tau = 0` uses the
/// configured step; negative `tau` steps backwards).
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gpv_stepper_advance(s: *mut GpvStepper, steps: usize, tau: f64) -> GpvStatus {
    guard(|| {
        let st = s.as_mut().ok_or_else(|| null("stepper handle"))?;
        if !tau.is_finite() {
            return Err((GpvStatus::InvalidArgument, "tau must be finite".into()));
        }
        let dt = if tau == 0.0 { st.config.tau } else { tau };
        for _ in 0..steps {
            lib(strang_step(&mut st.field, dt, &st.backend))?;
        }
        Ok(())
    })
}

/// Current time and discrete mass.
///
/// # Safety
/// `s` must be a live handle; outputs must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn gpv_stepper_state(s: *const GpvStepper, time: *mut f64, mass: *mut f64) -> GpvStatus {
    guard(|| {
        let st = as_ref(s, "stepper handle")?;
        if !time.is_null() {
            time.write(st.field.time);
        }
        if !mass.is_null() {
            mass.write(st.backend.mass(&st.field.values));
        }
        Ok(())
    })
}

/// Field samples as interleaved `(re, im)` pairs, `x` fastest; `nx`, `ny`
/// receive the grid shape (spectral fields include the mirrored copies).
///
/// # Safety
/// `buf` must point to `cap` writable doubles; other outputs may be null.
#[no_mangle]
pub unsafe extern "C" fn gpv_stepper_values(
    s: *const GpvStepper,
    buf: *mut f64,
    cap: usize,
    nx: *mut usize,
    ny: *mut usize,
) -> GpvStatus {
    guard(|| {
        let st = as_ref(s, "stepper handle")?;
        if !nx.is_null() {
            nx.write(st.field.grid.nx());
        }
        if !ny.is_null() {
            ny.write(st.field.grid.ny());
        }
        let flat: Vec<f64> = st.field.values.iter().flat_map(|v| [v.re, v.im]).collect();
        copy_slice(&flat, buf, cap, ptr::null_mut())
    })
}
