//! C ABI over the lerayflux simulator and diagnostics.
//!
//! Objects cross the boundary as opaque handles created by `lf_*_new` style
//! functions and released with the matching `lf_*_free`. Every fallible call
//! returns an [`LfStatus`]; the message of the most recent failure on the
//! calling thread is available from [`lf_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use lerayflux::besov::{besov_norm, DyadicPartition};
use lerayflux::diagnostics::{defect_pair, flux_spectrum, shock_dissipation, total_energy, DefectForm, DefectInputs};
use lerayflux::model::{initial_condition, sawtooth, InitialKind, InitialSpec, Model, ModelParams, ModelState, Variant};
use lerayflux::spectral::{Grid, Mollifier, Snapshot};
use lerayflux::Error;

/// Result codes. Values 2 to 6 match the exit codes of the `lerayflux` binary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Cfl = 3,
    Io = 4,
    Shape = 5,
    Resolution = 6,
    Panic = 7,
}

/// Model constants, mirroring the TOML `[model]` section.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfParams {
    pub alpha: f64,
    pub nu: f64,
    pub diff_d: f64,
    pub k_rate: f64,
    pub activation: f64,
    pub theta_i: f64,
    pub theta_bar: f64,
    /// Nonzero adds viscosity and species diffusion.
    pub viscous: c_int,
}

/// Initial-condition shape parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfInitialSpec {
    pub amplitude: f64,
    pub seed: u64,
    pub slope: f64,
    pub kmax: f64,
    pub z_amplitude: f64,
    pub z_mean: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfInitialKind {
    TaylorGreen = 0,
    SingleMode = 1,
    RandomDivFree = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfField {
    U = 0,
    V = 1,
    Z = 2,
}

/// Opaque model handle.
pub struct LfModel {
    inner: Model,
}

/// Opaque state handle.
pub struct LfState {
    inner: ModelState,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn status_of(e: &Error) -> LfStatus {
    match e {
        Error::InvalidParameter { .. } => LfStatus::InvalidParameter,
        Error::Cfl { .. } => LfStatus::Cfl,
        Error::Io(_) | Error::Format(_) => LfStatus::Io,
        Error::Resolution(_) => LfStatus::Resolution,
        _ => LfStatus::Shape,
    }
}

struct Fail(LfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Fail {
    Fail(LfStatus::NullPointer, format!("`{name}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LfStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LfStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn path_of(p: *const c_char) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(LfStatus::InvalidParameter, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len − 1` bytes). Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lf_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Default constants: inviscid, reaction off.
#[no_mangle]
pub extern "C" fn lf_params_default() -> LfParams {
    let p = ModelParams::default();
    LfParams {
        alpha: p.alpha,
        nu: p.nu,
        diff_d: p.diff_d,
        k_rate: p.k_rate,
        activation: p.activation,
        theta_i: p.theta_i,
        theta_bar: p.theta_bar,
        viscous: 0,
    }
}

#[no_mangle]
pub extern "C" fn lf_initial_spec_default() -> LfInitialSpec {
    let s = InitialSpec::default();
    LfInitialSpec {
        amplitude: s.amplitude,
        seed: s.seed,
        slope: s.slope,
        kmax: s.kmax,
        z_amplitude: s.z_amplitude,
        z_mean: s.z_mean,
    }
}

/// # Safety
/// `params` must be null or valid; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn lf_model_new(params: *const LfParams, out: *mut *mut LfModel) -> LfStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let params = ModelParams {
            alpha: p.alpha,
            nu: p.nu,
            diff_d: p.diff_d,
            k_rate: p.k_rate,
            activation: p.activation,
            theta_i: p.theta_i,
            theta_bar: p.theta_bar,
        };
        let variant = if p.viscous != 0 { Variant::Viscous } else { Variant::Inviscid };
        let model = Model::new(params, variant)?;
        write(out, Box::into_raw(Box::new(LfModel { inner: model })), "out")
    })
}

/// # Safety
/// `model` must be null or a handle from [`lf_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_model_free(model: *mut LfModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Initial state on a `dim`-dimensional `n`-point grid.
///
/// # Safety
/// `spec` must be null or valid; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn lf_state_initial(
    kind: LfInitialKind,
    dim: usize,
    n: usize,
    alpha: f64,
    spec: *const LfInitialSpec,
    out: *mut *mut LfState,
) -> LfStatus {
    guard(|| {
        let s = deref(spec, "spec")?;
        let spec = InitialSpec {
            amplitude: s.amplitude,
            seed: s.seed,
            slope: s.slope,
            kmax: s.kmax,
            z_amplitude: s.z_amplitude,
            z_mean: s.z_mean,
        };
        let kind = match kind {
            LfInitialKind::TaylorGreen => InitialKind::TaylorGreen,
            LfInitialKind::SingleMode => InitialKind::SingleMode,
            LfInitialKind::RandomDivFree => InitialKind::RandomDivFree,
        };
        let state = initial_condition(kind, Grid::new(dim, n)?, alpha, &spec)?;
        write(out, Box::into_raw(Box::new(LfState { inner: state })), "out")
    })
}

/// Load a snapshot file written by the simulator.
///
/// # Safety
/// `path` must be null or a NUL-terminated string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn lf_state_load(path: *const c_char, out: *mut *mut LfState) -> LfStatus {
    guard(|| {
        let snap = Snapshot::load(&path_of(path)?)?;
        let state = ModelState::from_snapshot(&snap)?;
        write(out, Box::into_raw(Box::new(LfState { inner: state })), "out")
    })
}

/// # Safety
/// `state` must be null or a live handle; `path` must be null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lf_state_save(state: *const LfState, path: *const c_char) -> LfStatus {
    guard(|| {
        let s = deref(state, "state")?;
        s.inner.to_snapshot().save(&path_of(path)?)?;
        Ok(())
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_state_free(state: *mut LfState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Advance `state` in place by `steps` RK4 steps of size `dt`.
///
/// # Safety
/// `model` and `state` must be null or live handles.
#[no_mangle]
pub unsafe extern "C" fn lf_state_step(model: *const LfModel, state: *mut LfState, dt: f64, steps: usize) -> LfStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let s = state.as_mut().ok_or_else(|| null("state"))?;
        let t0 = s.inner.t;
        let mut next = s.inner.clone();
        for i in 1..=steps {
            next = m.inner.step_rk4(&next, dt)?;
            next.t = t0 + i as f64 * dt;
        }
        s.inner = next;
        Ok(())
    })
}

/// Time, grid size and energies `‖u‖²`, `‖Z‖²` of a state. Null outputs are skipped.
///
/// # Safety
/// `state` must be null or a live handle; outputs must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn lf_state_info(
    state: *const LfState,
    t: *mut f64,
    dim: *mut usize,
    n: *mut usize,
    e_u: *mut f64,
    e_z: *mut f64,
) -> LfStatus {
    guard(|| {
        let s = &deref(state, "state")?.inner;
        let e = total_energy(s);
        for (p, v) in [(t, s.t), (e_u, e.e_u), (e_z, e.e_z)] {
            if !p.is_null() {
                p.write(v);
            }
        }
        for (p, v) in [(dim, s.grid().dim()), (n, s.grid().n())] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// `Π_κ` of the velocity `u` for each of `len` increasing cutoffs.
///
/// # Safety
/// `kappas` must hold `len` values and `pi` must have room for `len`.
#[no_mangle]
pub unsafe extern "C" fn lf_flux(state: *const LfState, kappas: *const f64, len: usize, pi: *mut f64) -> LfStatus {
    guard(|| {
        let s = &deref(state, "state")?.inner;
        let kappas = slice(kappas, len, "kappas")?;
        if pi.is_null() {
            return Err(null("pi"));
        }
        let report = flux_spectrum(s.u(), kappas, None, false)?;
        ptr::copy_nonoverlapping(report.pi.as_ptr(), pi, len);
        Ok(())
    })
}

/// `∫|D_{1,ε}|` and `∫|D_{2,ε}|`. `algebraic` selects the commutator form
/// instead of the increment quadrature with `points` nodes per axis.
///
/// # Safety
/// `state` must be a live handle; `d1` and `d2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_defect(
    state: *const LfState,
    eps: f64,
    algebraic: c_int,
    points: usize,
    d1: *mut f64,
    d2: *mut f64,
) -> LfStatus {
    guard(|| {
        let s = &deref(state, "state")?.inner;
        let moll = Mollifier::new(eps, s.grid().dim())?;
        let form = if algebraic != 0 { DefectForm::Algebraic } else { DefectForm::Increment };
        let inputs = DefectInputs {
            v: s.v(),
            u: s.u(),
            z: s.z(),
        };
        let (a, b) = defect_pair(inputs, &moll, form, points)?;
        write(d1, a.primary().abs, "d1")?;
        write(d2, b.primary().abs, "d2")
    })
}

/// Inhomogeneous Besov norm of one field; pass `INFINITY` for `p` or `q = ∞`.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_besov_norm(
    state: *const LfState,
    field: LfField,
    s: f64,
    p: f64,
    q: f64,
    out: *mut f64,
) -> LfStatus {
    guard(|| {
        let st = &deref(state, "state")?.inner;
        let f = match field {
            LfField::U => st.u(),
            LfField::V => st.v(),
            LfField::Z => st.z(),
        };
        let report = besov_norm(f, s, p, q, &DyadicPartition::new(*st.grid()))?;
        write(out, report.norm, "out")
    })
}

/// Extrapolated shock dissipation `|∫D|` of the jump-`sigma` sawtooth on `n`
/// points over a decreasing geometric ladder of `len ≥ 3` scales.
///
/// # Safety
/// `eps` must hold `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_burgers_dissipation(
    n: usize,
    sigma: f64,
    eps: *const f64,
    len: usize,
    out: *mut f64,
) -> LfStatus {
    guard(|| {
        let eps = slice(eps, len, "eps")?;
        let u = sawtooth(Grid::new(1, n)?, sigma);
        let report = shock_dissipation(&u, eps)?;
        write(out, report.dissipation(), "out")
    })
}
