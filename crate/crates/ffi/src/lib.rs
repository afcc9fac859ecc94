//! C interface to `wqsim`.
//!
//! Every function returns a [`WqsimStatus`]; on failure the message is kept
//! per thread and can be read with [`wqsim_last_error`]. Handles are opaque
//! and must be released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use num_complex::Complex64;
use wqsim::dde::Trajectory;
use wqsim::freq::{classify_steady_state, solve_cee, SteadyStateLabel};
use wqsim::model::{AtomParams, NetworkConfig};
use wqsim::scenarios::{self, Overrides};
use wqsim::spatial::SpatialModel;
use wqsim::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WqsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidGeometry = 2,
    InvalidCoupling = 3,
    InvalidFrequency = 4,
    InvalidGrid = 5,
    InvalidArgument = 6,
    StepTooLarge = 7,
    NonFiniteState = 8,
    OutOfRange = 9,
    MissingOrigin = 10,
    UnknownPreset = 11,
    ParseError = 12,
    IoError = 13,
    Panic = 14,
}

impl From<&Error> for WqsimStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidGeometry(_) => Self::InvalidGeometry,
            Error::InvalidCoupling(_) => Self::InvalidCoupling,
            Error::InvalidFrequency(_) => Self::InvalidFrequency,
            Error::InvalidGrid(_) => Self::InvalidGrid,
            Error::InvalidArgument(_) => Self::InvalidArgument,
            Error::StepTooLarge { .. } => Self::StepTooLarge,
            Error::NonFiniteState { .. } => Self::NonFiniteState,
            Error::OutOfRange { .. } => Self::OutOfRange,
            Error::MissingOrigin => Self::MissingOrigin,
            Error::UnknownPreset(_) => Self::UnknownPreset,
            Error::Parse { .. } => Self::ParseError,
            Error::Io(_) => Self::IoError,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WqsimLabel {
    TwoPhoton = 0,
    OnePhotonTrapped = 1,
    DarkState = 2,
    Mixed = 3,
}

impl From<SteadyStateLabel> for WqsimLabel {
    fn from(l: SteadyStateLabel) -> Self {
        match l {
            SteadyStateLabel::TwoPhoton => Self::TwoPhoton,
            SteadyStateLabel::OnePhotonTrapped => Self::OnePhotonTrapped,
            SteadyStateLabel::DarkState => Self::DarkState,
            SteadyStateLabel::Mixed => Self::Mixed,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WqsimClass {
    pub label: WqsimLabel,
    /// Long-time `|c_ee|^2` in the Markov limit.
    pub predicted_cee_sq: f64,
    pub outside_markov_regime: bool,
}

/// One or two atoms and their shared resonance.
pub struct WqsimConfig {
    inner: NetworkConfig,
}

/// Atomic amplitudes on the integrator's time grid.
pub struct WqsimTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), WqsimStatus>) -> WqsimStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WqsimStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            WqsimStatus::Panic
        }
    }
}

fn fail(e: Error) -> WqsimStatus {
    let status = WqsimStatus::from(&e);
    set_error(e.to_string());
    status
}

fn null(what: &str) -> WqsimStatus {
    set_error(format!("{what} is null"));
    WqsimStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, WqsimStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        WqsimStatus::InvalidArgument
    })
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, WqsimStatus> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, WqsimStatus> {
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wqsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (truncated and
/// NUL-terminated) and returns its full length in bytes, or 0 if none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn wqsim_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                unsafe {
                    ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                    *buf.add(n) = 0;
                }
            }
            bytes.len()
        }
    })
}

/// Creates an empty network; add one or two atoms before use.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wqsim_config_new(omega_a: f64, out: *mut *mut WqsimConfig) -> WqsimStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        *out = Box::into_raw(Box::new(WqsimConfig {
            inner: NetworkConfig {
                atoms: Vec::new(),
                omega_a,
                label: "ffi".to_string(),
            },
        }));
        Ok(())
    })
}

/// Appends an atom, then validates the network so far.
///
/// # Safety
/// `config` must come from this library and not be freed.
#[no_mangle]
pub unsafe extern "C" fn wqsim_config_add_atom(
    config: *mut WqsimConfig,
    z: f64,
    gamma_l: f64,
    gamma_r: f64,
) -> WqsimStatus {
    guard(|| {
        let cfg = unsafe { out_arg(config, "config") }?;
        let mut next = cfg.inner.clone();
        next.atoms.push(AtomParams::new(z, gamma_l, gamma_r));
        next.validate().map_err(fail)?;
        cfg.inner = next;
        Ok(())
    })
}

/// Reads a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wqsim_config_from_file(path: *const c_char, out: *mut *mut WqsimConfig) -> WqsimStatus {
    guard(|| {
        let path = unsafe { str_arg(path, "path") }?;
        let out = unsafe { out_arg(out, "out") }?;
        let file = scenarios::read_config(Path::new(path)).map_err(fail)?;
        *out = Box::into_raw(Box::new(WqsimConfig { inner: file.config }));
        Ok(())
    })
}

/// Headline network of a named preset.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wqsim_config_from_preset(name: *const c_char, out: *mut *mut WqsimConfig) -> WqsimStatus {
    guard(|| {
        let name = unsafe { str_arg(name, "name") }?;
        let out = unsafe { out_arg(out, "out") }?;
        let p = scenarios::preset(name).map_err(fail)?;
        *out = Box::into_raw(Box::new(WqsimConfig {
            inner: p.config().clone(),
        }));
        Ok(())
    })
}

/// Number of atoms in the network.
///
/// # Safety
/// `config` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wqsim_config_atom_count(config: *const WqsimConfig, out: *mut usize) -> WqsimStatus {
    guard(|| {
        let cfg = unsafe { ref_arg(config, "config") }?;
        *unsafe { out_arg(out, "out") }? = cfg.inner.atoms.len();
        Ok(())
    })
}

/// # Safety
/// `config` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn wqsim_config_free(config: *mut WqsimConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Markov-limit steady-state classification.
///
/// # Safety
/// `config` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wqsim_classify(config: *const WqsimConfig, out: *mut WqsimClass) -> WqsimStatus {
    guard(|| {
        let cfg = unsafe { ref_arg(config, "config") }?;
        let out = unsafe { out_arg(out, "out") }?;
        cfg.inner.validate().map_err(fail)?;
        let class = classify_steady_state(&cfg.inner);
        *out = WqsimClass {
            label: class.label.into(),
            predicted_cee_sq: class.predicted_cee_sq,
            outside_markov_regime: class.outside_markov_regime,
        };
        Ok(())
    })
}

fn horizon(cfg: &NetworkConfig, t_end: f64, dt: f64) -> (f64, f64) {
    let t_end = if t_end > 0.0 { t_end } else { cfg.default_t_end() };
    let dt = if dt > 0.0 { dt } else { cfg.default_dt() };
    (t_end, dt)
}

/// `c_ee(t)` with both atoms excited at `t = 0` (one component). A
/// non-positive `t_end` or `dt` selects the default.
///
/// # Safety
/// `config` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wqsim_solve_cee(
    config: *const WqsimConfig,
    t_end: f64,
    dt: f64,
    out: *mut *mut WqsimTrajectory,
) -> WqsimStatus {
    guard(|| {
        let cfg = unsafe { ref_arg(config, "config") }?;
        let out = unsafe { out_arg(out, "out") }?;
        let (t_end, dt) = horizon(&cfg.inner, t_end, dt);
        let traj = solve_cee(&cfg.inner, t_end, dt).map_err(fail)?;
        *out = Box::into_raw(Box::new(WqsimTrajectory { inner: traj }));
        Ok(())
    })
}

/// Single-excitation amplitudes, one component per atom, with atom 1
/// excited at `t = 0`. Defaults as for [`wqsim_solve_cee`].
///
/// # Safety
/// `config` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wqsim_solve_single_excitation(
    config: *const WqsimConfig,
    t_end: f64,
    dt: f64,
    out: *mut *mut WqsimTrajectory,
) -> WqsimStatus {
    guard(|| {
        let cfg = unsafe { ref_arg(config, "config") }?;
        let out = unsafe { out_arg(out, "out") }?;
        let (t_end, dt) = horizon(&cfg.inner, t_end, dt);
        let model = SpatialModel::solve(&cfg.inner, t_end, dt).map_err(fail)?;
        *out = Box::into_raw(Box::new(WqsimTrajectory {
            inner: model.trajectory,
        }));
        Ok(())
    })
}

/// Number of time nodes and components.
///
/// # Safety
/// `traj` must come from this library; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn wqsim_trajectory_shape(
    traj: *const WqsimTrajectory,
    nodes: *mut usize,
    dim: *mut usize,
) -> WqsimStatus {
    guard(|| {
        let tr = unsafe { ref_arg(traj, "traj") }?;
        *unsafe { out_arg(nodes, "nodes") }? = tr.inner.len();
        *unsafe { out_arg(dim, "dim") }? = tr.inner.dim();
        Ok(())
    })
}

/// Time and value of one component at node `index`.
///
/// # Safety
/// `traj` must come from this library; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn wqsim_trajectory_node(
    traj: *const WqsimTrajectory,
    index: usize,
    component: usize,
    t: *mut f64,
    re: *mut f64,
    im: *mut f64,
) -> WqsimStatus {
    guard(|| {
        let tr = &unsafe { ref_arg(traj, "traj") }?.inner;
        if index >= tr.len() || component >= tr.dim() {
            set_error(format!(
                "node {index}, component {component} outside {} x {}",
                tr.len(),
                tr.dim()
            ));
            return Err(WqsimStatus::OutOfRange);
        }
        let v = tr.node(index)[component];
        *unsafe { out_arg(t, "t") }? = tr.time(index);
        unsafe { write_complex(v, re, im) }
    })
}

/// One component at an arbitrary time, by the solver's own interpolant.
///
/// # Safety
/// `traj` must come from this library; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn wqsim_trajectory_sample(
    traj: *const WqsimTrajectory,
    t: f64,
    component: usize,
    re: *mut f64,
    im: *mut f64,
) -> WqsimStatus {
    guard(|| {
        let tr = &unsafe { ref_arg(traj, "traj") }?.inner;
        if component >= tr.dim() {
            set_error(format!("component {component} outside 0..{}", tr.dim()));
            return Err(WqsimStatus::OutOfRange);
        }
        let v = tr.sample_component(t, component).map_err(fail)?;
        unsafe { write_complex(v, re, im) }
    })
}

unsafe fn write_complex(v: Complex64, re: *mut f64, im: *mut f64) -> Result<(), WqsimStatus> {
    *unsafe { out_arg(re, "re") }? = v.re;
    *unsafe { out_arg(im, "im") }? = v.im;
    Ok(())
}

/// # Safety
/// `traj` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn wqsim_trajectory_free(traj: *mut WqsimTrajectory) {
    if !traj.is_null() {
        drop(unsafe { Box::from_raw(traj) });
    }
}

/// Runs a preset and writes its data set into `out_dir`.
///
/// # Safety
/// Both arguments must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn wqsim_run_preset(name: *const c_char, out_dir: *const c_char) -> WqsimStatus {
    guard(|| {
        let name = unsafe { str_arg(name, "name") }?;
        let dir = unsafe { str_arg(out_dir, "out_dir") }?;
        scenarios::run_preset(name, Path::new(dir), false).map_err(fail)?;
        Ok(())
    })
}

/// Runs a scenario file and writes its data set into `out_dir`.
///
/// # Safety
/// Both arguments must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn wqsim_simulate(config_path: *const c_char, out_dir: *const c_char) -> WqsimStatus {
    guard(|| {
        let path = unsafe { str_arg(config_path, "config_path") }?;
        let dir = unsafe { str_arg(out_dir, "out_dir") }?;
        let file = scenarios::read_config(Path::new(path)).map_err(fail)?;
        scenarios::simulate(&file, &Overrides::default(), Path::new(dir), false).map_err(fail)?;
        Ok(())
    })
}
