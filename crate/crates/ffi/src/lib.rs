// SPDX-License-Identifier: Apache-2.0

//! C ABI over the `czscatter` library.
//!
//! Handles are opaque heap objects created by `czs_*_new` style functions and
//! released with the matching `czs_*_free`. Every fallible call returns a
//! [`CzsStatus`]; on failure the message is kept per thread and can be read
//! with [`czs_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use czscatter::gate::{cz_regime, fidelity_closed_form, process_fidelity, CZ_DIAGONAL};
use czscatter::scattering::{reflection_gate, solve_stationary_state};
use czscatter::timing::working_condition;
use czscatter::{CouplingModel, Error, Geometry, ReflectionGate, ScatteringSolution, SpinConfig};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CzsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericalFailure = 3,
    /// The wave vector hits a resonance pole of the coupling.
    Pole = 4,
    Panic = 5,
}

/// Complex number as two doubles.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CzsComplex {
    pub re: f64,
    pub im: f64,
}

/// Coupling between the flying particle and a center.
pub struct CzsModel(CouplingModel);

/// Positions of the two centers and the mirror.
pub struct CzsGeometry(Geometry);

/// Stationary state of one spin configuration.
pub struct CzsSolution(ScatteringSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CzsStatus {
    match e {
        Error::Pole { .. } => CzsStatus::Pole,
        e if e.is_numerical() => CzsStatus::NumericalFailure,
        Error::NotUnitary { .. } => CzsStatus::NumericalFailure,
        _ => CzsStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), CzsStatus>) -> CzsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CzsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_last_error("internal panic".into());
            CzsStatus::Panic
        }
    }
}

fn check<T>(r: czscatter::Result<T>) -> Result<T, CzsStatus> {
    r.map_err(|e| {
        set_last_error(e.to_string());
        status_of(&e)
    })
}

fn null() -> CzsStatus {
    set_last_error("null pointer argument".into());
    CzsStatus::NullPointer
}

/// # Safety
/// `p` must be null or valid for reads of `T`.
unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, CzsStatus> {
    p.as_ref().ok_or_else(null)
}

/// # Safety
/// `out` must be null or valid for writes of `T`.
unsafe fn write<T>(out: *mut T, value: T) -> Result<(), CzsStatus> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn spin(alpha1: u8, alpha2: u8) -> Result<SpinConfig, CzsStatus> {
    check(SpinConfig::new(alpha1, alpha2))
}

fn complex(z: czscatter::Complex64) -> CzsComplex {
    CzsComplex { re: z.re, im: z.im }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn czs_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version contains nul"),
        };
    VERSION.as_ptr()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// nul-terminated) and returns the full message length without the nul.
/// Returns 0 when there is no error. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn czs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Massive particle with `mass` and delta barrier height `barrier`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_model_massive(
    mass: f64,
    barrier: f64,
    out: *mut *mut CzsModel,
) -> CzsStatus {
    guard(|| {
        let m = check(CouplingModel::massive(mass, barrier))?;
        write(out, Box::into_raw(Box::new(CzsModel(m))))
    })
}

/// Massive particle whose dimensionless coupling at `k0` equals `gamma`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_model_massive_from_gamma(
    gamma: f64,
    k0: f64,
    mass: f64,
    out: *mut *mut CzsModel,
) -> CzsStatus {
    guard(|| {
        let m = check(CouplingModel::massive_from_gamma(gamma, k0, mass))?;
        write(out, Box::into_raw(Box::new(CzsModel(m))))
    })
}

/// Photon in a waveguide coupled to three-level atoms.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_model_photonic(
    velocity: f64,
    omega0: f64,
    coupling: f64,
    out: *mut *mut CzsModel,
) -> CzsStatus {
    guard(|| {
        let m = check(CouplingModel::photonic(velocity, omega0, coupling))?;
        write(out, Box::into_raw(Box::new(CzsModel(m))))
    })
}

/// # Safety
/// `model` must be null or a handle from a `czs_model_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn czs_model_free(model: *mut CzsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Geometry with the second center at `x2` and the mirror at `x3`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_geometry_new(
    x2: f64,
    x3: f64,
    out: *mut *mut CzsGeometry,
) -> CzsStatus {
    guard(|| {
        let g = check(Geometry::new(x2, x3))?;
        write(out, Box::into_raw(Box::new(CzsGeometry(g))))
    })
}

/// Geometry of the CZ regime `(n, n_prime)` at wave vector `k0`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_geometry_cz_regime(
    n: u32,
    n_prime: u32,
    k0: f64,
    out: *mut *mut CzsGeometry,
) -> CzsStatus {
    guard(|| {
        let r = check(cz_regime(n, n_prime, k0))?;
        write(out, Box::into_raw(Box::new(CzsGeometry(r.geometry))))
    })
}

/// Writes `x2` and `x3` of a geometry.
///
/// # Safety
/// `geometry` must be a live handle; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_geometry_positions(
    geometry: *const CzsGeometry,
    x2: *mut f64,
    x3: *mut f64,
) -> CzsStatus {
    guard(|| {
        let g = &deref(geometry)?.0;
        write(x2, g.x2())?;
        write(x3, g.x3())
    })
}

/// # Safety
/// `geometry` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn czs_geometry_free(geometry: *mut CzsGeometry) {
    if !geometry.is_null() {
        drop(Box::from_raw(geometry));
    }
}

/// Stationary state for spins `(alpha1, alpha2)`, each 0 or 1, at wave vector `k`.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_solve(
    model: *const CzsModel,
    geometry: *const CzsGeometry,
    alpha1: u8,
    alpha2: u8,
    k: f64,
    out: *mut *mut CzsSolution,
) -> CzsStatus {
    guard(|| {
        let (m, g) = (&deref(model)?.0, &deref(geometry)?.0);
        let s = check(solve_stationary_state(spin(alpha1, alpha2)?, m, g, k))?;
        write(out, Box::into_raw(Box::new(CzsSolution(s))))
    })
}

/// Reflection amplitude of a solution.
///
/// # Safety
/// `solution` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_solution_reflection(
    solution: *const CzsSolution,
    out: *mut CzsComplex,
) -> CzsStatus {
    guard(|| write(out, complex(deref(solution)?.0.r)))
}

/// Largest boundary-condition violation of a solution, relative to its amplitudes.
///
/// # Safety
/// `solution` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_solution_residual(
    solution: *const CzsSolution,
    out: *mut f64,
) -> CzsStatus {
    guard(|| write(out, deref(solution)?.0.residual))
}

/// Wave function at position `x`.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_solution_wavefunction(
    solution: *const CzsSolution,
    geometry: *const CzsGeometry,
    x: f64,
    out: *mut CzsComplex,
) -> CzsStatus {
    guard(|| {
        let s = &deref(solution)?.0;
        let psi = check(czscatter::scattering::wavefunction_eval(
            s,
            &deref(geometry)?.0,
            x,
        ))?;
        write(out, complex(psi))
    })
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn czs_solution_free(solution: *mut CzsSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Writes the four reflection amplitudes in the order 00, 01, 10, 11.
///
/// # Safety
/// Handles must be live; `out` valid for 4 writes.
#[no_mangle]
pub unsafe extern "C" fn czs_reflection_gate(
    model: *const CzsModel,
    geometry: *const CzsGeometry,
    k: f64,
    out: *mut CzsComplex,
) -> CzsStatus {
    guard(|| {
        let gate = check(reflection_gate(&deref(model)?.0, &deref(geometry)?.0, k))?;
        if out.is_null() {
            return Err(null());
        }
        for (i, c) in SpinConfig::ALL.iter().enumerate() {
            out.add(i).write(complex(gate.entry(*c)));
        }
        Ok(())
    })
}

/// Process fidelity of the reflection gate at `k` against CZ.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_gate_fidelity(
    model: *const CzsModel,
    geometry: *const CzsGeometry,
    k: f64,
    out: *mut f64,
) -> CzsStatus {
    guard(|| {
        let gate = check(reflection_gate(&deref(model)?.0, &deref(geometry)?.0, k))?;
        let cz = ReflectionGate::new(CZ_DIAGONAL).matrix();
        write(out, check(process_fidelity(&gate.matrix(), &cz))?)
    })
}

/// Large-coupling fidelity against CZ at wave vector `k`.
///
/// # Safety
/// `geometry` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_fidelity_closed_form(
    geometry: *const CzsGeometry,
    k: f64,
    out: *mut f64,
) -> CzsStatus {
    guard(|| {
        if !(k.is_finite() && k >= 0.0) {
            set_last_error(format!("invalid k: must be finite and >= 0, got {k}"));
            return Err(CzsStatus::InvalidArgument);
        }
        write(out, fidelity_closed_form(k, &deref(geometry)?.0))
    })
}

/// Decoherence-time bound in seconds for group velocity `velocity` (m/s) and
/// vacuum wavelength `wavelength` (m).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn czs_working_condition(
    velocity: f64,
    wavelength: f64,
    out: *mut f64,
) -> CzsStatus {
    guard(|| write(out, check(working_condition(velocity, wavelength))?))
}
