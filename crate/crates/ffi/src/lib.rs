//! C ABI for the cnotsim workbench: opaque state handles, error codes, and
//! JSON-returning entry points for the protocol and model reports. The
//! header is generated into `include/cnotsim.h` by the build script.
//!
//! Ownership rules: every `CnotsimState` returned through an out-pointer is
//! freed with [`cnotsim_state_free`]; every `char*` is freed with
//! [`cnotsim_string_free`]. Functions never take ownership of their
//! arguments unless documented.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use cnotsim_core::distsim::{self, TransportKind};
use cnotsim_core::dotsim;
use cnotsim_core::gatelib::{cnot, std_gate, StdGate};
use cnotsim_core::protocols::{self, RunMode};
use cnotsim_core::qstate::{c, QReg};
use cnotsim_core::ramsey;
use cnotsim_core::random;
use cnotsim_core::Error;
use num_complex::Complex64;

/// Opaque handle to a normalized multi-qubit state.
pub struct CnotsimState {
    inner: QReg,
}

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CnotsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotNormalized = 3,
    DimensionMismatch = 4,
    RuntimeError = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let sanitized = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error").expect("static string"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(sanitized));
}

fn status_for(err: &Error) -> CnotsimStatus {
    match err {
        Error::NotNormalized(_) => CnotsimStatus::NotNormalized,
        Error::TooManyQubits(_)
        | Error::BadAmplitudeCount { .. }
        | Error::QubitOutOfRange { .. }
        | Error::RepeatedTarget(_)
        | Error::DimensionMismatch(_) => CnotsimStatus::DimensionMismatch,
        Error::UnknownGate(_)
        | Error::UnknownModel(_)
        | Error::GridTooSmall(_)
        | Error::NonPositiveSeparation(_)
        | Error::StepTooLarge { .. }
        | Error::BadDrive(_)
        | Error::Params(_) => CnotsimStatus::InvalidArgument,
        _ => CnotsimStatus::RuntimeError,
    }
}

fn fail(err: &Error) -> CnotsimStatus {
    let status = status_for(err);
    set_error(err.to_string());
    status
}

fn fail_msg(status: CnotsimStatus, message: &str) -> CnotsimStatus {
    set_error(message.to_string());
    status
}

/// Last error message for this thread, or NULL when no error was recorded.
/// The caller frees the string with [`cnotsim_string_free`].
#[no_mangle]
pub extern "C" fn cnotsim_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Frees a string returned by this library. NULL is accepted.
///
/// # Safety
/// `s` must have been returned by a cnotsim function and not freed before.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Frees a state handle. NULL is accepted.
///
/// # Safety
/// `state` must have come from a cnotsim constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_state_free(state: *mut CnotsimState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

fn emit_state(reg: QReg, out: *mut *mut CnotsimState) -> CnotsimStatus {
    unsafe {
        *out = Box::into_raw(Box::new(CnotsimState { inner: reg }));
    }
    CnotsimStatus::Ok
}

/// Creates the computational basis state |basis_index⟩ on `n_qubits` qubits.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_state_basis(
    n_qubits: u32,
    basis_index: u32,
    out: *mut *mut CnotsimState,
) -> CnotsimStatus {
    if out.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "out pointer is NULL");
    }
    match QReg::basis(n_qubits as usize, basis_index as usize) {
        Ok(reg) => emit_state(reg, out),
        Err(e) => fail(&e),
    }
}

/// Creates a state from `2 * 2^n_qubits` doubles: interleaved re, im pairs
/// in basis order. The amplitudes must already be normalized.
///
/// # Safety
/// `re_im` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_state_from_amplitudes(
    n_qubits: u32,
    re_im: *const f64,
    len: usize,
    out: *mut *mut CnotsimState,
) -> CnotsimStatus {
    if re_im.is_null() || out.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    let dim = 1usize << n_qubits;
    if len != 2 * dim {
        return fail_msg(
            CnotsimStatus::DimensionMismatch,
            "len must be 2 * 2^n_qubits (re, im interleaved)",
        );
    }
    let values = std::slice::from_raw_parts(re_im, len);
    let amps: Vec<Complex64> = values.chunks_exact(2).map(|p| c(p[0], p[1])).collect();
    match QReg::new(n_qubits as usize, amps) {
        Ok(reg) => emit_state(reg, out),
        Err(e) => fail(&e),
    }
}

/// Number of qubits in the state.
///
/// # Safety
/// `state` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_state_qubits(
    state: *const CnotsimState,
    out: *mut u32,
) -> CnotsimStatus {
    if state.is_null() || out.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    *out = (*state).inner.n() as u32;
    CnotsimStatus::Ok
}

/// Copies the amplitudes out as interleaved re, im doubles; `len` must be
/// exactly `2 * 2^n`.
///
/// # Safety
/// `state` must be valid; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_state_amplitudes(
    state: *const CnotsimState,
    out: *mut f64,
    len: usize,
) -> CnotsimStatus {
    if state.is_null() || out.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    let amps = (*state).inner.amps();
    if len != 2 * amps.len() {
        return fail_msg(
            CnotsimStatus::DimensionMismatch,
            "len must be 2 * 2^n_qubits",
        );
    }
    let slice = std::slice::from_raw_parts_mut(out, len);
    for (i, a) in amps.iter().enumerate() {
        slice[2 * i] = a.re;
        slice[2 * i + 1] = a.im;
    }
    CnotsimStatus::Ok
}

/// Applies a named single-qubit gate ("X", "H" or "Z") in place.
///
/// # Safety
/// `state` must be a valid handle; `name` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_state_apply_gate(
    state: *mut CnotsimState,
    name: *const c_char,
    qubit: u32,
) -> CnotsimStatus {
    if state.is_null() || name.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    let Ok(name) = CStr::from_ptr(name).to_str() else {
        return fail_msg(CnotsimStatus::InvalidArgument, "gate name is not UTF-8");
    };
    let gate: StdGate = match name.parse() {
        Ok(g) => g,
        Err(e) => return fail(&e),
    };
    let handle = &mut *state;
    match handle.inner.apply(&std_gate(gate), &[qubit as usize]) {
        Ok(next) => {
            handle.inner = next;
            CnotsimStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Applies a controlled-NOT with the given control and target qubits.
///
/// # Safety
/// `state` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_state_apply_cnot(
    state: *mut CnotsimState,
    control: u32,
    target: u32,
) -> CnotsimStatus {
    if state.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "state is NULL");
    }
    let gate = match cnot(0, 1) {
        Ok(g) => g,
        Err(e) => return fail(&e),
    };
    let handle = &mut *state;
    match handle
        .inner
        .apply(&gate, &[control as usize, target as usize])
    {
        Ok(next) => {
            handle.inner = next;
            CnotsimStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Measurement probabilities of one qubit without collapsing the state.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_state_measure_probabilities(
    state: *const CnotsimState,
    qubit: u32,
    out_p0: *mut f64,
    out_p1: *mut f64,
) -> CnotsimStatus {
    if state.is_null() || out_p0.is_null() || out_p1.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    match (*state).inner.measure(qubit as usize) {
        Ok((b0, b1)) => {
            *out_p0 = b0.probability;
            *out_p1 = b1.probability;
            CnotsimStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Samples one measurement outcome with a seeded generator and collapses the
/// state in place.
///
/// # Safety
/// `state` and `out_bit` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_state_sample_measure(
    state: *mut CnotsimState,
    qubit: u32,
    seed: u64,
    out_bit: *mut u8,
) -> CnotsimStatus {
    if state.is_null() || out_bit.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    let handle = &mut *state;
    let mut rng = random::rng_from_seed(seed);
    match handle.inner.sample(qubit as usize, &mut rng) {
        Ok(branch) => match branch.post_state {
            Some(post) => {
                *out_bit = branch.bit;
                handle.inner = post;
                CnotsimStatus::Ok
            }
            None => fail_msg(
                CnotsimStatus::RuntimeError,
                "sampled a zero-probability branch",
            ),
        },
        Err(e) => fail(&e),
    }
}

/// |⟨a|b⟩|².
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_fidelity(
    a: *const CnotsimState,
    b: *const CnotsimState,
    out: *mut f64,
) -> CnotsimStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    match (*a).inner.fidelity(&(*b).inner) {
        Ok(f) => {
            *out = f;
            CnotsimStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

unsafe fn read_qubit_state(ptr: *const f64) -> [Complex64; 2] {
    let v = std::slice::from_raw_parts(ptr, 4);
    [c(v[0], v[1]), c(v[2], v[3])]
}

fn emit_json<T: serde::Serialize>(value: &T, out: *mut *mut c_char) -> CnotsimStatus {
    let text = match serde_json::to_string_pretty(value) {
        Ok(t) => t,
        Err(e) => return fail_msg(CnotsimStatus::RuntimeError, &e.to_string()),
    };
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            CnotsimStatus::Ok
        }
        Err(e) => fail_msg(CnotsimStatus::RuntimeError, &e.to_string()),
    }
}

/// Runs the distributed swap of `alpha` and `beta` (each four doubles:
/// re0, im0, re1, im1). `sample` false enumerates all 16 branches; true runs
/// one seeded trajectory. Returns the branch reports as a JSON array.
///
/// # Safety
/// `alpha` and `beta` must point to four readable doubles; `out_json` must
/// be valid.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_distributed_swap_json(
    alpha: *const f64,
    beta: *const f64,
    sample: bool,
    seed: u64,
    out_json: *mut *mut c_char,
) -> CnotsimStatus {
    if alpha.is_null() || beta.is_null() || out_json.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    let mode = if sample {
        RunMode::Sample(seed)
    } else {
        RunMode::Enumerate
    };
    match protocols::distributed_swap(&read_qubit_state(alpha), &read_qubit_state(beta), mode) {
        Ok(reports) => emit_json(&reports, out_json),
        Err(e) => fail(&e),
    }
}

/// Runs the networked protocol session over TCP loopback (port 0 picks an
/// ephemeral port) and returns `{branch, transcript}` as JSON.
///
/// # Safety
/// Pointer arguments as in [`cnotsim_distributed_swap_json`].
#[no_mangle]
pub unsafe extern "C" fn cnotsim_distributed_swap_tcp_json(
    alpha: *const f64,
    beta: *const f64,
    port: u16,
    seed: u64,
    out_json: *mut *mut c_char,
) -> CnotsimStatus {
    if alpha.is_null() || beta.is_null() || out_json.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    match distsim::run_distributed(
        &read_qubit_state(alpha),
        &read_qubit_state(beta),
        TransportKind::Tcp { port },
        seed,
    ) {
        Ok((branch, transcript)) => {
            #[derive(serde::Serialize)]
            struct Session {
                branch: protocols::BranchReport,
                transcript: distsim::Transcript,
            }
            emit_json(&Session { branch, transcript }, out_json)
        }
        Err(e) => fail(&e),
    }
}

/// Teleports `xi` (four doubles) and returns the branch reports as JSON.
///
/// # Safety
/// `xi` must point to four readable doubles; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_teleport_json(
    xi: *const f64,
    sample: bool,
    seed: u64,
    out_json: *mut *mut c_char,
) -> CnotsimStatus {
    if xi.is_null() || out_json.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    let mode = if sample {
        RunMode::Sample(seed)
    } else {
        RunMode::Enumerate
    };
    match protocols::teleport(&read_qubit_state(xi), mode) {
        Ok(reports) => emit_json(&reports, out_json),
        Err(e) => fail(&e),
    }
}

/// Searches per-branch Pauli corrections over `inputs` random input pairs
/// and returns the calibration table as JSON.
///
/// # Safety
/// `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_calibrate_corrections_json(
    inputs: u32,
    seed: u64,
    out_json: *mut *mut c_char,
) -> CnotsimStatus {
    if out_json.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "out_json is NULL");
    }
    match protocols::calibrate_corrections(inputs as usize, seed) {
        Ok(table) => emit_json(&table, out_json),
        Err(e) => fail(&e),
    }
}

/// Runs the Ramsey phase search. `model` is "literal" or "lightshift";
/// `theta` may be NULL for a full three-axis scan or point to a fixed
/// dispersive phase for a two-axis scan.
///
/// # Safety
/// `model` must be a valid NUL-terminated string; `theta` NULL or readable;
/// `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_ramsey_solve_json(
    model: *const c_char,
    grid: u32,
    refine: bool,
    theta: *const f64,
    out_json: *mut *mut c_char,
) -> CnotsimStatus {
    if model.is_null() || out_json.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    let Ok(model) = CStr::from_ptr(model).to_str() else {
        return fail_msg(CnotsimStatus::InvalidArgument, "model is not UTF-8");
    };
    let model: ramsey::DispersiveModel = match model.parse() {
        Ok(m) => m,
        Err(e) => return fail(&e),
    };
    let theta = if theta.is_null() { None } else { Some(*theta) };
    match ramsey::solve_phases(model, grid as usize, refine, theta) {
        Ok(report) => emit_json(&report, out_json),
        Err(e) => fail(&e),
    }
}

/// Dipole-dipole coupling −d1·d2/(4π·ε0·ħ·r³) in rad/s.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_dot_omega_bar(
    d1: f64,
    d2: f64,
    r: f64,
    out: *mut f64,
) -> CnotsimStatus {
    if out.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "out is NULL");
    }
    let params = dotsim::DotParams {
        omega1: 1.0,
        omega2: 1.0,
        d1,
        d2,
        r,
    };
    match params.omega_bar() {
        Ok(wb) => {
            *out = wb;
            CnotsimStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

unsafe fn parse_params_json(
    params_json: *const c_char,
) -> Result<dotsim::ParamsFile, CnotsimStatus> {
    let Ok(text) = CStr::from_ptr(params_json).to_str() else {
        return Err(fail_msg(
            CnotsimStatus::InvalidArgument,
            "params JSON is not UTF-8",
        ));
    };
    serde_json::from_str(text).map_err(|e| {
        fail_msg(
            CnotsimStatus::InvalidArgument,
            &format!("params JSON: {e}"),
        )
    })
}

/// Timescale feasibility report for a params document of the same shape as
/// the CLI parameter file; returns JSON.
///
/// # Safety
/// `params_json` must be a valid NUL-terminated string; `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_dot_feasibility_json(
    params_json: *const c_char,
    out_json: *mut *mut c_char,
) -> CnotsimStatus {
    if params_json.is_null() || out_json.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    let file = match parse_params_json(params_json) {
        Ok(f) => f,
        Err(status) => return status,
    };
    match dotsim::feasibility(&file.dot, &file.drive) {
        Ok(report) => emit_json(&report, out_json),
        Err(e) => fail(&e),
    }
}

/// Drives one pulse for a params document and returns the flip-probability
/// and gate-fidelity report as JSON.
///
/// # Safety
/// `params_json` must be a valid NUL-terminated string; `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn cnotsim_dot_pulse_json(
    params_json: *const c_char,
    out_json: *mut *mut c_char,
) -> CnotsimStatus {
    if params_json.is_null() || out_json.is_null() {
        return fail_msg(CnotsimStatus::NullPointer, "NULL pointer argument");
    }
    let file = match parse_params_json(params_json) {
        Ok(f) => f,
        Err(status) => return status,
    };
    match dotsim::cnot_fidelity(&file.dot, &file.drive) {
        Ok(report) => emit_json(&report, out_json),
        Err(e) => fail(&e),
    }
}
