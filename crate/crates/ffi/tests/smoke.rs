//! Exercises the C ABI from Rust: handle lifecycle, status codes, and the
//! JSON report surfaces.

use std::ffi::{CStr, CString};
use std::ptr;

use cnotsim_ffi::*;

fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let text = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    unsafe { cnotsim_string_free(ptr) };
    text
}

#[test]
fn bell_pair_through_the_abi() {
    unsafe {
        let mut state: *mut CnotsimState = ptr::null_mut();
        assert_eq!(cnotsim_state_basis(2, 0, &mut state), CnotsimStatus::Ok);

        let h = CString::new("H").unwrap();
        assert_eq!(
            cnotsim_state_apply_gate(state, h.as_ptr(), 0),
            CnotsimStatus::Ok
        );
        assert_eq!(cnotsim_state_apply_cnot(state, 0, 1), CnotsimStatus::Ok);

        let mut n = 0u32;
        assert_eq!(cnotsim_state_qubits(state, &mut n), CnotsimStatus::Ok);
        assert_eq!(n, 2);

        let (mut p0, mut p1) = (0.0f64, 0.0f64);
        assert_eq!(
            cnotsim_state_measure_probabilities(state, 0, &mut p0, &mut p1),
            CnotsimStatus::Ok
        );
        assert!((p0 - 0.5).abs() < 1e-12);
        assert!((p1 - 0.5).abs() < 1e-12);

        let mut amps = [0.0f64; 8];
        assert_eq!(
            cnotsim_state_amplitudes(state, amps.as_mut_ptr(), amps.len()),
            CnotsimStatus::Ok
        );
        assert!((amps[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((amps[6] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

        // Collapse and check the post-measurement correlation.
        let mut bit = 9u8;
        assert_eq!(
            cnotsim_state_sample_measure(state, 0, 12345, &mut bit),
            CnotsimStatus::Ok
        );
        assert!(bit == 0 || bit == 1);
        let mut q1p0 = 0.0f64;
        let mut q1p1 = 0.0f64;
        assert_eq!(
            cnotsim_state_measure_probabilities(state, 1, &mut q1p0, &mut q1p1),
            CnotsimStatus::Ok
        );
        if bit == 0 {
            assert!((q1p0 - 1.0).abs() < 1e-12);
        } else {
            assert!((q1p1 - 1.0).abs() < 1e-12);
        }

        cnotsim_state_free(state);
    }
}

#[test]
fn status_codes_and_error_messages() {
    unsafe {
        let mut state: *mut CnotsimState = ptr::null_mut();
        assert_eq!(
            cnotsim_state_basis(12, 0, &mut state),
            CnotsimStatus::DimensionMismatch
        );
        let msg = take_string(cnotsim_last_error_message());
        assert!(msg.contains("12"), "{msg}");

        assert_eq!(
            cnotsim_state_basis(1, 0, ptr::null_mut()),
            CnotsimStatus::NullPointer
        );

        // Non-normalized amplitudes are rejected.
        let bad = [1.0f64, 0.0, 0.7, 0.0];
        assert_eq!(
            cnotsim_state_from_amplitudes(1, bad.as_ptr(), bad.len(), &mut state),
            CnotsimStatus::NotNormalized
        );

        let mut wb = 0.0f64;
        assert_eq!(
            cnotsim_dot_omega_bar(1.0e-28, 1.0e-28, 0.0, &mut wb),
            CnotsimStatus::InvalidArgument
        );
    }
}

#[test]
fn json_reports_round_trip() {
    unsafe {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let alpha = [h, 0.0, h, 0.0];
        let beta = [1.0, 0.0, 0.0, 0.0];
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            cnotsim_distributed_swap_json(alpha.as_ptr(), beta.as_ptr(), false, 0, &mut json),
            CnotsimStatus::Ok
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        let branches = parsed.as_array().unwrap();
        assert_eq!(branches.len(), 16);
        for b in branches {
            assert!(b["f0"].as_f64().unwrap() > 1.0 - 1e-9);
            assert!(b["f5"].as_f64().unwrap() > 1.0 - 1e-9);
        }

        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            cnotsim_teleport_json(alpha.as_ptr(), false, 0, &mut json),
            CnotsimStatus::Ok
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 4);

        let model = CString::new("lightshift").unwrap();
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            cnotsim_ramsey_solve_json(model.as_ptr(), 16, false, ptr::null(), &mut json),
            CnotsimStatus::Ok
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert!(!parsed["hits"].as_array().unwrap().is_empty());

        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            cnotsim_distributed_swap_tcp_json(alpha.as_ptr(), beta.as_ptr(), 0, 7, &mut json),
            CnotsimStatus::Ok
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(parsed["branch"]["branch"].as_str().unwrap().len(), 4);
        assert!(parsed["transcript"].as_array().unwrap().len() > 10);
    }
}

#[test]
fn dot_reports_through_the_abi() {
    unsafe {
        let mut wb = 0.0f64;
        assert_eq!(
            cnotsim_dot_omega_bar(1.602e-28, 1.602e-28, 1.0e-8, &mut wb),
            CnotsimStatus::Ok
        );
        assert!(wb < 0.0);
        assert!(((-wb).recip() - 4.57e-13).abs() < 0.05e-13);

        let params = include_str!("../../core/params/dots_default.json");
        let params_c = CString::new(params).unwrap();
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            cnotsim_dot_feasibility_json(params_c.as_ptr(), &mut json),
            CnotsimStatus::Ok
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(parsed["pass"], serde_json::Value::Bool(true));

        let bad = CString::new(r#"{"dot": {"omega1": 1.0}}"#).unwrap();
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            cnotsim_dot_feasibility_json(bad.as_ptr(), &mut json),
            CnotsimStatus::InvalidArgument
        );
        let msg = take_string(cnotsim_last_error_message());
        assert!(msg.contains("omega2") || msg.contains("drive"), "{msg}");
    }
}
