// Copyright 2026 The SQEM Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

use std::ffi::{CStr, CString};
use std::ptr;

use sqem_ffi::*;

const BELL: &str = "qubits 2\nH q0\nCX q0,q1\nmeasure all\n";

fn last_error() -> String {
    let p = sqem_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn circuit(text: &str) -> *mut SqemCircuit {
    let text = CString::new(text).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { sqem_circuit_parse(text.as_ptr(), &mut c) }, SqemStatus::Ok);
    c
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(sqem_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn parse_errors_report_status_and_message() {
    let text = CString::new("qubits 1\nFOO q0\n").unwrap();
    let mut c = ptr::null_mut();
    let status = unsafe { sqem_circuit_parse(text.as_ptr(), &mut c) };
    assert_eq!(status, SqemStatus::Parse);
    assert!(c.is_null());
    assert!(last_error().contains("line 2"));

    let status = unsafe { sqem_circuit_parse(ptr::null(), &mut c) };
    assert_eq!(status, SqemStatus::NullPointer);

    let bad = [0xffu8, 0];
    let status = unsafe { sqem_circuit_parse(bad.as_ptr().cast(), &mut c) };
    assert_eq!(status, SqemStatus::InvalidUtf8);

    let mut n = ptr::null_mut();
    assert_eq!(
        unsafe { sqem_noise_depolarizing(2.0, 0.0, &mut n) },
        SqemStatus::Validation
    );
}

#[test]
fn exact_simulation_and_json_round_trip() {
    let c = circuit(BELL);
    unsafe {
        assert_eq!(sqem_circuit_num_qubits(c), 2);
        let mut d = ptr::null_mut();
        assert_eq!(sqem_simulate(c, ptr::null(), 0, 0, &mut d), SqemStatus::Ok);
        assert!(sqem_last_error().is_null());
        let mut p = 0.0;
        assert_eq!(sqem_distribution_get(d, 0b11, &mut p), SqemStatus::Ok);
        assert!((p - 0.5).abs() < 1e-12);
        let mut m = [0.0; 2];
        assert_eq!(sqem_distribution_marginal(d, 1, m.as_mut_ptr()), SqemStatus::Ok);
        assert!((m[0] - 0.5).abs() < 1e-12 && (m[1] - 0.5).abs() < 1e-12);

        let mut json = ptr::null_mut();
        assert_eq!(sqem_distribution_to_json(d, &mut json), SqemStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(sqem_distribution_from_json(json, &mut back), SqemStatus::Ok);
        assert_eq!(sqem_distribution_num_bits(back), 2);
        let mut h = 1.0;
        assert_eq!(sqem_hellinger(d, back, &mut h), SqemStatus::Ok);
        assert!(h < 1e-12);

        sqem_string_free(json);
        sqem_distribution_free(back);
        sqem_distribution_free(d);
        sqem_circuit_free(c);
    }
}

#[test]
fn sampling_is_seeded() {
    let c = circuit(BELL);
    unsafe {
        let mut n = ptr::null_mut();
        assert_eq!(sqem_noise_depolarizing(0.01, 0.02, &mut n), SqemStatus::Ok);
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(sqem_simulate(c, n, 1000, 7, &mut a), SqemStatus::Ok);
        assert_eq!(sqem_simulate(c, n, 1000, 7, &mut b), SqemStatus::Ok);
        let mut h = 1.0;
        assert_eq!(sqem_hellinger(a, b, &mut h), SqemStatus::Ok);
        assert_eq!(h, 0.0);
        sqem_distribution_free(a);
        sqem_distribution_free(b);
        sqem_noise_free(n);
        sqem_circuit_free(c);
    }
}

#[test]
fn job_and_recombination_remove_bit_flips_on_protected_qubit() {
    // Bit flips on q0 inside a body that commutes with Z_0 are caught by the plain check.
    let c = circuit("qubits 2\nprep q0 1\nprep q1 +\nCZ q0,q1\nRZ(0.3) q0\nCZ q0,q1\nmeasure all\n");
    let noise = CString::new(r#"{"per_qubit_pauli": {"0": [0.05, 0.0, 0.0]}}"#).unwrap();
    unsafe {
        let mut n = ptr::null_mut();
        assert_eq!(
            sqem_noise_from_json(noise.as_ptr(), &mut n),
            SqemStatus::Ok,
            "{}",
            last_error()
        );
        let mut um = ptr::null_mut();
        assert_eq!(sqem_simulate(c, n, 0, 0, &mut um), SqemStatus::Ok);
        let mut m = [0.0; 2];
        sqem_distribution_marginal(um, 0, m.as_mut_ptr());
        assert!(m[0] > 0.01);

        let mut mit = ptr::null_mut();
        let mut retained = 0.0;
        let status = sqem_run_job(c, n, 0, SqemFrame::Plain, 0, 1, &mut mit, &mut retained);
        assert_eq!(status, SqemStatus::Ok, "{}", last_error());
        assert!(retained > 0.0 && retained < 1.0);
        sqem_distribution_marginal(mit, 0, m.as_mut_ptr());
        assert!(m[0] < 1e-9, "residual error {}", m[0]);

        let qubits = [0usize];
        let list = [mit as *const SqemDistribution];
        let mut out = ptr::null_mut();
        let mut delta = 1.0;
        let status = sqem_recombine(
            um,
            qubits.as_ptr(),
            list.as_ptr(),
            1,
            1e-9,
            10_000,
            &mut out,
            &mut delta,
        );
        assert_eq!(status, SqemStatus::Ok, "{}", last_error());
        assert!(delta < 1e-6);

        let mut capped = ptr::null_mut();
        let status = sqem_recombine(
            um,
            qubits.as_ptr(),
            list.as_ptr(),
            1,
            1e-15,
            1,
            &mut capped,
            ptr::null_mut(),
        );
        assert_eq!(status, SqemStatus::NotConverged);
        assert!(!capped.is_null());

        for d in [um, mit, out, capped] {
            sqem_distribution_free(d);
        }
        sqem_noise_free(n);
        sqem_circuit_free(c);
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        sqem_circuit_free(ptr::null_mut());
        sqem_noise_free(ptr::null_mut());
        sqem_distribution_free(ptr::null_mut());
        sqem_string_free(ptr::null_mut());
        assert_eq!(sqem_circuit_num_qubits(ptr::null()), 0);
    }
}
