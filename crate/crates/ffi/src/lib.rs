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

//! C ABI for the `sqem` library.
//!
//! Objects cross the boundary as opaque handles created by `sqem_*_new`/`parse`
//! style constructors and released with the matching `sqem_*_free`. Every entry
//! point returns an [`SqemStatus`]; on failure the message is available from
//! [`sqem_last_error`] on the same thread. Strings returned to the caller are
//! owned by the caller and released with [`sqem_string_free`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sqem::recombine::{self, RecombinationConfig};
use sqem::sim::{self, ExecutionMode};
use sqem::sqem::{CheckFrame, SqemJob, TerminalPlacement};
use sqem::{Circuit, Distribution, Error, NoiseModel};

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqemStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Execution = 5,
    NotConverged = 6,
    Panic = 7,
}

/// Check unitary selection for [`sqem_run_job`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqemFrame {
    Auto = 0,
    Plain = 1,
}

/// Parsed circuit.
pub struct SqemCircuit(Circuit);

/// Noise model.
pub struct SqemNoise(NoiseModel);

/// Probability or quasi-probability distribution over bit strings.
pub struct SqemDistribution(Distribution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> SqemStatus {
    match err {
        Error::Parse { .. } => SqemStatus::Parse,
        e if e.is_validation() => SqemStatus::Validation,
        _ => SqemStatus::Execution,
    }
}

struct Fail(SqemStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type Outcome = std::result::Result<SqemStatus, Fail>;

fn guard(f: impl FnOnce() -> Outcome) -> SqemStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SqemStatus::Panic
        }
    }
}

fn null(name: &str) -> Fail {
    Fail(SqemStatus::NullPointer, format!("{name} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> std::result::Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SqemStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> std::result::Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut T, value: T, name: &str) -> std::result::Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn mode(shots: u64) -> ExecutionMode {
    if shots == 0 {
        ExecutionMode::Exact
    } else {
        ExecutionMode::Sampled { shots }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sqem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn sqem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sqem_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a circuit from its text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sqem_circuit_parse(text: *const c_char, out: *mut *mut SqemCircuit) -> SqemStatus {
    guard(|| {
        let c = Circuit::parse(str_arg(text, "text")?)?;
        put(out, boxed(SqemCircuit(c)), "out")?;
        Ok(SqemStatus::Ok)
    })
}

/// Number of qubits of a circuit, or 0 for NULL.
///
/// # Safety
/// `circuit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sqem_circuit_num_qubits(circuit: *const SqemCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.0.num_qubits())
}

/// # Safety
/// `circuit` must be NULL or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sqem_circuit_free(circuit: *mut SqemCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Build a depolarizing noise model with one- and two-qubit error rates.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sqem_noise_depolarizing(p1: f64, p2: f64, out: *mut *mut SqemNoise) -> SqemStatus {
    guard(|| {
        let n = NoiseModel::depolarizing(p1, p2);
        n.validate()?;
        put(out, boxed(SqemNoise(n)), "out")?;
        Ok(SqemStatus::Ok)
    })
}

/// Parse a noise model from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sqem_noise_from_json(json: *const c_char, out: *mut *mut SqemNoise) -> SqemStatus {
    guard(|| {
        let n = NoiseModel::from_json(str_arg(json, "json")?)?;
        put(out, boxed(SqemNoise(n)), "out")?;
        Ok(SqemStatus::Ok)
    })
}

/// # Safety
/// `noise` must be NULL or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sqem_noise_free(noise: *mut SqemNoise) {
    if !noise.is_null() {
        drop(Box::from_raw(noise));
    }
}

/// Run a circuit and return its output distribution. `noise` may be NULL for a
/// noiseless run; `shots == 0` evaluates the exact distribution.
///
/// # Safety
/// Handles must be live (or NULL for `noise`) and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sqem_simulate(
    circuit: *const SqemCircuit,
    noise: *const SqemNoise,
    shots: u64,
    seed: u64,
    out: *mut *mut SqemDistribution,
) -> SqemStatus {
    guard(|| {
        let c = ref_arg(circuit, "circuit")?;
        let n = noise.as_ref().map(|n| &n.0);
        let report = sim::execute(&c.0, n, mode(shots), seed)?;
        put(out, boxed(SqemDistribution(report.distribution)), "out")?;
        Ok(SqemStatus::Ok)
    })
}

/// Parse a distribution from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sqem_distribution_from_json(
    json: *const c_char,
    out: *mut *mut SqemDistribution,
) -> SqemStatus {
    guard(|| {
        let d = Distribution::from_json(str_arg(json, "json")?)?;
        put(out, boxed(SqemDistribution(d)), "out")?;
        Ok(SqemStatus::Ok)
    })
}

/// Serialize a distribution to JSON; free the result with [`sqem_string_free`].
///
/// # Safety
/// `dist` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sqem_distribution_to_json(dist: *const SqemDistribution, out: *mut *mut c_char) -> SqemStatus {
    guard(|| {
        let json = ref_arg(dist, "dist")?.0.to_json()?;
        let s = CString::new(json).map_err(|e| Fail(SqemStatus::Execution, e.to_string()))?;
        put(out, s.into_raw(), "out")?;
        Ok(SqemStatus::Ok)
    })
}

/// Number of bits of a distribution, or 0 for NULL.
///
/// # Safety
/// `dist` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sqem_distribution_num_bits(dist: *const SqemDistribution) -> usize {
    dist.as_ref().map_or(0, |d| d.0.num_bits())
}

/// Probability of the outcome `key`, where bit `k` of `key` is qubit `k`.
///
/// # Safety
/// `dist` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sqem_distribution_get(dist: *const SqemDistribution, key: u64, out: *mut f64) -> SqemStatus {
    guard(|| {
        let d = ref_arg(dist, "dist")?;
        put(out, d.0.get(key), "out")?;
        Ok(SqemStatus::Ok)
    })
}

/// Marginal probabilities `[P(bit k = 0), P(bit k = 1)]` written to `out[0..2]`.
///
/// # Safety
/// `dist` must be a live handle and `out` must point to two writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sqem_distribution_marginal(
    dist: *const SqemDistribution,
    bit: usize,
    out: *mut f64,
) -> SqemStatus {
    guard(|| {
        let d = ref_arg(dist, "dist")?;
        let [p0, p1] = recombine::marginal_pair(&d.0, bit)?;
        put(out, p0, "out")?;
        out.add(1).write(p1);
        Ok(SqemStatus::Ok)
    })
}

/// # Safety
/// `dist` must be NULL or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sqem_distribution_free(dist: *mut SqemDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Hellinger distance between two probability distributions.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sqem_hellinger(
    p: *const SqemDistribution,
    q: *const SqemDistribution,
    out: *mut f64,
) -> SqemStatus {
    guard(|| {
        let h = recombine::hellinger(&ref_arg(p, "p")?.0, &ref_arg(q, "q")?.0)?;
        put(out, h, "out")?;
        Ok(SqemStatus::Ok)
    })
}

/// Run one mitigation job protecting `qubit` and return the post-selected
/// distribution. `shots == 0` runs every fragment exactly. `retained` may be NULL.
///
/// # Safety
/// Handles must be live, `out` writable and `retained` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sqem_run_job(
    circuit: *const SqemCircuit,
    noise: *const SqemNoise,
    qubit: usize,
    frame: SqemFrame,
    shots: u64,
    seed: u64,
    out: *mut *mut SqemDistribution,
    retained: *mut f64,
) -> SqemStatus {
    guard(|| {
        let job = SqemJob {
            circuit: ref_arg(circuit, "circuit")?.0.clone(),
            protected_qubit: qubit,
            noise: ref_arg(noise, "noise")?.0.clone(),
            mode: mode(shots),
            seed,
            frame: match frame {
                SqemFrame::Auto => CheckFrame::Auto,
                SqemFrame::Plain => CheckFrame::Plain,
            },
            placement: TerminalPlacement::Mitigation,
        };
        let result = sqem::sqem::run_job(&job)?;
        put(out, boxed(SqemDistribution(result.distribution)), "out")?;
        if !retained.is_null() {
            retained.write(result.retained_fraction);
        }
        Ok(SqemStatus::Ok)
    })
}

/// Merge an unmitigated distribution with `count` per-qubit mitigated ones,
/// where `mitigated[i]` protects bit `qubits[i]`. The result is written even when
/// the iteration cap is hit, in which case the status is `NOT_CONVERGED`.
/// `delta` may be NULL; otherwise it receives the largest remaining marginal
/// deviation.
///
/// # Safety
/// `qubits` and `mitigated` must point to `count` elements, every handle must be
/// live, `out` writable and `delta` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sqem_recombine(
    unmitigated: *const SqemDistribution,
    qubits: *const usize,
    mitigated: *const *const SqemDistribution,
    count: usize,
    threshold: f64,
    max_iterations: usize,
    out: *mut *mut SqemDistribution,
    delta: *mut f64,
) -> SqemStatus {
    guard(|| {
        let um = ref_arg(unmitigated, "unmitigated")?;
        if count > 0 && (qubits.is_null() || mitigated.is_null()) {
            return Err(null("qubits or mitigated"));
        }
        let mut targets = BTreeMap::new();
        for i in 0..count {
            let d = ref_arg(*mitigated.add(i), "mitigated entry")?;
            targets.insert(*qubits.add(i), d.0.clone());
        }
        let cfg = RecombinationConfig {
            threshold,
            max_iterations,
        };
        let result = recombine::recombine(&um.0, &targets, &cfg)?;
        if !delta.is_null() {
            delta.write(result.delta);
        }
        put(out, boxed(SqemDistribution(result.distribution)), "out")?;
        if result.converged {
            Ok(SqemStatus::Ok)
        } else {
            set_error(format!("not converged after {} iterations", result.iterations));
            Ok(SqemStatus::NotConverged)
        }
    })
}
