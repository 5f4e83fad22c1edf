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

//! Exact density-matrix simulation with synthetic noise, plus shot sampling.
//!
//! Noiseless circuits take a pure-statevector path; anything with state noise runs
//! on a dense density matrix. Both are capped at [`SimConfig::dense_limit`] qubits.

mod kernel;
mod noise;

use std::collections::BTreeMap;
use std::ops::Range;

use rand_distr::{Binomial, Distribution as _};
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, C64};
use crate::distribution::{gather_bits, Distribution};
use crate::error::{Error, Result};
use crate::pauli::{PauliLetter, PauliString};
use crate::seed;

pub use kernel::{DenseUnitary, DensityMatrix, StateVector};
pub use noise::NoiseModel;

pub const DEFAULT_DENSE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub dense_limit: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dense_limit: DEFAULT_DENSE_LIMIT,
        }
    }
}

/// Where a noise model is allowed to act.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum NoiseScope {
    /// Gate noise after every gate, plus preparation and readout errors.
    #[default]
    Everywhere,
    /// Gate noise only after gates whose index is in the range; no SPAM.
    Gates(Range<usize>),
}

impl NoiseScope {
    fn covers_gate(&self, i: usize) -> bool {
        match self {
            NoiseScope::Everywhere => true,
            NoiseScope::Gates(r) => r.contains(&i),
        }
    }

    fn covers_spam(&self) -> bool {
        matches!(self, NoiseScope::Everywhere)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Exact,
    Sampled,
}

/// How a circuit is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ExecutionMode {
    Exact,
    Sampled { shots: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExecutionReport {
    pub distribution: Distribution,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub backend: BackendKind,
    pub noise: Option<NoiseModel>,
}

fn check_size(c: &Circuit, cfg: &SimConfig) -> Result<()> {
    if c.num_qubits() > cfg.dense_limit {
        return Err(Error::UnsupportedSize {
            qubits: c.num_qubits(),
            limit: cfg.dense_limit,
        });
    }
    Ok(())
}

fn apply_gate_noise(rho: &mut DensityMatrix, gate: &Gate, noise: &NoiseModel) {
    let qs = gate.qubits();
    if qs.len() == 1 && noise.one_qubit_depolarizing > 0.0 {
        rho.partial_replace(qs, 4.0 * noise.one_qubit_depolarizing / 3.0);
    }
    if qs.len() == 2 && noise.two_qubit_depolarizing > 0.0 {
        rho.partial_replace(qs, 16.0 * noise.two_qubit_depolarizing / 15.0);
    }
    for q in qs {
        if let Some(&[px, py, pz]) = noise.per_qubit_pauli.get(q) {
            rho.pauli_channel(*q, px, py, pz);
        }
    }
}

/// Final density matrix `Λ(U ρ0 U†)` with noise channels interleaved after each gate.
pub fn run_exact(c: &Circuit, noise: Option<&NoiseModel>) -> Result<DensityMatrix> {
    run_exact_scoped(c, noise, &NoiseScope::Everywhere, &SimConfig::default())
}

pub fn run_exact_scoped(
    c: &Circuit,
    noise: Option<&NoiseModel>,
    scope: &NoiseScope,
    cfg: &SimConfig,
) -> Result<DensityMatrix> {
    check_size(c, cfg)?;
    let mut rho = DensityMatrix::product(c.preparations());
    let Some(noise) = noise else {
        for g in c.gates() {
            rho.apply(g);
        }
        return Ok(rho);
    };
    noise.validate()?;
    if scope.covers_spam() && noise.spam_flip > 0.0 {
        for q in 0..c.num_qubits() {
            rho.pauli_channel(q, noise.spam_flip, 0.0, 0.0);
        }
    }
    for (i, g) in c.gates().iter().enumerate() {
        rho.apply(g);
        if scope.covers_gate(i) {
            apply_gate_noise(&mut rho, g, noise);
        }
    }
    Ok(rho)
}

/// Final pure state of a noiseless circuit.
pub fn run_statevector(c: &Circuit) -> Result<StateVector> {
    check_size(c, &SimConfig::default())?;
    let mut sv = StateVector::product(c.preparations());
    for g in c.gates() {
        sv.apply(g);
    }
    Ok(sv)
}

/// Exact outcome distribution over the measured qubits, readout flips included.
pub fn exact_distribution(c: &Circuit, noise: Option<&NoiseModel>) -> Result<Distribution> {
    exact_distribution_scoped(c, noise, &NoiseScope::Everywhere, &SimConfig::default())
}

pub fn exact_distribution_scoped(
    c: &Circuit,
    noise: Option<&NoiseModel>,
    scope: &NoiseScope,
    cfg: &SimConfig,
) -> Result<Distribution> {
    check_size(c, cfg)?;
    let state_noise = noise.filter(|n| n.has_state_noise());
    let diag = match state_noise {
        Some(_) => run_exact_scoped(c, state_noise, scope, cfg)?.diagonal(),
        None => {
            let mut sv = StateVector::product(c.preparations());
            for g in c.gates() {
                sv.apply(g);
            }
            sv.probabilities()
        }
    };
    let measured = c.measured_qubits();
    let mut marginal = vec![0.0; 1 << measured.len()];
    for (x, p) in diag.into_iter().enumerate() {
        marginal[gather_bits(x as u64, measured) as usize] += p;
    }
    if let (Some(n), true) = (noise, scope.covers_spam()) {
        for (pos, q) in measured.iter().enumerate() {
            let f = n.readout_flip.get(q).copied().unwrap_or(0.0);
            if f > 0.0 {
                let bit = 1usize << pos;
                for x in 0..marginal.len() {
                    if x & bit == 0 {
                        let (a, b) = (marginal[x], marginal[x | bit]);
                        marginal[x] = (1.0 - f) * a + f * b;
                        marginal[x | bit] = (1.0 - f) * b + f * a;
                    }
                }
            }
        }
    }
    let table: BTreeMap<u64, f64> = marginal
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 1e-15)
        .map(|(k, p)| (k as u64, p))
        .collect();
    Distribution::probability(measured.len(), table)
}

/// Draw `shots` outcomes from a probability distribution (sequential-binomial multinomial).
pub fn sample_from(d: &Distribution, shots: u64, rng: &mut seed::Rng) -> Result<Distribution> {
    if shots == 0 {
        return Err(Error::validation("shots must be at least 1"));
    }
    let d = d.normalize()?;
    let entries: Vec<(u64, f64)> = d.iter().collect();
    let mut remaining = shots;
    let mut mass = 1.0;
    let mut counts = BTreeMap::new();
    for (i, &(k, p)) in entries.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let n = if i + 1 == entries.len() {
            remaining
        } else {
            let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 1.0 };
            Binomial::new(remaining, q)
                .map_err(|e| Error::validation(format!("binomial draw: {e}")))?
                .sample(rng)
        };
        if n > 0 {
            counts.insert(k, n as f64 / shots as f64);
        }
        remaining -= n;
        mass -= p;
    }
    Ok(Distribution::probability(d.num_bits(), counts)?.with_shots(shots))
}

/// Sample a circuit; identical inputs and seed give identical output.
pub fn sample(c: &Circuit, noise: Option<&NoiseModel>, shots: u64, seed: u64) -> Result<ExecutionReport> {
    execute(c, noise, ExecutionMode::Sampled { shots }, seed)
}

pub fn execute(c: &Circuit, noise: Option<&NoiseModel>, mode: ExecutionMode, seed: u64) -> Result<ExecutionReport> {
    let exact = exact_distribution(c, noise)?;
    Ok(match mode {
        ExecutionMode::Exact => ExecutionReport {
            distribution: exact,
            shots: None,
            seed: None,
            backend: BackendKind::Exact,
            noise: noise.cloned(),
        },
        ExecutionMode::Sampled { shots } => {
            let mut rng = seed::rng_from_seed(seed);
            ExecutionReport {
                distribution: sample_from(&exact, shots, &mut rng)?,
                shots: Some(shots),
                seed: Some(seed),
                backend: BackendKind::Sampled,
                noise: noise.cloned(),
            }
        }
    })
}

/// `tr(P ρ)`.
pub fn expectation(rho: &DensityMatrix, p: &PauliString) -> Result<f64> {
    if p.len() != rho.num_qubits() {
        return Err(Error::validation(format!(
            "Pauli string has length {}, state has {} qubits",
            p.len(),
            rho.num_qubits()
        )));
    }
    let mut flip = 0usize;
    let mut z_mask = 0usize;
    let mut y_count = 0;
    for (q, l) in p.letters().iter().enumerate() {
        match l {
            PauliLetter::I => {}
            PauliLetter::X => flip |= 1 << q,
            PauliLetter::Y => {
                flip |= 1 << q;
                z_mask |= 1 << q;
                y_count += 1;
            }
            PauliLetter::Z => z_mask |= 1 << q,
        }
    }
    let i_pow = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ][y_count % 4];
    let value = rho.pauli_trace(flip, |y| {
        if (y & z_mask).count_ones() % 2 == 0 {
            i_pow
        } else {
            -i_pow
        }
    });
    debug_assert!(value.im.abs() < 1e-9, "imaginary residue {}", value.im);
    Ok(value.re)
}

/// Dense unitary of a circuit (preparations and measurements ignored).
pub fn unitary(c: &Circuit) -> Result<DenseUnitary> {
    check_size(c, &SimConfig::default())?;
    let mut u = DenseUnitary::identity(c.num_qubits());
    for g in c.gates() {
        u.left_apply(g);
    }
    Ok(u)
}
