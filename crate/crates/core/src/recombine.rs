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

//! Bayesian recombination of per-qubit mitigated distributions.
//!
//! Starting from the unmitigated distribution `P_R`, each step adds
//! `P_update(s) = sum_k P_R(s) w_{s[k]}(P_M_k, k) / w_{s[k]}(P_R, k)` and
//! renormalizes, until the Hellinger distance between successive iterates drops
//! below the threshold.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distribution::{Distribution, DistributionKind};
use crate::error::{Error, Result};

/// Floor applied to `w_j(P_R, k)` denominators.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecombinationConfig {
    pub threshold: f64,
    pub max_iterations: usize,
}

impl Default for RecombinationConfig {
    fn default() -> Self {
        RecombinationConfig {
            threshold: 1e-4,
            max_iterations: 10_000,
        }
    }
}

impl RecombinationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::validation(format!(
                "threshold {} must lie in (0, 1)",
                self.threshold
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::validation("max_iterations must be positive"));
        }
        Ok(())
    }
}

fn require_probability(d: &Distribution) -> Result<()> {
    if d.kind() != DistributionKind::Probability {
        return Err(Error::validation("expected a probability distribution"));
    }
    Ok(())
}

/// `w_j(P, k)`: total weight of outcomes whose bit `k` equals `j`.
pub fn bitwise_marginal(d: &Distribution, k: usize, j: u8) -> Result<f64> {
    require_probability(d)?;
    if k >= d.num_bits() {
        return Err(Error::validation(format!(
            "bit {k} out of range for {} bits",
            d.num_bits()
        )));
    }
    if j > 1 {
        return Err(Error::validation(format!("outcome {j} is not a bit")));
    }
    Ok(d.iter().filter(|(s, _)| (s >> k & 1) as u8 == j).map(|(_, w)| w).sum())
}

/// `[w_0, w_1]` for one qubit.
pub fn marginal_pair(d: &Distribution, k: usize) -> Result<[f64; 2]> {
    Ok([bitwise_marginal(d, k, 0)?, bitwise_marginal(d, k, 1)?])
}

fn marginals_of(keys: &[u64], weights: &[f64], qubits: &[usize]) -> Vec<[f64; 2]> {
    let mut out = vec![[0.0; 2]; qubits.len()];
    for (&s, &w) in keys.iter().zip(weights) {
        for (slot, &k) in out.iter_mut().zip(qubits) {
            slot[(s >> k & 1) as usize] += w;
        }
    }
    out
}

/// One update on dense key/weight vectors; returns the renormalized weights.
fn step(keys: &[u64], weights: &[f64], qubits: &[usize], targets: &[[f64; 2]]) -> Result<Vec<f64>> {
    let current = marginals_of(keys, weights, qubits);
    let ratio: Vec<[f64; 2]> = current
        .iter()
        .zip(targets)
        .map(|(c, t)| [t[0] / c[0].max(DENOMINATOR_FLOOR), t[1] / c[1].max(DENOMINATOR_FLOOR)])
        .collect();
    let mut next: Vec<f64> = keys
        .iter()
        .zip(weights)
        .map(|(&s, &w)| {
            let update: f64 = qubits
                .iter()
                .zip(&ratio)
                .map(|(&k, r)| w * r[(s >> k & 1) as usize])
                .sum();
            w + update
        })
        .collect();
    let total: f64 = next.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegenerateDistribution("recombination update has no mass".into()));
    }
    for w in &mut next {
        *w /= total;
    }
    Ok(next)
}

fn check_targets(pr: &Distribution, targets: &BTreeMap<usize, [f64; 2]>) -> Result<()> {
    for (&k, t) in targets {
        if k >= pr.num_bits() {
            return Err(Error::validation(format!(
                "protected bit {k} out of range for {} bits",
                pr.num_bits()
            )));
        }
        if t.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::validation(format!("invalid marginal for bit {k}")));
        }
    }
    Ok(())
}

/// `P_R' = normalize(P_R + P_update)` for target marginals `k -> [w_0(P_M_k, k), w_1(P_M_k, k)]`.
pub fn update_step(pr: &Distribution, targets: &BTreeMap<usize, [f64; 2]>) -> Result<Distribution> {
    require_probability(pr)?;
    check_targets(pr, targets)?;
    let (keys, weights): (Vec<u64>, Vec<f64>) = pr.iter().unzip();
    let qubits: Vec<usize> = targets.keys().copied().collect();
    let t: Vec<[f64; 2]> = targets.values().copied().collect();
    let next = step(&keys, &weights, &qubits, &t)?;
    Distribution::probability(pr.num_bits(), keys.into_iter().zip(next).collect())
}

/// `sqrt(1 - sum_s sqrt(p(s) q(s)))`.
pub fn hellinger(p: &Distribution, q: &Distribution) -> Result<f64> {
    require_probability(p)?;
    require_probability(q)?;
    if p.num_bits() != q.num_bits() {
        return Err(Error::validation(format!(
            "distributions over {} and {} bits",
            p.num_bits(),
            q.num_bits()
        )));
    }
    let bc: f64 = p.iter().map(|(s, w)| (w * q.get(s)).sqrt()).sum();
    Ok((1.0 - bc).max(0.0).sqrt())
}

fn hellinger_dense(a: &[f64], b: &[f64]) -> f64 {
    let bc: f64 = a.iter().zip(b).map(|(x, y)| (x * y).sqrt()).sum();
    (1.0 - bc).max(0.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub hellinger: f64,
    /// `max_j |w_j(P_R, k) - w_j(P_M_k, k)|` per protected qubit, in key order.
    pub deviation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecombinationResult {
    pub distribution: Distribution,
    pub converged: bool,
    pub iterations: usize,
    /// Hellinger distance of the last step.
    pub final_step: f64,
    /// Largest marginal deviation from the protected distributions.
    pub delta: f64,
    pub protected_qubits: Vec<usize>,
    pub trace: Vec<TraceRow>,
}

impl RecombinationResult {
    /// `iteration,hellinger,dev_q<k>...` rows.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,hellinger");
        for k in &self.protected_qubits {
            out.push_str(&format!(",deviation_q{k}"));
        }
        out.push('\n');
        for row in &self.trace {
            out.push_str(&format!("{},{:e}", row.iteration, row.hellinger));
            for d in &row.deviation {
                out.push_str(&format!(",{d:e}"));
            }
            out.push('\n');
        }
        out
    }
}

fn deviations(current: &[[f64; 2]], targets: &[[f64; 2]]) -> Vec<f64> {
    current
        .iter()
        .zip(targets)
        .map(|(c, t)| (c[0] - t[0]).abs().max((c[1] - t[1]).abs()))
        .collect()
}

/// Iterate [`update_step`] from `P_R = P_UM` until the Hellinger step falls below
/// `cfg.threshold` or `cfg.max_iterations` steps have run.
pub fn recombine(
    unmitigated: &Distribution,
    mitigated: &BTreeMap<usize, Distribution>,
    cfg: &RecombinationConfig,
) -> Result<RecombinationResult> {
    cfg.validate()?;
    require_probability(unmitigated)?;
    if mitigated.is_empty() {
        return Err(Error::validation("no mitigated distributions to recombine"));
    }
    let mut targets = BTreeMap::new();
    for (&k, d) in mitigated {
        if d.num_bits() != unmitigated.num_bits() {
            return Err(Error::validation(format!(
                "mitigated distribution for bit {k} has {} bits, unmitigated has {}",
                d.num_bits(),
                unmitigated.num_bits()
            )));
        }
        if k >= d.num_bits() {
            return Err(Error::validation(format!("protected bit {k} out of range")));
        }
        targets.insert(k, marginal_pair(d, k)?);
    }
    let qubits: Vec<usize> = targets.keys().copied().collect();
    let t: Vec<[f64; 2]> = targets.values().copied().collect();
    let (keys, mut weights): (Vec<u64>, Vec<f64>) = unmitigated.iter().unzip();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut final_step = f64::NAN;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        let next = step(&keys, &weights, &qubits, &t)?;
        final_step = hellinger_dense(&next, &weights);
        weights = next;
        iterations += 1;
        trace.push(TraceRow {
            iteration: iterations,
            hellinger: final_step,
            deviation: deviations(&marginals_of(&keys, &weights, &qubits), &t),
        });
        if final_step < cfg.threshold {
            converged = true;
            break;
        }
    }
    let delta = trace
        .last()
        .map_or(0.0, |r| r.deviation.iter().copied().fold(0.0, f64::max));
    let mut distribution = Distribution::probability(unmitigated.num_bits(), keys.into_iter().zip(weights).collect())?;
    if let Some(s) = unmitigated.shots() {
        distribution = distribution.with_shots(s);
    }
    Ok(RecombinationResult {
        distribution,
        converged,
        iterations,
        final_step,
        delta,
        protected_qubits: qubits,
        trace,
    })
}
