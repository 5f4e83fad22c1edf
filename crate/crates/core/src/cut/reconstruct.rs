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

//! Fragment execution and quasi-probability reconstruction.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BackendTag, CutChoice, Fragment, FragmentSet, VariantAssignment};
use crate::circuit::{Circuit, Preparation};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::pauli::PauliLetter;
use crate::seed;
use crate::sim::{self, ExecutionMode, NoiseModel};

/// Execution target for one fragment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Backend {
    pub noise: Option<NoiseModel>,
    pub mode: ExecutionMode,
}

impl Backend {
    /// Noiseless exact evaluation.
    pub fn exact() -> Self {
        Backend {
            noise: None,
            mode: ExecutionMode::Exact,
        }
    }

    pub fn new(noise: Option<NoiseModel>, mode: ExecutionMode) -> Self {
        Backend { noise, mode }
    }

    fn is_noiseless(&self) -> bool {
        self.noise.as_ref().map_or(true, NoiseModel::is_noiseless)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    /// Quasi-probability joint over the original measured bits.
    pub joint: Distribution,
    pub terms_executed: usize,
    /// Distinct circuits run per fragment.
    pub configurations_executed: [usize; 2],
    /// Circuits run on fragments tagged as hardware.
    pub hardware_configurations: usize,
    /// Total negative mass in the joint.
    pub negativity: f64,
}

const SETTINGS: [PauliLetter; 3] = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

/// Mixed-radix index: base 3 per measure terminal, then base 6 per prepare terminal.
/// Contracted fragment terms keyed by (configuration, cut outcomes).
type TermCache = HashMap<(usize, Vec<bool>), Vec<(u64, f64)>>;

fn config_index(f: &Fragment, choices: &[CutChoice]) -> usize {
    let mut idx = 0;
    for &(cut, _) in &f.measure_terminals {
        let s = choices[cut].setting();
        idx = idx * 3 + SETTINGS.iter().position(|&x| x == s).unwrap_or(2);
    }
    for &(cut, _) in &f.prepare_terminals {
        let p = choices[cut].preparation();
        idx = idx * 6 + Preparation::ALL.iter().position(|&x| x == p).unwrap_or(0);
    }
    idx
}

fn config_circuit(f: &Fragment, mut idx: usize) -> Result<Circuit> {
    let mut c = f.circuit.clone();
    for &(_, q) in f.prepare_terminals.iter().rev() {
        c.set_preparation(q, Preparation::ALL[idx % 6])?;
        idx /= 6;
    }
    let mut settings = Vec::with_capacity(f.measure_terminals.len());
    for _ in &f.measure_terminals {
        settings.push(SETTINGS[idx % 3]);
        idx /= 3;
    }
    settings.reverse();
    for (&(_, q), s) in f.measure_terminals.iter().zip(settings) {
        c.extend(s.basis_change(q))?;
    }
    Ok(c)
}

fn run_fragment(f: &Fragment, fi: usize, backend: &Backend, idx: usize, root: u64) -> Result<Distribution> {
    let circuit = config_circuit(f, idx)?;
    let noise = backend.noise.as_ref().map(|n| n.remapped(&f.qubit_origin));
    let seed = seed::derive_seed(root, &format!("fragment{fi}/config{idx}"));
    Ok(sim::execute(&circuit, noise.as_ref(), backend.mode, seed)?.distribution)
}

/// `sum_t prod_c mu_c(t_c) P(s, t)` with `mu = 1` for identity terminals and `(-1)^t` otherwise,
/// keyed by the global measured-bit key.
fn contract(f: &Fragment, p: &Distribution, choices: &[CutChoice]) -> Vec<(u64, f64)> {
    let n_orig = f.measured_positions.len();
    let mut sign_mask = 0u64;
    for (t, &(cut, _)) in f.measure_terminals.iter().enumerate() {
        if choices[cut].basis != PauliLetter::I {
            sign_mask |= 1 << (n_orig + t);
        }
    }
    let low = (1u64 << n_orig) - 1;
    let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
    for (key, w) in p.iter() {
        let s = if (key & sign_mask).count_ones() % 2 == 0 { w } else { -w };
        let mut global = 0u64;
        for (b, &pos) in f.measured_positions.iter().enumerate() {
            global |= ((key & low) >> b & 1) << pos;
        }
        *acc.entry(global).or_insert(0.0) += s;
    }
    acc.into_iter().collect()
}

/// Runs every fragment configuration on its backend and sums
/// `weight * Q_0 * Q_1` over `variants` in enumeration order.
pub fn execute_and_reconstruct(
    fs: &FragmentSet,
    variants: &[VariantAssignment],
    backends: &[Backend; 2],
    seed: u64,
) -> Result<ReconstructionResult> {
    for (fi, f) in fs.fragments.iter().enumerate() {
        if f.backend == BackendTag::Noiseless && !backends[fi].is_noiseless() {
            return Err(Error::Planning(format!(
                "fragment {fi} is tagged noiseless but its backend carries a noise model"
            )));
        }
    }
    for v in variants {
        if v.choices.len() != fs.num_cuts() {
            return Err(Error::validation(format!(
                "variant has {} choices for {} cuts",
                v.choices.len(),
                fs.num_cuts()
            )));
        }
    }

    let jobs: Vec<(usize, usize)> = fs
        .fragments
        .iter()
        .enumerate()
        .filter(|(_, f)| f.num_qubits() > 0)
        .flat_map(|(fi, f)| (0..f.num_configurations()).map(move |i| (fi, i)))
        .collect();
    let outputs: Vec<Result<Distribution>> = jobs
        .par_iter()
        .map(|&(fi, i)| run_fragment(&fs.fragments[fi], fi, &backends[fi], i, seed))
        .collect();
    let mut results: [HashMap<usize, Distribution>; 2] = Default::default();
    for (&(fi, i), out) in jobs.iter().zip(outputs) {
        let d = out.map_err(|e| Error::Backend {
            index: i,
            source: Box::new(e),
        })?;
        results[fi].insert(i, d);
    }

    let mut cache: [TermCache; 2] = Default::default();
    let mut joint: BTreeMap<u64, f64> = BTreeMap::new();
    for v in variants {
        let mut q = [Vec::new(), Vec::new()];
        for (fi, f) in fs.fragments.iter().enumerate() {
            if f.num_qubits() == 0 {
                q[fi] = vec![(0, 1.0)];
                continue;
            }
            let idx = config_index(f, &v.choices);
            let imask: Vec<bool> = f
                .measure_terminals
                .iter()
                .map(|&(c, _)| v.choices[c].basis == PauliLetter::I)
                .collect();
            q[fi] = cache[fi]
                .entry((idx, imask))
                .or_insert_with(|| contract(f, &results[fi][&idx], &v.choices))
                .clone();
        }
        for &(k0, w0) in &q[0] {
            for &(k1, w1) in &q[1] {
                *joint.entry(k0 | k1).or_insert(0.0) += v.weight * w0 * w1;
            }
        }
    }

    joint.retain(|_, w| w.abs() > 1e-14);
    let negativity = joint.values().filter(|&&w| w < 0.0).map(|w| -w).sum();
    let configurations_executed = [0, 1].map(|fi| {
        let f = &fs.fragments[fi];
        if f.num_qubits() == 0 {
            0
        } else {
            f.num_configurations()
        }
    });
    let hardware_configurations = (0..2)
        .filter(|&fi| fs.fragments[fi].backend == BackendTag::HardwareEmulated)
        .map(|fi| configurations_executed[fi])
        .sum();
    Ok(ReconstructionResult {
        joint: Distribution::quasi(fs.original.measured_qubits().len(), joint)?,
        terms_executed: variants.len(),
        configurations_executed,
        hardware_configurations,
        negativity,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{cut_wires, enumerate_variants, CutPoint};
    use super::*;
    use crate::distribution::total_variation;

    fn reconstruct_exact(c: &Circuit, cuts: &[CutPoint]) -> ReconstructionResult {
        let fs = cut_wires(c, cuts).unwrap();
        let vs = enumerate_variants(&fs).unwrap();
        execute_and_reconstruct(&fs, &vs, &[Backend::exact(), Backend::exact()], 1).unwrap()
    }

    #[test]
    fn bell_reconstruction_matches_uncut() {
        let c = Circuit::parse("qubits 2\nH q0\nCX q0,q1\nmeasure all").unwrap();
        let r = reconstruct_exact(&c, &[CutPoint::new(0, 1)]);
        assert!((r.joint.get_str("00") - 0.5).abs() < 1e-9);
        assert!((r.joint.get_str("11") - 0.5).abs() < 1e-9);
        assert!(r.negativity <= 1e-9);
        assert_eq!(r.terms_executed, 8);
        assert_eq!(r.configurations_executed, [3, 6]);
    }

    #[test]
    fn ghz3_single_cut() {
        let c = Circuit::parse("qubits 3\nH q0\nCX q0,q1\nCX q1,q2\nmeasure all").unwrap();
        let r = reconstruct_exact(&c, &[CutPoint::new(1, 2)]);
        assert!((r.joint.get_str("000") - 0.5).abs() < 1e-9);
        assert!((r.joint.get_str("111") - 0.5).abs() < 1e-9);
    }

    #[test]
    fn two_cuts_with_fragment_on_both_sides() {
        // The middle segment of q0 becomes its own fragment; the outer ones stay with q1.
        let c =
            Circuit::parse("qubits 2\nH q0\nCX q0,q1\nRY(0.7) q0\nRZ(0.3) q0\nCX q0,q1\nH q0\nmeasure all").unwrap();
        let r = reconstruct_exact(&c, &[CutPoint::new(0, 2), CutPoint::new(0, 4)]);
        let direct = sim::exact_distribution(&c, None).unwrap();
        assert!(total_variation(&r.joint, &direct).unwrap() < 1e-9);
        assert_eq!(r.terms_executed, 64);
    }

    #[test]
    fn zero_cuts_is_direct_execution() {
        let c = Circuit::parse("qubits 2\nRY(0.4) q0\nCX q0,q1\nmeasure all").unwrap();
        let r = reconstruct_exact(&c, &[]);
        let direct = sim::exact_distribution(&c, None).unwrap();
        assert!(total_variation(&r.joint, &direct).unwrap() < 1e-12);
        assert_eq!(r.configurations_executed, [1, 0]);
    }

    #[test]
    fn noiseless_tag_rejects_noisy_backend() {
        let c = Circuit::parse("qubits 2\nH q0\nCX q0,q1\nmeasure all").unwrap();
        let mut fs = cut_wires(&c, &[CutPoint::new(0, 1)]).unwrap();
        fs.set_backend(0, BackendTag::Noiseless).unwrap();
        let vs = enumerate_variants(&fs).unwrap();
        let noisy = Backend::new(Some(NoiseModel::depolarizing(0.01, 0.0)), ExecutionMode::Exact);
        assert!(matches!(
            execute_and_reconstruct(&fs, &vs, &[noisy, Backend::exact()], 0),
            Err(Error::Planning(_))
        ));
    }
}
