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

//! Hardware-efficient ansatz, energy estimation from measured distributions, and
//! the method-by-method energy comparison.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, PauliLetter};
use crate::pcs;
use crate::recombine::{recombine, RecombinationConfig};
use crate::seed;
use crate::sim::{self, ExecutionMode, NoiseModel};
use crate::sqem::{self, CampaignConfig, CheckFrame, TerminalPlacement};

fn default_rotations() -> Vec<GateKind> {
    vec![GateKind::RY, GateKind::RZ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    /// `CZ` on (0,1), (1,2), ..., (n-2,n-1).
    #[default]
    CzCascade,
}

/// Rotation layer, entangler, rotation layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub num_qubits: usize,
    #[serde(default = "default_rotations")]
    pub rotations: Vec<GateKind>,
    #[serde(default)]
    pub entangler: Entangler,
    /// Hartree-Fock occupation; character `k` is qubit `k`.
    #[serde(default)]
    pub occupation: String,
}

impl AnsatzSpec {
    pub fn new(num_qubits: usize) -> Self {
        AnsatzSpec {
            num_qubits,
            rotations: default_rotations(),
            entangler: Entangler::CzCascade,
            occupation: String::new(),
        }
    }

    pub fn num_parameters(&self) -> usize {
        2 * self.num_qubits * self.rotations.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: AnsatzSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 {
            return Err(Error::validation("ansatz needs at least one qubit"));
        }
        if self.rotations.is_empty() {
            return Err(Error::validation("ansatz needs at least one rotation axis"));
        }
        if let Some(k) = self
            .rotations
            .iter()
            .find(|k| !matches!(k, GateKind::RX | GateKind::RY | GateKind::RZ))
        {
            return Err(Error::validation(format!("{} is not a rotation axis", k.name())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub values: Vec<f64>,
    #[serde(default)]
    pub provenance: String,
}

impl ParameterSet {
    pub fn from_json(text: &str) -> Result<Self> {
        let p: ParameterSet = serde_json::from_str(text)?;
        if let Some(v) = p.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::validation(format!("parameter {v} is not finite")));
        }
        Ok(p)
    }
}

/// `X` on occupied qubits, then the two rotation layers around the entangler.
///
/// Parameters are ordered by layer, then qubit, then rotation axis.
pub fn build_ansatz(spec: &AnsatzSpec, params: &ParameterSet, occupation: &str) -> Result<Circuit> {
    spec.validate()?;
    let n = spec.num_qubits;
    if params.values.len() != spec.num_parameters() {
        return Err(Error::validation(format!(
            "ansatz takes {} parameters, got {}",
            spec.num_parameters(),
            params.values.len()
        )));
    }
    if !occupation.is_empty() && occupation.chars().count() != n {
        return Err(Error::validation(format!(
            "occupation '{occupation}' does not cover {n} qubits"
        )));
    }
    let mut c = Circuit::new(n).measure_all();
    for (q, ch) in occupation.chars().enumerate() {
        match ch {
            '1' => c.push(Gate::x(q))?,
            '0' => {}
            other => {
                return Err(Error::validation(format!(
                    "occupation character '{other}' is not a bit"
                )))
            }
        }
    }
    let mut values = params.values.iter().copied();
    let mut layer = |c: &mut Circuit| -> Result<()> {
        for q in 0..n {
            for &kind in &spec.rotations {
                let theta = values.next().expect("length checked");
                c.push(Gate::new(kind, vec![q], vec![theta])?)?;
            }
        }
        Ok(())
    };
    layer(&mut c)?;
    match spec.entangler {
        Entangler::CzCascade => {
            for q in 0..n.saturating_sub(1) {
                c.push(Gate::cz(q, q + 1))?;
            }
        }
    }
    layer(&mut c)?;
    Ok(c)
}

/// Terms measured together after one basis-change suffix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementGroup {
    /// Measurement basis per qubit; `I` means unconstrained and is read in `Z`.
    pub basis: Vec<PauliLetter>,
    pub suffix: Vec<Gate>,
    /// Indices into the Hamiltonian's terms.
    pub terms: Vec<usize>,
}

impl MeasurementGroup {
    /// `c` followed by this group's basis change.
    pub fn apply(&self, c: &Circuit) -> Result<Circuit> {
        let mut out = c.clone();
        out.extend(self.suffix.iter().cloned())?;
        Ok(out)
    }
}

/// Greedy qubit-wise commuting grouping in term order.
pub fn measurement_groups(h: &Hamiltonian) -> Vec<MeasurementGroup> {
    let n = h.num_qubits();
    let mut groups: Vec<(Vec<PauliLetter>, Vec<usize>)> = Vec::new();
    for (i, term) in h.terms().iter().enumerate() {
        let fits = |basis: &[PauliLetter]| {
            basis
                .iter()
                .zip(term.letters())
                .all(|(&b, &t)| b == PauliLetter::I || t == PauliLetter::I || b == t)
        };
        match groups.iter_mut().find(|(b, _)| fits(b)) {
            Some((basis, terms)) => {
                for (b, &t) in basis.iter_mut().zip(term.letters()) {
                    if t != PauliLetter::I {
                        *b = t;
                    }
                }
                terms.push(i);
            }
            None => groups.push((term.letters().to_vec(), vec![i])),
        }
    }
    if groups.is_empty() {
        groups.push((vec![PauliLetter::I; n], Vec::new()));
    }
    groups
        .into_iter()
        .map(|(basis, terms)| {
            let suffix = basis.iter().enumerate().flat_map(|(q, l)| l.basis_change(q)).collect();
            MeasurementGroup { basis, suffix, terms }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub method: String,
    pub energy: f64,
    /// Expectation value per term label.
    pub per_term: BTreeMap<String, f64>,
    pub shots_used: u64,
}

/// `sum_s P(s) (-1)^{popcount(s & support)}` on a full-register distribution.
pub fn parity_expectation(d: &Distribution, support: u64) -> f64 {
    d.iter()
        .map(|(s, w)| if (s & support).count_ones() % 2 == 0 { w } else { -w })
        .sum()
}

/// Energy from one full-register distribution per measurement group.
pub fn energy_from_distributions(
    h: &Hamiltonian,
    groups: &[MeasurementGroup],
    results: &BTreeMap<usize, Distribution>,
    method: &str,
    shots_used: u64,
) -> Result<EnergyReport> {
    let mut per_term = BTreeMap::new();
    let mut energy = 0.0;
    for (g, group) in groups.iter().enumerate() {
        let d = results
            .get(&g)
            .ok_or_else(|| Error::validation(format!("no distribution for measurement group {g}")))?;
        if d.num_bits() != h.num_qubits() {
            return Err(Error::validation(format!(
                "group {g} distribution has {} bits for {} qubits",
                d.num_bits(),
                h.num_qubits()
            )));
        }
        for &t in &group.terms {
            let term = &h.terms()[t];
            let value = parity_expectation(d, term.support_mask());
            energy += term.coefficient() * value;
            per_term.insert(term.label(), value);
        }
    }
    Ok(EnergyReport {
        method: method.to_string(),
        energy,
        per_term,
        shots_used,
    })
}

/// `<psi|H|psi>` of a circuit's final state, optionally under noise.
pub fn exact_energy(c: &Circuit, h: &Hamiltonian, noise: Option<&NoiseModel>) -> Result<f64> {
    let rho = sim::run_exact(c, noise)?;
    let mut e = 0.0;
    for t in h.terms() {
        e += t.coefficient() * sim::expectation(&rho, t)?;
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub shots: u64,
    pub seed: u64,
    /// Protected qubits; all when `None`.
    #[serde(default)]
    pub qubits: Option<Vec<usize>>,
    #[serde(default)]
    pub frame: CheckFrame,
    #[serde(default)]
    pub recombination: RecombinationConfig,
    /// Also run the checks on the noisy backend.
    #[serde(default = "yes")]
    pub include_pcs: bool,
}

fn yes() -> bool {
    true
}

impl ComparisonConfig {
    pub fn new(shots: u64, seed: u64) -> Self {
        ComparisonConfig {
            shots,
            seed,
            qubits: None,
            frame: CheckFrame::Auto,
            recombination: RecombinationConfig::default(),
            include_pcs: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupRecombination {
    pub group: usize,
    pub converged: bool,
    pub iterations: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub reports: Vec<EnergyReport>,
    pub recombination: Vec<GroupRecombination>,
}

impl Comparison {
    pub fn report(&self, method: &str) -> Option<&EnergyReport> {
        self.reports.iter().find(|r| r.method == method)
    }
}

struct GroupOutcome {
    methods: Vec<(String, Distribution, u64)>,
    recombination: GroupRecombination,
}

fn run_group(
    g: usize,
    circuit: &Circuit,
    noise: &NoiseModel,
    qubits: &[usize],
    cfg: &ComparisonConfig,
) -> Result<GroupOutcome> {
    let group_seed = seed::derive_seed(cfg.seed, &format!("group{g}"));
    let campaign = CampaignConfig {
        circuit: circuit.clone(),
        noise: noise.clone(),
        qubits: qubits.to_vec(),
        shots: Some(cfg.shots),
        seed: group_seed,
        frame: cfg.frame,
        placement: TerminalPlacement::Mitigation,
    };
    let mut methods = vec![("noiseless".to_string(), sim::exact_distribution(circuit, None)?, 0)];
    let result = sqem::run_campaign(&campaign)?;
    methods.push(("unmitigated".into(), result.unmitigated.distribution.clone(), cfg.shots));
    if cfg.include_pcs {
        let pcs: Vec<Result<Distribution>> = qubits
            .par_iter()
            .map(|&k| {
                let pair = sqem::build_check(circuit, k, cfg.frame)?;
                let s = pcs::wrap(circuit, &[pair])?;
                let seed = seed::derive_seed(group_seed, &format!("pcs/q{k}"));
                let raw = sim::execute(
                    &s.circuit,
                    Some(noise),
                    ExecutionMode::Sampled { shots: cfg.shots },
                    seed,
                )?;
                Ok(pcs::post_select(&raw.distribution, &s.ancilla_bits)?.distribution)
            })
            .collect();
        for (&k, d) in qubits.iter().zip(pcs) {
            methods.push((format!("pcs_noisy_{k}"), d?, cfg.shots));
        }
    }
    let mut sqem_shots = 0;
    for job in &result.jobs {
        sqem_shots += job.cost.shots;
        methods.push((format!("sqem_{}", job.qubit), job.distribution.clone(), job.cost.shots));
    }
    let rec = recombine(&result.unmitigated.distribution, &result.mitigated, &cfg.recombination)?;
    methods.push(("recombined".into(), rec.distribution, cfg.shots + sqem_shots));
    Ok(GroupOutcome {
        methods,
        recombination: GroupRecombination {
            group: g,
            converged: rec.converged,
            iterations: rec.iterations,
            delta: rec.delta,
        },
    })
}

/// Energies for the noiseless, unmitigated, checks-on-noisy-backend, per-qubit
/// mitigated and recombined methods. All methods share one seed stream per group.
pub fn run_comparison(
    ansatz: &Circuit,
    h: &Hamiltonian,
    noise: &NoiseModel,
    cfg: &ComparisonConfig,
) -> Result<Comparison> {
    if h.num_qubits() != ansatz.num_qubits() {
        return Err(Error::validation(format!(
            "Hamiltonian has {} qubits, ansatz has {}",
            h.num_qubits(),
            ansatz.num_qubits()
        )));
    }
    noise.validate()?;
    let qubits = cfg.qubits.clone().unwrap_or_else(|| (0..ansatz.num_qubits()).collect());
    let mut measured = ansatz.clone();
    measured.set_measured((0..ansatz.num_qubits()).collect())?;
    let groups = measurement_groups(h);
    let outcomes: Vec<Result<GroupOutcome>> = groups
        .par_iter()
        .enumerate()
        .map(|(g, group)| run_group(g, &group.apply(&measured)?, noise, &qubits, cfg))
        .collect();
    let outcomes: Vec<GroupOutcome> = outcomes.into_iter().collect::<Result<_>>()?;

    let mut reports = Vec::new();
    let method_names: Vec<String> = outcomes[0].methods.iter().map(|(m, _, _)| m.clone()).collect();
    for (mi, name) in method_names.iter().enumerate() {
        let mut results = BTreeMap::new();
        let mut shots = 0;
        for (g, o) in outcomes.iter().enumerate() {
            results.insert(g, o.methods[mi].1.clone());
            shots += o.methods[mi].2;
        }
        reports.push(energy_from_distributions(h, &groups, &results, name, shots)?);
    }
    Ok(Comparison {
        reports,
        recombination: outcomes.into_iter().map(|o| o.recombination).collect(),
    })
}

/// Mean and standard error of one method across repeated comparisons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: String,
    pub energy: f64,
    pub stderr: f64,
    pub samples: usize,
}

pub fn summarize(runs: &[Comparison]) -> Vec<MethodSummary> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    first
        .reports
        .iter()
        .map(|r| {
            let values: Vec<f64> = runs
                .iter()
                .filter_map(|c| c.report(&r.method))
                .map(|x| x.energy)
                .collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let stderr = if values.len() > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt()
            } else {
                0.0
            };
            MethodSummary {
                method: r.method.clone(),
                energy: mean,
                stderr,
                samples: values.len(),
            }
        })
        .collect()
}

/// `method,energy,stderr` rows.
pub fn summary_csv(rows: &[MethodSummary]) -> String {
    let mut out = String::from("method,energy,stderr\n");
    for r in rows {
        out.push_str(&format!("{},{:.10},{:.10}\n", r.method, r.energy, r.stderr));
    }
    out
}
