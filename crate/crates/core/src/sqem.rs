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

//! Per-qubit mitigation jobs: wrap the circuit in a single check pair, cut the
//! check gadget out so that it is evaluated exactly and noiselessly, run the
//! remaining circuit on the noisy backend, reconstruct, and post-select.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::cut::{
    cut_wires_with, enumerate_variants, execute_and_reconstruct, Backend, BackendTag, CutPoint, FragmentSet,
    IsolatedPlacement,
};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::pcs::{self, CheckPair, SandwichCircuit};
use crate::seed;
use crate::sim::{self, ExecutionMode, ExecutionReport, NoiseModel};

/// How the check unitaries are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckFrame {
    /// Bare `Z`; the whole circuit must commute with `Z_k`.
    Plain,
    /// `Z` conjugated by the single-qubit gates that open and close qubit `k`.
    #[default]
    Auto,
}

/// Which fragment holds the protected qubit's preparation and final measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalPlacement {
    /// With the checks, on the noiseless side (two cuts).
    #[default]
    Mitigation,
    /// With the circuit body, on the noisy side (four cuts).
    Main,
}

pub fn build_check(c: &Circuit, k: usize, frame: CheckFrame) -> Result<CheckPair> {
    match frame {
        CheckFrame::Plain => pcs::build_z_check(c, k),
        CheckFrame::Auto => pcs::build_framed_z_check(c, k),
    }
}

/// Cuts that isolate the check gadget of the single pair on qubit `k`.
pub fn plan_cuts_for_check(s: &SandwichCircuit, k: usize, placement: TerminalPlacement) -> Result<Vec<CutPoint>> {
    if s.pairs.len() != 1 || s.pairs[0].target != k {
        return Err(Error::Planning(format!(
            "expected exactly one check pair on qubit {k}, found {}",
            s.pairs.len()
        )));
    }
    let (l, r) = (s.left_gate[0], s.right_gate[0]);
    if l + 1 > s.body.start || r < s.body.end {
        return Err(Error::Planning("check gates overlap the circuit body".into()));
    }
    Ok(match placement {
        TerminalPlacement::Mitigation => vec![CutPoint::new(k, l + 1), CutPoint::new(k, r)],
        TerminalPlacement::Main => vec![
            CutPoint::new(k, l),
            CutPoint::new(k, l + 1),
            CutPoint::new(k, r),
            CutPoint::new(k, r + 1),
        ],
    })
}

/// A sandwich cut into a noiseless mitigation fragment and a noisy main fragment.
#[derive(Debug, Clone)]
pub struct JobPlan {
    pub sandwich: SandwichCircuit,
    pub fragments: FragmentSet,
    /// Index of the fragment holding the ancilla and both checks.
    pub mitigation: usize,
}

impl JobPlan {
    pub fn main(&self) -> usize {
        1 - self.mitigation
    }
}

pub fn plan_job(c: &Circuit, k: usize, frame: CheckFrame, placement: TerminalPlacement) -> Result<JobPlan> {
    let pair = build_check(c, k, frame)?;
    let sandwich = pcs::wrap(c, &[pair])?;
    let cuts = plan_cuts_for_check(&sandwich, k, placement)?;
    let anchor = IsolatedPlacement::WithSegment {
        qubit: k,
        position: sandwich.body.start,
    };
    let mut fragments = cut_wires_with(&sandwich.circuit, &cuts, anchor)?;
    let mitigation = fragments
        .fragment_of_gate(sandwich.left_gate[0])
        .ok_or_else(|| Error::Planning("left check gate not placed".into()))?;
    let check_gates = [sandwich.left_gate[0], sandwich.right_gate[0]];
    let ancilla_gates =
        (0..sandwich.circuit.gates().len()).filter(|&i| sandwich.circuit.gates()[i].acts_on(sandwich.ancillas[0]));
    if ancilla_gates
        .chain(check_gates)
        .any(|i| fragments.fragment_of_gate(i) != Some(mitigation))
    {
        return Err(Error::Planning("check gadget is split across fragments".into()));
    }
    if sandwich
        .body
        .clone()
        .any(|i| fragments.fragment_of_gate(i) == Some(mitigation))
    {
        return Err(Error::Planning(
            "circuit body leaks into the mitigation fragment".into(),
        ));
    }
    fragments.set_backend(mitigation, BackendTag::Noiseless)?;
    fragments.set_backend(1 - mitigation, BackendTag::HardwareEmulated)?;
    Ok(JobPlan {
        sandwich,
        fragments,
        mitigation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqemJob {
    pub circuit: Circuit,
    pub protected_qubit: usize,
    pub noise: NoiseModel,
    /// Execution of the main fragment; the mitigation fragment is always exact.
    pub mode: ExecutionMode,
    pub seed: u64,
    pub frame: CheckFrame,
    pub placement: TerminalPlacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobCost {
    pub variants: usize,
    pub hardware_configurations: usize,
    pub classical_configurations: usize,
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobResult {
    pub qubit: usize,
    pub distribution: Distribution,
    pub retained_fraction: f64,
    pub clipped_mass: f64,
    pub negativity: f64,
    pub cost: JobCost,
}

/// `P_M_k`: reconstruct, restrict to ancilla 0, clip, normalize.
pub fn run_job(job: &SqemJob) -> Result<JobResult> {
    job.noise.validate()?;
    let plan = plan_job(&job.circuit, job.protected_qubit, job.frame, job.placement)?;
    let variants = enumerate_variants(&plan.fragments)?;
    let mut backends = [Backend::exact(), Backend::exact()];
    backends[plan.main()] = Backend::new(Some(job.noise.clone()), job.mode);
    if plan.fragments.fragments()[plan.mitigation].backend() != BackendTag::Noiseless
        || backends[plan.mitigation].noise.is_some()
    {
        return Err(Error::Planning("mitigation fragment must run without noise".into()));
    }
    let recon = execute_and_reconstruct(&plan.fragments, &variants, &backends, job.seed)?;
    let selected = pcs::post_select(&recon.joint, &plan.sandwich.ancilla_bits)?;
    let hardware = recon.configurations_executed[plan.main()];
    let shots = match job.mode {
        ExecutionMode::Exact => 0,
        ExecutionMode::Sampled { shots } => shots * hardware as u64,
    };
    let mut distribution = selected.distribution;
    if let ExecutionMode::Sampled { shots } = job.mode {
        distribution = distribution.with_shots(shots);
    }
    Ok(JobResult {
        qubit: job.protected_qubit,
        distribution,
        retained_fraction: selected.retained_fraction,
        clipped_mass: selected.clipped_mass,
        negativity: recon.negativity,
        cost: JobCost {
            variants: recon.terms_executed,
            hardware_configurations: hardware,
            classical_configurations: recon.configurations_executed[plan.mitigation],
            shots,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub circuit: Circuit,
    pub noise: NoiseModel,
    pub qubits: Vec<usize>,
    /// Shots for the unmitigated run and for each main-fragment configuration;
    /// `None` evaluates everything exactly.
    pub shots: Option<u64>,
    pub seed: u64,
    #[serde(default)]
    pub frame: CheckFrame,
    #[serde(default)]
    pub placement: TerminalPlacement,
}

impl CampaignConfig {
    fn mode(&self) -> ExecutionMode {
        match self.shots {
            Some(shots) => ExecutionMode::Sampled { shots },
            None => ExecutionMode::Exact,
        }
    }

    pub fn job(&self, k: usize) -> SqemJob {
        SqemJob {
            circuit: self.circuit.clone(),
            protected_qubit: k,
            noise: self.noise.clone(),
            mode: self.mode(),
            seed: seed::derive_seed(self.seed, &format!("job/q{k}")),
            frame: self.frame,
            placement: self.placement,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits.is_empty() {
            return Err(Error::validation("campaign selects no qubits"));
        }
        let mut seen = vec![false; self.circuit.num_qubits()];
        for &k in &self.qubits {
            if k >= seen.len() || std::mem::replace(&mut seen[k], true) {
                return Err(Error::validation(format!("invalid or repeated protected qubit {k}")));
            }
        }
        self.noise.validate()
    }

    pub fn unmitigated_seed(&self) -> u64 {
        seed::derive_seed(self.seed, "unmitigated")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqemCampaign {
    pub unmitigated: ExecutionReport,
    pub mitigated: BTreeMap<usize, Distribution>,
    pub jobs: Vec<JobResult>,
    /// Hardware circuits run: one unmitigated run plus every main-fragment configuration.
    pub hardware_configurations: usize,
}

/// Direct noisy execution of the circuit (`P_UM`).
pub fn run_unmitigated(cfg: &CampaignConfig) -> Result<ExecutionReport> {
    sim::execute(&cfg.circuit, Some(&cfg.noise), cfg.mode(), cfg.unmitigated_seed())
}

/// Runs every protected-qubit job, keeping each outcome.
pub fn run_jobs(cfg: &CampaignConfig) -> Vec<(usize, Result<JobResult>)> {
    let results: Vec<Result<JobResult>> = cfg.qubits.par_iter().map(|&k| run_job(&cfg.job(k))).collect();
    cfg.qubits.iter().copied().zip(results).collect()
}

pub fn run_campaign(cfg: &CampaignConfig) -> Result<SqemCampaign> {
    cfg.validate()?;
    let unmitigated = run_unmitigated(cfg)?;
    let mut jobs = Vec::with_capacity(cfg.qubits.len());
    for (k, r) in run_jobs(cfg) {
        jobs.push(r.map_err(|e| Error::Job {
            qubit: k,
            source: Box::new(e),
        })?);
    }
    let mitigated = jobs.iter().map(|j| (j.qubit, j.distribution.clone())).collect();
    let hardware_configurations = 1 + jobs.iter().map(|j| j.cost.hardware_configurations).sum::<usize>();
    Ok(SqemCampaign {
        unmitigated,
        mitigated,
        jobs,
        hardware_configurations,
    })
}
