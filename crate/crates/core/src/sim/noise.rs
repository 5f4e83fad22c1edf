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

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Synthetic device noise applied by the simulator.
///
/// Depolarizing channels use the Pauli convention: a one-qubit event picks X, Y or
/// Z with probability `p/3` each, a two-qubit event picks one of the 15
/// non-identity Pauli pairs with probability `p/15` each.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Applied after every single-qubit gate.
    #[serde(default)]
    pub one_qubit_depolarizing: f64,
    /// Applied to both qubits after every two-qubit gate.
    #[serde(default)]
    pub two_qubit_depolarizing: f64,
    /// `(px, py, pz)` applied to a qubit after every gate that touches it.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_qubit_pauli: BTreeMap<usize, [f64; 3]>,
    /// Symmetric classical flip of a qubit's measured bit.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub readout_flip: BTreeMap<usize, f64>,
    /// Bit-flip probability right after state preparation, on every qubit.
    #[serde(default)]
    pub spam_flip: f64,
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::validation(format!("{name} = {p} is not a probability")))
    }
}

impl NoiseModel {
    pub fn depolarizing(p1: f64, p2: f64) -> Self {
        NoiseModel {
            one_qubit_depolarizing: p1,
            two_qubit_depolarizing: p2,
            ..Default::default()
        }
    }

    /// Pauli channel on one qubit after each gate touching it, nothing else.
    pub fn pauli_on(qubit: usize, px: f64, py: f64, pz: f64) -> Self {
        NoiseModel {
            per_qubit_pauli: BTreeMap::from([(qubit, [px, py, pz])]),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_prob("one_qubit_depolarizing", self.one_qubit_depolarizing)?;
        check_prob("two_qubit_depolarizing", self.two_qubit_depolarizing)?;
        check_prob("spam_flip", self.spam_flip)?;
        for (q, [px, py, pz]) in &self.per_qubit_pauli {
            for (n, p) in [("px", px), ("py", py), ("pz", pz)] {
                check_prob(&format!("per_qubit_pauli[{q}].{n}"), *p)?;
            }
            if px + py + pz > 1.0 + 1e-12 {
                return Err(Error::validation(format!(
                    "per_qubit_pauli[{q}] sums to {} > 1",
                    px + py + pz
                )));
            }
        }
        for (q, p) in &self.readout_flip {
            check_prob(&format!("readout_flip[{q}]"), *p)?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: NoiseModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    /// True when some channel acts on the quantum state (anything but readout flips).
    pub fn has_state_noise(&self) -> bool {
        self.one_qubit_depolarizing > 0.0
            || self.two_qubit_depolarizing > 0.0
            || self.spam_flip > 0.0
            || self.per_qubit_pauli.values().any(|p| p.iter().any(|&x| x > 0.0))
    }

    pub fn is_noiseless(&self) -> bool {
        !self.has_state_noise() && self.readout_flip.values().all(|&p| p == 0.0)
    }

    /// Re-key per-qubit entries for a register whose local qubit `l` was original qubit `origin[l]`.
    pub fn remapped(&self, origin: &[usize]) -> NoiseModel {
        let mut out = NoiseModel {
            per_qubit_pauli: BTreeMap::new(),
            readout_flip: BTreeMap::new(),
            ..self.clone()
        };
        for (l, o) in origin.iter().enumerate() {
            if let Some(p) = self.per_qubit_pauli.get(o) {
                out.per_qubit_pauli.insert(l, *p);
            }
            if let Some(p) = self.readout_flip.get(o) {
                out.readout_flip.insert(l, *p);
            }
        }
        out
    }
}
