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

//! Pauli check sandwiches: pairs of single-qubit unitaries `C1`, `C2` with
//! `C2 U C1 = U`, applied under control of an ancilla prepared and closed by
//! Hadamards. Post-selecting the ancilla on 0 discards every error that
//! anticommutes with the check.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;

use crate::circuit::{sequence_matrix, u_params_from_matrix, Circuit, Gate, Matrix2, Preparation, C64};
use crate::distribution::{gather_bits, Distribution};
use crate::error::{Error, Result};
use crate::pauli::{first_z_blocker, pauli_commutes_with_circuit, PauliLetter, PauliString};
use crate::sim::{self, SimConfig};

/// Check unitaries for one protected qubit, as time-ordered gate lists on `target`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckPair {
    pub target: usize,
    pub left: Vec<Gate>,
    pub right: Vec<Gate>,
}

impl CheckPair {
    /// Plain `Z` on both sides.
    pub fn z(target: usize) -> Self {
        CheckPair {
            target,
            left: vec![Gate::z(target)],
            right: vec![Gate::z(target)],
        }
    }

    pub fn left_matrix(&self) -> Result<Matrix2> {
        sequence_matrix(&self.left)
    }

    pub fn right_matrix(&self) -> Result<Matrix2> {
        sequence_matrix(&self.right)
    }

    fn validate(&self) -> Result<()> {
        for g in self.left.iter().chain(&self.right) {
            if g.qubits() != [self.target] {
                return Err(Error::validation(format!(
                    "check gate {g} does not act on the target qubit {} alone",
                    self.target
                )));
            }
        }
        Ok(())
    }
}

fn check_target(c: &Circuit, k: usize) -> Result<()> {
    if k >= c.num_qubits() {
        return Err(Error::validation(format!(
            "check qubit {k} out of range for {} qubits",
            c.num_qubits()
        )));
    }
    Ok(())
}

fn infeasible(c: &Circuit, k: usize, index: usize) -> Error {
    Error::CheckInfeasible {
        qubit: k,
        gate_index: index,
        gate: c.gates()[index].to_string(),
    }
}

/// `Z_k / Z_k` pair; fails unless `Z_k` commutes with the whole circuit.
pub fn build_z_check(c: &Circuit, k: usize) -> Result<CheckPair> {
    check_target(c, k)?;
    let blocker = first_z_blocker(c, k);
    let Some(index) = blocker else {
        return Ok(CheckPair::z(k));
    };
    if c.num_qubits() <= SimConfig::default().dense_limit
        && pauli_commutes_with_circuit(&PauliString::single(c.num_qubits(), k, PauliLetter::Z), c)?
    {
        return Ok(CheckPair::z(k));
    }
    Err(infeasible(c, k, index))
}

/// `Z` check moved through the single-qubit gates that open and close qubit `k`.
///
/// With `L` the gates on `k` before its first multi-qubit gate and `R` those after
/// its last one, the pair is `C1 = L^dag Z L`, `C2 = R Z R^dag`. The rest of the
/// circuit must commute with `Z_k`.
pub fn build_framed_z_check(c: &Circuit, k: usize) -> Result<CheckPair> {
    check_target(c, k)?;
    let on_k: Vec<usize> = (0..c.gates().len()).filter(|&i| c.gates()[i].acts_on(k)).collect();
    let multi: Vec<usize> = on_k
        .iter()
        .copied()
        .filter(|&i| c.gates()[i].qubits().len() > 1)
        .collect();
    let (leading, trailing): (Vec<usize>, Vec<usize>) = match (multi.first(), multi.last()) {
        (Some(&a), Some(&b)) => (
            on_k.iter().copied().filter(|&i| i < a).collect(),
            on_k.iter().copied().filter(|&i| i > b).collect(),
        ),
        _ => (on_k.clone(), Vec::new()),
    };
    let framed: Vec<usize> = leading.iter().chain(&trailing).copied().collect();
    let middle_index: Vec<usize> = (0..c.gates().len()).filter(|i| !framed.contains(i)).collect();
    let mut middle = Circuit::new(c.num_qubits());
    middle.extend(middle_index.iter().map(|&i| c.gates()[i].clone()))?;
    if let Some(local) = first_z_blocker(&middle, k) {
        let commutes = c.num_qubits() <= SimConfig::default().dense_limit
            && pauli_commutes_with_circuit(&PauliString::single(c.num_qubits(), k, PauliLetter::Z), &middle)?;
        if !commutes {
            return Err(infeasible(c, k, middle_index[local]));
        }
    }
    let l: Vec<Gate> = leading.iter().map(|&i| c.gates()[i].clone()).collect();
    let r: Vec<Gate> = trailing.iter().map(|&i| c.gates()[i].clone()).collect();
    let inverse = |gs: &[Gate]| gs.iter().rev().map(Gate::inverse).collect::<Vec<_>>();
    let mut left = l.clone();
    left.push(Gate::z(k));
    left.extend(inverse(&l));
    let mut right = inverse(&r);
    right.push(Gate::z(k));
    right.extend(r);
    Ok(CheckPair { target: k, left, right })
}

/// `max |C2 U C1 - U| < 1e-10` up to a global phase.
pub fn verify_check_condition(c: &Circuit, pair: &CheckPair) -> Result<bool> {
    check_target(c, pair.target)?;
    pair.validate()?;
    let u = sim::unitary(c)?;
    let mut w = sim::DenseUnitary::identity(c.num_qubits());
    for g in pair.left.iter().chain(c.gates()).chain(&pair.right) {
        w.left_apply(g);
    }
    Ok(w.max_diff_up_to_phase(&u) < 1e-10)
}

/// `U` wrapped in check pairs with one ancilla per pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichCircuit {
    pub circuit: Circuit,
    pub pairs: Vec<CheckPair>,
    /// Ancilla qubit per pair.
    pub ancillas: Vec<usize>,
    /// Positions of the ancillas among the measured bits.
    pub ancilla_bits: Vec<usize>,
    /// Positions of the original measured qubits among the measured bits.
    pub compute_bits: Vec<usize>,
    /// Gate index of each pair's controlled left check.
    pub left_gate: Vec<usize>,
    /// Gate index of each pair's controlled right check.
    pub right_gate: Vec<usize>,
    /// Gate range holding `U`.
    pub body: Range<usize>,
}

fn is_exact_z(m: &Matrix2) -> bool {
    let z = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
    ];
    (0..2).all(|r| (0..2).all(|c| (m[r][c] - z[r][c]).norm() < 1e-12))
}

fn controlled(ancilla: usize, target: usize, m: &Matrix2) -> Gate {
    if is_exact_z(m) {
        Gate::cz(ancilla, target)
    } else {
        Gate::cu(ancilla, target, u_params_from_matrix(m))
    }
}

/// `H(a) C2^(n)..C2^(1) U C1^(1)..C1^(n) H(a)`, ancillas appended after the compute qubits.
pub fn wrap(c: &Circuit, pairs: &[CheckPair]) -> Result<SandwichCircuit> {
    for p in pairs {
        if !verify_check_condition(c, p)? {
            return Err(Error::validation(format!(
                "check pair on qubit {} does not satisfy C2 U C1 = U",
                p.target
            )));
        }
    }
    let n = c.num_qubits();
    let m = pairs.len();
    let ancillas: Vec<usize> = (n..n + m).collect();
    let mut preparations = c.preparations().to_vec();
    preparations.resize(n + m, Preparation::Zero);
    let mut gates: Vec<Gate> = ancillas.iter().map(|&a| Gate::h(a)).collect();
    let mut left_gate = vec![0; m];
    let mut right_gate = vec![0; m];
    for i in (0..m).rev() {
        left_gate[i] = gates.len();
        gates.push(controlled(ancillas[i], pairs[i].target, &pairs[i].left_matrix()?));
    }
    let body_start = gates.len();
    gates.extend(c.gates().iter().cloned());
    let body = body_start..gates.len();
    for i in 0..m {
        right_gate[i] = gates.len();
        gates.push(controlled(ancillas[i], pairs[i].target, &pairs[i].right_matrix()?));
    }
    gates.extend(ancillas.iter().map(|&a| Gate::h(a)));
    let mut measured = c.measured_qubits().to_vec();
    measured.extend(&ancillas);
    let k = c.measured_qubits().len();
    Ok(SandwichCircuit {
        circuit: Circuit::from_parts(n + m, gates, measured, preparations)?,
        pairs: pairs.to_vec(),
        ancillas,
        ancilla_bits: (k..k + m).collect(),
        compute_bits: (0..k).collect(),
        left_gate,
        right_gate,
        body,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostSelectionResult {
    pub distribution: Distribution,
    /// Signed weight with every ancilla at 0, before clipping and renormalization.
    pub retained_fraction: f64,
    /// Negative mass removed before renormalization.
    pub clipped_mass: f64,
}

/// Keep outcomes with all `ancilla_bits` at 0, drop those bits, clip and renormalize.
pub fn post_select(d: &Distribution, ancilla_bits: &[usize]) -> Result<PostSelectionResult> {
    let nb = d.num_bits();
    let mut mask = 0u64;
    for &b in ancilla_bits {
        if b >= nb {
            return Err(Error::validation(format!("ancilla bit {b} out of range for {nb} bits")));
        }
        if mask >> b & 1 == 1 {
            return Err(Error::validation(format!("ancilla bit {b} listed twice")));
        }
        mask |= 1 << b;
    }
    let keep: Vec<usize> = (0..nb).filter(|b| mask >> b & 1 == 0).collect();
    let mut restricted: BTreeMap<u64, f64> = BTreeMap::new();
    let mut retained = 0.0;
    for (key, w) in d.iter().filter(|(key, _)| key & mask == 0) {
        retained += w;
        *restricted.entry(gather_bits(key, &keep)).or_insert(0.0) += w;
    }
    let clipped_mass: f64 = restricted.values().filter(|&&w| w < 0.0).map(|w| -w).sum();
    restricted.retain(|_, w| *w > 0.0);
    let positive: f64 = restricted.values().sum();
    if positive <= 0.0 {
        return Err(Error::EmptyPostSelection);
    }
    for w in restricted.values_mut() {
        *w /= positive;
    }
    let mut distribution =
        Distribution::probability(keep.len(), restricted)?.with_clipped_mass(d.clipped_mass() + clipped_mass);
    if let Some(s) = d.shots() {
        distribution = distribution.with_shots(s);
    }
    Ok(PostSelectionResult {
        distribution,
        retained_fraction: retained,
        clipped_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::DistributionKind;

    fn circuit(text: &str) -> Circuit {
        Circuit::parse(text).unwrap()
    }

    #[test]
    fn z_check_on_ansatz_qubit() {
        let c = circuit("qubits 2\nRZ(0.3) q0\nCZ q0,q1\nRZ(1.1) q0\nmeasure all");
        let p = build_z_check(&c, 0).unwrap();
        assert!(verify_check_condition(&c, &p).unwrap());
    }

    #[test]
    fn z_check_rejects_hadamard() {
        let c = circuit("qubits 1\nH q0\nmeasure all");
        match build_z_check(&c, 0) {
            Err(Error::CheckInfeasible { gate_index, .. }) => assert_eq!(gate_index, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn z_check_accepts_commuting_composite() {
        let c = circuit("qubits 1\nH q0\nH q0\nmeasure all");
        assert!(build_z_check(&c, 0).is_ok());
        assert!(build_z_check(&Circuit::new(1), 0).is_ok());
    }

    #[test]
    fn framed_check_on_rotated_circuit() {
        let c = circuit("qubits 2\nX q0\nRY(0.4) q0\nRZ(0.2) q1\nCZ q0,q1\nRY(1.3) q0\nH q0\nmeasure all");
        assert!(build_z_check(&c, 0).is_err());
        let p = build_framed_z_check(&c, 0).unwrap();
        assert!(verify_check_condition(&c, &p).unwrap());
        let s = wrap(&c, &[p]).unwrap();
        let d = sim::exact_distribution(&s.circuit, None).unwrap();
        let r = post_select(&d, &s.ancilla_bits).unwrap();
        assert!((r.retained_fraction - 1.0).abs() < 1e-9);
    }

    #[test]
    fn framed_check_rejects_non_commuting_middle() {
        let c = circuit("qubits 2\nCZ q0,q1\nH q0\nCZ q0,q1\nmeasure all");
        assert!(matches!(
            build_framed_z_check(&c, 0),
            Err(Error::CheckInfeasible { gate_index: 1, .. })
        ));
    }

    #[test]
    fn check_condition_examples() {
        let cz = circuit("qubits 2\nCZ q0,q1\nmeasure all");
        assert!(verify_check_condition(&cz, &CheckPair::z(0)).unwrap());
        let rx = circuit("qubits 1\nRX(0.3) q0\nmeasure all");
        assert!(!verify_check_condition(&rx, &CheckPair::z(0)).unwrap());
        assert!(verify_check_condition(&Circuit::new(1), &CheckPair::z(0)).unwrap());
    }

    #[test]
    fn wrap_identity_gives_four_gates() {
        let c = Circuit::new(1).measure_all();
        let s = wrap(&c, &[CheckPair::z(0)]).unwrap();
        assert_eq!(
            s.circuit.gates(),
            &[Gate::h(1), Gate::cz(1, 0), Gate::cz(1, 0), Gate::h(1)]
        );
        assert_eq!(s.circuit.measured_qubits(), &[0, 1]);
        assert_eq!(s.ancilla_bits, vec![1]);
    }

    #[test]
    fn wrap_orders_stacked_pairs() {
        let c = circuit("qubits 2\nCZ q0,q1\nmeasure all");
        let s = wrap(&c, &[CheckPair::z(0), CheckPair::z(1)]).unwrap();
        // C1 of pair 2 first, then pair 1, body, then C2 of pair 1, pair 2.
        assert_eq!(s.left_gate, vec![3, 2]);
        assert_eq!(s.right_gate, vec![5, 6]);
        assert_eq!(s.circuit.gates()[2], Gate::cz(3, 1));
        assert_eq!(s.circuit.gates()[3], Gate::cz(2, 0));
        assert_eq!(s.body, 4..5);
    }

    #[test]
    fn post_select_examples() {
        let d =
            Distribution::from_strings(DistributionKind::Probability, [("00", 0.5), ("01", 0.3), ("10", 0.2)]).unwrap();
        let r = post_select(&d, &[1]).unwrap();
        assert!((r.retained_fraction - 0.7).abs() < 1e-12);
        assert!((r.distribution.get_str("0") - 0.5 / 0.7).abs() < 1e-12);
        assert!((r.distribution.get_str("1") - 0.2 / 0.7).abs() < 1e-12);

        let one = Distribution::from_strings(DistributionKind::Probability, [("01", 1.0)]).unwrap();
        assert!(matches!(post_select(&one, &[1]), Err(Error::EmptyPostSelection)));
    }

    #[test]
    fn post_select_clips_quasi_after_restriction() {
        let d = Distribution::from_strings(
            DistributionKind::QuasiProbability,
            [("00", 0.8), ("10", -0.05), ("01", 0.25)],
        )
        .unwrap();
        let r = post_select(&d, &[1]).unwrap();
        assert!((r.retained_fraction - 0.75).abs() < 1e-12);
        assert!((r.clipped_mass - 0.05).abs() < 1e-12);
        assert_eq!(r.distribution.get_str("0"), 1.0);
    }
}
