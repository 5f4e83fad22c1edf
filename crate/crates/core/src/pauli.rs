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

//! Pauli strings and weighted Pauli-sum Hamiltonians.
//!
//! Letter `k` of a string acts on qubit `k`. Hamiltonian documents hold one term
//! per line, `<coefficient> <letters>`, e.g. `-0.8105 ZIII`; repeated letter strings
//! are merged on ingest.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::sim;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn gate(self, q: usize) -> Gate {
        match self {
            PauliLetter::I => Gate::id(q),
            PauliLetter::X => Gate::x(q),
            PauliLetter::Y => Gate::y(q),
            PauliLetter::Z => Gate::z(q),
        }
    }

    /// Gates rotating this letter's eigenbasis onto the computational basis.
    pub fn basis_change(self, q: usize) -> Vec<Gate> {
        match self {
            PauliLetter::X => vec![Gate::h(q)],
            PauliLetter::Y => vec![Gate::sdg(q), Gate::h(q)],
            PauliLetter::I | PauliLetter::Z => vec![],
        }
    }
}

/// Weighted tensor product of single-qubit Paulis.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    letters: Vec<PauliLetter>,
    coefficient: f64,
}

impl PauliString {
    pub fn new(letters: Vec<PauliLetter>, coefficient: f64) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::validation(format!("non-finite coefficient {coefficient}")));
        }
        Ok(PauliString { letters, coefficient })
    }

    /// Unit-weight string parsed from letters like `"ZIX"`.
    pub fn from_letters(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| PauliLetter::from_char(c).ok_or_else(|| Error::validation(format!("'{c}' is not a Pauli letter"))))
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters, 1.0)
    }

    /// Single-letter string on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, letter: PauliLetter) -> Self {
        let mut letters = vec![PauliLetter::I; n];
        letters[q] = letter;
        PauliString {
            letters,
            coefficient: 1.0,
        }
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&l| l == PauliLetter::I)
    }

    pub fn label(&self) -> String {
        self.letters.iter().map(|l| l.as_char()).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        PauliString {
            letters: self.letters.clone(),
            coefficient: self.coefficient * factor,
        }
    }

    /// Bit mask of qubits carrying a non-identity letter.
    pub fn support_mask(&self) -> u64 {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, l)| **l != PauliLetter::I)
            .fold(0, |m, (q, _)| m | (1 << q))
    }

    /// Whether two strings commute qubit by qubit (each position equal or identity).
    pub fn qubitwise_commutes(&self, other: &PauliString) -> bool {
        self.letters
            .iter()
            .zip(&other.letters)
            .all(|(a, b)| *a == PauliLetter::I || *b == PauliLetter::I || a == b)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.coefficient, self.label())
    }
}

/// Test whether `p` commutes with the unitary of `c`, i.e. `max |PU - UP| < 1e-10`.
///
/// Builds the dense unitary, so the circuit must fit the dense simulation limit.
pub fn pauli_commutes_with_circuit(p: &PauliString, c: &Circuit) -> Result<bool> {
    if p.len() != c.num_qubits() {
        return Err(Error::validation(format!(
            "Pauli string has length {}, circuit has {} qubits",
            p.len(),
            c.num_qubits()
        )));
    }
    let u = sim::unitary(c)?;
    let mut pu = u.clone();
    let mut up = u.clone();
    for (q, &l) in p.letters.iter().enumerate() {
        if l != PauliLetter::I {
            pu.left_apply(&l.gate(q));
            up.right_apply(&l.gate(q));
        }
    }
    Ok(pu.max_abs_diff(&up) < 1e-10)
}

/// First gate of `c` that does not commute with `Z` on qubit `q`, judged on the gate alone.
pub(crate) fn first_z_blocker(c: &Circuit, q: usize) -> Option<usize> {
    c.gates().iter().position(|g| {
        if !g.acts_on(q) {
            return false;
        }
        match g.kind() {
            GateKind::I | GateKind::Z | GateKind::S | GateKind::Sdg | GateKind::RZ | GateKind::CZ => false,
            GateKind::CX | GateKind::CU if g.qubits()[0] == q => false,
            _ => {
                // Fall back to a dense check on the gate's own support.
                let local = g.remapped(|x| usize::from(x != q));
                let mut sub = Circuit::new(g.qubits().len().max(2));
                sub.push(local).expect("remapped gate fits");
                let z = PauliString::single(sub.num_qubits(), 0, PauliLetter::Z);
                !pauli_commutes_with_circuit(&z, &sub).unwrap_or(false)
            }
        }
    })
}

/// Weighted sum of Pauli strings over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    num_qubits: usize,
    terms: Vec<PauliString>,
}

impl Hamiltonian {
    /// Build from terms, merging repeated letter strings (first occurrence keeps its slot).
    pub fn new(num_qubits: usize, terms: Vec<PauliString>) -> Result<Self> {
        let mut merged: Vec<PauliString> = Vec::new();
        let mut slot: BTreeMap<Vec<PauliLetter>, usize> = BTreeMap::new();
        for t in terms {
            if t.len() != num_qubits {
                return Err(Error::validation(format!(
                    "term {} has length {}, expected {num_qubits}",
                    t.label(),
                    t.len()
                )));
            }
            match slot.get(&t.letters) {
                Some(&i) => merged[i].coefficient += t.coefficient,
                None => {
                    slot.insert(t.letters.clone(), merged.len());
                    merged.push(t);
                }
            }
        }
        Ok(Hamiltonian {
            num_qubits,
            terms: merged,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Hamiltonian {
            num_qubits: self.num_qubits,
            terms: self.terms.iter().map(|t| t.scaled(factor)).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut width = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| Error::Parse { line: idx + 1, message };
            let mut it = line.split_whitespace();
            let (Some(coef), Some(letters), None) = (it.next(), it.next(), it.next()) else {
                return Err(perr(format!("expected '<coefficient> <letters>', found '{line}'")));
            };
            let coef: f64 = coef.parse().map_err(|_| perr(format!("bad coefficient '{coef}'")))?;
            let term = PauliString::from_letters(letters)
                .and_then(|t| PauliString::new(t.letters, coef))
                .map_err(|e| perr(e.to_string()))?;
            match width {
                None => width = Some(term.len()),
                Some(w) if w != term.len() => return Err(perr(format!("term length {} differs from {w}", term.len()))),
                _ => {}
            }
            terms.push(term);
        }
        let n = width.ok_or(Error::Parse {
            line: 0,
            message: "Hamiltonian has no terms".into(),
        })?;
        Hamiltonian::new(n, terms)
    }

    pub fn to_text(&self) -> String {
        self.terms.iter().map(|t| format!("{t}\n")).collect()
    }
}

impl FromStr for Hamiltonian {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Hamiltonian::parse(s)
    }
}
