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

//! Circuit intermediate representation and its line-oriented text format.
//!
//! ```text
//! qubits 2
//! prep q1 +
//! H q0
//! RY(0.25) q1
//! CX q0,q1
//! measure all
//! ```
//!
//! Angles are radians. `prep` lines are optional and must follow the header; the
//! `measure` line, when present, is the last statement.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix2 = [[C64; 2]; 2];
pub type Matrix4 = [[C64; 4]; 4];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    /// Identity; a no-op that still counts as a gate for noise placement.
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    RX,
    RY,
    RZ,
    CZ,
    CX,
    /// Controlled `e^{iγ} U3(θ, φ, λ)`, params `[θ, φ, λ, γ]`, control first.
    CU,
}

impl GateKind {
    pub const ALL: [GateKind; 13] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::CZ,
        GateKind::CX,
        GateKind::CU,
    ];

    pub fn num_qubits(self) -> usize {
        match self {
            GateKind::CZ | GateKind::CX | GateKind::CU => 2,
            _ => 1,
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ => 1,
            GateKind::CU => 4,
            _ => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::CZ => "CZ",
            GateKind::CX => "CX",
            GateKind::CU => "CU",
        }
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let upper = s.to_ascii_uppercase();
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == upper)
            .or(match upper.as_str() {
                "ID" => Some(GateKind::I),
                "CNOT" => Some(GateKind::CX),
                "SDAG" => Some(GateKind::Sdg),
                _ => None,
            })
            .ok_or_else(|| format!("unknown gate '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: Vec<usize>,
    params: Vec<f64>,
}

pub enum GateMatrix {
    One(Matrix2),
    Two(Matrix4),
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, params: Vec<f64>) -> Result<Self> {
        if qubits.len() != kind.num_qubits() {
            return Err(Error::validation(format!(
                "{} acts on {} qubit(s), got {}",
                kind.name(),
                kind.num_qubits(),
                qubits.len()
            )));
        }
        if params.len() != kind.num_params() {
            return Err(Error::validation(format!(
                "{} takes {} parameter(s), got {}",
                kind.name(),
                kind.num_params(),
                params.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::validation(format!(
                "{} repeats qubit {}",
                kind.name(),
                qubits[0]
            )));
        }
        if let Some(p) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::validation(format!("{} has non-finite angle {p}", kind.name())));
        }
        Ok(Gate { kind, qubits, params })
    }

    fn fixed(kind: GateKind, qubits: Vec<usize>, params: Vec<f64>) -> Self {
        Gate::new(kind, qubits, params).expect("well-formed gate")
    }

    pub fn id(q: usize) -> Self {
        Gate::fixed(GateKind::I, vec![q], vec![])
    }
    pub fn x(q: usize) -> Self {
        Gate::fixed(GateKind::X, vec![q], vec![])
    }
    pub fn y(q: usize) -> Self {
        Gate::fixed(GateKind::Y, vec![q], vec![])
    }
    pub fn z(q: usize) -> Self {
        Gate::fixed(GateKind::Z, vec![q], vec![])
    }
    pub fn h(q: usize) -> Self {
        Gate::fixed(GateKind::H, vec![q], vec![])
    }
    pub fn s(q: usize) -> Self {
        Gate::fixed(GateKind::S, vec![q], vec![])
    }
    pub fn sdg(q: usize) -> Self {
        Gate::fixed(GateKind::Sdg, vec![q], vec![])
    }
    pub fn rx(q: usize, theta: f64) -> Self {
        Gate::fixed(GateKind::RX, vec![q], vec![theta])
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Gate::fixed(GateKind::RY, vec![q], vec![theta])
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Gate::fixed(GateKind::RZ, vec![q], vec![theta])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Gate::fixed(GateKind::CZ, vec![a, b], vec![])
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Gate::fixed(GateKind::CX, vec![control, target], vec![])
    }
    pub fn cu(control: usize, target: usize, params: [f64; 4]) -> Self {
        Gate::fixed(GateKind::CU, vec![control, target], params.to_vec())
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn acts_on(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }

    /// Same gate acting on relabelled qubits.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate {
            kind: self.kind,
            qubits: self.qubits.iter().map(|&q| map(q)).collect(),
            params: self.params.clone(),
        }
    }

    /// Inverse of a single-qubit gate. Two-qubit gates other than CU are self-inverse.
    pub fn inverse(&self) -> Gate {
        let (kind, params) = match self.kind {
            GateKind::S => (GateKind::Sdg, vec![]),
            GateKind::Sdg => (GateKind::S, vec![]),
            GateKind::RX | GateKind::RY | GateKind::RZ => (self.kind, vec![-self.params[0]]),
            GateKind::CU => {
                let m = adjoint2(&single_qubit_matrix(GateKind::CU, &self.params));
                (GateKind::CU, u_params_from_matrix(&m).to_vec())
            }
            k => (k, vec![]),
        };
        Gate {
            kind,
            qubits: self.qubits.clone(),
            params,
        }
    }

    /// Matrix in the computational basis. For two-qubit gates the local index is
    /// `2 * bit(qubits[0]) + bit(qubits[1])`.
    pub fn matrix(&self) -> GateMatrix {
        match self.kind {
            GateKind::CZ => {
                let mut m = identity4();
                m[3][3] = -ONE;
                GateMatrix::Two(m)
            }
            GateKind::CX => {
                let mut m = identity4();
                m[2][2] = ZERO;
                m[3][3] = ZERO;
                m[2][3] = ONE;
                m[3][2] = ONE;
                GateMatrix::Two(m)
            }
            GateKind::CU => {
                let u = single_qubit_matrix(GateKind::CU, &self.params);
                let mut m = identity4();
                for r in 0..2 {
                    for c in 0..2 {
                        m[2 + r][2 + c] = u[r][c];
                    }
                }
                GateMatrix::Two(m)
            }
            k => GateMatrix::One(single_qubit_matrix(k, &self.params)),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", ps.join(","))?;
        }
        let qs: Vec<String> = self.qubits.iter().map(|q| format!("q{q}")).collect();
        write!(f, " {}", qs.join(","))
    }
}

fn identity4() -> Matrix4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

/// 2x2 matrix of a single-qubit kind; for `CU` this is the controlled block.
fn single_qubit_matrix(kind: GateKind, params: &[f64]) -> Matrix2 {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        GateKind::I => [[ONE, ZERO], [ZERO, ONE]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::H => [
            [C64::new(s2, 0.0), C64::new(s2, 0.0)],
            [C64::new(s2, 0.0), C64::new(-s2, 0.0)],
        ],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
        GateKind::RX => {
            let (s, c) = (params[0] / 2.0).sin_cos();
            [
                [C64::new(c, 0.0), C64::new(0.0, -s)],
                [C64::new(0.0, -s), C64::new(c, 0.0)],
            ]
        }
        GateKind::RY => {
            let (s, c) = (params[0] / 2.0).sin_cos();
            [
                [C64::new(c, 0.0), C64::new(-s, 0.0)],
                [C64::new(s, 0.0), C64::new(c, 0.0)],
            ]
        }
        GateKind::RZ => {
            let h = params[0] / 2.0;
            [[C64::from_polar(1.0, -h), ZERO], [ZERO, C64::from_polar(1.0, h)]]
        }
        GateKind::CU => {
            let (theta, phi, lambda, gamma) = (params[0], params[1], params[2], params[3]);
            let (s, c) = (theta / 2.0).sin_cos();
            let g = C64::from_polar(1.0, gamma);
            [
                [g * c, -g * C64::from_polar(s, lambda)],
                [g * C64::from_polar(s, phi), g * C64::from_polar(c, phi + lambda)],
            ]
        }
        GateKind::CZ | GateKind::CX => unreachable!("two-qubit kind has no 2x2 matrix"),
    }
}

pub fn matmul2(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn adjoint2(a: &Matrix2) -> Matrix2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Product of a time-ordered list of single-qubit gates (the first gate acts first).
pub fn sequence_matrix(gates: &[Gate]) -> Result<Matrix2> {
    let mut acc = single_qubit_matrix(GateKind::I, &[]);
    for g in gates {
        match g.matrix() {
            GateMatrix::One(m) => acc = matmul2(&m, &acc),
            GateMatrix::Two(_) => return Err(Error::validation(format!("expected a single-qubit gate, found {g}"))),
        }
    }
    Ok(acc)
}

/// Decompose a 2x2 unitary into `[θ, φ, λ, γ]` with `U = e^{iγ} U3(θ, φ, λ)`.
pub fn u_params_from_matrix(m: &Matrix2) -> [f64; 4] {
    let c = m[0][0].norm();
    let s = m[1][0].norm();
    let theta = 2.0 * s.atan2(c);
    const EPS: f64 = 1e-12;
    if s < EPS {
        let gamma = m[0][0].arg();
        [theta, 0.0, m[1][1].arg() - gamma, gamma]
    } else if c < EPS {
        let gamma = (-m[0][1]).arg();
        [theta, m[1][0].arg() - gamma, 0.0, gamma]
    } else {
        let gamma = m[0][0].arg();
        [theta, m[1][0].arg() - gamma, (-m[0][1]).arg() - gamma, gamma]
    }
}

/// Pure single-qubit preparation applied to a wire before any gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Preparation {
    #[default]
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl Preparation {
    pub const ALL: [Preparation; 6] = [
        Preparation::Zero,
        Preparation::One,
        Preparation::Plus,
        Preparation::Minus,
        Preparation::PlusI,
        Preparation::MinusI,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Preparation::Zero => "0",
            Preparation::One => "1",
            Preparation::Plus => "+",
            Preparation::Minus => "-",
            Preparation::PlusI => "+i",
            Preparation::MinusI => "-i",
        }
    }

    pub fn amplitudes(self) -> [C64; 2] {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let r = C64::new(s2, 0.0);
        match self {
            Preparation::Zero => [ONE, ZERO],
            Preparation::One => [ZERO, ONE],
            Preparation::Plus => [r, r],
            Preparation::Minus => [r, -r],
            Preparation::PlusI => [r, C64::new(0.0, s2)],
            Preparation::MinusI => [r, C64::new(0.0, -s2)],
        }
    }
}

impl FromStr for Preparation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Preparation::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| format!("unknown preparation '{s}' (expected 0, 1, +, -, +i, -i)"))
    }
}

/// Ordered gate list over indexed qubits with terminal Z-basis measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    measured: Vec<usize>,
    preparations: Vec<Preparation>,
}

impl Circuit {
    /// Empty circuit with nothing measured and every wire in |0>.
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
            measured: Vec::new(),
            preparations: vec![Preparation::Zero; num_qubits],
        }
    }

    pub fn from_parts(
        num_qubits: usize,
        gates: Vec<Gate>,
        measured: Vec<usize>,
        preparations: Vec<Preparation>,
    ) -> Result<Self> {
        if preparations.len() != num_qubits {
            return Err(Error::validation(format!(
                "{} preparations for {num_qubits} qubits",
                preparations.len()
            )));
        }
        let mut c = Circuit {
            num_qubits,
            gates: Vec::with_capacity(gates.len()),
            measured: Vec::new(),
            preparations,
        };
        for g in gates {
            c.push(g)?;
        }
        c.set_measured(measured)?;
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn measured_qubits(&self) -> &[usize] {
        &self.measured
    }

    pub fn preparations(&self) -> &[Preparation] {
        &self.preparations
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(&q) = gate.qubits().iter().find(|&&q| q >= self.num_qubits) {
            return Err(Error::validation(format!(
                "gate {gate} uses qubit {q} but the circuit has {} qubits",
                self.num_qubits
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn with_gate(mut self, gate: Gate) -> Result<Self> {
        self.push(gate)?;
        Ok(self)
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn set_measured(&mut self, measured: Vec<usize>) -> Result<()> {
        let mut seen = vec![false; self.num_qubits];
        for &q in &measured {
            if q >= self.num_qubits {
                return Err(Error::validation(format!(
                    "measured qubit {q} out of range for {} qubits",
                    self.num_qubits
                )));
            }
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::validation(format!("qubit {q} measured twice")));
            }
        }
        self.measured = measured;
        Ok(())
    }

    pub fn measure_all(mut self) -> Self {
        self.measured = (0..self.num_qubits).collect();
        self
    }

    pub fn set_preparation(&mut self, q: usize, prep: Preparation) -> Result<()> {
        let n = self.num_qubits;
        let slot = self
            .preparations
            .get_mut(q)
            .ok_or_else(|| Error::validation(format!("preparation qubit {q} out of range for {n} qubits")))?;
        *slot = prep;
        Ok(())
    }

    /// Parse the text document format described in the module docs.
    pub fn parse(text: &str) -> Result<Self> {
        let mut circuit: Option<Circuit> = None;
        let mut measured_seen = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| Error::Parse { line: line_no, message };
            let Some(c) = circuit.as_mut() else {
                let mut it = line.split_whitespace();
                match (it.next(), it.next(), it.next()) {
                    (Some("qubits"), Some(n), None) => {
                        let n: usize = n
                            .parse()
                            .map_err(|_| perr(format!("qubit count '{n}' is not an integer")))?;
                        if n == 0 {
                            return Err(perr("qubit count must be positive".into()));
                        }
                        circuit = Some(Circuit::new(n));
                        continue;
                    }
                    _ => return Err(perr(format!("expected header 'qubits N', found '{line}'"))),
                }
            };
            if measured_seen {
                return Err(perr("statements after the measure line".into()));
            }
            let lower = line.to_ascii_lowercase();
            if lower == "measure all" {
                *c = std::mem::replace(c, Circuit::new(0)).measure_all();
                measured_seen = true;
            } else if let Some(rest) = lower.strip_prefix("measure ") {
                let qs = parse_qubit_list(rest).map_err(perr)?;
                c.set_measured(qs).map_err(|e| relocate(e, line_no))?;
                measured_seen = true;
            } else if let Some(rest) = line.strip_prefix("prep ") {
                if !c.gates.is_empty() {
                    return Err(perr("prep lines must precede all gates".into()));
                }
                let mut it = rest.split_whitespace();
                let (Some(q), Some(label), None) = (it.next(), it.next(), it.next()) else {
                    return Err(perr(format!("expected 'prep q<i> <state>', found '{line}'")));
                };
                let q = parse_qubit(q).map_err(perr)?;
                let p: Preparation = label.parse().map_err(perr)?;
                c.set_preparation(q, p).map_err(|e| relocate(e, line_no))?;
            } else {
                let gate = parse_gate(line).map_err(perr)?;
                c.push(gate).map_err(|e| relocate(e, line_no))?;
            }
        }
        circuit.ok_or(Error::Parse {
            line: 0,
            message: "missing 'qubits N' header".into(),
        })
    }

    /// Serialize to the text document format.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

// Circuits serialize as their text document, gate kinds as their names.
impl serde::Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl<'de> serde::Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Circuit::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl serde::Serialize for GateKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> serde::Deserialize<'de> for GateKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.num_qubits)?;
        for (q, p) in self.preparations.iter().enumerate() {
            if *p != Preparation::Zero {
                writeln!(f, "prep q{q} {}", p.label())?;
            }
        }
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        if self.measured.is_empty() {
            return Ok(());
        }
        if self.measured.iter().copied().eq(0..self.num_qubits) {
            writeln!(f, "measure all")
        } else {
            let qs: Vec<String> = self.measured.iter().map(|q| format!("q{q}")).collect();
            writeln!(f, "measure {}", qs.join(","))
        }
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Circuit::parse(s)
    }
}

// Validation errors raised while parsing carry the offending line.
fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Validation(message) => Error::Parse { line, message },
        other => other,
    }
}

fn parse_qubit(tok: &str) -> std::result::Result<usize, String> {
    let tok = tok.trim();
    tok.strip_prefix('q')
        .or_else(|| tok.strip_prefix('Q'))
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| format!("bad qubit reference '{tok}'"))
}

fn parse_qubit_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',').map(parse_qubit).collect()
}

fn parse_gate(line: &str) -> std::result::Result<Gate, String> {
    let (name, params, rest) = match line.find('(') {
        Some(open) => {
            let close = line[open..]
                .find(')')
                .map(|i| open + i)
                .ok_or_else(|| "unclosed parameter list".to_string())?;
            let params = line[open + 1..close]
                .split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| format!("bad angle '{}'", a.trim())))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            (line[..open].trim(), params, &line[close + 1..])
        }
        None => {
            let name = line.split_whitespace().next().unwrap_or("");
            (name, Vec::new(), &line[name.len()..])
        }
    };
    let kind: GateKind = name.parse()?;
    let rest = rest.trim();
    if rest.is_empty() {
        return Err(format!("{} has no qubit operands", kind.name()));
    }
    let qubits = parse_qubit_list(&rest.replace(' ', ""))?;
    Gate::new(kind, qubits, params).map_err(|e| match e {
        Error::Validation(m) => m,
        other => other.to_string(),
    })
}
