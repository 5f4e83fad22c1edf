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

//! Shared fixtures and independent oracles for the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{Complex, DMatrix};
use sqem::circuit::{Gate, GateKind};
use sqem::vqe::{AnsatzSpec, ParameterSet};
use sqem::{Circuit, Hamiltonian};

pub type C = Complex<f64>;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(data_dir().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

/// Every circuit document under `data/circuits`, sorted by name.
pub fn corpus() -> Vec<(String, Circuit)> {
    let mut names: Vec<String> = std::fs::read_dir(data_dir().join("circuits"))
        .expect("circuit corpus")
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".txt"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| {
            let c = Circuit::parse(&read(&format!("circuits/{n}"))).unwrap();
            (n.trim_end_matches(".txt").to_string(), c)
        })
        .collect()
}

pub const HAMILTONIANS: [&str; 4] = ["h4a", "h4b", "h4c", "h6a"];

pub fn hamiltonian(name: &str) -> Hamiltonian {
    Hamiltonian::parse(&read(&format!("hamiltonians/{name}.txt"))).unwrap()
}

pub fn ansatz(name: &str) -> Circuit {
    let spec = AnsatzSpec::from_json(&read(&format!("ansatz/{name}.json"))).unwrap();
    let params = ParameterSet::from_json(&read(&format!("params/{name}.json"))).unwrap();
    sqem::vqe::build_ansatz(&spec, &params, &spec.occupation).unwrap()
}

/// One position per wire interval on `q`: the start of the wire and right after each gate on it.
pub fn canonical_positions(c: &Circuit, q: usize) -> Vec<usize> {
    let mut out = vec![0];
    for (i, g) in c.gates().iter().enumerate() {
        if g.acts_on(q) {
            out.push(i + 1);
        }
    }
    out.dedup();
    out
}

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

/// Textbook 2x2 matrix for a single-qubit gate.
pub fn oracle_matrix1(kind: GateKind, p: &[f64]) -> [[C; 2]; 2] {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        GateKind::I => [[o, z], [z, o]],
        GateKind::X => [[z, o], [o, z]],
        GateKind::Y => [[z, -i], [i, z]],
        GateKind::Z => [[o, z], [z, -o]],
        GateKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        GateKind::S => [[o, z], [z, i]],
        GateKind::Sdg => [[o, z], [z, -i]],
        GateKind::RX => {
            let (s, co) = (p[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        GateKind::RY => {
            let (s, co) = (p[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        GateKind::RZ => [
            [C::from_polar(1.0, -p[0] / 2.0), z],
            [z, C::from_polar(1.0, p[0] / 2.0)],
        ],
        k => panic!("{k:?} is not a single-qubit gate"),
    }
}

/// Full-register matrix of one gate, basis index bit q holding qubit q.
pub fn oracle_gate(g: &Gate, n: usize) -> DMatrix<C> {
    let dim = 1usize << n;
    let mut m = DMatrix::<C>::zeros(dim, dim);
    let qs = g.qubits();
    match g.kind() {
        GateKind::CZ => {
            for b in 0..dim {
                let both = (b >> qs[0]) & 1 == 1 && (b >> qs[1]) & 1 == 1;
                m[(b, b)] = if both { c(-1.0, 0.0) } else { c(1.0, 0.0) };
            }
        }
        GateKind::CX => {
            for b in 0..dim {
                let out = if (b >> qs[0]) & 1 == 1 { b ^ (1 << qs[1]) } else { b };
                m[(out, b)] = c(1.0, 0.0);
            }
        }
        kind => {
            let u = oracle_matrix1(kind, g.params());
            let q = qs[0];
            for b in 0..dim {
                let bit = (b >> q) & 1;
                for (out_bit, row) in u.iter().enumerate() {
                    let out = (b & !(1 << q)) | (out_bit << q);
                    m[(out, b)] += row[bit];
                }
            }
        }
    }
    m
}

pub fn oracle_sequence(gates: &[Gate], n: usize) -> DMatrix<C> {
    let mut u = DMatrix::<C>::identity(1 << n, 1 << n);
    for g in gates {
        u = oracle_gate(g, n) * u;
    }
    u
}

/// `min_phi max |a - e^{i phi} b|`, with the phase taken from the overlap.
pub fn max_diff_up_to_phase(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    let overlap: C = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        c(1.0, 0.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// Dense Hamiltonian matrix for brute-force diagonalization.
pub fn hamiltonian_matrix(h: &Hamiltonian) -> DMatrix<C> {
    use sqem::PauliLetter;
    let n = h.num_qubits();
    let dim = 1usize << n;
    let mut m = DMatrix::<C>::zeros(dim, dim);
    for term in h.terms() {
        for b in 0..dim {
            let mut out = b;
            let mut amp = c(term.coefficient(), 0.0);
            for (q, l) in term.letters().iter().enumerate() {
                let bit = (b >> q) & 1;
                match l {
                    PauliLetter::I => {}
                    PauliLetter::X => out ^= 1 << q,
                    PauliLetter::Y => {
                        out ^= 1 << q;
                        amp *= if bit == 0 { c(0.0, 1.0) } else { c(0.0, -1.0) };
                    }
                    PauliLetter::Z => {
                        if bit == 1 {
                            amp = -amp;
                        }
                    }
                }
            }
            m[(out, b)] += amp;
        }
    }
    m
}
