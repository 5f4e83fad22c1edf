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

//! Dense linear-algebra kernels shared by the statevector, density-matrix and
//! unitary representations. Qubit `q` is bit `q` of a basis-state index.

use crate::circuit::{Gate, GateMatrix, Matrix2, Matrix4, Preparation, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

pub(crate) fn apply_1q(v: &mut [C64], bit: usize, m: &Matrix2) {
    let stride = 1usize << bit;
    let mut base = 0;
    while base < v.len() {
        for i in base..base + stride {
            let (a, b) = (v[i], v[i + stride]);
            v[i] = m[0][0] * a + m[0][1] * b;
            v[i + stride] = m[1][0] * a + m[1][1] * b;
        }
        base += stride << 1;
    }
}

/// Local index of `m` is `2 * bit(first) + bit(second)`.
pub(crate) fn apply_2q(v: &mut [C64], first: usize, second: usize, m: &Matrix4) {
    let (fm, sm) = (1usize << first, 1usize << second);
    for i in 0..v.len() {
        if i & (fm | sm) != 0 {
            continue;
        }
        let idx = [i, i | sm, i | fm, i | fm | sm];
        let old = [v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]];
        for (r, &slot) in idx.iter().enumerate() {
            v[slot] = m[r][0] * old[0] + m[r][1] * old[1] + m[r][2] * old[2] + m[r][3] * old[3];
        }
    }
}

fn conj2(m: &Matrix2) -> Matrix2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

fn conj4(m: &Matrix4) -> Matrix4 {
    let mut out = *m;
    out.iter_mut().flatten().for_each(|x| *x = x.conj());
    out
}

fn transpose2(m: &Matrix2) -> Matrix2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

fn transpose4(m: &Matrix4) -> Matrix4 {
    let mut out = *m;
    for (r, row) in m.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            out[c][r] = x;
        }
    }
    out
}

/// Apply `gate` to the qubits of a vector whose qubit `q` lives at bit `q + offset`.
fn apply_gate_at(v: &mut [C64], gate: &Gate, offset: usize, conj: bool, transpose: bool) {
    let qs = gate.qubits();
    match gate.matrix() {
        GateMatrix::One(mut m) => {
            if conj {
                m = conj2(&m);
            }
            if transpose {
                m = transpose2(&m);
            }
            apply_1q(v, qs[0] + offset, &m)
        }
        GateMatrix::Two(mut m) => {
            if conj {
                m = conj4(&m);
            }
            if transpose {
                m = transpose4(&m);
            }
            apply_2q(v, qs[0] + offset, qs[1] + offset, &m)
        }
    }
}

fn product_state(preps: &[Preparation]) -> Vec<C64> {
    let mut amps = vec![C64::new(1.0, 0.0)];
    for (q, p) in preps.iter().enumerate() {
        let a = p.amplitudes();
        let mut next = vec![ZERO; amps.len() << 1];
        for (i, &x) in amps.iter().enumerate() {
            next[i] = x * a[0];
            next[i | 1 << q] = x * a[1];
        }
        amps = next;
    }
    amps
}

#[derive(Debug, Clone)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn product(preps: &[Preparation]) -> Self {
        StateVector {
            num_qubits: preps.len(),
            amps: product_state(preps),
        }
    }

    pub fn apply(&mut self, gate: &Gate) {
        apply_gate_at(&mut self.amps, gate, 0, false, false);
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Row-major `2^n x 2^n` density matrix; row qubit `q` is bit `q + n` of the flat
/// index and column qubit `q` is bit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn product(preps: &[Preparation]) -> Self {
        DensityMatrix::from_pure(&StateVector::product(preps))
    }

    pub fn from_pure(sv: &StateVector) -> Self {
        let dim = sv.amps.len();
        let mut data = vec![ZERO; dim * dim];
        for (r, a) in sv.amps.iter().enumerate() {
            for (c, b) in sv.amps.iter().enumerate() {
                data[r * dim + c] = a * b.conj();
            }
        }
        DensityMatrix {
            num_qubits: sv.num_qubits,
            data,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// `ρ -> U ρ U†`.
    pub fn apply(&mut self, gate: &Gate) {
        let n = self.num_qubits;
        apply_gate_at(&mut self.data, gate, n, false, false);
        apply_gate_at(&mut self.data, gate, 0, true, false);
    }

    /// `ρ -> (1 - λ) ρ + λ (I/d ⊗ Tr_Q ρ)` over the qubit set `qs`, `d = 2^|Q|`.
    pub(crate) fn partial_replace(&mut self, qs: &[usize], lambda: f64) {
        let n = self.num_qubits;
        let local = qs.len();
        let d = 1usize << local;
        let spread =
            |x: usize, shift: usize| -> usize { (0..local).fold(0, |acc, i| acc | ((x >> i) & 1) << (qs[i] + shift)) };
        let mask = spread(d - 1, 0) | spread(d - 1, n);
        let keep = 1.0 - lambda;
        for base in 0..self.data.len() {
            if base & mask != 0 {
                continue;
            }
            let mut sigma = ZERO;
            for x in 0..d {
                sigma += self.data[base | spread(x, n) | spread(x, 0)];
            }
            for xr in 0..d {
                for xc in 0..d {
                    let i = base | spread(xr, n) | spread(xc, 0);
                    self.data[i] *= keep;
                    if xr == xc {
                        self.data[i] += sigma * (lambda / d as f64);
                    }
                }
            }
        }
    }

    /// Single-qubit Pauli channel `ρ -> (1-px-py-pz) ρ + px XρX + py YρY + pz ZρZ`.
    pub(crate) fn pauli_channel(&mut self, q: usize, px: f64, py: f64, pz: f64) {
        let n = self.num_qubits;
        let (rb, cb) = (1usize << (q + n), 1usize << q);
        let diag_keep = 1.0 - px - py;
        let diag_swap = px + py;
        let off_keep = 1.0 - px - py - 2.0 * pz;
        let off_swap = px - py;
        for base in 0..self.data.len() {
            if base & (rb | cb) != 0 {
                continue;
            }
            let (i00, i01, i10, i11) = (base, base | cb, base | rb, base | rb | cb);
            let (a00, a01, a10, a11) = (self.data[i00], self.data[i01], self.data[i10], self.data[i11]);
            self.data[i00] = a00 * diag_keep + a11 * diag_swap;
            self.data[i11] = a11 * diag_keep + a00 * diag_swap;
            self.data[i01] = a01 * off_keep + a10 * off_swap;
            self.data[i10] = a10 * off_keep + a01 * off_swap;
        }
    }

    /// `Σ_{y} phase(y) ρ[y, y ⊕ flip]`, i.e. `tr(P ρ)` for a Pauli given by its
    /// flip mask and per-basis-state phase.
    pub(crate) fn pauli_trace(&self, flip: usize, phase: impl Fn(usize) -> C64) -> C64 {
        (0..self.dim()).map(|y| phase(y) * self.get(y, y ^ flip)).sum()
    }
}

/// Dense unitary of a circuit, row-major with the same bit layout as [`DensityMatrix`].
#[derive(Debug, Clone)]
pub struct DenseUnitary {
    num_qubits: usize,
    data: Vec<C64>,
}

impl DenseUnitary {
    pub fn identity(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0, 0.0);
        }
        DenseUnitary { num_qubits, data }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row << self.num_qubits) + col]
    }

    /// `U -> G U`.
    pub fn left_apply(&mut self, gate: &Gate) {
        apply_gate_at(&mut self.data, gate, self.num_qubits, false, false);
    }

    /// `U -> U G`.
    pub fn right_apply(&mut self, gate: &Gate) {
        apply_gate_at(&mut self.data, gate, 0, false, true);
    }

    pub fn max_abs_diff(&self, other: &DenseUnitary) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |self - e^{iφ} other|` with the phase chosen from `tr(other† self)`.
    /// Returns infinity when the two are orthogonal.
    pub fn max_diff_up_to_phase(&self, other: &DenseUnitary) -> f64 {
        let overlap: C64 = self.data.iter().zip(&other.data).map(|(a, b)| b.conj() * a).sum();
        if overlap.norm() < 1e-12 {
            return f64::INFINITY;
        }
        let phase = overlap / overlap.norm();
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - phase * b).norm())
            .fold(0.0, f64::max)
    }
}
