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

//! Wire cutting: split a circuit into two fragments joined by measure-and-prepare
//! terminals, enumerate the signed basis expansion of every cut, and rebuild the
//! joint output distribution from fragment executions.
//!
//! Each cut replaces the identity channel on a wire by
//! `rho = 1/2 * sum_{M in {I,X,Y,Z}} M tr(M rho)`, with every `M` written as a
//! signed sum of its eigenprojectors. The fragment holding the wire before the cut
//! measures the terminal; the fragment holding the wire after it prepares an
//! eigenstate.

mod reconstruct;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, Preparation};
use crate::error::{Error, Result};
use crate::pauli::PauliLetter;

pub use reconstruct::{execute_and_reconstruct, Backend, ReconstructionResult};

/// Default cap on the number of cuts per fragment set.
pub const DEFAULT_CUT_CAP: usize = 4;

/// A cut on `qubit` between gate `position - 1` and gate `position`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CutPoint {
    pub qubit: usize,
    pub position: usize,
}

impl CutPoint {
    pub fn new(qubit: usize, position: usize) -> Self {
        CutPoint { qubit, position }
    }
}

impl fmt::Display for CutPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}@{}", self.qubit, self.position)
    }
}

impl FromStr for CutPoint {
    type Err = Error;

    /// Parses `q<k>@<pos>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation(format!("cut '{s}' is not of the form q<k>@<pos>"));
        let (q, p) = s.trim().split_once('@').ok_or_else(bad)?;
        let qubit = q.strip_prefix('q').ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let position = p.parse().map_err(|_| bad())?;
        Ok(CutPoint { qubit, position })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendTag {
    HardwareEmulated,
    Noiseless,
}

/// Which fragment receives components that no cut connects to anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsolatedPlacement {
    /// The fragment holding the earliest wire segment.
    #[default]
    First,
    /// The fragment holding the segment of `qubit` that contains gate boundary `position`.
    WithSegment { qubit: usize, position: usize },
}

/// One end of a cut terminal: a local qubit of a fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TerminalEnd {
    pub fragment: usize,
    pub qubit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Terminal {
    pub cut: CutPoint,
    pub measure: TerminalEnd,
    pub prepare: TerminalEnd,
}

/// A sub-circuit produced by cutting.
///
/// Output bits are the original measured bits this fragment owns (in original
/// order) followed by one bit per measure terminal (in cut order).
#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    circuit: Circuit,
    gate_origin: Vec<usize>,
    qubit_origin: Vec<usize>,
    measured_positions: Vec<usize>,
    measure_terminals: Vec<(usize, usize)>,
    prepare_terminals: Vec<(usize, usize)>,
    backend: BackendTag,
}

impl Fragment {
    /// Local circuit; prepare terminals sit in |0> and measure terminals are
    /// measured in Z until a variant configures them.
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// Original gate index of each local gate.
    pub fn gate_origin(&self) -> &[usize] {
        &self.gate_origin
    }

    /// Original qubit of each local qubit.
    pub fn qubit_origin(&self) -> &[usize] {
        &self.qubit_origin
    }

    /// Indices into the original measured list carried by the leading output bits.
    pub fn measured_positions(&self) -> &[usize] {
        &self.measured_positions
    }

    /// `(cut index, local qubit)` for each measure terminal, in cut order.
    pub fn measure_terminals(&self) -> &[(usize, usize)] {
        &self.measure_terminals
    }

    /// `(cut index, local qubit)` for each prepare terminal, in cut order.
    pub fn prepare_terminals(&self) -> &[(usize, usize)] {
        &self.prepare_terminals
    }

    pub fn backend(&self) -> BackendTag {
        self.backend
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    /// Number of distinct circuits needed to cover every variant: 3 settings per
    /// measure terminal times 6 states per prepare terminal.
    pub fn num_configurations(&self) -> usize {
        3usize.pow(self.measure_terminals.len() as u32) * 6usize.pow(self.prepare_terminals.len() as u32)
    }
}

/// Two fragments plus the terminals that join them.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentSet {
    original: Circuit,
    cuts: Vec<CutPoint>,
    fragments: [Fragment; 2],
    terminals: Vec<Terminal>,
}

impl FragmentSet {
    pub fn original(&self) -> &Circuit {
        &self.original
    }

    pub fn cuts(&self) -> &[CutPoint] {
        &self.cuts
    }

    pub fn num_cuts(&self) -> usize {
        self.cuts.len()
    }

    pub fn fragments(&self) -> &[Fragment; 2] {
        &self.fragments
    }

    /// Fragment holding the earliest wire segment.
    pub fn upstream(&self) -> &Fragment {
        &self.fragments[0]
    }

    pub fn downstream(&self) -> &Fragment {
        &self.fragments[1]
    }

    /// Terminal pair per cut, indexed like [`FragmentSet::cuts`].
    pub fn terminal_map(&self) -> &[Terminal] {
        &self.terminals
    }

    pub fn set_backend(&mut self, fragment: usize, tag: BackendTag) -> Result<()> {
        let f = self
            .fragments
            .get_mut(fragment)
            .ok_or_else(|| Error::validation(format!("fragment index {fragment} out of range")))?;
        f.backend = tag;
        Ok(())
    }

    /// Index of the fragment that owns original gate `gate`.
    pub fn fragment_of_gate(&self, gate: usize) -> Option<usize> {
        self.fragments.iter().position(|f| f.gate_origin.contains(&gate))
    }

    /// Re-joins the fragments along the terminal map and checks that the original
    /// gate sequence, preparations and measurements come back.
    pub fn verify_recomposition(&self) -> Result<()> {
        let c = &self.original;
        let fail = |m: String| Err(Error::Planning(format!("recomposition check failed: {m}")));
        let mut rebuilt: Vec<Option<Gate>> = vec![None; c.gates().len()];
        for f in &self.fragments {
            for (g, &origin) in f.circuit.gates().iter().zip(&f.gate_origin) {
                let slot = match rebuilt.get_mut(origin) {
                    Some(s) => s,
                    None => return fail(format!("gate origin {origin} out of range")),
                };
                if slot.is_some() {
                    return fail(format!("gate {origin} appears in both fragments"));
                }
                *slot = Some(g.remapped(|l| f.qubit_origin[l]));
            }
        }
        for (i, (g, r)) in c.gates().iter().zip(&rebuilt).enumerate() {
            if r.as_ref() != Some(g) {
                return fail(format!("gate {i} ({g}) not reproduced"));
            }
        }
        for (ci, t) in self.terminals.iter().enumerate() {
            let mq = self.fragments[t.measure.fragment].qubit_origin[t.measure.qubit];
            let pq = self.fragments[t.prepare.fragment].qubit_origin[t.prepare.qubit];
            if mq != t.cut.qubit || pq != t.cut.qubit {
                return fail(format!("terminal {ci} is not on qubit {}", t.cut.qubit));
            }
        }
        let mut owners = vec![0usize; c.measured_qubits().len()];
        for f in &self.fragments {
            for (b, &pos) in f.measured_positions.iter().enumerate() {
                owners[pos] += 1;
                if f.qubit_origin[f.circuit.measured_qubits()[b]] != c.measured_qubits()[pos] {
                    return fail(format!("measured position {pos} maps to the wrong qubit"));
                }
            }
        }
        if owners.iter().any(|&n| n != 1) {
            return fail("measured bits are not owned exactly once".into());
        }
        Ok(())
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Cut with isolated components placed in the first fragment.
pub fn cut_wires(c: &Circuit, cuts: &[CutPoint]) -> Result<FragmentSet> {
    cut_wires_with(c, cuts, IsolatedPlacement::First)
}

pub fn cut_wires_with(c: &Circuit, cuts: &[CutPoint], placement: IsolatedPlacement) -> Result<FragmentSet> {
    let n = c.num_qubits();
    let gate_count = c.gates().len();
    let mut positions: Vec<Vec<usize>> = vec![Vec::new(); n];
    for cut in cuts {
        if cut.qubit >= n {
            return Err(Error::validation(format!("cut {cut} on a {n}-qubit circuit")));
        }
        if cut.position > gate_count {
            return Err(Error::validation(format!("cut {cut} beyond the {gate_count} gates")));
        }
        if positions[cut.qubit].contains(&cut.position) {
            return Err(Error::validation(format!("duplicate cut {cut}")));
        }
        positions[cut.qubit].push(cut.position);
    }
    for p in &mut positions {
        p.sort_unstable();
    }
    let segment_of = |q: usize, boundary: usize| positions[q].iter().filter(|&&p| p <= boundary).count();

    // Node ids for every (qubit, segment).
    let mut first_node = Vec::with_capacity(n + 1);
    let mut total = 0;
    for p in &positions {
        first_node.push(total);
        total += p.len() + 1;
    }
    let node = |q: usize, j: usize| first_node[q] + j;
    let mut uf = UnionFind((0..total).collect());
    for (i, g) in c.gates().iter().enumerate() {
        let qs = g.qubits();
        for w in qs.windows(2) {
            uf.union(node(w[0], segment_of(w[0], i)), node(w[1], segment_of(w[1], i)));
        }
    }

    let mut edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for cut in cuts {
        let j = segment_of(cut.qubit, cut.position);
        let (before, after) = (uf.find(node(cut.qubit, j - 1)), uf.find(node(cut.qubit, j)));
        if before == after {
            return Err(Error::InfeasibleCut(format!(
                "both sides of cut {cut} stay connected through other wires"
            )));
        }
        edges.entry(before).or_default().push(after);
        edges.entry(after).or_default().push(before);
    }

    // Components in order of their earliest (start boundary, qubit) segment.
    let mut roots: Vec<(usize, usize, usize)> = Vec::new();
    for (q, pos) in positions.iter().enumerate() {
        for j in 0..=pos.len() {
            let start = if j == 0 { 0 } else { pos[j - 1] };
            roots.push((start, q, uf.find(node(q, j))));
        }
    }
    roots.sort_unstable();
    let mut color: Vec<Option<usize>> = vec![None; total];
    for &(_, _, root) in &roots {
        if color[root].is_some() || !edges.contains_key(&root) {
            continue;
        }
        color[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            let ca = color[a].unwrap_or(0);
            for &b in &edges[&a] {
                match color[b] {
                    None => {
                        color[b] = Some(1 - ca);
                        queue.push_back(b);
                    }
                    Some(cb) if cb == ca => {
                        return Err(Error::InfeasibleCut(
                            "the cuts do not split the circuit into two fragments".into(),
                        ))
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let isolated_color = match placement {
        IsolatedPlacement::First => 0,
        IsolatedPlacement::WithSegment { qubit, position } => {
            if qubit >= n {
                return Err(Error::validation(format!("placement anchor q{qubit} out of range")));
            }
            color[uf.find(node(qubit, segment_of(qubit, position)))].unwrap_or(0)
        }
    };
    let mut seg_color = vec![0usize; total];
    for (id, slot) in seg_color.iter_mut().enumerate() {
        *slot = color[uf.find(id)].unwrap_or(isolated_color);
    }

    let frag = |f: usize| build_fragment(c, cuts, &positions, f, |q, j| seg_color[node(q, j)]);
    let fragments = [frag(0)?, frag(1)?];

    let mut terminals = Vec::with_capacity(cuts.len());
    for (ci, cut) in cuts.iter().enumerate() {
        let find = |is_measure: bool| -> TerminalEnd {
            for (fi, f) in fragments.iter().enumerate() {
                let list = if is_measure {
                    &f.measure_terminals
                } else {
                    &f.prepare_terminals
                };
                if let Some(&(_, q)) = list.iter().find(|(c, _)| *c == ci) {
                    return TerminalEnd { fragment: fi, qubit: q };
                }
            }
            unreachable!("every cut has both terminals")
        };
        terminals.push(Terminal {
            cut: *cut,
            measure: find(true),
            prepare: find(false),
        });
    }
    let set = FragmentSet {
        original: c.clone(),
        cuts: cuts.to_vec(),
        fragments,
        terminals,
    };
    set.verify_recomposition()?;
    Ok(set)
}

fn build_fragment(
    c: &Circuit,
    cuts: &[CutPoint],
    positions: &[Vec<usize>],
    f: usize,
    color: impl Fn(usize, usize) -> usize,
) -> Result<Fragment> {
    let segment_of = |q: usize, boundary: usize| positions[q].iter().filter(|&&p| p <= boundary).count();
    let mut local: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut qubit_origin = Vec::new();
    let mut preparations = Vec::new();
    for (q, p) in positions.iter().enumerate() {
        for j in 0..=p.len() {
            if color(q, j) == f {
                local.insert((q, j), qubit_origin.len());
                qubit_origin.push(q);
                preparations.push(if j == 0 { c.preparations()[q] } else { Preparation::Zero });
            }
        }
    }
    let mut gates = Vec::new();
    let mut gate_origin = Vec::new();
    for (i, g) in c.gates().iter().enumerate() {
        let q0 = g.qubits()[0];
        if color(q0, segment_of(q0, i)) == f {
            gates.push(g.remapped(|q| local[&(q, segment_of(q, i))]));
            gate_origin.push(i);
        }
    }
    let mut measured = Vec::new();
    let mut measured_positions = Vec::new();
    for (pos, &q) in c.measured_qubits().iter().enumerate() {
        if let Some(&l) = local.get(&(q, positions[q].len())) {
            measured.push(l);
            measured_positions.push(pos);
        }
    }
    let mut measure_terminals = Vec::new();
    let mut prepare_terminals = Vec::new();
    for (ci, cut) in cuts.iter().enumerate() {
        let j = segment_of(cut.qubit, cut.position);
        if let Some(&l) = local.get(&(cut.qubit, j - 1)) {
            measure_terminals.push((ci, l));
            measured.push(l);
        }
        if let Some(&l) = local.get(&(cut.qubit, j)) {
            prepare_terminals.push((ci, l));
        }
    }
    Ok(Fragment {
        circuit: Circuit::from_parts(qubit_origin.len(), gates, measured, preparations)?,
        gate_origin,
        qubit_origin,
        measured_positions,
        measure_terminals,
        prepare_terminals,
        backend: BackendTag::HardwareEmulated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Basis and eigenstate sign chosen at one cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CutChoice {
    pub basis: PauliLetter,
    pub sign: Sign,
}

impl CutChoice {
    /// Signed factor `1/2 * lambda`; both identity terms carry `+1/2`.
    pub fn weight(self) -> f64 {
        match self.basis {
            PauliLetter::I => 0.5,
            _ => 0.5 * self.sign.value(),
        }
    }

    /// State prepared on the prepare-side terminal.
    pub fn preparation(self) -> Preparation {
        use PauliLetter::*;
        match (self.basis, self.sign) {
            (I | Z, Sign::Plus) => Preparation::Zero,
            (I | Z, Sign::Minus) => Preparation::One,
            (X, Sign::Plus) => Preparation::Plus,
            (X, Sign::Minus) => Preparation::Minus,
            (Y, Sign::Plus) => Preparation::PlusI,
            (Y, Sign::Minus) => Preparation::MinusI,
        }
    }

    /// Measurement setting on the measure-side terminal (identity reuses Z).
    pub fn setting(self) -> PauliLetter {
        match self.basis {
            PauliLetter::I => PauliLetter::Z,
            b => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantAssignment {
    pub choices: Vec<CutChoice>,
    pub weight: f64,
}

/// All `8^cuts` assignments in lexicographic (cut, basis, sign) order.
pub fn enumerate_variants(f: &FragmentSet) -> Result<Vec<VariantAssignment>> {
    enumerate_variants_capped(f.num_cuts(), DEFAULT_CUT_CAP)
}

pub fn enumerate_variants_capped(num_cuts: usize, cap: usize) -> Result<Vec<VariantAssignment>> {
    if num_cuts > cap {
        return Err(Error::CombinatorialBudget {
            cuts: num_cuts,
            variants: 8u64.saturating_pow(num_cuts as u32),
            cap,
        });
    }
    const BASES: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
    let count = 8usize.pow(num_cuts as u32);
    let mut out = Vec::with_capacity(count);
    for v in 0..count {
        let mut choices = Vec::with_capacity(num_cuts);
        for c in 0..num_cuts {
            let digit = (v / 8usize.pow((num_cuts - 1 - c) as u32)) % 8;
            choices.push(CutChoice {
                basis: BASES[digit / 2],
                sign: if digit % 2 == 0 { Sign::Plus } else { Sign::Minus },
            });
        }
        let weight = choices.iter().map(|c| c.weight()).product();
        out.push(VariantAssignment { choices, weight });
    }
    Ok(out)
}
