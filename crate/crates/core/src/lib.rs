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

//! Simulated quantum error mitigation.
//!
//! The pipeline wraps a circuit in a Pauli check sandwich on one qubit at a time,
//! cuts the check gadget out of the circuit so that it runs on a noiseless
//! classical path while the circuit body runs on a noisy backend, post-selects on
//! the check ancilla, and finally merges the per-qubit mitigated distributions with
//! an iterative Bayesian reweighting of the unmitigated one.
//!
//! Modules follow the pipeline: [`circuit`], [`pauli`] and [`distribution`] hold
//! the shared data types, [`sim`] stands in for hardware, [`cut`] performs wire
//! cutting and reconstruction, [`pcs`] builds check sandwiches, [`sqem`] runs the
//! per-qubit jobs, [`recombine`] merges their outputs and [`vqe`] evaluates
//! energies end to end.

pub mod circuit;
pub mod cli;
pub mod cut;
pub mod distribution;
pub mod error;
pub mod pauli;
pub mod pcs;
pub mod recombine;
pub mod seed;
pub mod sim;
pub mod sqem;
pub mod vqe;

pub use circuit::{Circuit, Gate, GateKind, Preparation};
pub use distribution::{Distribution, DistributionKind};
pub use error::{Error, Result};
pub use pauli::{Hamiltonian, PauliLetter, PauliString};
pub use sim::NoiseModel;
