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

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the mitigation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("circuit has {qubits} qubits, dense simulation limit is {limit}")]
    UnsupportedSize { qubits: usize, limit: usize },

    #[error("infeasible cut: {0}")]
    InfeasibleCut(String),

    #[error("{cuts} cuts require {variants} variants, above the configured cap of {cap} cuts")]
    CombinatorialBudget { cuts: usize, variants: u64, cap: usize },

    #[error("Z check on qubit {qubit} is infeasible: gate #{gate_index} ({gate}) does not commute with Z")]
    CheckInfeasible {
        qubit: usize,
        gate_index: usize,
        gate: String,
    },

    #[error("post-selection retained no probability mass")]
    EmptyPostSelection,

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("cut planning failed: {0}")]
    Planning(String),

    #[error("variant configuration {index} failed: {source}")]
    Backend {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("job for qubit {qubit} failed: {source}")]
    Job {
        qubit: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by bad inputs rather than by execution.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::UnsupportedSize { .. }
            | Error::InfeasibleCut(_)
            | Error::CombinatorialBudget { .. }
            | Error::CheckInfeasible { .. }
            | Error::Planning(_)
            | Error::Json(_) => true,
            Error::Backend { source, .. } | Error::Job { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
