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

//! Sparse (quasi-)probability tables keyed by measurement bit strings.
//!
//! Keys are `u64` words where bit `k` holds the outcome at position `k`; the text
//! form writes position `k` as character `k`, so `"10"` means position 0 read 1.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total weight of a probability-kind distribution.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Probability,
    QuasiProbability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionDoc", into = "DistributionDoc")]
pub struct Distribution {
    num_bits: usize,
    table: BTreeMap<u64, f64>,
    kind: DistributionKind,
    shots: Option<u64>,
    clipped_mass: f64,
}

pub fn bits_to_string(key: u64, num_bits: usize) -> String {
    (0..num_bits)
        .map(|k| if key >> k & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bits(s: &str) -> Result<u64> {
    if s.len() > 64 {
        return Err(Error::validation(format!("bit string '{s}' is longer than 64")));
    }
    s.chars().enumerate().try_fold(0u64, |acc, (k, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << k),
        _ => Err(Error::validation(format!("'{s}' is not a bit string"))),
    })
}

impl Distribution {
    /// Probability distribution; weights must be nonnegative and sum to one.
    pub fn probability(num_bits: usize, table: BTreeMap<u64, f64>) -> Result<Self> {
        let d = Distribution::raw(num_bits, table, DistributionKind::Probability)?;
        if let Some((k, w)) = d.table.iter().find(|(_, w)| **w < 0.0) {
            return Err(Error::validation(format!(
                "negative weight {w} at {}",
                bits_to_string(*k, num_bits)
            )));
        }
        let total = d.total();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::validation(format!("weights sum to {total}, not 1")));
        }
        Ok(d)
    }

    /// Signed weights, e.g. a cut reconstruction before clipping.
    pub fn quasi(num_bits: usize, table: BTreeMap<u64, f64>) -> Result<Self> {
        Distribution::raw(num_bits, table, DistributionKind::QuasiProbability)
    }

    /// Build from string keys such as `[("00", 0.5), ("11", 0.5)]`.
    pub fn from_strings<'a>(kind: DistributionKind, entries: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        let mut num_bits = None;
        let mut table = BTreeMap::new();
        for (s, w) in entries {
            match num_bits {
                None => num_bits = Some(s.len()),
                Some(n) if n != s.len() => {
                    return Err(Error::validation(format!(
                        "key '{s}' has length {}, expected {n}",
                        s.len()
                    )))
                }
                _ => {}
            }
            *table.entry(parse_bits(s)?).or_insert(0.0) += w;
        }
        let n = num_bits.unwrap_or(0);
        match kind {
            DistributionKind::Probability => Distribution::probability(n, table),
            DistributionKind::QuasiProbability => Distribution::quasi(n, table),
        }
    }

    fn raw(num_bits: usize, table: BTreeMap<u64, f64>, kind: DistributionKind) -> Result<Self> {
        if num_bits > 64 {
            return Err(Error::validation(format!("{num_bits} bits do not fit a 64-bit key")));
        }
        let limit = if num_bits == 64 {
            u64::MAX
        } else {
            (1u64 << num_bits) - 1
        };
        if let Some(k) = table.keys().find(|&&k| k > limit) {
            return Err(Error::validation(format!("key {k:#x} exceeds {num_bits} bits")));
        }
        if let Some(w) = table.values().find(|w| !w.is_finite()) {
            return Err(Error::validation(format!("non-finite weight {w}")));
        }
        Ok(Distribution {
            num_bits,
            table,
            kind,
            shots: None,
            clipped_mass: 0.0,
        })
    }

    /// The single-outcome distribution over zero bits.
    pub fn trivial() -> Self {
        Distribution {
            num_bits: 0,
            table: BTreeMap::from([(0, 1.0)]),
            kind: DistributionKind::Probability,
            shots: None,
            clipped_mass: 0.0,
        }
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = Some(shots);
        self
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    /// Negative mass removed by clipping while producing this distribution.
    pub fn clipped_mass(&self) -> f64 {
        self.clipped_mass
    }

    pub fn table(&self) -> &BTreeMap<u64, f64> {
        &self.table
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.table.iter().map(|(k, w)| (*k, *w))
    }

    pub fn get(&self, key: u64) -> f64 {
        self.table.get(&key).copied().unwrap_or(0.0)
    }

    pub fn get_str(&self, bits: &str) -> f64 {
        parse_bits(bits).map(|k| self.get(k)).unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.table.values().sum()
    }

    /// Clip negative weights to zero, drop zero entries and rescale to unit mass.
    ///
    /// The clipped negative mass is added to [`Distribution::clipped_mass`].
    pub fn normalize(&self) -> Result<Distribution> {
        let mut clipped = 0.0;
        let mut table = BTreeMap::new();
        for (&k, &w) in &self.table {
            if w < 0.0 {
                clipped -= w;
            } else if w > 0.0 {
                table.insert(k, w);
            }
        }
        let total: f64 = table.values().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::DegenerateDistribution(format!(
                "total positive weight is {total}"
            )));
        }
        for w in table.values_mut() {
            *w /= total;
        }
        Ok(Distribution {
            num_bits: self.num_bits,
            table,
            kind: DistributionKind::Probability,
            shots: self.shots,
            clipped_mass: self.clipped_mass + clipped,
        })
    }

    /// Sum out every position not listed in `keep`; output position `i` is input position `keep[i]`.
    pub fn marginalize(&self, keep: &[usize]) -> Result<Distribution> {
        if let Some(&p) = keep.iter().find(|&&p| p >= self.num_bits) {
            return Err(Error::validation(format!(
                "position {p} out of range for {} bits",
                self.num_bits
            )));
        }
        let mut table = BTreeMap::new();
        for (&k, &w) in &self.table {
            *table.entry(gather_bits(k, keep)).or_insert(0.0) += w;
        }
        Ok(Distribution {
            num_bits: keep.len(),
            table,
            kind: self.kind,
            shots: self.shots,
            clipped_mass: self.clipped_mass,
        })
    }

    pub(crate) fn with_clipped_mass(mut self, clipped: f64) -> Self {
        self.clipped_mass = clipped;
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Pack the bits of `key` found at `positions` into a dense word.
pub fn gather_bits(key: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &p)| acc | ((key >> p) & 1) << i)
}

/// Total-variation distance `½ Σ |p - q|` over the union of supports.
pub fn total_variation(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.num_bits != q.num_bits {
        return Err(Error::validation(format!(
            "layouts differ: {} vs {} bits",
            p.num_bits, q.num_bits
        )));
    }
    let mut sum = 0.0;
    for (k, w) in p.iter() {
        sum += (w - q.get(k)).abs();
    }
    for (k, w) in q.iter() {
        if !p.table.contains_key(&k) {
            sum += w.abs();
        }
    }
    Ok(0.5 * sum)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionDoc {
    table: BTreeMap<String, f64>,
    metadata: Metadata,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Metadata {
    num_bits: usize,
    kind: DistributionKind,
    shots: Option<u64>,
    clipped_mass: f64,
}

impl From<Distribution> for DistributionDoc {
    fn from(d: Distribution) -> Self {
        DistributionDoc {
            table: d
                .table
                .iter()
                .map(|(&k, &w)| (bits_to_string(k, d.num_bits), w))
                .collect(),
            metadata: Metadata {
                num_bits: d.num_bits,
                kind: d.kind,
                shots: d.shots,
                clipped_mass: d.clipped_mass,
            },
        }
    }
}

impl TryFrom<DistributionDoc> for Distribution {
    type Error = Error;

    fn try_from(doc: DistributionDoc) -> Result<Self> {
        let m = doc.metadata;
        let mut table = BTreeMap::new();
        for (s, w) in doc.table {
            if s.len() != m.num_bits {
                return Err(Error::validation(format!(
                    "key '{s}' has length {}, metadata says {}",
                    s.len(),
                    m.num_bits
                )));
            }
            table.insert(parse_bits(&s)?, w);
        }
        let d = match m.kind {
            DistributionKind::Probability => Distribution::probability(m.num_bits, table)?,
            DistributionKind::QuasiProbability => Distribution::quasi(m.num_bits, table)?,
        };
        Ok(Distribution {
            shots: m.shots,
            clipped_mass: m.clipped_mass,
            ..d
        })
    }
}
