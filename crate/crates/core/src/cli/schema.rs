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

//! JSON schemas for every document the CLI writes.

macro_rules! schemas {
    ($($name:literal),* $(,)?) => {
        /// `(name, schema text)` pairs.
        pub const SCHEMAS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../schemas/", $name, ".schema.json")))),*
        ];
    };
}

schemas!(
    "campaign",
    "distribution",
    "energy_reports",
    "execution_report",
    "manifest",
    "noise",
    "post_selection",
    "recombination",
    "reconstruction",
    "sandwich",
);

pub fn schema(name: &str) -> Option<&'static str> {
    SCHEMAS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
