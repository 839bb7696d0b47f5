// Copyright 2026 The Emblem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use emblem_sim::{load_scenario, Scenario};

pub const FIXTURES: [&str; 10] = [
    "minimal",
    "field_hospital",
    "revocation",
    "revocation_control",
    "jamming_block",
    "jamming_timeout",
    "mobile_screening",
    "registry_outage",
    "forged_beacon",
    "no_weapons",
];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/scenarios").join(format!("{name}.json"))
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn fixture(name: &str) -> Scenario {
    load_scenario(&fixture_text(name)).unwrap_or_else(|e| panic!("{name}: {:?}", e.errors))
}

/// Independent fold over rendered log text, sharing no code with the
/// library's metrics.
pub fn log_oracle(log_text: &str) -> [u64; 6] {
    #[derive(Default)]
    struct E {
        protected: bool,
        engaged: bool,
        last: String,
        op_abort: bool,
        esc: u64,
        misuse: u64,
        unsafe_: bool,
    }
    let mut m: BTreeMap<String, E> = BTreeMap::new();
    for line in log_text.lines() {
        let cols: Vec<&str> = line.splitn(5, ' ').collect();
        let e = m.entry(cols[1].to_string()).or_default();
        let detail = cols.get(4).copied().unwrap_or("");
        match cols[3] {
            "GROUND_TRUTH" => e.protected = detail.contains("protected=true"),
            "PHASE" => {
                let to = detail.rsplit("->").next().unwrap().to_string();
                e.engaged |= to == "Engage";
                e.last = to;
            }
            "OPERATOR_DECISION" => e.op_abort |= detail.starts_with("decision=abort"),
            "DECISION" => e.esc += detail.contains("outcome=Escalate") as u64,
            "MISUSE" => e.misuse += 1,
            "SAFETY_VIOLATION" => e.unsafe_ = true,
            _ => {}
        }
    }
    let mut out = [0u64; 6];
    for e in m.values() {
        out[0] += 1;
        out[1] += (e.engaged && e.protected) as u64;
        out[2] += ((e.last == "Aborted" || e.last == "Disintegrated") && !e.protected && !e.op_abort) as u64;
        out[3] += e.esc;
        out[4] += e.misuse;
        out[5] += e.unsafe_ as u64;
    }
    out
}
