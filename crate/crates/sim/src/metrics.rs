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

//! Run metrics, computed online by the simulation and recomputable from
//! decision logs alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use emblem_core::engine::{EventCode, LogEntry, Phase};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counts {
    pub engagements_total: u64,
    /// Engagements that reached Engage against a protected target.
    pub false_engagements: u64,
    /// Engagements ended without engaging an unprotected target, other
    /// than by an operator's abort.
    pub missed_legitimate: u64,
    pub escalations: u64,
    pub misuse_events: u64,
    pub safety_violations: u64,
}

impl Counts {
    pub const FIELDS: [&'static str; 6] = [
        "engagements_total",
        "false_engagements",
        "missed_legitimate",
        "escalations",
        "misuse_events",
        "safety_violations",
    ];

    pub fn values(&self) -> [u64; 6] {
        [
            self.engagements_total,
            self.false_engagements,
            self.missed_legitimate,
            self.escalations,
            self.misuse_events,
            self.safety_violations,
        ]
    }

    pub fn add(&mut self, o: &Counts) {
        self.engagements_total += o.engagements_total;
        self.false_engagements += o.false_engagements;
        self.missed_legitimate += o.missed_legitimate;
        self.escalations += o.escalations;
        self.misuse_events += o.misuse_events;
        self.safety_violations += o.safety_violations;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedCounts {
    pub seed: u64,
    #[serde(flatten)]
    pub counts: Counts,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub totals: Counts,
    pub per_seed: Vec<SeedCounts>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Structured,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "structured" => Ok(ReportFormat::Structured),
            _ => Err(format!("unknown report format {s:?} (expected table or structured)")),
        }
    }
}

impl MetricsReport {
    /// Builds a report from per-seed counts; repeated seeds are summed.
    pub fn from_runs(runs: impl IntoIterator<Item = (u64, Counts)>) -> Self {
        let mut by_seed: BTreeMap<u64, Counts> = BTreeMap::new();
        for (seed, c) in runs {
            by_seed.entry(seed).or_default().add(&c);
        }
        let mut totals = Counts::default();
        for c in by_seed.values() {
            totals.add(c);
        }
        MetricsReport {
            totals,
            per_seed: by_seed.into_iter().map(|(seed, counts)| SeedCounts { seed, counts }).collect(),
        }
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Table => self.to_table(),
            ReportFormat::Structured => self.to_structured(),
        }
    }

    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut header = format!("{:<20} {:>8}", "metric", "total");
        for s in &self.per_seed {
            write!(header, " {:>12}", format!("seed {}", s.seed)).unwrap();
        }
        let mut out = header.trim_end().to_string();
        out.push('\n');
        let totals = self.totals.values();
        for (i, name) in Counts::FIELDS.iter().enumerate() {
            let mut row = format!("{name:<20} {:>8}", totals[i]);
            for s in &self.per_seed {
                write!(row, " {:>12}", s.counts.values()[i]).unwrap();
            }
            out.push_str(&row);
            out.push('\n');
        }
        out
    }
}

#[derive(Default)]
struct Fold {
    protected: bool,
    engaged: bool,
    last_phase: Option<Phase>,
    operator_abort: bool,
    escalations: u64,
    misuse: u64,
    violation: bool,
}

/// Recomputes run counts from a decision log.
pub fn metrics_from_log(entries: &[LogEntry]) -> Counts {
    let mut per: BTreeMap<&str, Fold> = BTreeMap::new();
    for e in entries {
        let f = per.entry(e.engagement.as_str()).or_default();
        match e.code {
            EventCode::GroundTruth => f.protected = e.field("protected") == Some("true"),
            EventCode::Phase => {
                if let Some(to) = e.detail.split_once("->").and_then(|(_, to)| to.parse::<Phase>().ok()) {
                    f.engaged |= to == Phase::Engage;
                    f.last_phase = Some(to);
                }
            }
            EventCode::OperatorDecision => f.operator_abort |= e.field("decision") == Some("abort"),
            EventCode::Decision => f.escalations += u64::from(e.field("outcome") == Some("Escalate")),
            EventCode::Misuse => f.misuse += 1,
            EventCode::SafetyViolation => f.violation = true,
            _ => {}
        }
    }
    let mut c = Counts::default();
    for f in per.values() {
        c.engagements_total += 1;
        c.false_engagements += u64::from(f.engaged && f.protected);
        let ended_without_engaging = matches!(f.last_phase, Some(Phase::Aborted | Phase::Disintegrated));
        c.missed_legitimate += u64::from(ended_without_engaging && !f.protected && !f.operator_abort);
        c.escalations += f.escalations;
        c.misuse_events += f.misuse;
        c.safety_violations += u64::from(f.violation);
    }
    c
}
