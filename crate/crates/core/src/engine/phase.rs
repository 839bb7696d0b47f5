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

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    Find,
    Fix,
    Track,
    Target,
    Engage,
    Assess,
    Aborted,
    Disintegrated,
    AwaitingOperator,
}

/// Every legal edge of the engagement cycle.
pub const TRANSITIONS: [(Phase, Phase); 10] = [
    (Phase::Find, Phase::Fix),
    (Phase::Fix, Phase::Track),
    (Phase::Track, Phase::Target),
    (Phase::Target, Phase::Engage),
    (Phase::Target, Phase::Aborted),
    (Phase::Target, Phase::Disintegrated),
    (Phase::Target, Phase::AwaitingOperator),
    (Phase::AwaitingOperator, Phase::Target),
    (Phase::AwaitingOperator, Phase::Aborted),
    (Phase::Engage, Phase::Assess),
];

impl Phase {
    pub const ALL: [Phase; 9] = [
        Phase::Find,
        Phase::Fix,
        Phase::Track,
        Phase::Target,
        Phase::Engage,
        Phase::Assess,
        Phase::Aborted,
        Phase::Disintegrated,
        Phase::AwaitingOperator,
    ];

    /// No outgoing edges. Assess closes the cycle.
    pub fn is_terminal(self) -> bool {
        matches!(self, Phase::Assess | Phase::Aborted | Phase::Disintegrated)
    }

    pub fn can_transition(self, to: Phase) -> bool {
        TRANSITIONS.contains(&(self, to))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Find => "Find",
            Phase::Fix => "Fix",
            Phase::Track => "Track",
            Phase::Target => "Target",
            Phase::Engage => "Engage",
            Phase::Assess => "Assess",
            Phase::Aborted => "Aborted",
            Phase::Disintegrated => "Disintegrated",
            Phase::AwaitingOperator => "AwaitingOperator",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phase {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Phase::ALL.into_iter().find(|p| p.as_str() == s).ok_or(())
    }
}
