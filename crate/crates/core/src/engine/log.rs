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

//! Line-oriented decision log: `<sim_time> <engagement_id> <phase> <event_code> <detail>`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::phase::Phase;

macro_rules! event_codes {
    ($($variant:ident => $code:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum EventCode { $($variant),* }

        impl EventCode {
            pub const ALL: &'static [EventCode] = &[$(EventCode::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self { $(EventCode::$variant => $code),* }
            }
        }
    };
}

event_codes! {
    Phase => "PHASE",
    Beacon => "BEACON",
    DecodeFail => "DECODE_FAIL",
    Verdict => "VERDICT",
    Misuse => "MISUSE",
    GpsFix => "GPS_FIX",
    GpsUnavailable => "GPS_UNAVAILABLE",
    Localized => "LOCALIZED",
    LocalizeFail => "LOCALIZE_FAIL",
    Registry => "REGISTRY",
    Rfid => "RFID",
    BeaconIgnored => "BEACON_IGNORED",
    Jamming => "JAMMING",
    TagScreen => "TAG_SCREEN",
    Passive => "PASSIVE",
    Decision => "DECISION",
    OperatorRequest => "OPERATOR_REQUEST",
    OperatorDecision => "OPERATOR_DECISION",
    OperatorTimeout => "OPERATOR_TIMEOUT",
    StaleDecision => "STALE_DECISION",
    GroundTruth => "GROUND_TRUTH",
    SafetyViolation => "SAFETY_VIOLATION",
}

impl fmt::Display for EventCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventCode {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        EventCode::ALL.iter().copied().find(|c| c.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub time_ms: u64,
    pub engagement: String,
    pub phase: Phase,
    pub code: EventCode,
    pub detail: String,
}

impl LogEntry {
    /// Value of `key=value` within the detail field.
    pub fn field(&self, key: &str) -> Option<&str> {
        self.detail.split(' ').find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
    }
}

pub fn format_time(ms: u64) -> String {
    format!("{}.{:03}", ms / 1000, ms % 1000)
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", format_time(self.time_ms), self.engagement, self.phase, self.code)?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogParseError {
    #[error("line {0}: malformed")]
    Malformed(usize),
    #[error("line {0}: bad time")]
    BadTime(usize),
    #[error("line {0}: unknown phase")]
    UnknownPhase(usize),
    #[error("line {0}: unknown event code")]
    UnknownCode(usize),
}

fn parse_time(s: &str) -> Option<u64> {
    let (secs, frac) = s.split_once('.')?;
    if frac.len() != 3 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(secs.parse::<u64>().ok()? * 1000 + frac.parse::<u64>().ok()?)
}

pub fn parse_line(line: &str, lineno: usize) -> Result<LogEntry, LogParseError> {
    let mut it = line.splitn(5, ' ');
    let (Some(t), Some(id), Some(ph), Some(code)) = (it.next(), it.next(), it.next(), it.next()) else {
        return Err(LogParseError::Malformed(lineno));
    };
    Ok(LogEntry {
        time_ms: parse_time(t).ok_or(LogParseError::BadTime(lineno))?,
        engagement: id.to_string(),
        phase: ph.parse().map_err(|_| LogParseError::UnknownPhase(lineno))?,
        code: code.parse().map_err(|_| LogParseError::UnknownCode(lineno))?,
        detail: it.next().unwrap_or("").to_string(),
    })
}

pub fn parse_log(text: &str) -> Result<Vec<LogEntry>, LogParseError> {
    text.lines().enumerate().filter(|(_, l)| !l.is_empty()).map(|(i, l)| parse_line(l, i + 1)).collect()
}

pub fn render_log(entries: &[LogEntry]) -> String {
    entries.iter().map(|e| format!("{e}\n")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("entry {index}: illegal transition {from} -> {to}")]
    IllegalTransition { index: usize, from: Phase, to: Phase },
    #[error("entry {index}: transition starts at {found}, state is {expected}")]
    WrongSource { index: usize, expected: Phase, found: Phase },
    #[error("entry {index}: recorded phase {found}, state is {expected}")]
    PhaseMismatch { index: usize, expected: Phase, found: Phase },
    #[error("entry {0}: unreadable transition detail")]
    BadDetail(usize),
}

/// Folds one engagement's log from `Find` and returns the phase it ends in.
pub fn replay(entries: &[LogEntry]) -> Result<Phase, ReplayError> {
    let mut phase = Phase::Find;
    for (index, e) in entries.iter().enumerate() {
        if e.code == EventCode::Phase {
            let (from, to) = e.detail.split_once("->").ok_or(ReplayError::BadDetail(index))?;
            let from: Phase = from.parse().map_err(|_| ReplayError::BadDetail(index))?;
            let to: Phase = to.parse().map_err(|_| ReplayError::BadDetail(index))?;
            if from != phase {
                return Err(ReplayError::WrongSource { index, expected: phase, found: from });
            }
            if !from.can_transition(to) {
                return Err(ReplayError::IllegalTransition { index, from, to });
            }
            phase = to;
        }
        if e.phase != phase {
            return Err(ReplayError::PhaseMismatch { index, expected: phase, found: e.phase });
        }
    }
    Ok(phase)
}
