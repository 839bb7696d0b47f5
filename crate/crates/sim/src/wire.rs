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

//! Operator console messages: one JSON object per text frame.

use emblem_core::engine::{EvidenceSummary, OperatorChoice};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ack {
    pub engagement_id: String,
    pub applied: bool,
    /// Why a decision was not applied; null when it was.
    pub reason: Option<String>,
}

impl Ack {
    pub fn applied(engagement_id: &str) -> Self {
        Ack { engagement_id: engagement_id.to_string(), applied: true, reason: None }
    }

    pub fn rejected(engagement_id: &str, reason: &str) -> Self {
        Ack { engagement_id: engagement_id.to_string(), applied: false, reason: Some(reason.to_string()) }
    }
}

/// Server-to-client messages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    AbortRequest {
        engagement_id: String,
        sim_time: f64,
        evidence: EvidenceSummary,
        timeout_s: f64,
    },
    Ack(Ack),
    StateUpdate {
        engagement_id: String,
        phase: String,
        sim_time: f64,
    },
    Error {
        reason: String,
    },
}

impl ServerMessage {
    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }

    pub fn engagement_id(&self) -> Option<&str> {
        match self {
            ServerMessage::AbortRequest { engagement_id, .. } | ServerMessage::StateUpdate { engagement_id, .. } => {
                Some(engagement_id)
            }
            ServerMessage::Ack(a) => Some(&a.engagement_id),
            ServerMessage::Error { .. } => None,
        }
    }
}

/// The only client-to-server message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDecision {
    pub engagement_id: String,
    pub decision: OperatorChoice,
    pub operator_id: String,
}

impl OperatorDecision {
    pub fn to_text(&self) -> String {
        let mut v = serde_json::to_value(self).expect("decision serializes");
        v.as_object_mut().unwrap().insert("type".into(), Value::String("operator_decision".into()));
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolViolation {
    #[error("frame is not valid JSON")]
    NotJson,
    #[error("message must be a JSON object")]
    NotObject,
    #[error("unsupported message type {0:?}")]
    UnknownType(String),
    #[error("missing field {0}")]
    MissingField(&'static str),
    #[error("unexpected field {0}")]
    UnexpectedField(String),
    #[error("field {0} must be a non-empty string without whitespace")]
    BadString(&'static str),
    #[error("decision must be \"abort\" or \"proceed\"")]
    BadDecision,
    #[error("binary frames are not accepted")]
    BinaryFrame,
}

const DECISION_FIELDS: [&str; 4] = ["type", "engagement_id", "decision", "operator_id"];

fn token<'a>(obj: &'a Map<String, Value>, field: &'static str) -> Result<&'a str, ProtocolViolation> {
    let v = obj.get(field).ok_or(ProtocolViolation::MissingField(field))?;
    match v.as_str() {
        Some(s) if !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c.is_control()) => Ok(s),
        _ => Err(ProtocolViolation::BadString(field)),
    }
}

/// Strictly validates a client frame. Identifiers end up in log lines, so
/// they must be single tokens.
pub fn parse_client_message(text: &str) -> Result<OperatorDecision, ProtocolViolation> {
    let v: Value = serde_json::from_str(text).map_err(|_| ProtocolViolation::NotJson)?;
    let obj = v.as_object().ok_or(ProtocolViolation::NotObject)?;
    match obj.get("type") {
        None => return Err(ProtocolViolation::MissingField("type")),
        Some(Value::String(t)) if t == "operator_decision" => {}
        Some(Value::String(t)) => return Err(ProtocolViolation::UnknownType(t.clone())),
        Some(_) => return Err(ProtocolViolation::BadString("type")),
    }
    if let Some(k) = obj.keys().find(|k| !DECISION_FIELDS.contains(&k.as_str())) {
        return Err(ProtocolViolation::UnexpectedField(k.clone()));
    }
    let engagement_id = token(obj, "engagement_id")?.to_string();
    let decision = match obj.get("decision") {
        None => return Err(ProtocolViolation::MissingField("decision")),
        Some(Value::String(d)) if d == "abort" => OperatorChoice::Abort,
        Some(Value::String(d)) if d == "proceed" => OperatorChoice::Proceed,
        Some(_) => return Err(ProtocolViolation::BadDecision),
    };
    let operator_id = token(obj, "operator_id")?.to_string();
    Ok(OperatorDecision { engagement_id, decision, operator_id })
}
