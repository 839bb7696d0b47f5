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

mod common;

use common::{fixture, fixture_text, FIXTURES};
use emblem_sim::scenario::{validate, ValidationError};
use emblem_sim::{load_scenario, schema_json, to_canonical_json};

#[test]
fn fixtures_round_trip_byte_identically() {
    for name in FIXTURES {
        let text = fixture_text(name);
        let s = load_scenario(&text).unwrap();
        assert_eq!(to_canonical_json(&s), text, "{name} is not in canonical form");
        assert_eq!(s.name, name);
    }
}

#[test]
fn committed_schema_matches_types() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/schema/scenario.schema.json");
    let committed = std::fs::read_to_string(path).unwrap();
    assert_eq!(committed, schema_json(), "regenerate with `emblem-sim schema`");
}

#[test]
fn minimal_fixture_shape() {
    let s = fixture("minimal");
    assert_eq!(s.entities.len(), 2);
    assert_eq!(s.weapons.len(), 1);
    assert_eq!(s.satellites.len(), 4);
}

#[test]
fn unknown_emitter_owner_is_a_dangling_reference() {
    let mut s = fixture("field_hospital");
    s.emitters[0].owner = "ghost".into();
    let err = load_scenario(&to_canonical_json(&s)).unwrap_err();
    assert_eq!(err.dangling(), vec![("emitters[hospital-beacon].owner", "ghost")]);
}

#[test]
fn every_error_is_reported() {
    let mut s = fixture("field_hospital");
    s.emitters[0].owner = "ghost".into();
    s.weapons[0].policy = "missing-policy".into();
    s.tags[0].carrier = "nobody".into();
    s.duration_s = -1.0;
    s.schema_version = 9;
    let errors = validate(&s);
    let dangling: Vec<_> = errors.iter().filter(|e| matches!(e, ValidationError::DanglingReference { .. })).collect();
    let schema: Vec<_> = errors.iter().filter(|e| matches!(e, ValidationError::Schema(_))).collect();
    assert_eq!(dangling.len(), 3, "{errors:?}");
    assert_eq!(schema.len(), 2, "{errors:?}");
}

#[test]
fn structural_errors_are_schema_errors() {
    let text = fixture_text("minimal").replacen("\"seed\"", "\"colour\": 1,\n  \"seed\"", 1);
    let err = load_scenario(&text).unwrap_err();
    assert_eq!(err.schema_errors().len(), 1);
    assert!(err.schema_errors()[0].contains("colour"));

    let no_seed = {
        let mut v: serde_json::Value = serde_json::from_str(&fixture_text("minimal")).unwrap();
        v.as_object_mut().unwrap().remove("seed");
        v.to_string()
    };
    let err = load_scenario(&no_seed).unwrap_err();
    assert!(err.schema_errors()[0].contains("seed"));
}

#[test]
fn duplicate_ids_and_semantic_limits() {
    let mut s = fixture("field_hospital");
    s.entities[1].id = s.entities[0].id.clone();
    s.emitters[0].range_multiplier = 1.5;
    s.trust.intermediates = vec!["a".into(), "b".into(), "c".into(), "d".into()];
    let errors = validate(&s);
    let text: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
    assert!(text.iter().any(|e| e.contains("duplicate entity id hospital")), "{text:?}");
    assert!(text.iter().any(|e| e.contains("range_multiplier")), "{text:?}");
    assert!(text.iter().any(|e| e.contains("deeper than 4")), "{text:?}");
}
