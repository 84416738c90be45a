//! JSON formats for frames, valuations and world maps.
//!
//! A frame file looks like
//!
//! ```json
//! {"alphabet": ["a", "b"], "worlds": 3, "relations": {"a": [[0, 1]], "b": []}}
//! ```
//!
//! Relations missing from `relations` are empty. A valuation file maps
//! variable names to world lists, `{"p0": [1, 2]}`; a map file is
//! `{"map": [0, 0, 1]}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;
use serde_json::Value;

use crate::{Error, Frame, ModalityAlphabet, Relation, Result, WorldSet};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameFile {
    alphabet: Vec<String>,
    worlds: usize,
    #[serde(default)]
    relations: BTreeMap<String, Vec<[usize; 2]>>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Invalid(e.to_string())
}

pub fn frame_from_value(v: Value) -> Result<Frame> {
    let file: FrameFile = serde_json::from_value(v).map_err(json_error)?;
    let alphabet = ModalityAlphabet::new(file.alphabet)?;
    if let Some(name) = file.relations.keys().find(|k| !alphabet.contains(k)) {
        return Err(Error::UnknownModality(name.clone()));
    }
    let relations = alphabet
        .names()
        .iter()
        .map(|name| {
            let pairs = file.relations.get(name).map(Vec::as_slice).unwrap_or(&[]);
            Relation::try_from_pairs(file.worlds, pairs.iter().map(|p| (p[0], p[1])))
        })
        .collect::<Result<Vec<_>>>()?;
    Frame::new(alphabet, file.worlds, relations)
}

pub fn frame_from_json(text: &str) -> Result<Frame> {
    frame_from_value(serde_json::from_str(text).map_err(json_error)?)
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Serializes relations in alphabet order, one relation per line.
pub fn frame_to_json(f: &Frame) -> String {
    let mut out = String::from("{\n  \"alphabet\": [");
    let names: Vec<String> = f.alphabet().names().iter().map(|n| quote(n)).collect();
    out.push_str(&names.join(", "));
    let _ = write!(out, "],\n  \"worlds\": {},\n  \"relations\": {{", f.size());
    for (i, name) in f.alphabet().names().iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        let pairs: Vec<String> = f.relation(i).pairs().map(|(a, b)| format!("[{a}, {b}]")).collect();
        let _ = write!(out, "    {}: [{}]", quote(name), pairs.join(", "));
    }
    if !f.alphabet().is_empty() {
        out.push_str("\n  ");
    }
    out.push_str("}\n}\n");
    out
}

/// The frame as a JSON value, for embedding in reports.
pub fn frame_to_value(f: &Frame) -> Value {
    serde_json::from_str(&frame_to_json(f)).expect("frame JSON is well formed")
}

/// Parses a variable name `pN`.
pub fn variable_index(name: &str) -> Result<u32> {
    name.strip_prefix('p')
        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| Error::Invalid(format!("bad variable name `{name}`")))
}

/// Reads `{"p0": [...], ...}` into sets indexed by variable; unlisted
/// variables below the largest one are empty.
pub fn valuation_from_json(text: &str, n: usize) -> Result<Vec<WorldSet>> {
    let raw: BTreeMap<String, Vec<usize>> = serde_json::from_str(text).map_err(json_error)?;
    let mut out: Vec<WorldSet> = Vec::new();
    for (name, worlds) in raw {
        let i = variable_index(&name)? as usize;
        if out.len() <= i {
            out.resize(i + 1, WorldSet::empty(n));
        }
        out[i] = WorldSet::try_from_worlds(n, worlds)?;
    }
    Ok(out)
}

pub fn valuation_to_value(sets: &[WorldSet]) -> Value {
    let map: serde_json::Map<String, Value> = sets
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("p{i}"), Value::from(s.to_vec())))
        .collect();
    Value::Object(map)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    map: Vec<usize>,
}

pub fn map_from_json(text: &str) -> Result<Vec<usize>> {
    let m: MapFile = serde_json::from_str(text).map_err(json_error)?;
    Ok(m.map)
}

pub fn map_to_json(map: &[usize]) -> String {
    format!("{}\n", serde_json::json!({ "map": map }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_round_trip() {
        let f = Frame::new(
            ModalityAlphabet::of(&["b", "a"]),
            3,
            vec![Relation::from_pairs(3, [(0, 1), (2, 2)]), Relation::empty(3)],
        )
        .unwrap();
        let text = frame_to_json(&f);
        assert_eq!(
            text,
            "{\n  \"alphabet\": [\"b\", \"a\"],\n  \"worlds\": 3,\n  \"relations\": {\n    \"b\": [[0, 1], [2, 2]],\n    \"a\": []\n  }\n}\n"
        );
        assert_eq!(frame_from_json(&text).unwrap(), f);
        let empty = Frame::discrete(ModalityAlphabet::of(&[]), 0);
        assert_eq!(frame_from_json(&frame_to_json(&empty)).unwrap(), empty);
    }

    #[test]
    fn frame_errors() {
        assert!(frame_from_json(r#"{"alphabet":["a"],"worlds":2,"relations":{"a":[[0,2]]}}"#).is_err());
        assert_eq!(
            frame_from_json(r#"{"alphabet":["a"],"worlds":2,"relations":{"b":[]}}"#),
            Err(Error::UnknownModality("b".into()))
        );
        assert!(frame_from_json(r#"{"alphabet":["a"],"worlds":2,"extra":1}"#).is_err());
        assert!(frame_from_json(r#"{"alphabet":["a","a"],"worlds":2}"#).is_err());
        let f = frame_from_json(r#"{"alphabet":["a"],"worlds":2}"#).unwrap();
        assert!(f.relation(0).is_empty());
    }

    #[test]
    fn valuation_files() {
        let v = valuation_from_json(r#"{"p2":[1],"p0":[0,1]}"#, 2).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[0].to_vec(), vec![0, 1]);
        assert!(v[1].is_empty());
        assert_eq!(valuation_to_value(&v).to_string(), r#"{"p0":[0,1],"p1":[],"p2":[1]}"#);
        assert!(valuation_from_json(r#"{"q":[0]}"#, 2).is_err());
        assert!(valuation_from_json(r#"{"p0":[5]}"#, 2).is_err());
    }

    #[test]
    fn map_files() {
        assert_eq!(map_from_json(&map_to_json(&[0, 0, 1])).unwrap(), vec![0, 0, 1]);
    }
}
