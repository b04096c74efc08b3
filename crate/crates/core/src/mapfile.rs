//! JSON map-definition files.
//!
//! ```json
//! {
//!   "name": "optional label",
//!   "space": { "lo": "0", "hi": "1" },
//!   "pieces": [
//!     { "lo": "0", "hi": "1/2", "lo_closed": true, "hi_closed": false, "a": "1", "b": "0" }
//!   ]
//! }
//! ```
//!
//! Numbers are exact rationals written as `"p/q"` or `"p"` strings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{FlaggedInterval, RatInterval, Rational};
use crate::pcm::{Branch, PcMap, Violation};

#[derive(Debug, Error)]
pub enum MapFileError {
    /// Syntax or type error, with the JSON path of the offending field.
    #[error("{field}: {message} (line {line}, column {column})")]
    Parse {
        field: String,
        message: String,
        line: usize,
        column: usize,
    },
    #[error("space: lo {lo} exceeds hi {hi}")]
    Space { lo: Rational, hi: Rational },
    #[error("invalid map: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("piece {0} has a piecewise affine branch, which the file format cannot express")]
    NotAffine(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDef {
    lo: Rational,
    hi: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceDef {
    lo: Rational,
    hi: Rational,
    lo_closed: bool,
    hi_closed: bool,
    a: Rational,
    b: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    space: SpaceDef,
    pieces: Vec<PieceDef>,
}

/// Parses and validates a map definition.
pub fn parse_map(text: &str) -> Result<PcMap, MapFileError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let def: MapDef = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = match e.path().to_string() {
            p if p == "." => "document".to_string(),
            p => p,
        };
        let inner = e.into_inner();
        let message = inner.to_string();
        // serde_json appends its own position; keep the bare message
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        MapFileError::Parse {
            field,
            message,
            line: inner.line(),
            column: inner.column(),
        }
    })?;
    let space = RatInterval::new(def.space.lo.clone(), def.space.hi.clone()).map_err(|_| MapFileError::Space {
        lo: def.space.lo,
        hi: def.space.hi,
    })?;
    let pieces = def
        .pieces
        .into_iter()
        .map(|p| {
            (
                FlaggedInterval::new(p.lo, p.hi, p.lo_closed, p.hi_closed),
                Branch::affine(p.a, p.b),
            )
        })
        .collect();
    let m = PcMap::unchecked(space, pieces);
    let violations = m.validate();
    if !violations.is_empty() {
        return Err(MapFileError::Invalid(violations));
    }
    Ok(match def.name {
        Some(n) => m.with_name(n),
        None => m,
    })
}

pub fn read_map(path: &std::path::Path) -> Result<PcMap, MapFileError> {
    parse_map(&std::fs::read_to_string(path)?)
}

/// Pretty-printed JSON that [`parse_map`] reads back to an equal map.
pub fn serialize_map(m: &PcMap) -> Result<String, MapFileError> {
    let pieces = m
        .pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let law = p.branch.as_affine().ok_or(MapFileError::NotAffine(i))?;
            Ok(PieceDef {
                lo: p.span.lo.clone(),
                hi: p.span.hi.clone(),
                lo_closed: p.span.lo_closed,
                hi_closed: p.span.hi_closed,
                a: law.a.clone(),
                b: law.b.clone(),
            })
        })
        .collect::<Result<Vec<_>, MapFileError>>()?;
    let def = MapDef {
        name: m.name.clone(),
        space: SpaceDef {
            lo: m.space().lo().clone(),
            hi: m.space().hi().clone(),
        },
        pieces,
    };
    Ok(serde_json::to_string_pretty(&def).expect("map definitions always serialize") + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_round_trip() {
        for f in fixtures::all() {
            let text = serialize_map(&f.map).unwrap();
            let back = parse_map(&text).unwrap();
            assert_eq!(back, f.map);
            assert_eq!(serialize_map(&back).unwrap(), text);
        }
    }

    #[test]
    fn bad_rational_names_field_and_line() {
        let text = r#"{
  "space": {"lo": "0", "hi": "1"},
  "pieces": [
    {"lo": "0", "hi": "1", "lo_closed": true, "hi_closed": true,
     "a": "1/0", "b": "0"}
  ]
}"#;
        match parse_map(text).unwrap_err() {
            MapFileError::Parse { field, line, .. } => {
                assert_eq!(field, "pieces[0].a");
                assert_eq!(line, 5);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn missing_field() {
        let text = r#"{"space": {"lo": "0", "hi": "1"}, "pieces": [{"lo": "0", "hi": "1", "lo_closed": true, "a": "1", "b": "0"}]}"#;
        let e = parse_map(text).unwrap_err().to_string();
        assert!(e.contains("hi_closed"), "{e}");
        assert!(e.contains("pieces[0]"), "{e}");
    }

    #[test]
    fn overlap_is_reported() {
        let text = r#"{"space": {"lo": "0", "hi": "1"}, "pieces": [
            {"lo": "0", "hi": "1/2", "lo_closed": true, "hi_closed": true, "a": "1", "b": "0"},
            {"lo": "1/2", "hi": "1", "lo_closed": true, "hi_closed": true, "a": "1", "b": "0"}]}"#;
        match parse_map(text).unwrap_err() {
            MapFileError::Invalid(v) => assert!(v.iter().any(|x| matches!(x, Violation::Overlap { .. }))),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn name_is_optional() {
        let text = r#"{"space": {"lo": "0", "hi": "1"}, "pieces": [{"lo": "0", "hi": "1", "lo_closed": true, "hi_closed": true, "a": "1/2", "b": "0"}]}"#;
        assert_eq!(parse_map(text).unwrap().name, None);
    }
}
