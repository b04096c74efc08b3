//! Schema-versioned reports with a JSON form and a plain-text form.
//!
//! JSON output has deterministic field and element order and prints every
//! rational exactly, so two runs with the same inputs give identical bytes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::coding::CodeWord;
use crate::invariance::{BackwardOutcome, CompatVerdict, IsolationVerdict};
use crate::linalg::IntMatrix;
use crate::numerics::{RatInterval, Rational};
use crate::pcm::PcMap;
use crate::pipeline::{IndexRun, IsolationRun, Outcome};
use crate::wazewski::{WazewskiOutcome, WazewskiReport};

pub const SCHEMA_VERSION: &str = "pcm-conley/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapSummary {
    pub name: Option<String>,
    pub space: RatInterval,
    pub pieces: usize,
    pub discontinuities: Vec<Rational>,
    pub minimal_partition_pieces: usize,
    pub adjoint_count: usize,
}

impl MapSummary {
    pub fn of(m: &PcMap) -> MapSummary {
        let mp = m.minimal_partition();
        MapSummary {
            name: m.name.clone(),
            space: m.space().clone(),
            pieces: m.symbol_count(),
            discontinuities: mp.discontinuity_set(),
            minimal_partition_pieces: mp.symbol_count(),
            adjoint_count: mp.adjoint_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PieceLine {
    pub span: String,
    pub branch: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Body {
    Validate {
        valid: bool,
        violations: Vec<String>,
    },
    Partition {
        pieces: Vec<PieceLine>,
        /// Minimality holds among partitions into intervals only.
        note: String,
    },
    Adjoints {
        discontinuities: Vec<Rational>,
        selectors: Vec<String>,
    },
    Code {
        point: Rational,
        selector: String,
        word: CodeWord,
    },
    Isolate(IsolationRun),
    Index(IndexRun),
    Wazewski(WazewskiReport),
    PaperExample(WazewskiReport),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub map: Option<MapSummary>,
    #[serde(flatten)]
    pub body: Body,
    pub exit_code: i32,
}

impl Report {
    pub fn new(map: Option<&PcMap>, body: Body) -> Report {
        let exit_code = exit_code_of(&body);
        Report {
            schema: SCHEMA_VERSION,
            map: map.map(MapSummary::of),
            body,
            exit_code,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(m) = &self.map {
            let name = m.name.as_deref().unwrap_or("(unnamed)");
            let _ = writeln!(out, "map {name} on {}: {} pieces, {} after merging", m.space, m.pieces, m.minimal_partition_pieces);
            let _ = writeln!(out, "discontinuities: {}", list(&m.discontinuities));
            let _ = writeln!(out, "adjoint maps: {}", m.adjoint_count);
        }
        match &self.body {
            Body::Validate { valid, violations } => {
                let _ = writeln!(out, "valid: {valid}");
                for v in violations {
                    let _ = writeln!(out, "  {v}");
                }
            }
            Body::Partition { pieces, note } => {
                for (i, p) in pieces.iter().enumerate() {
                    let _ = writeln!(out, "  piece {i}: {} -> {}", p.span, p.branch);
                }
                let _ = writeln!(out, "note: {note}");
            }
            Body::Adjoints { selectors, .. } => {
                for s in selectors {
                    let _ = writeln!(out, "  {s}");
                }
            }
            Body::Code { point, selector, word } => {
                let _ = writeln!(out, "code of {point} under {selector}: {}", word.compact());
            }
            Body::Isolate(r) => write_isolation(&mut out, r),
            Body::Index(r) => write_index(&mut out, r),
            Body::Wazewski(r) | Body::PaperExample(r) => {
                write_index(&mut out, &r.index);
                write_wazewski(&mut out, &r.outcome);
            }
        }
        let _ = writeln!(out, "exit code: {}", self.exit_code);
        out
    }
}

fn exit_code_of(body: &Body) -> i32 {
    match body {
        Body::Validate { valid, .. } => i32::from(!valid),
        Body::Partition { .. } | Body::Adjoints { .. } | Body::Code { .. } => 0,
        Body::Isolate(r) => r.outcome.exit_code(),
        Body::Index(r) => r.outcome.exit_code(),
        Body::Wazewski(r) | Body::PaperExample(r) => r.index.outcome.exit_code(),
    }
}

fn list<T: std::fmt::Display>(xs: &[T]) -> String {
    if xs.is_empty() {
        return "none".to_string();
    }
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn outcome_line(o: &Outcome) -> String {
    match o {
        Outcome::Success => "success".to_string(),
        Outcome::Violated { stage } => format!("violated ({stage})"),
        Outcome::Unknown { reason } => format!("unknown: {reason}"),
    }
}

fn write_verdicts(out: &mut String, iso: &IsolationVerdict, compat: &CompatVerdict) {
    let _ = writeln!(out, "isolation: {:?} ({:?} mode)", iso.status, iso.mode);
    for e in &iso.endpoints {
        let orbit = match &e.periodic_orbit {
            Some(o) => format!(", periodic orbit {}", list(o)),
            None => String::new(),
        };
        let _ = writeln!(out, "  endpoint {}: {} touching vertices{orbit}", e.endpoint, e.touching.len());
    }
    let _ = writeln!(out, "compatibility: {:?}", compat.status);
    for b in &compat.checks {
        if b.excluded {
            let _ = writeln!(out, "  {}: excluded by the combinatorial backward-invariant set", b.point);
            continue;
        }
        let _ = writeln!(out, "  {}: {:?}", b.point, b.status);
        for a in &b.adjoints {
            let what = match &a.outcome {
                BackwardOutcome::NoOrbit { explored } => format!("no backward orbit ({explored} points explored)"),
                BackwardOutcome::Cycle { chain } => format!("backward cycle {}", list(chain)),
                BackwardOutcome::Repeller { chain, fixed_point, .. } => {
                    format!("backward chain {} converging to {fixed_point}", list(chain))
                }
                BackwardOutcome::BoundExhausted { bound } => format!("bound {bound} exhausted"),
                BackwardOutcome::Continuum { piece, value } => format!("piece {piece} is constant {value} there"),
            };
            let _ = writeln!(out, "    {}: {what}", a.selector);
        }
    }
}

fn write_attempts(out: &mut String, attempts: &[crate::pipeline::Attempt]) {
    for a in attempts {
        let _ = writeln!(
            out,
            "  attempt k={} depth={}: {} vertices, {} edges, |cinv|={}: {}",
            a.code_depth, a.grid_depth, a.graph_vertices, a.graph_edges, a.cinv, a.result
        );
    }
}

fn write_isolation(out: &mut String, r: &IsolationRun) {
    let _ = writeln!(out, "neighborhood {}", r.region);
    write_attempts(out, &r.attempts);
    write_verdicts(out, &r.isolation, &r.compatibility);
    let _ = writeln!(out, "combinatorial invariant set covers {}", list(&r.cinv_cover));
    let _ = writeln!(out, "outcome: {}", outcome_line(&r.outcome));
}

fn matrix_line(m: &IntMatrix) -> String {
    match m.to_i64_rows() {
        Some(rows) => format!("{rows:?}"),
        None => format!("{m:?}"),
    }
}

fn write_index(out: &mut String, r: &IndexRun) {
    let _ = writeln!(out, "neighborhood {}", r.region);
    write_attempts(out, &r.attempts);
    write_verdicts(out, &r.isolation, &r.compatibility);
    if let Some(p) = &r.pair {
        let _ = writeln!(out, "index pair: |P1|={} |P0|={} |cinv|={}", p.p1, p.p0, p.cinv);
    }
    if let Some(h) = &r.homology {
        let _ = writeln!(out, "P1 components: {}", h.components);
        let _ = writeln!(out, "relative homology: rank H0 = {}, rank H1 = {}, torsion {}", h.betti0, h.betti1, list(&h.torsion));
    }
    if let Some(g) = &r.index_map {
        for (k, gens) in [(0, &g.generators0), (1, &g.generators1)] {
            let _ = writeln!(out, "index map, degree {k}: {}", matrix_line(g.degree(k)));
            for (i, x) in gens.iter().enumerate() {
                let _ = writeln!(out, "  generator {i}: {} word {}", x.base, x.word.compact());
            }
        }
    }
    if let Some(c) = &r.class {
        let _ = writeln!(out, "homological Conley index: {}", if c.trivial { "trivial" } else { "nontrivial" });
        for d in &c.degrees {
            let poly: Vec<String> = d.char_poly_reduced.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(
                out,
                "  degree {}: Leray block {}x{}, reduced characteristic polynomial [{}]",
                d.degree,
                d.leray.rows(),
                d.leray.cols(),
                poly.join(", ")
            );
        }
    }
    if let Some(s) = &r.stability {
        let _ = writeln!(
            out,
            "stability probe at k={} depth={}: {}",
            s.code_depth,
            s.grid_depth,
            if s.unchanged { "unchanged" } else { "changed" }
        );
    }
    let _ = writeln!(out, "outcome: {}", outcome_line(&r.outcome));
}

fn write_wazewski(out: &mut String, o: &WazewskiOutcome) {
    let line = match o {
        WazewskiOutcome::IndexUnavailable => "no index, no witness sought".to_string(),
        WazewskiOutcome::TrivialIndex => "index trivial, no witness sought".to_string(),
        WazewskiOutcome::MapOrbit { witness: w } => format!(
            "invariant orbit of the map itself: {} (period {}, itinerary {})",
            list(&w.orbit),
            w.period,
            w.symbol_word.compact()
        ),
        WazewskiOutcome::AdjointOrbit { witness: w } => format!(
            "invariant orbit of the adjoint {}: {} (period {}, itinerary {})",
            w.map_id,
            list(&w.orbit),
            w.period,
            w.symbol_word.compact()
        ),
        WazewskiOutcome::NotFound { bounds } => format!(
            "no periodic orbit up to period {} ({} words tried); inconclusive",
            bounds.max_period, bounds.words_tried
        ),
    };
    let _ = writeln!(out, "witness: {line}");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pipeline::Params;
    use crate::wazewski::check_wazewski;

    #[test]
    fn json_is_schema_tagged_and_exact() {
        let m = fixtures::attractor();
        let r = check_wazewski(&m, &fixtures::centered_region(), &Params::default()).unwrap();
        let rep = Report::new(Some(&m), Body::Wazewski(r));
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(v["schema"], SCHEMA_VERSION);
        assert_eq!(v["command"], "wazewski");
        assert_eq!(v["index"]["region"][0], "-1/2");
        assert_eq!(v["exit_code"], 0);
        assert!(rep.to_text().contains("nontrivial"));
    }

    #[test]
    fn invalid_map_exits_one() {
        let rep = Report::new(None, Body::Validate { valid: false, violations: vec!["gap".into()] });
        assert_eq!(rep.exit_code, 1);
    }
}
