//! Exact periodic-orbit witnesses for a nonempty invariant set, for the map
//! itself or for one of its adjoints.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coding::CodeWord;
use crate::numerics::{FlaggedInterval, RatInterval, Rational};
use crate::pcm::{AdjointSelector, AffineBranch, PcMap};
use crate::pipeline::{run_index, IndexRun, PipelineError, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessScope {
    /// Orbits of the map itself only.
    MapOnly,
    /// Fall back to an adjoint when the orbit hits a discontinuity point.
    AnyAdjoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub orbit: Vec<Rational>,
    pub period: usize,
    #[serde(skip)]
    pub selector: AdjointSelector,
    /// `"f"` or the reassigned discontinuity points.
    pub map_id: String,
    pub symbol_word: CodeWord,
    /// Whole interval of fixed points of the composed branch, when it is one.
    pub fixed_interval: Option<RatInterval>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NotFound {
    pub max_period: usize,
    pub words_tried: usize,
    pub scope: WitnessScope,
}

/// One affine segment of one piece.
struct Letter {
    piece: usize,
    law: AffineBranch,
    dom: RatInterval,
}

fn letters(m: &PcMap, region: &RatInterval) -> Vec<Letter> {
    let mut out = Vec::new();
    for (i, p) in m.pieces().iter().enumerate() {
        let Some(c) = p.closure().meet(region) else { continue };
        for (dom, law) in p.branch.pieces_on(&c) {
            out.push(Letter {
                piece: i,
                law: law.clone(),
                dom,
            });
        }
    }
    out
}

/// Not a repetition of a shorter word.
fn is_primitive(w: &[usize]) -> bool {
    let p = w.len();
    (1..p).filter(|d| p % d == 0).all(|d| (d..p).any(|i| w[i] != w[i - d]))
}

/// Points whose orbit follows the closed domains of `word` for one period.
fn follow_set(word: &[&Letter]) -> Option<RatInterval> {
    let mut set = FlaggedInterval::closed(&word[0].dom);
    let mut law = AffineBranch::identity();
    for (i, l) in word.iter().enumerate() {
        if i > 0 {
            set = set.meet(&FlaggedInterval::closed(&l.dom).affine_preimage(&law.a, &law.b))?;
        }
        law = l.law.after(&law);
    }
    set.closure()
}

/// Selector under which `orbit` follows `pieces`: the map itself when it
/// already does, else the adjoint reassigning the offending discontinuity
/// points, if that is consistent.
fn selector_for(m: &PcMap, orbit: &[Rational], pieces: &[usize], scope: WitnessScope) -> Option<AdjointSelector> {
    let id = AdjointSelector::identity(m);
    let mut overrides: BTreeMap<Rational, usize> = BTreeMap::new();
    for (x, &s) in orbit.iter().zip(pieces) {
        if m.piece_under(&id, x).ok()? == s {
            continue;
        }
        if scope == WitnessScope::MapOnly || !id.assignment.contains_key(x) || !m.piece(s).closure_contains(x) {
            return None;
        }
        if *overrides.entry(x.clone()).or_insert(s) != s {
            return None;
        }
    }
    // a point may appear twice with the first visit under the map's own piece
    for (x, &s) in orbit.iter().zip(pieces) {
        if overrides.get(x).is_some_and(|&o| o != s) {
            return None;
        }
    }
    let overrides: Vec<(Rational, usize)> = overrides.into_iter().collect();
    AdjointSelector::with(m, &overrides).ok()
}

/// Independent check by exact iteration of the selected map.
pub fn verify_witness(m: &PcMap, region: &RatInterval, w: &Witness) -> bool {
    if w.orbit.len() != w.period || w.symbol_word.depth() != w.period || w.period == 0 {
        return false;
    }
    let mut x = w.orbit[0].clone();
    for i in 0..w.period {
        if x != w.orbit[i] || !region.contains(&x) {
            return false;
        }
        match m.piece_under(&w.selector, &x) {
            Ok(s) if s == w.symbol_word.symbols()[i] => {}
            _ => return false,
        }
        x = match m.eval_adjoint(&w.selector, &x) {
            Ok(y) => y,
            Err(_) => return false,
        };
    }
    x == w.orbit[0]
}

fn candidate(m: &PcMap, region: &RatInterval, word: &[&Letter], scope: WitnessScope) -> Option<Witness> {
    let composed = word.iter().fold(AffineBranch::identity(), |acc, l| l.law.after(&acc));
    let (x0, fixed_interval) = if composed.a.is_one() {
        if !composed.b.is_zero() {
            return None;
        }
        let set = follow_set(word)?.meet(region)?;
        (set.midpoint(), Some(set))
    } else {
        (composed.fixed_point()?, None)
    };
    let mut orbit = vec![x0];
    for l in &word[..word.len() - 1] {
        let y = l.law.eval(orbit.last().expect("orbit is nonempty"));
        orbit.push(y);
    }
    if orbit.iter().zip(word).any(|(x, l)| !region.contains(x) || !l.dom.contains(x)) {
        return None;
    }
    let pieces: Vec<usize> = word.iter().map(|l| l.piece).collect();
    let selector = selector_for(m, &orbit, &pieces, scope)?;
    let w = Witness {
        period: orbit.len(),
        orbit,
        map_id: selector.describe(m),
        selector,
        symbol_word: CodeWord(pieces),
        fixed_interval,
    };
    verify_witness(m, region, &w).then_some(w)
}

/// First periodic orbit in `region`, by period and then by word.
pub fn find_invariant_witness(m: &PcMap, region: &RatInterval, max_period: usize, scope: WitnessScope) -> Result<Witness, NotFound> {
    let alphabet = letters(m, region);
    let mut tried = 0;
    let n = alphabet.len();
    for p in 1..=max_period {
        if n == 0 {
            break;
        }
        let mut idx = vec![0usize; p];
        loop {
            if is_primitive(&idx) {
                tried += 1;
                let word: Vec<&Letter> = idx.iter().map(|&i| &alphabet[i]).collect();
                if let Some(w) = candidate(m, region, &word, scope) {
                    return Ok(w);
                }
            }
            // odometer increment, last position fastest
            let mut pos = p;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    Err(NotFound {
        max_period,
        words_tried: tried,
        scope,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WazewskiOutcome {
    /// The index could not be computed, so nothing is claimed.
    IndexUnavailable,
    TrivialIndex,
    /// The map itself has an invariant orbit in the neighborhood.
    MapOrbit { witness: Witness },
    /// Only an adjoint has one.
    AdjointOrbit { witness: Witness },
    /// Search exhausted; inconclusive.
    NotFound { bounds: NotFound },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WazewskiReport {
    pub index: IndexRun,
    pub outcome: WazewskiOutcome,
}

pub fn check_wazewski(m: &PcMap, region: &RatInterval, params: &Params) -> Result<WazewskiReport, PipelineError> {
    let (index, _) = run_index(m, region, params)?;
    let outcome = match &index.class {
        None => WazewskiOutcome::IndexUnavailable,
        Some(c) if c.trivial => WazewskiOutcome::TrivialIndex,
        Some(_) => {
            let m = m.minimal_partition();
            match find_invariant_witness(&m, region, params.max_period, WitnessScope::MapOnly) {
                Ok(witness) => WazewskiOutcome::MapOrbit { witness },
                Err(_) => match find_invariant_witness(&m, region, params.max_period, WitnessScope::AnyAdjoint) {
                    Ok(witness) => WazewskiOutcome::AdjointOrbit { witness },
                    Err(bounds) => WazewskiOutcome::NotFound { bounds },
                },
            }
        }
    };
    Ok(WazewskiReport { index, outcome })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn worked_map_fixed_point() {
        let m = fixtures::worked_map();
        let w = find_invariant_witness(&m, &fixtures::worked_region(), 1, WitnessScope::MapOnly).unwrap();
        assert_eq!(w.orbit, vec![q(2, 3)]);
        assert_eq!(w.map_id, "f");
        assert_eq!(w.symbol_word, CodeWord(vec![4]));
    }

    #[test]
    fn adjoint_only_witness() {
        let m = fixtures::adjoint_witness();
        let n = RatInterval::new(q(1, 4), q(3, 4)).unwrap();
        let miss = find_invariant_witness(&m, &n, 6, WitnessScope::MapOnly).unwrap_err();
        assert_eq!(miss.max_period, 6);
        let w = find_invariant_witness(&m, &n, 6, WitnessScope::AnyAdjoint).unwrap();
        assert_eq!((w.orbit.clone(), w.period), (vec![q(1, 2)], 1));
        assert_eq!(w.map_id, "1/2->0");
    }

    #[test]
    fn identity_reports_interval() {
        let m = fixtures::identity(RatInterval::new(q(0, 1), q(1, 1)).unwrap());
        let n = RatInterval::new(q(1, 4), q(3, 4)).unwrap();
        let w = find_invariant_witness(&m, &n, 1, WitnessScope::MapOnly).unwrap();
        assert_eq!(w.orbit, vec![q(1, 2)]);
        assert_eq!(w.fixed_interval, Some(n));
    }

    #[test]
    fn primitive_words() {
        assert!(is_primitive(&[0]));
        assert!(is_primitive(&[0, 1]));
        assert!(!is_primitive(&[1, 1]));
        assert!(!is_primitive(&[0, 1, 0, 1]));
        assert!(is_primitive(&[0, 0, 1, 0]));
    }

    #[test]
    fn tampered_witness_fails_verification() {
        let m = fixtures::worked_map();
        let n = fixtures::worked_region();
        let mut w = find_invariant_witness(&m, &n, 1, WitnessScope::MapOnly).unwrap();
        assert!(verify_witness(&m, &n, &w));
        w.orbit = vec![q(1, 2)];
        assert!(!verify_witness(&m, &n, &w));
    }

    #[test]
    fn repeller_period_two() {
        let m = fixtures::repeller().minimal_partition();
        let n = RatInterval::new(q(1, 8), q(1, 1)).unwrap();
        let w = find_invariant_witness(&m, &n, 2, WitnessScope::MapOnly).unwrap();
        // 2/3 is fixed by 2 - 2x
        assert_eq!(w.orbit, vec![q(2, 3)]);
    }
}
