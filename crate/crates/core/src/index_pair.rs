//! Combinatorial index pairs on the lifted digraph.
//!
//! The pair is built by forward closure and then checked against the three
//! index pair conditions; a pair that fails them is never returned.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::invariance::relevant_endpoints;
use crate::lifted::LiftedDigraph;
use crate::pcm::PcMap;

/// The digraph data the construction needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairGraph {
    pub succ: Vec<Vec<usize>>,
    /// The vertex's image leaves the region.
    pub exits: Vec<bool>,
    /// Symmetric touching relation: same word and intersecting feasibility sets.
    pub touch: Vec<Vec<usize>>,
    /// The vertex's cell contains an endpoint of the region interior to the space.
    pub at_boundary: Vec<bool>,
}

impl PairGraph {
    pub fn from_digraph(m: &PcMap, d: &LiftedDigraph) -> Self {
        let n = d.len();
        let mut by_word: HashMap<&[usize], Vec<usize>> = HashMap::new();
        for (i, v) in d.vertices.iter().enumerate() {
            by_word.entry(v.word.symbols()).or_default().push(i);
        }
        let mut touch = vec![Vec::new(); n];
        for group in by_word.values() {
            for (a, &i) in group.iter().enumerate() {
                for &j in &group[a + 1..] {
                    if d.vertices[i].feas.intersects(&d.vertices[j].feas) {
                        touch[i].push(j);
                        touch[j].push(i);
                    }
                }
            }
        }
        for t in &mut touch {
            t.sort_unstable();
        }
        let ends = relevant_endpoints(m, d.region());
        let at_boundary = d
            .vertices
            .iter()
            .map(|v| ends.iter().any(|e| d.grid.cell(v.cell).contains(e)))
            .collect();
        PairGraph {
            succ: d.succ.clone(),
            exits: d.vertices.iter().map(|v| v.exits).collect(),
            touch,
            at_boundary,
        }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    /// Least superset of `seeds` closed under successors inside `within`.
    fn forward_closure(&self, seeds: impl IntoIterator<Item = usize>, within: Option<&BTreeSet<usize>>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(v) = stack.pop() {
            if within.is_some_and(|w| !w.contains(&v)) || !out.insert(v) {
                continue;
            }
            stack.extend(self.succ[v].iter().copied());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexPairC {
    pub p1: BTreeSet<usize>,
    pub p0: BTreeSet<usize>,
    pub cinv: BTreeSet<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairCondition {
    /// The invariant set sits inside, and away from the edge of, `p1 \ p0`.
    Isolation,
    /// `p0` is forward invariant relative to `p1`.
    PositiveInvariance,
    /// Everything leaving `p1` does so through `p0`.
    ExitSet,
}

impl PairCondition {
    pub fn number(self) -> u8 {
        match self {
            PairCondition::Isolation => 1,
            PairCondition::PositiveInvariance => 2,
            PairCondition::ExitSet => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairViolation {
    pub condition: PairCondition,
    pub vertex: usize,
    pub detail: String,
}

impl fmt::Display for PairViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition ({}) fails at vertex {}: {}", self.condition.number(), self.vertex, self.detail)
    }
}

/// The resolution is too coarse for an index pair around this invariant set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RefinementNeeded {
    pub reason: String,
}

impl fmt::Display for RefinementNeeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "refinement needed: {}", self.reason)
    }
}

/// `p1` is the forward closure of the invariant set together with the
/// vertices touching it; `p0` is the forward closure (inside `p1`) of the
/// vertices that leave the region or `p1`.
pub fn build_index_pair(g: &PairGraph, cinv: &BTreeSet<usize>) -> Result<IndexPairC, RefinementNeeded> {
    let seeds: BTreeSet<usize> = cinv
        .iter()
        .flat_map(|&v| std::iter::once(v).chain(g.touch[v].iter().copied()))
        .collect();
    let p1 = g.forward_closure(seeds, None);
    let exit: Vec<usize> = p1
        .iter()
        .copied()
        .filter(|&v| g.exits[v] || g.succ[v].iter().any(|w| !p1.contains(w)))
        .collect();
    let p0 = g.forward_closure(exit, Some(&p1));
    if let Some(v) = cinv.intersection(&p0).next() {
        return Err(RefinementNeeded {
            reason: format!("invariant vertex {v} reaches the exit set"),
        });
    }
    let pair = IndexPairC {
        p1,
        p0,
        cinv: cinv.clone(),
    };
    let violations = verify_index_pair(g, &pair);
    if let Some(v) = violations.first() {
        return Err(RefinementNeeded { reason: v.to_string() });
    }
    Ok(pair)
}

pub fn verify_index_pair(g: &PairGraph, p: &IndexPairC) -> Vec<PairViolation> {
    let mut out = Vec::new();
    let inside = |v: &usize| p.p1.contains(v) && !p.p0.contains(v);
    for &v in &p.cinv {
        if !inside(&v) {
            out.push(PairViolation {
                condition: PairCondition::Isolation,
                vertex: v,
                detail: "invariant vertex outside p1 \\ p0".into(),
            });
        } else if let Some(u) = g.touch[v].iter().find(|u| !inside(u)) {
            out.push(PairViolation {
                condition: PairCondition::Isolation,
                vertex: v,
                detail: format!("invariant vertex touches vertex {u} outside p1 \\ p0"),
            });
        } else if g.at_boundary[v] {
            out.push(PairViolation {
                condition: PairCondition::Isolation,
                vertex: v,
                detail: "invariant vertex touches the boundary of the region".into(),
            });
        }
    }
    for &v in &p.p0 {
        if let Some(w) = g.succ[v].iter().find(|w| p.p1.contains(w) && !p.p0.contains(w)) {
            out.push(PairViolation {
                condition: PairCondition::PositiveInvariance,
                vertex: v,
                detail: format!("successor {w} lies in p1 \\ p0"),
            });
        }
    }
    for &v in &p.p1 {
        if p.p0.contains(&v) {
            continue;
        }
        if g.exits[v] {
            out.push(PairViolation {
                condition: PairCondition::ExitSet,
                vertex: v,
                detail: "image leaves the region but vertex is not in p0".into(),
            });
        } else if let Some(w) = g.succ[v].iter().find(|w| !p.p1.contains(w)) {
            out.push(PairViolation {
                condition: PairCondition::ExitSet,
                vertex: v,
                detail: format!("successor {w} lies outside p1 but vertex is not in p0"),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::invariance::combinatorial_inv;
    use crate::lifted::{build_lifted, Semantics};
    use crate::numerics::Rational;
    use proptest::prelude::*;

    fn pair_for(m: &PcMap, region: &crate::RatInterval, k: usize, depth: u32) -> (LiftedDigraph, PairGraph, Result<IndexPairC, RefinementNeeded>) {
        let d = build_lifted(m, region, k, depth, Semantics::Graph).unwrap();
        let inv = combinatorial_inv(&d);
        let g = PairGraph::from_digraph(m, &d);
        let p = build_index_pair(&g, &inv.cinv);
        (d, g, p)
    }

    #[test]
    fn attractor_pair() {
        let m = fixtures::attractor();
        let (d, g, p) = pair_for(&m, &fixtures::centered_region(), 3, 4);
        let p = p.unwrap();
        assert!(p.p0.is_empty());
        // the invariant cells plus one touching cell on each side
        assert_eq!(p.p1.len(), p.cinv.len() + 2);
        assert!(p.p1.len() < d.len());
        assert!(verify_index_pair(&g, &p).is_empty());
    }

    #[test]
    fn repeller_pair() {
        let m = fixtures::repeller().minimal_partition();
        let (d, g, p) = pair_for(&m, &fixtures::centered_region(), 3, 4);
        let p = p.unwrap();
        assert!(verify_index_pair(&g, &p).is_empty());
        let last = d.grid.len() - 1;
        let ends: Vec<usize> = p.p0.iter().map(|&v| d.vertices[v].cell).collect();
        assert!(ends.contains(&0) && ends.contains(&last));
        for &v in &p.p0 {
            let c = d.cell_of(v);
            assert!(c.lo() >= &Rational::ratio(1, 4) || c.hi() <= &Rational::ratio(-1, 4));
        }
        // too coarse: the invariant cells touch the exit cells
        let (_, _, p) = pair_for(&m, &fixtures::centered_region(), 3, 3);
        assert!(p.is_err());
    }

    #[test]
    fn verification_reports_conditions() {
        let m = fixtures::repeller().minimal_partition();
        let (_, g, p) = pair_for(&m, &fixtures::centered_region(), 3, 4);
        let p = p.unwrap();
        let mut broken = p.clone();
        let exit = *p.p0.iter().find(|&&v| g.exits[v]).unwrap();
        broken.p0.remove(&exit);
        let v = verify_index_pair(&g, &broken);
        assert!(v.iter().any(|x| x.condition == PairCondition::ExitSet && x.vertex == exit));
        let mut broken = p.clone();
        let c = *p.cinv.iter().next().unwrap();
        broken.p0.insert(c);
        let v = verify_index_pair(&g, &broken);
        assert!(v.iter().any(|x| x.condition == PairCondition::Isolation && x.vertex == c));
    }

    fn induced(g: &PairGraph, keep: &BTreeSet<usize>) -> (PairGraph, Vec<usize>) {
        let ids: Vec<usize> = keep.iter().copied().collect();
        let pos: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let map = |list: &Vec<usize>| -> Vec<usize> { list.iter().filter_map(|w| pos.get(w).copied()).collect() };
        let sub = PairGraph {
            succ: ids.iter().map(|&v| map(&g.succ[v])).collect(),
            exits: ids.iter().map(|&v| g.exits[v] || g.succ[v].iter().any(|w| !keep.contains(w))).collect(),
            touch: ids.iter().map(|&v| map(&g.touch[v])).collect(),
            at_boundary: ids.iter().map(|&v| g.at_boundary[v]).collect(),
        };
        (sub, ids)
    }

    #[test]
    fn rebuilding_on_p1_is_idempotent() {
        for (m, region) in [
            (fixtures::attractor(), fixtures::centered_region()),
            (fixtures::repeller().minimal_partition(), fixtures::centered_region()),
            (fixtures::worked_map(), fixtures::worked_region()),
        ] {
            let (_, g, p) = pair_for(&m, &region, 5, 6);
            let p = p.unwrap();
            let (sub, ids) = induced(&g, &p.p1);
            let back = |s: &BTreeSet<usize>| -> BTreeSet<usize> { s.iter().map(|&i| ids[i]).collect() };
            let cinv = crate::invariance::prune(&sub.succ).cinv;
            assert_eq!(back(&cinv), p.cinv);
            let again = build_index_pair(&sub, &cinv).unwrap();
            assert_eq!(back(&again.p1), p.p1);
            assert_eq!(back(&again.p0), p.p0);
        }
    }

    fn random_pair_graph() -> impl Strategy<Value = PairGraph> {
        (2usize..25).prop_flat_map(|n| {
            (
                proptest::collection::vec(proptest::collection::vec(0..n, 0..3), n),
                proptest::collection::vec(proptest::bool::weighted(0.2), n),
                proptest::collection::vec((0..n, 0..n), 0..n),
                proptest::collection::vec(proptest::bool::weighted(0.1), n),
                proptest::collection::vec(0..n, 1..4),
            )
                .prop_map(move |(mut succ, exits, touch_pairs, at_boundary, cycle)| {
                    // plant a cycle so the invariant set is usually nonempty
                    for w in 0..cycle.len() {
                        let (a, b) = (cycle[w], cycle[(w + 1) % cycle.len()]);
                        if !succ[a].contains(&b) {
                            succ[a].push(b);
                        }
                    }
                    let mut touch = vec![Vec::new(); n];
                    for (a, b) in touch_pairs {
                        if a != b && !touch[a].contains(&b) {
                            touch[a].push(b);
                            touch[b].push(a);
                        }
                    }
                    PairGraph { succ, exits, touch, at_boundary }
                })
        })
    }

    proptest! {
        #[test]
        fn build_never_returns_an_invalid_pair(g in random_pair_graph()) {
            let cinv = crate::invariance::prune(&g.succ).cinv;
            if let Ok(p) = build_index_pair(&g, &cinv) {
                prop_assert!(verify_index_pair(&g, &p).is_empty());
                prop_assert!(p.cinv.iter().all(|v| p.p1.contains(v) && !p.p0.contains(v)));
                prop_assert!(p.p0.is_subset(&p.p1));
            }
        }
    }
}
