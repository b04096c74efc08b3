//! Combinatorial invariant sets and the isolation and compatibility checks.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::lifted::LiftedDigraph;
use crate::numerics::{FlaggedInterval, RatInterval, Rational};
use crate::pcm::{AdjointSelector, PcMap};

/// Vertices on bi-infinite, backward-infinite and forward-infinite paths.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InvResult {
    pub cinv: BTreeSet<usize>,
    pub cinv_minus: BTreeSet<usize>,
    pub cinv_plus: BTreeSet<usize>,
    /// Sweeps until the bidirectional pruning stabilized.
    pub rounds: usize,
}

fn predecessors(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut pred = vec![Vec::new(); succ.len()];
    for (u, out) in succ.iter().enumerate() {
        for &v in out {
            pred[v].push(u);
        }
    }
    pred
}

/// Synchronous pruning; returns survivors and the number of sweeps.
fn sweep(succ: &[Vec<usize>], pred: &[Vec<usize>], need_succ: bool, need_pred: bool) -> (Vec<bool>, usize) {
    let n = succ.len();
    let mut alive = vec![true; n];
    let mut rounds = 0;
    loop {
        let dead: Vec<usize> = (0..n)
            .filter(|&v| alive[v])
            .filter(|&v| {
                (need_succ && !succ[v].iter().any(|&w| alive[w])) || (need_pred && !pred[v].iter().any(|&w| alive[w]))
            })
            .collect();
        rounds += 1;
        if dead.is_empty() {
            return (alive, rounds);
        }
        for v in dead {
            alive[v] = false;
        }
    }
}

fn to_set(mask: &[bool]) -> BTreeSet<usize> {
    mask.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i).collect()
}

/// Iteratively deletes vertices lacking successors or predecessors among the survivors.
pub fn prune(succ: &[Vec<usize>]) -> InvResult {
    let pred = predecessors(succ);
    let (both, rounds) = sweep(succ, &pred, true, true);
    let (plus, _) = sweep(succ, &pred, true, false);
    let (minus, _) = sweep(succ, &pred, false, true);
    InvResult {
        cinv: to_set(&both),
        cinv_minus: to_set(&minus),
        cinv_plus: to_set(&plus),
        rounds,
    }
}

/// Worklist pruning that visits vertices in the given order; used to check
/// that the result does not depend on deletion order.
pub fn prune_in_order(succ: &[Vec<usize>], order: &[usize]) -> BTreeSet<usize> {
    let n = succ.len();
    let pred = predecessors(succ);
    let mut alive = vec![true; n];
    let mut out_deg: Vec<usize> = succ.iter().map(Vec::len).collect();
    let mut in_deg: Vec<usize> = pred.iter().map(Vec::len).collect();
    let mut queue: VecDeque<usize> = order.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        if !alive[v] || (out_deg[v] > 0 && in_deg[v] > 0) {
            continue;
        }
        alive[v] = false;
        for &w in &succ[v] {
            in_deg[w] -= 1;
            if alive[w] && in_deg[w] == 0 {
                queue.push_back(w);
            }
        }
        for &w in &pred[v] {
            out_deg[w] -= 1;
            if alive[w] && out_deg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    to_set(&alive)
}

pub fn combinatorial_inv(d: &LiftedDigraph) -> InvResult {
    prune(&d.succ)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Certified,
    Violated,
    Unknown,
}

impl Status {
    /// Violated dominates Unknown, which dominates Certified.
    pub fn combine(self, other: Status) -> Status {
        match (self, other) {
            (Status::Violated, _) | (_, Status::Violated) => Status::Violated,
            (Status::Unknown, _) | (_, Status::Unknown) => Status::Unknown,
            _ => Status::Certified,
        }
    }
}

/// How close to a relevant endpoint the invariant set may come.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum IsolationMode {
    /// No invariant cell may contain the endpoint.
    #[default]
    Touch,
    /// Additionally, the cell next to the endpoint cell must be free.
    Halo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndpointCheck {
    pub endpoint: Rational,
    /// Invariant vertices too close to the endpoint.
    pub touching: Vec<usize>,
    /// Exact periodic orbit through the endpoint, when one was found.
    pub periodic_orbit: Option<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsolationVerdict {
    pub status: Status,
    pub mode: IsolationMode,
    /// Endpoints of the neighborhood that are not endpoints of the space.
    pub relevant_endpoints: Vec<Rational>,
    pub endpoints: Vec<EndpointCheck>,
    pub max_period: usize,
}

/// Endpoints of `region` that are interior to the space.
pub fn relevant_endpoints(m: &PcMap, region: &RatInterval) -> Vec<Rational> {
    let mut out = Vec::new();
    if region.lo() != m.space().lo() {
        out.push(region.lo().clone());
    }
    if region.hi() != m.space().hi() && region.hi() != region.lo() {
        out.push(region.hi().clone());
    }
    out
}

/// Orbit of `x` under `f` if it returns to `x` within `max_period` steps
/// without leaving `region`.
pub fn periodic_orbit(m: &PcMap, region: &RatInterval, x: &Rational, max_period: usize) -> Option<Vec<Rational>> {
    let mut orbit = vec![x.clone()];
    let mut y = x.clone();
    for _ in 0..max_period {
        y = m.eval(&y).ok()?;
        if !region.contains(&y) {
            return None;
        }
        if &y == x {
            return Some(orbit);
        }
        orbit.push(y.clone());
    }
    None
}

/// Isolation test on the graph digraph of `region`.
pub fn is_isolating(m: &PcMap, d: &LiftedDigraph, inv: &InvResult, mode: IsolationMode, max_period: usize) -> IsolationVerdict {
    let region = d.region();
    let relevant = relevant_endpoints(m, region);
    let last = d.grid.len() - 1;
    let mut status = Status::Certified;
    let mut endpoints = Vec::new();
    for e in &relevant {
        let near: Vec<usize> = match (e == region.lo(), mode) {
            (true, IsolationMode::Touch) => vec![0],
            (true, IsolationMode::Halo) => vec![0, 1.min(last)],
            (false, IsolationMode::Touch) => vec![last],
            (false, IsolationMode::Halo) => vec![last, last.saturating_sub(1)],
        };
        let touching: Vec<usize> = inv
            .cinv
            .iter()
            .copied()
            .filter(|&v| near.contains(&d.vertices[v].cell))
            .collect();
        let mut periodic = None;
        if !touching.is_empty() {
            periodic = periodic_orbit(m, region, e, max_period);
            status = status.combine(if periodic.is_some() { Status::Violated } else { Status::Unknown });
        }
        endpoints.push(EndpointCheck {
            endpoint: e.clone(),
            touching,
            periodic_orbit: periodic,
        });
    }
    IsolationVerdict {
        status,
        mode,
        relevant_endpoints: relevant,
        endpoints,
        max_period,
    }
}

/// Result of an exact backward-orbit search from a boundary point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BackwardOutcome {
    /// Every backward branch dies inside the bound.
    NoOrbit { explored: usize },
    /// A backward chain revisits a point: `chain[0]` is the boundary point,
    /// each next entry a preimage of the previous one, the last entry equal
    /// to an earlier one.
    Cycle { chain: Vec<Rational> },
    /// The chain reaches a point that is attracted backward by a repelling
    /// fixed point of a single piece, so the backward orbit continues forever.
    Repeller { chain: Vec<Rational>, fixed_point: Rational, piece: usize },
    /// Some backward branch is still alive at the depth bound.
    BoundExhausted { bound: usize },
    /// A constant branch has a whole interval of preimages.
    Continuum { piece: usize, value: Rational },
}

impl BackwardOutcome {
    pub fn status(&self) -> Status {
        match self {
            BackwardOutcome::NoOrbit { .. } => Status::Certified,
            BackwardOutcome::Cycle { .. } | BackwardOutcome::Repeller { .. } => Status::Violated,
            BackwardOutcome::BoundExhausted { .. } | BackwardOutcome::Continuum { .. } => Status::Unknown,
        }
    }
}

struct BackwardSearch<'a> {
    m: &'a PcMap,
    g: &'a AdjointSelector,
    region: &'a RatInterval,
    bound: usize,
    dead: BTreeSet<Rational>,
    explored: usize,
    unknown: Option<BackwardOutcome>,
}

enum Pre {
    Points(Vec<(Rational, usize)>),
    Continuum(usize),
}

impl BackwardSearch<'_> {
    /// Exact preimages of `y` under the adjoint inside the region.
    fn preimages(&self, y: &Rational) -> Pre {
        let mut out: Vec<(Rational, usize)> = Vec::new();
        for (i, p) in self.m.pieces().iter().enumerate() {
            for (dom, law) in p.branch.pieces_on(&p.closure()) {
                let Some(dom) = dom.meet(self.region) else { continue };
                if law.a.is_zero() {
                    if &law.b == y && self.owns_some(i, &dom) {
                        return Pre::Continuum(i);
                    }
                    continue;
                }
                let x = law.solve(y).expect("nonzero slope");
                let owned = dom.contains(&x) && self.m.piece_under(self.g, &x).ok() == Some(i);
                if owned && !out.iter().any(|(z, _)| z == &x) {
                    out.push((x, i));
                }
            }
        }
        Pre::Points(out)
    }

    fn owns_some(&self, i: usize, dom: &RatInterval) -> bool {
        if self.m.piece(i).span.meet(&FlaggedInterval::closed(dom)).is_some() {
            return true;
        }
        self.g
            .assignment
            .iter()
            .any(|(d, &o)| o == i && dom.contains(d))
    }

    /// A repelling fixed point of one affine segment whose symmetric
    /// neighbourhood through `x` is owned by that piece and lies in the region.
    fn repeller_through(&self, x: &Rational) -> Option<(Rational, usize)> {
        for (i, p) in self.m.pieces().iter().enumerate() {
            for (dom, law) in p.branch.pieces_on(&p.closure()) {
                if law.a.abs() <= Rational::one() {
                    continue;
                }
                let fp = law.fixed_point().expect("slope is not 1");
                let r = (x - &fp).abs();
                let Ok(j) = RatInterval::new(&fp - &r, &fp + &r) else { continue };
                let owned = [j.lo(), j.hi()]
                    .iter()
                    .all(|e| self.m.piece_under(self.g, e).ok() == Some(i));
                if j.is_subset_of(&dom) && j.is_subset_of(self.region) && owned {
                    return Some((fp, i));
                }
            }
        }
        None
    }

    fn run(&mut self, path: &mut Vec<Rational>) -> Option<BackwardOutcome> {
        let y = path.last().expect("path starts at the boundary point").clone();
        self.explored += 1;
        if let Some((fixed_point, piece)) = self.repeller_through(&y) {
            return Some(BackwardOutcome::Repeller {
                chain: path.clone(),
                fixed_point,
                piece,
            });
        }
        let pre = match self.preimages(&y) {
            Pre::Continuum(piece) => {
                self.unknown = Some(BackwardOutcome::Continuum { piece, value: y });
                return None;
            }
            Pre::Points(p) => p,
        };
        let mut alive = false;
        for (x, _) in pre {
            if path.contains(&x) {
                let mut chain = path.clone();
                chain.push(x);
                return Some(BackwardOutcome::Cycle { chain });
            }
            if self.dead.contains(&x) {
                continue;
            }
            if path.len() > self.bound {
                alive = true;
                continue;
            }
            path.push(x);
            let found = self.run(path);
            let x = path.pop().expect("pushed above");
            if found.is_some() {
                return found;
            }
            if !self.dead.contains(&x) {
                alive = true;
            }
        }
        if alive {
            if self.unknown.is_none() {
                self.unknown = Some(BackwardOutcome::BoundExhausted { bound: self.bound });
            }
        } else {
            self.dead.insert(y);
        }
        None
    }
}

/// Exact search for a backward orbit of `b` inside `region` under the adjoint `g`.
pub fn backward_search(m: &PcMap, g: &AdjointSelector, region: &RatInterval, b: &Rational, bound: usize) -> BackwardOutcome {
    let mut s = BackwardSearch {
        m,
        g,
        region,
        bound,
        dead: BTreeSet::new(),
        explored: 0,
        unknown: None,
    };
    let mut path = vec![b.clone()];
    if let Some(v) = s.run(&mut path) {
        return v;
    }
    if let Some(u) = s.unknown {
        return u;
    }
    BackwardOutcome::NoOrbit { explored: s.explored }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdjointCheck {
    pub selector: String,
    pub outcome: BackwardOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryCheck {
    pub point: Rational,
    /// No backward-infinite vertex of the closure digraph contains the point,
    /// which rules it out for every adjoint at once.
    pub excluded: bool,
    pub status: Status,
    /// Per-adjoint exact searches; empty when excluded.
    pub adjoints: Vec<AdjointCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompatVerdict {
    pub status: Status,
    /// Boundary is taken relative to the space.
    pub boundary_points: Vec<Rational>,
    pub checks: Vec<BoundaryCheck>,
    pub backward_bound: usize,
}

/// Compatibility test: `closure` is the closure-semantics digraph of the
/// region and `inv` its invariant sets.
pub fn is_compatible(m: &PcMap, closure: &LiftedDigraph, inv: &InvResult, backward_bound: usize) -> CompatVerdict {
    let region = closure.region();
    let d = m.discontinuity_set();
    let boundary: Vec<Rational> = relevant_endpoints(m, region)
        .into_iter()
        .filter(|e| d.contains(e))
        .collect();
    let mut status = Status::Certified;
    let mut checks = Vec::new();
    let adjoints = m.list_adjoints();
    for b in &boundary {
        let excluded = !inv
            .cinv_minus
            .iter()
            .any(|&v| closure.vertices[v].feas.contains(b));
        let mut per = Vec::new();
        let mut st = Status::Certified;
        if !excluded {
            for g in &adjoints {
                let outcome = backward_search(m, g, region, b, backward_bound);
                st = st.combine(outcome.status());
                per.push(AdjointCheck {
                    selector: g.describe(m),
                    outcome,
                });
            }
        }
        status = status.combine(st);
        checks.push(BoundaryCheck {
            point: b.clone(),
            excluded,
            status: st,
            adjoints: per,
        });
    }
    CompatVerdict {
        status,
        boundary_points: boundary,
        checks,
        backward_bound,
    }
}
