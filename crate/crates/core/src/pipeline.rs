//! Full index computation at a fixed resolution, and the refinement loop
//! that retries at finer resolution when a stage asks for it.

use serde::Serialize;
use thiserror::Error;

use crate::homology::{induced_index_map, realize, relative_homology, GradedMatrix, RealizedPair, RelativeHomology};
use crate::index_pair::{build_index_pair, verify_index_pair, IndexPairC, PairGraph};
use crate::invariance::{
    combinatorial_inv, is_compatible, is_isolating, CompatVerdict, InvResult, IsolationMode, IsolationVerdict, Status,
};
use crate::lifted::{build_lifted, LiftError, LiftedDigraph, Semantics};
use crate::numerics::RatInterval;
use crate::pcm::PcMap;
use crate::szymczak::{index_class, ConleyIndexClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error("code depth must be at least 1")]
    ZeroCodeDepth,
    #[error("max period must be at least 1")]
    ZeroPeriod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Params {
    pub code_depth: usize,
    pub grid_depth: u32,
    pub max_period: usize,
    pub backward_bound: usize,
    pub max_refinements: usize,
    pub isolation_mode: IsolationMode,
    /// Recompute once more at `(k + 1, depth + 1)` after success.
    pub stability_probe: bool,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            code_depth: 3,
            grid_depth: 4,
            max_period: 6,
            backward_bound: 12,
            max_refinements: 4,
            isolation_mode: IsolationMode::Touch,
            stability_probe: true,
        }
    }
}

/// Everything computed at one resolution. Later stages are `None` when an
/// earlier one stopped the computation.
#[derive(Debug, Clone)]
pub struct Computation {
    pub code_depth: usize,
    pub grid_depth: u32,
    pub closure: LiftedDigraph,
    pub closure_inv: InvResult,
    pub graph: LiftedDigraph,
    pub graph_inv: InvResult,
    pub isolation: IsolationVerdict,
    pub compatibility: CompatVerdict,
    pub pair: Option<IndexPairC>,
    pub realized: Option<RealizedPair>,
    pub homology: Option<RelativeHomology>,
    pub index_map: Option<GradedMatrix>,
    /// Why the index could not be completed at this resolution.
    pub refinement: Option<String>,
}

impl Computation {
    pub fn status(&self) -> Status {
        self.isolation.status.combine(self.compatibility.status)
    }

    pub fn is_complete(&self) -> bool {
        self.index_map.is_some()
    }

    pub fn components(&self) -> Option<usize> {
        self.realized.as_ref().map(|r| r.complex.component_count)
    }
}

/// Digraphs, invariant sets and the isolation and compatibility verdicts at
/// one resolution, without the index stages.
pub fn isolate_at(m: &PcMap, region: &RatInterval, code_depth: usize, grid_depth: u32, params: &Params) -> Result<Computation, PipelineError> {
    if code_depth == 0 {
        return Err(PipelineError::ZeroCodeDepth);
    }
    let closure = build_lifted(m, region, code_depth, grid_depth, Semantics::Closure)?;
    let closure_inv = combinatorial_inv(&closure);
    let graph = build_lifted(m, region, code_depth, grid_depth, Semantics::Graph)?;
    let graph_inv = combinatorial_inv(&graph);
    let isolation = is_isolating(m, &graph, &graph_inv, params.isolation_mode, params.max_period);
    let compatibility = is_compatible(m, &closure, &closure_inv, params.backward_bound);
    Ok(Computation {
        code_depth,
        grid_depth,
        closure,
        closure_inv,
        graph,
        graph_inv,
        isolation,
        compatibility,
        pair: None,
        realized: None,
        homology: None,
        index_map: None,
        refinement: None,
    })
}

pub fn compute_at(m: &PcMap, region: &RatInterval, code_depth: usize, grid_depth: u32, params: &Params) -> Result<Computation, PipelineError> {
    let mut c = isolate_at(m, region, code_depth, grid_depth, params)?;
    if c.status() != Status::Certified {
        return Ok(c);
    }
    let pg = PairGraph::from_digraph(m, &c.graph);
    let pair = match build_index_pair(&pg, &c.graph_inv.cinv) {
        Ok(p) => p,
        Err(e) => {
            c.refinement = Some(e.reason);
            return Ok(c);
        }
    };
    if let Some(v) = verify_index_pair(&pg, &pair).first() {
        c.refinement = Some(v.to_string());
        c.pair = Some(pair);
        return Ok(c);
    }
    let realized = realize(&c.graph, &pair);
    let homology = relative_homology(&realized);
    match induced_index_map(m, &c.graph, &realized, &homology) {
        Ok(g) => c.index_map = Some(g),
        Err(e) => c.refinement = Some(e.reason),
    }
    c.pair = Some(pair);
    c.realized = Some(realized);
    c.homology = Some(homology);
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Attempt {
    pub code_depth: usize,
    pub grid_depth: u32,
    pub closure_vertices: usize,
    pub graph_vertices: usize,
    pub graph_edges: usize,
    pub cinv: usize,
    pub result: String,
}

impl Attempt {
    fn of(c: &Computation) -> Attempt {
        let result = match (c.status(), &c.refinement) {
            (Status::Certified, None) if c.is_complete() => "index computed".to_string(),
            (Status::Certified, None) => "certified".to_string(),
            (Status::Certified, Some(r)) => format!("refinement needed: {r}"),
            (Status::Violated, _) => "violated".to_string(),
            (Status::Unknown, _) => "unknown".to_string(),
        };
        Attempt {
            code_depth: c.code_depth,
            grid_depth: c.grid_depth,
            closure_vertices: c.closure.len(),
            graph_vertices: c.graph.len(),
            graph_edges: c.graph.edge_count(),
            cinv: c.graph_inv.cinv.len(),
            result,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairSummary {
    pub p1: usize,
    pub p0: usize,
    pub cinv: usize,
    pub p0_empty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub components: usize,
    pub betti0: usize,
    pub betti1: usize,
    pub torsion: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityProbe {
    pub code_depth: usize,
    pub grid_depth: u32,
    pub components: Option<usize>,
    pub trivial: Option<bool>,
    pub unchanged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Success,
    Violated { stage: String },
    Unknown { reason: String },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Violated { .. } => 2,
            Outcome::Unknown { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexRun {
    pub region: RatInterval,
    pub params: Params,
    pub partition_pieces: usize,
    pub attempts: Vec<Attempt>,
    pub isolation: IsolationVerdict,
    pub compatibility: CompatVerdict,
    /// `(code depth, grid depth)` of the accepted attempt.
    pub resolution: Option<(usize, u32)>,
    pub pair: Option<PairSummary>,
    pub homology: Option<HomologySummary>,
    pub index_map: Option<GradedMatrix>,
    pub class: Option<ConleyIndexClass>,
    pub stability: Option<StabilityProbe>,
    pub outcome: Outcome,
}

fn summarize_homology(c: &Computation) -> Option<HomologySummary> {
    let (r, h) = (c.realized.as_ref()?, c.homology.as_ref()?);
    Some(HomologySummary {
        components: r.complex.component_count,
        betti0: h.betti0,
        betti1: h.betti1,
        torsion: h.torsion.clone(),
    })
}

fn outcome_of(last: &Computation, attempts: usize) -> Outcome {
    match (last.isolation.status, last.compatibility.status) {
        (Status::Violated, _) => Outcome::Violated { stage: "isolation".into() },
        (_, Status::Violated) => Outcome::Violated { stage: "compatibility".into() },
        (Status::Unknown, _) => Outcome::Unknown {
            reason: "isolation undecided".into(),
        },
        (_, Status::Unknown) => Outcome::Unknown {
            reason: "compatibility undecided".into(),
        },
        _ => match &last.refinement {
            Some(reason) => Outcome::Unknown {
                reason: format!("refinement needed after {attempts} attempts: {reason}"),
            },
            None => Outcome::Success,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsolationRun {
    pub region: RatInterval,
    pub params: Params,
    pub attempts: Vec<Attempt>,
    pub isolation: IsolationVerdict,
    pub compatibility: CompatVerdict,
    /// Base cells under the combinatorial invariant set, merged where adjacent.
    pub cinv_cover: Vec<RatInterval>,
    pub outcome: Outcome,
}

/// Projection of a vertex set to base cells, as maximal closed intervals.
pub fn cover_of(d: &LiftedDigraph, vertices: impl IntoIterator<Item = usize>) -> Vec<RatInterval> {
    let mut cells: Vec<RatInterval> = vertices.into_iter().map(|v| d.cell_of(v)).collect();
    cells.sort_by(|x, y| x.lo().cmp(y.lo()).then(x.hi().cmp(y.hi())));
    let mut out: Vec<RatInterval> = Vec::new();
    for c in cells {
        match out.last_mut() {
            Some(last) if c.lo() <= last.hi() => *last = last.hull(&c),
            _ => out.push(c),
        }
    }
    out
}

/// Isolation and compatibility on the minimal partition, refining while
/// either verdict is undecided.
pub fn run_isolation(m: &PcMap, region: &RatInterval, params: &Params) -> Result<(IsolationRun, Computation), PipelineError> {
    if params.max_period == 0 {
        return Err(PipelineError::ZeroPeriod);
    }
    let m = m.minimal_partition();
    let mut attempts = Vec::new();
    let mut r = 0;
    let last = loop {
        let c = isolate_at(&m, region, params.code_depth + r, params.grid_depth + r as u32, params)?;
        attempts.push(Attempt::of(&c));
        if c.status() != Status::Unknown || r == params.max_refinements {
            break c;
        }
        r += 1;
    };
    let run = IsolationRun {
        region: region.clone(),
        params: *params,
        isolation: last.isolation.clone(),
        compatibility: last.compatibility.clone(),
        cinv_cover: cover_of(&last.graph, last.graph_inv.cinv.iter().copied()),
        outcome: outcome_of(&last, attempts.len()),
        attempts,
    };
    Ok((run, last))
}

/// Runs the index pipeline on the minimal partition of `m`, refining up to
/// `max_refinements` times. Returns the report and the last computation.
pub fn run_index(m: &PcMap, region: &RatInterval, params: &Params) -> Result<(IndexRun, Computation), PipelineError> {
    if params.max_period == 0 {
        return Err(PipelineError::ZeroPeriod);
    }
    let m = m.minimal_partition();
    let mut attempts = Vec::new();
    let mut r = 0;
    let last = loop {
        let c = compute_at(&m, region, params.code_depth + r, params.grid_depth + r as u32, params)?;
        attempts.push(Attempt::of(&c));
        let stop = c.status() == Status::Violated || c.is_complete() || r == params.max_refinements;
        if stop {
            break c;
        }
        r += 1;
    };
    let outcome = outcome_of(&last, attempts.len());
    let class = last.index_map.as_ref().map(index_class);
    let stability = match (&outcome, params.stability_probe) {
        (Outcome::Success, true) => {
            let probe = compute_at(&m, region, last.code_depth + 1, last.grid_depth + 1, params)?;
            let trivial = probe.index_map.as_ref().map(|g| index_class(g).trivial);
            let components = probe.components();
            Some(StabilityProbe {
                code_depth: probe.code_depth,
                grid_depth: probe.grid_depth,
                unchanged: components == last.components() && trivial == class.as_ref().map(|c| c.trivial),
                components,
                trivial,
            })
        }
        _ => None,
    };
    let run = IndexRun {
        region: region.clone(),
        params: *params,
        partition_pieces: m.symbol_count(),
        isolation: last.isolation.clone(),
        compatibility: last.compatibility.clone(),
        resolution: last.is_complete().then_some((last.code_depth, last.grid_depth)),
        pair: last.pair.as_ref().map(|p| PairSummary {
            p1: p.p1.len(),
            p0: p.p0.len(),
            cinv: p.cinv.len(),
            p0_empty: p.p0.is_empty(),
        }),
        homology: summarize_homology(&last),
        index_map: last.index_map.clone(),
        class,
        stability,
        outcome,
        attempts,
    };
    Ok((run, last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn attractor_succeeds_first_time() {
        let (run, _) = run_index(&fixtures::attractor(), &fixtures::centered_region(), &Params::default()).unwrap();
        assert_eq!(run.outcome, Outcome::Success);
        assert_eq!(run.attempts.len(), 1);
        assert!(!run.class.unwrap().trivial);
    }

    #[test]
    fn repeller_refines_from_coarse_grid() {
        let params = Params {
            grid_depth: 2,
            ..Params::default()
        };
        let (run, _) = run_index(&fixtures::repeller(), &fixtures::centered_region(), &params).unwrap();
        assert_eq!(run.outcome, Outcome::Success);
        assert!(run.attempts.len() > 1);
        let h = run.homology.unwrap();
        assert_eq!((h.betti0, h.betti1), (0, 1));
    }

    #[test]
    fn violated_isolation_stops() {
        let params = Params::default();
        let region = RatInterval::new(crate::Rational::zero(), crate::Rational::ratio(1, 2)).unwrap();
        let (run, _) = run_index(&fixtures::identity(RatInterval::new(crate::Rational::zero(), crate::Rational::one()).unwrap()), &region, &params).unwrap();
        assert_eq!(run.outcome.exit_code(), 2);
        assert_eq!(run.attempts.len(), 1);
    }

    #[test]
    fn refinement_budget_is_respected() {
        let params = Params {
            max_refinements: 0,
            ..Params::default()
        };
        let (run, _) = run_index(&fixtures::worked_map(), &fixtures::worked_region(), &params).unwrap();
        assert_eq!(run.attempts.len(), 1);
        assert_eq!(run.outcome.exit_code(), 3);
    }
}
