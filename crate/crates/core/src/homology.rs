//! Geometric realization of an index pair as a one-dimensional complex,
//! relative homology over the integers, and the induced index map.
//!
//! Each lifted vertex contributes an edge `(lo, w) -> (hi, w)` for its
//! feasibility interval, or a single point when the interval is degenerate.
//! Points with equal coordinate and equal word are glued, so every connected
//! component carries one word.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::coding::CodeWord;
use crate::index_pair::{IndexPairC, RefinementNeeded};
use crate::lifted::LiftedDigraph;
use crate::linalg::IntMatrix;
use crate::numerics::{RatInterval, Rational};
use crate::pcm::PcMap;

/// What a lifted vertex became in the complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellRef {
    Edge(usize),
    Point(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneComplex {
    /// Glued points, sorted by word then coordinate.
    pub points: Vec<(Rational, CodeWord)>,
    /// Oriented edges `(lower point, upper point)`.
    pub edges: Vec<(usize, usize)>,
    /// Lifted vertex id of each edge.
    pub edge_source: Vec<usize>,
    /// Connected component of each point.
    pub component: Vec<usize>,
    pub component_count: usize,
}

impl OneComplex {
    pub fn edge_word(&self, e: usize) -> &CodeWord {
        &self.points[self.edges[e].0].1
    }

    pub fn edge_interval(&self, e: usize) -> RatInterval {
        let (a, b) = self.edges[e];
        RatInterval::new(self.points[a].0.clone(), self.points[b].0.clone()).expect("edges run low to high")
    }

    /// Base interval spanned by a component.
    pub fn component_span(&self, c: usize) -> RatInterval {
        let xs: Vec<&Rational> = (0..self.points.len())
            .filter(|&p| self.component[p] == c)
            .map(|p| &self.points[p].0)
            .collect();
        let lo = xs.iter().min().expect("components are nonempty");
        let hi = xs.iter().max().expect("components are nonempty");
        RatInterval::new((*lo).clone(), (*hi).clone()).expect("min <= max")
    }

    pub fn component_word(&self, c: usize) -> &CodeWord {
        let p = self.component.iter().position(|&x| x == c).expect("components are nonempty");
        &self.points[p].1
    }
}

/// The complex of `p1` with the subcomplex of `p0` marked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizedPair {
    pub complex: OneComplex,
    pub sub_points: BTreeSet<usize>,
    pub sub_edges: BTreeSet<usize>,
    /// Cell of every vertex of `p1`.
    pub cell_of: BTreeMap<usize, CellRef>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn realize(d: &LiftedDigraph, p: &IndexPairC) -> RealizedPair {
    let mut keys: BTreeSet<(CodeWord, Rational)> = BTreeSet::new();
    for &v in &p.p1 {
        let c = &d.vertices[v];
        keys.insert((c.word.clone(), c.feas.lo().clone()));
        keys.insert((c.word.clone(), c.feas.hi().clone()));
    }
    let index: BTreeMap<(CodeWord, Rational), usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let points: Vec<(Rational, CodeWord)> = keys.into_iter().map(|(w, x)| (x, w)).collect();
    let mut edges = Vec::new();
    let mut edge_source = Vec::new();
    let mut cell_of = BTreeMap::new();
    let mut sub_points = BTreeSet::new();
    let mut sub_edges = BTreeSet::new();
    for &v in &p.p1 {
        let c = &d.vertices[v];
        let a = index[&(c.word.clone(), c.feas.lo().clone())];
        let b = index[&(c.word.clone(), c.feas.hi().clone())];
        let cell = if a == b {
            CellRef::Point(a)
        } else {
            edges.push((a, b));
            edge_source.push(v);
            CellRef::Edge(edges.len() - 1)
        };
        if p.p0.contains(&v) {
            sub_points.insert(a);
            sub_points.insert(b);
            if let CellRef::Edge(e) = cell {
                sub_edges.insert(e);
            }
        }
        cell_of.insert(v, cell);
    }
    let mut uf = UnionFind((0..points.len()).collect());
    for &(a, b) in &edges {
        uf.union(a, b);
    }
    let mut label = BTreeMap::new();
    let component: Vec<usize> = (0..points.len())
        .map(|i| {
            let r = uf.find(i);
            let next = label.len();
            *label.entry(r).or_insert(next)
        })
        .collect();
    RealizedPair {
        complex: OneComplex {
            points,
            edges,
            edge_source,
            component,
            component_count: label.len(),
        },
        sub_points,
        sub_edges,
        cell_of,
    }
}

/// A homology generator, described by its base interval and word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub base: RatInterval,
    pub word: CodeWord,
}

/// Relative cycle carried by a maximal run of non-collapsed edges whose two
/// ends are collapsed points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub edges: Vec<usize>,
    pub base: RatInterval,
    pub word: CodeWord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeHomology {
    pub betti0: usize,
    pub betti1: usize,
    /// Smith invariant factors different from 1.
    pub torsion: Vec<String>,
    /// Components without collapsed points, one per degree-0 generator.
    pub h0_components: Vec<usize>,
    pub h1_runs: Vec<Run>,
    /// Relative boundary matrix: rows are free points, columns free edges.
    pub boundary: IntMatrix,
}

impl RelativeHomology {
    pub fn generators0(&self, pair: &RealizedPair) -> Vec<Generator> {
        self.h0_components
            .iter()
            .map(|&c| Generator {
                base: pair.complex.component_span(c),
                word: pair.complex.component_word(c).clone(),
            })
            .collect()
    }

    pub fn generators1(&self) -> Vec<Generator> {
        self.h1_runs
            .iter()
            .map(|r| Generator {
                base: r.base.clone(),
                word: r.word.clone(),
            })
            .collect()
    }
}

/// Maximal runs of free edges in one component, in left-to-right order,
/// with flags telling whether each end is a collapsed point.
fn runs(pair: &RealizedPair) -> Vec<(Vec<usize>, bool, bool)> {
    let cx = &pair.complex;
    let mut by_component: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (e, &(a, _)) in cx.edges.iter().enumerate() {
        by_component.entry(cx.component[a]).or_default().push(e);
    }
    let mut out = Vec::new();
    for (_, mut es) in by_component {
        es.sort_by(|&x, &y| cx.points[cx.edges[x].0].0.cmp(&cx.points[cx.edges[y].0].0));
        let mut current: Vec<usize> = Vec::new();
        let flush = |current: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, bool, bool)>| {
            if let (Some(&first), Some(&last)) = (current.first(), current.last()) {
                let lo = pair.sub_points.contains(&cx.edges[first].0);
                let hi = pair.sub_points.contains(&cx.edges[last].1);
                out.push((std::mem::take(current), lo, hi));
            }
        };
        for e in es {
            if pair.sub_edges.contains(&e) {
                flush(&mut current, &mut out);
                continue;
            }
            // a collapsed point splits the run
            let starts_at_sub = pair.sub_points.contains(&cx.edges[e].0);
            if starts_at_sub {
                flush(&mut current, &mut out);
            }
            current.push(e);
        }
        flush(&mut current, &mut out);
    }
    out
}

pub fn relative_homology(pair: &RealizedPair) -> RelativeHomology {
    let cx = &pair.complex;
    let free_points: Vec<usize> = (0..cx.points.len()).filter(|p| !pair.sub_points.contains(p)).collect();
    let free_edges: Vec<usize> = (0..cx.edges.len()).filter(|e| !pair.sub_edges.contains(e)).collect();
    let row_of: BTreeMap<usize, usize> = free_points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut boundary = IntMatrix::zeros(free_points.len(), free_edges.len());
    for (j, &e) in free_edges.iter().enumerate() {
        let (a, b) = cx.edges[e];
        if let Some(&i) = row_of.get(&b) {
            boundary[(i, j)] += 1;
        }
        if let Some(&i) = row_of.get(&a) {
            boundary[(i, j)] -= 1;
        }
    }
    let invariants = boundary.smith_invariants();
    let rank = invariants.len();
    let torsion = invariants
        .iter()
        .filter(|x| !num_traits::One::is_one(*x))
        .map(|x| x.to_string())
        .collect();

    let collapsed: BTreeSet<usize> = pair.sub_points.iter().map(|&p| cx.component[p]).collect();
    let h0_components: Vec<usize> = (0..cx.component_count).filter(|c| !collapsed.contains(c)).collect();
    let h1_runs: Vec<Run> = runs(pair)
        .into_iter()
        .filter(|(_, lo, hi)| *lo && *hi)
        .map(|(edges, _, _)| {
            let lo = cx.points[cx.edges[edges[0]].0].0.clone();
            let hi = cx.points[cx.edges[*edges.last().expect("runs are nonempty")].1].0.clone();
            let word = cx.edge_word(edges[0]).clone();
            Run {
                edges,
                base: RatInterval::new(lo, hi).expect("runs go left to right"),
                word,
            }
        })
        .collect();
    let betti0 = free_points.len() - rank;
    let betti1 = free_edges.len() - rank;
    debug_assert_eq!(betti0, h0_components.len());
    debug_assert_eq!(betti1, h1_runs.len());
    RelativeHomology {
        betti0,
        betti1,
        torsion,
        h0_components,
        h1_runs,
        boundary,
    }
}

/// Index map in degrees 0 and 1, columns indexed by source generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedMatrix {
    pub degree0: IntMatrix,
    pub degree1: IntMatrix,
    pub generators0: Vec<Generator>,
    pub generators1: Vec<Generator>,
}

impl GradedMatrix {
    pub fn degree(&self, k: usize) -> &IntMatrix {
        match k {
            0 => &self.degree0,
            _ => &self.degree1,
        }
    }
}

/// Degree-0 map: each free component goes to the component(s) holding the
/// digraph successors of its vertices.
fn degree0(d: &LiftedDigraph, pair: &RealizedPair, h: &RelativeHomology) -> Result<IntMatrix, RefinementNeeded> {
    let cx = &pair.complex;
    let gen_of: BTreeMap<usize, usize> = h.h0_components.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let component_of_vertex = |v: usize| -> Option<usize> {
        match pair.cell_of.get(&v)? {
            CellRef::Edge(e) => Some(cx.component[cx.edges[*e].0]),
            CellRef::Point(p) => Some(cx.component[*p]),
        }
    };
    let n = h.h0_components.len();
    let mut m = IntMatrix::zeros(n, n);
    for (col, &c) in h.h0_components.iter().enumerate() {
        let mut live = BTreeSet::new();
        let mut dead = false;
        for (&v, _) in pair.cell_of.iter().filter(|(&v, _)| component_of_vertex(v) == Some(c)) {
            for &w in &d.succ[v] {
                match component_of_vertex(w).and_then(|t| gen_of.get(&t)) {
                    Some(&g) => {
                        live.insert(g);
                    }
                    None => dead = true,
                }
            }
        }
        match (live.len(), dead) {
            (0, _) => {}
            (1, false) => {
                let row = *live.iter().next().expect("one target");
                m[(row, col)] = 1.into();
            }
            _ => {
                return Err(RefinementNeeded {
                    reason: format!(
                        "component over {} with word {} maps into {} components",
                        cx.component_span(c),
                        cx.component_word(c),
                        live.len() + usize::from(dead)
                    ),
                })
            }
        }
    }
    Ok(m)
}

/// Degree-1 map by signed preimage counts of target edge midpoints.
fn degree1(m: &PcMap, pair: &RealizedPair, h: &RelativeHomology) -> Result<IntMatrix, RefinementNeeded> {
    let cx = &pair.complex;
    let mut run_of_edge: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, r) in h.h1_runs.iter().enumerate() {
        for &e in &r.edges {
            run_of_edge.insert(e, i);
        }
    }
    let n = h.h1_runs.len();
    let mut out = IntMatrix::zeros(n, n);
    for (col, run) in h.h1_runs.iter().enumerate() {
        let branch = &m.piece(run.word.first()).branch;
        let mut coeff: BTreeMap<usize, i64> = BTreeMap::new();
        for e in (0..cx.edges.len()).filter(|e| !pair.sub_edges.contains(e)) {
            if cx.edge_word(e).head() != run.word.tail() {
                continue;
            }
            let mid = cx.edge_interval(e).midpoint();
            let mut hits: Vec<(Rational, i32)> = Vec::new();
            for (dom, law) in branch.pieces_on(&run.base) {
                if law.a.is_zero() {
                    if law.b == mid {
                        return Err(RefinementNeeded {
                            reason: format!("constant branch hits the midpoint {mid}"),
                        });
                    }
                    continue;
                }
                let x = law.solve(&mid).expect("nonzero slope");
                if !dom.contains(&x) {
                    continue;
                }
                if x == *dom.lo() || x == *dom.hi() {
                    return Err(RefinementNeeded {
                        reason: format!("midpoint {mid} is the image of a knot or run end {x}"),
                    });
                }
                if !hits.iter().any(|(y, _)| y == &x) {
                    hits.push((x, law.a.signum()));
                }
            }
            let total: i64 = hits.iter().map(|(_, s)| i64::from(*s)).sum();
            if total != 0 {
                coeff.insert(e, total);
            }
        }
        for (&e, &c) in &coeff {
            if !run_of_edge.contains_key(&e) {
                return Err(RefinementNeeded {
                    reason: format!("image of a relative cycle covers edge {} outside any closed run (coefficient {c})", cx.edge_interval(e)),
                });
            }
        }
        for (row, target) in h.h1_runs.iter().enumerate() {
            let values: BTreeSet<i64> = target.edges.iter().map(|e| coeff.get(e).copied().unwrap_or(0)).collect();
            if values.len() > 1 {
                return Err(RefinementNeeded {
                    reason: format!("image of run {} is not a relative cycle on run {}", run.base, target.base),
                });
            }
            out[(row, col)] = values.into_iter().next().unwrap_or(0).into();
        }
    }
    Ok(out)
}

pub fn induced_index_map(
    m: &PcMap,
    d: &LiftedDigraph,
    pair: &RealizedPair,
    h: &RelativeHomology,
) -> Result<GradedMatrix, RefinementNeeded> {
    Ok(GradedMatrix {
        degree0: degree0(d, pair, h)?,
        degree1: degree1(m, pair, h)?,
        generators0: h.generators0(pair),
        generators1: h.generators1(),
    })
}
