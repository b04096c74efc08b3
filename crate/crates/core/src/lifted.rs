//! Finite outer approximation of the lifted map on the closure of the graph
//! of the coding map.
//!
//! Vertices are pairs (grid cell, code word) whose feasibility set is
//! nonempty; an edge joins two vertices when the words are shift-compatible
//! and the branch image of the first feasibility set meets the second.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::coding::CodeWord;
use crate::numerics::{FlaggedInterval, RatInterval, Rational};
use crate::pcm::{AffineBranch, PcMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("region {region} is not inside the space {space}")]
    RegionOutsideSpace { region: RatInterval, space: RatInterval },
    #[error("region {0} has zero length")]
    DegenerateRegion(RatInterval),
    #[error("code depth must be at least 1")]
    ZeroDepth,
}

/// How feasibility sets treat piece membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    /// Iterates may lie anywhere in the closure of each piece of the word.
    /// Encloses the orbits of every adjoint at once.
    Closure,
    /// Iterates follow the actual half-open pieces; the feasibility set is
    /// the closure of the exact set of points with that itinerary.
    Graph,
}

/// Breakpoint-aligned uniform grid over a region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    region: RatInterval,
    cuts: Vec<Rational>,
}

impl Grid {
    pub fn region(&self) -> &RatInterval {
        &self.region
    }

    pub fn cuts(&self) -> &[Rational] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self, i: usize) -> RatInterval {
        RatInterval::new(self.cuts[i].clone(), self.cuts[i + 1].clone()).expect("cuts are sorted")
    }

    pub fn cells(&self) -> Vec<RatInterval> {
        (0..self.len()).map(|i| self.cell(i)).collect()
    }

    /// Indices of the cells containing `x` (two when `x` is an inner cut).
    pub fn cells_containing(&self, x: &Rational) -> Vec<usize> {
        if !self.region.contains(x) {
            return Vec::new();
        }
        match self.cuts.binary_search(x) {
            Ok(i) => {
                let mut out = Vec::new();
                if i > 0 {
                    out.push(i - 1);
                }
                if i < self.len() {
                    out.push(i);
                }
                out
            }
            Err(i) => vec![i - 1],
        }
    }

    /// Indices of the cells meeting `iv`.
    pub fn cells_meeting(&self, iv: &RatInterval) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.cell(i).intersects(iv)).collect()
    }
}

/// Grid over `region` cut at every breakpoint, branch knot and space
/// endpoint inside it, each segment then split into `2^depth` equal cells.
pub fn build_grid(m: &PcMap, region: &RatInterval, depth: u32) -> Result<Grid, LiftError> {
    if !region.is_subset_of(m.space()) {
        return Err(LiftError::RegionOutsideSpace {
            region: region.clone(),
            space: m.space().clone(),
        });
    }
    if region.is_point() {
        return Err(LiftError::DegenerateRegion(region.clone()));
    }
    let mut base: BTreeSet<Rational> = BTreeSet::new();
    base.insert(region.lo().clone());
    base.insert(region.hi().clone());
    let knots = m.pieces().iter().flat_map(|p| p.branch.knots().iter().cloned());
    for x in m.discontinuity_set().into_iter().chain(knots) {
        if region.contains(&x) {
            base.insert(x);
        }
    }
    for x in [m.space().lo(), m.space().hi()] {
        if region.contains(x) {
            base.insert(x.clone());
        }
    }
    let base: Vec<Rational> = base.into_iter().collect();
    let parts = 1usize << depth;
    let mut cuts = Vec::with_capacity((base.len() - 1) * parts + 1);
    for w in base.windows(2) {
        let seg = RatInterval::new(w[0].clone(), w[1].clone()).expect("sorted");
        for c in seg.subdivide(parts) {
            cuts.push(c.lo().clone());
        }
    }
    cuts.push(base.last().expect("region has two endpoints").clone());
    Ok(Grid {
        region: region.clone(),
        cuts,
    })
}

/// Partial itinerary state: on `dom`, the current iterate is `law(x)`.
#[derive(Debug, Clone)]
struct Strand {
    dom: FlaggedInterval,
    law: AffineBranch,
}

fn target_set(m: &PcMap, s: usize, sem: Semantics) -> FlaggedInterval {
    let p = m.piece(s);
    match sem {
        Semantics::Closure => FlaggedInterval::closed(&p.closure()),
        Semantics::Graph => p.span.clone(),
    }
}

/// Keeps the part of each strand whose current iterate lies in piece `s`.
fn restrict(strands: &[Strand], target: &FlaggedInterval) -> Vec<Strand> {
    strands
        .iter()
        .filter_map(|st| {
            let dom = if st.law.a.is_zero() {
                target.contains(&st.law.b).then(|| st.dom.clone())
            } else {
                st.dom.meet(&target.affine_preimage(&st.law.a, &st.law.b))
            }?;
            Some(Strand {
                dom,
                law: st.law.clone(),
            })
        })
        .collect()
}

/// Applies the branch of piece `s`, splitting strands at its knots.
fn advance(m: &PcMap, s: usize, strands: &[Strand]) -> Vec<Strand> {
    let p = m.piece(s);
    let closure = p.closure();
    let mut out = Vec::new();
    for st in strands {
        for (seg_dom, seg) in p.branch.pieces_on(&closure) {
            let fseg = FlaggedInterval::closed(&seg_dom);
            let dom = if st.law.a.is_zero() {
                fseg.contains(&st.law.b).then(|| st.dom.clone())
            } else {
                st.dom.meet(&fseg.affine_preimage(&st.law.a, &st.law.b))
            };
            if let Some(dom) = dom {
                out.push(Strand {
                    dom,
                    law: seg.after(&st.law),
                });
            }
        }
    }
    out
}

fn start(cell: &RatInterval) -> Vec<Strand> {
    vec![Strand {
        dom: FlaggedInterval::closed(cell),
        law: AffineBranch::identity(),
    }]
}

/// Exact admissible set of `word` inside `cell`, as a union of intervals.
pub fn admissible_set(m: &PcMap, cell: &RatInterval, word: &[usize], sem: Semantics) -> Vec<FlaggedInterval> {
    let mut strands = start(cell);
    for (i, &s) in word.iter().enumerate() {
        if i > 0 {
            strands = advance(m, word[i - 1], &strands);
        }
        strands = restrict(&strands, &target_set(m, s, sem));
        if strands.is_empty() {
            break;
        }
    }
    strands.into_iter().map(|s| s.dom).collect()
}

fn hull(parts: &[FlaggedInterval]) -> Option<RatInterval> {
    parts
        .iter()
        .filter_map(|p| p.closure())
        .reduce(|a, b| a.hull(&b))
}

/// Points of the closed cell whose iterates stay in the closures of the
/// word's pieces. `None` when no point admits the word.
pub fn feasibility(m: &PcMap, cell: &RatInterval, word: &CodeWord) -> Option<RatInterval> {
    hull(&admissible_set(m, cell, word.symbols(), Semantics::Closure))
}

/// Closure of the set of points of the cell whose itinerary starts with the word.
pub fn graph_feasibility(m: &PcMap, cell: &RatInterval, word: &CodeWord) -> Option<RatInterval> {
    hull(&admissible_set(m, cell, word.symbols(), Semantics::Graph))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedCell {
    pub cell: usize,
    pub word: CodeWord,
    pub feas: RatInterval,
    /// The branch image of `feas` leaves the region.
    pub exits: bool,
    /// Some endpoint of `feas` is only a limit of points with this word
    /// (always false under closure semantics).
    pub ideal: bool,
}

/// Base cell of a lifted vertex.
pub fn project(grid: &Grid, v: &LiftedCell) -> RatInterval {
    grid.cell(v.cell)
}

#[derive(Debug, Clone)]
pub struct LiftedDigraph {
    pub semantics: Semantics,
    pub grid: Grid,
    pub code_depth: usize,
    pub grid_depth: u32,
    pub vertices: Vec<LiftedCell>,
    pub succ: Vec<Vec<usize>>,
    pub pred: Vec<Vec<usize>>,
}

/// First symbols tried over a cell: the piece of its interior, plus, at a
/// region endpoint, pieces that own that endpoint from outside the region.
fn first_symbols(m: &PcMap, grid: &Grid, cell: &RatInterval, sem: Semantics) -> Vec<usize> {
    let interior = m
        .piece_of(&cell.midpoint())
        .expect("grid cells lie inside the space");
    let mut out = vec![interior];
    for e in [cell.lo(), cell.hi()] {
        if e != grid.region.lo() && e != grid.region.hi() {
            continue;
        }
        let owners = match sem {
            Semantics::Closure => m.closure_owners(e),
            Semantics::Graph => vec![m.piece_of(e).expect("region lies inside the space")],
        };
        for o in owners {
            if !out.contains(&o) {
                out.push(o);
            }
        }
    }
    out
}

pub fn build_lifted(
    m: &PcMap,
    region: &RatInterval,
    code_depth: usize,
    grid_depth: u32,
    sem: Semantics,
) -> Result<LiftedDigraph, LiftError> {
    if code_depth == 0 {
        return Err(LiftError::ZeroDepth);
    }
    let grid = build_grid(m, region, grid_depth)?;
    let n = m.symbol_count();
    let mut vertices = Vec::new();
    for ci in 0..grid.len() {
        let cell = grid.cell(ci);
        for s0 in first_symbols(m, &grid, &cell, sem) {
            // depth-first over words, carrying the admissible strands
            let first = restrict(&start(&cell), &target_set(m, s0, sem));
            if first.is_empty() {
                continue;
            }
            let mut stack: Vec<(Vec<usize>, Vec<Strand>)> = vec![(vec![s0], first)];
            let mut found = Vec::new();
            while let Some((word, strands)) = stack.pop() {
                if word.len() == code_depth {
                    found.push((word, strands));
                    continue;
                }
                let moved = advance(m, *word.last().expect("nonempty word"), &strands);
                for s in (0..n).rev() {
                    let next = restrict(&moved, &target_set(m, s, sem));
                    if !next.is_empty() {
                        let mut w = word.clone();
                        w.push(s);
                        stack.push((w, next));
                    }
                }
            }
            found.sort_by(|a, b| a.0.cmp(&b.0));
            for (word, strands) in found {
                let parts: Vec<FlaggedInterval> = strands.into_iter().map(|s| s.dom).collect();
                let feas = hull(&parts).expect("nonempty strands");
                let ideal = sem == Semantics::Graph
                    && [feas.lo(), feas.hi()]
                        .iter()
                        .any(|e| !parts.iter().any(|p| p.contains(e)));
                let image = m.piece(word[0]).branch.image(&feas);
                vertices.push(LiftedCell {
                    cell: ci,
                    word: CodeWord(word),
                    exits: !image.is_subset_of(region),
                    feas,
                    ideal,
                });
            }
        }
    }

    let mut by_head: HashMap<&[usize], Vec<usize>> = HashMap::new();
    for (i, v) in vertices.iter().enumerate() {
        by_head.entry(v.word.head()).or_default().push(i);
    }
    let mut succ = vec![Vec::new(); vertices.len()];
    let mut pred = vec![Vec::new(); vertices.len()];
    for (i, v) in vertices.iter().enumerate() {
        let image = m.piece(v.word.first()).branch.image(&v.feas);
        if let Some(cands) = by_head.get(v.word.tail()) {
            for &j in cands {
                if image.intersects(&vertices[j].feas) {
                    succ[i].push(j);
                    pred[j].push(i);
                }
            }
        }
    }
    Ok(LiftedDigraph {
        semantics: sem,
        grid,
        code_depth,
        grid_depth,
        vertices,
        succ,
        pred,
    })
}

impl LiftedDigraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn region(&self) -> &RatInterval {
        self.grid.region()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succ[u].contains(&v)
    }

    pub fn cell_of(&self, v: usize) -> RatInterval {
        project(&self.grid, &self.vertices[v])
    }

    /// Vertices with this word whose feasibility set contains `x`.
    pub fn locate(&self, x: &Rational, word: &CodeWord) -> Vec<usize> {
        let cells = self.grid.cells_containing(x);
        (0..self.vertices.len())
            .filter(|&i| {
                let v = &self.vertices[i];
                cells.contains(&v.cell) && &v.word == word && v.feas.contains(x)
            })
            .collect()
    }

    /// Vertices whose projected successors differ from the cells met by the
    /// base branch image of their cell. Diagnostic only.
    pub fn projection_disagreements(&self, m: &PcMap) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&i| {
                let v = &self.vertices[i];
                let image = m.piece(v.word.first()).branch.image(&self.grid.cell(v.cell));
                let base: BTreeSet<usize> = self.grid.cells_meeting(&image).into_iter().collect();
                let lifted: BTreeSet<usize> = self.succ[i].iter().map(|&j| self.vertices[j].cell).collect();
                base != lifted
            })
            .collect()
    }

    pub fn vertex_label(&self, i: usize) -> String {
        let v = &self.vertices[i];
        format!("{}:{}|{}", v.cell, self.grid.cell(v.cell), v.word.compact())
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph lifted {\n");
        for i in 0..self.vertices.len() {
            let _ = writeln!(s, "  v{} [label=\"{}\"];", i, self.vertex_label(i));
        }
        for (i, out) in self.succ.iter().enumerate() {
            for j in out {
                let _ = writeln!(s, "  v{i} -> v{j};");
            }
        }
        s.push_str("}\n");
        s
    }

    /// One row per vertex: id, cell, cell bounds, word, feasibility bounds,
    /// exit flag, successors separated by spaces.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("vertex,cell,cell_lo,cell_hi,word,feas_lo,feas_hi,exits,successors\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let cell = self.grid.cell(v.cell);
            let succ: Vec<String> = self.succ[i].iter().map(|j| j.to_string()).collect();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                i,
                v.cell,
                cell.lo(),
                cell.hi(),
                v.word.compact(),
                v.feas.lo(),
                v.feas.hi(),
                v.exits,
                succ.join(" ")
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn iv(a: Rational, b: Rational) -> RatInterval {
        RatInterval::new(a, b).unwrap()
    }

    #[test]
    fn grids() {
        let m = fixtures::worked_map();
        let g = build_grid(&m, &fixtures::worked_region(), 0).unwrap();
        let expect: Vec<Rational> = [(-1, 3), (0, 1), (1, 3), (2, 3), (1, 1), (4, 3)]
            .iter()
            .map(|&(n, d)| q(n, d))
            .collect();
        assert_eq!(g.cuts(), &expect[..]);
        let g2 = build_grid(&m, &fixtures::worked_region(), 2).unwrap();
        assert_eq!(g2.len(), 20);
        assert!(g.cuts().iter().all(|c| g2.cuts().contains(c)));

        let r = fixtures::remark_map();
        let g = build_grid(&r, &fixtures::remark_region(), 0).unwrap();
        assert_eq!(g.cells(), vec![iv(q(0, 1), q(1, 2)), iv(q(1, 2), q(3, 5))]);
        assert!(build_grid(&r, &iv(q(0, 1), q(2, 1)), 0).is_err());
        assert_eq!(g.cells_containing(&q(1, 2)), vec![0, 1]);
        assert_eq!(g.cells_containing(&q(1, 4)), vec![0]);
    }

    #[test]
    fn feasibility_examples() {
        let m = fixtures::worked_map();
        let cell = iv(q(1, 3), q(2, 3));
        assert_eq!(feasibility(&m, &cell, &CodeWord(vec![3, 3])), Some(RatInterval::point(q(2, 3))));
        assert_eq!(feasibility(&m, &cell, &CodeWord(vec![3])), Some(cell.clone()));
        assert_eq!(feasibility(&m, &cell, &CodeWord(vec![3, 6])), None);
        // the half-open reading drops the closure point 2/3
        assert_eq!(graph_feasibility(&m, &cell, &CodeWord(vec![3, 3])), None);
        assert_eq!(
            graph_feasibility(&m, &cell, &CodeWord(vec![3, 2])),
            Some(iv(q(1, 3), q(2, 3)))
        );
    }

    #[test]
    fn continuous_map_has_one_word_per_cell() {
        let m = fixtures::attractor();
        for sem in [Semantics::Closure, Semantics::Graph] {
            let d = build_lifted(&m, &fixtures::centered_region(), 3, 2, sem).unwrap();
            assert_eq!(d.len(), d.grid.len());
            for (i, v) in d.vertices.iter().enumerate() {
                assert_eq!(v.cell, i);
                assert_eq!(v.word, CodeWord(vec![0, 0, 0]));
                // edges coincide with the plain cell-transition digraph
                let image = m.piece(0).branch.image(&d.grid.cell(i));
                let cells: Vec<usize> = d.succ[i].iter().map(|&j| d.vertices[j].cell).collect();
                assert_eq!(cells, d.grid.cells_meeting(&image));
            }
            assert!(d.projection_disagreements(&m).is_empty());
        }
    }

    #[test]
    fn remark_exit_vertex() {
        let m = fixtures::remark_map();
        let d = build_lifted(&m, &fixtures::remark_region(), 2, 0, Semantics::Graph).unwrap();
        let v = d
            .vertices
            .iter()
            .position(|v| v.cell == 1 && v.word == CodeWord(vec![1, 1]))
            .unwrap();
        assert!(d.succ[v].is_empty());
        assert!(d.vertices[v].exits);
    }

    #[test]
    fn worked_fixed_point_self_edge() {
        let m = fixtures::worked_map();
        for sem in [Semantics::Closure, Semantics::Graph] {
            let d = build_lifted(&m, &fixtures::worked_region(), 2, 0, sem).unwrap();
            let v = d
                .vertices
                .iter()
                .position(|v| d.grid.cell(v.cell) == iv(q(2, 3), q(1, 1)) && v.word == CodeWord(vec![4, 4]))
                .unwrap();
            assert!(d.vertices[v].feas.contains(&q(2, 3)));
            assert!(d.has_edge(v, v));
        }
    }

    #[test]
    fn feasibility_inside_cell_and_exports() {
        let m = fixtures::worked_map();
        let d = build_lifted(&m, &fixtures::worked_region(), 3, 1, Semantics::Graph).unwrap();
        for v in &d.vertices {
            assert!(v.feas.is_subset_of(&project(&d.grid, v)));
        }
        let dot = d.to_dot();
        assert!(dot.starts_with("digraph lifted {"));
        assert!(dot.contains("|"));
        let csv = d.to_csv();
        assert_eq!(csv.lines().count(), d.len() + 1);
    }

    #[test]
    fn region_endpoint_owned_from_outside() {
        // 4/3 belongs to the piece [4/3, 2], which lies outside the region
        let m = fixtures::worked_map();
        let d = build_lifted(&m, &fixtures::worked_region(), 2, 0, Semantics::Graph).unwrap();
        let hits = d.locate(&q(4, 3), &CodeWord(vec![6, 5]));
        assert_eq!(hits.len(), 1);
        assert_eq!(d.vertices[hits[0]].feas, RatInterval::point(q(4, 3)));
    }
}
