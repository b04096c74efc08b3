//! Piecewise continuous maps on a compact rational interval.
//!
//! A [`PcMap`] is a finite ordered list of interval pieces, each with its own
//! endpoint-membership flags and a continuous branch. The branch of a piece is
//! evaluated on the piece's closure, which is what adjoint maps exploit: an
//! adjoint reassigns a discontinuity point to any piece whose closure holds it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::numerics::{FlaggedInterval, RatInterval, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PcmError {
    #[error("{x} lies outside the space {space}")]
    Domain { x: Rational, space: RatInterval },
    #[error("no piece contains {0}")]
    Uncovered(Rational),
    #[error("invalid map: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("selector assigns {point} to piece {piece}, whose closure does not contain it")]
    BadSelector { point: Rational, piece: usize },
    #[error("branch knots must be strictly increasing and one fewer than the segments")]
    BadBranch,
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// `x ↦ a·x + b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineBranch {
    pub a: Rational,
    pub b: Rational,
}

impl AffineBranch {
    pub fn new(a: Rational, b: Rational) -> Self {
        AffineBranch { a, b }
    }

    pub fn identity() -> Self {
        AffineBranch::new(Rational::one(), Rational::zero())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        &self.a * x + &self.b
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &AffineBranch) -> AffineBranch {
        AffineBranch::new(&self.a * &inner.a, &self.a * &inner.b + &self.b)
    }

    pub fn image(&self, iv: &RatInterval) -> RatInterval {
        iv.affine_image(&self.a, &self.b)
    }

    /// Unique `x` with `a·x + b = y`, if the slope is nonzero.
    pub fn solve(&self, y: &Rational) -> Option<Rational> {
        (!self.a.is_zero()).then(|| (y - &self.b) / self.a.clone())
    }

    pub fn fixed_point(&self) -> Option<Rational> {
        let denom = Rational::one() - &self.a;
        (!denom.is_zero()).then(|| self.b.clone() / denom)
    }
}

impl fmt::Display for AffineBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, _) => write!(f, "{}", self.b),
            (false, true) => write!(f, "{}*x", self.a),
            (false, false) if self.b.is_negative() => write!(f, "{}*x - {}", self.a, -&self.b),
            (false, false) => write!(f, "{}*x + {}", self.a, self.b),
        }
    }
}

/// Continuous piecewise-affine branch. Segment `i` is valid between
/// `knots[i-1]` and `knots[i]`; adjacent segments agree at their knot.
///
/// Plain affine branches are the one-segment case; multi-segment branches
/// appear when [`PcMap::minimal_partition`] merges continuous neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Branch {
    knots: Vec<Rational>,
    segments: Vec<AffineBranch>,
}

impl Branch {
    pub fn affine(a: Rational, b: Rational) -> Self {
        Branch {
            knots: Vec::new(),
            segments: vec![AffineBranch::new(a, b)],
        }
    }

    pub fn from_segments(knots: Vec<Rational>, segments: Vec<AffineBranch>) -> Result<Self, PcmError> {
        if segments.is_empty() || knots.len() + 1 != segments.len() || knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PcmError::BadBranch);
        }
        Ok(Branch { knots, segments })
    }

    pub fn knots(&self) -> &[Rational] {
        &self.knots
    }

    pub fn segments(&self) -> &[AffineBranch] {
        &self.segments
    }

    pub fn as_affine(&self) -> Option<&AffineBranch> {
        (self.segments.len() == 1).then(|| &self.segments[0])
    }

    fn segment_index(&self, x: &Rational) -> usize {
        self.knots.iter().take_while(|k| *k < x).count()
    }

    pub fn segment_at(&self, x: &Rational) -> &AffineBranch {
        &self.segments[self.segment_index(x)]
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.segment_at(x).eval(x)
    }

    /// Closed domain of segment `i`, clipped to `within`.
    pub fn segment_domain(&self, i: usize, within: &RatInterval) -> Option<RatInterval> {
        let lo = if i == 0 { within.lo().clone() } else { self.knots[i - 1].clone() };
        let hi = if i + 1 == self.segments.len() {
            within.hi().clone()
        } else {
            self.knots[i].clone()
        };
        RatInterval::new(lo, hi).ok()?.meet(within)
    }

    /// Exact image of a closed interval.
    pub fn image(&self, iv: &RatInterval) -> RatInterval {
        let mut out = RatInterval::point(self.eval(iv.lo()));
        out = out.hull(&RatInterval::point(self.eval(iv.hi())));
        for k in &self.knots {
            if iv.contains(k) {
                out = out.hull(&RatInterval::point(self.eval(k)));
            }
        }
        out
    }

    /// Pieces `(closed domain, affine law)` covering `iv`.
    pub fn pieces_on(&self, iv: &RatInterval) -> Vec<(RatInterval, &AffineBranch)> {
        (0..self.segments.len())
            .filter_map(|i| self.segment_domain(i, iv).map(|d| (d, &self.segments[i])))
            .collect()
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(aff) = self.as_affine() {
            return write!(f, "{aff}");
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, " | {} | ", self.knots[i - 1])?;
            }
            write!(f, "{seg}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub span: FlaggedInterval,
    pub branch: Branch,
    pub symbol: usize,
}

impl Piece {
    pub fn closure(&self) -> RatInterval {
        RatInterval::spanning(self.span.lo.clone(), self.span.hi.clone())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.span.contains(x)
    }

    pub fn closure_contains(&self, x: &Rational) -> bool {
        &self.span.lo <= x && x <= &self.span.hi
    }

    /// Image of the closed span under the branch.
    pub fn image(&self) -> RatInterval {
        self.branch.image(&self.closure())
    }
}

/// A broken axiom of a piecewise continuous map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Overlap { pieces: (usize, usize), region: RatInterval },
    Gap { region: FlaggedInterval },
    NotSelfMap { piece: usize, image: RatInterval },
    OutsideSpace { piece: usize },
    Degenerate { piece: usize },
    OutOfOrder { pieces: (usize, usize) },
    EmptySpace,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap { pieces, region } if region.is_point() => {
                write!(f, "overlap at {} (pieces {} and {})", region.lo(), pieces.0, pieces.1)
            }
            Violation::Overlap { pieces, region } => {
                write!(f, "overlap on {} (pieces {} and {})", region, pieces.0, pieces.1)
            }
            Violation::Gap { region } => write!(f, "gap: {region} is not covered"),
            Violation::NotSelfMap { piece, image } => {
                write!(f, "not a self-map: piece {piece} has image {image}")
            }
            Violation::OutsideSpace { piece } => write!(f, "piece {piece} lies outside the space"),
            Violation::Degenerate { piece } => write!(f, "piece {piece} has zero length"),
            Violation::OutOfOrder { pieces } => {
                write!(f, "pieces {} and {} are out of order", pieces.0, pieces.1)
            }
            Violation::EmptySpace => write!(f, "space has zero length"),
        }
    }
}

/// Piecewise continuous self-map of `space`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcMap {
    pub name: Option<String>,
    space: RatInterval,
    pieces: Vec<Piece>,
}

impl PcMap {
    /// Builds and validates.
    pub fn new(space: RatInterval, pieces: Vec<(FlaggedInterval, Branch)>) -> Result<Self, PcmError> {
        let m = PcMap::unchecked(space, pieces);
        let v = m.validate();
        if v.is_empty() {
            Ok(m)
        } else {
            Err(PcmError::Invalid(v))
        }
    }

    /// Builds without validation, so that [`PcMap::validate`] can report on bad input.
    pub fn unchecked(space: RatInterval, pieces: Vec<(FlaggedInterval, Branch)>) -> Self {
        let pieces = pieces
            .into_iter()
            .enumerate()
            .map(|(symbol, (span, branch))| Piece { span, branch, symbol })
            .collect();
        PcMap {
            name: None,
            space,
            pieces,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn space(&self) -> &RatInterval {
        &self.space
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, i: usize) -> &Piece {
        &self.pieces[i]
    }

    pub fn symbol_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.space.is_point() {
            out.push(Violation::EmptySpace);
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if p.span.lo >= p.span.hi {
                out.push(Violation::Degenerate { piece: i });
                continue;
            }
            if !p.closure().is_subset_of(&self.space) {
                out.push(Violation::OutsideSpace { piece: i });
                continue;
            }
            let image = p.image();
            if !image.is_subset_of(&self.space) {
                out.push(Violation::NotSelfMap { piece: i, image });
            }
        }
        for w in 0..self.pieces.len().saturating_sub(1) {
            if self.pieces[w].span.lo >= self.pieces[w + 1].span.lo {
                out.push(Violation::OutOfOrder { pieces: (w, w + 1) });
            }
        }
        for i in 0..self.pieces.len() {
            for j in i + 1..self.pieces.len() {
                if let Some(m) = self.pieces[i].span.meet(&self.pieces[j].span) {
                    out.push(Violation::Overlap {
                        pieces: (i, j),
                        region: RatInterval::spanning(m.lo, m.hi),
                    });
                }
            }
        }
        // coverage: sweep the space from left to right over the sorted spans
        let mut spans: Vec<&FlaggedInterval> = self.pieces.iter().map(|p| &p.span).collect();
        spans.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut reach = self.space.lo().clone();
        let mut reach_closed = false;
        for s in spans {
            if s.lo > reach || (s.lo == reach && !reach_closed && !s.lo_closed) {
                let gap = FlaggedInterval::new(reach.clone(), s.lo.clone(), !reach_closed, !s.lo_closed);
                if !gap.is_empty() {
                    out.push(Violation::Gap { region: gap });
                }
            }
            if s.hi > reach || (s.hi == reach && s.hi_closed) {
                reach = s.hi.clone();
                reach_closed = s.hi_closed;
            }
        }
        let tail = FlaggedInterval::new(reach, self.space.hi().clone(), !reach_closed, true);
        if !tail.is_empty() {
            out.push(Violation::Gap { region: tail });
        }
        out
    }

    fn check_domain(&self, x: &Rational) -> Result<(), PcmError> {
        if self.space.contains(x) {
            Ok(())
        } else {
            Err(PcmError::Domain {
                x: x.clone(),
                space: self.space.clone(),
            })
        }
    }

    /// Index of the piece containing `x` (honouring endpoint flags).
    pub fn piece_of(&self, x: &Rational) -> Result<usize, PcmError> {
        self.check_domain(x)?;
        self.pieces
            .iter()
            .position(|p| p.contains(x))
            .ok_or_else(|| PcmError::Uncovered(x.clone()))
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, PcmError> {
        let i = self.piece_of(x)?;
        Ok(self.pieces[i].branch.eval(x))
    }

    /// Piece owning `x` under the selector `g`.
    pub fn piece_under(&self, g: &AdjointSelector, x: &Rational) -> Result<usize, PcmError> {
        self.check_domain(x)?;
        match g.assignment.get(x) {
            Some(&i) => Ok(i),
            None => self.piece_of(x),
        }
    }

    pub fn eval_adjoint(&self, g: &AdjointSelector, x: &Rational) -> Result<Rational, PcmError> {
        let i = self.piece_under(g, x)?;
        Ok(self.pieces[i].branch.eval(x))
    }

    /// Points shared by the closures of two distinct pieces.
    pub fn discontinuity_set(&self) -> Vec<Rational> {
        let mut d = BTreeSet::new();
        for i in 0..self.pieces.len() {
            for j in i + 1..self.pieces.len() {
                if let Some(m) = self.pieces[i].closure().meet(&self.pieces[j].closure()) {
                    if m.is_point() {
                        d.insert(m.lo().clone());
                    }
                }
            }
        }
        d.into_iter().collect()
    }

    /// Pieces whose closure contains `x`.
    pub fn closure_owners(&self, x: &Rational) -> Vec<usize> {
        (0..self.pieces.len())
            .filter(|&i| self.pieces[i].closure_contains(x))
            .collect()
    }

    /// Merges adjacent pieces whose branches agree at the shared breakpoint,
    /// until no such pair remains. The merged branch is continuous and
    /// piecewise affine.
    pub fn minimal_partition(&self) -> PcMap {
        let mut merged: Vec<(FlaggedInterval, Branch)> = Vec::new();
        for p in &self.pieces {
            if let Some((span, branch)) = merged.last_mut() {
                let bp = &p.span.lo;
                if &span.hi == bp && branch.eval(bp) == p.branch.eval(bp) {
                    *branch = join_branches(branch, bp, &p.branch);
                    span.hi = p.span.hi.clone();
                    span.hi_closed = p.span.hi_closed;
                    continue;
                }
            }
            merged.push((p.span.clone(), p.branch.clone()));
        }
        let mut out = PcMap::unchecked(self.space.clone(), merged);
        out.name = self.name.clone();
        out
    }

    /// Every adjoint selector: each discontinuity point goes to any piece
    /// whose closure contains it. Ordered lexicographically by piece index.
    pub fn list_adjoints(&self) -> Vec<AdjointSelector> {
        let choices: Vec<(Rational, Vec<usize>)> = self
            .discontinuity_set()
            .into_iter()
            .map(|d| {
                let owners = self.closure_owners(&d);
                (d, owners)
            })
            .collect();
        let mut out = vec![BTreeMap::new()];
        for (d, owners) in &choices {
            let mut next = Vec::with_capacity(out.len() * owners.len());
            for partial in &out {
                for &o in owners {
                    let mut a = partial.clone();
                    a.insert(d.clone(), o);
                    next.push(a);
                }
            }
            out = next;
        }
        out.into_iter().map(|assignment| AdjointSelector { assignment }).collect()
    }

    /// Number of adjoints without enumerating them.
    pub fn adjoint_count(&self) -> usize {
        self.discontinuity_set()
            .iter()
            .map(|d| self.closure_owners(d).len())
            .product()
    }
}

fn join_branches(left: &Branch, bp: &Rational, right: &Branch) -> Branch {
    // knots of a branch always lie inside its own piece, so the right branch's
    // knots are all beyond the breakpoint
    let mut knots = left.knots.clone();
    let mut segments = left.segments.clone();
    if segments.last() != Some(&right.segments[0]) {
        knots.push(bp.clone());
        segments.push(right.segments[0].clone());
    }
    knots.extend(right.knots.iter().cloned());
    segments.extend(right.segments.iter().skip(1).cloned());
    Branch { knots, segments }
}

/// An adjoint of a map: which piece's branch applies at each discontinuity point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdjointSelector {
    pub assignment: BTreeMap<Rational, usize>,
}

impl AdjointSelector {
    /// The selector representing the map itself.
    pub fn identity(m: &PcMap) -> Self {
        let assignment = m
            .discontinuity_set()
            .into_iter()
            .map(|d| {
                let owner = m.piece_of(&d).expect("discontinuity point lies in the space");
                (d, owner)
            })
            .collect();
        AdjointSelector { assignment }
    }

    /// Identity selector with some points reassigned; checked against closures.
    pub fn with(m: &PcMap, overrides: &[(Rational, usize)]) -> Result<Self, PcmError> {
        let mut g = AdjointSelector::identity(m);
        for (point, piece) in overrides {
            let ok = *piece < m.symbol_count()
                && m.piece(*piece).closure_contains(point)
                && g.assignment.contains_key(point);
            if !ok {
                return Err(PcmError::BadSelector {
                    point: point.clone(),
                    piece: *piece,
                });
            }
            g.assignment.insert(point.clone(), *piece);
        }
        Ok(g)
    }

    pub fn is_identity(&self, m: &PcMap) -> bool {
        *self == AdjointSelector::identity(m)
    }

    /// Points where this selector differs from the map itself.
    pub fn reassigned(&self, m: &PcMap) -> Vec<(Rational, usize)> {
        let id = AdjointSelector::identity(m);
        self.assignment
            .iter()
            .filter(|(d, p)| id.assignment.get(*d) != Some(*p))
            .map(|(d, p)| (d.clone(), *p))
            .collect()
    }

    /// `"f"` for the identity, else `"d->piece"` pairs for reassigned points.
    pub fn describe(&self, m: &PcMap) -> String {
        let r = self.reassigned(m);
        if r.is_empty() {
            return "f".to_string();
        }
        r.iter()
            .map(|(d, p)| format!("{d}->{p}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn worked_map_is_valid() {
        let m = fixtures::worked_map();
        assert!(m.validate().is_empty(), "{:?}", m.validate());
        assert_eq!(m.symbol_count(), 7);
    }

    #[test]
    fn overlap_and_self_map_violations() {
        let unit = RatInterval::new(q(0, 1), q(1, 1)).unwrap();
        let m = PcMap::unchecked(
            unit.clone(),
            vec![
                (FlaggedInterval::new(q(0, 1), q(1, 2), true, true), Branch::affine(q(1, 1), q(0, 1))),
                (FlaggedInterval::new(q(1, 2), q(1, 1), true, true), Branch::affine(q(1, 1), q(0, 1))),
            ],
        );
        let v = m.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().starts_with("overlap at 1/2"));

        let m = PcMap::unchecked(
            unit,
            vec![(FlaggedInterval::new(q(0, 1), q(1, 1), true, true), Branch::affine(q(2, 1), q(1, 1)))],
        );
        let v = m.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().starts_with("not a self-map"));
    }

    #[test]
    fn gaps_are_reported() {
        let unit = RatInterval::new(q(0, 1), q(1, 1)).unwrap();
        let m = PcMap::unchecked(
            unit,
            vec![
                (FlaggedInterval::new(q(0, 1), q(1, 2), true, false), Branch::affine(q(0, 1), q(0, 1))),
                (FlaggedInterval::new(q(1, 2), q(1, 1), false, true), Branch::affine(q(0, 1), q(0, 1))),
            ],
        );
        let v = m.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(&v[0], Violation::Gap { region } if region.contains(&q(1, 2))));
        assert!(m.piece_of(&q(1, 2)).is_err());
    }

    #[test]
    fn evaluation() {
        let m = fixtures::worked_map();
        assert_eq!(m.eval(&q(2, 3)).unwrap(), q(2, 3));
        assert_eq!(m.eval(&q(1, 3)).unwrap(), q(0, 1));
        assert!(matches!(m.eval(&q(3, 1)), Err(PcmError::Domain { .. })));
        let r = fixtures::remark_map();
        assert_eq!(r.eval(&q(1, 2)).unwrap(), q(3, 4));
    }

    #[test]
    fn adjoint_evaluation() {
        let r = fixtures::remark_map();
        let g = AdjointSelector::with(&r, &[(q(1, 2), 0)]).unwrap();
        assert_eq!(r.eval_adjoint(&g, &q(1, 2)).unwrap(), q(1, 2));
        let id = AdjointSelector::identity(&r);
        assert_eq!(r.eval_adjoint(&id, &q(1, 2)).unwrap(), q(3, 4));
        let m = fixtures::worked_map();
        let g = AdjointSelector::with(&m, &[(q(-1, 3), 0)]).unwrap();
        assert_eq!(m.eval_adjoint(&g, &q(-1, 3)).unwrap(), q(0, 1));
        assert!(AdjointSelector::with(&m, &[(q(-1, 3), 3)]).is_err());
        assert_eq!(g.describe(&m), "-1/3->0");
    }

    #[test]
    fn discontinuity_sets() {
        let m = fixtures::worked_map();
        let expect: Vec<Rational> = [(-1, 3), (0, 1), (1, 3), (2, 3), (1, 1), (4, 3)]
            .iter()
            .map(|&(n, d)| q(n, d))
            .collect();
        assert_eq!(m.discontinuity_set(), expect);
        assert_eq!(fixtures::remark_map().discontinuity_set(), vec![q(1, 2)]);
        assert!(fixtures::attractor().discontinuity_set().is_empty());
    }

    #[test]
    fn minimal_partitions() {
        let unit = RatInterval::new(q(0, 1), q(1, 1)).unwrap();
        let m = PcMap::new(
            unit,
            vec![
                (FlaggedInterval::new(q(0, 1), q(1, 2), true, false), Branch::affine(q(1, 1), q(0, 1))),
                (FlaggedInterval::new(q(1, 2), q(1, 1), true, true), Branch::affine(q(1, 1), q(0, 1))),
            ],
        )
        .unwrap();
        let mp = m.minimal_partition();
        assert_eq!(mp.symbol_count(), 1);
        assert!(mp.piece(0).branch.as_affine().is_some());
        assert_eq!(fixtures::remark_map().minimal_partition().symbol_count(), 2);
        assert_eq!(fixtures::worked_map().minimal_partition().symbol_count(), 7);

        let fold = fixtures::repeller();
        let mp = fold.minimal_partition();
        assert_eq!(mp.symbol_count(), 1);
        assert_eq!(mp.piece(0).branch.knots(), &[q(-1, 2), q(1, 2)]);
        assert!(mp.validate().is_empty());
        for x in [q(-1, 1), q(-3, 4), q(-1, 2), q(0, 1), q(1, 3), q(1, 2), q(1, 1)] {
            assert_eq!(mp.eval(&x).unwrap(), fold.eval(&x).unwrap());
        }
    }

    #[test]
    fn adjoint_enumeration() {
        assert_eq!(fixtures::remark_map().list_adjoints().len(), 2);
        let m = fixtures::worked_map();
        let all = m.list_adjoints();
        assert_eq!(all.len(), 64);
        assert_eq!(m.adjoint_count(), 64);
        assert!(all.iter().any(|g| g.is_identity(&m)));
        let a = fixtures::attractor().list_adjoints();
        assert_eq!(a.len(), 1);
        assert!(a[0].assignment.is_empty());
    }

    #[test]
    fn branch_images_cover_knots() {
        let b = Branch::from_segments(
            vec![q(1, 2)],
            vec![AffineBranch::new(q(2, 1), q(0, 1)), AffineBranch::new(q(-2, 1), q(2, 1))],
        )
        .unwrap();
        let img = b.image(&RatInterval::new(q(1, 4), q(1, 1)).unwrap());
        assert_eq!(img, RatInterval::new(q(0, 1), q(1, 1)).unwrap());
        assert!(Branch::from_segments(vec![], vec![]).is_err());
    }
}
