//! Built-in example maps used by the CLI, the tests and the acceptance suite.

use crate::numerics::{FlaggedInterval, RatInterval, Rational};
use crate::pcm::{Branch, PcMap};

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn iv(a: Rational, b: Rational) -> RatInterval {
    RatInterval::new(a, b).expect("fixture interval is ordered")
}

/// `[lo, hi)` with branch `a·x + b`; the last piece of a map closes at `hi`.
fn piece(lo: Rational, hi: Rational, hi_closed: bool, a: Rational, b: Rational) -> (FlaggedInterval, Branch) {
    (FlaggedInterval::new(lo, hi, true, hi_closed), Branch::affine(a, b))
}

fn build(name: &str, space: RatInterval, pieces: Vec<(FlaggedInterval, Branch)>) -> PcMap {
    PcMap::new(space, pieces).expect("fixture map is valid").with_name(name)
}

/// Seven-branch map on `[-1, 2]`; its neighborhood of interest is [`worked_region`].
pub fn worked_map() -> PcMap {
    let one = q(1, 1);
    build(
        "worked-7-branch",
        iv(q(-1, 1), q(2, 1)),
        vec![
            piece(q(-1, 1), q(-1, 3), false, one.clone(), q(1, 3)),
            piece(q(-1, 3), q(0, 1), false, one.clone(), q(1, 1)),
            piece(q(0, 1), q(1, 3), false, one.clone(), q(2, 3)),
            piece(q(1, 3), q(2, 3), false, one.clone(), q(-1, 3)),
            piece(q(2, 3), q(1, 1), false, q(-1, 1), q(4, 3)),
            piece(q(1, 1), q(4, 3), false, one.clone(), q(-1, 1)),
            piece(q(4, 3), q(2, 1), true, one, q(-1, 3)),
        ],
    )
}

pub fn worked_region() -> RatInterval {
    iv(q(-1, 3), q(4, 3))
}

/// `x` on `[0, 1/2)`, `x/2 + 1/2` on `[1/2, 1]`: the invariant part of
/// `[0, 3/5]` is `[0, 1/2)`, which is not closed.
pub fn remark_map() -> PcMap {
    build(
        "remark",
        iv(q(0, 1), q(1, 1)),
        vec![
            piece(q(0, 1), q(1, 2), false, q(1, 1), q(0, 1)),
            piece(q(1, 2), q(1, 1), true, q(1, 2), q(1, 2)),
        ],
    )
}

pub fn remark_region() -> RatInterval {
    iv(q(0, 1), q(3, 5))
}

/// `x/2 + 1/4` on `[0, 1/2)`, `x/2 + 1/2` on `[1/2, 1]`. The map has no
/// invariant point in `[1/4, 3/4]`, but the adjoint sending `1/2` to the left
/// piece fixes `1/2`.
pub fn adjoint_witness() -> PcMap {
    build(
        "adjoint-witness",
        iv(q(0, 1), q(1, 1)),
        vec![
            piece(q(0, 1), q(1, 2), false, q(1, 2), q(1, 4)),
            piece(q(1, 2), q(1, 1), true, q(1, 2), q(1, 2)),
        ],
    )
}

pub fn adjoint_witness_region() -> RatInterval {
    iv(q(1, 4), q(3, 4))
}

/// `x/2` on `[-1, 1]`.
pub fn attractor() -> PcMap {
    build(
        "attractor",
        iv(q(-1, 1), q(1, 1)),
        vec![piece(q(-1, 1), q(1, 1), true, q(1, 2), q(0, 1))],
    )
}

/// Continuous fold on `[-1, 1]` that is `2x` on `[-1/2, 1/2]`. Given as three
/// affine pieces; the minimal partition merges them into one.
pub fn repeller() -> PcMap {
    build(
        "repeller",
        iv(q(-1, 1), q(1, 1)),
        vec![
            piece(q(-1, 1), q(-1, 2), false, q(-2, 1), q(-2, 1)),
            piece(q(-1, 2), q(1, 2), false, q(2, 1), q(0, 1)),
            piece(q(1, 2), q(1, 1), true, q(-2, 1), q(2, 1)),
        ],
    )
}

/// Neighborhood shared by the attractor and the repeller.
pub fn centered_region() -> RatInterval {
    iv(q(-1, 2), q(1, 2))
}

/// `x ↦ x` on `space` as a single piece.
pub fn identity(space: RatInterval) -> PcMap {
    let (lo, hi) = (space.lo().clone(), space.hi().clone());
    build(
        "identity",
        space,
        vec![piece(lo, hi, true, q(1, 1), q(0, 1))],
    )
}

/// Two identity pieces split at `1/2` on `[0, 1]`; `1/2` is a fixed
/// discontinuity point.
pub fn split_identity() -> PcMap {
    build(
        "split-identity",
        iv(q(0, 1), q(1, 1)),
        vec![
            piece(q(0, 1), q(1, 2), false, q(1, 1), q(0, 1)),
            piece(q(1, 2), q(1, 1), true, q(1, 1), q(0, 1)),
        ],
    )
}

/// A named fixture with its neighborhood.
pub struct Fixture {
    pub map: PcMap,
    pub region: RatInterval,
}

pub fn all() -> Vec<Fixture> {
    vec![
        Fixture { map: worked_map(), region: worked_region() },
        Fixture { map: remark_map(), region: remark_region() },
        Fixture { map: adjoint_witness(), region: adjoint_witness_region() },
        Fixture { map: attractor(), region: centered_region() },
        Fixture { map: repeller(), region: centered_region() },
    ]
}
