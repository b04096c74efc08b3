//! Shift-equivalence classes of integer endomorphisms: morphisms `[phi, n]`
//! between `(X, f)` and `(X', f')`, Leray reduction to the eventual image,
//! and the homological index class built from an index map.

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::homology::GradedMatrix;
use crate::linalg::{IntMatrix, QMatrix, ShapeError};
use crate::numerics::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SzError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("phi does not intertwine the endomorphisms (phi·f != f'·phi)")]
    NotEquivariant,
    #[error("morphisms have different source or target")]
    Mismatch,
    #[error("cannot compose: target of the first is not the source of the second")]
    NotComposable,
}

/// Representative `[phi, n]` of a morphism `(X, f) -> (X', f')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SzMorphism {
    phi: IntMatrix,
    n: usize,
    source: IntMatrix,
    target: IntMatrix,
}

impl SzMorphism {
    pub fn new(phi: IntMatrix, n: usize, source: IntMatrix, target: IntMatrix) -> Result<SzMorphism, SzError> {
        if !source.is_square() {
            return Err(ShapeError::NotSquare(source.rows(), source.cols()).into());
        }
        if !target.is_square() {
            return Err(ShapeError::NotSquare(target.rows(), target.cols()).into());
        }
        if phi.rows() != target.rows() || phi.cols() != source.rows() {
            return Err(ShapeError::Mismatch(target.rows(), target.cols(), phi.rows(), phi.cols()).into());
        }
        if phi.checked_mul(&source)? != target.checked_mul(&phi)? {
            return Err(SzError::NotEquivariant);
        }
        Ok(SzMorphism { phi, n, source, target })
    }

    /// `[id, 0]` on `(X, f)`.
    pub fn identity(f: &IntMatrix) -> Result<SzMorphism, SzError> {
        SzMorphism::new(IntMatrix::identity(f.rows()), 0, f.clone(), f.clone())
    }

    /// `[f^n, n]`, equivalent to the identity.
    pub fn power(f: &IntMatrix, n: usize) -> Result<SzMorphism, SzError> {
        SzMorphism::new(f.pow(n)?, n, f.clone(), f.clone())
    }

    pub fn phi(&self) -> &IntMatrix {
        &self.phi
    }

    pub fn shift(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> &IntMatrix {
        &self.source
    }

    pub fn target(&self) -> &IntMatrix {
        &self.target
    }
}

/// `Δ = phi1·f^n2 − phi2·f^n1` for two parallel morphisms.
fn difference(m1: &SzMorphism, m2: &SzMorphism) -> Result<IntMatrix, SzError> {
    if m1.source != m2.source || m1.target != m2.target {
        return Err(SzError::Mismatch);
    }
    let f = &m1.source;
    Ok(m1.phi.checked_mul(&f.pow(m2.n)?)?.checked_sub(&m2.phi.checked_mul(&f.pow(m1.n)?)?)?)
}

/// Least `k` with `phi1·f^(n2+k) = phi2·f^(n1+k)`, or `None` when the two
/// representatives are not equivalent. Kernels of powers of `f` stabilise by
/// `k = dim`, so no larger `k` is tried.
pub fn szymczak_equal(m1: &SzMorphism, m2: &SzMorphism) -> Result<Option<usize>, SzError> {
    let mut delta = difference(m1, m2)?;
    let f = &m1.source;
    for k in 0..=f.rows() {
        if delta.is_zero() {
            return Ok(Some(k));
        }
        delta = delta.checked_mul(f)?;
    }
    Ok(None)
}

/// `[phi', n'] ∘ [phi, n] = [phi'·phi, n' + n]`.
pub fn compose(second: &SzMorphism, first: &SzMorphism) -> Result<SzMorphism, SzError> {
    if first.target != second.source {
        return Err(SzError::NotComposable);
    }
    Ok(SzMorphism {
        phi: second.phi.checked_mul(&first.phi)?,
        n: second.n + first.n,
        source: first.source.clone(),
        target: second.target.clone(),
    })
}

/// Restriction of a matrix to its eventual image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LerayBlock {
    /// Invertible action on the eventual image, in the coordinates of `basis`.
    pub block: QMatrix,
    /// Columns span the image of `M^dim`.
    pub basis: QMatrix,
}

impl LerayBlock {
    pub fn dim(&self) -> usize {
        self.block.rows()
    }
}

pub fn leray_reduce(m: &IntMatrix) -> Result<LerayBlock, ShapeError> {
    if !m.is_square() {
        return Err(ShapeError::NotSquare(m.rows(), m.cols()));
    }
    let q = m.to_rational();
    let basis = m.pow(m.rows())?.to_rational().column_basis();
    let image = q.checked_mul(&basis)?;
    let block = basis
        .solve(&image)
        .expect("the eventual image is invariant, so M·B lies in the span of B");
    Ok(LerayBlock { block, basis })
}

/// Characteristic polynomial of an integer matrix with every factor `x`
/// removed, highest degree first. For the empty matrix this is `[1]`.
pub fn reduced_charpoly(m: &IntMatrix) -> Result<Vec<BigInt>, ShapeError> {
    let mut c = m.to_rational().charpoly()?;
    while c.len() > 1 && c.last().is_some_and(Rational::is_zero) {
        c.pop();
    }
    Ok(c.iter()
        .map(|x| x.to_bigint().expect("integer matrices have integer characteristic polynomials"))
        .collect())
}

/// Per-degree part of the index class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeClass {
    pub degree: usize,
    pub matrix: IntMatrix,
    pub leray: QMatrix,
    #[serde(serialize_with = "crate::linalg::serialize_bigints")]
    pub char_poly_reduced: Vec<BigInt>,
    pub nilpotent: bool,
}

/// Homological Conley index: the graded index map up to shift equivalence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConleyIndexClass {
    pub degrees: Vec<DegreeClass>,
    pub trivial: bool,
}

pub fn index_class(g: &GradedMatrix) -> ConleyIndexClass {
    let degrees: Vec<DegreeClass> = [0, 1]
        .into_iter()
        .map(|k| {
            let matrix = g.degree(k).clone();
            let leray = leray_reduce(&matrix).expect("index maps are square").block;
            DegreeClass {
                degree: k,
                nilpotent: leray.rows() == 0,
                char_poly_reduced: reduced_charpoly(&matrix).expect("index maps are square"),
                leray,
                matrix,
            }
        })
        .collect();
    let trivial = degrees.iter().all(|d| d.nilpotent);
    ConleyIndexClass { degrees, trivial }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassComparison {
    /// Both nilpotent or conjugate by a permutation in every degree.
    Equivalent,
    /// Leray blocks rationally similar, but no integer certificate found.
    Undetermined,
    Distinct,
}

const PERMUTATION_SEARCH_LIMIT: usize = 7;

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("a larger element exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn permutation_conjugate(a: &IntMatrix, b: &IntMatrix) -> bool {
    if a.rows() != b.rows() || a.rows() > PERMUTATION_SEARCH_LIMIT {
        return false;
    }
    let mut perm: Vec<usize> = (0..a.rows()).collect();
    loop {
        if a.permuted(&perm) == *b {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

pub fn compare_classes(x: &ConleyIndexClass, y: &ConleyIndexClass) -> ClassComparison {
    let mut certified = true;
    for (a, b) in x.degrees.iter().zip(&y.degrees) {
        if a.char_poly_reduced != b.char_poly_reduced || !a.leray.similar_to(&b.leray) {
            return ClassComparison::Distinct;
        }
        let both_trivial = a.nilpotent && b.nilpotent;
        certified &= both_trivial || permutation_conjugate(&a.matrix, &b.matrix);
    }
    if certified {
        ClassComparison::Equivalent
    } else {
        ClassComparison::Undetermined
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn reflexive_with_zero_certificate() {
        let f = mat(&[&[1, 2], &[0, 3]]);
        let a = SzMorphism::power(&f, 2).unwrap();
        assert_eq!(szymczak_equal(&a, &a).unwrap(), Some(0));
    }

    #[test]
    fn powers_equal_identity() {
        let f = mat(&[&[2, 1], &[1, 1]]);
        let id = SzMorphism::identity(&f).unwrap();
        for n in 0..5 {
            assert!(szymczak_equal(&SzMorphism::power(&f, n).unwrap(), &id).unwrap().is_some());
        }
    }

    #[test]
    fn nilpotent_parts_collapse() {
        let f = mat(&[&[0]]);
        let id = SzMorphism::new(mat(&[&[1]]), 0, f.clone(), f.clone()).unwrap();
        let zero = SzMorphism::new(mat(&[&[0]]), 0, f.clone(), f.clone()).unwrap();
        assert_eq!(szymczak_equal(&id, &zero).unwrap(), Some(1));
        let g = mat(&[&[1]]);
        let id = SzMorphism::identity(&g).unwrap();
        let zero = SzMorphism::new(mat(&[&[0]]), 0, g.clone(), g.clone()).unwrap();
        assert_eq!(szymczak_equal(&id, &zero).unwrap(), None);
    }

    #[test]
    fn morphism_condition_checked() {
        let f = mat(&[&[1, 0], &[0, 2]]);
        let swap = mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(SzMorphism::new(swap, 0, f.clone(), f), Err(SzError::NotEquivariant));
    }

    #[test]
    fn shifts_add() {
        let f = mat(&[&[1, 1], &[0, 1]]);
        let a = SzMorphism::power(&f, 2).unwrap();
        let b = SzMorphism::power(&f, 3).unwrap();
        let c = compose(&b, &a).unwrap();
        assert_eq!(c.shift(), 5);
        let id = SzMorphism::identity(&f).unwrap();
        assert!(szymczak_equal(&compose(&id, &a).unwrap(), &a).unwrap().is_some());
    }

    #[test]
    fn leray_examples() {
        let l = leray_reduce(&mat(&[&[1, 1], &[0, 0]])).unwrap();
        assert_eq!(l.block, mat(&[&[1]]).to_rational());
        assert_eq!(leray_reduce(&mat(&[&[0, 1], &[0, 0]])).unwrap().dim(), 0);
        let inv = mat(&[&[2, 1], &[1, 1]]);
        assert!(leray_reduce(&inv).unwrap().block.similar_to(&inv.to_rational()));
    }

    #[test]
    fn reduced_charpolys() {
        let p = mat(&[&[0, 1, 0, 0], &[0, 0, 1, 0], &[1, 0, 0, 0], &[0, 0, 0, 1]]);
        let c: Vec<i64> = reduced_charpoly(&p).unwrap().iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(c, vec![1, -1, 0, -1, 1]);
        let c: Vec<i64> = reduced_charpoly(&mat(&[&[1, 1], &[0, 0]])).unwrap().iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(c, vec![1, -1]);
        assert_eq!(reduced_charpoly(&IntMatrix::zeros(0, 0)).unwrap(), vec![BigInt::from(1)]);
    }

    fn graded(d0: IntMatrix, d1: IntMatrix) -> GradedMatrix {
        GradedMatrix { degree0: d0, degree1: d1, generators0: vec![], generators1: vec![] }
    }

    #[test]
    fn triviality_and_comparison() {
        let zero = index_class(&graded(mat(&[&[0, 1], &[0, 0]]), IntMatrix::zeros(0, 0)));
        assert!(zero.trivial);
        let one = index_class(&graded(mat(&[&[1]]), IntMatrix::zeros(0, 0)));
        assert!(!one.trivial);
        let empty = index_class(&graded(IntMatrix::zeros(0, 0), IntMatrix::zeros(0, 0)));
        assert_eq!(compare_classes(&zero, &empty), ClassComparison::Equivalent);
        assert_eq!(compare_classes(&zero, &one), ClassComparison::Distinct);
        let padded = index_class(&graded(mat(&[&[1, 0], &[0, 0]]), IntMatrix::zeros(0, 0)));
        assert_eq!(compare_classes(&one, &padded), ClassComparison::Undetermined);
        let p = mat(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let a = index_class(&graded(p.clone(), IntMatrix::zeros(0, 0)));
        let b = index_class(&graded(p.permuted(&[2, 0, 1]), IntMatrix::zeros(0, 0)));
        assert_eq!(compare_classes(&a, &b), ClassComparison::Equivalent);
    }
}
