//! Truncated itineraries and the metrics on the symbolic and graph coordinates.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numerics::Rational;
use crate::pcm::{AdjointSelector, PcMap, PcmError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("code words have different depths ({0} vs {1})")]
    DepthMismatch(usize, usize),
    #[error("code depth must be at least 1")]
    ZeroDepth,
    #[error(transparent)]
    Map(#[from] PcmError),
}

/// First `k` symbols of an itinerary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeWord(pub Vec<usize>);

impl CodeWord {
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    /// Drops the first symbol.
    pub fn tail(&self) -> &[usize] {
        &self.0[1..]
    }

    /// All symbols but the last.
    pub fn head(&self) -> &[usize] {
        &self.0[..self.0.len() - 1]
    }

    /// Symbols concatenated when all are single digits, dot-separated otherwise.
    pub fn compact(&self) -> String {
        let sep = if self.0.iter().all(|&s| s < 10) { "" } else { "." };
        self.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(sep)
    }
}

impl fmt::Display for CodeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl Serialize for CodeWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

/// Itinerary of `x` of length `k` under the adjoint `g`.
pub fn code(m: &PcMap, g: &AdjointSelector, x: &Rational, k: usize) -> Result<CodeWord, CodingError> {
    if k == 0 {
        return Err(CodingError::ZeroDepth);
    }
    let mut symbols = Vec::with_capacity(k);
    let mut y = x.clone();
    for i in 0..k {
        let s = m.piece_under(g, &y)?;
        symbols.push(s);
        if i + 1 < k {
            y = m.piece(s).branch.eval(&y);
        }
    }
    Ok(CodeWord(symbols))
}

/// `1/(n+1)` for the first disagreement index `n`, `0` for equal words.
pub fn sigma_metric(u: &CodeWord, v: &CodeWord) -> Result<Rational, CodingError> {
    if u.depth() != v.depth() {
        return Err(CodingError::DepthMismatch(u.depth(), v.depth()));
    }
    Ok(match u.0.iter().zip(&v.0).position(|(a, b)| a != b) {
        Some(n) => Rational::ratio(1, n as i64 + 1),
        None => Rational::zero(),
    })
}

/// `max(|x - y|, sigma_metric)` on points of the lifted space.
pub fn graph_metric(p: (&Rational, &CodeWord), q: (&Rational, &CodeWord)) -> Result<Rational, CodingError> {
    let ds = sigma_metric(p.1, q.1)?;
    let dx = (p.0 - q.0).abs();
    Ok(if dx > ds { dx } else { ds })
}
