//! Conley index of piecewise continuous interval maps.
//!
//! A piecewise continuous map is lifted to the closure of the graph of its
//! coding map, where it becomes continuous. The lifted dynamics is enclosed by
//! a finite digraph on (grid cell, truncated itinerary) pairs; isolating
//! neighborhoods, index pairs and the homological index map are computed on
//! that digraph with exact rational arithmetic.

pub mod coding;
pub mod fixtures;
pub mod homology;
pub mod index_pair;
pub mod invariance;
pub mod lifted;
pub mod linalg;
pub mod mapfile;
pub mod numerics;
pub mod pcm;
pub mod pipeline;
pub mod report;
pub mod szymczak;
pub mod wazewski;

pub use numerics::{RatInterval, Rational};
pub use pcm::{AdjointSelector, PcMap};
