//! Brute-force hitting-set oracle.
//!
//! Everything here enumerates vertex sets by size, then lexicographically,
//! so witnesses and counterexamples are deterministic. Only vertices that
//! occur in some edge are enumerated: a vertex outside every edge hits
//! nothing, so dropping it from a candidate set changes no answer.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::vertex_set::{Vertex, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HittingSetAnswer {
    /// Lexicographically least hitting set of minimum size, if one of size
    /// at most `k` exists.
    pub witness: Option<VertexSet>,
}

impl HittingSetAnswer {
    pub fn exists(&self) -> bool {
        self.witness.is_some()
    }
}

/// Outcome of comparing the size-k hitting sets of two hypergraphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Same,
    /// The least set of size at most `k` that hits exactly one of the two.
    Counterexample(VertexSet),
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Same)
    }
}

/// Visits every subset of `universe` with at most `max_size` elements,
/// ordered by size and then lexicographically.
pub(crate) fn visit_subsets<T>(
    universe: &[Vertex],
    max_size: usize,
    mut visit: impl FnMut(&VertexSet) -> ControlFlow<T>,
) -> Option<T> {
    for size in 0..=max_size.min(universe.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let set: VertexSet = idx.iter().map(|&i| universe[i]).collect();
            if let ControlFlow::Break(t) = visit(&set) {
                return Some(t);
            }
            // Advance to the next combination in lexicographic order.
            let Some(pos) = (0..size).rev().find(|&p| idx[p] < universe.len() - size + p) else {
                break;
            };
            idx[pos] += 1;
            for p in pos + 1..size {
                idx[p] = idx[p - 1] + 1;
            }
        }
    }
    None
}

pub fn min_hitting_set(h: &Hypergraph, k: usize) -> HittingSetAnswer {
    if h.has_empty_edge() {
        return HittingSetAnswer { witness: None };
    }
    let universe: Vec<Vertex> = h.covered_vertices().iter().collect();
    let witness = visit_subsets(&universe, k, |x| {
        if h.is_hit_by(x) {
            ControlFlow::Break(x.clone())
        } else {
            ControlFlow::Continue(())
        }
    });
    HittingSetAnswer { witness }
}

/// Checks that `h1` and `h2` have exactly the same hitting sets of size at
/// most `k`, by exhaustion over the vertices occurring in either.
pub fn same_size_k_hitting_sets(h1: &Hypergraph, h2: &Hypergraph, k: usize) -> Result<Equivalence> {
    if h1.vertex_count() != h2.vertex_count() {
        return Err(Error::UniverseMismatch {
            left: h1.vertex_count(),
            right: h2.vertex_count(),
        });
    }
    let universe: Vec<Vertex> = h1
        .covered_vertices()
        .union(&h2.covered_vertices())
        .iter()
        .collect();
    let found = visit_subsets(&universe, k, |x| {
        if h1.is_hit_by(x) != h2.is_hit_by(x) {
            ControlFlow::Break(x.clone())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(found.map_or(Equivalence::Same, Equivalence::Counterexample))
}
