//! The hypergraph data model and its set-algebraic operators.
//!
//! A [`Hypergraph`] is a vertex universe `{0, .., n-1}` (with optional display
//! names) together with a deduplicated edge set kept in canonical order. All
//! derived hypergraphs in this crate keep the universe of their input, so the
//! binary operators refuse operands on different universes.

use std::fmt;

use crate::error::{Error, Result};
use crate::vertex_set::{Vertex, VertexSet};

/// A hyperedge. The empty edge is a legal value.
pub type Edge = VertexSet;

#[derive(Clone, PartialEq, Eq)]
pub struct Hypergraph {
    vertex_count: usize,
    names: Option<Vec<String>>,
    edges: Vec<Edge>,
}

impl Hypergraph {
    /// Builds a hypergraph, collapsing duplicate edges.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for e in &edges {
            if let Some(v) = e.last().filter(|&v| v >= vertex_count) {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    universe: vertex_count,
                });
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self {
            vertex_count,
            names: None,
            edges,
        })
    }

    /// The edgeless hypergraph on `vertex_count` vertices.
    pub fn empty(vertex_count: usize) -> Self {
        Self {
            vertex_count,
            names: None,
            edges: Vec::new(),
        }
    }

    /// Attaches display names, one per vertex.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.vertex_count {
            return Err(Error::InvalidArgument(format!(
                "{} names for {} vertices",
                names.len(),
                self.vertex_count
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if name.is_empty() || name.starts_with('#') || name.contains(char::is_whitespace) {
                return Err(Error::InvalidArgument(format!("bad vertex name `{name}`")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate vertex name `{name}`")));
            }
        }
        self.names = Some(names);
        Ok(self)
    }

    /// Same universe and names as `self`, different edges. Edges must already
    /// be in range.
    pub(crate) fn derive(&self, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        debug_assert!(edges
            .iter()
            .all(|e| e.last().map_or(true, |v| v < self.vertex_count)));
        edges.sort_unstable();
        edges.dedup();
        Self {
            vertex_count: self.vertex_count,
            names: self.names.clone(),
            edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Display name of `v`: its given name, or `v<index>`.
    pub fn vertex_name(&self, v: Vertex) -> String {
        match &self.names {
            Some(names) => names[v].clone(),
            None => format!("v{v}"),
        }
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<Vertex> {
        match &self.names {
            Some(names) => names.iter().position(|n| n == name),
            None => name
                .strip_prefix('v')
                .and_then(|i| i.parse::<usize>().ok())
                .filter(|&i| i < self.vertex_count && format!("v{i}") == name),
        }
    }

    /// Edges in canonical (lexicographic) order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edges(&self) -> bool {
        !self.edges.is_empty()
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    pub fn has_empty_edge(&self) -> bool {
        self.edges.first().is_some_and(VertexSet::is_empty)
    }

    /// `d(H)`: the largest edge cardinality, 0 for no edges.
    pub fn dimension(&self) -> usize {
        self.edges.iter().map(VertexSet::len).max().unwrap_or(0)
    }

    /// Vertices that occur in at least one edge.
    pub fn covered_vertices(&self) -> VertexSet {
        let mut out = VertexSet::new();
        for e in &self.edges {
            out.union_with(e);
        }
        out
    }

    pub fn check_vertices(&self, set: &VertexSet) -> Result<()> {
        match set.last() {
            Some(v) if v >= self.vertex_count => Err(Error::VertexOutOfRange {
                vertex: v,
                universe: self.vertex_count,
            }),
            _ => Ok(()),
        }
    }

    /// Whether `x` meets every edge. Never true while the empty edge is present.
    pub fn is_hitting_set(&self, x: &VertexSet) -> Result<bool> {
        self.check_vertices(x)?;
        Ok(self.is_hit_by(x))
    }

    pub(crate) fn is_hit_by(&self, x: &VertexSet) -> bool {
        self.edges.iter().all(|e| e.intersects(x))
    }

    fn same_universe(&self, other: &Self) -> Result<()> {
        if self.vertex_count == other.vertex_count {
            Ok(())
        } else {
            Err(Error::UniverseMismatch {
                left: self.vertex_count,
                right: other.vertex_count,
            })
        }
    }

    /// `H ⊖ H2`: drops every edge of `self` that contains some edge of `other`.
    pub fn ominus(&self, other: &Self) -> Result<Self> {
        self.same_universe(other)?;
        if other.has_empty_edge() {
            return Ok(self.derive([]));
        }
        Ok(self.derive(
            self.edges
                .iter()
                .filter(|e| !other.edges.iter().any(|f| f.is_subset(e)))
                .cloned(),
        ))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_universe(other)?;
        Ok(self.derive(self.edges.iter().chain(&other.edges).cloned()))
    }

    /// `{ e - core | e ∈ E, core ⊆ e }`, deduplicated.
    pub fn restrict_to_supersets(&self, core: &Edge) -> Self {
        self.derive(
            self.edges
                .iter()
                .filter(|e| core.is_subset(e))
                .map(|e| e.difference(core)),
        )
    }

    /// Every subset of every edge, in canonical order. These are the
    /// candidate cores for all core operators.
    pub fn edge_subsets(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.edges.iter().flat_map(VertexSet::subsets).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Drops vertices outside all edges and renumbers the rest in increasing
    /// order, keeping their names.
    pub fn shrink(&self) -> Self {
        let kept: Vec<Vertex> = self.covered_vertices().iter().collect();
        let mut index = vec![usize::MAX; self.vertex_count];
        for (new, &old) in kept.iter().enumerate() {
            index[old] = new;
        }
        let names = kept.iter().map(|&v| self.vertex_name(v)).collect();
        let edges = self.edges.iter().map(|e| e.iter().map(|v| index[v]).collect());
        Self::new(kept.len(), edges)
            .and_then(|h| h.with_names(names))
            .map(Self::normalize_names)
            .expect("renumbered edges stay in range")
    }

    /// Moves this hypergraph onto the universe of `target`, matching vertices
    /// by display name.
    pub fn reindex_by_names(&self, target: &Self) -> Result<Self> {
        let map: Vec<Vertex> = (0..self.vertex_count)
            .map(|v| {
                let name = self.vertex_name(v);
                target.vertex_by_name(&name).ok_or(Error::UnknownVertex(name))
            })
            .collect::<Result<_>>()?;
        Ok(target.derive(
            self.edges
                .iter()
                .map(|e| e.iter().map(|v| map[v]).collect()),
        ))
    }

    /// Resolves whitespace- or comma-separated vertex names to a set.
    pub fn parse_vertex_list(&self, text: &str) -> Result<VertexSet> {
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                self.vertex_by_name(t)
                    .ok_or_else(|| Error::UnknownVertex(t.to_string()))
            })
            .collect()
    }

    /// Renders a vertex set as `{a,b,c}` using display names.
    pub fn format_set(&self, set: &VertexSet) -> String {
        let names: Vec<String> = set.iter().map(|v| self.vertex_name(v)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Drops a name table that only repeats the default `v<i>` names.
    pub(crate) fn normalize_names(mut self) -> Self {
        if let Some(names) = &self.names {
            if names.iter().enumerate().all(|(i, n)| *n == format!("v{i}")) {
                self.names = None;
            }
        }
        self
    }
}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges.iter().map(|e| self.format_set(e)).collect();
        write!(f, "Hypergraph(n={}, [{}])", self.vertex_count, edges.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_fig1;
    use proptest::prelude::*;

    fn hg(n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(n, edges.iter().map(|e| e.iter().copied().collect())).unwrap()
    }

    fn fig1_set(names: &str) -> VertexSet {
        gen_fig1().parse_vertex_list(names).unwrap()
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(Hypergraph::empty(5).dimension(), 0);
        assert_eq!(hg(3, &[&[]]).dimension(), 0);
        assert_eq!(hg(2, &[&[0, 1]]).dimension(), 2);
        let fig1 = gen_fig1();
        assert_eq!(fig1.dimension(), 9);
        let widest = fig1.edges().iter().max_by_key(|e| e.len()).unwrap();
        assert_eq!(widest, &fig1_set("a b c h o p q l e"));
    }

    #[test]
    fn hitting_set_examples() {
        assert!(Hypergraph::empty(4).is_hitting_set(&VertexSet::new()).unwrap());
        let fig1 = gen_fig1();
        assert!(!fig1.is_hitting_set(&fig1_set("a")).unwrap());
        assert!(fig1.is_hitting_set(&fig1_set("a u")).unwrap());
        assert!(!hg(3, &[&[], &[0]]).is_hitting_set(&VertexSet::full(3)).unwrap());
        assert_eq!(
            hg(3, &[&[0]]).is_hitting_set(&VertexSet::singleton(7)),
            Err(Error::VertexOutOfRange { vertex: 7, universe: 3 })
        );
    }

    #[test]
    fn ominus_examples() {
        let fig1 = gen_fig1();
        assert_eq!(fig1.ominus(&Hypergraph::empty(23)).unwrap(), fig1);
        assert_eq!(fig1.ominus(&fig1.derive([VertexSet::new()])).unwrap().edge_count(), 0);
        let h1 = fig1.derive(["a b c", "a b d", "a b e"].map(fig1_set));
        let rest = fig1.ominus(&h1).unwrap();
        assert_eq!(rest.edges(), &[fig1_set("u v w")]);
        assert!(matches!(
            fig1.ominus(&Hypergraph::empty(3)),
            Err(Error::UniverseMismatch { .. })
        ));
    }

    #[test]
    fn union_examples() {
        let fig1 = gen_fig1();
        assert_eq!(fig1.union(&fig1).unwrap(), fig1);
        assert_eq!(fig1.union(&Hypergraph::empty(23)).unwrap(), fig1);
        let u = hg(2, &[&[0]]).union(&hg(2, &[&[1]])).unwrap();
        assert_eq!(u, hg(2, &[&[0], &[1]]));
    }

    #[test]
    fn restrict_examples() {
        let fig1 = gen_fig1();
        assert_eq!(fig1.restrict_to_supersets(&VertexSet::new()), fig1);
        let residual = fig1.restrict_to_supersets(&fig1_set("a b"));
        assert_eq!(residual.edge_count(), 9);
        assert!(residual.contains_edge(&fig1_set("c f u v w")));
        assert!(residual.contains_edge(&fig1_set("e n")));
        assert!(!residual.contains_edge(&fig1_set("u v w")));
        let none = hg(4, &[&[1, 2]]).restrict_to_supersets(&VertexSet::singleton(3));
        assert_eq!(none.edge_count(), 0);
    }

    #[test]
    fn duplicates_collapse_and_range_is_checked() {
        assert_eq!(hg(3, &[&[0, 1], &[1, 0], &[0, 1]]).edge_count(), 1);
        assert!(Hypergraph::new(2, [VertexSet::singleton(2)]).is_err());
    }

    #[test]
    fn shrink_and_reindex() {
        let h = hg(6, &[&[1, 4], &[4, 5]]).with_names(
            ["a", "b", "c", "d", "e", "f"].map(String::from).to_vec(),
        ).unwrap();
        let s = h.shrink();
        assert_eq!(s.vertex_count(), 3);
        assert_eq!(s.names().unwrap(), ["b", "e", "f"]);
        assert_eq!(s.reindex_by_names(&h).unwrap(), h);
    }

    fn arb_hypergraph() -> impl Strategy<Value = (Hypergraph, Hypergraph, Hypergraph)> {
        let edges = || proptest::collection::vec(proptest::collection::btree_set(0usize..8, 0..4), 0..6);
        (edges(), edges(), edges()).prop_map(|(a, b, c)| {
            let mk = |es: Vec<std::collections::BTreeSet<usize>>| {
                Hypergraph::new(8, es.into_iter().map(|e| e.into_iter().collect())).unwrap()
            };
            (mk(a), mk(b), mk(c))
        })
    }

    proptest! {
        #[test]
        fn ominus_is_monotone((h, h2, h3) in arb_hypergraph()) {
            let cut = h.ominus(&h2).unwrap();
            prop_assert!(cut.edges().iter().all(|e| h.contains_edge(e)));
            prop_assert!(cut.dimension() <= h.dimension());
            // Removing edges from the subtrahend can only keep more.
            let big = h2.union(&h3).unwrap();
            let smaller_cut = h.ominus(&big).unwrap();
            prop_assert!(smaller_cut.edges().iter().all(|e| cut.contains_edge(e)));
        }

        #[test]
        fn union_dimension_is_max((h, h2, _) in arb_hypergraph()) {
            prop_assert_eq!(h.union(&h2).unwrap().dimension(), h.dimension().max(h2.dimension()));
        }

        #[test]
        fn full_set_hits_iff_no_empty_edge((h, _, _) in arb_hypergraph()) {
            prop_assert_eq!(h.is_hitting_set(&VertexSet::full(8)).unwrap(), !h.has_empty_edge());
        }
    }
}
