//! Instance generators: the worked example with ten edges and its fixtures,
//! complete-tree path hypergraphs, seeded random hypergraphs, and seeded
//! restricted-coloring instances.

use std::collections::BTreeSet;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Hypergraph};
use crate::pseudo::{LeveledTree, PseudoSunflower};
use crate::restricted_coloring::{
    build_restricted_coloring_instance_with, CopiesPerLevel, PseudoCoreInstance,
    RestrictedColoringInstance,
};
use crate::vertex_set::Vertex;

const FIG1_EDGES: [&str; 10] = [
    "abcfuvw",
    "abcgrstm",
    "abchopqle",
    "abdioru",
    "abdjpsv",
    "abdkqtw",
    "abel",
    "abem",
    "aben",
    "uvw",
];

/// The ten-edge example hypergraph on vertices `a..=w`.
///
/// Its 2-cores are `{a,b,c}`, `{a,b,d}`, `{a,b,e}`; those three form a
/// sunflower with core `{a,b}`, which is not itself a 2-core of the original.
pub fn gen_fig1() -> Hypergraph {
    let names: Vec<String> = ('a'..='w').map(String::from).collect();
    let edges = FIG1_EDGES
        .iter()
        .map(|e| e.bytes().map(|b| (b - b'a') as usize).collect::<Edge>());
    Hypergraph::new(names.len(), edges)
        .and_then(|h| h.with_names(names))
        .expect("fixture is well formed")
}

/// Rows `S(l,1) / S(l,2)` of a level-2 pseudo-sunflower with core `{a,b}`
/// in [`gen_fig1`], for k = 2, leaves in order.
const EXAMPLE_ROWS: [(&str, &str); 9] = [
    ("c f", "u v w"),
    ("c g", "r s t m"),
    ("c h o", "p q l e"),
    ("d i", "o r u"),
    ("d j", "p s v"),
    ("d", "k q t w"),
    ("e", "l"),
    ("e", "m"),
    ("e", "n"),
];

/// The level-2 pseudo-sunflower with core `{a,b}` in [`gen_fig1`] for
/// k = 2: its rows group into the three edges through `c`, through `d`, and
/// through `e`.
pub fn example_pseudo_sunflower() -> PseudoSunflower {
    let h = gen_fig1();
    let set = |s: &str| h.parse_vertex_list(s).expect("fixture names exist");
    PseudoSunflower {
        tree: LeveledTree::new(2, 2).expect("valid tree"),
        core: set("a b"),
        blocks: EXAMPLE_ROWS
            .iter()
            .map(|(first, second)| vec![set("a b"), set(first), set(second)])
            .collect(),
    }
}

/// A coloring of the restricted-coloring instance for core `{a,b}` in
/// [`gen_fig1`], k = 2, level 2, with four copies per level: per leaf, the
/// colors of the level-1 copies and of the level-2 copies.
const EXAMPLE_COLORING: [([&str; 4], [&str; 4]); 9] = [
    (["c", "f", "f", "f"], ["u", "v", "w", "w"]),
    (["c", "g", "g", "g"], ["r", "s", "t", "m"]),
    (["c", "h", "o", "o"], ["p", "q", "l", "e"]),
    (["d", "i", "i", "i"], ["o", "r", "u", "u"]),
    (["d", "j", "j", "j"], ["p", "s", "v", "v"]),
    (["d", "d", "d", "d"], ["k", "q", "t", "w"]),
    (["e", "e", "e", "e"], ["l", "l", "l", "l"]),
    (["e", "e", "e", "e"], ["m", "m", "m", "m"]),
    (["e", "e", "e", "e"], ["n", "n", "n", "n"]),
];

/// The four-copy instance for core `{a,b}` in [`gen_fig1`] (k = 2, level 2)
/// with a solution, listed element by element.
pub fn example_restricted_coloring() -> (PseudoCoreInstance, Vec<Vertex>) {
    let h = gen_fig1();
    let core = h.parse_vertex_list("a b").expect("fixture names exist");
    let inst = build_restricted_coloring_instance_with(&h, &core, 2, 2, CopiesPerLevel::Exactly(4))
        .expect("valid instance");
    let coloring = EXAMPLE_COLORING
        .iter()
        .flat_map(|(first, second)| first.iter().chain(second))
        .map(|name| h.vertex_by_name(name).expect("fixture names exist"))
        .collect();
    (inst, coloring)
}

/// Path hypergraph of the complete tree in which every inner node has
/// `branching + 1` children and all leaves sit at `depth`: one edge per leaf,
/// holding every node from the root down to that leaf.
///
/// Nodes are numbered breadth-first. The root is named `r`; every other node
/// is named by its child indices, e.g. `t2.1` for the first child of the
/// root's second child.
pub fn gen_tree(branching: usize, depth: usize) -> Result<Hypergraph> {
    if branching == 0 || depth == 0 {
        return Err(Error::InvalidArgument(
            "tree generator needs branching >= 1 and depth >= 1".into(),
        ));
    }
    let arity = branching + 1;
    // (path label, ancestors-including-self) per node, level by level.
    let mut names = vec!["r".to_string()];
    let mut level: Vec<(String, Vec<usize>)> = vec![(String::new(), vec![0])];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * arity);
        for (label, path) in &level {
            for child in 1..=arity {
                let label = if label.is_empty() {
                    format!("t{child}")
                } else {
                    format!("{label}.{child}")
                };
                let mut path = path.clone();
                path.push(names.len());
                names.push(label.clone());
                next.push((label, path));
            }
        }
        level = next;
    }
    let edges = level.into_iter().map(|(_, path)| path.into_iter().collect());
    Hypergraph::new(names.len(), edges).and_then(|h| h.with_names(names))
}

/// Seeded random hypergraph on `n` unnamed vertices.
///
/// The stream is SplitMix64 seeded with `seed`. Each edge draw takes one
/// word `w` and sets `size = 1 + w % dmax`, then picks its vertices by a
/// partial Fisher-Yates shuffle of `0..n`: for `i` in `0..size`, swap
/// position `i` with `i + next % (n - i)`. Draws that repeat an existing
/// edge are retried, for at most `32 * m` draws in total, so the result may
/// have fewer than `m` edges.
pub fn gen_random(n: usize, m: usize, dmax: usize, seed: u64) -> Result<Hypergraph> {
    if n == 0 || dmax == 0 || dmax > n {
        return Err(Error::InvalidArgument(format!(
            "random generator needs 1 <= dmax <= n, got n={n}, dmax={dmax}"
        )));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    let mut pool: Vec<usize> = (0..n).collect();
    let mut draws = 0;
    while edges.len() < m && draws < 32 * m {
        draws += 1;
        let size = 1 + (rng.next_u64() % dmax as u64) as usize;
        pool.iter_mut().enumerate().for_each(|(i, v)| *v = i);
        for i in 0..size {
            let j = i + (rng.next_u64() % (n - i) as u64) as usize;
            pool.swap(i, j);
        }
        edges.insert(pool[..size].iter().copied().collect());
    }
    Hypergraph::new(n, edges)
}

/// Seeded random restricted-coloring instance with `size` elements split
/// into `blocks` nonempty blocks and a hypergraph on `colors` vertices.
///
/// The stream is SplitMix64 seeded with `seed`. Its first word `w` gives
/// the hypergraph `gen_random(colors, 2 + w % 4, min(colors, 4), w)`.
/// Element `u < blocks` opens block `u`; every later element joins block
/// `next % blocks`. Each pair of elements then becomes a conflict when
/// `next % 4 == 0`, pairs taken in lexicographic order.
pub fn gen_restricted_coloring(size: usize, colors: usize, blocks: usize, seed: u64) -> Result<RestrictedColoringInstance> {
    if blocks == 0 || blocks > size {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= blocks <= size, got blocks={blocks}, size={size}"
        )));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let w = rng.next_u64();
    let h = gen_random(colors, 2 + (w % 4) as usize, colors.min(4), w)?;
    let mut parts = vec![Vec::new(); blocks];
    for u in 0..size {
        let b = if u < blocks { u } else { (rng.next_u64() % blocks as u64) as usize };
        parts[b].push(u);
    }
    let mut conflicts = Vec::new();
    for u in 0..size {
        for v in u + 1..size {
            if rng.next_u64() % 4 == 0 {
                conflicts.push((u, v));
            }
        }
    }
    RestrictedColoringInstance::new(h, size, parts, conflicts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_shape() {
        let h = gen_fig1();
        assert_eq!(h.vertex_count(), 23);
        assert_eq!(h.edge_count(), 10);
        for e in ["a b c f u v w", "a b e n"] {
            assert!(h.contains_edge(&h.parse_vertex_list(e).unwrap()));
        }
    }

    #[test]
    fn tree_shapes() {
        let star = gen_tree(2, 1).unwrap();
        assert_eq!((star.vertex_count(), star.edge_count(), star.dimension()), (4, 3, 2));
        let root = star.vertex_by_name("r").unwrap();
        assert!(star.edges().iter().all(|e| e.contains(root)));

        let t = gen_tree(2, 2).unwrap();
        assert_eq!((t.vertex_count(), t.edge_count()), (13, 9));
        assert!(t.edges().iter().all(|e| e.len() == 3));
        assert!(t.contains_edge(&t.parse_vertex_list("r t2 t2.3").unwrap()));

        let t = gen_tree(3, 3).unwrap();
        assert_eq!((t.vertex_count(), t.edge_count(), t.dimension()), (85, 64, 4));
        assert!(gen_tree(0, 2).is_err());
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(gen_random(5, 0, 2, 9).unwrap().edge_count(), 0);
        let a = gen_random(10, 6, 3, 1).unwrap();
        assert_eq!(a, gen_random(10, 6, 3, 1).unwrap());
        assert_eq!(a.edge_count(), 6);
        assert!(a.dimension() <= 3);
        assert_ne!(a, gen_random(10, 6, 3, 2).unwrap());
        // Only three distinct 1-subsets of a 3-set exist; retries give up.
        assert_eq!(gen_random(3, 10, 1, 4).unwrap().edge_count(), 3);
    }
}
