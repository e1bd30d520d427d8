//! Restricted coloring: given a hypergraph `H` and a graph `G = (U, F)`
//! whose vertices are partitioned into blocks, find `c: U → V(H)` with
//! `c(u) ≠ c(v)` for every conflict `{u,v} ∈ F` and `c[U_i] ∈ E(H)` for
//! every block `U_i`.
//!
//! Pseudo-cores reduce to this problem: one block per leaf of the tree, `L`
//! groups of copies per block (one group per level), conflicts between the
//! levels of a leaf and between equal levels of leaves that diverge there.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use rayon::prelude::*;
use varisat::{ExtendFormula, Lit, Solver};

use crate::colorcoding::perfect_hash_family;
use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Hypergraph};
use crate::pseudo::{pseudo_core_candidates, residuals_have_small_hitting_set, LeveledTree, PseudoSunflower};
use crate::vertex_set::Vertex;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedColoringInstance {
    hypergraph: Hypergraph,
    size: usize,
    blocks: Vec<Vec<usize>>,
    conflicts: Vec<(usize, usize)>,
}

impl RestrictedColoringInstance {
    /// `blocks` must partition `0..size` into nonempty parts; conflicts are
    /// unordered pairs of distinct elements.
    pub fn new(
        hypergraph: Hypergraph,
        size: usize,
        blocks: Vec<Vec<usize>>,
        conflicts: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut seen = vec![false; size];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidArgument("empty block".into()));
            }
            for &u in block {
                if u >= size || std::mem::replace(&mut seen[u], true) {
                    return Err(Error::InvalidArgument(format!("element {u} is out of range or repeated")));
                }
            }
        }
        if let Some(u) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidArgument(format!("element {u} lies in no block")));
        }
        let mut pairs = Vec::new();
        for (u, v) in conflicts {
            if u == v || u.max(v) >= size {
                return Err(Error::InvalidArgument(format!("bad conflict {{{u},{v}}}")));
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self { hypergraph, size, blocks, conflicts: pairs })
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.hypergraph
    }

    /// `|U|`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn conflicts(&self) -> &[(usize, usize)] {
        &self.conflicts
    }

    /// Whether `coloring` (one vertex of `H` per element of `U`) is proper
    /// and colors every block onto an edge.
    pub fn is_solution(&self, coloring: &[Vertex]) -> bool {
        coloring.len() == self.size
            && self.conflicts.iter().all(|&(u, v)| coloring[u] != coloring[v])
            && self.blocks.iter().all(|b| {
                let image: Edge = b.iter().map(|&u| coloring[u]).collect();
                self.hypergraph.contains_edge(&image)
            })
    }
}

/// Color sets over a compact numbering of the colors in play.
type Mask = u128;

fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..Mask::BITS as usize).filter(move |&i| m >> i & 1 == 1)
}

/// Elements of one block with the same conflicts. They are pairwise
/// non-adjacent and interchangeable, so only the set of colors a class
/// uses matters; it may hold up to one color per member.
struct Classes {
    members: Vec<Vec<usize>>,
    by_block: Vec<Vec<usize>>,
    adjacent: Vec<Vec<usize>>,
}

fn twin_classes(inst: &RestrictedColoringInstance) -> Classes {
    let mut neighbors = vec![Vec::new(); inst.size];
    for &(u, v) in &inst.conflicts {
        neighbors[u].push(v);
        neighbors[v].push(u);
    }
    neighbors.iter_mut().for_each(|n| n.sort_unstable());
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut by_block = Vec::new();
    let mut class_of = vec![0; inst.size];
    for block in &inst.blocks {
        let mut sorted = block.clone();
        sorted.sort_unstable();
        let mut index: HashMap<&[usize], usize> = HashMap::new();
        let mut ids = Vec::new();
        for u in sorted {
            let id = *index.entry(&neighbors[u]).or_insert_with(|| {
                members.push(Vec::new());
                ids.push(members.len() - 1);
                members.len() - 1
            });
            members[id].push(u);
            class_of[u] = id;
        }
        by_block.push(ids);
    }
    let mut adjacent: Vec<Vec<usize>> = members
        .iter()
        .map(|m| neighbors[m[0]].iter().map(|&v| class_of[v]).collect())
        .collect();
    adjacent.iter_mut().for_each(|a: &mut Vec<usize>| {
        a.sort_unstable();
        a.dedup();
    });
    Classes { members, by_block, adjacent }
}

/// Decides the class-level problem with a SAT solver. Variables say which
/// colors a class uses and which edge a block maps onto; a block's chosen
/// edge must contain every color of its classes and be covered by them.
/// At most one edge can satisfy both, so no exclusivity clauses are needed.
fn solve_classes(classes: &Classes, edges: &[Mask]) -> Option<(Vec<Mask>, Vec<usize>)> {
    let mut solver = Solver::new();
    let palette: Vec<usize> = bits(edges.iter().fold(0, |u, e| u | e)).collect();
    let widest = edges.iter().map(|e| e.count_ones() as usize).max().unwrap_or(0);
    let uses: Vec<Vec<Lit>> = classes.members.iter().map(|_| palette.iter().map(|_| solver.new_lit()).collect()).collect();
    let slot = |x: usize| palette.binary_search(&x).expect("color is in the palette");

    for (c, lits) in uses.iter().enumerate() {
        solver.add_clause(lits);
        let room = classes.members[c].len();
        if room < widest {
            at_most(&mut solver, lits, room);
        }
        for &o in classes.adjacent[c].iter().filter(|&&o| o > c) {
            for (a, b) in lits.iter().zip(&uses[o]) {
                solver.add_clause(&[!*a, !*b]);
            }
        }
    }
    let mut choices: Vec<Vec<(usize, Lit)>> = Vec::new();
    for block in &classes.by_block {
        let room: usize = block.iter().map(|&c| classes.members[c].len()).sum();
        let mut options = Vec::new();
        for (e, &edge) in edges.iter().enumerate() {
            if edge == 0 || edge.count_ones() as usize > room {
                continue;
            }
            let pick = solver.new_lit();
            for (i, &x) in palette.iter().enumerate() {
                if edge >> x & 1 == 0 {
                    for &c in block {
                        solver.add_clause(&[!pick, !uses[c][i]]);
                    }
                }
            }
            for x in bits(edge) {
                let mut cover = vec![!pick];
                cover.extend(block.iter().map(|&c| uses[c][slot(x)]));
                solver.add_clause(&cover);
            }
            options.push((e, pick));
        }
        solver.add_clause(&options.iter().map(|&(_, pick)| pick).collect::<Vec<_>>());
        choices.push(options);
    }

    if !solver.solve().expect("no proof or assumption failures") {
        return None;
    }
    let truth: HashSet<Lit> = solver.model().expect("satisfiable").into_iter().collect();
    let sets = uses
        .iter()
        .map(|lits| lits.iter().zip(&palette).filter(|(l, _)| truth.contains(l)).fold(0, |m, (_, &x)| m | 1 << x))
        .collect();
    let chosen = choices
        .iter()
        .map(|options| options.iter().find(|(_, pick)| truth.contains(pick)).expect("a block picks an edge").0)
        .collect();
    Some((sets, chosen))
}

/// Sequential counter: at most `bound` of `lits` are true.
fn at_most(solver: &mut Solver, lits: &[Lit], bound: usize) {
    if bound == 0 {
        lits.iter().for_each(|&l| solver.add_clause(&[!l]));
        return;
    }
    // count[j] holds when at least j + 1 of the literals seen so far are true.
    let mut count: Vec<Lit> = Vec::new();
    for (i, &l) in lits.iter().enumerate() {
        let next: Vec<Lit> = (0..bound.min(i + 1)).map(|_| solver.new_lit()).collect();
        for (j, &n) in next.iter().enumerate() {
            if let Some(&c) = count.get(j) {
                solver.add_clause(&[!c, n]);
            }
            if j == 0 {
                solver.add_clause(&[!l, n]);
            } else {
                solver.add_clause(&[!l, !count[j - 1], n]);
            }
        }
        if let Some(&full) = count.get(bound - 1) {
            solver.add_clause(&[!l, !full]);
        }
        count = next;
    }
}

/// Member `i` of a class takes the `i`-th color of its set, the last one
/// once the set runs out; every color of the set is used.
fn spread(members: &[usize], set: Mask, mut color: impl FnMut(usize, usize)) {
    let list: Vec<usize> = bits(set).collect();
    for (i, &u) in members.iter().enumerate() {
        color(u, list[i.min(list.len() - 1)]);
    }
}

fn compact_colors(h: &Hypergraph) -> Result<Vec<Vertex>> {
    let colors: Vec<Vertex> = h.covered_vertices().iter().collect();
    if colors.len() > Mask::BITS as usize {
        return Err(Error::InvalidArgument(format!(
            "restricted coloring handles at most {} colors in edges, found {}",
            Mask::BITS,
            colors.len()
        )));
    }
    Ok(colors)
}

/// Exact solver: an edge per block and a color set per class of
/// interchangeable elements, found by a SAT solver. Deterministic.
pub fn solve_restricted_coloring_exact(inst: &RestrictedColoringInstance) -> Result<Option<Vec<Vertex>>> {
    let colors = compact_colors(&inst.hypergraph)?;
    let edges: Vec<Mask> = inst
        .hypergraph
        .edges()
        .iter()
        .map(|e| e.iter().map(|v| 1 << colors.binary_search(&v).expect("edge vertex is covered")).sum())
        .collect();
    let classes = twin_classes(inst);
    Ok(solve_classes(&classes, &edges).map(|(sets, _)| {
        let mut c = vec![0; inst.size];
        for (members, &set) in classes.members.iter().zip(&sets) {
            spread(members, set, |u, x| c[u] = colors[x]);
        }
        c
    }))
}

/// Color coding over labels. Each member `d` of a perfect hash family on
/// the colors labels the edges it is injective on; a proper labeling `c'`
/// of `U` that maps every block onto the labels of some edge `e` then
/// lifts to a coloring, sending `u` to the vertex of `e` labeled `c'(u)`.
/// With `t = min(|U|, |V|)` labels some `d` is injective on the image of
/// any solution, so the answer matches the exact solver.
pub fn solve_restricted_coloring_color_coded(inst: &RestrictedColoringInstance) -> Result<Option<Vec<Vertex>>> {
    let colors = compact_colors(&inst.hypergraph)?;
    if colors.is_empty() || inst.size == 0 {
        return solve_restricted_coloring_exact(inst);
    }
    let labels = inst.size.min(colors.len());
    let family = perfect_hash_family(colors.len(), labels, labels)?;
    let classes = twin_classes(inst);
    let edge_positions: Vec<Vec<usize>> = inst
        .hypergraph
        .edges()
        .iter()
        .map(|e| e.iter().map(|v| colors.binary_search(&v).expect("edge vertex is covered")).collect())
        .collect();
    let found = family.for_each(|d| {
        // Label edges, each remembering the first edge of `H` it came from.
        let mut label_edges: Vec<Mask> = Vec::new();
        let mut origin: Vec<usize> = Vec::new();
        for (i, pos) in edge_positions.iter().enumerate() {
            let m: Mask = pos.iter().fold(0, |m, &x| m | 1 << d[x]);
            if m.count_ones() as usize == pos.len() && !label_edges.contains(&m) {
                label_edges.push(m);
                origin.push(i);
            }
        }
        match solve_classes(&classes, &label_edges) {
            None => ControlFlow::Continue(()),
            Some((sets, chosen)) => {
                let mut c = vec![0; inst.size];
                for (b, block) in classes.by_block.iter().enumerate() {
                    let pos = &edge_positions[origin[chosen[b]]];
                    for &class in block {
                        spread(&classes.members[class], sets[class], |u, label| {
                            let x = pos.iter().find(|&&x| d[x] as usize == label).expect("label has a preimage");
                            c[u] = colors[*x];
                        });
                    }
                }
                ControlFlow::Break(c)
            }
        }
    });
    Ok(found)
}

/// How many copies each (leaf, level) group gets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CopiesPerLevel {
    /// `d(H)` copies.
    Dimension,
    /// `d(H) - L + 1` copies, enough since every other level of a row
    /// holds at least one vertex.
    Reduced,
    Exactly(usize),
}

/// The restricted-coloring instance deciding whether `core` is a
/// pseudo-core, with the layout needed to read a table off a solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoCoreInstance {
    pub instance: RestrictedColoringInstance,
    pub core: Edge,
    pub tree: LeveledTree,
    pub copies: usize,
}

impl PseudoCoreInstance {
    /// Element for copy `copy` of level `level` (1-based) at leaf `leaf`.
    pub fn element(&self, leaf: usize, level: usize, copy: usize) -> usize {
        (leaf * self.tree.depth() + level - 1) * self.copies + copy
    }

    /// The table `S(l,i) = c[{l} × {i} × copies]` with `S(l,0)` the core.
    pub fn table(&self, coloring: &[Vertex]) -> PseudoSunflower {
        let blocks = (0..self.tree.leaf_count())
            .map(|l| {
                std::iter::once(self.core.clone())
                    .chain((1..=self.tree.depth()).map(|i| {
                        (0..self.copies).map(|x| coloring[self.element(l, i, x)]).collect()
                    }))
                    .collect()
            })
            .collect();
        PseudoSunflower { tree: self.tree.clone(), core: self.core.clone(), blocks }
    }
}

pub fn build_restricted_coloring_instance(h: &Hypergraph, core: &Edge, k: usize, level: usize) -> Result<PseudoCoreInstance> {
    build_restricted_coloring_instance_with(h, core, k, level, CopiesPerLevel::Dimension)
}

/// Colors are the vertices of `H` with `core` removed from every edge
/// containing it. Elements are `(leaf, level, copy)`, numbered by
/// [`PseudoCoreInstance::element`]; each leaf is one block.
pub fn build_restricted_coloring_instance_with(
    h: &Hypergraph,
    core: &Edge,
    k: usize,
    level: usize,
    copies: CopiesPerLevel,
) -> Result<PseudoCoreInstance> {
    let d = h.dimension();
    if d == 0 {
        return Err(Error::InvalidArgument("instance needs an edge with at least one vertex".into()));
    }
    let copies = match copies {
        CopiesPerLevel::Dimension => d,
        CopiesPerLevel::Reduced if level <= d => d - level + 1,
        CopiesPerLevel::Reduced => {
            return Err(Error::InvalidArgument(format!("level {level} exceeds the dimension {d}")));
        }
        CopiesPerLevel::Exactly(0) => return Err(Error::InvalidArgument("zero copies per level".into())),
        CopiesPerLevel::Exactly(n) => n,
    };
    let tree = LeveledTree::new(k, level)?;
    let mut out = PseudoCoreInstance {
        instance: RestrictedColoringInstance::new(Hypergraph::empty(0), 0, Vec::new(), [])?,
        core: core.clone(),
        tree: tree.clone(),
        copies,
    };
    let leaves = tree.leaf_count();
    let size = leaves * level * copies;
    let blocks: Vec<Vec<usize>> = (0..leaves)
        .map(|l| (l * level * copies..(l + 1) * level * copies).collect())
        .collect();
    let group = |l: usize, i: usize| (0..copies).map(move |x| (l * level + i - 1) * copies + x);
    let mut conflicts = Vec::new();
    for l in 0..leaves {
        for i in 1..=level {
            for j in i + 1..=level {
                for u in group(l, i) {
                    conflicts.extend(group(l, j).map(|v| (u, v)));
                }
            }
        }
        for m in l + 1..leaves {
            let z = tree.divergence_depth(l, m)?;
            for u in group(l, z) {
                conflicts.extend(group(m, z).map(|v| (u, v)));
            }
        }
    }
    out.instance = RestrictedColoringInstance::new(h.restrict_to_supersets(core), size, blocks, conflicts)?;
    Ok(out)
}

/// All pseudo-cores of level `level`, each candidate decided by solving its
/// restricted-coloring instance exactly. Candidates whose residuals of
/// size at least `level` have a hitting set of size at most `k` are
/// rejected first, as no table exists for them.
pub fn pseudo_cores_via_restricted_coloring(h: &Hypergraph, k: usize, level: usize) -> Result<Hypergraph> {
    if level == 0 {
        return Ok(h.clone());
    }
    LeveledTree::new(k, level)?;
    let found: Vec<Option<Edge>> = pseudo_core_candidates(h, k, level)
        .into_par_iter()
        .filter(|c| !residuals_have_small_hitting_set(h, c, k, level))
        .map(|c| {
            let inst = build_restricted_coloring_instance(h, &c, k, level)?;
            Ok(solve_restricted_coloring_exact(&inst.instance)?.map(|_| c))
        })
        .collect::<Result<_>>()?;
    Ok(h.derive(found.into_iter().flatten()))
}
