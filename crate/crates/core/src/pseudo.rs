//! Pseudo-sunflowers and pseudo-cores.
//!
//! A pseudo-sunflower of level `L` is laid out over the complete tree in
//! which every inner node has `k + 1` children and all leaves sit at depth
//! `L`. Each leaf `l` gets a row `S(l,0), .., S(l,L)` such that
//!
//! 1. `S(l,0)` is the core,
//! 2. the union of the row is an edge,
//! 3. the row's sets are pairwise disjoint and `S(l,i)` is nonempty for
//!    `i >= 1`,
//! 4. whenever the root paths of `l` and `m` first differ at depth `z`,
//!    `S(l,z)` and `S(m,z)` are disjoint.
//!
//! A set is a pseudo-core of level `L` if it is the core of such a table.
//! At level 1 the rows are exactly the petals of a sunflower.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Hypergraph};
use crate::solver::min_hitting_set;
use crate::sunflower::{residuals, CoreSearch};
use crate::vertex_set::Vertex;

/// The complete tree with `k + 1` children per inner node and all leaves at
/// depth `depth`. Leaves are numbered `0..leaf_count()` in lexicographic
/// order of their root paths; a root path is written as the sequence of
/// 1-based child positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeveledTree {
    k: usize,
    depth: usize,
    leaf_count: usize,
}

impl LeveledTree {
    pub fn new(k: usize, depth: usize) -> Result<Self> {
        if k == 0 || depth == 0 {
            return Err(Error::InvalidArgument(format!(
                "leveled tree needs k >= 1 and depth >= 1 (got k={k}, depth={depth})"
            )));
        }
        let leaf_count = (k + 1)
            .checked_pow(depth as u32)
            .ok_or_else(|| Error::InvalidArgument(format!("tree with k={k}, depth={depth} is too large")))?;
        Ok(Self { k, depth, leaf_count })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    fn arity(&self) -> usize {
        self.k + 1
    }

    /// Number of leaves below a node at depth `z`.
    fn subtree_leaves(&self, z: usize) -> usize {
        self.arity().pow((self.depth - z) as u32)
    }

    /// Root path of leaf `leaf` as 1-based child positions.
    pub fn leaf(&self, leaf: usize) -> Vec<usize> {
        assert!(leaf < self.leaf_count, "leaf {leaf} out of range");
        (1..=self.depth)
            .map(|z| leaf / self.subtree_leaves(z) % self.arity() + 1)
            .collect()
    }

    pub fn leaf_index(&self, path: &[usize]) -> Option<usize> {
        if path.len() != self.depth || path.iter().any(|&p| p == 0 || p > self.arity()) {
            return None;
        }
        Some(path.iter().fold(0, |acc, &p| acc * self.arity() + p - 1))
    }

    /// Least depth `z >= 1` at which the root paths of two distinct leaves
    /// differ.
    pub fn divergence_depth(&self, l: usize, m: usize) -> Result<usize> {
        if l == m {
            return Err(Error::InvalidArgument(format!("leaf {l} compared with itself")));
        }
        if l.max(m) >= self.leaf_count {
            return Err(Error::InvalidArgument(format!("leaf {} out of range", l.max(m))));
        }
        Ok(self.divergence(l, m))
    }

    fn divergence(&self, l: usize, m: usize) -> usize {
        (1..=self.depth)
            .find(|&z| l / self.subtree_leaves(z) != m / self.subtree_leaves(z))
            .expect("distinct leaves diverge")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoSunflower {
    pub tree: LeveledTree,
    pub core: Edge,
    /// `blocks[leaf][i]` is `S(leaf, i)` for `i` in `0..=depth`.
    pub blocks: Vec<Vec<Edge>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PseudoViolation {
    /// The table does not have one row per leaf with `depth + 1` entries.
    Shape,
    /// Property `property` (numbered 1 to 4 as in the module docs) fails,
    /// witnessed by the listed leaves.
    Property { property: usize, leaves: Vec<usize> },
}

/// Checks the four properties in order and reports the first that fails.
pub fn verify_pseudo_sunflower(h: &Hypergraph, s: &PseudoSunflower) -> Result<(), PseudoViolation> {
    let depth = s.tree.depth();
    if s.blocks.len() != s.tree.leaf_count() || s.blocks.iter().any(|row| row.len() != depth + 1) {
        return Err(PseudoViolation::Shape);
    }
    let fail = |property, leaves| Err(PseudoViolation::Property { property, leaves });
    if let Some(l) = s.blocks.iter().position(|row| row[0] != s.core) {
        return fail(1, vec![l]);
    }
    let union = |row: &[Edge]| {
        let mut e = Edge::new();
        row.iter().for_each(|b| e.union_with(b));
        e
    };
    if let Some(l) = s.blocks.iter().position(|row| !h.contains_edge(&union(row))) {
        return fail(2, vec![l]);
    }
    let row_ok = |row: &[Edge]| {
        row[1..].iter().all(|b| !b.is_empty())
            && (0..row.len()).all(|i| (i + 1..row.len()).all(|j| row[i].is_disjoint(&row[j])))
    };
    if let Some(l) = s.blocks.iter().position(|row| !row_ok(row)) {
        return fail(3, vec![l]);
    }
    for l in 0..s.blocks.len() {
        for m in l + 1..s.blocks.len() {
            let z = s.tree.divergence(l, m);
            if !s.blocks[l][z].is_disjoint(&s.blocks[m][z]) {
                return fail(4, vec![l, m]);
            }
        }
    }
    Ok(())
}

/// Candidate rows for one leaf: every edge properly containing `core` with
/// enough residual elements, split into `depth` nonempty level blocks in
/// every way. Rows come in canonical edge order, then lexicographically by
/// the level of each residual element. Elements are given as positions in
/// `universe`.
#[cfg(test)]
fn leaf_rows(h: &Hypergraph, core: &Edge, depth: usize, universe: &[Vertex]) -> Vec<Vec<Mask>> {
    let mut rows = Vec::new();
    for e in h.edges() {
        if !core.is_subset(e) || e.len() < core.len() + depth {
            continue;
        }
        let elems: Vec<usize> = e
            .difference(core)
            .iter()
            .map(|v| universe.binary_search(&v).expect("residual vertex is in the universe"))
            .collect();
        let mut levels = vec![0usize; elems.len()];
        loop {
            let mut row = vec![0 as Mask; depth];
            for (&x, &lvl) in elems.iter().zip(&levels) {
                row[lvl] |= 1 << x;
            }
            if row.iter().all(|&b| b != 0) {
                rows.push(row);
            }
            let Some(pos) = (0..elems.len()).rev().find(|&i| levels[i] + 1 < depth) else {
                break;
            };
            levels[pos] += 1;
            levels[pos + 1..].iter_mut().for_each(|l| *l = 0);
        }
    }
    rows
}

/// Vertex sets over a compact numbering of the residual vertices.
type Mask = u128;

fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..Mask::BITS as usize).filter(move |&i| m >> i & 1 == 1)
}

/// Whether the sets have a system of distinct representatives, i.e. every
/// level can get its own element.
fn distinct_representatives(sets: &[Mask]) -> bool {
    fn augment(z: usize, sets: &[Mask], owner: &mut [usize; 128], seen: &mut Mask) -> bool {
        for x in bits(sets[z] & !*seen) {
            *seen |= 1 << x;
            if owner[x] == usize::MAX || augment(owner[x], sets, owner, seen) {
                owner[x] = z;
                return true;
            }
        }
        false
    }
    let mut owner = [usize::MAX; 128];
    (0..sets.len()).all(|z| augment(z, sets, &mut owner, &mut 0))
}

/// Whether `row` can serve a leaf below a node with the given chain of
/// allowances: every level so far gets a distinct element of the row.
fn row_viable(row: Mask, chain: &[Mask]) -> bool {
    let traces: Vec<Mask> = chain.iter().map(|a| a & row).collect();
    distinct_representatives(&traces)
}

/// Splits `row` into one block per allowance, or `None` if it cannot be.
fn row_blocks(row: Mask, chain: &[Mask]) -> Option<Vec<Mask>> {
    if row & !chain.iter().fold(0, |u, a| u | a) != 0 || !row_viable(row, chain) {
        return None;
    }
    // Fix one representative per level, then put every other element on
    // the first level that allows it.
    let mut blocks = vec![0 as Mask; chain.len()];
    let mut free = row;
    for z in 0..chain.len() {
        let pick = bits(free & chain[z]).find(|&x| {
            let rest: Vec<Mask> = chain[z + 1..].iter().map(|a| a & free & !(1 << x)).collect();
            distinct_representatives(&rest)
        })?;
        blocks[z] |= 1 << pick;
        free &= !(1 << pick);
    }
    for x in bits(free) {
        let z = chain.iter().position(|a| a >> x & 1 == 1).expect("row is covered");
        blocks[z] |= 1 << x;
    }
    Some(blocks)
}

/// Top-down search over allowances. A node at depth `j` is described by
/// its chain `A_1, .., A_j`, the sets its leaves may take their level
/// `1..=j` blocks from. The node is feasible when its `k + 1` children can
/// be given pairwise disjoint level-`j + 1` allowances under which each
/// child is feasible; a leaf is feasible when some row splits along its
/// chain. Enlarging an allowance never hurts, so children may as well
/// split the vertices between them, and partial splits give upper and
/// lower bounds.
struct AllowanceSearch {
    rows: Vec<Mask>,
    arity: usize,
    depth: usize,
    /// Feasibility by node shape, see [`shape_key`].
    memo: HashMap<Vec<u128>, bool>,
    /// Per chain, the child allowances known to work (kept minimal) and
    /// known to fail (kept maximal).
    bounds: HashMap<Vec<Mask>, (Vec<Mask>, Vec<Mask>)>,
}

impl AllowanceSearch {
    /// The rows a leaf below `chain` may still use, and the chain cut down
    /// to their vertices; nothing else about the chain matters below.
    fn normalize(&self, chain: &[Mask]) -> (Vec<Mask>, Vec<Mask>) {
        let viable: Vec<Mask> = self.rows.iter().copied().filter(|&r| row_viable(r, chain)).collect();
        let universe = viable.iter().fold(0, |u, r| u | r);
        (viable, chain.iter().map(|a| a & universe).collect())
    }

    fn feasible(&mut self, chain: &[Mask]) -> bool {
        let (viable, mut chain) = self.normalize(chain);
        if viable.is_empty() {
            return false;
        }
        let key = shape_key(&viable, &chain);
        if let Some(&ok) = self.memo.get(&key) {
            return ok;
        }
        let ok = self.decide(&viable, &mut chain).is_some();
        self.memo.insert(key, ok);
        ok
    }

    /// Child allowances for a normalized, nonempty node, or `None`.
    fn decide(&mut self, viable: &[Mask], chain: &mut Vec<Mask>) -> Option<Vec<Mask>> {
        if chain.len() + 1 == self.depth {
            self.pack_last(viable, chain)
        } else if self.blocked(viable, chain) {
            None
        } else {
            self.split(viable, chain)
        }
    }

    /// A set of at most `k` vertices is avoided by one child allowance at
    /// every node, so some leaf below `chain` sees allowances that avoid it
    /// from here on. If no row can be split that way the node fails.
    fn blocked(&self, viable: &[Mask], chain: &[Mask]) -> bool {
        let universe: Vec<usize> = bits(viable.iter().fold(0, |u, r| u | r)).collect();
        let covered = chain.iter().fold(0, |u, a| u | a);
        let survives = |r: Mask, avoid: Mask| {
            if r & avoid & !covered != 0 {
                return false;
            }
            let mut sets: Vec<Mask> = chain.iter().map(|a| a & r).collect();
            sets.resize(self.depth, r & !avoid);
            distinct_representatives(&sets)
        };
        let mut avoid = Vec::new();
        fn grow(
            universe: &[usize],
            start: usize,
            left: usize,
            avoid: &mut Vec<usize>,
            hits_all: &dyn Fn(Mask) -> bool,
        ) -> bool {
            let mask = avoid.iter().fold(0 as Mask, |m, &x| m | 1 << x);
            if !avoid.is_empty() && hits_all(mask) {
                return true;
            }
            if left == 0 {
                return false;
            }
            for i in start..universe.len() {
                avoid.push(universe[i]);
                if grow(universe, i + 1, left - 1, avoid, hits_all) {
                    return true;
                }
                avoid.pop();
            }
            false
        }
        let hits_all = |m: Mask| viable.iter().all(|&r| !survives(r, m));
        grow(&universe, 0, self.arity - 1, &mut avoid, &hits_all)
    }

    /// Whether a child with allowance `part` below `chain` is feasible,
    /// answered from known results where monotonicity allows.
    fn child_feasible(&mut self, chain: &mut Vec<Mask>, part: Mask) -> bool {
        if let Some((works, fails)) = self.bounds.get(chain.as_slice()) {
            if works.iter().any(|&w| w & !part == 0) {
                return true;
            }
            if fails.iter().any(|&f| part & !f == 0) {
                return false;
            }
        }
        chain.push(part);
        let ok = self.feasible(chain);
        chain.pop();
        let (works, fails) = self.bounds.entry(chain.clone()).or_default();
        if ok {
            works.retain(|&w| part & !w != 0);
            works.push(part);
        } else {
            fails.retain(|&f| f & !part != 0);
            fails.push(part);
        }
        ok
    }

    /// One level above the leaves: each row needs its uncovered elements,
    /// or failing those a single element it can spare, as last block.
    fn pack_last(&self, viable: &[Mask], chain: &[Mask]) -> Option<Vec<Mask>> {
        let covered = chain.iter().fold(0, |u, a| u | a);
        let mut lasts: Vec<Mask> = Vec::new();
        for &r in viable {
            if r & !covered != 0 {
                lasts.push(r & !covered);
            } else {
                lasts.extend(bits(r).filter(|&x| row_viable(r & !(1 << x), chain)).map(|x| 1 << x));
            }
        }
        lasts.sort_by_key(|&m| (m.count_ones(), m));
        lasts.dedup();
        let mut minimal: Vec<Mask> = Vec::new();
        for m in lasts {
            if minimal.iter().all(|&s| s & !m != 0) {
                minimal.push(m);
            }
        }
        fn pick(sets: &[Mask], start: usize, used: Mask, chosen: &mut Vec<Mask>, want: usize) -> bool {
            if chosen.len() == want {
                return true;
            }
            for i in start..sets.len() {
                if sets[i] & used == 0 {
                    chosen.push(sets[i]);
                    if pick(sets, i + 1, used | sets[i], chosen, want) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        let mut chosen = Vec::new();
        pick(&minimal, 0, 0, &mut chosen, self.arity).then_some(chosen)
    }

    /// Assigns the vertices of the viable rows to the children one by one.
    /// Vertices lying in the same rows and the same allowances are
    /// interchangeable, and so are children.
    fn split(&mut self, viable: &[Mask], chain: &mut Vec<Mask>) -> Option<Vec<Mask>> {
        let universe = viable.iter().fold(0, |u, r| u | r);
        let mut atoms: HashMap<(Vec<usize>, Vec<bool>), Vec<usize>> = HashMap::new();
        for x in bits(universe) {
            let rows = (0..viable.len()).filter(|&i| viable[i] >> x & 1 == 1).collect();
            let allowed = chain.iter().map(|a| a >> x & 1 == 1).collect();
            atoms.entry((rows, allowed)).or_default().push(x);
        }
        let mut atoms: Vec<_> = atoms.into_iter().collect();
        atoms.sort_by(|a, b| b.0 .0.len().cmp(&a.0 .0.len()).then(a.1.cmp(&b.1)));
        let mut elems = Vec::new();
        let mut same = Vec::new();
        for (_, xs) in atoms {
            for (i, x) in xs.into_iter().enumerate() {
                elems.push(x);
                same.push(i > 0);
            }
        }
        if !self.child_feasible(chain, universe) {
            return None;
        }
        let mut parts = vec![0 as Mask; self.arity];
        let mut good = vec![false; self.arity];
        let mut owner = vec![0usize; elems.len()];
        self.assign(chain, &elems, &same, 0, universe, &mut parts, &mut good, &mut owner)
            .then_some(parts)
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &mut self,
        chain: &mut Vec<Mask>,
        elems: &[usize],
        same: &[bool],
        i: usize,
        rest: Mask,
        parts: &mut [Mask],
        good: &mut [bool],
        owner: &mut [usize],
    ) -> bool {
        if good.iter().all(|&g| g) {
            return true;
        }
        for p in 0..parts.len() {
            if !good[p] {
                if !self.child_feasible(chain, parts[p] | rest) {
                    return false;
                }
            }
        }
        if i == elems.len() {
            return false;
        }
        let bit: Mask = 1 << elems[i];
        let opened = parts.iter().filter(|&&m| m != 0).count();
        let lo = if same[i] { owner[i - 1] } else { 0 };
        // Children that are already feasible do not need the vertex; one
        // branch, tried last, covers all of them.
        let choices = lo..parts.len().min(opened + 1);
        let skip = choices.clone().find(|&p| good[p]);
        let order: Vec<usize> = choices.filter(|&p| !good[p]).chain(skip).collect();
        for p in order {
            owner[i] = p;
            if good[p] {
                return self.assign(chain, elems, same, i + 1, rest & !bit, parts, good, owner);
            }
            parts[p] |= bit;
            good[p] = self.child_feasible(chain, parts[p]);
            if self.assign(chain, elems, same, i + 1, rest & !bit, parts, good, owner) {
                return true;
            }
            good[p] = false;
            parts[p] &= !bit;
        }
        false
    }

    /// Leaf rows of the witness below `chain`, in leaf order.
    fn unfold(&mut self, chain: &mut Vec<Mask>, out: &mut Vec<Vec<Mask>>) {
        if chain.len() == self.depth {
            let blocks = self
                .rows
                .iter()
                .find_map(|&r| row_blocks(r, chain))
                .expect("feasible leaf has a row");
            out.push(blocks);
            return;
        }
        let (viable, mut chain) = self.normalize(chain);
        let parts = self.decide(&viable, &mut chain).expect("witness node is feasible");
        for p in parts {
            chain.push(p);
            self.unfold(&mut chain, out);
            chain.pop();
        }
    }
}

/// Describes a node up to renaming vertices and reordering rows: the
/// sorted list of vertex profiles (which rows hold the vertex, which
/// allowances admit it). Rows are ordered by an invariant, and ties are
/// broken by trying every order when there are few of them.
fn shape_key(viable: &[Mask], chain: &[Mask]) -> Vec<u128> {
    let universe = viable.iter().fold(0, |u, r| u | r);
    let allowed = |x: usize| chain.iter().enumerate().fold(0u128, |b, (z, a)| b | ((a >> x & 1) << z));
    if viable.len() > 128 {
        return std::iter::once(u128::MAX).chain(chain.iter().copied()).collect();
    }
    let degree = |x: usize| viable.iter().filter(|&&r| r >> x & 1 == 1).count();
    let invariant = |r: Mask| {
        let mut inv: Vec<(u128, usize)> = bits(r).map(|x| (allowed(x), degree(x))).collect();
        inv.sort_unstable();
        inv
    };
    let mut order: Vec<usize> = (0..viable.len()).collect();
    let invs: Vec<_> = viable.iter().map(|&r| invariant(r)).collect();
    order.sort_by(|&a, &b| invs[a].cmp(&invs[b]));
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for i in 0..order.len() {
        match groups.last_mut() {
            Some((start, len)) if invs[order[*start]] == invs[order[i]] => *len += 1,
            _ => groups.push((i, 1)),
        }
    }
    let key_for = |order: &[usize]| {
        let mut profiles: Vec<(u128, u128)> = bits(universe)
            .map(|x| {
                let rows = order.iter().enumerate().fold(0u128, |b, (pos, &i)| b | ((viable[i] >> x & 1) << pos));
                (rows, allowed(x))
            })
            .collect();
        profiles.sort_unstable();
        std::iter::once(chain.len() as u128)
            .chain(profiles.into_iter().flat_map(|(a, b)| [a, b]))
            .collect::<Vec<u128>>()
    };
    let orders = groups
        .iter()
        .flat_map(|&(_, len)| 1..=len as u128)
        .fold(1u128, |acc, x| acc.saturating_mul(x));
    if orders > 120 {
        return key_for(&order);
    }
    fn permute(order: &mut Vec<usize>, groups: &[(usize, usize)], g: usize, i: usize, visit: &mut dyn FnMut(&[usize])) {
        let Some(&(start, len)) = groups.get(g) else {
            visit(order);
            return;
        };
        if i == len {
            return permute(order, groups, g + 1, 0, visit);
        }
        for j in i..len {
            order.swap(start + i, start + j);
            permute(order, groups, g, i + 1, visit);
            order.swap(start + i, start + j);
        }
    }
    let mut best: Option<Vec<u128>> = None;
    permute(&mut order, &groups, 0, 0, &mut |o| {
        let key = key_for(o);
        if best.as_ref().map_or(true, |b| key < *b) {
            best = Some(key);
        }
    });
    best.expect("at least one order")
}

fn search_table(h: &Hypergraph, core: &Edge, tree: &LeveledTree) -> Result<Option<PseudoSunflower>> {
    let depth = tree.depth();
    let (_, res) = residuals(h, core);
    let mut universe: Vec<Vertex> = res.iter().flat_map(|r| r.iter()).collect();
    universe.sort_unstable();
    universe.dedup();
    if universe.len() > Mask::BITS as usize {
        return Err(Error::InvalidArgument(format!(
            "pseudo-core search handles at most {} vertices above a core, found {}",
            Mask::BITS,
            universe.len()
        )));
    }
    let to_mask = |r: &Edge| -> Mask {
        r.iter()
            .map(|v| 1 << universe.binary_search(&v).expect("residual vertex is in the universe"))
            .fold(0, |m, b| m | b)
    };
    let rows: Vec<Mask> = res.iter().filter(|r| r.len() >= depth).map(to_mask).collect();
    let mut search = AllowanceSearch {
        rows,
        arity: tree.k() + 1,
        depth,
        memo: HashMap::new(),
        bounds: HashMap::new(),
    };
    if !search.feasible(&mut Vec::new()) {
        return Ok(None);
    }
    let mut leaves = Vec::with_capacity(tree.leaf_count());
    search.unfold(&mut Vec::new(), &mut leaves);
    let to_set = |m: Mask| -> Edge { bits(m).map(|i| universe[i]).collect() };
    let blocks = leaves
        .into_iter()
        .map(|row| std::iter::once(core.clone()).chain(row.into_iter().map(to_set)).collect())
        .collect();
    Ok(Some(PseudoSunflower {
        tree: tree.clone(),
        core: core.clone(),
        blocks,
    }))
}

/// Plain depth-first search over the leaves in order, for cross-checking.
#[cfg(test)]
fn search_table_exhaustive(h: &Hypergraph, core: &Edge, tree: &LeveledTree) -> bool {
    // Forward checking: every later leaf keeps the rows still compatible
    // with those placed so far.
    fn place(tree: &LeveledTree, rows: &[Vec<Mask>], t: usize, firsts: &mut Vec<usize>, domains: &[Vec<usize>]) -> bool {
        if t == tree.leaf_count() {
            return true;
        }
        // Sibling subtrees can be swapped, so they come in order of their
        // first rows; sibling leaves need distinct rows anyway.
        let mut first = if t % tree.arity() == 0 { 0 } else { firsts[t - 1] + 1 };
        for z in 1..tree.depth() {
            let span = tree.subtree_leaves(z);
            if t % span == 0 && t % (span * tree.arity()) != 0 {
                first = first.max(firsts[t - span]);
            }
        }
        'rows: for &r in domains[t].iter().filter(|&&r| r >= first) {
            let mut next = domains.to_vec();
            for (u, dom) in next.iter_mut().enumerate().skip(t + 1) {
                let z = tree.divergence(t, u) - 1;
                dom.retain(|&o| rows[o][z] & rows[r][z] == 0);
                if dom.is_empty() {
                    continue 'rows;
                }
            }
            firsts.push(r);
            if place(tree, rows, t + 1, firsts, &next) {
                return true;
            }
            firsts.pop();
        }
        false
    }
    let universe: Vec<Vertex> = h.covered_vertices().iter().collect();
    let rows = leaf_rows(h, core, tree.depth(), &universe);
    let domains = vec![(0..rows.len()).collect::<Vec<_>>(); tree.leaf_count()];
    place(tree, &rows, 0, &mut Vec::new(), &domains)
}

/// Bottom-up over depths, for cross-checking: the level unions of every
/// subtree, kept minimal, combined `k + 1` at a time.
#[cfg(test)]
fn search_table_by_unions(h: &Hypergraph, core: &Edge, tree: &LeveledTree) -> bool {
    fn minimal(mut sigs: Vec<Vec<Mask>>) -> Vec<Vec<Mask>> {
        sigs.sort_by_key(|s| s.iter().map(|m| m.count_ones()).sum::<u32>());
        let mut kept: Vec<Vec<Mask>> = Vec::new();
        for s in sigs {
            if !kept.iter().any(|k| k.iter().zip(&s).all(|(a, b)| a & !b == 0)) {
                kept.push(s);
            }
        }
        kept
    }
    fn combos(deeper: &[Vec<Mask>], j: usize, left: usize, start: usize, used: Mask, acc: &[Mask], out: &mut Vec<Vec<Mask>>) {
        if left == 0 {
            out.push(acc.to_vec());
            return;
        }
        for i in start..deeper.len() {
            if deeper[i][j] & used == 0 {
                let next: Vec<Mask> = acc.iter().zip(&deeper[i]).map(|(a, b)| a | b).collect();
                combos(deeper, j, left - 1, i + 1, used | deeper[i][j], &next, out);
            }
        }
    }
    let universe: Vec<Vertex> = h.covered_vertices().iter().collect();
    let mut sigs = minimal(leaf_rows(h, core, tree.depth(), &universe));
    for j in (0..tree.depth()).rev() {
        let mut out = Vec::new();
        combos(&sigs, j, tree.arity(), 0, 0, &vec![0; j], &mut out);
        sigs = minimal(out);
    }
    !sigs.is_empty()
}

/// A pseudo-sunflower with core `core` for the tree of branching `k + 1`
/// and depth `level`, if one exists.
///
/// A row for a leaf is an edge properly containing the core split into
/// `level` nonempty blocks. Rather than placing leaves one by one, the
/// search hands allowances for each level down the tree, so
/// subtrees of the same shape are decided once. At most 128 vertices may
/// lie above the core. The witness is deterministic.
pub fn find_pseudo_sunflower(h: &Hypergraph, core: &Edge, k: usize, level: usize) -> Result<Option<PseudoSunflower>> {
    let tree = LeveledTree::new(k, level)?;
    search_table(h, core, &tree)
}

/// Whether some set of at most `k` vertices outside `core` meets every
/// residual with at least `level` elements. Every node of a table can send
/// one child away from such a set, so some leaf could use none of its
/// vertices, and `core` is not a pseudo-core of that level or above.
pub(crate) fn residuals_have_small_hitting_set(h: &Hypergraph, core: &Edge, k: usize, level: usize) -> bool {
    let (_, res) = residuals(h, core);
    min_hitting_set(&h.derive(res.into_iter().filter(|r| r.len() >= level)), k).exists()
}

pub(crate) fn pseudo_core_candidates(h: &Hypergraph, k: usize, level: usize) -> Vec<Edge> {
    let d = h.dimension();
    h.edge_subsets()
        .into_iter()
        .filter(|c| c.len() + level <= d)
        .filter(|c| {
            let wide = h
                .edges()
                .iter()
                .filter(|e| c.is_subset(e) && e.len() >= c.len() + level);
            // At level 1 distinct leaves need distinct edges.
            if level == 1 { wide.count() > k } else { wide.count() > 0 }
        })
        .collect()
}

/// All pseudo-cores of level `level`; level 0 returns `h` itself.
pub fn pseudo_cores(h: &Hypergraph, k: usize, level: usize) -> Result<Hypergraph> {
    Ok(pseudo_cores_counted(h, k, level)?.cores)
}

pub fn pseudo_cores_counted(h: &Hypergraph, k: usize, level: usize) -> Result<CoreSearch> {
    pseudo_cores_with(h, k, level, true)
}

/// `screen` enables the small-hitting-set rejection of candidates.
pub(crate) fn pseudo_cores_with(h: &Hypergraph, k: usize, level: usize, screen: bool) -> Result<CoreSearch> {
    if level == 0 {
        return Ok(CoreSearch { cores: h.clone(), work: 0 });
    }
    let tree = LeveledTree::new(k, level)?;
    let candidates: Vec<Edge> = pseudo_core_candidates(h, k, level)
        .into_iter()
        .filter(|c| !screen || !residuals_have_small_hitting_set(h, c, k, level))
        .collect();
    let work = candidates.len();
    let found: Vec<Option<Edge>> = candidates
        .into_par_iter()
        .map(|c| Ok(search_table(h, &c, &tree)?.map(|_| c)))
        .collect::<Result<_>>()?;
    let cores: Vec<Edge> = found.into_iter().flatten().collect();
    Ok(CoreSearch { cores: h.derive(cores), work })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{example_pseudo_sunflower, gen_fig1, gen_random, gen_tree};
    use crate::sunflower::{find_sunflower, k_cores};
    use crate::vertex_set::VertexSet;

    fn fig1_set(s: &str) -> VertexSet {
        gen_fig1().parse_vertex_list(s).unwrap()
    }

    #[test]
    fn divergence_examples() {
        let t = LeveledTree::new(2, 2).unwrap();
        let leaf = |p: &[usize]| t.leaf_index(p).unwrap();
        assert_eq!(t.divergence_depth(leaf(&[1, 1]), leaf(&[1, 2])).unwrap(), 2);
        assert_eq!(t.divergence_depth(leaf(&[1, 1]), leaf(&[3, 2])).unwrap(), 1);
        assert!(t.divergence_depth(3, 3).is_err());
        assert_eq!(t.leaf(leaf(&[3, 2])), vec![3, 2]);
        assert_eq!(t.leaf_count(), 9);
        let star = LeveledTree::new(4, 1).unwrap();
        for l in 0..5 {
            for m in 0..5 {
                if l != m {
                    assert_eq!(star.divergence_depth(l, m).unwrap(), 1);
                }
            }
        }
        assert!(LeveledTree::new(0, 2).is_err());
    }

    #[test]
    fn worked_table_verifies() {
        let h = gen_fig1();
        let s = example_pseudo_sunflower();
        assert_eq!(verify_pseudo_sunflower(&h, &s), Ok(()));
    }

    #[test]
    fn changed_tables_fail_at_the_right_property() {
        let h = gen_fig1();
        let mut s = example_pseudo_sunflower();
        // Replacing the last block of leaf (1,1) by {r,s,t} breaks the row's
        // union before anything else.
        s.blocks[0][2] = fig1_set("r s t");
        assert_eq!(
            verify_pseudo_sunflower(&h, &s),
            Err(PseudoViolation::Property { property: 2, leaves: vec![0] })
        );
        // Reusing the row of its sibling (1,2) only breaks disjointness.
        let mut s = example_pseudo_sunflower();
        s.blocks[0] = s.blocks[1].clone();
        assert_eq!(
            verify_pseudo_sunflower(&h, &s),
            Err(PseudoViolation::Property { property: 4, leaves: vec![0, 1] })
        );
        let mut s = example_pseudo_sunflower();
        s.blocks[4][0] = fig1_set("a");
        assert_eq!(
            verify_pseudo_sunflower(&h, &s),
            Err(PseudoViolation::Property { property: 1, leaves: vec![4] })
        );
        let mut s = example_pseudo_sunflower();
        s.blocks[2][1] = fig1_set("c h o p");
        assert_eq!(
            verify_pseudo_sunflower(&h, &s),
            Err(PseudoViolation::Property { property: 3, leaves: vec![2] })
        );
        s.blocks.pop();
        assert_eq!(verify_pseudo_sunflower(&h, &s), Err(PseudoViolation::Shape));
    }

    #[test]
    fn sunflowers_are_level_one_tables() {
        let h = gen_fig1();
        let core = fig1_set("a b c");
        let flower = find_sunflower(&h, &core, 3).unwrap();
        let s = PseudoSunflower {
            tree: LeveledTree::new(2, 1).unwrap(),
            core: core.clone(),
            blocks: flower.petals.iter().map(|p| vec![core.clone(), p.difference(&core)]).collect(),
        };
        assert_eq!(verify_pseudo_sunflower(&h, &s), Ok(()));
    }

    #[test]
    fn search_examples() {
        let h = gen_fig1();
        let ab = fig1_set("a b");
        let s = find_pseudo_sunflower(&h, &ab, 2, 2).unwrap().unwrap();
        assert_eq!(verify_pseudo_sunflower(&h, &s), Ok(()));
        assert!(find_pseudo_sunflower(&h, &ab, 2, 1).unwrap().is_none());
        assert!(find_pseudo_sunflower(&h, &ab, 2, 8).unwrap().is_none());
        assert!(find_pseudo_sunflower(&h, &ab, 0, 1).is_err());
    }

    #[test]
    fn fig1_levels() {
        let h = gen_fig1();
        assert_eq!(pseudo_cores(&h, 2, 0).unwrap(), h);
        assert_eq!(pseudo_cores(&h, 2, 1).unwrap(), k_cores(&h, 2));
        assert!(pseudo_cores(&h, 2, 2).unwrap().contains_edge(&fig1_set("a b")));
    }

    #[test]
    fn allowance_search_matches_leaf_by_leaf_search() {
        for seed in 0..60 {
            let h = gen_random(8, 6, 4, seed).unwrap();
            for (k, level) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                let tree = LeveledTree::new(k, level).unwrap();
                for c in h.edge_subsets() {
                    assert_eq!(
                        search_table(&h, &c, &tree).unwrap().is_some(),
                        search_table_exhaustive(&h, &c, &tree),
                        "seed {seed}, k {k}, level {level}, core {c:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn allowance_search_matches_subtree_unions() {
        for seed in 0..60 {
            let h = gen_random(6, 6, 4, seed).unwrap();
            for (k, level) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
                let tree = LeveledTree::new(k, level).unwrap();
                for c in h.edge_subsets() {
                    assert_eq!(
                        search_table(&h, &c, &tree).unwrap().is_some(),
                        search_table_by_unions(&h, &c, &tree),
                        "seed {seed}, k {k}, level {level}, core {c:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn screen_agrees_with_leaf_by_leaf_search() {
        for seed in 0..60 {
            let h = gen_random(7, 6, 4, seed).unwrap();
            for (k, level) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                let tree = LeveledTree::new(k, level).unwrap();
                for c in h.edge_subsets() {
                    if residuals_have_small_hitting_set(&h, &c, k, level) {
                        assert!(!search_table_exhaustive(&h, &c, &tree), "seed {seed}, core {c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn screen_does_not_change_answers() {
        for seed in 0..60 {
            let h = gen_random(9, 7, 4, seed).unwrap();
            for k in 1..=3 {
                for level in 1..=3 {
                    let fast = pseudo_cores_with(&h, k, level, true).unwrap().cores;
                    let slow = pseudo_cores_with(&h, k, level, false).unwrap().cores;
                    assert_eq!(fast, slow, "seed {seed}, k {k}, level {level}");
                }
            }
        }
        let t = gen_tree(2, 2).unwrap();
        for level in 1..=2 {
            assert_eq!(
                pseudo_cores_with(&t, 2, level, true).unwrap().cores,
                pseudo_cores_with(&t, 2, level, false).unwrap().cores
            );
        }
    }

    #[test]
    fn found_tables_verify() {
        for seed in 0..40 {
            let h = gen_random(9, 7, 4, seed).unwrap();
            for level in 1..=3 {
                for c in pseudo_cores(&h, 2, level).unwrap().edges() {
                    let s = find_pseudo_sunflower(&h, c, 2, level).unwrap().unwrap();
                    assert_eq!(verify_pseudo_sunflower(&h, &s), Ok(()));
                }
            }
        }
    }

    #[test]
    fn level_structure() {
        for seed in 0..40 {
            let h = gen_random(10, 8, 4, seed).unwrap();
            for k in 1..=2 {
                let mut prev = h.clone();
                for level in 1..=h.dimension() {
                    let layer = pseudo_cores(&h, k, level).unwrap();
                    assert!(layer.dimension() + level <= h.dimension());
                    for c in k_cores(&prev, k).edges() {
                        assert!(layer.contains_edge(c), "seed {seed}, level {level}");
                    }
                    prev = layer;
                }
            }
        }
    }
}
