//! Sunflowers, the k-cores operator, and the sequential sunflower reduction.
//!
//! A sunflower with core `C` is a family of edges, each a proper superset of
//! `C`, whose pairwise intersections are exactly `C`. Equivalently the
//! residuals `e - C` are nonempty and pairwise disjoint. A *k-core* is the
//! core of a sunflower with at least `k + 1` petals.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::colorcoding::coloring_family;
use crate::hypergraph::{Edge, Hypergraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sunflower {
    pub core: Edge,
    pub petals: Vec<Edge>,
}

/// Whether `s` has at least one petal, every petal properly contains the
/// core, and any two petals meet exactly in the core.
pub fn verify_sunflower(s: &Sunflower) -> bool {
    !s.petals.is_empty()
        && s.petals.iter().all(|p| s.core.is_proper_subset(p))
        && s.petals.iter().enumerate().all(|(i, p)| {
            s.petals[i + 1..]
                .iter()
                .all(|q| p.intersection(q) == s.core)
        })
}

/// Residuals `e - core` of the edges properly containing `core`, in the
/// canonical order of the edges.
pub(crate) fn residuals(h: &Hypergraph, core: &Edge) -> (Vec<usize>, Vec<Edge>) {
    h.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| core.is_proper_subset(e))
        .map(|(i, e)| (i, e.difference(core)))
        .unzip()
}

/// Lexicographically least increasing index sequence of `count` pairwise
/// disjoint sets.
pub(crate) fn disjoint_selection(sets: &[Edge], count: usize) -> Option<Vec<usize>> {
    fn extend(sets: &[Edge], start: usize, count: usize, used: &Edge, chosen: &mut Vec<usize>) -> bool {
        if chosen.len() == count {
            return true;
        }
        let needed = count - chosen.len();
        for i in start..sets.len() {
            if sets.len() - i < needed {
                return false;
            }
            if sets[i].is_disjoint(used) {
                chosen.push(i);
                if extend(sets, i + 1, count, &used.union(&sets[i]), chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::with_capacity(count);
    extend(sets, 0, count, &Edge::new(), &mut chosen).then_some(chosen)
}

/// A sunflower in `h` with core exactly `core` and `count` petals, if one
/// exists. Among all choices the petals are the lexicographically least
/// sequence of edges in canonical order. A `count` of 0 is treated as 1.
pub fn find_sunflower(h: &Hypergraph, core: &Edge, count: usize) -> Option<Sunflower> {
    let (edge_idx, res) = residuals(h, core);
    let picked = disjoint_selection(&res, count.max(1))?;
    Some(Sunflower {
        core: core.clone(),
        petals: picked.into_iter().map(|i| h.edges()[edge_idx[i]].clone()).collect(),
    })
}

/// Result of a core operator together with the number of candidate cores
/// that reached the (expensive) sunflower test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreSearch {
    pub cores: Hypergraph,
    pub work: usize,
}

fn has_enough_supersets(h: &Hypergraph, core: &Edge, k: usize) -> bool {
    h.edges().iter().filter(|e| core.is_proper_subset(e)).nth(k).is_some()
}

fn cores_by(h: &Hypergraph, k: usize, test: impl Fn(&Edge) -> bool + Sync) -> CoreSearch {
    let candidates: Vec<Edge> = h
        .edge_subsets()
        .into_iter()
        .filter(|c| has_enough_supersets(h, c, k))
        .collect();
    let work = candidates.len();
    let cores: Vec<Edge> = candidates.into_par_iter().filter(|c| test(c)).collect();
    CoreSearch {
        cores: h.derive(cores),
        work,
    }
}

/// All k-cores of `h`: the cores of sunflowers with at least `k + 1`
/// petals. Every subset of an edge is a candidate.
pub fn k_cores(h: &Hypergraph, k: usize) -> Hypergraph {
    k_cores_counted(h, k).cores
}

pub fn k_cores_counted(h: &Hypergraph, k: usize) -> CoreSearch {
    cores_by(h, k, |c| find_sunflower(h, c, k + 1).is_some())
}

/// Same edge set as [`k_cores`], decided per candidate by color coding.
///
/// Vertices lying in a single residual never cause a conflict, so only the
/// vertices shared by two or more residuals are colored, grouped into
/// classes with identical residual membership. A residual without shared
/// vertices fits any color. A candidate is accepted when some coloring in a
/// perfect family over the classes, with `k + 1` colors, makes enough
/// residuals monochromatic in distinct colors. The family is perfect for as
/// many classes as the `k + 1` residuals with the most classes can hold.
pub fn k_cores_color_coded(h: &Hypergraph, k: usize) -> Hypergraph {
    k_cores_color_coded_counted(h, k).cores
}

pub fn k_cores_color_coded_counted(h: &Hypergraph, k: usize) -> CoreSearch {
    cores_by(h, k, |c| color_coded_test(h, c, k + 1))
}

fn color_coded_test(h: &Hypergraph, core: &Edge, colors: usize) -> bool {
    let (_, res) = residuals(h, core);
    // Class id per shared vertex, keyed by its residual membership.
    let mut membership: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (r, set) in res.iter().enumerate() {
        for v in set {
            membership.entry(v).or_default().push(r);
        }
    }
    let mut patterns: Vec<Vec<usize>> = membership.into_values().filter(|rs| rs.len() > 1).collect();
    patterns.sort_unstable();
    patterns.dedup();
    let classes = patterns.len();
    assert!(classes <= 64, "more than 64 shared-vertex classes for one candidate core");
    let mut masks = vec![0u64; res.len()];
    for (cls, rs) in patterns.iter().enumerate() {
        for &r in rs {
            masks[r] |= 1 << cls;
        }
    }
    let wildcards = masks.iter().filter(|&&m| m == 0).count();
    if wildcards >= colors {
        return true;
    }
    let mut sizes: Vec<usize> = masks.iter().map(|m| m.count_ones() as usize).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let support = classes.min(sizes.iter().take(colors).sum());
    let family = coloring_family(classes, support, colors).expect("1 <= support <= classes");
    let shared: Vec<u64> = masks.into_iter().filter(|&m| m != 0).collect();
    family
        .for_each(|table| {
            let mut by_color = [0u64; 256];
            for (cls, &col) in table.iter().enumerate() {
                by_color[col as usize] |= 1 << cls;
            }
            let mut hit = 0;
            let mut covered = vec![false; colors];
            for &m in &shared {
                let col = table[m.trailing_zeros() as usize] as usize;
                if m & !by_color[col] == 0 && !covered[col] {
                    covered[col] = true;
                    hit += 1;
                }
            }
            if hit + wildcards >= colors {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .is_some()
}

/// Outcome of the sequential reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequentialRun {
    pub kernel: Hypergraph,
    /// Reductions applied.
    pub steps: usize,
    /// Candidate cores tested over all steps.
    pub work: usize,
}

/// Replaces sunflowers with `k + 1` petals by their cores until none is
/// left. Each step takes the first candidate core in canonical order that
/// has such a sunflower and the lexicographically least petals for it.
///
/// A hypergraph containing the empty edge has no hitting set at all and is
/// returned as the single edge `∅`.
pub fn sequential_kernel(h: &Hypergraph, k: usize) -> Hypergraph {
    sequential_kernel_run(h, k).kernel
}

pub fn sequential_kernel_run(h: &Hypergraph, k: usize) -> SequentialRun {
    let mut current = h.clone();
    let mut steps = 0;
    let mut work = 0;
    loop {
        if current.has_empty_edge() {
            if current.edge_count() > 1 {
                current = current.derive([Edge::new()]);
                steps += 1;
            }
            break;
        }
        let found = current
            .edge_subsets()
            .into_iter()
            .filter(|c| has_enough_supersets(&current, c, k))
            .find_map(|c| {
                work += 1;
                find_sunflower(&current, &c, k + 1)
            });
        let Some(flower) = found else { break };
        let next = current
            .edges()
            .iter()
            .filter(|e| !flower.petals.contains(e))
            .cloned()
            .chain([flower.core]);
        current = current.derive(next.collect::<Vec<_>>());
        steps += 1;
    }
    SequentialRun {
        kernel: current,
        steps,
        work,
    }
}

/// `k^d · d!`, saturating.
pub fn sunflower_bound(k: usize, d: usize) -> u128 {
    (1..=d as u128).fold(1u128, |acc, i| acc.saturating_mul(k as u128).saturating_mul(i))
}
