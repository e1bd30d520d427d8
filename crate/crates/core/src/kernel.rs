//! Matryoshka sequences, kernel assembly, and the three kernelization
//! pipelines.
//!
//! A matryoshka sequence for `H` and `k` is a chain `M_0, …, M_d` with
//! `d = d(H)` such that
//!
//! 1. `M_0 = H`,
//! 2. `d(M_i) ≤ d(H) - i`,
//! 3. `k_cores(M_i) ⊆ M_{i+1}`,
//! 4. every hitting set of `H` of size at most `k` hits `M_i`.
//!
//! Such a chain yields the kernel `(M_0 ⊖ M_1) ∪ … ∪ (M_{d-1} ⊖ M_d) ∪ M_d`.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Hypergraph};
use crate::pseudo::pseudo_cores_counted;
use crate::solver::visit_subsets;
use crate::sunflower::{k_cores, k_cores_counted, sequential_kernel_run};
use crate::vertex_set::{Vertex, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatryoshkaSequence {
    pub base: Hypergraph,
    pub k: usize,
    /// `M_0, …, M_{d(base)}`.
    pub layers: Vec<Hypergraph>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatryoshkaViolation {
    /// `M_0` differs from the base hypergraph.
    Base,
    /// `M_layer` has an edge wider than `d(H) - layer`.
    Dimension { layer: usize, edge: Edge },
    /// A k-core of `M_layer` is missing from the next layer.
    Cores { layer: usize, core: Edge },
    /// `set` hits the base but misses `M_layer`.
    Unhit { layer: usize, set: VertexSet },
}

impl MatryoshkaViolation {
    /// The number (1 to 4) of the failed property in the module docs.
    pub fn property(&self) -> usize {
        match self {
            Self::Base => 1,
            Self::Dimension { .. } => 2,
            Self::Cores { .. } => 3,
            Self::Unhit { .. } => 4,
        }
    }
}

impl fmt::Display for MatryoshkaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Base => write!(f, "property 1: first layer differs from the base"),
            Self::Dimension { layer, .. } => write!(f, "property 2: layer {layer} is too wide"),
            Self::Cores { layer, .. } => write!(f, "property 3: a core of layer {layer} is missing from the next"),
            Self::Unhit { layer, .. } => write!(f, "property 4: a small hitting set of the base misses layer {layer}"),
        }
    }
}

fn check_shape(seq: &MatryoshkaSequence) -> Result<()> {
    let expected = seq.base.dimension() + 1;
    if seq.layers.len() != expected {
        return Err(Error::InvalidSequence(format!(
            "expected {expected} layers, found {}",
            seq.layers.len()
        )));
    }
    for layer in &seq.layers {
        if layer.vertex_count() != seq.base.vertex_count() {
            return Err(Error::UniverseMismatch {
                left: seq.base.vertex_count(),
                right: layer.vertex_count(),
            });
        }
    }
    Ok(())
}

/// The first two properties, which need no search.
fn cheap_violation(seq: &MatryoshkaSequence) -> Option<MatryoshkaViolation> {
    if seq.layers[0].edges() != seq.base.edges() {
        return Some(MatryoshkaViolation::Base);
    }
    let d = seq.base.dimension();
    seq.layers.iter().enumerate().find_map(|(i, m)| {
        m.edges()
            .iter()
            .find(|e| e.len() + i > d)
            .map(|e| MatryoshkaViolation::Dimension { layer: i, edge: e.clone() })
    })
}

/// Checks the four properties in order and reports the first that fails.
/// Property 4 enumerates every set of at most `k` vertices occurring in
/// edges of the base.
pub fn verify_matryoshka(seq: &MatryoshkaSequence) -> Result<Result<(), MatryoshkaViolation>> {
    check_shape(seq)?;
    if let Some(v) = cheap_violation(seq) {
        return Ok(Err(v));
    }
    for (i, pair) in seq.layers.windows(2).enumerate() {
        if let Some(core) = k_cores(&pair[0], seq.k).edges().iter().find(|c| !pair[1].contains_edge(c)) {
            return Ok(Err(MatryoshkaViolation::Cores { layer: i, core: core.clone() }));
        }
    }
    let universe: Vec<Vertex> = seq.base.covered_vertices().iter().collect();
    let unhit = visit_subsets(&universe, seq.k, |x| {
        if !seq.base.is_hit_by(x) {
            return ControlFlow::Continue(());
        }
        match seq.layers.iter().position(|m| !m.is_hit_by(x)) {
            Some(layer) => ControlFlow::Break(MatryoshkaViolation::Unhit { layer, set: x.clone() }),
            None => ControlFlow::Continue(()),
        }
    });
    Ok(unhit.map_or(Ok(()), Err))
}

/// A chain with the work spent building it and its number of dependent
/// phases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRun {
    pub chain: MatryoshkaSequence,
    pub work: usize,
    pub rounds: usize,
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok(())
}

/// `H_0 = H` and `H_{i+1} = k_cores(H_i)` up to `i = d(H)`.
pub fn cores_chain(h: &Hypergraph, k: usize) -> Result<MatryoshkaSequence> {
    Ok(cores_chain_run(h, k)?.chain)
}

/// Each layer needs the previous one; a round is one core computation on
/// a nonempty layer.
pub fn cores_chain_run(h: &Hypergraph, k: usize) -> Result<ChainRun> {
    check_k(k)?;
    let mut layers = vec![h.clone()];
    let (mut work, mut rounds) = (0, 0);
    for _ in 0..h.dimension() {
        let last = layers.last().expect("chain starts with the base");
        let next = if last.has_edges() {
            let search = k_cores_counted(last, k);
            work += search.work;
            rounds += 1;
            search.cores
        } else {
            h.derive([])
        };
        layers.push(next);
    }
    Ok(ChainRun {
        chain: MatryoshkaSequence { base: h.clone(), k, layers },
        work,
        rounds,
    })
}

/// Layer `L` holds the k-pseudo-cores of level `L` of `H`, for
/// `L = 0, …, d(H)`.
pub fn pseudo_chain(h: &Hypergraph, k: usize) -> Result<MatryoshkaSequence> {
    Ok(pseudo_chain_run(h, k)?.chain)
}

/// Every layer comes straight from `H`, so the layers are computed in
/// parallel and the chain takes one round.
pub fn pseudo_chain_run(h: &Hypergraph, k: usize) -> Result<ChainRun> {
    check_k(k)?;
    let searches = (0..=h.dimension())
        .into_par_iter()
        .map(|level| pseudo_cores_counted(h, k, level))
        .collect::<Result<Vec<_>>>()?;
    let work = searches.iter().map(|s| s.work).sum();
    Ok(ChainRun {
        chain: MatryoshkaSequence {
            base: h.clone(),
            k,
            layers: searches.into_iter().map(|s| s.cores).collect(),
        },
        work,
        rounds: 1,
    })
}

/// `(M_0 ⊖ M_1) ∪ … ∪ (M_{d-1} ⊖ M_d) ∪ M_d`.
///
/// Only the layer count and the first two properties are checked here;
/// [`verify_matryoshka`] does the full check.
pub fn assemble_kernel(seq: &MatryoshkaSequence) -> Result<Hypergraph> {
    check_shape(seq)?;
    if let Some(v) = cheap_violation(seq) {
        return Err(Error::InvalidSequence(v.to_string()));
    }
    let mut kernel = seq.layers.last().expect("at least one layer").clone();
    for pair in seq.layers.windows(2) {
        kernel = kernel.union(&pair[0].ominus(&pair[1])?)?;
    }
    Ok(kernel)
}

/// `Σ_{i=0}^{d} k^i · i!`, saturating.
pub fn kernel_bound(k: usize, d: usize) -> u128 {
    let mut term = 1u128;
    let mut total = 1u128;
    for i in 1..=d as u128 {
        term = term.saturating_mul(k as u128).saturating_mul(i);
        total = total.saturating_add(term);
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Sequential,
    Cores,
    Pseudo,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Sequential, Algorithm::Cores, Algorithm::Pseudo];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sequential => "sequential",
            Algorithm::Cores => "cores",
            Algorithm::Pseudo => "pseudo",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    pub kernel: Hypergraph,
    pub algorithm: Algorithm,
    /// Dependent phases: reduction steps for `sequential`, core
    /// computations on nonempty layers for `cores`, 1 for `pseudo`, and 0
    /// when the size guard returns the input.
    pub rounds: usize,
    /// Candidate tests performed.
    pub work: usize,
    /// [`kernel_bound`] for `k` and `d(H)`.
    pub bound: u128,
    /// The chain the kernel was assembled from, for `cores` and `pseudo`.
    pub chain: Option<MatryoshkaSequence>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelOptions {
    /// Return the input unchanged when it has at most [`kernel_bound`]
    /// edges.
    pub size_guard: bool,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self { size_guard: true }
    }
}

/// Kernelizes with the size guard on.
pub fn kernelize(h: &Hypergraph, k: usize, algorithm: Algorithm) -> Result<KernelReport> {
    kernelize_with(h, k, algorithm, KernelOptions::default())
}

pub fn kernelize_with(h: &Hypergraph, k: usize, algorithm: Algorithm, options: KernelOptions) -> Result<KernelReport> {
    check_k(k)?;
    let bound = kernel_bound(k, h.dimension());
    if options.size_guard && (h.edge_count() as u128) <= bound {
        return Ok(KernelReport { kernel: h.clone(), algorithm, rounds: 0, work: 0, bound, chain: None });
    }
    let from_chain = |run: ChainRun| -> Result<KernelReport> {
        Ok(KernelReport {
            kernel: assemble_kernel(&run.chain)?,
            algorithm,
            rounds: run.rounds,
            work: run.work,
            bound,
            chain: Some(run.chain),
        })
    };
    match algorithm {
        Algorithm::Sequential => {
            let run = sequential_kernel_run(h, k);
            Ok(KernelReport { kernel: run.kernel, algorithm, rounds: run.steps, work: run.work, bound, chain: None })
        }
        Algorithm::Cores => from_chain(cores_chain_run(h, k)?),
        Algorithm::Pseudo => from_chain(pseudo_chain_run(h, k)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_fig1, gen_random, gen_tree};
    use crate::solver::same_size_k_hitting_sets;
    use crate::sunflower::sunflower_bound;

    const UNGUARDED: KernelOptions = KernelOptions { size_guard: false };

    fn edges(h: &Hypergraph, list: &[&str]) -> Hypergraph {
        h.derive(list.iter().map(|s| h.parse_vertex_list(s).unwrap()))
    }

    #[test]
    fn fig1_cores_chain() {
        let h = gen_fig1();
        let chain = cores_chain(&h, 2).unwrap();
        assert_eq!(chain.layers.len(), 10);
        assert_eq!(chain.layers[1], edges(&h, &["a b c", "a b d", "a b e"]));
        assert_eq!(chain.layers[2], edges(&h, &["a b"]));
        assert!(chain.layers[3..].iter().all(|m| !m.has_edges()));
        assert_eq!(verify_matryoshka(&chain).unwrap(), Ok(()));
        assert_eq!(assemble_kernel(&chain).unwrap(), edges(&h, &["a b", "u v w"]));
    }

    #[test]
    fn fig1_pseudo_chain() {
        let h = gen_fig1();
        let chain = pseudo_chain(&h, 2).unwrap();
        let cores = cores_chain(&h, 2).unwrap();
        assert_eq!(chain.layers[0], h);
        assert_eq!(chain.layers[1], cores.layers[1]);
        assert!(chain.layers[2].contains_edge(&h.parse_vertex_list("a b").unwrap()));
        assert_eq!(verify_matryoshka(&chain).unwrap(), Ok(()));
        let kernel = assemble_kernel(&chain).unwrap();
        assert!(same_size_k_hitting_sets(&h, &kernel, 2).unwrap().holds());
    }

    #[test]
    fn empty_and_broken_chains() {
        let h = Hypergraph::empty(4);
        for chain in [cores_chain(&h, 2).unwrap(), pseudo_chain(&h, 2).unwrap()] {
            assert_eq!(chain.layers, vec![h.clone()]);
            assert_eq!(verify_matryoshka(&chain).unwrap(), Ok(()));
            assert!(!assemble_kernel(&chain).unwrap().has_edges());
        }

        let g = gen_fig1();
        let mut chain = cores_chain(&g, 2).unwrap();
        chain.layers[0] = chain.layers[1].clone();
        assert_eq!(verify_matryoshka(&chain).unwrap().unwrap_err().property(), 1);
        assert!(assemble_kernel(&chain).is_err());

        let mut chain = cores_chain(&g, 2).unwrap();
        chain.layers[8] = chain.layers[1].clone();
        assert_eq!(verify_matryoshka(&chain).unwrap().unwrap_err().property(), 2);

        let mut chain = cores_chain(&g, 2).unwrap();
        chain.layers[2] = Hypergraph::empty(g.vertex_count());
        assert_eq!(verify_matryoshka(&chain).unwrap().unwrap_err().property(), 3);

        let mut chain = cores_chain(&g, 2).unwrap();
        chain.layers[3] = edges(&g, &["a"]);
        assert_eq!(
            verify_matryoshka(&chain).unwrap(),
            Err(MatryoshkaViolation::Unhit { layer: 3, set: g.parse_vertex_list("b u").unwrap() })
        );

        let mut chain = cores_chain(&g, 2).unwrap();
        chain.layers.pop();
        assert!(verify_matryoshka(&chain).is_err());
        assert!(assemble_kernel(&chain).is_err());
        assert!(cores_chain(&g, 0).is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(kernel_bound(1, 2), 4);
        assert_eq!(kernel_bound(2, 0), 1);
        assert_eq!(kernel_bound(2, 3), 1 + 2 + 8 + 48);
        assert_eq!(kernel_bound(usize::MAX, 40), u128::MAX);
    }

    #[test]
    fn tree_chains() {
        // The k-cores of a tree's path hypergraph are all shorter root paths.
        for depth in 1..=3 {
            let h = gen_tree(2, depth).unwrap();
            let run = cores_chain_run(&h, 2).unwrap();
            let paths = |sizes: std::ops::RangeInclusive<usize>| -> Vec<Edge> {
                h.edges().iter().flat_map(|e| sizes.clone().map(|s| e.iter().take(s).collect())).collect()
            };
            for (i, layer) in run.chain.layers.iter().enumerate().skip(1) {
                assert_eq!(layer, &h.derive(paths(1..=depth + 1 - i)), "depth {depth} layer {i}");
            }
            assert_eq!(run.rounds, depth + 1);
            assert_eq!(verify_matryoshka(&run.chain).unwrap(), Ok(()));
        }
    }

    #[test]
    fn kernelize_fig1() {
        let h = gen_fig1();
        let cores = kernelize_with(&h, 2, Algorithm::Cores, UNGUARDED).unwrap();
        assert_eq!(cores.kernel, edges(&h, &["a b", "u v w"]));
        assert_eq!(cores.bound, kernel_bound(2, 9));
        assert_eq!(cores.rounds, 3);

        let pseudo = kernelize_with(&h, 2, Algorithm::Pseudo, UNGUARDED).unwrap();
        assert_eq!(pseudo.rounds, 1);
        assert!(same_size_k_hitting_sets(&h, &pseudo.kernel, 2).unwrap().holds());
        assert!((pseudo.kernel.edge_count() as u128) <= pseudo.bound);

        let seq = kernelize_with(&h, 2, Algorithm::Sequential, UNGUARDED).unwrap();
        assert!(same_size_k_hitting_sets(&h, &seq.kernel, 2).unwrap().holds());
        assert!(seq.chain.is_none() && seq.rounds >= 1);

        // Ten edges are far below the bound, so the guard keeps the input.
        for algo in Algorithm::ALL {
            let guarded = kernelize(&h, 2, algo).unwrap();
            assert_eq!((guarded.kernel.clone(), guarded.rounds), (h.clone(), 0));
        }
        assert!(kernelize(&h, 0, Algorithm::Cores).is_err());
    }

    #[test]
    fn kernels_are_equivalent_and_small() {
        for seed in 0..25 {
            let h = gen_random(9, 7, 3, seed).unwrap();
            for k in 1..=2 {
                for algo in Algorithm::ALL {
                    let report = kernelize_with(&h, k, algo, UNGUARDED).unwrap();
                    assert!(same_size_k_hitting_sets(&h, &report.kernel, k).unwrap().holds(), "seed {seed} {algo}");
                    let limit = match algo {
                        Algorithm::Sequential => sunflower_bound(k, h.dimension()),
                        _ => report.bound,
                    };
                    assert!(report.kernel.edge_count() as u128 <= limit);
                    if let Some(chain) = &report.chain {
                        assert_eq!(verify_matryoshka(chain).unwrap(), Ok(()), "seed {seed} {algo}");
                    }
                    // Kernels fit under the bound, so the guard returns them as they are.
                    let again = kernelize(&report.kernel, k, algo).unwrap();
                    if report.kernel.edge_count() as u128 <= kernel_bound(k, report.kernel.dimension()) {
                        assert_eq!(again.kernel, report.kernel);
                    }
                }
            }
        }
    }

    #[test]
    fn pseudo_layers_contain_core_layers() {
        for seed in 0..20 {
            let h = gen_random(8, 6, 4, seed).unwrap();
            let cores = cores_chain(&h, 1).unwrap();
            let pseudo = pseudo_chain(&h, 1).unwrap();
            for (c, p) in cores.layers.iter().zip(&pseudo.layers) {
                assert!(c.edges().iter().all(|e| p.contains_edge(e)), "seed {seed}");
            }
        }
    }

    #[test]
    fn algorithm_names() {
        for algo in Algorithm::ALL {
            assert_eq!(algo.name().parse::<Algorithm>().unwrap(), algo);
        }
        assert!("fast".parse::<Algorithm>().is_err());
    }
}
