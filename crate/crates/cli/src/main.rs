//! Command-line front end. Exit status 0 means success or that the checked
//! property holds, 1 that it fails, 2 a usage, input or parse error.

use std::fmt::Write as _;
use std::fs;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hskernel::colorcoding::coloring_family;
use hskernel::generate::{gen_fig1, gen_random, gen_tree};
use hskernel::io::{parse, serialize, serialize_with};
use hskernel::kernel::{kernelize_with, Algorithm, KernelOptions};
use hskernel::pseudo::find_pseudo_sunflower;
use hskernel::solver::{min_hitting_set, same_size_k_hitting_sets, Equivalence};
use hskernel::{Error, Hypergraph};

#[derive(Parser)]
#[command(name = "hskernel", version, about = "Kernels for d-Hitting Set")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a kernel and print a report followed by the kernel.
    Kernelize {
        #[arg(long, value_parser = parse_algorithm)]
        algo: Algorithm,
        #[arg(long)]
        k: usize,
        /// Also print every layer of the chain as comment lines.
        #[arg(long)]
        emit_chain: bool,
        /// Drop vertices that occur in no kernel edge.
        #[arg(long)]
        shrink: bool,
        /// Reduce even when the input has no more edges than the size bound.
        #[arg(long)]
        no_size_guard: bool,
        file: PathBuf,
    },
    /// Find a smallest hitting set of size at most k.
    Solve {
        #[arg(long)]
        k: usize,
        file: PathBuf,
    },
    /// Check that two hypergraphs have the same hitting sets of size at most k.
    Verify {
        #[arg(long)]
        k: usize,
        original: PathBuf,
        kernel: PathBuf,
    },
    /// Print a generated instance.
    Gen {
        #[command(subcommand)]
        kind: Generator,
    },
    /// Decide whether a vertex set is a pseudo-core and print the table.
    PseudoTest {
        /// Vertex names, separated by spaces or commas.
        #[arg(long, allow_hyphen_values = true)]
        core: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        level: usize,
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum Generator {
    /// The ten-edge worked example.
    Fig1,
    /// Root-to-leaf paths of a complete tree with l + 1 children per node.
    Tree {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        d: usize,
    },
    /// Seeded random hypergraph.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        dmax: usize,
        #[arg(long)]
        seed: u64,
    },
    /// A k-perfect coloring family of n elements with c colors, one
    /// coloring per line.
    Family {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        c: usize,
    },
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read(path: &Path) -> Result<Hypergraph, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

fn edge_list(h: &Hypergraph) -> String {
    h.edges().iter().map(|e| h.format_set(e)).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let mut out = String::new();
    let status = match cli.command {
        Command::Kernelize { algo, k, emit_chain, shrink, no_size_guard, file } => {
            let h = read(&file)?;
            let report = kernelize_with(&h, k, algo, KernelOptions { size_guard: !no_size_guard })?;
            writeln!(out, "# algorithm: {}", report.algorithm).unwrap();
            writeln!(out, "# rounds: {}", report.rounds).unwrap();
            writeln!(out, "# work: {}", report.work).unwrap();
            writeln!(out, "# edges_in: {}", h.edge_count()).unwrap();
            writeln!(out, "# edges_out: {}", report.kernel.edge_count()).unwrap();
            writeln!(out, "# bound: {}", report.bound).unwrap();
            if emit_chain {
                match &report.chain {
                    Some(chain) => {
                        for (i, layer) in chain.layers.iter().enumerate() {
                            writeln!(out, "# layer {i}: {}", edge_list(layer)).unwrap();
                        }
                    }
                    None => out.push_str("# no chain\n"),
                }
            }
            out.push_str(&serialize_with(&report.kernel, shrink));
            ExitCode::SUCCESS
        }
        Command::Solve { k, file } => {
            let h = read(&file)?;
            match min_hitting_set(&h, k).witness {
                Some(x) => {
                    writeln!(out, "hitting set: {}", h.format_set(&x)).unwrap();
                    ExitCode::SUCCESS
                }
                None => {
                    writeln!(out, "no hitting set of size at most {k}").unwrap();
                    ExitCode::from(1)
                }
            }
        }
        Command::Verify { k, original, kernel } => {
            let h = read(&original)?;
            let mut kernel = read(&kernel)?;
            if kernel.vertex_count() != h.vertex_count() || (kernel.names().is_some() && h.names().is_some()) {
                kernel = kernel.reindex_by_names(&h)?;
            }
            match same_size_k_hitting_sets(&h, &kernel, k)? {
                Equivalence::Same => {
                    writeln!(out, "same hitting sets of size at most {k}").unwrap();
                    ExitCode::SUCCESS
                }
                Equivalence::Counterexample(x) => {
                    writeln!(out, "counterexample: {}", h.format_set(&x)).unwrap();
                    ExitCode::from(1)
                }
            }
        }
        Command::Gen { kind } => {
            match kind {
                Generator::Fig1 => out.push_str(&serialize(&gen_fig1())),
                Generator::Tree { l, d } => out.push_str(&serialize(&gen_tree(l, d)?)),
                Generator::Random { n, m, dmax, seed } => out.push_str(&serialize(&gen_random(n, m, dmax, seed)?)),
                Generator::Family { n, k, c } => {
                    let family = coloring_family(n, k, c)?;
                    writeln!(out, "# family n={n} k={k} c={c}").unwrap();
                    family.for_each(|table| {
                        let line: Vec<String> = table.iter().map(u8::to_string).collect();
                        writeln!(out, "{}", line.join(" ")).unwrap();
                        ControlFlow::<()>::Continue(())
                    });
                }
            }
            ExitCode::SUCCESS
        }
        Command::PseudoTest { core, k, level, file } => {
            let h = read(&file)?;
            let core = h.parse_vertex_list(&core)?;
            match find_pseudo_sunflower(&h, &core, k, level)? {
                Some(table) => {
                    writeln!(out, "pseudo-core: {}", h.format_set(&core)).unwrap();
                    for (leaf, row) in table.blocks.iter().enumerate() {
                        let path: Vec<String> = table.tree.leaf(leaf).iter().map(usize::to_string).collect();
                        let cells: Vec<String> = row.iter().map(|s| h.format_set(s)).collect();
                        writeln!(out, "leaf {}: {}", path.join("."), cells.join(" | ")).unwrap();
                    }
                    ExitCode::SUCCESS
                }
                None => {
                    writeln!(out, "not a pseudo-core: {}", h.format_set(&core)).unwrap();
                    ExitCode::from(1)
                }
            }
        }
    };
    print!("{out}");
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
