//! Line-based text format.
//!
//! ```text
//! # comment
//! p hg <n> <m>
//! v <name_0> <name_1> ... <name_{n-1}>
//! e <tok> <tok> ...
//! ```
//!
//! The `v` line is optional and fixes the id of every named vertex. Without
//! it, tokens are interned in order of first appearance, except that a file
//! whose tokens are all of the form `v<i>` (with `i < n`) addresses vertex
//! `i` directly. An `e` line with no tokens is the empty edge. Exactly `m`
//! `e` lines must follow the header; repeated vertices and repeated edges
//! collapse.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Hypergraph};
use crate::vertex_set::VertexSet;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse(text: &str) -> Result<Hypergraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut declared: Option<Vec<String>> = None;
    let mut raw_edges: Vec<(usize, Vec<&str>)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(parse_error(lineno, "duplicate header"));
                }
                let fields: Vec<&str> = tokens.collect();
                let [kind, n, m] = fields[..] else {
                    return Err(parse_error(lineno, "expected `p hg <n> <m>`"));
                };
                if kind != "hg" {
                    return Err(parse_error(lineno, format!("unknown problem kind `{kind}`")));
                }
                let num = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| parse_error(lineno, format!("`{s}` is not a count")))
                };
                header = Some((num(n)?, num(m)?));
            }
            Some("v") => {
                let Some((n, _)) = header else {
                    return Err(parse_error(lineno, "`v` line before header"));
                };
                if declared.is_some() || !raw_edges.is_empty() {
                    return Err(parse_error(lineno, "`v` line must directly follow the header"));
                }
                let names: Vec<String> = tokens.map(String::from).collect();
                if names.len() != n {
                    return Err(parse_error(
                        lineno,
                        format!("{} vertex names declared for {} vertices", names.len(), n),
                    ));
                }
                declared = Some(names);
            }
            Some("e") => {
                if header.is_none() {
                    return Err(parse_error(lineno, "edge before header"));
                }
                raw_edges.push((lineno, tokens.collect()));
            }
            Some(other) => {
                return Err(parse_error(lineno, format!("unexpected line type `{other}`")));
            }
            None => unreachable!("blank lines are skipped"),
        }
    }

    let Some((n, m)) = header else {
        return Err(parse_error(0, "missing `p hg <n> <m>` header"));
    };
    if raw_edges.len() != m {
        return Err(parse_error(
            0,
            format!("header announces {m} edges, found {}", raw_edges.len()),
        ));
    }

    let direct_ids = declared.is_none()
        && raw_edges.iter().flat_map(|(_, t)| t).all(|t| {
            t.strip_prefix('v')
                .and_then(|i| i.parse::<usize>().ok())
                .is_some_and(|i| i < n && format!("v{i}") == *t)
        });

    let mut names: Vec<String> = declared.clone().unwrap_or_default();
    let mut ids: HashMap<String, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    if ids.len() != names.len() {
        return Err(parse_error(0, "duplicate vertex names in `v` line"));
    }

    let mut edges: Vec<Edge> = Vec::with_capacity(m);
    for (lineno, tokens) in &raw_edges {
        let mut edge = VertexSet::new();
        for &tok in tokens {
            let id = if direct_ids {
                tok[1..].parse::<usize>().expect("checked above")
            } else if let Some(&id) = ids.get(tok) {
                id
            } else if declared.is_some() {
                return Err(parse_error(*lineno, format!("undeclared vertex `{tok}`")));
            } else {
                if names.len() == n {
                    return Err(parse_error(
                        *lineno,
                        format!("more than {n} distinct vertices"),
                    ));
                }
                names.push(tok.to_string());
                ids.insert(tok.to_string(), names.len() - 1);
                names.len() - 1
            };
            edge.insert(id);
        }
        edges.push(edge);
    }

    let h = Hypergraph::new(n, edges)?;
    if direct_ids {
        return Ok(h);
    }
    for i in names.len()..n {
        let default = format!("v{i}");
        if ids.contains_key(&default) {
            return Err(parse_error(
                0,
                format!("name `{default}` clashes with an unused vertex; declare names with a `v` line"),
            ));
        }
        names.push(default);
    }
    Ok(h.with_names(names)
        .map_err(|e| parse_error(0, e.to_string()))?
        .normalize_names())
}

/// Canonical serialization: header, `v` line when the hypergraph carries
/// names, then the edges in canonical order.
pub fn serialize(h: &Hypergraph) -> String {
    let mut out = String::new();
    writeln!(out, "p hg {} {}", h.vertex_count(), h.edge_count()).unwrap();
    if let Some(names) = h.names() {
        if names.is_empty() {
            out.push_str("v\n");
        } else {
            writeln!(out, "v {}", names.join(" ")).unwrap();
        }
    }
    for e in h.edges() {
        out.push('e');
        for v in e {
            out.push(' ');
            out.push_str(&h.vertex_name(v));
        }
        out.push('\n');
    }
    out
}

/// Serializes either the hypergraph itself or, with `shrink`, its
/// restriction to the vertices that occur in some edge.
pub fn serialize_with(h: &Hypergraph, shrink: bool) -> String {
    if shrink {
        serialize(&h.shrink())
    } else {
        serialize(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_fig1, gen_random, gen_tree};
    use proptest::prelude::*;

    #[test]
    fn parses_names_in_order_of_appearance() {
        let h = parse("# demo\np hg 3 2\ne b a\ne c\n").unwrap();
        assert_eq!(h.names().unwrap(), ["b", "a", "c"]);
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.format_set(&h.edges()[0]), "{b,a}");
    }

    #[test]
    fn empty_edge_line_and_duplicates() {
        let h = parse("p hg 2 4\ne\ne v1 v1\ne v1\ne\n").unwrap();
        assert_eq!(h.edge_count(), 2);
        assert!(h.has_empty_edge());
        assert_eq!(h.names(), None);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "e a\n",
            "p hg 2\n",
            "p hg x 1\ne a\n",
            "p hg 1 2\ne a\n",
            "p hg 1 1\ne a b\n",
            "p hg 2 1\nv a a\ne a\n",
            "p hg 2 1\nv a b\ne c\n",
            "p hg 2 1\nq a\n",
        ] {
            assert!(matches!(parse(bad), Err(Error::Parse { .. })), "accepted {bad:?}");
        }
    }

    #[test]
    fn fixtures_round_trip() {
        for h in [gen_fig1(), gen_tree(2, 2).unwrap(), gen_random(10, 6, 3, 1).unwrap()] {
            assert_eq!(parse(&serialize(&h)).unwrap(), h);
        }
    }

    #[test]
    fn shrink_flag_drops_isolated_vertices() {
        let h = parse("p hg 5 1\nv a b c d e\ne b d\n").unwrap();
        assert_eq!(serialize_with(&h, true), "p hg 2 1\nv b d\ne b d\n");
        assert_eq!(serialize_with(&h, false), "p hg 5 1\nv a b c d e\ne b d\n");
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(
            n in 1usize..12,
            edges in proptest::collection::vec(proptest::collection::btree_set(0usize..12, 0..5), 0..8),
            named in any::<bool>(),
        ) {
            let edges = edges.into_iter().map(|e| e.into_iter().filter(|&v| v < n).collect());
            let mut h = Hypergraph::new(n, edges).unwrap();
            if named {
                h = h.with_names((0..n).map(|i| format!("x{}", n - i)).collect()).unwrap();
            }
            prop_assert_eq!(parse(&serialize(&h)).unwrap(), h);
        }
    }
}
