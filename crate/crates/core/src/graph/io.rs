//! Plain-text edge lists.
//!
//! One edge per line, `src dst [weight]`, whitespace separated, with 0-based
//! ids and a default weight of 1. Lines starting with `#` are comments; the
//! comment `# nodes N` declares the node count so trailing isolated nodes
//! survive a round trip.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::{check_edge, Graph, NodeId};
use crate::error::{Error, Result};
use crate::fmt::format_g17;

struct RawEdges {
    declared_nodes: Option<(usize, usize)>,
    edges: Vec<(u64, u64, f64)>,
    max_id: Option<u64>,
}

fn parse<R: BufRead>(reader: R) -> Result<RawEdges> {
    let mut raw = RawEdges {
        declared_nodes: None,
        edges: Vec::new(),
        max_id: None,
    };
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if words.next() == Some("nodes") {
                let n = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(lineno, "malformed `# nodes N` header"))?;
                raw.declared_nodes = Some((n, lineno));
            }
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let src = parse_id(fields.next(), lineno)?;
        let dst = parse_id(fields.next(), lineno)?;
        let weight = match fields.next() {
            None => 1.0,
            Some(tok) => tok
                .parse::<f64>()
                .map_err(|_| Error::parse(lineno, format!("weight `{tok}` is not a number")))?,
        };
        if let Some(extra) = fields.next() {
            return Err(Error::parse(lineno, format!("unexpected field `{extra}`")));
        }
        if !weight.is_finite() {
            return Err(Error::parse(
                lineno,
                format!("weight {weight} is not finite"),
            ));
        }
        if weight <= 0.0 {
            return Err(Error::parse(lineno, format!("nonpositive weight {weight}")));
        }
        raw.max_id = raw.max_id.max(Some(src.max(dst)));
        raw.edges.push((src, dst, weight));
    }
    Ok(raw)
}

fn parse_id(tok: Option<&str>, line: usize) -> Result<u64> {
    let tok = tok.ok_or_else(|| Error::parse(line, "expected `src dst [weight]`"))?;
    let id = tok.parse::<u64>().map_err(|_| {
        Error::parse(
            line,
            format!("node id `{tok}` is not a non-negative integer"),
        )
    })?;
    if id >= NodeId::MAX as u64 {
        return Err(Error::parse(line, format!("node id {id} is too large")));
    }
    Ok(id)
}

/// Reads an edge list with dense ids; the node count is one past the
/// largest id, or the `# nodes N` header if that is larger.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let raw = parse(reader)?;
    let seen = raw.max_id.map_or(0, |m| m as usize + 1);
    let n = match raw.declared_nodes {
        Some((declared, line)) if declared < seen => {
            return Err(Error::parse(
                line,
                format!(
                    "header declares {declared} nodes but id {} appears",
                    seen - 1
                ),
            ))
        }
        Some((declared, _)) => declared,
        None => seen,
    };
    let edges = raw
        .edges
        .into_iter()
        .map(|(s, d, w)| (s as NodeId, d as NodeId, w))
        .collect::<Vec<_>>();
    for &(s, d, w) in &edges {
        check_edge(n, s as u64, d as u64, w)?;
    }
    Ok(Graph::from_checked(n, edges))
}

/// Reads an edge list with arbitrary (sparse) ids and compacts them.
///
/// Returns the graph plus the original id of every dense node, in
/// ascending order of original id. A `# nodes` header is ignored.
pub fn read_edge_list_remapped<R: BufRead>(reader: R) -> Result<(Graph, Vec<u64>)> {
    let raw = parse(reader)?;
    let mut ids: BTreeMap<u64, NodeId> = BTreeMap::new();
    for &(s, d, _) in &raw.edges {
        ids.insert(s, 0);
        ids.insert(d, 0);
    }
    for (dense, slot) in ids.values_mut().enumerate() {
        *slot = dense as NodeId;
    }
    let edges = raw
        .edges
        .iter()
        .map(|&(s, d, w)| (ids[&s], ids[&d], w))
        .collect();
    let original = ids.keys().copied().collect();
    Ok((Graph::from_checked(ids.len(), edges), original))
}

/// Writes `graph` as `src dst weight` lines sorted by `(src, dst)`, weights
/// printed with 17 significant digits. `comments` are emitted first, each
/// prefixed with `# `, followed by the `# nodes N` header.
pub fn write_edge_list<W: Write>(graph: &Graph, comments: &[String], mut out: W) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "# nodes {}", graph.node_count())?;
    for (s, d, w) in graph.edges() {
        writeln!(out, "{s} {d} {}", format_g17(w))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn read(text: &str) -> Result<Graph> {
        read_edge_list(text.as_bytes())
    }

    #[test]
    fn single_weighted_edge() {
        let g = read("0 1 2.5").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 2.5)]);
    }

    #[test]
    fn default_weight_and_merge() {
        let g = read("0 1\n0 1").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 2.0)]);
    }

    #[test]
    fn rejects_nonpositive_weight_with_line() {
        let err = read("0 1 -3").unwrap_err();
        assert!(
            matches!(err, Error::Parse { line: 1, ref message } if message.contains("nonpositive"))
        );
        let err = read("# c\n0 1 1\n1 0 0").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn rejects_bad_ids_and_weights() {
        assert!(matches!(read("0 x 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read("-1 0 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read("0 1.5 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read("0 1 inf"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read("0 1 NaN"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read("0"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn nodes_header_adds_isolated_nodes() {
        let g = read("# nodes 5\n0 1\n").unwrap();
        assert_eq!(g.node_count(), 5);
        assert!(read("# nodes 1\n0 1\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let g = read("# hello\n\n  \n1 0 3\n# bye").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 0, 3.0)]);
    }

    #[test]
    fn remapping_compacts_sparse_ids() {
        let (g, ids) = read_edge_list_remapped("100 7 1\n7 42 2".as_bytes()).unwrap();
        assert_eq!(ids, vec![7, 42, 100]);
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 1, 2.0), (2, 0, 1.0)]
        );
    }

    #[test]
    fn writer_format_is_exact() {
        let g = Graph::from_edges(3, [(1, 0, 0.1), (0, 1, 1.0), (0, 0, 2.5)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &["seed=1".to_string()], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# seed=1\n# nodes 3\n0 0 2.5\n0 1 1\n1 0 0.10000000000000001\n"
        );
    }

    fn arb_edges() -> impl Strategy<Value = (usize, Vec<(u32, u32, f64)>)> {
        (1usize..20).prop_flat_map(|n| {
            let edge = (0..n as u32, 0..n as u32, 1e-6f64..1e6);
            (Just(n), proptest::collection::vec(edge, 0..60))
        })
    }

    proptest! {
        #[test]
        fn write_read_round_trip((n, edges) in arb_edges()) {
            let g = Graph::from_edges(n, edges).unwrap();
            let mut buf = Vec::new();
            write_edge_list(&g, &[], &mut buf).unwrap();
            let back = read_edge_list(&buf[..]).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
