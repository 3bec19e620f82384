//! Text formats: `.khg` instances, `.part` bipartition sidecars and the
//! regular-partition debug dump. All vertex ids on disk are 1-based.
//!
//! ```text
//! khg 1
//! <k> <n> <m>
//! <v1> <v2> ... <vk>      (m lines, strictly increasing)
//! ```
//!
//! A `.part` file has exactly two lines, `X: i1 i2 ...` and `Y: j1 j2 ...`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hypergraph::{Bipartition, Hypergraph, Side, Vertex};
use crate::regularity::{ClusterGraph, EquitablePartition};

pub const KHG_MAGIC: &str = "khg";
pub const KHG_VERSION: u32 = 1;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Splits on single spaces; empty fields (double spaces, leading or trailing
/// spaces) are malformed.
fn fields(line: &str, lineno: usize) -> Result<Vec<&str>> {
    let parts: Vec<&str> = line.split(' ').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(parse_err(lineno, "fields must be separated by single spaces"));
    }
    Ok(parts)
}

fn parse_num(field: &str, lineno: usize, what: &str) -> Result<usize> {
    field
        .parse::<usize>()
        .map_err(|_| parse_err(lineno, format!("invalid {what} `{field}`")))
}

pub fn parse_khg(text: &str) -> Result<Hypergraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let head = fields(header, 1)?;
    if head.len() != 2 || head[0] != KHG_MAGIC {
        return Err(parse_err(1, "expected header `khg 1`"));
    }
    if head[1] != KHG_VERSION.to_string() {
        return Err(parse_err(1, format!("unsupported version `{}`", head[1])));
    }
    let (lineno, sizes) = lines.next().ok_or_else(|| parse_err(2, "missing `k n m` line"))?;
    let sizes = fields(sizes, lineno)?;
    if sizes.len() != 3 {
        return Err(parse_err(lineno, "expected `k n m`"));
    }
    let k = parse_num(sizes[0], lineno, "k")?;
    let n = parse_num(sizes[1], lineno, "n")?;
    let m = parse_num(sizes[2], lineno, "m")?;
    if k < 2 {
        return Err(parse_err(lineno, format!("k = {k} is below 2")));
    }
    if n < k {
        return Err(parse_err(lineno, format!("n = {n} is smaller than k = {k}")));
    }

    let mut edges: Vec<Vec<Vertex>> = Vec::with_capacity(m);
    let mut seen = std::collections::HashMap::with_capacity(m);
    for (lineno, line) in lines.by_ref() {
        if edges.len() == m {
            if line.is_empty() {
                continue;
            }
            return Err(parse_err(lineno, format!("more than the declared {m} edges")));
        }
        let parts = fields(line, lineno)?;
        if parts.len() != k {
            return Err(parse_err(lineno, format!("expected {k} vertices, found {}", parts.len())));
        }
        let mut edge = Vec::with_capacity(k);
        for p in parts {
            let v = parse_num(p, lineno, "vertex")?;
            if v == 0 || v > n {
                return Err(parse_err(lineno, format!("vertex {v} out of range 1..={n}")));
            }
            if edge.last().is_some_and(|&prev| prev >= v) {
                return Err(parse_err(lineno, "vertices must be strictly increasing"));
            }
            edge.push(v);
        }
        if let Some(first) = seen.insert(edge.clone(), lineno) {
            return Err(parse_err(lineno, format!("duplicate of the edge on line {first}")));
        }
        edges.push(edge);
    }
    if edges.len() != m {
        return Err(parse_err(edges.len() + 3, format!("expected {m} edges, found {}", edges.len())));
    }
    Hypergraph::from_one_based(n, k, edges)
}

pub fn write_khg(h: &Hypergraph) -> String {
    let mut out = String::with_capacity(16 + h.num_edges() * h.k() * 4);
    let _ = writeln!(out, "{KHG_MAGIC} {KHG_VERSION}");
    let _ = writeln!(out, "{} {} {}", h.k(), h.n(), h.num_edges());
    for e in h.edges() {
        for (i, &v) in e.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", v + 1);
        }
        out.push('\n');
    }
    out
}

pub fn parse_part(text: &str, n: usize) -> Result<Bipartition> {
    let mut labels: Vec<Option<Side>> = vec![None; n];
    let mut seen_sides = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(lineno, "expected `X:` or `Y:`"))?;
        let side = match tag {
            "X" => Side::X,
            "Y" => Side::Y,
            other => return Err(parse_err(lineno, format!("unknown side `{other}`"))),
        };
        if seen_sides.contains(&side) {
            return Err(parse_err(lineno, format!("side {tag} listed twice")));
        }
        seen_sides.push(side);
        for field in rest.split_whitespace() {
            let v = parse_num(field, lineno, "vertex")?;
            if v == 0 || v > n {
                return Err(parse_err(lineno, format!("vertex {v} out of range 1..={n}")));
            }
            if labels[v - 1].replace(side).is_some() {
                return Err(parse_err(lineno, format!("vertex {v} assigned twice")));
            }
        }
    }
    if let Some(v) = labels.iter().position(Option::is_none) {
        return Err(parse_err(0, format!("vertex {} has no side", v + 1)));
    }
    Ok(Bipartition::from_labels(labels.into_iter().map(Option::unwrap).collect()))
}

fn join_one_based(vs: &[Vertex]) -> String {
    vs.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_part(p: &Bipartition) -> String {
    let mut out = String::new();
    for (tag, side) in [("X", Side::X), ("Y", Side::Y)] {
        let members = p.members(side);
        if members.is_empty() {
            let _ = writeln!(out, "{tag}:");
        } else {
            let _ = writeln!(out, "{tag}: {}", join_one_based(&members));
        }
    }
    out
}

/// `class <id>: v1 v2 ...` lines then `regular: i j` lines, ids 1-based.
/// `to_original` maps partition vertices back to hypergraph vertices.
pub fn write_partition_dump(
    partition: &EquitablePartition,
    cluster: &ClusterGraph,
    to_original: &[Vertex],
) -> String {
    let mut out = String::new();
    for (id, class) in partition.classes().iter().enumerate() {
        let members: Vec<Vertex> = class.iter().map(|&v| to_original[v]).collect();
        let _ = writeln!(out, "class {}: {}", id + 1, join_one_based(&members));
    }
    for &(i, j) in cluster.regular_pairs() {
        let _ = writeln!(out, "regular: {} {}", i + 1, j + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::fano_plane;

    #[test]
    fn khg_roundtrip_on_fano() {
        let f = fano_plane();
        let text = write_khg(&f);
        assert!(text.starts_with("khg 1\n3 7 7\n1 2 3\n"));
        assert_eq!(parse_khg(&text).unwrap(), f);
    }

    #[test]
    fn khg_rejects_malformed_input_with_line_numbers() {
        let dup = "khg 1\n3 4 2\n1 2 3\n1 2 3\n";
        assert!(matches!(parse_khg(dup), Err(Error::Parse { line: 4, .. })));
        let unsorted = "khg 1\n3 4 1\n2 1 3\n";
        assert!(matches!(parse_khg(unsorted), Err(Error::Parse { line: 3, .. })));
        let double_space = "khg 1\n3 4 1\n1  2 3\n";
        assert!(matches!(parse_khg(double_space), Err(Error::Parse { line: 3, .. })));
        let range = "khg 1\n3 4 1\n1 2 5\n";
        assert!(matches!(parse_khg(range), Err(Error::Parse { line: 3, .. })));
        let short = "khg 1\n3 4 2\n1 2 3\n";
        assert!(matches!(parse_khg(short), Err(Error::Parse { .. })));
        let extra = "khg 1\n3 4 1\n1 2 3\n1 2 4\n";
        assert!(matches!(parse_khg(extra), Err(Error::Parse { line: 4, .. })));
        assert!(matches!(parse_khg("khg 2\n3 4 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_khg("khg 1\n3 4\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_khg("khg 1\n3 4 0\n").unwrap().num_edges() == 0);
    }

    #[test]
    fn part_roundtrip_and_errors() {
        let p = Bipartition::from_x_members(5, [0, 3]);
        let text = write_part(&p);
        assert_eq!(text, "X: 1 4\nY: 2 3 5\n");
        assert_eq!(parse_part(&text, 5).unwrap(), p);
        assert!(parse_part("X: 1 2\nY: 2 3\n", 3).is_err());
        assert!(parse_part("X: 1\nY: 2\n", 3).is_err());
        assert!(parse_part("Z: 1\n", 1).is_err());
        assert_eq!(parse_part("X:\nY: 1 2\n", 2).unwrap().sizes(), (0, 2));
    }
}
