use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

/// Renders a graph as `n <count>` followed by one `i j` line per edge.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.n());
    for &(i, j) in g.edges() {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty edge list".into()))?;
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["n", count] => count
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad vertex count {count:?}: {e}")))?,
        _ => {
            return Err(Error::Parse(format!(
                "expected `n <count>`, got {header:?}"
            )))
        }
    };

    let mut edges = Vec::new();
    for (lineno, line) in lines {
        let parts: Vec<_> = line.split_whitespace().collect();
        let [a, b] = parts.as_slice() else {
            return Err(Error::Parse(format!("line {}: expected `i j`", lineno + 1)));
        };
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Parse(format!("line {}: bad vertex {s:?}: {e}", lineno + 1)))
        };
        edges.push((parse(a)?, parse(b)?));
    }
    Graph::from_edges(n, edges)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text)
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_edge_list(g)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_cycle;

    #[test]
    fn round_trip() {
        let g = build_cycle(6).unwrap();
        let text = format_edge_list(&g);
        assert!(text.starts_with("n 6\n0 1\n0 5\n"));
        assert_eq!(parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_edge_list("").is_err());
        assert!(parse_edge_list("m 3\n0 1\n").is_err());
        assert!(parse_edge_list("n 3\n0 1 2\n").is_err());
        assert!(parse_edge_list("n 3\n0 0\n").is_err());
        assert!(parse_edge_list("n 3\n0 1\n1 0\n").is_err());
        assert!(parse_edge_list("n 3\n0 x\n").is_err());
    }
}
