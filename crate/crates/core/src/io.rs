//! Text formats shared by every CLI subcommand.
//!
//! Graphs and digraphs use the same edge-list layout: line 1 is `n m`,
//! followed by m lines `u v` with 0-indexed endpoints, ASCII, LF-terminated.
//! Lines starting with `#` are comments.

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::graph::Graph;

fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("missing header line".into()))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header: {header:?}")))?;
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header: {header:?}")))?;
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let mut it = line.split_whitespace();
        let u: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?;
        let v: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?;
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!("header claims {m} edges, found {}", edges.len())));
    }
    Ok((n, edges))
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let (n, edges) = parse_edge_list(text)?;
    Graph::from_edges(n, &edges)
}

pub fn write_graph(g: &Graph) -> String {
    let edges = g.edges();
    let mut out = format!("{} {}\n", g.n(), edges.len());
    for (u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_digraph(text: &str) -> Result<Digraph> {
    let (n, edges) = parse_edge_list(text)?;
    Digraph::from_edges(n, &edges)
}

pub fn write_digraph(d: &Digraph) -> String {
    let edges = d.edges();
    let mut out = format!("{} {}\n", d.n(), edges.len());
    for (u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Builtin pattern names accepted wherever a graph file is expected:
/// `k<r>` complete, `c<n>` cycle, `p<n>` path, `star<t>`, `petersen`,
/// `k<a>_<b>_...` complete multipartite, `bottle<k>_<sigma>_<omega>`,
/// `kx<r>_<s>` for K_r(s).
pub fn parse_graph_spec(spec: &str) -> Result<Graph> {
    let s = spec.trim().to_ascii_lowercase();
    if s == "petersen" {
        return Ok(Graph::petersen());
    }
    if let Some(rest) = s.strip_prefix("bottle") {
        let parts = split_ints(rest)?;
        if let [k, sigma, omega] = parts[..] {
            return crate::chromatic::bottle_graph(k, sigma, omega);
        }
        return Err(Error::Parse(format!("bottle wants k_sigma_omega: {spec:?}")));
    }
    if let Some(rest) = s.strip_prefix("kx") {
        let parts = split_ints(rest)?;
        if let [r, size] = parts[..] {
            return Graph::complete_multipartite(&vec![size; r]);
        }
        return Err(Error::Parse(format!("kx wants r_s: {spec:?}")));
    }
    if let Some(rest) = s.strip_prefix("star") {
        let parts = split_ints(rest)?;
        if let [t] = parts[..] {
            return Ok(Graph::star(t));
        }
    }
    if let Some(rest) = s.strip_prefix('k') {
        let parts = split_ints(rest)?;
        return match parts[..] {
            [r] => Ok(Graph::complete(r)),
            [] => Err(Error::Parse(format!("unknown graph spec: {spec:?}"))),
            _ => Graph::complete_multipartite(&parts),
        };
    }
    if let Some(rest) = s.strip_prefix('c') {
        let parts = split_ints(rest)?;
        if let [n] = parts[..] {
            return Ok(Graph::cycle(n));
        }
    }
    if let Some(rest) = s.strip_prefix('p') {
        let parts = split_ints(rest)?;
        if let [n] = parts[..] {
            return Ok(Graph::path(n));
        }
    }
    Err(Error::Parse(format!("unknown graph spec: {spec:?}")))
}

fn split_ints(s: &str) -> Result<Vec<usize>> {
    s.split('_')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad integer {t:?}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let g = Graph::cycle(5);
        let text = write_graph(&g);
        assert!(text.starts_with("5 5\n"));
        assert_eq!(read_graph(&text).unwrap(), g);
    }

    #[test]
    fn comments_and_blanks_skipped() {
        let g = read_graph("# a triangle\n3 3\n\n0 1\n1 2\n# middle\n0 2\n").unwrap();
        assert_eq!(g, Graph::complete(3));
    }

    #[test]
    fn bad_inputs_are_parse_errors() {
        assert!(read_graph("").is_err());
        assert!(read_graph("3 2\n0 1\n").is_err());
        assert!(read_graph("2 1\n0 2\n").is_err());
    }

    #[test]
    fn digraph_round_trip() {
        let d = Digraph::from_edges(3, &[(0, 1), (2, 1)]).unwrap();
        assert_eq!(read_digraph(&write_digraph(&d)).unwrap(), d);
    }

    #[test]
    fn spec_names() {
        assert_eq!(parse_graph_spec("k4").unwrap(), Graph::complete(4));
        assert_eq!(parse_graph_spec("c5").unwrap(), Graph::cycle(5));
        assert_eq!(parse_graph_spec("p3").unwrap(), Graph::path(3));
        assert_eq!(
            parse_graph_spec("k1_2_2").unwrap(),
            Graph::complete_multipartite(&[1, 2, 2]).unwrap()
        );
        assert_eq!(
            parse_graph_spec("bottle3_1_2").unwrap(),
            Graph::complete_multipartite(&[1, 2, 2]).unwrap()
        );
        assert_eq!(
            parse_graph_spec("kx3_2").unwrap(),
            Graph::complete_multipartite(&[2, 2, 2]).unwrap()
        );
        assert_eq!(parse_graph_spec("petersen").unwrap(), Graph::petersen());
        assert!(parse_graph_spec("wat").is_err());
    }
}
