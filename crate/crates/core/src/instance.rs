//! Plain-text instance files.
//!
//! ```text
//! # comment
//! n m
//! <vertex> <num/den>     (n lines)
//! <u> <v>                (m lines)
//! ```
//!
//! Anything after `#` on a line is ignored. Integers may omit `/1`.

use std::fmt::Write as _;

use crate::{EmbeddedGraph, Error, Graph, Rational};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize, Error> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, found {tok:?}")))
}

pub fn read_instance(text: &str) -> Result<EmbeddedGraph, Error> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(parse_err(hline, "header must be \"n m\""));
    }
    let n = parse_usize(toks[0], hline)?;
    let m = parse_usize(toks[1], hline)?;

    let mut positions: Vec<Option<Rational>> = vec![None; n];
    for k in 0..n {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(hline, format!("expected {n} position lines, found {k}")))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(ln, "position line must be \"vertex value\""));
        }
        let v = parse_usize(toks[0], ln)?;
        if v >= n {
            return Err(parse_err(ln, format!("vertex {v} out of range for {n} vertices")));
        }
        let p: Rational = toks[1]
            .parse()
            .map_err(|e: Error| parse_err(ln, e.to_string()))?;
        if positions[v].is_some() {
            return Err(parse_err(ln, format!("vertex {v} given twice")));
        }
        positions[v] = Some(p);
    }

    let mut edges = Vec::with_capacity(m);
    for k in 0..m {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(hline, format!("expected {m} edge lines, found {k}")))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(ln, "edge line must be \"u v\""));
        }
        let u = parse_usize(toks[0], ln)?;
        let v = parse_usize(toks[1], ln)?;
        if u >= n || v >= n {
            return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
        }
        edges.push((u, v));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing content"));
    }

    let graph = Graph::new(n, edges)?;
    let positions = positions.into_iter().map(|p| p.expect("all set")).collect();
    EmbeddedGraph::new(graph, positions)
}

pub fn write_instance(eg: &EmbeddedGraph) -> String {
    write_instance_with_header(eg, &[])
}

/// Like [`write_instance`], prefixed with `# ` comment lines.
pub fn write_instance_with_header(eg: &EmbeddedGraph, comments: &[String]) -> String {
    let g = eg.graph();
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{} {}", g.vertex_count(), g.edge_count());
    for (v, p) in eg.positions().iter().enumerate() {
        let _ = writeln!(out, "{v} {p}");
    }
    for &(a, b) in g.edges() {
        let _ = writeln!(out, "{a} {b}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P3: &str = "3 2\n0 0/1\n1 1/1\n2 3/1\n0 1\n1 2\n";

    #[test]
    fn reads_path_instance() {
        let eg = read_instance(P3).unwrap();
        assert_eq!(eg.graph(), &Graph::path(3));
        assert_eq!(eg.positions(), &[Rational::from(0), Rational::from(1), Rational::from(3)]);
        assert_eq!(write_instance(&eg), "3 2\n0 0\n1 1\n2 3\n0 1\n1 2\n");
    }

    #[test]
    fn comments_and_order() {
        let text = "# header\n2 1 # sizes\n1 5/2\n0 0\n\n1 0 # edge\n";
        let eg = read_instance(text).unwrap();
        assert_eq!(eg.position(1), &Rational::new(5, 2).unwrap());
        assert_eq!(eg.graph().edges(), &[(0, 1)]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = read_instance("2 1\n0 0\n1 x\n0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = read_instance("2 1\n0 0\n1 1\n0 2\n").unwrap_err();
        assert!(matches!(err, Error::VertexOutOfRange { vertex: 2, n: 2 }));
        let err = read_instance("2 0\n0 4\n1 4\n").unwrap_err();
        assert!(matches!(err, Error::DuplicatePosition { .. }));
        let err = read_instance("2 1\n0 0\n1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn hypercube_round_trip() {
        let cube = Graph::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let eg = EmbeddedGraph::from_integers(cube, &[0, 1, 3, 4]).unwrap();
        let text = write_instance(&eg);
        assert_eq!(read_instance(&text).unwrap(), eg);
    }

    proptest! {
        #[test]
        fn round_trip_is_byte_identical(
            n in 1usize..9,
            raw in proptest::collection::vec((-50i64..50, 1i64..7), 9),
            bits in proptest::collection::vec(any::<bool>(), 36),
        ) {
            let mut pos: Vec<Rational> = Vec::new();
            for &(a, b) in raw.iter().take(n) {
                let mut p = Rational::new(a, b).unwrap();
                while pos.contains(&p) {
                    p = p + Rational::from(101);
                }
                pos.push(p);
            }
            let mut edges = Vec::new();
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if bits[k] { edges.push((a, b)); }
                    k += 1;
                }
            }
            let eg = EmbeddedGraph::new(Graph::new(n, edges).unwrap(), pos).unwrap();
            let once = write_instance(&eg);
            let back = read_instance(&once).unwrap();
            prop_assert_eq!(&back, &eg);
            prop_assert_eq!(write_instance(&back), once);
        }
    }
}
