//! Whitespace-separated text formats.
//!
//! Hypergraph: a header `k n m` followed by `m` lines of `k` vertex ids.
//! System: a header `k s t n` followed by `t*n` blocks, each a line
//! `color c m_c` and then `m_c` edge lines. Blank lines and lines starting
//! with `#` are ignored. Repeated edges are merged and counted.

use std::fmt::Write as _;

use super::hypergraph::Hypergraph;
use super::system::HypergraphSystem;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub duplicate_edges: usize,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            line: 0,
        }
    }

    fn next_tokens(&mut self) -> Result<Vec<&'a str>> {
        for (i, raw) in self.inner.by_ref() {
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            self.line = i + 1;
            return Ok(l.split_whitespace().collect());
        }
        Err(Error::Parse {
            line: self.line + 1,
            msg: "unexpected end of input".into(),
        })
    }

    fn numbers(&mut self, expect: usize) -> Result<Vec<usize>> {
        let toks = self.next_tokens()?;
        self.parse_all(&toks, expect)
    }

    fn parse_all(&self, toks: &[&str], expect: usize) -> Result<Vec<usize>> {
        if toks.len() != expect {
            return Err(self.err(format!("expected {} fields, found {}", expect, toks.len())));
        }
        toks.iter()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| self.err(format!("'{}' is not a non-negative integer", t)))
            })
            .collect()
    }

    fn err(&self, msg: String) -> Error {
        Error::Parse {
            line: self.line,
            msg,
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        match self.next_tokens() {
            Ok(_) => Err(self.err("trailing data after last block".into())),
            Err(_) => Ok(()),
        }
    }
}

fn read_edges(
    lines: &mut Lines,
    h: &mut Hypergraph,
    m: usize,
    stats: &mut ParseStats,
) -> Result<()> {
    for _ in 0..m {
        let e = lines.numbers(h.k())?;
        match h.insert(&e) {
            Ok(true) => {}
            Ok(false) => stats.duplicate_edges += 1,
            Err(Error::Parameter(msg)) => return Err(lines.err(msg)),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

pub fn parse_hypergraph(text: &str) -> Result<(Hypergraph, ParseStats)> {
    let mut lines = Lines::new(text);
    let hdr = lines.numbers(3)?;
    let (k, n, m) = (hdr[0], hdr[1], hdr[2]);
    let mut h = Hypergraph::new(k, n).map_err(|e| lines.err(e.to_string()))?;
    let mut stats = ParseStats::default();
    read_edges(&mut lines, &mut h, m, &mut stats)?;
    lines.expect_end()?;
    if stats.duplicate_edges > 0 {
        log::warn!("merged {} duplicate edges", stats.duplicate_edges);
    }
    Ok((h, stats))
}

pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("{} {} {}\n", h.k(), h.n(), h.edge_count());
    for e in h.edges() {
        write_edge(&mut out, e);
    }
    out
}

pub fn parse_system(text: &str) -> Result<(HypergraphSystem, ParseStats)> {
    let mut lines = Lines::new(text);
    let hdr = lines.numbers(4)?;
    let (k, s, t, n) = (hdr[0], hdr[1], hdr[2], hdr[3]);
    if k == 0 || s == 0 || t == 0 || n == 0 {
        return Err(lines.err("k, s, t and n must be positive".into()));
    }
    let mut colors = vec![Hypergraph::new(k, s * n)?; t * n];
    let mut seen = vec![false; t * n];
    let mut stats = ParseStats::default();
    for _ in 0..t * n {
        let toks = lines.next_tokens()?;
        if toks.first() != Some(&"color") {
            return Err(lines.err("expected a 'color c m_c' block header".into()));
        }
        let nums = lines.parse_all(&toks[1..], 2)?;
        let (c, m) = (nums[0], nums[1]);
        if c >= t * n || seen[c] {
            return Err(lines.err(format!("color {} out of range or repeated", c)));
        }
        seen[c] = true;
        read_edges(&mut lines, &mut colors[c], m, &mut stats)?;
    }
    lines.expect_end()?;
    if stats.duplicate_edges > 0 {
        log::warn!("merged {} duplicate edges", stats.duplicate_edges);
    }
    Ok((HypergraphSystem::new(k, s, t, n, colors)?, stats))
}

pub fn write_system(sys: &HypergraphSystem) -> String {
    let mut out = format!("{} {} {} {}\n", sys.k(), sys.s(), sys.t(), sys.n());
    for (c, h) in sys.colors().iter().enumerate() {
        let _ = writeln!(out, "color {} {}", c, h.edge_count());
        for e in h.edges() {
            write_edge(&mut out, e);
        }
    }
    out
}

fn write_edge(out: &mut String, e: &[usize]) {
    for (i, v) in e.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{}", v);
    }
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypergraph_round_trip_with_duplicates() {
        let text = "# triangle\n2 3 4\n0 1\n1 2\n\n2 0\n1 0\n";
        let (h, stats) = parse_hypergraph(text).unwrap();
        assert_eq!(h.edge_count(), 3);
        assert_eq!(stats.duplicate_edges, 1);
        let again = parse_hypergraph(&write_hypergraph(&h)).unwrap().0;
        assert_eq!(again, h);
    }

    #[test]
    fn system_round_trip() {
        let sys = HypergraphSystem::complete(2, 2, 1, 2).unwrap();
        let text = write_system(&sys);
        assert_eq!(parse_system(&text).unwrap().0, sys);
    }

    #[test]
    fn reports_line_numbers() {
        match parse_hypergraph("2 3 2\n0 1\n0 5\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {:?}", other),
        }
        assert!(parse_hypergraph("2 3 2\n0 1\n").is_err());
        assert!(parse_hypergraph("2 3 1\n0 1\n1 2\n").is_err());
        assert!(parse_system("2 2 1 1\ncolor 0 0\n").is_ok());
        assert!(parse_system("2 2 1 1\ncolour 0 0\n").is_err());
    }
}
