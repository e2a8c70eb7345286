//! Plain-text file formats.
//!
//! * Trace: header `n=<int> m=<int>` (plus `mode=search` for root-originated
//!   search traces), then one `src dst` pair per line.
//! * Demand graph: optional header `n=<int>`, then `src dst weight` lines.
//!   Without a header, `n` is one more than the largest node id.
//! * Network: header line `n`, then one `u v` edge per line.
//!
//! Blank lines and lines starting with `#` are skipped everywhere.

use crate::demand::{Addressing, CommRequest, DemandGraph, DemandSequence};
use crate::error::{Error, Result};
use crate::topo::{Family, Network};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| perr(line, format!("invalid {what} `{tok}`")))
}

fn header_value(line: usize, tok: &str, key: &str) -> Result<usize> {
    let v = tok
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| perr(line, format!("expected `{key}=<int>`, found `{tok}`")))?;
    num(line, v, key)
}

pub fn write_trace(seq: &DemandSequence) -> String {
    let mut s = format!("n={} m={}", seq.n(), seq.len());
    if seq.addressing() == Addressing::Search {
        s.push_str(" mode=search");
    }
    s.push('\n');
    for r in seq.requests() {
        s.push_str(&format!("{} {}\n", r.src, r.dst));
    }
    s
}

pub fn is_trace(text: &str) -> bool {
    content_lines(text)
        .next()
        .is_some_and(|(_, l)| l.starts_with("n=") && l.contains("m="))
}

pub fn read_trace(text: &str) -> Result<DemandSequence> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| perr(1, "missing trace header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 2 || toks.len() > 3 {
        return Err(perr(hl, "expected header `n=<int> m=<int>`"));
    }
    let n = header_value(hl, toks[0], "n")?;
    let m = header_value(hl, toks[1], "m")?;
    let addressing = match toks.get(2) {
        None | Some(&"mode=pairs") => Addressing::Pairs,
        Some(&"mode=search") => Addressing::Search,
        Some(t) => return Err(perr(hl, format!("unknown header field `{t}`"))),
    };
    let mut requests = Vec::with_capacity(m);
    let mut last = hl;
    for (ln, l) in lines {
        last = ln;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(perr(ln, "expected `src dst`"));
        }
        let req = CommRequest::new(num(ln, toks[0], "source")?, num(ln, toks[1], "destination")?);
        addressing
            .check(n, req)
            .map_err(|e| perr(ln, e.to_string()))?;
        requests.push(req);
    }
    if requests.len() != m {
        return Err(perr(
            last,
            format!("header declares m={m} but {} requests follow", requests.len()),
        ));
    }
    DemandSequence::new(n, addressing, requests)
}

pub fn write_graph(g: &DemandGraph) -> String {
    let mut s = format!("n={}\n", g.n());
    for (u, v, w) in g.edges() {
        s.push_str(&format!("{u} {v} {w}\n"));
    }
    s
}

pub fn read_graph(text: &str) -> Result<DemandGraph> {
    let mut n_decl = None;
    let mut rows = Vec::new();
    for (ln, l) in content_lines(text) {
        if l.starts_with("n=") {
            if n_decl.is_some() || !rows.is_empty() {
                return Err(perr(ln, "header must come first"));
            }
            n_decl = Some(header_value(ln, l, "n")?);
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(perr(ln, "expected `src dst weight`"));
        }
        let u: usize = num(ln, toks[0], "source")?;
        let v: usize = num(ln, toks[1], "destination")?;
        let w: f64 = num(ln, toks[2], "weight")?;
        rows.push((ln, u, v, w));
    }
    if rows.is_empty() {
        return Err(Error::EmptyDemand);
    }
    let n = n_decl.unwrap_or_else(|| rows.iter().map(|r| r.1.max(r.2)).max().unwrap() + 1);
    let mut g = DemandGraph::empty(n);
    for (ln, u, v, w) in rows {
        g.add(u, v, w).map_err(|e| perr(ln, e.to_string()))?;
    }
    Ok(g)
}

pub fn write_network(net: &Network) -> String {
    let mut s = format!("{}\n", net.n());
    for (u, v) in net.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

/// Reads a network; the family is not part of the format and is supplied.
pub fn read_network(text: &str, family: Family) -> Result<Network> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| perr(1, "missing node count"))?;
    let n: usize = num(hl, header, "node count")?;
    let mut edges = Vec::new();
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(perr(ln, "expected `u v`"));
        }
        edges.push((num(ln, toks[0], "node")?, num(ln, toks[1], "node")?));
    }
    Network::new(n, edges, family)
}
