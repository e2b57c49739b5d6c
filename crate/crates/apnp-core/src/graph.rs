//! Graph model, the text codec, and the weight-to-code ranking every solver
//! shares.
//!
//! Graph files are line oriented:
//!
//! ```text
//! n m directed|undirected [multi|distinct]
//! src dst weight            (m lines, 0-based vertex ids, i64 weight)
//! ```
//!
//! `multi` admits parallel edges; `distinct` keeps the simple-graph rule and
//! additionally rejects repeated weights at parse time. Self-loops are never
//! legal: a loop either breaks non-decrease immediately or is subsumed by the
//! closed-walk semantics of the diagonal.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const NO_EDGE: u32 = u32::MAX;
const ABSENT: i64 = i64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
    pub weight: i64,
}

impl Edge {
    /// Endpoint reached when arriving at `v` along this edge; for undirected
    /// edges either endpoint can play that role.
    pub fn other(&self, v: u32) -> u32 {
        debug_assert!(v == self.src || v == self.dst);
        self.src ^ self.dst ^ v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: u32,
    directed: bool,
    multi: bool,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: u32, directed: bool) -> Self {
        Graph { n, directed, multi: false, edges: Vec::new() }
    }

    pub fn new_multi(n: u32, directed: bool) -> Self {
        Graph { n, directed, multi: true, edges: Vec::new() }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.edges.len() as u32
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn multi(&self) -> bool {
        self.multi
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: u32) -> Edge {
        self.edges[id as usize]
    }

    /// Appends an edge, returning its id. Panics on bad endpoints; parallel
    /// edges are only policed by `parse_graph`, builders that care use
    /// `multi` accordingly.
    pub fn add_edge(&mut self, src: u32, dst: u32, weight: i64) -> u32 {
        assert!(src < self.n && dst < self.n, "endpoint out of range");
        assert!(src != dst, "self-loops are not allowed");
        assert!(weight < ABSENT, "weight reserved as the absent marker");
        self.edges.push(Edge { src, dst, weight });
        (self.edges.len() - 1) as u32
    }

    pub fn has_duplicate_weights(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().any(|e| !seen.insert(e.weight))
    }
}

fn pair_key(directed: bool, src: u32, dst: u32) -> (u32, u32) {
    if directed || src <= dst {
        (src, dst)
    } else {
        (dst, src)
    }
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 3 || fields.len() > 4 {
        return Err(err(1, "header wants: n m directed|undirected [multi|distinct]"));
    }
    let n: u32 = fields[0].parse().map_err(|_| err(1, "bad vertex count"))?;
    let m: u32 = fields[1].parse().map_err(|_| err(1, "bad edge count"))?;
    let directed = match fields[2] {
        "directed" => true,
        "undirected" => false,
        _ => return Err(err(1, "orientation must be directed or undirected")),
    };
    let (multi, want_distinct) = match fields.get(3).copied() {
        None => (false, false),
        Some("multi") => (true, false),
        Some("distinct") => (false, true),
        Some(_) => return Err(err(1, "trailing token must be multi or distinct")),
    };

    let mut g = Graph { n, directed, multi, edges: Vec::with_capacity(m as usize) };
    let mut pairs = BTreeSet::new();
    let mut weights = BTreeSet::new();
    let mut count = 0u32;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(err(lineno, "edge wants: src dst weight"));
        }
        if count == m {
            return Err(err(lineno, "more edges than the header promised"));
        }
        let src: u32 = parts[0].parse().map_err(|_| err(lineno, "bad source id"))?;
        let dst: u32 = parts[1].parse().map_err(|_| err(lineno, "bad destination id"))?;
        let weight: i64 = parts[2].parse().map_err(|_| err(lineno, "bad weight"))?;
        if src >= n || dst >= n {
            return Err(err(lineno, "endpoint out of range"));
        }
        if src == dst {
            return Err(err(lineno, "self-loops are not allowed"));
        }
        if weight == ABSENT {
            return Err(err(lineno, "weight reserved as the absent marker"));
        }
        if !multi && !pairs.insert(pair_key(directed, src, dst)) {
            return Err(err(lineno, "parallel edge in a simple graph"));
        }
        if want_distinct && !weights.insert(weight) {
            return Err(Error::DuplicateWeight { weight });
        }
        g.edges.push(Edge { src, dst, weight });
        count += 1;
    }
    if count != m {
        return Err(err(
            text.lines().count(),
            "fewer edges than the header promised",
        ));
    }
    Ok(g)
}

/// Canonical text form; `parse_graph(&emit_graph(g))` reproduces `g` exactly.
/// The `distinct` parse token is a validation request, not a graph property,
/// so it never reappears on output.
pub fn emit_graph(g: &Graph) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{} {} {}{}\n",
        g.n,
        g.m(),
        if g.directed { "directed" } else { "undirected" },
        if g.multi { " multi" } else { "" },
    ));
    for e in &g.edges {
        out.push_str(&format!("{} {} {}\n", e.src, e.dst, e.weight));
    }
    out
}

/// Graph plus the rank code of every edge: the k-th smallest weight gets code
/// k, stored in `width()` bits. Requires pairwise distinct weights; ranking
/// is where that contract is enforced once for everyone downstream.
#[derive(Debug, Clone)]
pub struct RankedGraph {
    graph: Graph,
    width: u32,
    codes: Vec<u32>,
    by_code: Vec<u32>,
}

pub fn rank_weights(graph: Graph) -> Result<RankedGraph> {
    let m = graph.m();
    let mut by_code: Vec<u32> = (0..m).collect();
    by_code.sort_unstable_by_key(|&e| graph.edge(e).weight);
    for w in by_code.windows(2) {
        let (a, b) = (graph.edge(w[0]).weight, graph.edge(w[1]).weight);
        if a == b {
            return Err(Error::DuplicateWeight { weight: a });
        }
    }
    let mut codes = alloc::vec![0u32; m as usize];
    for (code, &e) in by_code.iter().enumerate() {
        codes[e as usize] = code as u32;
    }
    let width = if m <= 1 { 1 } else { (m - 1).ilog2() + 1 };
    Ok(RankedGraph { graph, width, codes, by_code })
}

impl RankedGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> u32 {
        self.graph.n
    }

    pub fn m(&self) -> u32 {
        self.graph.m()
    }

    /// Code width in bits: `max(1, ceil(log2 m))`.
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn code(&self, edge: u32) -> u32 {
        self.codes[edge as usize]
    }

    pub fn edge_with_code(&self, code: u32) -> u32 {
        self.by_code[code as usize]
    }

    pub fn edge(&self, id: u32) -> Edge {
        self.graph.edge(id)
    }

    /// Edge ids in ascending code (= ascending weight) order.
    pub fn edges_by_code(&self) -> &[u32] {
        &self.by_code
    }
}

/// Dense answer matrix. An entry is either absent or a weight plus the id of
/// the final edge of some optimal walk, so results always carry enough to
/// reconstruct a witness path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApnpMatrix {
    n: usize,
    opt: Vec<i64>,
    last: Vec<u32>,
}

impl ApnpMatrix {
    pub fn new(n: u32) -> Self {
        let n = n as usize;
        ApnpMatrix {
            n,
            opt: alloc::vec![ABSENT; n * n],
            last: alloc::vec![NO_EDGE; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn opt(&self, i: u32, j: u32) -> Option<i64> {
        let v = self.opt[self.n * i as usize + j as usize];
        (v != ABSENT).then_some(v)
    }

    pub fn last_edge(&self, i: u32, j: u32) -> Option<u32> {
        let e = self.last[self.n * i as usize + j as usize];
        (e != NO_EDGE).then_some(e)
    }

    pub fn set(&mut self, i: u32, j: u32, weight: i64, last_edge: u32) {
        debug_assert!(weight != ABSENT && last_edge != NO_EDGE);
        let p = self.n * i as usize + j as usize;
        self.opt[p] = weight;
        self.last[p] = last_edge;
    }

    /// Keeps the smaller weight; ties keep the incumbent.
    pub fn set_min(&mut self, i: u32, j: u32, weight: i64, last_edge: u32) {
        let p = self.n * i as usize + j as usize;
        if weight < self.opt[p] {
            self.opt[p] = weight;
            self.last[p] = last_edge;
        }
    }

    pub fn present(&self) -> usize {
        self.opt.iter().filter(|&&v| v != ABSENT).count()
    }

    /// Present entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, i64, u32)> + '_ {
        let n = self.n;
        self.opt
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != ABSENT)
            .map(move |(p, &v)| ((p / n) as u32, (p % n) as u32, v, self.last[p]))
    }

    /// Same optimum everywhere; witness edges may differ.
    pub fn same_values(&self, other: &ApnpMatrix) -> bool {
        self.n == other.n && self.opt == other.opt
    }
}

/// Sparse rows `i j weight` for present entries, row-major. With `dense` set,
/// all n^2 rows appear and absent entries read `inf`.
pub fn emit_result(m: &ApnpMatrix, dense: bool) -> String {
    let mut out = String::new();
    for i in 0..m.n as u32 {
        for j in 0..m.n as u32 {
            match m.opt(i, j) {
                Some(w) => out.push_str(&format!("{i} {j} {w}\n")),
                None if dense => out.push_str(&format!("{i} {j} inf\n")),
                None => {}
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_then_emit_round_trips() {
        let text = "3 3 directed\n0 1 1\n1 2 2\n0 2 5\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 3);
        assert!(g.directed());
        assert_eq!(emit_graph(&g), text);
    }

    #[test]
    fn distinct_token_normalizes_away() {
        let g = parse_graph("2 1 undirected distinct\n0 1 4\n").unwrap();
        assert!(!g.multi());
        assert_eq!(emit_graph(&g), "2 1 undirected\n0 1 4\n");
        let dup = parse_graph("3 2 directed distinct\n0 1 4\n1 2 4\n");
        assert_eq!(dup, Err(Error::DuplicateWeight { weight: 4 }));
    }

    #[test]
    fn multi_round_trips_and_permits_parallels() {
        let text = "2 2 directed multi\n0 1 3\n0 1 7\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(emit_graph(&g), text);
    }

    #[test]
    fn parse_rejections() {
        // (input, why it must fail)
        let cases = [
            ("", "empty"),
            ("2 1 directed\n0 0 3\n", "self-loop"),
            ("2 1 directed\n0 2 3\n", "endpoint range"),
            ("2 2 directed\n0 1 3\n0 1 4\n", "parallel in simple graph"),
            ("2 2 undirected\n0 1 3\n1 0 4\n", "reversed parallel in simple graph"),
            ("2 1 sideways\n0 1 3\n", "orientation word"),
            ("2 1 directed\n", "missing edges"),
            ("2 1 directed\n0 1 3\n1 0 4\n", "surplus edges"),
            ("2 1 directed\n0 1\n", "short edge line"),
            ("2 1 directed maybe\n0 1 3\n", "bad trailing token"),
        ];
        for (text, why) in cases {
            assert!(parse_graph(text).is_err(), "expected rejection: {why}");
        }
    }

    #[test]
    fn reversed_parallel_is_fine_when_directed() {
        assert!(parse_graph("2 2 directed\n0 1 3\n1 0 4\n").is_ok());
    }

    #[test]
    fn blank_lines_are_ignored() {
        let g = parse_graph("2 1 directed\n\n0 1 3\n\n").unwrap();
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn ranking_orders_by_weight() {
        let mut g = Graph::new(3, true);
        g.add_edge(0, 1, 50);
        g.add_edge(1, 2, -10);
        g.add_edge(0, 2, 20);
        let rg = rank_weights(g).unwrap();
        assert_eq!(rg.code(0), 2);
        assert_eq!(rg.code(1), 0);
        assert_eq!(rg.code(2), 1);
        assert_eq!(rg.width(), 2);
        assert_eq!(rg.edges_by_code(), &[1, 2, 0]);
        assert_eq!(rg.edge_with_code(2), 0);
    }

    #[test]
    fn code_width_examples() {
        let mk = |m: u32| {
            // Path graph with m edges and distinct weights.
            let mut g = Graph::new(m + 1, true);
            for i in 0..m {
                g.add_edge(i, i + 1, i as i64);
            }
            rank_weights(g).unwrap().width()
        };
        assert_eq!(mk(1), 1);
        assert_eq!(mk(2), 1);
        assert_eq!(mk(3), 2);
        assert_eq!(mk(4), 2);
        assert_eq!(mk(5), 3);
        assert_eq!(mk(1000), 10);
    }

    #[test]
    fn ranking_rejects_ties() {
        let mut g = Graph::new_multi(3, true);
        g.add_edge(0, 1, 9);
        g.add_edge(1, 2, 9);
        match rank_weights(g) {
            Err(Error::DuplicateWeight { weight: 9 }) => {}
            other => panic!("expected duplicate-weight rejection, got {other:?}"),
        }
    }

    #[test]
    fn matrix_emit_sparse_and_dense() {
        let mut m = ApnpMatrix::new(2);
        m.set(0, 1, 5, 0);
        assert_eq!(emit_result(&m, false), "0 1 5\n");
        assert_eq!(emit_result(&m, true), "0 0 inf\n0 1 5\n1 0 inf\n1 1 inf\n");
        m.set_min(0, 1, 9, 1);
        assert_eq!(m.opt(0, 1), Some(5), "set_min never raises");
        m.set_min(0, 1, 2, 1);
        assert_eq!(m.opt(0, 1), Some(2));
        assert_eq!(m.last_edge(0, 1), Some(1));
        assert_eq!(m.present(), 1);
    }
}
