//! Reference solvers. Deliberately plain: no partitions, no counting
//! products, no shared machinery with the fast solvers, so a disagreement
//! points at exactly one side.
//!
//! `sweep_apnp` is the designated ground truth for directed graphs with
//! distinct weights. `reference_apnp` extends the same idea to repeated
//! weights and undirected inputs and is the yardstick for the tie rewrite.

use alloc::vec::Vec;

use crate::bucket::BucketQueue;
use crate::graph::{ApnpMatrix, Graph, RankedGraph};

/// Flat bitset matrix: row `v` holds one bit per source `s`.
struct Rows {
    words: Vec<u64>,
    stride: usize,
}

impl Rows {
    fn new(rows: usize, bits: usize) -> Self {
        let stride = bits.div_ceil(64);
        Rows { words: alloc::vec![0u64; rows * stride], stride }
    }

    fn set(&mut self, v: usize, s: usize) {
        self.words[v * self.stride + s / 64] |= 1u64 << (s % 64);
    }

    /// Bits of `(row(u) | extra_bit) & !row(v)`, i.e. sources that arrive at
    /// `v` for the first time along an edge `u -> v`. `extra` is `u` itself:
    /// a walk may start at `u`.
    fn fresh(&self, u: usize, extra: usize, v: usize) -> Vec<(usize, u64)> {
        let mut out = Vec::new();
        for i in 0..self.stride {
            let mut mask = self.words[u * self.stride + i];
            if extra / 64 == i {
                mask |= 1u64 << (extra % 64);
            }
            let new = mask & !self.words[v * self.stride + i];
            if new != 0 {
                out.push((i, new));
            }
        }
        out
    }

    fn merge(&mut self, v: usize, fresh: &[(usize, u64)]) {
        for &(i, bits) in fresh {
            self.words[v * self.stride + i] |= bits;
        }
    }
}

fn for_each_bit(fresh: &[(usize, u64)], mut f: impl FnMut(usize)) {
    for &(i, mut bits) in fresh {
        while bits != 0 {
            let s = i * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            f(s);
        }
    }
}

/// Ascending sweep over edges by code, propagating transposed reachability
/// bitsets. With distinct weights a non-decreasing walk uses strictly
/// increasing codes, so one pass in code order closes everything.
pub fn sweep_apnp(rg: &RankedGraph) -> ApnpMatrix {
    assert!(rg.graph().directed(), "sweep_apnp wants a directed graph");
    let n = rg.n() as usize;
    let mut reach = Rows::new(n, n);
    let mut out = ApnpMatrix::new(rg.n());
    for &e in rg.edges_by_code() {
        let edge = rg.edge(e);
        let (u, v) = (edge.src as usize, edge.dst as usize);
        let fresh = reach.fresh(u, u, v);
        for_each_bit(&fresh, |s| out.set(s as u32, v as u32, edge.weight, e));
        reach.merge(v, &fresh);
    }
    out
}

/// Dijkstra-flavored oracle: keys are codes of the tentative final edge,
/// a bucket per code, ascending drain. Visiting pair `(i, j)` relaxes every
/// out-edge of `j` whose code exceeds the pair's final code.
pub fn naive_apnp(rg: &RankedGraph) -> ApnpMatrix {
    assert!(rg.graph().directed(), "naive_apnp wants a directed graph");
    let n = rg.n() as usize;
    let m = rg.m() as usize;
    let mut d = alloc::vec![u32::MAX; n * n];
    let mut last = alloc::vec![u32::MAX; n * n];
    let mut queue = BucketQueue::new(m, n * n);

    // out[v]: (code, edge) ascending by code.
    let mut adj = alloc::vec![Vec::new(); n];
    for &e in rg.edges_by_code() {
        adj[rg.edge(e).src as usize].push((rg.code(e), e));
    }

    let relax = |p: usize, c: u32, e: u32, d: &mut [u32], last: &mut [u32], queue: &mut BucketQueue| {
        if c < d[p] {
            queue.decrease(p as u32, d[p], c);
            d[p] = c;
            last[p] = e;
        }
    };

    for &e in rg.edges_by_code() {
        let edge = rg.edge(e);
        let p = edge.src as usize * n + edge.dst as usize;
        relax(p, rg.code(e), e, &mut d, &mut last, &mut queue);
    }
    for x in 0..m as u32 {
        for p in queue.drain(x) {
            let (i, j) = (p as usize / n, p as usize % n);
            let row = &adj[j];
            let start = row.partition_point(|&(c, _)| c <= x);
            for &(c, e) in &row[start..] {
                relax(i * n + rg.edge(e).dst as usize, c, e, &mut d, &mut last, &mut queue);
            }
        }
    }

    let mut out = ApnpMatrix::new(rg.n());
    for p in 0..n * n {
        if d[p] != u32::MAX {
            debug_assert_eq!(rg.code(last[p]), d[p]);
            out.set(
                (p / n) as u32,
                (p % n) as u32,
                rg.edge(last[p]).weight,
                last[p],
            );
        }
    }
    out
}

/// Undirected counterpart of `sweep_apnp`, tracking per-vertex source sets
/// and updating both directions of an edge from the state before the edge.
/// Diagonals come from the bounce walk i -> j -> i over one edge, so each
/// endpoint's diagonal drops to the edge weight.
pub fn undirected_basic(rg: &RankedGraph) -> ApnpMatrix {
    assert!(!rg.graph().directed(), "undirected_basic wants an undirected graph");
    let n = rg.n() as usize;
    let mut reach = Rows::new(n, n);
    for v in 0..n {
        reach.set(v, v);
    }
    let mut out = ApnpMatrix::new(rg.n());
    for &e in rg.edges_by_code() {
        let edge = rg.edge(e);
        let (u, v) = (edge.src as usize, edge.dst as usize);
        let to_v = reach.fresh(u, u, v);
        let to_u = reach.fresh(v, v, u);
        for_each_bit(&to_v, |s| {
            if s != v {
                out.set_min(s as u32, v as u32, edge.weight, e);
            }
        });
        for_each_bit(&to_u, |s| {
            if s != u {
                out.set_min(s as u32, u as u32, edge.weight, e);
            }
        });
        reach.merge(v, &to_v);
        reach.merge(u, &to_u);
        out.set_min(edge.src, edge.src, edge.weight, e);
        out.set_min(edge.dst, edge.dst, edge.weight, e);
    }
    out
}

/// Ground truth with no preconditions: directed or undirected, repeated
/// weights, parallel edges. Equal-weight edges may chain, so each weight
/// class runs to a reachability fixpoint before the next class starts.
pub fn reference_apnp(g: &Graph) -> ApnpMatrix {
    let n = g.n() as usize;
    // (u, v, original edge), one arc per direction of travel.
    let mut arcs: Vec<(u32, u32, u32)> = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        arcs.push((e.src, e.dst, id as u32));
        if !g.directed() {
            arcs.push((e.dst, e.src, id as u32));
        }
    }
    arcs.sort_by_key(|&(_, _, id)| (g.edge(id).weight, id));

    let mut reach = Rows::new(n, n);
    let mut out = ApnpMatrix::new(g.n());
    let mut class = 0;
    while class < arcs.len() {
        let w = g.edge(arcs[class].2).weight;
        let mut end = class;
        while end < arcs.len() && g.edge(arcs[end].2).weight == w {
            end += 1;
        }
        loop {
            let mut changed = false;
            for &(u, v, id) in &arcs[class..end] {
                let fresh = reach.fresh(u as usize, u as usize, v as usize);
                if fresh.is_empty() {
                    continue;
                }
                for_each_bit(&fresh, |s| out.set_min(s as u32, v, w, id));
                reach.merge(v as usize, &fresh);
                changed = true;
            }
            if !changed {
                break;
            }
        }
        class = end;
    }
    out
}
