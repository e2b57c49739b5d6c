//! Undirected solver over persistent bit strings. Vertex v's string has
//! bit s set when source s already reaches v along a non-decreasing walk,
//! and processing edges by ascending weight makes each new reachability
//! final the moment it appears. Equalizing the two endpoint strings of an
//! edge costs one mismatch search per newly set bit, so the whole run
//! performs at most n^2 searches of O(log n) counted operations each, on
//! top of the per-edge equality probes. Both bounds are asserted, not
//! assumed.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynstring::{Str, StringFamily};
use crate::error::{Error, Result};
use crate::graph::{rank_weights, ApnpMatrix, Graph, RankedGraph};
use crate::reduce::{lift_answers, reduce_undirected};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UndirectedStats {
    pub n: u32,
    pub m: u32,
    /// Edge count actually solved; differs from m when duplicate weights
    /// forced a rewrite first.
    pub reduced_m: u32,
    pub bit_flips: u64,
    pub make_ops: u64,
    pub concat_ops: u64,
    pub split_ops: u64,
    pub equal_ops: u64,
    pub set_bit_ops: u64,
}

impl UndirectedStats {
    /// One `name value` line per field, fixed order, for stats files.
    pub fn lines(&self) -> String {
        let pairs: [(&str, u64); 9] = [
            ("n", self.n as u64),
            ("m", self.m as u64),
            ("reduced_m", self.reduced_m as u64),
            ("bit_flips", self.bit_flips),
            ("make_ops", self.make_ops),
            ("concat_ops", self.concat_ops),
            ("split_ops", self.split_ops),
            ("equal_ops", self.equal_ops),
            ("set_bit_ops", self.set_bit_ops),
        ];
        let mut s = String::new();
        for (name, value) in pairs {
            s.push_str(&format!("{name} {value}\n"));
        }
        s
    }
}

pub fn solve_undirected(g: &Graph, seed: u64) -> Result<ApnpMatrix> {
    solve_undirected_with_stats(g, seed).map(|(m, _)| m)
}

/// Solves any undirected instance; duplicate weights are rewritten to a
/// distinct-weight gadget graph first and the answers lifted back. Lifted
/// witness edges name gadget edges, so reconstruction applies only to the
/// distinct-weight case.
pub fn solve_undirected_with_stats(
    g: &Graph,
    seed: u64,
) -> Result<(ApnpMatrix, UndirectedStats)> {
    if g.directed() {
        return Err(Error::Orientation { expected: "undirected" });
    }
    if g.has_duplicate_weights() {
        let (reduced, map) = reduce_undirected(g)?;
        let rg = rank_weights(reduced)?;
        let (solved, mut stats) = core_solve(&rg, seed);
        stats.m = g.m();
        let lifted = lift_answers(&solved, &map)?;
        Ok((lifted, stats))
    } else {
        let rg = rank_weights(g.clone())?;
        Ok(core_solve(&rg, seed))
    }
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        ((n - 1).ilog2() + 1) as u64
    }
}

fn core_solve(rg: &RankedGraph, seed: u64) -> (ApnpMatrix, UndirectedStats) {
    let n = rg.n();
    let fam = StringFamily::new(seed);
    let zeros = fam.make(&vec![false; n as usize]);
    let mut reach: Vec<Str> = (0..n)
        .map(|v| {
            fam.set_bit(&zeros, v as u64, true)
                .expect("vertex index inside the string")
        })
        .collect();

    let mut out = ApnpMatrix::new(n);
    let mut flips = 0u64;
    let budget = 2 * ceil_log2(n as u64) + 4;

    for &e in rg.edges_by_code() {
        let edge = rg.edge(e);
        let (u, v) = (edge.src, edge.dst);
        let w = edge.weight;
        // the bounce walk u -> v -> u closes both diagonals at this weight
        out.set_min(u, u, w, e);
        out.set_min(v, v, w, e);
        loop {
            let before = fam.op_counts().total();
            if fam.equal(&reach[u as usize], &reach[v as usize]) {
                break;
            }
            let s = fam
                .first_mismatch(&reach[u as usize], &reach[v as usize])
                .expect("endpoint strings share a length")
                .expect("unequal strings have a mismatch");
            // source s reaches one endpoint; crossing the edge reaches the
            // other at exactly this weight. Setting both sides and letting
            // set_min keep the incumbent avoids asking which side was new.
            reach[u as usize] = fam
                .set_bit(&reach[u as usize], s, true)
                .expect("mismatch position is in range");
            reach[v as usize] = fam
                .set_bit(&reach[v as usize], s, true)
                .expect("mismatch position is in range");
            out.set_min(s as u32, u, w, e);
            out.set_min(s as u32, v, w, e);
            flips += 1;
            let used = fam.op_counts().total() - before;
            assert!(
                used <= budget,
                "mismatch round used {used} ops, budget {budget}"
            );
            assert!(
                flips <= n as u64 * n as u64,
                "bit flips exceed the n^2 ceiling"
            );
        }
    }

    let ops = fam.op_counts();
    let stats = UndirectedStats {
        n,
        m: rg.m(),
        reduced_m: rg.m(),
        bit_flips: flips,
        make_ops: ops.make,
        concat_ops: ops.concat,
        split_ops: ops.split,
        equal_ops: ops.equal,
        set_bit_ops: ops.set_bit,
    };
    (out, stats)
}
