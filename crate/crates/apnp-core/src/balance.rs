//! Splits an edge set into per-vertex segments of at most `cap` edges,
//! ascending by code, so a batch step can treat every segment as one unit:
//! either all of it is scanned or a count says it can be skipped whole.
//! A vertex with many edges appears as several segments whose code ranges
//! are disjoint and ascending, which keeps "the first interesting segment"
//! well defined.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::graph::RankedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Group by edge source.
    Out,
    /// Group by edge destination.
    In,
}

impl Side {
    fn vertex_of(self, rg: &RankedGraph, e: u32) -> u32 {
        let edge = rg.edge(e);
        match self {
            Side::Out => edge.src,
            Side::In => edge.dst,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub vertex: u32,
    /// Inclusive code range; lo and hi are the first and last edge's codes.
    pub lo: u64,
    pub hi: u64,
    /// Ascending by code, at most `cap` of them.
    pub edges: Vec<u32>,
}

#[derive(Debug)]
pub struct BalancedSide {
    cap: u32,
    side: Side,
    segments: Vec<Segment>,
    by_vertex: BTreeMap<u32, (u32, u32)>,
}

pub fn balance(rg: &RankedGraph, edges: &[u32], side: Side, cap: u32) -> BalancedSide {
    assert!(cap >= 1);
    let mut grouped: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &e in edges {
        grouped.entry(side.vertex_of(rg, e)).or_default().push(e);
    }
    let mut segments = Vec::new();
    let mut by_vertex = BTreeMap::new();
    for (vertex, mut list) in grouped {
        list.sort_unstable_by_key(|&e| rg.code(e));
        let start = segments.len() as u32;
        for chunk in list.chunks(cap as usize) {
            segments.push(Segment {
                vertex,
                lo: rg.code(chunk[0]) as u64,
                hi: rg.code(*chunk.last().unwrap()) as u64,
                edges: chunk.to_vec(),
            });
        }
        by_vertex.insert(vertex, (start, segments.len() as u32));
    }
    BalancedSide { cap, side, segments, by_vertex }
}

impl BalancedSide {
    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, idx: u32) -> &Segment {
        &self.segments[idx as usize]
    }

    /// Contiguous segment index range for a vertex, ranges ascending.
    pub fn vertex_range(&self, vertex: u32) -> Option<(u32, u32)> {
        self.by_vertex.get(&vertex).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.by_vertex.keys().copied()
    }

    /// Recomputes every promised property from the original input and
    /// panics on violation: nothing lost or invented, sizes capped with
    /// only a vertex's last segment partial, ranges tight, disjoint and
    /// ascending, and the total segment count within budget.
    pub fn assert_invariants(&self, rg: &RankedGraph, edges: &[u32]) {
        let mut seen: Vec<u32> = Vec::new();
        for (&vertex, &(start, end)) in &self.by_vertex {
            assert!(start < end, "vertex with no segments");
            let segs = &self.segments[start as usize..end as usize];
            for (k, s) in segs.iter().enumerate() {
                assert_eq!(s.vertex, vertex);
                assert!(!s.edges.is_empty() && s.edges.len() <= self.cap as usize);
                if k + 1 < segs.len() {
                    assert_eq!(
                        s.edges.len(),
                        self.cap as usize,
                        "only the last segment may run short"
                    );
                    assert!(s.hi < segs[k + 1].lo, "ranges must ascend disjointly");
                }
                assert!(s.edges.windows(2).all(|w| rg.code(w[0]) < rg.code(w[1])));
                assert_eq!(s.lo, rg.code(s.edges[0]) as u64);
                assert_eq!(s.hi, rg.code(*s.edges.last().unwrap()) as u64);
                for &e in &s.edges {
                    assert_eq!(self.side.vertex_of(rg, e), vertex);
                    seen.push(e);
                }
            }
        }
        let mut want: Vec<u32> = edges.to_vec();
        want.sort_unstable();
        seen.sort_unstable();
        assert_eq!(seen, want, "segments must partition the input");

        let budget = (edges.len() as u32).div_ceil(self.cap) + self.by_vertex.len() as u32;
        assert!(
            self.segments.len() as u32 <= budget,
            "{} segments exceed the {} budget",
            self.segments.len(),
            budget
        );
    }
}
