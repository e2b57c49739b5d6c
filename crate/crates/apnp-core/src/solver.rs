//! Directed solver. One ascending sweep over weight codes finalizes pairs
//! out of a bucket queue, and the prefix partition decides how each edge
//! gets offered to pairs: low edges are relaxed one at a time at visits,
//! the dense child-1 sets are relaxed wholesale by one counting product
//! per tree node, and gamma edges go through incremental per-node structs
//! whose counting products tell a visit which segments are worth scanning.
//!
//! Work bounds the code holds itself to, checked with real asserts:
//! - a visit relaxes at most (width + 1) * threshold low edges;
//! - per node, struct scans plus queue additions stay within 3 * threshold
//!   times the visits that end inside the node's interval, and batch scans
//!   within threshold times the visits ending inside the child-1 interval;
//! - every waiting-list insertion burst stays within the threshold;
//! - every final entry names an edge the partition assigned to the channel
//!   that claims to have relaxed it.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::balance::{balance, BalancedSide, Side};
use crate::bits::BitString;
use crate::boolmat::{mul_count, BitMatrix, CountMatrix};
use crate::bucket::BucketQueue;
use crate::config::SolverConfig;
use crate::graph::{ApnpMatrix, RankedGraph};
use crate::partition::{divide_edges, EdgeRole, PartitionTree};
use crate::reduce::dedupe_parallel_min;

const NONE32: u32 = u32::MAX;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub n: u32,
    pub m: u32,
    pub width: u32,
    pub threshold: u32,
    pub tree_nodes: u32,
    pub visits: u64,
    pub low_relaxations: u64,
    pub batch_relaxations: u64,
    pub struct_relaxations: u64,
    pub queue_additions: u64,
    pub waiting_insertions: u64,
    pub batches: u64,
    pub struct_inits: u64,
    pub product_cells: u64,
    pub max_live_structs: u32,
}

impl SolveStats {
    /// One `name value` line per field, fixed order, for stats files.
    pub fn lines(&self) -> String {
        let pairs: [(&str, u64); 15] = [
            ("n", self.n as u64),
            ("m", self.m as u64),
            ("width", self.width as u64),
            ("threshold", self.threshold as u64),
            ("tree_nodes", self.tree_nodes as u64),
            ("visits", self.visits),
            ("low_relaxations", self.low_relaxations),
            ("batch_relaxations", self.batch_relaxations),
            ("struct_relaxations", self.struct_relaxations),
            ("queue_additions", self.queue_additions),
            ("waiting_insertions", self.waiting_insertions),
            ("batches", self.batches),
            ("struct_inits", self.struct_inits),
            ("product_cells", self.product_cells),
            ("max_live_structs", self.max_live_structs as u64),
        ];
        let mut s = String::new();
        for (name, value) in pairs {
            s.push_str(&format!("{name} {value}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SiteKind {
    Init,
    Low,
    Batch,
    StructScan,
    StructWait,
}

struct State<'g> {
    rg: &'g RankedGraph,
    n: usize,
    d: Vec<u32>,
    last: Vec<u32>,
    site: Vec<(SiteKind, u32)>,
    visited: Vec<u64>,
    queue: BucketQueue,
    stats: SolveStats,
}

impl State<'_> {
    fn pair(&self, i: u32, j: u32) -> usize {
        self.n * i as usize + j as usize
    }

    fn is_visited(&self, i: u32, j: u32) -> bool {
        let p = self.pair(i, j);
        self.visited[p / 64] >> (p % 64) & 1 == 1
    }

    fn mark_visited(&mut self, p: usize) {
        self.visited[p / 64] |= 1u64 << (p % 64);
    }

    fn relax(&mut self, i: u32, k: u32, e: u32, kind: SiteKind, node: u32) {
        let c = self.rg.code(e);
        let p = self.pair(i, k);
        debug_assert!(
            self.visited[p / 64] >> (p % 64) & 1 == 0 || c >= self.d[p],
            "finalized pair offered a smaller code"
        );
        if c < self.d[p] {
            self.queue.decrease(p as u32, self.d[p], c);
            self.d[p] = c;
            self.last[p] = e;
            self.site[p] = (kind, node);
        }
    }
}

/// Incremental struct for one partition node's gamma edges. `membership`
/// row i has a 1 in an in-vertex's column while the pair (i, vertex) is
/// still open: not finalized, not yet offered a gamma edge by a scan.
/// `counts` is kept equal to membership x incidence throughout, so a zero
/// count proves a whole segment useless for row i without touching it.
struct GammaStruct {
    node: u32,
    range: (u64, u64),
    col_of: BTreeMap<u32, u32>,
    /// Gamma in-edges per column vertex, ascending by code; at most
    /// threshold entries each by the partition's construction.
    col_in_edges: Vec<Vec<u32>>,
    /// Segment indices with an edge into the column, for count updates.
    col_segments: Vec<Vec<u32>>,
    splits: BalancedSide,
    membership: BitMatrix,
    incidence: BitMatrix,
    counts: CountMatrix,
    /// (i, j) -> in-edges of queued in-vertices to re-offer when the pair
    /// (i, j) is visited. Entries under finalized pairs are never needed:
    /// their codes are at most the pair's final value.
    waiting: BTreeMap<(u32, u32), Vec<(u32, u32)>>,
    relaxations: u64,
    queue_adds: u64,
}

impl GammaStruct {
    /// Closes the pair (i, column vertex): clear the bit and keep every
    /// affected count exact. A no-op when already closed, which is what
    /// makes visiting an already-queued pair safe.
    fn close(&mut self, i: u32, col: u32) {
        if self.membership.get(i as usize, col as usize) {
            self.membership.clear(i as usize, col as usize);
            for &s in &self.col_segments[col as usize] {
                self.counts.sub(i as usize, s as usize, 1);
            }
        }
    }
}

fn struct_init(
    rg: &RankedGraph,
    tree: &PartitionTree,
    nid: u32,
    st: &mut State,
    cfg: &SolverConfig,
) -> GammaStruct {
    let node = tree.node(nid);
    let gamma = node.gamma.as_ref().expect("struct init on a node without gamma");
    let cap = tree.threshold();
    let splits = balance(rg, &gamma.edges, Side::Out, cap);

    let mut col_of = BTreeMap::new();
    let mut col_vertex = Vec::new();
    let mut col_in_edges = Vec::new();
    for (dst, list) in &gamma.in_by_dst {
        assert!(list.len() <= cap as usize, "gamma in-degree above threshold");
        col_of.insert(*dst, col_vertex.len() as u32);
        col_vertex.push(*dst);
        col_in_edges.push(list.clone());
    }

    let cols = col_vertex.len();
    let segs = splits.segments().len();
    let mut incidence = BitMatrix::new(cols, segs);
    for (s, seg) in splits.segments().iter().enumerate() {
        for &e in &seg.edges {
            incidence.set(col_of[&rg.edge(e).dst] as usize, s);
        }
    }
    let mut col_segments = alloc::vec![Vec::new(); cols];
    for (col, list) in col_segments.iter_mut().enumerate() {
        for s in 0..segs {
            if incidence.get(col, s) {
                list.push(s as u32);
            }
        }
    }

    let n = st.n;
    let mut membership = BitMatrix::new(n, cols);
    for (col, &k) in col_vertex.iter().enumerate() {
        for i in 0..n as u32 {
            if !st.is_visited(i, k) {
                membership.set(i as usize, col);
            }
        }
    }
    let counts = mul_count(&membership, &incidence, cfg.kernel);
    st.stats.product_cells += (n * cols * segs) as u64;

    GammaStruct {
        node: nid,
        range: node.interval,
        col_of,
        col_in_edges,
        col_segments,
        splits,
        membership,
        incidence,
        counts,
        waiting: BTreeMap::new(),
        relaxations: 0,
        queue_adds: 0,
    }
}

/// Everything a live struct owes the visit of pair (i, j) at code x: close
/// the pair if j is an in-vertex, drain the pair's waiting list, then scan
/// j's segments: suffix-only when x falls inside a segment's range, whole
/// when the segment lies above x and the counts prove it holds an open
/// in-vertex for row i.
fn struct_visit(
    rg: &RankedGraph,
    gs: &mut GammaStruct,
    st: &mut State,
    i: u32,
    j: u32,
    x: u64,
) {
    let cap = gs.splits.cap();
    if let Some(&col) = gs.col_of.get(&j) {
        gs.close(i, col);
    }

    if let Some(list) = gs.waiting.remove(&(i, j)) {
        for (k, e) in list {
            gs.relaxations += 1;
            st.stats.struct_relaxations += 1;
            // entries at or below x cannot extend a walk ending at code x
            if rg.code(e) as u64 > x {
                st.relax(i, k, e, SiteKind::StructWait, gs.node);
            }
        }
    }

    let Some((s0, s1)) = gs.splits.vertex_range(j) else {
        return;
    };
    for sidx in s0..s1 {
        let seg = gs.splits.segment(sidx);
        let end = seg.edges.len();
        let start = if x > seg.hi {
            continue;
        } else if x >= seg.lo {
            seg.edges.partition_point(|&e| (rg.code(e) as u64) <= x)
        } else {
            if gs.counts.get(i as usize, sidx as usize) == 0 {
                continue;
            }
            0
        };
        for idx in start..end {
            let e = gs.splits.segment(sidx).edges[idx];
            gs.relaxations += 1;
            st.stats.struct_relaxations += 1;
            let k = rg.edge(e).dst;
            let col = gs.col_of[&k];
            if !gs.membership.get(i as usize, col as usize) {
                continue;
            }
            st.relax(i, k, e, SiteKind::StructScan, gs.node);
            let p = st.pair(i, k);
            debug_assert!(
                st.d[p] != NONE32 && st.d[p] as u64 >= gs.range.0,
                "queued pair estimated below the node's interval"
            );
            gs.close(i, col);
            gs.queue_adds += 1;
            st.stats.queue_additions += 1;
            let mut inserted = 0u32;
            for &e2 in &gs.col_in_edges[col as usize] {
                let j2 = rg.edge(e2).src;
                if !st.is_visited(i, j2) {
                    gs.waiting.entry((i, j2)).or_default().push((k, e2));
                    inserted += 1;
                }
            }
            assert!(inserted <= cap, "waiting burst above threshold");
            st.stats.waiting_insertions += inserted as u64;
        }
    }
}

/// Retirement check: the counts must still equal membership x incidence
/// after all the decrements the struct's life applied to them.
fn struct_teardown(gs: &GammaStruct, cfg: &SolverConfig) {
    if !cfg.check_products {
        return;
    }
    let fresh = mul_count(&gs.membership, &gs.incidence, cfg.kernel);
    for r in 0..fresh.rows() {
        for c in 0..fresh.cols() {
            assert_eq!(
                fresh.get(r, c),
                gs.counts.get(r, c),
                "incremental count drifted from the product at ({r}, {c})"
            );
        }
    }
}

/// One-shot batch for a node whose child-1 interval starts at x: pairs
/// finalized inside [lo, x) joined with the deduped child-1 input through
/// a counting product. For each open in-vertex pair the first segment with
/// a positive count holds its smallest candidate code, so the remaining
/// segments of that vertex are skipped unscanned.
fn batch_relax(
    rg: &RankedGraph,
    tree: &PartitionTree,
    nid: u32,
    x: u64,
    st: &mut State,
    cfg: &SolverConfig,
) -> u64 {
    let node = tree.node(nid);
    let cap = tree.threshold();
    let lo = node.interval.0;
    let ded = dedupe_parallel_min(rg, &node.h1_edges);

    let mut src_col: BTreeMap<u32, u32> = BTreeMap::new();
    for &e in &ded {
        let s = rg.edge(e).src;
        let next = src_col.len() as u32;
        src_col.entry(s).or_insert(next);
    }
    let n = st.n;
    let mut reached = BitMatrix::new(n, src_col.len());
    for (&j, &col) in &src_col {
        for i in 0..n as u32 {
            let dp = st.d[st.pair(i, j)];
            if dp != NONE32 && (dp as u64) >= lo && (dp as u64) < x {
                reached.set(i as usize, col as usize);
            }
        }
    }

    let bal = balance(rg, &ded, Side::In, cap);
    let segs = bal.segments().len();
    let mut incidence = BitMatrix::new(src_col.len(), segs);
    for (s, seg) in bal.segments().iter().enumerate() {
        for &e in &seg.edges {
            incidence.set(src_col[&rg.edge(e).src] as usize, s);
        }
    }
    let counts = mul_count(&reached, &incidence, cfg.kernel);
    st.stats.product_cells += (n * src_col.len() * segs) as u64;

    let mut scanned = 0u64;
    let verts: Vec<u32> = bal.vertices().collect();
    for k in verts {
        let (s0, s1) = bal.vertex_range(k).expect("vertex listed without segments");
        for i in 0..n as u32 {
            if st.is_visited(i, k) {
                continue;
            }
            for sidx in s0..s1 {
                if counts.get(i as usize, sidx as usize) == 0 {
                    continue;
                }
                for &e in &bal.segment(sidx).edges {
                    scanned += 1;
                    st.stats.batch_relaxations += 1;
                    if reached.get(i as usize, src_col[&rg.edge(e).src] as usize) {
                        st.relax(i, k, e, SiteKind::Batch, nid);
                    }
                }
                // later segments only carry larger codes
                break;
            }
        }
    }
    scanned
}

pub fn solve_directed(rg: &RankedGraph, cfg: &SolverConfig) -> ApnpMatrix {
    solve_directed_with_stats(rg, cfg).0
}

pub fn solve_directed_with_stats(
    rg: &RankedGraph,
    cfg: &SolverConfig,
) -> (ApnpMatrix, SolveStats) {
    assert!(rg.graph().directed(), "undirected input in the directed solver");
    assert!(rg.n() as u64 * rg.n() as u64 <= u32::MAX as u64, "pair ids need u32");
    assert!(rg.width() <= 31, "codes need u32 headroom");

    let n = rg.n() as usize;
    let m = rg.m();
    let cap = cfg.degree_cap(rg.n());
    let tree = divide_edges(rg, cap);

    let mut st = State {
        rg,
        n,
        d: alloc::vec![NONE32; n * n],
        last: alloc::vec![NONE32; n * n],
        site: alloc::vec![(SiteKind::Init, NONE32); n * n],
        visited: alloc::vec![0u64; (n * n).div_ceil(64).max(1)],
        queue: BucketQueue::new(m as usize, n * n),
        stats: SolveStats {
            n: rg.n(),
            m,
            width: rg.width(),
            threshold: cap,
            tree_nodes: tree.len() as u32,
            ..SolveStats::default()
        },
    };

    for &e in rg.edges_by_code() {
        let edge = rg.edge(e);
        st.relax(edge.src, edge.dst, e, SiteKind::Init, NONE32);
    }

    let mut structs: Vec<Option<GammaStruct>> = Vec::new();
    structs.resize_with(tree.len(), || None);
    let mut live: Vec<u32> = Vec::new();
    let mut node_struct_relax = alloc::vec![0u64; tree.len()];
    let mut node_queue_adds = alloc::vec![0u64; tree.len()];
    let mut node_batch_scans = alloc::vec![0u64; tree.len()];
    let mut path: Vec<u32> = Vec::new();

    for x in 0..m as u64 {
        let mut idx = 0;
        while idx < live.len() {
            let nid = live[idx];
            if tree.node(nid).interval.1 < x {
                let gs = structs[nid as usize].take().expect("live struct missing");
                struct_teardown(&gs, cfg);
                node_struct_relax[nid as usize] = gs.relaxations;
                node_queue_adds[nid as usize] = gs.queue_adds;
                live.swap_remove(idx);
            } else {
                idx += 1;
            }
        }

        tree.path_of(x, &mut path);
        for &nid in &path {
            let node = tree.node(nid);
            if node.gamma.is_some() && node.interval.0 == x {
                let gs = struct_init(rg, &tree, nid, &mut st, cfg);
                structs[nid as usize] = Some(gs);
                live.push(nid);
                st.stats.struct_inits += 1;
                st.stats.max_live_structs = st.stats.max_live_structs.max(live.len() as u32);
            }
            if let Some(c1) = node.children[1] {
                if tree.node(c1).interval.0 == x {
                    node_batch_scans[nid as usize] = batch_relax(rg, &tree, nid, x, &mut st, cfg);
                    st.stats.batches += 1;
                }
            }
        }

        for p in st.queue.drain(x as u32) {
            let p = p as usize;
            st.mark_visited(p);
            st.stats.visits += 1;
            debug_assert_eq!(st.d[p] as u64, x);
            let (i, j) = ((p / n) as u32, (p % n) as u32);
            let mut low_count = 0u64;
            for &nid in &path {
                if let Some(list) = tree.node(nid).low_by_src.get(&j) {
                    let from = list.partition_point(|&e| (rg.code(e) as u64) <= x);
                    for &e in &list[from..] {
                        st.relax(i, rg.edge(e).dst, e, SiteKind::Low, nid);
                        low_count += 1;
                    }
                }
                if let Some(gs) = structs[nid as usize].as_mut() {
                    struct_visit(rg, gs, &mut st, i, j, x);
                }
            }
            st.stats.low_relaxations += low_count;
            assert!(
                low_count <= (rg.width() as u64 + 1) * cap as u64,
                "visit relaxed more low edges than the path allows"
            );
        }
    }

    for nid in live.drain(..) {
        let gs = structs[nid as usize].take().expect("live struct missing");
        struct_teardown(&gs, cfg);
        node_struct_relax[nid as usize] = gs.relaxations;
        node_queue_adds[nid as usize] = gs.queue_adds;
    }

    post_checks(
        rg,
        &tree,
        &st,
        &node_batch_scans,
        &node_struct_relax,
        &node_queue_adds,
    );

    let mut out = ApnpMatrix::new(rg.n());
    for i in 0..n as u32 {
        for j in 0..n as u32 {
            let p = n * i as usize + j as usize;
            if st.d[p] != NONE32 {
                debug_assert!(st.is_visited(i, j), "estimated pair left unvisited");
                let e = st.last[p];
                debug_assert_eq!(rg.code(e), st.d[p]);
                out.set(i, j, rg.edge(e).weight, e);
            }
        }
    }
    (out, st.stats)
}

/// Global work bounds plus the channel coverage check: the witness edge of
/// every finalized pair must belong to the channel its site tag names.
fn post_checks(
    rg: &RankedGraph,
    tree: &PartitionTree,
    st: &State,
    node_batch_scans: &[u64],
    node_struct_relax: &[u64],
    node_queue_adds: &[u64],
) {
    let mut in_range = alloc::vec![0u64; tree.len()];
    let mut path = Vec::new();
    for p in 0..st.n * st.n {
        if st.d[p] == NONE32 {
            continue;
        }
        tree.path_of(st.d[p] as u64, &mut path);
        for &nid in &path {
            in_range[nid as usize] += 1;
        }

        let (kind, nid) = st.site[p];
        let e = st.last[p];
        let (i, k) = ((p / st.n) as u32, (p % st.n) as u32);
        let edge = rg.edge(e);
        assert_eq!(edge.dst, k, "witness edge ends elsewhere");
        match kind {
            SiteKind::Init => assert_eq!(edge.src, i, "init witness is not a direct edge"),
            SiteKind::Low => {
                assert_eq!(tree.place(e), (EdgeRole::Low, nid), "low witness placed elsewhere");
            }
            SiteKind::Batch => {
                let node = tree.node(nid);
                let c1 = node.children[1].expect("batch site on a node without child 1");
                let code = BitString::new(rg.code(e) as u64, rg.width());
                assert!(
                    tree.node(c1).prefix.is_prefix_of(code),
                    "batch witness outside the child-1 interval"
                );
                let (_, terminal) = tree.place(e);
                assert!(
                    tree.node(c1).prefix.is_prefix_of(tree.node(terminal).prefix),
                    "batch witness never entered child 1"
                );
            }
            SiteKind::StructScan | SiteKind::StructWait => {
                assert_eq!(
                    tree.place(e),
                    (EdgeRole::Gamma, nid),
                    "struct witness placed elsewhere"
                );
            }
        }
    }

    let cap = tree.threshold() as u64;
    for nid in 0..tree.len() {
        let node = tree.node(nid as u32);
        if let Some(c1) = node.children[1] {
            assert!(
                node_batch_scans[nid] <= in_range[c1 as usize] * cap,
                "batch scans exceed the child-1 visit budget"
            );
        }
        if node.gamma.is_some() {
            assert!(
                node_struct_relax[nid] + node_queue_adds[nid] <= 3 * in_range[nid] * cap,
                "struct work exceeds the node's visit budget"
            );
        }
    }
}

/// Rebuilds one optimal walk for the pair (i, j) out of the witness edges,
/// last edge first. Walks can revisit vertices, so the expansion keys off
/// the strictly decreasing optimum values, not a visited set: when the
/// witness starts at i itself, a cheaper closed walk at i is prepended
/// exactly when the matrix records one.
pub fn reconstruct_path(rg: &RankedGraph, m: &ApnpMatrix, i: u32, j: u32) -> Option<Vec<u32>> {
    m.opt(i, j)?;
    let directed = rg.graph().directed();
    let mut rev: Vec<u32> = Vec::new();
    let mut tj = j;
    loop {
        assert!(rev.len() <= rg.m() as usize, "witness chain does not terminate");
        let e = m.last_edge(i, tj).expect("present entry lacks a witness");
        rev.push(e);
        let edge = rg.edge(e);
        let prev = if directed {
            assert_eq!(edge.dst, tj, "witness edge ends elsewhere");
            edge.src
        } else {
            assert!(tj == edge.src || tj == edge.dst, "witness edge misses the vertex");
            edge.other(tj)
        };
        if prev == i {
            match m.opt(i, i) {
                Some(w) if w < edge.weight => tj = i,
                _ => break,
            }
        } else {
            tj = prev;
        }
    }
    rev.reverse();
    Some(rev)
}

/// Full audit of a result matrix against its graph: every present entry
/// must reconstruct to a walk from i to j whose weights never decrease and
/// whose last weight is the recorded optimum. Panics on any violation.
pub fn check_witnesses(rg: &RankedGraph, m: &ApnpMatrix) {
    let directed = rg.graph().directed();
    for (i, j, w, _) in m.entries() {
        let path = reconstruct_path(rg, m, i, j).expect("entry vanished mid-check");
        assert!(!path.is_empty(), "empty witness walk");
        let mut at = i;
        let mut prev_w = None;
        for &e in &path {
            let edge = rg.edge(e);
            if directed {
                assert_eq!(edge.src, at, "walk breaks at an edge tail");
                at = edge.dst;
            } else {
                assert!(at == edge.src || at == edge.dst, "walk leaves the vertex");
                at = edge.other(at);
            }
            if let Some(pw) = prev_w {
                assert!(edge.weight >= pw, "walk weights decrease");
            }
            prev_w = Some(edge.weight);
        }
        assert_eq!(at, j, "walk ends at the wrong vertex");
        assert_eq!(prev_w, Some(w), "walk's last weight is not the optimum");
    }
}
