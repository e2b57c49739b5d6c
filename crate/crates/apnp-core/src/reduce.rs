//! Rewrites a graph with repeated weights into one whose weights are
//! pairwise distinct, preserving every answer. Each weight class becomes a
//! small gadget over its strongly connected pieces (connected pieces when
//! undirected): inside a piece everything can already reach everything using
//! only this class, so travel is routed through the piece's smallest vertex,
//! its assembly point.
//!
//! Class with weight w and k edges gets the synthetic weight window
//! [2*offset, 2*offset + 2k) where offset counts edges of earlier classes;
//! the gadget never needs more than 2k edges, so windows stay disjoint and
//! the rewritten graph has at most twice the edges. `lift_answers` maps
//! solved results back to original weights.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{ApnpMatrix, Graph, RankedGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassComponent {
    /// Smallest vertex of the piece; all within-piece travel detours here.
    pub assembly: u32,
    /// All vertices of the piece, ascending (assembly first).
    pub members: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo {
    pub weight: i64,
    /// Pieces ordered by assembly vertex.
    pub components: Vec<ClassComponent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionMap {
    new_to_old: BTreeMap<i64, i64>,
    classes: Vec<ClassInfo>,
}

impl ReductionMap {
    pub fn lift_weight(&self, synthetic: i64) -> Result<i64> {
        self.new_to_old
            .get(&synthetic)
            .copied()
            .ok_or(Error::UnknownSyntheticWeight { weight: synthetic })
    }

    /// Per-class gadget structure, ascending by original weight.
    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }
}

/// Replays a matrix computed on the rewritten graph in terms of original
/// weights. Witness edges still name rewritten-graph edges: the gadget has
/// no one-to-one edge correspondence to undo.
pub fn lift_answers(solved: &ApnpMatrix, map: &ReductionMap) -> Result<ApnpMatrix> {
    let mut out = ApnpMatrix::new(solved.n() as u32);
    for (i, j, w, e) in solved.entries() {
        out.set(i, j, map.lift_weight(w)?, e);
    }
    Ok(out)
}

/// Among `edges` of a ranked multigraph, keeps one edge per (src, dst) pair,
/// the one with the smallest code; result ascends by code. Parallel edges
/// are interchangeable above their minimum, so batched relaxation may drop
/// the rest.
pub fn dedupe_parallel_min(rg: &RankedGraph, edges: &[u32]) -> Vec<u32> {
    let mut best: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for &e in edges {
        let ed = rg.edge(e);
        best.entry((ed.src, ed.dst))
            .and_modify(|cur| {
                if rg.code(e) < rg.code(*cur) {
                    *cur = e;
                }
            })
            .or_insert(e);
    }
    let mut out: Vec<u32> = best.into_values().collect();
    out.sort_unstable_by_key(|&e| rg.code(e));
    out
}

fn weight_classes(g: &Graph) -> Vec<(i64, Vec<u32>)> {
    let mut classes: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        classes.entry(e.weight).or_default().push(id as u32);
    }
    classes.into_iter().collect()
}

/// Class-local view: vertices touching the class, compacted to 0..len.
struct ClassVerts {
    verts: Vec<u32>,
}

impl ClassVerts {
    fn new(g: &Graph, ids: &[u32]) -> Self {
        let mut verts: Vec<u32> =
            ids.iter().flat_map(|&e| [g.edge(e).src, g.edge(e).dst]).collect();
        verts.sort_unstable();
        verts.dedup();
        ClassVerts { verts }
    }

    fn local(&self, v: u32) -> usize {
        self.verts.binary_search(&v).unwrap()
    }

    fn len(&self) -> usize {
        self.verts.len()
    }
}

pub fn reduce_directed(g: &Graph) -> Result<(Graph, ReductionMap)> {
    if !g.directed() {
        return Err(Error::Orientation { expected: "directed" });
    }
    let mut out = Graph::new_multi(g.n(), true);
    let mut map = ReductionMap { new_to_old: BTreeMap::new(), classes: Vec::new() };
    let mut offset = 0u64;
    for (w, ids) in weight_classes(g) {
        let base = 2 * offset as i64;
        let before = out.m();

        let cv = ClassVerts::new(g, &ids);
        let mut adj = alloc::vec![Vec::new(); cv.len()];
        for &e in &ids {
            adj[cv.local(g.edge(e).src)].push(cv.local(g.edge(e).dst));
        }
        let (comp_of, comps) = tarjan_sccs(&adj);
        // Tarjan emits sinks first, so emission index reverses topological
        // order on the condensation.
        let topo = |c: usize| comps.len() - 1 - c;
        let mut order: Vec<usize> = (0..comps.len()).collect();
        order.sort_unstable_by_key(|&c| comps[c][0]);

        let mut next = base;
        let mut emit = |src: usize, dst: usize, out: &mut Graph| {
            out.add_edge(cv.verts[src], cv.verts[dst], next);
            map.new_to_old.insert(next, w);
            next += 1;
        };

        // Gather every piece at its assembly vertex.
        for &c in &order {
            let asm = comps[c][0];
            for &v in &comps[c][1..] {
                emit(v, asm, &mut out);
            }
        }
        // Between pieces: one edge per original crossing edge, assembly to
        // assembly. Sources first; any path through the condensation then
        // sees ascending synthetic weights.
        let mut crossing: Vec<u32> = ids
            .iter()
            .copied()
            .filter(|&e| {
                comp_of[cv.local(g.edge(e).src)] != comp_of[cv.local(g.edge(e).dst)]
            })
            .collect();
        crossing.sort_unstable_by_key(|&e| (topo(comp_of[cv.local(g.edge(e).src)]), e));
        for &e in &crossing {
            let cs = comp_of[cv.local(g.edge(e).src)];
            let cd = comp_of[cv.local(g.edge(e).dst)];
            emit(comps[cs][0], comps[cd][0], &mut out);
        }
        // Scatter from assemblies.
        for &c in &order {
            let asm = comps[c][0];
            for &v in &comps[c][1..] {
                emit(asm, v, &mut out);
            }
        }
        // One return edge per non-singleton piece so the assembly's own
        // closed walk survives: assembly -> v -> assembly with the return
        // carrying the largest weight of the class.
        for &c in &order {
            if comps[c].len() >= 2 {
                emit(comps[c][1], comps[c][0], &mut out);
            }
        }

        assert!(
            out.m() - before <= 2 * ids.len() as u32,
            "class gadget exceeded its weight window"
        );
        map.classes.push(ClassInfo {
            weight: w,
            components: order
                .iter()
                .map(|&c| ClassComponent {
                    assembly: cv.verts[comps[c][0]],
                    members: comps[c].iter().map(|&v| cv.verts[v]).collect(),
                })
                .collect(),
        });
        offset += ids.len() as u64;
    }
    debug_assert!(out.m() <= 2 * g.m());
    Ok((out, map))
}

pub fn reduce_undirected(g: &Graph) -> Result<(Graph, ReductionMap)> {
    if g.directed() {
        return Err(Error::Orientation { expected: "undirected" });
    }
    let mut out = Graph::new_multi(g.n(), false);
    let mut map = ReductionMap { new_to_old: BTreeMap::new(), classes: Vec::new() };
    let mut offset = 0u64;
    for (w, ids) in weight_classes(g) {
        let base = 2 * offset as i64;
        let before = out.m();

        let cv = ClassVerts::new(g, &ids);
        let mut dsu = Dsu::new(cv.len());
        for &e in &ids {
            dsu.union(cv.local(g.edge(e).src), cv.local(g.edge(e).dst));
        }
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..cv.len() {
            comps.entry(dsu.find(v)).or_default().push(v);
        }

        let mut next = base;
        let mut components = Vec::new();
        for members in comps.into_values() {
            // members ascend already; spokes out of the assembly first, then
            // return spokes in reverse, so any two members can meet at the
            // assembly without a weight drop. A two-vertex piece meets on
            // its lone spoke by bouncing it, no return needed.
            let asm = members[0];
            for &v in &members[1..] {
                out.add_edge(cv.verts[asm], cv.verts[v], next);
                map.new_to_old.insert(next, w);
                next += 1;
            }
            if members.len() > 2 {
                for &v in members[1..].iter().rev() {
                    out.add_edge(cv.verts[v], cv.verts[asm], next);
                    map.new_to_old.insert(next, w);
                    next += 1;
                }
            }
            components.push(ClassComponent {
                assembly: cv.verts[asm],
                members: members.iter().map(|&v| cv.verts[v]).collect(),
            });
        }

        assert!(
            out.m() - before <= 2 * ids.len() as u32,
            "class gadget exceeded its weight window"
        );
        map.classes.push(ClassInfo { weight: w, components });
        offset += ids.len() as u64;
    }
    debug_assert!(out.m() <= 2 * g.m());
    Ok((out, map))
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Smaller root wins, keeping component representatives canonical.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
    }
}

/// Iterative Tarjan. Returns (component of each vertex, components in
/// emission order) with members ascending; emission order is reverse
/// topological on the condensation.
fn tarjan_sccs(adj: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    const UNSET: u32 = u32::MAX;
    let n = adj.len();
    let mut index = alloc::vec![UNSET; n];
    let mut low = alloc::vec![0u32; n];
    let mut on_stack = alloc::vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp_of = alloc::vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0u32;
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        frames.push((root, 0));
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == UNSET {
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&mut (parent, _)) = frames.last_mut() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let u = stack.pop().unwrap();
                    on_stack[u] = false;
                    comp_of[u] = comps.len();
                    comp.push(u);
                    if u == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    (comp_of, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph, rank_weights};
    use crate::oracle::{reference_apnp, sweep_apnp, undirected_basic};

    fn reduced_edges(g: &Graph) -> Vec<(u32, u32, i64)> {
        g.edges().iter().map(|e| (e.src, e.dst, e.weight)).collect()
    }

    fn check_against_reference(original: &Graph) {
        let (h, map) = if original.directed() {
            reduce_directed(original).unwrap()
        } else {
            reduce_undirected(original).unwrap()
        };
        assert!(h.m() <= 2 * original.m(), "edge budget blown");
        assert!(!h.has_duplicate_weights());
        let rg = rank_weights(h).unwrap();
        let solved = if original.directed() {
            sweep_apnp(&rg)
        } else {
            undirected_basic(&rg)
        };
        let lifted = lift_answers(&solved, &map).unwrap();
        let want = reference_apnp(original);
        assert!(
            lifted.same_values(&want),
            "lifted answers disagree with ground truth"
        );
    }

    #[test]
    fn equal_weight_chain_still_chains() {
        let g = parse_graph("3 2 directed\n0 1 4\n1 2 4\n").unwrap();
        let (h, map) = reduce_directed(&g).unwrap();
        // Two singleton-component crossings, source piece first.
        assert_eq!(reduced_edges(&h), [(0, 1, 0), (1, 2, 1)]);
        assert_eq!(map.lift_weight(0), Ok(4));
        assert_eq!(map.lift_weight(1), Ok(4));
        assert_eq!(
            map.lift_weight(2),
            Err(Error::UnknownSyntheticWeight { weight: 2 })
        );
        check_against_reference(&g);
        // And the chained pair really survives the round trip.
        let rg = rank_weights(h).unwrap();
        let lifted = lift_answers(&sweep_apnp(&rg), &map).unwrap();
        assert_eq!(lifted.opt(0, 2), Some(4));
    }

    #[test]
    fn two_cycle_keeps_both_diagonals() {
        let g = parse_graph("2 2 directed multi\n0 1 7\n1 0 7\n").unwrap();
        let (h, map) = reduce_directed(&g).unwrap();
        // Gather, scatter, then the closing return edge.
        assert_eq!(reduced_edges(&h), [(1, 0, 0), (0, 1, 1), (1, 0, 2)]);
        let lifted = lift_answers(&sweep_apnp(&rank_weights(h).unwrap()), &map).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_eq!(lifted.opt(i, j), Some(7), "({i},{j})");
        }
        check_against_reference(&g);
    }

    #[test]
    fn undirected_equal_triangle() {
        let g = parse_graph("3 3 undirected\n0 1 5\n1 2 5\n0 2 5\n").unwrap();
        let (h, map) = reduce_undirected(&g).unwrap();
        assert_eq!(reduced_edges(&h), [(0, 1, 0), (0, 2, 1), (2, 0, 2), (1, 0, 3)]);
        assert_eq!(map.classes().len(), 1);
        assert_eq!(
            map.classes()[0].components,
            [ClassComponent { assembly: 0, members: alloc::vec![0, 1, 2] }]
        );
        let lifted =
            lift_answers(&undirected_basic(&rank_weights(h).unwrap()), &map).unwrap();
        assert_eq!(lifted.opt(1, 2), Some(5));
        check_against_reference(&g);
    }

    #[test]
    fn weight_windows_stay_disjoint_across_classes() {
        let g = parse_graph("4 3 directed\n0 1 4\n1 2 4\n2 3 9\n").unwrap();
        let (h, map) = reduce_directed(&g).unwrap();
        // Class of 4 owns slots [0, 4); class of 9 starts at 4.
        assert_eq!(reduced_edges(&h), [(0, 1, 0), (1, 2, 1), (2, 3, 4)]);
        assert_eq!(map.lift_weight(4), Ok(9));
        check_against_reference(&g);
    }

    #[test]
    fn directed_scc_gadget_shape() {
        // Two 2-cycles of weight 3 joined by a crossing edge, plus a
        // heavier lone edge.
        let text = "4 6 directed multi\n0 1 3\n1 0 3\n2 3 3\n3 2 3\n1 2 3\n3 0 8\n";
        let g = parse_graph(text).unwrap();
        let (h, map) = reduce_directed(&g).unwrap();
        let info = &map.classes()[0];
        assert_eq!(info.weight, 3);
        assert_eq!(info.components.len(), 2);
        assert_eq!(info.components[0].members, alloc::vec![0, 1]);
        assert_eq!(info.components[1].members, alloc::vec![2, 3]);
        // 5 class edges -> gather 2 + crossing 1 + scatter 2 + returns 2 = 7 <= 10.
        assert_eq!(map.classes()[1].weight, 8);
        check_against_reference(&g);
        let _ = h;
    }

    #[test]
    fn ties_on_undirected_star() {
        let g = parse_graph("4 3 undirected\n1 0 6\n2 0 6\n3 0 6\n").unwrap();
        check_against_reference(&g);
    }

    #[test]
    fn lone_undirected_tied_pair_needs_one_spoke() {
        let g = parse_graph("4 2 undirected\n0 1 5\n2 3 5\n").unwrap();
        let (h, _) = reduce_undirected(&g).unwrap();
        // Two 2-vertex components: one spoke each, the bounce covers returns.
        assert_eq!(reduced_edges(&h), [(0, 1, 0), (2, 3, 1)]);
        check_against_reference(&g);
    }

    #[test]
    fn dedupe_keeps_minimum_code_per_pair() {
        let g = parse_graph("3 4 directed multi\n0 1 7\n0 1 3\n0 1 9\n1 2 5\n").unwrap();
        let rg = rank_weights(g).unwrap();
        let kept = dedupe_parallel_min(&rg, &[0, 1, 2, 3]);
        assert_eq!(kept, [1, 3], "min-weight parallel plus the lone edge, by code");
    }

    #[test]
    fn orientation_is_enforced() {
        let gd = parse_graph("2 1 directed\n0 1 1\n").unwrap();
        let gu = parse_graph("2 1 undirected\n0 1 1\n").unwrap();
        assert!(matches!(reduce_directed(&gu), Err(Error::Orientation { .. })));
        assert!(matches!(reduce_undirected(&gd), Err(Error::Orientation { .. })));
    }

    #[test]
    fn tarjan_matches_a_known_condensation() {
        // 0 <-> 1 -> 2 <-> 3, plus isolated 4.
        let adj: Vec<Vec<usize>> = alloc::vec![
            alloc::vec![1],
            alloc::vec![0, 2],
            alloc::vec![3],
            alloc::vec![2],
            alloc::vec![],
        ];
        let (comp_of, comps) = tarjan_sccs(&adj);
        assert_eq!(comps.len(), 3);
        assert_eq!(comp_of[0], comp_of[1]);
        assert_eq!(comp_of[2], comp_of[3]);
        assert_ne!(comp_of[0], comp_of[2]);
        // Sink SCC {2,3} must be emitted before {0,1}.
        assert!(comp_of[2] < comp_of[0]);
    }
}
