//! Recursive partition of the edge set by weight-code prefix.
//!
//! Every node owns the edges whose codes extend its prefix and splits them
//! three ways, with degrees always measured inside the node's own edge set:
//! edges leaving a source of outdegree at most `threshold` are `low` (cheap
//! to relax one at a time), remaining edges into a destination of indegree
//! at most `threshold` are `gamma` (handled by an incremental counting
//! struct), and the dense rest is `high`, split by the next code bit and
//! recursed. A full-length prefix holds at most one edge, which is
//! necessarily low, so recursion always terminates.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bits::{code_interval, BitString};
use crate::graph::RankedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRole {
    Low,
    Gamma,
}

#[derive(Debug)]
pub struct GammaSet {
    /// Ascending by code.
    pub edges: Vec<u32>,
    /// Per destination, ascending by code; each list has at most
    /// `threshold` entries by construction.
    pub in_by_dst: BTreeMap<u32, Vec<u32>>,
}

#[derive(Debug)]
pub struct PartitionNode {
    pub prefix: BitString,
    /// Inclusive code interval covered by the prefix.
    pub interval: (u64, u64),
    /// Size of the node's input edge set.
    pub input_len: u32,
    /// Low edges grouped by source, ascending by code.
    pub low_by_src: BTreeMap<u32, Vec<u32>>,
    pub gamma: Option<GammaSet>,
    /// Input handed to child 1; the batch step relaxes exactly this set.
    pub h1_edges: Vec<u32>,
    pub h_lens: [u32; 2],
    pub children: [Option<u32>; 2],
}

#[derive(Debug)]
pub struct PartitionTree {
    threshold: u32,
    width: u32,
    nodes: Vec<PartitionNode>,
    /// Where each edge finally landed: its role and node id.
    place: Vec<(EdgeRole, u32)>,
}

/// Code bit at `depth`, counting from the most significant of `width` bits.
fn code_bit(code: u32, width: u32, depth: u32) -> bool {
    code >> (width - 1 - depth) & 1 == 1
}

pub fn divide_edges(rg: &RankedGraph, threshold: u32) -> PartitionTree {
    assert!(threshold >= 1);
    let mut tree = PartitionTree {
        threshold,
        width: rg.width(),
        nodes: Vec::new(),
        place: alloc::vec![(EdgeRole::Low, u32::MAX); rg.m() as usize],
    };
    if rg.m() > 0 {
        let all: Vec<u32> = rg.edges_by_code().to_vec();
        build(&mut tree, rg, BitString::EMPTY, all);
    }
    tree
}

/// Builds the node for `prefix` from `input` (ascending by code), returning
/// its id. Children are built depth first after the node is placed, so ids
/// are preorder.
fn build(tree: &mut PartitionTree, rg: &RankedGraph, prefix: BitString, input: Vec<u32>) -> u32 {
    let cap = tree.threshold;
    let mut outdeg: BTreeMap<u32, u32> = BTreeMap::new();
    let mut indeg: BTreeMap<u32, u32> = BTreeMap::new();
    for &e in &input {
        *outdeg.entry(rg.edge(e).src).or_default() += 1;
        *indeg.entry(rg.edge(e).dst).or_default() += 1;
    }

    let id = tree.nodes.len() as u32;
    let mut low_by_src: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut gamma_edges: Vec<u32> = Vec::new();
    let mut in_by_dst: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut high: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
    for &e in &input {
        let edge = rg.edge(e);
        if outdeg[&edge.src] <= cap {
            low_by_src.entry(edge.src).or_default().push(e);
            tree.place[e as usize] = (EdgeRole::Low, id);
        } else if indeg[&edge.dst] <= cap {
            gamma_edges.push(e);
            in_by_dst.entry(edge.dst).or_default().push(e);
            tree.place[e as usize] = (EdgeRole::Gamma, id);
        } else {
            debug_assert!(
                prefix.len() < tree.width,
                "full-length prefix holds one edge, which must be low"
            );
            high[code_bit(rg.code(e), tree.width, prefix.len()) as usize].push(e);
        }
    }
    debug_assert!(low_by_src.values().all(|v| v.len() <= cap as usize));
    debug_assert!(in_by_dst.values().all(|v| v.len() <= cap as usize));

    tree.nodes.push(PartitionNode {
        prefix,
        interval: code_interval(prefix, tree.width),
        input_len: input.len() as u32,
        low_by_src,
        gamma: (!gamma_edges.is_empty())
            .then_some(GammaSet { edges: gamma_edges, in_by_dst }),
        h1_edges: high[1].clone(),
        h_lens: [high[0].len() as u32, high[1].len() as u32],
        children: [None, None],
    });

    let [h0, h1] = high;
    if !h0.is_empty() {
        let child = build(tree, rg, prefix.push(false), h0);
        tree.nodes[id as usize].children[0] = Some(child);
    }
    if !h1.is_empty() {
        let child = build(tree, rg, prefix.push(true), h1);
        tree.nodes[id as usize].children[1] = Some(child);
    }
    id
}

impl PartitionTree {
    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: u32) -> &PartitionNode {
        &self.nodes[id as usize]
    }

    pub fn root(&self) -> Option<&PartitionNode> {
        self.nodes.first()
    }

    /// Role and node where the edge landed.
    pub fn place(&self, edge: u32) -> (EdgeRole, u32) {
        self.place[edge as usize]
    }

    /// Node ids on the root-to-leaf walk whose intervals contain `code`,
    /// shortest prefix first.
    pub fn path_of(&self, code: u64, out: &mut Vec<u32>) {
        out.clear();
        if self.nodes.is_empty() {
            return;
        }
        let mut id = 0u32;
        loop {
            out.push(id);
            let node = &self.nodes[id as usize];
            if node.prefix.len() == self.width {
                return;
            }
            let bit = code_bit(code as u32, self.width, node.prefix.len());
            match node.children[bit as usize] {
                Some(child) => id = child,
                None => return,
            }
        }
    }

    /// One line per node, shortest prefixes first, value order within a
    /// length: `prefix |low| |gamma| |h0| |h1|`.
    pub fn dump(&self) -> String {
        let mut order: Vec<&PartitionNode> = self.nodes.iter().collect();
        order.sort_by_key(|n| (n.prefix.len(), n.prefix.value()));
        let mut out = String::new();
        for n in order {
            let low: usize = n.low_by_src.values().map(Vec::len).sum();
            let gamma = n.gamma.as_ref().map_or(0, |g| g.edges.len());
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                n.prefix, low, gamma, n.h_lens[0], n.h_lens[1]
            ));
        }
        out
    }

    /// Recomputes the partition's defining properties from scratch and
    /// panics on any violation. Returns the node's reconstructed input set
    /// (ascending by code) so callers can cross-check the root against the
    /// whole graph.
    pub fn assert_invariants(&self, rg: &RankedGraph) -> Vec<u32> {
        if self.nodes.is_empty() {
            assert_eq!(rg.m(), 0, "nonempty graph lost its partition");
            return Vec::new();
        }
        let input = self.check_node(rg, 0);
        assert_eq!(
            input,
            rg.edges_by_code(),
            "root input must be every edge, ascending by code"
        );
        input
    }

    fn check_node(&self, rg: &RankedGraph, id: u32) -> Vec<u32> {
        let cap = self.threshold as usize;
        let node = &self.nodes[id as usize];

        let mut input: Vec<u32> = Vec::new();
        for (src, list) in &node.low_by_src {
            assert!(!list.is_empty() && list.len() <= cap, "low list size");
            assert!(list.windows(2).all(|w| rg.code(w[0]) < rg.code(w[1])));
            assert!(list.iter().all(|&e| rg.edge(e).src == *src));
            assert!(list.iter().all(|&e| self.place[e as usize] == (EdgeRole::Low, id)));
            input.extend(list);
        }
        if let Some(g) = &node.gamma {
            assert!(!g.edges.is_empty(), "gamma present but empty");
            assert!(g.edges.windows(2).all(|w| rg.code(w[0]) < rg.code(w[1])));
            let mut from_lists: Vec<u32> = Vec::new();
            for (dst, list) in &g.in_by_dst {
                assert!(!list.is_empty() && list.len() <= cap, "gamma in-list size");
                assert!(list.windows(2).all(|w| rg.code(w[0]) < rg.code(w[1])));
                assert!(list.iter().all(|&e| rg.edge(e).dst == *dst));
                from_lists.extend(list);
            }
            from_lists.sort_unstable_by_key(|&e| rg.code(e));
            assert_eq!(from_lists, g.edges, "gamma in-lists disagree with edge list");
            assert!(g.edges.iter().all(|&e| self.place[e as usize] == (EdgeRole::Gamma, id)));
            input.extend(&g.edges);
        }
        for side in 0..2 {
            let child_input = match node.children[side] {
                Some(c) => {
                    let child = &self.nodes[c as usize];
                    assert_eq!(child.prefix, node.prefix.push(side == 1));
                    assert!(node.interval.0 <= child.interval.0);
                    assert!(child.interval.1 <= node.interval.1);
                    self.check_node(rg, c)
                }
                None => Vec::new(),
            };
            assert_eq!(child_input.len(), node.h_lens[side] as usize);
            if side == 1 {
                assert_eq!(child_input, node.h1_edges, "stored batch input is stale");
            }
            input.extend(child_input);
        }

        input.sort_unstable_by_key(|&e| rg.code(e));
        assert_eq!(input.len(), node.input_len as usize, "partition dropped or duplicated edges");

        // Degrees within this very input decide the classification.
        let mut outdeg: BTreeMap<u32, usize> = BTreeMap::new();
        let mut indeg: BTreeMap<u32, usize> = BTreeMap::new();
        for &e in &input {
            *outdeg.entry(rg.edge(e).src).or_default() += 1;
            *indeg.entry(rg.edge(e).dst).or_default() += 1;
        }
        for &e in &input {
            let edge = rg.edge(e);
            let code = rg.code(e) as u64;
            assert!(node.interval.0 <= code && code <= node.interval.1, "code outside prefix");
            let wants = if outdeg[&edge.src] <= cap {
                Some(EdgeRole::Low)
            } else if indeg[&edge.dst] <= cap {
                Some(EdgeRole::Gamma)
            } else {
                None
            };
            match wants {
                Some(role) => assert_eq!(
                    self.place[e as usize],
                    (role, id),
                    "edge classified against its degrees"
                ),
                None => {
                    let went = code_bit(rg.code(e), self.width, node.prefix.len());
                    assert!(node.children[went as usize].is_some(), "high edge lost");
                }
            }
        }
        input
    }
}
