//! Seeded random instances for tests and benchmarks. The same spec and
//! seed always produce byte-identical graphs, so failures quoted by seed
//! are reproducible anywhere.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Pairwise distinct weights with irregular gaps.
    Distinct,
    /// Exactly this many weight classes, every class nonempty.
    Ties { classes: u32 },
}

#[derive(Debug, Clone, Copy)]
pub struct GenSpec {
    pub n: u32,
    pub m: u32,
    pub directed: bool,
    pub multi: bool,
    pub weights: WeightMode,
}

fn max_simple_edges(n: u32, directed: bool) -> u64 {
    let n = n as u64;
    let ordered = n * n.saturating_sub(1);
    if directed {
        ordered
    } else {
        ordered / 2
    }
}

pub fn generate(spec: &GenSpec, seed: u64) -> Result<Graph> {
    let invalid = |msg: alloc::string::String| Err(Error::Invalid { msg });
    if spec.m > 0 && spec.n < 2 {
        return invalid(format!("{} vertices cannot host an edge", spec.n));
    }
    if !spec.multi {
        let cap = max_simple_edges(spec.n, spec.directed);
        if spec.m as u64 > cap {
            return invalid(format!(
                "{} edges exceed the {} simple pairs available",
                spec.m, cap
            ));
        }
    }
    if let WeightMode::Ties { classes } = spec.weights {
        if classes == 0 || classes > spec.m {
            return invalid(format!(
                "{} weight classes cannot cover {} edges",
                classes, spec.m
            ));
        }
    }

    let mut rng = SplitMix64::new(seed);
    let pairs = sample_pairs(spec, &mut rng);
    let weights = sample_weights(spec, &mut rng);

    let mut g = if spec.multi {
        Graph::new_multi(spec.n, spec.directed)
    } else {
        Graph::new(spec.n, spec.directed)
    };
    for (&(src, dst), &w) in pairs.iter().zip(&weights) {
        g.add_edge(src, dst, w);
    }
    Ok(g)
}

fn sample_pairs(spec: &GenSpec, rng: &mut SplitMix64) -> Vec<(u32, u32)> {
    let n = spec.n as u64;
    let m = spec.m as usize;
    if spec.multi {
        let mut out = Vec::with_capacity(m);
        while out.len() < m {
            let a = rng.next_below(n) as u32;
            let b = rng.next_below(n) as u32;
            if a != b {
                out.push((a, b));
            }
        }
        return out;
    }
    let cap = max_simple_edges(spec.n, spec.directed);
    if (spec.m as u64) * 3 >= cap {
        // dense request: shuffle the full pair universe instead of rejecting
        let mut all = Vec::with_capacity(cap as usize);
        for a in 0..spec.n {
            for b in 0..spec.n {
                if a != b && (spec.directed || a < b) {
                    all.push((a, b));
                }
            }
        }
        rng.shuffle(&mut all);
        all.truncate(m);
        if !spec.directed {
            // the universe lists a < b; flip a coin so emitted orientation
            // carries no such pattern
            for pair in all.iter_mut() {
                if rng.next_below(2) == 1 {
                    *pair = (pair.1, pair.0);
                }
            }
        }
        return all;
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let a = rng.next_below(n) as u32;
        let b = rng.next_below(n) as u32;
        if a == b {
            continue;
        }
        let key = if spec.directed { (a, b) } else { (a.min(b), a.max(b)) };
        if seen.insert(key) {
            out.push((a, b));
        }
    }
    out
}

fn sample_weights(spec: &GenSpec, rng: &mut SplitMix64) -> Vec<i64> {
    let m = spec.m as usize;
    let mut base = Vec::with_capacity(m);
    let mut w = 0i64;
    let distinct_count = match spec.weights {
        WeightMode::Distinct => m,
        WeightMode::Ties { classes } => classes as usize,
    };
    for _ in 0..distinct_count {
        w += 1 + rng.next_below(5) as i64;
        base.push(w);
    }
    match spec.weights {
        WeightMode::Distinct => {
            rng.shuffle(&mut base);
            base
        }
        WeightMode::Ties { classes } => {
            let mut picks: Vec<usize> = (0..classes as usize).collect();
            for _ in classes as usize..m {
                picks.push(rng.next_below(classes as u64) as usize);
            }
            rng.shuffle(&mut picks);
            picks.into_iter().map(|c| base[c]).collect()
        }
    }
}
