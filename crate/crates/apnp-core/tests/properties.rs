//! Randomized invariants over whole pipelines: solvers against reference
//! solvers, rewrites against the class-closure oracle, and the structural
//! contracts of the partition, the balancing pass, and the counting
//! products. Instances come from the crate's own seeded generator so any
//! failure prints a reproducible (spec, seed) pair.

use apnp_core::balance::{balance, Side};
use apnp_core::boolmat::{mul_count, mul_count_blocked, BitMatrix, MulKernel};
use apnp_core::gen::{generate, GenSpec, WeightMode};
use apnp_core::graph::rank_weights;
use apnp_core::oracle::{naive_apnp, reference_apnp, sweep_apnp, undirected_basic};
use apnp_core::partition::divide_edges;
use apnp_core::reduce::{lift_answers, reduce_directed, reduce_undirected};
use apnp_core::solver::{check_witnesses, solve_directed};
use apnp_core::undirected::solve_undirected;
use apnp_core::{Graph, SolverConfig};
use proptest::prelude::*;

fn directed_distinct(n: u32, mfrac: f64, seed: u64) -> Graph {
    let max = n * (n - 1);
    let m = ((mfrac * max as f64) as u32).clamp(1, max);
    generate(
        &GenSpec { n, m, directed: true, multi: false, weights: WeightMode::Distinct },
        seed,
    )
    .expect("spec is satisfiable")
}

fn undirected_distinct(n: u32, mfrac: f64, seed: u64) -> Graph {
    let max = n * (n - 1) / 2;
    let m = ((mfrac * max as f64) as u32).clamp(1, max);
    generate(
        &GenSpec { n, m, directed: false, multi: false, weights: WeightMode::Distinct },
        seed,
    )
    .expect("spec is satisfiable")
}

fn tied_multi(n: u32, directed: bool, classes: u32, seed: u64) -> Graph {
    let m = (classes + 2 + (seed % 7) as u32).min(3 * n);
    generate(
        &GenSpec { n, m, directed, multi: true, weights: WeightMode::Ties { classes } },
        seed,
    )
    .expect("spec is satisfiable")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn directed_solver_and_oracles_agree(
        n in 2u32..13,
        mfrac in 0.05f64..1.0,
        seed in any::<u64>(),
        t in 0.0f64..=1.0,
    ) {
        let g = directed_distinct(n, mfrac, seed);
        let rg = rank_weights(g).unwrap();
        let want = sweep_apnp(&rg);
        prop_assert!(naive_apnp(&rg).same_values(&want), "the two oracles split");
        let cfg = SolverConfig { t_param: Some(t), check_products: true, ..SolverConfig::default() };
        let got = solve_directed(&rg, &cfg);
        prop_assert!(got.same_values(&want), "solver diverged from the oracles");
        check_witnesses(&rg, &got);
    }

    #[test]
    fn undirected_solver_tracks_the_basic_reference(
        n in 2u32..13,
        mfrac in 0.05f64..1.0,
        seed in any::<u64>(),
    ) {
        let g = undirected_distinct(n, mfrac, seed);
        let rg = rank_weights(g.clone()).unwrap();
        let want = undirected_basic(&rg);
        let got = solve_undirected(&g, seed ^ 0xabcd).unwrap();
        prop_assert!(got.same_values(&want));
    }

    #[test]
    fn directed_tie_rewrite_is_answer_preserving(
        n in 2u32..9,
        classes in 1u32..5,
        seed in any::<u64>(),
    ) {
        let g = tied_multi(n, true, classes, seed);
        let (reduced, map) = reduce_directed(&g).unwrap();
        prop_assert!(reduced.m() <= 2 * g.m(), "rewrite exceeded its edge budget");
        prop_assert!(!reduced.has_duplicate_weights());
        let rg = rank_weights(reduced).unwrap();
        let lifted = lift_answers(&sweep_apnp(&rg), &map).unwrap();
        prop_assert!(lifted.same_values(&reference_apnp(&g)));
    }

    #[test]
    fn undirected_tie_rewrite_is_answer_preserving(
        n in 2u32..9,
        classes in 1u32..5,
        seed in any::<u64>(),
    ) {
        let g = tied_multi(n, false, classes, seed);
        let (reduced, map) = reduce_undirected(&g).unwrap();
        prop_assert!(reduced.m() <= 2 * g.m(), "rewrite exceeded its edge budget");
        prop_assert!(!reduced.has_duplicate_weights());
        let rg = rank_weights(reduced).unwrap();
        let lifted = lift_answers(&undirected_basic(&rg), &map).unwrap();
        prop_assert!(lifted.same_values(&reference_apnp(&g)));
    }

    #[test]
    fn full_tied_pipeline_through_the_fast_solvers(
        n in 2u32..8,
        classes in 1u32..4,
        seed in any::<u64>(),
    ) {
        let want_dir = reference_apnp(&tied_multi(n, true, classes, seed));
        let gd = tied_multi(n, true, classes, seed);
        let (reduced, map) = reduce_directed(&gd).unwrap();
        let rg = rank_weights(reduced).unwrap();
        let cfg = SolverConfig { t_param: Some(0.5), check_products: true, ..SolverConfig::default() };
        let lifted = lift_answers(&solve_directed(&rg, &cfg), &map).unwrap();
        prop_assert!(lifted.same_values(&want_dir));

        let gu = tied_multi(n, false, classes, seed);
        let got = solve_undirected(&gu, seed).unwrap();
        prop_assert!(got.same_values(&reference_apnp(&gu)));
    }

    #[test]
    fn partition_invariants_hold(
        n in 2u32..13,
        mfrac in 0.05f64..1.0,
        seed in any::<u64>(),
        cap in 1u32..9,
    ) {
        let g = directed_distinct(n, mfrac, seed);
        let rg = rank_weights(g).unwrap();
        let tree = divide_edges(&rg, cap);
        tree.assert_invariants(&rg);
    }

    #[test]
    fn balance_invariants_hold(
        n in 2u32..13,
        mfrac in 0.05f64..1.0,
        seed in any::<u64>(),
        cap in 1u32..9,
    ) {
        let g = directed_distinct(n, mfrac, seed);
        let rg = rank_weights(g).unwrap();
        let all: Vec<u32> = (0..rg.m()).collect();
        for side in [Side::Out, Side::In] {
            let bal = balance(&rg, &all, side, cap);
            bal.assert_invariants(&rg, &all);
        }
        // subsets must balance as well as full sets
        let half: Vec<u32> = all.iter().copied().step_by(2).collect();
        let bal = balance(&rg, &half, Side::Out, cap);
        bal.assert_invariants(&rg, &half);
    }

    #[test]
    fn counting_kernels_agree(
        rows in 1usize..70,
        inner in 1usize..70,
        cols in 1usize..70,
        seed in any::<u64>(),
    ) {
        let mut rng = apnp_core::rng::SplitMix64::new(seed);
        let mut a = BitMatrix::new(rows, inner);
        let mut b = BitMatrix::new(inner, cols);
        for r in 0..rows {
            for c in 0..inner {
                if rng.next_below(3) == 0 {
                    a.set(r, c);
                }
            }
        }
        for r in 0..inner {
            for c in 0..cols {
                if rng.next_below(3) == 0 {
                    b.set(r, c);
                }
            }
        }
        let mut want = vec![0u32; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                for k in 0..inner {
                    if a.get(r, k) && b.get(k, c) {
                        want[r * cols + c] += 1;
                    }
                }
            }
        }
        let packed = mul_count(&a, &b, MulKernel::Packed);
        let strassen = mul_count(&a, &b, MulKernel::Strassen);
        let blocked = mul_count_blocked(&a, &b, MulKernel::Packed, 64);
        for r in 0..rows {
            for c in 0..cols {
                prop_assert_eq!(packed.get(r, c), want[r * cols + c]);
                prop_assert_eq!(strassen.get(r, c), want[r * cols + c]);
                prop_assert_eq!(blocked.get(r, c), want[r * cols + c]);
            }
        }
    }
}
