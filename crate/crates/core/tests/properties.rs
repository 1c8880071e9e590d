//! Randomized invariants across the pipeline: generated instances evaluate
//! exactly, the excess-value update stays on the simplex, mixture grids
//! enumerate what they claim, and the canonical serialization is a fixed
//! point of parse-then-print.

use proptest::prelude::*;
use sgia_core::format::{instance_from_str, instance_to_string};
use sgia_core::instances::{enumerable_catalog, reference_random, validate_instance};
use sgia_core::perfect_info::{transform_to_pi_ppme, u_map, TauReading};
use sgia_core::profile::StrategyProfile;
use sgia_core::solver::simplex_grid;
use sgia_core::value::{bellman_residuals, evaluate_with_beliefs, SolveMethod};
use sgia_core::verifier::{verify_ppme_direct, VerifyOptions};
use sgia_core::{tol, Beliefs, SignalingFamily};

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out = 1usize;
    for j in 0..k {
        out = out * (n - j) / (j + 1);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Generated instances are structurally valid and their exact evaluation
    /// satisfies the recursions to working precision, with values inside the
    /// geometric payoff bound.
    #[test]
    fn generated_instances_evaluate_exactly(seed in 0u64..10_000) {
        let inst = reference_random(seed);
        prop_assert!(validate_instance(&inst).is_valid());

        let beliefs = Beliefs::new(&inst.game, &inst.family, &inst.scheme);
        let triple = evaluate_with_beliefs(&beliefs, &inst.profile, SolveMethod::Direct).unwrap();
        let residual = bellman_residuals(&beliefs, &inst.profile, &triple);
        prop_assert!(residual <= tol::BELLMAN_RESIDUAL, "residual {residual:.3e}");

        let j_cap = beliefs.reward_cost_bound() / (1.0 - inst.game.discount) + 1e-9;
        for j_i in &triple.j {
            for &x in j_i {
                prop_assert!(x.abs() <= j_cap, "|J| = {} exceeds {}", x.abs(), j_cap);
            }
        }
    }

    /// Printing, parsing, and printing again yields the same bytes: the
    /// canonical form is a fixed point, so files never churn under rewrites.
    #[test]
    fn canonical_serialization_is_a_fixed_point(seed in 0u64..10_000) {
        let inst = reference_random(seed);
        let once = instance_to_string(&inst).unwrap();
        let again = instance_to_string(&instance_from_str(&once).unwrap()).unwrap();
        prop_assert_eq!(once, again);
    }

    /// Verification verdicts are bit-reproducible run to run even though the
    /// constraint sweep is parallel inside.
    #[test]
    fn verification_is_deterministic(which in 0usize..5) {
        let inst = &enumerable_catalog()[which];
        let opts = VerifyOptions::default();
        let a = verify_ppme_direct(&inst.game, &inst.family, &inst.scheme, &inst.profile, opts)
            .unwrap();
        let b = verify_ppme_direct(&inst.game, &inst.family, &inst.scheme, &inst.profile, opts)
            .unwrap();
        prop_assert_eq!(a.z_value.to_bits(), b.z_value.to_bits());
        prop_assert_eq!(a.is_ppme, b.is_ppme);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The excess-value update maps arbitrary rule families to rule families:
    /// every output row is a probability distribution, under both readings,
    /// even when the reference values are deflated to force movement.
    #[test]
    fn excess_update_preserves_the_simplex(
        raw in prop::collection::vec(0.01f64..1.0, 2 * 32),
        deflate in prop::collection::vec(0.0f64..4.0, 2),
    ) {
        let inst = enumerable_catalog()
            .into_iter()
            .find(|i| i.name == "state-guess-iid")
            .unwrap();
        let t = transform_to_pi_ppme(&inst.game, &inst.family, &inst.scheme, &inst.profile)
            .unwrap();

        // Random family over the revealed-state types: normalize raw pairs.
        let mut rule = Vec::with_capacity(2);
        for i in 0..2 {
            let slice = &raw[i * 32..(i + 1) * 32];
            let mut rows = Vec::with_capacity(32);
            for pair in slice.chunks(2) {
                let total = pair[0] + pair[1];
                rows.push(pair[0] / total);
                rows.push(pair[1] / total);
            }
            rule.push(rows);
        }
        let family = SignalingFamily {
            n_types: vec![2, 2],
            n_cogs: vec![1, 1],
            history_free: false,
            rule,
        };
        let assembled = StrategyProfile {
            beta: vec![vec![0; inst.game.histories()]; 2],
            pi: t.profile.pi.clone(),
        };

        let pi_fam = &t.scheme.family;
        let mut j_star =
            evaluate_with_beliefs(&Beliefs::new(&inst.game, pi_fam, &t.cost), &t.profile, SolveMethod::Direct)
                .unwrap()
                .j;
        for (j_i, d) in j_star.iter_mut().zip(&deflate) {
            for x in j_i.iter_mut() {
                *x -= d;
            }
        }

        for reading in [TauReading::Marginal, TauReading::PerState] {
            let updated = u_map(&inst.game, &family, &t.cost, &assembled, &j_star, reading)
                .unwrap();
            for rule_i in &updated.rule {
                for row in rule_i.chunks(2) {
                    let total: f64 = row.iter().sum();
                    prop_assert!((total - 1.0).abs() <= tol::SIMPLEX);
                    prop_assert!(row.iter().all(|&p| p >= -tol::SIMPLEX));
                }
            }
        }
    }

    /// The mixture grid enumerates exactly the distributions with weights in
    /// multiples of `1/(grid-1)`: every row on the simplex, no duplicates,
    /// and the count matches the stars-and-bars formula.
    #[test]
    fn mixture_grids_enumerate_the_simplex(n in 1usize..5, grid in 1usize..6) {
        let rows = simplex_grid(n, grid);
        let expected = if grid <= 2 {
            n
        } else {
            binomial(grid - 2 + n, n - 1)
        };
        prop_assert_eq!(rows.len(), expected);
        for row in &rows {
            prop_assert_eq!(row.len(), n);
            let total: f64 = row.iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            prop_assert!(row.iter().all(|&p| p >= 0.0));
        }
        let mut keys: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|p| p.to_bits()).collect())
            .collect();
        keys.sort();
        keys.dedup();
        prop_assert_eq!(keys.len(), rows.len());
    }
}
