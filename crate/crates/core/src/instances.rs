//! Bundled problem instances.
//!
//! Two groups live here. `reference_random` draws a seeded two-agent,
//! two-state instance with informative signals and strictly positive
//! transitions; it is the workhorse for exact-versus-sampled value checks and
//! determinism tests. The enumerable catalog pins five small instances whose
//! equilibria are known in closed form, sized so exhaustive profile
//! enumeration stays cheap; those carry their equilibrium profile.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{CostKind, CostScheme};
use crate::game::{validate_base_game, BaseGame, ValidationReport};
use crate::profile::{validate_profile, StrategyProfile};
use crate::signaling::{validate_signaling_family, SignalingFamily};

/// A complete problem: game, signaling menus, cost scheme, and a profile.
///
/// Catalog instances pin an equilibrium profile; random instances carry an
/// arbitrary valid one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub game: BaseGame,
    pub family: SignalingFamily,
    pub scheme: CostScheme,
    pub profile: StrategyProfile,
}

/// Validate every component and their cross-constraints.
///
/// Later stages are skipped once an earlier one fails, since their index
/// arithmetic presumes consistent dimensions.
pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut report = validate_base_game(&inst.game);
    if !report.is_valid() {
        return report;
    }
    report.merge(validate_signaling_family(&inst.game, &inst.family));
    if !report.is_valid() {
        return report;
    }
    report.merge(crate::cost::validate_cost_scheme(
        &inst.game,
        &inst.family,
        &inst.scheme,
    ));
    if !report.is_valid() {
        return report;
    }
    report.merge(validate_profile(&inst.game, &inst.family, &inst.profile));
    report
}

fn random_simplex_row<R: Rng>(rng: &mut R, len: usize, floor: f64) -> Vec<f64> {
    let mut row: Vec<f64> = (0..len).map(|_| rng.gen_range(floor..1.0)).collect();
    let total: f64 = row.iter().sum();
    for x in row.iter_mut() {
        *x /= total;
    }
    row
}

/// Seeded random two-agent instance: two states, binary actions, binary
/// types, a two-item menu per agent (a near-flat rule and an informative
/// one), strictly positive transitions, and small state-action costs.
pub fn reference_random(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_agents = 2;
    let n_states = 2;
    let n_actions = vec![2, 2];
    let joint_actions = 4;
    let histories = n_states * joint_actions;

    let rewards = (0..n_agents)
        .map(|_| {
            (0..n_states * joint_actions)
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect::<Vec<f64>>()
        })
        .collect::<Vec<_>>()
        .concat();
    let mut transition = Vec::with_capacity(histories * n_states);
    for _ in 0..histories {
        transition.extend(random_simplex_row(&mut rng, n_states, 0.1));
    }
    let initial = random_simplex_row(&mut rng, n_states, 0.1);
    let game = BaseGame {
        n_agents,
        n_states,
        n_actions,
        rewards,
        transition,
        initial,
        discount: 0.9,
    };

    let mut blocks = Vec::with_capacity(n_agents);
    for _ in 0..n_agents {
        // Menu item 0: a state-independent lottery. Menu item 1: informative,
        // with likelihoods bounded away from zero and one.
        let q = rng.gen_range(0.3..0.7);
        let hi = rng.gen_range(0.6..0.95);
        let lo = rng.gen_range(0.05..0.4);
        let mut block = Vec::with_capacity(n_states * 2 * 2);
        for s in 0..n_states {
            block.extend_from_slice(&[q, 1.0 - q]);
            let p = if s == 0 { hi } else { lo };
            block.extend_from_slice(&[p, 1.0 - p]);
        }
        blocks.push(block);
    }
    let family = SignalingFamily::broadcast(vec![2, 2], vec![2, 2], blocks, histories);

    let tables = (0..n_agents)
        .map(|_| {
            (0..n_states * 2)
                .map(|_| -rng.gen_range(0.0..0.15))
                .collect()
        })
        .collect();
    let scheme = CostScheme {
        kind: CostKind::Sab,
        tables,
    };

    let beta = (0..n_agents)
        .map(|_| (0..histories).map(|_| rng.gen_range(0..2usize)).collect())
        .collect();
    let pi = (0..n_agents)
        .map(|_| {
            let mut flat = Vec::with_capacity(histories * 2 * 2);
            for _ in 0..histories * 2 {
                flat.extend(random_simplex_row(&mut rng, 2, 0.05));
            }
            flat
        })
        .collect();
    let profile = StrategyProfile { beta, pi };

    Instance {
        name: format!("reference-random-{seed}"),
        game,
        family,
        scheme,
        profile,
    }
}

fn single_state_game(r0: [f64; 4], r1: [f64; 4], discount: f64) -> BaseGame {
    let histories = 4;
    BaseGame {
        n_agents: 2,
        n_states: 1,
        n_actions: vec![2, 2],
        rewards: [r0, r1].concat(),
        transition: vec![1.0; histories],
        initial: vec![1.0],
        discount,
    }
}

fn lottery_family(histories: usize, lotteries: [[f64; 2]; 2]) -> SignalingFamily {
    // One state, two menu items per agent: each item is a plain type lottery.
    let block: Vec<f64> = lotteries.concat();
    SignalingFamily::broadcast(
        vec![2, 2],
        vec![2, 2],
        vec![block.clone(), block],
        histories,
    )
}

fn constant_pi(histories: usize, n_types: usize, row: [f64; 2]) -> Vec<f64> {
    let mut flat = Vec::with_capacity(histories * n_types * 2);
    for _ in 0..histories * n_types {
        flat.extend_from_slice(&row);
    }
    flat
}

/// Repeated prisoner's dilemma with decorative type lotteries. The pinned
/// profile defects everywhere; with type-independent actions the stage Nash
/// repeats as an equilibrium at any discount.
pub fn repeated_dilemma() -> Instance {
    let game = single_state_game([2.0, 0.0, 3.0, 1.0], [2.0, 3.0, 0.0, 1.0], 0.8);
    let histories = game.histories();
    let family = lottery_family(histories, [[0.5, 0.5], [0.8, 0.2]]);
    let scheme = CostScheme::zero_sab(&game);
    let profile = StrategyProfile {
        beta: vec![vec![0; histories]; 2],
        pi: vec![constant_pi(histories, 2, [0.0, 1.0]); 2],
    };
    Instance {
        name: "repeated-dilemma".into(),
        game,
        family,
        scheme,
        profile,
    }
}

/// Coordination game with a history-indexed trigger profile: both agents play
/// the high action after a joint high, and fall back to the low action at
/// every other history. Both branches are stage equilibria, so the trigger is
/// an equilibrium with genuinely history-dependent play.
pub fn coordination_trigger() -> Instance {
    let game = single_state_game([1.0, 0.0, 0.0, 2.0], [1.0, 0.0, 0.0, 2.0], 0.7);
    let histories = game.histories();
    let family = lottery_family(histories, [[0.6, 0.4], [0.5, 0.5]]);
    let scheme = CostScheme::zero_sab(&game);
    // h = (s_prev = 0, a_prev); joint action (1, 1) has rank 3.
    let mut pi_one_agent = Vec::with_capacity(histories * 2 * 2);
    for h in 0..histories {
        let row = if h == 3 { [0.0, 1.0] } else { [1.0, 0.0] };
        for _ in 0..2 {
            pi_one_agent.extend_from_slice(&row);
        }
    }
    let profile = StrategyProfile {
        beta: vec![vec![0; histories]; 2],
        pi: vec![pi_one_agent.clone(), pi_one_agent],
    };
    Instance {
        name: "coordination-trigger".into(),
        game,
        family,
        scheme,
        profile,
    }
}

/// Matching pennies where the mixed equilibrium is implemented through the
/// signal: both agents pick the fair lottery and play their type. Every
/// deviation leaves the value at zero, so the profile is an equilibrium by
/// indifference, which exercises tolerance handling in the verifier.
pub fn pennies_signal() -> Instance {
    let game = single_state_game([1.0, -1.0, -1.0, 1.0], [-1.0, 1.0, 1.0, -1.0], 0.85);
    let histories = game.histories();
    // Menu item 0: biased lottery; item 1: the fair coin used in equilibrium.
    let family = lottery_family(histories, [[0.8, 0.2], [0.5, 0.5]]);
    let scheme = CostScheme::zero_sab(&game);
    let mut pi_one_agent = Vec::with_capacity(histories * 2 * 2);
    for _ in 0..histories {
        pi_one_agent.extend_from_slice(&[1.0, 0.0]);
        pi_one_agent.extend_from_slice(&[0.0, 1.0]);
    }
    let profile = StrategyProfile {
        beta: vec![vec![1; histories]; 2],
        pi: vec![pi_one_agent.clone(), pi_one_agent],
    };
    Instance {
        name: "pennies-signal".into(),
        game,
        family,
        scheme,
        profile,
    }
}

fn state_guess_game(transition_rows: fn(usize, &BaseGame) -> [f64; 2], discount: f64) -> BaseGame {
    let n_states = 2;
    let joint_actions = 4;
    let histories = n_states * joint_actions;
    // Agent 0 (the scout) earns 1 for guessing the state; agent 1 (the
    // shadow) earns 1 for playing the same action as the scout.
    let mut rewards = Vec::with_capacity(2 * n_states * joint_actions);
    for i in 0..2 {
        for s in 0..n_states {
            for a in 0..joint_actions {
                let (a0, a1) = (a / 2, a % 2);
                let hit = if i == 0 { a0 == s } else { a1 == a0 };
                rewards.push(if hit { 1.0 } else { 0.0 });
            }
        }
    }
    let mut game = BaseGame {
        n_agents: 2,
        n_states,
        n_actions: vec![2, 2],
        rewards,
        transition: Vec::new(),
        initial: vec![0.5, 0.5],
        discount,
    };
    let mut transition = Vec::with_capacity(histories * n_states);
    for h in 0..histories {
        transition.extend_from_slice(&transition_rows(h, &game));
    }
    game.transition = transition;
    game
}

fn scout_shadow_family(histories: usize) -> SignalingFamily {
    // Scout menu: item 0 reveals the state, item 1 is a fair coin. Both of
    // the shadow's items ignore the state, so no cognition choice available
    // to the shadow ever carries information and its types stay independent
    // of the scout's given the history.
    let scout = vec![
        1.0, 0.0, 0.5, 0.5, // s = 0: identity row, flat row
        0.0, 1.0, 0.5, 0.5, // s = 1
    ];
    let shadow = vec![
        0.5, 0.5, 0.7, 0.3, // s = 0: fair coin, tilted coin
        0.5, 0.5, 0.7, 0.3, // s = 1: same rows, state-independent
    ];
    SignalingFamily::broadcast(vec![2, 2], vec![2, 2], vec![scout, shadow], histories)
}

fn state_guess_instance(name: &str, game: BaseGame, scout_fee: f64) -> Instance {
    let histories = game.histories();
    let family = scout_shadow_family(histories);
    // The scout pays a flat per-period fee, the shadow pays only for action
    // 1. A flat fee keeps the scout's interim value equal across its types,
    // so every per-type participation gap sits exactly at zero.
    let scheme = CostScheme {
        kind: CostKind::Sab,
        tables: vec![vec![-scout_fee; 4], vec![0.0, -0.04, 0.0, -0.04]],
    };
    // Scout reveals and matches the state; shadow plays action 0, the
    // scout's likelier guess under every transition row.
    let mut scout_pi = Vec::with_capacity(histories * 2 * 2);
    let mut shadow_pi = Vec::with_capacity(histories * 2 * 2);
    for _ in 0..histories {
        scout_pi.extend_from_slice(&[1.0, 0.0, 0.0, 1.0]);
        shadow_pi.extend_from_slice(&[1.0, 0.0, 1.0, 0.0]);
    }
    let profile = StrategyProfile {
        beta: vec![vec![0; histories]; 2],
        pi: vec![scout_pi, shadow_pi],
    };
    Instance {
        name: name.into(),
        game,
        family,
        scheme,
        profile,
    }
}

/// Two-state guessing game with an i.i.d. state: the scout reveals and
/// matches the state, the shadow copies the scout's likelier action without
/// observing anything informative itself.
pub fn state_guess_iid() -> Instance {
    let game = state_guess_game(|_, _| [0.55, 0.45], 0.9);
    state_guess_instance("state-guess-iid", game, 0.03)
}

/// Guessing game whose state leans harder towards 0 after the agents agreed:
/// transitions depend on the previous joint action only, so the shadow's
/// continuation varies across histories while action 0 stays its strict best
/// reply at every one of them.
pub fn state_guess_markov() -> Instance {
    let game = state_guess_game(
        |h, game| {
            let (_, a_prev) = game.history_parts(h);
            if a_prev / 2 == a_prev % 2 {
                [0.7, 0.3]
            } else {
                [0.55, 0.45]
            }
        },
        0.85,
    );
    state_guess_instance("state-guess-markov", game, 0.02)
}

/// The five pinned-equilibrium instances small enough for exhaustive
/// enumeration under history-free restrictions.
pub fn enumerable_catalog() -> Vec<Instance> {
    vec![
        repeated_dilemma(),
        coordination_trigger(),
        pennies_signal(),
        state_guess_iid(),
        state_guess_markov(),
    ]
}

/// Look an instance generator up by name; used by the command-line tool.
pub fn by_name(name: &str) -> Option<Instance> {
    if let Some(seed) = name.strip_prefix("reference-random-") {
        return seed.parse().ok().map(reference_random);
    }
    enumerable_catalog().into_iter().find(|i| i.name == name)
}
