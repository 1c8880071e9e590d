//! Exact and sampled evaluation of stationary profiles.
//!
//! The period value of agent `i` at history `h` decomposes into three coupled
//! recursions: a history value `J_i(h)` averaging over the prior draw of
//! `(s, theta)`, a type-profile value `V_i(h, theta)` averaging over mixed
//! actions, and an action value `Q_i(h, theta_i, a)` that adds the posterior
//! expected stage payoff to the discounted continuation
//!
//! ```text
//! J_i(h)          = sum_{theta, s} V_i(h, theta) tau(theta | s, beta(h)) T(s | h)
//! V_i(h, theta)   = sum_a pi(a | theta, h) Q_i(h, theta_i, a)
//! Q_i(h, th_i, a) = Rbar_i(h, th_i, a) + d * sum_{s'} mu_i(s' | th_i, h) J_i((s', a))
//! ```
//!
//! Note the continuation state is drawn from agent `i`'s own posterior, so
//! the three equations define one linear system **per agent** over `H`.
//! `evaluate_policy` solves it directly (dense LU) and reconstructs `V` and
//! `Q`; a fixed-sweep iterative mode exists for contraction diagnostics. The
//! Monte Carlo estimator samples exactly this measure: after the type and
//! action draws it redraws the realized state from the agent's posterior, so
//! its mean is the recursion fixed point, not the common-trajectory average
//! (the two differ once signals are informative).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beliefs::Beliefs;
use crate::cost::{CostKind, CostScheme};
use crate::error::SgiaError;
use crate::game::BaseGame;
use crate::numeric::solve_dense;
use crate::profile::StrategyProfile;
use crate::signaling::SignalingFamily;

/// The three stationary value arrays of one profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValueTriple {
    /// `J[i][h]`.
    pub j: Vec<Vec<f64>>,
    /// `V[i][h * n_joint_types + theta_rank]`; zero where the own type has
    /// zero probability (such cells carry no weight in `J`).
    pub v: Vec<Vec<f64>>,
    /// `Q[i][(h * n_types_i + theta_i) * n_joint_actions + a]`; zero where
    /// the own type has zero probability.
    pub q: Vec<Vec<f64>>,
    /// Whether `(h, theta_i)` has positive probability under the profile's
    /// cognition choice, i.e. whether the `Q` and `V` cells are meaningful.
    pub q_defined: Vec<Vec<bool>>,
    /// Largest recursion residual observed when the triple was built.
    pub max_residual: f64,
}

impl ValueTriple {
    pub fn j(&self, i: usize, h: usize) -> f64 {
        self.j[i][h]
    }

    pub fn v(&self, i: usize, h: usize, n_joint_types: usize, t_rank: usize) -> f64 {
        self.v[i][h * n_joint_types + t_rank]
    }

    pub fn q_row(
        &self,
        i: usize,
        h: usize,
        n_types_i: usize,
        n_joint_actions: usize,
        theta: usize,
    ) -> &[f64] {
        let start = (h * n_types_i + theta) * n_joint_actions;
        &self.q[i][start..start + n_joint_actions]
    }
}

/// How `evaluate_policy_with` solves the per-agent linear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    /// Dense LU factorisation; exact up to rounding.
    Direct,
    /// Fixed-point sweeps from zero; converges at rate `discount`.
    Iteration { sweeps: usize },
}

/// Joint cognition rank chosen by `profile.beta` at history `h`.
pub fn profile_g_rank(beliefs: &Beliefs<'_>, profile: &StrategyProfile, h: usize) -> usize {
    let digits: Vec<usize> = profile.beta.iter().map(|b| b[h]).collect();
    beliefs.cog_space.rank(&digits)
}

/// One agent's expected stage payoff plus the transition weights of their
/// value recursion at history `h` under the profile.
fn stage_row(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    i: usize,
    h: usize,
    transition_row: &mut [f64],
) -> f64 {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let g_rank = profile_g_rank(beliefs, profile, h);
    let g_i = profile.beta[i][h];
    let mut stage = 0.0;
    for slot in transition_row.iter_mut() {
        *slot = 0.0;
    }
    for (t_rank, t_digits) in beliefs.type_digits.iter().enumerate() {
        let pt = beliefs.joint_type_prob(h, g_rank, t_rank);
        if pt == 0.0 {
            continue;
        }
        let rbar = beliefs.rbar_row(i, h, g_i, t_digits[i]);
        let mu = beliefs.state_posterior(i, h, g_i, t_digits[i]);
        for (a_rank, a_digits) in beliefs.action_digits.iter().enumerate() {
            let pa = profile.joint_pi(game, fam, h, t_digits, a_digits);
            if pa == 0.0 {
                continue;
            }
            let w = pt * pa;
            stage += w * rbar[a_rank];
            for (s2, &ms) in mu.iter().enumerate() {
                if ms > 0.0 {
                    transition_row[game.history_index(s2, a_rank)] += w * ms;
                }
            }
        }
    }
    stage
}

/// Exact profile evaluation by direct linear solve.
pub fn evaluate_policy(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    profile: &StrategyProfile,
) -> Result<ValueTriple, SgiaError> {
    let beliefs = Beliefs::new(game, fam, scheme);
    evaluate_with_beliefs(&beliefs, profile, SolveMethod::Direct)
}

/// Profile evaluation with an explicit solve method and a reusable belief
/// cache; engines that evaluate many profiles hold one [`Beliefs`].
pub fn evaluate_with_beliefs(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    method: SolveMethod,
) -> Result<ValueTriple, SgiaError> {
    let game = beliefs.game;
    let nh = game.histories();
    let na = beliefs.action_space.len();
    let ntr = beliefs.type_space.len();
    let mut j = Vec::with_capacity(game.n_agents);
    let mut v = Vec::with_capacity(game.n_agents);
    let mut q = Vec::with_capacity(game.n_agents);
    let mut q_defined = Vec::with_capacity(game.n_agents);
    let mut max_residual = 0.0f64;

    for i in 0..game.n_agents {
        let mut stage = vec![0.0; nh];
        let mut m = vec![0.0; nh * nh];
        for h in 0..nh {
            stage[h] = stage_row(beliefs, profile, i, h, &mut m[h * nh..(h + 1) * nh]);
        }
        let ji = match method {
            SolveMethod::Direct => {
                // Solve (I - d M) J = stage.
                let mut a = vec![0.0; nh * nh];
                for h in 0..nh {
                    for h2 in 0..nh {
                        a[h * nh + h2] = -game.discount * m[h * nh + h2];
                    }
                    a[h * nh + h] += 1.0;
                }
                solve_dense(a, stage.clone(), "policy evaluation")?
            }
            SolveMethod::Iteration { sweeps } => {
                let mut cur = vec![0.0; nh];
                for _ in 0..sweeps {
                    let mut next = stage.clone();
                    for h in 0..nh {
                        let mut acc = 0.0;
                        for h2 in 0..nh {
                            acc += m[h * nh + h2] * cur[h2];
                        }
                        next[h] += game.discount * acc;
                    }
                    cur = next;
                }
                cur
            }
        };
        // Residual of the history recursion under the solved J.
        for h in 0..nh {
            let mut rhs = stage[h];
            for h2 in 0..nh {
                rhs += game.discount * m[h * nh + h2] * ji[h2];
            }
            max_residual = max_residual.max((ji[h] - rhs).abs());
        }

        let nt = beliefs.fam.n_types[i];
        let mut qi = vec![0.0; nh * nt * na];
        let mut defi = vec![false; nh * nt];
        let mut vi = vec![0.0; nh * ntr];
        for h in 0..nh {
            let g_i = profile.beta[i][h];
            for theta in 0..nt {
                if !beliefs.defined(i, h, g_i, theta) {
                    continue;
                }
                defi[h * nt + theta] = true;
                let rbar = beliefs.rbar_row(i, h, g_i, theta);
                let mu = beliefs.state_posterior(i, h, g_i, theta);
                for a_rank in 0..na {
                    let mut cont = 0.0;
                    for (s2, &ms) in mu.iter().enumerate() {
                        cont += ms * ji[game.history_index(s2, a_rank)];
                    }
                    qi[(h * nt + theta) * na + a_rank] =
                        rbar[a_rank] + game.discount * cont;
                }
            }
            for (t_rank, t_digits) in beliefs.type_digits.iter().enumerate() {
                let theta = t_digits[i];
                if !defi[h * nt + theta] {
                    continue;
                }
                let mut acc = 0.0;
                for (a_rank, a_digits) in beliefs.action_digits.iter().enumerate() {
                    let pa = profile.joint_pi(game, beliefs.fam, h, t_digits, a_digits);
                    if pa > 0.0 {
                        acc += pa * qi[(h * nt + theta) * na + a_rank];
                    }
                }
                vi[h * ntr + t_rank] = acc;
            }
        }
        j.push(ji);
        v.push(vi);
        q.push(qi);
        q_defined.push(defi);
    }

    Ok(ValueTriple {
        j,
        v,
        q,
        q_defined,
        max_residual,
    })
}

/// Elementwise residuals of the three recursions for a given triple.
///
/// Returns the largest absolute residual across all equations and agents.
/// Zero-probability `(h, theta_i)` cells are skipped; they carry no weight.
pub fn bellman_residuals(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    triple: &ValueTriple,
) -> f64 {
    let game = beliefs.game;
    let nh = game.histories();
    let na = beliefs.action_space.len();
    let ntr = beliefs.type_space.len();
    let mut worst = 0.0f64;
    for i in 0..game.n_agents {
        let nt = beliefs.fam.n_types[i];
        for h in 0..nh {
            let g_rank = profile_g_rank(beliefs, profile, h);
            let g_i = profile.beta[i][h];
            // History recursion.
            let mut rhs = 0.0;
            for t_rank in 0..ntr {
                rhs += beliefs.joint_type_prob(h, g_rank, t_rank)
                    * triple.v[i][h * ntr + t_rank];
            }
            worst = worst.max((triple.j[i][h] - rhs).abs());
            // Action-value recursion.
            for theta in 0..nt {
                if !triple.q_defined[i][h * nt + theta] {
                    continue;
                }
                let rbar = beliefs.rbar_row(i, h, g_i, theta);
                let mu = beliefs.state_posterior(i, h, g_i, theta);
                for a_rank in 0..na {
                    let mut cont = 0.0;
                    for (s2, &ms) in mu.iter().enumerate() {
                        cont += ms * triple.j[i][game.history_index(s2, a_rank)];
                    }
                    let rhs = rbar[a_rank] + game.discount * cont;
                    worst = worst
                        .max((triple.q[i][(h * nt + theta) * na + a_rank] - rhs).abs());
                }
            }
            // Type-profile recursion.
            for (t_rank, t_digits) in beliefs.type_digits.iter().enumerate() {
                let theta = t_digits[i];
                if !triple.q_defined[i][h * nt + theta] {
                    continue;
                }
                let mut rhs = 0.0;
                for (a_rank, a_digits) in beliefs.action_digits.iter().enumerate() {
                    rhs += profile.joint_pi(game, beliefs.fam, h, t_digits, a_digits)
                        * triple.q[i][(h * nt + theta) * na + a_rank];
                }
                worst = worst.max((triple.v[i][h * ntr + t_rank] - rhs).abs());
            }
        }
    }
    worst
}

/// Sup-norm distance to the direct-solve `J` after each iterative sweep.
pub fn iteration_error_trace(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    sweeps: usize,
) -> Result<Vec<f64>, SgiaError> {
    let exact = evaluate_with_beliefs(beliefs, profile, SolveMethod::Direct)?;
    let mut errors = Vec::with_capacity(sweeps);
    for k in 1..=sweeps {
        let approx =
            evaluate_with_beliefs(beliefs, profile, SolveMethod::Iteration { sweeps: k })?;
        let mut err = 0.0f64;
        for i in 0..beliefs.game.n_agents {
            for h in 0..beliefs.game.histories() {
                err = err.max((approx.j[i][h] - exact.j[i][h]).abs());
            }
        }
        errors.push(err);
    }
    Ok(errors)
}

// ---------------------------------------------------------------------------
// Aggregates
// ---------------------------------------------------------------------------

/// Expectation of a candidate `V_i(h, theta_i, .)` slice over the opponent
/// types, weighted by `mu_i(theta_minus | theta_i, h)` at the cognition
/// profile `beta(h)`.
pub fn mv_i(
    beliefs: &Beliefs<'_>,
    beta: &[Vec<usize>],
    v_i: &[f64],
    i: usize,
    h: usize,
    theta_i: usize,
) -> Result<f64, SgiaError> {
    let g_digits: Vec<usize> = beta.iter().map(|b| b[h]).collect();
    let g_rank = beliefs.cog_space.rank(&g_digits);
    if !beliefs.defined(i, h, g_digits[i], theta_i) {
        return Err(SgiaError::ZeroProbabilityType {
            agent: i,
            type_index: theta_i,
            history: h,
            cognition: g_digits[i],
        });
    }
    let opp = beliefs.opp_posterior(i, h, g_rank, theta_i);
    let ntr = beliefs.type_space.len();
    let mut acc = 0.0;
    for (o_rank, &w) in opp.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let digits = beliefs.opp_type_spaces[i].merge_with_own(o_rank, i, theta_i);
        acc += w * v_i[h * ntr + beliefs.type_space.rank(&digits)];
    }
    Ok(acc)
}

/// [`mv_i`] applied to the Bellman-consistent value triple of the profile.
pub fn ev_i(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    triple: &ValueTriple,
    i: usize,
    h: usize,
    theta_i: usize,
) -> Result<f64, SgiaError> {
    mv_i(beliefs, &profile.beta, &triple.v[i], i, h, theta_i)
}

/// Prior-weighted expectation of a candidate `V_i` over `(s, theta_minus)`:
/// the opponents' types are drawn from their rules at each state and the
/// state from `T(. | h)`, without conditioning on `theta_i`.
///
/// With `s_context = Some(s)` only that state's term is returned, which is
/// the per-state contribution the local alignment certificates differentiate.
pub fn iv_i(
    beliefs: &Beliefs<'_>,
    v_i: &[f64],
    g: &[usize],
    i: usize,
    h: usize,
    theta_i: usize,
    s_context: Option<usize>,
) -> f64 {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let ntr = beliefs.type_space.len();
    let opp_space = &beliefs.opp_type_spaces[i];
    let states: Vec<usize> = match s_context {
        Some(s) => vec![s],
        None => (0..game.n_states).collect(),
    };
    let mut acc = 0.0;
    for &s in &states {
        let ts = game.state_prob(h, s);
        if ts == 0.0 {
            continue;
        }
        for o_rank in opp_space.iter() {
            let mut w = ts;
            for (d, _) in opp_space.radices().iter().enumerate() {
                let jagent = opp_space.axis(d);
                w *= fam.tau(game, jagent, h, s, g[jagent], opp_space.digit(o_rank, d));
            }
            if w == 0.0 {
                continue;
            }
            let digits = opp_space.merge_with_own(o_rank, i, theta_i);
            acc += w * v_i[h * ntr + beliefs.type_space.rank(&digits)];
        }
    }
    acc
}

/// One-period unrolling of the history recursion against a candidate
/// continuation `J_i`: the opponents' types and the state are drawn from the
/// prior at `h`, actions follow the profile, and the continuation history is
/// reached through the realized `(s, a)`.
///
/// `discount_in_ij` controls whether the continuation is discounted; the
/// recursion-consistent reading applies the discount and is the default
/// everywhere. The caller must ensure `(i, h, theta_i)` has positive
/// probability under `profile.beta`; zero-probability cells produce a
/// meaningless value and are skipped by the verifier.
pub fn ij_i(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    j_i: &[f64],
    i: usize,
    h: usize,
    theta_i: usize,
    discount_in_ij: bool,
) -> f64 {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let g_i = profile.beta[i][h];
    let rbar = beliefs.rbar_row(i, h, g_i, theta_i);
    let opp_space = &beliefs.opp_type_spaces[i];
    let disc = if discount_in_ij { game.discount } else { 1.0 };
    let mut acc = 0.0;
    for s in 0..game.n_states {
        let ts = game.state_prob(h, s);
        if ts == 0.0 {
            continue;
        }
        for o_rank in opp_space.iter() {
            let mut w = ts;
            for (d, _) in opp_space.radices().iter().enumerate() {
                let jagent = opp_space.axis(d);
                w *= fam.tau(
                    game,
                    jagent,
                    h,
                    s,
                    profile.beta[jagent][h],
                    opp_space.digit(o_rank, d),
                );
            }
            if w == 0.0 {
                continue;
            }
            let t_digits = opp_space.merge_with_own(o_rank, i, theta_i);
            for (a_rank, a_digits) in beliefs.action_digits.iter().enumerate() {
                let pa = profile.joint_pi(game, fam, h, &t_digits, a_digits);
                if pa == 0.0 {
                    continue;
                }
                acc += w
                    * pa
                    * (rbar[a_rank] + disc * j_i[game.history_index(s, a_rank)]);
            }
        }
    }
    acc
}

/// Value of one period at `h` for agent `i` when the cognition profile is
/// `g` (possibly off the profile's path), actions follow `profile.pi`, and
/// play continues with the candidate values `j_cont`.
///
/// With `g = beta(h)` and `j_cont` the profile's own `J_i`, this returns
/// `J_i(h)`; with a deviating own component it prices a one-shot cognition
/// deviation.
pub fn one_period_value(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    i: usize,
    h: usize,
    g: &[usize],
    j_cont: &[f64],
) -> f64 {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let g_rank = beliefs.cog_space.rank(g);
    let g_i = g[i];
    let mut acc = 0.0;
    for (t_rank, t_digits) in beliefs.type_digits.iter().enumerate() {
        let pt = beliefs.joint_type_prob(h, g_rank, t_rank);
        if pt == 0.0 {
            continue;
        }
        let rbar = beliefs.rbar_row(i, h, g_i, t_digits[i]);
        let mu = beliefs.state_posterior(i, h, g_i, t_digits[i]);
        for (a_rank, a_digits) in beliefs.action_digits.iter().enumerate() {
            let pa = profile.joint_pi(game, fam, h, t_digits, a_digits);
            if pa == 0.0 {
                continue;
            }
            let mut cont = 0.0;
            for (s2, &ms) in mu.iter().enumerate() {
                if ms > 0.0 {
                    cont += ms * j_cont[game.history_index(s2, a_rank)];
                }
            }
            acc += pt * pa * (rbar[a_rank] + game.discount * cont);
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

/// Result of a Monte Carlo evaluation from one start history.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub start_history: usize,
    pub episodes: usize,
    pub horizon: usize,
    pub seed: u64,
    /// Per-agent mean discounted return.
    pub mean: Vec<f64>,
    /// Per-agent standard error of the mean.
    pub std_error: Vec<f64>,
}

/// Shortest horizon whose truncation bias is below `bias_cap` given the
/// per-period payoff bound.
pub fn truncation_horizon(discount: f64, payoff_bound: f64, bias_cap: f64) -> usize {
    if payoff_bound <= 0.0 {
        return 1;
    }
    let target = bias_cap * (1.0 - discount) / payoff_bound;
    if target >= 1.0 {
        return 1;
    }
    (target.ln() / discount.ln()).ceil() as usize
}

fn sample_index<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen_range(0.0..1.0) * total;
    for (k, &w) in weights.iter().enumerate() {
        u -= w;
        if u <= 0.0 {
            return k;
        }
    }
    weights.len() - 1
}

fn realized_cost(
    beliefs: &Beliefs<'_>,
    scheme: &CostScheme,
    i: usize,
    h: usize,
    s: usize,
    g_i: usize,
    theta_i: usize,
    a_own: usize,
) -> f64 {
    match scheme.kind {
        CostKind::Cb => scheme.tables[i][g_i],
        CostKind::Tb => scheme.tables[i][theta_i],
        CostKind::Stb => scheme.tables[i][s * beliefs.fam.n_types[i] + theta_i],
        CostKind::Sab => scheme.tables[i][s * beliefs.game.n_actions[i] + a_own],
        CostKind::Mi => beliefs.signal_information(i, h, g_i),
    }
}

fn simulate_agent<R: Rng>(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    i: usize,
    start: usize,
    horizon: usize,
    rng: &mut R,
) -> f64 {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let n = game.n_agents;
    let mut h = start;
    let mut acc = 0.0;
    let mut disc = 1.0;
    let mut t_digits = vec![0usize; n];
    let mut a_digits = vec![0usize; n];
    for _ in 0..horizon {
        let g_i = profile.beta[i][h];
        // Prior draw: state, then every agent's type given that state.
        let s = sample_index(rng, &game.transition[h * game.n_states..(h + 1) * game.n_states]);
        for jagent in 0..n {
            t_digits[jagent] = sample_index(
                rng,
                fam.row(game, jagent, h, s, profile.beta[jagent][h]),
            );
        }
        for jagent in 0..n {
            a_digits[jagent] =
                sample_index(rng, profile.pi_row(game, fam, jagent, h, t_digits[jagent]));
        }
        let a_rank = beliefs.action_space.rank(&a_digits);
        // The payoff-relevant state is redrawn from the agent's posterior:
        // this is the measure the recursions average over.
        let s_eff = sample_index(rng, beliefs.state_posterior(i, h, g_i, t_digits[i]));
        let reward = game.reward(i, s_eff, a_rank)
            + realized_cost(beliefs, scheme_of(beliefs), i, h, s_eff, g_i, t_digits[i], a_digits[i]);
        acc += disc * reward;
        disc *= game.discount;
        h = game.history_index(s_eff, a_rank);
    }
    acc
}

fn scheme_of<'a>(beliefs: &Beliefs<'a>) -> &'a CostScheme {
    beliefs.scheme
}

/// Monte Carlo estimate of `J(start)` for every agent.
///
/// Episodes are simulated in parallel with per-episode derived random
/// streams and reduced in episode order, so the report is identical for any
/// thread count.
pub fn monte_carlo_value(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    profile: &StrategyProfile,
    start: usize,
    episodes: usize,
    horizon: usize,
    seed: u64,
) -> MonteCarloReport {
    let beliefs = Beliefs::new(game, fam, scheme);
    let n = game.n_agents;
    let returns: Vec<Vec<f64>> = (0..episodes)
        .into_par_iter()
        .map(|ep| {
            (0..n)
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream((ep * n + i) as u64);
                    simulate_agent(&beliefs, profile, i, start, horizon, &mut rng)
                })
                .collect()
        })
        .collect();

    let mut mean = vec![0.0; n];
    for row in &returns {
        for (m, &x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in mean.iter_mut() {
        *m /= episodes as f64;
    }
    let mut std_error = vec![0.0; n];
    if episodes > 1 {
        for row in &returns {
            for (k, &x) in row.iter().enumerate() {
                std_error[k] += (x - mean[k]) * (x - mean[k]);
            }
        }
        for se in std_error.iter_mut() {
            *se = (*se / (episodes as f64 - 1.0)).sqrt() / (episodes as f64).sqrt();
        }
    }
    MonteCarloReport {
        start_history: start,
        episodes,
        horizon,
        seed,
        mean,
        std_error,
    }
}
