//! Equilibrium verification.
//!
//! A stationary profile is an equilibrium when no agent gains from a one-shot
//! deviation at any history: neither by switching their menu choice before
//! types realize (cognition stage) nor by replacing their mixed action after
//! (action stage). Three independent routes decide this:
//!
//! * the direct route evaluates the profile exactly and prices every
//!   one-shot deviation ([`verify_ppme_direct`]);
//! * the scalar program over `(pi, V)` checks that the objective
//!   [`objective_z`] vanishes on the feasibility set `K` = {FE1, FE2, EQ1,
//!   EQ2} ([`check_feasibility_k`]);
//! * the fixed-point alignment program over `(tau, J, V)` checks
//!   [`objective_z_gfpa`] against `K_gfpa` = {RG1, RG2, EQ3, EQ4}
//!   ([`check_feasibility_k_gfpa`]).
//!
//! Pure action deviations suffice in EQ2 and the direct route: the stage
//! objective is linear in `pi_i(. | theta_i)`, so its maximum over the
//! simplex is attained at a vertex. Zero-probability `(i, h, theta_i)` cells
//! are skipped wherever a constraint conditions on the agent's posterior:
//! no posterior exists there and the cells carry no decision weight.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beliefs::Beliefs;
use crate::cost::CostScheme;
use crate::error::SgiaError;
use crate::game::{BaseGame, Violation};
use crate::profile::StrategyProfile;
use crate::signaling::SignalingFamily;
use crate::tol;
use crate::value::{
    evaluate_with_beliefs, ij_i, iv_i, mv_i, one_period_value, profile_g_rank, SolveMethod,
    ValueTriple,
};

/// Constraint violations of one feasibility set.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub violations: Vec<Violation>,
    /// Largest magnitude seen across all checked cells, including those
    /// below tolerance; empty `violations` iff this is within tolerance.
    pub max_violation: f64,
}

impl ConstraintReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn record(
        &mut self,
        constraint: &str,
        coords: &[(&str, usize)],
        magnitude: f64,
        tolerance: f64,
    ) {
        if magnitude > self.max_violation {
            self.max_violation = magnitude;
        }
        if magnitude > tolerance {
            self.violations.push(Violation::new(constraint, coords, magnitude));
        }
    }

    fn merge(&mut self, other: ConstraintReport) {
        self.max_violation = self.max_violation.max(other.max_violation);
        self.violations.extend(other.violations);
    }
}

/// A profitable one-shot deviation found by the direct verifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviationWitness {
    pub agent: usize,
    pub history: usize,
    pub description: String,
    pub gain: f64,
}

/// Outcome of a verification run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationResult {
    pub z_value: f64,
    pub constraint_report: ConstraintReport,
    pub is_ppme: bool,
    pub deviation_witness: Option<DeviationWitness>,
}

/// Knobs of the direct verifier.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Price joint cognition-and-action deviations by solving each agent's
    /// best-response dynamic program, instead of the one-shot checks that
    /// hold the action rule fixed during cognition deviations.
    pub joint_deviation: bool,
    /// Discount the continuation inside the one-step unrolled history value;
    /// the recursion-consistent reading (true) is the default.
    pub discount_in_ij: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            joint_deviation: false,
            discount_in_ij: true,
        }
    }
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

/// Action-value row of agent `i` at `(h, g_i, theta)` against a candidate
/// continuation: expected stage payoff plus the discounted posterior-weighted
/// continuation. Meaningless when the type has zero probability.
pub fn q_from_continuation(
    beliefs: &Beliefs<'_>,
    i: usize,
    h: usize,
    g_i: usize,
    theta: usize,
    j_cont: &[f64],
) -> Vec<f64> {
    let game = beliefs.game;
    let rbar = beliefs.rbar_row(i, h, g_i, theta);
    let mu = beliefs.state_posterior(i, h, g_i, theta);
    (0..beliefs.action_space.len())
        .map(|a| {
            let mut cont = 0.0;
            for (s2, &ms) in mu.iter().enumerate() {
                if ms > 0.0 {
                    cont += ms * j_cont[game.history_index(s2, a)];
                }
            }
            rbar[a] + game.discount * cont
        })
        .collect()
}

/// Expectation of a joint-action row over the opponents' types (drawn from
/// the agent's posterior at `g_rank`) and their mixed actions, leaving the
/// own action free: returns one value per own action.
pub fn opponent_expected_row(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    i: usize,
    h: usize,
    g_rank: usize,
    theta: usize,
    joint_row: &[f64],
) -> Vec<f64> {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let opp_types = &beliefs.opp_type_spaces[i];
    let opp_actions = &beliefs.opp_action_spaces[i];
    let mu = beliefs.opp_posterior(i, h, g_rank, theta);
    let na_own = game.n_actions[i];
    let mut out = vec![0.0; na_own];
    for (o_rank, &w) in mu.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let t_digits = opp_types.unrank(o_rank);
        for oa_rank in opp_actions.iter() {
            let mut pa = 1.0;
            for (d, &t) in t_digits.iter().enumerate() {
                let jagent = opp_actions.axis(d);
                pa *= profile.pi(game, fam, jagent, h, t, opp_actions.digit(oa_rank, d));
            }
            if pa == 0.0 {
                continue;
            }
            for (a_own, slot) in out.iter_mut().enumerate() {
                let full = opp_actions.merge_with_own(oa_rank, i, a_own);
                *slot += w * pa * joint_row[beliefs.action_space.rank(&full)];
            }
        }
    }
    out
}

/// History value induced by a candidate `V_i` through the prior at each
/// history: `Jbold_i(h; V) = sum_theta P(theta | h, beta(h)) V_i(h, theta)`.
pub fn induced_history_value(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    v_i: &[f64],
    _i: usize,
) -> Vec<f64> {
    let nh = beliefs.game.histories();
    let ntr = beliefs.type_space.len();
    (0..nh)
        .map(|h| {
            let g_rank = profile_g_rank(beliefs, profile, h);
            (0..ntr)
                .map(|t| beliefs.joint_type_prob(h, g_rank, t) * v_i[h * ntr + t])
                .sum()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Scalar program over (pi, V)
// ---------------------------------------------------------------------------

/// Objective of the scalar program: prior-weighted Bellman gap of the
/// candidate `(pi, V)` pair,
///
/// ```text
/// Z = sum_{i,h,s,theta} (V_i(h,theta) - sum_a Qbold_i(h,theta_i,a;V) pi(a|theta,h))
///       * tau(theta|s,beta(h)) T(s|h)
/// ```
///
/// where `Qbold` closes the action value with the `V`-induced history value.
/// Vanishes at every Bellman-consistent pair, so the equilibrium content
/// lives in the feasibility set.
pub fn objective_z(beliefs: &Beliefs<'_>, profile: &StrategyProfile, v: &[Vec<f64>]) -> f64 {
    let game = beliefs.game;
    let ntr = beliefs.type_space.len();
    let mut z = 0.0;
    for (i, v_i) in v.iter().enumerate() {
        let jbold = induced_history_value(beliefs, profile, v_i, i);
        for h in 0..game.histories() {
            let g_rank = profile_g_rank(beliefs, profile, h);
            let g_i = profile.beta[i][h];
            for (t_rank, t_digits) in beliefs.type_digits.iter().enumerate() {
                let w = beliefs.joint_type_prob(h, g_rank, t_rank);
                if w == 0.0 {
                    continue;
                }
                let q = q_from_continuation(beliefs, i, h, g_i, t_digits[i], &jbold);
                let mut played = 0.0;
                for (a_rank, a_digits) in beliefs.action_digits.iter().enumerate() {
                    played +=
                        profile.joint_pi(game, beliefs.fam, h, t_digits, a_digits) * q[a_rank];
                }
                z += w * (v_i[h * ntr + t_rank] - played);
            }
        }
    }
    z
}

/// Feasibility of a candidate `(pi, V)`: simplex constraints on `pi` (FE1,
/// FE2) and the two equilibrium inequalities (EQ1, EQ2), the latter checked
/// at every positive-probability `(i, h, theta_i)`.
pub fn check_feasibility_k(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    v: &[Vec<f64>],
) -> ConstraintReport {
    let game = beliefs.game;
    let nh = game.histories();
    let cells: Vec<(usize, usize)> = (0..game.n_agents)
        .flat_map(|i| (0..nh).map(move |h| (i, h)))
        .collect();
    let parts: Vec<ConstraintReport> = cells
        .par_iter()
        .map(|&(i, h)| {
            let mut report = ConstraintReport::default();
            let fam = beliefs.fam;
            let nt = fam.n_types[i];
            let g_rank = profile_g_rank(beliefs, profile, h);
            let g_i = profile.beta[i][h];
            let g_digits = beliefs.cog_space.unrank(g_rank);
            // FE1 / FE2 on every action row of the agent at this history.
            for theta in 0..nt {
                let row = profile.pi_row(game, fam, i, h, theta);
                for (a, &p) in row.iter().enumerate() {
                    report.record(
                        "FE1",
                        &[("agent", i), ("history", h), ("type", theta), ("action", a)],
                        (-p).max(0.0),
                        tol::SIMPLEX,
                    );
                }
                let sum: f64 = row.iter().sum();
                report.record(
                    "FE2",
                    &[("agent", i), ("history", h), ("type", theta)],
                    (sum - 1.0).abs(),
                    tol::SIMPLEX,
                );
            }
            let jbold = induced_history_value(beliefs, profile, &v[i], i);
            for theta in 0..nt {
                if !beliefs.defined(i, h, g_i, theta) {
                    continue;
                }
                // EQ1: the prior-weighted history value dominates the
                // informed bound that knows theta_i outright.
                let informed = iv_i(beliefs, &v[i], &g_digits, i, h, theta, None);
                report.record(
                    "EQ1",
                    &[("agent", i), ("history", h), ("type", theta)],
                    informed - jbold[h],
                    tol::FEASIBILITY,
                );
                // EQ2: no pure own action beats the candidate V in
                // opponent-expected action value.
                let ev = mv_i(beliefs, &profile.beta, &v[i], i, h, theta)
                    .expect("type checked as defined");
                let q = q_from_continuation(beliefs, i, h, g_i, theta, &jbold);
                let per_own =
                    opponent_expected_row(beliefs, profile, i, h, g_rank, theta, &q);
                for (a_own, &dev) in per_own.iter().enumerate() {
                    report.record(
                        "EQ2",
                        &[("agent", i), ("history", h), ("type", theta), ("action", a_own)],
                        dev - ev,
                        tol::FEASIBILITY,
                    );
                }
            }
            report
        })
        .collect();
    let mut merged = ConstraintReport::default();
    for part in parts {
        merged.merge(part);
    }
    merged
}

// ---------------------------------------------------------------------------
// Fixed-point alignment program over (tau, J, V)
// ---------------------------------------------------------------------------

/// Objective of the alignment program: per-(agent, history) gap between the
/// candidate `J` and the prior-weighted candidate `V`.
pub fn objective_z_gfpa(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    j: &[Vec<f64>],
    v: &[Vec<f64>],
) -> f64 {
    let ntr = beliefs.type_space.len();
    let mut z = 0.0;
    for i in 0..beliefs.game.n_agents {
        for h in 0..beliefs.game.histories() {
            let g_rank = profile_g_rank(beliefs, profile, h);
            let mut weighted = 0.0;
            for t in 0..ntr {
                weighted += beliefs.joint_type_prob(h, g_rank, t) * v[i][h * ntr + t];
            }
            z += j[i][h] - weighted;
        }
    }
    z
}

/// Feasibility of a candidate `(tau, J, V)` triple: simplex constraints on
/// the selected signaling slices (RG1, RG2), the cognition-stage fixed-point
/// inequality on `J` (EQ3) and the action-stage inequality on `V` (EQ4).
///
/// EQ3 and EQ4 condition on the agent's type; cells with zero type
/// probability have no posterior and are skipped.
pub fn check_feasibility_k_gfpa(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    j: &[Vec<f64>],
    v: &[Vec<f64>],
    options: VerifyOptions,
) -> ConstraintReport {
    let game = beliefs.game;
    let nh = game.histories();
    let cells: Vec<(usize, usize)> = (0..game.n_agents)
        .flat_map(|i| (0..nh).map(move |h| (i, h)))
        .collect();
    let parts: Vec<ConstraintReport> = cells
        .par_iter()
        .map(|&(i, h)| {
            let mut report = ConstraintReport::default();
            let fam = beliefs.fam;
            let nt = fam.n_types[i];
            let g_rank = profile_g_rank(beliefs, profile, h);
            let g_i = profile.beta[i][h];
            // RG1 / RG2 on the selected signaling slice.
            for s in 0..game.n_states {
                let row = fam.row(game, i, h, s, g_i);
                for (theta, &p) in row.iter().enumerate() {
                    report.record(
                        "RG1",
                        &[("agent", i), ("history", h), ("state", s), ("type", theta)],
                        (-p).max(0.0),
                        tol::SIMPLEX,
                    );
                }
                let sum: f64 = row.iter().sum();
                report.record(
                    "RG2",
                    &[("agent", i), ("history", h), ("state", s)],
                    (sum - 1.0).abs(),
                    tol::SIMPLEX,
                );
            }
            let jbold = induced_history_value(beliefs, profile, &v[i], i);
            for theta in 0..nt {
                if !beliefs.defined(i, h, g_i, theta) {
                    continue;
                }
                // EQ3: J dominates its own one-step unrolling.
                let unrolled =
                    ij_i(beliefs, profile, &j[i], i, h, theta, options.discount_in_ij);
                report.record(
                    "EQ3",
                    &[("agent", i), ("history", h), ("type", theta)],
                    unrolled - j[i][h],
                    tol::FEASIBILITY,
                );
                // EQ4: the type-conditional expectation of V dominates every
                // pure own action, with the V-induced continuation.
                let mv = mv_i(beliefs, &profile.beta, &v[i], i, h, theta)
                    .expect("type checked as defined");
                let q = q_from_continuation(beliefs, i, h, g_i, theta, &jbold);
                let per_own =
                    opponent_expected_row(beliefs, profile, i, h, g_rank, theta, &q);
                for (a_own, &dev) in per_own.iter().enumerate() {
                    report.record(
                        "EQ4",
                        &[("agent", i), ("history", h), ("type", theta), ("action", a_own)],
                        dev - mv,
                        tol::FEASIBILITY,
                    );
                }
            }
            report
        })
        .collect();
    let mut merged = ConstraintReport::default();
    for part in parts {
        merged.merge(part);
    }
    merged
}

// ---------------------------------------------------------------------------
// Direct verification
// ---------------------------------------------------------------------------

/// Per-agent best-response value against the rest of the profile: the agent
/// re-optimizes both the menu choice and the type-measurable action at every
/// history. Solved by value iteration; the operator contracts at the
/// discount rate.
pub fn best_response_value(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    i: usize,
) -> Vec<f64> {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let nh = game.histories();
    let mut cur = vec![0.0; nh];
    let bound = beliefs.reward_cost_bound();
    let mut sweeps = 0;
    loop {
        let mut next = vec![0.0; nh];
        for h in 0..nh {
            let mut best = f64::NEG_INFINITY;
            for g_own in 0..fam.n_cogs[i] {
                let mut g_digits: Vec<usize> = profile.beta.iter().map(|b| b[h]).collect();
                g_digits[i] = g_own;
                let g_rank = beliefs.cog_space.rank(&g_digits);
                let mut val = 0.0;
                for theta in 0..fam.n_types[i] {
                    let p = beliefs.type_prob(i, h, g_own, theta);
                    if p == 0.0 {
                        continue;
                    }
                    let q = q_from_continuation(beliefs, i, h, g_own, theta, &cur);
                    let per_own =
                        opponent_expected_row(beliefs, profile, i, h, g_rank, theta, &q);
                    let best_action = per_own.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    val += p * best_action;
                }
                best = best.max(val);
            }
            next[h] = best;
        }
        let change = cur
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        cur = next;
        sweeps += 1;
        if change <= 1e-13 * (1.0 + bound) || sweeps >= 20_000 {
            return cur;
        }
    }
}

/// Direct equilibrium check: evaluate the profile exactly, then price every
/// one-shot deviation. Action deviations compare pure own actions against
/// the type's expected value; cognition deviations replay one period with a
/// different menu choice, holding the action rule and continuation fixed.
/// With `joint_deviation` the per-agent best-response program replaces both
/// one-shot scans.
pub fn verify_ppme_direct(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    profile: &StrategyProfile,
    options: VerifyOptions,
) -> Result<VerificationResult, SgiaError> {
    let beliefs = Beliefs::new(game, fam, scheme);
    let triple = evaluate_with_beliefs(&beliefs, profile, SolveMethod::Direct)?;
    let z_value = objective_z(&beliefs, profile, &triple.v);
    let constraint_report = check_feasibility_k(&beliefs, profile, &triple.v);

    let witness = if options.joint_deviation {
        joint_deviation_witness(&beliefs, profile, &triple)
    } else {
        one_shot_witness(&beliefs, profile, &triple)
    };

    let is_ppme =
        witness.is_none() && constraint_report.is_empty() && z_value.abs() <= tol::Z_TOL;
    Ok(VerificationResult {
        z_value,
        constraint_report,
        is_ppme,
        deviation_witness: witness,
    })
}

fn one_shot_witness(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    triple: &ValueTriple,
) -> Option<DeviationWitness> {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let na = beliefs.action_space.len();
    // Action stage: for every positive-probability type, compare each pure
    // own action to the played expectation.
    for i in 0..game.n_agents {
        let nt = fam.n_types[i];
        for h in 0..game.histories() {
            let g_rank = profile_g_rank(beliefs, profile, h);
            for theta in 0..nt {
                if !triple.q_defined[i][h * nt + theta] {
                    continue;
                }
                let ev = mv_i(beliefs, &profile.beta, &triple.v[i], i, h, theta)
                    .expect("defined cell");
                let q_row = triple.q_row(i, h, nt, na, theta);
                let per_own =
                    opponent_expected_row(beliefs, profile, i, h, g_rank, theta, q_row);
                for (a_own, &dev) in per_own.iter().enumerate() {
                    let gain = dev - ev;
                    if gain > tol::DEVIATION {
                        return Some(DeviationWitness {
                            agent: i,
                            history: h,
                            description: format!(
                                "type {theta} switches to action {a_own}"
                            ),
                            gain,
                        });
                    }
                }
            }
        }
    }
    // Cognition stage: replay one period with a different own menu choice.
    for i in 0..game.n_agents {
        for h in 0..game.histories() {
            let mut g_digits: Vec<usize> = profile.beta.iter().map(|b| b[h]).collect();
            let chosen = g_digits[i];
            for g_own in 0..fam.n_cogs[i] {
                if g_own == chosen {
                    continue;
                }
                g_digits[i] = g_own;
                let dev = one_period_value(beliefs, profile, i, h, &g_digits, &triple.j[i]);
                let gain = dev - triple.j[i][h];
                if gain > tol::DEVIATION {
                    return Some(DeviationWitness {
                        agent: i,
                        history: h,
                        description: format!("menu choice {chosen} switches to {g_own}"),
                        gain,
                    });
                }
            }
            g_digits[i] = chosen;
        }
    }
    None
}

fn joint_deviation_witness(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    triple: &ValueTriple,
) -> Option<DeviationWitness> {
    for i in 0..beliefs.game.n_agents {
        let br = best_response_value(beliefs, profile, i);
        for h in 0..beliefs.game.histories() {
            let gain = br[h] - triple.j[i][h];
            if gain > tol::DEVIATION {
                return Some(DeviationWitness {
                    agent: i,
                    history: h,
                    description: "joint cognition and action best response".into(),
                    gain,
                });
            }
        }
    }
    None
}

/// Verify through the scalar program: exact values feed the objective and
/// the `K` feasibility set.
pub fn verify_opt(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    profile: &StrategyProfile,
) -> Result<VerificationResult, SgiaError> {
    let beliefs = Beliefs::new(game, fam, scheme);
    let triple = evaluate_with_beliefs(&beliefs, profile, SolveMethod::Direct)?;
    let z_value = objective_z(&beliefs, profile, &triple.v);
    let constraint_report = check_feasibility_k(&beliefs, profile, &triple.v);
    let is_ppme = constraint_report.is_empty() && z_value.abs() <= tol::Z_TOL;
    Ok(VerificationResult {
        z_value,
        constraint_report,
        is_ppme,
        deviation_witness: None,
    })
}

/// Verify through the alignment program: exact values feed the objective and
/// the `K_gfpa` feasibility set.
pub fn verify_gfpa(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    profile: &StrategyProfile,
    options: VerifyOptions,
) -> Result<VerificationResult, SgiaError> {
    let beliefs = Beliefs::new(game, fam, scheme);
    let triple = evaluate_with_beliefs(&beliefs, profile, SolveMethod::Direct)?;
    let z_value = objective_z_gfpa(&beliefs, profile, &triple.j, &triple.v);
    let constraint_report =
        check_feasibility_k_gfpa(&beliefs, profile, &triple.j, &triple.v, options);
    let is_ppme = constraint_report.is_empty() && z_value.abs() <= tol::Z_TOL;
    Ok(VerificationResult {
        z_value,
        constraint_report,
        is_ppme,
        deviation_witness: None,
    })
}

/// Side-by-side evaluation of both program characterizations at the
/// profile's exact values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub z_opt: f64,
    pub opt_feasible: bool,
    pub opt_holds: bool,
    pub z_gfpa: f64,
    pub gfpa_feasible: bool,
    pub gfpa_holds: bool,
    /// Whether the two characterizations reach the same verdict.
    pub sides_agree: bool,
    pub opt_report: ConstraintReport,
    pub gfpa_report: ConstraintReport,
}

/// Evaluate both scalar programs at the profile's Bellman values and compare
/// their verdicts; the two characterize the same equilibrium set, so the
/// sides must agree.
pub fn cross_check_propositions(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    profile: &StrategyProfile,
    options: VerifyOptions,
) -> Result<CrossCheckReport, SgiaError> {
    let beliefs = Beliefs::new(game, fam, scheme);
    let triple = evaluate_with_beliefs(&beliefs, profile, SolveMethod::Direct)?;
    let z_opt = objective_z(&beliefs, profile, &triple.v);
    let opt_report = check_feasibility_k(&beliefs, profile, &triple.v);
    let z_gfpa = objective_z_gfpa(&beliefs, profile, &triple.j, &triple.v);
    let gfpa_report =
        check_feasibility_k_gfpa(&beliefs, profile, &triple.j, &triple.v, options);
    let opt_feasible = opt_report.is_empty();
    let gfpa_feasible = gfpa_report.is_empty();
    let opt_holds = opt_feasible && z_opt.abs() <= tol::Z_TOL;
    let gfpa_holds = gfpa_feasible && z_gfpa.abs() <= tol::Z_TOL;
    Ok(CrossCheckReport {
        z_opt,
        opt_feasible,
        opt_holds,
        z_gfpa,
        gfpa_feasible,
        gfpa_holds,
        sides_agree: opt_holds == gfpa_holds,
        opt_report,
        gfpa_report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn values_of(inst: &instances::Instance) -> (Beliefs<'_>, ValueTriple) {
        let beliefs = Beliefs::new(&inst.game, &inst.family, &inst.scheme);
        let triple = evaluate_with_beliefs(&beliefs, &inst.profile, SolveMethod::Direct).unwrap();
        (beliefs, triple)
    }

    #[test]
    fn z_vanishes_at_bellman_consistent_points() {
        for seed in 0..5 {
            let inst = instances::reference_random(seed);
            let (beliefs, triple) = values_of(&inst);
            let z = objective_z(&beliefs, &inst.profile, &triple.v);
            assert!(z.abs() < 1e-9, "seed {seed}: z = {z}");
        }
    }

    #[test]
    fn z_of_uniformly_inflated_v_matches_closed_form() {
        let inst = instances::state_guess_markov();
        let (beliefs, triple) = values_of(&inst);
        let kappa = 1.0;
        let inflated: Vec<Vec<f64>> = triple
            .v
            .iter()
            .map(|vi| vi.iter().map(|x| x + kappa).collect())
            .collect();
        let z = objective_z(&beliefs, &inst.profile, &inflated);
        // Every (i, h) gap grows by (1 - discount) * kappa; prior weights
        // sum to one per (i, h).
        let expect = (inst.game.n_agents * inst.game.histories()) as f64
            * (1.0 - inst.game.discount)
            * kappa;
        assert!((z - expect).abs() < 1e-9, "z = {z}, expected {expect}");

        // Independent summation route: raw loop over (h, s, theta) using the
        // family and transition directly.
        let mut brute = 0.0;
        let game = &inst.game;
        let fam = &inst.family;
        let ntr = beliefs.type_space.len();
        for i in 0..game.n_agents {
            let jbold = induced_history_value(&beliefs, &inst.profile, &inflated[i], i);
            for h in 0..game.histories() {
                let g_i = inst.profile.beta[i][h];
                for s in 0..game.n_states {
                    for (t_rank, t_digits) in beliefs.type_digits.iter().enumerate() {
                        let mut w = game.state_prob(h, s);
                        for (jagent, &th) in t_digits.iter().enumerate() {
                            w *= fam.tau(game, jagent, h, s, inst.profile.beta[jagent][h], th);
                        }
                        if w == 0.0 {
                            continue;
                        }
                        let q =
                            q_from_continuation(&beliefs, i, h, g_i, t_digits[i], &jbold);
                        let mut played = 0.0;
                        for (a_rank, a_digits) in beliefs.action_digits.iter().enumerate() {
                            played +=
                                inst.profile.joint_pi(game, fam, h, t_digits, a_digits)
                                    * q[a_rank];
                        }
                        brute += w * (inflated[i][h * ntr + t_rank] - played);
                    }
                }
            }
        }
        assert!((z - brute).abs() < 1e-9, "z = {z}, brute = {brute}");
    }

    #[test]
    fn z_is_zero_on_the_all_zero_game() {
        let game = BaseGame {
            n_agents: 2,
            n_states: 1,
            n_actions: vec![2, 2],
            rewards: vec![0.0; 8],
            transition: vec![1.0; 4],
            initial: vec![1.0],
            discount: 0.9,
        };
        let fam = SignalingFamily::broadcast(
            vec![2, 2],
            vec![1, 1],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            game.histories(),
        );
        let scheme = CostScheme::zero_sab(&game);
        let profile = StrategyProfile::uniform(&game, &fam);
        let beliefs = Beliefs::new(&game, &fam, &scheme);
        let v = vec![vec![0.0; game.histories() * 4]; 2];
        assert_eq!(objective_z(&beliefs, &profile, &v), 0.0);
    }

    #[test]
    fn fe2_violation_is_reported() {
        let inst = instances::repeated_dilemma();
        let (beliefs, triple) = values_of(&inst);
        let mut broken = inst.profile.clone();
        broken.pi[0][0] = 0.0;
        broken.pi[0][1] = 0.9;
        let report = check_feasibility_k(&beliefs, &broken, &triple.v);
        assert!(report.violations.iter().any(|v| v.constraint == "FE2"));
    }

    #[test]
    fn eq2_fails_for_zero_v_on_positive_rewards() {
        let game = BaseGame {
            n_agents: 2,
            n_states: 1,
            n_actions: vec![2, 2],
            rewards: vec![1.0; 8],
            transition: vec![1.0; 4],
            initial: vec![1.0],
            discount: 0.5,
        };
        let fam = SignalingFamily::broadcast(
            vec![2, 2],
            vec![1, 1],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            game.histories(),
        );
        let scheme = CostScheme::zero_sab(&game);
        let profile = StrategyProfile::uniform(&game, &fam);
        let beliefs = Beliefs::new(&game, &fam, &scheme);
        let v = vec![vec![0.0; game.histories() * 4]; 2];
        let report = check_feasibility_k(&beliefs, &profile, &v);
        assert!(report.violations.iter().any(|v| v.constraint == "EQ2"));
    }

    #[test]
    fn catalog_equilibria_pass_direct_verification() {
        for inst in instances::enumerable_catalog() {
            let result = verify_ppme_direct(
                &inst.game,
                &inst.family,
                &inst.scheme,
                &inst.profile,
                VerifyOptions::default(),
            )
            .unwrap();
            assert!(
                result.is_ppme,
                "{}: z={} witness={:?} violations={:?}",
                inst.name,
                result.z_value,
                result.deviation_witness,
                result.constraint_report.violations
            );
        }
    }

    #[test]
    fn dominated_action_produces_a_witness() {
        let mut inst = instances::state_guess_iid();
        // Flip every action row; the scout now guesses the opposite of the
        // state it observed, which is dominated.
        for pi in inst.profile.pi.iter_mut() {
            for h in 0..inst.game.histories() {
                pi[(h * 2) * 2] = 0.0;
                pi[(h * 2) * 2 + 1] = 1.0;
                pi[(h * 2 + 1) * 2] = 1.0;
                pi[(h * 2 + 1) * 2 + 1] = 0.0;
            }
        }
        let result = verify_ppme_direct(
            &inst.game,
            &inst.family,
            &inst.scheme,
            &inst.profile,
            VerifyOptions::default(),
        )
        .unwrap();
        assert!(!result.is_ppme);
        let witness = result.deviation_witness.expect("must find a deviation");
        assert!(witness.gain > 0.1, "gain {}", witness.gain);
    }

    #[test]
    fn single_agent_greedy_policy_verifies() {
        // One agent, identity signal, matching the revealed state is
        // dominant; the greedy policy is the unique optimum of the MDP.
        let game = BaseGame {
            n_agents: 1,
            n_states: 2,
            n_actions: vec![2],
            rewards: vec![1.0, 0.0, 0.0, 1.0],
            transition: vec![
                0.6, 0.4, 0.3, 0.7, 0.5, 0.5, 0.8, 0.2,
            ],
            initial: vec![0.5, 0.5],
            discount: 0.9,
        };
        let block = vec![1.0, 0.0, 0.0, 1.0];
        let fam = SignalingFamily::broadcast(vec![2], vec![1], vec![block], game.histories());
        let scheme = CostScheme::zero_sab(&game);
        let mut profile = StrategyProfile::uniform(&game, &fam);
        for h in 0..game.histories() {
            profile.pi_row_mut(&game, &fam, 0, h, 0).copy_from_slice(&[1.0, 0.0]);
            profile.pi_row_mut(&game, &fam, 0, h, 1).copy_from_slice(&[0.0, 1.0]);
        }
        let result =
            verify_ppme_direct(&game, &fam, &scheme, &profile, VerifyOptions::default())
                .unwrap();
        assert!(result.is_ppme, "witness {:?}", result.deviation_witness);

        // The mirror policy is strictly suboptimal.
        let mut wrong = profile.clone();
        for h in 0..game.histories() {
            wrong.pi_row_mut(&game, &fam, 0, h, 0).copy_from_slice(&[0.0, 1.0]);
            wrong.pi_row_mut(&game, &fam, 0, h, 1).copy_from_slice(&[1.0, 0.0]);
        }
        let result =
            verify_ppme_direct(&game, &fam, &scheme, &wrong, VerifyOptions::default()).unwrap();
        assert!(!result.is_ppme);
    }

    #[test]
    fn gfpa_objective_cancels_definitionally_and_shifts_linearly() {
        let inst = instances::reference_random(12);
        let (beliefs, triple) = values_of(&inst);
        let z = objective_z_gfpa(&beliefs, &inst.profile, &triple.j, &triple.v);
        assert!(z.abs() < 1e-9, "z = {z}");
        let shifted: Vec<Vec<f64>> = triple
            .j
            .iter()
            .map(|ji| ji.iter().map(|x| x + 1.0).collect())
            .collect();
        let z = objective_z_gfpa(&beliefs, &inst.profile, &shifted, &triple.v);
        let expect = (inst.game.n_agents * inst.game.histories()) as f64;
        assert!((z - expect).abs() < 1e-9);
    }

    #[test]
    fn gfpa_feasibility_holds_at_catalog_equilibria() {
        for inst in instances::enumerable_catalog() {
            let (beliefs, triple) = values_of(&inst);
            let report = check_feasibility_k_gfpa(
                &beliefs,
                &inst.profile,
                &triple.j,
                &triple.v,
                VerifyOptions::default(),
            );
            assert!(
                report.is_empty(),
                "{}: {:?}",
                inst.name,
                report.violations
            );
        }
    }

    #[test]
    fn eq3_rejects_deeply_negative_j() {
        let inst = instances::repeated_dilemma();
        let (beliefs, triple) = values_of(&inst);
        let bad = vec![vec![-1000.0; inst.game.histories()]; inst.game.n_agents];
        let report = check_feasibility_k_gfpa(
            &beliefs,
            &inst.profile,
            &bad,
            &triple.v,
            VerifyOptions::default(),
        );
        assert!(report.violations.iter().any(|v| v.constraint == "EQ3"));
    }

    #[test]
    fn rg1_detects_negative_rule_entries() {
        let mut inst = instances::repeated_dilemma();
        inst.family.rule[0][0] = -0.1;
        inst.family.rule[0][1] = 1.1;
        let (beliefs, triple) = values_of(&inst);
        let report = check_feasibility_k_gfpa(
            &beliefs,
            &inst.profile,
            &triple.j,
            &triple.v,
            VerifyOptions::default(),
        );
        assert!(report.violations.iter().any(|v| v.constraint == "RG1"));
    }

    #[test]
    fn propositions_agree_on_equilibria_and_rejections() {
        for inst in instances::enumerable_catalog() {
            let report = cross_check_propositions(
                &inst.game,
                &inst.family,
                &inst.scheme,
                &inst.profile,
                VerifyOptions::default(),
            )
            .unwrap();
            assert!(report.opt_holds, "{}: opt side fails", inst.name);
            assert!(report.gfpa_holds, "{}: gfpa side fails", inst.name);
            assert!(report.sides_agree);
        }
        // A dominated profile must fail on both sides.
        let mut inst = instances::state_guess_iid();
        for pi in inst.profile.pi.iter_mut() {
            for h in 0..inst.game.histories() {
                pi[(h * 2) * 2] = 0.0;
                pi[(h * 2) * 2 + 1] = 1.0;
                pi[(h * 2 + 1) * 2] = 1.0;
                pi[(h * 2 + 1) * 2 + 1] = 0.0;
            }
        }
        let report = cross_check_propositions(
            &inst.game,
            &inst.family,
            &inst.scheme,
            &inst.profile,
            VerifyOptions::default(),
        )
        .unwrap();
        assert!(!report.opt_holds);
        assert!(!report.gfpa_holds);
        assert!(report.sides_agree);
    }

    #[test]
    fn joint_deviation_mode_agrees_with_one_shot_checks() {
        let joint = VerifyOptions {
            joint_deviation: true,
            ..VerifyOptions::default()
        };
        for inst in instances::enumerable_catalog() {
            let result = verify_ppme_direct(
                &inst.game,
                &inst.family,
                &inst.scheme,
                &inst.profile,
                joint,
            )
            .unwrap();
            assert!(
                result.is_ppme,
                "{}: joint mode rejects, witness {:?}",
                inst.name, result.deviation_witness
            );
        }
        let mut inst = instances::state_guess_iid();
        for pi in inst.profile.pi.iter_mut() {
            for h in 0..inst.game.histories() {
                pi[(h * 2) * 2] = 0.0;
                pi[(h * 2) * 2 + 1] = 1.0;
                pi[(h * 2 + 1) * 2] = 1.0;
                pi[(h * 2 + 1) * 2 + 1] = 0.0;
            }
        }
        let result = verify_ppme_direct(
            &inst.game,
            &inst.family,
            &inst.scheme,
            &inst.profile,
            joint,
        )
        .unwrap();
        assert!(!result.is_ppme);
    }

    #[test]
    fn z_stays_nonnegative_on_inflated_feasible_points() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for inst in instances::enumerable_catalog() {
            let (beliefs, triple) = values_of(&inst);
            for _ in 0..20 {
                let kappa: f64 = rng.gen_range(0.0..5.0);
                let inflated: Vec<Vec<f64>> = triple
                    .v
                    .iter()
                    .map(|vi| vi.iter().map(|x| x + kappa).collect())
                    .collect();
                let report = check_feasibility_k(&beliefs, &inst.profile, &inflated);
                assert!(
                    report.is_empty(),
                    "{} kappa={kappa}: inflation broke feasibility: {:?}",
                    inst.name,
                    report.violations
                );
                let z = objective_z(&beliefs, &inst.profile, &inflated);
                assert!(z >= -1e-9, "{} kappa={kappa}: z = {z}", inst.name);
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let inst = instances::reference_random(21);
        let (beliefs, triple) = values_of(&inst);
        let a = check_feasibility_k(&beliefs, &inst.profile, &triple.v);
        let b = check_feasibility_k(&beliefs, &inst.profile, &triple.v);
        assert_eq!(a.max_violation.to_bits(), b.max_violation.to_bits());
        assert_eq!(a.violations.len(), b.violations.len());
        for (x, y) in a.violations.iter().zip(&b.violations) {
            assert_eq!(x.constraint, y.constraint);
            assert_eq!(x.magnitude.to_bits(), y.magnitude.to_bits());
        }
    }
}
