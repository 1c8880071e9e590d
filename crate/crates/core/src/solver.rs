//! Equilibrium search.
//!
//! Three entry points with one contract: a reported success always carries a
//! certificate that an independent checker accepts, never just a converged
//! trace.
//!
//! * [`brute_force_equilibria`] enumerates a finite candidate space (pure
//!   menu choices, action rules on a simplex grid) and keeps what the direct
//!   verifier accepts. It is the ground-truth oracle at desk scale and
//!   refuses, with the exact count, when the space exceeds its budget.
//! * [`solve_ppme_penalty`] alternates damped best-response sweeps on the
//!   action rules with per-history argmin sweeps on the menu choices,
//!   driving the feasibility residuals down under an escalating penalty
//!   weight. Values stay exactly Bellman-consistent throughout: every
//!   candidate is re-evaluated by the dense solve, so the descent moves only
//!   the profile, never a drifting value estimate.
//! * [`solve_admissibility_newton`] polishes a warm start by damped
//!   Gauss-Newton on the stacked local residuals (complementarity products,
//!   negative-gap hinges) with a finite-difference Jacobian and a Euclidean
//!   simplex projection after every step.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beliefs::Beliefs;
use crate::cost::CostScheme;
use crate::error::SgiaError;
use crate::game::BaseGame;
use crate::lfpa::{check_local_admissibility, gamma_i, AdmissibilityCertificate, AdmissibilityOptions};
use crate::numeric::project_to_simplex;
use crate::profile::StrategyProfile;
use crate::signaling::SignalingFamily;
use crate::value::{evaluate_with_beliefs, iv_i, profile_g_rank, SolveMethod};
use crate::verifier::{
    check_feasibility_k, check_feasibility_k_gfpa, objective_z_gfpa, opponent_expected_row,
    q_from_continuation, verify_ppme_direct, VerifyOptions,
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Which search the `solve` entry point runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMode {
    Enumerate,
    Penalty,
    AdmissibilityNewton,
}

/// Search parameters shared by the iterative solvers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mode: SolverMode,
    pub max_iters: usize,
    /// Strictly increasing penalty weights; one epoch per entry.
    pub penalty_schedule: Vec<f64>,
    /// Initial step size; halved when a sweep fails to improve.
    pub step: f64,
    pub restarts: usize,
    pub seed: u64,
    pub z_tol: f64,
    pub residual_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: SolverMode::Penalty,
            max_iters: 200,
            penalty_schedule: vec![1.0, 10.0, 100.0],
            step: 0.5,
            restarts: 4,
            seed: 0,
            z_tol: crate::tol::Z_TOL,
            residual_tol: 1e-9,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SgiaError> {
        if self.max_iters == 0 || self.restarts == 0 {
            return Err(SgiaError::contract("max_iters and restarts must be positive"));
        }
        if !(self.step > 0.0 && self.z_tol > 0.0 && self.residual_tol > 0.0) {
            return Err(SgiaError::contract("step and tolerances must be positive"));
        }
        if self.penalty_schedule.is_empty()
            || self.penalty_schedule.windows(2).any(|w| w[1] <= w[0])
            || self.penalty_schedule[0] <= 0.0
        {
            return Err(SgiaError::contract(
                "penalty schedule must be positive and strictly increasing",
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Bounds and resolution of the exhaustive search.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnumerationOptions {
    /// Action-mixture resolution: 1 keeps pure actions only, `g >= 3` also
    /// enumerates mixtures with weights `k / (g - 1)`.
    pub grid: usize,
    /// Refuse to start when the candidate count exceeds this.
    pub budget: u128,
    /// Restrict to history-constant menu choices and action rules. The
    /// candidate space is otherwise exponential in the history count.
    pub history_free: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            grid: 1,
            budget: 1_000_000,
            history_free: true,
        }
    }
}

/// All distributions over `n` points whose weights are multiples of
/// `1 / (grid - 1)`, pure vertices when `grid <= 2`; deterministic order.
pub fn simplex_grid(n: usize, grid: usize) -> Vec<Vec<f64>> {
    if grid <= 2 {
        return (0..n)
            .map(|a| {
                let mut row = vec![0.0; n];
                row[a] = 1.0;
                row
            })
            .collect();
    }
    let denom = grid - 1;
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    compositions(n, denom, &mut prefix, &mut out);
    out.iter()
        .map(|c| c.iter().map(|&k| k as f64 / denom as f64).collect())
        .collect()
}

fn compositions(n: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if n == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in 0..=total {
        prefix.push(k);
        compositions(n - 1, total - k, prefix, out);
        prefix.pop();
    }
}

/// One enumerated coordinate: a menu choice or one type's action row.
enum Slot {
    Beta { agent: usize, history: Option<usize> },
    Pi { agent: usize, theta: usize, history: Option<usize> },
}

struct EnumLayout {
    slots: Vec<Slot>,
    radices: Vec<usize>,
    /// Grid rows per agent.
    rows: Vec<Vec<Vec<f64>>>,
}

fn enum_layout(game: &BaseGame, fam: &SignalingFamily, opts: &EnumerationOptions) -> EnumLayout {
    let nh = game.histories();
    let hs: Vec<Option<usize>> = if opts.history_free {
        vec![None]
    } else {
        (0..nh).map(Some).collect()
    };
    let rows: Vec<Vec<Vec<f64>>> = (0..game.n_agents)
        .map(|i| simplex_grid(game.n_actions[i], opts.grid))
        .collect();
    let mut slots = Vec::new();
    let mut radices = Vec::new();
    for i in 0..game.n_agents {
        for &history in &hs {
            slots.push(Slot::Beta { agent: i, history });
            radices.push(fam.n_cogs[i]);
        }
        for theta in 0..fam.n_types[i] {
            for &history in &hs {
                slots.push(Slot::Pi {
                    agent: i,
                    theta,
                    history,
                });
                radices.push(rows[i].len());
            }
        }
    }
    EnumLayout { slots, radices, rows }
}

/// Candidate count of the enumeration, `None` on overflow.
pub fn enumeration_count(
    game: &BaseGame,
    fam: &SignalingFamily,
    opts: &EnumerationOptions,
) -> Option<u128> {
    let layout = enum_layout(game, fam, opts);
    layout
        .radices
        .iter()
        .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
}

fn profile_at(
    game: &BaseGame,
    fam: &SignalingFamily,
    layout: &EnumLayout,
    mut index: u64,
) -> StrategyProfile {
    let nh = game.histories();
    let mut profile = StrategyProfile::uniform(game, fam);
    // Digits unrank little-endian over the slot list; any fixed convention
    // works, the ordering only has to be reproducible.
    for (slot, &radix) in layout.slots.iter().zip(&layout.radices) {
        let digit = (index % radix as u64) as usize;
        index /= radix as u64;
        match *slot {
            Slot::Beta { agent, history } => match history {
                Some(h) => profile.beta[agent][h] = digit,
                None => profile.beta[agent].iter_mut().for_each(|g| *g = digit),
            },
            Slot::Pi { agent, theta, history } => {
                let row = &layout.rows[agent][digit];
                match history {
                    Some(h) => profile
                        .pi_row_mut(game, fam, agent, h, theta)
                        .copy_from_slice(row),
                    None => {
                        for h in 0..nh {
                            profile
                                .pi_row_mut(game, fam, agent, h, theta)
                                .copy_from_slice(row);
                        }
                    }
                }
            }
        }
    }
    profile
}

/// Every candidate profile of the enumeration, in deterministic order.
/// Refuses with the computed count when the space exceeds the budget.
pub fn enumerate_profiles(
    game: &BaseGame,
    fam: &SignalingFamily,
    opts: &EnumerationOptions,
) -> Result<Vec<StrategyProfile>, SgiaError> {
    let layout = enum_layout(game, fam, opts);
    let total = enumeration_count(game, fam, opts).unwrap_or(u128::MAX);
    if total > opts.budget {
        return Err(SgiaError::BudgetExceeded {
            required: total,
            budget: opts.budget,
        });
    }
    let total = u64::try_from(total)
        .map_err(|_| SgiaError::contract("enumeration budget exceeds the indexable range"))?;
    Ok((0..total)
        .map(|idx| profile_at(game, fam, &layout, idx))
        .collect())
}

/// Exhaustive search: enumerates the candidate space and returns every
/// profile the direct verifier accepts, in enumeration order.
pub fn brute_force_equilibria(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    opts: &EnumerationOptions,
) -> Result<Vec<StrategyProfile>, SgiaError> {
    let candidates = enumerate_profiles(game, fam, opts)?;
    let verdicts: Vec<Result<bool, SgiaError>> = candidates
        .par_iter()
        .map(|profile| {
            verify_ppme_direct(game, fam, scheme, profile, VerifyOptions::default())
                .map(|r| r.is_ppme)
        })
        .collect();
    let mut out = Vec::new();
    for (profile, verdict) in candidates.into_iter().zip(verdicts) {
        if verdict? {
            out.push(profile);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Penalty descent
// ---------------------------------------------------------------------------

/// One logged iteration of an iterative solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub z_gfpa: f64,
    pub max_violation: f64,
    pub step: f64,
}

/// Result of a penalty run: the final profile, its independently checkable
/// certificate, and the residual trace. `converged` requires both the
/// certificate and the residual target: the certificate alone tolerates
/// optimality gaps up to its complementarity scale, which is looser than
/// the feasibility sweep, so a run that exhausts its iteration budget a
/// few 1e-9 short would otherwise claim a success the direct check rejects.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub profile: StrategyProfile,
    pub certificate: AdmissibilityCertificate,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
}

fn random_profile(game: &BaseGame, fam: &SignalingFamily, rng: &mut ChaCha8Rng) -> StrategyProfile {
    let mut profile = StrategyProfile::uniform(game, fam);
    for (i, beta_i) in profile.beta.iter_mut().enumerate() {
        for g in beta_i.iter_mut() {
            *g = rng.gen_range(0..fam.n_cogs[i]);
        }
    }
    for i in 0..game.n_agents {
        for h in 0..game.histories() {
            for theta in 0..fam.n_types[i] {
                let row = profile.pi_row_mut(game, fam, i, h, theta);
                for p in row.iter_mut() {
                    *p = -(rng.gen::<f64>().max(1e-12)).ln();
                }
                let sum: f64 = row.iter().sum();
                for p in row.iter_mut() {
                    *p /= sum;
                }
            }
        }
    }
    profile
}

/// Bellman-consistent residual snapshot of a profile: the alignment
/// objective and the largest feasibility violation across both constraint
/// sets.
fn residual_snapshot(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
) -> Result<(f64, f64), SgiaError> {
    let triple = evaluate_with_beliefs(beliefs, profile, SolveMethod::Direct)?;
    let z = objective_z_gfpa(beliefs, profile, &triple.j, &triple.v);
    let gfpa = check_feasibility_k_gfpa(beliefs, profile, &triple.j, &triple.v, VerifyOptions::default());
    let scalar = check_feasibility_k(beliefs, profile, &triple.v);
    Ok((z, gfpa.max_violation.max(scalar.max_violation)))
}

fn penalized_objective(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    weight: f64,
) -> Result<f64, SgiaError> {
    let triple = evaluate_with_beliefs(beliefs, profile, SolveMethod::Direct)?;
    let z = objective_z_gfpa(beliefs, profile, &triple.j, &triple.v).abs();
    let gfpa = check_feasibility_k_gfpa(beliefs, profile, &triple.j, &triple.v, VerifyOptions::default());
    let scalar = check_feasibility_k(beliefs, profile, &triple.v);
    let mut penalty = 0.0;
    for v in gfpa.violations.iter().chain(scalar.violations.iter()) {
        penalty += v.magnitude * v.magnitude;
    }
    Ok(z + weight * penalty)
}

fn penalty_run(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    config: &SolverConfig,
    seed: u64,
) -> Result<SolveOutcome, SgiaError> {
    let beliefs = Beliefs::new(game, fam, scheme);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut profile = random_profile(game, fam, &mut rng);
    let mut trace = Vec::new();
    let mut step = config.step;
    let mut iter = 0usize;
    let per_epoch = (config.max_iters / config.penalty_schedule.len()).max(1);
    let mut last_phi = f64::INFINITY;

    'epochs: for &weight in &config.penalty_schedule {
        for _ in 0..per_epoch {
            iter += 1;
            // Action stage: one damped best-response sweep at the current
            // Bellman-consistent values.
            let triple = evaluate_with_beliefs(&beliefs, &profile, SolveMethod::Direct)?;
            let mut next = profile.clone();
            for i in 0..game.n_agents {
                for h in 0..game.histories() {
                    let g_i = profile.beta[i][h];
                    let g_rank = profile_g_rank(&beliefs, &profile, h);
                    for theta in 0..fam.n_types[i] {
                        if !beliefs.defined(i, h, g_i, theta) {
                            continue;
                        }
                        let q = q_from_continuation(&beliefs, i, h, g_i, theta, &triple.j[i]);
                        let per_own =
                            opponent_expected_row(&beliefs, &profile, i, h, g_rank, theta, &q);
                        let mut best = 0;
                        for (a, &val) in per_own.iter().enumerate() {
                            if val > per_own[best] {
                                best = a;
                            }
                        }
                        let row = next.pi_row_mut(game, fam, i, h, theta);
                        for (a, p) in row.iter_mut().enumerate() {
                            let target = if a == best { 1.0 } else { 0.0 };
                            *p += step * (target - *p);
                        }
                        project_to_simplex(row);
                    }
                }
            }
            profile = next;

            // Cognition stage: per-history discrete argmin of the penalized
            // objective, lowest index on ties.
            for i in 0..game.n_agents {
                for h in 0..game.histories() {
                    let mut best_g = profile.beta[i][h];
                    let mut best_phi = f64::INFINITY;
                    for g in 0..fam.n_cogs[i] {
                        let mut cand = profile.clone();
                        cand.beta[i][h] = g;
                        let phi = penalized_objective(&beliefs, &cand, weight)?;
                        if phi < best_phi {
                            best_phi = phi;
                            best_g = g;
                        }
                    }
                    profile.beta[i][h] = best_g;
                }
            }

            let phi = penalized_objective(&beliefs, &profile, weight)?;
            if phi > last_phi {
                step = (step * 0.5).max(1e-3);
            }
            last_phi = phi;

            let (z, max_violation) = residual_snapshot(&beliefs, &profile)?;
            trace.push(TraceRow {
                iter,
                z_gfpa: z,
                max_violation,
                step,
            });
            if z.abs() <= config.z_tol && max_violation <= config.residual_tol {
                break 'epochs;
            }
            if iter >= config.max_iters {
                break 'epochs;
            }
        }
    }

    let triple = evaluate_with_beliefs(&beliefs, &profile, SolveMethod::Direct)?;
    let certificate = check_local_admissibility(
        game,
        fam,
        scheme,
        &profile,
        &triple.j,
        &triple.v,
        AdmissibilityOptions::default(),
    )?;
    // The last trace row snapshots the returned profile: rows are pushed
    // after the sweeps, and both exits happen right after a push.
    let met_residual_target = trace
        .last()
        .is_some_and(|row| row.z_gfpa.abs() <= config.z_tol && row.max_violation <= config.residual_tol);
    let converged = certificate.admissible && met_residual_target;
    Ok(SolveOutcome {
        profile,
        certificate,
        trace,
        converged,
    })
}

fn profile_key(profile: &StrategyProfile) -> (Vec<usize>, Vec<u64>) {
    let beta: Vec<usize> = profile.beta.iter().flatten().copied().collect();
    let pi: Vec<u64> = profile
        .pi
        .iter()
        .flatten()
        .map(|p| p.to_bits())
        .collect();
    (beta, pi)
}

/// Multi-start penalty search. Restarts run in parallel on consecutive
/// seeds; the merge prefers admissible outcomes, then lower final violation,
/// then the lexicographically smallest profile, so the result is a
/// deterministic function of the config.
pub fn solve_ppme_penalty(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    config: &SolverConfig,
) -> Result<SolveOutcome, SgiaError> {
    config.validate()?;
    let outcomes: Result<Vec<SolveOutcome>, SgiaError> = (0..config.restarts)
        .into_par_iter()
        .map(|r| penalty_run(game, fam, scheme, config, config.seed.wrapping_add(r as u64)))
        .collect();
    let outcomes = outcomes?;
    outcomes
        .into_iter()
        .min_by(|a, b| {
            let viol = |o: &SolveOutcome| o.trace.last().map_or(f64::INFINITY, |t| t.max_violation);
            (!a.converged)
                .cmp(&!b.converged)
                .then(viol(a).total_cmp(&viol(b)))
                .then_with(|| profile_key(&a.profile).cmp(&profile_key(&b.profile)))
        })
        .ok_or_else(|| SgiaError::contract("restarts must be positive"))
}

// ---------------------------------------------------------------------------
// Gauss-Newton polish
// ---------------------------------------------------------------------------

/// Result of the local polish: the projected profile, its certificate, and
/// how the iteration behaved.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NewtonOutcome {
    pub profile: StrategyProfile,
    pub certificate: AdmissibilityCertificate,
    pub iterations: usize,
    pub residual_norm: f64,
    /// Steps where the normal equations were singular and a plain gradient
    /// step was taken instead.
    pub gradient_fallbacks: usize,
}

/// Stacked local residuals of a profile at its own Bellman-consistent
/// values: complementarity products and negative-gap hinges for both
/// stages. Zero exactly on the admissible set.
fn stacked_residuals(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
) -> Result<Vec<f64>, SgiaError> {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let triple = evaluate_with_beliefs(beliefs, profile, SolveMethod::Direct)?;
    let mut r = Vec::new();
    for i in 0..game.n_agents {
        for h in 0..game.histories() {
            let g: Vec<usize> = profile.beta.iter().map(|b| b[h]).collect();
            for theta in 0..fam.n_types[i] {
                if !beliefs.defined(i, h, g[i], theta) {
                    continue;
                }
                let lambda =
                    triple.j[i][h] - iv_i(beliefs, &triple.v[i], &g, i, h, theta, None);
                for s in 0..game.n_states {
                    r.push(fam.tau(game, i, h, s, g[i], theta) * lambda);
                }
                r.push((-lambda).max(0.0));
                for a in 0..game.n_actions[i] {
                    let gamma =
                        gamma_i(beliefs, profile, &triple.j[i], &triple.v[i], i, h, theta, a)?;
                    r.push(profile.pi(game, fam, i, h, theta, a) * gamma);
                    r.push((-gamma).max(0.0));
                }
            }
        }
    }
    Ok(r)
}

fn flatten_pi(profile: &StrategyProfile) -> Vec<f64> {
    profile.pi.iter().flatten().copied().collect()
}

fn unflatten_pi(profile: &mut StrategyProfile, flat: &[f64]) {
    let mut k = 0;
    for pi_i in profile.pi.iter_mut() {
        let len = pi_i.len();
        pi_i.copy_from_slice(&flat[k..k + len]);
        k += len;
    }
}

fn project_profile(game: &BaseGame, fam: &SignalingFamily, profile: &mut StrategyProfile) {
    for i in 0..game.n_agents {
        for h in 0..game.histories() {
            for theta in 0..fam.n_types[i] {
                project_to_simplex(profile.pi_row_mut(game, fam, i, h, theta));
            }
        }
    }
}

/// Damped Gauss-Newton on the stacked residuals, moving the action rules
/// only; the menu choices stay at the warm start. Success is decided by the
/// final certificate.
pub fn solve_admissibility_newton(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    config: &SolverConfig,
    warm_start: &StrategyProfile,
) -> Result<NewtonOutcome, SgiaError> {
    config.validate()?;
    let beliefs = Beliefs::new(game, fam, scheme);
    let mut profile = warm_start.clone();
    project_profile(game, fam, &mut profile);
    let mut iterations = 0usize;
    let mut gradient_fallbacks = 0usize;
    let fd = crate::tol::FD_STEP;

    let mut residual = stacked_residuals(&beliefs, &profile)?;
    let sup = |r: &[f64]| r.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    while sup(&residual) > config.residual_tol && iterations < config.max_iters {
        iterations += 1;
        let u = flatten_pi(&profile);
        let n = u.len();
        // Forward-difference Jacobian, column by column.
        let columns: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut bumped = profile.clone();
                let mut flat = u.clone();
                flat[k] += fd;
                unflatten_pi(&mut bumped, &flat);
                let rk = stacked_residuals(&beliefs, &bumped)?;
                Ok(rk
                    .iter()
                    .zip(&residual)
                    .map(|(a, b)| (a - b) / fd)
                    .collect())
            })
            .collect::<Result<_, SgiaError>>()?;
        // Normal equations with a small damping ridge.
        let mut a = vec![0.0; n * n];
        let mut g = vec![0.0; n];
        for (k, col) in columns.iter().enumerate() {
            for (l, other) in columns.iter().enumerate().skip(k) {
                let dot: f64 = col.iter().zip(other).map(|(x, y)| x * y).sum();
                a[k * n + l] = dot;
                a[l * n + k] = dot;
            }
            g[k] = col.iter().zip(&residual).map(|(x, y)| x * y).sum();
        }
        for k in 0..n {
            a[k * n + k] += 1e-9;
        }
        let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
        let delta = match crate::numeric::solve_dense(a, rhs, "admissibility newton step") {
            Ok(d) => d,
            Err(SgiaError::SingularSystem { .. }) => {
                gradient_fallbacks += 1;
                g.iter().map(|x| -config.step * x).collect()
            }
            Err(e) => return Err(e),
        };

        let base_norm = sup(&residual);
        let mut alpha = 1.0;
        loop {
            let mut cand = profile.clone();
            let flat: Vec<f64> = u.iter().zip(&delta).map(|(x, d)| x + alpha * d).collect();
            unflatten_pi(&mut cand, &flat);
            project_profile(game, fam, &mut cand);
            let cand_res = stacked_residuals(&beliefs, &cand)?;
            if sup(&cand_res) < base_norm || alpha < 1e-3 {
                profile = cand;
                residual = cand_res;
                break;
            }
            alpha *= 0.5;
        }
    }

    let triple = evaluate_with_beliefs(&beliefs, &profile, SolveMethod::Direct)?;
    let certificate = check_local_admissibility(
        game,
        fam,
        scheme,
        &profile,
        &triple.j,
        &triple.v,
        AdmissibilityOptions::default(),
    )?;
    Ok(NewtonOutcome {
        residual_norm: sup(&residual),
        profile,
        certificate,
        iterations,
        gradient_fallbacks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostKind;
    use crate::instances;

    fn all_zero_instance() -> (BaseGame, SignalingFamily, CostScheme) {
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
        (game, fam, scheme)
    }

    #[test]
    fn enumeration_refuses_over_budget() {
        let inst = instances::state_guess_iid();
        let opts = EnumerationOptions {
            budget: 10,
            ..EnumerationOptions::default()
        };
        let err = brute_force_equilibria(&inst.game, &inst.family, &inst.scheme, &opts)
            .unwrap_err();
        match err {
            SgiaError::BudgetExceeded { required, budget } => {
                assert_eq!(required, 64);
                assert_eq!(budget, 10);
            }
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn every_profile_passes_on_the_all_zero_game() {
        let (game, fam, scheme) = all_zero_instance();
        let found =
            brute_force_equilibria(&game, &fam, &scheme, &EnumerationOptions::default()).unwrap();
        // One menu item per agent, two pure rows per type: 4 x 4 profiles.
        assert_eq!(found.len(), 16);
    }

    #[test]
    fn dilemma_enumeration_pins_the_defect_policy() {
        let inst = instances::repeated_dilemma();
        let found = brute_force_equilibria(
            &inst.game,
            &inst.family,
            &inst.scheme,
            &EnumerationOptions::default(),
        )
        .unwrap();
        // The action policy is unique (defect at every type and history);
        // the menu choice is payoff-irrelevant, so all four combinations
        // carry it.
        assert_eq!(found.len(), 4);
        for profile in &found {
            for i in 0..2 {
                for h in 0..inst.game.histories() {
                    for theta in 0..2 {
                        let row = profile.pi_row(&inst.game, &inst.family, i, h, theta);
                        assert_eq!(row, [0.0, 1.0]);
                    }
                }
            }
        }
    }

    #[test]
    fn mixed_equilibria_appear_only_on_finer_grids() {
        // Matching pennies with a single type per agent: no pure profile is
        // an equilibrium, the half-half mix is.
        let game = BaseGame {
            n_agents: 2,
            n_states: 1,
            n_actions: vec![2, 2],
            rewards: vec![
                1.0, -1.0, -1.0, 1.0, // agent 0
                -1.0, 1.0, 1.0, -1.0, // agent 1
            ],
            transition: vec![1.0; 4],
            initial: vec![1.0],
            discount: 0.8,
        };
        let fam = SignalingFamily::broadcast(
            vec![1, 1],
            vec![1, 1],
            vec![vec![1.0], vec![1.0]],
            game.histories(),
        );
        let scheme = CostScheme::zero_sab(&game);

        let pure =
            brute_force_equilibria(&game, &fam, &scheme, &EnumerationOptions::default()).unwrap();
        assert!(pure.is_empty());

        let fine = brute_force_equilibria(
            &game,
            &fam,
            &scheme,
            &EnumerationOptions {
                grid: 11,
                ..EnumerationOptions::default()
            },
        )
        .unwrap();
        assert_eq!(fine.len(), 1);
        let row = fine[0].pi_row(&game, &fam, 0, 0, 0);
        assert_eq!(row, [0.5, 0.5]);
    }

    #[test]
    fn enumeration_matches_an_independent_double_loop() {
        let inst = instances::state_guess_iid();
        let opts = EnumerationOptions::default();
        let found =
            brute_force_equilibria(&inst.game, &inst.family, &inst.scheme, &opts).unwrap();
        let candidates = enumerate_profiles(&inst.game, &inst.family, &opts).unwrap();
        assert_eq!(candidates.len(), 64);
        let mut direct = Vec::new();
        for profile in candidates {
            let ok = verify_ppme_direct(
                &inst.game,
                &inst.family,
                &inst.scheme,
                &profile,
                VerifyOptions::default(),
            )
            .unwrap()
            .is_ppme;
            if ok {
                direct.push(profile);
            }
        }
        assert_eq!(found.len(), direct.len());
        for (a, b) in found.iter().zip(&direct) {
            assert_eq!(profile_key(a), profile_key(b));
        }
        // The pinned catalog equilibrium is history-free, so the oracle must
        // rediscover it.
        assert!(found
            .iter()
            .any(|p| profile_key(p) == profile_key(&inst.profile)));
    }

    #[test]
    fn config_validation_rejects_bad_schedules() {
        let mut config = SolverConfig::default();
        config.penalty_schedule = vec![1.0, 1.0];
        assert!(config.validate().is_err());
        config.penalty_schedule = vec![1.0, 10.0];
        config.z_tol = 0.0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn penalty_descent_reaches_a_certified_point() {
        let inst = instances::state_guess_iid();
        let config = SolverConfig {
            max_iters: 150,
            restarts: 2,
            seed: 7,
            ..SolverConfig::default()
        };
        let outcome =
            solve_ppme_penalty(&inst.game, &inst.family, &inst.scheme, &config).unwrap();
        assert!(outcome.converged, "final trace: {:?}", outcome.trace.last());
        // Soundness: the independent verifier agrees with the certificate.
        let direct = verify_ppme_direct(
            &inst.game,
            &inst.family,
            &inst.scheme,
            &outcome.profile,
            VerifyOptions::default(),
        )
        .unwrap();
        assert!(direct.is_ppme);
        // Residuals do not grow across the run.
        let first = outcome.trace.first().unwrap().max_violation;
        let last = outcome.trace.last().unwrap().max_violation;
        assert!(last <= first + 1e-12, "{first} -> {last}");
    }

    #[test]
    fn penalty_descent_is_deterministic() {
        let inst = instances::state_guess_markov();
        let config = SolverConfig {
            max_iters: 40,
            restarts: 3,
            seed: 11,
            ..SolverConfig::default()
        };
        let a = solve_ppme_penalty(&inst.game, &inst.family, &inst.scheme, &config).unwrap();
        let b = solve_ppme_penalty(&inst.game, &inst.family, &inst.scheme, &config).unwrap();
        assert_eq!(profile_key(&a.profile), profile_key(&b.profile));
        assert_eq!(a.trace.len(), b.trace.len());
        for (x, y) in a.trace.iter().zip(&b.trace) {
            assert_eq!(x.max_violation.to_bits(), y.max_violation.to_bits());
        }
    }

    #[test]
    fn all_zero_game_converges_immediately() {
        let (game, fam, scheme) = all_zero_instance();
        let config = SolverConfig {
            max_iters: 5,
            restarts: 1,
            ..SolverConfig::default()
        };
        let outcome = solve_ppme_penalty(&game, &fam, &scheme, &config).unwrap();
        assert!(outcome.converged);
        let row = outcome.trace.first().unwrap();
        assert!(row.z_gfpa.abs() < 1e-12);
        assert!(row.max_violation < 1e-12);
    }

    #[test]
    fn newton_accepts_an_exact_warm_start_without_stepping() {
        let inst = instances::state_guess_iid();
        let outcome = solve_admissibility_newton(
            &inst.game,
            &inst.family,
            &inst.scheme,
            &SolverConfig::default(),
            &inst.profile,
        )
        .unwrap();
        assert_eq!(outcome.iterations, 0);
        assert!(outcome.certificate.admissible);
    }

    #[test]
    fn newton_polishes_a_nearby_start() {
        let inst = instances::state_guess_iid();
        let mut warm = inst.profile.clone();
        for i in 0..2 {
            for h in 0..inst.game.histories() {
                for theta in 0..2 {
                    let row = warm.pi_row_mut(&inst.game, &inst.family, i, h, theta);
                    for (a, p) in row.iter_mut().enumerate() {
                        *p = (*p - 1e-3 * if a == 0 { 1.0 } else { -1.0 }).clamp(0.0, 1.0);
                    }
                    project_to_simplex(row);
                }
            }
        }
        let config = SolverConfig {
            max_iters: 50,
            ..SolverConfig::default()
        };
        let outcome = solve_admissibility_newton(
            &inst.game,
            &inst.family,
            &inst.scheme,
            &config,
            &warm,
        )
        .unwrap();
        assert!(
            outcome.certificate.admissible,
            "residual {} after {} iterations",
            outcome.residual_norm, outcome.iterations
        );
        assert!(outcome.iterations <= 50);
    }

    #[test]
    fn solver_modes_serialize_kebab_case() {
        let s = serde_json::to_string(&SolverMode::AdmissibilityNewton).unwrap();
        assert_eq!(s, "\"admissibility-newton\"");
        let m: SolverMode = serde_json::from_str("\"enumerate\"").unwrap();
        assert_eq!(m, SolverMode::Enumerate);
        // Cost kinds share the same casing convention in files.
        let k = serde_json::to_string(&CostKind::Sab).unwrap();
        assert_eq!(k, "\"sab\"");
    }
}
