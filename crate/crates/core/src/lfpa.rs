//! Local alignment certificates.
//!
//! The verifier's programs quantify over whole profiles. The local route asks
//! a smaller question at every (agent, state, history) cell: holding the rest
//! of the candidate fixed, does the agent's signal slice at that cell put
//! mass only on types whose interim value already matches the history value?
//! The per-type gap is [`lambda_i`]; the cell objective [`z_lfpa`] weights it
//! by the slice. First-order optimality of the cell program is certified by
//! the stationarity residuals of its Lagrangian ([`lagrangian_residuals`],
//! with multipliers recovered in closed form by [`recover_multipliers`]) and
//! by complementary slackness ([`check_r`]). The action stage contributes its
//! own gap [`gamma_i`] with the product condition `pi * gamma = 0`
//! ([`check_r_dagger`]). Bundled over all cells, together with a rank test on
//! the gap gradients that makes the multiplier recovery sound, these form the
//! admissibility certificate ([`check_local_admissibility`]).
//!
//! The certificate is equivalent to the one-shot verification verdict only
//! where the rank test passes; the certificate reports the rank outcome per
//! cell so callers can tell the two regimes apart.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beliefs::Beliefs;
use crate::cost::{CostKind, CostScheme};
use crate::error::SgiaError;
use crate::game::BaseGame;
use crate::numeric::rank_row_reduce;
use crate::profile::StrategyProfile;
use crate::signaling::SignalingFamily;
use crate::tol;
use crate::value::{iv_i, mv_i, profile_g_rank};
use crate::verifier::{opponent_expected_row, q_from_continuation, ConstraintReport};

// ---------------------------------------------------------------------------
// Cell data
// ---------------------------------------------------------------------------

/// Decision data of one (agent, state, history) cell.
///
/// `x` stacks the coordinates the cell program varies: the history value,
/// the full per-type value slice at `h`, and the opponents' signal slice at
/// `(s, h)`, in that order. The own slice `tau_i` is the variable the cell
/// optimizes over; everything the cell treats as exogenous (the other
/// states' interim contributions) is frozen into `c_other` at assembly.
#[derive(Debug, Clone)]
pub struct LocalPoint {
    /// `[J_i(h), V_i(h, .), tau_-i(. | s, g_-i, h)]` flattened; the value
    /// block is in joint type-rank order, the opponent block in opponent
    /// rank order.
    pub x: Vec<f64>,
    /// Own signal slice `tau_i(. | s, g_i, h)`.
    pub tau_i: Vec<f64>,
    /// Per own type: the interim-value mass contributed by states other
    /// than `state`, held constant by the cell.
    pub c_other: Vec<f64>,
    /// `T(state | history)`.
    pub state_weight: f64,
    /// `v_slot[theta][o]` is the index into `x` of `V_i(h, theta join o)`.
    v_slot: Vec<Vec<usize>>,
    /// Index into `x` of the first opponent-slice coordinate.
    opp_offset: usize,
    pub agent: usize,
    pub state: usize,
    pub history: usize,
    /// Cognition choices `beta(h)` the slices were read at.
    pub g: Vec<usize>,
}

impl LocalPoint {
    /// Number of own types in the cell.
    pub fn n_own_types(&self) -> usize {
        self.tau_i.len()
    }
}

/// Builds the cell data of agent `i` at `(s, h)` from candidate values,
/// reading every slice at the profile's cognition choices.
pub fn assemble_local_point(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    j_i: &[f64],
    v_i: &[f64],
    i: usize,
    s: usize,
    h: usize,
) -> LocalPoint {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let g: Vec<usize> = profile.beta.iter().map(|b| b[h]).collect();
    let ntr = beliefs.type_space.len();
    let opp_space = &beliefs.opp_type_spaces[i];
    let n_own = fam.n_types[i];

    let mut x = Vec::with_capacity(1 + ntr + opp_space.len());
    x.push(j_i[h]);
    x.extend_from_slice(&v_i[h * ntr..(h + 1) * ntr]);
    for o_rank in opp_space.iter() {
        let mut w = 1.0;
        for d in 0..opp_space.radices().len() {
            let jagent = opp_space.axis(d);
            w *= fam.tau(game, jagent, h, s, g[jagent], opp_space.digit(o_rank, d));
        }
        x.push(w);
    }
    let tau_i: Vec<f64> = (0..n_own).map(|t| fam.tau(game, i, h, s, g[i], t)).collect();
    let v_slot: Vec<Vec<usize>> = (0..n_own)
        .map(|t| {
            opp_space
                .iter()
                .map(|o| 1 + beliefs.type_space.rank(&opp_space.merge_with_own(o, i, t)))
                .collect()
        })
        .collect();
    let c_other: Vec<f64> = (0..n_own)
        .map(|t| iv_i(beliefs, v_i, &g, i, h, t, None) - iv_i(beliefs, v_i, &g, i, h, t, Some(s)))
        .collect();
    LocalPoint {
        x,
        tau_i,
        c_other,
        state_weight: game.state_prob(h, s),
        v_slot,
        opp_offset: 1 + ntr,
        agent: i,
        state: s,
        history: h,
        g,
    }
}

// ---------------------------------------------------------------------------
// Gaps and gradients
// ---------------------------------------------------------------------------

/// Splits a type space into the working types and one designated type whose
/// slice weight is substituted out by the normalisation constraint. The
/// designated type defaults to the last in canonical order; the verdicts do
/// not depend on the choice, which callers may override to cross-check.
pub fn decompose_types(n_types: usize, hat: Option<usize>) -> (Vec<usize>, usize) {
    assert!(n_types >= 1, "type space must be nonempty");
    let hat = hat.unwrap_or(n_types - 1);
    assert!(hat < n_types, "designated type out of range");
    ((0..n_types).filter(|&t| t != hat).collect(), hat)
}

/// Alignment gap of one own type: history value minus the type's interim
/// value, with the cell's state contribution expressed through `x` and the
/// other states' contribution frozen. Zero-probability types are evaluated
/// as written; no posterior is involved.
pub fn lambda_i(point: &LocalPoint, theta: usize) -> f64 {
    let mut iv_s = 0.0;
    for (o, &slot) in point.v_slot[theta].iter().enumerate() {
        iv_s += point.x[slot] * point.x[point.opp_offset + o];
    }
    point.x[0] - point.state_weight * iv_s - point.c_other[theta]
}

/// Gradient of [`lambda_i`] in the cell coordinates `x`.
pub fn lambda_gradient(point: &LocalPoint, theta: usize) -> Vec<f64> {
    let mut grad = vec![0.0; point.x.len()];
    grad[0] = 1.0;
    for (o, &slot) in point.v_slot[theta].iter().enumerate() {
        grad[slot] -= point.state_weight * point.x[point.opp_offset + o];
        grad[point.opp_offset + o] -= point.state_weight * point.x[slot];
    }
    grad
}

/// Cell objective: the own slice's expected alignment gap.
pub fn z_lfpa(point: &LocalPoint) -> f64 {
    point
        .tau_i
        .iter()
        .enumerate()
        .map(|(t, w)| w * lambda_i(point, t))
        .sum()
}

/// Gradient of [`z_lfpa`] in the cell coordinates `x`.
pub fn z_lfpa_gradient(point: &LocalPoint) -> Vec<f64> {
    let mut grad = vec![0.0; point.x.len()];
    for (t, &w) in point.tau_i.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (slot, gk) in lambda_gradient(point, t).into_iter().enumerate() {
            grad[slot] += w * gk;
        }
    }
    grad
}

// ---------------------------------------------------------------------------
// Multipliers and the R system
// ---------------------------------------------------------------------------

/// Lagrange multipliers of one cell program: `e` for the normalisation of
/// the own slice, `b` for the nonnegativity of the working types' weights,
/// `f` for the nonnegativity of the alignment gaps. Slack variables are the
/// constraint values themselves and are not stored.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Multipliers {
    pub e: f64,
    /// One entry per working type, in canonical type order.
    pub b: Vec<f64>,
    /// One entry per own type.
    pub f: Vec<f64>,
    /// The substituted-out type `b` is relative to.
    pub theta_hat: usize,
}

/// Closed-form multipliers that solve the cell's stationarity system: `f`
/// copies the own slice, `b` and `e` are the negated gaps of the working
/// and designated types.
pub fn recover_multipliers(point: &LocalPoint, hat: Option<usize>) -> Multipliers {
    let (natural, hat) = decompose_types(point.n_own_types(), hat);
    Multipliers {
        e: -lambda_i(point, hat),
        b: natural.iter().map(|&t| -lambda_i(point, t)).collect(),
        f: point.tau_i.clone(),
        theta_hat: hat,
    }
}

/// Stationarity residuals of the cell Lagrangian: `delta` over the cell
/// coordinates `x`, `d` over the own types.
///
/// The designated type's weight is eliminated by the substitution
/// `tau_i(hat) = 1 - sum of the rest`, so the objective's slice derivative at
/// a working type is `lambda(theta) - lambda(hat)` and the designated type
/// itself has no stationarity equation; its `d` entry stays zero.
pub fn lagrangian_residuals(point: &LocalPoint, mult: &Multipliers) -> (Vec<f64>, Vec<f64>) {
    let n = point.n_own_types();
    let (natural, hat) = decompose_types(n, Some(mult.theta_hat));
    let mut delta = z_lfpa_gradient(point);
    for theta in 0..n {
        if mult.f[theta] == 0.0 {
            continue;
        }
        for (slot, gk) in lambda_gradient(point, theta).into_iter().enumerate() {
            delta[slot] -= mult.f[theta] * gk;
        }
    }
    let lam_hat = lambda_i(point, hat);
    let mut d = vec![0.0; n];
    for (k, &theta) in natural.iter().enumerate() {
        d[theta] = mult.b[k] - mult.e + lambda_i(point, theta) - lam_hat;
    }
    (delta, d)
}

/// One cell's stationarity and complementarity record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RSystemRecord {
    pub agent: usize,
    pub state: usize,
    pub history: usize,
    pub multipliers: Multipliers,
    /// Sup norm of the stationarity residuals (`delta` and `d` together).
    pub f_norm: f64,
    /// Sup norm of the complementary slackness products.
    pub k_norm: f64,
    /// Alignment gap per own type.
    pub lambda: Vec<f64>,
    /// Cell objective value.
    pub z_lfpa: f64,
    pub pass: bool,
}

/// Evaluates the cell's first-order system at recovered multipliers: the
/// stationarity residuals and the slackness products `e tau(hat)`,
/// `b(theta) tau(theta)`, `f(theta) lambda(theta)`.
pub fn check_r(point: &LocalPoint, hat: Option<usize>) -> RSystemRecord {
    let mult = recover_multipliers(point, hat);
    let (delta, d) = lagrangian_residuals(point, &mult);
    let f_norm = delta
        .iter()
        .chain(d.iter())
        .fold(0.0f64, |m, &r| m.max(r.abs()));

    let n = point.n_own_types();
    let (natural, hat_idx) = decompose_types(n, Some(mult.theta_hat));
    let lambda: Vec<f64> = (0..n).map(|t| lambda_i(point, t)).collect();
    let mut k_norm = (mult.e * point.tau_i[hat_idx]).abs();
    for (k, &theta) in natural.iter().enumerate() {
        k_norm = k_norm.max((mult.b[k] * point.tau_i[theta]).abs());
    }
    for (t, &lam) in lambda.iter().enumerate() {
        k_norm = k_norm.max((mult.f[t] * lam).abs());
    }
    let pass = f_norm <= tol::COMPLEMENTARITY && k_norm <= tol::COMPLEMENTARITY;
    RSystemRecord {
        agent: point.agent,
        state: point.state,
        history: point.history,
        multipliers: mult,
        f_norm,
        k_norm,
        lambda,
        z_lfpa: z_lfpa(point),
        pass,
    }
}

// ---------------------------------------------------------------------------
// Action-stage gap
// ---------------------------------------------------------------------------

/// Action-stage gap of `(i, h, theta_i, a_i)` at candidate values: the
/// type's expected value slice minus the opponent-expected action value,
/// where the action value closes with the candidate `J_i` instead of the
/// profile's own aggregate.
pub fn gamma_i(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    j_i: &[f64],
    v_i: &[f64],
    i: usize,
    h: usize,
    theta_i: usize,
    a_i: usize,
) -> Result<f64, SgiaError> {
    let ev = mv_i(beliefs, &profile.beta, v_i, i, h, theta_i)?;
    let q = q_from_continuation(beliefs, i, h, profile.beta[i][h], theta_i, j_i);
    let g_rank = profile_g_rank(beliefs, profile, h);
    let own = opponent_expected_row(beliefs, profile, i, h, g_rank, theta_i, &q);
    Ok(ev - own[a_i])
}

/// One action cell's complementarity data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaResidual {
    pub agent: usize,
    pub history: usize,
    pub type_index: usize,
    pub action: usize,
    pub gamma: f64,
    pub pi_gamma: f64,
}

/// Outcome of the action-stage complementarity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RDaggerReport {
    /// Per positive-probability `(i, theta_i, a_i, h)` cell, canonical order.
    pub residuals: Vec<GammaResidual>,
    /// Simplex violations of `pi`, negative gaps, and nonzero products.
    pub report: ConstraintReport,
}

impl RDaggerReport {
    pub fn pass(&self) -> bool {
        self.report.is_empty()
    }
}

/// Checks the action-stage conditions of a candidate: `pi` lies on the
/// simplex, every gap is nonnegative, and the played mass sits on zero-gap
/// actions. Zero-probability types are skipped; they have no posterior and
/// carry no decision weight.
pub fn check_r_dagger(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
    j: &[Vec<f64>],
    v: &[Vec<f64>],
) -> RDaggerReport {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let mut report = ConstraintReport::default();
    let mut residuals = Vec::new();
    for i in 0..game.n_agents {
        for h in 0..game.histories() {
            for theta in 0..fam.n_types[i] {
                let row = profile.pi_row(game, fam, i, h, theta);
                let sum: f64 = row.iter().sum();
                report.record(
                    "FE2",
                    &[("agent", i), ("history", h), ("type", theta)],
                    (sum - 1.0).abs(),
                    tol::SIMPLEX,
                );
                for (a, &p) in row.iter().enumerate() {
                    report.record(
                        "FE1",
                        &[("agent", i), ("history", h), ("type", theta), ("action", a)],
                        (-p).max(0.0),
                        tol::SIMPLEX,
                    );
                }
                if !beliefs.defined(i, h, profile.beta[i][h], theta) {
                    continue;
                }
                for a in 0..game.n_actions[i] {
                    let gamma = gamma_i(beliefs, profile, &j[i], &v[i], i, h, theta, a)
                        .expect("positive-probability cell");
                    let pi_gamma = profile.pi(game, fam, i, h, theta, a) * gamma;
                    let coords = [("agent", i), ("history", h), ("type", theta), ("action", a)];
                    report.record("RDAGGER_COMP", &coords, pi_gamma.abs(), tol::COMPLEMENTARITY);
                    report.record("RDAGGER_GAMMA", &coords, (-gamma).max(0.0), tol::COMPLEMENTARITY);
                    residuals.push(GammaResidual {
                        agent: i,
                        history: h,
                        type_index: theta,
                        action: a,
                        gamma,
                        pi_gamma,
                    });
                }
            }
        }
    }
    RDaggerReport { residuals, report }
}

// ---------------------------------------------------------------------------
// Rank test
// ---------------------------------------------------------------------------

/// Numerical rank of one cell's stacked gap gradients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankReport {
    pub agent: usize,
    pub state: usize,
    pub history: usize,
    pub rank: usize,
    pub n_types: usize,
    pub pass: bool,
}

/// Row-reduces the stacked gradients of the cell's alignment gaps; the
/// closed-form multiplier recovery is the unique solution exactly when the
/// rows are independent.
pub fn check_gradient_independence(point: &LocalPoint) -> RankReport {
    let n = point.n_own_types();
    let xlen = point.x.len();
    let mut rows = Vec::with_capacity(n * xlen);
    for t in 0..n {
        rows.extend(lambda_gradient(point, t));
    }
    let rank = rank_row_reduce(rows, n, xlen, tol::RANK_PIVOT);
    RankReport {
        agent: point.agent,
        state: point.state,
        history: point.history,
        rank,
        n_types: n,
        pass: rank == n,
    }
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

/// Knobs of the admissibility check.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct AdmissibilityOptions {
    /// Designated type override, applied to every agent; `None` picks the
    /// last type. Must be a valid type index for every agent.
    pub theta_hat: Option<usize>,
}

/// Self-contained audit record of a local admissibility check.
///
/// All residuals are evaluated on a rescaled copy of the instance with
/// `max |R + C| = 1` so the fixed tolerances mean the same thing across
/// instances; `scale` is the factor that maps the recorded values back to
/// the original units. Information-cost schemes are not rescaled (their
/// cost term is probability-scaled, not payoff-scaled) and record 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibilityCertificate {
    pub scale: f64,
    /// Per (agent, state, history) cell, canonical order.
    pub records: Vec<RSystemRecord>,
    /// Action-stage gaps at every positive-probability cell.
    pub gamma_residuals: Vec<GammaResidual>,
    /// Rank test per cell; informational, not part of the verdict.
    pub independence: Vec<RankReport>,
    /// Feasibility and complementarity violations: simplex constraints on
    /// `pi`, negative alignment or action gaps, nonzero products.
    pub violations: ConstraintReport,
    pub max_f_norm: f64,
    pub max_k_norm: f64,
    pub max_pi_gamma: f64,
    pub admissible: bool,
}

/// Runs the full local check of a candidate `(tau, pi, J, V)`: the cell
/// system [`check_r`] and rank test at every (agent, state, history), the
/// action-stage check [`check_r_dagger`] once, and the feasibility of the
/// gaps. Admissible iff every stationarity and slackness norm, every
/// `pi * gamma` product, and every feasibility constraint is within
/// tolerance.
pub fn check_local_admissibility(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    profile: &StrategyProfile,
    j: &[Vec<f64>],
    v: &[Vec<f64>],
    opts: AdmissibilityOptions,
) -> Result<AdmissibilityCertificate, SgiaError> {
    let nh = game.histories();
    if j.len() != game.n_agents || v.len() != game.n_agents {
        return Err(SgiaError::contract("candidate values must cover every agent"));
    }
    if let Some(hat) = opts.theta_hat {
        if fam.n_types.iter().any(|&n| hat >= n) {
            return Err(SgiaError::contract(
                "designated type index exceeds a type space",
            ));
        }
    }
    let scale = {
        let probe = Beliefs::new(game, fam, scheme);
        let ntr = probe.type_space.len();
        for i in 0..game.n_agents {
            if j[i].len() != nh || v[i].len() != nh * ntr {
                return Err(SgiaError::contract("candidate value shape mismatch"));
            }
        }
        match scheme.kind {
            CostKind::Mi => 1.0,
            _ => {
                let bound = probe.reward_cost_bound();
                if bound > 0.0 {
                    bound
                } else {
                    1.0
                }
            }
        }
    };
    let inv = 1.0 / scale;
    let scaled_game = BaseGame {
        rewards: game.rewards.iter().map(|r| r * inv).collect(),
        ..game.clone()
    };
    let scaled_scheme = CostScheme {
        kind: scheme.kind,
        tables: scheme
            .tables
            .iter()
            .map(|t| t.iter().map(|c| c * inv).collect())
            .collect(),
    };
    let beliefs = Beliefs::new(&scaled_game, fam, &scaled_scheme);
    let js: Vec<Vec<f64>> = j
        .iter()
        .map(|ji| ji.iter().map(|x| x * inv).collect())
        .collect();
    let vs: Vec<Vec<f64>> = v
        .iter()
        .map(|vi| vi.iter().map(|x| x * inv).collect())
        .collect();

    let cells: Vec<(usize, usize, usize)> = (0..game.n_agents)
        .flat_map(|i| {
            (0..game.n_states).flat_map(move |s| (0..nh).map(move |h| (i, s, h)))
        })
        .collect();
    let per_cell: Vec<(RSystemRecord, RankReport)> = cells
        .par_iter()
        .map(|&(i, s, h)| {
            let point = assemble_local_point(&beliefs, profile, &js[i], &vs[i], i, s, h);
            (check_r(&point, opts.theta_hat), check_gradient_independence(&point))
        })
        .collect();
    let (records, independence): (Vec<_>, Vec<_>) = per_cell.into_iter().unzip();

    let dagger = check_r_dagger(&beliefs, profile, &js, &vs);
    let RDaggerReport {
        residuals: gamma_residuals,
        report: mut violations,
    } = dagger;
    for rec in &records {
        for (t, &lam) in rec.lambda.iter().enumerate() {
            violations.record(
                "KBAR_LAMBDA",
                &[
                    ("agent", rec.agent),
                    ("state", rec.state),
                    ("history", rec.history),
                    ("type", t),
                ],
                (-lam).max(0.0),
                tol::COMPLEMENTARITY,
            );
        }
    }

    let max_f_norm = records.iter().fold(0.0f64, |m, r| m.max(r.f_norm));
    let max_k_norm = records.iter().fold(0.0f64, |m, r| m.max(r.k_norm));
    let max_pi_gamma = gamma_residuals
        .iter()
        .fold(0.0f64, |m, r| m.max(r.pi_gamma.abs()));
    let admissible = records.iter().all(|r| r.pass) && violations.is_empty();
    Ok(AdmissibilityCertificate {
        scale,
        records,
        gamma_residuals,
        independence,
        violations,
        max_f_norm,
        max_k_norm,
        max_pi_gamma,
        admissible,
    })
}
