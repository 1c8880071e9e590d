//! Perfect-information cognition.
//!
//! The centerpiece is a value-preserving rewrite: any verified profile can
//! be replayed as if every agent observed the state directly, by
//! marginalizing its types out of the action rules and re-pricing cognition
//! as a state-action cost. [`transform_to_pi_ppme`] builds that rewrite and
//! reports the per-history value gap; [`w_value`] exposes the ex-post
//! state-action values whose expectations reconstruct the history values on
//! both sides of the rewrite. The reverse direction runs through the
//! normalized excess-value update [`u_map`]: starting from the
//! perfect-information values, a damped fixed-point iteration
//! ([`find_fp_tau`]) searches for a signaling rule whose assembled profile
//! verifies directly, and reports the agreement honestly instead of
//! assuming it.

use serde::{Deserialize, Serialize};

use crate::beliefs::Beliefs;
use crate::cost::{CostKind, CostScheme};
use crate::dims::JointSpace;
use crate::error::SgiaError;
use crate::game::BaseGame;
use crate::profile::StrategyProfile;
use crate::signaling::{validate_signaling_family, SignalingFamily};
use crate::value::evaluate_policy;
use crate::verifier::{verify_ppme_direct, VerificationResult, VerifyOptions};

/// The signaling side of a perfect-information game: every menu item
/// reveals the state exactly, so the type space is the state space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerfectInfoScheme {
    pub family: SignalingFamily,
    /// The menu index of the revealing rule, per agent.
    pub g_star: Vec<usize>,
}

/// Identity-rule family over the game's state space: one menu item per
/// agent whose rows are unit vectors on the diagonal.
pub fn make_perfect_info_scheme(game: &BaseGame) -> PerfectInfoScheme {
    let ns = game.n_states;
    let mut block = vec![0.0; ns * ns];
    for s in 0..ns {
        block[s * ns + s] = 1.0;
    }
    let family = SignalingFamily::broadcast(
        vec![ns; game.n_agents],
        vec![1; game.n_agents],
        vec![block; game.n_agents],
        game.histories(),
    );
    debug_assert!(validate_signaling_family(game, &family).is_valid());
    PerfectInfoScheme {
        family,
        g_star: vec![0; game.n_agents],
    }
}

/// Ex-post state-action values: what an agent collects from `(s, a)` onward
/// when play continues under the profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WValues {
    /// Per agent, flat over `(s, joint action)`.
    pub w: Vec<Vec<f64>>,
}

impl WValues {
    pub fn value(&self, game: &BaseGame, i: usize, s: usize, a: usize) -> f64 {
        self.w[i][s * game.joint_actions() + a]
    }
}

/// `W_i(s, a) = R_i(s, a) + C_i(s, a_i) + delta J_i((s, a))`. Defined for
/// state-action costs only; other kinds have no `(s, a_i)` price to attach
/// ex post.
pub fn w_value(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    profile: &StrategyProfile,
) -> Result<WValues, SgiaError> {
    if scheme.kind != CostKind::Sab {
        return Err(SgiaError::contract(
            "ex-post state-action values require a state-action cost",
        ));
    }
    let triple = evaluate_policy(game, fam, scheme, profile)?;
    let na = game.joint_actions();
    let space = JointSpace::new(&game.n_actions);
    let mut w = Vec::with_capacity(game.n_agents);
    for i in 0..game.n_agents {
        let mut wi = vec![0.0; game.n_states * na];
        for s in 0..game.n_states {
            for a in 0..na {
                let own = space.digit(a, i);
                wi[s * na + a] = game.reward(i, s, a)
                    + scheme.tables[i][s * game.n_actions[i] + own]
                    + game.discount * triple.j[i][game.history_index(s, a)];
            }
        }
        w.push(wi);
    }
    Ok(WValues { w })
}

/// One-period distribution over `(state, joint action)` at history `h`
/// under the profile, flat over `s * |A| + a`. Doubles as the history
/// chain's transition row, since `(s, a)` is the next history.
pub fn stage_measure(
    game: &BaseGame,
    fam: &SignalingFamily,
    profile: &StrategyProfile,
    h: usize,
) -> Vec<f64> {
    let type_space = JointSpace::new(&fam.n_types);
    let action_space = JointSpace::new(&game.n_actions);
    let na = action_space.len();
    let g: Vec<usize> = profile.beta.iter().map(|b| b[h]).collect();
    let mut out = vec![0.0; game.n_states * na];
    for s in 0..game.n_states {
        let ps = game.state_prob(h, s);
        if ps == 0.0 {
            continue;
        }
        for t_rank in type_space.iter() {
            let t_digits = type_space.unrank(t_rank);
            let mut pt = ps;
            for j in 0..game.n_agents {
                pt *= fam.tau(game, j, h, s, g[j], t_digits[j]);
            }
            if pt == 0.0 {
                continue;
            }
            for a_rank in action_space.iter() {
                let a_digits = action_space.unrank(a_rank);
                let pa = profile.joint_pi(game, fam, h, &t_digits, &a_digits);
                if pa > 0.0 {
                    out[s * na + a_rank] += pt * pa;
                }
            }
        }
    }
    out
}

/// `E[W(s~, a~) | h]` per agent, taken under the given family and profile.
/// Matching it against the history values is the reconstruction check the
/// transformation rests on.
pub fn expected_w(
    game: &BaseGame,
    fam: &SignalingFamily,
    profile: &StrategyProfile,
    w: &WValues,
) -> Vec<Vec<f64>> {
    let nh = game.histories();
    let mut out = vec![vec![0.0; nh]; game.n_agents];
    for h in 0..nh {
        let measure = stage_measure(game, fam, profile, h);
        for i in 0..game.n_agents {
            out[i][h] = measure
                .iter()
                .zip(&w.w[i])
                .map(|(p, v)| p * v)
                .sum();
        }
    }
    out
}

/// Long-run history weights of the profile's chain: damped power iteration
/// from the uniform start, which settles periodic chains as well.
fn stationary_history_weights(
    game: &BaseGame,
    fam: &SignalingFamily,
    profile: &StrategyProfile,
) -> Vec<f64> {
    let nh = game.histories();
    let na = game.joint_actions();
    let rows: Vec<Vec<f64>> = (0..nh).map(|h| stage_measure(game, fam, profile, h)).collect();
    let mut rho = vec![1.0 / nh as f64; nh];
    for _ in 0..10_000 {
        let mut next = vec![0.0; nh];
        for h in 0..nh {
            if rho[h] == 0.0 {
                continue;
            }
            for (idx, &p) in rows[h].iter().enumerate() {
                if p > 0.0 {
                    next[game.history_index(idx / na, idx % na)] += rho[h] * p;
                }
            }
        }
        let mut delta = 0.0f64;
        for (r, n) in rho.iter_mut().zip(&next) {
            let blended = 0.5 * *r + 0.5 * n;
            delta = delta.max((blended - *r).abs());
            *r = blended;
        }
        if delta <= 1e-13 {
            break;
        }
    }
    rho
}

/// A `(state, own action)` cell that the generating profile never reaches,
/// so its transformed cost is a free completion (set to zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroProbabilityCell {
    pub agent: usize,
    pub state: usize,
    pub action: usize,
}

/// Realized per-period cost at one coordinate, for the kinds where it does
/// not depend on the action. State-action costs are read inside the action
/// loop instead.
fn realized_cost(beliefs: &Beliefs<'_>, i: usize, h: usize, g: usize, s: usize, theta: usize) -> f64 {
    let scheme = beliefs.scheme;
    match scheme.kind {
        CostKind::Cb => scheme.tables[i][g],
        CostKind::Tb => scheme.tables[i][theta],
        CostKind::Stb => scheme.tables[i][s * beliefs.fam.n_types[i] + theta],
        CostKind::Mi => beliefs.signal_information(i, h, g),
        CostKind::Sab => 0.0,
    }
}

/// Conditional expected cost per `(s, a_i)` under the stationary measure of
/// the generating profile. Cells that measure never touches get cost zero
/// and a flag; for state-action inputs the reached cells keep their table
/// value exactly rather than a rounding-prone average of a constant.
fn conditional_cost_tables(
    beliefs: &Beliefs<'_>,
    profile: &StrategyProfile,
) -> (Vec<Vec<f64>>, Vec<ZeroProbabilityCell>) {
    let game = beliefs.game;
    let fam = beliefs.fam;
    let scheme = beliefs.scheme;
    let rho = stationary_history_weights(game, fam, profile);
    let mut tables = Vec::with_capacity(game.n_agents);
    let mut cells = Vec::new();
    for i in 0..game.n_agents {
        let nai = game.n_actions[i];
        let mut num = vec![0.0; game.n_states * nai];
        let mut den = vec![0.0; game.n_states * nai];
        for (h, &wh) in rho.iter().enumerate() {
            if wh == 0.0 {
                continue;
            }
            let g = profile.beta[i][h];
            for s in 0..game.n_states {
                let ws = wh * game.state_prob(h, s);
                if ws == 0.0 {
                    continue;
                }
                for theta in 0..fam.n_types[i] {
                    let wt = ws * fam.tau(game, i, h, s, g, theta);
                    if wt == 0.0 {
                        continue;
                    }
                    let c = realized_cost(beliefs, i, h, g, s, theta);
                    for a in 0..nai {
                        let w = wt * profile.pi(game, fam, i, h, theta, a);
                        let ca = if scheme.kind == CostKind::Sab {
                            scheme.tables[i][s * nai + a]
                        } else {
                            c
                        };
                        num[s * nai + a] += w * ca;
                        den[s * nai + a] += w;
                    }
                }
            }
        }
        let mut table = vec![0.0; game.n_states * nai];
        for s in 0..game.n_states {
            for a in 0..nai {
                let k = s * nai + a;
                if den[k] > 0.0 {
                    table[k] = if scheme.kind == CostKind::Sab {
                        scheme.tables[i][k]
                    } else {
                        num[k] / den[k]
                    };
                } else {
                    cells.push(ZeroProbabilityCell {
                        agent: i,
                        state: s,
                        action: a,
                    });
                }
            }
        }
        tables.push(table);
    }
    (tables, cells)
}

/// Per-history comparison of the original and transformed values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValueEquivalenceReport {
    pub original: Vec<Vec<f64>>,
    pub transformed: Vec<Vec<f64>>,
    pub max_gap: f64,
    pub within_tolerance: bool,
}

/// The perfect-information rewrite of a profile: revealing rules, the
/// type-marginalized action rules, the state-action cost, and the value
/// comparison that justifies calling it equivalent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PiPpme {
    pub scheme: PerfectInfoScheme,
    pub cost: CostScheme,
    /// Action rules indexed by the observed state: flat `(h, s, a_i)` rows.
    pub profile: StrategyProfile,
    pub zero_probability_cells: Vec<ZeroProbabilityCell>,
    /// Whether the input passed direct verification; the rewrite proceeds
    /// either way, this flag is the warning.
    pub input_is_ppme: bool,
    pub equivalence: ValueEquivalenceReport,
}

/// Rewrite a profile into its perfect-information form.
///
/// The action rule becomes the state-conditional action distribution the
/// profile already induces, `pi*_i(a|s,h) = sum_theta pi_i(a|theta,h)
/// tau_i(theta|s,h)`, and the cognition price becomes the conditional
/// expected cost per `(s, a_i)`: the original table value on reached cells
/// of a state-action input, a stationary-weighted average for the other
/// kinds, and zero with a flag on cells the generating measure never
/// touches. Zeroed cells cannot move the equivalence report (they carry no
/// measure), and they make the rewrite idempotent: transforming an output
/// again reproduces it exactly.
///
/// Value preservation and equilibrium preservation are different claims.
/// The first is measure-theoretic and holds for any feasible input. The
/// second can fail: the revealing structure lets every agent condition its
/// action on the state, and an agent whose original menu never offered that
/// information may find the marginalized rule exploitable. The caller
/// learns which situation it is in from `input_is_ppme` here and from
/// [`verify_pi_ppme`] on the output.
pub fn transform_to_pi_ppme(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    profile: &StrategyProfile,
) -> Result<PiPpme, SgiaError> {
    let input = verify_ppme_direct(game, fam, scheme, profile, VerifyOptions::default())?;
    let nh = game.histories();
    let ns = game.n_states;
    let pi_scheme = make_perfect_info_scheme(game);

    let mut rules = Vec::with_capacity(game.n_agents);
    for i in 0..game.n_agents {
        let nai = game.n_actions[i];
        let mut flat = vec![0.0; nh * ns * nai];
        for h in 0..nh {
            let g = profile.beta[i][h];
            for s in 0..ns {
                for theta in 0..fam.n_types[i] {
                    let t = fam.tau(game, i, h, s, g, theta);
                    if t == 0.0 {
                        continue;
                    }
                    for a in 0..nai {
                        flat[(h * ns + s) * nai + a] += t * profile.pi(game, fam, i, h, theta, a);
                    }
                }
            }
        }
        rules.push(flat);
    }
    let pi_profile = StrategyProfile {
        beta: vec![vec![0; nh]; game.n_agents],
        pi: rules,
    };

    let beliefs = Beliefs::new(game, fam, scheme);
    let (tables, zero_probability_cells) = conditional_cost_tables(&beliefs, profile);
    let cost = CostScheme {
        kind: CostKind::Sab,
        tables,
    };

    let original = evaluate_policy(game, fam, scheme, profile)?;
    let transformed = evaluate_policy(game, &pi_scheme.family, &cost, &pi_profile)?;
    let mut max_gap = 0.0f64;
    for i in 0..game.n_agents {
        for h in 0..nh {
            max_gap = max_gap.max((original.j[i][h] - transformed.j[i][h]).abs());
        }
    }
    let equivalence = ValueEquivalenceReport {
        original: original.j,
        transformed: transformed.j,
        max_gap,
        within_tolerance: max_gap <= crate::tol::VALUE_EQUIVALENCE,
    };

    Ok(PiPpme {
        scheme: pi_scheme,
        cost,
        profile: pi_profile,
        zero_probability_cells,
        input_is_ppme: input.is_ppme,
        equivalence,
    })
}

/// Equilibrium check of a perfect-information profile: the revealing family
/// makes the interim checks range over `(h, s)` cells, and the singleton
/// menu makes the cognition stage degenerate, so the direct verifier covers
/// the definition exactly.
pub fn verify_pi_ppme(
    game: &BaseGame,
    scheme: &PerfectInfoScheme,
    profile: &StrategyProfile,
    cost: &CostScheme,
) -> Result<VerificationResult, SgiaError> {
    if cost.kind != CostKind::Sab {
        return Err(SgiaError::contract(
            "perfect-information verification expects a state-action cost",
        ));
    }
    if profile
        .beta
        .iter()
        .zip(&scheme.g_star)
        .any(|(b, &g)| b.iter().any(|&x| x != g))
    {
        return Err(SgiaError::contract(
            "the profile must select the revealing rule at every history",
        ));
    }
    verify_ppme_direct(game, &scheme.family, cost, profile, VerifyOptions::default())
}

/// How the excess-value update reads the rule it iterates.
///
/// The update's type weight suppresses the state argument. `Marginal`
/// treats it as the state-averaged type mass and writes the updated mass
/// back uniformly across states; `PerState` applies the update to each
/// state's row separately, which leaves state-informative rules intact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauReading {
    #[default]
    Marginal,
    PerState,
}

/// Interim value of committing to type `theta_i` at `(h)`: one period of
/// the labeled action rules under the candidate signaling family, closed
/// with the perfect-information continuation values. Unnormalized; it
/// carries the type's probability mass, so summing over types recovers the
/// one-period history value.
pub fn v_bold(
    game: &BaseGame,
    fam: &SignalingFamily,
    cost: &CostScheme,
    profile: &StrategyProfile,
    j_star_i: &[f64],
    i: usize,
    h: usize,
    theta_i: usize,
) -> f64 {
    let action_space = JointSpace::new(&game.n_actions);
    let opp_types = JointSpace::new_skipping(&fam.n_types, i);
    let g: Vec<usize> = profile.beta.iter().map(|b| b[h]).collect();
    let nai = game.n_actions[i];
    let mut total = 0.0;
    for s in 0..game.n_states {
        let ps = game.state_prob(h, s) * fam.tau(game, i, h, s, g[i], theta_i);
        if ps == 0.0 {
            continue;
        }
        for opp_rank in opp_types.iter() {
            let t_digits = opp_types.merge_with_own(opp_rank, i, theta_i);
            let mut pt = ps;
            for j in 0..game.n_agents {
                if j != i {
                    pt *= fam.tau(game, j, h, s, g[j], t_digits[j]);
                }
            }
            if pt == 0.0 {
                continue;
            }
            for a_rank in action_space.iter() {
                let a_digits = action_space.unrank(a_rank);
                let pa = profile.joint_pi(game, fam, h, &t_digits, &a_digits);
                if pa == 0.0 {
                    continue;
                }
                total += pt
                    * pa
                    * (game.reward(i, s, a_rank)
                        + cost.tables[i][s * nai + a_digits[i]]
                        + game.discount * j_star_i[game.history_index(s, a_rank)]);
            }
        }
    }
    total
}

/// The normalized excess update on one type row: each mass gains its
/// positive excess, and the row renormalizes by one plus the total excess.
/// Keeps the simplex exactly when the input row sums to one.
pub fn u_map_row(row: &[f64], excesses: &[f64]) -> Result<Vec<f64>, SgiaError> {
    if row.len() != excesses.len() {
        return Err(SgiaError::contract("row and excess lengths differ"));
    }
    if excesses.iter().any(|e| *e < 0.0) {
        return Err(SgiaError::contract("excesses must be nonnegative"));
    }
    let denom = 1.0 + excesses.iter().sum::<f64>();
    Ok(row
        .iter()
        .zip(excesses)
        .map(|(p, e)| (p + e) / denom)
        .collect())
}

/// One application of the excess-value update to a candidate family.
///
/// `fam` must carry a single menu item per agent (the update iterates one
/// rule, not a menu), `cost` must be the state-action table of the
/// perfect-information side, and `j_star` its history values.
pub fn u_map(
    game: &BaseGame,
    fam: &SignalingFamily,
    cost: &CostScheme,
    profile: &StrategyProfile,
    j_star: &[Vec<f64>],
    reading: TauReading,
) -> Result<SignalingFamily, SgiaError> {
    if fam.n_cogs.iter().any(|&g| g != 1) {
        return Err(SgiaError::contract(
            "the excess-value update iterates a single rule per agent",
        ));
    }
    if cost.kind != CostKind::Sab {
        return Err(SgiaError::contract(
            "the excess-value update prices periods with a state-action cost",
        ));
    }
    let nh = game.histories();
    let ns = game.n_states;
    if j_star.len() != game.n_agents || j_star.iter().any(|j| j.len() != nh) {
        return Err(SgiaError::contract("value input has the wrong shape"));
    }
    for i in 0..game.n_agents {
        for h in 0..nh {
            for s in 0..ns {
                let row = fam.row(game, i, h, s, 0);
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > crate::tol::SIMPLEX
                    || row.iter().any(|p| *p < -crate::tol::SIMPLEX)
                {
                    return Err(SgiaError::contract("input rule rows must lie on the simplex"));
                }
            }
        }
    }

    let mut rule = Vec::with_capacity(game.n_agents);
    for i in 0..game.n_agents {
        let nt = fam.n_types[i];
        let mut out = vec![0.0; nh * ns * nt];
        for h in 0..nh {
            let excess: Vec<f64> = (0..nt)
                .map(|t| (v_bold(game, fam, cost, profile, &j_star[i], i, h, t) - j_star[i][h]).max(0.0))
                .collect();
            match reading {
                TauReading::Marginal => {
                    let marginal: Vec<f64> = (0..nt)
                        .map(|t| {
                            (0..ns)
                                .map(|s| game.state_prob(h, s) * fam.tau(game, i, h, s, 0, t))
                                .sum()
                        })
                        .collect();
                    let updated = u_map_row(&marginal, &excess)?;
                    for s in 0..ns {
                        out[(h * ns + s) * nt..(h * ns + s + 1) * nt].copy_from_slice(&updated);
                    }
                }
                TauReading::PerState => {
                    for s in 0..ns {
                        let updated = u_map_row(fam.row(game, i, h, s, 0), &excess)?;
                        out[(h * ns + s) * nt..(h * ns + s + 1) * nt].copy_from_slice(&updated);
                    }
                }
            }
        }
        rule.push(out);
    }
    Ok(SignalingFamily {
        n_types: fam.n_types.clone(),
        n_cogs: fam.n_cogs.clone(),
        history_free: false,
        rule,
    })
}

/// Result of the damped fixed-point search, with the direct verification of
/// the assembled profile attached. `converged` speaks only to the residual;
/// `verification` says whether the recovered profile is actually an
/// equilibrium, and the two can disagree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointOutcome {
    pub family: SignalingFamily,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub verification: VerificationResult,
}

/// Damped iteration of the excess-value update from `init` (step one half),
/// stopping when the undamped residual drops below the fixed-point
/// tolerance. The best-residual iterate is kept on non-convergence. The
/// final family is assembled with `pi_star`'s action rules and the
/// state-action cost, and checked by the direct verifier.
pub fn find_fp_tau(
    game: &BaseGame,
    pi_scheme: &PerfectInfoScheme,
    pi_star: &StrategyProfile,
    cost: &CostScheme,
    init: &SignalingFamily,
    reading: TauReading,
    max_iters: usize,
) -> Result<FixedPointOutcome, SgiaError> {
    if init.n_types != vec![game.n_states; game.n_agents] {
        return Err(SgiaError::contract(
            "recovery iterates rules over the state space",
        ));
    }
    let j_star = evaluate_policy(game, &pi_scheme.family, cost, pi_star)?.j;
    // The assembled profile pairs the fixed action rules with the trivial
    // menu choice; only the family changes across iterations.
    let assembled = StrategyProfile {
        beta: vec![vec![0; game.histories()]; game.n_agents],
        pi: pi_star.pi.clone(),
    };

    let mut current = init.clone();
    let mut iterations = 0usize;
    let mut best = current.clone();
    let mut best_residual = f64::INFINITY;
    let mut residual;
    loop {
        let updated = u_map(game, &current, cost, &assembled, &j_star, reading)?;
        residual = current
            .rule
            .iter()
            .zip(&updated.rule)
            .flat_map(|(a, b)| a.iter().zip(b))
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        if residual < best_residual {
            best_residual = residual;
            best = current.clone();
        }
        if residual <= crate::tol::FIXED_POINT || iterations >= max_iters {
            break;
        }
        for (cur, upd) in current.rule.iter_mut().zip(&updated.rule) {
            for (c, u) in cur.iter_mut().zip(upd) {
                *c = 0.5 * *c + 0.5 * u;
            }
        }
        current.history_free = false;
        iterations += 1;
    }

    let converged = residual <= crate::tol::FIXED_POINT;
    let family = if converged { current } else { best };
    let verification =
        verify_ppme_direct(game, &family, cost, &assembled, VerifyOptions::default())?;
    Ok(FixedPointOutcome {
        family,
        residual: if converged { residual } else { best_residual },
        iterations,
        converged,
        verification,
    })
}
