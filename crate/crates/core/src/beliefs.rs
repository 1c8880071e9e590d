//! Common prior and Bayesian posteriors.
//!
//! At a history `h` with cognition profile `g`, nature draws the state from
//! `T(. | h)` and each agent's type independently from their chosen rule, so
//! the common prior is
//!
//! ```text
//! p(s, theta | h, g) = T(s | h) * prod_i tau_i(theta_i | s, g_i, h)
//! ```
//!
//! Posteriors are Bayes quotients of this joint. A type with zero marginal
//! probability has no posterior; engines either skip such cells (they carry
//! zero weight in every aggregate) or surface
//! [`SgiaError::ZeroProbabilityType`] when a caller asks for one directly.

use serde::{Deserialize, Serialize};

use crate::cost::{mutual_information, CostKind, CostScheme};
use crate::dims::JointSpace;
use crate::error::SgiaError;
use crate::game::BaseGame;
use crate::signaling::SignalingFamily;

/// Agent `i`'s belief after observing their own type.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Posterior {
    pub agent: usize,
    pub history: usize,
    pub cognition: usize,
    pub type_index: usize,
    /// Marginal probability of the conditioning type at `(h, g)`.
    pub type_prob: f64,
    /// `mu_i(s | theta_i, h, g)`.
    pub state_marginal: Vec<f64>,
    /// `mu_i(theta_minus | theta_i, h, g)`, flat over the opponent profile.
    pub opp_marginal: Vec<f64>,
    /// `mu_i(s, theta_minus | theta_i, h, g)`, state-major.
    pub joint: Vec<f64>,
}

/// Common prior over `(s, theta)` at `(h, g)`, state-major, with the joint
/// type profile as a flat rank.
pub fn joint_prior(game: &BaseGame, fam: &SignalingFamily, h: usize, g: &[usize]) -> Vec<f64> {
    let type_space = JointSpace::new(&fam.n_types);
    let mut joint = vec![0.0; game.n_states * type_space.len()];
    for s in 0..game.n_states
    {
        let ts = game.state_prob(h, s);
        if ts == 0.0 {
            continue;
        }
        for t_rank in type_space.iter() {
            let mut p = ts;
            for i in 0..game.n_agents {
                p *= fam.tau(game, i, h, s, g[i], type_space.digit(t_rank, i));
            }
            joint[s * type_space.len() + t_rank] = p;
        }
    }
    joint
}

/// Bayesian posterior of agent `i` with type `theta_i` at `(h, g)`.
pub fn posterior(
    game: &BaseGame,
    fam: &SignalingFamily,
    i: usize,
    theta_i: usize,
    h: usize,
    g: &[usize],
) -> Result<Posterior, SgiaError> {
    let mut type_prob = 0.0;
    for s in 0..game.n_states {
        type_prob += game.state_prob(h, s) * fam.tau(game, i, h, s, g[i], theta_i);
    }
    if type_prob <= 0.0 {
        return Err(SgiaError::ZeroProbabilityType {
            agent: i,
            type_index: theta_i,
            history: h,
            cognition: g[i],
        });
    }
    let opp_space = JointSpace::new_skipping(&fam.n_types, i);
    let mut state_marginal = vec![0.0; game.n_states];
    let mut joint = vec![0.0; game.n_states * opp_space.len()];
    for s in 0..game.n_states {
        let own = game.state_prob(h, s) * fam.tau(game, i, h, s, g[i], theta_i) / type_prob;
        state_marginal[s] = own;
        if own == 0.0 {
            continue;
        }
        for o_rank in opp_space.iter() {
            let mut p = own;
            for (d, _) in opp_space.radices().iter().enumerate() {
                let j = opp_space.axis(d);
                p *= fam.tau(game, j, h, s, g[j], opp_space.digit(o_rank, d));
            }
            joint[s * opp_space.len() + o_rank] = p;
        }
    }
    let mut opp_marginal = vec![0.0; opp_space.len()];
    for s in 0..game.n_states {
        for (o_rank, slot) in opp_marginal.iter_mut().enumerate() {
            *slot += joint[s * opp_space.len() + o_rank];
        }
    }
    Ok(Posterior {
        agent: i,
        history: h,
        cognition: g[i],
        type_index: theta_i,
        type_prob,
        state_marginal,
        opp_marginal,
        joint,
    })
}

/// Expected immediate reward-plus-cost of agent `i` with the given posterior
/// when joint action `a_digits` is played.
///
/// The stage reward and any state-indexed cost are averaged under the
/// posterior's state marginal; cognition-, type- and information-based costs
/// are constants given the posterior's context and shift the value outside
/// the state expectation.
pub fn expected_immediate_reward(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
    post: &Posterior,
    a_digits: &[usize],
) -> Result<f64, SgiaError> {
    let i = post.agent;
    let action_space = JointSpace::new(&game.n_actions);
    let a_rank = action_space.rank(a_digits);
    let a_own = a_digits[i];
    let mut value = 0.0;
    for s in 0..game.n_states {
        let w = post.state_marginal[s];
        if w == 0.0 {
            continue;
        }
        let mut per_state = game.reward(i, s, a_rank);
        match scheme.kind {
            CostKind::Stb => per_state += scheme.tables[i][s * fam.n_types[i] + post.type_index],
            CostKind::Sab => per_state += scheme.tables[i][s * game.n_actions[i] + a_own],
            _ => {}
        }
        value += w * per_state;
    }
    match scheme.kind {
        CostKind::Cb => value += scheme.tables[i][post.cognition],
        CostKind::Tb => value += scheme.tables[i][post.type_index],
        CostKind::Mi => {
            let own = own_state_type_joint(game, fam, i, post.history, post.cognition);
            value += mutual_information(&own, game.n_states);
        }
        _ => {}
    }
    Ok(value)
}

/// Joint `(s, theta_i)` distribution of one agent's signal at `(h, g_i)`,
/// state-major. This is the distribution whose mutual information prices the
/// MI cost scheme.
pub fn own_state_type_joint(
    game: &BaseGame,
    fam: &SignalingFamily,
    i: usize,
    h: usize,
    g_i: usize,
) -> Vec<f64> {
    let nt = fam.n_types[i];
    let mut joint = vec![0.0; game.n_states * nt];
    for s in 0..game.n_states {
        let ts = game.state_prob(h, s);
        for theta in 0..nt {
            joint[s * nt + theta] = ts * fam.tau(game, i, h, s, g_i, theta);
        }
    }
    joint
}

// ---------------------------------------------------------------------------
// Dense cache
// ---------------------------------------------------------------------------

/// Precomputed belief and immediate-value tables for one instance.
///
/// Engines index these in inner loops instead of recomputing Bayes quotients.
/// Everything is dense over `(agent, h, g, theta, ...)`; sizes are desk scale
/// by design (the cache is quadratic in the cognition menu only through the
/// joint-menu tables).
pub struct Beliefs<'a> {
    pub game: &'a BaseGame,
    pub fam: &'a SignalingFamily,
    pub scheme: &'a CostScheme,
    pub action_space: JointSpace,
    pub type_space: JointSpace,
    pub cog_space: JointSpace,
    /// Digits of every joint action rank.
    pub action_digits: Vec<Vec<usize>>,
    /// Digits of every joint type rank.
    pub type_digits: Vec<Vec<usize>>,
    /// Per-agent opponent type spaces.
    pub opp_type_spaces: Vec<JointSpace>,
    /// Per-agent opponent action spaces.
    pub opp_action_spaces: Vec<JointSpace>,

    /// `P_i(theta_i | h, g_i)`, per agent, flat over `(h, g_i, theta_i)`.
    type_prob: Vec<Vec<f64>>,
    /// `mu_i(s | theta_i, h, g_i)`, per agent, flat over `(h, g_i, theta_i, s)`;
    /// zero rows where the type has zero probability.
    state_post: Vec<Vec<f64>>,
    /// Mutual information of the own `(s, theta_i)` joint, flat `(h, g_i)`.
    mi: Vec<Vec<f64>>,
    /// Expected immediate reward-plus-cost, flat `(h, g_i, theta_i, a)`;
    /// zero where the type has zero probability.
    rbar: Vec<Vec<f64>>,
    /// Joint type profile probabilities, flat `(h, g_rank, theta_rank)`.
    joint_type_prob: Vec<f64>,
    /// `mu_i(theta_minus | theta_i, h, g)`, per agent, flat over
    /// `(h, g_rank, theta_i, opp_rank)`.
    opp_post: Vec<Vec<f64>>,
}

impl<'a> Beliefs<'a> {
    pub fn new(game: &'a BaseGame, fam: &'a SignalingFamily, scheme: &'a CostScheme) -> Self {
        let action_space = JointSpace::new(&game.n_actions);
        let type_space = JointSpace::new(&fam.n_types);
        let cog_space = JointSpace::new(&fam.n_cogs);
        let action_digits: Vec<Vec<usize>> =
            action_space.iter().map(|a| action_space.unrank(a)).collect();
        let type_digits: Vec<Vec<usize>> =
            type_space.iter().map(|t| type_space.unrank(t)).collect();
        let opp_type_spaces: Vec<JointSpace> = (0..game.n_agents)
            .map(|i| JointSpace::new_skipping(&fam.n_types, i))
            .collect();
        let opp_action_spaces: Vec<JointSpace> = (0..game.n_agents)
            .map(|i| JointSpace::new_skipping(&game.n_actions, i))
            .collect();
        let nh = game.histories();
        let ns = game.n_states;

        let mut type_prob = Vec::with_capacity(game.n_agents);
        let mut state_post = Vec::with_capacity(game.n_agents);
        let mut mi = Vec::with_capacity(game.n_agents);
        let mut rbar = Vec::with_capacity(game.n_agents);
        for i in 0..game.n_agents {
            let ng = fam.n_cogs[i];
            let nt = fam.n_types[i];
            let na = action_space.len();
            let mut tp = vec![0.0; nh * ng * nt];
            let mut sp = vec![0.0; nh * ng * nt * ns];
            let mut mii = vec![0.0; nh * ng];
            let mut rb = vec![0.0; nh * ng * nt * na];
            for h in 0..nh {
                for g in 0..ng {
                    let own = own_state_type_joint(game, fam, i, h, g);
                    mii[h * ng + g] = mutual_information(&own, ns);
                    for theta in 0..nt {
                        let cell = (h * ng + g) * nt + theta;
                        let p: f64 = (0..ns).map(|s| own[s * nt + theta]).sum();
                        tp[cell] = p;
                        if p <= 0.0 {
                            continue;
                        }
                        for s in 0..ns {
                            sp[cell * ns + s] = own[s * nt + theta] / p;
                        }
                        for (a, digits) in action_digits.iter().enumerate() {
                            let a_own = digits[i];
                            let mut v = 0.0;
                            for s in 0..ns {
                                let w = sp[cell * ns + s];
                                if w == 0.0 {
                                    continue;
                                }
                                let mut per_state = game.reward(i, s, a);
                                match scheme.kind {
                                    CostKind::Stb => {
                                        per_state += scheme.tables[i][s * nt + theta]
                                    }
                                    CostKind::Sab => {
                                        per_state +=
                                            scheme.tables[i][s * game.n_actions[i] + a_own]
                                    }
                                    _ => {}
                                }
                                v += w * per_state;
                            }
                            match scheme.kind {
                                CostKind::Cb => v += scheme.tables[i][g],
                                CostKind::Tb => v += scheme.tables[i][theta],
                                CostKind::Mi => v += mii[h * ng + g],
                                _ => {}
                            }
                            rb[cell * na + a] = v;
                        }
                    }
                }
            }
            type_prob.push(tp);
            state_post.push(sp);
            mi.push(mii);
            rbar.push(rb);
        }

        let ngr = cog_space.len();
        let ntr = type_space.len();
        let mut joint_type_prob = vec![0.0; nh * ngr * ntr];
        for h in 0..nh {
            for g_rank in cog_space.iter() {
                for (t_rank, t_digits) in type_digits.iter().enumerate() {
                    let mut p = 0.0;
                    for s in 0..ns {
                        let mut q = game.state_prob(h, s);
                        if q == 0.0 {
                            continue;
                        }
                        for (j, &th) in t_digits.iter().enumerate() {
                            q *= fam.tau(game, j, h, s, cog_space.digit(g_rank, j), th);
                        }
                        p += q;
                    }
                    joint_type_prob[(h * ngr + g_rank) * ntr + t_rank] = p;
                }
            }
        }

        let mut opp_post = Vec::with_capacity(game.n_agents);
        for i in 0..game.n_agents {
            let nt = fam.n_types[i];
            let nopp = opp_type_spaces[i].len();
            let mut op = vec![0.0; nh * ngr * nt * nopp];
            for h in 0..nh {
                for g_rank in cog_space.iter() {
                    let g_i = cog_space.digit(g_rank, i);
                    for theta in 0..nt {
                        let own_cell = (h * fam.n_cogs[i] + g_i) * nt + theta;
                        if type_prob[i][own_cell] <= 0.0 {
                            continue;
                        }
                        let out = (h * ngr + g_rank) * nt + theta;
                        for o_rank in opp_type_spaces[i].iter() {
                            let mut p = 0.0;
                            for s in 0..ns {
                                let w = state_post[i][own_cell * ns + s];
                                if w == 0.0 {
                                    continue;
                                }
                                let mut q = w;
                                for (d, _) in
                                    opp_type_spaces[i].radices().iter().enumerate()
                                {
                                    let j = opp_type_spaces[i].axis(d);
                                    q *= fam.tau(
                                        game,
                                        j,
                                        h,
                                        s,
                                        cog_space.digit(g_rank, j),
                                        opp_type_spaces[i].digit(o_rank, d),
                                    );
                                }
                                p += q;
                            }
                            op[out * nopp + o_rank] = p;
                        }
                    }
                }
            }
            opp_post.push(op);
        }

        Beliefs {
            game,
            fam,
            scheme,
            action_space,
            type_space,
            cog_space,
            action_digits,
            type_digits,
            opp_type_spaces,
            opp_action_spaces,
            type_prob,
            state_post,
            mi,
            rbar,
            joint_type_prob,
            opp_post,
        }
    }

    fn own_cell(&self, i: usize, h: usize, g_i: usize, theta: usize) -> usize {
        (h * self.fam.n_cogs[i] + g_i) * self.fam.n_types[i] + theta
    }

    /// `P_i(theta_i | h, g_i)`.
    pub fn type_prob(&self, i: usize, h: usize, g_i: usize, theta: usize) -> f64 {
        self.type_prob[i][self.own_cell(i, h, g_i, theta)]
    }

    /// Whether the posterior of `(i, theta_i)` exists at `(h, g_i)`.
    pub fn defined(&self, i: usize, h: usize, g_i: usize, theta: usize) -> bool {
        self.type_prob(i, h, g_i, theta) > 0.0
    }

    /// `mu_i(s | theta_i, h, g_i)`; a zero row when undefined.
    pub fn state_posterior(&self, i: usize, h: usize, g_i: usize, theta: usize) -> &[f64] {
        let cell = self.own_cell(i, h, g_i, theta);
        &self.state_post[i][cell * self.game.n_states..(cell + 1) * self.game.n_states]
    }

    /// Mutual information of agent `i`'s signal at `(h, g_i)`.
    pub fn signal_information(&self, i: usize, h: usize, g_i: usize) -> f64 {
        self.mi[i][h * self.fam.n_cogs[i] + g_i]
    }

    /// Expected immediate reward-plus-cost row over joint actions; a zero row
    /// when the type has zero probability.
    pub fn rbar_row(&self, i: usize, h: usize, g_i: usize, theta: usize) -> &[f64] {
        let cell = self.own_cell(i, h, g_i, theta);
        let na = self.action_space.len();
        &self.rbar[i][cell * na..(cell + 1) * na]
    }

    /// Joint type profile probability `P(theta | h, g)`.
    pub fn joint_type_prob(&self, h: usize, g_rank: usize, t_rank: usize) -> f64 {
        let ntr = self.type_space.len();
        self.joint_type_prob[(h * self.cog_space.len() + g_rank) * ntr + t_rank]
    }

    /// `mu_i(theta_minus | theta_i, h, g)` row over the opponent profile; a
    /// zero row when undefined.
    pub fn opp_posterior(&self, i: usize, h: usize, g_rank: usize, theta: usize) -> &[f64] {
        let nopp = self.opp_type_spaces[i].len();
        let out = (h * self.cog_space.len() + g_rank) * self.fam.n_types[i] + theta;
        &self.opp_post[i][out * nopp..(out + 1) * nopp]
    }

    /// Exact bound on `|R + C|` over every reachable coordinate; used for
    /// simulation horizons and reward normalisation.
    pub fn reward_cost_bound(&self) -> f64 {
        let game = self.game;
        let mut bound = 0.0f64;
        for i in 0..game.n_agents {
            for s in 0..game.n_states {
                for (a, digits) in self.action_digits.iter().enumerate() {
                    let r = game.reward(i, s, a);
                    let cost_extremes: Vec<f64> = match self.scheme.kind {
                        CostKind::Cb => self.scheme.tables[i].clone(),
                        CostKind::Tb => self.scheme.tables[i].clone(),
                        CostKind::Stb => {
                            let nt = self.fam.n_types[i];
                            self.scheme.tables[i][s * nt..(s + 1) * nt].to_vec()
                        }
                        CostKind::Sab => {
                            vec![self.scheme.tables[i][s * game.n_actions[i] + digits[i]]]
                        }
                        CostKind::Mi => self.mi[i].clone(),
                    };
                    for c in cost_extremes {
                        bound = bound.max((r + c).abs());
                    }
                }
            }
        }
        bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    /// Single-agent instance with the 2x2 signal used by the worked
    /// examples: prior (0.4, 0.6), tau(theta0 | s0) = 0.9, tau(theta0 | s1) = 0.2.
    fn worked_example() -> (BaseGame, SignalingFamily, CostScheme) {
        let game = BaseGame {
            n_agents: 1,
            n_states: 2,
            n_actions: vec![1],
            rewards: vec![2.0, -1.0],
            transition: vec![0.4, 0.6, 0.4, 0.6],
            initial: vec![0.4, 0.6],
            discount: 0.9,
        };
        let block = vec![0.9, 0.1, 0.2, 0.8];
        let fam = SignalingFamily::broadcast(vec![2], vec![1], vec![block], game.histories());
        let scheme = CostScheme::zero_sab(&game);
        (game, fam, scheme)
    }

    #[test]
    fn joint_prior_matches_hand_computation() {
        let (game, fam, _) = worked_example();
        let joint = joint_prior(&game, &fam, 0, &[0]);
        // p(s0, theta0) = 0.4 * 0.9 = 0.36, p(s1, theta0) = 0.6 * 0.2 = 0.12.
        assert!((joint[0] - 0.36).abs() < 1e-15);
        assert!((joint[2] - 0.12).abs() < 1e-15);
        let total: f64 = joint.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn posterior_matches_bayes_quotient() {
        let (game, fam, _) = worked_example();
        let post = posterior(&game, &fam, 0, 0, 0, &[0]).unwrap();
        assert!((post.type_prob - 0.48).abs() < 1e-15);
        assert!((post.state_marginal[0] - 0.75).abs() < 1e-12);
        assert!((post.state_marginal[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_type_is_an_error() {
        let game = BaseGame {
            n_agents: 1,
            n_states: 2,
            n_actions: vec![1],
            rewards: vec![0.0, 0.0],
            transition: vec![1.0, 0.0, 1.0, 0.0],
            initial: vec![1.0, 0.0],
            discount: 0.9,
        };
        // Identity signal: type 1 requires state 1, which never occurs.
        let block = vec![1.0, 0.0, 0.0, 1.0];
        let fam = SignalingFamily::broadcast(vec![2], vec![1], vec![block], game.histories());
        match posterior(&game, &fam, 0, 1, 0, &[0]) {
            Err(SgiaError::ZeroProbabilityType {
                agent, type_index, ..
            }) => {
                assert_eq!(agent, 0);
                assert_eq!(type_index, 1);
            }
            other => panic!("expected zero-probability error, got {other:?}"),
        }
    }

    #[test]
    fn expected_immediate_reward_weights_states() {
        let (game, fam, scheme) = worked_example();
        let post = posterior(&game, &fam, 0, 0, 0, &[0]).unwrap();
        let v = expected_immediate_reward(&game, &fam, &scheme, &post, &[0]).unwrap();
        // 0.75 * 2 + 0.25 * (-1) = 1.25.
        assert!((v - 1.25).abs() < 1e-12);
    }

    #[test]
    fn expected_immediate_reward_is_linear_in_the_posterior() {
        let (game, fam, scheme) = worked_example();
        let a = posterior(&game, &fam, 0, 0, 0, &[0]).unwrap();
        let b = posterior(&game, &fam, 0, 1, 0, &[0]).unwrap();
        let va = expected_immediate_reward(&game, &fam, &scheme, &a, &[0]).unwrap();
        let vb = expected_immediate_reward(&game, &fam, &scheme, &b, &[0]).unwrap();
        for lambda in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let mut mixed = a.clone();
            for s in 0..game.n_states {
                mixed.state_marginal[s] =
                    lambda * a.state_marginal[s] + (1.0 - lambda) * b.state_marginal[s];
            }
            let vm = expected_immediate_reward(&game, &fam, &scheme, &mixed, &[0]).unwrap();
            assert!((vm - (lambda * va + (1.0 - lambda) * vb)).abs() < 1e-12);
        }
    }

    #[test]
    fn cache_agrees_with_direct_computation() {
        let inst = instances::reference_random(3);
        let beliefs = Beliefs::new(&inst.game, &inst.family, &inst.scheme);
        for h in 0..inst.game.histories() {
            for g_rank in beliefs.cog_space.iter() {
                let g = beliefs.cog_space.unrank(g_rank);
                for i in 0..inst.game.n_agents {
                    for theta in 0..inst.family.n_types[i] {
                        let direct = posterior(&inst.game, &inst.family, i, theta, h, &g);
                        match direct {
                            Ok(post) => {
                                assert!(
                                    (beliefs.type_prob(i, h, g[i], theta) - post.type_prob).abs()
                                        < 1e-12
                                );
                                let cached = beliefs.state_posterior(i, h, g[i], theta);
                                for s in 0..inst.game.n_states {
                                    assert!((cached[s] - post.state_marginal[s]).abs() < 1e-12);
                                }
                                let opp = beliefs.opp_posterior(i, h, g_rank, theta);
                                for (o, &p) in post.opp_marginal.iter().enumerate() {
                                    assert!((opp[o] - p).abs() < 1e-12);
                                }
                            }
                            Err(_) => {
                                assert!(!beliefs.defined(i, h, g[i], theta));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn joint_prior_reconstructs_from_posteriors() {
        let inst = instances::reference_random(11);
        let beliefs = Beliefs::new(&inst.game, &inst.family, &inst.scheme);
        let g = vec![1, 0];
        let g_rank = beliefs.cog_space.rank(&g);
        for h in 0..inst.game.histories() {
            let joint = joint_prior(&inst.game, &inst.family, h, &g);
            // Reconstruct p(s, theta) = P_0(theta_0) mu_0(s, theta_1 | theta_0).
            for (t_rank, digits) in beliefs.type_digits.iter().enumerate() {
                let post = posterior(&inst.game, &inst.family, 0, digits[0], h, &g).unwrap();
                let opp_space = &beliefs.opp_type_spaces[0];
                let o_rank = opp_space.rank(&[digits[1]]);
                for s in 0..inst.game.n_states {
                    let rebuilt =
                        post.type_prob * post.joint[s * opp_space.len() + o_rank];
                    let direct = joint[s * beliefs.type_space.len() + t_rank];
                    assert!(
                        (rebuilt - direct).abs() < 1e-9,
                        "h={h} t={t_rank} s={s}: {rebuilt} vs {direct}"
                    );
                }
            }
            let _ = g_rank;
        }
    }

    #[test]
    fn uninformative_signal_carries_zero_information() {
        let inst = instances::reference_random(5);
        let beliefs = Beliefs::new(&inst.game, &inst.family, &inst.scheme);
        // Build an explicitly uninformative family and check MI == 0.
        let block = vec![0.3, 0.7, 0.3, 0.7];
        let flat =
            SignalingFamily::broadcast(vec![2, 2], vec![1, 1], vec![block.clone(), block], inst.game.histories());
        let scheme = CostScheme::zero_sab(&inst.game);
        let flat_beliefs = Beliefs::new(&inst.game, &flat, &scheme);
        for h in 0..inst.game.histories() {
            assert!(flat_beliefs.signal_information(0, h, 0).abs() < 1e-12);
        }
        let _ = beliefs;
    }
}
