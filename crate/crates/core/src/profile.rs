//! Stationary strategy profiles: a pure cognition selection per history and
//! a mixed action rule per (type, history).

use serde::{Deserialize, Serialize};

use crate::game::{check_simplex_row, BaseGame, ValidationReport, Violation};
use crate::signaling::SignalingFamily;

/// A stationary profile for every agent.
///
/// `beta[i][h]` is the menu index agent `i` picks at history `h` (pure, per
/// the equilibrium concept). `pi[i]` is flat over `(h, theta, a)` row-major
/// and each `(h, theta)` row is a distribution over the agent's own actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub beta: Vec<Vec<usize>>,
    pub pi: Vec<Vec<f64>>,
}

impl StrategyProfile {
    /// Uniform mixing and menu item 0 everywhere.
    pub fn uniform(game: &BaseGame, fam: &SignalingFamily) -> Self {
        let nh = game.histories();
        let beta = (0..game.n_agents).map(|_| vec![0; nh]).collect();
        let pi = (0..game.n_agents)
            .map(|i| {
                let na = game.n_actions[i];
                vec![1.0 / na as f64; nh * fam.n_types[i] * na]
            })
            .collect();
        StrategyProfile { beta, pi }
    }

    /// Probability that agent `i` of type `theta` plays `a` at history `h`.
    pub fn pi(&self, game: &BaseGame, fam: &SignalingFamily, i: usize, h: usize, theta: usize, a: usize) -> f64 {
        self.pi[i][(h * fam.n_types[i] + theta) * game.n_actions[i] + a]
    }

    /// The action row for `(i, h, theta)`.
    pub fn pi_row(&self, game: &BaseGame, fam: &SignalingFamily, i: usize, h: usize, theta: usize) -> &[f64] {
        let start = (h * fam.n_types[i] + theta) * game.n_actions[i];
        &self.pi[i][start..start + game.n_actions[i]]
    }

    pub fn pi_row_mut(
        &mut self,
        game: &BaseGame,
        fam: &SignalingFamily,
        i: usize,
        h: usize,
        theta: usize,
    ) -> &mut [f64] {
        let start = (h * fam.n_types[i] + theta) * game.n_actions[i];
        &mut self.pi[i][start..start + game.n_actions[i]]
    }

    /// Joint probability of action profile `a` (flat rank) given the joint
    /// type rank `theta` at `h`.
    pub fn joint_pi(
        &self,
        game: &BaseGame,
        fam: &SignalingFamily,
        h: usize,
        theta_digits: &[usize],
        a_digits: &[usize],
    ) -> f64 {
        let mut p = 1.0;
        for i in 0..game.n_agents {
            p *= self.pi(game, fam, i, h, theta_digits[i], a_digits[i]);
        }
        p
    }
}

/// Structural validation of a profile against a game and family.
pub fn validate_profile(
    game: &BaseGame,
    fam: &SignalingFamily,
    profile: &StrategyProfile,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let nh = game.histories();
    if profile.beta.len() != game.n_agents || profile.pi.len() != game.n_agents {
        report.push(Violation::new(
            "PROFILE_AGENTS",
            &[("expected", game.n_agents)],
            0.0,
        ));
        return report;
    }
    for i in 0..game.n_agents {
        if profile.beta[i].len() != nh {
            report.push(Violation::new(
                "BETA_LEN",
                &[("agent", i), ("expected", nh), ("got", profile.beta[i].len())],
                0.0,
            ));
            continue;
        }
        for (h, &g) in profile.beta[i].iter().enumerate() {
            if g >= fam.n_cogs[i] {
                report.push(Violation::new(
                    "BETA_RANGE",
                    &[("agent", i), ("history", h), ("got", g)],
                    0.0,
                ));
            }
        }
        let expected = nh * fam.n_types[i] * game.n_actions[i];
        if profile.pi[i].len() != expected {
            report.push(Violation::new(
                "PI_LEN",
                &[("agent", i), ("expected", expected), ("got", profile.pi[i].len())],
                0.0,
            ));
            continue;
        }
        for h in 0..nh {
            for th in 0..fam.n_types[i] {
                let row = profile.pi_row(game, fam, i, h, th);
                check_simplex_row(
                    &mut report,
                    row,
                    "PI_ROW_SUM",
                    "PI_NONNEG",
                    &[("agent", i), ("history", h), ("type", th)],
                );
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostScheme;
    use crate::instances;

    #[test]
    fn uniform_profile_validates() {
        let inst = instances::reference_random(7);
        let profile = StrategyProfile::uniform(&inst.game, &inst.family);
        assert!(validate_profile(&inst.game, &inst.family, &profile).is_valid());
        let _ = CostScheme::zero_sab(&inst.game);
    }

    #[test]
    fn out_of_range_menu_choice_is_caught() {
        let inst = instances::reference_random(7);
        let mut profile = StrategyProfile::uniform(&inst.game, &inst.family);
        profile.beta[0][3] = 99;
        let report = validate_profile(&inst.game, &inst.family, &profile);
        assert!(report.violations.iter().any(|v| v.constraint == "BETA_RANGE"));
    }
}
