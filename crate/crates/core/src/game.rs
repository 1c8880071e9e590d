//! Base game data: reward tensors, transition kernel, initial distribution.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::dims::Dims;
use crate::tol;

/// A public history: the previous state and previous joint action. Histories
/// are the Markov state of the public process; engines use the flat index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct History {
    pub s_prev: usize,
    pub a_prev: usize,
}

impl History {
    pub fn flat(&self, game: &BaseGame) -> usize {
        game.history_index(self.s_prev, self.a_prev)
    }

    pub fn from_flat(h: usize, game: &BaseGame) -> Self {
        let (s_prev, a_prev) = game.history_parts(h);
        History { s_prev, a_prev }
    }
}

/// Stage rewards, transition kernel, initial state distribution and discount.
///
/// Tensor layouts (flat, row-major):
/// * `rewards[i][s][a]`   with `a` a joint action rank,
/// * `transition[h][s']`  with `h = s_prev * |A| + a_prev`,
/// * `initial[s]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseGame {
    pub n_agents: usize,
    pub n_states: usize,
    pub n_actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub transition: Vec<f64>,
    pub initial: Vec<f64>,
    pub discount: f64,
}

impl BaseGame {
    pub fn joint_actions(&self) -> usize {
        self.n_actions.iter().product()
    }

    pub fn histories(&self) -> usize {
        self.n_states * self.joint_actions()
    }

    pub fn history_index(&self, s_prev: usize, a_prev: usize) -> usize {
        s_prev * self.joint_actions() + a_prev
    }

    pub fn history_parts(&self, h: usize) -> (usize, usize) {
        (h / self.joint_actions(), h % self.joint_actions())
    }

    /// Stage reward of agent `i` in state `s` under joint action `a`.
    pub fn reward(&self, i: usize, s: usize, a: usize) -> f64 {
        let na = self.joint_actions();
        self.rewards[(i * self.n_states + s) * na + a]
    }

    /// Probability of drawing state `s` at a history `h`.
    pub fn state_prob(&self, h: usize, s: usize) -> f64 {
        self.transition[h * self.n_states + s]
    }

    /// Dimensions combined with a signaling family's type and menu sizes.
    pub fn dims_with(&self, fam: &crate::signaling::SignalingFamily) -> Dims {
        Dims {
            n_agents: self.n_agents,
            n_states: self.n_states,
            n_actions: self.n_actions.clone(),
            n_types: fam.n_types.clone(),
            n_cogs: fam.n_cogs.clone(),
        }
    }

    /// Largest absolute stage reward.
    pub fn max_abs_reward(&self) -> f64 {
        self.rewards.iter().fold(0.0f64, |m, r| m.max(r.abs()))
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// One violated structural constraint, with enough coordinates to find it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    /// Stable identifier, e.g. `T_ROW_SUM` or `REWARD_FINITE`.
    pub constraint: String,
    /// Named coordinates of the offending entry.
    pub coordinates: BTreeMap<String, usize>,
    /// How far the entry is from feasible (0 when not meaningful).
    pub magnitude: f64,
}

impl Violation {
    pub fn new(constraint: &str, coords: &[(&str, usize)], magnitude: f64) -> Self {
        Violation {
            constraint: constraint.to_string(),
            coordinates: coords
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            magnitude,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constraint)?;
        if !self.coordinates.is_empty() {
            let coords: Vec<String> = self
                .coordinates
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            write!(f, " at {}", coords.join(", "))?;
        }
        if self.magnitude != 0.0 {
            write!(f, " (magnitude {:.3e})", self.magnitude)?;
        }
        Ok(())
    }
}

/// Outcome of structural validation: empty means valid.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Check a distribution row; pushes simplex violations with `coords`.
pub(crate) fn check_simplex_row(
    report: &mut ValidationReport,
    row: &[f64],
    constraint_sum: &str,
    constraint_neg: &str,
    coords: &[(&str, usize)],
) {
    let mut sum = 0.0;
    for (k, &p) in row.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            let mut c = coords.to_vec();
            c.push(("entry", k));
            report.push(Violation::new(
                constraint_neg,
                &c,
                if p.is_finite() { -p } else { f64::INFINITY },
            ));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > tol::SIMPLEX {
        report.push(Violation::new(constraint_sum, coords, (sum - 1.0).abs()));
    }
}

/// Structural validation of the base game alone.
///
/// Checks tensor lengths, finiteness of rewards, simplex rows of the
/// transition kernel and initial distribution, and the open discount range.
pub fn validate_base_game(game: &BaseGame) -> ValidationReport {
    let mut report = ValidationReport::default();
    if game.n_agents == 0 {
        report.push(Violation::new("N_AGENTS", &[], 0.0));
    }
    if game.n_states == 0 {
        report.push(Violation::new("N_STATES", &[], 0.0));
    }
    if game.n_actions.len() != game.n_agents {
        report.push(Violation::new(
            "ACTIONS_LEN",
            &[("got", game.n_actions.len())],
            0.0,
        ));
        return report;
    }
    for (i, &na) in game.n_actions.iter().enumerate() {
        if na == 0 {
            report.push(Violation::new("N_ACTIONS", &[("agent", i)], 0.0));
        }
    }
    if !report.is_valid() {
        return report;
    }

    let na = game.joint_actions();
    let expected_rewards = game.n_agents * game.n_states * na;
    if game.rewards.len() != expected_rewards {
        report.push(Violation::new(
            "REWARDS_LEN",
            &[("expected", expected_rewards), ("got", game.rewards.len())],
            0.0,
        ));
    } else {
        for i in 0..game.n_agents {
            for s in 0..game.n_states {
                for a in 0..na {
                    let r = game.reward(i, s, a);
                    if !r.is_finite() {
                        report.push(Violation::new(
                            "REWARD_FINITE",
                            &[("agent", i), ("state", s), ("action", a)],
                            f64::INFINITY,
                        ));
                    }
                }
            }
        }
    }

    let nh = game.histories();
    if game.transition.len() != nh * game.n_states {
        report.push(Violation::new(
            "T_LEN",
            &[
                ("expected", nh * game.n_states),
                ("got", game.transition.len()),
            ],
            0.0,
        ));
    } else {
        for h in 0..nh {
            let row = &game.transition[h * game.n_states..(h + 1) * game.n_states];
            check_simplex_row(&mut report, row, "T_ROW_SUM", "T_NONNEG", &[("history", h)]);
        }
    }

    if game.initial.len() != game.n_states {
        report.push(Violation::new(
            "INITIAL_LEN",
            &[("expected", game.n_states), ("got", game.initial.len())],
            0.0,
        ));
    } else {
        check_simplex_row(
            &mut report,
            &game.initial,
            "INITIAL_ROW_SUM",
            "INITIAL_NONNEG",
            &[],
        );
    }

    if !(game.discount > 0.0 && game.discount < 1.0) {
        report.push(Violation::new("DISCOUNT_RANGE", &[], game.discount));
    }
    report
}
