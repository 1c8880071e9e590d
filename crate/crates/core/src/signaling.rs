//! Signaling families: the menu of type-generating rules each agent picks
//! from at the cognition stage.

use serde::{Deserialize, Serialize};

use crate::game::{check_simplex_row, BaseGame, ValidationReport, Violation};

/// Per-agent menus of signaling rules `tau_i(theta | s, g, h)`.
///
/// `rule[i]` is flat over `(h, s, g, theta)` row-major. The history axis is
/// always materialised in memory; families that do not depend on the history
/// keep `history_free = true` and carry identical `h` slices, which the file
/// format stores once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalingFamily {
    /// Type count per agent; validation requires these to be equal.
    pub n_types: Vec<usize>,
    /// Menu size per agent.
    pub n_cogs: Vec<usize>,
    /// True when every history slice is identical by construction.
    pub history_free: bool,
    pub rule: Vec<Vec<f64>>,
}

impl SignalingFamily {
    /// Build a history-free family from one `(s, g, theta)` block per agent,
    /// broadcasting it across all histories.
    pub fn broadcast(
        n_types: Vec<usize>,
        n_cogs: Vec<usize>,
        per_history: Vec<Vec<f64>>,
        n_histories: usize,
    ) -> Self {
        let rule = per_history
            .into_iter()
            .map(|block| {
                let mut full = Vec::with_capacity(block.len() * n_histories);
                for _ in 0..n_histories {
                    full.extend_from_slice(&block);
                }
                full
            })
            .collect();
        SignalingFamily {
            n_types,
            n_cogs,
            history_free: true,
            rule,
        }
    }

    fn block(&self, i: usize, n_states: usize) -> usize {
        n_states * self.n_cogs[i] * self.n_types[i]
    }

    /// Probability that agent `i` receives type `theta` in state `s` after
    /// choosing `g` at history `h`.
    pub fn tau(&self, game: &BaseGame, i: usize, h: usize, s: usize, g: usize, theta: usize) -> f64 {
        self.rule[i][((h * game.n_states + s) * self.n_cogs[i] + g) * self.n_types[i] + theta]
    }

    /// The `theta` row for `(i, h, s, g)`.
    pub fn row(&self, game: &BaseGame, i: usize, h: usize, s: usize, g: usize) -> &[f64] {
        let start =
            ((h * game.n_states + s) * self.n_cogs[i] + g) * self.n_types[i];
        &self.rule[i][start..start + self.n_types[i]]
    }

    /// Expected length of `rule[i]` for this game.
    pub fn expected_len(&self, game: &BaseGame, i: usize) -> usize {
        game.histories() * self.block(i, game.n_states)
    }
}

/// Structural validation of a signaling family against a game.
///
/// Checks per-agent tensor lengths, simplex rows, the equal-type-count
/// standing assumption, and that history-free families really are
/// history-free.
pub fn validate_signaling_family(game: &BaseGame, fam: &SignalingFamily) -> ValidationReport {
    let mut report = ValidationReport::default();
    if fam.n_types.len() != game.n_agents
        || fam.n_cogs.len() != game.n_agents
        || fam.rule.len() != game.n_agents
    {
        report.push(Violation::new(
            "TAU_AGENTS",
            &[("expected", game.n_agents)],
            0.0,
        ));
        return report;
    }
    for i in 0..game.n_agents {
        if fam.n_types[i] == 0 {
            report.push(Violation::new("TYPES_POS", &[("agent", i)], 0.0));
        }
        if fam.n_cogs[i] == 0 {
            report.push(Violation::new("COGS_POS", &[("agent", i)], 0.0));
        }
        if fam.n_types[i] != fam.n_types[0] {
            report.push(Violation::new(
                "TYPES_EQUAL",
                &[("agent", i), ("got", fam.n_types[i]), ("first", fam.n_types[0])],
                0.0,
            ));
        }
    }
    if !report.is_valid() {
        return report;
    }
    for i in 0..game.n_agents {
        let expected = fam.expected_len(game, i);
        if fam.rule[i].len() != expected {
            report.push(Violation::new(
                "TAU_LEN",
                &[("agent", i), ("expected", expected), ("got", fam.rule[i].len())],
                0.0,
            ));
            continue;
        }
        for h in 0..game.histories() {
            for s in 0..game.n_states {
                for g in 0..fam.n_cogs[i] {
                    let row = fam.row(game, i, h, s, g);
                    check_simplex_row(
                        &mut report,
                        row,
                        "TAU_ROW_SUM",
                        "TAU_NONNEG",
                        &[("agent", i), ("history", h), ("state", s), ("cognition", g)],
                    );
                }
            }
        }
        if fam.history_free {
            let block = fam.block(i, game.n_states);
            for h in 1..game.histories() {
                for k in 0..block {
                    if fam.rule[i][h * block + k] != fam.rule[i][k] {
                        report.push(Violation::new(
                            "TAU_HISTORY_FREE",
                            &[("agent", i), ("history", h)],
                            (fam.rule[i][h * block + k] - fam.rule[i][k]).abs(),
                        ));
                        break;
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game() -> BaseGame {
        BaseGame {
            n_agents: 2,
            n_states: 2,
            n_actions: vec![2, 2],
            rewards: vec![0.0; 2 * 2 * 4],
            transition: vec![0.5; 8 * 2],
            initial: vec![0.5, 0.5],
            discount: 0.9,
        }
    }

    pub(crate) fn uniform_family(game: &BaseGame) -> SignalingFamily {
        let block: Vec<f64> = vec![0.5; 2 * 2 * 2];
        SignalingFamily::broadcast(
            vec![2, 2],
            vec![2, 2],
            vec![block.clone(), block],
            game.histories(),
        )
    }

    #[test]
    fn broadcast_family_validates() {
        let g = game();
        let fam = uniform_family(&g);
        assert!(validate_signaling_family(&g, &fam).is_valid());
    }

    #[test]
    fn non_simplex_row_is_caught() {
        let g = game();
        let mut fam = uniform_family(&g);
        fam.history_free = false;
        fam.rule[1][0] = 0.75;
        let report = validate_signaling_family(&g, &fam);
        let v = report
            .violations
            .iter()
            .find(|v| v.constraint == "TAU_ROW_SUM")
            .expect("row sum violation");
        assert_eq!(v.coordinates["agent"], 1);
        assert!((v.magnitude - 0.25).abs() < 1e-12);
    }

    #[test]
    fn unequal_type_counts_are_rejected() {
        let g = game();
        let mut fam = uniform_family(&g);
        fam.n_types = vec![2, 3];
        let report = validate_signaling_family(&g, &fam);
        assert!(report
            .violations
            .iter()
            .any(|v| v.constraint == "TYPES_EQUAL"));
    }

    #[test]
    fn history_free_flag_with_varying_slices_is_caught() {
        let g = game();
        let mut fam = uniform_family(&g);
        // Damage one non-first history slice while keeping rows stochastic.
        let block = 2 * 2 * 2;
        fam.rule[0][block] = 0.75;
        fam.rule[0][block + 1] = 0.25;
        let report = validate_signaling_family(&g, &fam);
        assert!(report
            .violations
            .iter()
            .any(|v| v.constraint == "TAU_HISTORY_FREE"));
    }
}
