//! Cognition cost schemes.
//!
//! A scheme fixes what the per-period cognition term depends on. Costs enter
//! the value recursions additively next to the stage reward, so tables meant
//! to penalise should carry negative entries.

use serde::{Deserialize, Serialize};

use crate::error::SgiaError;
use crate::game::{BaseGame, ValidationReport, Violation};
use crate::signaling::SignalingFamily;

/// What the per-period cost term is allowed to depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    /// Cognition-based: a table over the chosen rule `g`.
    Cb,
    /// Type-based: a table over the realised type.
    Tb,
    /// State-and-type-based: a table over `(s, theta)`.
    Stb,
    /// State-and-action-based: a table over `(s, a_i)`.
    Sab,
    /// Mutual information of the `(type, state)` joint at `(h, g)`; no table.
    Mi,
}

/// A cost kind plus its per-agent tables (empty for [`CostKind::Mi`]).
///
/// Table layouts: CB `[g]`, TB `[theta]`, STB `[(s, theta)]` state-major,
/// SAB `[(s, a_i)]` state-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostScheme {
    pub kind: CostKind,
    pub tables: Vec<Vec<f64>>,
}

impl CostScheme {
    /// A zero SAB scheme, handy for cost-free instances.
    pub fn zero_sab(game: &BaseGame) -> Self {
        CostScheme {
            kind: CostKind::Sab,
            tables: (0..game.n_agents)
                .map(|i| vec![0.0; game.n_states * game.n_actions[i]])
                .collect(),
        }
    }

    /// Largest absolute table entry (0 for MI; callers bound MI separately).
    pub fn max_abs_table(&self) -> f64 {
        self.tables
            .iter()
            .flat_map(|t| t.iter())
            .fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// Everything a cost evaluation may condition on. Fields irrelevant to the
/// scheme's kind are ignored; fields required but absent are a contract
/// error.
#[derive(Debug, Clone, Copy, Default)]
pub struct CostContext<'a> {
    pub agent: usize,
    pub state: Option<usize>,
    pub type_index: Option<usize>,
    pub action: Option<usize>,
    pub cognition: Option<usize>,
    /// Joint `(s, theta)` distribution at `(h, g)`, row-major over states;
    /// required by the MI kind.
    pub joint: Option<&'a [f64]>,
    /// State count of `joint` (rows).
    pub n_states: usize,
}

/// Per-period cognition cost for one agent under the scheme.
///
/// For table kinds this is a lookup with the action interpreted as the
/// agent's own action index; for MI it is the mutual information of the
/// supplied joint distribution.
pub fn cognition_cost(scheme: &CostScheme, ctx: CostContext<'_>) -> Result<f64, SgiaError> {
    let need = |field: Option<usize>, name: &str| {
        field.ok_or_else(|| {
            SgiaError::contract(format!("cost kind {:?} requires {name}", scheme.kind))
        })
    };
    let table = || {
        scheme.tables.get(ctx.agent).ok_or_else(|| {
            SgiaError::contract(format!("no cost table for agent {}", ctx.agent))
        })
    };
    match scheme.kind {
        CostKind::Cb => {
            let g = need(ctx.cognition, "cognition")?;
            Ok(table()?[g])
        }
        CostKind::Tb => {
            let th = need(ctx.type_index, "type_index")?;
            Ok(table()?[th])
        }
        CostKind::Stb => {
            let s = need(ctx.state, "state")?;
            let th = need(ctx.type_index, "type_index")?;
            let t = table()?;
            let n_types = t.len() / ctx_states(ctx, t.len())?;
            Ok(t[s * n_types + th])
        }
        CostKind::Sab => {
            let s = need(ctx.state, "state")?;
            let a = need(ctx.action, "action")?;
            let t = table()?;
            let n_actions = t.len() / ctx_states(ctx, t.len())?;
            Ok(t[s * n_actions + a])
        }
        CostKind::Mi => {
            let joint = ctx
                .joint
                .ok_or_else(|| SgiaError::contract("cost kind Mi requires the (s, theta) joint"))?;
            if ctx.n_states == 0 || joint.len() % ctx.n_states != 0 {
                return Err(SgiaError::contract("MI joint has no valid state count"));
            }
            Ok(mutual_information(joint, ctx.n_states))
        }
    }
}

fn ctx_states(ctx: CostContext<'_>, table_len: usize) -> Result<usize, SgiaError> {
    if ctx.n_states == 0 || table_len % ctx.n_states != 0 {
        return Err(SgiaError::contract(
            "state-indexed cost table requires n_states in the context",
        ));
    }
    Ok(ctx.n_states)
}

/// Mutual information `I(theta; s) = H(theta) - H(theta | s)` of a joint
/// `(s, theta)` distribution, natural logarithm, with `0 ln 0 = 0`.
pub fn mutual_information(joint: &[f64], n_states: usize) -> f64 {
    let n_types = joint.len() / n_states;
    let xlnx = |p: f64| if p > 0.0 { p * p.ln() } else { 0.0 };

    let mut h_theta = 0.0;
    for th in 0..n_types {
        let p: f64 = (0..n_states).map(|s| joint[s * n_types + th]).sum();
        h_theta -= xlnx(p);
    }
    let mut h_theta_given_s = 0.0;
    for s in 0..n_states {
        let ps: f64 = joint[s * n_types..(s + 1) * n_types].iter().sum();
        if ps <= 0.0 {
            continue;
        }
        for th in 0..n_types {
            let cond = joint[s * n_types + th] / ps;
            h_theta_given_s -= ps * xlnx(cond);
        }
    }
    h_theta - h_theta_given_s
}

/// Structural validation of a cost scheme against a game and family.
pub fn validate_cost_scheme(
    game: &BaseGame,
    fam: &SignalingFamily,
    scheme: &CostScheme,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let expect_tables = match scheme.kind {
        CostKind::Mi => 0,
        _ => game.n_agents,
    };
    if scheme.kind == CostKind::Mi {
        if !scheme.tables.is_empty() && scheme.tables.iter().any(|t| !t.is_empty()) {
            report.push(Violation::new("COST_MI_TABLE", &[], 0.0));
        }
        return report;
    }
    if scheme.tables.len() != expect_tables {
        report.push(Violation::new(
            "COST_TABLES",
            &[("expected", expect_tables), ("got", scheme.tables.len())],
            0.0,
        ));
        return report;
    }
    for i in 0..game.n_agents {
        let expected = match scheme.kind {
            CostKind::Cb => fam.n_cogs[i],
            CostKind::Tb => fam.n_types[i],
            CostKind::Stb => game.n_states * fam.n_types[i],
            CostKind::Sab => game.n_states * game.n_actions[i],
            CostKind::Mi => 0,
        };
        if scheme.tables[i].len() != expected {
            report.push(Violation::new(
                "COST_LEN",
                &[("agent", i), ("expected", expected), ("got", scheme.tables[i].len())],
                0.0,
            ));
            continue;
        }
        for (k, &c) in scheme.tables[i].iter().enumerate() {
            if !c.is_finite() {
                report.push(Violation::new(
                    "COST_FINITE",
                    &[("agent", i), ("entry", k)],
                    f64::INFINITY,
                ));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_binary_signal_has_ln2_information() {
        // Uniform prior, type equal to state.
        let joint = vec![0.5, 0.0, 0.0, 0.5];
        let mi = mutual_information(&joint, 2);
        assert!((mi - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn independent_joint_has_zero_information() {
        // p(s, theta) = p(s) p(theta) with p(s) = (0.3, 0.7), p(theta) = (0.4, 0.6).
        let joint = vec![0.12, 0.18, 0.28, 0.42];
        assert!(mutual_information(&joint, 2).abs() < 1e-12);
    }

    #[test]
    fn zero_rows_do_not_poison_information() {
        // One state never occurs; 0 ln 0 treated as 0.
        let joint = vec![0.0, 0.0, 0.5, 0.5];
        assert!(mutual_information(&joint, 2).abs() < 1e-12);
    }

    #[test]
    fn sab_lookup_uses_state_major_layout() {
        let scheme = CostScheme {
            kind: CostKind::Sab,
            tables: vec![vec![1.0, 2.0, 3.0, 4.0]],
        };
        let ctx = CostContext {
            agent: 0,
            state: Some(1),
            action: Some(0),
            n_states: 2,
            ..Default::default()
        };
        assert_eq!(cognition_cost(&scheme, ctx).unwrap(), 3.0);
    }

    #[test]
    fn missing_context_is_a_contract_error() {
        let scheme = CostScheme {
            kind: CostKind::Tb,
            tables: vec![vec![0.0, -1.0]],
        };
        let ctx = CostContext {
            agent: 0,
            ..Default::default()
        };
        assert!(matches!(
            cognition_cost(&scheme, ctx),
            Err(SgiaError::Contract(_))
        ));
    }

    #[test]
    fn mi_cost_comes_from_the_joint() {
        let scheme = CostScheme {
            kind: CostKind::Mi,
            tables: vec![],
        };
        let joint = vec![0.5, 0.0, 0.0, 0.5];
        let ctx = CostContext {
            agent: 0,
            joint: Some(&joint),
            n_states: 2,
            ..Default::default()
        };
        let c = cognition_cost(&scheme, ctx).unwrap();
        assert!((c - std::f64::consts::LN_2).abs() < 1e-12);
    }
}
