//! Dimension bookkeeping and flat tensor indexing.
//!
//! Every tensor in the crate is a flat `Vec<f64>` in row-major order over a
//! fixed axis precedence: agent, history, state, cognition choice, type,
//! action. Joint (cross-agent) indices are mixed-radix numbers with agent 0
//! as the most significant digit. All index math funnels through this module
//! so the layout is defined exactly once.

use serde::{Deserialize, Serialize};

/// Sizes of every finite space of an instance.
///
/// Per-agent sizes are stored as vectors even when they are required to be
/// equal across agents (types) so that coordinates in reports never need
/// re-deriving.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub n_agents: usize,
    pub n_states: usize,
    /// Action count per agent.
    pub n_actions: Vec<usize>,
    /// Type count per agent. Validation requires these to be equal.
    pub n_types: Vec<usize>,
    /// Cognition menu size per agent.
    pub n_cogs: Vec<usize>,
}

impl Dims {
    /// Number of joint action profiles.
    pub fn joint_actions(&self) -> usize {
        self.n_actions.iter().product()
    }

    /// Number of joint type profiles.
    pub fn joint_types(&self) -> usize {
        self.n_types.iter().product()
    }

    /// Number of public histories: one per (previous state, previous joint
    /// action) pair.
    pub fn histories(&self) -> usize {
        self.n_states * self.joint_actions()
    }

    /// Flat history index of `(s_prev, a_prev)`; state-major.
    pub fn history_index(&self, s_prev: usize, a_prev: usize) -> usize {
        debug_assert!(s_prev < self.n_states && a_prev < self.joint_actions());
        s_prev * self.joint_actions() + a_prev
    }

    /// Inverse of [`Dims::history_index`].
    pub fn history_parts(&self, h: usize) -> (usize, usize) {
        (h / self.joint_actions(), h % self.joint_actions())
    }

    /// Mixed-radix space of joint actions.
    pub fn action_space(&self) -> JointSpace {
        JointSpace::new(&self.n_actions)
    }

    /// Mixed-radix space of joint types.
    pub fn type_space(&self) -> JointSpace {
        JointSpace::new(&self.n_types)
    }

    /// Mixed-radix space of opponents' types from agent `i`'s view.
    pub fn opp_type_space(&self, i: usize) -> JointSpace {
        JointSpace::new_skipping(&self.n_types, i)
    }

    /// Mixed-radix space of opponents' actions from agent `i`'s view.
    pub fn opp_action_space(&self, i: usize) -> JointSpace {
        JointSpace::new_skipping(&self.n_actions, i)
    }
}

/// A mixed-radix index space: ranks digit vectors to flat indices and back.
///
/// Digit 0 is most significant, matching the canonical agent-major order.
#[derive(Debug, Clone)]
pub struct JointSpace {
    radices: Vec<usize>,
    /// Original axis position of each digit (identity unless an axis was
    /// skipped at construction).
    axes: Vec<usize>,
    count: usize,
}

impl JointSpace {
    pub fn new(radices: &[usize]) -> Self {
        JointSpace {
            radices: radices.to_vec(),
            axes: (0..radices.len()).collect(),
            count: radices.iter().product(),
        }
    }

    /// Space over all axes except `skip`; used for opponent profiles.
    pub fn new_skipping(radices: &[usize], skip: usize) -> Self {
        let mut r = Vec::with_capacity(radices.len().saturating_sub(1));
        let mut axes = Vec::with_capacity(radices.len().saturating_sub(1));
        for (j, &n) in radices.iter().enumerate() {
            if j != skip {
                r.push(n);
                axes.push(j);
            }
        }
        let count = r.iter().product();
        JointSpace {
            radices: r,
            axes,
            count,
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    /// Original axis (agent) behind digit position `d`.
    pub fn axis(&self, d: usize) -> usize {
        self.axes[d]
    }

    /// Flat rank of a digit vector.
    pub fn rank(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.radices.len());
        let mut idx = 0;
        for (d, &n) in digits.iter().zip(&self.radices) {
            debug_assert!(*d < n);
            idx = idx * n + d;
        }
        idx
    }

    /// Digit vector behind a flat rank.
    pub fn unrank(&self, mut idx: usize) -> Vec<usize> {
        let mut digits = vec![0; self.radices.len()];
        for (slot, &n) in digits.iter_mut().zip(&self.radices).rev() {
            *slot = idx % n;
            idx /= n;
        }
        digits
    }

    /// Single digit of a flat rank without materialising the vector.
    pub fn digit(&self, idx: usize, d: usize) -> usize {
        let mut suffix: usize = self.radices[d + 1..].iter().product();
        suffix = suffix.max(1);
        (idx / suffix) % self.radices[d]
    }

    /// Iterate all flat ranks.
    pub fn iter(&self) -> std::ops::Range<usize> {
        0..self.count
    }

    /// Insert `own` at the skipped axis of an opponent-space rank, producing
    /// the digit vector of the full space.
    ///
    /// Only meaningful for spaces built with [`JointSpace::new_skipping`];
    /// `own_axis` must be the axis that was skipped.
    pub fn merge_with_own(&self, rank: usize, own_axis: usize, own: usize) -> Vec<usize> {
        let digits = self.unrank(rank);
        let mut full = Vec::with_capacity(digits.len() + 1);
        let mut it = digits.iter().zip(&self.axes);
        let mut next = it.next();
        for axis in 0..=self.axes.len() {
            if axis == own_axis {
                full.push(own);
            }
            if let Some((&d, &a)) = next {
                if a == axis {
                    full.push(d);
                    next = it.next();
                }
            }
        }
        debug_assert_eq!(full.len(), self.axes.len() + 1);
        full
    }
}
