//! Tabular engine for two-stage stochastic games in which agents first buy a
//! signal about the hidden state (the cognition stage) and then act on the
//! posterior it induces (the action stage).
//!
//! The crate is organised around a small set of desk-scale primitives:
//!
//! * [`game`] / [`signaling`] / [`cost`] / [`profile`] describe an instance:
//!   base game tensors, a menu of signaling rules per agent, a cognition cost
//!   scheme and a stationary strategy profile.
//! * [`beliefs`] computes the common prior `p(s, theta | h, g)` and the
//!   Bayesian posteriors every other module consumes.
//! * [`value`] evaluates a profile exactly (dense linear solve of the coupled
//!   history/type/action recursions) and by Monte Carlo simulation.
//! * [`verifier`] decides whether a profile is a perfect public Markov
//!   equilibrium (PPME) three independent ways: direct one-shot deviation
//!   checks, the optimization form (objective `Z` plus feasibility set `K`),
//!   and the global fixed-point alignment form (`Z_gfpa` / `K_gfpa`).
//! * [`lfpa`] builds the per-(state, history) local alignment certificates:
//!   multiplier recovery, stationarity and complementarity residuals, the
//!   action-stage complementarity `pi * gamma = 0`, and the gradient
//!   independence rank test that makes the certificate sound.
//! * [`solver`] searches for equilibria (exhaustive enumeration, penalty
//!   descent, damped Gauss-Newton polish); success is always certificate
//!   gated, never trace gated.
//! * [`perfect_info`] transforms an equilibrium into an equivalent perfect
//!   information equilibrium over marginal action rules and recovers
//!   equilibria from fixed points of the excess-value update map.
//! * [`format`] reads and writes the `sgia-1` JSON instance format with
//!   byte-stable canonical output.
//! * [`instances`] generates the small reference instances used by tests,
//!   benches and the command line demos.

pub mod beliefs;
pub mod cost;
pub mod dims;
pub mod error;
pub mod format;
pub mod game;
pub mod instances;
pub mod lfpa;
pub mod numeric;
pub mod perfect_info;
pub mod profile;
pub mod signaling;
pub mod solver;
pub mod value;
pub mod verifier;

pub use beliefs::{Beliefs, Posterior};
pub use cost::{CostKind, CostScheme};
pub use dims::Dims;
pub use error::SgiaError;
pub use format::{canonical_json, load_instance, save_instance, FORMAT_VERSION};
pub use game::{BaseGame, History, ValidationReport, Violation};
pub use instances::Instance;
pub use lfpa::AdmissibilityCertificate;
pub use perfect_info::{FixedPointOutcome, PerfectInfoScheme, PiPpme, TauReading, WValues};
pub use profile::StrategyProfile;
pub use signaling::SignalingFamily;
pub use solver::{EnumerationOptions, SolveOutcome, SolverConfig, SolverMode};
pub use value::{MonteCarloReport, ValueTriple};
pub use verifier::{ConstraintReport, VerificationResult};

/// Identifier written into every serialized instance file.
pub const SCHEMA_VERSION: &str = "sgia-1";

/// Identifier written into every serialized report.
pub const REPORT_SCHEMA_VERSION: &str = "sgia-report-1";

/// Numerical tolerances shared across the crate.
///
/// These are part of the external contract: verification verdicts and
/// acceptance tests quote them, so they live in one place and are not
/// configurable per call.
pub mod tol {
    /// Distribution rows must sum to one within this bound.
    pub const SIMPLEX: f64 = 1e-9;
    /// Slack allowed on the equilibrium inequality constraints.
    pub const FEASIBILITY: f64 = 1e-9;
    /// Residual bound for the exact value recursions.
    pub const BELLMAN_RESIDUAL: f64 = 1e-10;
    /// A deviation must improve a value by more than this to count.
    pub const DEVIATION: f64 = 1e-7;
    /// Bound on the scalar objectives `Z` / `Z_gfpa` for equilibrium claims.
    pub const Z_TOL: f64 = 1e-7;
    /// Complementarity products in certificates must vanish within this.
    pub const COMPLEMENTARITY: f64 = 1e-8;
    /// Pivot threshold of the row-reduction rank test.
    pub const RANK_PIVOT: f64 = 1e-10;
    /// Step used by central finite-difference gradient checks.
    pub const FD_STEP: f64 = 1e-6;
    /// Fixed-point residual bound for the excess-value update map.
    pub const FIXED_POINT: f64 = 1e-9;
    /// Allowed gap when comparing history values across the
    /// perfect-information transformation.
    pub const VALUE_EQUIVALENCE: f64 = 1e-6;
}
