//! Bandit data-driven optimization: synthetic linear environments, online
//! least squares learners, optimism-in-face-of-uncertainty bandit state,
//! the optimization subproblem solvers, the policies that tie them
//! together, and a reproducible multi-replication experiment harness.
//!
//! The setting: each round a decision maker receives `n` feature vectors
//! `x` and must pick, for each, an intervention `w` from a feasible set
//! (the unit l2-ball or a finite set). The realized cost is
//! `c' w + mu' w + eta`, where the label `c` depends linearly on `x` and is
//! revealed after acting, while `mu` is a fixed unknown vector observable
//! only through the noisy total. Good play therefore needs both prediction
//! (learn the feature-to-label map from accumulated data) and bandit
//! exploration (pin down `mu` from realized costs).
//!
//! Implemented policies:
//!
//! - [`policy::PolicyKind::Proof`]: per-round least squares prediction
//!   combined with a confidence-ball lower bound on the bandit cost; the
//!   action optimizes the optimistic total.
//! - [`policy::PolicyKind::ProofExploreFinite`] and
//!   [`policy::PolicyKind::ProofExploreContinuous`]: a uniform-exploration
//!   phase followed by exploitation, for environments where the label law
//!   depends on the action.
//! - [`policy::PolicyKind::VanillaOfu`]: the linear-bandit baseline that
//!   ignores features entirely.
//! - [`policy::PolicyKind::PtoOnly`]: pure predict-then-optimize with no
//!   bandit term.
//!
//! The [`harness`] module runs named presets (or JSON configs) over many
//! replications with paired environment draws, writes per-round trace CSVs
//! plus an aggregate CSV and a manifest, and [`plot`] renders the regret
//! curves. Everything is deterministic given the master seed.
//!
//! # Example
//!
//! ```
//! use banditdo::harness::{preset, run_experiment};
//!
//! let mut cfg = preset("fig4a").unwrap();
//! cfg.t_rounds = 5;
//! cfg.replications = 2;
//! cfg.output_dir = Some(std::env::temp_dir().join("banditdo-doc-example"));
//! let outcome = run_experiment(&cfg).unwrap();
//! assert_eq!(outcome.aggregate.policies().len(), 2);
//! ```

pub mod env;
mod error;
pub mod harness;
pub mod learner;
pub mod ofu;
pub mod plot;
pub mod policy;
pub mod seed;
pub mod solver;
pub mod trace;

pub use error::{Error, Result};
