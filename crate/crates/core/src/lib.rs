//! Solver for the herd-audit game.
//!
//! A developer publishes a differentially private algorithm under a claimed
//! privacy budget `ε′` and may secretly run a larger one. A rationally
//! inattentive auditor with epistemic factor `λ` observes the algorithm's
//! output and reports compliance, paying a mutual-information cost for what
//! it learns. The developer leads, the auditor follows.
//!
//! - [`signal`]: mechanism output distributions, accuracy curve, hypotheses.
//! - [`auditor`]: threshold rule, information strategy, closed-form confidence.
//! - [`developer`]: responsible and irresponsible developer strategies.
//! - [`equilibrium`]: leader enumeration, best-response iteration, sweeps.
//! - [`oracle`]: brute-force and finite-difference checkers.
//! - [`cli`]: configuration files, CSV tables and the command runners.

pub mod auditor;
pub mod cli;
pub mod developer;
pub mod equilibrium;
pub mod error;
pub mod oracle;
pub mod signal;

pub use error::{AuditError, Result};
