//! Exact minimization of the interval-shortfall objective
//! `f(v) = Σ_{k<=l} max(x - (v_k + ... + v_l), 0)` that governs the variance of
//! externalities in an LCFS-PR M/G/1 queue.
//!
//! - [`model`]: instances, service vectors, `f` and the externality moments.
//! - [`combinatorial`]: closed-form optimum over vectors of `m` masses `x`
//!   plus one remainder `r`.
//! - [`continuous`]: equidistant and duo-equidistant optima over all
//!   nonnegative vectors of mass `w`.
//! - [`oracle`]: exhaustive, lattice and subgradient ground truth, and the
//!   harness that checks the duo construction against them.

pub mod combinatorial;
pub mod continuous;
pub mod error;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod report;

pub use combinatorial::{solve_combinatorial, DeltaCertificate, GapProfile};
pub use continuous::{solve_continuous, DuoSolution, Regime, TauPair};
pub use error::{Error, Result};
pub use model::{eval_f, Instance, QueueParams, ServiceVector};
pub use rational::{format_rational, parse_rational, Rational};
pub use report::{Domain, SolveReport, Status};
