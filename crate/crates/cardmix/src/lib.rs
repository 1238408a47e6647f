//! Card-shuffling Markov chains with interaction events and the stopping
//! rules they support, verified exactly at small deck sizes and measured
//! by Monte Carlo at moderate ones.
//!
//! The crate has three layers:
//!
//! * exact combinatorics on the symmetric group ([`perm`], [`factor`]);
//! * shuffling processes — pile-based "wash" models and classical random
//!   walks — with per-step interaction-event detectors, fairness and
//!   symmetry checkers, and exact transition enumeration ([`process`]);
//! * the stopping-time and path-mutation machinery built on those events:
//!   all-pairs and sequential rules, injective path relabeling maps,
//!   exact mixing distances, and scaling experiments ([`stopping`],
//!   [`mutate`], [`mixing`], [`experiments`]).
//!
//! Start with the `examples/` directory: each example is a runnable tour
//! of one capability. The `cardmix` binary exposes the same functionality
//! as subcommands for scripted, seeded experiment runs.

pub mod error;
pub mod exact;
pub mod experiments;
pub mod factor;
pub mod manifest;
pub mod mixing;
pub mod mutate;
pub mod perm;
pub mod process;
pub mod seeding;
pub mod stopping;
pub mod suite;

pub use error::{Error, Result};
pub use perm::{Label, Permutation, Transposition};
