//! Exact solvers for delegated decision problems.
//!
//! A provider owns a set of costly actions, each inducing a distribution over
//! outcomes. A user with a private type (a reward vector over outcomes) picks
//! one item from a menu of outcome-contingent payment schemes, or opts out.
//! This crate computes provider-optimal menus exactly over arbitrary-precision
//! rationals: deterministic menus of bounded size via vertex enumeration,
//! brute-force reference optima, robustified menus that survive reward
//! estimation error, discretized menus for continuous action spaces, and
//! randomized menus via linear programming.

// The LP and tableau builders walk several parallel index spaces (types,
// actions, outcomes, columns) at once; plain index loops are the clearest
// form there.
#![allow(clippy::needless_range_loop)]

pub mod continuous;
pub mod error;
pub mod floors;
pub mod generators;
pub mod instance;
pub mod oracle;
pub mod pricing;
pub mod randomized;
pub mod rational;
pub mod robust;
pub mod solvers;

pub use continuous::{solve_continuous, ContinuousActionFamily, ContinuousReport, DiscretizedProgram};
pub use error::Error;
pub use floors::FloorTable;
pub use instance::{DelegationInstance, DeterministicMenu, MenuKind, PaymentScheme};
pub use oracle::{brute_force_opt_k, verify_menu, OracleResult, OracleWitness, VerifyMenuReport};
pub use pricing::{PricingItem, PricingSolution, SelectionEntry, SolveOptions, SolveReport};
pub use randomized::{
    recover_menu, regularize, solve_randomized_lp, verify_randomized, RandVerifyReport,
    RandomizedMenu, RelaxedSolution,
};
pub use rational::Rat;
pub use robust::{
    robustify, true_response_value, verify_approx, ApproxICReport, RobustifyOutput,
    RobustnessParams,
};

/// Convenience result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
