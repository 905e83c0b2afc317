//! Explicit finite-difference solver for `u_t = D u_xx + f(u)` on the real
//! line, with checks of the a-priori estimates and of the weak formulation.

pub mod cli;
pub mod config;
pub mod error;
pub mod estimates;
pub mod grid;
pub mod harness;
pub mod initial;
pub mod oracle;
pub mod reactions;
pub mod scheme;
pub mod sum;
pub mod testfn;
pub mod weak;

pub use error::{Error, Result};
pub use grid::{make_grid, GridSpec};
pub use initial::InitialData;
pub use reactions::{make_builtin, ReactionTerm};
pub use scheme::{solve, solve_region, Field, FieldRegion, ProblemSpec};
pub use testfn::BumpTestFunction;
