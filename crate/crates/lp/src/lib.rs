//! A small dense linear programming toolkit.
//!
//! Problems are stated as
//!
//! ```text
//! min / max  c'x
//! s.t.       A_i x  (<= | = | >=)  b_i     for every row i
//!            l <= x <= u
//! ```
//!
//! and solved with a two-phase, bounded-variable primal simplex on a dense
//! tableau. Nonbasic variables sit at either bound, so finite upper bounds
//! never become explicit rows. Pricing is Dantzig's rule until the solver
//! detects a run of degenerate pivots, after which it switches to Bland's rule
//! for the rest of the solve, which guarantees termination.
//!
//! The problem sizes this crate targets are a few hundred rows and columns;
//! there is no sparse factorization.

mod problem;
mod simplex;
mod verify;

pub use problem::{Direction, LpError, LpProblem, Sense};
pub use simplex::{solve, LpSolution, LpStatus, SolveOptions};
pub use verify::{verify, ResidualReport};
