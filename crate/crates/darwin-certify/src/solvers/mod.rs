//! Shared optimization machinery: a dense simplex LP core, exact matrix-game
//! solutions built on it, and the certified maximin eigenvalue engine.

pub mod game;
pub mod lp;
pub mod saddle;

pub use game::{solve_zero_sum, GameSolution};
pub use lp::{solve_lp, LpError, LpSolution};
pub use saddle::{maximin_state, minimax_state, SaddleOptions, SaddleResult};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("operator family is empty")]
    EmptyOperatorFamily,
    #[error("operators have mixed dimensions")]
    MixedDimensions,
    #[error("master linear program failed: {source}")]
    MasterLp {
        #[source]
        source: LpError,
    },
}
