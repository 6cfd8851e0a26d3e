//! Exact linear programming at desk scale.

pub mod recourse;
pub mod simplex;

pub use recourse::{
    solve_optimal_recourse, solve_recourse_steps, verify_weak_duality, OfflineSolution, TimeStep, DEFAULT_SIZE_CAP,
    OPTIMALITY_TOL,
};
pub use simplex::{LinearProgram, LpSolution, Sense};
