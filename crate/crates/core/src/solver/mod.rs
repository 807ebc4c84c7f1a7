//! Implicit time stepping: Newton on the discrete residual, direct linear
//! solves, adaptive steps.

mod linear;
mod newton;
mod run;

pub use linear::{banded_solve, linear_solve, LinearSolver, LinearSolverKind, SparseMatrix, SOLVE_RTOL};
pub use newton::{
    cell_coloring, fd_jacobian, newton_solve, residual_scaling, scaled_norm, NewtonOptions, NewtonReport,
    NewtonSolver,
};
pub use run::{
    run_simulation, MassBalance, RunOutput, RunSummary, SeriesPoint, SimulationOptions, Snapshot,
    TimeStepControl, GAS_APPEARANCE_SG, STATIONARITY_RATE,
};
