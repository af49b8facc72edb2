//! Effective constraints for relativistic particles: a second-order moment
//! algebra, model constraint functions and their closure, deparametrization
//! into reduced dynamics, and a quantum reference engine.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod models;
pub mod numerics;
pub mod oracle;
pub mod reduction;
pub mod scenario;
pub mod verify;

pub use algebra::{
    bracket, evaluate, hbar_grade, AlgebraContext, Canonical, MomentState, Monomial, PolyExpr, Var,
};
pub use dynamics::{
    effective_rhs, integrate, BreakdownPolicy, IntegratorOptions, Method, Trajectory, CSV_HEADER,
};
pub use error::{Error, Result};
pub use models::{
    boost, build_constraints, closure_report, ClosureReport, ConstraintId, ConstraintSet, ModelSpec,
};
pub use num_complex::Complex64;
pub use oracle::{coherent, evolve, observables, FockVector, Observables};
pub use reduction::{
    check_admissible, dirac_determinant, dirac_matrix, energy, energy_expanded, solve_pt_sector,
    solve_quartic_pt, DiracMatrix, ReducedState, Sign, SolvedSector,
};
pub use scenario::{run_scenario, ScenarioConfig};
pub use verify::{run_suite, Report, Suite};

/// Formats a float with 17 significant digits for CSV output.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}
