//! Small numerical kernels: forward-mode derivatives, polynomial roots,
//! Gauss–Hermite quadrature and explicit Runge–Kutta integrators.

mod dual;
mod ode;
mod quadrature;
mod roots;

pub use dual::Dual;
pub use ode::{rk4_step, Rk45, StepOutcome};
pub use quadrature::{gauss_hermite, gaussian_expectation, GaussHermite};
pub use roots::polynomial_roots;
