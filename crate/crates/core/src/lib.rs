//! Certified solver for scalar initial value problems
//! `x'(t) = f(t, x)`, `x(t0) = x0` on `[t0, t0 + a]`.
//!
//! The solver builds Euler polygons on the dyadic grids `t0 + a k / 2^m`.
//! Given a bound `M` on `|f|` and a 1-norm Lipschitz constant `L` over the
//! rectangle `[t0, t0 + a] x [x0 - M a, x0 + M a]`, these polygons converge
//! uniformly, and the a-priori constant
//! `C = a (M + 1) (e^(aL) (1 + aL) - 1) / 4` bounds every level-`m` value's
//! distance to the exact solution by `C / 2^(m-1)`.
//!
//! ```
//! use dyadic_ivp::{choose_level, Problem, Solution};
//!
//! let p = Problem::new(|_t: f64, x: f64| x, 0.0, 1.0, 0.5, 2.0, 1.0).unwrap();
//! let m = choose_level(&p, 2e-3).unwrap();
//! let s = Solution::build(&p, m).unwrap();
//! let e = s.evaluate(0.5).unwrap();
//! assert!((e.value - 0.5f64.exp()).abs() <= e.bound);
//! ```

pub mod dyadic;
pub mod error;
pub mod euler_grid;
pub mod expr;
pub mod problem;
pub mod report;
pub mod rk4;
pub mod solution;

pub use dyadic::{nearest_at_level, DyadicPoint, MAX_LEVEL};
pub use error::{Error, Result};
pub use euler_grid::{
    bound_constants, build_grid, build_grid_unchecked, build_grid_with_limits, containment_check,
    refinement_report, tail_bound, BoundModel, ContainmentReport, ConvergenceReport, EulerGrid,
    GridLimits,
};
pub use expr::{parse, Expr};
pub use problem::{
    rect_of, validate_problem, Problem, ProblemFile, Rect, Rhs, ValidationReport,
    DEFAULT_VALIDATION_RESOLUTION,
};
pub use solution::{choose_level, cross_check, CrossCheck, Evaluation, SampleRow, Solution};
