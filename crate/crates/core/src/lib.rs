//! Explicit solutions of the natural equations of minimal space-like
//! surfaces in Minkowski space ℝ⁴₁.
//!
//! A pair of holomorphic functions (in one of several equivalent forms)
//! determines a complex field α with `K = |α| Re α`, `κ = |α| Im α`. The crate
//! parses such pairs, evaluates α and the curvatures on grids, checks the
//! natural equations by finite differences, builds the surface through its
//! Weierstrass representation and applies the fractional-linear symmetry.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`.
//!
//! ```
//! use spacelike::{alpha_field, curvatures, Generator, Grid, Rep};
//!
//! let g = Generator::parse(Rep::G, "z", "z").unwrap();
//! let grid = Grid::square(-1.0, 1.0, 21).unwrap();
//! let c = curvatures(&alpha_field(&g, &grid, 1e-9));
//! assert_eq!(c.k[grid.centre()], Some(-16.0));
//! ```
// `!(x > tol)` is used on purpose so that NaN falls on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod grid;
pub mod holoexpr;
pub mod moebius;
pub mod pdeverify;
pub mod representations;
pub mod scalar;
pub mod weierstrass;

pub use curvature::{alpha_field, curvature_of, curvatures, AlphaEvaluator, AlphaField, CurvatureField};
pub use grid::{AdmissibilityMask, GridSpec, Reason, ScalarField};
pub use holoexpr::{EvalFlag, HoloExpr, ParseError};
pub use moebius::{same_solution, transform, Evidence, MoebiusError, MoebiusParams};
pub use pdeverify::{log_polar, residual_complex, residual_system1, residual_system_xy, LogPolarField, ResidualReport};
pub use representations::{Generator, PairG, PairH, PairSpec, PairW, PairXi, Rep, RepError, DEFAULT_TOL};
pub use scalar::{Cx, Real};
pub use weierstrass::{phi_frame, PhiFrame, SurfaceMesh};

pub type Complex64 = num_complex::Complex<f64>;
pub type Expr = HoloExpr<f64>;
pub type Grid = GridSpec<f64>;
pub type Mask = AdmissibilityMask<f64>;
pub type Alpha = AlphaField<f64>;
pub type Curvatures = CurvatureField<f64>;
pub type Pair = Generator<f64>;
pub type Params = MoebiusParams<f64>;
pub type Frame = PhiFrame<f64>;
pub type Mesh = SurfaceMesh<f64>;
