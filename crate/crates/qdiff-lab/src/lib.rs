//! Numerics for graded marked surfaces and q-quadratic differentials.
//!
//! The combinatorial side (`surface`, `quiver`) turns a full formal arc system
//! into numerical data and a graded Ginzburg algebra. The analytic side
//! (`hurwitz`, `flatgeo`, `winding`, `periods`) works with rational covers of
//! the sphere and the differentials built from them. `cuts` and `qstab` tie
//! the two together.

pub mod corpus;
pub mod cuts;
pub mod flatgeo;
pub mod hurwitz;
pub mod ode;
pub mod periods;
pub mod poly;
pub mod qstab;
pub mod quad;
pub mod quiver;
pub mod suites;
pub mod surface;
pub mod winding;

pub use num_complex::Complex64 as C64;
