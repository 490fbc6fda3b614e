//! Complex `(k, l)`-Hessian equations on projective bundles with Calabi
//! symmetry, reduced to a polynomial boundary-value problem in `(x, y)`.
//!
//! * [`symmetric`]: elementary symmetric functions, Gårding cones and the
//!   ansatz eigenvalue vectors.
//! * [`poly`]: the polynomials `G^{m,n,k}`, the constant `mu` and the `F_i`.
//! * [`criteria`]: positivity checks on the zero section and the tower of
//!   subvarieties cut out by the infinity divisor.
//! * [`solver`]: seeding at the zero section, curve continuation, an explicit
//!   RK4 cross-check and an audit of the result.

pub mod cli;
pub mod criteria;
pub mod error;
pub mod format;
pub mod poly;
pub mod selftest;
pub mod solver;
pub mod symmetric;
pub mod univariate;

pub use error::{Error, Result};
