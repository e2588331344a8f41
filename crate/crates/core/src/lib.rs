//! Exact computer algebra for cyclotomic Bethe equations.
//!
//! Layers, bottom to top:
//! - [`exactalg`]: cyclotomic scalars, quasi-polynomials, Wronskians and the
//!   first-order Wronskian ODE solver.
//! - [`cartan`]: Cartan data, shifted Weyl action, diagram automorphisms and folding.
//! - [`frame`]: problem instances, frame polynomials, exact criticality tests,
//!   weight bookkeeping and Gaudin eigenvalues.
//! - [`genengine`]: elementary and cyclotomic generation, population exploration.
//! - [`typea`]: spaces of quasi-polynomials in type A, bilinear form, Witt bases, flags.
//! - [`numerics`]: floating-point cross-checks of residuals and gradients.
//! - [`io`]: JSON documents for instances, tuples and catalogs.

pub mod cartan;
pub mod exactalg;
pub mod frame;
pub mod genengine;
pub mod io;
pub mod numerics;
pub mod typea;

pub use exactalg::{CycScalar, QuasiPoly};
