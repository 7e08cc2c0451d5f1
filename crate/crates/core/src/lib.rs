//! Numerical spectral toolkit for the Schrödinger operator on [0,1] with
//! translated arguments in the free term,
//!
//! ```text
//! (H y)(x) = −y″(x) + V(x)·y(x+α) + Q(x)·y(x−β),   y′(0) = y′(1) = 0,
//! ```
//!
//! where y is continued by zero outside the segment. Eigenvalues λ = z² are
//! computed four independent ways and cross-validated:
//!
//! * shooting — Newton refinement of the characteristic roots of
//!   φ′(1, z) = −z sin z + (L φ)(1, z), with winding-number certificates;
//! * series — the convergent coefficient recurrence in inverse powers of πn;
//! * asymptotics — explicit two- and four-term expansions;
//! * Galerkin — a dense finite section in the Neumann cosine basis.

pub mod asymptotics;
pub mod cauchy;
pub mod diagnostics;
pub mod error;
pub mod galerkin;
pub mod grid;
pub mod jet;
pub mod nonlocal;
pub mod potential;
pub mod roots;
pub mod series;

pub use error::{Error, Result};
pub use grid::{integrate, make_grid, Grid, GridFunction};
pub use jet::TaylorJet;
pub use nonlocal::OperatorContext;
pub use potential::Potential;
pub use roots::{EigenvalueRecord, Method, RootBox};

/// Default quadrature resolution for the breakpoint-aware grid.
pub const DEFAULT_RESOLUTION: usize = 4096;
