//! Cross-verified computation of the quartic correlation term for
//! symmetric point-vortex configurations of the Ginzburg-Landau free
//! energy.
//!
//! Three independent routes compute the same quantity: closed-form
//! algebra over the unit roots ([`algebra`]), radial series and contour
//! residues ([`series`], [`residue`]), and a principal-value quadrature
//! oracle over the plane ([`quadrature`]). The [`report`] module runs the
//! whole identity suite and renders it in machine- and human-readable
//! forms.

pub mod algebra;
pub mod config;
pub mod error;
pub mod integrand;
pub mod landscape;
pub mod numerics;
pub mod quadrature;
pub mod report;
pub mod residue;
pub mod series;

pub use error::{Error, Result};
