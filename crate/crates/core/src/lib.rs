//! Exact classification, synthesis, and verification of entire solutions to
//! the product-type gradient equation `u_{z1} u_{z2} ... u_{zn} = e^g` for a
//! polynomial `g` over the Gaussian rationals, together with the matrix
//! variant `prod_i (row_i A . grad u) = e^g` for invertible `A`.
//!
//! The pipeline is: parse `g`, split it into independent variable blocks via
//! the mixed-partial interaction graph, detect ridge structure of each block,
//! synthesize closed-form solution terms with exact root gauges, and verify
//! the result both symbolically (zero tolerance) and numerically (seeded
//! residual sampling).

pub mod cli;
pub mod error;
pub mod expr;
pub mod multipoly;
pub mod parser;
pub mod reduce;
pub mod report;
pub mod scalar;
pub mod structure;
pub mod synthesize;
pub mod verify;

pub use error::{Error, Result};
pub use expr::ExprNode;
pub use multipoly::{LinearForm, MultiPoly};
pub use scalar::{ComplexF, GaussianRational, Precision, RootScalar};
