//! Water-hydrogen two-phase flow in porous media with persistent variables
//! `(p_l, X)`: liquid pressure and total hydrogen density.

pub mod coefficients;
pub mod constitutive;
pub mod discretization;
pub mod error;
pub mod scenario;
pub mod solver;
pub mod statevars;

pub use error::{Error, Result};
