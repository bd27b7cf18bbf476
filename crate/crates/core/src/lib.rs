//! Exact trigonometric R matrices, L operators and Drinfeld currents for
//! quantum affine algebras in their vector representations.

pub mod drinfeld;
pub mod error;
pub mod evalrep;
pub mod linalg;
pub mod lops;
pub mod matseries;
pub mod qadm;
pub mod qfield;
pub mod report;
pub mod rootdata;
pub mod rsolver;

pub use error::{Error, Result};
