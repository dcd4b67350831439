//! Symbolic exploitation of entropy inequalities for one-dimensional continua
//! whose constitutive functions depend on spatial gradients.

pub mod balance;
pub mod checker;
pub mod expr;
pub mod fdb;
pub mod jet;
pub mod liu;
pub mod matrix;
pub mod model;
pub mod models;
pub mod modelfile;
pub mod report;
