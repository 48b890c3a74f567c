//! Equilibrium semantics for IF logic over finite structures.

pub mod apps;
pub mod formula;
pub mod game;
pub mod matrix;
pub mod rational;
pub mod structure;
pub mod value;
