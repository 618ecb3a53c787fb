pub mod exact;
pub mod polyhedra;
pub mod rap;
pub mod tropfan;
pub mod acomplex;
pub mod invariants;
pub mod classify;
pub mod cli;
