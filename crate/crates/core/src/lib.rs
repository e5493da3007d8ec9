//! Exact computation in the free-field vertex superalgebras `V_N`, `Λ_N` and
//! `Ω_N = V_N ⊗ Λ_N`, together with the chiral de Rham structure built on them.

pub mod coeffs;
pub mod linalg;
pub mod states;
pub mod engine;
pub mod report;
pub mod cdr;
pub mod coord;
pub mod sheaf;
pub mod liecocycle;
