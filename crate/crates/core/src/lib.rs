//! Exact computations for Bianchi groups `SL_2(O_{-m})`: fundamental polyhedra
//! via Swan's algorithm, the cell complex of the action on hyperbolic 3-space
//! and the cohomology of the group with coefficients in `E_{n,n}`.

pub mod arith;
pub mod cellcomplex;
pub mod coefficients;
pub mod cohomology;
pub mod geometry;
pub mod report;
pub mod swan;
