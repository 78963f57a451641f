//! Coefficient modules `E_{n,n}` over `K` and over residue fields of `O`.

mod field;
pub mod linalg;
mod module;

pub use field::{
    good_primes, is_prime, pow_mod, splitting, Field, FieldError, FieldKind, Fp, Fp2, KField,
    Splitting,
};
pub use linalg::Matrix;
pub use module::{
    action_matrix, close_group, dimension, fixed_space, group_sum, index, invariants,
    substitution_matrix, torus_cohomology, unipotent_invariants, Invariants, ModuleError, Weight,
};
