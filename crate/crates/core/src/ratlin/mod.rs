//! Exact rational and integer linear algebra, plus derivation and validation
//! of the system data (`A` from `B`, `alpha` from `gamma0`).

pub mod hnf;
pub mod matrix;
pub mod system;

pub use hnf::{
    hermite_normal_form, int_rank, lattice_basis, lattice_contains, lattice_equal,
    saturated_integer_kernel, unimodular_with_last_row, Hnf,
};
pub use matrix::{
    dot_rat, dot_rat_int, format_rational, parse_rational, primitive_direction, rational_vec,
    IntMatrix, RatMatrix, Rational,
};
pub use system::{build_system, SystemData};
