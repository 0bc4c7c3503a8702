//! Fixed inputs shared by the benchmarks.

use jlroa::tensor::{contract_all, random_symmetric, OrthoMatrix};
use jlroa::SymTensor;

/// Seeded tensor of the given order and dimension.
pub fn tensor(order: usize, dim: usize) -> SymTensor {
    random_symmetric(order, dim, 0xB3AC_4000 + (order * 100 + dim) as u64)
}

/// A working tensor in a random frame, so pair subproblems are generic.
pub fn working(order: usize, dim: usize) -> SymTensor {
    let q = OrthoMatrix::random(dim, 17);
    contract_all(&tensor(order, dim), &q).expect("square frame")
}
