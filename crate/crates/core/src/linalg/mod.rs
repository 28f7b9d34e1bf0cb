//! Exact scalar and matrix arithmetic over `k` and over the dual numbers.

pub mod dual;
pub mod field;
pub mod matrix;

pub use dual::DualScalar;
pub use field::{Field, FieldElem};
pub use matrix::{
    dual_unit_pivot_reduce, nullspace, rank, rref, solve_affine, AffineSolution, DualMatrix,
    FieldMatrix, Matrix, Ring, UnitPivotReduction,
};
