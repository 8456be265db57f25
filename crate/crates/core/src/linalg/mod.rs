//! Dense matrices over real, complex and quaternion scalars.

mod group;
mod matrix;
mod qr;
mod radial;
mod scalar;

pub use group::{DenseMatrix, GroupElement, GroupTag};
pub use matrix::{approx_eq, is_unitary, Matrix};
pub use qr::qr_positive;
pub use radial::exp_radial;
pub use scalar::{CommutativeScalar, Field, Quaternion, Scalar};
