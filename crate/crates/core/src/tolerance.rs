//! Tolerances shared by the library and its tests.

/// Structural group invariants (unitarity, determinant, J-isometry), Frobenius norm.
pub const STRUCTURAL: f64 = 1e-10;

/// Algebraic identities such as associativity or the one-parameter group law.
pub const ALGEBRAIC: f64 = 1e-12;

/// Smallest acceptable |r_kk| in the positive-diagonal QR.
pub const QR_PIVOT: f64 = 1e-12;

/// Default Kolmogorov–Smirnov acceptance threshold at N >= 10^5.
pub const KS_THRESHOLD: f64 = 0.01;

/// Absolute error allowed in the change-of-variables check.
pub const PUSHFORWARD: f64 = 1e-7;
