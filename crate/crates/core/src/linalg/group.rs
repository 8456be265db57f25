use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::qr;
use super::scalar::{Field, Quaternion, Scalar};
use crate::error::{Error, Result};
use crate::tolerance;

/// A square matrix tagged with its scalar field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "field", content = "matrix", rename_all = "lowercase")]
pub enum DenseMatrix {
    Real(Matrix<f64>),
    Complex(Matrix<Complex64>),
    Quaternion(Matrix<Quaternion>),
}

macro_rules! same_field {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $body:expr) => {
        match ($a, $b) {
            (DenseMatrix::Real($x), DenseMatrix::Real($y)) => Ok(DenseMatrix::Real($body?)),
            (DenseMatrix::Complex($x), DenseMatrix::Complex($y)) => Ok(DenseMatrix::Complex($body?)),
            (DenseMatrix::Quaternion($x), DenseMatrix::Quaternion($y)) => {
                Ok(DenseMatrix::Quaternion($body?))
            }
            (a, b) => Err(Error::FieldMismatch {
                left: a.field(),
                right: b.field(),
            }),
        }
    };
}

macro_rules! each_field {
    ($a:expr, |$x:ident| $body:expr) => {
        match $a {
            DenseMatrix::Real($x) => $body,
            DenseMatrix::Complex($x) => $body,
            DenseMatrix::Quaternion($x) => $body,
        }
    };
}

impl DenseMatrix {
    pub fn identity(field: Field, dim: usize) -> Self {
        match field {
            Field::Real => DenseMatrix::Real(Matrix::identity(dim)),
            Field::Complex => DenseMatrix::Complex(Matrix::identity(dim)),
            Field::Quaternion => DenseMatrix::Quaternion(Matrix::identity(dim)),
        }
    }

    pub fn field(&self) -> Field {
        match self {
            DenseMatrix::Real(_) => Field::Real,
            DenseMatrix::Complex(_) => Field::Complex,
            DenseMatrix::Quaternion(_) => Field::Quaternion,
        }
    }

    pub fn dim(&self) -> usize {
        each_field!(self, |m| m.dim())
    }

    pub fn mat_mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        same_field!(self, other, |a, b| a.checked_mul(b))
    }

    pub fn adjoint(&self) -> DenseMatrix {
        match self {
            DenseMatrix::Real(m) => DenseMatrix::Real(m.adjoint()),
            DenseMatrix::Complex(m) => DenseMatrix::Complex(m.adjoint()),
            DenseMatrix::Quaternion(m) => DenseMatrix::Quaternion(m.adjoint()),
        }
    }

    pub fn qr_positive(&self) -> Result<(DenseMatrix, DenseMatrix)> {
        Ok(match self {
            DenseMatrix::Real(m) => {
                let (q, r) = qr::qr_positive(m)?;
                (DenseMatrix::Real(q), DenseMatrix::Real(r))
            }
            DenseMatrix::Complex(m) => {
                let (q, r) = qr::qr_positive(m)?;
                (DenseMatrix::Complex(q), DenseMatrix::Complex(r))
            }
            DenseMatrix::Quaternion(m) => {
                let (q, r) = qr::qr_positive(m)?;
                (DenseMatrix::Quaternion(q), DenseMatrix::Quaternion(r))
            }
        })
    }

    pub fn frobenius_distance(&self, other: &DenseMatrix) -> Result<f64> {
        match (self, other) {
            (DenseMatrix::Real(a), DenseMatrix::Real(b)) => Ok(a.sub(b).frobenius_norm()),
            (DenseMatrix::Complex(a), DenseMatrix::Complex(b)) => Ok(a.sub(b).frobenius_norm()),
            (DenseMatrix::Quaternion(a), DenseMatrix::Quaternion(b)) => Ok(a.sub(b).frobenius_norm()),
            (a, b) => Err(Error::FieldMismatch {
                left: a.field(),
                right: b.field(),
            }),
        }
    }

    pub fn is_finite(&self) -> bool {
        each_field!(self, |m| m.is_finite())
    }

    /// Norm of the (1,1) entry.
    pub fn corner_norm(&self) -> f64 {
        each_field!(self, |m| m[(0, 0)].norm())
    }

    /// Real part of the trace.
    pub fn re_trace(&self) -> f64 {
        each_field!(self, |m| m.trace().re())
    }

    pub fn unitarity_defect(&self) -> f64 {
        each_field!(self, |m| m.unitarity_defect())
    }

    pub fn signature_defect(&self) -> f64 {
        each_field!(self, |m| m.signature_defect())
    }

    /// Determinant for real and complex matrices; `None` for quaternions.
    pub fn det(&self) -> Option<Complex64> {
        match self {
            DenseMatrix::Real(m) => Some(Complex64::new(m.det(), 0.0)),
            DenseMatrix::Complex(m) => Some(m.det()),
            DenseMatrix::Quaternion(_) => None,
        }
    }
}

/// Which group a [`GroupElement`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupTag {
    U,
    SU,
    SO,
    Sp,
    /// SU(1, n) in the (n+1)-dimensional complex representation.
    SUIndefinite,
    /// SO(1, n)° in the (n+1)-dimensional real representation.
    SOIndefinite,
    /// Sp(1, n) in the (n+1)-dimensional quaternionic representation.
    SpIndefinite,
}

impl GroupTag {
    pub fn field(self) -> Field {
        match self {
            GroupTag::U | GroupTag::SU | GroupTag::SUIndefinite => Field::Complex,
            GroupTag::SO | GroupTag::SOIndefinite => Field::Real,
            GroupTag::Sp | GroupTag::SpIndefinite => Field::Quaternion,
        }
    }

    pub fn is_compact(self) -> bool {
        matches!(self, GroupTag::U | GroupTag::SU | GroupTag::SO | GroupTag::Sp)
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupTag::U => "U(n)",
            GroupTag::SU => "SU(n)",
            GroupTag::SO => "SO(n)",
            GroupTag::Sp => "Sp(n)",
            GroupTag::SUIndefinite => "SU(1,n)",
            GroupTag::SOIndefinite => "SO(1,n)",
            GroupTag::SpIndefinite => "Sp(1,n)",
        })
    }
}

/// A matrix together with the group it is claimed to lie in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    matrix: DenseMatrix,
    group: GroupTag,
}

impl GroupElement {
    /// Validates the tag's invariants at the structural tolerance.
    pub fn new(matrix: DenseMatrix, group: GroupTag) -> Result<Self> {
        let g = GroupElement { matrix, group };
        g.check_invariants()?;
        Ok(g)
    }

    pub(crate) fn new_unchecked(matrix: DenseMatrix, group: GroupTag) -> Self {
        GroupElement { matrix, group }
    }

    pub fn identity(group: GroupTag, dim: usize) -> Self {
        GroupElement::new_unchecked(DenseMatrix::identity(group.field(), dim), group)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn group(&self) -> GroupTag {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    /// Group product; both factors must carry the same tag.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.group != other.group {
            return Err(Error::TagMismatch {
                expected: self.group.to_string(),
                actual: other.group.to_string(),
            });
        }
        Ok(GroupElement::new_unchecked(
            self.matrix.mat_mul(&other.matrix)?,
            self.group,
        ))
    }

    pub fn inverse(&self) -> GroupElement {
        let m = if self.group.is_compact() {
            self.matrix.adjoint()
        } else {
            // g^{-1} = J g* J
            let dim = self.dim();
            let j = DenseMatrix::identity(self.matrix.field(), dim);
            let j = match j {
                DenseMatrix::Real(_) => DenseMatrix::Real(super::matrix::signature_form(dim)),
                DenseMatrix::Complex(_) => DenseMatrix::Complex(super::matrix::signature_form(dim)),
                DenseMatrix::Quaternion(_) => {
                    DenseMatrix::Quaternion(super::matrix::signature_form(dim))
                }
            };
            j.mat_mul(&self.matrix.adjoint())
                .and_then(|x| x.mat_mul(&j))
                .expect("same field and dim")
        };
        GroupElement::new_unchecked(m, self.group)
    }

    /// Worst violation of the tag's defining identities.
    pub fn invariant_defect(&self) -> Result<f64> {
        if self.matrix.field() != self.group.field() {
            return Err(Error::FieldMismatch {
                left: self.matrix.field(),
                right: self.group.field(),
            });
        }
        if !self.matrix.is_finite() {
            return Ok(f64::INFINITY);
        }
        let defect = match self.group {
            GroupTag::U | GroupTag::Sp => self.matrix.unitarity_defect(),
            GroupTag::SU | GroupTag::SO => {
                let det = self.matrix.det().expect("commutative field");
                self.matrix
                    .unitarity_defect()
                    .max((det - Complex64::new(1.0, 0.0)).norm())
            }
            GroupTag::SUIndefinite | GroupTag::SOIndefinite | GroupTag::SpIndefinite => {
                self.matrix.signature_defect()
            }
        };
        Ok(defect)
    }

    pub fn check_invariants(&self) -> Result<()> {
        let d = self.invariant_defect()?;
        if d < tolerance::STRUCTURAL {
            Ok(())
        } else {
            Err(Error::config(format!(
                "matrix violates {} invariants (defect {d:e})",
                self.group
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatched_fields_are_rejected() {
        let a = DenseMatrix::identity(Field::Real, 2);
        let b = DenseMatrix::identity(Field::Complex, 2);
        assert!(matches!(a.mat_mul(&b), Err(Error::FieldMismatch { .. })));
        let c = DenseMatrix::identity(Field::Real, 3);
        assert!(matches!(a.mat_mul(&c), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn reflection_is_not_in_so() {
        let m = Matrix::from_rows(vec![-1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(GroupElement::new(DenseMatrix::Real(m.clone()), GroupTag::SO).is_err());
        assert!(GroupElement::new(DenseMatrix::Real(m), GroupTag::SOIndefinite).is_ok());
    }

    #[test]
    fn indefinite_inverse() {
        let (c, s) = (1.3f64.cosh(), 1.3f64.sinh());
        let m = Matrix::from_rows(vec![c, s, s, c]).unwrap();
        let g = GroupElement::new(DenseMatrix::Real(m), GroupTag::SOIndefinite).unwrap();
        let e = g.compose(&g.inverse()).unwrap();
        let d = e
            .matrix()
            .frobenius_distance(&DenseMatrix::identity(Field::Real, 2))
            .unwrap();
        assert!(d < 1e-12);
    }
}
