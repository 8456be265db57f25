use super::group::{DenseMatrix, GroupElement};
use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::pairs::{Curvature, Family, PairDescriptor};

/// Closed-form `exp(tH)` for the pair's radial generator.
///
/// The generator couples the first two basis vectors. Compact pairs get the
/// rotation block `[[cos t, sin t], [-sin t, cos t]]`, noncompact pairs the
/// boost block `[[cosh t, sinh t], [sinh t, cosh t]]`; the rest is identity.
pub fn exp_radial(pair: &PairDescriptor, t: f64) -> GroupElement {
    let dim = pair.group_dim();
    let (c, s, s_low) = match pair.curvature() {
        Curvature::Compact => (t.cos(), t.sin(), -t.sin()),
        Curvature::Noncompact => (t.cosh(), t.sinh(), t.sinh()),
    };
    let matrix = match pair.family() {
        Family::Orthogonal => DenseMatrix::Real(block(dim, c, s, s_low)),
        Family::Unitary => DenseMatrix::Complex(block(dim, c, s, s_low)),
        Family::Symplectic => DenseMatrix::Quaternion(block(dim, c, s, s_low)),
    };
    GroupElement::new_unchecked(matrix, pair.group_tag())
}

fn block<S: Scalar>(dim: usize, c: f64, s_up: f64, s_low: f64) -> Matrix<S> {
    let mut m = Matrix::identity(dim);
    m[(0, 0)] = S::from_real(c);
    m[(1, 1)] = S::from_real(c);
    m[(0, 1)] = S::from_real(s_up);
    m[(1, 0)] = S::from_real(s_low);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::Mode;
    use crate::tolerance;

    fn all_pairs(n: u32) -> Vec<PairDescriptor> {
        let mut v = Vec::new();
        for family in [Family::Unitary, Family::Orthogonal, Family::Symplectic] {
            for curvature in [Curvature::Compact, Curvature::Noncompact] {
                v.push(PairDescriptor::new(family, curvature, n, Mode::Standard).unwrap());
            }
        }
        v
    }

    #[test]
    fn zero_is_identity() {
        for p in all_pairs(3) {
            let g = exp_radial(&p, 0.0);
            let id = GroupElement::identity(p.group_tag(), p.group_dim());
            assert!(g.matrix().frobenius_distance(id.matrix()).unwrap() == 0.0);
        }
    }

    #[test]
    fn corner_entry_is_cos_or_cosh() {
        for p in all_pairs(4) {
            let g = exp_radial(&p, 0.8);
            let expected = match p.curvature() {
                Curvature::Compact => 0.8f64.cos(),
                Curvature::Noncompact => 0.8f64.cosh(),
            };
            assert!((g.matrix().corner_norm() - expected.abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn results_satisfy_group_invariants() {
        for p in all_pairs(3) {
            for t in [0.1, 0.9, 1.7, 2.5] {
                exp_radial(&p, t).check_invariants().unwrap();
            }
        }
    }

    #[test]
    fn one_parameter_group_law() {
        for p in all_pairs(2) {
            let lhs = exp_radial(&p, 0.4).compose(&exp_radial(&p, 0.9)).unwrap();
            let rhs = exp_radial(&p, 1.3);
            let d = lhs.matrix().frobenius_distance(rhs.matrix()).unwrap();
            assert!(d < tolerance::ALGEBRAIC, "{d}");
        }
    }
}
