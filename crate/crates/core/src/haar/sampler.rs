use num_complex::Complex64;
use serde::Serialize;

use super::rng::{par_collect, RngStream};
use crate::error::{Error, Result};
use crate::linalg::{exp_radial, qr_positive, DenseMatrix, GroupElement, GroupTag, Matrix, Quaternion, Scalar};
use crate::pairs::{self, Curvature, Family, PairDescriptor, SphericalClass};
use crate::quadrature::CumulativeTable;
use crate::stats;

/// Scalars with a standard Gaussian (unit expected `|z|^2`).
trait GaussianScalar: Scalar {
    fn gaussian(rng: &mut RngStream) -> Self;
}

impl GaussianScalar for f64 {
    fn gaussian(rng: &mut RngStream) -> Self {
        rng.gaussian()
    }
}

impl GaussianScalar for Complex64 {
    fn gaussian(rng: &mut RngStream) -> Self {
        let re = rng.gaussian();
        let im = rng.gaussian();
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

impl GaussianScalar for Quaternion {
    fn gaussian(rng: &mut RngStream) -> Self {
        let (w, x, y, z) = (rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian());
        Quaternion::new(w, x, y, z).scale(0.5)
    }
}

/// Haar draw from the full unitary group over `S`: U(n), O(n) or Sp(n).
///
/// A Gaussian matrix is left-invariant in law under the group, and the
/// positive-diagonal QR factor is unique, so `q` inherits the invariance.
fn haar_full<S: GaussianScalar>(dim: usize, rng: &mut RngStream) -> Matrix<S> {
    loop {
        let a = Matrix::from_fn(dim, |_, _| S::gaussian(rng));
        // singular Gaussian matrices have probability zero; redraw if hit
        if let Ok((q, _)) = qr_positive(&a) {
            return q;
        }
    }
}

fn haar_u(dim: usize, rng: &mut RngStream) -> Matrix<Complex64> {
    haar_full(dim, rng)
}

/// Haar SU(n): a Haar U(n) draw times diag(det^-1, 1, ..., 1).
///
/// det is invariant under left multiplication by SU(n), so the correction
/// commutes with the left SU(n) action and the law stays invariant.
fn haar_su(dim: usize, rng: &mut RngStream) -> Matrix<Complex64> {
    let mut q = haar_u(dim, rng);
    let d = q.det();
    q.scale_column_right(0, (d / d.norm()).conj());
    q
}

/// Haar SO(n): Haar O(n) with the first column negated when det = -1.
///
/// Negating a column commutes with left multiplication by SO(n).
fn haar_so(dim: usize, rng: &mut RngStream) -> Matrix<f64> {
    let mut q: Matrix<f64> = haar_full(dim, rng);
    if q.det() < 0.0 {
        q.scale_column_right(0, -1.0);
    }
    q
}

fn haar_sp(dim: usize, rng: &mut RngStream) -> Matrix<Quaternion> {
    haar_full(dim, rng)
}

/// Uniform point on the unit 3-sphere, i.e. Haar Sp(1).
pub fn unit_quaternion(rng: &mut RngStream) -> Quaternion {
    loop {
        let q = Quaternion::gaussian(rng);
        let r = q.norm();
        if r > 0.0 {
            return q.scale(1.0 / r);
        }
    }
}

/// Haar-distributed element of a compact group of size `n`.
pub fn haar_group(group: GroupTag, n: usize, rng: &mut RngStream) -> Result<GroupElement> {
    let min = match group {
        GroupTag::SU | GroupTag::SO => 2,
        _ => 1,
    };
    if n < min {
        return Err(Error::config(format!("{group} needs n >= {min}, got {n}")));
    }
    let m = match group {
        GroupTag::U => DenseMatrix::Complex(haar_u(n, rng)),
        GroupTag::SU => DenseMatrix::Complex(haar_su(n, rng)),
        GroupTag::SO => DenseMatrix::Real(haar_so(n, rng)),
        GroupTag::Sp => DenseMatrix::Quaternion(haar_sp(n, rng)),
        _ => {
            return Err(Error::config(format!(
                "{group} is noncompact; Haar sampling needs a compact group"
            )))
        }
    };
    Ok(GroupElement::new_unchecked(m, group))
}

/// Haar-distributed element of the pair's K, embedded block-diagonally in G.
///
/// Unitary family: `diag(det(B)^-1, B)` with B Haar U(n), which is the
/// image of Haar U(n) under the isomorphism onto S(U(1) x U(n)).
/// Orthogonal: `diag(1, B)`, B Haar SO(n). Symplectic: `diag(q, B)`.
pub fn haar_k(pair: &PairDescriptor, rng: &mut RngStream) -> GroupElement {
    let n = pair.n as usize;
    let m = match pair.family {
        Family::Unitary => {
            let b = haar_u(n, rng);
            let d = b.det();
            DenseMatrix::Complex(Matrix::block_diag((d / d.norm()).conj(), &b))
        }
        Family::Orthogonal => {
            let b = if n == 1 { Matrix::identity(1) } else { haar_so(n, rng) };
            DenseMatrix::Real(Matrix::block_diag(1.0, &b))
        }
        Family::Symplectic => {
            let q = unit_quaternion(rng);
            DenseMatrix::Quaternion(Matrix::block_diag(q, &haar_sp(n, rng)))
        }
    };
    GroupElement::new_unchecked(m, pair.group_tag())
}

/// `k1 exp(tH) k2` with independent Haar-K factors: a uniform draw from
/// the double coset of the class.
pub fn orbit_sample(cls: &SphericalClass, rng: &mut RngStream) -> GroupElement {
    let pair = cls.pair();
    let k1 = haar_k(pair, rng);
    let k2 = haar_k(pair, rng);
    k1.compose(&exp_radial(pair, cls.t()))
        .and_then(|g| g.compose(&k2))
        .expect("same tag and dimension")
}

/// Normalized distribution of the radial parameter with density ∝ delta.
#[derive(Debug, Clone)]
pub struct RadialLaw {
    pair: PairDescriptor,
    table: CumulativeTable,
}

impl RadialLaw {
    pub fn new(pair: &PairDescriptor) -> Result<Self> {
        if pair.curvature != Curvature::Compact {
            return Err(Error::config("radial law needs a compact pair"));
        }
        let (lo, hi) = pair.radial_range();
        let p = pair.clone();
        let f = move |s: f64| pairs::delta(&p, s.clamp(lo, hi)).unwrap_or(0.0);
        let table = CumulativeTable::build(&f, lo, hi, 64, 1e-13)?;
        Ok(RadialLaw {
            pair: pair.clone(),
            table,
        })
    }

    pub fn cdf(&self, s: f64) -> f64 {
        let (lo, hi) = self.pair.radial_range();
        let p = &self.pair;
        let f = |x: f64| pairs::delta(p, x.clamp(lo, hi)).unwrap_or(0.0);
        self.table.integral_to(&f, s) / self.table.total()
    }
}

/// Result of [`radial_density_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialCheck {
    pub pair: PairDescriptor,
    pub samples: usize,
    pub ks: f64,
}

/// KS distance between the radial parameter of Haar draws on G and the
/// law with density ∝ delta on the radial range.
///
/// G is the pair's compact group, of dimension `pair.n + 1`.
pub fn radial_density_check(
    pair: &PairDescriptor,
    samples: usize,
    rng: &RngStream,
) -> Result<RadialCheck> {
    let law = RadialLaw::new(pair)?;
    let tag = pair.group_tag();
    let dim = pair.group_dim();
    let family = pair.family;
    let values = par_collect(rng, samples, |r| {
        let g = haar_group(tag, dim, r).expect("compact tag, valid size");
        pairs::corner_value(family, g.matrix()).clamp(-1.0, 1.0).acos()
    });
    let ks = stats::ks_distance(&values, |s| law.cdf(s))?;
    Ok(RadialCheck {
        pair: pair.clone(),
        samples,
        ks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::Mode;
    use crate::tolerance;

    fn pair(s: &str, n: u32) -> PairDescriptor {
        PairDescriptor::from_kind(s.parse().unwrap(), n, Mode::Standard).unwrap()
    }

    #[test]
    fn samples_satisfy_invariants() {
        let mut rng = RngStream::new(3, 0);
        for (tag, n) in [(GroupTag::U, 4), (GroupTag::SU, 5), (GroupTag::SO, 5), (GroupTag::Sp, 3)] {
            for _ in 0..50 {
                let g = haar_group(tag, n, &mut rng).unwrap();
                assert!(g.invariant_defect().unwrap() < tolerance::STRUCTURAL, "{tag}");
            }
        }
        assert!(haar_group(GroupTag::SO, 1, &mut rng).is_err());
        assert!(haar_group(GroupTag::SUIndefinite, 3, &mut rng).is_err());
    }

    #[test]
    fn k_draws_have_block_structure() {
        let mut rng = RngStream::new(4, 0);
        for name in ["su-compact", "so-noncompact", "sp-compact", "su-noncompact"] {
            let p = pair(name, 3);
            for _ in 0..20 {
                let k = haar_k(&p, &mut rng);
                k.check_invariants().unwrap();
                let m = k.matrix();
                if let DenseMatrix::Complex(c) = m {
                    assert!((c.det() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
                }
                assert!((m.corner_norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orbit_radial_coordinate_is_constant() {
        let mut rng = RngStream::new(5, 0);
        for name in ["su-compact", "so-compact", "sp-compact", "su-noncompact", "sp-noncompact"] {
            let p = pair(name, 3);
            let cls = SphericalClass::new(p.clone(), 0.7).unwrap();
            let expected = if p.is_compact() { 0.7f64.cos() } else { 0.7f64.cosh() };
            for _ in 0..200 {
                let g = orbit_sample(&cls, &mut rng);
                assert!(g.invariant_defect().unwrap() < tolerance::STRUCTURAL);
                let u = pairs::radial_u(&p, &g).unwrap();
                assert!((u - expected).abs() < 1e-10, "{name}: {u}");
            }
        }
    }

    #[test]
    fn u1_phase_has_zero_mean() {
        let mut rng = RngStream::new(6, 0);
        let n = 100_000;
        let mut s = Complex64::new(0.0, 0.0);
        for _ in 0..n {
            if let DenseMatrix::Complex(m) = haar_group(GroupTag::U, 1, &mut rng).unwrap().into_matrix() {
                s += m[(0, 0)];
            }
        }
        assert!((s / n as f64).norm() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn k_phase_is_uniform() {
        // arg of B11 for B Haar U(3) is uniform
        let p = pair("su-compact", 3);
        let rng = RngStream::new(8, 0);
        let angles = par_collect(&rng, 100_000, |r| match haar_k(&p, r).into_matrix() {
            DenseMatrix::Complex(m) => m[(1, 1)].arg(),
            _ => unreachable!(),
        });
        let ks = stats::ks_distance(&angles, |a| ((a + std::f64::consts::PI) / std::f64::consts::TAU).clamp(0.0, 1.0)).unwrap();
        assert!(ks < 0.01, "{ks}");
    }

    #[test]
    fn left_translation_preserves_radial_law() {
        let p = pair("su-compact", 2);
        let mut r0 = RngStream::new(9, 0);
        let v = haar_group(GroupTag::SU, 3, &mut r0).unwrap();
        let rng = RngStream::new(9, 1);
        let plain = par_collect(&rng, 100_000, |r| {
            let g = haar_group(GroupTag::SU, 3, r).unwrap();
            pairs::radial_u(&p, &g).unwrap()
        });
        let rng = RngStream::new(9, 2);
        let moved = par_collect(&rng, 100_000, |r| {
            let g = v.compose(&haar_group(GroupTag::SU, 3, r).unwrap()).unwrap();
            pairs::radial_u(&p, &g).unwrap()
        });
        let mut sorted = plain.clone();
        sorted.sort_by(f64::total_cmp);
        let ecdf = |x: f64| sorted.partition_point(|&y| y <= x) as f64 / sorted.len() as f64;
        let ks = stats::ks_distance(&moved, ecdf).unwrap();
        assert!(ks < 0.01, "{ks}");
    }

    #[test]
    fn radial_law_adjudicates_exponents() {
        let rng = RngStream::new(10, 0);
        let so4 = pair("so-compact", 3);
        let good = radial_density_check(&so4, 50_000, &rng).unwrap();
        assert!(good.ks < 0.01, "{}", good.ks);
        let wrong = so4.clone().with_multiplicities(1, 0);
        let bad = radial_density_check(&wrong, 50_000, &rng).unwrap();
        assert!(bad.ks > 0.05, "{}", bad.ks);
    }
}
