//! Densities of the radial coordinate of a product of two spherical classes.
//!
//! For classes at radial parameters `t1`, `t2` the radial coordinate of the
//! product is `u = a1 - a2 cos s`, with `s` distributed on `[0, q0_end]`
//! proportionally to the (K, M) Jacobian. Substituting gives the kernel
//! `(a2^2 - (u - a1)^2)^p (a1 - u)^w`. All integration happens in `s`, where
//! the kernel is `sin^{2p+1} s cos^w s` and has no endpoint singularity.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::haar::RngStream;
use crate::pairs::{self, Curvature, Family, Mode, PairDescriptor, PairKind};
use crate::quadrature::{self, CumulativeTable};

const PANELS: usize = 64;
const TABLE_TOL: f64 = 1e-13;
const INVERSE_TOL: f64 = 1e-12;

/// Angular form of the kernel, scaled so its values stay near 1.
#[derive(Debug, Clone, Copy, PartialEq)]
struct AngularKernel {
    sin_power: f64,
    cos_power: u32,
    inv_scale: f64,
}

impl AngularKernel {
    fn eval(&self, s: f64) -> f64 {
        let (sn, cs) = s.sin_cos();
        let base = if self.sin_power == 0.0 {
            1.0
        } else {
            (sn * self.inv_scale).powf(self.sin_power)
        };
        base * cs.powi(self.cos_power as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// One of the classes is K itself; the product stays in the other class.
    Point,
    Continuous {
        kernel: AngularKernel,
        table: CumulativeTable,
    },
}

/// Analytic density of the radial coordinate of a product of two classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductDensity {
    pub pair: PairDescriptor,
    pub t1: f64,
    pub t2: f64,
    pub a1: f64,
    pub a2: f64,
    pub kernel_exponent: f64,
    pub weight_power: u32,
    /// Set when the kernel exponent was supplied instead of derived.
    pub kernel_exponent_override: Option<f64>,
    pub support: (f64, f64),
    pub normalizer: f64,
    pub ln_normalizer: f64,
    pub degenerate: bool,
    #[serde(skip)]
    shape: Shape,
}

/// Products of `cos`/`cosh` and `sin`/`sinh` of the two radial parameters.
pub fn product_coefficients(curvature: Curvature, t1: f64, t2: f64) -> (f64, f64) {
    match curvature {
        Curvature::Compact => (t1.cos() * t2.cos(), t1.sin() * t2.sin()),
        Curvature::Noncompact => (t1.cosh() * t2.cosh(), t1.sinh() * t2.sinh()),
    }
}

/// Below this `a2` the product is treated as a point mass.
const DEGENERATE_A2: f64 = 1e-14;

/// Support `[a1 - a2, a1 - a2 cos(q0_end)]` of the product density.
///
/// This is the image of `[0, q0_end]` under `s -> a1 - a2 cos s`.
pub fn support_interval(pair: &PairDescriptor, t1: f64, t2: f64) -> Result<(f64, f64)> {
    let q0 = pair.require_q0()?;
    pair.check_radial("t1", t1)?;
    pair.check_radial("t2", t2)?;
    let (a1, a2) = product_coefficients(pair.curvature, t1, t2);
    if a2 < DEGENERATE_A2 {
        return Ok((a1, a1));
    }
    Ok((a1 - a2, a1 - a2 * q0.cos()))
}

fn pow_ln(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e * x.ln()
    }
}

impl ProductDensity {
    pub fn new(pair: &PairDescriptor, t1: f64, t2: f64) -> Result<Self> {
        Self::with_kernel_exponent(pair, t1, t2, None)
    }

    /// Like [`new`](Self::new) but with the kernel exponent `p` replaced.
    pub fn with_kernel_exponent(
        pair: &PairDescriptor,
        t1: f64,
        t2: f64,
        exponent: Option<f64>,
    ) -> Result<Self> {
        let support = support_interval(pair, t1, t2)?;
        let q0 = pair.q0_end;
        let (a, b) = pair.delta0_exponents()?;
        let derived = (a as f64 + b as f64 - 1.0) / 2.0;
        let p = exponent.unwrap_or(derived);
        if !(p > -1.0) || !p.is_finite() {
            return Err(Error::config(format!(
                "kernel exponent {p} is not integrable (needs p > -1)"
            )));
        }
        let w = b;
        let (a1, a2) = product_coefficients(pair.curvature, t1, t2);
        let mut d = ProductDensity {
            pair: pair.clone(),
            t1,
            t2,
            a1,
            a2,
            kernel_exponent: p,
            weight_power: w,
            kernel_exponent_override: exponent,
            support,
            normalizer: 1.0,
            ln_normalizer: 0.0,
            degenerate: true,
            shape: Shape::Point,
        };
        if a2 < DEGENERATE_A2 {
            return Ok(d);
        }
        let scale = q0.min(FRAC_PI_2).sin();
        let kernel = AngularKernel {
            sin_power: 2.0 * p + 1.0,
            cos_power: w,
            inv_scale: 1.0 / scale,
        };
        let f = |s: f64| kernel.eval(s);
        let table = CumulativeTable::build(&f, 0.0, q0, PANELS, TABLE_TOL)?;
        let total = table.total();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Internal(format!(
                "density normalizer integral is {total}"
            )));
        }
        // Z = a2^{2p+w+1} * scale^{2p+1} * ∫ kernel
        let ln_z = (2.0 * p + w as f64 + 1.0) * a2.ln() + (2.0 * p + 1.0) * scale.ln() + total.ln();
        d.ln_normalizer = ln_z;
        d.normalizer = ln_z.exp();
        d.degenerate = false;
        d.shape = Shape::Continuous { kernel, table };
        Ok(d)
    }

    pub fn lo(&self) -> f64 {
        self.support.0
    }

    pub fn hi(&self) -> f64 {
        self.support.1
    }

    /// Density at `u`; zero outside the support and for a point mass.
    pub fn pdf(&self, u: f64) -> f64 {
        if self.degenerate || u < self.lo() || u > self.hi() {
            return 0.0;
        }
        // a2^2 - (u - a1)^2 factored to keep precision near both ends
        let quad = (u - (self.a1 - self.a2)) * ((self.a1 + self.a2) - u);
        let lin = self.a1 - u;
        let ln = pow_ln(quad.max(0.0), self.kernel_exponent)
            + pow_ln(lin.abs(), self.weight_power as f64)
            - self.ln_normalizer;
        let v = ln.exp();
        if self.weight_power % 2 == 1 && lin < 0.0 {
            // only reachable through rounding at hi = a1
            0.0
        } else {
            v
        }
    }

    fn angle_of(&self, u: f64) -> f64 {
        ((self.a1 - u) / self.a2).clamp(-1.0, 1.0).acos()
    }

    /// P(U <= u).
    pub fn cdf(&self, u: f64) -> f64 {
        match &self.shape {
            Shape::Point => {
                if u >= self.a1 {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::Continuous { kernel, table } => {
                if u <= self.lo() {
                    return 0.0;
                }
                if u >= self.hi() {
                    return 1.0;
                }
                let f = |s: f64| kernel.eval(s);
                (table.integral_to(&f, self.angle_of(u)) / table.total()).clamp(0.0, 1.0)
            }
        }
    }

    /// P(U < u); differs from [`cdf`](Self::cdf) only for a point mass.
    pub fn cdf_left(&self, u: f64) -> f64 {
        match self.shape {
            Shape::Point => {
                if u > self.a1 {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::Continuous { .. } => self.cdf(u),
        }
    }

    /// Smallest `u` with `cdf(u) >= q`, to within 1e-12 in `u`.
    pub fn inverse_cdf(&self, q: f64) -> Result<f64> {
        pairs::check_in("q", q, 0.0, 1.0)?;
        Ok(match &self.shape {
            Shape::Point => self.a1,
            Shape::Continuous { kernel, table } => {
                let f = |s: f64| kernel.eval(s);
                // du = a2 sin s ds <= a2 ds
                let s_tol = INVERSE_TOL / self.a2.max(1.0);
                let s = table.invert(&f, q * table.total(), s_tol);
                (self.a1 - self.a2 * s.cos()).clamp(self.lo(), self.hi())
            }
        })
    }

    /// One inverse-CDF draw.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let q = rng.uniform();
        self.inverse_cdf(q).expect("uniform draw lies in [0, 1]")
    }

    /// Whether the sampled coordinate is `|u|` while the support reaches below 0.
    pub fn needs_folding(&self) -> bool {
        self.pair.curvature == Curvature::Compact
            && self.pair.family != Family::Orthogonal
            && self.lo() < 0.0
    }

    /// Density of `|U|` at `v >= 0`.
    pub fn pdf_folded(&self, v: f64) -> f64 {
        if v < 0.0 {
            return 0.0;
        }
        if v == 0.0 {
            return self.pdf(0.0);
        }
        self.pdf(v) + self.pdf(-v)
    }

    /// P(|U| <= v).
    pub fn cdf_folded(&self, v: f64) -> f64 {
        if v < 0.0 {
            return 0.0;
        }
        (self.cdf(v) - self.cdf_left(-v)).clamp(0.0, 1.0)
    }

    /// P(|U| < v).
    pub fn cdf_folded_left(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        match self.shape {
            Shape::Point => {
                if self.a1.abs() < v {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::Continuous { .. } => self.cdf_folded(v),
        }
    }

    /// Probability of `[x - eps, x + eps]`.
    pub fn mass_near(&self, x: f64, eps: f64) -> f64 {
        (self.cdf(x + eps) - self.cdf_left(x - eps)).clamp(0.0, 1.0)
    }

    /// `(u, pdf(u))` at the midpoints of `points` equal cells of the support.
    pub fn grid(&self, points: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.support;
        let h = (hi - lo) / points as f64;
        (0..points)
            .map(|i| {
                let u = lo + (i as f64 + 0.5) * h;
                (u, self.pdf(u))
            })
            .collect()
    }
}

/// Push the normalized (K, M) Jacobian through `s -> a1 - a2 cos s` and
/// compare with [`ProductDensity::pdf`] at `grid` interior points.
///
/// Returns the largest absolute difference.
pub fn pushforward_check(pair: &PairDescriptor, t1: f64, t2: f64, grid: usize) -> Result<f64> {
    if grid == 0 {
        return Err(Error::config("grid must be positive"));
    }
    let d = ProductDensity::new(pair, t1, t2)?;
    if d.degenerate {
        return Err(Error::config("zero-length support: one class is trivial"));
    }
    let q0 = pair.q0_end;
    let jac = |s: f64| pairs::delta0(pair, s.min(q0)).unwrap_or(0.0);
    let z0 = quadrature::integrate(jac, 0.0, q0, 0.0, 1e-14)?.value;
    let (lo, hi) = d.support;
    let mut worst = 0.0f64;
    for i in 0..grid {
        let u = lo + (hi - lo) * (i as f64 + 0.5) / grid as f64;
        let s = ((d.a1 - u) / d.a2).clamp(-1.0, 1.0).acos();
        let pushed = jac(s) / z0 / (d.a2 * s.sin());
        worst = worst.max((pushed - d.pdf(u)).abs());
    }
    Ok(worst)
}

/// One row of [`concentration_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub n: u32,
    /// Mass within `eps` of the lower support end `a1 - a2`
    /// (`cos(t1 + t2)` compact, `cosh(t1 - t2)` noncompact).
    pub mass_near_edge: f64,
    /// Mass within `eps` of `a1`.
    pub mass_near_a1: f64,
}

/// Mass of the product density near the two candidate large-n limits.
pub fn concentration_scan(
    kind: PairKind,
    mode: Mode,
    t1: f64,
    t2: f64,
    n_list: &[u32],
    eps: f64,
) -> Result<Vec<ConcentrationRow>> {
    if !(eps > 0.0) {
        return Err(Error::config("eps must be positive"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("n_list must be strictly ascending"));
    }
    n_list
        .iter()
        .map(|&n| {
            let pair = PairDescriptor::from_kind(kind, n, mode)?;
            let d = ProductDensity::new(&pair, t1, t2)?;
            Ok(ConcentrationRow {
                n,
                mass_near_edge: d.mass_near(d.a1 - d.a2, eps),
                mass_near_a1: d.mass_near(d.a1, eps),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::sin_cos_power_integral;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn pair(s: &str, n: u32, mode: Mode) -> PairDescriptor {
        PairDescriptor::from_kind(s.parse().unwrap(), n, mode).unwrap()
    }

    #[test]
    fn support_examples() {
        let p = pair("su-compact", 4, Mode::Paper);
        let (lo, hi) = support_interval(&p, FRAC_PI_4, FRAC_PI_4).unwrap();
        assert!(lo.abs() < 1e-15);
        assert!((hi - 0.146_446_609_406_726_24).abs() < 1e-15);
        let o = pair("so-compact", 4, Mode::Standard);
        let (lo, hi) = support_interval(&o, 0.3, 0.5).unwrap();
        assert!((lo - 0.8f64.cos()).abs() < 1e-15);
        assert!((hi - 0.2f64.cos()).abs() < 1e-15);
        let (lo, hi) = support_interval(&p, 0.6, 0.0).unwrap();
        assert_eq!((lo, hi), (0.6f64.cos(), 0.6f64.cos()));
        let nc = pair("su-noncompact", 4, Mode::Paper);
        let (lo, _) = support_interval(&nc, 0.7, 0.2).unwrap();
        assert!((lo - 0.5f64.cosh()).abs() < 1e-14);
        assert!(support_interval(&pair("su-compact", 2, Mode::Paper), 0.3, 0.3).is_err());
    }

    #[test]
    fn derived_kernel_exponents() {
        let cases = [
            ("su-compact", Mode::Paper, 5, 3.0, 1),
            ("so-compact", Mode::Paper, 5, 1.0, 0),
            ("sp-compact", Mode::Paper, 5, 12.5, 2),
            ("sp-compact", Mode::Standard, 5, 7.0, 3),
            ("so-noncompact", Mode::Standard, 6, 1.5, 0),
        ];
        for (name, mode, n, p, w) in cases {
            let d = ProductDensity::new(&pair(name, n, mode), 0.4, 0.5).unwrap();
            assert_eq!((d.kernel_exponent, d.weight_power), (p, w), "{name}");
        }
    }

    #[test]
    fn normalizer_closed_forms() {
        for n in [4u32, 6, 10] {
            for (t1, t2) in [(0.3, 0.7), (0.7, 0.7)] {
                let u = ProductDensity::new(&pair("su-compact", n, Mode::Paper), t1, t2).unwrap();
                let q0 = u.pair.q0_end;
                let k = 2.0 * n as f64 - 2.0;
                let ln_closed = k * u.a2.ln() + k * q0.sin().ln() - k.ln();
                assert!((u.ln_normalizer - ln_closed).abs() < 1e-9, "su n={n}");

                let o = ProductDensity::new(&pair("so-compact", n, Mode::Paper), t1, t2).unwrap();
                let q0 = o.pair.q0_end;
                let closed = o.a2.powi(n as i32 - 2) * sin_cos_power_integral(n - 2, 0, q0);
                assert!((o.normalizer / closed - 1.0).abs() < 1e-9, "so n={n}");

                let s = ProductDensity::new(&pair("sp-compact", n, Mode::Paper), t1, t2).unwrap();
                let q0 = s.pair.q0_end;
                let ln_closed = (8.0 * n as f64 - 12.0) * s.a2.ln()
                    + sin_cos_power_integral(8 * n - 14, 2, q0).ln();
                assert!((s.ln_normalizer - ln_closed).abs() < 1e-9, "sp n={n}");
            }
        }
    }

    #[test]
    fn cdf_endpoints_and_round_trip() {
        for (name, mode, n) in [
            ("su-compact", Mode::Paper, 4),
            ("so-compact", Mode::Standard, 5),
            ("sp-noncompact", Mode::Paper, 3),
            ("su-compact", Mode::Standard, 6),
        ] {
            let d = ProductDensity::new(&pair(name, n, mode), 0.5, 0.9).unwrap();
            assert_eq!(d.cdf(d.lo()), 0.0);
            assert_eq!(d.cdf(d.hi()), 1.0);
            let med = d.inverse_cdf(0.5).unwrap();
            assert!(d.lo() < med && med < d.hi());
            let mut worst = 0.0f64;
            for i in 0..100 {
                let q = (i as f64 + 0.5) / 100.0;
                worst = worst.max((d.cdf(d.inverse_cdf(q).unwrap()) - q).abs());
            }
            assert!(worst < 1e-8, "{name}: {worst}");
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        let d = ProductDensity::new(&pair("so-compact", 7, Mode::Standard), 0.4, 1.1).unwrap();
        let r = quadrature::integrate(|u| d.pdf(u), d.lo(), d.hi(), 1e-12, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        assert_eq!(d.pdf(d.lo() - 1e-3), 0.0);
        assert_eq!(d.pdf(d.hi() + 1e-3), 0.0);
    }

    #[test]
    fn symmetric_in_the_two_classes() {
        let p = pair("sp-compact", 4, Mode::Standard);
        let a = ProductDensity::new(&p, 0.3, 0.8).unwrap();
        let b = ProductDensity::new(&p, 0.8, 0.3).unwrap();
        assert!((a.ln_normalizer - b.ln_normalizer).abs() < 1e-12);
        for u in [0.2, 0.4, 0.6] {
            assert!((a.pdf(u) - b.pdf(u)).abs() < 1e-10 * a.pdf(u).max(1.0));
        }
    }

    #[test]
    fn point_mass_when_a_class_is_trivial() {
        let d = ProductDensity::new(&pair("su-compact", 4, Mode::Paper), 0.6, 0.0).unwrap();
        assert!(d.degenerate);
        let mut rng = RngStream::new(1, 0);
        for _ in 0..10 {
            assert_eq!(d.sample(&mut rng), 0.6f64.cos());
        }
        assert_eq!(d.cdf(d.a1), 1.0);
        assert_eq!(d.cdf_left(d.a1), 0.0);
        assert!(pushforward_check(&d.pair, 0.6, 0.0, 10).is_err());
    }

    #[test]
    fn pushforward_matches_kernel() {
        let err = pushforward_check(&pair("su-compact", 5, Mode::Paper), 0.6, 0.6, 200).unwrap();
        assert!(err < 1e-7, "{err}");
        let err = pushforward_check(&pair("so-compact", 6, Mode::Paper), 0.4, 0.9, 200).unwrap();
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn exponent_override() {
        let p = pair("so-compact", 6, Mode::Paper);
        let d = ProductDensity::with_kernel_exponent(&p, 0.5, 0.5, Some(1.0)).unwrap();
        assert_eq!(d.kernel_exponent_override, Some(1.0));
        let r = quadrature::integrate(|u| d.pdf(u), d.lo(), d.hi(), 1e-12, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        let p3 = pair("so-compact", 2, Mode::Standard);
        assert!(ProductDensity::with_kernel_exponent(&p3, 0.5, 0.5, Some(-1.0)).is_err());
    }

    #[test]
    fn folding_preserves_mass() {
        let d = ProductDensity::new(&pair("su-compact", 6, Mode::Standard), 1.2, 1.0).unwrap();
        assert!(d.needs_folding());
        assert_eq!(d.cdf_folded(-0.1), 0.0);
        assert!((d.cdf_folded(d.hi().max(-d.lo()) + 0.1) - 1.0).abs() < 1e-15);
        let r = quadrature::integrate(|v| d.pdf_folded(v), 0.0, 1.0, 1e-12, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn large_exponents_do_not_underflow() {
        let d = ProductDensity::new(&pair("sp-compact", 64, Mode::Paper), 0.5, 0.5).unwrap();
        assert!(d.ln_normalizer.is_finite());
        let mid = d.inverse_cdf(0.5).unwrap();
        assert!(d.pdf(mid) > 0.0 && d.pdf(mid).is_finite());
        assert!(PI > d.pair.q0_end);
    }

    #[test]
    fn scan_shapes() {
        let kind: PairKind = "su-compact".parse().unwrap();
        let rows = concentration_scan(kind, Mode::Paper, 0.5, 0.5, &[4, 8, 16, 64], 0.05).unwrap();
        assert!(rows.windows(2).all(|w| w[1].mass_near_edge >= w[0].mass_near_edge));
        assert!(rows.last().unwrap().mass_near_edge > 0.99);
        let rows = concentration_scan(kind, Mode::Paper, 0.5, 0.0, &[4, 8], 0.05).unwrap();
        assert!(rows.iter().all(|r| r.mass_near_a1 == 1.0 && r.mass_near_edge == 1.0));
        assert!(concentration_scan(kind, Mode::Paper, 0.5, 0.5, &[8, 4], 0.05).is_err());
    }
}
