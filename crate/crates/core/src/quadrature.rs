//! Adaptive Gauss–Kronrod quadrature and cumulative integral tables.

use crate::error::{Error, Result};

// 15-point Kronrod nodes on [0, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 4000;

/// Kronrod estimate and |Kronrod − Gauss| on one interval.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Integrate `f` over `[a, b]` until the error estimate is below
/// `max(abs_tol, rel_tol * |value|)`.
///
/// Always bisects the interval with the largest error, so the subdivision
/// (and the result) depends only on `f`, `a`, `b` and the tolerances.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut value = v;
    let mut error = e;
    while error > abs_tol.max(rel_tol * value.abs()) {
        if !value.is_finite() {
            return Err(Error::Internal(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Internal(format!(
                "quadrature on [{a}, {b}] stalled at error {error:e}"
            )));
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (lo, hi, _, _) = parts[worst];
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval cannot be split further in floating point
            break;
        }
        let left = gk15(&f, lo, mid);
        let right = gk15(&f, mid, hi);
        parts[worst] = (lo, mid, left.0, left.1);
        parts.push((mid, hi, right.0, right.1));
        // resum to avoid drift from repeated subtraction
        value = parts.iter().map(|p| p.2).sum();
        error = parts.iter().map(|p| p.3).sum();
    }
    Ok(Integral { value, error })
}

/// Running integral of a nonnegative function over fixed panels.
///
/// `cum[i]` is the integral from `edges[0]` to `edges[i]`. The integrand is
/// supplied again at lookup time so the table itself stays plain data.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeTable {
    edges: Vec<f64>,
    cum: Vec<f64>,
    tol: f64,
}

impl CumulativeTable {
    pub fn build(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, tol: f64) -> Result<Self> {
        if !(a < b) || panels == 0 {
            return Err(Error::config(format!("empty integration range [{a}, {b}]")));
        }
        let edges: Vec<f64> = (0..=panels)
            .map(|i| {
                if i == panels {
                    b
                } else {
                    a + (b - a) * i as f64 / panels as f64
                }
            })
            .collect();
        let mut cum = Vec::with_capacity(panels + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for w in edges.windows(2) {
            acc += integrate(f, w[0], w[1], tol / panels as f64, tol)?.value;
            cum.push(acc);
        }
        Ok(CumulativeTable { edges, cum, tol })
    }

    pub fn total(&self) -> f64 {
        *self.cum.last().expect("nonempty")
    }

    pub fn lower(&self) -> f64 {
        self.edges[0]
    }

    pub fn upper(&self) -> f64 {
        *self.edges.last().expect("nonempty")
    }

    fn panel_of(&self, x: f64) -> usize {
        let n = self.edges.len() - 1;
        let i = self.edges.partition_point(|&e| e <= x);
        i.saturating_sub(1).min(n - 1)
    }

    /// Integral of `f` from the lower end to `x`, clamped to the range.
    pub fn integral_to(&self, f: &impl Fn(f64) -> f64, x: f64) -> f64 {
        if x <= self.lower() {
            return 0.0;
        }
        if x >= self.upper() {
            return self.total();
        }
        let i = self.panel_of(x);
        let start = self.edges[i];
        let part = integrate(f, start, x, self.tol / (self.edges.len() as f64), self.tol)
            .map(|r| r.value)
            .unwrap_or_else(|_| gk15(f, start, x).0);
        self.cum[i] + part
    }

    /// Smallest `x` with `integral_to(x) >= target`, by bisection to `x_tol`.
    pub fn invert(&self, f: &impl Fn(f64) -> f64, target: f64, x_tol: f64) -> f64 {
        if target <= 0.0 {
            return self.lower();
        }
        if target >= self.total() {
            return self.upper();
        }
        let i = self.cum.partition_point(|&c| c < target).clamp(1, self.cum.len() - 1);
        let (mut lo, mut hi) = (self.edges[i - 1], self.edges[i]);
        while hi - lo > x_tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.integral_to(f, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `∫_0^x sin^a(s) cos^b(s) ds` by a binomial series in `sin x` for
/// `x < 1`, otherwise by the standard reduction formulas.
///
/// Independent of [`integrate`]; used as a test oracle.
pub fn sin_cos_power_integral(a: u32, b: u32, x: f64) -> f64 {
    if (0.0..1.0).contains(&x) && a > 0 {
        return sin_cos_power_series(a, b, x);
    }
    let (s, c) = x.sin_cos();
    match (a, b) {
        (0, 0) => x,
        (1, 0) => 1.0 - c,
        (0, 1) => s,
        (1, 1) => 0.5 * s * s,
        _ if a >= 2 => {
            // ∫ s^a c^b = -s^{a-1} c^{b+1}/(a+b) + (a-1)/(a+b) ∫ s^{a-2} c^b
            let (af, bf) = (a as f64, b as f64);
            -s.powi(a as i32 - 1) * c.powi(b as i32 + 1) / (af + bf)
                + (af - 1.0) / (af + bf) * sin_cos_power_integral(a - 2, b, x)
        }
        _ => {
            // ∫ s^a c^b = s^{a+1} c^{b-1}/(a+b) + (b-1)/(a+b) ∫ s^a c^{b-2}
            let (af, bf) = (a as f64, b as f64);
            s.powi(a as i32 + 1) * c.powi(b as i32 - 1) / (af + bf)
                + (bf - 1.0) / (af + bf) * sin_cos_power_integral(a, b - 2, x)
        }
    }
}

// With y = sin s the integral is ∫_0^{sin x} y^a (1 - y^2)^{(b-1)/2} dy;
// expand the second factor binomially. The reduction formulas cancel badly
// when x is small and a is large, this series does not.
fn sin_cos_power_series(a: u32, b: u32, x: f64) -> f64 {
    let y = x.sin();
    let y2 = y * y;
    let beta = (b as f64 - 1.0) / 2.0;
    let mut coef = 1.0;
    let mut pow = y.powi(a as i32 + 1);
    let mut sum = 0.0;
    for k in 0..2000 {
        let term = coef * pow / (a as f64 + 2.0 * k as f64 + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        coef *= -(beta - k as f64) / (k as f64 + 1.0);
        pow *= y2;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_low_degree_polynomials() {
        // Kronrod rule is exact to degree 22 at least; Gauss to degree 13
        for d in 0..=13 {
            let (k, e) = gk15(&|x: f64| x.powi(d), 0.0, 1.0);
            let exact = 1.0 / (d as f64 + 1.0);
            assert!((k - exact).abs() < 1e-15, "degree {d}");
            assert!(e < 1e-14, "degree {d}");
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let r = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 1e-12).unwrap();
        let exact = 2.0 * 100.0 * (100.0f64).atan();
        assert!((r.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn reduction_formula_matches_quadrature() {
        for (a, b) in [(0, 0), (3, 0), (4, 1), (7, 2), (2, 3), (10, 4)] {
            let x = 1.1;
            let q = integrate(|s: f64| s.sin().powi(a) * s.cos().powi(b), 0.0, x, 1e-15, 1e-14)
                .unwrap()
                .value;
            let r = sin_cos_power_integral(a as u32, b as u32, x);
            assert!((q - r).abs() < 1e-13, "({a},{b}): {q} vs {r}");
        }
        assert!((sin_cos_power_integral(2, 0, PI) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn cumulative_table_and_inverse() {
        let f = |x: f64| x.sin();
        let t = CumulativeTable::build(&f, 0.0, PI, 32, 1e-13).unwrap();
        assert!((t.total() - 2.0).abs() < 1e-13);
        for x in [0.1, 0.77, 1.5, 3.0] {
            assert!((t.integral_to(&f, x) - (1.0 - x.cos())).abs() < 1e-13);
            let back = t.invert(&f, 1.0 - x.cos(), 1e-13);
            assert!((back - x).abs() < 1e-11, "{x}: {back}");
        }
        assert_eq!(t.integral_to(&f, -1.0), 0.0);
        assert_eq!(t.integral_to(&f, 4.0), t.total());
    }
}
