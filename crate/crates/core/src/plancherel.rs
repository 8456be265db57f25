//! Spherical representations of SU(n) for K = S(U(1) x U(n-1)), their
//! spherical functions, and the Plancherel sum measuring distance to Haar.

use std::f64::consts::FRAC_PI_2;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairs::check_in;

/// Largest degree evaluated by the exact terminating sum in [`phi`].
pub const DIRECT_MAX_M: u64 = 50;

/// Hard cap on the summation index of [`cn`].
pub const CN_CAP: u64 = 100_000;

/// Hard cap on the mixing length searched by [`l_star`].
pub const L_CAP: u64 = 10_000;

fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// Dimension of the m-th spherical representation of SU(n):
/// `((m+n-2)!)^2 (2m+n-1) / ((m!)^2 (n-2)! (n-1)!)`, exactly.
pub fn weyl_dim(m: u64, n: u64) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::config(format!("weyl_dim needs n >= 2, got {n}")));
    }
    let top = factorial(m + n - 2);
    let num = &top * &top * BigUint::from(2 * m + n - 1);
    let mf = factorial(m);
    let den = &mf * &mf * factorial(n - 2) * factorial(n - 1);
    let q = &num / &den;
    if &q * &den != num {
        return Err(Error::Internal(format!(
            "dimension formula is not integral at m = {m}, n = {n}"
        )));
    }
    Ok(q)
}

/// The m-th spherical representation of SU(n) with its exact dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphericalRep {
    pub m: u64,
    pub n: u64,
    #[serde(with = "biguint_string")]
    pub dim: BigUint,
}

impl SphericalRep {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        Ok(SphericalRep { m, n, dim: weyl_dim(m, n)? })
    }
}

mod biguint_string {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| D::Error::custom("not an integer"))
    }
}

fn check_phi_args(n: u64, t: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::config("spherical function needs n >= 1"));
    }
    check_in("t", t, 0.0, FRAC_PI_2)
}

/// `F(m+n, -m; n; sin^2 t)`, the terminating hypergeometric sum.
///
/// Exact for `m <= DIRECT_MAX_M` (rational arithmetic on the f64 value of
/// `sin^2 t`, rounded once at the end); the Jacobi recurrence beyond.
pub fn phi(m: u64, n: u64, t: f64) -> Result<f64> {
    if m <= DIRECT_MAX_M {
        phi_direct(m, n, t)
    } else {
        phi_recurrence(m, n, t)
    }
}

/// Terminating sum `Σ_k (m+n)_k (-m)_k / ((n)_k k!) z^k` in exact rationals.
///
/// The alternating terms cancel by many orders of magnitude once `m` is a
/// few dozen, which rules out floating-point summation here.
pub fn phi_direct(m: u64, n: u64, t: f64) -> Result<f64> {
    check_phi_args(n, t)?;
    let z = BigRational::from_float(sin_sq(t)).expect("finite");
    let mut coef = BigRational::one();
    let mut zk = BigRational::one();
    let mut sum = BigRational::zero();
    for k in 0..=m {
        sum += &coef * &zk;
        let num = BigInt::from(m + n + k) * (BigInt::from(k) - BigInt::from(m));
        let den = BigInt::from(n + k) * BigInt::from(k + 1);
        coef *= BigRational::new(num, den);
        zk *= &z;
    }
    sum.to_f64()
        .ok_or_else(|| Error::Internal("spherical sum not representable".into()))
}

fn sin_sq(t: f64) -> f64 {
    let s = t.sin();
    s * s
}

/// Same value as [`phi_direct`] by the three-term recurrence in `m`.
pub fn phi_recurrence(m: u64, n: u64, t: f64) -> Result<f64> {
    check_phi_args(n, t)?;
    Ok(jacobi_normalized(m, n as f64 - 1.0, 1.0 - 2.0 * sin_sq(t)))
}

/// Spherical function of degree `m` on SU(n) for K = S(U(1) x U(n-1)).
///
/// The (n+1)-dimensional formula [`phi`] at size `n - 1`.
pub fn su_spherical(m: u64, n: u32, t: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::config(format!("SU(n) needs n >= 2, got {n}")));
    }
    phi(m, n as u64 - 1, t)
}

/// `P_m^{(alpha, 0)}(x) / P_m^{(alpha, 0)}(1)` by forward recurrence.
pub fn jacobi_normalized(m: u64, alpha: f64, x: f64) -> f64 {
    let mut it = JacobiIter::new(alpha, x);
    let mut v = it.next().expect("infinite");
    for _ in 0..m {
        v = it.next().expect("infinite");
    }
    v
}

/// Successive normalized Jacobi values `R_0, R_1, ...` with `beta = 0`.
#[derive(Debug, Clone)]
struct JacobiIter {
    alpha: f64,
    x: f64,
    m: u64,
    prev: f64,
    cur: f64,
}

impl JacobiIter {
    fn new(alpha: f64, x: f64) -> Self {
        JacobiIter {
            alpha,
            x,
            m: 0,
            prev: f64::NAN,
            cur: 1.0,
        }
    }
}

impl Iterator for JacobiIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let a = self.alpha;
        let next = if self.m == 0 {
            1.0 + (a + 2.0) * (self.x - 1.0) / (2.0 * (a + 1.0))
        } else {
            // P_{m+1} = (A x + B) P_m - C P_{m-1}, rescaled by P_k(1) = (a+1)_k / k!
            let m = self.m as f64;
            let s = 2.0 * m + a;
            let denom = 2.0 * (m + 1.0) * (m + a + 1.0) * s;
            let ca = (s + 1.0) * (s + 2.0) * s / denom;
            let cb = a * a * (s + 1.0) / denom;
            let cc = 2.0 * (m + a) * m * (s + 2.0) / denom;
            let up = (m + 1.0) / (m + a + 1.0);
            let down = m * (m + 1.0) / ((m + a) * (m + a + 1.0));
            (ca * self.x + cb) * self.cur * up - cc * self.prev * down
        };
        self.prev = self.cur;
        self.cur = next;
        self.m += 1;
        Some(out)
    }
}

/// Value of the Plancherel sum at one mixing length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlancherelSum {
    pub n: u32,
    pub t1: f64,
    pub t2: f64,
    pub l: u64,
    pub value: f64,
    pub truncation_m: u64,
    pub tail_bound: f64,
}

/// Cached `ln d(m, n)` and `ln |phi_m(t1) phi_m(t2)|` for m >= 1.
#[derive(Debug, Clone)]
struct Series {
    n: u32,
    t1: f64,
    t2: f64,
    ln_dim: Vec<f64>,
    ln_prod: Vec<f64>,
    it1: JacobiIter,
    it2: JacobiIter,
}

const TAIL_BLOCK: usize = 16;
const TAIL_WINDOW: usize = 4;

enum Outcome {
    Done(PlancherelSum),
    Exceeded,
}

impl Series {
    fn new(n: u32, t1: f64, t2: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::config(format!("SU(n) needs n >= 2, got {n}")));
        }
        for (what, t) in [("t1", t1), ("t2", t2)] {
            if !(t > 0.0 && t < FRAC_PI_2) {
                return Err(Error::OutOfRange { what, value: t, lo: 0.0, hi: FRAC_PI_2 });
            }
        }
        let alpha = n as f64 - 2.0;
        let mut it1 = JacobiIter::new(alpha, 1.0 - 2.0 * sin_sq(t1));
        let mut it2 = JacobiIter::new(alpha, 1.0 - 2.0 * sin_sq(t2));
        // drop m = 0
        it1.next();
        it2.next();
        Ok(Series {
            n,
            t1,
            t2,
            ln_dim: Vec::new(),
            ln_prod: Vec::new(),
            it1,
            it2,
        })
    }

    /// Terms for m = 1..=len.
    fn ensure(&mut self, len: usize) {
        let n = self.n as f64;
        while self.ln_dim.len() < len {
            let m = self.ln_dim.len() as f64; // ratio d(m+1)/d(m)
            let prev = self.ln_dim.last().copied().unwrap_or(0.0);
            let step = 2.0 * ((m + n - 1.0) / (m + 1.0)).ln()
                + ((2.0 * m + n + 1.0) / (2.0 * m + n - 1.0)).ln();
            self.ln_dim.push(prev + step);
            let p = self.it1.next().expect("infinite") * self.it2.next().expect("infinite");
            self.ln_prod.push(p.abs().ln());
        }
    }

    /// Sum with a block-maximum geometric tail estimate; stops early once
    /// the partial sum reaches `exceed`.
    fn sum(&mut self, l: u64, tol: f64, exceed: Option<f64>) -> Result<Outcome> {
        let two_l = 2.0 * l as f64;
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut prev_block = f64::NAN;
        let mut block_max = 0.0f64;
        let mut ratios: Vec<f64> = Vec::new();
        let mut m = 0usize;
        while (m as u64) < CN_CAP {
            if m == self.ln_dim.len() {
                self.ensure((m + 4096).min(CN_CAP as usize));
            }
            let term = (self.ln_dim[m] + two_l * self.ln_prod[m]).exp();
            // Neumaier summation
            let s = sum + term;
            comp += if sum.abs() >= term.abs() { (sum - s) + term } else { (term - s) + sum };
            sum = s;
            block_max = block_max.max(term);
            m += 1;
            if let Some(target) = exceed {
                if sum + comp >= target {
                    return Ok(Outcome::Exceeded);
                }
            }
            if m % TAIL_BLOCK != 0 {
                continue;
            }
            if prev_block.is_finite() {
                let r = if prev_block > 0.0 { block_max / prev_block } else if block_max == 0.0 { 0.0 } else { f64::INFINITY };
                ratios.push(r);
                if ratios.len() > TAIL_WINDOW {
                    ratios.remove(0);
                }
                let worst = ratios.iter().copied().fold(0.0, f64::max);
                if ratios.len() == TAIL_WINDOW && worst < 1.0 {
                    let tail = TAIL_BLOCK as f64 * block_max * worst / (1.0 - worst);
                    if tail < tol {
                        return Ok(Outcome::Done(PlancherelSum {
                            n: self.n,
                            t1: self.t1,
                            t2: self.t2,
                            l,
                            value: sum + comp,
                            truncation_m: m as u64,
                            tail_bound: tail,
                        }));
                    }
                }
            }
            prev_block = block_max;
            block_max = 0.0;
        }
        Err(Error::TruncationFailure {
            cap: CN_CAP,
            partial: sum + comp,
        })
    }
}

/// `Σ_{m>=1} d(m,n) (phi_m(t1) phi_m(t2))^{2l}` for SU(n), the squared L2
/// distance from the l-th power of the product measure to Haar.
pub fn cn(n: u32, t1: f64, t2: f64, l: u64, tol: f64) -> Result<PlancherelSum> {
    if l == 0 {
        return Err(Error::config("l must be at least 1 (the l = 0 sum diverges)"));
    }
    if !(tol > 0.0) {
        return Err(Error::config("tol must be positive"));
    }
    match Series::new(n, t1, t2)?.sum(l, tol, None)? {
        Outcome::Done(s) => Ok(s),
        Outcome::Exceeded => unreachable!("no target given"),
    }
}

/// Minimal mixing length with its minimality witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LStar {
    pub n: u32,
    pub t1: f64,
    pub t2: f64,
    pub eps: f64,
    pub l: u64,
    pub cn_at_l: f64,
}

/// Smallest `l >= 1` with `cn(n, t1, t2, l) < eps^2`.
///
/// `cn` is nonincreasing in `l`, so galloping then bisection is exact. A
/// sum that fails to contract at some `l` counts as not yet below target.
pub fn l_star(n: u32, t1: f64, t2: f64, eps: f64) -> Result<LStar> {
    if !(eps > 0.0) {
        return Err(Error::config("eps must be positive"));
    }
    let target = eps * eps;
    let tol = target * 1e-6;
    let mut series = Series::new(n, t1, t2)?;
    let mut below = |l: u64| -> Result<Option<f64>> {
        match series.sum(l, tol, Some(target)) {
            Ok(Outcome::Done(s)) if s.value < target => Ok(Some(s.value)),
            Ok(_) | Err(Error::TruncationFailure { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut lo = 0u64;
    let mut hi = 1u64;
    let mut hi_value;
    loop {
        if let Some(v) = below(hi)? {
            hi_value = v;
            break;
        }
        if hi >= L_CAP {
            let achieved = cn(n, t1, t2, L_CAP, tol).map(|s| s.value).unwrap_or(f64::INFINITY);
            return Err(Error::NotFound { cap: L_CAP, target, achieved });
        }
        lo = hi;
        hi = (hi * 2).min(L_CAP);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match below(mid)? {
            Some(v) => {
                hi = mid;
                hi_value = v;
            }
            None => lo = mid,
        }
    }
    Ok(LStar { n, t1, t2, eps, l: hi, cn_at_l: hi_value })
}

/// Least-squares fit `l* ~ intercept + slope ln n` with rank correlation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub n_list: Vec<u32>,
    pub l_star: Vec<u64>,
    pub slope: f64,
    pub intercept: f64,
    /// Spearman correlation of `l*` and `ln n`; 0 when either is constant.
    pub spearman: f64,
}

/// Compute [`l_star`] over `n_list` and fit the log-n law.
pub fn logn_fit(n_list: &[u32], t1: f64, t2: f64, eps: f64) -> Result<LogFit> {
    if n_list.len() < 5 {
        return Err(Error::config("logn_fit needs at least 5 sizes"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("n_list must be strictly ascending"));
    }
    let ls = n_list
        .iter()
        .map(|&n| l_star(n, t1, t2, eps).map(|s| s.l))
        .collect::<Result<Vec<_>>>()?;
    Ok(fit_log_law(n_list, &ls))
}

/// The regression and rank correlation behind [`logn_fit`].
pub fn fit_log_law(n_list: &[u32], l_star: &[u64]) -> LogFit {
    let x: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = l_star.iter().map(|&l| l as f64).collect();
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    LogFit {
        n_list: n_list.to_vec(),
        l_star: l_star.to_vec(),
        slope,
        intercept: my - slope * mx,
        spearman: pearson(&ranks(&x), &ranks(&y)),
    }
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        // ties share the average rank
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let k = a.len() as f64;
    let ma = a.iter().sum::<f64>() / k;
    let mb = b.iter().sum::<f64>() / k;
    let sab: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let saa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let sbb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub m: u64,
    pub abs_phi: f64,
    /// Envelope shape times the fitted constant.
    pub envelope: f64,
}

/// `|phi_m(t)|` against the large-m envelope
/// `(n-1)^{n-1/2} m^{m+1/2} / (n+m-1)^{n+m-1/2} * t^{-n+1/2} / sqrt(m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub n: u64,
    pub t: f64,
    /// Largest ratio `|phi_m| / shape`; the envelope is scaled by it.
    pub fitted_constant: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub rows: Vec<EnvelopeRow>,
}

fn ln_envelope_shape(m: f64, n: f64, t: f64) -> f64 {
    (n - 0.5) * (n - 1.0).ln() + (m + 0.5) * m.ln() - (n + m - 0.5) * (n + m - 1.0).ln()
        + (0.5 - n) * t.ln()
        - 0.5 * m.ln()
}

/// Tabulate the spherical-function size against its asymptotic envelope.
/// Diagnostic only: nothing is asserted about the ratios.
pub fn asymptotic_envelope_check(m_list: &[u64], n: u64, t: f64) -> Result<EnvelopeReport> {
    if n < 2 {
        return Err(Error::config("envelope needs n >= 2"));
    }
    if !(t > 0.0 && t <= FRAC_PI_2) {
        return Err(Error::OutOfRange { what: "t", value: t, lo: 0.0, hi: FRAC_PI_2 });
    }
    if m_list.is_empty() || m_list.contains(&0) {
        return Err(Error::config("m_list must be nonempty with m >= 1"));
    }
    let mut raw = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let a = phi(m, n, t)?.abs();
        let shape = ln_envelope_shape(m as f64, n as f64, t).exp();
        raw.push((m, a, shape));
    }
    let ratios: Vec<f64> = raw.iter().map(|(_, a, s)| a / s).collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EnvelopeReport {
        n,
        t,
        fitted_constant: max_ratio,
        min_ratio,
        max_ratio,
        rows: raw
            .into_iter()
            .map(|(m, a, s)| EnvelopeRow { m, abs_phi: a, envelope: s * max_ratio })
            .collect(),
    })
}
