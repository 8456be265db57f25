//! Monte Carlo radial statistics of products of spherical-class elements.

use serde::{Deserialize, Serialize};

use crate::densities::ProductDensity;
use crate::error::{Error, Result};
use crate::haar::{haar_group, haar_k, orbit_sample, par_collect, RngStream, StreamId};
use crate::linalg::{exp_radial, GroupTag};
use crate::pairs::{self, Curvature, Family, Mode, PairDescriptor, PairKind, SphericalClass};
use crate::plancherel;
use crate::stats;
use crate::tolerance;

pub use crate::stats::{ks_distance, ks_distance_stepped, wasserstein1};

/// Seeded draws of the radial coordinate of a product of two classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSampleSet {
    pub pair: PairDescriptor,
    pub t1: f64,
    pub t2: f64,
    pub count: usize,
    pub stream: StreamId,
    pub reduced: bool,
    pub values: Vec<f64>,
}

fn codomain(pair: &PairDescriptor) -> (f64, f64) {
    match (pair.curvature, pair.family) {
        (Curvature::Noncompact, _) => (1.0, f64::INFINITY),
        (Curvature::Compact, Family::Orthogonal) => (-1.0, 1.0),
        (Curvature::Compact, _) => (0.0, 1.0),
    }
}

/// Radial coordinates of `exp(t1 H) k exp(t2 H)` (reduced) or of `X Y`
/// with X, Y independent class samples (full).
///
/// Values are clamped into the coordinate's range to absorb rounding.
pub fn product_radials(
    pair: &PairDescriptor,
    t1: f64,
    t2: f64,
    count: usize,
    rng: &RngStream,
    reduced: bool,
) -> Result<RadialSampleSet> {
    if count == 0 {
        return Err(Error::config("count must be at least 1"));
    }
    let c1 = SphericalClass::new(pair.clone(), t1)?;
    let c2 = SphericalClass::new(pair.clone(), t2)?;
    let (lo, hi) = codomain(pair);
    let family = pair.family;
    let values = if reduced {
        let a1 = exp_radial(pair, t1);
        let a2 = exp_radial(pair, t2);
        par_collect(rng, count, |r| {
            let k = haar_k(pair, r);
            let g = a1.compose(&k).and_then(|g| g.compose(&a2)).expect("same group");
            pairs::corner_value(family, g.matrix()).clamp(lo, hi)
        })
    } else {
        par_collect(rng, count, |r| {
            let x = orbit_sample(&c1, r);
            let y = orbit_sample(&c2, r);
            let g = x.compose(&y).expect("same group");
            pairs::corner_value(family, g.matrix()).clamp(lo, hi)
        })
    };
    Ok(RadialSampleSet {
        pair: pair.clone(),
        t1,
        t2,
        count,
        stream: rng.id(),
        reduced,
        values,
    })
}

/// KS distance between sampled radial coordinates and a product density.
///
/// Folds the density to `|u|` when the sampled coordinate is a modulus but
/// the support reaches below zero. A point mass is matched within the
/// structural tolerance, since sampled products carry rounding.
pub fn ks_against_density(values: &[f64], d: &ProductDensity) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if d.degenerate {
        let target = if d.pair.family == Family::Orthogonal { d.a1 } else { d.a1.abs() };
        let off = values
            .iter()
            .filter(|v| (*v - target).abs() > tolerance::STRUCTURAL)
            .count();
        return Ok(off as f64 / values.len() as f64);
    }
    if d.needs_folding() {
        ks_distance_stepped(values, |v| d.cdf_folded(v), |v| d.cdf_folded_left(v))
    } else {
        ks_distance(values, |u| d.cdf(u))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Paper,
    Standard,
    Neither,
    Both,
}

/// KS distances of one sample set against both parameter modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub pair: PairKind,
    pub n: u32,
    pub t1: f64,
    pub t2: f64,
    pub samples: usize,
    pub stream: StreamId,
    /// `None` when `n` is below the paper-mode minimum.
    pub ks_paper: Option<f64>,
    pub ks_standard: Option<f64>,
    pub folded_paper: bool,
    pub folded_standard: bool,
    pub threshold: f64,
    pub verdict: Verdict,
}

/// Sample the product once and score it against both modes' densities.
pub fn compare_modes(
    kind: PairKind,
    n: u32,
    t1: f64,
    t2: f64,
    count: usize,
    rng: &RngStream,
    threshold: f64,
) -> Result<ComparisonReport> {
    let sampling = PairDescriptor::from_kind(kind, n, Mode::Standard)?;
    let set = product_radials(&sampling, t1, t2, count, rng, true)?;
    let score = |mode: Mode| -> Result<Option<(f64, bool)>> {
        let pair = PairDescriptor::from_kind(kind, n, mode)?;
        if pair.require_q0().is_err() {
            return Ok(None);
        }
        let d = ProductDensity::new(&pair, t1, t2)?;
        Ok(Some((ks_against_density(&set.values, &d)?, d.needs_folding())))
    };
    let paper = score(Mode::Paper)?;
    let standard = score(Mode::Standard)?;
    let pass = |x: Option<(f64, bool)>| x.is_some_and(|(ks, _)| ks < threshold);
    let verdict = match (pass(paper), pass(standard)) {
        (true, true) => Verdict::Both,
        (true, false) => Verdict::Paper,
        (false, true) => Verdict::Standard,
        (false, false) => Verdict::Neither,
    };
    Ok(ComparisonReport {
        pair: kind,
        n,
        t1,
        t2,
        samples: count,
        stream: rng.id(),
        ks_paper: paper.map(|x| x.0),
        ks_standard: standard.map(|x| x.0),
        folded_paper: paper.is_some_and(|x| x.1),
        folded_standard: standard.is_some_and(|x| x.1),
        threshold,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingRow {
    /// Number of alternating pairs `g_i h_i` in the product.
    pub factors: usize,
    pub distance: f64,
}

/// Distance to Haar of alternating products in SU(n), measured on Re Tr.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingTable {
    pub n: u32,
    pub t1: f64,
    pub t2: f64,
    pub samples: usize,
    pub stream: StreamId,
    /// W1 distance between two independent Haar samples of the same size.
    pub baseline: f64,
    pub rows: Vec<MixingRow>,
}

/// Stream offsets reserved for the Haar reference samples.
const HAAR_REFERENCE: u64 = 1 << 40;

/// W1 distance between Re Tr of `g_1 h_1 ... g_N h_N` and Re Tr of Haar
/// SU(n), for `N = 1..=max_factors`.
///
/// `g_i` and `h_i` are uniform on the classes of `t1` and `t2` for
/// K = S(U(1) x U(n-1)). Adjacent K factors of consecutive class samples
/// merge into one Haar-K factor, so each chain step draws two K elements.
pub fn mixing_experiment(
    n: u32,
    t1: f64,
    t2: f64,
    max_factors: usize,
    samples: usize,
    rng: &RngStream,
) -> Result<MixingTable> {
    if n < 2 {
        return Err(Error::config("mixing needs SU(n) with n >= 2"));
    }
    if max_factors == 0 || samples == 0 {
        return Err(Error::config("max_factors and samples must be positive"));
    }
    let pair = PairDescriptor::new(Family::Unitary, Curvature::Compact, n - 1, Mode::Standard)?;
    pair.check_radial("t1", t1)?;
    pair.check_radial("t2", t2)?;
    let a1 = exp_radial(&pair, t1);
    let a2 = exp_radial(&pair, t2);
    let chains = par_collect(rng, samples, |r| {
        let mut g = haar_k(&pair, r);
        let mut traces = Vec::with_capacity(max_factors);
        for _ in 0..max_factors {
            let k = haar_k(&pair, r);
            let k2 = haar_k(&pair, r);
            g = g
                .compose(&a1)
                .and_then(|x| x.compose(&k))
                .and_then(|x| x.compose(&a2))
                .and_then(|x| x.compose(&k2))
                .expect("same group");
            traces.push(g.matrix().re_trace());
        }
        traces
    });
    let dim = n as usize;
    let haar_trace = |offset: u64| {
        par_collect(&rng.substream(HAAR_REFERENCE + offset), samples, |r| {
            haar_group(GroupTag::SU, dim, r).expect("n >= 2").matrix().re_trace()
        })
    };
    let reference = haar_trace(0);
    let baseline = wasserstein1(&haar_trace(1), &reference)?;
    let rows = (0..max_factors)
        .map(|i| {
            let at: Vec<f64> = chains.iter().map(|c| c[i]).collect();
            Ok(MixingRow {
                factors: i + 1,
                distance: wasserstein1(&at, &reference)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(MixingTable {
        n,
        t1,
        t2,
        samples,
        stream: rng.id(),
        baseline,
        rows,
    })
}

/// Monte Carlo check of `E_k[phi(exp(t1 H) k exp(t2 H))] = phi(t1) phi(t2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTest {
    pub n: u32,
    pub m: u64,
    pub t1: f64,
    pub t2: f64,
    pub samples: usize,
    pub mc_mean: f64,
    pub standard_error: f64,
    pub analytic: f64,
    pub z_score: f64,
}

/// Product-average identity of the SU(n) spherical function of degree `m`.
pub fn spherical_functional_test(
    n: u32,
    m: u64,
    t1: f64,
    t2: f64,
    samples: usize,
    rng: &RngStream,
) -> Result<FunctionalTest> {
    if n < 2 {
        return Err(Error::config("functional test needs SU(n) with n >= 2"));
    }
    if samples == 0 {
        return Err(Error::config("samples must be positive"));
    }
    let pair = PairDescriptor::new(Family::Unitary, Curvature::Compact, n - 1, Mode::Standard)?;
    let analytic = plancherel::su_spherical(m, n, t1)? * plancherel::su_spherical(m, n, t2)?;
    let set = product_radials(&pair, t1, t2, samples, rng, true)?;
    let alpha = n - 2;
    let values: Vec<f64> = set
        .values
        .iter()
        .map(|u| plancherel::jacobi_normalized(m, alpha as f64, 2.0 * u * u - 1.0))
        .collect();
    let (mc_mean, se) = stats::mean_and_se(&values)?;
    let diff = (mc_mean - analytic).abs();
    let z_score = if se > 0.0 {
        diff / se
    } else if diff < tolerance::STRUCTURAL {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(FunctionalTest {
        n,
        m,
        t1,
        t2,
        samples,
        mc_mean,
        standard_error: se,
        analytic,
        z_score,
    })
}
