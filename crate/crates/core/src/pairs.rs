//! The six classical rank-one symmetric pairs.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{GroupElement, GroupTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Unitary,
    Orthogonal,
    Symplectic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curvature {
    Compact,
    Noncompact,
}

/// Which multiplicities and radial range to use.
///
/// `Paper` uses the printed values verbatim; `Standard` the classical ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Paper,
    Standard,
}

impl Mode {
    /// Smallest `n` for which the (K, M) radial range is finite and nonempty.
    pub fn min_n(self) -> u32 {
        match self {
            Mode::Paper => 3,
            Mode::Standard => 2,
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Mode::Paper),
            "standard" => Ok(Mode::Standard),
            _ => Err(Error::config(format!("unknown mode `{s}` (paper | standard)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Paper => "paper",
            Mode::Standard => "standard",
        })
    }
}

/// Family and curvature, named like `su-compact` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PairKind {
    pub family: Family,
    pub curvature: Curvature,
}

impl PairKind {
    pub const ALL: [PairKind; 6] = [
        PairKind::new(Family::Unitary, Curvature::Compact),
        PairKind::new(Family::Unitary, Curvature::Noncompact),
        PairKind::new(Family::Orthogonal, Curvature::Compact),
        PairKind::new(Family::Orthogonal, Curvature::Noncompact),
        PairKind::new(Family::Symplectic, Curvature::Compact),
        PairKind::new(Family::Symplectic, Curvature::Noncompact),
    ];

    pub const fn new(family: Family, curvature: Curvature) -> Self {
        PairKind { family, curvature }
    }
}

impl FromStr for PairKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (fam, curv) = s
            .split_once('-')
            .ok_or_else(|| Error::config(format!("unknown pair `{s}`")))?;
        let family = match fam {
            "su" => Family::Unitary,
            "so" => Family::Orthogonal,
            "sp" => Family::Symplectic,
            _ => return Err(Error::config(format!("unknown pair `{s}`"))),
        };
        let curvature = match curv {
            "compact" => Curvature::Compact,
            "noncompact" => Curvature::Noncompact,
            _ => return Err(Error::config(format!("unknown pair `{s}`"))),
        };
        Ok(PairKind { family, curvature })
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::Unitary => "su",
            Family::Orthogonal => "so",
            Family::Symplectic => "sp",
        };
        let curv = match self.curvature {
            Curvature::Compact => "compact",
            Curvature::Noncompact => "noncompact",
        };
        write!(f, "{fam}-{curv}")
    }
}

impl TryFrom<String> for PairKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PairKind> for String {
    fn from(k: PairKind) -> String {
        k.to_string()
    }
}

/// A symmetric pair with its size parameter and multiplicities.
///
/// `n` is the size of the pair: G is SU(n+1), SO(n+1) or Sp(n+1) (or the
/// indefinite analogue), acting on an (n+1)-dimensional space. The
/// descriptor accepts any `n >= 1`; operations on the (K, M) radial range
/// enforce the mode's minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDescriptor {
    pub family: Family,
    pub curvature: Curvature,
    pub n: u32,
    pub mode: Mode,
    pub m_alpha: u32,
    pub m_2alpha: u32,
    /// Upper end of the (K, M) radial range; infinite below the mode minimum.
    pub q0_end: f64,
}

impl PairDescriptor {
    pub fn new(family: Family, curvature: Curvature, n: u32, mode: Mode) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("pair size n must be at least 1"));
        }
        let nf = n as f64;
        let (m_alpha, m_2alpha) = match (family, mode) {
            (Family::Unitary, _) => (2 * (n - 1), 1),
            (Family::Orthogonal, _) => (n - 1, 0),
            (Family::Symplectic, Mode::Paper) => (8 * (n - 1), 2),
            (Family::Symplectic, Mode::Standard) => (4 * (n - 1), 3),
        };
        let q0_end = match (family, mode) {
            (Family::Unitary, Mode::Paper) => PI / (2.0 * (nf - 2.0)),
            (Family::Orthogonal, Mode::Paper) => PI / (nf - 2.0),
            (Family::Symplectic, Mode::Paper) => PI / (8.0 * (nf - 2.0)),
            (Family::Orthogonal, Mode::Standard) => PI,
            (_, Mode::Standard) => FRAC_PI_2,
        };
        let q0_end = if n < mode.min_n() { f64::INFINITY } else { q0_end };
        Ok(PairDescriptor {
            family,
            curvature,
            n,
            mode,
            m_alpha,
            m_2alpha,
            q0_end,
        })
    }

    pub fn from_kind(kind: PairKind, n: u32, mode: Mode) -> Result<Self> {
        Self::new(kind.family, kind.curvature, n, mode)
    }

    /// Replace the restricted-root multiplicities used by [`delta`].
    pub fn with_multiplicities(mut self, m_alpha: u32, m_2alpha: u32) -> Self {
        self.m_alpha = m_alpha;
        self.m_2alpha = m_2alpha;
        self
    }

    pub fn kind(&self) -> PairKind {
        PairKind::new(self.family, self.curvature)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn is_compact(&self) -> bool {
        self.curvature == Curvature::Compact
    }

    /// Dimension of the defining representation of G.
    pub fn group_dim(&self) -> usize {
        self.n as usize + 1
    }

    pub fn group_tag(&self) -> GroupTag {
        match (self.family, self.curvature) {
            (Family::Unitary, Curvature::Compact) => GroupTag::SU,
            (Family::Orthogonal, Curvature::Compact) => GroupTag::SO,
            (Family::Symplectic, Curvature::Compact) => GroupTag::Sp,
            (Family::Unitary, Curvature::Noncompact) => GroupTag::SUIndefinite,
            (Family::Orthogonal, Curvature::Noncompact) => GroupTag::SOIndefinite,
            (Family::Symplectic, Curvature::Noncompact) => GroupTag::SpIndefinite,
        }
    }

    /// Range of the radial parameter t of G/K.
    pub fn radial_range(&self) -> (f64, f64) {
        match (self.curvature, self.family) {
            (Curvature::Noncompact, _) => (0.0, f64::INFINITY),
            (Curvature::Compact, Family::Orthogonal) => (0.0, PI),
            (Curvature::Compact, _) => (0.0, FRAC_PI_2),
        }
    }

    /// Exponents of `sin t` and `sin 2t` in the (K, M) Jacobian.
    pub fn delta0_exponents(&self) -> Result<(u32, u32)> {
        self.require_q0()?;
        let n = self.n;
        Ok(match (self.family, self.mode) {
            (Family::Unitary, _) => (2 * (n - 2), 1),
            (Family::Orthogonal, _) => (n - 2, 0),
            (Family::Symplectic, Mode::Paper) => (8 * (n - 2), 2),
            (Family::Symplectic, Mode::Standard) => (4 * (n - 2), 3),
        })
    }

    /// Fails unless `n` meets the mode minimum, so that `q0_end` is usable.
    pub fn require_q0(&self) -> Result<f64> {
        let min = self.mode.min_n();
        if self.n < min {
            return Err(Error::config(format!(
                "{} in {} mode needs n >= {min}, got {}",
                self.kind(),
                self.mode,
                self.n
            )));
        }
        Ok(self.q0_end)
    }

    pub(crate) fn check_radial(&self, what: &'static str, t: f64) -> Result<()> {
        let (lo, hi) = self.radial_range();
        check_in(what, t, lo, hi)
    }
}

pub(crate) fn check_in(what: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    // tolerate rounding in endpoints such as pi/2 passed as 1.5707963267948966
    let slack = 1e-12 * hi.abs().max(1.0);
    if value.is_nan() || value < lo - slack || value > hi + slack {
        return Err(Error::OutOfRange { what, value, lo, hi });
    }
    Ok(())
}

/// A double coset `K exp(tH) K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalClass {
    pair: PairDescriptor,
    t: f64,
}

impl SphericalClass {
    pub fn new(pair: PairDescriptor, t: f64) -> Result<Self> {
        pair.check_radial("t", t)?;
        Ok(SphericalClass { pair, t })
    }

    pub fn pair(&self) -> &PairDescriptor {
        &self.pair
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

fn sin_form(s: f64, s2: f64, a: u32, b: u32) -> f64 {
    s.powi(a as i32) * s2.powi(b as i32)
}

/// Polar-coordinate Jacobian of G/K at `exp(tH)`.
pub fn delta(pair: &PairDescriptor, t: f64) -> Result<f64> {
    pair.check_radial("t", t)?;
    Ok(match pair.curvature {
        Curvature::Compact => sin_form(t.sin(), (2.0 * t).sin(), pair.m_alpha, pair.m_2alpha),
        Curvature::Noncompact => sin_form(t.sinh(), (2.0 * t).sinh(), pair.m_alpha, pair.m_2alpha),
    })
}

/// Jacobian of the compact pair (K, M); a sine form for both curvatures.
pub fn delta0(pair: &PairDescriptor, t: f64) -> Result<f64> {
    let (a, b) = pair.delta0_exponents()?;
    check_in("t", t, 0.0, pair.q0_end)?;
    Ok(sin_form(t.sin(), (2.0 * t).sin(), a, b))
}

/// Bi-K-invariant coordinate: size of the (1,1) entry.
///
/// Orthogonal pairs keep the sign, since their compact classes run over
/// `[0, pi]`. For the other families this is the modulus or quaternion norm.
pub fn radial_u(pair: &PairDescriptor, g: &GroupElement) -> Result<f64> {
    if g.group() != pair.group_tag() {
        return Err(Error::TagMismatch {
            expected: pair.group_tag().to_string(),
            actual: g.group().to_string(),
        });
    }
    if g.dim() != pair.group_dim() {
        return Err(Error::DimensionMismatch {
            left: pair.group_dim(),
            right: g.dim(),
        });
    }
    Ok(corner_value(pair.family, g.matrix()))
}

pub(crate) fn corner_value(family: Family, m: &crate::linalg::DenseMatrix) -> f64 {
    match (family, m) {
        (Family::Orthogonal, crate::linalg::DenseMatrix::Real(r)) => r[(0, 0)],
        _ => m.corner_norm(),
    }
}
