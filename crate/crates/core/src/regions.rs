//! The 2^m invariant-region lattice.
//!
//! Each region is a cone in state space selected by a partition (L, Z) of
//! the component indices {1..m}: transformed coordinate `w_l` must be >= 0
//! for l in L and <= 0 for z in Z. Flipping the sign of an eigenvector row
//! yields another eigenvector, which is exactly what distinguishes the
//! regions, so membership is a sign test on the (possibly sign-flipped)
//! sine transform.

use crate::error::{Error, Result};
use crate::spectral::SpectralDecomposition;

/// Default slack on the cone inequalities: margins down to -1e-12 count as
/// inside, since the strict inequalities are not decidable in floating
/// point on the cone boundary.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-12;

/// A partition (L, Z) of {1..m}. Bit `m - l` of `z_bits` is set iff
/// component `l` lies in Z (index 1 is the most significant bit), which
/// makes [`enumerate_regions`] a plain binary count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionSpec {
    m: usize,
    z_bits: u64,
}

impl RegionSpec {
    /// The region with every index in L (all transformed coordinates
    /// nonnegative).
    pub fn all_l(m: usize) -> Result<Self> {
        Self::by_code(m, 0)
    }

    /// The `code`-th region, 0 <= code < 2^m, in the deterministic binary
    /// counting order.
    pub fn by_code(m: usize, code: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::TooFewComponents(m));
        }
        if m > 64 {
            return Err(Error::TooManyComponents { got: m, max: 64 });
        }
        if m < 64 && code >= (1u64 << m) {
            return Err(Error::InvalidRegion(format!(
                "code {code} out of range for m = {m}"
            )));
        }
        Ok(Self { m, z_bits: code })
    }

    /// Builds a region from the 1-based indices of L; every other index
    /// goes to Z.
    pub fn from_l_indices(m: usize, l_indices: &[usize]) -> Result<Self> {
        let mut spec = Self::by_code(m, 0)?;
        spec.z_bits = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        for &l in l_indices {
            if l < 1 || l > m {
                return Err(Error::InvalidRegion(format!("index {l} outside 1..={m}")));
            }
            spec.z_bits &= !(1u64 << (m - l));
        }
        Ok(spec)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// True iff component `l` (1-based) lies in Z.
    pub fn in_z(&self, l: usize) -> bool {
        self.z_bits & (1u64 << (self.m - l)) != 0
    }

    /// +1 for l in L, -1 for l in Z.
    pub fn sign(&self, l: usize) -> f64 {
        if self.in_z(l) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn signs(&self) -> Vec<f64> {
        (1..=self.m).map(|l| self.sign(l)).collect()
    }

    pub fn l_indices(&self) -> Vec<usize> {
        (1..=self.m).filter(|&l| !self.in_z(l)).collect()
    }

    pub fn z_indices(&self) -> Vec<usize> {
        (1..=self.m).filter(|&l| self.in_z(l)).collect()
    }

    /// The region with L and Z swapped.
    pub fn complement(&self) -> Self {
        let mask = if self.m == 64 {
            u64::MAX
        } else {
            (1u64 << self.m) - 1
        };
        Self {
            m: self.m,
            z_bits: !self.z_bits & mask,
        }
    }
}

impl std::fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fmt_set = |v: Vec<usize>| {
            let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("{{{}}}", items.join(","))
        };
        write!(
            f,
            "L={} Z={}",
            fmt_set(self.l_indices()),
            fmt_set(self.z_indices())
        )
    }
}

/// All 2^m regions in binary counting order on Z-membership (index 1 most
/// significant), starting from (L = {1..m}, Z = empty). Materializing the
/// full lattice is capped at m <= 20; use [`RegionSpec::by_code`] directly
/// beyond that.
///
/// ```
/// use rdtoeplitz::regions::enumerate_regions;
///
/// let regions = enumerate_regions(3).unwrap();
/// assert_eq!(regions.len(), 8);
/// assert_eq!(regions[0].l_indices(), vec![1, 2, 3]);
/// ```
pub fn enumerate_regions(m: usize) -> Result<Vec<RegionSpec>> {
    if m < 2 {
        return Err(Error::TooFewComponents(m));
    }
    if m > 20 {
        return Err(Error::TooManyComponents { got: m, max: 20 });
    }
    (0..(1u64 << m))
        .map(|code| RegionSpec::by_code(m, code))
        .collect()
}

/// The sine transform with rows sign-flipped according to a region: row l
/// equals `sign_l * forward[l]`, so the transformed coordinates of
/// in-region data are all nonnegative.
#[derive(Debug, Clone)]
pub struct SignedTransform {
    pub signs: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl SignedTransform {
    pub fn new(dec: &SpectralDecomposition, spec: &RegionSpec) -> Result<Self> {
        if dec.m != spec.m() {
            return Err(Error::DimensionMismatch {
                expected: dec.m,
                got: spec.m(),
            });
        }
        let signs = spec.signs();
        let rows = dec
            .forward
            .iter()
            .zip(&signs)
            .map(|(row, s)| row.iter().map(|x| s * x).collect())
            .collect();
        Ok(Self { signs, rows })
    }

    /// Signed transform of a component vector.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                got: v.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().zip(v).map(|(r, x)| r * x).sum())
            .collect())
    }
}

/// Outcome of a cone test: per-component signed margins (nonnegative means
/// the constraint is satisfied) and the overall verdict at the given
/// tolerance.
#[derive(Debug, Clone)]
pub struct MarginReport {
    pub inside: bool,
    pub margins: Vec<f64>,
}

impl MarginReport {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn cone_test(
    spec: &RegionSpec,
    dec: &SpectralDecomposition,
    v: &[f64],
    tol: f64,
) -> Result<MarginReport> {
    if tol < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be >= 0, got {tol}"
        )));
    }
    let signed = SignedTransform::new(dec, spec)?;
    let margins = signed.apply(v)?;
    let inside = margins.iter().all(|&x| x >= -tol);
    Ok(MarginReport { inside, margins })
}

/// Tests whether initial data lies in the region: the signed transformed
/// coordinates must all be >= -tol. Returns the vector of signed margins.
pub fn membership(
    spec: &RegionSpec,
    dec: &SpectralDecomposition,
    u0: &[f64],
    tol: f64,
) -> Result<MarginReport> {
    cone_test(spec, dec, u0, tol)
}

/// Tests whether boundary data `beta` is compatible with the region: the
/// signed transformed sums must all be >= -tol.
pub fn boundary_compat(
    spec: &RegionSpec,
    dec: &SpectralDecomposition,
    beta: &[f64],
    tol: f64,
) -> Result<MarginReport> {
    cone_test(spec, dec, beta, tol)
}
