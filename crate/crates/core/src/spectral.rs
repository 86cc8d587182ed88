//! Closed-form spectral theory of the tridiagonal symmetric Toeplitz
//! diffusion matrix.
//!
//! The matrix has constant diagonal `a` and constant sub/super-diagonal `b`.
//! Its eigenvalues are `lambda_l = a + 2 b cos(l pi / (m+1))` with sine
//! eigenvectors `v_l[k] = sin(l k pi / (m+1))`, so no iterative eigensolver
//! is involved anywhere in this module: everything is evaluated from the
//! closed forms. A dense solver exists only in [`crate::oracle`] as an
//! independent cross-check.
//!
//! The forward transform maps the physical components `u` to decoupled
//! components `w` via `w_l = sum_k u_k sin((m+1-l) k pi / (m+1))`; row `l`
//! of the forward matrix is the eigenvector of the l-th *ascending*
//! eigenvalue, so the transform simultaneously sorts the spectrum.

use crate::error::{Error, Result};

/// The m-component diffusion system: tridiagonal symmetric Toeplitz matrix
/// with diagonal `a` and off-diagonal coupling `b`, both positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToeplitzSystem {
    m: usize,
    a: f64,
    b: f64,
}

impl ToeplitzSystem {
    /// Validates `m >= 2`, `a > 0`, `b > 0`. Parabolicity is a separate,
    /// weaker property checked by [`ToeplitzSystem::is_parabolic`]: a valid
    /// system need not be parabolic.
    pub fn new(m: usize, a: f64, b: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::TooFewComponents(m));
        }
        if m > 64 {
            return Err(Error::TooManyComponents { got: m, max: 64 });
        }
        if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::NonPositiveCoefficients { a, b });
        }
        Ok(Self { m, a, b })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Strict parabolicity test: `2 b cos(pi/(m+1)) < a`, equivalently the
    /// matrix is positive definite and all ascending eigenvalues are > 0.
    /// Equality returns false.
    pub fn is_parabolic(&self) -> bool {
        2.0 * self.b * (std::f64::consts::PI / (self.m as f64 + 1.0)).cos() < self.a
    }

    /// Tridiagonal matrix-vector product `A v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; self.m];
        for i in 0..self.m {
            let mut acc = self.a * v[i];
            if i > 0 {
                acc += self.b * v[i - 1];
            }
            if i + 1 < self.m {
                acc += self.b * v[i + 1];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Dense m x m representation (row-major), used by the coupled-form
    /// stepper and by oracles.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let mut rows = vec![vec![0.0; self.m]; self.m];
        for i in 0..self.m {
            rows[i][i] = self.a;
            if i > 0 {
                rows[i][i - 1] = self.b;
            }
            if i + 1 < self.m {
                rows[i][i + 1] = self.b;
            }
        }
        rows
    }
}

/// Same strict test as [`ToeplitzSystem::is_parabolic`], as a free function.
pub fn parabolicity_check(sys: &ToeplitzSystem) -> bool {
    sys.is_parabolic()
}

/// Eigenvalues in both orders plus the sine transform and its explicit
/// inverse.
///
/// Index conventions (0-based storage of 1-based math indices):
/// - `eigenvalues[l-1] = a + 2 b cos(l pi/(m+1))`, strictly decreasing;
/// - `eigenvalues_ascending[l-1] = eigenvalues[m-l]`, strictly ascending;
/// - `forward[l-1][k-1] = sin((m+1-l) k pi/(m+1))`, so row `l` of `forward`
///   is the eigenvector of `eigenvalues_ascending[l-1]`;
/// - `inverse = inv_scale * forward^T` with `inv_scale = 2/(m+1)`, stored
///   explicitly;
/// - `ascending_to_natural[l-1] = m-l` records the reindexing l <-> m+1-l.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub m: usize,
    pub eigenvalues: Vec<f64>,
    pub eigenvalues_ascending: Vec<f64>,
    pub forward: Vec<Vec<f64>>,
    pub inverse: Vec<Vec<f64>>,
    pub inv_scale: f64,
    pub ascending_to_natural: Vec<usize>,
}

/// Builds the decomposition from the closed forms. Infallible on a valid
/// system; invalid (m, a, b) are rejected at [`ToeplitzSystem::new`].
///
/// ```
/// use rdtoeplitz::spectral::{decompose, ToeplitzSystem};
///
/// let sys = ToeplitzSystem::new(2, 3.0, 1.0).unwrap();
/// let dec = decompose(&sys);
/// assert!((dec.eigenvalues[0] - 4.0).abs() < 1e-12);
/// assert!((dec.eigenvalues_ascending[0] - 2.0).abs() < 1e-12);
/// ```
pub fn decompose(sys: &ToeplitzSystem) -> SpectralDecomposition {
    let m = sys.m();
    let denom = m as f64 + 1.0;
    let pi = std::f64::consts::PI;

    let eigenvalues: Vec<f64> = (1..=m)
        .map(|l| sys.a() + 2.0 * sys.b() * (l as f64 * pi / denom).cos())
        .collect();
    let eigenvalues_ascending: Vec<f64> = (1..=m).map(|l| eigenvalues[m - l]).collect();
    let ascending_to_natural: Vec<usize> = (1..=m).map(|l| m - l).collect();

    let mut forward = vec![vec![0.0; m]; m];
    for l in 1..=m {
        let freq = (m + 1 - l) as f64;
        for k in 1..=m {
            forward[l - 1][k - 1] = (freq * k as f64 * pi / denom).sin();
        }
    }

    let inv_scale = 2.0 / denom;
    let mut inverse = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            inverse[i][j] = inv_scale * forward[j][i];
        }
    }

    SpectralDecomposition {
        m,
        eigenvalues,
        eigenvalues_ascending,
        forward,
        inverse,
        inv_scale,
        ascending_to_natural,
    }
}

impl SpectralDecomposition {
    /// Forward sine transform: `w_l = sum_k u_k sin((m+1-l) k pi/(m+1))`.
    pub fn to_w(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.mat_vec(&self.forward, u)
    }

    /// Inverse transform via the explicit `2/(m+1) * forward^T` matrix.
    pub fn to_u(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.mat_vec(&self.inverse, w)
    }

    /// Eigenvector of the l-th ascending eigenvalue (1-based `l_asc`),
    /// i.e. row `l_asc` of the forward matrix.
    pub fn eigenvector_ascending(&self, l_asc: usize) -> &[f64] {
        &self.forward[l_asc - 1]
    }

    fn mat_vec(&self, mat: &[Vec<f64>], v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: v.len(),
            });
        }
        Ok(mat
            .iter()
            .map(|row| row.iter().zip(v).map(|(r, x)| r * x).sum())
            .collect())
    }
}
