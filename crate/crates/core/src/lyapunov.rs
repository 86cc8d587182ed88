//! The weighted homogeneous Lyapunov polynomial, its closed-form
//! derivatives, the positive-definiteness condition matrix, and the minor
//! recursion that certifies the condition.
//!
//! The polynomial of degree `p_m` in m nonnegative variables is the nested
//! binomial sum
//!
//! ```text
//! H(w) = sum_{p_{m-1}=0}^{p_m} ... sum_{p_1=0}^{p_2}
//!        C(p_m,p_{m-1})...C(p_2,p_1)
//!        theta_1^{p_1^2} ... theta_{m-1}^{p_{m-1}^2}
//!        w_1^{p_1} w_2^{p_2-p_1} ... w_m^{p_m-p_{m-1}}
//! ```
//!
//! All of H, its gradient, and its Hessian share one evaluation core: the
//! derivative formulas only lower the top degree and shift selected theta
//! exponents from `p^2` to `(p+1)^2` or `(p+2)^2`. The same exponent-shift
//! pattern generates the condition matrix entries, which is what ties the
//! positive definiteness of that matrix to the sign of the diffusion term
//! in the time derivative of the Lyapunov functional.

use crate::error::{Error, Result};
use crate::spectral::{SpectralDecomposition, ToeplitzSystem};

/// Degree `p_m >= 2` (the second derivatives need it) and positive weights
/// `theta_1..theta_{m-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovConfig {
    degree: u32,
    thetas: Vec<f64>,
}

impl LyapunovConfig {
    pub fn new(degree: u32, thetas: Vec<f64>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::DegreeTooSmall(degree));
        }
        for (i, &t) in thetas.iter().enumerate() {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::NonPositiveTheta { index: i, value: t });
            }
        }
        Ok(Self { degree, thetas })
    }

    /// Degree of the polynomial.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Number of components this configuration is for.
    pub fn m(&self) -> usize {
        self.thetas.len() + 1
    }
}

fn check_nonneg(w: &[f64]) -> Result<()> {
    for (i, &x) in w.iter().enumerate() {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::NegativeComponent { index: i, value: x });
        }
    }
    Ok(())
}

fn check_dims(cfg: &LyapunovConfig, w: &[f64]) -> Result<()> {
    if w.len() != cfg.m() {
        return Err(Error::DimensionMismatch {
            expected: cfg.m(),
            got: w.len(),
        });
    }
    Ok(())
}

/// Evaluates the nested sum with top degree `top` and per-theta exponent
/// shift `s_k` (exponent `(p_k + s_k)^2`). Horner-style accumulation from
/// the innermost index outward; binomial coefficients by the multiplicative
/// recurrence, exact in f64 for degrees up to ~30.
fn nested_eval(thetas: &[f64], w: &[f64], top: u32, shift: impl Fn(usize) -> u32) -> f64 {
    let m = w.len();
    let n = top as usize;
    // g[q] = inner sum for the first component alone = w_1^q
    let mut g: Vec<f64> = (0..=n).map(|q| w[0].powi(q as i32)).collect();
    for j in 1..m {
        let s = shift(j - 1);
        let theta_pow: Vec<f64> = (0..=n)
            .map(|r| {
                let e = (r as u32 + s) * (r as u32 + s);
                thetas[j - 1].powi(e as i32)
            })
            .collect();
        let w_pow: Vec<f64> = (0..=n).map(|e| w[j].powi(e as i32)).collect();
        let mut next = vec![0.0; n + 1];
        for q in 0..=n {
            let mut binom = 1.0f64;
            let mut acc = 0.0;
            for r in 0..=q {
                if r > 0 {
                    binom = binom * ((q - r + 1) as f64) / (r as f64);
                }
                acc += binom * theta_pow[r] * w_pow[q - r] * g[r];
            }
            next[q] = acc;
        }
        g = next;
    }
    g[n]
}

/// Evaluates the Lyapunov polynomial at a nonnegative point. With all
/// thetas equal to 1 the nested sums telescope to `(sum w)^degree`.
///
/// ```
/// use rdtoeplitz::lyapunov::{eval_h, LyapunovConfig};
///
/// let cfg = LyapunovConfig::new(3, vec![1.0, 1.0]).unwrap();
/// let h = eval_h(&cfg, &[1.0, 2.0, 3.0]).unwrap();
/// assert!((h - 216.0).abs() < 1e-12); // (1+2+3)^3
/// ```
pub fn eval_h(cfg: &LyapunovConfig, w: &[f64]) -> Result<f64> {
    check_dims(cfg, w)?;
    check_nonneg(w)?;
    Ok(nested_eval(&cfg.thetas, w, cfg.degree, |_| 0))
}

/// Closed-form gradient: component l lowers the top degree by one and
/// shifts the theta exponents to `(p_k+1)^2` for k >= l, leaving `p_k^2`
/// for k < l.
pub fn grad_h(cfg: &LyapunovConfig, w: &[f64]) -> Result<Vec<f64>> {
    check_dims(cfg, w)?;
    check_nonneg(w)?;
    let p = cfg.degree;
    let mut out = Vec::with_capacity(cfg.m());
    for l in 1..=cfg.m() {
        let val = nested_eval(&cfg.thetas, w, p - 1, |k0| if k0 + 1 >= l { 1 } else { 0 });
        out.push(p as f64 * val);
    }
    Ok(out)
}

/// Exponent shift shared by the Hessian entry (l, kappa) and the condition
/// matrix entry (l, kappa), both 1-based with l <= kappa: thetas below l
/// keep `p^2`, thetas in [l, kappa) get `(p+1)^2`, thetas at/above kappa
/// get `(p+2)^2`.
fn hessian_shift(l: usize, kappa: usize, k0: usize) -> u32 {
    let k = k0 + 1;
    if k < l {
        0
    } else if k < kappa {
        1
    } else {
        2
    }
}

/// Closed-form Hessian; symmetric, top degree lowered by two.
pub fn hess_h(cfg: &LyapunovConfig, w: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_dims(cfg, w)?;
    check_nonneg(w)?;
    let p = cfg.degree;
    if p < 2 {
        return Err(Error::DegreeTooSmall(p));
    }
    let m = cfg.m();
    let factor = (p * (p - 1)) as f64;
    let mut hess = vec![vec![0.0; m]; m];
    for l in 1..=m {
        for kappa in l..=m {
            let val = nested_eval(&cfg.thetas, w, p - 2, |k0| hessian_shift(l, kappa, k0));
            hess[l - 1][kappa - 1] = factor * val;
            hess[kappa - 1][l - 1] = factor * val;
        }
    }
    Ok(hess)
}

/// All exponent tuples `0 <= p_1 <= p_2 <= ... <= p_{m-1} <= degree - 2`
/// in lexicographic order.
pub fn exponent_tuples(m: usize, degree: u32) -> Vec<Vec<u32>> {
    let cap = degree.saturating_sub(2);
    let mut out = Vec::new();
    let mut cur = vec![0u32; m - 1];
    fn rec(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, lo: u32, cap: u32) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in lo..=cap {
            cur[pos] = v;
            rec(out, cur, pos + 1, v, cap);
        }
    }
    rec(&mut out, &mut cur, 0, 0, cap);
    out
}

/// The symmetric condition matrix for one exponent tuple: entry (l, kappa)
/// is the mean of the two ascending eigenvalues times the shifted theta
/// power product (the same shift pattern as the Hessian entry).
#[derive(Debug, Clone)]
pub struct ConditionMatrix {
    pub entries: Vec<Vec<f64>>,
    pub lambda_ascending: Vec<f64>,
    pub tuple: Vec<u32>,
}

/// Ratio `(x + y) / (2 sqrt(x y))` of two positive values; >= 1 with
/// equality iff x = y.
pub fn mean_ratio(x: f64, y: f64) -> f64 {
    (x + y) / (2.0 * (x * y).sqrt())
}

pub fn build_condition_matrix(
    dec: &SpectralDecomposition,
    cfg: &LyapunovConfig,
    tuple: &[u32],
) -> Result<ConditionMatrix> {
    let m = dec.m;
    if cfg.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: cfg.m(),
        });
    }
    if tuple.len() != m - 1 {
        return Err(Error::TupleOutOfRange {
            reason: format!("expected {} exponents, got {}", m - 1, tuple.len()),
        });
    }
    let cap = cfg.degree - 2;
    for i in 0..tuple.len() {
        if tuple[i] > cap {
            return Err(Error::TupleOutOfRange {
                reason: format!("p_{} = {} exceeds degree - 2 = {cap}", i + 1, tuple[i]),
            });
        }
        if i > 0 && tuple[i] < tuple[i - 1] {
            return Err(Error::TupleOutOfRange {
                reason: format!("tuple not nondecreasing at position {}", i + 1),
            });
        }
    }

    let mut entries = vec![vec![0.0; m]; m];
    for l in 1..=m {
        for kappa in l..=m {
            let mut prod = 1.0;
            for k0 in 0..(m - 1) {
                let e = tuple[k0] + hessian_shift(l, kappa, k0);
                prod *= cfg.thetas[k0].powi((e * e) as i32);
            }
            let val = 0.5
                * (dec.eigenvalues_ascending[l - 1] + dec.eigenvalues_ascending[kappa - 1])
                * prod;
            entries[l - 1][kappa - 1] = val;
            entries[kappa - 1][l - 1] = val;
        }
    }
    Ok(ConditionMatrix {
        entries,
        lambda_ascending: dec.eigenvalues_ascending.clone(),
        tuple: tuple.to_vec(),
    })
}

/// Determinant by Gaussian elimination with partial pivoting. This is the
/// in-module route for leading minors and the bordered determinants of the
/// recursion; the cofactor route lives in [`crate::oracle`].
fn det_gauss(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a[r][col]))
            .max_by(|x, y| x.1.abs().partial_cmp(&y.1.abs()).unwrap())
            .unwrap();
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = -det;
        }
        det *= a[col][col];
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

fn submatrix(rows: &[Vec<f64>], row_idx: &[usize], col_idx: &[usize]) -> Vec<Vec<f64>> {
    row_idx
        .iter()
        .map(|&r| col_idx.iter().map(|&c| rows[r][c]).collect())
        .collect()
}

/// Product of powers `prod_{k=1}^{r-2} minors[k-1]^{2^{r-k-2}}` shared by
/// the bordered determinants.
fn minor_power_product(minors: &[f64], r: usize) -> f64 {
    let mut prod = 1.0;
    for k in 1..=r.saturating_sub(2) {
        let e = 1u32 << (r - k - 2);
        prod *= minors[k - 1].powi(e as i32);
    }
    prod
}

/// Output of the minor recursion: the recursive quantities `K_l^l` for
/// l = 2..m and the leading principal minors det[1..m] computed
/// independently by elimination.
#[derive(Debug, Clone)]
pub struct MinorRecursion {
    /// `K_l^l` for l = 2..=m (index 0 holds l = 2).
    pub k_values: Vec<f64>,
    /// Leading principal minors det[1..=m].
    pub minors: Vec<f64>,
}

/// Runs the determinant recursion on a symmetric matrix:
///
/// ```text
/// K_l^2 = a_11 a_ll - a_1l^2          H_l^2 = a_11 a_2l - a_12 a_1l
/// K_l^r = K_{r-1}^{r-1} K_l^{r-1} - (H_l^{r-1})^2,  r = 3..l
/// ```
///
/// with the bordered quantities `H_l^r` for r >= 3 given by the
/// determinant of the submatrix with rows {1..r} and columns {1..r-1, l},
/// times the minor power product. Sylvester's determinant identity makes
/// `K_l^l` equal `det[l]` times that same product, which is the identity
/// the tests pin against the cofactor oracle.
pub fn minor_recursion(mat: &ConditionMatrix) -> MinorRecursion {
    minor_recursion_raw(&mat.entries)
}

/// Same recursion on a plain symmetric matrix.
pub fn minor_recursion_raw(a: &[Vec<f64>]) -> MinorRecursion {
    let m = a.len();
    let minors: Vec<f64> = (1..=m)
        .map(|k| {
            let idx: Vec<usize> = (0..k).collect();
            det_gauss(&submatrix(a, &idx, &idx))
        })
        .collect();

    // K_r^r for r = 2..=m, filled in ascending order as the recursion needs
    // the earlier diagonal values.
    let mut k_diag = vec![0.0; m + 1];
    let mut k_values = Vec::with_capacity(m - 1);
    for l in 2..=m {
        let li = l - 1;
        let mut k = a[0][0] * a[li][li] - a[0][li] * a[0][li];
        let mut h = a[0][0] * a[1][li] - a[0][1] * a[0][li];
        for r in 3..=l {
            let k_next = k_diag[r - 1] * k - h * h;
            if r < l {
                // bordered determinant: rows {1..r}, columns {1..r-1, l}
                let row_idx: Vec<usize> = (0..r).collect();
                let mut col_idx: Vec<usize> = (0..r - 1).collect();
                col_idx.push(li);
                h = det_gauss(&submatrix(a, &row_idx, &col_idx)) * minor_power_product(&minors, r);
            }
            k = k_next;
        }
        k_diag[l] = k;
        k_values.push(k);
    }
    MinorRecursion { k_values, minors }
}

/// Record of the first violated recursion quantity.
#[derive(Debug, Clone)]
pub struct ConditionFailure {
    pub tuple: Vec<u32>,
    pub level: usize,
    pub value: f64,
}

/// Verdict of the condition check over all exponent tuples.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub satisfied: bool,
    pub first_failure: Option<ConditionFailure>,
    /// Smallest `K_l^l` seen before stopping.
    pub min_k: f64,
    pub tuples_checked: usize,
}

/// Checks `K_l^l > 0` for l = 2..m across every exponent tuple, in
/// lexicographic tuple order, failing fast on the first violation.
/// Requires a parabolic system (all ascending eigenvalues positive).
pub fn check_condition(
    dec: &SpectralDecomposition,
    cfg: &LyapunovConfig,
) -> Result<ConditionReport> {
    if cfg.m() != dec.m {
        return Err(Error::DimensionMismatch {
            expected: dec.m,
            got: cfg.m(),
        });
    }
    if dec.eigenvalues_ascending[0] <= 0.0 {
        // largest = a + 2b cos(pi/(m+1)), smallest = a - 2b cos(pi/(m+1))
        let largest = dec.eigenvalues[0];
        let smallest = dec.eigenvalues_ascending[0];
        return Err(Error::NotParabolic {
            lhs: 0.5 * (largest - smallest),
            a: 0.5 * (largest + smallest),
        });
    }

    let mut min_k = f64::INFINITY;
    let mut checked = 0;
    for tuple in exponent_tuples(dec.m, cfg.degree) {
        let mat = build_condition_matrix(dec, cfg, &tuple)?;
        let rec = minor_recursion(&mat);
        checked += 1;
        for (i, &k) in rec.k_values.iter().enumerate() {
            let k_eff = if k.is_finite() { k } else { f64::NEG_INFINITY };
            if k_eff < min_k {
                min_k = k_eff;
            }
            if !(k > 0.0) {
                return Ok(ConditionReport {
                    satisfied: false,
                    first_failure: Some(ConditionFailure {
                        tuple,
                        level: i + 2,
                        value: k,
                    }),
                    min_k,
                    tuples_checked: checked,
                });
            }
        }
    }
    Ok(ConditionReport {
        satisfied: true,
        first_failure: None,
        min_k,
        tuples_checked: checked,
    })
}

/// Per-tuple minimal `K_l^l`, without fail-fast; used for certificates.
pub fn condition_margins(
    dec: &SpectralDecomposition,
    cfg: &LyapunovConfig,
) -> Result<Vec<(Vec<u32>, f64)>> {
    let mut out = Vec::new();
    for tuple in exponent_tuples(dec.m, cfg.degree) {
        let mat = build_condition_matrix(dec, cfg, &tuple)?;
        let rec = minor_recursion(&mat);
        let min = rec.k_values.iter().copied().fold(f64::INFINITY, f64::min);
        out.push((tuple, min));
    }
    Ok(out)
}

/// Result of the deterministic geometric grid search for theta weights.
#[derive(Debug, Clone)]
pub enum ThetaSearch {
    /// First configuration (smallest product of thetas, lexicographic
    /// tie-break) satisfying the condition.
    Found(LyapunovConfig),
    /// Budget exhausted; carries the configuration with the largest
    /// minimal margin seen.
    Exhausted {
        best: LyapunovConfig,
        best_min_k: f64,
        evaluated: usize,
    },
}

/// Grid ratio for the theta search.
pub const THETA_GRID_RATIO: f64 = 1.05;
/// Cap on the per-component grid exponent (covers thetas up to ~17000).
pub const THETA_GRID_MAX_EXP: u32 = 200;

/// Searches `theta_k = 1.05^{j_k}`, j_k = 0..=200, in order of increasing
/// exponent sum (hence increasing theta product) with lexicographic
/// tie-break, until the condition check passes or `budget` evaluations are
/// spent. Deterministic.
pub fn theta_search(
    dec: &SpectralDecomposition,
    degree: u32,
    budget: usize,
) -> Result<ThetaSearch> {
    if degree < 2 {
        return Err(Error::DegreeTooSmall(degree));
    }
    if dec.eigenvalues_ascending[0] <= 0.0 {
        return Err(Error::ConditionFailed(
            "theta search requires a parabolic system".into(),
        ));
    }
    let n = dec.m - 1;
    let mut evaluated = 0usize;
    let mut best: Option<(LyapunovConfig, f64)> = None;

    let max_sum = THETA_GRID_MAX_EXP as usize * n;
    for total in 0..=max_sum {
        // exponent vectors with the given sum, lexicographic
        let mut stack: Vec<(Vec<u32>, usize, usize)> = vec![(Vec::new(), 0, total)];
        while let Some((prefix, pos, rest)) = stack.pop() {
            if pos == n {
                if rest != 0 {
                    continue;
                }
                let thetas: Vec<f64> = prefix
                    .iter()
                    .map(|&j| THETA_GRID_RATIO.powi(j as i32))
                    .collect();
                let cfg = LyapunovConfig::new(degree, thetas)?;
                let report = check_condition(dec, &cfg)?;
                evaluated += 1;
                if report.satisfied {
                    return Ok(ThetaSearch::Found(cfg));
                }
                let better = match &best {
                    Some((_, bk)) => report.min_k > *bk,
                    None => true,
                };
                if better {
                    best = Some((cfg, report.min_k));
                }
                if evaluated >= budget {
                    let (bcfg, bk) = best.take().expect("at least one evaluation recorded");
                    return Ok(ThetaSearch::Exhausted {
                        best: bcfg,
                        best_min_k: bk,
                        evaluated,
                    });
                }
                continue;
            }
            // push in reverse so the stack pops ascending values first
            let hi = rest.min(THETA_GRID_MAX_EXP as usize);
            for v in (0..=hi).rev() {
                let mut p = prefix.clone();
                p.push(v as u32);
                stack.push((p, pos + 1, rest - v));
            }
        }
    }
    match best {
        Some((bcfg, bk)) => Ok(ThetaSearch::Exhausted {
            best: bcfg,
            best_min_k: bk,
            evaluated,
        }),
        None => Err(Error::ConditionFailed("empty theta grid".into())),
    }
}

/// Audit record for a certified configuration: system, degree, weights,
/// and the minimal recursion margin per exponent tuple.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub m: usize,
    pub a: f64,
    pub b: f64,
    pub degree: u32,
    pub thetas: Vec<f64>,
    pub per_tuple_min_k: Vec<(Vec<u32>, f64)>,
    pub min_k: f64,
}

impl Certificate {
    pub fn build(
        sys: &ToeplitzSystem,
        dec: &SpectralDecomposition,
        cfg: &LyapunovConfig,
    ) -> Result<Self> {
        let per_tuple = condition_margins(dec, cfg)?;
        let min_k = per_tuple
            .iter()
            .map(|(_, k)| *k)
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            m: sys.m(),
            a: sys.a(),
            b: sys.b(),
            degree: cfg.degree(),
            thetas: cfg.thetas().to_vec(),
            per_tuple_min_k: per_tuple,
            min_k,
        })
    }

    pub fn satisfied(&self) -> bool {
        self.min_k > 0.0
    }
}

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "lyapunov positivity certificate")?;
        writeln!(f, "m = {}", self.m)?;
        writeln!(f, "a = {}", self.a)?;
        writeln!(f, "b = {}", self.b)?;
        writeln!(f, "p_m = {}", self.degree)?;
        let th: Vec<String> = self.thetas.iter().map(|t| format!("{t:.12}")).collect();
        writeln!(f, "theta = {}", th.join(", "))?;
        writeln!(f, "tuples = {}", self.per_tuple_min_k.len())?;
        for (tuple, min_k) in &self.per_tuple_min_k {
            let ts: Vec<String> = tuple.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  tuple ({}): min K = {min_k:.6e}", ts.join(","))?;
        }
        writeln!(f, "min K over all tuples = {:.6e}", self.min_k)?;
        write!(
            f,
            "result = {}",
            if self.satisfied() {
                "SATISFIED"
            } else {
                "VIOLATED"
            }
        )
    }
}
