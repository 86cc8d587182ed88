//! Polynomial reaction families in transformed coordinates and sampling
//! falsifiers for the structural assumptions.
//!
//! Reactions are defined on the nonnegative orthant of the transformed
//! (decoupled) variables, where the assumptions live:
//!
//! - quasipositivity: `F_l >= 0` on the face `w_l = 0`;
//! - polynomial growth: `|F_l| <= C1 (1 + sum w)^N`;
//! - the weighted dissipation inequality
//!   `sum_{l<m} D_l F_l + F_m <= C2 (1 + sum w)`.
//!
//! The checkers sample; they falsify, they do not prove.

use crate::error::{Error, Result};
use crate::spectral::SpectralDecomposition;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One term `coeff * w_1^{e_1} ... w_m^{e_m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub exps: Vec<u32>,
}

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    fn eval(&self, w: &[f64]) -> f64 {
        let mut v = self.coeff;
        for (x, &e) in w.iter().zip(&self.exps) {
            if e > 0 {
                v *= x.powi(e as i32);
            }
        }
        v
    }
}

/// A vector-valued polynomial map on nonnegative m-vectors, stored as
/// per-component monomial lists, with a declared growth degree bounding
/// the total degree of every term.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionSpec {
    m: usize,
    components: Vec<Vec<Monomial>>,
    growth_degree: u32,
}

impl ReactionSpec {
    pub fn new(m: usize, components: Vec<Vec<Monomial>>) -> Result<Self> {
        if m < 2 {
            return Err(Error::TooFewComponents(m));
        }
        if components.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: components.len(),
            });
        }
        let mut max_degree = 0;
        for (ci, comp) in components.iter().enumerate() {
            for mono in comp {
                if mono.exps.len() != m {
                    return Err(Error::InvalidReaction(format!(
                        "monomial in component {} has {} exponents, expected {m}",
                        ci + 1,
                        mono.exps.len()
                    )));
                }
                if !mono.coeff.is_finite() {
                    return Err(Error::InvalidReaction(format!(
                        "non-finite coefficient in component {}",
                        ci + 1
                    )));
                }
                max_degree = max_degree.max(mono.total_degree());
            }
        }
        Ok(Self {
            m,
            components,
            growth_degree: max_degree,
        })
    }

    /// The zero map.
    pub fn zero(m: usize) -> Result<Self> {
        Self::new(m, vec![Vec::new(); m])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Declared polynomial growth degree (max total degree of any term).
    pub fn growth_degree(&self) -> u32 {
        self.growth_degree
    }

    pub fn components(&self) -> &[Vec<Monomial>] {
        &self.components
    }

    pub fn eval_component(&self, l: usize, w: &[f64]) -> f64 {
        self.components[l].iter().map(|mono| mono.eval(w)).sum()
    }

    pub fn eval(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: w.len(),
            });
        }
        Ok((0..self.m).map(|l| self.eval_component(l, w)).collect())
    }

    /// Sum of absolute coefficients, an explicit growth constant:
    /// `|F_l| <= C1 (1 + sum w)^N` holds with this C1 on the orthant.
    pub fn coeff_bound(&self) -> f64 {
        self.components
            .iter()
            .map(|comp| comp.iter().map(|mono| mono.coeff.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// The builtin family: `F_l = -w_l w_m^q` for l < m and
/// `F_m = (sum_{l<m} w_l) w_m^q`. Quasipositive by construction, total
/// degree q+1, and the weighted sum with D = (2,...,2) is `-sum_{l<m} w_l
/// w_m^q <= 0`.
pub fn builtin_family(m: usize, q: u32) -> Result<ReactionSpec> {
    if m < 2 {
        return Err(Error::TooFewComponents(m));
    }
    if q < 1 {
        return Err(Error::InvalidReaction("builtin family needs q >= 1".into()));
    }
    let mut components = Vec::with_capacity(m);
    for l in 0..m - 1 {
        let mut exps = vec![0u32; m];
        exps[l] = 1;
        exps[m - 1] += q;
        components.push(vec![Monomial { coeff: -1.0, exps }]);
    }
    let mut last = Vec::with_capacity(m - 1);
    for l in 0..m - 1 {
        let mut exps = vec![0u32; m];
        exps[l] = 1;
        exps[m - 1] += q;
        last.push(Monomial { coeff: 1.0, exps });
    }
    components.push(last);
    ReactionSpec::new(m, components)
}

/// Worst case found by a sampling check.
#[derive(Debug, Clone)]
pub struct SampleReport {
    pub passed: bool,
    /// Most violating value (min F_l for quasipositivity, max LHS-RHS for
    /// the inequality checks).
    pub worst: f64,
    pub worst_component: usize,
    pub worst_point: Vec<f64>,
    pub samples: usize,
}

const FACE_TOL: f64 = 1e-12;

fn sample_box(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Quasipositivity check: samples points on each face `w_l = 0` and
/// requires `F_l >= -1e-12` there. Reports the worst violation.
pub fn check_a1(spec: &ReactionSpec, n_samples: usize, box_hi: f64, seed: u64) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = spec.m();
    let mut worst = f64::INFINITY;
    let mut worst_component = 0;
    let mut worst_point = vec![0.0; m];
    for l in 0..m {
        for _ in 0..n_samples {
            let mut w = sample_box(&mut rng, m, 0.0, box_hi);
            w[l] = 0.0;
            let v = spec.eval_component(l, &w);
            if v < worst {
                worst = v;
                worst_component = l + 1;
                worst_point = w;
            }
        }
    }
    SampleReport {
        passed: worst >= -FACE_TOL,
        worst,
        worst_component,
        worst_point,
        samples: n_samples * m,
    }
}

/// Polynomial growth check with `C1 = ` sum of absolute coefficients and
/// `N = ` the declared growth degree: samples `|F_l| <= C1 (1 + sum w)^N`.
pub fn check_a2(spec: &ReactionSpec, n_samples: usize, box_hi: f64, seed: u64) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = spec.m();
    let c1 = spec.coeff_bound();
    let n = spec.growth_degree();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_component = 0;
    let mut worst_point = vec![0.0; m];
    for _ in 0..n_samples {
        let w = sample_box(&mut rng, m, 0.0, box_hi);
        let bound = c1 * (1.0 + w.iter().sum::<f64>()).powi(n as i32);
        for l in 0..m {
            let margin = spec.eval_component(l, &w).abs() - bound;
            if margin > worst {
                worst = margin;
                worst_component = l + 1;
                worst_point = w.clone();
            }
        }
    }
    SampleReport {
        passed: worst <= FACE_TOL,
        worst,
        worst_component,
        worst_point,
        samples: n_samples,
    }
}

/// Weighted dissipation check: samples
/// `sum_{l<m} D_l F_l + F_m <= C2 (1 + sum w)` and reports the worst
/// margin (LHS - RHS; positive means violated).
pub fn check_a3(
    spec: &ReactionSpec,
    d: &[f64],
    c2: f64,
    n_samples: usize,
    box_hi: f64,
    seed: u64,
) -> Result<SampleReport> {
    let m = spec.m();
    if d.len() != m - 1 {
        return Err(Error::DimensionMismatch {
            expected: m - 1,
            got: d.len(),
        });
    }
    for (i, &di) in d.iter().enumerate() {
        if !(di > 0.0) {
            return Err(Error::InvalidReaction(format!(
                "weight D_{} must be positive, got {di}",
                i + 1
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_point = vec![0.0; m];
    for _ in 0..n_samples {
        let w = sample_box(&mut rng, m, 0.0, box_hi);
        let mut lhs = spec.eval_component(m - 1, &w);
        for l in 0..m - 1 {
            lhs += d[l] * spec.eval_component(l, &w);
        }
        let rhs = c2 * (1.0 + w.iter().sum::<f64>());
        let margin = lhs - rhs;
        if margin > worst {
            worst = margin;
            worst_point = w;
        }
    }
    Ok(SampleReport {
        passed: worst <= FACE_TOL,
        worst,
        worst_component: m,
        worst_point,
        samples: n_samples,
    })
}

/// The reaction map pulled back to physical coordinates: evaluates
/// `f(u) = V^{-1} F(V u)`, so that transforming `f` forward recovers `F`
/// identically.
#[derive(Debug, Clone)]
pub struct UReaction<'a> {
    spec: &'a ReactionSpec,
    dec: &'a SpectralDecomposition,
}

pub fn pullback_to_u<'a>(
    spec: &'a ReactionSpec,
    dec: &'a SpectralDecomposition,
) -> Result<UReaction<'a>> {
    if spec.m() != dec.m {
        return Err(Error::DimensionMismatch {
            expected: dec.m,
            got: spec.m(),
        });
    }
    Ok(UReaction { spec, dec })
}

impl UReaction<'_> {
    pub fn eval(&self, u: &[f64]) -> Result<Vec<f64>> {
        let w = self.dec.to_w(u)?;
        let f_w = self.spec.eval(&w)?;
        self.dec.to_u(&f_w)
    }
}

/// Parses the plain-text reaction format: one monomial per line,
/// `component coefficient e1 e2 ... em` (1-based component index). Blank
/// lines and `#` comments are skipped.
pub fn parse_reaction_file(src: &str, m: usize) -> Result<ReactionSpec> {
    let mut components = vec![Vec::new(); m];
    for (lineno, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != m + 2 {
            return Err(Error::InvalidReaction(format!(
                "line {}: expected {} fields (component coefficient e1..e{m}), got {}",
                lineno + 1,
                m + 2,
                tokens.len()
            )));
        }
        let comp: usize = tokens[0].parse().map_err(|_| {
            Error::InvalidReaction(format!("line {}: bad component index", lineno + 1))
        })?;
        if comp < 1 || comp > m {
            return Err(Error::InvalidReaction(format!(
                "line {}: component {comp} outside 1..={m}",
                lineno + 1
            )));
        }
        let coeff: f64 = tokens[1]
            .parse()
            .map_err(|_| Error::InvalidReaction(format!("line {}: bad coefficient", lineno + 1)))?;
        let exps: Vec<u32> = tokens[2..]
            .iter()
            .map(|t| {
                t.parse().map_err(|_| {
                    Error::InvalidReaction(format!("line {}: bad exponent", lineno + 1))
                })
            })
            .collect::<Result<_>>()?;
        components[comp - 1].push(Monomial { coeff, exps });
    }
    ReactionSpec::new(m, components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{decompose, ToeplitzSystem};
    use approx::assert_relative_eq;

    #[test]
    fn builtin_family_m2_q1() {
        let spec = builtin_family(2, 1).unwrap();
        // F = (-w1 w2, w1 w2)
        let f = spec.eval(&[2.0, 3.0]).unwrap();
        assert_eq!(f, vec![-6.0, 6.0]);
        assert_eq!(spec.growth_degree(), 2);
        // weighted sum with D = (2): 2 F1 + F2 = -w1 w2 <= 0
        assert_eq!(2.0 * f[0] + f[1], -6.0);
    }

    #[test]
    fn builtin_family_is_quasipositive() {
        for m in 2..=6 {
            for q in 1..=3 {
                let spec = builtin_family(m, q).unwrap();
                let rep = check_a1(&spec, 500, 10.0, 42);
                assert!(rep.passed, "m={m} q={q}: worst {}", rep.worst);
            }
        }
    }

    #[test]
    fn constant_negative_component_fails_a1() {
        let spec = ReactionSpec::new(
            2,
            vec![
                vec![Monomial {
                    coeff: -1.0,
                    exps: vec![0, 0],
                }],
                vec![],
            ],
        )
        .unwrap();
        let rep = check_a1(&spec, 10, 10.0, 1);
        assert!(!rep.passed);
        assert_eq!(rep.worst, -1.0);
        assert_eq!(rep.worst_component, 1);
    }

    #[test]
    fn zero_map_passes_everything() {
        let spec = ReactionSpec::zero(3).unwrap();
        assert!(check_a1(&spec, 100, 10.0, 5).passed);
        assert!(check_a2(&spec, 100, 10.0, 5).passed);
        assert!(
            check_a3(&spec, &[1.0, 1.0], 0.0, 100, 10.0, 5)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn builtin_a3_depends_on_weights() {
        let spec = builtin_family(2, 1).unwrap();
        // D = 2: LHS = -w1 w2 <= 0 <= C2 (1 + sum)
        let good = check_a3(&spec, &[2.0], 1.0, 10_000, 10.0, 7).unwrap();
        assert!(good.passed, "worst {}", good.worst);
        assert!(good.worst <= 0.0);
        // D = 0.5: LHS = +0.5 w1 w2 grows quadratically, must fail
        let bad = check_a3(&spec, &[0.5], 1.0, 10_000, 10.0, 7).unwrap();
        assert!(!bad.passed);
        assert!(bad.worst > 0.0);
    }

    #[test]
    fn a3_rejects_nonpositive_weights() {
        let spec = builtin_family(2, 1).unwrap();
        assert!(check_a3(&spec, &[0.0], 1.0, 10, 10.0, 1).is_err());
        assert!(check_a3(&spec, &[1.0, 1.0], 1.0, 10, 10.0, 1).is_err());
    }

    #[test]
    fn growth_bound_holds_by_sampling() {
        for m in 2..=4 {
            let spec = builtin_family(m, 2).unwrap();
            let rep = check_a2(&spec, 10_000, 10.0, 13);
            assert!(rep.passed, "worst {}", rep.worst);
        }
    }

    #[test]
    fn pullback_roundtrip_and_hand_value() {
        let dec = decompose(&ToeplitzSystem::new(2, 3.0, 1.0).unwrap());
        let spec = builtin_family(2, 1).unwrap();
        let f = pullback_to_u(&spec, &dec).unwrap();

        // zero map pulls back to zero
        let zero = ReactionSpec::zero(2).unwrap();
        let fz = pullback_to_u(&zero, &dec).unwrap();
        assert_eq!(fz.eval(&[1.0, -2.0]).unwrap(), vec![0.0, 0.0]);

        // transforming f forward recovers F at the transformed point
        let u = [0.4, 1.7];
        let f_u = f.eval(&u).unwrap();
        let lhs = dec.to_w(&f_u).unwrap();
        let rhs = spec.eval(&dec.to_w(&u).unwrap()).unwrap();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() <= 1e-10);
        }

        // hand value at u = (2, 1): w = (sqrt3/2, 3 sqrt3/2), w1 w2 = 9/4,
        // f = (2/3) V^T (-9/4, 9/4) = (0, 3 sqrt3 / 2)
        let f_u = f.eval(&[2.0, 1.0]).unwrap();
        assert_relative_eq!(f_u[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(f_u[1], 2.598076211353316, max_relative = 1e-12);
    }

    #[test]
    fn reaction_file_roundtrip() {
        let src = "\
# builtin m=2 q=1
1 -1.0 1 1
2  1.0 1 1
";
        let spec = parse_reaction_file(src, 2).unwrap();
        assert_eq!(spec, builtin_family(2, 1).unwrap());

        assert!(parse_reaction_file("1 1.0 1", 2).is_err()); // missing exponent
        assert!(parse_reaction_file("3 1.0 1 1", 2).is_err()); // bad component
        assert!(parse_reaction_file("1 x 1 1", 2).is_err()); // bad coefficient
    }

    #[test]
    fn pullback_roundtrip_at_a_thousand_points() {
        use rand::{Rng, SeedableRng};
        let dec = decompose(&ToeplitzSystem::new(3, 2.0, 0.5).unwrap());
        let spec = builtin_family(3, 2).unwrap();
        let f = pullback_to_u(&spec, &dec).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let u: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let lhs = dec.to_w(&f.eval(&u).unwrap()).unwrap();
            let rhs = spec.eval(&dec.to_w(&u).unwrap()).unwrap();
            let scale = rhs.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
            for (a, b) in lhs.iter().zip(&rhs) {
                assert!((a - b).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn samplers_are_deterministic() {
        let spec = builtin_family(3, 2).unwrap();
        let a = check_a1(&spec, 200, 10.0, 99);
        let b = check_a1(&spec, 200, 10.0, 99);
        assert_eq!(a.worst, b.worst);
        assert_eq!(a.worst_point, b.worst_point);
    }
}
