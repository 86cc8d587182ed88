//! Validated simulation runs with monitors, the Gronwall fit, the
//! two-formulation cross-check, and CSV output.

use super::grid::{sup_norm, BoundarySpec, Mesh1D};
use super::{InitialData, Problem, SimState};
use crate::error::{Error, Result};
use crate::lyapunov::{check_condition, eval_h, LyapunovConfig};
use crate::reactions::ReactionSpec;
use crate::regions::{boundary_compat, membership, RegionSpec, DEFAULT_MEMBERSHIP_TOL};
use crate::spectral::ToeplitzSystem;

/// Everything a validated run needs. `dt = None` defaults to the mesh
/// spacing h.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub sys: ToeplitzSystem,
    pub region: RegionSpec,
    pub reaction: ReactionSpec,
    pub bc: BoundarySpec,
    pub lyapunov: LyapunovConfig,
    pub mesh: Mesh1D,
    pub t_final: f64,
    pub dt: Option<f64>,
    pub sample_every: usize,
    pub initial: InitialData,
}

/// One monitor row.
#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    /// Domain average of the Lyapunov polynomial over the transformed
    /// fields (clamped at zero from below).
    pub l: f64,
    /// `l^{1/p_m}`.
    pub z: f64,
    /// Sum over components of the sup norm of the transformed fields.
    pub supnorm: f64,
    /// Spatial minimum of each signed transformed component.
    pub minw: Vec<f64>,
    /// Domain average of each physical component.
    pub mass: Vec<f64>,
}

/// Fitted constants of the per-step differential inequality
/// `p_m dZ/dt <= c6 Z + c8`: least squares, then c8 lifted by the largest
/// positive residual so the pair bounds every step, then verified with
/// slack 1e-9.
#[derive(Debug, Clone, Copy)]
pub struct GronwallFit {
    pub c6: f64,
    pub c8: f64,
    /// Largest violation of the lifted bound (nonpositive by
    /// construction, up to roundoff).
    pub max_violation: f64,
}

pub const GRONWALL_SLACK: f64 = 1e-9;

/// Full run record.
#[derive(Debug)]
pub struct SimResult {
    pub samples: Vec<Sample>,
    /// (t, L, Z) at every accepted step including t = 0.
    pub series: Vec<(f64, f64, f64)>,
    pub gronwall: Option<GronwallFit>,
    pub blow_up: Option<f64>,
    /// Minimum signed transformed value per component over all nodes and
    /// steps.
    pub min_signed_w: Vec<f64>,
    pub steps: usize,
    pub final_state: SimState,
}

fn clamped_h(cfg: &LyapunovConfig, w_node: &mut Vec<f64>, w: &[Vec<f64>], j: usize) -> f64 {
    for (l, field) in w.iter().enumerate() {
        let v = field[j];
        if !v.is_finite() {
            return f64::INFINITY;
        }
        w_node[l] = v.max(0.0);
    }
    eval_h(cfg, w_node).expect("clamped state is finite and nonnegative")
}

fn lyapunov_average(cfg: &LyapunovConfig, mesh: &Mesh1D, w: &[Vec<f64>]) -> f64 {
    let mut w_node = vec![0.0; w.len()];
    let field: Vec<f64> = (0..mesh.n_nodes())
        .map(|j| clamped_h(cfg, &mut w_node, w, j))
        .collect();
    mesh.average(&field)
}

fn record_sample(cfg: &LyapunovConfig, problem: &Problem, state: &SimState) -> Sample {
    let l = lyapunov_average(cfg, &problem.mesh, &state.w);
    let z = l.powf(1.0 / cfg.degree() as f64);
    let supnorm: f64 = state.w.iter().map(|f| sup_norm(f)).sum();
    let minw: Vec<f64> = state
        .w
        .iter()
        .map(|f| f.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let mass: Vec<f64> = state.u.iter().map(|f| problem.mesh.average(f)).collect();
    Sample {
        t: state.t,
        l,
        z,
        supnorm,
        minw,
        mass,
    }
}

/// Least-squares fit of `y = c6 x + c8` over the step slopes, lifted into
/// a true bound.
pub fn fit_gronwall(series: &[(f64, f64, f64)], degree: u32) -> Option<GronwallFit> {
    if series.len() < 2 {
        return None;
    }
    let p = degree as f64;
    let mut xs = Vec::with_capacity(series.len() - 1);
    let mut ys = Vec::with_capacity(series.len() - 1);
    for win in series.windows(2) {
        let (t0, _, z0) = win[0];
        let (t1, _, z1) = win[1];
        let dt = t1 - t0;
        if dt <= 0.0 {
            continue;
        }
        xs.push(z0);
        ys.push(p * (z1 - z0) / dt);
    }
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    let (c6, mut c8) = if det.abs() > 1e-30 * n * sxx.max(1.0) {
        ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
    } else {
        (0.0, ys.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    };
    if !c6.is_finite() || !c8.is_finite() {
        return None;
    }
    let lift = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (c6 * x + c8))
        .fold(0.0f64, f64::max);
    c8 += lift;
    let max_violation = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (c6 * x + c8))
        .fold(f64::NEG_INFINITY, f64::max);
    Some(GronwallFit {
        c6,
        c8,
        max_violation,
    })
}

/// Shared validation: parabolicity, boundary compatibility, the
/// positivity condition for the chosen weights, and nodewise region
/// membership of the initial data. Returns the assembled problem and
/// initial state.
fn validate(spec: &RunSpec) -> Result<(Problem, SimState)> {
    if !spec.sys.is_parabolic() {
        let b_term =
            2.0 * spec.sys.b() * (std::f64::consts::PI / (spec.sys.m() as f64 + 1.0)).cos();
        return Err(Error::NotParabolic {
            lhs: b_term,
            a: spec.sys.a(),
        });
    }
    if !(spec.t_final > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "t_final must be positive, got {}",
            spec.t_final
        )));
    }
    if spec.lyapunov.m() != spec.sys.m() {
        return Err(Error::DimensionMismatch {
            expected: spec.sys.m(),
            got: spec.lyapunov.m(),
        });
    }

    let problem = Problem::new(
        spec.sys,
        spec.region,
        spec.reaction.clone(),
        spec.bc.clone(),
        spec.mesh,
    )?;

    let beta = spec.bc.beta_vector();
    let compat = boundary_compat(&spec.region, &problem.dec, &beta, DEFAULT_MEMBERSHIP_TOL)?;
    if !compat.inside {
        return Err(Error::BoundaryIncompatible(format!(
            "worst signed margin {:.3e}",
            compat.min_margin()
        )));
    }

    let report = check_condition(&problem.dec, &spec.lyapunov)?;
    if !report.satisfied {
        let failure = report.first_failure.expect("failure recorded");
        return Err(Error::ConditionFailed(format!(
            "K = {:.3e} at level {} tuple {:?}",
            failure.value, failure.level, failure.tuple
        )));
    }

    let state = SimState::new(&problem, &spec.initial)?;
    for j in 0..problem.mesh.n_nodes() {
        let u_node: Vec<f64> = (0..problem.m()).map(|k| state.u[k][j]).collect();
        let rep = membership(&spec.region, &problem.dec, &u_node, DEFAULT_MEMBERSHIP_TOL)?;
        if !rep.inside {
            return Err(Error::RegionMembershipFailed(format!(
                "node {j}: worst signed margin {:.3e}",
                rep.min_margin()
            )));
        }
    }
    Ok((problem, state))
}

/// Validates the configuration (parabolicity, region membership of the
/// initial data at every node, boundary compatibility, the positivity
/// condition for the Lyapunov configuration), then integrates to
/// `t_final` or blow-up, recording monitors.
pub fn run(spec: &RunSpec) -> Result<SimResult> {
    let (problem, mut state) = validate(spec)?;

    let dt = spec.dt.unwrap_or_else(|| spec.mesh.h());
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let sample_every = spec.sample_every.max(1);

    let mut samples = Vec::new();
    let mut series = Vec::new();
    let mut min_signed_w = vec![f64::INFINITY; problem.m()];

    let note_state = |state: &SimState,
                      samples: &mut Vec<Sample>,
                      series: &mut Vec<(f64, f64, f64)>,
                      min_signed_w: &mut [f64],
                      force_sample: bool| {
        let sample = record_sample(&spec.lyapunov, &problem, state);
        series.push((sample.t, sample.l, sample.z));
        for (l, &mw) in sample.minw.iter().enumerate() {
            if mw < min_signed_w[l] {
                min_signed_w[l] = mw;
            }
        }
        if force_sample || state.steps % sample_every == 0 {
            samples.push(sample);
        }
    };

    note_state(&state, &mut samples, &mut series, &mut min_signed_w, true);
    while state.t < spec.t_final - 1e-12 && state.blow_up.is_none() {
        let step_dt = dt.min(spec.t_final - state.t);
        problem.step(&mut state, step_dt)?;
        let last = state.t >= spec.t_final - 1e-12 || state.blow_up.is_some();
        note_state(&state, &mut samples, &mut series, &mut min_signed_w, last);
    }

    let gronwall = if state.blow_up.is_none() {
        fit_gronwall(&series, spec.lyapunov.degree())
    } else {
        None
    };

    Ok(SimResult {
        samples,
        series,
        gronwall,
        blow_up: state.blow_up,
        min_signed_w,
        steps: state.steps,
        final_state: state,
    })
}

/// Discrepancy between the decoupled (transformed) and coupled (physical)
/// integrations of the same problem, measured in physical coordinates over
/// all steps, nodes, and components.
#[derive(Debug, Clone, Copy)]
pub struct CrossCheckReport {
    pub max_discrepancy: f64,
    pub at_time: f64,
    pub steps: usize,
}

/// Integrates the same problem once in transformed coordinates and once in
/// physical coordinates (full matrix coupling in the diffusion stencil)
/// and reports the sup discrepancy after mapping both to physical fields.
/// Same validation as [`run`].
pub fn cross_check(spec: &RunSpec) -> Result<CrossCheckReport> {
    if !spec.bc.is_uniform_kind() {
        return Err(Error::InvalidBoundary(
            "cross-check requires a uniform boundary kind".into(),
        ));
    }
    let (problem, _) = validate(spec)?;
    cross_check_with_problem(&problem, spec)
}

/// Cross-check against a caller-supplied problem (tests use this to insert
/// a deliberately corrupted decomposition as a negative control).
pub fn cross_check_with_problem(problem: &Problem, spec: &RunSpec) -> Result<CrossCheckReport> {
    let mut state = SimState::new(problem, &spec.initial)?;
    let mut u_coupled = state.u.clone();

    let dt = spec.dt.unwrap_or_else(|| spec.mesh.h());
    let mut max_disc = 0.0f64;
    let mut at_time = 0.0;
    let mut steps = 0;
    let mut t = 0.0;
    while t < spec.t_final - 1e-12 {
        let step_dt = dt.min(spec.t_final - t);
        problem.step(&mut state, step_dt)?;
        problem.step_coupled(&mut u_coupled, step_dt)?;
        t += step_dt;
        steps += 1;
        for k in 0..problem.m() {
            for j in 0..problem.mesh.n_nodes() {
                let d = (state.u[k][j] - u_coupled[k][j]).abs();
                if d > max_disc {
                    max_disc = d;
                    at_time = t;
                }
            }
        }
        if state.blow_up.is_some() {
            break;
        }
    }
    Ok(CrossCheckReport {
        max_discrepancy: max_disc,
        at_time,
        steps,
    })
}

/// Writes the monitor rows as CSV with the fixed header
/// `t,L,Z,supnorm,minw_1..minw_m,mass_1..mass_m`. The float format is
/// fixed so identical runs produce byte-identical files.
pub fn write_csv<W: std::io::Write>(
    result: &SimResult,
    m: usize,
    out: &mut W,
) -> std::io::Result<()> {
    let mut header = String::from("t,L,Z,supnorm");
    for l in 1..=m {
        header.push_str(&format!(",minw_{l}"));
    }
    for l in 1..=m {
        header.push_str(&format!(",mass_{l}"));
    }
    writeln!(out, "{header}")?;
    for s in &result.samples {
        let mut row = format!("{:.10e},{:.10e},{:.10e},{:.10e}", s.t, s.l, s.z, s.supnorm);
        for v in &s.minw {
            row.push_str(&format!(",{v:.10e}"));
        }
        for v in &s.mass {
            row.push_str(&format!(",{v:.10e}"));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lyapunov::{theta_search, ThetaSearch};
    use crate::reactions::builtin_family;
    use crate::simulate::BcKind;
    use crate::spectral::decompose;

    fn certified_config(sys: &ToeplitzSystem, degree: u32) -> LyapunovConfig {
        let dec = decompose(sys);
        match theta_search(&dec, degree, 20_000).unwrap() {
            ThetaSearch::Found(cfg) => cfg,
            ThetaSearch::Exhausted { .. } => panic!("search must succeed at desk scale"),
        }
    }

    fn builtin_spec(m: usize, q: u32, seed: u64) -> RunSpec {
        let sys = if m == 2 {
            ToeplitzSystem::new(2, 3.0, 1.0).unwrap()
        } else {
            ToeplitzSystem::new(m, 2.0, 0.5).unwrap()
        };
        let lyapunov = certified_config(&sys, 2);
        RunSpec {
            sys,
            region: RegionSpec::all_l(m).unwrap(),
            reaction: builtin_family(m, q).unwrap(),
            bc: BoundarySpec::uniform(BcKind::Neumann, m).unwrap(),
            lyapunov,
            mesh: Mesh1D::new(1.0, 64).unwrap(),
            t_final: 1.0,
            dt: None,
            sample_every: 8,
            initial: InitialData::SeededSmooth {
                seed,
                base: 1.0,
                amplitude: 0.5,
            },
        }
    }

    #[test]
    fn run_validates_preconditions() {
        let mut spec = builtin_spec(2, 1, 3);

        // out-of-region data
        spec.initial = InitialData::UniformW(vec![-1.0, 1.0]);
        match run(&spec) {
            Err(Error::RegionMembershipFailed(_)) => {}
            other => panic!("expected membership failure, got {other:?}"),
        }
        spec.initial = InitialData::SeededSmooth {
            seed: 3,
            base: 1.0,
            amplitude: 0.5,
        };

        // non-parabolic system
        let bad = RunSpec {
            sys: ToeplitzSystem::new(9, 1.0, 1.0).unwrap(),
            region: RegionSpec::all_l(9).unwrap(),
            reaction: builtin_family(9, 1).unwrap(),
            bc: BoundarySpec::uniform(BcKind::Neumann, 9).unwrap(),
            lyapunov: LyapunovConfig::new(2, vec![1.5; 8]).unwrap(),
            mesh: spec.mesh,
            t_final: 0.1,
            dt: None,
            sample_every: 1,
            initial: InitialData::UniformW(vec![1.0; 9]),
        };
        match run(&bad) {
            Err(Error::NotParabolic { .. }) => {}
            other => panic!("expected parabolicity failure, got {other:?}"),
        }

        // failing condition weights
        let mut bad_theta = builtin_spec(2, 1, 3);
        bad_theta.lyapunov = LyapunovConfig::new(2, vec![1.0]).unwrap();
        match run(&bad_theta) {
            Err(Error::ConditionFailed(_)) => {}
            other => panic!("expected condition failure, got {other:?}"),
        }

        // incompatible boundary data
        let mut bad_beta = builtin_spec(2, 1, 3);
        bad_beta.bc = BoundarySpec::new(vec![
            BcKind::Robin {
                alpha: 0.5,
                beta: 0.0,
            },
            BcKind::Robin {
                alpha: 0.5,
                beta: 1.0,
            },
        ])
        .unwrap();
        match run(&bad_beta) {
            Err(Error::BoundaryIncompatible(_)) => {}
            other => panic!("expected boundary incompatibility, got {other:?}"),
        }
    }

    #[test]
    fn builtin_run_stays_in_region_with_bounded_functional() {
        let spec = builtin_spec(2, 1, 7);
        let result = run(&spec).unwrap();
        assert!(result.blow_up.is_none());
        for (l, &mw) in result.min_signed_w.iter().enumerate() {
            assert!(mw >= -1e-8, "component {} dipped to {mw}", l + 1);
        }
        assert!(result.series.iter().all(|(_, l, _)| l.is_finite()));
        let fit = result.gronwall.expect("fit exists");
        assert!(fit.c6.is_finite() && fit.c8.is_finite());
        assert!(fit.max_violation <= GRONWALL_SLACK);
    }

    #[test]
    fn diffusion_only_dirichlet_decreases_the_functional() {
        let sys = ToeplitzSystem::new(2, 3.0, 1.0).unwrap();
        let mesh = Mesh1D::new(1.0, 64).unwrap();
        let sine: Vec<f64> = (0..mesh.n_nodes())
            .map(|i| (std::f64::consts::PI * mesh.x(i) / mesh.length()).sin())
            .collect();
        let spec = RunSpec {
            sys,
            region: RegionSpec::all_l(2).unwrap(),
            reaction: ReactionSpec::zero(2).unwrap(),
            bc: BoundarySpec::uniform(BcKind::Dirichlet, 2).unwrap(),
            lyapunov: certified_config(&sys, 2),
            mesh,
            t_final: 0.5,
            dt: Some(0.005),
            sample_every: 10,
            initial: InitialData::NodalW(vec![sine.clone(), sine]),
        };
        let result = run(&spec).unwrap();
        for win in result.series.windows(2) {
            assert!(
                win[1].1 <= win[0].1 + 1e-10,
                "functional rose from {} to {} at t = {}",
                win[0].1,
                win[1].1,
                win[1].0
            );
        }
    }

    #[test]
    fn neumann_masses_are_conserved_without_reaction() {
        let sys = ToeplitzSystem::new(2, 3.0, 1.0).unwrap();
        let mut spec = builtin_spec(2, 1, 5);
        spec.sys = sys;
        spec.reaction = ReactionSpec::zero(2).unwrap();
        let result = run(&spec).unwrap();
        let first = &result.samples[0];
        let last = result.samples.last().unwrap();
        for k in 0..2 {
            assert!(
                (last.mass[k] - first.mass[k]).abs() <= 1e-10,
                "mass {k} drifted from {} to {}",
                first.mass[k],
                last.mass[k]
            );
        }
    }

    #[test]
    fn weighted_mass_identity_is_second_order_per_step() {
        // with the builtin pair the combination 2 w1 + w2 dissipates:
        // d/dt avg(2 w1 + w2) = avg(2 F1 + F2) = -avg(w1 w2) <= 0,
        // and the per-step defect of that identity shrinks ~4x when dt halves
        let defect = |dt: f64| -> (f64, f64) {
            let sys = ToeplitzSystem::new(2, 3.0, 1.0).unwrap();
            let mesh = Mesh1D::new(1.0, 64).unwrap();
            let problem = Problem::new(
                sys,
                RegionSpec::all_l(2).unwrap(),
                builtin_family(2, 1).unwrap(),
                BoundarySpec::uniform(BcKind::Neumann, 2).unwrap(),
                mesh,
            )
            .unwrap();
            let init = InitialData::SeededSmooth {
                seed: 5,
                base: 1.0,
                amplitude: 0.5,
            };
            let mut state = SimState::new(&problem, &init).unwrap();
            let combo = |s: &SimState| 2.0 * mesh.average(&s.w[0]) + mesh.average(&s.w[1]);
            let prod_avg = |s: &SimState| {
                let prod: Vec<f64> = s.w[0].iter().zip(&s.w[1]).map(|(a, b)| a * b).collect();
                mesh.average(&prod)
            };
            let mut worst_defect = 0.0f64;
            let mut worst_gain = f64::NEG_INFINITY;
            while state.t < 0.25 - 1e-12 {
                let before = combo(&state);
                let rate_before = -prod_avg(&state);
                problem.step(&mut state, dt).unwrap();
                let after = combo(&state);
                let rate_after = -prod_avg(&state);
                let lhs = (after - before) / dt;
                let rhs = 0.5 * (rate_before + rate_after);
                worst_defect = worst_defect.max((lhs - rhs).abs());
                worst_gain = worst_gain.max(after - before);
            }
            (worst_defect, worst_gain)
        };
        let (d1, gain1) = defect(1.0 / 32.0);
        let (d2, _) = defect(1.0 / 64.0);
        assert!(gain1 <= 1e-10, "weighted mass rose by {gain1}");
        let ratio = d1 / d2;
        assert!(
            (2.5..8.0).contains(&ratio),
            "defect ratio {ratio} (d1 = {d1}, d2 = {d2}) not second order"
        );
    }

    #[test]
    fn cross_check_agreement_and_canary() {
        let mut spec = builtin_spec(2, 1, 9);
        spec.t_final = 0.5;
        let report = cross_check(&spec).unwrap();
        assert!(
            report.max_discrepancy <= 1e-8,
            "paths diverged by {}",
            report.max_discrepancy
        );

        // zero reaction, homogeneous absorbing ends: same agreement
        let mut diff_spec = builtin_spec(2, 1, 9);
        diff_spec.reaction = ReactionSpec::zero(2).unwrap();
        diff_spec.bc = BoundarySpec::uniform(BcKind::Dirichlet, 2).unwrap();
        diff_spec.t_final = 0.5;
        let report = cross_check(&diff_spec).unwrap();
        assert!(report.max_discrepancy <= 1e-8);

        // uniform robin ends exercise the inhomogeneous source terms of
        // both boundary encodings
        let mut robin_spec = builtin_spec(2, 1, 9);
        robin_spec.bc = BoundarySpec::new(vec![
            BcKind::Robin {
                alpha: 0.4,
                beta: 0.5,
            },
            BcKind::Robin {
                alpha: 0.4,
                beta: 0.3,
            },
        ])
        .unwrap();
        robin_spec.t_final = 0.5;
        let report = cross_check(&robin_spec).unwrap();
        assert!(
            report.max_discrepancy <= 1e-8,
            "robin paths diverged by {}",
            report.max_discrepancy
        );

        // negative control: swapping the scalar diffusivities breaks the
        // equivalence visibly
        let mut problem = Problem::new(
            spec.sys,
            spec.region,
            spec.reaction.clone(),
            spec.bc.clone(),
            spec.mesh,
        )
        .unwrap();
        problem.dec.eigenvalues_ascending.swap(0, 1);
        let report = cross_check_with_problem(&problem, &spec).unwrap();
        assert!(
            report.max_discrepancy > 1e-3,
            "canary failed to fire: {}",
            report.max_discrepancy
        );
    }

    #[test]
    fn mirrored_and_mixed_regions_evolve_consistently() {
        // the transformed dynamics do not depend on the region signs (the
        // reaction is region-relative); only the physical reconstruction
        // does, so the all-flipped run must produce exactly negated
        // physical fields
        let spec_plus = builtin_spec(2, 1, 21);
        let mut spec_minus = spec_plus.clone();
        spec_minus.region = RegionSpec::all_l(2).unwrap().complement();
        let plus = run(&spec_plus).unwrap();
        let minus = run(&spec_minus).unwrap();
        for l in 0..2 {
            for j in 0..spec_plus.mesh.n_nodes() {
                assert_eq!(
                    plus.final_state.u[l][j], -minus.final_state.u[l][j],
                    "component {l} node {j}"
                );
                assert_eq!(plus.final_state.w[l][j], minus.final_state.w[l][j]);
            }
        }

        // the coupled formulation must track the decoupled one in a mixed
        // region as well (signs enter its reaction pullback and boundary
        // data)
        let mut spec_mixed = spec_plus.clone();
        spec_mixed.region = RegionSpec::from_l_indices(2, &[1]).unwrap();
        spec_mixed.t_final = 0.5;
        let report = cross_check(&spec_mixed).unwrap();
        assert!(
            report.max_discrepancy <= 1e-8,
            "mixed-region paths diverged by {}",
            report.max_discrepancy
        );
    }

    #[test]
    fn gronwall_fit_bounds_synthetic_series() {
        // Z(t) = exp(t) satisfies p dZ/dt = p Z exactly; the fit must bound it
        let series: Vec<(f64, f64, f64)> = (0..100)
            .map(|i| {
                let t = i as f64 * 0.01;
                let z = t.exp();
                (t, z * z, z)
            })
            .collect();
        let fit = fit_gronwall(&series, 2).unwrap();
        assert!(fit.max_violation <= GRONWALL_SLACK);
        // constant series degenerates gracefully
        let flat: Vec<(f64, f64, f64)> = (0..10).map(|i| (i as f64, 4.0, 2.0)).collect();
        let fit = fit_gronwall(&flat, 2).unwrap();
        assert!(fit.max_violation <= GRONWALL_SLACK);
    }

    #[test]
    fn csv_output_is_deterministic_and_well_formed() {
        let spec = builtin_spec(2, 1, 13);
        let result = run(&spec).unwrap();
        let mut buf1 = Vec::new();
        write_csv(&result, 2, &mut buf1).unwrap();
        let result2 = run(&spec).unwrap();
        let mut buf2 = Vec::new();
        write_csv(&result2, 2, &mut buf2).unwrap();
        assert_eq!(buf1, buf2);
        let text = String::from_utf8(buf1).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,L,Z,supnorm,minw_1,minw_2,mass_1,mass_2"
        );
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 8);
    }
}
