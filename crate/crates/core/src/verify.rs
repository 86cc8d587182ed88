//! The acceptance suite: eight property-based criteria at desk scale,
//! with pinned tolerances and fixed seeds. The `acceptance` test target
//! asserts each criterion; the CLI `verify-all` subcommand runs the same
//! functions and prints one line per criterion.

use crate::lyapunov::{
    build_condition_matrix, eval_h, exponent_tuples, grad_h, hess_h, mean_ratio, minor_recursion,
    theta_search, LyapunovConfig, ThetaSearch, THETA_GRID_RATIO,
};
use crate::oracle;
use crate::reactions::{builtin_family, Monomial, ReactionSpec};
use crate::regions::{enumerate_regions, membership, RegionSpec};
use crate::simulate::{
    cross_check, run, BcKind, BoundarySpec, GronwallFit, InitialData, Mesh1D, Problem, RunSpec,
    SimState, GRONWALL_SLACK,
};
use crate::spectral::{decompose, ToeplitzSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / got.abs().max(want.abs()).max(1e-300)
}

/// Criterion 1: closed-form spectra for 200 random parabolic systems with
/// m up to 64: eigen residuals <= 1e-10, strict ascending order, row
/// orthogonality `V V^T = ((m+1)/2) I` to 1e-10 entrywise.
pub fn criterion_spectral() -> CriterionResult {
    let clock = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst_resid = 0.0f64;
    let mut worst_orth = 0.0f64;
    let mut ordered = true;
    for _ in 0..200 {
        let m = rng.gen_range(2..=64usize);
        let (sys, dec) = loop {
            let a = rng.gen_range(0.0..10.0) + 1e-9;
            let b = rng.gen_range(0.0..10.0) + 1e-9;
            let sys = ToeplitzSystem::new(m, a, b).unwrap();
            if sys.is_parabolic() {
                break (sys, decompose(&sys));
            }
        };
        for l in 1..m {
            ordered &= dec.eigenvalues_ascending[l - 1] < dec.eigenvalues_ascending[l];
            ordered &= dec.eigenvalues[l] < dec.eigenvalues[l - 1];
        }
        for l in 1..=m {
            let v = dec.eigenvector_ascending(l);
            let av = sys.apply(v).unwrap();
            let lam = dec.eigenvalues_ascending[l - 1];
            let vmax = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            let resid = av
                .iter()
                .zip(v)
                .fold(0.0f64, |acc, (a, x)| acc.max((a - lam * x).abs()))
                / vmax;
            worst_resid = worst_resid.max(resid);
        }
        let scale = (m as f64 + 1.0) / 2.0;
        for i in 0..m {
            for j in i..m {
                let dot: f64 = (0..m).map(|k| dec.forward[i][k] * dec.forward[j][k]).sum();
                let want = if i == j { scale } else { 0.0 };
                worst_orth = worst_orth.max((dot - want).abs());
            }
        }
    }
    let elapsed = clock.elapsed().as_secs_f64();
    let passed = ordered && worst_resid <= 1e-10 && worst_orth <= 1e-10 && elapsed < 5.0;
    CriterionResult {
        id: 1,
        name: "spectral closed forms",
        passed,
        detail: format!(
            "worst residual {worst_resid:.2e}, worst orthogonality defect {worst_orth:.2e}, strict order {ordered}, {elapsed:.2}s (<5s)"
        ),
    }
}

/// Criterion 2: the recursion's top value equals
/// `det[m] * prod_k det[k]^{2^{m-k-2}}` with leading minors from the
/// cofactor oracle, within 1e-8 relative, for 50 random condition matrices
/// per m in 3..=6.
pub fn criterion_minor_recursion() -> CriterionResult {
    let clock = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for m in 3..=6usize {
        for _ in 0..50 {
            let sys =
                ToeplitzSystem::new(m, rng.gen_range(1.5..4.0), rng.gen_range(0.2..0.7)).unwrap();
            let dec = decompose(&sys);
            let degree = rng.gen_range(2..=4u32);
            let thetas: Vec<f64> = (0..m - 1).map(|_| rng.gen_range(1.0..1.12)).collect();
            let cfg = LyapunovConfig::new(degree, thetas).unwrap();
            let tuples = exponent_tuples(m, degree);
            let tuple = tuples[rng.gen_range(0..tuples.len())].clone();
            let mat = build_condition_matrix(&dec, &cfg, &tuple).unwrap();
            let rec = minor_recursion(&mat);

            let minors = oracle::leading_minors_cofactor(&mat.entries);
            let mut prod = 1.0;
            for k in 1..=m - 2 {
                prod *= minors[k - 1].powi(1 << (m - k - 2));
            }
            let want = minors[m - 1] * prod;
            worst = worst.max(rel_err(rec.k_values[m - 2], want));
            cases += 1;
        }
    }
    let elapsed = clock.elapsed().as_secs_f64();
    CriterionResult {
        id: 2,
        name: "minor recursion identity",
        passed: worst <= 1e-8 && elapsed < 10.0,
        detail: format!("{cases} matrices, worst relative error {worst:.2e}, {elapsed:.2}s (<10s)"),
    }
}

/// Criterion 3: analytic gradient within 1e-6 and Hessian within 1e-5 of
/// central differences on 100 random points per (m, degree), and the
/// theta-equal-one collapse identities exact to 1e-10.
pub fn criterion_derivatives() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut worst_grad = 0.0f64;
    let mut worst_hess = 0.0f64;
    let mut worst_collapse = 0.0f64;
    // theta range where the finite-difference oracle is well conditioned:
    // below ~0.9 a gradient component can sit orders of magnitude under
    // the polynomial's own scale and central differences drown in
    // cancellation noise; extreme weights are pinned by exact term-by-term
    // unit tests instead
    for m in 2..=5usize {
        for degree in 2..=6u32 {
            for _ in 0..100 {
                let thetas: Vec<f64> = (0..m - 1).map(|_| rng.gen_range(0.9..1.5)).collect();
                let cfg = LyapunovConfig::new(degree, thetas).unwrap();
                let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..3.0)).collect();

                let f = {
                    let cfg = cfg.clone();
                    move |x: &[f64]| eval_h(&cfg, x).unwrap()
                };
                let g = grad_h(&cfg, &w).unwrap();
                let g_fd = oracle::fd_gradient(&f, &w, 1e-5);
                for (a, b) in g.iter().zip(&g_fd) {
                    worst_grad = worst_grad.max(rel_err(*a, *b));
                }
                // Hessian against first differences of the gradient,
                // which the line above has just verified independently
                let h = hess_h(&cfg, &w).unwrap();
                let grad_fn = {
                    let cfg = cfg.clone();
                    move |x: &[f64]| grad_h(&cfg, x).unwrap()
                };
                let h_fd = oracle::fd_jacobian(&grad_fn, &w, 1e-5);
                for i in 0..m {
                    for j in 0..m {
                        worst_hess = worst_hess.max(rel_err(h[i][j], h_fd[i][j]));
                    }
                }
            }
            // collapse identities at theta = 1
            let cfg = LyapunovConfig::new(degree, vec![1.0; m - 1]).unwrap();
            let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..3.0)).collect();
            let s: f64 = w.iter().sum();
            worst_collapse =
                worst_collapse.max(rel_err(eval_h(&cfg, &w).unwrap(), s.powi(degree as i32)));
            let g = grad_h(&cfg, &w).unwrap();
            let want = degree as f64 * s.powi(degree as i32 - 1);
            for gi in &g {
                worst_collapse = worst_collapse.max(rel_err(*gi, want));
            }
            let h = hess_h(&cfg, &w).unwrap();
            let want = (degree * (degree - 1)) as f64 * s.powi(degree as i32 - 2);
            for row in &h {
                for e in row {
                    worst_collapse = worst_collapse.max(rel_err(*e, want));
                }
            }
        }
    }
    let passed = worst_grad <= 1e-6 && worst_hess <= 1e-5 && worst_collapse <= 1e-10;
    CriterionResult {
        id: 3,
        name: "derivative closed forms",
        passed,
        detail: format!(
            "gradient {worst_grad:.2e} (<=1e-6), hessian {worst_hess:.2e} (<=1e-5), collapse {worst_collapse:.2e} (<=1e-10)"
        ),
    }
}

/// Criterion 4: every certificate from the weight search is confirmed
/// positive definite by the dense eigensolver on every exponent tuple, for
/// m <= 5 and degree <= 6; and for m = 2 the found weight sits within one
/// grid step of the analytic threshold.
pub fn criterion_condition_soundness() -> CriterionResult {
    let systems = [
        ToeplitzSystem::new(2, 3.0, 1.0).unwrap(),
        ToeplitzSystem::new(3, 2.0, 0.5).unwrap(),
        ToeplitzSystem::new(4, 3.0, 1.0).unwrap(),
        ToeplitzSystem::new(5, 4.0, 1.2).unwrap(),
    ];
    let mut worst_min_eig = f64::INFINITY;
    let mut certs = 0;
    for sys in &systems {
        let dec = decompose(sys);
        for degree in 2..=6u32 {
            let cfg = match theta_search(&dec, degree, 50_000).unwrap() {
                ThetaSearch::Found(cfg) => cfg,
                ThetaSearch::Exhausted { best_min_k, .. } => {
                    return CriterionResult {
                        id: 4,
                        name: "condition soundness",
                        passed: false,
                        detail: format!(
                            "search exhausted for m={} degree={degree} (best min K {best_min_k:.2e})",
                            sys.m()
                        ),
                    };
                }
            };
            for tuple in exponent_tuples(sys.m(), degree) {
                let mat = build_condition_matrix(&dec, &cfg, &tuple).unwrap();
                let eig = oracle::sym_smallest_eigenvalue(&mat.entries);
                worst_min_eig = worst_min_eig.min(eig);
            }
            certs += 1;
        }
    }

    // analytic threshold for the two-component case at degree 2
    let dec = decompose(&systems[0]);
    let threshold = mean_ratio(dec.eigenvalues_ascending[0], dec.eigenvalues_ascending[1]);
    let found = match theta_search(&dec, 2, 10_000).unwrap() {
        ThetaSearch::Found(cfg) => cfg.thetas()[0],
        ThetaSearch::Exhausted { .. } => f64::NAN,
    };
    // first grid point past the threshold, within one grid ratio
    let within_one_step = found > threshold && found <= threshold * THETA_GRID_RATIO;

    let passed = worst_min_eig > 0.0 && within_one_step;
    CriterionResult {
        id: 4,
        name: "condition soundness",
        passed,
        detail: format!(
            "{certs} certificates, smallest oracle eigenvalue {worst_min_eig:.3e}, m=2 weight {found:.6} vs threshold {threshold:.6}"
        ),
    }
}

fn decay_problem(n_cells: usize) -> (Problem, Vec<f64>) {
    let sys = ToeplitzSystem::new(2, 3.0, 1.0).unwrap();
    let mesh = Mesh1D::new(std::f64::consts::PI, n_cells).unwrap();
    let problem = Problem::new(
        sys,
        RegionSpec::all_l(2).unwrap(),
        ReactionSpec::zero(2).unwrap(),
        BoundarySpec::uniform(BcKind::Neumann, 2).unwrap(),
        mesh,
    )
    .unwrap();
    let cosine: Vec<f64> = (0..mesh.n_nodes()).map(|i| mesh.x(i).cos()).collect();
    (problem, cosine)
}

fn decay_error(n_cells: usize, dt: f64, t_final: f64) -> f64 {
    let (problem, cosine) = decay_problem(n_cells);
    let init = InitialData::NodalW(vec![cosine.clone(), cosine.clone()]);
    let mut state = SimState::new(&problem, &init).unwrap();
    while state.t < t_final - 1e-12 {
        let step = dt.min(t_final - state.t);
        problem.step(&mut state, step).unwrap();
    }
    let mut err = 0.0f64;
    for l in 0..2 {
        let rate = problem.dec.eigenvalues_ascending[l];
        for j in 0..problem.mesh.n_nodes() {
            let exact = (-rate * state.t).exp() * problem.mesh.x(j).cos();
            err = err.max((state.w[l][j] - exact).abs());
        }
    }
    err
}

/// Criterion 5: observed spatial and temporal convergence orders of the
/// single-mode decay problem sit in [1.8, 2.2] across three refinements.
pub fn criterion_convergence() -> CriterionResult {
    let clock = std::time::Instant::now();
    let t_final = 0.5;
    // spatial: fine dt so the O(dt^2) part is negligible
    let es: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| decay_error(n, 5e-4, t_final))
        .collect();
    let s1 = (es[0] / es[1]).log2();
    let s2 = (es[1] / es[2]).log2();
    // temporal: fine mesh so the O(h^2) part is negligible
    let et: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| decay_error(256, dt, t_final))
        .collect();
    let t1 = (et[0] / et[1]).log2();
    let t2 = (et[1] / et[2]).log2();
    let elapsed = clock.elapsed().as_secs_f64();
    let in_range = |o: f64| (1.8..=2.2).contains(&o);
    let passed = in_range(s1) && in_range(s2) && in_range(t1) && in_range(t2) && elapsed < 30.0;
    CriterionResult {
        id: 5,
        name: "simulator convergence",
        passed,
        detail: format!(
            "spatial orders {s1:.3}/{s2:.3}, temporal orders {t1:.3}/{t2:.3} (target [1.8, 2.2]), {elapsed:.2}s (<30s)"
        ),
    }
}

fn builtin_run_spec(m: usize, q: u32, seed: u64) -> RunSpec {
    let sys = if m == 2 {
        ToeplitzSystem::new(2, 3.0, 1.0).unwrap()
    } else {
        ToeplitzSystem::new(m, 2.0, 0.5).unwrap()
    };
    let dec = decompose(&sys);
    let lyapunov = match theta_search(&dec, 2, 20_000).unwrap() {
        ThetaSearch::Found(cfg) => cfg,
        ThetaSearch::Exhausted { .. } => unreachable!("desk-scale search succeeds"),
    };
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

/// Criterion 6: builtin family runs (m in {2,3}, q in {1,2}) stay in the
/// region to -1e-8 over [0, 1], and the two formulations agree to 1e-8.
pub fn criterion_invariance() -> CriterionResult {
    let mut worst_min = f64::INFINITY;
    let mut worst_disc = 0.0f64;
    for (i, &(m, q)) in [(2usize, 1u32), (2, 2), (3, 1), (3, 2)].iter().enumerate() {
        let spec = builtin_run_spec(m, q, 600 + i as u64);
        let result = run(&spec).unwrap();
        if result.blow_up.is_some() {
            return CriterionResult {
                id: 6,
                name: "invariance and formulation agreement",
                passed: false,
                detail: format!("unexpected blow-up for m={m} q={q}"),
            };
        }
        for &mw in &result.min_signed_w {
            worst_min = worst_min.min(mw);
        }
        let report = cross_check(&spec).unwrap();
        worst_disc = worst_disc.max(report.max_discrepancy);
    }
    let passed = worst_min >= -1e-8 && worst_disc <= 1e-8;
    CriterionResult {
        id: 6,
        name: "invariance and formulation agreement",
        passed,
        detail: format!(
            "worst signed minimum {worst_min:.2e} (>=-1e-8), worst cross-check discrepancy {worst_disc:.2e} (<=1e-8)"
        ),
    }
}

/// Criterion 7: the fitted Gronwall pair bounds the step slopes with slack
/// <= 1e-9 and the functional stays finite on a builtin run; the quadratic
/// reaction with unit data (scalar blow-up at t = 1) trips the blow-up
/// flag before t = 2.
pub fn criterion_gronwall_and_blowup() -> CriterionResult {
    let spec = builtin_run_spec(2, 1, 700);
    let result = run(&spec).unwrap();
    let finite = result.series.iter().all(|(_, l, _)| l.is_finite());
    let fit: Option<GronwallFit> = result.gronwall;
    let bounded = fit
        .map(|f| f.max_violation <= GRONWALL_SLACK)
        .unwrap_or(false);

    // quadratic reaction, unit data: w' = w^2 blows up at t = 1
    let square = ReactionSpec::new(
        2,
        vec![
            vec![Monomial {
                coeff: 1.0,
                exps: vec![2, 0],
            }],
            vec![Monomial {
                coeff: 1.0,
                exps: vec![0, 2],
            }],
        ],
    )
    .unwrap();
    let mut blow_spec = builtin_run_spec(2, 1, 701);
    blow_spec.reaction = square;
    blow_spec.t_final = 2.5;
    blow_spec.initial = InitialData::UniformW(vec![1.0, 1.0]);
    let blow_result = run(&blow_spec).unwrap();
    let t_max = blow_result.blow_up;
    let fired = matches!(t_max, Some(t) if t < 2.0 && t > 0.5);

    let passed = finite && bounded && fired;
    let (c6, c8, viol) =
        fit.map(|f| (f.c6, f.c8, f.max_violation))
            .unwrap_or((f64::NAN, f64::NAN, f64::NAN));
    CriterionResult {
        id: 7,
        name: "gronwall bound and blow-up control",
        passed,
        detail: format!(
            "fit (C6, C8) = ({c6:.3}, {c8:.3}) with violation {viol:.2e} (<=1e-9), functional finite {finite}, blow-up at {t_max:?} (target < 2)"
        ),
    }
}

/// Criterion 8: the region lattice has exactly 2^m members for m <= 10 and
/// sign-flip duality holds on 1000 random vectors.
pub fn criterion_region_lattice() -> CriterionResult {
    let mut counts_ok = true;
    for m in 2..=10usize {
        let regs = enumerate_regions(m).unwrap();
        counts_ok &= regs.len() == 1 << m;
        let mut distinct: Vec<Vec<usize>> = regs.iter().map(|r| r.z_indices()).collect();
        distinct.sort();
        distinct.dedup();
        counts_ok &= distinct.len() == 1 << m;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    let mut duality_ok = true;
    for _ in 0..1000 {
        let m = rng.gen_range(2..=6usize);
        let sys = ToeplitzSystem::new(m, 3.0, 1.0).unwrap();
        let dec = decompose(&sys);
        let u0: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let neg: Vec<f64> = u0.iter().map(|x| -x).collect();
        let code = rng.gen_range(0..(1u64 << m));
        let spec = RegionSpec::by_code(m, code).unwrap();
        let a = membership(&spec, &dec, &u0, 0.0).unwrap().inside;
        let b = membership(&spec.complement(), &dec, &neg, 0.0)
            .unwrap()
            .inside;
        duality_ok &= a == b;
    }
    let passed = counts_ok && duality_ok;
    CriterionResult {
        id: 8,
        name: "region lattice",
        passed,
        detail: format!("counts 2^m for m<=10: {counts_ok}, duality on 1000 vectors: {duality_ok}"),
    }
}

/// Runs all eight criteria in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_spectral(),
        criterion_minor_recursion(),
        criterion_derivatives(),
        criterion_condition_soundness(),
        criterion_convergence(),
        criterion_invariance(),
        criterion_gronwall_and_blowup(),
        criterion_region_lattice(),
    ]
}
