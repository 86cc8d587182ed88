//! Desk-scale 1-D method-of-lines solver for the m-component system and
//! its diagonalized form, with invariance, Lyapunov, Gronwall, and
//! blow-up monitors.
//!
//! The primary integration path works in region-relative transformed
//! coordinates: `wt_l = sign_l * w_l`, so in-region states occupy the
//! nonnegative orthant for every region, diffusion stays decoupled with
//! the l-th ascending eigenvalue as scalar diffusivity, and the reaction
//! map is given on that orthant. The physical fields are recovered as
//! `u = V^{-1} (sign ⊙ wt)` after every step.
//!
//! Time stepping is Strang splitting: half-step reaction (classical
//! four-stage explicit integrator per node), full Crank-Nicolson diffusion
//! step per component (tridiagonal solve), half-step reaction. Boundary
//! rows eliminate the ghost node through the mixed condition at second
//! order, so the scheme is second order in both h and dt.

mod grid;
mod runner;

pub use grid::{lp_norm, sup_norm, tridiag_solve, BcKind, BoundarySpec, Mesh1D};
pub use runner::{
    cross_check, run, write_csv, CrossCheckReport, GronwallFit, RunSpec, Sample, SimResult,
    GRONWALL_SLACK,
};

use crate::error::{Error, Result};
use crate::reactions::ReactionSpec;
use crate::regions::{RegionSpec, SignedTransform};
use crate::spectral::{decompose, SpectralDecomposition, ToeplitzSystem};
use nalgebra::DMatrix;

/// Sup-norm threshold past which a state counts as blown up.
pub const BLOW_UP_SUP: f64 = 1e6;

/// Initial data for the transformed (region-relative) fields.
#[derive(Debug, Clone)]
pub enum InitialData {
    /// Spatially constant transformed fields.
    UniformW(Vec<f64>),
    /// Explicit nodal transformed fields, one row per component.
    NodalW(Vec<Vec<f64>>),
    /// Smooth in-region data: per component,
    /// `base * (1 + amplitude * sum_j c_j cos(j pi x / X))` with seeded
    /// coefficients normalized so the field stays within
    /// `base * (1 ± amplitude)`.
    SeededSmooth {
        seed: u64,
        base: f64,
        amplitude: f64,
    },
}

impl InitialData {
    pub fn build(&self, m: usize, mesh: &Mesh1D) -> Result<Vec<Vec<f64>>> {
        let nodes = mesh.n_nodes();
        match self {
            InitialData::UniformW(vals) => {
                if vals.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: vals.len(),
                    });
                }
                Ok(vals.iter().map(|&v| vec![v; nodes]).collect())
            }
            InitialData::NodalW(fields) => {
                if fields.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: fields.len(),
                    });
                }
                for f in fields {
                    if f.len() != nodes {
                        return Err(Error::DimensionMismatch {
                            expected: nodes,
                            got: f.len(),
                        });
                    }
                }
                Ok(fields.clone())
            }
            InitialData::SeededSmooth {
                seed,
                base,
                amplitude,
            } => {
                if !(*base > 0.0) || !(*amplitude >= 0.0 && *amplitude < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "seeded data needs base > 0 and amplitude in [0,1), got {base}, {amplitude}"
                    )));
                }
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                let x_len = mesh.length();
                let mut fields = Vec::with_capacity(m);
                for _ in 0..m {
                    let mut coeffs: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let norm: f64 = coeffs.iter().map(|c| c.abs()).sum();
                    if norm > 0.0 {
                        for c in &mut coeffs {
                            *c /= norm;
                        }
                    }
                    let field: Vec<f64> = (0..nodes)
                        .map(|i| {
                            let x = mesh.x(i);
                            let wave: f64 = coeffs
                                .iter()
                                .enumerate()
                                .map(|(j, c)| {
                                    c * ((j + 1) as f64 * std::f64::consts::PI * x / x_len).cos()
                                })
                                .sum();
                            base * (1.0 + amplitude * wave)
                        })
                        .collect();
                    fields.push(field);
                }
                Ok(fields)
            }
        }
    }
}

/// Everything static about one simulation: system, decomposition, region,
/// reaction, boundary conditions, mesh. The decomposition field is public
/// so tests can tamper with it (negative controls).
#[derive(Debug, Clone)]
pub struct Problem {
    pub sys: ToeplitzSystem,
    pub dec: SpectralDecomposition,
    pub region: RegionSpec,
    pub signed: SignedTransform,
    pub reaction: ReactionSpec,
    pub bc: BoundarySpec,
    pub mesh: Mesh1D,
    /// Signed transformed boundary data per component.
    rho: Vec<f64>,
}

impl Problem {
    pub fn new(
        sys: ToeplitzSystem,
        region: RegionSpec,
        reaction: ReactionSpec,
        bc: BoundarySpec,
        mesh: Mesh1D,
    ) -> Result<Self> {
        let m = sys.m();
        if region.m() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: region.m(),
            });
        }
        if reaction.m() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: reaction.m(),
            });
        }
        if bc.m() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: bc.m(),
            });
        }
        let dec = decompose(&sys);
        let signed = SignedTransform::new(&dec, &region)?;
        let rho = signed.apply(&bc.beta_vector())?;
        Ok(Self {
            sys,
            dec,
            region,
            signed,
            reaction,
            bc,
            mesh,
            rho,
        })
    }

    pub fn m(&self) -> usize {
        self.sys.m()
    }

    /// Signed transformed boundary data.
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// Physical fields from transformed fields: `u = V^{-1} (sign ⊙ wt)`.
    pub fn u_from_w(&self, w: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let m = self.m();
        let nodes = self.mesh.n_nodes();
        let mut u = vec![vec![0.0; nodes]; m];
        for j in 0..nodes {
            for k in 0..m {
                let mut acc = 0.0;
                for l in 0..m {
                    acc += self.dec.inverse[k][l] * self.signed.signs[l] * w[l][j];
                }
                u[k][j] = acc;
            }
        }
        u
    }

    /// One Strang step of the transformed system.
    pub fn step(&self, state: &mut SimState, dt: f64) -> Result<()> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if state.blow_up.is_some() {
            return Ok(());
        }
        self.reaction_half_step(&mut state.w, 0.5 * dt);
        for l in 0..self.m() {
            let lambda = self.dec.eigenvalues_ascending[l];
            self.diffusion_step(&mut state.w[l], lambda, self.bc.kind(l), self.rho[l], dt);
        }
        self.reaction_half_step(&mut state.w, 0.5 * dt);

        state.u = self.u_from_w(&state.w);
        state.t += dt;
        state.steps += 1;

        let total_sup: f64 = state.w.iter().map(|f| sup_norm(f)).sum();
        if !total_sup.is_finite() || total_sup > BLOW_UP_SUP {
            state.blow_up = Some(state.t);
        }
        Ok(())
    }

    /// Pointwise classical four-stage explicit integrator for the reaction
    /// system, one step of size `dt` at every node.
    fn reaction_half_step(&self, w: &mut [Vec<f64>], dt: f64) {
        let m = self.m();
        let nodes = self.mesh.n_nodes();
        let eval = |y: &[f64], out: &mut [f64]| {
            for l in 0..m {
                out[l] = self.reaction.eval_component(l, y);
            }
        };
        let mut y = vec![0.0; m];
        let mut k1 = vec![0.0; m];
        let mut k2 = vec![0.0; m];
        let mut k3 = vec![0.0; m];
        let mut k4 = vec![0.0; m];
        let mut stage = vec![0.0; m];
        for j in 0..nodes {
            for l in 0..m {
                y[l] = w[l][j];
            }
            eval(&y, &mut k1);
            for l in 0..m {
                stage[l] = y[l] + 0.5 * dt * k1[l];
            }
            eval(&stage, &mut k2);
            for l in 0..m {
                stage[l] = y[l] + 0.5 * dt * k2[l];
            }
            eval(&stage, &mut k3);
            for l in 0..m {
                stage[l] = y[l] + dt * k3[l];
            }
            eval(&stage, &mut k4);
            for l in 0..m {
                w[l][j] = y[l] + dt / 6.0 * (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]);
            }
        }
    }

    /// Crank-Nicolson step for one component with scalar diffusivity.
    /// Mixed boundary rows eliminate the ghost node through the boundary
    /// condition at second order; the resulting matrix is diagonally
    /// dominant tridiagonal.
    fn diffusion_step(&self, field: &mut Vec<f64>, lambda: f64, kind: BcKind, rho: f64, dt: f64) {
        let n = self.mesh.n_nodes();
        let h = self.mesh.h();
        let r = lambda * dt / (2.0 * h * h);

        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];

        for i in 1..n - 1 {
            lower[i] = -r;
            diag[i] = 1.0 + 2.0 * r;
            upper[i] = -r;
            rhs[i] = r * field[i - 1] + (1.0 - 2.0 * r) * field[i] + r * field[i + 1];
        }

        let mut boundary_row = |at_start: bool| {
            let (edge, inner) = if at_start { (0, 1) } else { (n - 1, n - 2) };
            match kind {
                BcKind::Dirichlet => {
                    diag[edge] = 1.0;
                    if at_start {
                        upper[edge] = 0.0;
                    } else {
                        lower[edge] = 0.0;
                    }
                    rhs[edge] = 0.0;
                }
                BcKind::Neumann | BcKind::Robin { .. } => {
                    let (alpha, _) = kind.alpha_beta();
                    let sigma = alpha / (1.0 - alpha);
                    let src = 4.0 * r * h * rho / (1.0 - alpha);
                    let extra = 2.0 * r * sigma * h;
                    diag[edge] = 1.0 + 2.0 * r + extra;
                    let coupling = -2.0 * r;
                    if at_start {
                        upper[edge] = coupling;
                    } else {
                        lower[edge] = coupling;
                    }
                    rhs[edge] =
                        (1.0 - 2.0 * r - extra) * field[edge] + 2.0 * r * field[inner] + src;
                }
            }
        };
        boundary_row(true);
        boundary_row(false);

        *field = tridiag_solve(&lower, &diag, &upper, &rhs);
    }

    /// One Strang step of the coupled (untransformed) system, used by the
    /// cross-check: block Crank-Nicolson with the full diffusion matrix
    /// coupling the components, reaction pulled back to physical
    /// coordinates. Requires a uniform boundary kind.
    pub fn step_coupled(&self, u: &mut [Vec<f64>], dt: f64) -> Result<()> {
        if !self.bc.is_uniform_kind() {
            return Err(Error::InvalidBoundary(
                "coupled-form stepping needs a uniform boundary kind".into(),
            ));
        }
        self.coupled_reaction_half(u, 0.5 * dt);
        self.coupled_diffusion(u, dt);
        self.coupled_reaction_half(u, 0.5 * dt);
        Ok(())
    }

    fn coupled_reaction_half(&self, u: &mut [Vec<f64>], dt: f64) {
        let m = self.m();
        let nodes = self.mesh.n_nodes();
        // f(u) = V^{-1} (sign ⊙ F(sign ⊙ V u))
        let eval = |y: &[f64]| -> Vec<f64> {
            let w = self.signed.apply(y).expect("dimension fixed");
            let mut f_w: Vec<f64> = (0..m)
                .map(|l| self.reaction.eval_component(l, &w))
                .collect();
            for l in 0..m {
                f_w[l] *= self.signed.signs[l];
            }
            self.dec.to_u(&f_w).expect("dimension fixed")
        };
        let mut y = vec![0.0; m];
        for j in 0..nodes {
            for k in 0..m {
                y[k] = u[k][j];
            }
            let k1 = eval(&y);
            let s2: Vec<f64> = (0..m).map(|k| y[k] + 0.5 * dt * k1[k]).collect();
            let k2 = eval(&s2);
            let s3: Vec<f64> = (0..m).map(|k| y[k] + 0.5 * dt * k2[k]).collect();
            let k3 = eval(&s3);
            let s4: Vec<f64> = (0..m).map(|k| y[k] + dt * k3[k]).collect();
            let k4 = eval(&s4);
            for k in 0..m {
                u[k][j] = y[k] + dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
            }
        }
    }

    fn coupled_diffusion(&self, u: &mut [Vec<f64>], dt: f64) {
        let m = self.m();
        let nodes = self.mesh.n_nodes();
        let h = self.mesh.h();
        let c = dt / (2.0 * h * h);
        let a_rows = self.sys.dense();
        let a = DMatrix::from_fn(m, m, |i, j| a_rows[i][j]);
        let eye = DMatrix::<f64>::identity(m, m);
        let kind = self.bc.kind(0);
        let beta = self.bc.beta_vector();

        // interior blocks
        let off = -c * &a;
        let diag_in = &eye + 2.0 * c * &a;

        let mut diag_blocks: Vec<DMatrix<f64>> = Vec::with_capacity(nodes);
        let mut rhs: Vec<DMatrix<f64>> = Vec::with_capacity(nodes);
        let node_vec = |u: &[Vec<f64>], j: usize| DMatrix::from_fn(m, 1, |k, _| u[k][j]);

        for j in 0..nodes {
            let at_edge = j == 0 || j == nodes - 1;
            if !at_edge {
                diag_blocks.push(diag_in.clone());
                let r = c * &a * node_vec(u, j - 1)
                    + (&eye - 2.0 * c * &a) * node_vec(u, j)
                    + c * &a * node_vec(u, j + 1);
                rhs.push(r);
                continue;
            }
            match kind {
                BcKind::Dirichlet => {
                    diag_blocks.push(eye.clone());
                    rhs.push(DMatrix::zeros(m, 1));
                }
                BcKind::Neumann | BcKind::Robin { .. } => {
                    let (alpha, _) = kind.alpha_beta();
                    let sigma = alpha / (1.0 - alpha);
                    let extra = dt * sigma / h;
                    let inner = if j == 0 { 1 } else { nodes - 2 };
                    diag_blocks.push(&eye + 2.0 * c * &a + extra * &a);
                    let beta_vec = DMatrix::from_fn(m, 1, |k, _| beta[k]);
                    let src = (dt * 2.0 / ((1.0 - alpha) * h)) * &a * beta_vec;
                    let r = (&eye - 2.0 * c * &a - extra * &a) * node_vec(u, j)
                        + 2.0 * c * &a * node_vec(u, inner)
                        + src;
                    rhs.push(r);
                }
            }
        }

        // block Thomas sweep
        let lower_block = |j: usize| -> Option<DMatrix<f64>> {
            if j == 0 {
                return None;
            }
            if j == nodes - 1 {
                return match kind {
                    BcKind::Dirichlet => Some(DMatrix::zeros(m, m)),
                    _ => Some(2.0 * &off),
                };
            }
            Some(off.clone())
        };
        let upper_block = |j: usize| -> Option<DMatrix<f64>> {
            if j == nodes - 1 {
                return None;
            }
            if j == 0 {
                return match kind {
                    BcKind::Dirichlet => Some(DMatrix::zeros(m, m)),
                    _ => Some(2.0 * &off),
                };
            }
            Some(off.clone())
        };

        let mut c_prime: Vec<DMatrix<f64>> = Vec::with_capacity(nodes);
        let mut d_prime: Vec<DMatrix<f64>> = Vec::with_capacity(nodes);
        for j in 0..nodes {
            let (denom, r) = if j == 0 {
                (diag_blocks[0].clone(), rhs[0].clone())
            } else {
                let lb = lower_block(j).unwrap();
                (
                    &diag_blocks[j] - &lb * &c_prime[j - 1],
                    &rhs[j] - &lb * &d_prime[j - 1],
                )
            };
            let lu = denom.lu();
            let cp = match upper_block(j) {
                Some(ub) => lu.solve(&ub).expect("block pivot breakdown"),
                None => DMatrix::zeros(m, m),
            };
            let dp = lu.solve(&r).expect("block pivot breakdown");
            c_prime.push(cp);
            d_prime.push(dp);
        }
        let mut x = vec![DMatrix::<f64>::zeros(m, 1); nodes];
        x[nodes - 1] = d_prime[nodes - 1].clone();
        for j in (0..nodes - 1).rev() {
            x[j] = &d_prime[j] - &c_prime[j] * &x[j + 1];
        }
        for j in 0..nodes {
            for k in 0..m {
                u[k][j] = x[j][(k, 0)];
            }
        }
    }
}

/// Time, transformed fields (primary), physical fields (refreshed every
/// step), and the blow-up flag with its first offending time.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    /// Region-relative transformed fields, component-major.
    pub w: Vec<Vec<f64>>,
    /// Physical fields, recovered from `w` after each step.
    pub u: Vec<Vec<f64>>,
    pub blow_up: Option<f64>,
    pub steps: usize,
}

impl SimState {
    pub fn new(problem: &Problem, initial: &InitialData) -> Result<Self> {
        let w = initial.build(problem.m(), &problem.mesh)?;
        let u = problem.u_from_w(&w);
        Ok(Self {
            t: 0.0,
            w,
            u,
            blow_up: None,
            steps: 0,
        })
    }
}
