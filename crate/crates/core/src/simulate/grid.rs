//! Uniform 1-D mesh, boundary-condition kinds, and the tridiagonal solve.

use crate::error::{Error, Result};

/// Uniform mesh on [0, X] with `n_cells` cells and `n_cells + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D {
    length: f64,
    n_cells: usize,
}

impl Mesh1D {
    pub fn new(length: f64, n_cells: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidMesh(format!(
                "domain length must be positive, got {length}"
            )));
        }
        if n_cells < 8 {
            return Err(Error::InvalidMesh(format!(
                "need at least 8 cells, got {n_cells}"
            )));
        }
        Ok(Self { length, n_cells })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn h(&self) -> f64 {
        self.length / self.n_cells as f64
    }

    pub fn x(&self, node: usize) -> f64 {
        self.length * node as f64 / self.n_cells as f64
    }

    /// Trapezoid quadrature of a nodal field over the domain.
    pub fn trapezoid(&self, field: &[f64]) -> f64 {
        debug_assert_eq!(field.len(), self.n_nodes());
        let h = self.h();
        let interior: f64 = field[1..field.len() - 1].iter().sum();
        h * (0.5 * (field[0] + field[field.len() - 1]) + interior)
    }

    /// Domain average `(1/X) integral`, matching the normalized norms.
    pub fn average(&self, field: &[f64]) -> f64 {
        self.trapezoid(field) / self.length
    }
}

/// Normalized p-norm `((1/X) integral |f|^p)^(1/p)` by trapezoid.
pub fn lp_norm(mesh: &Mesh1D, field: &[f64], p: f64) -> f64 {
    let powed: Vec<f64> = field.iter().map(|x| x.abs().powf(p)).collect();
    mesh.average(&powed).powf(1.0 / p)
}

/// Supremum norm of a nodal field.
pub fn sup_norm(field: &[f64]) -> f64 {
    field.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Per-component boundary condition: the mixed condition
/// `alpha w + (1 - alpha) dw/dn = rho` with the three admissible shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BcKind {
    /// `0 < alpha < 1`, inhomogeneous data `beta`.
    Robin { alpha: f64, beta: f64 },
    /// `alpha = beta = 0`: homogeneous no-flux.
    Neumann,
    /// `alpha = 1, beta = 0`: homogeneous absorbing.
    Dirichlet,
}

impl BcKind {
    pub fn validate(&self) -> Result<()> {
        if let BcKind::Robin { alpha, beta } = self {
            if !(*alpha > 0.0 && *alpha < 1.0) {
                return Err(Error::InvalidBoundary(format!(
                    "robin alpha must lie in (0,1), got {alpha}"
                )));
            }
            if !beta.is_finite() {
                return Err(Error::InvalidBoundary("robin beta must be finite".into()));
            }
        }
        Ok(())
    }

    /// The (alpha, beta) pair of the mixed form.
    pub fn alpha_beta(&self) -> (f64, f64) {
        match self {
            BcKind::Robin { alpha, beta } => (*alpha, *beta),
            BcKind::Neumann => (0.0, 0.0),
            BcKind::Dirichlet => (1.0, 0.0),
        }
    }
}

/// One boundary condition per component, applied at both domain ends.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    kinds: Vec<BcKind>,
}

impl BoundarySpec {
    pub fn new(kinds: Vec<BcKind>) -> Result<Self> {
        if kinds.is_empty() {
            return Err(Error::InvalidBoundary("no components".into()));
        }
        for k in &kinds {
            k.validate()?;
        }
        Ok(Self { kinds })
    }

    pub fn uniform(kind: BcKind, m: usize) -> Result<Self> {
        Self::new(vec![kind; m])
    }

    pub fn m(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self, l0: usize) -> BcKind {
        self.kinds[l0]
    }

    /// The vector of inhomogeneous data, one beta per component.
    pub fn beta_vector(&self) -> Vec<f64> {
        self.kinds.iter().map(|k| k.alpha_beta().1).collect()
    }

    /// True when every component shares a single kind and alpha; the
    /// coupled-form stepper needs this.
    pub fn is_uniform_kind(&self) -> bool {
        self.kinds.windows(2).all(|w| match (w[0], w[1]) {
            (BcKind::Neumann, BcKind::Neumann) => true,
            (BcKind::Dirichlet, BcKind::Dirichlet) => true,
            (BcKind::Robin { alpha: a1, .. }, BcKind::Robin { alpha: a2, .. }) => a1 == a2,
            _ => false,
        })
    }
}

/// Thomas algorithm for a tridiagonal system; `lower[i]` multiplies
/// `x[i-1]` in row i, `upper[i]` multiplies `x[i+1]`. The callers assemble
/// diagonally dominant rows, so a vanishing pivot is a logic error.
pub fn tridiag_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    assert!(diag[0] != 0.0, "tridiagonal pivot breakdown at row 0");
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * c[i - 1];
        assert!(denom != 0.0, "tridiagonal pivot breakdown at row {i}");
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mesh_validation_and_geometry() {
        assert!(Mesh1D::new(1.0, 4).is_err());
        assert!(Mesh1D::new(0.0, 16).is_err());
        let mesh = Mesh1D::new(2.0, 8).unwrap();
        assert_eq!(mesh.n_nodes(), 9);
        assert_relative_eq!(mesh.h(), 0.25);
        assert_relative_eq!(mesh.x(8), 2.0);
    }

    #[test]
    fn trapezoid_is_exact_for_linear_fields() {
        let mesh = Mesh1D::new(3.0, 12).unwrap();
        let field: Vec<f64> = (0..mesh.n_nodes()).map(|i| 2.0 * mesh.x(i) + 1.0).collect();
        // integral of 2x+1 over [0,3] = 9 + 3 = 12
        assert_relative_eq!(mesh.trapezoid(&field), 12.0, max_relative = 1e-14);
        assert_relative_eq!(mesh.average(&field), 4.0, max_relative = 1e-14);
    }

    #[test]
    fn norms_of_constants_carry_the_normalization() {
        let mesh = Mesh1D::new(5.0, 10).unwrap();
        let field = vec![-3.0; mesh.n_nodes()];
        assert_relative_eq!(lp_norm(&mesh, &field, 2.0), 3.0, max_relative = 1e-14);
        assert_relative_eq!(lp_norm(&mesh, &field, 4.0), 3.0, max_relative = 1e-12);
        assert_eq!(sup_norm(&field), 3.0);
    }

    #[test]
    fn bc_validation() {
        assert!(BcKind::Robin {
            alpha: 0.5,
            beta: 1.0
        }
        .validate()
        .is_ok());
        assert!(BcKind::Robin {
            alpha: 0.0,
            beta: 1.0
        }
        .validate()
        .is_err());
        assert!(BcKind::Robin {
            alpha: 1.0,
            beta: 1.0
        }
        .validate()
        .is_err());
        assert_eq!(BcKind::Neumann.alpha_beta(), (0.0, 0.0));
        assert_eq!(BcKind::Dirichlet.alpha_beta(), (1.0, 0.0));

        let spec = BoundarySpec::new(vec![
            BcKind::Neumann,
            BcKind::Robin {
                alpha: 0.3,
                beta: 0.5,
            },
        ])
        .unwrap();
        assert!(!spec.is_uniform_kind());
        assert_eq!(spec.beta_vector(), vec![0.0, 0.5]);
        assert!(BoundarySpec::uniform(BcKind::Neumann, 3)
            .unwrap()
            .is_uniform_kind());
    }

    #[test]
    fn thomas_solves_a_known_system() {
        // [[2,1,0],[1,3,1],[0,1,2]] x = [3,5,3] -> x = [1,1,1]
        let lower = [0.0, 1.0, 1.0];
        let diag = [2.0, 3.0, 2.0];
        let upper = [1.0, 1.0, 0.0];
        let rhs = [3.0, 5.0, 3.0];
        let x = tridiag_solve(&lower, &diag, &upper, &rhs);
        for xi in x {
            assert_relative_eq!(xi, 1.0, max_relative = 1e-14);
        }
    }
}
