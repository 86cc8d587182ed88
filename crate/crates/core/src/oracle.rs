//! Independent reference routes used by the verification suite and tests.
//!
//! Nothing in here is called by the implementations it checks: the closed
//! forms, the minor recursion, and the analytic derivatives are validated
//! *against* these routes, never built on them.

use nalgebra::DMatrix;

/// Eigenvalues of a dense symmetric matrix, ascending, via nalgebra's
/// symmetric eigensolver.
pub fn sym_eigenvalues_ascending(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let mat = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let mut vals: Vec<f64> = mat.symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Smallest eigenvalue of a dense symmetric matrix.
pub fn sym_smallest_eigenvalue(rows: &[Vec<f64>]) -> f64 {
    sym_eigenvalues_ascending(rows)[0]
}

/// Determinant by recursive cofactor expansion along the first row.
/// Exponential cost; intended for n <= 8.
pub fn det_cofactor(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    match n {
        0 => 1.0,
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        _ => {
            let mut det = 0.0;
            for j in 0..n {
                if rows[0][j] == 0.0 {
                    continue;
                }
                let minor: Vec<Vec<f64>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                det += sign * rows[0][j] * det_cofactor(&minor);
            }
            det
        }
    }
}

/// Leading principal minors det[1..=n] by cofactor expansion.
pub fn leading_minors_cofactor(rows: &[Vec<f64>]) -> Vec<f64> {
    (1..=rows.len())
        .map(|k| {
            let sub: Vec<Vec<f64>> = rows[..k].iter().map(|r| r[..k].to_vec()).collect();
            det_cofactor(&sub)
        })
        .collect()
}

/// Central-difference gradient of a scalar function.
pub fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], rel_step: f64) -> Vec<f64> {
    let mut grad = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = rel_step * (1.0 + x[i].abs());
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h);
    }
    grad
}

/// Central-difference Jacobian of a vector function. Differencing a
/// closed-form gradient once is far better conditioned than differencing
/// the scalar twice, so this is the preferred Hessian oracle.
pub fn fd_jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], rel_step: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut jac = vec![vec![0.0; n]; n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let h = rel_step * (1.0 + x[i].abs());
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        for (j, row) in jac.iter_mut().enumerate() {
            row[i] = (fp[j] - fm[j]) / (2.0 * h);
        }
    }
    jac
}

/// Central-difference Hessian: second differences on the diagonal, the
/// four-point cross stencil off it.
pub fn fd_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], rel_step: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let f0 = f(x);
    let mut hess = vec![vec![0.0; n]; n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let hi = rel_step * (1.0 + x[i].abs());
        xp[i] = x[i] + hi;
        let fp = f(&xp);
        xp[i] = x[i] - hi;
        let fm = f(&xp);
        xp[i] = x[i];
        hess[i][i] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for j in (i + 1)..n {
            let hj = rel_step * (1.0 + x[j].abs());
            let mut eval = |si: f64, sj: f64| {
                xp[i] = x[i] + si * hi;
                xp[j] = x[j] + sj * hj;
                let v = f(&xp);
                xp[i] = x[i];
                xp[j] = x[j];
                v
            };
            let val = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0))
                / (4.0 * hi * hj);
            hess[i][j] = val;
            hess[j][i] = val;
        }
    }
    hess
}
