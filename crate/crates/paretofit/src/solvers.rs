//! Deterministic numerical solvers.
//!
//! Three pieces: the closed-form minimizer of a weighted sum of quadratics
//! (solved by symmetric eigendecomposition with eigenvalue clipping), cyclic
//! coordinate descent with soft-thresholding for l1-penalized quadratics, and
//! an ISTA proximal-gradient solver kept as an independent cross-check of the
//! coordinate-descent path.
//!
//! The penalized problem is
//!
//! ```text
//!   minimize  theta' A theta - 2 <linear, theta> + alpha ||theta||_1
//! ```
//!
//! which covers the lasso (`A = X'X/n`, `linear = X'y/n`) and every
//! scalarized empirical objective in this crate.

use crate::error::{Error, Result};
use crate::linalg::{check_dim, dot, norm2, Mat};
use crate::model::{ObjectiveTuple, SimplexWeights};

/// Eigenvalues below this are treated as zero when inverting.
pub const EIGEN_CLIP: f64 = 1e-12;
/// A weighted quadratic whose smallest eigenvalue is at or below this is
/// reported as singular rather than solved.
pub const SINGULAR_TOL: f64 = 1e-10;

/// Convergence controls shared by the iterative solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverSettings {
    /// Stop once the largest coordinate update in a sweep is at most `tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Stream seed for randomized auxiliary choices (validation splits);
    /// the cyclic sweep itself never consumes randomness.
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-10,
            max_iter: 100_000,
            seed: 0,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "solver tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// `theta' A theta - 2 <linear, theta> + penalty * ||theta||_1` with `A`
/// symmetric PSD and `penalty >= 0`.
#[derive(Debug, Clone)]
pub struct PenalizedQuadratic {
    quad: Mat,
    linear: Vec<f64>,
    penalty: f64,
}

impl PenalizedQuadratic {
    pub fn new(mut quad: Mat, linear: Vec<f64>, penalty: f64) -> Result<Self> {
        if quad.rows() != quad.cols() {
            return Err(Error::InvalidArgument(format!(
                "quadratic term must be square, got {}x{}",
                quad.rows(),
                quad.cols()
            )));
        }
        check_dim("penalized quadratic", quad.rows(), linear.len())?;
        if !(penalty >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "l1 penalty must be nonnegative, got {penalty}"
            )));
        }
        let asym = quad.max_asymmetry();
        if asym > 1e-12 * (1.0 + quad.frob_norm()) {
            return Err(Error::InvalidArgument(format!(
                "quadratic term is asymmetric by {asym:.3e}"
            )));
        }
        quad.symmetrize();
        Ok(PenalizedQuadratic {
            quad,
            linear,
            penalty,
        })
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn quad(&self) -> &Mat {
        &self.quad
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn with_penalty(&self, penalty: f64) -> Result<Self> {
        PenalizedQuadratic::new(self.quad.clone(), self.linear.clone(), penalty)
    }

    /// Full objective value at `theta`.
    pub fn objective(&self, theta: &[f64]) -> f64 {
        let q = self.quad.matvec(theta);
        dot(theta, &q) - 2.0 * dot(&self.linear, theta)
            + self.penalty * theta.iter().map(|t| t.abs()).sum::<f64>()
    }
}

/// Result of an iterative solve: the final iterate plus convergence state.
#[derive(Debug, Clone)]
pub struct SolverRun {
    pub solution: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Coordinates skipped because their curvature was not strictly positive.
    pub skipped: Vec<usize>,
}

fn soft_threshold(x: f64, level: f64) -> f64 {
    if x > level {
        x - level
    } else if x < -level {
        x + level
    } else {
        0.0
    }
}

/// Closed-form minimizer of `sum_k lambda_k L_k` for a quadratic tuple:
/// `theta* = (sum lambda_k Q_k)^{-1} (sum lambda_k Q_k b_k)`.
///
/// Errors with [`Error::SingularScalarization`] when the weighted matrix has
/// smallest eigenvalue at or below 1e-10, so the minimizer is not unique.
pub fn mixture_quadratic_minimizer(
    objs: &ObjectiveTuple,
    lambda: &SimplexWeights,
) -> Result<Vec<f64>> {
    check_dim("mixture weights", objs.len(), lambda.len())?;
    let d = objs.dim();
    let mut weighted = Mat::zeros(d, d);
    let mut rhs = vec![0.0; d];
    for (k, obj) in objs.iter().enumerate() {
        let w = lambda.get(k);
        if w == 0.0 {
            continue;
        }
        weighted.add_scaled(obj.quad(), w);
        let qb = obj.quad().matvec(obj.center());
        for (r, v) in rhs.iter_mut().zip(&qb) {
            *r += w * v;
        }
    }
    let eigen = weighted.sym_eigen();
    if eigen.min() <= SINGULAR_TOL {
        return Err(Error::SingularScalarization {
            lambda: lambda.as_slice().to_vec(),
            min_eig: eigen.min(),
        });
    }
    let vt_b = eigen.vectors.tr_matvec(&rhs);
    let scaled: Vec<f64> = vt_b
        .iter()
        .zip(&eigen.values)
        .map(|(y, l)| y / l.max(EIGEN_CLIP))
        .collect();
    Ok(eigen.vectors.matvec(&scaled))
}

/// Cyclic coordinate descent with per-coordinate soft-thresholding.
///
/// Coordinates whose diagonal entry is not strictly positive are skipped
/// (they keep their initial value) and reported in [`SolverRun::skipped`].
/// With debug assertions on, every full sweep is checked to not increase the
/// penalized objective.
pub fn coordinate_descent_l1(
    problem: &PenalizedQuadratic,
    init: &[f64],
    settings: &SolverSettings,
) -> Result<SolverRun> {
    settings.validate()?;
    check_dim("coordinate descent init", problem.dim(), init.len())?;
    let d = problem.dim();
    let a = &problem.quad;
    let alpha = problem.penalty;
    let mut theta = init.to_vec();
    let mut skipped: Vec<usize> = (0..d).filter(|&j| a.get(j, j) <= 0.0).collect();
    skipped.dedup();
    // q = A theta, maintained incrementally.
    let mut q = a.matvec(&theta);
    let mut converged = false;
    let mut iterations = 0;
    #[cfg(debug_assertions)]
    let mut prev_obj = problem.objective(&theta);
    while iterations < settings.max_iter {
        iterations += 1;
        let mut max_change = 0.0f64;
        for j in 0..d {
            let ajj = a.get(j, j);
            if ajj <= 0.0 {
                continue;
            }
            let old = theta[j];
            // Partial residual: linear_j - sum_{i != j} A_ji theta_i.
            let m = problem.linear[j] - (q[j] - ajj * old);
            let new = soft_threshold(m, 0.5 * alpha) / ajj;
            if new != old {
                let delta = new - old;
                theta[j] = new;
                let arow = a.row(j);
                for (qi, aji) in q.iter_mut().zip(arow) {
                    *qi += delta * aji;
                }
                max_change = max_change.max(delta.abs());
            }
        }
        #[cfg(debug_assertions)]
        {
            let obj = problem.objective(&theta);
            debug_assert!(
                obj <= prev_obj + 1e-9 * (1.0 + prev_obj.abs()),
                "coordinate descent increased the objective: {prev_obj} -> {obj}"
            );
            prev_obj = obj;
        }
        if max_change <= settings.tol {
            converged = true;
            break;
        }
    }
    Ok(SolverRun {
        solution: theta,
        converged,
        iterations,
        skipped,
    })
}

/// Lasso `(1/n) ||X theta - y||^2 + alpha ||theta||_1`, solved by coordinate
/// descent on the Gram form.
pub fn lasso(x: &Mat, y: &[f64], alpha: f64, settings: &SolverSettings) -> Result<SolverRun> {
    if x.rows() == 0 {
        return Err(Error::EmptyData("lasso design matrix"));
    }
    check_dim("lasso responses", x.rows(), y.len())?;
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lasso penalty must be nonnegative, got {alpha}"
        )));
    }
    let n_inv = 1.0 / x.rows() as f64;
    let gram = x.gram(n_inv);
    let mut linear = x.tr_matvec(y);
    for v in &mut linear {
        *v *= n_inv;
    }
    let problem = PenalizedQuadratic::new(gram, linear, alpha)?;
    coordinate_descent_l1(&problem, &vec![0.0; x.cols()], settings)
}

/// Maximum violation of the l1 stationarity conditions at `theta`:
/// `|g_j| - alpha` for zero coordinates and `|g_j + alpha sign(theta_j)|`
/// otherwise, with `g = 2 A theta - 2 linear`. Nonpositive (up to roundoff)
/// exactly at minimizers.
pub fn kkt_violation_l1(problem: &PenalizedQuadratic, theta: &[f64]) -> f64 {
    assert_eq!(problem.dim(), theta.len());
    let mut g = problem.quad.matvec(theta);
    for (gi, li) in g.iter_mut().zip(&problem.linear) {
        *gi = 2.0 * *gi - 2.0 * li;
    }
    let alpha = problem.penalty;
    let mut worst = f64::NEG_INFINITY;
    for (j, &t) in theta.iter().enumerate() {
        let v = if t == 0.0 {
            g[j].abs() - alpha
        } else {
            (g[j] + alpha * t.signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
pub fn power_iteration_max_eig(a: &Mat, iterations: usize) -> f64 {
    let d = a.rows();
    assert_eq!(d, a.cols());
    if d == 0 {
        return 0.0;
    }
    // Deterministic start with energy in every coordinate.
    let mut v: Vec<f64> = (0..d).map(|i| 1.0 + (i as f64 + 1.0).recip()).collect();
    let n = norm2(&v);
    for x in &mut v {
        *x /= n;
    }
    for _ in 0..iterations {
        let mut w = a.matvec(&v);
        let wn = norm2(&w);
        if wn == 0.0 {
            return 0.0;
        }
        for x in &mut w {
            *x /= wn;
        }
        v = w;
    }
    let av = a.matvec(&v);
    dot(&v, &av)
}

/// ISTA on the same penalized quadratic, used as an independent oracle for
/// coordinate descent. Step size `1/(2 lambda_max(A))`.
pub fn proximal_gradient_l1(
    problem: &PenalizedQuadratic,
    init: &[f64],
    settings: &SolverSettings,
) -> Result<SolverRun> {
    settings.validate()?;
    check_dim("proximal gradient init", problem.dim(), init.len())?;
    let lmax = power_iteration_max_eig(&problem.quad, 200);
    if !(lmax > 0.0) {
        return Err(Error::InvalidArgument(
            "proximal gradient needs a nonzero quadratic term".into(),
        ));
    }
    // Slightly conservative step keeps the iteration a strict descent even
    // when power iteration underestimates the top eigenvalue.
    let step = 1.0 / (2.0 * lmax * 1.0001);
    let alpha = problem.penalty;
    let mut theta = init.to_vec();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < settings.max_iter {
        iterations += 1;
        let q = problem.quad.matvec(&theta);
        let mut max_change = 0.0f64;
        for j in 0..theta.len() {
            let g = 2.0 * q[j] - 2.0 * problem.linear[j];
            let new = soft_threshold(theta[j] - step * g, step * alpha);
            max_change = max_change.max((new - theta[j]).abs());
            theta[j] = new;
        }
        if max_change <= settings.tol {
            converged = true;
            break;
        }
    }
    Ok(SolverRun {
        solution: theta,
        converged,
        iterations,
        skipped: Vec::new(),
    })
}
