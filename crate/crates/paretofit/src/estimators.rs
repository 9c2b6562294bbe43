//! Pareto-point estimators.
//!
//! Three competitors for the scalarized minimizer `theta*_lambda`:
//!
//! - **plug-in**: minimize the empirical scalarized objective as-is,
//! - **directly regularized**: add an l1 penalty on the decision variable to
//!   the empirical scalarized objective,
//! - **two-stage**: first estimate the distributional parameters of every
//!   objective (lasso coefficients, sample covariance, signed group mean),
//!   then minimize the scalarized objective assembled from those estimates
//!   in closed form.
//!
//! Stage-1 estimators and the validated penalty selection live here too.

use crate::error::{Error, Result};
use crate::linalg::{check_dim, dot, Mat};
use crate::model::{ObjectiveTuple, QuadraticObjective, SimplexWeights};
use crate::rng::CounterRng;
use crate::solvers::{
    self, coordinate_descent_l1, mixture_quadratic_minimizer, PenalizedQuadratic, SolverRun,
    SolverSettings,
};

/// Labeled pairs plus unlabeled covariates (and an optional group attribute)
/// observed for one objective.
#[derive(Debug, Clone)]
pub struct ObjectiveDataset {
    labeled_x: Mat,
    labeled_y: Vec<f64>,
    unlabeled_x: Mat,
    /// Entries in {-1, +1}; covers labeled rows first, then unlabeled rows.
    group: Option<Vec<f64>>,
}

impl ObjectiveDataset {
    pub fn new(
        labeled_x: Mat,
        labeled_y: Vec<f64>,
        unlabeled_x: Mat,
        group: Option<Vec<f64>>,
    ) -> Result<Self> {
        check_dim("labeled responses", labeled_x.rows(), labeled_y.len())?;
        if unlabeled_x.rows() > 0 {
            check_dim(
                "unlabeled covariate columns",
                labeled_x.cols(),
                unlabeled_x.cols(),
            )?;
        }
        if let Some(g) = &group {
            check_dim(
                "group attribute length",
                labeled_x.rows() + unlabeled_x.rows(),
                g.len(),
            )?;
            if let Some(bad) = g.iter().find(|v| **v != 1.0 && **v != -1.0) {
                return Err(Error::InvalidArgument(format!(
                    "group entries must be +1 or -1, got {bad}"
                )));
            }
        }
        Ok(ObjectiveDataset {
            labeled_x,
            labeled_y,
            unlabeled_x,
            group,
        })
    }

    pub fn dim(&self) -> usize {
        self.labeled_x.cols()
    }

    pub fn n_labeled(&self) -> usize {
        self.labeled_x.rows()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.unlabeled_x.rows()
    }

    pub fn labeled_x(&self) -> &Mat {
        &self.labeled_x
    }

    pub fn labeled_y(&self) -> &[f64] {
        &self.labeled_y
    }

    pub fn unlabeled_x(&self) -> &Mat {
        &self.unlabeled_x
    }

    pub fn group(&self) -> Option<&[f64]> {
        self.group.as_deref()
    }

    fn covariate_row(&self, i: usize) -> &[f64] {
        if i < self.n_labeled() {
            self.labeled_x.row(i)
        } else {
            self.unlabeled_x.row(i - self.n_labeled())
        }
    }
}

/// Stage-1 output for one objective.
#[derive(Debug, Clone)]
pub struct ParameterEstimate {
    pub beta_hat: Vec<f64>,
    pub cov_hat: Mat,
    pub mu_hat: Option<Vec<f64>>,
    /// Noise-variance plug-in; shifts objective values, never minimizers.
    pub noise_var: f64,
}

/// Unnormalized second-moment matrix of all covariates (labeled and
/// unlabeled): `(1/(n+N)) Z'Z`. Symmetric PSD by construction.
pub fn sample_covariance(data: &ObjectiveDataset) -> Result<Mat> {
    let m = data.n_labeled() + data.n_unlabeled();
    if m == 0 {
        return Err(Error::EmptyData("sample covariance"));
    }
    let scale = 1.0 / m as f64;
    let mut cov = data.labeled_x.gram(scale);
    if data.n_unlabeled() > 0 {
        let tail = data.unlabeled_x.gram(scale);
        cov.add_scaled(&tail, 1.0);
    }
    cov.symmetrize();
    Ok(cov)
}

/// Signed mean `(1/(n+N)) sum_i a_i x_i` over all rows; requires the group
/// attribute.
pub fn signed_mean(data: &ObjectiveDataset) -> Result<Vec<f64>> {
    let group = data.group().ok_or(Error::MissingGroup)?;
    let m = data.n_labeled() + data.n_unlabeled();
    if m == 0 {
        return Err(Error::EmptyData("signed mean"));
    }
    let mut out = vec![0.0; data.dim()];
    for (i, &a) in group.iter().enumerate() {
        let row = data.covariate_row(i);
        for (o, x) in out.iter_mut().zip(row) {
            *o += a * x;
        }
    }
    for o in &mut out {
        *o /= m as f64;
    }
    Ok(out)
}

/// The lasso penalty `136 B sigma sqrt(log d / n)` used by the theory-backed
/// stage-1 estimator.
pub fn multidist_penalty(d: usize, n: usize, b_bound: f64, sigma: f64) -> f64 {
    136.0 * b_bound * sigma * libm::sqrt(libm::log(d as f64) / n as f64)
}

/// Stage-1 estimator for one squared-loss objective: lasso coefficients on
/// the labeled rows with penalty `136 B sigma sqrt(log d / n)`, and the
/// sample covariance over labeled plus unlabeled rows.
pub fn stage1_multidist(
    data: &ObjectiveDataset,
    b_bound: f64,
    sigma: f64,
    settings: &SolverSettings,
) -> Result<ParameterEstimate> {
    let alpha = multidist_penalty(data.dim(), data.n_labeled().max(1), b_bound, sigma);
    stage1_with_penalty(data, alpha, sigma * sigma, settings)
}

/// Stage-1 estimator with an explicit lasso penalty.
pub fn stage1_with_penalty(
    data: &ObjectiveDataset,
    alpha: f64,
    noise_var: f64,
    settings: &SolverSettings,
) -> Result<ParameterEstimate> {
    if data.n_labeled() == 0 {
        return Err(Error::EmptyData("stage-1 labeled rows"));
    }
    let run = solvers::lasso(&data.labeled_x, &data.labeled_y, alpha, settings)?;
    let cov_hat = sample_covariance(data)?;
    Ok(ParameterEstimate {
        beta_hat: run.solution,
        cov_hat,
        mu_hat: None,
        noise_var,
    })
}

/// Stage-1 estimator with the penalty chosen on a held-out fifth of the
/// labeled rows over [`ALPHA_GRID`].
pub fn stage1_validated(
    data: &ObjectiveDataset,
    noise_var: f64,
    settings: &SolverSettings,
    holdout_lane: u64,
) -> Result<ParameterEstimate> {
    let alpha = select_penalty_validated(
        std::slice::from_ref(data),
        &SimplexWeights::one_hot(0, 1),
        settings,
        holdout_lane,
    )?;
    stage1_with_penalty(data, alpha, noise_var, settings)
}

/// Residual standard deviation of a ridge pilot fit (ridge weight 1e-2);
/// used when the noise level is unknown.
pub fn estimate_noise_sd(data: &ObjectiveDataset) -> Result<f64> {
    let n = data.n_labeled();
    if n == 0 {
        return Err(Error::EmptyData("noise pilot fit"));
    }
    let mut gram = data.labeled_x.gram(1.0 / n as f64);
    gram.add_scaled(&Mat::identity(data.dim()), 1e-2);
    let mut linear = data.labeled_x.tr_matvec(&data.labeled_y);
    for v in &mut linear {
        *v /= n as f64;
    }
    let pilot = gram.solve_sym(&linear, solvers::EIGEN_CLIP);
    let fitted = data.labeled_x.matvec(&pilot);
    let rss: f64 = fitted
        .iter()
        .zip(&data.labeled_y)
        .map(|(f, y)| (y - f) * (y - f))
        .sum();
    Ok((rss / n as f64).sqrt())
}

/// Stage 2: assemble the quadratic tuple `(cov_hat_k, beta_hat_k, offset_k)`
/// and minimize the linear scalarization in closed form. With exact stage-1
/// parameters this reproduces the population minimizer.
pub fn two_stage(
    estimates: &[ParameterEstimate],
    lambda: &SimplexWeights,
    noise_offsets: &[f64],
) -> Result<Vec<f64>> {
    if estimates.is_empty() {
        return Err(Error::EmptyData("two-stage estimates"));
    }
    check_dim("two-stage weights", estimates.len(), lambda.len())?;
    check_dim("two-stage offsets", estimates.len(), noise_offsets.len())?;
    let objectives: Vec<QuadraticObjective> = estimates
        .iter()
        .zip(noise_offsets)
        .map(|(e, &c)| QuadraticObjective::new(e.cov_hat.clone(), e.beta_hat.clone(), c.max(0.0)))
        .collect::<Result<_>>()?;
    let tuple = ObjectiveTuple::new(objectives)?;
    mixture_quadratic_minimizer(&tuple, lambda)
}

/// Two-stage estimator for the fairness-risk pair, in closed form:
/// minimizes
/// `w_risk (theta-beta)' (I + mu mu') (theta-beta) + w_fair <theta, mu>^2`
/// where `lambda = (w_risk, w_fair)`. Requires `w_risk > 0` (the fairness
/// score alone is not strongly convex).
pub fn two_stage_fairness(
    beta_hat: &[f64],
    mu_hat: &[f64],
    lambda: &SimplexWeights,
) -> Result<Vec<f64>> {
    two_stage_fairness_scaled(beta_hat, mu_hat, lambda, 1.0)
}

/// [`two_stage_fairness`] with the risk term multiplied by `risk_scale`
/// (set `1/n` to reproduce the sample-size-scaled variant of the objective;
/// this only reweights the effective trade-off, not the family of solutions).
pub fn two_stage_fairness_scaled(
    beta_hat: &[f64],
    mu_hat: &[f64],
    lambda: &SimplexWeights,
    risk_scale: f64,
) -> Result<Vec<f64>> {
    check_dim("fairness weights", 2, lambda.len())?;
    check_dim("fairness mean", beta_hat.len(), mu_hat.len())?;
    if !(risk_scale > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "risk_scale must be positive, got {risk_scale}"
        )));
    }
    let w_risk = lambda.get(0) * risk_scale;
    let w_fair = lambda.get(1);
    if lambda.get(0) <= 0.0 {
        return Err(Error::InvalidArgument(
            "two-stage fairness needs a positive risk weight".into(),
        ));
    }
    // Minimizer of w_r (t-b)'(I+uu')(t-b) + w_f <t,u>^2:
    //   (w_r (I+uu') + w_f uu') theta = w_r (I+uu') b.
    // The system matrix is a I + c uu' with a = w_r, c = w_r + w_f, inverted
    // by Sherman-Morrison.
    let a = w_risk;
    let c = w_risk + w_fair;
    let mu_sq = dot(mu_hat, mu_hat);
    let mu_b = dot(mu_hat, beta_hat);
    // rhs = w_r (b + <mu,b> mu)
    let mut rhs: Vec<f64> = beta_hat
        .iter()
        .zip(mu_hat)
        .map(|(b, u)| w_risk * (b + mu_b * u))
        .collect();
    // (a I + c uu')^{-1} v = v/a - c <u,v> u / (a (a + c |u|^2))
    let u_rhs = dot(mu_hat, &rhs);
    let coef = c * u_rhs / (a * (a + c * mu_sq));
    for (r, u) in rhs.iter_mut().zip(mu_hat) {
        *r = *r / a - coef * u;
    }
    Ok(rhs)
}

/// Result of a directly regularized fit.
#[derive(Debug, Clone)]
pub struct DirectFit {
    pub solution: Vec<f64>,
    pub alpha: f64,
    pub converged: bool,
}

/// The combined empirical scalarized quadratic
/// `sum_k lambda_k (1/n_k) ||X_k theta - y^k||^2` in penalized-quadratic
/// form (penalty zero).
pub fn direct_problem(
    datasets: &[ObjectiveDataset],
    lambda: &SimplexWeights,
) -> Result<PenalizedQuadratic> {
    if datasets.is_empty() {
        return Err(Error::EmptyData("direct regularization datasets"));
    }
    check_dim("direct weights", datasets.len(), lambda.len())?;
    let d = datasets[0].dim();
    let mut quad = Mat::zeros(d, d);
    let mut linear = vec![0.0; d];
    for (k, data) in datasets.iter().enumerate() {
        check_dim("direct dataset dimension", d, data.dim())?;
        if data.n_labeled() == 0 {
            return Err(Error::EmptyData("direct regularization labeled rows"));
        }
        let w = lambda.get(k);
        if w == 0.0 {
            continue;
        }
        let n_inv = 1.0 / data.n_labeled() as f64;
        quad.add_scaled(&data.labeled_x.gram(n_inv), w);
        let xty = data.labeled_x.tr_matvec(&data.labeled_y);
        for (l, v) in linear.iter_mut().zip(&xty) {
            *l += w * n_inv * v;
        }
    }
    PenalizedQuadratic::new(quad, linear, 0.0)
}

/// 20-point logarithmic penalty grid over [1e-4, 1e1], descending so that
/// warm starts stay useful.
pub fn alpha_grid() -> Vec<f64> {
    let (lo, hi, count) = (1e-4f64, 1e1f64, 20);
    let (llo, lhi) = (libm::log10(lo), libm::log10(hi));
    (0..count)
        .map(|i| libm::pow(10.0, lhi - (lhi - llo) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Select the l1 strength by holding out a fifth of each dataset's labeled
/// rows, scoring the weighted validation squared loss over [`alpha_grid`].
///
/// The holdout fold of dataset `k` depends only on
/// `(settings.seed, first_lane + k)`, so a one-dataset selection at lane `k`
/// sees exactly the fold that a multi-dataset selection starting at lane 0
/// assigns to its `k`-th dataset.
pub fn select_penalty_validated(
    datasets: &[ObjectiveDataset],
    lambda: &SimplexWeights,
    settings: &SolverSettings,
    first_lane: u64,
) -> Result<f64> {
    let mut train = Vec::with_capacity(datasets.len());
    let mut holdout = Vec::with_capacity(datasets.len());
    for (k, data) in datasets.iter().enumerate() {
        let n = data.n_labeled();
        let n_val = (n / 5).max(1).min(n.saturating_sub(1));
        if n_val == 0 || n < 2 {
            // Too small to validate; fall back to the middle of the grid.
            return Ok(1e-2);
        }
        let mut rng =
            CounterRng::with_lane(settings.seed, "alpha-validation", first_lane + k as u64);
        let mut idx = rng.sample_indices(n, n);
        let val_idx: Vec<usize> = idx.drain(..n_val).collect();
        let train_idx = idx;
        let take = |rows: &[usize]| -> (Mat, Vec<f64>) {
            let x = Mat::from_rows(
                rows.iter()
                    .map(|&i| data.labeled_x().row(i).to_vec())
                    .collect(),
            );
            let y = rows.iter().map(|&i| data.labeled_y()[i]).collect();
            (x, y)
        };
        let (tx, ty) = take(&train_idx);
        let (vx, vy) = take(&val_idx);
        train.push(ObjectiveDataset::new(
            tx,
            ty,
            Mat::zeros(0, data.dim()),
            None,
        )?);
        holdout.push((vx, vy));
    }
    let base = direct_problem(&train, lambda)?;
    let mut best = (f64::INFINITY, alpha_grid()[0]);
    let mut warm = vec![0.0; datasets[0].dim()];
    for alpha in alpha_grid() {
        let problem = base.with_penalty(alpha)?;
        let run = coordinate_descent_l1(&problem, &warm, settings)?;
        warm = run.solution.clone();
        let mut score = 0.0;
        for (k, (vx, vy)) in holdout.iter().enumerate() {
            let w = lambda.get(k);
            if w == 0.0 {
                continue;
            }
            let pred = vx.matvec(&run.solution);
            let se: f64 = pred.iter().zip(vy).map(|(p, y)| (p - y) * (p - y)).sum();
            score += w * se / vy.len() as f64;
        }
        if score < best.0 {
            best = (score, alpha);
        }
    }
    Ok(best.1)
}

/// Directly regularized estimator: minimize the empirical scalarized
/// objective plus `alpha ||theta||_1` by coordinate descent. When `alpha`
/// is `None` it is selected on held-out rows via
/// [`select_penalty_validated`].
pub fn direct_regularized(
    datasets: &[ObjectiveDataset],
    lambda: &SimplexWeights,
    alpha: Option<f64>,
    settings: &SolverSettings,
) -> Result<DirectFit> {
    let alpha = match alpha {
        Some(a) => a,
        None => select_penalty_validated(datasets, lambda, settings, 0)?,
    };
    let problem = direct_problem(datasets, lambda)?.with_penalty(alpha)?;
    let run: SolverRun = coordinate_descent_l1(&problem, &vec![0.0; datasets[0].dim()], settings)?;
    Ok(DirectFit {
        solution: run.solution,
        alpha,
        converged: run.converged,
    })
}

/// Plug-in estimator: direct regularization with penalty zero.
pub fn plug_in(
    datasets: &[ObjectiveDataset],
    lambda: &SimplexWeights,
    settings: &SolverSettings,
) -> Result<DirectFit> {
    direct_regularized(datasets, lambda, Some(0.0), settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, sub};

    fn unit_rows(rows: Vec<Vec<f64>>) -> Mat {
        Mat::from_rows(rows)
    }

    #[test]
    fn sample_covariance_single_and_cancelling_rows() {
        let e1 = vec![1.0, 0.0];
        let data = ObjectiveDataset::new(
            unit_rows(vec![e1.clone()]),
            vec![0.0],
            Mat::zeros(0, 2),
            None,
        )
        .unwrap();
        let cov = sample_covariance(&data).unwrap();
        assert_eq!(cov.get(0, 0), 1.0);
        assert_eq!(cov.get(1, 1), 0.0);

        let data2 = ObjectiveDataset::new(
            unit_rows(vec![e1.clone(), vec![-1.0, 0.0]]),
            vec![0.0, 0.0],
            Mat::zeros(0, 2),
            None,
        )
        .unwrap();
        let cov2 = sample_covariance(&data2).unwrap();
        assert_eq!(cov2.get(0, 0), 1.0);
        assert_eq!(cov2.get(1, 1), 0.0);
    }

    #[test]
    fn covariance_uses_unlabeled_rows_too() {
        let data = ObjectiveDataset::new(
            unit_rows(vec![vec![2.0]]),
            vec![0.0],
            unit_rows(vec![vec![0.0]]),
            None,
        )
        .unwrap();
        // (4 + 0) / 2
        assert_eq!(sample_covariance(&data).unwrap().get(0, 0), 2.0);
        let labeled_only = ObjectiveDataset::new(
            unit_rows(vec![vec![2.0]]),
            vec![0.0],
            Mat::zeros(0, 1),
            None,
        )
        .unwrap();
        assert_eq!(sample_covariance(&labeled_only).unwrap().get(0, 0), 4.0);
    }

    #[test]
    fn signed_mean_cases() {
        let mu = vec![0.3, -0.7];
        let data = ObjectiveDataset::new(
            unit_rows(vec![mu.clone(), mu.clone()]),
            vec![0.0, 0.0],
            Mat::zeros(0, 2),
            Some(vec![1.0, 1.0]),
        )
        .unwrap();
        let m = signed_mean(&data).unwrap();
        assert!(norm2(&sub(&m, &mu)) < 1e-15);

        let cancel = ObjectiveDataset::new(
            unit_rows(vec![mu.clone(), mu.clone()]),
            vec![0.0, 0.0],
            Mat::zeros(0, 2),
            Some(vec![1.0, -1.0]),
        )
        .unwrap();
        assert!(norm2(&signed_mean(&cancel).unwrap()) < 1e-15);

        let missing =
            ObjectiveDataset::new(unit_rows(vec![mu]), vec![0.0], Mat::zeros(0, 2), None).unwrap();
        assert!(matches!(signed_mean(&missing), Err(Error::MissingGroup)));
    }

    #[test]
    fn fairness_closed_form_scalar_case() {
        // beta = e1, mu = e1, lambda = (1/2, 1/2):
        // (0.5 * 2 + 0.5) theta = 0.5 * 2  =>  theta = 2/3.
        let theta = two_stage_fairness(
            &[1.0, 0.0],
            &[1.0, 0.0],
            &SimplexWeights::pair(0.5).unwrap(),
        )
        .unwrap();
        assert!((theta[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!(theta[1].abs() < 1e-15);
    }

    #[test]
    fn fairness_weight_zero_returns_beta() {
        let beta = vec![0.4, -0.2, 0.1];
        let mu = vec![0.5, 0.5, 0.0];
        let theta =
            two_stage_fairness(&beta, &mu, &SimplexWeights::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert!(norm2(&sub(&theta, &beta)) < 1e-12);
    }

    #[test]
    fn fairness_orthogonal_mean_is_no_tradeoff() {
        let beta = vec![1.0, 0.0];
        let mu = vec![0.0, 0.8];
        for w in [0.2, 0.5, 0.9] {
            let theta = two_stage_fairness(&beta, &mu, &SimplexWeights::pair(w).unwrap()).unwrap();
            assert!(norm2(&sub(&theta, &beta)) < 1e-12, "w = {w}");
        }
    }

    #[test]
    fn fairness_requires_positive_risk_weight() {
        let err = two_stage_fairness(
            &[1.0, 0.0],
            &[1.0, 0.0],
            &SimplexWeights::new(vec![0.0, 1.0]).unwrap(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn fairness_matches_generic_mixture_solver() {
        let mut rng = CounterRng::new(77, "est-fairness-cross");
        let d = 6;
        let beta = rng.normal_vec(d);
        let mu = rng.normal_vec(d);
        let lambda = SimplexWeights::pair(0.3).unwrap();
        let fast = two_stage_fairness(&beta, &mu, &lambda).unwrap();
        let risk = crate::model::fairness_risk_objective(&beta, &mu, 0.0);
        let fair = crate::model::fairness_objective(&mu);
        let tuple = ObjectiveTuple::new(vec![risk, fair]).unwrap();
        let general = mixture_quadratic_minimizer(&tuple, &lambda).unwrap();
        assert!(norm2(&sub(&fast, &general)) < 1e-9);
    }

    #[test]
    fn fairness_norm_never_exceeds_beta_norm() {
        let mut rng = CounterRng::new(78, "est-fairness-norm");
        for trial in 0..20 {
            let d = 5;
            let beta = rng.normal_vec(d);
            let mut mu = rng.normal_vec(d);
            let scale = rng.uniform() / norm2(&mu); // ||mu|| <= 1
            for v in &mut mu {
                *v *= scale;
            }
            let lambda = SimplexWeights::pair(0.1 + 0.8 * rng.uniform()).unwrap();
            let theta = two_stage_fairness(&beta, &mu, &lambda).unwrap();
            assert!(
                norm2(&theta) <= norm2(&beta) + 1e-10,
                "trial {trial}: ||theta|| = {} > ||beta|| = {}",
                norm2(&theta),
                norm2(&beta)
            );
        }
    }

    #[test]
    fn direct_regularized_is_least_squares_for_single_noiseless_dataset() {
        let mut rng = CounterRng::new(5, "est-direct-ls");
        let n = 30;
        let d = 6;
        let x = Mat::from_fn(n, d, |_, _| rng.normal());
        let beta = rng.normal_vec(d);
        let y = x.matvec(&beta);
        let data = ObjectiveDataset::new(x, y, Mat::zeros(0, d), None).unwrap();
        let fit = direct_regularized(
            &[data],
            &SimplexWeights::one_hot(0, 1),
            Some(0.0),
            &SolverSettings::default(),
        )
        .unwrap();
        assert!(norm2(&sub(&fit.solution, &beta)) < 1e-7);
    }

    #[test]
    fn huge_penalty_returns_zero_vector() {
        let mut rng = CounterRng::new(6, "est-direct-zero");
        let n = 20;
        let d = 4;
        let x = Mat::from_fn(n, d, |_, _| rng.normal());
        let y: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let data = ObjectiveDataset::new(x, y, Mat::zeros(0, d), None).unwrap();
        let fit = direct_regularized(
            &[data],
            &SimplexWeights::one_hot(0, 1),
            Some(1e6),
            &SolverSettings::default(),
        )
        .unwrap();
        assert!(norm2(&fit.solution) == 0.0);
    }

    #[test]
    fn two_stage_with_exact_parameters_is_population_minimizer() {
        let mut rng = CounterRng::new(7, "est-two-stage-exact");
        let d = 5;
        let make = |rng: &mut CounterRng| {
            let x = Mat::from_fn(d + 2, d, |_, _| rng.normal());
            x.gram(1.0 / (d + 2) as f64)
        };
        let covs = [make(&mut rng), make(&mut rng)];
        let betas = [rng.normal_vec(d), rng.normal_vec(d)];
        let estimates: Vec<ParameterEstimate> = (0..2)
            .map(|k| ParameterEstimate {
                beta_hat: betas[k].clone(),
                cov_hat: covs[k].clone(),
                mu_hat: None,
                noise_var: 0.0,
            })
            .collect();
        let lambda = SimplexWeights::pair(0.35).unwrap();
        let ts = two_stage(&estimates, &lambda, &[0.0, 0.0]).unwrap();

        let objs: Vec<QuadraticObjective> = (0..2)
            .map(|k| QuadraticObjective::new(covs[k].clone(), betas[k].clone(), 0.0).unwrap())
            .collect();
        let tuple = ObjectiveTuple::new(objs).unwrap();
        let star = mixture_quadratic_minimizer(&tuple, &lambda).unwrap();
        assert!(norm2(&sub(&ts, &star)) < 1e-10);

        // One-hot weights return the matching coefficient estimate.
        let e1 = two_stage(&estimates, &SimplexWeights::one_hot(1, 2), &[0.0, 0.0]).unwrap();
        assert!(norm2(&sub(&e1, &betas[1])) < 1e-8);
    }

    #[test]
    fn ridge_pilot_recovers_the_noise_scale() {
        let mut rng = CounterRng::new(44, "est-noise-pilot");
        let (n, d) = (400usize, 5usize);
        let x = Mat::from_fn(n, d, |_, _| rng.normal());
        let beta = rng.normal_vec(d);
        for sigma in [0.0, 0.8] {
            let mut y = x.matvec(&beta);
            for v in &mut y {
                *v += sigma * rng.normal();
            }
            let data = ObjectiveDataset::new(x.clone(), y, Mat::zeros(0, d), None).unwrap();
            let est = estimate_noise_sd(&data).unwrap();
            assert!(
                (est - sigma).abs() <= 0.1 + 0.1 * sigma,
                "sigma {sigma}: pilot estimate {est}"
            );
        }
    }

    #[test]
    fn validated_stage1_is_reasonable_end_to_end() {
        let mut rng = CounterRng::new(45, "est-stage1-validated");
        let (n, d) = (60usize, 10usize);
        let x = Mat::from_fn(n, d, |_, _| rng.normal());
        let mut beta = vec![0.0; d];
        beta[2] = 1.0;
        let mut y = x.matvec(&beta);
        for v in &mut y {
            *v += 0.3 * rng.normal();
        }
        let data = ObjectiveDataset::new(x, y, Mat::zeros(0, d), None).unwrap();
        let est = stage1_validated(&data, 0.09, &SolverSettings::default(), 0).unwrap();
        assert!(norm2(&sub(&est.beta_hat, &beta)) < 0.4);
    }

    #[test]
    fn stage1_zero_noise_reduces_to_least_squares() {
        let mut rng = CounterRng::new(8, "est-stage1");
        let n = 40;
        let d = 8;
        let x = Mat::from_fn(n, d, |_, _| rng.normal());
        let beta = rng.normal_vec(d);
        let y = x.matvec(&beta);
        let data = ObjectiveDataset::new(x, y, Mat::zeros(0, d), None).unwrap();
        let est = stage1_multidist(&data, 1.0, 0.0, &SolverSettings::default()).unwrap();
        assert!(norm2(&sub(&est.beta_hat, &beta)) < 1e-7);
        assert_eq!(est.noise_var, 0.0);
    }
}
