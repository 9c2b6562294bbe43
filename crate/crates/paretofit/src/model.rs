//! Objectives, preference weights and scalarizations.
//!
//! All objectives live in the quadratic normal form
//! `L(theta) = (theta - b)' Q (theta - b) + c` with `Q` symmetric PSD. The
//! squared-loss prediction risk of a linear model puts the covariance matrix
//! in `Q`, the ground truth in `b` and the noise variance in `c`; the
//! demographic-parity score of the Gaussian group model is `(mu mu', 0, 0)`;
//! fixed-design regression uses `Q = X'X/n`. Keeping everything in this form
//! gives closed-form scalarized minimizers and exact regularity constants.

use crate::error::{Error, Result};
use crate::linalg::{check_dim, dot, norm2, sub, Mat};
use crate::solvers;

/// Preference weights on the probability simplex: nonnegative entries that
/// sum to one (within 1e-12).
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyData("simplex weights"));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "simplex weight {w} is negative or non-finite"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "simplex weights sum to {sum}, not 1"
            )));
        }
        Ok(SimplexWeights(weights))
    }

    /// Normalize a nonnegative vector onto the simplex.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize weights with sum {sum}"
            )));
        }
        let mut w: Vec<f64> = weights.iter().map(|v| v / sum).collect();
        // Guard the invariant against rounding in the division.
        let s: f64 = w.iter().sum();
        let last = w.len() - 1;
        w[last] += 1.0 - s;
        if w[last] < 0.0 {
            w[last] = 0.0;
        }
        SimplexWeights::new(w)
    }

    /// Weight vector `e_k`.
    pub fn one_hot(k: usize, num_objectives: usize) -> Self {
        assert!(k < num_objectives);
        let mut w = vec![0.0; num_objectives];
        w[k] = 1.0;
        SimplexWeights(w)
    }

    pub fn uniform(num_objectives: usize) -> Self {
        assert!(num_objectives > 0);
        SimplexWeights::normalized(vec![1.0; num_objectives]).unwrap()
    }

    pub fn pair(first: f64) -> Result<Self> {
        SimplexWeights::new(vec![first, 1.0 - first])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }
}

/// Which scalarization collapses the objective tuple to one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarizationKind {
    /// Weighted sum `sum_k w_k L_k`.
    Linear,
    /// Weighted maximum `max_k w_k L_k`.
    Chebyshev,
}

/// One quadratic objective `(theta - b)' Q (theta - b) + c`.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    quad: Mat,
    center: Vec<f64>,
    offset: f64,
}

impl QuadraticObjective {
    pub const SYM_TOL: f64 = 1e-12;

    /// Build an objective. `quad` must be square, match `center`, and be
    /// symmetric within 1e-12 elementwise; it is symmetrized exactly by
    /// averaging with its transpose. `offset` must be nonnegative.
    ///
    /// Positive semidefiniteness is required of callers; every construction
    /// path in this crate (Gram matrices, outer products, eigenvalue-boxed
    /// draws) satisfies it, and the closed-form solver rejects indefinite
    /// input when it decomposes the weighted matrix.
    pub fn new(mut quad: Mat, center: Vec<f64>, offset: f64) -> Result<Self> {
        if quad.rows() != quad.cols() {
            return Err(Error::InvalidArgument(format!(
                "quadratic term must be square, got {}x{}",
                quad.rows(),
                quad.cols()
            )));
        }
        check_dim("objective center", quad.rows(), center.len())?;
        if !(offset >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "objective offset must be nonnegative, got {offset}"
            )));
        }
        let asym = quad.max_asymmetry();
        if asym > Self::SYM_TOL * (1.0 + quad.frob_norm()) {
            return Err(Error::InvalidArgument(format!(
                "quadratic term is asymmetric by {asym:.3e}"
            )));
        }
        quad.symmetrize();
        Ok(QuadraticObjective {
            quad,
            center,
            offset,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn quad(&self) -> &Mat {
        &self.quad
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Strong convexity `2 lambda_min(Q)` and smoothness `2 lambda_max(Q)`.
    pub fn convexity_bounds(&self) -> (f64, f64) {
        let e = self.quad.sym_eigen();
        (2.0 * e.min(), 2.0 * e.max())
    }
}

/// A K-tuple of quadratic objectives over a shared parameter space.
#[derive(Debug, Clone)]
pub struct ObjectiveTuple {
    objectives: Vec<QuadraticObjective>,
    dim: usize,
}

impl ObjectiveTuple {
    pub fn new(objectives: Vec<QuadraticObjective>) -> Result<Self> {
        let first = objectives
            .first()
            .ok_or(Error::EmptyData("objective tuple"))?;
        let dim = first.dim();
        for (k, obj) in objectives.iter().enumerate() {
            if obj.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "objective tuple",
                    expected: dim,
                    got: objectives[k].dim(),
                });
            }
        }
        Ok(ObjectiveTuple { objectives, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }

    pub fn objective(&self, k: usize) -> &QuadraticObjective {
        &self.objectives[k]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, QuadraticObjective> {
        self.objectives.iter()
    }

    /// Objective values at `theta` as a vector.
    pub fn values(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.objectives
            .iter()
            .map(|o| eval_objective(theta, o))
            .collect()
    }
}

/// Constants describing how regular an objective tuple is: per-objective
/// strong convexity and smoothness, gradient suprema over scalarized
/// minimizers, and the parameter-Lipschitz constant of the gradient map.
#[derive(Debug, Clone)]
pub struct RegularityConstants {
    /// `mu_k = 2 lambda_min(Q_k)`.
    pub strong_convexity: Vec<f64>,
    /// `nu_k = 2 lambda_max(Q_k)`.
    pub smoothness: Vec<f64>,
    /// `G_k`: max over the supplied weight grid of the gradient norm of
    /// objective k at the scalarized minimizer.
    pub grad_sup: Vec<f64>,
    /// `zeta = max over grid minimizers of 2 max(|theta*| + 2, 2 B^2)` with
    /// `B^2 = max_k lambda_max(Q_k)`.
    pub lipschitz_param: f64,
}

impl RegularityConstants {
    /// Weighted strong convexity of the linear scalarization.
    pub fn scalarized_convexity(&self, lambda: &SimplexWeights) -> f64 {
        dot(self.strong_convexity.as_slice(), lambda.as_slice())
    }

    /// Weighted smoothness of the linear scalarization.
    pub fn scalarized_smoothness(&self, lambda: &SimplexWeights) -> f64 {
        dot(self.smoothness.as_slice(), lambda.as_slice())
    }
}

/// `(theta - b)' Q (theta - b) + c`.
pub fn eval_objective(theta: &[f64], obj: &QuadraticObjective) -> Result<f64> {
    check_dim("eval_objective", obj.dim(), theta.len())?;
    let d = sub(theta, obj.center());
    let qd = obj.quad().matvec(&d);
    Ok(dot(&d, &qd) + obj.offset())
}

/// Gradient `2 Q (theta - b)`.
pub fn grad_objective(theta: &[f64], obj: &QuadraticObjective) -> Result<Vec<f64>> {
    check_dim("grad_objective", obj.dim(), theta.len())?;
    let d = sub(theta, obj.center());
    let mut g = obj.quad().matvec(&d);
    for v in &mut g {
        *v *= 2.0;
    }
    Ok(g)
}

/// Scalarized objective value at `theta`.
pub fn eval_scalarized(
    theta: &[f64],
    objs: &ObjectiveTuple,
    lambda: &SimplexWeights,
    kind: ScalarizationKind,
) -> Result<f64> {
    check_dim("eval_scalarized weights", objs.len(), lambda.len())?;
    check_dim("eval_scalarized theta", objs.dim(), theta.len())?;
    let mut acc: f64 = match kind {
        ScalarizationKind::Linear => 0.0,
        ScalarizationKind::Chebyshev => f64::NEG_INFINITY,
    };
    for (k, obj) in objs.iter().enumerate() {
        let w = lambda.get(k);
        let v = eval_objective(theta, obj)?;
        match kind {
            ScalarizationKind::Linear => acc += w * v,
            ScalarizationKind::Chebyshev => acc = acc.max(w * v),
        }
    }
    Ok(acc)
}

/// Demographic-parity score of the Gaussian group model with group-mean
/// offset `mu`: evaluates to `<mu, theta>^2`.
pub fn fairness_objective(mu: &[f64]) -> QuadraticObjective {
    QuadraticObjective::new(Mat::outer(mu, mu, 1.0), vec![0.0; mu.len()], 0.0)
        .expect("outer product construction is symmetric")
}

/// Squared-loss risk under the Gaussian group model: the covariance of the
/// covariates is `I + mu mu'`, so the risk is
/// `(theta - beta)'(I + mu mu')(theta - beta) + sigma^2`.
pub fn fairness_risk_objective(beta: &[f64], mu: &[f64], sigma2: f64) -> QuadraticObjective {
    assert_eq!(beta.len(), mu.len(), "beta and mu dimensions differ");
    let mut q = Mat::outer(mu, mu, 1.0);
    q.add_scaled(&Mat::identity(mu.len()), 1.0);
    QuadraticObjective::new(q, beta.to_vec(), sigma2)
        .expect("identity plus outer product is symmetric")
}

/// Compute [`RegularityConstants`] for a tuple over a grid of weights.
///
/// Requires at least one strongly convex objective; every grid point must
/// admit a closed-form scalarized minimizer.
pub fn regularity_of(
    objs: &ObjectiveTuple,
    lambda_grid: &[SimplexWeights],
) -> Result<RegularityConstants> {
    if lambda_grid.is_empty() {
        return Err(Error::EmptyData("lambda grid"));
    }
    let k = objs.len();
    let mut strong_convexity = Vec::with_capacity(k);
    let mut smoothness = Vec::with_capacity(k);
    for obj in objs.iter() {
        let (mu, nu) = obj.convexity_bounds();
        strong_convexity.push(mu);
        smoothness.push(nu);
    }
    if !strong_convexity.iter().any(|m| *m > 0.0) {
        return Err(Error::InvalidArgument(
            "no objective is strongly convex".into(),
        ));
    }
    // B^2 bounds every covariance spectrum; smoothness is 2 lambda_max.
    let b_sq = smoothness.iter().cloned().fold(0.0f64, f64::max) / 2.0;
    let mut grad_sup = vec![0.0f64; k];
    let mut zeta = 0.0f64;
    for lambda in lambda_grid {
        let minimizer = solvers::mixture_quadratic_minimizer(objs, lambda)?;
        for (i, obj) in objs.iter().enumerate() {
            let g = grad_objective(&minimizer, obj)?;
            grad_sup[i] = grad_sup[i].max(norm2(&g));
        }
        zeta = zeta.max(2.0 * (norm2(&minimizer) + 2.0).max(2.0 * b_sq));
    }
    Ok(RegularityConstants {
        strong_convexity,
        smoothness,
        grad_sup,
        lipschitz_param: zeta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn random_psd(d: usize, rng: &mut CounterRng) -> Mat {
        let x = Mat::from_fn(d + 2, d, |_, _| rng.normal());
        x.gram(1.0 / (d + 2) as f64)
    }

    #[test]
    fn simplex_weights_validate() {
        assert!(SimplexWeights::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexWeights::new(vec![0.6, 0.5]).is_err());
        assert!(SimplexWeights::new(vec![-0.1, 1.1]).is_err());
        assert!(SimplexWeights::new(vec![]).is_err());
        let w = SimplexWeights::normalized(vec![2.0, 6.0]).unwrap();
        assert!((w.get(0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn eval_at_center_returns_offset() {
        let mut rng = CounterRng::new(1, "model-center");
        let q = random_psd(4, &mut rng);
        let b = rng.normal_vec(4);
        let obj = QuadraticObjective::new(q, b.clone(), 0.25).unwrap();
        assert!((eval_objective(&b, &obj).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn eval_identity_is_squared_norm() {
        let obj = QuadraticObjective::new(Mat::identity(2), vec![0.0, 0.0], 0.0).unwrap();
        assert_eq!(eval_objective(&[3.0, 4.0], &obj).unwrap(), 25.0);
    }

    #[test]
    fn eval_matches_triple_loop_oracle() {
        let mut rng = CounterRng::new(7, "model-triple-loop");
        let q = random_psd(3, &mut rng);
        let b = rng.normal_vec(3);
        let theta = rng.normal_vec(3);
        let obj = QuadraticObjective::new(q.clone(), b.clone(), 0.0).unwrap();
        // Independent dense evaluation.
        let mut expected = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                expected += (theta[i] - b[i]) * q.get(i, j) * (theta[j] - b[j]);
            }
        }
        let got = eval_objective(&theta, &obj).unwrap();
        assert!((got - expected).abs() < 1e-12 * (1.0 + expected.abs()));
    }

    #[test]
    fn gradient_zero_at_center_and_linear_for_identity() {
        let mut rng = CounterRng::new(3, "model-grad");
        let q = random_psd(4, &mut rng);
        let b = rng.normal_vec(4);
        let obj = QuadraticObjective::new(q, b.clone(), 0.0).unwrap();
        let g = grad_objective(&b, &obj).unwrap();
        assert!(norm2(&g) < 1e-14);

        let ident = QuadraticObjective::new(Mat::identity(3), vec![0.0; 3], 0.0).unwrap();
        let v = vec![1.0, -2.0, 0.5];
        let g = grad_objective(&v, &ident).unwrap();
        for (gi, vi) in g.iter().zip(&v) {
            assert!((gi - 2.0 * vi).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = CounterRng::new(3, "model-grad-fd");
        let d = 5;
        let q = random_psd(d, &mut rng);
        let b = rng.normal_vec(d);
        let obj = QuadraticObjective::new(q, b, 0.0).unwrap();
        let theta = rng.normal_vec(d);
        let g = grad_objective(&theta, &obj).unwrap();
        let h = 1e-5;
        for i in 0..d {
            let mut up = theta.clone();
            let mut dn = theta.clone();
            up[i] += h;
            dn[i] -= h;
            let fd = (eval_objective(&up, &obj).unwrap() - eval_objective(&dn, &obj).unwrap())
                / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6, "coord {i}: fd {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn scalarization_one_hot_and_arithmetic() {
        let o1 = QuadraticObjective::new(Mat::identity(1), vec![0.0], 2.0).unwrap();
        let o2 = QuadraticObjective::new(Mat::identity(1), vec![0.0], 4.0).unwrap();
        let tuple = ObjectiveTuple::new(vec![o1, o2]).unwrap();
        let theta = [0.0];
        let e1 = SimplexWeights::one_hot(0, 2);
        for kind in [ScalarizationKind::Linear, ScalarizationKind::Chebyshev] {
            let v = eval_scalarized(&theta, &tuple, &e1, kind).unwrap();
            assert_eq!(v, 2.0);
        }
        let half = SimplexWeights::pair(0.5).unwrap();
        let lin = eval_scalarized(&theta, &tuple, &half, ScalarizationKind::Linear).unwrap();
        let che = eval_scalarized(&theta, &tuple, &half, ScalarizationKind::Chebyshev).unwrap();
        assert_eq!(lin, 3.0);
        assert_eq!(che, 2.0);
    }

    #[test]
    fn linear_scalarization_sums_individual_values() {
        let mut rng = CounterRng::new(11, "model-linear-sum");
        let d = 4;
        let objs: Vec<QuadraticObjective> = (0..3)
            .map(|_| {
                QuadraticObjective::new(random_psd(d, &mut rng), rng.normal_vec(d), 0.1).unwrap()
            })
            .collect();
        let tuple = ObjectiveTuple::new(objs.clone()).unwrap();
        let lambda = SimplexWeights::normalized(vec![0.2, 0.5, 0.3]).unwrap();
        let theta = rng.normal_vec(d);
        let direct = eval_scalarized(&theta, &tuple, &lambda, ScalarizationKind::Linear).unwrap();
        let summed: f64 = objs
            .iter()
            .enumerate()
            .map(|(k, o)| lambda.get(k) * eval_objective(&theta, o).unwrap())
            .sum();
        assert!((direct - summed).abs() < 1e-12);
    }

    #[test]
    fn fairness_objective_is_squared_inner_product() {
        let zero = fairness_objective(&[0.0, 0.0]);
        assert_eq!(eval_objective(&[1.0, 2.0], &zero).unwrap(), 0.0);

        let e1 = fairness_objective(&[1.0, 0.0]);
        assert_eq!(eval_objective(&[3.0, -1.0], &e1).unwrap(), 9.0);

        let mut rng = CounterRng::new(5, "model-fairness");
        let mu = {
            let v = rng.normal_vec(6);
            let n = norm2(&v);
            v.into_iter().map(|x| x / n).collect::<Vec<_>>()
        };
        let theta = rng.normal_vec(6);
        let obj = fairness_objective(&mu);
        let ip = dot(&mu, &theta);
        assert!((eval_objective(&theta, &obj).unwrap() - ip * ip).abs() < 1e-12);

        // Orthogonal theta gives exactly zero.
        let mut orth = theta;
        let proj = dot(&mu, &orth);
        for (o, m) in orth.iter_mut().zip(&mu) {
            *o -= proj * m;
        }
        assert!(eval_objective(&orth, &obj).unwrap() < 1e-20);
    }

    #[test]
    fn fairness_risk_objective_spectrum() {
        let q0 = fairness_risk_objective(&[0.0, 0.0], &[0.0, 0.0], 0.0);
        let mut dev = q0.quad().clone();
        dev.add_scaled(&Mat::identity(2), -1.0);
        assert!(dev.frob_norm() < 1e-15);

        let q1 = fairness_risk_objective(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 0.0);
        assert_eq!(q1.quad().get(0, 0), 2.0);
        assert_eq!(q1.quad().get(1, 1), 1.0);
        assert_eq!(q1.quad().get(2, 2), 1.0);

        let mut rng = CounterRng::new(9, "model-fairness-risk");
        let mu = rng.normal_vec(5);
        let beta = rng.normal_vec(5);
        let obj = fairness_risk_objective(&beta, &mu, 0.5);
        let top = obj.quad().sym_eigen().max();
        let mu_sq = dot(&mu, &mu);
        assert!((top - (1.0 + mu_sq)).abs() < 1e-10);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let mut q = Mat::identity(2);
        q.set(0, 1, 0.5);
        assert!(QuadraticObjective::new(q, vec![0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn regularity_constants_identity_and_single_objective() {
        let grid = vec![
            SimplexWeights::pair(0.0).unwrap(),
            SimplexWeights::pair(0.5).unwrap(),
            SimplexWeights::pair(1.0).unwrap(),
        ];
        let objs = ObjectiveTuple::new(vec![
            QuadraticObjective::new(Mat::identity(3), vec![1.0, 0.0, 0.0], 0.0).unwrap(),
            QuadraticObjective::new(Mat::identity(3), vec![0.0, 1.0, 0.0], 0.0).unwrap(),
        ])
        .unwrap();
        let c = regularity_of(&objs, &grid).unwrap();
        for k in 0..2 {
            assert!((c.strong_convexity[k] - 2.0).abs() < 1e-12);
            assert!((c.smoothness[k] - 2.0).abs() < 1e-12);
        }
        // Single objective: the minimizer is stationary, so G = 0.
        let single = ObjectiveTuple::new(vec![QuadraticObjective::new(
            Mat::identity(2),
            vec![0.3, -0.4],
            0.0,
        )
        .unwrap()])
        .unwrap();
        let c1 = regularity_of(&single, &[SimplexWeights::one_hot(0, 1)]).unwrap();
        assert!(c1.grad_sup[0] < 1e-12);
    }

    #[test]
    fn regularity_constants_are_ordered_on_random_instances() {
        let mut rng = CounterRng::new(13, "model-regularity");
        let grid: Vec<SimplexWeights> = (0..9)
            .map(|i| SimplexWeights::pair(i as f64 / 8.0).unwrap())
            .collect();
        for _ in 0..20 {
            let d = 2 + rng.below(8);
            let objs = ObjectiveTuple::new(
                (0..2)
                    .map(|_| {
                        QuadraticObjective::new(random_psd(d, &mut rng), rng.normal_vec(d), 0.0)
                            .unwrap()
                    })
                    .collect(),
            )
            .unwrap();
            let c = regularity_of(&objs, &grid).unwrap();
            for k in 0..2 {
                assert!(c.strong_convexity[k] <= c.smoothness[k] + 1e-12);
                assert!(c.grad_sup[k] >= 0.0);
            }
            assert!(c.lipschitz_param > 0.0);
        }
        // Brute-force oracle for the gradient supremum on one seeded
        // two-objective instance.
        let d = 4;
        let objs = ObjectiveTuple::new(
            (0..2)
                .map(|_| {
                    QuadraticObjective::new(random_psd(d, &mut rng), rng.normal_vec(d), 0.0)
                        .unwrap()
                })
                .collect(),
        )
        .unwrap();
        let c = regularity_of(&objs, &grid).unwrap();
        let mut brute = vec![0.0f64; 2];
        for lambda in &grid {
            let theta = crate::solvers::mixture_quadratic_minimizer(&objs, lambda).unwrap();
            for (k, obj) in objs.iter().enumerate() {
                brute[k] = brute[k].max(norm2(&grad_objective(&theta, obj).unwrap()));
            }
        }
        for k in 0..2 {
            assert!((c.grad_sup[k] - brute[k]).abs() <= 1e-12 * (1.0 + brute[k]));
        }
    }

    #[test]
    fn regularity_requires_strong_convexity_somewhere() {
        let objs = ObjectiveTuple::new(vec![
            fairness_objective(&[1.0, 0.0]),
            fairness_objective(&[0.0, 1.0]),
        ])
        .unwrap();
        assert!(regularity_of(&objs, &[SimplexWeights::pair(0.5).unwrap()]).is_err());
    }
}
