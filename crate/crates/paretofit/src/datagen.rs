//! Seeded synthetic instance and sample generators.
//!
//! Generators for sparse multi-distribution regression and the Gaussian
//! group (fairness) model, plus two constructive worst-case families used as
//! test fixtures:
//!
//! - [`adversarial_instance`]: for any target `v` in the unit ball and
//!   positive weights `(w1, w2)`, covariance matrices with condition number
//!   at most `gamma^2` and 1-sparse centers such that
//!   `w1 S1 + w2 S2 = I` exactly and the scalarized minimizer equals `v`;
//! - [`necessity_instance`]: the rank-two perturbations `I +- A(v)` with
//!   `A(v) = v b' + b v' - <v,b> b b'`, which place the equal-weight
//!   minimizer of the pair `(b, -b)` at `v`.
//!
//! Every generator is a pure function of its arguments including the seed.

use crate::error::{Error, Result};
use crate::estimators::ObjectiveDataset;
use crate::linalg::{dot, norm2, Mat};
use crate::model::SimplexWeights;
use crate::rng::CounterRng;

/// How covariance eigenvalues are drawn inside their box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// Uniform in `[eig_lo, eig_hi]`: flat spectra.
    Uniform,
    /// Log-uniform in `[eig_lo, eig_hi]`: decaying spectra with effective
    /// rank below the dimension.
    LogUniform,
}

/// Ground truths and covariances for a synthetic multi-distribution
/// regression problem.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub betas: Vec<Vec<f64>>,
    pub covariances: Vec<Mat>,
    pub noise_sd: f64,
    pub dim: usize,
    pub sparsity: usize,
}

impl SyntheticInstance {
    /// `num_objectives` unit-norm `s`-sparse ground truths and eigenvalue-
    /// boxed covariances with flat spectra, all derived from `seed`.
    pub fn generate(
        dim: usize,
        num_objectives: usize,
        sparsity: usize,
        eig_lo: f64,
        eig_hi: f64,
        noise_sd: f64,
        seed: u64,
    ) -> Result<Self> {
        Self::generate_with_spectrum(
            dim,
            num_objectives,
            sparsity,
            eig_lo,
            eig_hi,
            noise_sd,
            seed,
            SpectrumKind::Uniform,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn generate_with_spectrum(
        dim: usize,
        num_objectives: usize,
        sparsity: usize,
        eig_lo: f64,
        eig_hi: f64,
        noise_sd: f64,
        seed: u64,
        spectrum: SpectrumKind,
    ) -> Result<Self> {
        if num_objectives == 0 {
            return Err(Error::EmptyData("synthetic instance objectives"));
        }
        if !(noise_sd >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise level must be nonnegative, got {noise_sd}"
            )));
        }
        let mut betas = Vec::with_capacity(num_objectives);
        let mut covariances = Vec::with_capacity(num_objectives);
        for k in 0..num_objectives {
            betas.push(random_sparse_vector_lane(dim, sparsity, seed, k as u64)?);
            covariances.push(match spectrum {
                SpectrumKind::Uniform => {
                    random_covariance_lane(dim, eig_lo, eig_hi, seed, k as u64)?
                }
                SpectrumKind::LogUniform => {
                    random_covariance_log_uniform_lane(dim, eig_lo, eig_hi, seed, k as u64)?
                }
            });
        }
        Ok(SyntheticInstance {
            betas,
            covariances,
            noise_sd,
            dim,
            sparsity,
        })
    }
}

/// Unit-norm vector with exactly `s` nonzero coordinates chosen uniformly,
/// values standard normal before normalization.
pub fn random_sparse_vector(d: usize, s: usize, seed: u64) -> Result<Vec<f64>> {
    random_sparse_vector_lane(d, s, seed, 0)
}

pub fn random_sparse_vector_lane(d: usize, s: usize, seed: u64, lane: u64) -> Result<Vec<f64>> {
    if s == 0 || s > d {
        return Err(Error::InvalidArgument(format!(
            "sparsity must satisfy 1 <= s <= d, got s={s}, d={d}"
        )));
    }
    let mut rng = CounterRng::with_lane(seed, "sparse-vector", lane);
    let support = rng.sample_indices(d, s);
    let mut out = vec![0.0; d];
    loop {
        for &j in &support {
            out[j] = rng.normal();
        }
        let n = norm2(&out);
        if n > 0.0 {
            for v in &mut out {
                *v /= n;
            }
            return Ok(out);
        }
    }
}

/// Random symmetric matrix with eigenvalues uniform in `[eig_lo, eig_hi]`
/// and Haar-random eigenvectors (QR of a Gaussian matrix).
pub fn random_covariance(d: usize, eig_lo: f64, eig_hi: f64, seed: u64) -> Result<Mat> {
    random_covariance_lane(d, eig_lo, eig_hi, seed, 0)
}

pub fn random_covariance_lane(
    d: usize,
    eig_lo: f64,
    eig_hi: f64,
    seed: u64,
    lane: u64,
) -> Result<Mat> {
    conjugated_spectrum(d, eig_lo, eig_hi, seed, lane, false)
}

/// Like [`random_covariance_lane`] but with eigenvalues log-uniform in
/// `[eig_lo, eig_hi]`: an anisotropic family whose spectrum decays, so its
/// effective rank sits well below the dimension.
pub fn random_covariance_log_uniform_lane(
    d: usize,
    eig_lo: f64,
    eig_hi: f64,
    seed: u64,
    lane: u64,
) -> Result<Mat> {
    conjugated_spectrum(d, eig_lo, eig_hi, seed, lane, true)
}

fn conjugated_spectrum(
    d: usize,
    eig_lo: f64,
    eig_hi: f64,
    seed: u64,
    lane: u64,
    log_uniform: bool,
) -> Result<Mat> {
    if !(eig_lo > 0.0 && eig_lo <= eig_hi) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < eig_lo <= eig_hi, got [{eig_lo}, {eig_hi}]"
        )));
    }
    let mut rng = CounterRng::with_lane(seed, "covariance", lane);
    let gauss = Mat::from_fn(d, d, |_, _| rng.normal());
    let q = orthonormal_columns(&gauss);
    let eigs: Vec<f64> = (0..d)
        .map(|_| {
            if log_uniform {
                libm::exp(rng.uniform_in(libm::log(eig_lo), libm::log(eig_hi)))
            } else {
                rng.uniform_in(eig_lo, eig_hi)
            }
        })
        .collect();
    // Q diag(eigs) Q'
    let mut out = Mat::zeros(d, d);
    for (j, &l) in eigs.iter().enumerate() {
        for r in 0..d {
            let v = q.get(r, j) * l;
            for c in 0..d {
                let cur = out.get(r, c);
                out.set(r, c, cur + v * q.get(c, j));
            }
        }
    }
    out.symmetrize();
    Ok(out)
}

/// Modified Gram-Schmidt on the columns; positive pivots keep the
/// orientation convention fixed.
fn orthonormal_columns(a: &Mat) -> Mat {
    let (n, m) = (a.rows(), a.cols());
    let mut q = a.clone();
    for j in 0..m {
        for p in 0..j {
            let mut proj = 0.0;
            for r in 0..n {
                proj += q.get(r, p) * q.get(r, j);
            }
            for r in 0..n {
                let v = q.get(r, j) - proj * q.get(r, p);
                q.set(r, j, v);
            }
        }
        let mut nrm = 0.0;
        for r in 0..n {
            nrm += q.get(r, j) * q.get(r, j);
        }
        let nrm = nrm.sqrt();
        if nrm > 0.0 {
            for r in 0..n {
                let v = q.get(r, j) / nrm;
                q.set(r, j, v);
            }
        } else {
            // Degenerate draw; fall back to a canonical basis vector.
            for r in 0..n {
                q.set(r, j, if r == j { 1.0 } else { 0.0 });
            }
        }
    }
    q
}

/// Draw `n` labeled and `n_unlabeled` unlabeled rows from objective `k` of a
/// synthetic instance: covariates `N(0, Sigma_k)`, responses
/// `y = X beta_k + xi` with `xi ~ N(0, sigma^2)`.
pub fn sample_multidist(
    instance: &SyntheticInstance,
    k: usize,
    n: usize,
    n_unlabeled: usize,
    seed: u64,
) -> Result<ObjectiveDataset> {
    if k >= instance.betas.len() {
        return Err(Error::InvalidArgument(format!(
            "objective index {k} out of range"
        )));
    }
    if n + n_unlabeled == 0 {
        return Err(Error::EmptyData("sample request"));
    }
    let d = instance.dim;
    let sqrt_cov = instance.covariances[k].sqrt_psd();
    let mut rng = CounterRng::with_lane(seed, "multidist-sample", k as u64);
    fn draw_rows(rows: usize, d: usize, sqrt_cov: &Mat, rng: &mut CounterRng) -> Mat {
        let mut out = Mat::zeros(rows, d);
        for i in 0..rows {
            let z = rng.normal_vec(d);
            let x = sqrt_cov.matvec(&z);
            for (j, v) in x.iter().enumerate() {
                out.set(i, j, *v);
            }
        }
        out
    }
    let labeled_x = draw_rows(n, d, &sqrt_cov, &mut rng);
    let mut labeled_y = labeled_x.matvec(&instance.betas[k]);
    for y in &mut labeled_y {
        *y += instance.noise_sd * rng.normal();
    }
    let unlabeled_x = draw_rows(n_unlabeled, d, &sqrt_cov, &mut rng);
    ObjectiveDataset::new(labeled_x, labeled_y, unlabeled_x, None)
}

/// Draw from the Gaussian group model: `a_i` Rademacher,
/// `x_i = a_i mu + z`, labeled `y = <x, beta> + xi`. The group attribute is
/// recorded for all rows.
pub fn sample_fairness(
    beta: &[f64],
    mu: &[f64],
    sigma: f64,
    n: usize,
    n_unlabeled: usize,
    seed: u64,
) -> Result<ObjectiveDataset> {
    if n + n_unlabeled == 0 {
        return Err(Error::EmptyData("sample request"));
    }
    if beta.len() != mu.len() {
        return Err(Error::DimensionMismatch {
            context: "fairness model",
            expected: beta.len(),
            got: mu.len(),
        });
    }
    let _d = beta.len();
    let mut rng = CounterRng::new(seed, "fairness-sample");
    let mut group = Vec::with_capacity(n + n_unlabeled);
    fn draw_rows(rows: usize, mu: &[f64], group: &mut Vec<f64>, rng: &mut CounterRng) -> Mat {
        let mut out = Mat::zeros(rows, mu.len());
        for i in 0..rows {
            let a = rng.sign();
            group.push(a);
            for (j, m) in mu.iter().enumerate() {
                out.set(i, j, a * m + rng.normal());
            }
        }
        out
    }
    let labeled_x = draw_rows(n, mu, &mut group, &mut rng);
    let mut labeled_y = labeled_x.matvec(beta);
    for y in &mut labeled_y {
        *y += sigma * rng.normal();
    }
    let unlabeled_x = draw_rows(n_unlabeled, mu, &mut group, &mut rng);
    ObjectiveDataset::new(labeled_x, labeled_y, unlabeled_x, Some(group))
}

/// Fixed design with eigenvalues of `X'X/n` inside `[1/gamma, gamma]`:
/// `X = sqrt(n) (Sigma^{1/2}; 0)` for a random eigenvalue-boxed `Sigma`.
pub fn fixed_design_matrix(d: usize, n: usize, gamma: f64, seed: u64) -> Result<Mat> {
    if n < d {
        return Err(Error::InvalidArgument(format!(
            "fixed design needs n >= d, got n={n}, d={d}"
        )));
    }
    if !(gamma > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fixed design needs gamma > 1, got {gamma}"
        )));
    }
    let cov = random_covariance(d, 1.0 / gamma, gamma, seed)?;
    Ok(design_from_covariance(&cov, n))
}

/// Deterministic design matrix with `X'X/n` equal to the given covariance:
/// `sqrt(n) Sigma^{1/2}` stacked over zero rows. Requires `n >= d`.
pub fn design_from_covariance(cov: &Mat, n: usize) -> Mat {
    let d = cov.rows();
    assert!(n >= d, "design_from_covariance needs n >= d");
    let root = cov.sqrt_psd();
    let sn = (n as f64).sqrt();
    Mat::from_fn(n, d, |i, j| if i < d { sn * root.get(i, j) } else { 0.0 })
}

/// The worst-case pair of covariances and 1-sparse centers for two
/// objectives: `w1 S1 + w2 S2 = I` exactly and the scalarized minimizer sits
/// at `v`.
#[derive(Debug, Clone)]
pub struct AdversarialInstance {
    pub sigma1: Mat,
    pub sigma2: Mat,
    pub beta1: Vec<f64>,
    pub beta2: Vec<f64>,
}

/// Construct the adversarial two-objective instance for target `v` (norm at
/// most one), strictly positive pair weights ands condition bound `gamma`.
pub fn adversarial_instance(
    v: &[f64],
    lambda: &SimplexWeights,
    gamma: f64,
) -> Result<AdversarialInstance> {
    if lambda.len() != 2 {
        return Err(Error::DimensionMismatch {
            context: "adversarial instance weights",
            expected: 2,
            got: lambda.len(),
        });
    }
    let (w1, w2) = (lambda.get(0), lambda.get(1));
    if w1 <= 0.0 || w2 <= 0.0 {
        return Err(Error::InvalidArgument(
            "adversarial instance needs strictly positive weights".into(),
        ));
    }
    if !(gamma > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "adversarial instance needs gamma > 1, got {gamma}"
        )));
    }
    let d = v.len();
    if d == 0 {
        return Err(Error::EmptyData("adversarial target"));
    }
    let vnorm = norm2(v);
    if vnorm > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "adversarial target must lie in the unit ball, got norm {vnorm}"
        )));
    }
    let pivot = v.iter().position(|x| *x != 0.0);
    let ident = Mat::identity(d);
    match pivot {
        None => {
            // v = 0: identity covariances with centers that cancel.
            let mut beta1 = vec![0.0; d];
            beta1[0] = 1.0;
            let mut beta2 = vec![0.0; d];
            beta2[0] = -w1 / w2;
            Ok(AdversarialInstance {
                sigma1: ident.clone(),
                sigma2: ident,
                beta1,
                beta2,
            })
        }
        Some(p) => {
            let c = (gamma - 1.0) / gamma;
            let mut sigma1 = Mat::outer(v, v, w2 * c);
            sigma1.add_scaled(&ident, 1.0);
            let mut sigma2 = Mat::outer(v, v, -w1 * c);
            sigma2.add_scaled(&ident, 1.0);
            let scale = gamma / ((gamma - 1.0) * v[p]);
            let mut beta1 = vec![0.0; d];
            beta1[p] = scale / w1;
            let mut beta2 = vec![0.0; d];
            beta2[p] = -scale / w2;
            Ok(AdversarialInstance {
                sigma1,
                sigma2,
                beta1,
                beta2,
            })
        }
    }
}

/// The rank-two family `Sigma_1 = I + A(v)`, `Sigma_2 = I - A(v)` with
/// `A(v) = v b' + b v' - <v,b> b b'`. With centers `(b, -b)` and equal
/// weights the scalarized minimizer is exactly `v`; eigenvalues stay inside
/// `[1 - 2|v|, 1 + 2|v|]`.
pub fn necessity_instance(v: &[f64], beta: &[f64]) -> Result<(Mat, Mat)> {
    if v.len() != beta.len() {
        return Err(Error::DimensionMismatch {
            context: "necessity instance",
            expected: beta.len(),
            got: v.len(),
        });
    }
    let bnorm = norm2(beta);
    if (bnorm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "necessity instance needs a unit-norm direction, got norm {bnorm}"
        )));
    }
    let vnorm = norm2(v);
    if vnorm > 0.25 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "necessity instance needs |v| <= 1/4, got {vnorm}"
        )));
    }
    let d = v.len();
    let vb = dot(v, beta);
    let mut a = Mat::outer(v, beta, 1.0);
    a.add_scaled(&Mat::outer(beta, v, 1.0), 1.0);
    a.add_scaled(&Mat::outer(beta, beta, vb), -1.0);
    let ident = Mat::identity(d);
    let mut sigma1 = ident.clone();
    sigma1.add_scaled(&a, 1.0);
    let mut sigma2 = ident;
    sigma2.add_scaled(&a, -1.0);
    Ok((sigma1, sigma2))
}
