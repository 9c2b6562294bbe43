//! Quality measures for estimated Pareto points and fronts.
//!
//! Hypervolume of a set `S` inside `[0, r]^K` is the Lebesgue measure of the
//! dominated region `{x : exists s in S with s <= x}`. For two objectives it
//! is computed exactly by a sort-and-sweep; for general `K` by Monte Carlo
//! over the positive sphere, using
//!
//! ```text
//!   HV_r(S) = c_K E_u[ max_{s in S} min_k ((r - s_k)/u_k)^K ],
//!   c_K = pi^{K/2} / (2^K Gamma(K/2 + 1)),
//! ```
//!
//! with `u` uniform on the positive unit sphere (absolute standard normals,
//! normalized). The excess scalarized loss subtracts the exact closed-form
//! minimum for linear scalarization; for Chebyshev the minimum is located
//! approximately and the result is flagged.

use crate::error::{Error, Result};
use crate::linalg::{check_dim, norm2, sub};
use crate::model::{
    eval_scalarized, regularity_of, ObjectiveTuple, ScalarizationKind, SimplexWeights,
};
use crate::rng::CounterRng;
use crate::solvers::mixture_quadratic_minimizer;

/// One point of a front: the K objective values of some parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontPoint {
    values: Vec<f64>,
}

impl FrontPoint {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyData("front point"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "front point entries must be finite and nonnegative, got {v}"
            )));
        }
        Ok(FrontPoint { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Controls for Monte-Carlo hypervolume estimation.
#[derive(Debug, Clone)]
pub struct HypervolumeSpec {
    /// Upper corner of the reference box `[0, r]^K`.
    pub reference: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Euclidean distance between a parameter estimate and its target.
pub fn estimation_error(theta_hat: &[f64], theta_star: &[f64]) -> Result<f64> {
    check_dim("estimation_error", theta_star.len(), theta_hat.len())?;
    Ok(norm2(&sub(theta_hat, theta_star)))
}

/// Excess scalarized loss together with a flag telling whether the reference
/// minimum was located approximately.
#[derive(Debug, Clone, Copy)]
pub struct Excess {
    pub value: f64,
    pub approximate: bool,
}

/// `S_lambda(L(theta_hat)) - min_theta S_lambda(L(theta))`.
///
/// Linear scalarization subtracts the exact closed-form minimum (an error is
/// returned when the weighted quadratic is singular). Chebyshev locates an
/// approximate minimum by scanning linear-scalarization minimizers and
/// refining coordinate-wise; the result is flagged `approximate` and is
/// never negative because the probe set contains `theta_hat` itself.
pub fn excess_scalarized(
    theta_hat: &[f64],
    objs: &ObjectiveTuple,
    lambda: &SimplexWeights,
    kind: ScalarizationKind,
) -> Result<Excess> {
    let value_at_hat = eval_scalarized(theta_hat, objs, lambda, kind)?;
    match kind {
        ScalarizationKind::Linear => {
            let minimizer = mixture_quadratic_minimizer(objs, lambda)?;
            let min_value = eval_scalarized(&minimizer, objs, lambda, kind)?;
            Ok(Excess {
                value: value_at_hat - min_value,
                approximate: false,
            })
        }
        ScalarizationKind::Chebyshev => {
            let min_value = chebyshev_min(theta_hat, objs, lambda)?;
            Ok(Excess {
                value: value_at_hat - min_value,
                approximate: true,
            })
        }
    }
}

/// Approximate minimum of the weighted Chebyshev scalarization: probe the
/// linear-scalarization minimizers of an auxiliary weight grid, keep the
/// best candidate (including `anchor`), then refine coordinate-wise by
/// ternary search. Each coordinate section of a max of convex quadratics is
/// convex, so the per-coordinate search is safe.
fn chebyshev_min(anchor: &[f64], objs: &ObjectiveTuple, lambda: &SimplexWeights) -> Result<f64> {
    let eval = |theta: &[f64]| eval_scalarized(theta, objs, lambda, ScalarizationKind::Chebyshev);
    let mut best_theta = anchor.to_vec();
    let mut best = eval(anchor)?;
    let k = objs.len();
    let mut probes: Vec<SimplexWeights> = Vec::new();
    if k == 2 {
        for i in 0..=64 {
            probes.push(SimplexWeights::pair(i as f64 / 64.0)?);
        }
    } else {
        let mut rng = CounterRng::new(0, "chebyshev-probe");
        for _ in 0..128 {
            let draws: Vec<f64> = (0..k).map(|_| rng.gamma(1.0)).collect();
            probes.push(SimplexWeights::normalized(draws)?);
        }
        probes.push(SimplexWeights::uniform(k));
    }
    for w in &probes {
        if let Ok(theta) = mixture_quadratic_minimizer(objs, w) {
            let v = eval(&theta)?;
            if v < best {
                best = v;
                best_theta = theta;
            }
        }
    }
    // Coordinate-wise refinement with a shrinking bracket.
    let dim = objs.dim();
    let mut width = 1.0 + best_theta.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    for _sweep in 0..60 {
        for j in 0..dim {
            let (mut lo, mut hi) = (best_theta[j] - width, best_theta[j] + width);
            for _ in 0..40 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                let mut t1 = best_theta.clone();
                t1[j] = m1;
                let mut t2 = best_theta.clone();
                t2[j] = m2;
                if eval(&t1)? <= eval(&t2)? {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let candidate = 0.5 * (lo + hi);
            let mut t = best_theta.clone();
            t[j] = candidate;
            let v = eval(&t)?;
            if v < best {
                best = v;
                best_theta = t;
            }
        }
        width *= 0.7;
        if width < 1e-9 {
            break;
        }
    }
    Ok(best)
}

/// Keep the nondominated points sorted by first coordinate (ascending) with
/// strictly decreasing second coordinate.
fn staircase_2d(points: &[FrontPoint]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.values()[0], p.values()[1]))
        .collect();
    pts.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
    let mut stairs: Vec<(f64, f64)> = Vec::new();
    for (x, y) in pts {
        if let Some(&(_, last_y)) = stairs.last() {
            if y >= last_y {
                continue; // dominated by an earlier point
            }
        }
        stairs.push((x, y));
    }
    stairs
}

/// Exact hypervolume for two objectives by sort-and-sweep over the
/// nondominated staircase.
pub fn hypervolume_exact_2d(points: &[FrontPoint], r: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyData("hypervolume points"));
    }
    for p in points {
        if p.len() != 2 {
            return Err(Error::DimensionMismatch {
                context: "exact hypervolume",
                expected: 2,
                got: p.len(),
            });
        }
        if p.values().iter().any(|v| *v > r) {
            return Err(Error::InvalidArgument(format!(
                "front point {:?} lies outside [0, {r}]^2",
                p.values()
            )));
        }
    }
    let stairs = staircase_2d(points);
    let mut area = 0.0;
    for (i, &(x, y)) in stairs.iter().enumerate() {
        let next_x = stairs.get(i + 1).map_or(r, |&(nx, _)| nx);
        area += (next_x - x) * (r - y);
    }
    Ok(area)
}

/// `c_K = pi^{K/2} / (2^K Gamma(K/2 + 1))`, the volume of the positive
/// unit-ball orthant.
pub fn positive_orthant_ball_volume(k: usize) -> f64 {
    assert!(k >= 1);
    // Gamma(K/2 + 1) by the recurrence from Gamma(1) or Gamma(1/2).
    let (mut gamma, mut x) = if k % 2 == 0 {
        (1.0f64, 1.0f64)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5f64)
    };
    let target = k as f64 / 2.0 + 1.0;
    while x < target - 0.25 {
        gamma *= x;
        x += 1.0;
    }
    libm::pow(std::f64::consts::PI, k as f64 / 2.0) / (libm::pow(2.0, k as f64) * gamma)
}

/// Monte-Carlo hypervolume for K objectives via random directions on the
/// positive sphere.
pub fn hypervolume_mc(points: &[FrontPoint], spec: &HypervolumeSpec) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyData("hypervolume points"));
    }
    if spec.samples == 0 {
        return Err(Error::EmptyData("hypervolume samples"));
    }
    let k = points[0].len();
    let r = spec.reference;
    for p in points {
        if p.len() != k {
            return Err(Error::DimensionMismatch {
                context: "hypervolume points",
                expected: k,
                got: p.len(),
            });
        }
        if p.values().iter().any(|v| *v > r) {
            return Err(Error::InvalidArgument(format!(
                "front point {:?} lies outside [0, {r}]^{k}",
                p.values()
            )));
        }
    }
    let mut rng = CounterRng::new(spec.seed, "hypervolume-mc");
    let c_k = positive_orthant_ball_volume(k);
    let mut acc = 0.0f64;
    let mut u = vec![0.0f64; k];
    for _ in 0..spec.samples {
        loop {
            for v in u.iter_mut() {
                *v = rng.normal().abs();
            }
            let n = norm2(&u);
            if n > 0.0 {
                for v in u.iter_mut() {
                    *v /= n;
                }
                break;
            }
        }
        let mut best = 0.0f64;
        for p in points {
            let mut t = f64::INFINITY;
            for (s, ui) in p.values().iter().zip(&u) {
                let ui = ui.max(1e-300);
                t = t.min((r - s) / ui);
            }
            best = best.max(t);
        }
        acc += libm::pow(best, k as f64);
    }
    Ok(c_k * acc / spec.samples as f64)
}

/// Evaluation of the smoothness-based hypervolume bound
/// `HV_r(estimated front) >= (1 - 2 eps_max / r)^K HV_r(true front)`.
#[derive(Debug, Clone)]
pub struct HypervolumeBoundReport {
    /// Hypervolume of the perturbed/estimated front.
    pub lhs: f64,
    /// `(1 - 2 eps_max / r)^K` times the hypervolume of the true front.
    pub rhs: f64,
    pub eps_max: f64,
    pub holds: bool,
}

/// Check the front-degradation bound on a weight grid: for each grid point
/// the true minimizer is computed in closed form, `eps_max` aggregates
/// `G_k |delta| + (nu_k/2) |delta|^2` over grid points and objectives, and
/// both hypervolumes are computed exactly for K=2 (Monte Carlo with 2e5
/// samples otherwise). Requires `r >= 2 max_lambda |L(theta*_lambda)|_inf`.
pub fn hypervolume_degradation_bound(
    objs: &ObjectiveTuple,
    lambda_grid: &[SimplexWeights],
    theta_hats: &[Vec<f64>],
    r: f64,
) -> Result<HypervolumeBoundReport> {
    check_dim("bound grid", lambda_grid.len(), theta_hats.len())?;
    if lambda_grid.is_empty() {
        return Err(Error::EmptyData("bound grid"));
    }
    let constants = regularity_of(objs, lambda_grid)?;
    let k = objs.len();
    let mut true_front = Vec::with_capacity(lambda_grid.len());
    let mut est_front = Vec::with_capacity(lambda_grid.len());
    let mut eps_max = 0.0f64;
    let mut sup_norm = 0.0f64;
    for (lambda, theta_hat) in lambda_grid.iter().zip(theta_hats) {
        let star = mixture_quadratic_minimizer(objs, lambda)?;
        let delta = estimation_error(theta_hat, &star)?;
        for i in 0..k {
            let eps = constants.grad_sup[i] * delta + 0.5 * constants.smoothness[i] * delta * delta;
            eps_max = eps_max.max(eps);
        }
        let star_values = objs.values(&star)?;
        sup_norm = star_values.iter().fold(sup_norm, |a, v| a.max(*v));
        true_front.push(FrontPoint::new(star_values)?);
        est_front.push(FrontPoint::new(objs.values(theta_hat)?)?);
    }
    if r < 2.0 * sup_norm - 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "reference {r} is below twice the front sup-norm {sup_norm}"
        )));
    }
    let hv = |front: &[FrontPoint]| -> Result<f64> {
        if k == 2 {
            hypervolume_exact_2d(front, r)
        } else {
            hypervolume_mc(
                front,
                &HypervolumeSpec {
                    reference: r,
                    samples: 200_000,
                    seed: 0,
                },
            )
        }
    };
    let lhs = hv(&est_front)?;
    let factor = (1.0 - 2.0 * eps_max / r).max(0.0);
    let rhs = libm::pow(factor, k as f64) * hv(&true_front)?;
    Ok(HypervolumeBoundReport {
        lhs,
        rhs,
        eps_max,
        holds: lhs >= rhs - 1e-9 * (1.0 + rhs),
    })
}

/// Fraction of threshold decisions `score >= threshold` that disagree with
/// the 0/1 labels.
pub fn error_rate(scores: &[f64], labels: &[f64], threshold: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyData("error rate scores"));
    }
    check_dim("error rate labels", scores.len(), labels.len())?;
    let mut wrong = 0usize;
    for (s, l) in scores.iter().zip(labels) {
        if *l != 0.0 && *l != 1.0 {
            return Err(Error::InvalidArgument(format!(
                "labels must be 0 or 1, got {l}"
            )));
        }
        let pred = if *s >= threshold { 1.0 } else { 0.0 };
        if pred != *l {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / scores.len() as f64)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx.sqrt() * vy.sqrt())
}

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).unwrap());
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}
