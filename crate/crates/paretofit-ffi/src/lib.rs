//! C ABI for the paretofit core.
//!
//! Objective tuples are opaque handles built field by field; everything
//! else passes flat row-major `double` buffers. Functions return a
//! [`PfStatus`] code and write results through caller-owned output buffers,
//! so bindings need no Rust allocator interaction beyond the paired
//! `pf_tuple_new` / `pf_tuple_free`.
//!
//! The C header is generated into `include/paretofit.h` at build time.

use std::os::raw::c_char;

use paretofit::solvers;
use paretofit::{
    eval_scalarized, Mat, ObjectiveTuple, QuadraticObjective, ScalarizationKind, SimplexWeights,
    SolverSettings,
};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Singular = 4,
    NotConverged = 5,
}

fn status_of(err: &paretofit::Error) -> PfStatus {
    match err {
        paretofit::Error::DimensionMismatch { .. } => PfStatus::DimensionMismatch,
        paretofit::Error::SingularScalarization { .. } => PfStatus::Singular,
        _ => PfStatus::InvalidArgument,
    }
}

/// Opaque builder for a tuple of quadratic objectives.
pub struct PfTuple {
    dim: usize,
    objectives: Vec<Option<QuadraticObjective>>,
}

/// Allocate a tuple of `num_objectives` objectives over dimension `dim`.
/// Free with [`pf_tuple_free`]. Returns null on zero sizes.
#[no_mangle]
pub extern "C" fn pf_tuple_new(dim: usize, num_objectives: usize) -> *mut PfTuple {
    if dim == 0 || num_objectives == 0 {
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(PfTuple {
        dim,
        objectives: vec![None; num_objectives],
    }))
}

/// # Safety
/// `tuple` must come from [`pf_tuple_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pf_tuple_free(tuple: *mut PfTuple) {
    if !tuple.is_null() {
        drop(Box::from_raw(tuple));
    }
}

/// Set objective `index` to `(theta - center)' quad (theta - center) + offset`.
/// `quad` is row-major `dim x dim` and must be symmetric; `center` has
/// length `dim`.
///
/// # Safety
/// `tuple` must be a live handle; `quad` and `center` must point to
/// `dim*dim` and `dim` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn pf_tuple_set_objective(
    tuple: *mut PfTuple,
    index: usize,
    quad: *const f64,
    center: *const f64,
    offset: f64,
) -> PfStatus {
    if tuple.is_null() || quad.is_null() || center.is_null() {
        return PfStatus::NullPointer;
    }
    let tuple = &mut *tuple;
    if index >= tuple.objectives.len() {
        return PfStatus::InvalidArgument;
    }
    let d = tuple.dim;
    let quad = std::slice::from_raw_parts(quad, d * d);
    let center = std::slice::from_raw_parts(center, d).to_vec();
    let mat = Mat::from_fn(d, d, |i, j| quad[i * d + j]);
    match QuadraticObjective::new(mat, center, offset) {
        Ok(obj) => {
            tuple.objectives[index] = Some(obj);
            PfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

fn materialize(tuple: &PfTuple) -> Result<ObjectiveTuple, PfStatus> {
    let objs: Option<Vec<QuadraticObjective>> = tuple.objectives.iter().cloned().collect();
    match objs {
        Some(objs) => ObjectiveTuple::new(objs).map_err(|e| status_of(&e)),
        None => Err(PfStatus::InvalidArgument),
    }
}

unsafe fn weights_from(weights: *const f64, len: usize) -> Result<SimplexWeights, PfStatus> {
    if weights.is_null() {
        return Err(PfStatus::NullPointer);
    }
    SimplexWeights::new(std::slice::from_raw_parts(weights, len).to_vec())
        .map_err(|e| status_of(&e))
}

/// Closed-form minimizer of the linearly scalarized tuple. Writes `dim`
/// doubles to `out`.
///
/// # Safety
/// `tuple` live; `weights` holds `num_weights` doubles; `out` has space for
/// `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn pf_mixture_minimizer(
    tuple: *const PfTuple,
    weights: *const f64,
    num_weights: usize,
    out: *mut f64,
) -> PfStatus {
    if tuple.is_null() || out.is_null() {
        return PfStatus::NullPointer;
    }
    let tuple = &*tuple;
    let lambda = match weights_from(weights, num_weights) {
        Ok(w) => w,
        Err(s) => return s,
    };
    let objs = match materialize(tuple) {
        Ok(o) => o,
        Err(s) => return s,
    };
    match solvers::mixture_quadratic_minimizer(&objs, &lambda) {
        Ok(theta) => {
            std::ptr::copy_nonoverlapping(theta.as_ptr(), out, theta.len());
            PfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Scalarized objective value at `theta`; `chebyshev` nonzero selects the
/// weighted maximum, zero the weighted sum.
///
/// # Safety
/// `tuple` live; `theta` holds `dim` doubles; `weights` holds `num_weights`
/// doubles; `out` is a valid double pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_eval_scalarized(
    tuple: *const PfTuple,
    theta: *const f64,
    weights: *const f64,
    num_weights: usize,
    chebyshev: i32,
    out: *mut f64,
) -> PfStatus {
    if tuple.is_null() || theta.is_null() || out.is_null() {
        return PfStatus::NullPointer;
    }
    let tuple = &*tuple;
    let lambda = match weights_from(weights, num_weights) {
        Ok(w) => w,
        Err(s) => return s,
    };
    let objs = match materialize(tuple) {
        Ok(o) => o,
        Err(s) => return s,
    };
    let theta = std::slice::from_raw_parts(theta, tuple.dim);
    let kind = if chebyshev != 0 {
        ScalarizationKind::Chebyshev
    } else {
        ScalarizationKind::Linear
    };
    match eval_scalarized(theta, &objs, &lambda, kind) {
        Ok(v) => {
            *out = v;
            PfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Lasso `(1/n)||X theta - y||^2 + alpha ||theta||_1` by coordinate
/// descent. `x` is row-major `n x d`. Writes `d` doubles to `out`; returns
/// `NotConverged` (with `out` still filled) when the iteration cap is hit.
///
/// # Safety
/// `x` holds `n*d` doubles, `y` holds `n`, `out` has space for `d`.
#[no_mangle]
pub unsafe extern "C" fn pf_lasso(
    x: *const f64,
    n_rows: usize,
    dim: usize,
    y: *const f64,
    alpha: f64,
    tol: f64,
    max_iter: usize,
    out: *mut f64,
) -> PfStatus {
    if x.is_null() || y.is_null() || out.is_null() {
        return PfStatus::NullPointer;
    }
    if n_rows == 0 || dim == 0 {
        return PfStatus::InvalidArgument;
    }
    let xs = std::slice::from_raw_parts(x, n_rows * dim);
    let ys = std::slice::from_raw_parts(y, n_rows);
    let design = Mat::from_fn(n_rows, dim, |i, j| xs[i * dim + j]);
    let settings = SolverSettings {
        tol,
        max_iter,
        seed: 0,
    };
    match solvers::lasso(&design, ys, alpha, &settings) {
        Ok(run) => {
            std::ptr::copy_nonoverlapping(run.solution.as_ptr(), out, dim);
            if run.converged {
                PfStatus::Ok
            } else {
                PfStatus::NotConverged
            }
        }
        Err(e) => status_of(&e),
    }
}

/// Closed-form two-stage fairness-risk estimate for weights
/// `(w_risk, w_fair)`. Writes `dim` doubles to `out`.
///
/// # Safety
/// `beta` and `mu` hold `dim` doubles; `out` has space for `dim`.
#[no_mangle]
pub unsafe extern "C" fn pf_two_stage_fairness(
    beta: *const f64,
    mu: *const f64,
    dim: usize,
    w_risk: f64,
    w_fair: f64,
    out: *mut f64,
) -> PfStatus {
    if beta.is_null() || mu.is_null() || out.is_null() {
        return PfStatus::NullPointer;
    }
    let beta = std::slice::from_raw_parts(beta, dim);
    let mu = std::slice::from_raw_parts(mu, dim);
    let lambda = match SimplexWeights::new(vec![w_risk, w_fair]) {
        Ok(w) => w,
        Err(e) => return status_of(&e),
    };
    match paretofit::estimators::two_stage_fairness(beta, mu, &lambda) {
        Ok(theta) => {
            std::ptr::copy_nonoverlapping(theta.as_ptr(), out, dim);
            PfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Exact two-objective hypervolume of `n_points` front points inside
/// `[0, r]^2`. `values` is row-major `n_points x 2`.
///
/// # Safety
/// `values` holds `2 * n_points` doubles; `out` is a valid double pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_hypervolume_exact_2d(
    values: *const f64,
    n_points: usize,
    reference: f64,
    out: *mut f64,
) -> PfStatus {
    if values.is_null() || out.is_null() {
        return PfStatus::NullPointer;
    }
    let vals = std::slice::from_raw_parts(values, n_points * 2);
    let points: Result<Vec<_>, _> = (0..n_points)
        .map(|i| paretofit::metrics::FrontPoint::new(vals[2 * i..2 * i + 2].to_vec()))
        .collect();
    let points = match points {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    match paretofit::metrics::hypervolume_exact_2d(&points, reference) {
        Ok(v) => {
            *out = v;
            PfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Monte-Carlo hypervolume of `n_points` front points with `num_objectives`
/// coordinates each, inside `[0, r]^K`.
///
/// # Safety
/// `values` holds `n_points * num_objectives` doubles; `out` is valid.
#[no_mangle]
pub unsafe extern "C" fn pf_hypervolume_mc(
    values: *const f64,
    n_points: usize,
    num_objectives: usize,
    reference: f64,
    samples: usize,
    seed: u64,
    out: *mut f64,
) -> PfStatus {
    if values.is_null() || out.is_null() {
        return PfStatus::NullPointer;
    }
    if num_objectives == 0 {
        return PfStatus::InvalidArgument;
    }
    let vals = std::slice::from_raw_parts(values, n_points * num_objectives);
    let points: Result<Vec<_>, _> = (0..n_points)
        .map(|i| {
            paretofit::metrics::FrontPoint::new(
                vals[num_objectives * i..num_objectives * (i + 1)].to_vec(),
            )
        })
        .collect();
    let points = match points {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    let spec = paretofit::metrics::HypervolumeSpec {
        reference,
        samples,
        seed,
    };
    match paretofit::metrics::hypervolume_mc(&points, &spec) {
        Ok(v) => {
            *out = v;
            PfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
