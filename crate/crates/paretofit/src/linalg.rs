//! Small dense matrices and the symmetric eigendecomposition used by the
//! closed-form solvers.
//!
//! Row-major `Vec<f64>` storage; everything is written for the desk-scale
//! dimensions of this crate (d up to a few thousand). Symmetric
//! eigendecomposition is a cyclic Jacobi sweep, which is deterministic and
//! accurate enough to back the clipped-inverse linear solves.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            data.extend_from_slice(row);
        }
        Mat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Outer product `scale * u v'`.
    pub fn outer(u: &[f64], v: &[f64], scale: f64) -> Self {
        Mat::from_fn(u.len(), v.len(), |i, j| scale * u[i] * v[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += row[j] * x[j];
            }
            out[i] = acc;
        }
        out
    }

    /// `A' x`.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len());
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let xi = x[i];
            for j in 0..self.cols {
                out[j] += row[j] * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for j in 0..other.cols {
                    out_row[j] += a * orow[j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `scale * A' A` (Gram matrix of the rows).
    pub fn gram(&self, scale: f64) -> Mat {
        let d = self.cols;
        let mut out = Mat::zeros(d, d);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..d {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[i * d..(i + 1) * d];
                for j in 0..d {
                    out_row[j] += ri * row[j];
                }
            }
        }
        for v in &mut out.data {
            *v *= scale;
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Mat, scale: f64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn max_asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let m = 0.5 * (self.get(i, j) + self.get(j, i));
                self.set(i, j, m);
                self.set(j, i, m);
            }
        }
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
    /// Returns eigenvalues in ascending order with matching eigenvector
    /// columns.
    pub fn sym_eigen(&self) -> SymEigen {
        assert_eq!(self.rows, self.cols, "sym_eigen needs a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        a.symmetrize();
        let mut v = Mat::identity(n);
        let eps = 1e-14 * (1.0 + a.frob_norm());
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off = off.max(a.get(i, j).abs());
                }
            }
            if off <= eps {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let app = a.get(p, p);
                    let aqq = a.get(q, q);
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
        let vectors = Mat::from_fn(n, n, |i, j| v.get(i, order[j]));
        SymEigen { values, vectors }
    }

    /// Largest-magnitude eigenvalue of a symmetric matrix.
    pub fn spectral_norm_sym(&self) -> f64 {
        let e = self.sym_eigen();
        e.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Symmetric PSD square root (negative eigenvalues clamped to zero).
    pub fn sqrt_psd(&self) -> Mat {
        let e = self.sym_eigen();
        e.rebuild(|l| l.max(0.0).sqrt())
    }

    /// Solve `A x = b` for symmetric `A` by eigendecomposition, clipping
    /// eigenvalues at `clip` before inverting.
    pub fn solve_sym(&self, b: &[f64], clip: f64) -> Vec<f64> {
        let e = self.sym_eigen();
        let vt_b = e.vectors.tr_matvec(b);
        let scaled: Vec<f64> = vt_b
            .iter()
            .zip(&e.values)
            .map(|(y, l)| y / l.max(clip))
            .collect();
        e.vectors.matvec(&scaled)
    }
}

/// Result of [`Mat::sym_eigen`].
pub struct SymEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: Mat,
}

impl SymEigen {
    /// Reassemble `V f(L) V'`.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> Mat {
        let n = self.values.len();
        let mut out = Mat::zeros(n, n);
        for (j, &l) in self.values.iter().enumerate() {
            let fl = f(l);
            if fl == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = self.vectors.get(r, j) * fl;
                if vr == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let cur = out.get(r, c);
                    out.set(r, c, cur + vr * self.vectors.get(c, j));
                }
            }
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn random_sym(d: usize, rng: &mut CounterRng) -> Mat {
        let mut m = Mat::from_fn(d, d, |_, _| rng.normal());
        let t = m.transpose();
        m.add_scaled(&t, 1.0);
        m.scale(0.5);
        m
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let mut rng = CounterRng::new(42, "linalg-eigen");
        for d in [1, 2, 5, 17] {
            let m = random_sym(d, &mut rng);
            let e = m.sym_eigen();
            let back = e.rebuild(|l| l);
            let mut diff = back.clone();
            diff.add_scaled(&m, -1.0);
            assert!(
                diff.frob_norm() <= 1e-10 * (1.0 + m.frob_norm()),
                "d={d}: reconstruction error {}",
                diff.frob_norm()
            );
            // Orthonormal columns.
            let vtv = e.vectors.transpose().matmul(&e.vectors);
            let mut dev = vtv;
            dev.add_scaled(&Mat::identity(d), -1.0);
            assert!(dev.frob_norm() <= 1e-11 * d as f64 + 1e-12);
            for w in e.values.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn solve_sym_matches_known_inverse() {
        let m = Mat::from_rows(vec![vec![4.0, 1.0], vec![1.0, 3.0]]);
        let x = m.solve_sym(&[1.0, 2.0], 1e-12);
        // inverse of [[4,1],[1,3]] is 1/11 [[3,-1],[-1,4]]
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-12);
        assert!((x[1] - 7.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn gram_equals_explicit_product() {
        let mut rng = CounterRng::new(9, "linalg-gram");
        let x = Mat::from_fn(7, 4, |_, _| rng.normal());
        let g = x.gram(1.0 / 7.0);
        let mut explicit = x.transpose().matmul(&x);
        explicit.scale(1.0 / 7.0);
        let mut diff = g;
        diff.add_scaled(&explicit, -1.0);
        assert!(diff.frob_norm() < 1e-12);
    }
}
