//! Small dense complex matrices.
//!
//! The matrices in this crate are at most a few dozen rows, so everything is
//! stored row-major in a flat `Vec` and multiplied naively. Singular values
//! come from a one-sided (Hestenes) Jacobi iteration, which is accurate to
//! working precision relative to the largest singular value.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 80;

/// Square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim, "expected {} entries", dim * dim);
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn pow(&self, exp: usize) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// All singular values in descending order.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        let n = self.dim;
        if n == 0 {
            return Ok(Vec::new());
        }
        // columns stored contiguously
        let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| self.column(j)).collect();
        let eps = f64::EPSILON;
        let scale = self.frobenius_norm();
        if scale == 0.0 {
            return Ok(vec![0.0; n]);
        }
        // Pairs whose columns are negligible against the whole matrix are
        // skipped; their contribution to the spectrum is below round-off.
        let negligible = (eps * scale).powi(2);

        let mut converged = false;
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let (left, right) = cols.split_at_mut(q);
                    let (cp, cq) = (&mut left[p], &mut right[0]);
                    let alpha: f64 = cp.iter().map(|z| z.norm_sqr()).sum();
                    let beta: f64 = cq.iter().map(|z| z.norm_sqr()).sum();
                    if alpha <= negligible || beta <= negligible {
                        continue;
                    }
                    let gamma: Complex64 = cp.iter().zip(cq.iter()).map(|(a, b)| a.conj() * b).sum();
                    let g = gamma.norm();
                    if g <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    // Rotate the phase out of column q, then apply a real rotation.
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                        let bq = *b * phase.conj();
                        let ap = *a;
                        *a = ap * c - bq * s;
                        *b = ap * s + bq * c;
                    }
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence { sweeps: JACOBI_MAX_SWEEPS });
        }
        let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(sv)
    }

    /// Spectral norm, the largest singular value.
    pub fn norm2(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Power iteration on A^H A, independent of the Jacobi sweep.
    fn power_sigma_max(a: &ComplexMatrix) -> f64 {
        let aha = a.conj_transpose().mul(a);
        let n = a.dim();
        let v0: Vec<Complex64> = (0..n).map(|i| c(1.0 + i as f64 * 0.37, 0.5 - i as f64 * 0.11)).collect();
        let n0 = v0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut v: Vec<Complex64> = v0.into_iter().map(|z| z / n0).collect();
        let mut lambda = 0.0;
        for _ in 0..20000 {
            let w = aha.mul_vec(&v);
            // Rayleigh quotient, v normalised
            let rq: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            v = w.into_iter().map(|z| z / norm).collect();
            if (rq - lambda).abs() <= 1e-16 * rq {
                lambda = rq;
                break;
            }
            lambda = rq;
        }
        lambda.sqrt()
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(ComplexMatrix::zeros(4).norm2().unwrap(), 0.0);
    }

    #[test]
    fn diagonal_singular_values() {
        let mut m = ComplexMatrix::zeros(3);
        m[(0, 0)] = c(0.0, 3.0);
        m[(1, 1)] = c(-1.0, 0.0);
        m[(2, 2)] = c(0.6, 0.8);
        let sv = m.singular_values().unwrap();
        for (got, want) in sv.iter().zip([3.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn known_two_by_two() {
        // [[1, 1], [0, 1]] has singular values golden ratio and its inverse.
        let m = ComplexMatrix::from_rows(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let sv = m.singular_values().unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((sv[0] - phi).abs() < 1e-14);
        assert!((sv[1] - 1.0 / phi).abs() < 1e-14);
    }

    #[test]
    fn shift_matrix() {
        let n = 6;
        let mut m = ComplexMatrix::zeros(n);
        for i in 1..n {
            m[(i, i - 1)] = c(0.0, 2.0);
        }
        let sv = m.singular_values().unwrap();
        assert!((sv[0] - 2.0).abs() < 1e-14);
        assert!(sv[n - 1].abs() < 1e-14);
    }

    fn arb_matrix() -> impl Strategy<Value = ComplexMatrix> {
        (1usize..12).prop_flat_map(|n| {
            proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n)
                .prop_map(move |v| ComplexMatrix::from_rows(n, v.into_iter().map(|(a, b)| c(a, b)).collect()))
        })
    }

    proptest! {
        #[test]
        fn jacobi_agrees_with_power_method(m in arb_matrix()) {
            let s = m.norm2().unwrap();
            let p = power_sigma_max(&m);
            // compare squares, as the power method works on A^H A
            prop_assert!((s * s - p * p).abs() <= 1e-8 * (p * p).max(1e-300), "{} vs {}", s, p);
        }

        #[test]
        fn singular_values_preserve_frobenius_norm(m in arb_matrix()) {
            let sv = m.singular_values().unwrap();
            let sum_sq: f64 = sv.iter().map(|s| s * s).sum();
            let fro = m.frobenius_norm();
            prop_assert!((sum_sq - fro * fro).abs() <= 1e-12 * fro * fro);
        }
    }

    #[test]
    fn matrix_products() {
        let a = ComplexMatrix::from_rows(2, vec![c(1.0, 1.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, -1.0)]);
        let id = ComplexMatrix::identity(2);
        assert_eq!(a.mul(&id), a);
        assert_eq!(a.pow(0), id);
        assert_eq!(a.pow(2), a.mul(&a));
        assert_eq!(a.add(&a).sub(&a), a);
        assert_eq!(a.mul_vec(&[c(1.0, 0.0), c(1.0, 0.0)]), vec![c(1.0, 1.0), c(2.0, -1.0)]);
    }
}
