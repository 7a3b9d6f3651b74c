//! Affine maps `y = T(x − b)` used for pushforwards and isotropization.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{LcError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    center: Vec<f64>,
    linear: Vec<Vec<f64>>,
    inverse: Vec<Vec<f64>>,
    ln_abs_det: f64,
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

impl AffineMap {
    /// `y = T(x − center)`; `linear` is given row-major.
    pub fn new(center: Vec<f64>, linear: Vec<Vec<f64>>) -> Result<Self> {
        let n = center.len();
        if linear.len() != n || linear.iter().any(|r| r.len() != n) {
            return Err(LcError::DimensionMismatch { expected: n, got: linear.len() });
        }
        let m = DMatrix::from_fn(n, n, |i, j| linear[i][j]);
        let lu = m.clone().lu();
        let det = lu.determinant();
        if !det.is_finite() || det == 0.0 {
            return Err(LcError::InvalidParameter("affine map must be invertible".into()));
        }
        let inv = lu.try_inverse().ok_or_else(|| LcError::InvalidParameter("affine map must be invertible".into()))?;
        let residual = (&m * &inv - DMatrix::identity(n, n)).abs().max();
        if residual > 1e-10 {
            return Err(LcError::InvalidParameter(format!("ill-conditioned linear part (|TT⁻¹ − I| = {residual:.2e})")));
        }
        Ok(AffineMap { center, linear, inverse: to_rows(&inv), ln_abs_det: det.abs().ln() })
    }

    pub fn identity(n: usize) -> Self {
        let eye: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        AffineMap { center: vec![0.0; n], linear: eye.clone(), inverse: eye, ln_abs_det: 0.0 }
    }

    pub fn diagonal(center: Vec<f64>, diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::new(center, (0..n).map(|i| (0..n).map(|j| if i == j { diag[i] } else { 0.0 }).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn linear(&self) -> &[Vec<f64>] {
        &self.linear
    }

    pub fn inverse_linear(&self) -> &[Vec<f64>] {
        &self.inverse
    }

    pub fn ln_abs_det(&self) -> f64 {
        self.ln_abs_det
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        mat_vec(&self.linear, &d)
    }

    pub fn apply_inverse(&self, y: &[f64]) -> Vec<f64> {
        let mut x = mat_vec(&self.inverse, y);
        x.iter_mut().zip(&self.center).for_each(|(a, b)| *a += b);
        x
    }

    /// `T^{−⊤} v`, which carries gradients of the base potential to the pushforward.
    pub fn pull_gradient(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n).map(|j| (0..n).map(|i| self.inverse[i][j] * v[i]).sum()).collect()
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &AffineMap) -> Result<Self> {
        let n = self.dim();
        let a = DMatrix::from_fn(n, n, |i, j| self.linear[i][j]);
        let b = DMatrix::from_fn(n, n, |i, j| other.linear[i][j]);
        // T_a(T_b(x − c_b) − c_a) = T_a T_b (x − c_b − T_b⁻¹ c_a)
        let shift = mat_vec(&other.inverse, &self.center);
        let center: Vec<f64> = other.center.iter().zip(&shift).map(|(x, y)| x + y).collect();
        AffineMap::new(center, to_rows(&(a * b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_determinant() {
        let m = AffineMap::new(vec![1.0, -2.0], vec![vec![2.0, 1.0], vec![0.5, 3.0]]).unwrap();
        let x = [0.3, 0.7];
        let back = m.apply_inverse(&m.apply(&x));
        assert!((back[0] - x[0]).abs() < 1e-14 && (back[1] - x[1]).abs() < 1e-14);
        assert!((m.ln_abs_det() - 5.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn singular_rejected() {
        assert!(AffineMap::new(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
    }

    #[test]
    fn composition_matches_sequential_application() {
        let a = AffineMap::new(vec![0.5, 0.0], vec![vec![1.0, 0.2], vec![0.0, 2.0]]).unwrap();
        let b = AffineMap::new(vec![-1.0, 1.0], vec![vec![0.0, 1.0], vec![-1.0, 0.5]]).unwrap();
        let c = a.compose(&b).unwrap();
        let x = [0.4, -1.3];
        let want = a.apply(&b.apply(&x));
        let got = c.apply(&x);
        assert!((want[0] - got[0]).abs() < 1e-13 && (want[1] - got[1]).abs() < 1e-13);
    }
}
