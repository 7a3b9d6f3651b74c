//! Functions sampled on uniform origin-symmetric grids in one or two dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{LcError, Result};
use crate::scalar::Real;

/// Whether grid values are potentials (`+∞` off the support) or densities (`0` off the support).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Potential,
    Density,
}

/// JSON header accompanying a flat little-endian `f64` value file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub dim: usize,
    /// Half-width `a` of the box `[−a, a]^dim`.
    #[serde(rename = "box")]
    pub half_width: f64,
    pub step: f64,
    pub points_per_axis: usize,
    pub kind: GridKind,
}

/// Values on `{−a + i·h : 0 <= i < m}^dim`, stored with axis 0 fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T: Real> {
    dim: usize,
    half_width: T,
    m: usize,
    kind: GridKind,
    values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    /// `m` points per axis; `m` must be odd so the origin is a node.
    pub fn from_fn<F: Fn(&[T]) -> T>(dim: usize, half_width: T, m: usize, kind: GridKind, f: F) -> Result<Self> {
        Self::check_shape(dim, half_width, m)?;
        let mut g = GridFunction { dim, half_width, m, kind, values: Vec::new() };
        let total = m.pow(dim as u32);
        g.values = (0..total).map(|k| f(&g.point(k))).collect();
        Ok(g)
    }

    pub fn from_values(dim: usize, half_width: T, m: usize, kind: GridKind, values: Vec<T>) -> Result<Self> {
        Self::check_shape(dim, half_width, m)?;
        if values.len() != m.pow(dim as u32) {
            return Err(LcError::GridMismatch(format!("expected {} values, got {}", m.pow(dim as u32), values.len())));
        }
        Ok(GridFunction { dim, half_width, m, kind, values })
    }

    fn check_shape(dim: usize, half_width: T, m: usize) -> Result<()> {
        if !(1..=2).contains(&dim) {
            return Err(LcError::DimensionTooLarge { what: "grid calculus", max: 2, n: dim });
        }
        if m < 3 || m.is_multiple_of(2) || !(half_width > T::zero()) {
            return Err(LcError::InvalidParameter("grids need an odd point count >= 3 and positive half-width".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn step(&self) -> T {
        T::lit(2.0) * self.half_width / T::from_usize(self.m - 1).unwrap()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn coord(&self, i: usize) -> T {
        -self.half_width + T::from_usize(i).unwrap() * self.step()
    }

    /// Multi-index of flat index `k`.
    pub fn index(&self, k: usize) -> [usize; 2] {
        [k % self.m, k / self.m]
    }

    pub fn flat(&self, idx: [usize; 2]) -> usize {
        idx[0] + self.m * idx[1]
    }

    pub fn point(&self, k: usize) -> Vec<T> {
        let idx = self.index(k);
        (0..self.dim).map(|a| self.coord(idx[a])).collect()
    }

    pub fn value(&self, k: usize) -> T {
        self.values[k]
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.dim == other.dim && self.m == other.m && self.half_width == other.half_width
    }

    pub fn require_same_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(LcError::GridMismatch(format!(
                "{}D/{} points/half-width {} vs {}D/{} points/half-width {}",
                self.dim, self.m, self.half_width, other.dim, other.m, other.half_width
            )))
        }
    }

    pub fn with_values(&self, kind: GridKind, values: Vec<T>) -> Self {
        GridFunction { dim: self.dim, half_width: self.half_width, m: self.m, kind, values }
    }

    /// `e^{−ψ}` for a potential grid.
    pub fn to_density(&self) -> Self {
        match self.kind {
            GridKind::Density => self.clone(),
            GridKind::Potential => self.with_values(GridKind::Density, self.values.iter().map(|v| (-*v).exp()).collect()),
        }
    }

    /// `−ln f` for a density grid.
    pub fn to_potential(&self) -> Self {
        match self.kind {
            GridKind::Potential => self.clone(),
            GridKind::Density => self.with_values(
                GridKind::Potential,
                self.values.iter().map(|v| if *v > T::zero() { -v.ln() } else { T::infinity() }).collect(),
            ),
        }
    }

    /// Discrete midpoint convexity along every grid line:
    /// `v[i−1] + v[i+1] − 2v[i] >= −slack·scale` wherever the neighbours are finite.
    pub fn is_convex_along_lines(&self, slack: T) -> bool {
        let scale = self.values.iter().filter(|v| v.is_finite()).fold(T::one(), |m, v| m.max(v.abs()));
        let tol = slack * scale;
        for k in 0..self.values.len() {
            let idx = self.index(k);
            for axis in 0..self.dim {
                if idx[axis] == 0 || idx[axis] + 1 == self.m {
                    continue;
                }
                let mut lo = idx;
                let mut hi = idx;
                lo[axis] -= 1;
                hi[axis] += 1;
                let (a, b, c) = (self.values[self.flat(lo)], self.values[k], self.values[self.flat(hi)]);
                if a.is_finite() && c.is_finite() && (!b.is_finite() || a + c - T::lit(2.0) * b < -tol) {
                    return false;
                }
            }
        }
        true
    }

    /// `v(−x) = v(x)` at every node.
    pub fn is_even(&self, tol: T) -> bool {
        let n = self.values.len();
        (0..n).all(|k| {
            let (a, b) = (self.values[k], self.values[n - 1 - k]);
            (a.is_infinite() && b.is_infinite() && a == b) || (a - b).abs() <= tol * a.abs().max(T::one())
        })
    }

    /// Maximum of `|self − other|` over nodes whose coordinates all lie in
    /// `[−r, r]`; infinite values must agree.
    pub fn max_abs_diff_within(&self, other: &Self, r: T) -> Result<T> {
        self.require_same_grid(other)?;
        let mut worst = T::zero();
        for k in 0..self.values.len() {
            if self.point(k).iter().any(|c| c.abs() > r) {
                continue;
            }
            let (a, b) = (self.values[k], other.values[k]);
            if a.is_infinite() || b.is_infinite() {
                if a != b {
                    return Ok(T::infinity());
                }
                continue;
            }
            worst = worst.max((a - b).abs());
        }
        Ok(worst)
    }

    /// Rectangle-rule integral `h^dim Σ v` (density grids).
    pub fn integral(&self) -> T {
        self.values.iter().copied().sum::<T>() * self.step().powi(self.dim as i32)
    }

    pub fn header(&self) -> GridHeader {
        GridHeader {
            dim: self.dim,
            half_width: self.half_width.to_f64_lossy(),
            step: self.step().to_f64_lossy(),
            points_per_axis: self.m,
            kind: self.kind,
        }
    }

    /// Flat little-endian `f64` values.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.values.iter().flat_map(|v| v.to_f64_lossy().to_le_bytes()).collect()
    }

    pub fn from_le_bytes(header: &GridHeader, bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(8) {
            return Err(LcError::GridMismatch("value file length is not a multiple of 8".into()));
        }
        let values = bytes.chunks_exact(8).map(|c| T::lit(f64::from_le_bytes(c.try_into().expect("8 bytes")))).collect();
        Self::from_values(header.dim, T::lit(header.half_width), header.points_per_axis, header.kind, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_coordinates() {
        let g = GridFunction::<f64>::from_fn(2, 1.0, 5, GridKind::Potential, |x| x[0] + 10.0 * x[1]).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g.step(), 0.5);
        assert_eq!(g.point(g.flat([4, 0])), vec![1.0, -1.0]);
        assert_eq!(g.value(g.flat([2, 2])), 0.0);
        assert!(GridFunction::<f64>::from_fn(3, 1.0, 5, GridKind::Potential, |_| 0.0).is_err());
        assert!(GridFunction::<f64>::from_fn(1, 1.0, 4, GridKind::Potential, |_| 0.0).is_err());
    }

    #[test]
    fn convexity_test_detects_concave_lines() {
        let convex = GridFunction::<f64>::from_fn(2, 2.0, 21, GridKind::Potential, |x| x[0] * x[0] + x[1].abs()).unwrap();
        assert!(convex.is_convex_along_lines(1e-9));
        let bad = GridFunction::<f64>::from_fn(1, 2.0, 21, GridKind::Potential, |x| -x[0] * x[0]).unwrap();
        assert!(!bad.is_convex_along_lines(1e-9));
        assert!(convex.is_even(1e-12));
    }

    #[test]
    fn byte_round_trip() {
        let g = GridFunction::<f64>::from_fn(1, 3.0, 7, GridKind::Potential, |x| if x[0].abs() > 2.0 { f64::INFINITY } else { x[0] }).unwrap();
        let h = g.header();
        let json = serde_json::to_string(&h).unwrap();
        assert!(json.contains("\"box\":3.0"));
        let back = GridFunction::<f64>::from_le_bytes(&serde_json::from_str(&json).unwrap(), &g.to_le_bytes()).unwrap();
        assert_eq!(back, g);
    }
}
