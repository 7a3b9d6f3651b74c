//! Projections `P_E f(x) = max_{y ∈ E^⊥} f(x + y)` onto hyperplanes.

use std::sync::Arc;

use super::LogConcaveDensity;
use crate::error::{LcError, Result};
use crate::linalg::{dot, normalized};

#[derive(Debug, Clone)]
pub struct ProjectedDensity {
    base: Arc<LogConcaveDensity>,
    normal: Vec<f64>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

impl ProjectedDensity {
    /// Projection onto the hyperplane `normal^⊥`.
    pub fn new(base: Arc<LogConcaveDensity>, normal: &[f64]) -> Result<Self> {
        if normal.len() != base.dim() {
            return Err(LcError::DimensionMismatch { expected: base.dim(), got: normal.len() });
        }
        let normal = normalized(normal).ok_or_else(|| LcError::InvalidParameter("zero hyperplane normal".into()))?;
        Ok(ProjectedDensity { base, normal })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    /// Orthogonal projection of `x` onto the hyperplane.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let s = dot(x, &self.normal);
        x.iter().zip(&self.normal).map(|(a, u)| a - s * u).collect()
    }

    fn line(&self, x: &[f64], s: f64) -> f64 {
        let y: Vec<f64> = x.iter().zip(&self.normal).map(|(a, u)| a + s * u).collect();
        self.base.psi(&y)
    }

    /// `−ln P_E f(x) = min_s ψ(x + s·u)` for `x` projected onto `E`
    /// (golden-section search, tolerance `1e−10` in `s`); `+∞` off the projected support.
    pub fn psi(&self, x: &[f64]) -> Result<f64> {
        let x = self.project(x);
        let phi = |s: f64| self.line(&x, s);
        // a finite starting point
        let mut s0 = None;
        'outer: for k in 0..60 {
            let r = 1e-3 * 1.5f64.powi(k);
            for s in [0.0, r, -r] {
                if phi(s).is_finite() {
                    s0 = Some(s);
                    break 'outer;
                }
            }
        }
        let Some(s0) = s0 else { return Ok(f64::INFINITY) };
        // bracket the minimum: step outward while the value keeps decreasing
        let bracket = |dir: f64| -> f64 {
            let mut step = 1e-2;
            let mut best = phi(s0);
            loop {
                let next = s0 + dir * step;
                let v = phi(next);
                if !(v <= best) || step > 1e9 {
                    return next;
                }
                best = v;
                step *= 2.0;
            }
        };
        let (mut a, mut b) = (bracket(-1.0), bracket(1.0));
        let mut c = b - GOLDEN * (b - a);
        let mut d = a + GOLDEN * (b - a);
        let (mut fc, mut fd) = (phi(c), phi(d));
        for _ in 0..400 {
            if (b - a).abs() <= 1e-10 {
                let s = 0.5 * (a + b);
                return Ok(phi(s).min(fc).min(fd));
            }
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - GOLDEN * (b - a);
                fc = phi(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + GOLDEN * (b - a);
                fd = phi(d);
            }
        }
        Err(LcError::LineSearchNoConverge(format!("bracket width {:.3e}", b - a)))
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok((-self.psi(x)?).exp())
    }

    /// `min ψ` over the whole space, i.e. `−ln ‖f‖_∞`.
    pub fn base(&self) -> &LogConcaveDensity {
        &self.base
    }
}
