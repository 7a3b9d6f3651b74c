//! `μ⁺(∂A)` of convex bodies by boundary integration or by the outer
//! Minkowski-content quotient `(μ(A + εB) − μ(A))/ε`.

use serde::{Deserialize, Serialize};

use crate::bodies::{gjk_distance, ConvexBody};
use crate::densities::LogConcaveDensity;
use crate::error::{LcError, Result};
use crate::estimate::MCEstimate;
use crate::linalg::norm;
use crate::sampler::{mc_moments, SamplerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerimeterMethod {
    Boundary,
    Epsilon,
}

/// Quotients `(μ(A + εB) − μ(A))/ε` over the sweep `ε_k = ε₀ 2^{−k}`.
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonSweep {
    pub eps: Vec<f64>,
    pub quotients: Vec<f64>,
    /// Difference between the extrapolations from the two finest pairs.
    pub bias_estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MuPerimeter {
    pub estimate: MCEstimate,
    pub method: PerimeterMethod,
    pub sweep: Option<EpsilonSweep>,
}

/// Coarsest ε and number of halvings in the epsilon method.
pub const EPS0: f64 = 0.25;
pub const EPS_LEVELS: usize = 5;

/// Euclidean distance from `x` to `K` (0 inside).
pub fn distance_to_body(k: &ConvexBody<f64>, x: &[f64]) -> f64 {
    match k {
        ConvexBody::EuclideanBall { radius, .. } => (norm(x) - radius).max(0.0),
        ConvexBody::Box { half_widths } => {
            x.iter().zip(half_widths).map(|(v, w)| (v.abs() - w).max(0.0).powi(2)).sum::<f64>().sqrt()
        }
        _ => {
            if k.contains(x) {
                0.0
            } else {
                gjk_distance(|u: &[f64]| k.support_point(u), x, 1e-13, 500).upper
            }
        }
    }
}

pub fn mu_perimeter(
    mu: &LogConcaveDensity,
    body: &ConvexBody<f64>,
    method: PerimeterMethod,
    count: usize,
    cfg: &SamplerConfig,
) -> Result<MuPerimeter> {
    if body.dim() != mu.dim() {
        return Err(LcError::DimensionMismatch { expected: mu.dim(), got: body.dim() });
    }
    match method {
        PerimeterMethod::Boundary => {
            if matches!(body, ConvexBody::Oracle(_)) {
                return Err(LcError::UnsupportedVariant("boundary method needs a parametrizable boundary".into()));
            }
            let estimate = body.boundary_integral(|x| mu.density(x), count, cfg.seed);
            Ok(MuPerimeter { estimate, method, sweep: None })
        }
        PerimeterMethod::Epsilon => epsilon_perimeter(mu, body, count, cfg),
    }
}

fn epsilon_perimeter(mu: &LogConcaveDensity, body: &ConvexBody<f64>, count: usize, cfg: &SamplerConfig) -> Result<MuPerimeter> {
    let eps: Vec<f64> = (0..EPS_LEVELS).map(|k| EPS0 * 0.5f64.powi(k as i32)).collect();
    let l = eps.len();
    // observables: one quotient per level, then the Richardson combinations of the two finest pairs
    let m = mc_moments(
        mu,
        l + 2,
        |x, out| {
            let d = distance_to_body(body, x);
            for (o, e) in out.iter_mut().zip(&eps) {
                *o = if d > 0.0 && d <= *e { 1.0 / e } else { 0.0 };
            }
            out[l] = 2.0 * out[l - 1] - out[l - 2];
            out[l + 1] = 2.0 * out[l - 2] - out[l - 3];
        },
        count,
        cfg,
    )?;
    let est = m.estimates(cfg.seed);
    let quotients: Vec<f64> = est[..l].iter().map(|e| e.value).collect();
    let bias_estimate = (est[l].value - est[l + 1].value).abs();
    Ok(MuPerimeter {
        estimate: est[l],
        method: PerimeterMethod::Epsilon,
        sweep: Some(EpsilonSweep { eps, quotients, bias_estimate }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::std_normal_pdf;

    #[test]
    fn gaussian_interval_two_boundary_points() {
        let g = LogConcaveDensity::gaussian(1);
        let a = ConvexBody::ball(1, 0.8).unwrap();
        let b = mu_perimeter(&g, &a, PerimeterMethod::Boundary, 10, &SamplerConfig::exact(1)).unwrap();
        assert!((b.estimate.value - 2.0 * std_normal_pdf(0.8)).abs() < 1e-14);
        let e = mu_perimeter(&g, &a, PerimeterMethod::Epsilon, 400_000, &SamplerConfig::exact(2)).unwrap();
        let sweep = e.sweep.as_ref().unwrap();
        assert!((e.estimate.value - b.estimate.value).abs() <= 3.0 * e.estimate.std_error + sweep.bias_estimate + 1e-3, "{e:?}");
    }

    #[test]
    fn gaussian_disk() {
        let g = LogConcaveDensity::gaussian(2);
        let r = 1.3f64;
        let a = ConvexBody::ball(2, r).unwrap();
        let b = mu_perimeter(&g, &a, PerimeterMethod::Boundary, 1000, &SamplerConfig::exact(1)).unwrap();
        let exact = r * (-r * r / 2.0).exp();
        assert!((b.estimate.value - exact).abs() < 1e-12);
        let e = mu_perimeter(&g, &a, PerimeterMethod::Epsilon, 400_000, &SamplerConfig::exact(3)).unwrap();
        let bias = e.sweep.as_ref().unwrap().bias_estimate;
        assert!((e.estimate.value - exact).abs() <= 3.0 * e.estimate.std_error + bias + 1e-3, "{e:?}");
    }

    #[test]
    fn polygon_methods_agree() {
        let g = LogConcaveDensity::isotropic_cube_exp(2);
        let a = ConvexBody::v_polytope_symmetric(&[vec![1.0, 0.3], vec![-0.2, 0.9]]).unwrap();
        let b = mu_perimeter(&g, &a, PerimeterMethod::Boundary, 200_000, &SamplerConfig::exact(1)).unwrap();
        let e = mu_perimeter(&g, &a, PerimeterMethod::Epsilon, 400_000, &SamplerConfig::exact(4)).unwrap();
        let se = (b.estimate.std_error.powi(2) + e.estimate.std_error.powi(2)).sqrt();
        let bias = e.sweep.as_ref().unwrap().bias_estimate;
        assert!((b.estimate.value - e.estimate.value).abs() <= 3.0 * se + bias + 2e-3, "{b:?} {e:?}");
    }

    #[test]
    fn distances() {
        let k = ConvexBody::cube(2, 1.0).unwrap();
        assert!((distance_to_body(&k, &[2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-15);
        let p = ConvexBody::v_polytope_symmetric(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((distance_to_body(&p, &[1.0, 1.0]) - 0.5f64.sqrt()).abs() < 1e-10);
        assert_eq!(distance_to_body(&p, &[0.1, 0.1]), 0.0);
    }
}
