//! Averages over random hyperplanes: Cauchy's surface-area formula and the
//! mean `L¹` norm of the shadow `P_E f(y) = sup_t f(y + tu)` over `E = u^⊥`.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::coarea::{coarea_integral, CoareaMethod};
use crate::bodies::ConvexBody;
use crate::densities::{Family, LogConcaveDensity};
use crate::error::{LcError, Result};
use crate::estimate::{merge_all, run_blocks, MCEstimate, Moments, Rng};
use crate::quad::integrate_to_inf;
use crate::special::{ln_gamma, unit_ball_volume};

const BLOCK: usize = 256;

/// A Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `diag(R)` moved into `Q`.
pub fn haar_rotation(rng: &mut Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn average_over_hyperplanes<F>(n: usize, m: usize, seed: u64, stream: u64, f: F) -> MCEstimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let parts = run_blocks(m, BLOCK, seed, stream, |rng, count, _| {
        let mut acc = Moments::new(1);
        for _ in 0..count {
            let q = haar_rotation(rng, n);
            let u: Vec<f64> = q.column(0).iter().copied().collect();
            acc.push(&[f(&u)]);
        }
        acc
    });
    merge_all(parts, 1).estimate(0, seed)
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchyReport {
    /// Mean of `vol_{n−1}(P_{u^⊥} K)` over uniform `u`.
    pub mean_projection: MCEstimate,
    /// `nω_n/ω_{n−1}` times the mean projection.
    pub surface_estimate: MCEstimate,
    pub exact_surface: Option<f64>,
}

pub fn cauchy_projection_avg(k: &ConvexBody<f64>, m: usize, seed: u64) -> Result<CauchyReport> {
    let n = k.dim();
    if n < 2 {
        return Err(LcError::InvalidParameter("projections need n >= 2".into()));
    }
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    k.projection_volume(&e1)?;
    let mean_projection = average_over_hyperplanes(n, m, seed, 0xCA0C, |u| k.projection_volume(u).unwrap_or(f64::NAN));
    let c = n as f64 * unit_ball_volume(n) / unit_ball_volume(n - 1);
    Ok(CauchyReport { mean_projection, surface_estimate: mean_projection.scaled(c), exact_surface: k.surface_exact().ok() })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionL1Report {
    /// Mean of `‖P_E f‖₁` over uniform hyperplanes `E`.
    pub estimate: MCEstimate,
    /// `estimate / √n`.
    pub per_sqrt_n: f64,
    /// `ω_{n−1}/(nω_n)` times the co-area integral, which the mean equals.
    pub coarea_relation: Option<f64>,
}

/// `‖P_E f‖₁` for `E = u^⊥`.
fn shadow_l1(mu: &LogConcaveDensity, u: &[f64]) -> Result<f64> {
    let n = mu.dim() as f64;
    match mu.family() {
        Family::NormExponential { body, .. } => Ok(mu.f0() * ln_gamma(n).exp() * body.projection_volume(u)?),
        Family::Uniform { body, ln_vol } => Ok(body.projection_volume(u)? * (-ln_vol).exp()),
        Family::Gaussian { variance } => Ok((2.0 * std::f64::consts::PI * variance).powf(-0.5)),
        Family::Radial { profile, ln_norm } => {
            let m = mu.dim() - 1;
            let v = integrate_to_inf(|r| r.powi(m as i32 - 1) * (-profile.g(r) - ln_norm).exp(), 0.0, 1e-15, 1e-12)?;
            Ok(m as f64 * unit_ball_volume(m) * v)
        }
        _ => Err(LcError::UnsupportedVariant(format!("hyperplane shadow of {}", mu.name()))),
    }
}

pub fn projection_l1_avg(mu: &LogConcaveDensity, m: usize, seed: u64) -> Result<ProjectionL1Report> {
    let n = mu.dim();
    if n < 2 {
        return Err(LcError::InvalidParameter("projections need n >= 2".into()));
    }
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let first = shadow_l1(mu, &e1)?;
    let estimate = match mu.family() {
        Family::Gaussian { .. } | Family::Radial { .. } => MCEstimate::exact(first),
        Family::NormExponential { body, .. } | Family::Uniform { body, .. } if matches!(body, ConvexBody::EuclideanBall { .. }) => {
            MCEstimate::exact(first)
        }
        _ => average_over_hyperplanes(n, m, seed, 0x5AAD, |u| shadow_l1(mu, u).unwrap_or(f64::NAN)),
    };
    let coarea_relation = coarea_integral(mu, CoareaMethod::Exact, seed)
        .ok()
        .map(|c| unit_ball_volume(n - 1) / (n as f64 * unit_ball_volume(n)) * c.value.value);
    Ok(ProjectionL1Report { per_sqrt_n: estimate.value / (n as f64).sqrt(), estimate, coarea_relation })
}
