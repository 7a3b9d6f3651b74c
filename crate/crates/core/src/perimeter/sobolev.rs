//! The Sobolev lower bound for `∫|∇f|` and Borell's functional `Ψ_g` for
//! radial densities `e^{−g(|x|)}`.

use serde::Serialize;

use super::boundary_part;
use crate::densities::{Family, LogConcaveDensity};
use crate::error::{LcError, Result};
use crate::estimate::MCEstimate;
use crate::quad::integrate_to_inf;
use crate::sampler::{mc_moments, SamplerConfig};
use crate::special::{ln_gamma, ln_unit_ball_volume};

#[derive(Debug, Clone, Serialize)]
pub struct SobolevReport {
    /// `∫|Df|`, jump part included.
    pub lhs: MCEstimate,
    /// `(∫f^{n/(n−1)})^{(n−1)/n}`.
    pub lp_norm: MCEstimate,
    /// `nω_n^{1/n}·lp_norm`.
    pub rhs: f64,
    pub rhs_std_error: f64,
    /// `nω_n^{1/n}`.
    pub headline: f64,
    pub holds: bool,
    pub headline_holds: bool,
    pub lhs_over_sqrt_n: f64,
}

pub fn sobolev_lower_check(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig) -> Result<SobolevReport> {
    let n = mu.dim();
    if n < 2 {
        return Err(LcError::InvalidParameter("the Sobolev comparison needs n >= 2".into()));
    }
    let jump = boundary_part(mu, cfg.seed)?;
    let q = 1.0 / (n as f64 - 1.0);
    let m = mc_moments(
        mu,
        2,
        |x, out| {
            out[0] = mu.grad_norm(x);
            out[1] = mu.density(x).powf(q);
        },
        count,
        cfg,
    )?;
    let est = m.estimates(cfg.seed);
    let lhs = MCEstimate { value: est[0].value + jump, ..est[0] };
    let e = (n as f64 - 1.0) / n as f64;
    let lp = est[1].value.powf(e);
    let lp_norm = MCEstimate { value: lp, std_error: e * est[1].value.powf(e - 1.0) * est[1].std_error, ..est[1] };
    let headline = n as f64 * (ln_unit_ball_volume(n) / n as f64).exp();
    let rhs = headline * lp;
    let rhs_std_error = headline * lp_norm.std_error;
    let combined = (lhs.std_error.powi(2) + rhs_std_error.powi(2)).sqrt();
    Ok(SobolevReport {
        holds: lhs.value >= rhs - 3.0 * combined,
        headline_holds: lhs.value >= headline - 3.0 * lhs.std_error,
        lhs_over_sqrt_n: lhs.value / (n as f64).sqrt(),
        lhs,
        lp_norm,
        rhs,
        rhs_std_error,
        headline,
    })
}

/// `ln Ψ_g(p) = ln ∫₀^∞ r^p e^{−g(r)} dr − ln Γ(p+1)`.
pub fn ln_radial_psi<G: Fn(f64) -> f64>(g: G, p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(LcError::InvalidParameter(format!("Ψ_g needs p >= 0, got {p}")));
    }
    let expo = |r: f64| if p == 0.0 { -g(r) } else { p * r.ln() - g(r) };
    // shift by the peak of the log-integrand so large p does not overflow
    let shift = (0..=400)
        .map(|k| expo(1e-3 * 1.04f64.powi(k)))
        .chain(std::iter::once(expo(0.0)))
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Err(LcError::QuadratureNoConverge("e^{−g} vanishes on the probe grid".into()));
    }
    let v = integrate_to_inf(|r| (expo(r) - shift).exp(), 0.0, 0.0, 1e-12)?;
    if !(v > 0.0) {
        return Err(LcError::QuadratureNoConverge(format!("Ψ_g({p}) integral is {v}")));
    }
    Ok(v.ln() + shift - ln_gamma(p + 1.0))
}

/// `Ψ_g(p) = ∫₀^∞ r^p e^{−g(r)} dr / Γ(p+1)`.
pub fn radial_psi_g<G: Fn(f64) -> f64>(g: G, p: f64) -> Result<f64> {
    Ok(ln_radial_psi(g, p)?.exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct LogConcavityReport {
    pub grid: Vec<f64>,
    /// Largest `ln Ψ(p−h) + ln Ψ(p+h) − 2 ln Ψ(p)`.
    pub max_second_difference: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Discrete midpoint test for log-concavity of `Ψ_g` on an equispaced grid.
pub fn psi_g_log_concavity<G: Fn(f64) -> f64>(g: G, p_max: f64, steps: usize, slack: f64) -> Result<LogConcavityReport> {
    if steps < 2 || !(p_max > 0.0) {
        return Err(LcError::InvalidParameter("need p_max > 0 and at least 2 steps".into()));
    }
    let grid: Vec<f64> = (0..=steps).map(|k| p_max * k as f64 / steps as f64).collect();
    let vals = grid.iter().map(|&p| ln_radial_psi(&g, p)).collect::<Result<Vec<_>>>()?;
    let max_second_difference = vals.windows(3).map(|w| w[0] + w[2] - 2.0 * w[1]).fold(f64::NEG_INFINITY, f64::max);
    Ok(LogConcavityReport { grid, max_second_difference, slack, holds: max_second_difference <= slack })
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialReport {
    pub dim: usize,
    /// `nω_nΓ(n)Ψ_g(n−1)`, the total mass.
    pub normalization: f64,
    /// `nω_nΓ(n+2)Ψ_g(n+1)`, equal to `n` in isotropic position.
    pub second_moment: f64,
    /// `(n−1)nω_nΓ(n−1)Ψ_g(n−2) = ∫|∇f|`.
    pub perimeter: f64,
    /// `√(n+1)`, attained by `g(r) = r`.
    pub bound: f64,
    pub holds: bool,
}

/// The `Ψ_g` identities for a radial density `f = e^{−g(|x|)}` with `g` including the normalization.
pub fn radial_identities(mu: &LogConcaveDensity) -> Result<RadialReport> {
    let n = mu.dim();
    if n < 2 {
        return Err(LcError::InvalidParameter("radial identities need n >= 2".into()));
    }
    let nf = n as f64;
    let g: Box<dyn Fn(f64) -> f64> = match mu.family() {
        Family::Gaussian { variance } => {
            let v = *variance;
            let c = 0.5 * nf * (2.0 * std::f64::consts::PI * v).ln();
            Box::new(move |r| r * r / (2.0 * v) + c)
        }
        Family::Radial { profile, ln_norm } => {
            let c = *ln_norm;
            Box::new(move |r| profile.g(r) + c)
        }
        _ => return Err(LcError::UnsupportedVariant(format!("radial identities for {}", mu.name()))),
    };
    let ln_area = (nf).ln() + ln_unit_ball_volume(n);
    let term = |p: f64| -> Result<f64> { Ok((ln_area + ln_gamma(p + 1.0) + ln_radial_psi(&g, p)?).exp()) };
    let normalization = term(nf - 1.0)?;
    let second_moment = term(nf + 1.0)?;
    let perimeter = (nf - 1.0) * term(nf - 2.0)?;
    let bound = (nf + 1.0).sqrt();
    // g(r) = r attains the bound, so allow quadrature round-off
    Ok(RadialReport { dim: n, normalization, second_moment, perimeter, bound, holds: perimeter <= bound * (1.0 + 1e-10) })
}
