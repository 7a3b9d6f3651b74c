//! Perimeter-type functionals of log-concave measures: `μ⁺(∂A)`, co-area
//! integrals, moment and surface-area measures, the maximal-perimeter scan,
//! projection averages and the radial/Sobolev comparisons.

pub mod boundary;
pub mod coarea;
pub mod projections;
pub mod sobolev;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

pub use boundary::{distance_to_body, mu_perimeter, EpsilonSweep, MuPerimeter, PerimeterMethod};
pub use coarea::{coarea_integral, contour_length, generalized_coarea_check, grid_coarea, lower_gamma, CoareaMethod, CoareaResult, GeneralizedCoarea};
pub use projections::{cauchy_projection_avg, haar_rotation, projection_l1_avg, CauchyReport, ProjectionL1Report};
pub use sobolev::{ln_radial_psi, psi_g_log_concavity, radial_identities, radial_psi_g, sobolev_lower_check, LogConcavityReport, RadialReport, SobolevReport};

use crate::bodies::{unit_direction, ConvexBody};
use crate::densities::{covariance, Family, LogConcaveDensity};
use crate::error::{LcError, Result};
use crate::estimate::{block_rng, MCEstimate};
use crate::sampler::{mc_moments, sample, SamplerConfig};

/// Moment part `∫|y| dμ_f` and boundary part `ν_f(S^{n−1})` of the surface-area measure pair.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceMeasurePair {
    pub moment_part: MCEstimate,
    pub boundary_part: f64,
}

impl SurfaceMeasurePair {
    pub fn total(&self) -> f64 {
        self.moment_part.value + self.boundary_part
    }
}

/// For `ν_K` restricted to `tK` (not renormalized): moment part
/// `f(0)S(K)γ(n, t)` and boundary part `t^{n−1}e^{−t}f(0)S(K)`; `t = ∞` is allowed.
pub fn truncated_surface_pair(mu: &LogConcaveDensity, t: f64, seed: u64) -> Result<SurfaceMeasurePair> {
    let Family::NormExponential { body, .. } = mu.family() else {
        return Err(LcError::UnsupportedVariant(format!("truncated surface pair of {}", mu.name())));
    };
    if !(t > 0.0) {
        return Err(LcError::InvalidParameter(format!("truncation level must be positive, got {t}")));
    }
    let n = mu.dim() as f64;
    let surface = body.surface(1_000_000, seed);
    let scale = mu.f0() * surface.value;
    let moment = lower_gamma(n, t);
    let boundary_part = if t.is_infinite() { 0.0 } else { scale * ((n - 1.0) * t.ln() - t).exp() };
    Ok(SurfaceMeasurePair { moment_part: surface.scaled(mu.f0() * moment), boundary_part })
}

/// Jump part `∫_{∂ supp f} f dH^{n−1}` of the total variation of `f`; zero
/// for essentially continuous densities.
pub fn boundary_part(mu: &LogConcaveDensity, seed: u64) -> Result<f64> {
    if mu.essentially_continuous() {
        return Ok(0.0);
    }
    match mu.family() {
        Family::Uniform { body, ln_vol } => Ok(body.surface(1_000_000, seed).value * (-ln_vol).exp()),
        Family::Truncation(t) => match (t.norm_ball, t.base.family()) {
            (Some(level), Family::NormExponential { .. }) => Ok(truncated_surface_pair(&t.base, level, seed)?.boundary_part / t.mass.value),
            _ => Err(LcError::UnsupportedVariant(format!("boundary part of {}", mu.name()))),
        },
        _ => Err(LcError::UnsupportedVariant(format!("boundary part of {}", mu.name()))),
    }
}

/// Surface-area measure pair of a normalized density: moment part by Monte
/// Carlo, boundary part in closed form.
pub fn surface_measure_pair(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig) -> Result<SurfaceMeasurePair> {
    let boundary_part = boundary_part(mu, cfg.seed)?;
    let moment_part = crate::sampler::mc_integral(mu, |x| mu.grad_norm(x), count, cfg)?;
    Ok(SurfaceMeasurePair { moment_part, boundary_part })
}

/// Pushforward of `μ` under `∇ψ`.
#[derive(Debug, Clone, Serialize)]
pub struct MomentMeasureSample {
    /// The first `keep` pushforward points `y_i = ∇ψ(x_i)`, equally weighted.
    pub points: Vec<Vec<f64>>,
    /// `∫|y| dμ_f`, on the same draws and with the same integrand as the functional perimeter.
    pub first_moment: MCEstimate,
    pub barycenter: Vec<MCEstimate>,
    pub seed: u64,
    /// Set when `μ` was not constructed isotropic.
    pub isotropy_flag: bool,
}

pub fn moment_measure(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig, keep: usize) -> Result<MomentMeasureSample> {
    let n = mu.dim();
    let m = mc_moments(
        mu,
        n + 1,
        |x, out| {
            out[0] = mu.grad_norm(x);
            out[1..].copy_from_slice(&mu.grad(x));
        },
        count,
        cfg,
    )?;
    let est = m.estimates(cfg.seed);
    let points = sample(mu, keep.min(count), cfg)?.iter().map(|x| mu.grad(x)).collect();
    Ok(MomentMeasureSample { points, first_moment: est[0], barycenter: est[1..].to_vec(), seed: cfg.seed, isotropy_flag: !mu.is_isotropic() })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub label: String,
    pub method: PerimeterMethod,
    pub estimate: MCEstimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// Index into `rows` of the largest estimate.
    pub argmax: usize,
    pub sup: MCEstimate,
    /// Co-area integral of `f`, an upper bound for every `μ⁺(∂A)`.
    pub coarea_cap: MCEstimate,
    /// Every row is at most `cap + 3·SE`.
    pub all_below_cap: bool,
    /// `sup / n`.
    pub ratio_to_n: f64,
}

/// A labelled body in a perimeter sweep.
#[derive(Debug, Clone)]
pub struct SweepBody {
    pub label: String,
    pub body: ConvexBody<f64>,
}

/// Balls and cubes at radii proportional to `√n` and `√3` respectively, random
/// boxes and, for `n <= 3`, random symmetric polytopes.
pub fn default_sweep(n: usize, seed: u64) -> Result<Vec<SweepBody>> {
    let mut out = Vec::new();
    let rn = (n as f64).sqrt();
    for s in [0.1, 0.25, 0.5, 0.75, 0.9, 1.0, 1.1, 1.25, 1.5, 2.0] {
        out.push(SweepBody { label: format!("ball r={:.4}", s * rn), body: ConvexBody::ball(n, s * rn)? });
    }
    let s3 = 3f64.sqrt();
    for s in [0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 1.0, 1.25, 1.5] {
        out.push(SweepBody { label: format!("cube w={:.4}", s * s3), body: ConvexBody::cube(n, s * s3)? });
    }
    let mut rng = block_rng(seed, 0x7377_6565, 0);
    for i in 0..4 {
        let w: Vec<f64> = (0..n).map(|_| s3 * rng.random_range(0.2..1.5)).collect();
        out.push(SweepBody { label: format!("box #{i}"), body: ConvexBody::boxed(w)? });
    }
    if n <= 3 && n >= 2 {
        for i in 0..4 {
            let half: Vec<Vec<f64>> = (0..n + 1)
                .map(|_| {
                    let u = unit_direction(&mut rng, n);
                    let r = rn * rng.random_range(0.5..2.0);
                    u.into_iter().map(|v| v * r).collect()
                })
                .collect();
            if let Ok(body) = ConvexBody::v_polytope_symmetric(&half) {
                out.push(SweepBody { label: format!("polytope #{i}"), body });
            }
        }
    }
    Ok(out)
}

/// `μ⁺(∂A)` over a sweep of bodies, compared with the co-area cap.
pub fn max_perimeter_scan(mu: &LogConcaveDensity, sweep: &[SweepBody], count: usize, cfg: &SamplerConfig) -> Result<ScanReport> {
    if sweep.is_empty() {
        return Err(LcError::InvalidParameter("empty body sweep".into()));
    }
    let coarea_cap = coarea_integral(mu, CoareaMethod::Exact, cfg.seed)?.value;
    let rows = sweep
        .par_iter()
        .enumerate()
        .map(|(i, b)| {
            let method = if matches!(b.body, ConvexBody::Oracle(_)) { PerimeterMethod::Epsilon } else { PerimeterMethod::Boundary };
            let r = mu_perimeter(mu, &b.body, method, count, &cfg.with_seed(cfg.seed.wrapping_add(i as u64 + 1)))?;
            Ok(ScanRow { label: b.label.clone(), method, estimate: r.estimate })
        })
        .collect::<Result<Vec<_>>>()?;
    let argmax = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.estimate.value.total_cmp(&b.1.estimate.value))
        .map(|(i, _)| i)
        .expect("non-empty");
    let all_below_cap = rows.iter().all(|r| {
        let se = (r.estimate.std_error.powi(2) + coarea_cap.std_error.powi(2)).sqrt();
        r.estimate.value <= coarea_cap.value + 3.0 * se + 1e-12 * coarea_cap.value
    });
    let sup = rows[argmax].estimate;
    Ok(ScanReport { ratio_to_n: sup.value / mu.dim() as f64, rows, argmax, sup, coarea_cap, all_below_cap })
}

/// Whether the sampled covariance of a non-isotropic measure departs from the identity.
pub fn isotropy_flag(mu: &LogConcaveDensity, cfg: &SamplerConfig) -> Result<bool> {
    if mu.is_isotropic() {
        return Ok(false);
    }
    Ok(!covariance(mu, 20_000, &cfg.with_seed(cfg.seed ^ 0x5a5a))?.is_identity_within(5.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::estimate_functional_perimeter;

    #[test]
    fn pair_limits() {
        let mu = LogConcaveDensity::isotropic_cube_exp(3);
        let inf = truncated_surface_pair(&mu, f64::INFINITY, 1).unwrap();
        assert_eq!(inf.boundary_part, 0.0);
        let full = coarea_integral(&mu, CoareaMethod::Exact, 1).unwrap().value.value;
        assert!((inf.moment_part.value - full).abs() < 1e-12 * full);
        let small = truncated_surface_pair(&mu, 1e-3, 1).unwrap();
        assert!(small.total() < 1e-4);
        let t3 = truncated_surface_pair(&mu, 3.0, 1).unwrap();
        let s = match mu.family() {
            Family::NormExponential { body, .. } => body.surface_exact().unwrap(),
            _ => unreachable!(),
        };
        let expected = mu.f0() * s * (lower_gamma(3.0, 3.0) + 9.0 * (-3.0f64).exp());
        assert!((t3.total() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn pair_parts_match_restricted_monte_carlo() {
        let mu = LogConcaveDensity::norm_exponential(ConvexBody::cube(3, 1.0).unwrap()).unwrap();
        let Family::NormExponential { body, .. } = mu.family() else { unreachable!() };
        let t = 3.0;
        let pair = truncated_surface_pair(&mu, t, 1).unwrap();
        let cfg = SamplerConfig::exact(31);
        let moment = crate::sampler::mc_integral(&mu, |x| if body.gauge(x) <= t { mu.grad_norm(x) } else { 0.0 }, 200_000, &cfg).unwrap();
        assert!(moment.within(pair.moment_part.value, 3.0), "{moment:?} vs {:?}", pair.moment_part);
        let shell = body.scaled(t).unwrap().boundary_integral(|x| mu.density(x), 20_000, 5);
        assert!((shell.value - pair.boundary_part).abs() < 1e-9 * pair.boundary_part, "{shell:?} vs {}", pair.boundary_part);
    }

    #[test]
    fn truncated_coarea_equals_pair_sum() {
        let base = std::sync::Arc::new(LogConcaveDensity::isotropic_cube_exp(2));
        let t = 2.0;
        let tr = LogConcaveDensity::truncate_norm_ball(base.clone(), t).unwrap();
        let exact = coarea_integral(&tr, CoareaMethod::Exact, 1).unwrap().value.value;
        let pair = truncated_surface_pair(&base, t, 1).unwrap();
        let mass = crate::special::gamma_p(2.0, t);
        assert!((exact - pair.total() / mass).abs() < 1e-12);
        let w = match base.family() {
            Family::NormExponential { body, .. } => body.support(&[1.0, 0.0]),
            _ => unreachable!(),
        };
        let grid = coarea_integral(&tr, CoareaMethod::Grid { half_width: 1.2 * t * w, resolution: 241 }, 1).unwrap();
        assert!((grid.value.value - exact).abs() < 5.0 * (2.4 * t * w / 240.0) * exact, "{grid:?} vs {exact}");
    }

    #[test]
    fn moment_measure_matches_perimeter_exactly() {
        let mu = LogConcaveDensity::isotropic_hyperbolic(3);
        let cfg = SamplerConfig::exact(12);
        let m = moment_measure(&mu, 50_000, &cfg, 100).unwrap();
        let p = estimate_functional_perimeter(&mu, 50_000, &cfg).unwrap();
        assert_eq!(m.first_moment.value, p.estimate.value);
        assert_eq!(m.points.len(), 100);
        for b in &m.barycenter {
            assert!(b.within(0.0, 3.5), "{b:?}");
        }
    }

    #[test]
    fn gaussian_moment_measure_is_gaussian() {
        let mu = LogConcaveDensity::gaussian(2);
        let m = moment_measure(&mu, 100_000, &SamplerConfig::exact(3), 10).unwrap();
        assert!(m.first_moment.within((std::f64::consts::PI / 2.0).sqrt(), 3.5));
        let xs = sample(&mu, 10, &SamplerConfig::exact(3)).unwrap();
        assert_eq!(m.points, xs);
    }

    #[test]
    fn scan_stays_below_cap() {
        let mu = LogConcaveDensity::gaussian(2);
        let sweep = default_sweep(2, 1).unwrap();
        let r = max_perimeter_scan(&mu, &sweep, 20_000, &SamplerConfig::exact(1)).unwrap();
        assert!(r.all_below_cap, "{r:?}");
        // best ball is r = 1 with μ⁺ = e^{−1/2}
        assert!(r.sup.value >= (-0.5f64).exp() * 0.98);
        let cube = LogConcaveDensity::isotropic_uniform_cube(3);
        let r = max_perimeter_scan(&cube, &default_sweep(3, 2).unwrap(), 20_000, &SamplerConfig::exact(2)).unwrap();
        assert!(r.all_below_cap && r.ratio_to_n >= 0.5, "{r:?}");
    }

    #[test]
    fn smooth_families_have_no_boundary_part() {
        let mu = LogConcaveDensity::gaussian(2);
        let p = surface_measure_pair(&mu, 10_000, &SamplerConfig::exact(1)).unwrap();
        assert_eq!(p.boundary_part, 0.0);
    }
}
