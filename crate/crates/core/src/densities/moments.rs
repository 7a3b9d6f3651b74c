//! Covariance, isotropization, isotropic constant, Fradelizi ratio, gradient
//! moments, marginals and decay constants.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{AffineMap, LogConcaveDensity};
use crate::error::{LcError, Result};
use crate::estimate::MCEstimate;
use crate::quad;
use crate::sampler::{mc_integral, mc_moments, SamplerConfig};
use crate::special::ln_gamma;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub mean: Vec<MCEstimate>,
    pub cov: Vec<Vec<MCEstimate>>,
}

impl CovarianceEstimate {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.cov[i][j].value)
    }

    /// Mean within `k` SE of zero and covariance within `k` SE of the identity.
    pub fn is_identity_within(&self, k: f64) -> bool {
        let n = self.dim();
        self.mean.iter().all(|m| m.within(0.0, k))
            && (0..n).all(|i| (0..n).all(|j| self.cov[i][j].within(if i == j { 1.0 } else { 0.0 }, k)))
    }

    /// Largest entrywise deviation from the identity, in units of SE.
    pub fn max_identity_z(&self) -> f64 {
        let n = self.dim();
        let mut z: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let c = &self.cov[i][j];
                let target = if i == j { 1.0 } else { 0.0 };
                z = z.max((c.value - target).abs() / c.std_error.max(1e-300));
            }
        }
        z
    }
}

/// Sample mean and covariance with per-entry standard errors (delta method
/// on the joint first and second moments).
pub fn covariance(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig) -> Result<CovarianceEstimate> {
    let n = mu.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let k = n + pairs.len();
    let m = mc_moments(
        mu,
        k,
        |x, out| {
            out[..n].copy_from_slice(x);
            for (p, &(i, j)) in pairs.iter().enumerate() {
                out[n + p] = x[i] * x[j];
            }
        },
        count,
        cfg,
    )?;
    let nn = m.n as f64;
    let cm = |a: usize, b: usize| m.covariance(a, b);
    let mean: Vec<MCEstimate> = (0..n).map(|i| m.estimate(i, cfg.seed)).collect();
    let mut cov = vec![vec![MCEstimate::exact(0.0); n]; n];
    for (p, &(i, j)) in pairs.iter().enumerate() {
        let (mi, mj) = (m.mean[i], m.mean[j]);
        let value = (m.mean[n + p] - mi * mj) * nn / (nn - 1.0);
        // gradient of (s, a, b) ↦ s − a·b at (E[x_i x_j], m_i, m_j)
        let idx = [n + p, i, j];
        let grad = [1.0, -mj, -mi];
        let mut var = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                var += grad[a] * grad[b] * cm(idx[a], idx[b]);
            }
        }
        let e = MCEstimate { value, std_error: (var.max(0.0) / nn).sqrt(), n_samples: m.n, seed: cfg.seed };
        cov[i][j] = e;
        cov[j][i] = e;
    }
    let est = CovarianceEstimate { mean, cov };
    if est.matrix().cholesky().is_none() {
        return Err(LcError::SingularEstimate);
    }
    Ok(est)
}

pub fn barycenter(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig) -> Result<Vec<MCEstimate>> {
    let n = mu.dim();
    Ok(mc_moments(mu, n, |x, out| out.copy_from_slice(x), count, cfg)?.estimates(cfg.seed))
}

/// `T = Σ^{−1/2}` after centering (exactly at 0 for even families), and the
/// pushforward of `μ` under `x ↦ T(x − b)`.
pub fn isotropize(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig) -> Result<(AffineMap, LogConcaveDensity)> {
    let est = covariance(mu, count, cfg)?;
    let n = mu.dim();
    let center: Vec<f64> = if mu.is_even() { vec![0.0; n] } else { est.mean.iter().map(|m| m.value).collect() };
    let mut sigma = est.matrix();
    if mu.is_even() {
        // second moment about 0
        for i in 0..n {
            for j in 0..n {
                sigma[(i, j)] += est.mean[i].value * est.mean[j].value;
            }
        }
    }
    let eig = SymmetricEigen::new(sigma);
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(LcError::SingularEstimate);
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let t = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| t[(i, j)]).collect()).collect();
    let map = AffineMap::new(center, rows)?;
    let pushed = LogConcaveDensity::pushforward(Arc::new(mu.clone()), map.clone())?;
    Ok((map, pushed))
}

/// `L_f = ‖f‖_∞^{1/n} det(Cov f)^{1/(2n)}` for a probability density.
pub fn isotropic_constant(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig) -> Result<f64> {
    let n = mu.dim() as f64;
    if mu.is_isotropic() {
        return Ok((mu.ln_sup() / n).exp());
    }
    let est = covariance(mu, count, cfg)?;
    let ln_det = est.matrix().cholesky().ok_or(LcError::SingularEstimate)?.l().diagonal().iter().map(|v| 2.0 * v.ln()).sum::<f64>();
    Ok((mu.ln_sup() / n + ln_det / (2.0 * n)).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FradeliziReport {
    pub bound_holds: bool,
    /// `‖f‖_∞ / f(0)`.
    pub ratio: f64,
    /// `eⁿ`.
    pub bound: f64,
}

/// `‖f‖_∞ <= eⁿ f(0)` for centered `μ`. Non-even families are checked for
/// centering on `count` samples first.
pub fn fradelizi_check(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig) -> Result<FradeliziReport> {
    if !mu.is_even() {
        let bar = barycenter(mu, count, cfg)?;
        if let Some(m) = bar.iter().find(|m| !m.within(0.0, 3.0)) {
            return Err(LcError::NotCentered(format!("barycenter coordinate {:.4} ± {:.4}", m.value, m.std_error)));
        }
    }
    let n = mu.dim() as f64;
    let ratio = (mu.ln_sup() + mu.psi0()).exp();
    let bound = n.exp();
    Ok(FradeliziReport { bound_holds: ratio <= bound * (1.0 + 1e-12), ratio, bound })
}

/// `∫ |∇ψ|^{1+α} dμ`.
pub fn gradient_moment(mu: &LogConcaveDensity, alpha: f64, count: usize, cfg: &SamplerConfig) -> Result<MCEstimate> {
    if !(alpha >= 0.0) {
        return Err(LcError::InvalidParameter("α must be nonnegative".into()));
    }
    mc_integral(mu, |x| mu.grad_norm(x).powf(1.0 + alpha), count, cfg)
}

/// Closed form of `∫|(−ln f_p)′|^{1+α} f_p` for the isotropic one-dimensional `f_p`.
pub fn pexp_gradient_moment(p: f64, alpha: f64) -> f64 {
    let a1 = 1.0 + alpha;
    let ln = a1 * p.ln() + 0.5 * a1 * (ln_gamma(3.0 / p) - ln_gamma(1.0 / p)) + ln_gamma(((p - 1.0) * a1 + 1.0) / p)
        - ln_gamma(1.0 / p);
    ln.exp()
}

/// Density of `⟨X, ξ⟩` at `s` by quadrature over the orthogonal line (`n <= 2`).
pub fn marginal_density(mu: &LogConcaveDensity, xi: &[f64], s: f64) -> Result<f64> {
    let n = mu.dim();
    let l = crate::linalg::norm(xi);
    let u: Vec<f64> = xi.iter().map(|v| v / l).collect();
    match n {
        1 => Ok(mu.density(&[s * u[0]])),
        2 => {
            let perp = [-u[1], u[0]];
            let f = |t: f64| mu.density(&[s * u[0] + t * perp[0], s * u[1] + t * perp[1]]);
            quad::integrate(f, -60.0, 60.0, 1e-12, 1e-10)
        }
        _ => Err(LcError::DimensionTooLarge { what: "marginal quadrature", max: 2, n }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub a: f64,
    pub b: f64,
}

/// Constants with `f(x) <= A e^{−B|x|}` along `rays` random directions, from
/// the convexity of `ψ` along each ray.
pub fn exponential_decay_fit(mu: &LogConcaveDensity, rays: usize, seed: u64) -> DecayFit {
    let n = mu.dim();
    let mut rng = crate::estimate::block_rng(seed, 0x6465_6361, 0);
    let psi0 = mu.psi0();
    let mut b = f64::INFINITY;
    for _ in 0..rays {
        let u = crate::bodies::unit_direction(&mut rng, n);
        let mut r0 = 1e-3;
        while mu.psi(&u.iter().map(|v| v * r0).collect::<Vec<_>>()) - psi0 < 1.0 {
            r0 *= 1.5;
        }
        b = b.min(1.0 / r0);
    }
    DecayFit { a: std::f64::consts::E * mu.sup_norm(), b }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::ConvexBody;

    #[test]
    fn covariance_examples() {
        let cfg = SamplerConfig::exact(1);
        assert!(covariance(&LogConcaveDensity::gaussian(3), 50_000, &cfg).unwrap().is_identity_within(3.5));
        assert!(covariance(&LogConcaveDensity::product_pexp(2, 1.0).unwrap(), 50_000, &cfg).unwrap().is_identity_within(3.5));
        assert!(covariance(&LogConcaveDensity::isotropic_cube_exp(3), 50_000, &cfg).unwrap().is_identity_within(3.5));
        assert!(covariance(&LogConcaveDensity::isotropic_hyperbolic(2), 50_000, &cfg).unwrap().is_identity_within(3.5));
        assert!(covariance(&LogConcaveDensity::radial_power(3, 4.0).unwrap(), 50_000, &cfg).unwrap().is_identity_within(3.5));
        assert!(covariance(&LogConcaveDensity::isotropic_uniform_cube(3), 50_000, &cfg).unwrap().is_identity_within(3.5));
    }

    #[test]
    fn singular_covariance_detected() {
        let d = LogConcaveDensity::gaussian(3);
        assert_eq!(covariance(&d, 2, &SamplerConfig::exact(1)), Err(LcError::SingularEstimate));
    }

    #[test]
    fn isotropize_unequal_box_gives_diagonal_map() {
        let mu = LogConcaveDensity::norm_exponential(ConvexBody::boxed(vec![0.3, 1.0, 2.0]).unwrap()).unwrap();
        let (map, iso) = isotropize(&mu, 200_000, &SamplerConfig::exact(2)).unwrap();
        let t = map.linear();
        // off-diagonal entries are pure estimation noise
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(t[i][j].abs() < 0.02 * t[i][i].abs(), "{t:?}");
                }
            }
        }
        let cov = covariance(&iso, 100_000, &SamplerConfig::exact(3)).unwrap();
        assert!(cov.max_identity_z() < 5.0, "{cov:?}");
    }

    #[test]
    fn isotropize_round_trip_from_random_pushforward() {
        let t0 = AffineMap::new(vec![0.0; 2], vec![vec![2.0, 0.7], vec![-0.4, 0.5]]).unwrap();
        let mu = LogConcaveDensity::pushforward(Arc::new(LogConcaveDensity::gaussian(2)), t0).unwrap();
        let (_, iso) = isotropize(&mu, 200_000, &SamplerConfig::exact(4)).unwrap();
        let cov = covariance(&iso, 100_000, &SamplerConfig::exact(5)).unwrap();
        assert!(cov.max_identity_z() < 5.0, "{cov:?}");
    }

    #[test]
    fn isotropic_constants() {
        let cfg = SamplerConfig::exact(6);
        for n in [1, 3, 6] {
            let l = isotropic_constant(&LogConcaveDensity::gaussian(n), 1000, &cfg).unwrap();
            assert!((l - (2.0 * std::f64::consts::PI).powf(-0.5)).abs() < 1e-14);
        }
        let n = 4;
        let c = LogConcaveDensity::isotropic_cube_exp(n);
        let w = (3.0 / 30.0f64).sqrt();
        let want = (1.0 / (24.0 * (2.0 * w).powi(4))).powf(0.25);
        assert!((isotropic_constant(&c, 1000, &cfg).unwrap() - want).abs() < 1e-12);
        // affine invariance
        let t0 = AffineMap::new(vec![0.0; 2], vec![vec![1.5, 0.3], vec![0.2, 0.8]]).unwrap();
        let base = LogConcaveDensity::isotropic_cube_exp(2);
        let l0 = isotropic_constant(&base, 1000, &cfg).unwrap();
        let pushed = LogConcaveDensity::pushforward(Arc::new(base), t0).unwrap();
        let l1 = isotropic_constant(&pushed, 400_000, &cfg).unwrap();
        assert!((l1 - l0).abs() < 0.01 * l0, "{l0} {l1}");
    }

    #[test]
    fn fradelizi_examples() {
        let cfg = SamplerConfig::exact(7);
        let r = fradelizi_check(&LogConcaveDensity::radial_power(3, 1.0).unwrap(), 1000, &cfg).unwrap();
        assert_eq!(r.ratio, 1.0);
        let r = fradelizi_check(&LogConcaveDensity::product_centered_exp(1), 100_000, &cfg).unwrap();
        assert!((r.ratio - std::f64::consts::E).abs() < 1e-12 && r.bound_holds);
        let shifted = LogConcaveDensity::pushforward(
            Arc::new(LogConcaveDensity::gaussian(2)),
            AffineMap::new(vec![0.5, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        )
        .unwrap();
        assert!(matches!(fradelizi_check(&shifted, 100_000, &cfg), Err(LcError::NotCentered(_))));
    }

    #[test]
    fn gradient_moment_examples() {
        assert!((pexp_gradient_moment(2.0, 1.0) - 1.0).abs() < 1e-14);
        let g = LogConcaveDensity::gaussian(1);
        let e = gradient_moment(&g, 0.0, 200_000, &SamplerConfig::exact(8)).unwrap();
        assert!(e.within((2.0 / std::f64::consts::PI).sqrt(), 3.0));
        // closed form against direct quadrature of f_4
        let d = LogConcaveDensity::product_pexp(1, 4.0).unwrap();
        let q = quad::integrate(|t| d.grad_norm(&[t]) * d.density(&[t]), -20.0, 20.0, 1e-13, 1e-12).unwrap();
        assert!((q - pexp_gradient_moment(4.0, 0.0)).abs() < 1e-9);
    }

    #[test]
    fn marginals_of_isotropic_families_are_bounded_by_one() {
        for d in [
            LogConcaveDensity::gaussian(2),
            LogConcaveDensity::isotropic_cube_exp(2),
            LogConcaveDensity::product_pexp(2, 1.0).unwrap(),
            LogConcaveDensity::isotropic_uniform_cube(2),
        ] {
            let mut best: f64 = 0.0;
            for k in 0..12 {
                let a = k as f64 * std::f64::consts::PI / 12.0;
                for s in [-0.5, -0.1, 0.0, 0.1, 0.5] {
                    best = best.max(marginal_density(&d, &[a.cos(), a.sin()], s).unwrap());
                }
            }
            assert!(best <= 1.0, "{} {best}", d.name());
        }
    }

    #[test]
    fn decay_bounds_hold_on_sampled_rays() {
        let mut rng = crate::estimate::block_rng(3, 0, 0);
        for d in [LogConcaveDensity::gaussian(3), LogConcaveDensity::isotropic_cube_exp(3), LogConcaveDensity::isotropic_hyperbolic(3)] {
            let fit = exponential_decay_fit(&d, 200, 9);
            assert!(fit.b > 0.0);
            for _ in 0..2000 {
                let u = crate::bodies::unit_direction(&mut rng, 3);
                let r = 10.0 * rand::Rng::random::<f64>(&mut rng);
                let x: Vec<f64> = u.iter().map(|v| v * r).collect();
                // unsampled directions may decay slightly slower; allow 10%
                assert!(d.density(&x) <= fit.a * (-0.9 * fit.b * r).exp(), "{}", d.name());
            }
        }
    }
}
