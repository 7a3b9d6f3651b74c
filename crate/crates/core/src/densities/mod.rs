//! Log-concave density families `f = e^{−ψ}` with potential, gradient and
//! normalization oracles.

mod affine;
mod moments;
mod projection;

use std::fmt;
use std::sync::{Arc, OnceLock};

pub use affine::AffineMap;
pub use moments::{
    barycenter, covariance, exponential_decay_fit, fradelizi_check, gradient_moment, isotropic_constant, isotropize,
    marginal_density, pexp_gradient_moment, CovarianceEstimate, DecayFit, FradeliziReport,
};
pub use projection::ProjectedDensity;

use crate::bodies::ConvexBody;
use crate::error::{LcError, Result};
use crate::estimate::MCEstimate;
use crate::linalg::norm;
use crate::quad;
use crate::region::Region;
use crate::special::{ln_factorial, ln_gamma, unit_sphere_area};

/// 1D convex profile `g` of a radial density `e^{−g(|x|)}`.
#[derive(Clone)]
pub enum RadialProfile {
    /// `g(r) = (r/scale)^p`.
    Power { p: f64, scale: f64 },
    /// User profile with its derivative; must be convex and increasing on `[0, ∞)`.
    Custom { name: String, g: Arc<dyn Fn(f64) -> f64 + Send + Sync>, dg: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialProfile::Power { p, scale } => f.debug_struct("Power").field("p", p).field("scale", scale).finish(),
            RadialProfile::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

impl RadialProfile {
    pub fn g(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Power { p, scale } => (r / scale).powf(*p),
            RadialProfile::Custom { g, .. } => g(r),
        }
    }

    pub fn dg(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Power { p, scale } => {
                if r == 0.0 {
                    if *p == 1.0 {
                        1.0 / scale
                    } else {
                        0.0
                    }
                } else {
                    p / scale * (r / scale).powf(p - 1.0)
                }
            }
            RadialProfile::Custom { dg, .. } => dg(r),
        }
    }

    /// `ln ∫₀^∞ r^{k} e^{−g(r)} dr`.
    pub fn ln_radial_moment(&self, k: f64) -> Result<f64> {
        match self {
            RadialProfile::Power { p, scale } => Ok((k + 1.0) * scale.ln() + ln_gamma((k + 1.0) / p) - p.ln()),
            RadialProfile::Custom { .. } => {
                let g0 = self.g(0.0);
                let v = quad::integrate_to_inf(|r| r.powf(k) * (g0 - self.g(r)).exp(), 0.0, 0.0, 1e-12)?;
                Ok(v.ln() - g0)
            }
        }
    }
}

/// Per-coordinate constants of the isotropic hyperbolic family
/// `e^{−√(a²x²+1)}`: `(∫e^{−√(x²+1)}, ∫x²e^{−√(x²+1)}/∫e^{−√(x²+1)})`.
fn hyperbolic_constants() -> (f64, f64) {
    static CONSTS: OnceLock<(f64, f64)> = OnceLock::new();
    *CONSTS.get_or_init(|| {
        let z = 2.0 * quad::integrate_to_inf(|x| (-(x * x + 1.0).sqrt()).exp(), 0.0, 0.0, 1e-14).expect("convergent");
        let m2 = 2.0 * quad::integrate_to_inf(|x| x * x * (-(x * x + 1.0).sqrt()).exp(), 0.0, 0.0, 1e-14).expect("convergent");
        (z, m2 / z)
    })
}

#[derive(Clone)]
pub struct Truncation {
    pub base: Arc<LogConcaveDensity>,
    pub region: Arc<dyn Region>,
    pub mass: MCEstimate,
    /// `Some(t)` when the region is `tK` for a norm-exponential base `ν_K`.
    pub norm_ball: Option<f64>,
    pub symmetric: bool,
}

impl fmt::Debug for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Truncation").field("base", &self.base).field("mass", &self.mass).field("norm_ball", &self.norm_ball).finish()
    }
}

#[derive(Debug, Clone)]
pub enum Family {
    /// Covariance `variance·I`.
    Gaussian { variance: f64 },
    /// `ψ(x) = ‖x‖_K + ln(n!·vol K)`.
    NormExponential { body: ConvexBody<f64>, ln_norm: f64 },
    /// `ψ(x) = g(|x|) + ln(nω_n ∫ r^{n−1}e^{−g})`.
    Radial { profile: RadialProfile, ln_norm: f64 },
    /// Product of `f_p(t) = Z_p e^{−c_p|t|^p}`, each of unit variance.
    ProductPExp { p: f64, c: f64, ln_z: f64 },
    /// Product of `e^{−√(a²t²+1)}` (normalized).
    ProductHyperbolic { a: f64, ln_z: f64 },
    /// Product of `e^{−(t+1)}` on `t >= −1`: centered, unit variance, not even.
    ProductCenteredExp,
    /// Uniform on a symmetric body.
    Uniform { body: ConvexBody<f64>, ln_vol: f64 },
    /// Law of `y = T(x − b)` for `x` drawn from the base.
    AffinePushforward { base: Arc<LogConcaveDensity>, map: AffineMap },
    /// Base restricted to a region and renormalized.
    Truncation(Truncation),
}

#[derive(Debug, Clone)]
pub struct LogConcaveDensity {
    dim: usize,
    family: Family,
    psi0: f64,
    isotropic: bool,
}

impl LogConcaveDensity {
    fn build(dim: usize, family: Family, isotropic: bool) -> Self {
        let mut d = LogConcaveDensity { dim, family, psi0: 0.0, isotropic };
        d.psi0 = d.psi(&vec![0.0; dim]);
        d
    }

    /// Standard Gaussian.
    pub fn gaussian(n: usize) -> Self {
        Self::build(n, Family::Gaussian { variance: 1.0 }, true)
    }

    pub fn gaussian_scaled(n: usize, variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(LcError::InvalidParameter("variance must be positive".into()));
        }
        Ok(Self::build(n, Family::Gaussian { variance }, variance == 1.0))
    }

    /// `ν_K` with density `e^{−‖x‖_K}/(n!·vol K)`. Bodies without a closed-form
    /// volume are rejected.
    pub fn norm_exponential(body: ConvexBody<f64>) -> Result<Self> {
        let n = body.dim();
        let vol = body.volume_exact()?;
        Ok(Self::build(n, Family::NormExponential { ln_norm: ln_factorial(n) + vol.ln(), body }, false))
    }

    /// `ν_K` for the cube scaled to isotropic position, half-width `√(3/((n+1)(n+2)))`.
    pub fn isotropic_cube_exp(n: usize) -> Self {
        let w = (3.0 / ((n + 1) as f64 * (n + 2) as f64)).sqrt();
        let mut d = Self::norm_exponential(ConvexBody::cube(n, w).expect("positive width")).expect("closed-form volume");
        d.isotropic = true;
        d
    }

    /// Isotropic radial power family `e^{−(|x|/σ)^p}`, `σ² = nΓ(n/p)/Γ((n+2)/p)`.
    pub fn radial_power(n: usize, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(LcError::InvalidParameter("radial exponent must be >= 1".into()));
        }
        let nf = n as f64;
        let scale = (nf * (ln_gamma(nf / p) - ln_gamma((nf + 2.0) / p)).exp()).sqrt();
        let mut d = Self::radial(n, RadialProfile::Power { p, scale })?;
        d.isotropic = true;
        Ok(d)
    }

    pub fn radial(n: usize, profile: RadialProfile) -> Result<Self> {
        let ln_norm = unit_sphere_area(n).ln() + profile.ln_radial_moment(n as f64 - 1.0)?;
        Ok(Self::build(n, Family::Radial { profile, ln_norm }, false))
    }

    /// Product of the isotropic one-dimensional densities `f_p`.
    pub fn product_pexp(n: usize, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(LcError::InvalidParameter("p must be >= 1".into()));
        }
        let ln_ratio = ln_gamma(3.0 / p) - ln_gamma(1.0 / p);
        let c = (0.5 * p * ln_ratio).exp();
        let ln_z = (p / 2.0).ln() + 0.5 * ln_gamma(3.0 / p) - 1.5 * ln_gamma(1.0 / p);
        Ok(Self::build(n, Family::ProductPExp { p, c, ln_z }, true))
    }

    /// Product of `e^{−√(a²t²+1)}`; `a = 1` is the unscaled family.
    pub fn product_hyperbolic(n: usize, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(LcError::InvalidParameter("scale must be positive".into()));
        }
        let (z1, v1) = hyperbolic_constants();
        let iso = (a - v1.sqrt()).abs() < 1e-12;
        Ok(Self::build(n, Family::ProductHyperbolic { a, ln_z: -(z1 / a).ln() }, iso))
    }

    /// Hyperbolic product scaled to unit variance per coordinate.
    pub fn isotropic_hyperbolic(n: usize) -> Self {
        Self::product_hyperbolic(n, hyperbolic_constants().1.sqrt()).expect("positive scale")
    }

    pub fn product_centered_exp(n: usize) -> Self {
        Self::build(n, Family::ProductCenteredExp, true)
    }

    pub fn uniform(body: ConvexBody<f64>) -> Result<Self> {
        let n = body.dim();
        let vol = body.volume_exact()?;
        Ok(Self::build(n, Family::Uniform { ln_vol: vol.ln(), body }, false))
    }

    /// Uniform on the cube `[−√3, √3]ⁿ`.
    pub fn isotropic_uniform_cube(n: usize) -> Self {
        let mut d = Self::uniform(ConvexBody::cube(n, 3f64.sqrt()).expect("positive width")).expect("closed-form volume");
        d.isotropic = true;
        d
    }

    pub fn pushforward(base: Arc<LogConcaveDensity>, map: AffineMap) -> Result<Self> {
        if map.dim() != base.dim {
            return Err(LcError::DimensionMismatch { expected: base.dim, got: map.dim() });
        }
        let n = base.dim;
        Ok(Self::build(n, Family::AffinePushforward { base, map }, false))
    }

    /// Restriction to `region`, renormalized by a Monte Carlo mass estimate.
    pub fn truncate(base: Arc<LogConcaveDensity>, region: Arc<dyn Region>, samples: usize, seed: u64) -> Result<Self> {
        if region.dim() != base.dim {
            return Err(LcError::DimensionMismatch { expected: base.dim, got: region.dim() });
        }
        let r = region.clone();
        let mass = crate::sampler::mc_integral(
            &base,
            move |x: &[f64]| if r.contains(x) { 1.0 } else { 0.0 },
            samples,
            &crate::sampler::SamplerConfig::exact(seed),
        )?;
        // the mass is the rejection sampler's acceptance rate over this probe
        if mass.value < 1e-3 {
            return Err(LcError::RejectionStall { rate: mass.value });
        }
        let symmetric = base.is_even() && region.claimed_symmetric();
        let n = base.dim;
        Ok(Self::build(n, Family::Truncation(Truncation { base, region, mass, norm_ball: None, symmetric }), false))
    }

    /// `ν_K` restricted to `tK`, with exact mass `P(n, t)`.
    pub fn truncate_norm_ball(base: Arc<LogConcaveDensity>, t: f64) -> Result<Self> {
        let Family::NormExponential { body, .. } = &base.family else {
            return Err(LcError::UnsupportedVariant("norm-ball truncation needs a NormExponential base".into()));
        };
        if !(t > 0.0) {
            return Err(LcError::InvalidParameter("truncation level must be positive".into()));
        }
        let n = base.dim;
        let region: Arc<dyn Region> = Arc::new(body.scaled(t)?);
        let mass = MCEstimate::exact(crate::special::gamma_p(n as f64, t));
        Ok(Self::build(n, Family::Truncation(Truncation { base, region, mass, norm_ball: Some(t), symmetric: true }), false))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn name(&self) -> String {
        match &self.family {
            Family::Gaussian { .. } => "Gaussian".into(),
            Family::NormExponential { body, .. } => format!("NormExponential({})", body.variant_name()),
            Family::Radial { profile: RadialProfile::Power { p, .. }, .. } => format!("Radial(p={p})"),
            Family::Radial { profile: RadialProfile::Custom { name, .. }, .. } => format!("Radial({name})"),
            Family::ProductPExp { p, .. } => format!("ProductPExp(p={p})"),
            Family::ProductHyperbolic { .. } => "ProductHyperbolic".into(),
            Family::ProductCenteredExp => "ProductCenteredExp".into(),
            Family::Uniform { body, .. } => format!("Uniform({})", body.variant_name()),
            Family::AffinePushforward { base, .. } => format!("AffinePushforward({})", base.name()),
            Family::Truncation(t) => format!("Truncation({})", t.base.name()),
        }
    }

    /// True when the family was constructed in isotropic position.
    pub fn is_isotropic(&self) -> bool {
        self.isotropic
    }

    /// `f(−x) = f(x)`.
    pub fn is_even(&self) -> bool {
        match &self.family {
            Family::ProductCenteredExp => false,
            Family::AffinePushforward { base, map } => base.is_even() && map.center().iter().all(|&c| c == 0.0),
            Family::Truncation(t) => t.symmetric,
            _ => true,
        }
    }

    /// Whether the discontinuity set is `H^{n−1}`-null (analytic, per family).
    pub fn essentially_continuous(&self) -> bool {
        match &self.family {
            Family::Uniform { .. } | Family::ProductCenteredExp | Family::Truncation(_) => false,
            Family::AffinePushforward { base, .. } => base.essentially_continuous(),
            _ => true,
        }
    }

    /// `ψ(x)`; `+∞` outside the support.
    pub fn psi(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::Gaussian { variance } => {
                let n = self.dim as f64;
                x.iter().map(|v| v * v).sum::<f64>() / (2.0 * variance) + 0.5 * n * (2.0 * std::f64::consts::PI * variance).ln()
            }
            Family::NormExponential { body, ln_norm } => body.gauge(x) + ln_norm,
            Family::Radial { profile, ln_norm } => profile.g(norm(x)) + ln_norm,
            Family::ProductPExp { p, c, ln_z } => x.iter().map(|v| c * v.abs().powf(*p) - ln_z).sum(),
            Family::ProductHyperbolic { a, ln_z } => x.iter().map(|v| (a * a * v * v + 1.0).sqrt() - ln_z).sum(),
            Family::ProductCenteredExp => {
                if x.iter().any(|&v| v < -1.0) {
                    f64::INFINITY
                } else {
                    x.iter().map(|v| v + 1.0).sum()
                }
            }
            Family::Uniform { body, ln_vol } => {
                if body.contains(x) {
                    *ln_vol
                } else {
                    f64::INFINITY
                }
            }
            Family::AffinePushforward { base, map } => base.psi(&map.apply_inverse(x)) + map.ln_abs_det(),
            Family::Truncation(t) => {
                if t.region.contains(x) {
                    t.base.psi(x) + t.mass.value.ln()
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `ψ(x)`; errors with `OutsideSupport` for truncations evaluated outside their region.
    pub fn eval_potential(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        if let Family::Truncation(t) = &self.family {
            if !t.region.contains(x) {
                return Err(LcError::OutsideSupport);
            }
        }
        Ok(self.psi(x))
    }

    pub fn eval_density(&self, x: &[f64]) -> Result<f64> {
        Ok((-self.eval_potential(x)?).exp())
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        (-self.psi(x)).exp()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(LcError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// `∇ψ(x)` (zero vector outside the support).
    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        match &self.family {
            Family::Gaussian { variance } => x.iter().map(|v| v / variance).collect(),
            Family::NormExponential { body, .. } => body.gauge_gradient(x),
            Family::Radial { profile, .. } => {
                let r = norm(x);
                if r == 0.0 {
                    vec![0.0; self.dim]
                } else {
                    let s = profile.dg(r) / r;
                    x.iter().map(|v| v * s).collect()
                }
            }
            Family::ProductPExp { p, c, .. } => x.iter().map(|&v| c * p * v.signum() * v.abs().powf(p - 1.0)).collect(),
            Family::ProductHyperbolic { a, .. } => x.iter().map(|&v| a * a * v / (a * a * v * v + 1.0).sqrt()).collect(),
            Family::ProductCenteredExp => {
                if x.iter().any(|&v| v < -1.0) {
                    vec![0.0; self.dim]
                } else {
                    vec![1.0; self.dim]
                }
            }
            Family::Uniform { .. } => vec![0.0; self.dim],
            Family::AffinePushforward { base, map } => map.pull_gradient(&base.grad(&map.apply_inverse(x))),
            Family::Truncation(t) => {
                if t.region.contains(x) {
                    t.base.grad(x)
                } else {
                    vec![0.0; self.dim]
                }
            }
        }
    }

    /// `|∇ψ(x)|`.
    pub fn grad_norm(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::Gaussian { variance } => norm(x) / variance,
            Family::Radial { profile, .. } => profile.dg(norm(x)),
            _ => norm(&self.grad(x)),
        }
    }

    pub fn grad_potential(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.eval_potential(x)?;
        Ok(self.grad(x))
    }

    /// `ψ(0)`, cached.
    pub fn psi0(&self) -> f64 {
        self.psi0
    }

    /// `f(0)`.
    pub fn f0(&self) -> f64 {
        (-self.psi0).exp()
    }

    /// `ln ‖f‖_∞`.
    pub fn ln_sup(&self) -> f64 {
        match &self.family {
            Family::ProductCenteredExp => 0.0,
            Family::AffinePushforward { base, map } => base.ln_sup() - map.ln_abs_det(),
            Family::Truncation(t) if !t.symmetric => t.base.ln_sup() - t.mass.value.ln(),
            _ => -self.psi0,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.ln_sup().exp()
    }

    /// Points where `ψ` is finite.
    pub fn in_support(&self, x: &[f64]) -> bool {
        self.psi(x).is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::block_rng;
    use rand::Rng;

    fn families(n: usize) -> Vec<LogConcaveDensity> {
        let map = AffineMap::new(vec![0.0; n], (0..n).map(|i| (0..n).map(|j| if i == j { 1.5 } else { 0.3 }).collect()).collect()).unwrap();
        vec![
            LogConcaveDensity::gaussian(n),
            LogConcaveDensity::isotropic_cube_exp(n),
            LogConcaveDensity::norm_exponential(ConvexBody::lp_ball(n, 3.0, 1.0).unwrap()).unwrap(),
            LogConcaveDensity::radial_power(n, 1.0).unwrap(),
            LogConcaveDensity::radial_power(n, 4.0).unwrap(),
            LogConcaveDensity::product_pexp(n, 1.0).unwrap(),
            LogConcaveDensity::product_pexp(n, 4.0).unwrap(),
            LogConcaveDensity::isotropic_hyperbolic(n),
            LogConcaveDensity::pushforward(Arc::new(LogConcaveDensity::gaussian(n)), map).unwrap(),
        ]
    }

    #[test]
    fn convex_along_random_segments() {
        let mut rng = block_rng(1, 0, 0);
        for d in families(3) {
            for _ in 0..500 {
                let a: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
                let b: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
                let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
                assert!(d.psi(&m) <= 0.5 * (d.psi(&a) + d.psi(&b)) + 1e-9, "{}", d.name());
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = block_rng(2, 0, 0);
        for d in families(3) {
            for _ in 0..50 {
                let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
                let g = d.grad(&x);
                for i in 0..3 {
                    let h = 1e-6;
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let fd = (d.psi(&xp) - d.psi(&xm)) / (2.0 * h);
                    assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1.0), "{} {fd} {}", d.name(), g[i]);
                }
            }
        }
    }

    #[test]
    fn one_dimensional_normalization_by_quadrature() {
        for d in families(1) {
            let z = quad::integrate(|t| d.density(&[t]), -60.0, 60.0, 1e-13, 1e-12).unwrap();
            assert!((z - 1.0).abs() < 1e-8, "{} {z}", d.name());
        }
        let c = LogConcaveDensity::product_centered_exp(1);
        let z = quad::integrate_to_inf(|t| c.density(&[t]), -1.0, 1e-14, 1e-13).unwrap();
        assert!((z - 1.0).abs() < 1e-8);
    }

    #[test]
    fn two_dimensional_normalization_by_quadrature() {
        for d in families(2) {
            let z = quad::integrate(
                |s| quad::integrate(|t| d.density(&[s, t]), -40.0, 40.0, 1e-12, 1e-10).unwrap(),
                -40.0,
                40.0,
                1e-11,
                1e-10,
            )
            .unwrap();
            // gauge kinks limit nested adaptive quadrature to about 1e−7
            assert!((z - 1.0).abs() < 1e-6, "{} {z}", d.name());
        }
    }

    #[test]
    fn pexp_two_is_the_gaussian() {
        let g = LogConcaveDensity::gaussian(3);
        let p = LogConcaveDensity::product_pexp(3, 2.0).unwrap();
        for x in [[0.0, 0.0, 0.0], [1.0, -0.5, 2.0], [3.0, 0.1, -1.1]] {
            assert!((g.psi(&x) - p.psi(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_exponential_gradient_on_box_facet_cone() {
        let d = LogConcaveDensity::norm_exponential(ConvexBody::boxed(vec![0.5, 2.0]).unwrap()).unwrap();
        assert!((d.grad_norm(&[0.3, 0.1]) - 2.0).abs() < 1e-14);
        assert!((d.grad_norm(&[0.1, 1.9]) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn truncation_outside_support_errors() {
        let base = Arc::new(LogConcaveDensity::isotropic_cube_exp(2));
        let t = LogConcaveDensity::truncate_norm_ball(base, 1.0).unwrap();
        assert_eq!(t.eval_potential(&[10.0, 0.0]), Err(LcError::OutsideSupport));
        assert!(t.eval_potential(&[0.0, 0.0]).is_ok());
    }

    #[test]
    fn sup_norms() {
        assert_eq!(LogConcaveDensity::product_centered_exp(3).sup_norm(), 1.0);
        let g = LogConcaveDensity::gaussian(2);
        assert!((g.sup_norm() - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    }
}
