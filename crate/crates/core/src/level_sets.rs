//! Level sets `R_t(μ) = {x : f(x) >= e^{−t} f(0)}`, their mass and containment
//! bounds, the gradient-bounded window `((n−1)/n)·R_{3n}(μ)` and the Markov set
//! `{|∇ψ| <= threshold}`.

use std::sync::Arc;

use serde::Serialize;

use crate::bodies::{is_convex_region, unit_direction, ConvexBody, ConvexityVerdict};
use crate::densities::{Family, LogConcaveDensity};
use crate::error::{LcError, Result};
use crate::estimate::{block_rng, MCEstimate};
use crate::linalg::norm;
use crate::region::Region;
use crate::sampler::{mc_integral, mc_moments, sample, SamplerConfig};
use crate::special::gamma_p;

/// What a [`RegionOracle`] represents.
#[derive(Clone)]
pub enum RegionKind {
    /// `ψ(x) − ψ(0) <= t`.
    LevelSet { mu: Arc<LogConcaveDensity>, t: f64 },
    /// `factor · R_t(μ)`.
    ScaledLevelSet { mu: Arc<LogConcaveDensity>, t: f64, factor: f64 },
    /// `|∇ψ(x)| <= bound` on the support.
    GradientSublevel { mu: Arc<LogConcaveDensity>, bound: f64 },
    ExplicitBody(ConvexBody<f64>),
    Complement(Box<RegionOracle>),
    Intersection(Vec<RegionOracle>),
}

/// A membership predicate with a descriptor and a convexity claim.
#[derive(Clone)]
pub struct RegionOracle {
    kind: RegionKind,
    dim: usize,
}

impl std::fmt::Debug for RegionOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RegionOracle({})", self.describe())
    }
}

fn level_test(mu: &LogConcaveDensity, t: f64, x: &[f64]) -> bool {
    match mu.family() {
        Family::NormExponential { body, .. } => body.gauge(x) <= t,
        _ => mu.psi(x) - mu.psi0() <= t,
    }
}

impl RegionOracle {
    pub fn new(kind: RegionKind) -> Result<Self> {
        let dim = match &kind {
            RegionKind::LevelSet { mu, .. } | RegionKind::ScaledLevelSet { mu, .. } | RegionKind::GradientSublevel { mu, .. } => mu.dim(),
            RegionKind::ExplicitBody(k) => k.dim(),
            RegionKind::Complement(r) => r.dim,
            RegionKind::Intersection(rs) => {
                let d = rs.first().ok_or_else(|| LcError::InvalidParameter("empty intersection".into()))?.dim;
                if let Some(bad) = rs.iter().find(|r| r.dim != d) {
                    return Err(LcError::DimensionMismatch { expected: d, got: bad.dim });
                }
                d
            }
        };
        Ok(RegionOracle { kind, dim })
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    pub fn complement(self) -> Self {
        let dim = self.dim;
        RegionOracle { kind: RegionKind::Complement(Box::new(self)), dim }
    }

    pub fn intersect(self, other: RegionOracle) -> Result<Self> {
        RegionOracle::new(RegionKind::Intersection(vec![self, other]))
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            RegionKind::LevelSet { mu, t } => format!("LevelSet({}, t={t})", mu.name()),
            RegionKind::ScaledLevelSet { mu, t, factor } => format!("ScaledLevelSet({}, t={t}, factor={factor})", mu.name()),
            RegionKind::GradientSublevel { mu, bound } => format!("GradientSublevel({}, bound={bound})", mu.name()),
            RegionKind::ExplicitBody(k) => format!("ExplicitBody({})", k.variant_name()),
            RegionKind::Complement(r) => format!("Complement({})", r.describe()),
            RegionKind::Intersection(rs) => format!("Intersection({})", rs.iter().map(|r| r.describe()).collect::<Vec<_>>().join(", ")),
        }
    }
}

impl Region for RegionOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64]) -> bool {
        match &self.kind {
            RegionKind::LevelSet { mu, t } => level_test(mu, *t, x),
            RegionKind::ScaledLevelSet { mu, t, factor } => {
                let y: Vec<f64> = x.iter().map(|v| v / factor).collect();
                level_test(mu, *t, &y)
            }
            RegionKind::GradientSublevel { mu, bound } => mu.in_support(x) && mu.grad_norm(x) <= *bound,
            RegionKind::ExplicitBody(k) => k.contains(x),
            RegionKind::Complement(r) => !r.contains(x),
            RegionKind::Intersection(rs) => rs.iter().all(|r| r.contains(x)),
        }
    }

    fn claimed_convex(&self) -> bool {
        match &self.kind {
            RegionKind::LevelSet { .. } | RegionKind::ScaledLevelSet { .. } | RegionKind::ExplicitBody(_) => true,
            RegionKind::GradientSublevel { .. } | RegionKind::Complement(_) => false,
            RegionKind::Intersection(rs) => rs.iter().all(|r| r.claimed_convex()),
        }
    }

    fn claimed_symmetric(&self) -> bool {
        match &self.kind {
            RegionKind::LevelSet { mu, .. } | RegionKind::ScaledLevelSet { mu, .. } | RegionKind::GradientSublevel { mu, .. } => mu.is_even(),
            RegionKind::ExplicitBody(k) => k.is_symmetric(),
            RegionKind::Complement(r) => r.claimed_symmetric(),
            RegionKind::Intersection(rs) => rs.iter().all(|r| r.claimed_symmetric()),
        }
    }
}

fn require_even(mu: &LogConcaveDensity) -> Result<()> {
    if mu.is_even() {
        Ok(())
    } else {
        Err(LcError::NotCentered(format!("{} does not attain its maximum at the origin", mu.name())))
    }
}

/// `R_t(μ)`.
pub fn level_set(mu: Arc<LogConcaveDensity>, t: f64) -> Result<RegionOracle> {
    if !(t >= 0.0) {
        return Err(LcError::InvalidParameter(format!("level t must be nonnegative, got {t}")));
    }
    require_even(&mu)?;
    RegionOracle::new(RegionKind::LevelSet { mu, t })
}

/// `μ(R_t(μ))` in closed form where available: `P(n, t)` for norm-exponential
/// measures and `P(n/2, t)` for the standard Gaussian.
pub fn exact_level_set_mass(mu: &LogConcaveDensity, t: f64) -> Option<f64> {
    let n = mu.dim() as f64;
    match mu.family() {
        Family::NormExponential { .. } => Some(gamma_p(n, t)),
        Family::Gaussian { .. } => Some(gamma_p(n / 2.0, t)),
        _ => None,
    }
}

/// Largest `r` with `r·u` in a region star-shaped about the origin, capped at `cap`.
pub fn radial_extent<R: Region + ?Sized>(region: &R, u: &[f64], cap: f64) -> f64 {
    let at = |r: f64| -> Vec<f64> { u.iter().map(|v| v * r).collect() };
    if !region.contains(&at(0.0)) {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while region.contains(&at(hi)) {
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return cap;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if region.contains(&at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Bounding half-widths of a star-shaped region from its radial extent along
/// the coordinate axes and `rays` random directions, inflated by 5%.
pub fn star_bounding_box<R: Region + ?Sized>(region: &R, rays: usize, seed: u64, cap: f64) -> Vec<f64> {
    let n = region.dim();
    let mut rng = block_rng(seed, 0x6262_6f78, 0);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for s in [-1.0, 1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            dirs.push(e);
        }
    }
    dirs.extend((0..rays).map(|_| unit_direction(&mut rng, n)));
    let mut half = vec![0.0f64; n];
    for u in &dirs {
        let r = radial_extent(region, u, cap);
        for i in 0..n {
            half[i] = half[i].max((r * u[i]).abs());
        }
    }
    half.iter().map(|h| (1.05 * h).clamp(1e-9, cap)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MassBoundReport {
    pub t: f64,
    pub mass: MCEstimate,
    pub exact_mass: Option<f64>,
    /// `1 − e^{−t/4}`, guaranteed for `t >= 3n`.
    pub paper_bound: f64,
    /// `1 − 2ⁿ e^{−t/2}`, valid for every `t`.
    pub intermediate_bound: f64,
    pub headline_applies: bool,
    /// `mass + 3·SE >= ` the applicable bound.
    pub holds: bool,
}

pub fn mass_bound_check(mu: Arc<LogConcaveDensity>, t: f64, count: usize, cfg: &SamplerConfig) -> Result<MassBoundReport> {
    let n = mu.dim() as f64;
    let region = level_set(mu.clone(), t)?;
    let mass = mc_integral(&mu, |x| if region.contains(x) { 1.0 } else { 0.0 }, count, cfg)?;
    let paper_bound = 1.0 - (-t / 4.0).exp();
    let intermediate_bound = 1.0 - (n * std::f64::consts::LN_2 - t / 2.0).exp();
    let headline_applies = t >= 3.0 * n;
    let bound = if headline_applies { paper_bound.max(intermediate_bound) } else { intermediate_bound };
    let holds = mass.value + 3.0 * mass.std_error >= bound;
    Ok(MassBoundReport { t, mass, exact_mass: exact_level_set_mass(&mu, t), paper_bound, intermediate_bound, headline_applies, holds })
}

#[derive(Debug, Clone, Serialize)]
pub struct BallContainmentReport {
    pub t: f64,
    pub directions: usize,
    /// `max_u ψ(u/3) − ψ(0)`.
    pub max_potential_gap: f64,
    /// `min_u` of the radial extent of `R_t(μ)`; the claim is that it is at least 1/3.
    pub min_boundary_radius: f64,
    pub holds: bool,
    /// Set when `n < 10`, below the dimension where the containment is guaranteed.
    pub outside_hypothesis: bool,
    pub isotropic: bool,
}

/// `R_t(μ) ⊇ (1/3) B₂ⁿ`, probed along `m` random directions.
pub fn ball_containment_check(mu: Arc<LogConcaveDensity>, t: f64, m: usize, seed: u64) -> Result<BallContainmentReport> {
    let n = mu.dim();
    let region = level_set(mu.clone(), t)?;
    let mut rng = block_rng(seed, 0x6261_6c6c, 0);
    let psi0 = mu.psi0();
    let mut gap = f64::NEG_INFINITY;
    let mut radius = f64::INFINITY;
    for _ in 0..m {
        let u = unit_direction(&mut rng, n);
        let x: Vec<f64> = u.iter().map(|v| v / 3.0).collect();
        gap = gap.max(mu.psi(&x) - psi0);
        radius = radius.min(radial_extent(&region, &u, 1e6));
    }
    Ok(BallContainmentReport {
        t,
        directions: m,
        max_potential_gap: gap,
        min_boundary_radius: radius,
        holds: gap <= t,
        outside_hypothesis: n < 10,
        isotropic: mu.is_isotropic(),
    })
}

/// `((n−1)/n)ⁿ (1 − e^{−3n/4})`.
pub fn window_mass_bound(n: usize) -> f64 {
    let nf = n as f64;
    ((nf - 1.0) / nf).powf(nf) * (1.0 - (-0.75 * nf).exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowReport {
    #[serde(skip)]
    pub region: Option<RegionOracle>,
    pub mass: MCEstimate,
    pub mass_bound: f64,
    /// Largest `|∇ψ|` over sampled points of `A` and points just inside its boundary.
    pub max_gradient: f64,
    /// `9n²`.
    pub gradient_bound: f64,
    pub mass_ok: bool,
    pub gradient_ok: bool,
    pub outside_hypothesis: bool,
    pub isotropic: bool,
}

/// The window `A = ((n−1)/n)·R_{3n}(μ)`.
pub fn window_region(mu: Arc<LogConcaveDensity>) -> Result<RegionOracle> {
    require_even(&mu)?;
    let n = mu.dim() as f64;
    RegionOracle::new(RegionKind::ScaledLevelSet { mu, t: 3.0 * n, factor: (n - 1.0) / n })
}

pub fn gradient_window(mu: Arc<LogConcaveDensity>, count: usize, cfg: &SamplerConfig) -> Result<WindowReport> {
    let n = mu.dim();
    let region = window_region(mu.clone())?;
    let moments = mc_moments(
        &mu,
        2,
        |x, out| {
            let inside = region.contains(x);
            out[0] = if inside { 1.0 } else { 0.0 };
            out[1] = if inside { mu.grad_norm(x) } else { 0.0 };
        },
        count,
        cfg,
    )?;
    let mass = moments.estimate(0, cfg.seed);
    let mut max_gradient = sampled_max_gradient(&mu, &region, count.min(20_000), cfg)?;
    let mut rng = block_rng(cfg.seed, 0x7769_6e64, 0);
    for _ in 0..2000 {
        let u = unit_direction(&mut rng, n);
        let r = radial_extent(&region, &u, 1e6) * (1.0 - 1e-9);
        let x: Vec<f64> = u.iter().map(|v| v * r).collect();
        max_gradient = max_gradient.max(mu.grad_norm(&x));
    }
    let mass_bound = window_mass_bound(n);
    let gradient_bound = 9.0 * (n * n) as f64;
    Ok(WindowReport {
        region: Some(region),
        mass_ok: mass.value + 3.0 * mass.std_error >= mass_bound,
        gradient_ok: max_gradient <= gradient_bound,
        mass,
        mass_bound,
        max_gradient,
        gradient_bound,
        outside_hypothesis: n < 10,
        isotropic: mu.is_isotropic(),
    })
}

fn sampled_max_gradient(mu: &LogConcaveDensity, region: &RegionOracle, count: usize, cfg: &SamplerConfig) -> Result<f64> {
    let pts = sample(mu, count, cfg)?;
    Ok(pts.iter().filter(|x| region.contains(x)).map(|x| mu.grad_norm(x)).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct GradSqReport {
    /// `∫_A |∇ψ|² dμ`.
    pub estimate: MCEstimate,
    /// `∫ |∇ψ| dμ` on the same draws.
    pub perimeter: MCEstimate,
    /// `9n² ∫|∇ψ| dμ`.
    pub bound: f64,
    /// `estimate / n³`.
    pub ratio_to_n3: f64,
    /// `estimate <= bound·(1 + 3·relative SE of the perimeter)`.
    pub holds: bool,
}

pub fn grad_sq_window_integral(mu: Arc<LogConcaveDensity>, count: usize, cfg: &SamplerConfig) -> Result<GradSqReport> {
    let n = mu.dim() as f64;
    let region = window_region(mu.clone())?;
    let m = mc_moments(
        &mu,
        2,
        |x, out| {
            let g = mu.grad_norm(x);
            out[0] = if region.contains(x) { g * g } else { 0.0 };
            out[1] = g;
        },
        count,
        cfg,
    )?;
    let estimate = m.estimate(0, cfg.seed);
    let perimeter = m.estimate(1, cfg.seed);
    let bound = 9.0 * n * n * perimeter.value;
    let rel = perimeter.std_error / perimeter.value;
    Ok(GradSqReport {
        holds: estimate.value <= bound * (1.0 + 3.0 * rel),
        ratio_to_n3: estimate.value / (n * n * n),
        estimate,
        perimeter,
        bound,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MarkovReport {
    pub threshold: f64,
    /// Present when the threshold was derived as twice the measured perimeter.
    pub perimeter: Option<MCEstimate>,
    pub mass: MCEstimate,
    /// `mass >= 1/2 − 3·SE`; only guaranteed for the derived threshold.
    pub mass_ok: bool,
    pub convexity: ConvexityVerdict,
    #[serde(skip)]
    pub region: Option<RegionOracle>,
}

/// `A₀ = {|∇ψ| <= threshold}`; with no explicit threshold, twice the measured `∫|∇ψ| dμ`.
pub fn markov_set(
    mu: Arc<LogConcaveDensity>,
    threshold: Option<f64>,
    count: usize,
    cfg: &SamplerConfig,
    trials: usize,
) -> Result<MarkovReport> {
    let (threshold, perimeter) = match threshold {
        Some(t) => (t, None),
        None => {
            let p = mc_integral(&mu, |x| mu.grad_norm(x), count, cfg)?;
            (2.0 * p.value, Some(p))
        }
    };
    let region = RegionOracle::new(RegionKind::GradientSublevel { mu: mu.clone(), bound: threshold })?;
    let pts = sample(&mu, count.min(50_000), &cfg.with_seed(cfg.seed ^ 0x6d61_726b))?;
    let mut bbox = vec![1e-9f64; mu.dim()];
    for x in pts.iter().filter(|x| region.contains(x)) {
        for (b, v) in bbox.iter_mut().zip(x.iter()) {
            *b = b.max(v.abs());
        }
    }
    let mass = mc_integral(&mu, |x| if region.contains(x) { 1.0 } else { 0.0 }, count, cfg)?;
    let convexity = is_convex_region(&region, &bbox, trials, cfg.seed);
    Ok(MarkovReport { threshold, perimeter, mass_ok: mass.value >= 0.5 - 3.0 * mass.std_error, mass, convexity, region: Some(region) })
}

/// Convexity probe of `R_t(μ)` inside its star bounding box.
pub fn level_set_convexity(mu: Arc<LogConcaveDensity>, t: f64, trials: usize, seed: u64) -> Result<ConvexityVerdict> {
    let region = level_set(mu, t)?;
    let bbox = star_bounding_box(&region, 64, seed, 1e6);
    Ok(is_convex_region(&region, &bbox, trials, seed))
}

/// `(ln(A/f(0)) + t)/B` for decay constants `f <= A e^{−B|x|}`: every point of `R_t(μ)` has norm at most this.
pub fn level_set_radius_bound(mu: &LogConcaveDensity, t: f64, a: f64, b: f64) -> f64 {
    ((a / mu.f0()).ln() + t) / b
}

/// Largest sampled norm among points of `R_t(μ)`.
pub fn max_member_norm(mu: &LogConcaveDensity, region: &RegionOracle, count: usize, cfg: &SamplerConfig) -> Result<f64> {
    Ok(sample(mu, count, cfg)?.iter().filter(|x| region.contains(x)).map(|x| norm(x)).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::exponential_decay_fit;

    fn arc(mu: LogConcaveDensity) -> Arc<LogConcaveDensity> {
        Arc::new(mu)
    }

    #[test]
    fn norm_exponential_level_set_is_scaled_body() {
        let body = ConvexBody::cube(3, 0.7).unwrap();
        let mu = arc(LogConcaveDensity::norm_exponential(body.clone()).unwrap());
        let t = 2.5;
        let r = level_set(mu.clone(), t).unwrap();
        let mut rng = block_rng(1, 0, 0);
        use rand::Rng as _;
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            assert_eq!(r.contains(&x), body.gauge(&x) <= t);
        }
        assert!(r.claimed_convex());
    }

    #[test]
    fn gaussian_level_set_is_ball() {
        let mu = arc(LogConcaveDensity::gaussian(2));
        let r = level_set(mu, 2.0).unwrap();
        assert!(r.contains(&[1.99, 0.0]));
        assert!(!r.contains(&[2.01, 0.0]));
        assert!((radial_extent(&r, &[0.6, 0.8], 1e6) - 2.0).abs() < 1e-12);
        let zero = level_set(arc(LogConcaveDensity::gaussian(2)), 0.0).unwrap();
        assert!(zero.contains(&[0.0, 0.0]) && !zero.contains(&[1e-6, 0.0]));
    }

    #[test]
    fn non_even_measures_are_rejected() {
        let mu = arc(LogConcaveDensity::product_centered_exp(2));
        assert!(matches!(level_set(mu, 1.0), Err(LcError::NotCentered(_))));
        assert!(level_set(arc(LogConcaveDensity::gaussian(1)), -1.0).is_err());
    }

    #[test]
    fn mass_bounds() {
        let mu = arc(LogConcaveDensity::gaussian(2));
        let r = mass_bound_check(mu, 6.0, 200_000, &SamplerConfig::exact(3)).unwrap();
        let exact = 1.0 - (-6.0f64).exp();
        assert!((r.exact_mass.unwrap() - exact).abs() < 1e-12);
        assert!((exact - 0.997_521).abs() < 1e-6);
        assert!(r.mass.within(exact, 4.0));
        assert!(r.headline_applies && r.holds);
        let mu = arc(LogConcaveDensity::isotropic_cube_exp(3));
        let r = mass_bound_check(mu, 4.0, 200_000, &SamplerConfig::exact(4)).unwrap();
        assert!(r.mass.within(gamma_p(3.0, 4.0), 4.0), "{r:?}");
    }

    #[test]
    fn nesting_and_boundedness() {
        let mu = arc(LogConcaveDensity::isotropic_hyperbolic(3));
        let small = level_set(mu.clone(), 2.0).unwrap();
        let big = level_set(mu.clone(), 5.0).unwrap();
        let pts = sample(&mu, 5000, &SamplerConfig::exact(8)).unwrap();
        let members: Vec<_> = pts.iter().filter(|x| small.contains(x)).collect();
        assert!(members.len() > 100);
        assert!(members.iter().all(|x| big.contains(x)));
        let fit = exponential_decay_fit(&mu, 200, 1);
        let bound = level_set_radius_bound(&mu, 5.0, fit.a, fit.b);
        assert!(max_member_norm(&mu, &big, 20_000, &SamplerConfig::exact(2)).unwrap() <= bound);
    }

    #[test]
    fn ball_containment() {
        let r = ball_containment_check(arc(LogConcaveDensity::gaussian(10)), 30.0, 500, 1).unwrap();
        assert!((r.max_potential_gap - 1.0 / 18.0).abs() < 1e-12);
        assert!(r.holds && !r.outside_hypothesis);
        let r = ball_containment_check(arc(LogConcaveDensity::isotropic_cube_exp(10)), 30.0, 500, 1).unwrap();
        assert!(r.holds && r.min_boundary_radius >= 1.0 / 3.0);
        let r = ball_containment_check(arc(LogConcaveDensity::gaussian(2)), 6.0, 50, 1).unwrap();
        assert!(r.outside_hypothesis);
    }

    #[test]
    fn window_for_gaussian() {
        assert!(window_mass_bound(10) >= 0.33);
        let r = gradient_window(arc(LogConcaveDensity::gaussian(10)), 50_000, &SamplerConfig::exact(5)).unwrap();
        assert!(r.max_gradient <= 0.9 * 60f64.sqrt() + 1e-9);
        assert!(r.gradient_ok && r.mass_ok);
        let g = grad_sq_window_integral(arc(LogConcaveDensity::gaussian(10)), 50_000, &SamplerConfig::exact(6)).unwrap();
        assert!(g.estimate.value <= 10.0 + 3.0 * g.estimate.std_error && g.holds);
    }

    #[test]
    fn markov_set_for_hyperbolic_product_is_not_convex() {
        let mu = arc(LogConcaveDensity::product_hyperbolic(2, 1.0).unwrap());
        let r = markov_set(mu, Some(1.0), 20_000, &SamplerConfig::exact(7), 10_000).unwrap();
        let region = r.region.as_ref().unwrap();
        assert!(region.contains(&[5.0, 0.19]) && !region.contains(&[1.1, 1.0]));
        match r.convexity {
            ConvexityVerdict::NonConvexWitness { x, y, midpoint } => {
                assert!(region.contains(&x) && region.contains(&y) && !region.contains(&midpoint));
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn markov_set_for_gaussian_is_a_ball() {
        let r = markov_set(arc(LogConcaveDensity::gaussian(2)), None, 50_000, &SamplerConfig::exact(8), 5000).unwrap();
        assert!(matches!(r.convexity, ConvexityVerdict::ConvexWitnessed { .. }));
        assert!(r.mass_ok);
        // threshold 2·E|x| = √(2π) for the 2D Gaussian
        assert!((r.threshold - (2.0 * std::f64::consts::PI).sqrt()).abs() < 0.05);
        let exact_mass = 1.0 - (-r.threshold * r.threshold / 2.0).exp();
        assert!(r.mass.within(exact_mass, 4.0) || (r.mass.value - exact_mass).abs() < 0.01);
    }

    #[test]
    fn level_sets_are_convex() {
        for mu in [LogConcaveDensity::gaussian(2), LogConcaveDensity::isotropic_cube_exp(2), LogConcaveDensity::isotropic_hyperbolic(2)] {
            let v = level_set_convexity(arc(mu), 3.0, 10_000, 3).unwrap();
            assert!(matches!(v, ConvexityVerdict::ConvexWitnessed { pairs: 10_000 }), "{v:?}");
        }
    }

    #[test]
    fn combinators() {
        let mu = arc(LogConcaveDensity::gaussian(2));
        let a = level_set(mu.clone(), 2.0).unwrap();
        let b = RegionOracle::new(RegionKind::ExplicitBody(ConvexBody::cube(2, 1.0).unwrap())).unwrap();
        let both = a.clone().intersect(b).unwrap();
        assert!(both.claimed_convex());
        assert!(both.contains(&[0.9, 0.9]) && !both.contains(&[1.5, 0.0]));
        let out = a.complement();
        assert!(!out.claimed_convex() && out.contains(&[3.0, 0.0]));
        assert!(out.describe().starts_with("Complement(LevelSet"));
    }
}
