//! Exact and Markov-chain sampling from the density families, seeded Monte
//! Carlo integration and low-dimensional tensor quadrature.

use rand::Rng as _;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::unit_direction;
use crate::densities::{Family, LogConcaveDensity, RadialProfile};
use crate::error::{LcError, Result};
use crate::estimate::{block_rng, merge_all, run_blocks, MCEstimate, Moments, Rng, DEFAULT_BLOCK};
use crate::special::{gamma_p, gamma_p_inv};

const STREAM_EXACT: u64 = 0x6578_6163;
const STREAM_CHAIN: u64 = 0x6368_6169;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Independent draws from the family's closed-form representation.
    Exact,
    /// Coordinate hit-and-run with exact slice updates along each axis.
    HitAndRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub method: Method,
    /// Chain steps discarded before recording; `None` means `1000·n`.
    pub burn_in: Option<usize>,
    /// Steps between recorded states; `None` means `n`.
    pub thinning: Option<usize>,
    pub seed: u64,
    pub chains: usize,
}

impl SamplerConfig {
    pub fn exact(seed: u64) -> Self {
        SamplerConfig { method: Method::Exact, burn_in: None, thinning: None, seed, chains: 1 }
    }

    pub fn hit_and_run(seed: u64, chains: usize) -> Self {
        SamplerConfig { method: Method::HitAndRun, burn_in: None, thinning: None, seed, chains: chains.max(1) }
    }

    /// Exact if the family supports it, otherwise hit-and-run with 8 chains.
    pub fn auto(mu: &LogConcaveDensity, seed: u64) -> Self {
        if has_exact_sampler(mu) {
            Self::exact(seed)
        } else {
            Self::hit_and_run(seed, 8)
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SamplerConfig { seed, ..self.clone() }
    }
}

pub fn has_exact_sampler(mu: &LogConcaveDensity) -> bool {
    match mu.family() {
        Family::Radial { profile: RadialProfile::Custom { .. }, .. } => false,
        Family::AffinePushforward { base, .. } => has_exact_sampler(base),
        Family::Truncation(t) => t.norm_ball.is_some() || has_exact_sampler(&t.base),
        _ => true,
    }
}

fn gamma_draw(rng: &mut Rng, shape: f64) -> Result<f64> {
    let g = Gamma::new(shape, 1.0).map_err(|e| LcError::InvalidParameter(e.to_string()))?;
    Ok(g.sample(rng))
}

fn random_sign(rng: &mut Rng) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// One exact draw.
pub fn draw_exact(mu: &LogConcaveDensity, rng: &mut Rng) -> Result<Vec<f64>> {
    let n = mu.dim();
    match mu.family() {
        Family::Gaussian { variance } => {
            let s = variance.sqrt();
            Ok((0..n).map(|_| { let z: f64 = StandardNormal.sample(rng); s * z }).collect())
        }
        Family::NormExponential { body, .. } => {
            // R·U with R ~ Gamma(n+1), U uniform on K
            let r = gamma_draw(rng, n as f64 + 1.0)?;
            Ok(body.sample_uniform(rng)?.into_iter().map(|v| v * r).collect())
        }
        Family::Radial { profile: RadialProfile::Power { p, scale }, .. } => {
            let r = scale * gamma_draw(rng, n as f64 / p)?.powf(1.0 / p);
            Ok(unit_direction(rng, n).into_iter().map(|v| v * r).collect())
        }
        Family::Radial { .. } => Err(LcError::UnsupportedVariant("exact sampling of a custom radial profile".into())),
        Family::ProductPExp { p, c, .. } => {
            let g = Gamma::new(1.0 / p, 1.0).map_err(|e| LcError::InvalidParameter(e.to_string()))?;
            Ok((0..n).map(|_| random_sign(rng) * (g.sample(rng) / c).powf(1.0 / p)).collect())
        }
        Family::ProductHyperbolic { a, .. } => {
            // Laplace proposal; acceptance e^{|y| − √(y²+1)} averages K₁(1) ≈ 0.60
            let mut x = Vec::with_capacity(n);
            while x.len() < n {
                let e: f64 = Exp1.sample(rng);
                let u: f64 = rng.random();
                if u.ln() <= e - (e * e + 1.0).sqrt() {
                    x.push(random_sign(rng) * e / a);
                }
            }
            Ok(x)
        }
        Family::ProductCenteredExp => Ok((0..n).map(|_| { let e: f64 = Exp1.sample(rng); e - 1.0 }).collect()),
        Family::Uniform { body, .. } => body.sample_uniform(rng),
        Family::AffinePushforward { base, map } => Ok(map.apply(&draw_exact(base, rng)?)),
        Family::Truncation(t) => {
            if let (Some(level), Family::NormExponential { body, .. }) = (t.norm_ball, t.base.family()) {
                // ‖X‖ ~ Gamma(n) restricted to [0, t], independent of the cone-measure direction
                let nf = n as f64;
                let s = gamma_p_inv(nf, rng.random::<f64>() * gamma_p(nf, level)).min(level);
                let u = body.sample_uniform(rng)?;
                let g = body.gauge(&u);
                return Ok(u.into_iter().map(|v| v * s / g).collect());
            }
            for _ in 0..1_000_000 {
                let x = draw_exact(&t.base, rng)?;
                if t.region.contains(&x) {
                    return Ok(x);
                }
            }
            Err(LcError::RejectionStall { rate: 0.0 })
        }
    }
}

fn start_point(mu: &LogConcaveDensity) -> Result<Vec<f64>> {
    let x = match mu.family() {
        Family::AffinePushforward { base, map } => map.apply(&start_point(base)?),
        _ => vec![0.0; mu.dim()],
    };
    if mu.in_support(&x) {
        Ok(x)
    } else {
        Err(LcError::InvalidParameter("no interior starting point for the chain".into()))
    }
}

/// A coordinate hit-and-run chain: each step refreshes one coordinate by an
/// exact slice draw on the (convex) level interval of the line potential.
pub struct HitAndRun<'a> {
    mu: &'a LogConcaveDensity,
    x: Vec<f64>,
    psi: f64,
    coord: usize,
}

impl<'a> HitAndRun<'a> {
    pub fn new(mu: &'a LogConcaveDensity) -> Result<Self> {
        let x = start_point(mu)?;
        let psi = mu.psi(&x);
        Ok(HitAndRun { mu, x, psi, coord: 0 })
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }

    fn endpoint(&mut self, i: usize, level: f64, dir: f64) -> f64 {
        let x0 = self.x[i];
        let eval = |s: f64, x: &mut Vec<f64>| {
            x[i] = x0 + dir * s;
            let v = self.mu.psi(x);
            x[i] = x0;
            v
        };
        let mut x = self.x.clone();
        let (mut lo, mut hi) = (0.0, 1.0);
        while eval(hi, &mut x) <= level {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                return hi;
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if eval(mid, &mut x) <= level {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi.max(1.0) {
                break;
            }
        }
        lo
    }

    pub fn step(&mut self, rng: &mut Rng) {
        let i = self.coord;
        self.coord = (self.coord + 1) % self.x.len();
        let e: f64 = Exp1.sample(rng);
        let level = self.psi + e;
        let right = self.endpoint(i, level, 1.0);
        let left = self.endpoint(i, level, -1.0);
        let s = rng.random_range(-left..=right);
        self.x[i] += s;
        self.psi = self.mu.psi(&self.x);
        if !self.psi.is_finite() {
            self.x[i] -= s;
            self.psi = self.mu.psi(&self.x);
        }
    }
}

fn chain_counts(count: usize, chains: usize) -> Vec<usize> {
    let per = count.div_ceil(chains);
    (0..chains).map(|c| per.min(count.saturating_sub(c * per))).collect()
}

/// Drives every sampling path: `visit(rng-independent point, accumulator)`
/// is applied to each draw; accumulators are merged in block/chain order.
fn drive<A, New, Visit>(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig, new: New, visit: Visit) -> Result<Vec<A>>
where
    A: Send,
    New: Fn() -> A + Sync,
    Visit: Fn(&mut A, &[f64]) -> Result<()> + Sync,
{
    match cfg.method {
        Method::Exact => run_blocks(count, DEFAULT_BLOCK, cfg.seed, STREAM_EXACT, |rng, c, _| {
            let mut acc = new();
            for _ in 0..c {
                let x = draw_exact(mu, rng)?;
                visit(&mut acc, &x)?;
            }
            Ok(acc)
        })
        .into_iter()
        .collect(),
        Method::HitAndRun => {
            let n = mu.dim();
            let burn = cfg.burn_in.unwrap_or(1000 * n);
            let thin = cfg.thinning.unwrap_or(n).max(1);
            chain_counts(count, cfg.chains.max(1))
                .into_par_iter()
                .enumerate()
                .map(|(c, k)| {
                    let mut rng = block_rng(cfg.seed, STREAM_CHAIN, c as u64);
                    let mut chain = HitAndRun::new(mu)?;
                    for _ in 0..burn {
                        chain.step(&mut rng);
                    }
                    let mut acc = new();
                    for _ in 0..k {
                        for _ in 0..thin {
                            chain.step(&mut rng);
                        }
                        visit(&mut acc, chain.state())?;
                    }
                    Ok(acc)
                })
                .collect()
        }
    }
}

/// `count` draws from `μ`, bit-reproducible for a given configuration.
pub fn sample(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig) -> Result<Vec<Vec<f64>>> {
    let parts = drive(mu, count, cfg, Vec::new, |acc: &mut Vec<Vec<f64>>, x| {
        acc.push(x.to_vec());
        Ok(())
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// Joint moments of `k` observables evaluated on the same draws.
pub fn mc_moments<F>(mu: &LogConcaveDensity, k: usize, observable: F, count: usize, cfg: &SamplerConfig) -> Result<Moments>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let parts = drive(
        mu,
        count,
        cfg,
        || (Moments::new(k), vec![0.0; k]),
        |acc: &mut (Moments, Vec<f64>), x| {
            observable(x, &mut acc.1);
            if let Some(v) = acc.1.iter().find(|v| !v.is_finite()) {
                return Err(LcError::NonFiniteObservable { value: *v, point: x.to_vec() });
            }
            let (m, buf) = acc;
            m.push(buf);
            Ok(())
        },
    )?;
    Ok(merge_all(parts.into_iter().map(|p| p.0), k))
}

/// `∫ φ dμ` with standard error `sd/√N`.
pub fn mc_integral<F>(mu: &LogConcaveDensity, observable: F, count: usize, cfg: &SamplerConfig) -> Result<MCEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let m = mc_moments(mu, 1, |x, out| out[0] = observable(x), count, cfg)?;
    Ok(m.estimate(0, cfg.seed))
}

/// Tensor-product midpoint rule on `∏[−w_i, w_i]` with `resolution` cells per axis (`n <= 3`).
pub fn grid_integral<F>(f: F, half_widths: &[f64], resolution: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = half_widths.len();
    if n > 3 {
        return Err(LcError::DimensionTooLarge { what: "grid quadrature", max: 3, n });
    }
    if n == 0 || resolution == 0 {
        return Err(LcError::InvalidParameter("grid needs a positive dimension and resolution".into()));
    }
    let steps: Vec<f64> = half_widths.iter().map(|w| 2.0 * w / resolution as f64).collect();
    let coord = |axis: usize, i: usize| -half_widths[axis] + (i as f64 + 0.5) * steps[axis];
    let cell: f64 = steps.iter().product();
    let rows: Vec<f64> = (0..resolution)
        .into_par_iter()
        .map(|i| {
            let mut x = vec![0.0; n];
            x[0] = coord(0, i);
            let mut s = 0.0;
            match n {
                1 => s += f(&x),
                2 => {
                    for j in 0..resolution {
                        x[1] = coord(1, j);
                        s += f(&x);
                    }
                }
                _ => {
                    for j in 0..resolution {
                        x[1] = coord(1, j);
                        for k in 0..resolution {
                            x[2] = coord(2, k);
                            s += f(&x);
                        }
                    }
                }
            }
            s
        })
        .collect();
    Ok(rows.iter().sum::<f64>() * cell)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerimeterReport {
    pub estimate: MCEstimate,
    /// `12n`, the explicit constant in the proof of the linear bound.
    pub proof_bound: f64,
    /// `n`, the comparison value of the linear bound.
    pub theorem_value: f64,
    /// Set when `μ` was not constructed isotropic and its sampled covariance
    /// departs from the identity.
    pub isotropy_flag: bool,
}

/// `∫|∇ψ| dμ`.
pub fn estimate_functional_perimeter(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig) -> Result<PerimeterReport> {
    let estimate = mc_integral(mu, |x| mu.grad_norm(x), count, cfg)?;
    let n = mu.dim() as f64;
    let isotropy_flag = if mu.is_isotropic() {
        false
    } else {
        let cov = crate::densities::covariance(mu, 20_000, &cfg.with_seed(cfg.seed ^ 0x5a5a))?;
        !cov.is_identity_within(5.0)
    };
    Ok(PerimeterReport { estimate, proof_bound: 12.0 * n, theorem_value: n, isotropy_flag })
}
