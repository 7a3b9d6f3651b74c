//! First variations of `∫ f ⋆ (t·g)` at `t = 0`, entropy, and the chain of
//! inequalities relating entropy to the functional perimeter.

use std::cell::RefCell;

use rand::Rng as _;
use serde::Serialize;

use super::moreau::minimize_convex_1d;
use crate::densities::LogConcaveDensity;
use crate::error::{LcError, Result};
use crate::estimate::{block_rng, MCEstimate};
use crate::quad::{integrate, integrate_to_inf};
use crate::sampler::{grid_integral, mc_moments, SamplerConfig};

const QUAD_ABS: f64 = 1e-13;
const QUAD_REL: f64 = 1e-12;

/// Finite-difference quotients and their order-1 Richardson extrapolations.
#[derive(Debug, Clone, Serialize)]
pub struct Variation {
    pub value: f64,
    pub error_estimate: f64,
    pub ts: Vec<f64>,
    pub quotients: Vec<f64>,
    pub extrapolated: Vec<f64>,
}

/// `t_k = 2^{−k}` for `k = 3..=10`.
pub fn default_ts() -> Vec<f64> {
    (3..=10).map(|k| 0.5f64.powi(k)).collect()
}

fn domain_edge<F: Fn(f64) -> f64>(psi: &F, sign: f64) -> f64 {
    let mut inside = 0.0;
    let mut s = 1.0;
    while psi(sign * s).is_finite() {
        inside = s;
        s *= 2.0;
        if s > 1024.0 {
            return sign * f64::INFINITY;
        }
    }
    let mut outside = s;
    for _ in 0..200 {
        if outside - inside <= 1e-15 * outside {
            break;
        }
        let mid = 0.5 * (inside + outside);
        if psi(sign * mid).is_finite() {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    sign * inside
}

/// Closed interval where a one-dimensional convex potential is finite; `ψ(0)` must be finite.
fn domain<F: Fn(f64) -> f64>(psi: &F) -> Result<(f64, f64)> {
    if !psi(0.0).is_finite() {
        return Err(LcError::InvalidParameter("potential must be finite at the origin".into()));
    }
    Ok((domain_edge(psi, -1.0), domain_edge(psi, 1.0)))
}

struct Convolver<'a, F, G> {
    psi_f: &'a F,
    psi_g: &'a G,
    dom_f: (f64, f64),
    dom_g: (f64, f64),
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> Convolver<'_, F, G> {
    /// `min_y ψ_f(y) + t ψ_g((x − y)/t)`, the potential of `f ⋆ (t·g)` at `x`.
    fn potential(&self, x: f64, t: f64) -> Result<f64> {
        let lo = self.dom_f.0.max(x - t * self.dom_g.1);
        let hi = self.dom_f.1.min(x - t * self.dom_g.0);
        if lo > hi {
            return Ok(f64::INFINITY);
        }
        let start = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo + 1.0,
            (false, true) => hi - 1.0,
            (false, false) => x / (1.0 + t),
        };
        let obj = |y: f64| {
            if y < lo || y > hi {
                return f64::INFINITY;
            }
            let a = (self.psi_f)(y);
            let b = (self.psi_g)((x - y) / t);
            if a.is_finite() && b.is_finite() {
                a + t * b
            } else {
                f64::INFINITY
            }
        };
        Ok(minimize_convex_1d(obj, start, lo, hi, 1.0, 1e-14)?.value)
    }

    fn integral(&self, t: f64) -> Result<f64> {
        let a = self.dom_f.0 + t * self.dom_g.0;
        let b = self.dom_f.1 + t * self.dom_g.1;
        let failure = RefCell::new(None);
        let dens = |x: f64| match self.potential(x, t) {
            Ok(v) => (-v).exp(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        let total = integrate_line(&dens, a, b)?;
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(total),
        }
    }
}

/// `∫_a^b f`, either end possibly infinite, split at the origin.
fn integrate_line<D: Fn(f64) -> f64>(f: &D, a: f64, b: f64) -> Result<f64> {
    let mid = 0.0f64.max(a).min(b);
    let left = if a.is_finite() {
        integrate(f, a, mid, QUAD_ABS, QUAD_REL)?
    } else {
        integrate_to_inf(|u| f(-u), -mid, QUAD_ABS, QUAD_REL)?
    };
    let right = if b.is_finite() {
        integrate(f, mid, b, QUAD_ABS, QUAD_REL)?
    } else {
        integrate_to_inf(f, mid, QUAD_ABS, QUAD_REL)?
    };
    Ok(left + right)
}

fn richardson(ts: &[f64], quotients: Vec<f64>) -> Result<Variation> {
    let extrapolated: Vec<f64> = ts
        .windows(2)
        .zip(quotients.windows(2))
        .map(|(t, d)| {
            let r = t[0] / t[1];
            (r * d[1] - d[0]) / (r - 1.0)
        })
        .collect();
    let value = *extrapolated.last().expect("at least two steps");
    let diffs: Vec<f64> = extrapolated.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let error_estimate = diffs.last().copied().unwrap_or(f64::NAN);
    if diffs.len() >= 2 {
        let prev = diffs[diffs.len() - 2];
        if error_estimate > prev && error_estimate > 1e-3 * (1.0 + value.abs()) {
            return Err(LcError::NoConvergence(format!("extrapolated variations diverge: {extrapolated:?}")));
        }
    }
    Ok(Variation { value, error_estimate, ts: ts.to_vec(), quotients, extrapolated })
}

fn check_ts(ts: &[f64]) -> Result<()> {
    if ts.len() < 2 || ts.iter().any(|t| !(*t > 0.0)) || ts.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(LcError::InvalidParameter("t sequence must be positive, strictly decreasing, length >= 2".into()));
    }
    Ok(())
}

/// `δ(f, g) = lim_{t→0} (∫ f ⋆ (t·g) − ∫ f)/t` for one-dimensional log-concave
/// `f = e^{−ψ_f}`, `g = e^{−ψ_g}` given by their potentials (finite at 0).
///
/// The Asplund product is evaluated exactly by a convex line search at every
/// quadrature node, so the only discretisation error is the `O(t)` bias removed
/// by Richardson extrapolation.
pub fn first_variation<F, G>(psi_f: F, psi_g: G, ts: &[f64]) -> Result<Variation>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    check_ts(ts)?;
    let conv = Convolver { psi_f: &psi_f, psi_g: &psi_g, dom_f: domain(&psi_f)?, dom_g: domain(&psi_g)? };
    let base = integrate_line(&|x: f64| (-psi_f(x)).exp(), conv.dom_f.0, conv.dom_f.1)?;
    if !(base > 0.0) || !base.is_finite() {
        return Err(LcError::InvalidParameter(format!("∫f must be finite and positive, got {base}")));
    }
    let quotients = ts.iter().map(|&t| Ok((conv.integral(t)? - base) / t)).collect::<Result<Vec<_>>>()?;
    richardson(ts, quotients)
}

/// `lim_{t→0} ((f ⋆ (t·g))(z) − f(z))/t` at a single point.
pub fn pointwise_variation<F, G>(psi_f: F, psi_g: G, z: f64, ts: &[f64]) -> Result<Variation>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    check_ts(ts)?;
    let fz = (-psi_f(z)).exp();
    let conv = Convolver { psi_f: &psi_f, psi_g: &psi_g, dom_f: domain(&psi_f)?, dom_g: domain(&psi_g)? };
    let quotients = ts.iter().map(|&t| Ok(((-conv.potential(z, t)?).exp() - fz) / t)).collect::<Result<Vec<_>>>()?;
    richardson(ts, quotients)
}

/// How to compute `∫ f ln f`.
#[derive(Debug, Clone)]
pub enum EntropyMethod {
    MonteCarlo { count: usize, config: SamplerConfig },
    /// Midpoint rule on `∏[−w_i, w_i]` (`n <= 3`).
    Quadrature { half_widths: Vec<f64>, resolution: usize },
}

/// `∫ f ln f = −E_μ ψ`.
pub fn entropy(mu: &LogConcaveDensity, method: &EntropyMethod) -> Result<MCEstimate> {
    match method {
        EntropyMethod::MonteCarlo { count, config } => {
            let m = mc_moments(mu, 1, |x, out| out[0] = -mu.psi(x), *count, config)?;
            Ok(m.estimate(0, config.seed))
        }
        EntropyMethod::Quadrature { half_widths, resolution } => {
            if half_widths.len() != mu.dim() {
                return Err(LcError::DimensionMismatch { expected: mu.dim(), got: half_widths.len() });
            }
            let v = grid_integral(
                |x| {
                    let p = mu.psi(x);
                    if p.is_finite() {
                        -p * (-p).exp()
                    } else {
                        0.0
                    }
                },
                half_widths,
                *resolution,
            )?;
            Ok(MCEstimate::exact(v))
        }
    }
}

/// The inequality `(1/3)∫|∇f| + ln(e^{−3n} f(0)) <= n + ∫ f ln f`.
#[derive(Debug, Clone, Serialize)]
pub struct MainChainReport {
    pub gradient_integral: MCEstimate,
    pub entropy: MCEstimate,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`, estimated on shared draws.
    pub slack: MCEstimate,
    /// Sampled check of `e^{−3n} f(0) 1_{B/3} <= f`.
    pub precondition_holds: bool,
    /// `slack >= −3·SE`.
    pub holds: bool,
}

pub fn main_inequality_chain(mu: &LogConcaveDensity, count: usize, cfg: &SamplerConfig) -> Result<MainChainReport> {
    let n = mu.dim();
    let nf = n as f64;
    let psi0 = mu.psi0();
    let mut rng = block_rng(cfg.seed, 0x6d61_696e, 0);
    let precondition_holds = (0..2000).all(|_| {
        let u = crate::bodies::unit_direction(&mut rng, n);
        let r = rng.random::<f64>().powf(1.0 / nf) / 3.0;
        let x: Vec<f64> = u.iter().map(|v| v * r).collect();
        mu.psi(&x) <= psi0 + 3.0 * nf
    });
    let m = mc_moments(
        mu,
        3,
        |x, out| {
            let g = mu.grad_norm(x);
            let p = mu.psi(x);
            out[0] = g;
            out[1] = -p;
            out[2] = -p - g / 3.0;
        },
        count,
        cfg,
    )?;
    let gradient_integral = m.estimate(0, cfg.seed);
    let entropy = m.estimate(1, cfg.seed);
    let lhs = gradient_integral.value / 3.0 - 3.0 * nf - psi0;
    let rhs = nf + entropy.value;
    let core = m.estimate(2, cfg.seed);
    let slack = MCEstimate { value: core.value + 4.0 * nf + psi0, ..core };
    let holds = slack.value >= -3.0 * slack.std_error;
    Ok(MainChainReport { gradient_integral, entropy, lhs, rhs, slack, precondition_holds, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn gauss(x: f64) -> f64 {
        0.5 * x * x + 0.5 * (2.0 * PI).ln()
    }

    #[test]
    fn gaussian_self_variation() {
        let v = first_variation(gauss, gauss, &default_ts()).unwrap();
        let exact = 1.0 - 0.5 * (2.0 * PI * E).ln();
        assert!((v.value - exact).abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn interval_indicator_variation_is_two() {
        let ind = |x: f64| if x.abs() <= 1.0 { 0.0 } else { f64::INFINITY };
        let v = first_variation(ind, ind, &default_ts()).unwrap();
        assert!((v.value - 2.0).abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn scaled_ball_indicator_gives_perimeter_plus_log_mass() {
        let (a, r) = (1.7f64, 0.6);
        let g = move |x: f64| if x.abs() <= r { -a.ln() } else { f64::INFINITY };
        let v = first_variation(gauss, g, &default_ts()).unwrap();
        let exact = r * 2.0 / (2.0 * PI).sqrt() + a.ln();
        assert!((v.value - exact).abs() < 1e-6, "{v:?} vs {exact}");
        let z = 0.8;
        let p = pointwise_variation(gauss, g, z, &default_ts()).unwrap();
        let fz = (-gauss(z)).exp();
        let exact = r * z * fz + fz * a.ln();
        assert!((p.value - exact).abs() < 1e-6, "{p:?} vs {exact}");
    }

    #[test]
    fn bad_sequences_are_rejected() {
        assert!(first_variation(gauss, gauss, &[0.1]).is_err());
        assert!(first_variation(gauss, gauss, &[0.1, 0.2]).is_err());
        let off = |x: f64| if x > 1.0 { x } else { f64::INFINITY };
        assert!(first_variation(off, gauss, &default_ts()).is_err());
    }

    #[test]
    fn gaussian_entropy_both_ways() {
        let g = LogConcaveDensity::gaussian(2);
        let exact = -(2.0 * PI * E).ln();
        let q = entropy(&g, &EntropyMethod::Quadrature { half_widths: vec![9.0, 9.0], resolution: 600 }).unwrap();
        assert!((q.value - exact).abs() < 1e-6);
        let mc = entropy(&g, &EntropyMethod::MonteCarlo { count: 200_000, config: SamplerConfig::exact(5) }).unwrap();
        assert!(mc.within(exact, 4.0), "{mc:?}");
    }

    #[test]
    fn main_chain_holds_for_gaussian() {
        let g = LogConcaveDensity::gaussian(3);
        let r = main_inequality_chain(&g, 50_000, &SamplerConfig::exact(9)).unwrap();
        assert!(r.precondition_holds && r.holds, "{r:?}");
        assert!((r.rhs - r.lhs - r.slack.value).abs() < 1e-9);
    }
}
