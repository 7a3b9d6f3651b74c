//! Co-area integrals `∫₀^∞ H^{n−1}(∂{f >= s}) ds`, exact for families with
//! homothetic or spherical level sets and by marching squares in the plane.

use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::ConvexBody;
use crate::densities::{Family, LogConcaveDensity};
use crate::error::{LcError, Result};
use crate::estimate::MCEstimate;
use crate::quad::integrate_to_inf;
use crate::sampler::grid_integral;
use crate::special::{gamma_p, ln_gamma, unit_sphere_area};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoareaMethod {
    /// Closed-form level-set areas (norm-exponential, Gaussian, radial, uniform,
    /// norm-ball truncations of norm-exponential measures).
    Exact,
    /// Marching squares on `[−a, a]²` with `resolution` nodes per axis; the
    /// computation is repeated with the step halved to report a refinement gap.
    Grid { half_width: f64, resolution: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct CoareaResult {
    pub value: MCEstimate,
    pub method: String,
    /// `|I(h) − I(h/2)|` for the grid method.
    pub refinement_gap: Option<f64>,
}

const SURFACE_SAMPLES: usize = 1_000_000;

fn surface_of(body: &ConvexBody<f64>, seed: u64) -> MCEstimate {
    body.surface(SURFACE_SAMPLES, seed)
}

/// `∫₀^∞ nω_n r^{n−1} g'(r) e^{−g(r) − c} dr` for a radial density `e^{−g(|x|) − c}`.
fn radial_coarea(n: usize, g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64, c: f64) -> Result<f64> {
    let area = unit_sphere_area(n);
    let v = integrate_to_inf(|r| r.powi(n as i32 - 1) * dg(r) * (-g(r) - c).exp(), 0.0, 1e-14, 1e-12)?;
    Ok(area * v)
}

pub fn coarea_integral(mu: &LogConcaveDensity, method: CoareaMethod, seed: u64) -> Result<CoareaResult> {
    match method {
        CoareaMethod::Exact => exact_coarea(mu, seed),
        CoareaMethod::Grid { half_width, resolution } => {
            if mu.dim() != 2 {
                return Err(LcError::DimensionTooLarge { what: "marching-squares co-area", max: 2, n: mu.dim() });
            }
            let f = |x: &[f64]| mu.density(x);
            let in_support = |x: &[f64]| mu.in_support(x);
            let support: Option<&(dyn Fn(&[f64]) -> bool + Sync)> = if mu.essentially_continuous() { None } else { Some(&in_support) };
            let coarse = grid_coarea(&f, half_width, resolution, mu.sup_norm(), support)?;
            let fine = grid_coarea(&f, half_width, 2 * resolution - 1, mu.sup_norm(), support)?;
            Ok(CoareaResult { value: MCEstimate::exact(fine), method: "grid".into(), refinement_gap: Some((fine - coarse).abs()) })
        }
    }
}

fn exact_coarea(mu: &LogConcaveDensity, seed: u64) -> Result<CoareaResult> {
    let n = mu.dim();
    let nf = n as f64;
    let value = match mu.family() {
        Family::NormExponential { body, .. } => surface_of(body, seed).scaled(mu.f0() * ln_gamma(nf).exp()),
        Family::Gaussian { variance } => {
            let v = *variance;
            let c = 0.5 * nf * (2.0 * std::f64::consts::PI * v).ln();
            MCEstimate::exact(radial_coarea(n, |r| r * r / (2.0 * v), |r| r / v, c)?)
        }
        Family::Radial { profile, ln_norm } => MCEstimate::exact(radial_coarea(n, |r| profile.g(r), |r| profile.dg(r), *ln_norm)?),
        Family::Uniform { body, ln_vol } => surface_of(body, seed).scaled((-ln_vol).exp()),
        Family::Truncation(t) => match (t.norm_ball, t.base.family()) {
            (Some(level), Family::NormExponential { .. }) => {
                let pair = super::truncated_surface_pair(&t.base, level, seed)?;
                let s = 1.0 / t.mass.value;
                MCEstimate { value: (pair.moment_part.value + pair.boundary_part) * s, std_error: pair.moment_part.std_error * s, ..pair.moment_part }
            }
            _ => return Err(LcError::UnsupportedVariant(format!("exact co-area of {}", mu.name()))),
        },
        _ => return Err(LcError::UnsupportedVariant(format!("exact co-area of {}", mu.name()))),
    };
    Ok(CoareaResult { value, method: "exact".into(), refinement_gap: None })
}

/// Where the boundary of a support set cuts grid edges, as a fraction along
/// each edge from its lower-index node (`NaN` where it does not).
///
/// On such edges a contour of `f·1_S` crosses at the support boundary for
/// every level below the inside value, which linear interpolation of the node
/// values cannot see.
#[derive(Debug, Clone)]
pub struct JumpEdges {
    horizontal: Vec<f64>,
    vertical: Vec<f64>,
}

impl JumpEdges {
    pub fn locate(support: &(dyn Fn(&[f64]) -> bool + Sync), half_width: f64, m: usize) -> Self {
        let h = 2.0 * half_width / (m - 1) as f64;
        let node = |i: usize, j: usize| [-half_width + i as f64 * h, -half_width + j as f64 * h];
        let inside: Vec<bool> = (0..m * m).into_par_iter().map(|k| support(&node(k % m, k / m))).collect();
        let cut = |a: [f64; 2], b: [f64; 2], a_in: bool| {
            // bisection on the membership predicate, `lo` on a's side
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                let p = [a[0] + mid * (b[0] - a[0]), a[1] + mid * (b[1] - a[1])];
                if support(&p) == a_in {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let edges = |di: usize, dj: usize| -> Vec<f64> {
            (0..m * m)
                .into_par_iter()
                .map(|k| {
                    let (i, j) = (k % m, k / m);
                    if i + di >= m || j + dj >= m {
                        return f64::NAN;
                    }
                    let (a_in, b_in) = (inside[k], inside[(i + di) + m * (j + dj)]);
                    if a_in == b_in {
                        f64::NAN
                    } else {
                        cut(node(i, j), node(i + di, j + dj), a_in)
                    }
                })
                .collect()
        };
        JumpEdges { horizontal: edges(1, 0), vertical: edges(0, 1) }
    }
}

/// Total length of `{f = level}` inside the grid, by marching squares with
/// linear interpolation along cell edges. Saddle cells are resolved by the
/// cell-centre average.
pub fn contour_length(values: &[f64], m: usize, h: f64, level: f64) -> f64 {
    contour_length_with(values, m, h, level, None)
}

/// [`contour_length`] with crossings on support-boundary edges taken from `jumps`.
pub fn contour_length_with(values: &[f64], m: usize, h: f64, level: f64, jumps: Option<&JumpEdges>) -> f64 {
    let rows: Vec<f64> = (0..m - 1)
        .into_par_iter()
        .map(|j| {
            let mut total = 0.0;
            for i in 0..m - 1 {
                total += cell_length(values, m, h, level, i, j, jumps);
            }
            total
        })
        .collect();
    rows.iter().sum()
}

fn cell_length(values: &[f64], m: usize, h: f64, level: f64, i: usize, j: usize, jumps: Option<&JumpEdges>) -> f64 {
    // corners counter-clockwise: (i,j), (i+1,j), (i+1,j+1), (i,j+1)
    let v = [values[i + m * j], values[i + 1 + m * j], values[i + 1 + m * (j + 1)], values[i + m * (j + 1)]];
    let inside = v.map(|x| x >= level);
    let count = inside.iter().filter(|b| **b).count();
    if count == 0 || count == 4 {
        return 0.0;
    }
    let corner = [(0.0, 0.0), (h, 0.0), (h, h), (0.0, h)];
    // support-boundary fraction along edge e measured from corner e
    let jump = |e: usize| -> f64 {
        let Some(jp) = jumps else { return f64::NAN };
        match e {
            0 => jp.horizontal[i + m * j],
            1 => jp.vertical[i + 1 + m * j],
            2 => 1.0 - jp.horizontal[i + m * (j + 1)],
            _ => 1.0 - jp.vertical[i + m * j],
        }
    };
    // crossing on edge e between corner e and corner e+1
    let cross = |e: usize| -> (f64, f64) {
        let (a, b) = (e, (e + 1) % 4);
        let tj = jump(e);
        let t = if tj.is_nan() { (level - v[a]) / (v[b] - v[a]) } else { tj };
        (corner[a].0 + t * (corner[b].0 - corner[a].0), corner[a].1 + t * (corner[b].1 - corner[a].1))
    };
    let dist = |p: (f64, f64), q: (f64, f64)| ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
    let centre_inside = v.iter().sum::<f64>() / 4.0 >= level;
    let saddle = count == 2 && inside[0] == inside[2];
    let mut total = 0.0;
    for c in 0..4 {
        // corner c is adjacent to edges c−1 and c
        let lone = if saddle {
            inside[c] != centre_inside
        } else if count == 1 {
            inside[c]
        } else if count == 3 {
            !inside[c]
        } else {
            false
        };
        if lone {
            total += dist(cross((c + 3) % 4), cross(c));
        }
    }
    if count == 2 && !saddle {
        let edges: Vec<usize> = (0..4).filter(|&e| inside[e] != inside[(e + 1) % 4]).collect();
        total += dist(cross(edges[0]), cross(edges[1]));
    }
    total
}

/// `∫₀^{f_max} L(s) ds` with `s = f_max e^{−τ}`, `τ ∈ [0, 40]`, composite Simpson in `τ`.
/// When `f` vanishes off a set with a known membership predicate, passing it
/// as `support` places jump crossings on the set's boundary.
pub fn grid_coarea<F: Fn(&[f64]) -> f64 + Sync>(
    f: &F,
    half_width: f64,
    resolution: usize,
    f_max: f64,
    support: Option<&(dyn Fn(&[f64]) -> bool + Sync)>,
) -> Result<f64> {
    if resolution < 3 {
        return Err(LcError::InvalidParameter("grid co-area needs at least 3 nodes per axis".into()));
    }
    let m = resolution;
    let h = 2.0 * half_width / (m - 1) as f64;
    let values: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|k| f(&[-half_width + (k % m) as f64 * h, -half_width + (k / m) as f64 * h]))
        .collect();
    let jumps = support.map(|sup| JumpEdges::locate(sup, half_width, m));
    let levels = 1200;
    let tau_max = 40.0;
    let dt = tau_max / levels as f64;
    let mut total = 0.0;
    for k in 0..=levels {
        let tau = k as f64 * dt;
        let s = f_max * (-tau).exp();
        let w = if k == 0 || k == levels {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        total += w * contour_length_with(&values, m, h, s, jumps.as_ref()) * s;
    }
    Ok(total * dt / 3.0)
}

/// Sides of the generalized co-area formula for `f·1_K` in the plane.
#[derive(Debug, Clone, Serialize)]
pub struct GeneralizedCoarea {
    /// `∫₀^∞ H¹(∂{f·1_K >= s}) ds` by marching squares.
    pub coarea: f64,
    /// `∫_K |∇f| dx`.
    pub gradient_integral: f64,
    /// `∫_{∂K} f dH¹`.
    pub boundary_integral: MCEstimate,
    pub step: f64,
    /// `5·h·(gradient_integral + boundary_integral)`.
    pub tolerance: f64,
    pub holds: bool,
}

/// Checks `∫₀^∞ H¹(∂{f_K >= s}) ds = ∫|∇f_K| + ∫_{∂K} f dH¹` for `f_K = f·1_K` (or `f` itself).
pub fn generalized_coarea_check(
    base: &LogConcaveDensity,
    body: Option<&ConvexBody<f64>>,
    half_width: f64,
    resolution: usize,
    seed: u64,
) -> Result<GeneralizedCoarea> {
    if base.dim() != 2 {
        return Err(LcError::DimensionTooLarge { what: "generalized co-area check", max: 2, n: base.dim() });
    }
    let inside = |x: &[f64]| body.is_none_or(|k| k.contains(x));
    let f = |x: &[f64]| if inside(x) { base.density(x) } else { 0.0 };
    let in_support = |x: &[f64]| inside(x) && base.in_support(x);
    let coarea = grid_coarea(&f, half_width, resolution, base.sup_norm(), Some(&in_support))?;
    let gradient_integral = grid_integral(
        |x| {
            if inside(x) {
                let d = base.density(x);
                if d > 0.0 {
                    d * base.grad_norm(x)
                } else {
                    0.0
                }
            } else {
                0.0
            }
        },
        &[half_width, half_width],
        2000,
    )?;
    let boundary_integral = match body {
        Some(k) => k.boundary_integral(|x| base.density(x), SURFACE_SAMPLES, seed),
        None => MCEstimate::exact(0.0),
    };
    let step = 2.0 * half_width / (resolution - 1) as f64;
    let rhs = gradient_integral + boundary_integral.value;
    let tolerance = 5.0 * step * rhs;
    Ok(GeneralizedCoarea {
        coarea,
        gradient_integral,
        boundary_integral,
        step,
        tolerance,
        holds: (coarea - rhs).abs() <= tolerance + 3.0 * boundary_integral.std_error,
    })
}

/// `γ(n, t) = ∫₀^t s^{n−1}e^{−s} ds`.
pub fn lower_gamma(n: f64, t: f64) -> f64 {
    if t.is_infinite() {
        ln_gamma(n).exp()
    } else {
        gamma_p(n, t) * ln_gamma(n).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_contour_length() {
        let m = 401;
        let a = 2.0;
        let h = 2.0 * a / (m - 1) as f64;
        let vals: Vec<f64> = (0..m * m)
            .map(|k| {
                let (x, y) = (-a + (k % m) as f64 * h, -a + (k / m) as f64 * h);
                -(x * x + y * y).sqrt()
            })
            .collect();
        let l = contour_length(&vals, m, h, -1.0);
        assert!((l - 2.0 * std::f64::consts::PI).abs() < 1e-3, "{l}");
        let sq: Vec<f64> = (0..m * m)
            .map(|k| {
                let (x, y) = (-a + (k % m) as f64 * h, -a + (k / m) as f64 * h);
                -(x.abs().max(y.abs()))
            })
            .collect();
        let l = contour_length(&sq, m, h, -1.005);
        // each corner cell replaces two legs of 0.005 by their hypotenuse
        let clipped = 8.0 * 1.005 - 4.0 * (2.0 - 2f64.sqrt()) * 0.005;
        assert!((l - clipped).abs() < 1e-9, "{l}");
    }

    #[test]
    fn norm_exponential_coarea_is_f0_surface_gamma() {
        let mu = LogConcaveDensity::isotropic_cube_exp(3);
        let r = coarea_integral(&mu, CoareaMethod::Exact, 1).unwrap();
        let ConvexBody::Box { half_widths } = (match mu.family() {
            Family::NormExponential { body, .. } => body.clone(),
            _ => unreachable!(),
        }) else {
            unreachable!()
        };
        let w = half_widths[0];
        assert!((r.value.value - 1.0 / w).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn gaussian_coarea_matches_gradient_integral() {
        for n in 1..6 {
            let mu = LogConcaveDensity::gaussian(n);
            let r = coarea_integral(&mu, CoareaMethod::Exact, 1).unwrap();
            let exact = 2f64.sqrt() * (ln_gamma((n as f64 + 1.0) / 2.0) - ln_gamma(n as f64 / 2.0)).exp();
            assert!((r.value.value - exact).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn grid_coarea_for_gaussian() {
        let mu = LogConcaveDensity::gaussian(2);
        let r = coarea_integral(&mu, CoareaMethod::Grid { half_width: 8.0, resolution: 201 }, 1).unwrap();
        let exact = (std::f64::consts::PI / 2.0).sqrt();
        assert!((r.value.value - exact).abs() < 2e-3, "{r:?}");
    }

    #[test]
    fn generalized_coarea_on_truncated_gaussian() {
        let g = LogConcaveDensity::gaussian(2);
        let k = ConvexBody::cube(2, 1.0).unwrap();
        let r = generalized_coarea_check(&g, Some(&k), 2.0, 201, 3).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.boundary_integral.value > 0.0);
    }

    #[test]
    fn curved_truncation_uses_boundary_crossings() {
        // f = ½e^{−2‖x‖_∞} on the disk of radius 0.4; the level sets are
        // squares of half-width r = −ln(2s)/2 clipped to the disk
        let cube = LogConcaveDensity::isotropic_cube_exp(2);
        let rad = 0.4f64;
        let clipped = |r: f64| {
            if r >= rad {
                2.0 * std::f64::consts::PI * rad
            } else if r * 2f64.sqrt() <= rad {
                8.0 * r
            } else {
                let a = (r / rad).acos();
                8.0 * (rad * rad - r * r).sqrt() + 2.0 * std::f64::consts::PI * rad - 8.0 * a * rad
            }
        };
        let exact = crate::quad::integrate(|s| clipped(-(2.0 * s).ln() / 2.0), 0.0, 0.5, 1e-13, 1e-11).unwrap();
        let disk = ConvexBody::ball(2, rad).unwrap();
        let r = generalized_coarea_check(&cube, Some(&disk), 0.6, 301, 2).unwrap();
        assert!((r.coarea - exact).abs() < 2e-3, "{} vs {exact}", r.coarea);
        assert!(r.holds, "{r:?}");
    }
}
