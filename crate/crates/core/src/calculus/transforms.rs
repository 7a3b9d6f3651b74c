//! Brute-force grid transforms: Legendre transform, infimal convolution,
//! Asplund product and dilation.

use rayon::prelude::*;
use serde::Serialize;

use super::grid::{GridFunction, GridKind};
use crate::error::{LcError, Result};
use crate::scalar::Real;

/// Index of `x − y` on the grid when both `x` (index `i`) and `y` (index `k`) are nodes.
fn difference_index<T: Real>(g: &GridFunction<T>, i: [usize; 2], k: [usize; 2]) -> Option<usize> {
    let m = g.points_per_axis() as isize;
    let c = (m - 1) / 2;
    let mut j = [0usize; 2];
    for a in 0..g.dim() {
        let v = i[a] as isize + c - k[a] as isize;
        if v < 0 || v >= m {
            return None;
        }
        j[a] = v as usize;
    }
    Some(g.flat(j))
}

fn potential_values<T: Real>(g: &GridFunction<T>) -> Vec<T> {
    g.to_potential().values().to_vec()
}

/// Discrete Legendre transform `φ*(x) = max_y ⟨x, y⟩ − φ(y)` on the grid of `φ`.
pub fn legendre<T: Real>(phi: &GridFunction<T>) -> Result<GridFunction<T>> {
    legendre_on(phi, phi.half_width(), phi.points_per_axis())
}

/// Legendre transform evaluated on the dual grid `[−b, b]^dim` with `m_out` points per axis.
///
/// When the maximiser sits on the edge of the primal grid and the objective is
/// still strictly increasing towards that edge, the supremum is taken to be
/// unbounded and the output node is `+∞`.
pub fn legendre_on<T: Real>(phi: &GridFunction<T>, dual_half_width: T, m_out: usize) -> Result<GridFunction<T>> {
    let vals = potential_values(phi);
    if vals.iter().all(|v| !v.is_finite()) {
        return Err(LcError::ImproperInput);
    }
    let out_template = GridFunction::from_fn(phi.dim(), dual_half_width, m_out, GridKind::Potential, |_| T::zero())?;
    let n_in = vals.len();
    let pts: Vec<Vec<T>> = (0..n_in).map(|k| phi.point(k)).collect();
    let m = phi.points_per_axis();
    let dim = phi.dim();
    let out: Vec<T> = (0..out_template.len())
        .into_par_iter()
        .map(|ko| {
            let x = out_template.point(ko);
            let objective = |k: usize| {
                let y = &pts[k];
                let mut s = -vals[k];
                for a in 0..dim {
                    s = s + x[a] * y[a];
                }
                s
            };
            let mut best = T::neg_infinity();
            let mut arg = 0;
            for (k, v) in vals.iter().enumerate() {
                if !v.is_finite() {
                    continue;
                }
                let s = objective(k);
                if s > best {
                    best = s;
                    arg = k;
                }
            }
            let idx = phi.index(arg);
            let tol = T::geom_eps() * (T::one() + best.abs());
            for a in 0..dim {
                let inward = if idx[a] == 0 {
                    Some(1)
                } else if idx[a] + 1 == m {
                    Some(m - 2)
                } else {
                    None
                };
                if let Some(w) = inward {
                    let mut nb = idx;
                    nb[a] = w;
                    let kn = phi.flat(nb);
                    if vals[kn].is_finite() && best - objective(kn) > tol {
                        return T::infinity();
                    }
                }
            }
            best
        })
        .collect();
    Ok(out_template.with_values(GridKind::Potential, out))
}

/// Infimal convolution `(ψ □ φ)(x) = min_y ψ(y) + φ(x − y)` over grid nodes.
pub fn inf_convolution<T: Real>(psi: &GridFunction<T>, phi: &GridFunction<T>) -> Result<GridFunction<T>> {
    psi.require_same_grid(phi)?;
    let a = potential_values(psi);
    let b = potential_values(phi);
    let out: Vec<T> = (0..a.len())
        .into_par_iter()
        .map(|i| {
            let ii = psi.index(i);
            let mut best = T::infinity();
            for (k, va) in a.iter().enumerate() {
                if !va.is_finite() {
                    continue;
                }
                if let Some(j) = difference_index(psi, ii, psi.index(k)) {
                    let s = *va + b[j];
                    if s < best {
                        best = s;
                    }
                }
            }
            best
        })
        .collect();
    Ok(psi.with_values(GridKind::Potential, out))
}

/// Asplund product `(f ⋆ g)(x) = max_y f(y) g(x − y)` of density grids.
pub fn asplund<T: Real>(f: &GridFunction<T>, g: &GridFunction<T>) -> Result<GridFunction<T>> {
    f.require_same_grid(g)?;
    let a = f.to_density().values().to_vec();
    let b = g.to_density().values().to_vec();
    let out: Vec<T> = (0..a.len())
        .into_par_iter()
        .map(|i| {
            let ii = f.index(i);
            let mut best = T::zero();
            for (k, va) in a.iter().enumerate() {
                if *va <= T::zero() {
                    continue;
                }
                if let Some(j) = difference_index(f, ii, f.index(k)) {
                    let s = *va * b[j];
                    if s > best {
                        best = s;
                    }
                }
            }
            best
        })
        .collect();
    Ok(f.with_values(GridKind::Density, out))
}

/// Potential at an off-grid point by (bi)linear interpolation. Cells touching
/// an infinite node fall back to the nearest node; points outside the box are `+∞`.
pub fn interpolate_potential<T: Real>(psi: &GridFunction<T>, x: &[T]) -> T {
    let h = psi.step();
    let m = psi.points_per_axis();
    let dim = psi.dim();
    let mut base = [0usize; 2];
    let mut frac = [T::zero(); 2];
    for a in 0..dim {
        let s = (x[a] + psi.half_width()) / h;
        let tol = T::lit(1e3) * T::epsilon() * T::from_usize(m).unwrap();
        if s < -tol || s > T::from_usize(m - 1).unwrap() + tol {
            return T::infinity();
        }
        let s = s.max(T::zero()).min(T::from_usize(m - 1).unwrap());
        let i0 = s.floor().to_usize().unwrap().min(m - 2);
        base[a] = i0;
        frac[a] = s - T::from_usize(i0).unwrap();
    }
    let corners: Vec<([usize; 2], T)> = if dim == 1 {
        vec![([base[0], 0], T::one() - frac[0]), ([base[0] + 1, 0], frac[0])]
    } else {
        let mut c = Vec::with_capacity(4);
        for dj in 0..2 {
            for di in 0..2 {
                let wx = if di == 0 { T::one() - frac[0] } else { frac[0] };
                let wy = if dj == 0 { T::one() - frac[1] } else { frac[1] };
                c.push(([base[0] + di, base[1] + dj], wx * wy));
            }
        }
        c
    };
    let vals = psi.values();
    if corners.iter().all(|(idx, _)| vals[psi.flat(*idx)].is_finite()) {
        corners.iter().map(|(idx, w)| *w * vals[psi.flat(*idx)]).sum()
    } else {
        let (idx, _) = corners
            .iter()
            .max_by(|p, q| p.1.partial_cmp(&q.1).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty");
        vals[psi.flat(*idx)]
    }
}

/// Dilation `(t·f)(x) = f(x/t)^t`, i.e. potential `t ψ(x/t)`, on the same grid.
pub fn dilate<T: Real>(f: &GridFunction<T>, t: T) -> Result<GridFunction<T>> {
    if !(t > T::zero()) {
        return Err(LcError::InvalidParameter(format!("dilation factor must be positive, got {t}")));
    }
    let psi = f.to_potential();
    let out: Vec<T> = (0..psi.len())
        .map(|k| {
            let x: Vec<T> = psi.point(k).iter().map(|c| *c / t).collect();
            let v = interpolate_potential(&psi, &x);
            if v.is_finite() {
                t * v
            } else {
                v
            }
        })
        .collect();
    let dilated = psi.with_values(GridKind::Potential, out);
    Ok(match f.kind() {
        GridKind::Potential => dilated,
        GridKind::Density => dilated.to_density(),
    })
}

/// Outcome of comparing `f ⋆ (t·f)` with `(1+t)·f` on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct SelfIdentityReport {
    pub max_deviation: f64,
    pub step: f64,
    pub nodes_compared: usize,
}

/// Builds `f = e^{−ψ}` on `[−a, a]^dim` and measures
/// `max |f ⋆ (t·f)(z) − e^{−(1+t)ψ(z/(1+t))}|` over nodes of the inner box `[−a/2, a/2]^dim`.
pub fn asplund_self_identity<T: Real, F: Fn(&[T]) -> T>(
    psi: F,
    dim: usize,
    half_width: T,
    m: usize,
    t: T,
) -> Result<SelfIdentityReport> {
    let pot = GridFunction::from_fn(dim, half_width, m, GridKind::Potential, &psi)?;
    if !pot.is_convex_along_lines(T::geom_eps()) {
        return Err(LcError::InvalidParameter("potential is not convex on the grid".into()));
    }
    let f = pot.to_density();
    let lhs = asplund(&f, &dilate(&f, t)?)?;
    let s = T::one() + t;
    let r = half_width / T::lit(2.0);
    let mut worst = T::zero();
    let mut count = 0;
    for k in 0..lhs.len() {
        let z = lhs.point(k);
        if z.iter().any(|c| c.abs() > r) {
            continue;
        }
        let zs: Vec<T> = z.iter().map(|c| *c / s).collect();
        let rhs = (-s * psi(&zs)).exp();
        worst = worst.max((lhs.value(k) - rhs).abs());
        count += 1;
    }
    Ok(SelfIdentityReport { max_deviation: worst.to_f64_lossy(), step: f.step().to_f64_lossy(), nodes_compared: count })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(a: f64, m: usize, f: impl Fn(f64) -> f64) -> GridFunction<f64> {
        GridFunction::from_fn(1, a, m, GridKind::Potential, |x| f(x[0])).unwrap()
    }

    #[test]
    fn legendre_of_half_square_is_self_dual() {
        let phi = grid1(4.0, 801, |x| 0.5 * x * x);
        let dual = legendre(&phi).unwrap();
        assert!(dual.value(0).is_infinite());
        let exact = grid1(4.0, 801, |x| 0.5 * x * x);
        assert!(dual.max_abs_diff_within(&exact, 3.0).unwrap() < 1e-12);
    }

    #[test]
    fn legendre_of_abs_is_interval_indicator() {
        let phi = grid1(3.0, 601, f64::abs);
        let dual = legendre(&phi).unwrap();
        for k in 0..dual.len() {
            let x = dual.point(k)[0];
            if x.abs() <= 1.0 {
                assert!(dual.value(k).abs() < 1e-9, "x={x} v={}", dual.value(k));
            } else if x.abs() > 1.0 + 1e-9 {
                assert!(dual.value(k).is_infinite(), "x={x}");
            }
        }
    }

    #[test]
    fn double_legendre_recovers_convex_potential() {
        let h = 8.0 / 800.0;
        let phi = grid1(4.0, 801, |x| x.abs() + 0.25 * x * x);
        let back = legendre(&legendre(&phi).unwrap()).unwrap();
        assert!(phi.max_abs_diff_within(&back, 2.0).unwrap() <= 2.0 * h);
    }

    #[test]
    fn legendre_of_all_infinite_is_improper() {
        let phi = grid1(1.0, 11, |_| f64::INFINITY);
        assert_eq!(legendre(&phi).unwrap_err(), LcError::ImproperInput);
    }

    #[test]
    fn inf_convolution_of_quadratics() {
        let q = grid1(4.0, 401, |x| 0.5 * x * x);
        let c = inf_convolution(&q, &q).unwrap();
        let exact = grid1(4.0, 401, |x| 0.25 * x * x);
        let h = q.step();
        assert!(c.max_abs_diff_within(&exact, 2.0).unwrap() <= 0.25 * h * h + 1e-12);
        let other = grid1(4.0, 101, |x| x);
        assert!(matches!(inf_convolution(&q, &other), Err(LcError::GridMismatch(_))));
    }

    #[test]
    fn asplund_matches_exponential_of_inf_convolution() {
        let p = GridFunction::<f64>::from_fn(2, 2.0, 41, GridKind::Potential, |x| x[0].abs() + x[1] * x[1]).unwrap();
        let q = GridFunction::<f64>::from_fn(2, 2.0, 41, GridKind::Potential, |x| (x[0] * x[0] + x[1] * x[1]).sqrt()).unwrap();
        let lhs = asplund(&p.to_density(), &q.to_density()).unwrap();
        let rhs = inf_convolution(&p, &q).unwrap().to_density();
        let dev = lhs.values().iter().zip(rhs.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev <= 1e-12, "{dev}");
    }

    #[test]
    fn dilating_an_indicator_scales_the_support() {
        let f = grid1(4.0, 801, |x| if x.abs() <= 1.0 { 0.0 } else { f64::INFINITY }).to_density();
        let g = dilate(&f, 2.0).unwrap();
        let h = f.step();
        for k in 0..g.len() {
            let x = g.point(k)[0];
            if x.abs() < 2.0 - 2.0 * h {
                assert_eq!(g.value(k), 1.0);
            } else if x.abs() > 2.0 + 2.0 * h {
                assert_eq!(g.value(k), 0.0);
            }
        }
        assert!(dilate(&f, 0.0).is_err());
    }

    #[test]
    fn dilating_a_quadratic_potential() {
        let p = grid1(4.0, 801, |x| x * x);
        let d = dilate(&p, 0.5).unwrap();
        let exact = grid1(4.0, 801, |x| 2.0 * x * x);
        assert!(d.max_abs_diff_within(&exact, 2.0).unwrap() < 1e-4);
    }

    #[test]
    fn self_identity_for_gaussian_and_square_gauge() {
        let r = asplund_self_identity(|x: &[f64]| 0.5 * x[0] * x[0], 1, 6.0, 601, 1.0).unwrap();
        assert!(r.max_deviation <= 5.0 * r.step, "{r:?}");
        let r = asplund_self_identity(|x: &[f64]| x[0].abs().max(x[1].abs()), 2, 4.0, 61, 0.5).unwrap();
        assert!(r.max_deviation <= 5.0 * r.step, "{r:?}");
    }

    #[test]
    fn f32_grid_transforms() {
        let q = GridFunction::<f32>::from_fn(1, 4.0, 201, GridKind::Potential, |x| 0.5 * x[0] * x[0]).unwrap();
        let d = legendre(&q).unwrap();
        assert!(d.max_abs_diff_within(&q, 3.0).unwrap() < 1e-4);
    }
}
