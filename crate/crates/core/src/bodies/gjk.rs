//! Gilbert–Johnson–Keerthi distance from a point to a convex body given only
//! by its support-point map.

use crate::linalg::{dot, norm, solve, sub};
use crate::scalar::Real;

/// Closest point of `conv(simplex)` to the origin, keeping only the
/// vertices of the minimal face that contains it.
fn closest_on_simplex<T: Real>(simplex: &[Vec<T>]) -> (Vec<T>, Vec<usize>) {
    let m = simplex.len();
    let mut best: Option<(T, Vec<T>, Vec<usize>)> = None;
    for mask in 1u32..(1u32 << m) {
        let ids: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let k = ids.len();
        let lambdas = if k == 1 {
            Some(vec![T::one()])
        } else {
            // minimize |Σ λ_i w_i| with Σ λ_i = 1 via the reduced normal equations
            let w0 = &simplex[ids[0]];
            let d: Vec<Vec<T>> = ids[1..].iter().map(|&i| sub(&simplex[i], w0)).collect();
            let g: Vec<Vec<T>> = d.iter().map(|a| d.iter().map(|b| dot(a, b)).collect()).collect();
            let rhs: Vec<T> = d.iter().map(|a| -dot(a, w0)).collect();
            solve(&g, &rhs).map(|mu| {
                let s: T = mu.iter().copied().sum();
                let mut l = vec![T::one() - s];
                l.extend(mu);
                l
            })
        };
        let Some(l) = lambdas else { continue };
        if l.iter().any(|&v| v <= T::zero()) {
            continue;
        }
        let mut p = vec![T::zero(); simplex[0].len()];
        for (&lam, &i) in l.iter().zip(&ids) {
            for (a, b) in p.iter_mut().zip(&simplex[i]) {
                *a = *a + lam * *b;
            }
        }
        let d = norm(&p);
        if best.as_ref().is_none_or(|b| d < b.0) {
            best = Some((d, p, ids));
        }
    }
    let (_, p, ids) = best.expect("singletons are always admissible");
    (p, ids)
}

/// Outcome of a distance query.
#[derive(Debug, Clone, PartialEq)]
pub struct GjkDistance<T> {
    /// Upper bound on the distance (norm of the current closest point).
    pub upper: T,
    /// Lower bound from the last separating direction.
    pub lower: T,
    /// Current closest point of the body.
    pub closest: Vec<T>,
}

/// Distance from `x` to the body whose support point in direction `u` is
/// `support(u)`. Stops when the bounds agree to `tol` or a distance of zero
/// is certified.
pub fn distance<T: Real, F: Fn(&[T]) -> Vec<T>>(support: F, x: &[T], tol: T, max_iter: usize) -> GjkDistance<T> {
    run(support, x, tol, max_iter, false)
}

/// Membership test `dist(x, K) <= tol`; exits as soon as a separating
/// direction certifies a distance above `tol`.
pub fn contains<T: Real, F: Fn(&[T]) -> Vec<T>>(support: F, x: &[T], tol: T, max_iter: usize) -> bool {
    run(support, x, tol, max_iter, true).upper <= tol
}

fn run<T: Real, F: Fn(&[T]) -> Vec<T>>(support: F, x: &[T], tol: T, max_iter: usize, separate: bool) -> GjkDistance<T> {
    let n = x.len();
    let neg = |v: &[T]| v.iter().map(|&a| -a).collect::<Vec<T>>();
    let mut e = vec![T::zero(); n];
    e[0] = T::one();
    let mut simplex = vec![sub(&support(&e), x)];
    let mut v = simplex[0].clone();
    let mut lower = T::zero();
    let done = |v: &Vec<T>, lower: T| GjkDistance { upper: norm(v), lower, closest: v.iter().zip(x).map(|(a, b)| *a + *b).collect() };
    for _ in 0..max_iter {
        let vn = norm(&v);
        if vn <= tol {
            return done(&v, T::zero());
        }
        let w = sub(&support(&neg(&v)), x);
        // ⟨v, w⟩/|v| lower-bounds the distance along −v
        lower = lower.max(dot(&v, &w) / vn);
        if separate && lower > tol {
            return done(&v, lower);
        }
        if vn - lower <= tol || simplex.iter().any(|s| norm(&sub(s, &w)) <= T::geom_eps() * vn) {
            return done(&v, lower);
        }
        simplex.push(w);
        let (p, keep) = closest_on_simplex(&simplex);
        simplex = keep.into_iter().map(|i| simplex[i].clone()).collect();
        v = p;
        if simplex.len() == n + 1 {
            return done(&v, T::zero());
        }
    }
    done(&v, lower)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_support(u: &[f64]) -> Vec<f64> {
        u.iter().map(|&c| if c >= 0.0 { 1.0 } else { -1.0 }).collect()
    }

    #[test]
    fn distance_to_cube() {
        let d = distance(box_support, &[3.0, 0.5, 0.0], 1e-12, 100);
        assert!((d.upper - 2.0).abs() < 1e-9);
        let d = distance(box_support, &[2.0, 2.0, 1.0], 1e-12, 100);
        assert!((d.upper - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn interior_point_has_zero_distance() {
        let d = distance(box_support, &[0.3, -0.9, 0.2], 1e-12, 100);
        assert!(d.upper <= 1e-9);
        assert!(contains(box_support, &[0.3, -0.9, 0.2], 1e-12, 100));
        assert!(!contains(box_support, &[0.3, -1.0 - 1e-6, 0.2], 1e-12, 100));
    }

    #[test]
    fn distance_to_ball() {
        let ball = |u: &[f64]| {
            let l = norm(u);
            u.iter().map(|&c| 2.0 * c / l).collect::<Vec<_>>()
        };
        let d = distance(ball, &[3.0, 4.0], 1e-10, 200);
        assert!((d.upper - 3.0).abs() < 1e-6, "{d:?}");
    }
}
