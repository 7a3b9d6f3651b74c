//! Small dense vector helpers for the generic geometry code.
//!
//! Bodies live in dimensions where a hand-rolled elimination is cheaper and
//! simpler than pulling a matrix type through the generic scalar bound.

use crate::scalar::Real;

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// `a * sa + b * sb`
pub fn lincomb<T: Real>(a: &[T], sa: T, b: &[T], sb: T) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x * sa + y * sb).collect()
}

pub fn normalized<T: Real>(a: &[T]) -> Option<Vec<T>> {
    let n = norm(a);
    if n > T::zero() && n.is_finite() {
        Some(scale(a, T::one() / n))
    } else {
        None
    }
}

/// Solves the square system `m x = rhs` (row-major `m`) by Gaussian
/// elimination with partial pivoting. Returns `None` when the pivot falls
/// below `tol` relative to the largest entry.
pub fn solve<T: Real>(m: &[Vec<T>], rhs: &[T]) -> Option<Vec<T>> {
    let n = rhs.len();
    let mut a: Vec<Vec<T>> = m
        .iter()
        .zip(rhs)
        .map(|(row, &b)| {
            let mut r = row.clone();
            r.push(b);
            r
        })
        .collect();
    let scale_ref = a
        .iter()
        .flat_map(|r| r[..n].iter())
        .fold(T::zero(), |acc, &v| acc.max(v.abs()));
    if scale_ref == T::zero() {
        return None;
    }
    let tol = scale_ref * T::geom_eps();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv][col].abs() <= tol {
            return None;
        }
        a.swap(col, piv);
        for row in 0..n {
            if row != col {
                let factor = a[row][col] / a[col][col];
                if factor != T::zero() {
                    for k in col..=n {
                        let v = a[col][k];
                        a[row][k] = a[row][k] - factor * v;
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// Orthonormal basis of the hyperplane `u^⊥` (u need not be unit length).
pub fn complement_basis<T: Real>(u: &[T]) -> Vec<Vec<T>> {
    let n = u.len();
    let u = normalized(u).expect("nonzero normal");
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(n - 1);
    let mut frame = vec![u];
    for i in 0..n {
        let mut e = vec![T::zero(); n];
        e[i] = T::one();
        for b in &frame {
            let c = dot(&e, b);
            for (ek, &bk) in e.iter_mut().zip(b) {
                *ek = *ek - c * bk;
            }
        }
        if let Some(v) = normalized(&e) {
            if norm(&e) > T::lit(1e-3) {
                frame.push(v.clone());
                basis.push(v);
            }
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_known_solution() {
        let m = vec![vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]];
        let x = [1.0, -2.0, 0.5];
        let rhs: Vec<f64> = m.iter().map(|r| dot(r, &x)).collect();
        let got = solve(&m, &rhs).unwrap();
        for (a, b) in got.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_system_is_rejected() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(&m, &[1.0, 2.0]).is_none());
    }

    #[test]
    fn complement_is_orthonormal() {
        let u = [0.3f64, -1.2, 0.7, 2.0];
        let b = complement_basis(&u);
        assert_eq!(b.len(), 3);
        for (i, bi) in b.iter().enumerate() {
            assert!(dot(bi, &u).abs() < 1e-12);
            for (j, bj) in b.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(bi, bj) - want).abs() < 1e-12);
            }
        }
    }
}
