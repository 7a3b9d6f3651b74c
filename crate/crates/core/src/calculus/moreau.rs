//! Moreau envelopes `ψ_λ(x) = min_y ψ(y) + |x − y|²/(2λ)` and epi-convergence checks.

use rand::Rng as _;
use serde::Serialize;

use crate::error::{LcError, Result};
use crate::estimate::block_rng;
use crate::linalg::norm;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Minimiser and value of a convex function of one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineMin {
    pub arg: f64,
    pub value: f64,
}

fn golden_on<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64, mut best: LineMin, tol: f64) -> Result<LineMin> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..400 {
        for (s, v) in [(c, gc), (d, gd)] {
            if v < best.value {
                best = LineMin { arg: s, value: v };
            }
        }
        if b - a <= tol * (1.0 + best.arg.abs()) {
            return Ok(best);
        }
        let go_left = if gc.is_infinite() && gd.is_infinite() {
            if best.arg < c {
                Some(true)
            } else if best.arg > d {
                Some(false)
            } else {
                None
            }
        } else {
            Some(gc <= gd)
        };
        match go_left {
            Some(true) => {
                b = d;
                d = c;
                gd = gc;
                c = b - GOLDEN * (b - a);
                gc = g(c);
            }
            Some(false) => {
                a = c;
                c = d;
                gc = gd;
                d = a + GOLDEN * (b - a);
                gd = g(d);
            }
            None => {
                a = c;
                b = d;
                c = b - GOLDEN * (b - a);
                d = a + GOLDEN * (b - a);
                gc = g(c);
                gd = g(d);
            }
        }
    }
    Err(LcError::LineSearchNoConverge(format!("golden section did not shrink below {tol} on [{a}, {b}]")))
}

/// Minimises a convex `g` (possibly `+∞` off a convex domain) on `[lo, hi]`,
/// either end of which may be infinite. `start` must have `g(start) < ∞`.
pub fn minimize_convex_1d<G: Fn(f64) -> f64>(g: G, start: f64, lo: f64, hi: f64, scale: f64, tol: f64) -> Result<LineMin> {
    let g0 = g(start);
    if !g0.is_finite() {
        return Err(LcError::LineSearchNoConverge(format!("objective is not finite at the start point {start}")));
    }
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut best = LineMin { arg: start, value: g0 };
    let mut ends = [lo, hi];
    for (side, sign) in [(0usize, -1.0f64), (1, 1.0)] {
        if ends[side].is_finite() {
            continue;
        }
        let mut prev = g0;
        let mut step = scale;
        loop {
            let s = start + sign * step;
            let v = g(s);
            if v < best.value {
                best = LineMin { arg: s, value: v };
            }
            if !(v < prev) {
                ends[side] = s;
                break;
            }
            prev = v;
            step *= 2.0;
            if step > 1e300 {
                return Err(LcError::LineSearchNoConverge("objective decreases without bound".into()));
            }
        }
    }
    golden_on(&g, ends[0], ends[1], best, tol)
}

/// Prox point and envelope value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoreauPoint {
    pub value: f64,
    pub argmin: Vec<f64>,
}

/// Moreau envelope of a convex potential at `x`.
///
/// One-dimensional problems use golden-section search; higher dimensions cycle
/// line searches over coordinate axes, the previous sweep's displacement, the
/// direction towards `x` and a few seeded random directions until a sweep no
/// longer decreases the objective.
pub fn moreau<F: Fn(&[f64]) -> f64>(psi: F, lambda: f64, x: &[f64]) -> Result<MoreauPoint> {
    if !(lambda > 0.0) {
        return Err(LcError::InvalidParameter(format!("λ must be positive, got {lambda}")));
    }
    let n = x.len();
    let objective = |y: &[f64]| {
        let v = psi(y);
        if v.is_finite() {
            v + y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (2.0 * lambda)
        } else {
            f64::INFINITY
        }
    };
    let mut y = if psi(x).is_finite() {
        x.to_vec()
    } else if psi(&vec![0.0; n]).is_finite() {
        vec![0.0; n]
    } else {
        return Err(LcError::ProxNoConverge("potential is infinite at both x and the origin".into()));
    };
    let scale = norm(x).max(lambda.sqrt()).max(1e-3);
    if n == 1 {
        let r = minimize_convex_1d(|s| objective(&[s]), y[0], f64::NEG_INFINITY, f64::INFINITY, scale, 1e-13)?;
        return Ok(MoreauPoint { value: r.value, argmin: vec![r.arg] });
    }
    let mut rng = block_rng(0x4d6f_7265_6175, n as u64, 0);
    let mut value = objective(&y);
    let mut quiet = 0;
    for _ in 0..2000 {
        let start = y.clone();
        let start_value = value;
        let mut dirs: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        let to_x: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        if norm(&to_x) > 0.0 {
            dirs.push(to_x);
        }
        for _ in 0..n + 2 {
            dirs.push((0..n).map(|_| rng.random::<f64>() - 0.5).collect());
        }
        for d in dirs.iter_mut() {
            let l = norm(d);
            d.iter_mut().for_each(|v| *v /= l);
        }
        let mut step_dirs = dirs;
        let mut k = 0;
        while k < step_dirs.len() {
            let d = step_dirs[k].clone();
            let line = |s: f64| {
                let p: Vec<f64> = y.iter().zip(&d).map(|(a, b)| a + s * b).collect();
                objective(&p)
            };
            let r = minimize_convex_1d(line, 0.0, f64::NEG_INFINITY, f64::INFINITY, scale.min(1.0), 1e-13)?;
            if r.value < value {
                y.iter_mut().zip(&d).for_each(|(a, b)| *a += r.arg * b);
                value = r.value;
            }
            k += 1;
            if k == step_dirs.len() {
                let disp: Vec<f64> = y.iter().zip(&start).map(|(a, b)| a - b).collect();
                let l = norm(&disp);
                if l > 0.0 && step_dirs.len() < 3 * n + 4 {
                    step_dirs.push(disp.iter().map(|v| v / l).collect());
                }
            }
        }
        let moved = y.iter().zip(&start).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if start_value - value <= 1e-15 * (1.0 + value.abs()) && moved <= 1e-9 * (1.0 + norm(&y)) {
            quiet += 1;
            if quiet >= 3 {
                return Ok(MoreauPoint { value, argmin: y });
            }
        } else {
            quiet = 0;
        }
    }
    Err(LcError::ProxNoConverge(format!("sweep budget exhausted at {y:?}")))
}

/// Per-point outcome of an epi-convergence check.
#[derive(Debug, Clone, Serialize)]
pub struct EpiPoint {
    pub x: Vec<f64>,
    pub psi: f64,
    /// Smallest envelope value along approaching sequences over the tail of the λ sequence.
    pub liminf_estimate: f64,
    /// `ψ_λ(x)` at the last λ.
    pub recovery_value: f64,
    pub liminf_ok: bool,
    pub recovery_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpiReport {
    pub points: Vec<EpiPoint>,
    pub violations: Vec<String>,
}

impl EpiReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Envelope values treated as diverging to `+∞`.
pub const EPI_INFINITY: f64 = 1e6;

/// Checks the two epi-convergence conditions of `ψ_λ → ψ` along a decreasing
/// sequence `λ_k` at each test point `x`.
///
/// Condition (i) is probed along `x_k = x ± 2^{−k} e_i` and `x_k = x`: the tail
/// minimum of `ψ_{λ_k}(x_k)` must not fall below `ψ(x) − tol`. Condition (ii)
/// uses the constant sequence: `ψ_{λ_k}(x)` must stay below `ψ(x) + tol` and end
/// within `tol` of it. Infinite `ψ(x)` requires the envelopes to exceed
/// [`EPI_INFINITY`] at the end of the sequence.
pub fn epi_convergence_check<F: Fn(&[f64]) -> f64>(psi: F, lambdas: &[f64], points: &[Vec<f64>], tol: f64) -> Result<EpiReport> {
    if lambdas.len() < 3 || lambdas.windows(2).any(|w| !(w[1] < w[0])) || lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(LcError::InvalidParameter("λ sequence must be positive, strictly decreasing and have length >= 3".into()));
    }
    let tail = lambdas.len() * 2 / 3;
    let mut report = EpiReport { points: Vec::new(), violations: Vec::new() };
    for x in points {
        let n = x.len();
        let target = psi(x);
        let mut offsets: Vec<Vec<f64>> = vec![vec![0.0; n]];
        for i in 0..n {
            for s in [-1.0, 1.0] {
                let mut e = vec![0.0; n];
                e[i] = s;
                offsets.push(e);
            }
        }
        let mut liminf = f64::INFINITY;
        for e in &offsets {
            let mut seq_min = f64::INFINITY;
            for (k, &lam) in lambdas.iter().enumerate().skip(tail) {
                let shrink = 0.5f64.powi(k as i32 + 1);
                let xk: Vec<f64> = x.iter().zip(e).map(|(a, b)| a + shrink * b).collect();
                seq_min = seq_min.min(moreau(&psi, lam, &xk)?.value);
            }
            liminf = liminf.min(seq_min);
        }
        let mut recovery = Vec::new();
        for &lam in lambdas {
            recovery.push(moreau(&psi, lam, x)?.value);
        }
        let last = *recovery.last().expect("non-empty");
        let (liminf_ok, recovery_ok) = if target.is_finite() {
            (
                liminf >= target - tol,
                recovery.iter().all(|v| *v <= target + tol) && (last - target).abs() <= tol,
            )
        } else {
            (liminf > EPI_INFINITY, last > EPI_INFINITY)
        };
        if !liminf_ok {
            report.violations.push(format!("liminf condition fails at {x:?}: {liminf} < ψ = {target}"));
        }
        if !recovery_ok {
            report.violations.push(format!("recovery condition fails at {x:?}: ψ_λ = {last}, ψ = {target}"));
        }
        report.points.push(EpiPoint { x: x.clone(), psi: target, liminf_estimate: liminf, recovery_value: last, liminf_ok, recovery_ok });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn huber(x: f64, l: f64) -> f64 {
        if x.abs() <= l {
            x * x / (2.0 * l)
        } else {
            x.abs() - l / 2.0
        }
    }

    #[test]
    fn envelope_of_abs_is_huber() {
        for &l in &[0.1, 1.0, 3.0] {
            for &x in &[-4.0, -0.5, 0.0, 0.05, 2.0, 10.0] {
                let m = moreau(|y: &[f64]| y[0].abs(), l, &[x]).unwrap();
                assert!((m.value - huber(x, l)).abs() < 1e-9, "λ={l} x={x}");
            }
        }
    }

    #[test]
    fn envelope_of_interval_indicator_is_half_squared_distance() {
        let ind = |y: &[f64]| if y[0].abs() <= 1.0 { 0.0f64 } else { f64::INFINITY };
        for &x in &[-3.0f64, 0.3, 1.5] {
            let d: f64 = (x.abs() - 1.0f64).max(0.0);
            let m = moreau(ind, 0.5, &[x]).unwrap();
            assert!((m.value - d * d).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn envelope_in_two_dimensions() {
        let l1 = |y: &[f64]| y[0].abs() + y[1].abs();
        let m = moreau(l1, 1.0, &[3.0, 0.2]).unwrap();
        assert!((m.value - (huber(3.0, 1.0) + huber(0.2, 1.0))).abs() < 1e-8);
        let linf = |y: &[f64]| y[0].abs().max(y[1].abs());
        let m = moreau(linf, 1.0, &[3.0, 3.0]).unwrap();
        assert!((m.value - 2.75).abs() < 1e-7, "{m:?}");
        let l2 = |y: &[f64]| (y[0] * y[0] + y[1] * y[1]).sqrt();
        let m = moreau(l2, 2.0, &[3.0, 4.0]).unwrap();
        assert!((m.value - 4.0).abs() < 1e-8, "{m:?}");
    }

    #[test]
    fn epi_convergence_of_indicator_envelopes() {
        let ind = |y: &[f64]| if y[0].abs() <= 1.0 { 0.0f64 } else { f64::INFINITY };
        let lambdas: Vec<f64> = (1..=40).map(|k| 0.5f64.powi(k)).collect();
        let report = epi_convergence_check(ind, &lambdas, &[vec![1.0], vec![0.0], vec![-1.0], vec![1.3]], 1e-9).unwrap();
        assert!(report.clean(), "{:?}", report.violations);
    }

    #[test]
    fn epi_check_rejects_bad_sequences() {
        assert!(epi_convergence_check(|y: &[f64]| y[0].abs(), &[1.0, 2.0, 0.5], &[vec![0.0]], 1e-6).is_err());
    }
}
