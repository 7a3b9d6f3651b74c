//! Statistical checks of the dimensional Brunn–Minkowski inequality
//! `μ(λK + (1−λ)L)^c ≥ λμ(K)^c + (1−λ)μ(L)^c` for even log-concave `μ` and
//! symmetric convex bodies.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{unit_direction, ConvexBody, Membership};
use crate::densities::LogConcaveDensity;
use crate::error::{LcError, Result};
use crate::estimate::{block_rng, MCEstimate, Rng};
use crate::sampler::{mc_moments, SamplerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// `holds` iff `margin > 3·error`, `violated` iff `margin < −3·error`.
    pub fn classify(margin: f64, error: f64) -> Self {
        if margin > 3.0 * error {
            Verdict::Holds
        } else if margin < -3.0 * error {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        }
    }
}

/// `μ(K), μ(L), μ(M)` from one sample stream, with their joint covariance of the mean.
#[derive(Debug, Clone, Serialize)]
pub struct MassTriple {
    pub k: MCEstimate,
    pub l: MCEstimate,
    pub m: MCEstimate,
    /// Covariance of the three sample means, order `(K, L, M)`.
    pub covariance: [[f64; 3]; 3],
}

impl MassTriple {
    /// Margin and its delta-method standard error at exponent `c`.
    pub fn margin(&self, lambda: f64, c: f64) -> (f64, f64) {
        let (a, b, m) = (self.k.value, self.l.value, self.m.value);
        // grouped so that K = L and λ ∈ {0, 1} give exactly zero
        let margin = (m.powf(c) - b.powf(c)) - lambda * (a.powf(c) - b.powf(c));
        let g = [-lambda * c * a.powf(c - 1.0), -(1.0 - lambda) * c * b.powf(c - 1.0), c * m.powf(c - 1.0)];
        let mut var = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                var += g[i] * g[j] * self.covariance[i][j];
            }
        }
        (margin, var.max(0.0).sqrt())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BMCheckResult {
    pub masses: MassTriple,
    pub lambda: f64,
    pub exponent: f64,
    pub margin: f64,
    pub error: f64,
    pub verdict: Verdict,
    /// Set when a first-pass `violated` verdict was replaced by a 4× re-run.
    pub rerun: bool,
}

#[derive(Debug, Clone)]
pub struct BMOptions {
    pub count: usize,
    pub sampler: SamplerConfig,
    /// Membership test for bodies only representable through their support function.
    pub membership: Membership,
}

impl BMOptions {
    pub fn new(mu: &LogConcaveDensity, count: usize, seed: u64) -> Self {
        BMOptions { count, sampler: SamplerConfig::auto(mu, seed), membership: Membership::Gjk }
    }
}

fn require_symmetric(k: &ConvexBody<f64>) -> Result<()> {
    if k.is_symmetric() {
        Ok(())
    } else {
        Err(LcError::InvalidParameter(format!("{} is not symmetric", k.variant_name())))
    }
}

/// Masses of `K`, `L` and `λK + (1−λ)L` with common random numbers.
pub fn mass_triple(
    mu: &LogConcaveDensity,
    k: &ConvexBody<f64>,
    l: &ConvexBody<f64>,
    lambda: f64,
    count: usize,
    cfg: &SamplerConfig,
    membership: Membership,
) -> Result<MassTriple> {
    if !mu.is_even() {
        return Err(LcError::NotCentered(format!("{} is not even", mu.name())));
    }
    require_symmetric(k)?;
    require_symmetric(l)?;
    let m = k.minkowski_combo_with(l, lambda, membership)?;
    let ind = |b: &ConvexBody<f64>, x: &[f64]| if b.contains(x) { 1.0 } else { 0.0 };
    let mom = mc_moments(
        mu,
        3,
        |x, out| {
            out[0] = ind(k, x);
            out[1] = ind(l, x);
            out[2] = ind(&m, x);
        },
        count,
        cfg,
    )?;
    let est = mom.estimates(cfg.seed);
    for e in &est {
        if e.value <= 0.0 || e.value < 10.0 * e.std_error {
            return Err(LcError::MassTooSmall { mass: e.value, se: e.std_error });
        }
    }
    let n = est[0].n_samples.max(1) as f64;
    let mut covariance = [[0.0; 3]; 3];
    for (i, row) in covariance.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            *c = mom.covariance(i, j) / n;
        }
    }
    Ok(MassTriple { k: est[0], l: est[1], m: est[2], covariance })
}

fn finer(m: Membership) -> Membership {
    match m {
        Membership::DirectionNet { size } => Membership::DirectionNet { size: 4 * size },
        other => other,
    }
}

/// One Brunn–Minkowski check. A `violated` first pass is re-run with four
/// times the samples and a four times finer direction net on a fresh stream.
pub fn bm_check(mu: &LogConcaveDensity, k: &ConvexBody<f64>, l: &ConvexBody<f64>, lambda: f64, c: f64, opts: &BMOptions) -> Result<BMCheckResult> {
    if !(c > 0.0) {
        return Err(LcError::InvalidParameter(format!("exponent must be positive, got {c}")));
    }
    let masses = mass_triple(mu, k, l, lambda, opts.count, &opts.sampler, opts.membership)?;
    let (margin, error) = masses.margin(lambda, c);
    let verdict = Verdict::classify(margin, error);
    if verdict != Verdict::Violated {
        return Ok(BMCheckResult { masses, lambda, exponent: c, margin, error, verdict, rerun: false });
    }
    let cfg = opts.sampler.with_seed(opts.sampler.seed ^ 0xB4B4_0000_0000_0001);
    let masses = mass_triple(mu, k, l, lambda, 4 * opts.count, &cfg, finer(opts.membership))?;
    let (margin, error) = masses.margin(lambda, c);
    Ok(BMCheckResult { masses, lambda, exponent: c, margin, error, verdict: Verdict::classify(margin, error), rerun: true })
}

/// `1/(n³ ln n)`, the exponent form of the dimensional inequality with unit constant.
pub fn default_exponent(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(LcError::InvalidParameter("the exponent is defined for n >= 2".into()));
    }
    let nf = n as f64;
    Ok(1.0 / (nf.powi(3) * nf.ln()))
}

/// Named exponents for comparison rows: `paper = 1/(n³ ln n)`,
/// `intermediate = 1/(n² ln n)` and `conjecture = 1/n`.
pub fn exponent_rows(n: usize) -> Result<Vec<(&'static str, f64)>> {
    let nf = n as f64;
    Ok(vec![("paper", default_exponent(n)?), ("intermediate", 1.0 / (nf * nf * nf.ln())), ("conjecture", 1.0 / nf)])
}

/// Resolves `paper`, `intermediate`, `conjecture` or a literal value.
pub fn parse_exponent(s: &str, n: usize) -> Result<f64> {
    if let Some((_, c)) = exponent_rows(n)?.into_iter().find(|(name, _)| *name == s) {
        return Ok(c);
    }
    s.parse::<f64>().map_err(|_| LcError::InvalidParameter(format!("unknown exponent {s:?}")))
}

/// A test case `(K, L, λ)`.
#[derive(Debug, Clone)]
pub struct BodyTriple {
    pub k: ConvexBody<f64>,
    pub l: ConvexBody<f64>,
    pub lambda: f64,
}

fn random_polytope(rng: &mut Rng, n: usize, scale: f64) -> Result<ConvexBody<f64>> {
    let half: Vec<Vec<f64>> = (0..n + 1)
        .map(|_| {
            let r = scale * rng.random_range(0.9..2.2);
            unit_direction(rng, n).into_iter().map(|v| v * r).collect()
        })
        .collect();
    ConvexBody::v_polytope_symmetric(&half)
}

fn random_box(rng: &mut Rng, n: usize) -> Result<ConvexBody<f64>> {
    ConvexBody::boxed((0..n).map(|_| rng.random_range(0.7..2.5)).collect())
}

fn random_ball(rng: &mut Rng, n: usize, scale: f64) -> Result<ConvexBody<f64>> {
    ConvexBody::ball(n, scale * rng.random_range(0.6..1.6))
}

/// Random symmetric pairs at isotropic scale: box/box, ball/ball, `ℓ_p`
/// balls with a shared `p`, polytope pairs for `n <= 3`, and box/ball pairs
/// whose combination is only available through its support function.
pub fn random_triples(n: usize, count: usize, seed: u64) -> Result<Vec<BodyTriple>> {
    let mut rng = block_rng(seed, 0xB0D1, 0);
    let s = (n as f64).sqrt();
    let kinds = if n <= 3 { 5 } else { 4 };
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let lambda = rng.random_range(0.05..0.95);
        let (k, l) = match i % kinds {
            0 => (random_box(&mut rng, n)?, random_box(&mut rng, n)?),
            1 => (random_ball(&mut rng, n, s)?, random_ball(&mut rng, n, s)?),
            2 => {
                let p = [1.0, 1.5, 4.0][rng.random_range(0..3)];
                let scale = s * if p < 2.0 { 1.3 } else { 0.9 };
                (ConvexBody::lp_ball(n, p, scale * rng.random_range(0.7..1.6))?, ConvexBody::lp_ball(n, p, scale * rng.random_range(0.7..1.6))?)
            }
            3 => (random_box(&mut rng, n)?, random_ball(&mut rng, n, s)?),
            _ => (random_polytope(&mut rng, n, 1.0)?, random_polytope(&mut rng, n, 1.0)?),
        };
        out.push(BodyTriple { k, l, lambda });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentRow {
    pub exponent: f64,
    pub holds: usize,
    pub inconclusive: usize,
    pub violated: usize,
    /// No triple is violated at this exponent or at any larger grid exponent
    /// that is reported clear.
    pub clear: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentScan {
    pub rows: Vec<ExponentRow>,
    /// Largest grid exponent whose row and every smaller row are clear.
    pub largest_clear: Option<f64>,
    pub triples: usize,
}

/// Evaluates every grid exponent on one set of mass triples.
pub fn concavity_exponent_scan(mu: &LogConcaveDensity, triples: &[BodyTriple], exponents: &[f64], opts: &BMOptions) -> Result<ExponentScan> {
    if exponents.iter().any(|c| !(*c > 0.0)) {
        return Err(LcError::InvalidParameter("exponents must be positive".into()));
    }
    let mut grid = exponents.to_vec();
    grid.sort_by(f64::total_cmp);
    let masses = triples
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let cfg = opts.sampler.with_seed(opts.sampler.seed.wrapping_add(i as u64));
            mass_triple(mu, &t.k, &t.l, t.lambda, opts.count, &cfg, opts.membership)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ExponentRow> = grid
        .iter()
        .map(|&c| {
            let mut row = ExponentRow { exponent: c, holds: 0, inconclusive: 0, violated: 0, clear: false };
            for (t, m) in triples.iter().zip(&masses) {
                let (margin, error) = m.margin(t.lambda, c);
                match Verdict::classify(margin, error) {
                    Verdict::Holds => row.holds += 1,
                    Verdict::Inconclusive => row.inconclusive += 1,
                    Verdict::Violated => row.violated += 1,
                }
            }
            row
        })
        .collect();
    // power-mean monotonicity: a clear exponent clears every smaller one
    let mut any_clear_above = false;
    for row in rows.iter_mut().rev() {
        any_clear_above |= row.violated == 0;
        row.clear = any_clear_above;
    }
    let largest_clear = rows.iter().filter(|r| r.clear).map(|r| r.exponent).next_back();
    Ok(ExponentScan { rows, largest_clear, triples: triples.len() })
}

/// Runs [`bm_check`] on every triple, one independent seed per triple.
pub fn bm_batch(mu: &LogConcaveDensity, triples: &[BodyTriple], c: f64, opts: &BMOptions) -> Result<Vec<BMCheckResult>> {
    triples
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let o = BMOptions { sampler: opts.sampler.with_seed(opts.sampler.seed.wrapping_add(i as u64)), ..opts.clone() };
            bm_check(mu, &t.k, &t.l, t.lambda, c, &o)
        })
        .collect()
}

/// Classical Brunn–Minkowski through `μ` = normalized Lebesgue measure on a
/// box containing `K` and `L`: the check at `c = 1/n`.
pub fn lebesgue_recovery(triple: &BodyTriple, count: usize, seed: u64) -> Result<BMCheckResult> {
    let n = triple.k.dim();
    let hk = triple.k.bounding_half_widths();
    let hl = triple.l.bounding_half_widths();
    let w: Vec<f64> = hk.iter().zip(&hl).map(|(a, b)| a.max(*b)).collect();
    let mu = LogConcaveDensity::uniform(ConvexBody::boxed(w)?)?;
    let opts = BMOptions::new(&mu, count, seed);
    bm_check(&mu, &triple.k, &triple.l, triple.lambda, 1.0 / n as f64, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::std_normal_cdf;

    #[test]
    fn default_exponents() {
        assert!((default_exponent(2).unwrap() - 1.0 / (8.0 * 2f64.ln())).abs() < 1e-15);
        assert!((default_exponent(2).unwrap() - 0.1803).abs() < 1e-4);
        assert!((default_exponent(10).unwrap() - 1.0 / (1000.0 * 10f64.ln())).abs() < 1e-18);
        assert!(default_exponent(1).is_err());
        assert_eq!(parse_exponent("conjecture", 4).unwrap(), 0.25);
        assert_eq!(parse_exponent("0.3", 4).unwrap(), 0.3);
        assert!(parse_exponent("nope", 4).is_err());
    }

    #[test]
    fn identical_bodies_have_zero_margin() {
        let mu = LogConcaveDensity::gaussian(2);
        let k = ConvexBody::cube(2, 1.0).unwrap();
        let r = bm_check(&mu, &k, &k, 0.3, 0.5, &BMOptions::new(&mu, 20_000, 1)).unwrap();
        assert_eq!(r.margin, 0.0);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        for lambda in [0.0, 1.0] {
            let l = ConvexBody::ball(2, 2.0).unwrap();
            let r = bm_check(&mu, &k, &l, lambda, 0.5, &BMOptions::new(&mu, 20_000, 1)).unwrap();
            assert_eq!(r.margin, 0.0);
        }
    }

    #[test]
    fn gaussian_line_matches_cdf_oracle() {
        let mu = LogConcaveDensity::gaussian(1);
        let k = ConvexBody::cube(1, 1.0).unwrap();
        let l = ConvexBody::cube(1, 2.0).unwrap();
        let mass = |a: f64| 2.0 * std_normal_cdf(a) - 1.0;
        let exact = mass(1.5) - 0.5 * mass(1.0) - 0.5 * mass(2.0);
        assert!(exact > 0.0);
        let r = bm_check(&mu, &k, &l, 0.5, 1.0, &BMOptions::new(&mu, 200_000, 2)).unwrap();
        assert!((r.margin - exact).abs() < 4.0 * r.error, "{} vs {exact} ± {}", r.margin, r.error);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn gaussian_plane_conjectured_exponent() {
        let mu = LogConcaveDensity::gaussian(2);
        let mut rng = block_rng(5, 0, 0);
        for i in 0..5 {
            let k = random_polytope(&mut rng, 2, 1.0).unwrap();
            let l = random_polytope(&mut rng, 2, 1.0).unwrap();
            let r = bm_check(&mu, &k, &l, 0.4, 0.5, &BMOptions::new(&mu, 20_000, i)).unwrap();
            assert_ne!(r.verdict, Verdict::Violated, "{r:?}");
        }
    }

    #[test]
    fn tiny_masses_are_rejected() {
        let mu = LogConcaveDensity::gaussian(3);
        let k = ConvexBody::ball(3, 0.01).unwrap();
        let err = bm_check(&mu, &k, &k, 0.5, 0.5, &BMOptions::new(&mu, 1000, 1)).unwrap_err();
        assert_eq!(err.name(), "MassTooSmall");
    }

    #[test]
    fn rejects_uncentred_measure() {
        let mu = LogConcaveDensity::product_centered_exp(2);
        let k = ConvexBody::cube(2, 1.0).unwrap();
        assert_eq!(bm_check(&mu, &k, &k, 0.5, 0.5, &BMOptions::new(&mu, 1000, 1)).unwrap_err().name(), "NotCentered");
    }

    #[test]
    fn exponent_monotonicity_on_mass_triples() {
        let mu = LogConcaveDensity::gaussian(3);
        let triples = random_triples(3, 10, 9).unwrap();
        let opts = BMOptions::new(&mu, 5000, 3);
        for t in &triples {
            let m = mass_triple(&mu, &t.k, &t.l, t.lambda, opts.count, &opts.sampler, opts.membership).unwrap();
            let grid = [0.01, 0.05, 0.1, 0.2, 1.0 / 3.0, 0.5, 1.0];
            for w in grid.windows(2) {
                if m.margin(t.lambda, w[1]).0 >= 0.0 {
                    assert!(m.margin(t.lambda, w[0]).0 >= 0.0);
                }
            }
        }
    }

    #[test]
    fn scan_reports_monotone_rows() {
        let mu = LogConcaveDensity::gaussian(2);
        let triples = random_triples(2, 20, 4).unwrap();
        let grid: Vec<f64> = (1..=10).map(|k| 0.1 * k as f64).collect();
        let s = concavity_exponent_scan(&mu, &triples, &grid, &BMOptions::new(&mu, 20_000, 8)).unwrap();
        assert!(s.largest_clear.unwrap() >= 0.4, "{s:?}");
        let first = s.rows.iter().position(|r| !r.clear).unwrap_or(s.rows.len());
        assert!(s.rows[first..].iter().all(|r| !r.clear));
    }

    #[test]
    fn lebesgue_recovers_classical_inequality() {
        for t in random_triples(3, 10, 21).unwrap() {
            let r = lebesgue_recovery(&t, 20_000, 2).unwrap();
            assert!(r.margin >= -3.0 * r.error, "{r:?}");
        }
    }
}
