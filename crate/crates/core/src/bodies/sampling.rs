//! Double-precision sampling on bodies and Monte Carlo fallbacks for volume,
//! surface area and boundary integrals.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ConvexBody;
use crate::error::{LcError, Result};
use crate::estimate::{block_rng, run_blocks, MCEstimate, Moments, DEFAULT_BLOCK};
use crate::linalg::norm;
use crate::region::Region;
use crate::special;

/// Outcome of the randomized convexity probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConvexityVerdict {
    /// No counterexample among `pairs` sampled pairs; not a proof.
    ConvexWitnessed { pairs: usize },
    NonConvexWitness { x: Vec<f64>, y: Vec<f64>, midpoint: Vec<f64> },
}

impl ConvexityVerdict {
    pub fn is_convex_witnessed(&self) -> bool {
        matches!(self, ConvexityVerdict::ConvexWitnessed { .. })
    }
}

/// Uniform direction on the unit sphere.
pub fn unit_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let l = norm(&g);
        if l > 1e-300 {
            return g.into_iter().map(|v| v / l).collect();
        }
    }
}

/// Probes convexity by testing midpoints of sampled pairs inside `bbox`.
pub fn is_convex_region<R: Region + ?Sized>(region: &R, bbox: &[f64], trials: usize, seed: u64) -> ConvexityVerdict {
    let mut rng = block_rng(seed, 0x636f_6e76, 0);
    let draw = |rng: &mut crate::estimate::Rng| -> Option<Vec<f64>> {
        for _ in 0..10_000 {
            let x: Vec<f64> = bbox.iter().map(|&w| rng.random_range(-w..=w)).collect();
            if region.contains(&x) {
                return Some(x);
            }
        }
        None
    };
    for done in 0..trials {
        let (Some(x), Some(y)) = (draw(&mut rng), draw(&mut rng)) else {
            return ConvexityVerdict::ConvexWitnessed { pairs: done };
        };
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        if !region.contains(&mid) {
            return ConvexityVerdict::NonConvexWitness { x, y, midpoint: mid };
        }
    }
    ConvexityVerdict::ConvexWitnessed { pairs: trials }
}

impl ConvexBody<f64> {
    /// A uniform point of `K`.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let n = self.dim();
        match self {
            ConvexBody::EuclideanBall { radius, .. } => {
                let u = unit_direction(rng, n);
                let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
                Ok(u.into_iter().map(|v| v * r).collect())
            }
            ConvexBody::Box { half_widths } => Ok(half_widths.iter().map(|&w| rng.random_range(-w..w)).collect()),
            ConvexBody::LpBall { p, radius, .. } if p.is_infinite() => Ok((0..n).map(|_| rng.random_range(-radius..*radius)).collect()),
            ConvexBody::LpBall { p, radius, .. } => {
                // Barthe–Guédon–Mendelson–Naor representation
                let gamma = Gamma::new(1.0 / p, 1.0).map_err(|e| LcError::InvalidParameter(e.to_string()))?;
                let g: Vec<f64> = (0..n)
                    .map(|_| {
                        let m: f64 = gamma.sample(rng);
                        let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        s * m.powf(1.0 / p)
                    })
                    .collect();
                let z: f64 = Exp1.sample(rng);
                let denom = (g.iter().map(|v| v.abs().powf(*p)).sum::<f64>() + z).powf(1.0 / p);
                Ok(g.into_iter().map(|v| radius * v / denom).collect())
            }
            _ => {
                let w = self.bounding_half_widths();
                for _ in 0..1_000_000 {
                    let x: Vec<f64> = w.iter().map(|&h| rng.random_range(-h..h)).collect();
                    if self.contains(&x) {
                        return Ok(x);
                    }
                }
                Err(LcError::RejectionStall { rate: 0.0 })
            }
        }
    }

    /// `∫_{∂K} φ dH^{n−1}` by Monte Carlo.
    ///
    /// Balls, boxes and polytopes in `n <= 3` are sampled uniformly on their
    /// surface; other bodies use the radial parametrization
    /// `θ ↦ θ/‖θ‖_K`, i.e. `nω_n E_σ[φ(θ/‖θ‖) |∇‖θ‖| / ‖θ‖ⁿ]`.
    pub fn boundary_integral<F>(&self, phi: F, samples: usize, seed: u64) -> MCEstimate
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let n = self.dim();
        if n == 1 {
            let w = self.support(&[1.0]);
            return MCEstimate::exact(phi(&[w]) + phi(&[-w]));
        }
        let pieces = self.surface_pieces();
        let parts = run_blocks(samples, DEFAULT_BLOCK, seed, 0x6264_7279, |rng, count, _| {
            let mut m = Moments::new(1);
            for _ in 0..count {
                let v = match &pieces {
                    Some(p) => p.total * phi(&p.draw(rng)),
                    None => {
                        let th = unit_direction(rng, n);
                        let g = self.gauge(&th);
                        let grad = norm(&self.gauge_gradient(&th));
                        let y: Vec<f64> = th.iter().map(|v| v / g).collect();
                        special::unit_sphere_area(n) * phi(&y) * grad / g.powi(n as i32)
                    }
                };
                m.push(&[v]);
            }
            m
        });
        crate::estimate::merge_all(parts, 1).estimate(0, seed)
    }

    fn surface_pieces(&self) -> Option<SurfacePieces> {
        let n = self.dim();
        let pieces: Vec<(f64, Piece)> = match self {
            ConvexBody::EuclideanBall { radius, .. } => vec![(special::unit_sphere_area(n) * radius.powi(n as i32 - 1), Piece::Sphere { radius: *radius, dim: n })],
            ConvexBody::Box { half_widths } => {
                let mut v = Vec::new();
                for i in 0..n {
                    let face: f64 = half_widths.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, w)| 2.0 * w).product();
                    for s in [-1.0, 1.0] {
                        v.push((face, Piece::BoxFace { half_widths: half_widths.clone(), axis: i, sign: s }));
                    }
                }
                v
            }
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) if n == 2 => p
                .facets()
                .iter()
                .filter(|f| f.vertex_ids.len() >= 2)
                .map(|f| {
                    let pts: Vec<&Vec<f64>> = f.vertex_ids.iter().map(|&i| &p.vertices()[i]).collect();
                    let mut best = (0.0, 0, 0);
                    for (i, a) in pts.iter().enumerate() {
                        for (j, b) in pts.iter().enumerate() {
                            let d = norm(&crate::linalg::sub(a, b));
                            if d > best.0 {
                                best = (d, i, j);
                            }
                        }
                    }
                    (best.0, Piece::Segment(pts[best.1].clone(), pts[best.2].clone()))
                })
                .collect(),
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) if n == 3 => p
                .facets()
                .iter()
                .flat_map(|f| p.triangulate_facet(f))
                .map(|(a, b, c, area)| (area, Piece::Triangle(a, b, c)))
                .collect(),
            _ => return None,
        };
        let total: f64 = pieces.iter().map(|p| p.0).sum();
        let mut acc = 0.0;
        let cumulative = pieces
            .iter()
            .map(|p| {
                acc += p.0 / total;
                acc
            })
            .collect();
        Some(SurfacePieces { total, cumulative, pieces: pieces.into_iter().map(|p| p.1).collect() })
    }

    /// Exact volume where available, otherwise `ω_n E_σ[‖θ‖^{−n}]` by Monte Carlo.
    pub fn volume(&self, samples: usize, seed: u64) -> MCEstimate {
        if let Ok(v) = self.volume_exact() {
            return MCEstimate::exact(v);
        }
        let n = self.dim();
        let omega = special::unit_ball_volume(n);
        let parts = run_blocks(samples, DEFAULT_BLOCK, seed, 0x766f_6c75, |rng, count, _| {
            let mut m = Moments::new(1);
            for _ in 0..count {
                let th = unit_direction(rng, n);
                m.push(&[omega * self.gauge(&th).powi(-(n as i32))]);
            }
            m
        });
        let mut est = crate::estimate::merge_all(parts, 1).estimate(0, seed);
        est.seed = seed;
        est
    }

    /// Exact surface area where available, otherwise the radial Monte Carlo formula.
    pub fn surface(&self, samples: usize, seed: u64) -> MCEstimate {
        if let Ok(s) = self.surface_exact() {
            return MCEstimate::exact(s);
        }
        self.boundary_integral(|_| 1.0, samples, seed)
    }

    /// `K̄` using exact volume if possible, else the Monte Carlo estimate.
    pub fn scale_to_unit_volume_mc(&self, samples: usize, seed: u64) -> Result<(ConvexBody<f64>, MCEstimate)> {
        let v = self.volume(samples, seed);
        Ok((self.scaled(v.value.powf(-1.0 / self.dim() as f64))?, v))
    }

    /// `vol_{n−1}` of the orthogonal projection onto `u^⊥` (`u` unit).
    pub fn projection_volume(&self, u: &[f64]) -> Result<f64> {
        let n = self.dim();
        match self {
            ConvexBody::EuclideanBall { radius, .. } => Ok(special::unit_ball_volume(n - 1) * radius.powi(n as i32 - 1)),
            ConvexBody::Box { half_widths } => {
                let mut s = 0.0;
                for i in 0..n {
                    let face: f64 = half_widths.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, w)| 2.0 * w).product();
                    s += face * u[i].abs();
                }
                Ok(s)
            }
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) if n <= 3 => {
                let areas = p.facet_areas()?;
                Ok(0.5 * p.facets().iter().zip(areas).map(|(f, a)| a * crate::linalg::dot(&f.normal, u).abs()).sum::<f64>())
            }
            _ if n == 2 => {
                // width of K in the direction orthogonal to u
                let v = [-u[1], u[0]];
                Ok(2.0 * self.support(&v))
            }
            _ => Err(LcError::UnsupportedVariant(format!("projection volume of {}", self.variant_name()))),
        }
    }
}

enum Piece {
    Sphere { radius: f64, dim: usize },
    BoxFace { half_widths: Vec<f64>, axis: usize, sign: f64 },
    Segment(Vec<f64>, Vec<f64>),
    Triangle(Vec<f64>, Vec<f64>, Vec<f64>),
}

/// A surface split into pieces that can each be sampled uniformly.
struct SurfacePieces {
    total: f64,
    cumulative: Vec<f64>,
    pieces: Vec<Piece>,
}

impl SurfacePieces {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let u: f64 = rng.random();
        let k = self.cumulative.partition_point(|c| *c < u).min(self.pieces.len() - 1);
        match &self.pieces[k] {
            Piece::Sphere { radius, dim } => unit_direction(rng, *dim).into_iter().map(|v| v * radius).collect(),
            Piece::BoxFace { half_widths, axis, sign } => half_widths
                .iter()
                .enumerate()
                .map(|(j, &w)| if j == *axis { sign * w } else { rng.random_range(-w..w) })
                .collect(),
            Piece::Segment(a, b) => {
                let t: f64 = rng.random();
                a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
            }
            Piece::Triangle(a, b, c) => {
                let (mut s, mut t): (f64, f64) = (rng.random(), rng.random());
                if s + t > 1.0 {
                    s = 1.0 - s;
                    t = 1.0 - t;
                }
                (0..3).map(|j| a[j] + s * (b[j] - a[j]) + t * (c[j] - a[j])).collect()
            }
        }
    }
}
