//! Symmetric convex bodies: support, gauge and radial functions, polars,
//! Minkowski combinations, volume and surface area.

mod gjk;
mod polytope;
mod sampling;

use std::sync::Arc;

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

pub use gjk::{contains as gjk_contains, distance as gjk_distance, GjkDistance};
pub use polytope::{convex_hull_2d, Facet, Polytope};
pub use sampling::{is_convex_region, unit_direction, ConvexityVerdict};

use crate::error::{LcError, Result};
use crate::linalg::{dot, norm};
use crate::scalar::Real;
use crate::special;

/// How membership in a support-function-only body is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// Exact: GJK distance from the query point using support points.
    Gjk,
    /// Outer approximation: `⟨x,u⟩ <= h(u)` over a fixed net of directions.
    DirectionNet { size: usize },
}

/// A body known only through the support function `Σ λ_i h_{K_i}`.
#[derive(Debug, Clone)]
pub struct SupportOracle<T: Real> {
    terms: Vec<(T, ConvexBody<T>)>,
    membership: Membership,
    net: Vec<(Vec<T>, T)>,
}

impl<T: Real> SupportOracle<T> {
    pub fn new(terms: Vec<(T, ConvexBody<T>)>, membership: Membership) -> Result<Self> {
        let dim = terms.first().map(|t| t.1.dim()).ok_or_else(|| LcError::InvalidParameter("empty combination".into()))?;
        if let Some(t) = terms.iter().find(|t| t.1.dim() != dim) {
            return Err(LcError::DimensionMismatch { expected: dim, got: t.1.dim() });
        }
        if terms.iter().any(|t| t.0 < T::zero()) || terms.iter().all(|t| t.0 == T::zero()) {
            return Err(LcError::InvalidParameter("combination weights must be nonnegative and not all zero".into()));
        }
        let mut oracle = SupportOracle { terms, membership, net: Vec::new() };
        if let Membership::DirectionNet { size } = membership {
            oracle.net = direction_net(dim, size)
                .into_iter()
                .map(|u| {
                    let h = oracle.support(&u);
                    (u, h)
                })
                .collect();
        }
        Ok(oracle)
    }

    pub fn terms(&self) -> &[(T, ConvexBody<T>)] {
        &self.terms
    }

    pub fn membership(&self) -> Membership {
        self.membership
    }

    pub fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    pub fn support(&self, u: &[T]) -> T {
        self.terms.iter().map(|(l, k)| *l * k.support(u)).sum()
    }

    pub fn support_point(&self, u: &[T]) -> Vec<T> {
        let mut p = vec![T::zero(); self.dim()];
        for (l, k) in &self.terms {
            for (a, b) in p.iter_mut().zip(k.support_point(u)) {
                *a = *a + *l * b;
            }
        }
        p
    }

    fn scale(&self) -> T {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut e = vec![T::zero(); n];
                e[i] = T::one();
                self.support(&e)
            })
            .fold(T::zero(), T::max)
    }

    pub fn contains(&self, x: &[T]) -> bool {
        match self.membership {
            Membership::Gjk => {
                let tol = T::geom_eps() * self.scale();
                gjk_contains(|u: &[T]| self.support_point(u), x, tol, 200)
            }
            Membership::DirectionNet { .. } => {
                let slack = T::geom_eps() * norm(x).max(T::one());
                self.net.iter().all(|(u, h)| dot(u, x) <= *h + slack)
            }
        }
    }

    fn gauge(&self, x: &[T]) -> T {
        let r = norm(x);
        if r == T::zero() {
            return T::zero();
        }
        match self.membership {
            Membership::DirectionNet { .. } => self.net.iter().map(|(u, h)| dot(u, x) / *h).fold(T::zero(), T::max),
            Membership::Gjk => {
                // conservative advancement along the ray: each supporting
                // halfspace at the nearest point gives an upper bound on ϱ
                let theta: Vec<T> = x.iter().map(|&v| v / r).collect();
                let scale = self.scale();
                let tol = T::lit(1e-2) * T::geom_eps() * scale;
                let mut t = self.support(&theta);
                for _ in 0..100 {
                    let y: Vec<T> = theta.iter().map(|&v| v * t).collect();
                    let d = gjk_distance(|u: &[T]| self.support_point(u), &y, tol, 500);
                    if d.upper <= tol {
                        break;
                    }
                    let nu: Vec<T> = y.iter().zip(&d.closest).map(|(a, b)| *a - *b).collect();
                    let next = self.support(&nu) / dot(&nu, &theta);
                    if !(next < t) || t - next <= T::epsilon() * T::lit(4.0) * t {
                        t = next.min(t);
                        break;
                    }
                    t = next;
                }
                r / t
            }
        }
    }

    /// `∇‖·‖(x) = ν/h(ν)` with `ν` the outer normal at the boundary point on
    /// the ray through `x`.
    fn gauge_gradient(&self, x: &[T]) -> Vec<T> {
        let g = self.gauge(x);
        if g == T::zero() {
            return vec![T::zero(); x.len()];
        }
        let step = T::one() + T::lit(1e-4);
        let outside: Vec<T> = x.iter().map(|&v| v / g * step).collect();
        let normal = match self.membership {
            Membership::DirectionNet { .. } => {
                let best = self
                    .net
                    .iter()
                    .max_by(|a, b| (dot(&a.0, x) / a.1).partial_cmp(&(dot(&b.0, x) / b.1)).unwrap())
                    .unwrap();
                best.0.clone()
            }
            Membership::Gjk => {
                let tol = T::lit(1e-2) * T::geom_eps() * self.scale();
                let closest = gjk_distance(|u: &[T]| self.support_point(u), &outside, tol, 500).closest;
                let d: Vec<T> = outside.iter().zip(&closest).map(|(a, b)| *a - *b).collect();
                crate::linalg::normalized(&d).unwrap_or_else(|| x.iter().map(|&v| v / norm(x)).collect())
            }
        };
        let h = self.support(&normal);
        normal.into_iter().map(|v| v / h).collect()
    }
}

/// Deterministic direction net: coordinate axes, diagonals and seeded
/// Gaussian directions, `size` in total.
pub fn direction_net<T: Real>(dim: usize, size: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(size.max(2 * dim));
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![T::zero(); dim];
            e[i] = T::lit(s);
            out.push(e);
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6e65_7464_6972);
    while out.len() < size {
        let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let l = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        out.push(g.iter().map(|v| T::lit(v / l)).collect());
    }
    out
}

#[derive(Debug, Clone)]
pub enum ConvexBody<T: Real> {
    EuclideanBall { dim: usize, radius: T },
    Box { half_widths: Vec<T> },
    /// `{x : |x|_p <= radius}`, `p` in `[1, ∞]`.
    LpBall { dim: usize, p: T, radius: T },
    HPolytope(Arc<Polytope<T>>),
    VPolytope(Arc<Polytope<T>>),
    Oracle(Arc<SupportOracle<T>>),
}

fn positive<T: Real>(v: T, what: &str) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(LcError::InvalidParameter(format!("{what} must be positive and finite")))
    }
}

impl<T: Real> ConvexBody<T> {
    pub fn ball(dim: usize, radius: T) -> Result<Self> {
        positive(radius, "radius")?;
        if dim == 0 {
            return Err(LcError::InvalidParameter("dimension must be positive".into()));
        }
        Ok(ConvexBody::EuclideanBall { dim, radius })
    }

    pub fn cube(dim: usize, half_width: T) -> Result<Self> {
        Self::boxed(vec![half_width; dim])
    }

    pub fn boxed(half_widths: Vec<T>) -> Result<Self> {
        if half_widths.is_empty() {
            return Err(LcError::InvalidParameter("dimension must be positive".into()));
        }
        for &w in &half_widths {
            positive(w, "half-width")?;
        }
        Ok(ConvexBody::Box { half_widths })
    }

    pub fn lp_ball(dim: usize, p: T, radius: T) -> Result<Self> {
        positive(radius, "radius")?;
        if !(p >= T::one()) || dim == 0 {
            return Err(LcError::InvalidParameter("LpBall needs p >= 1 and positive dimension".into()));
        }
        Ok(ConvexBody::LpBall { dim, p, radius })
    }

    /// Symmetric polytope from vertices; the list must be closed under negation.
    pub fn v_polytope(vertices: &[Vec<T>]) -> Result<Self> {
        let p = Polytope::from_points(vertices)?;
        let tol = T::lit(1e3) * T::geom_eps();
        let closed = vertices.iter().all(|v| {
            let neg: Vec<T> = v.iter().map(|&x| -x).collect();
            vertices.iter().any(|w| w.iter().zip(&neg).all(|(a, b)| (*a - *b).abs() <= tol * a.abs().max(T::one())))
        });
        if !closed {
            return Err(LcError::InvalidParameter("VPolytope vertex list must be closed under negation".into()));
        }
        Ok(ConvexBody::VPolytope(Arc::new(p)))
    }

    /// Symmetric polytope from vertices `±v` for each given `v`.
    pub fn v_polytope_symmetric(half: &[Vec<T>]) -> Result<Self> {
        let mut all = half.to_vec();
        all.extend(half.iter().map(|v| v.iter().map(|&x| -x).collect::<Vec<T>>()));
        Self::v_polytope(&all)
    }

    /// `{x : ⟨n_i,x⟩ <= b_i}`; every normal must have a partner `−n_i` with the same offset.
    pub fn h_polytope(normals: &[Vec<T>], offsets: &[T]) -> Result<Self> {
        let p = Polytope::from_halfspaces(normals, offsets)?;
        if !p.is_symmetric() {
            return Err(LcError::InvalidParameter("HPolytope halfspaces must come in ± pairs".into()));
        }
        Ok(ConvexBody::HPolytope(Arc::new(p)))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::EuclideanBall { dim, .. } | ConvexBody::LpBall { dim, .. } => *dim,
            ConvexBody::Box { half_widths } => half_widths.len(),
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.dim(),
            ConvexBody::Oracle(o) => o.dim(),
        }
    }

    /// `K = −K`.
    pub fn is_symmetric(&self) -> bool {
        match self {
            ConvexBody::EuclideanBall { .. } | ConvexBody::Box { .. } | ConvexBody::LpBall { .. } => true,
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.is_symmetric(),
            ConvexBody::Oracle(o) => o.terms().iter().all(|(_, b)| b.is_symmetric()),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            ConvexBody::EuclideanBall { .. } => "EuclideanBall",
            ConvexBody::Box { .. } => "Box",
            ConvexBody::LpBall { .. } => "LpBall",
            ConvexBody::HPolytope(_) => "HPolytope",
            ConvexBody::VPolytope(_) => "VPolytope",
            ConvexBody::Oracle(_) => "SupportOracle",
        }
    }

    /// `h_K(u) = max_{y∈K} ⟨u,y⟩`.
    pub fn support(&self, u: &[T]) -> T {
        match self {
            ConvexBody::EuclideanBall { radius, .. } => *radius * norm(u),
            ConvexBody::Box { half_widths } => half_widths.iter().zip(u).map(|(w, x)| *w * x.abs()).sum(),
            ConvexBody::LpBall { p, radius, .. } => *radius * lp_norm(u, conjugate(*p)),
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.support(u),
            ConvexBody::Oracle(o) => o.support(u),
        }
    }

    /// A maximizer of `⟨u,·⟩` over `K`.
    pub fn support_point(&self, u: &[T]) -> Vec<T> {
        let sgn = |v: T| if v >= T::zero() { T::one() } else { -T::one() };
        match self {
            ConvexBody::EuclideanBall { radius, dim } => {
                let l = norm(u);
                if l == T::zero() {
                    let mut e = vec![T::zero(); *dim];
                    e[0] = *radius;
                    e
                } else {
                    u.iter().map(|&v| *radius * v / l).collect()
                }
            }
            ConvexBody::Box { half_widths } => half_widths.iter().zip(u).map(|(w, &v)| *w * sgn(v)).collect(),
            ConvexBody::LpBall { p, radius, .. } => {
                let q = conjugate(*p);
                if q.is_infinite() {
                    // p = 1: a vertex ±r e_i
                    let i = argmax_abs(u);
                    let mut e = vec![T::zero(); u.len()];
                    e[i] = *radius * sgn(u[i]);
                    e
                } else if *p == T::infinity() {
                    u.iter().map(|&v| *radius * sgn(v)).collect()
                } else {
                    let nq = lp_norm(u, q);
                    if nq == T::zero() {
                        let mut e = vec![T::zero(); u.len()];
                        e[0] = *radius;
                        return e;
                    }
                    u.iter().map(|&v| *radius * sgn(v) * (v.abs() / nq).powf(q - T::one())).collect()
                }
            }
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.support_point(u),
            ConvexBody::Oracle(o) => o.support_point(u),
        }
    }

    /// Minkowski functional `‖x‖_K = inf{t > 0 : x ∈ tK}`.
    pub fn gauge(&self, x: &[T]) -> T {
        match self {
            ConvexBody::EuclideanBall { radius, .. } => norm(x) / *radius,
            ConvexBody::Box { half_widths } => half_widths.iter().zip(x).map(|(w, v)| v.abs() / *w).fold(T::zero(), T::max),
            ConvexBody::LpBall { p, radius, .. } => lp_norm(x, *p) / *radius,
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.gauge(x),
            ConvexBody::Oracle(o) => o.gauge(x),
        }
    }

    /// Radial function `ϱ_K(x) = 1/‖x‖_K`.
    pub fn radial(&self, x: &[T]) -> T {
        T::one() / self.gauge(x)
    }

    pub fn contains(&self, x: &[T]) -> bool {
        match self {
            ConvexBody::Oracle(o) => o.contains(x),
            _ => self.gauge(x) <= T::one() + T::geom_eps(),
        }
    }

    /// A gradient of the gauge; on facet boundaries the lowest-index active
    /// facet (or coordinate) is used.
    pub fn gauge_gradient(&self, x: &[T]) -> Vec<T> {
        let n = x.len();
        let sgn = |v: T| if v >= T::zero() { T::one() } else { -T::one() };
        match self {
            ConvexBody::EuclideanBall { radius, .. } => {
                let l = norm(x);
                if l == T::zero() {
                    vec![T::zero(); n]
                } else {
                    x.iter().map(|&v| v / (l * *radius)).collect()
                }
            }
            ConvexBody::Box { half_widths } => {
                let mut best = 0;
                let mut bv = T::neg_infinity();
                for (i, (w, v)) in half_widths.iter().zip(x).enumerate() {
                    if v.abs() / *w > bv {
                        bv = v.abs() / *w;
                        best = i;
                    }
                }
                let mut g = vec![T::zero(); n];
                g[best] = sgn(x[best]) / half_widths[best];
                g
            }
            ConvexBody::LpBall { p, radius, .. } => {
                if *p == T::infinity() {
                    let i = argmax_abs(x);
                    let mut g = vec![T::zero(); n];
                    g[i] = sgn(x[i]) / *radius;
                    g
                } else if *p == T::one() {
                    x.iter().map(|&v| sgn(v) / *radius).collect()
                } else {
                    let np = lp_norm(x, *p);
                    if np == T::zero() {
                        return vec![T::zero(); n];
                    }
                    x.iter().map(|&v| sgn(v) * (v.abs() / np).powf(*p - T::one()) / *radius).collect()
                }
            }
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => {
                let f = &p.facets()[p.active_facet(x)];
                f.normal.iter().map(|&v| v / f.offset).collect()
            }
            ConvexBody::Oracle(o) => o.gauge_gradient(x),
        }
    }

    /// `tK`.
    pub fn scaled(&self, t: T) -> Result<Self> {
        positive(t, "scale factor")?;
        Ok(match self {
            ConvexBody::EuclideanBall { dim, radius } => ConvexBody::EuclideanBall { dim: *dim, radius: *radius * t },
            ConvexBody::Box { half_widths } => ConvexBody::Box { half_widths: half_widths.iter().map(|&w| w * t).collect() },
            ConvexBody::LpBall { dim, p, radius } => ConvexBody::LpBall { dim: *dim, p: *p, radius: *radius * t },
            ConvexBody::HPolytope(p) => ConvexBody::HPolytope(Arc::new(p.scaled(t))),
            ConvexBody::VPolytope(p) => ConvexBody::VPolytope(Arc::new(p.scaled(t))),
            ConvexBody::Oracle(o) => ConvexBody::Oracle(Arc::new(SupportOracle::new(
                o.terms.iter().map(|(l, k)| (*l * t, k.clone())).collect(),
                o.membership,
            )?)),
        })
    }

    /// Polar body `K° = {y : ⟨x,y⟩ <= 1 ∀x ∈ K}`.
    pub fn polar(&self) -> Result<Self> {
        Ok(match self {
            ConvexBody::EuclideanBall { dim, radius } => ConvexBody::EuclideanBall { dim: *dim, radius: T::one() / *radius },
            ConvexBody::LpBall { dim, p, radius } => ConvexBody::LpBall { dim: *dim, p: conjugate(*p), radius: T::one() / *radius },
            ConvexBody::Box { half_widths } => {
                let n = half_widths.len();
                let verts: Vec<Vec<T>> = (0..n)
                    .map(|i| {
                        let mut e = vec![T::zero(); n];
                        e[i] = T::one() / half_widths[i];
                        e
                    })
                    .collect();
                Self::v_polytope_symmetric(&verts)?
            }
            ConvexBody::HPolytope(p) => {
                let verts: Vec<Vec<T>> = p.facets().iter().map(|f| f.normal.iter().map(|&v| v / f.offset).collect()).collect();
                Self::v_polytope(&verts)?
            }
            ConvexBody::VPolytope(p) => {
                let normals: Vec<Vec<T>> = p.vertices().to_vec();
                let offsets = vec![T::one(); normals.len()];
                Self::h_polytope(&normals, &offsets)?
            }
            ConvexBody::Oracle(_) => return Err(LcError::UnsupportedVariant("polar of a support-oracle body".into())),
        })
    }

    fn as_vertices(&self) -> Option<Vec<Vec<T>>> {
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => Some(p.vertices().to_vec()),
            ConvexBody::Box { half_widths } => {
                let n = half_widths.len();
                Some(
                    (0..1usize << n)
                        .map(|m| (0..n).map(|i| if m >> i & 1 == 1 { half_widths[i] } else { -half_widths[i] }).collect())
                        .collect(),
                )
            }
            ConvexBody::LpBall { dim, p, radius } if *p == T::one() || *p == T::infinity() => {
                if *p == T::one() {
                    let n = *dim;
                    Some(
                        (0..2 * n)
                            .map(|k| {
                                let mut e = vec![T::zero(); n];
                                e[k / 2] = if k % 2 == 0 { *radius } else { -*radius };
                                e
                            })
                            .collect(),
                    )
                } else {
                    ConvexBody::Box { half_widths: vec![*radius; *dim] }.as_vertices()
                }
            }
            _ => None,
        }
    }

    /// `λK + (1−λ)L`, exact when representable, otherwise a support oracle
    /// with exact GJK membership.
    pub fn minkowski_combo(&self, other: &Self, lambda: T) -> Result<Self> {
        self.minkowski_combo_with(other, lambda, Membership::Gjk)
    }

    pub fn minkowski_combo_with(&self, other: &Self, lambda: T, membership: Membership) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(LcError::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(LcError::InvalidParameter("λ must lie in [0,1]".into()));
        }
        let mu = T::one() - lambda;
        if lambda == T::one() {
            return Ok(self.clone());
        }
        if lambda == T::zero() {
            return Ok(other.clone());
        }
        match (self, other) {
            (ConvexBody::EuclideanBall { dim, radius: a }, ConvexBody::EuclideanBall { radius: b, .. }) => {
                return Ok(ConvexBody::EuclideanBall { dim: *dim, radius: lambda * *a + mu * *b });
            }
            (ConvexBody::Box { half_widths: a }, ConvexBody::Box { half_widths: b }) => {
                return Ok(ConvexBody::Box { half_widths: a.iter().zip(b).map(|(x, y)| lambda * *x + mu * *y).collect() });
            }
            (ConvexBody::LpBall { dim, p, radius: a }, ConvexBody::LpBall { p: q, radius: b, .. }) if p == q => {
                return Ok(ConvexBody::LpBall { dim: *dim, p: *p, radius: lambda * *a + mu * *b });
            }
            _ => {}
        }
        if self.dim() <= 3 {
            if let (Some(va), Some(vb)) = (self.as_vertices(), other.as_vertices()) {
                let mut sums = Vec::with_capacity(va.len() * vb.len());
                for a in &va {
                    for b in &vb {
                        sums.push(a.iter().zip(b).map(|(x, y)| lambda * *x + mu * *y).collect::<Vec<T>>());
                    }
                }
                return Ok(ConvexBody::VPolytope(Arc::new(Polytope::from_points(&sums)?)));
            }
        }
        Ok(ConvexBody::Oracle(Arc::new(SupportOracle::new(
            vec![(lambda, self.clone()), (mu, other.clone())],
            membership,
        )?)))
    }

    /// Closed-form or exact-decomposition volume.
    pub fn volume_exact(&self) -> Result<T> {
        let n = self.dim();
        let nf = T::from_usize(n).unwrap();
        match self {
            ConvexBody::EuclideanBall { radius, .. } => Ok(T::lit(special::unit_ball_volume(n)) * radius.powi(n as i32)),
            ConvexBody::Box { half_widths } => Ok(half_widths.iter().map(|&w| w * T::lit(2.0)).fold(T::one(), |a, b| a * b)),
            ConvexBody::LpBall { p, radius, .. } => {
                Ok((T::lit(special::ln_lp_ball_volume(n, p.to_f64_lossy())) + nf * radius.ln()).exp())
            }
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.volume(),
            ConvexBody::Oracle(_) => Err(LcError::UnsupportedVariant("exact volume of a support-oracle body".into())),
        }
    }

    /// Closed-form or exact-decomposition surface area `H^{n−1}(∂K)`.
    pub fn surface_exact(&self) -> Result<T> {
        let n = self.dim();
        match self {
            ConvexBody::EuclideanBall { radius, .. } => Ok(T::lit(special::unit_sphere_area(n)) * radius.powi(n as i32 - 1)),
            ConvexBody::Box { half_widths } => {
                let two = T::lit(2.0);
                let mut s = T::zero();
                for i in 0..n {
                    let mut prod = T::one();
                    for (j, &w) in half_widths.iter().enumerate() {
                        if j != i {
                            prod = prod * two * w;
                        }
                    }
                    s = s + prod;
                }
                Ok(two * s)
            }
            ConvexBody::LpBall { p, radius, .. } => {
                let rn1 = radius.powi(n as i32 - 1);
                if *p == T::lit(2.0) {
                    Ok(T::lit(special::unit_sphere_area(n)) * rn1)
                } else if *p == T::infinity() {
                    ConvexBody::Box { half_widths: vec![*radius; n] }.surface_exact()
                } else if *p == T::one() {
                    // 2ⁿ simplex facets of (n−1)-volume √n/(n−1)!
                    let ln = (n as f64) * 2f64.ln() + 0.5 * (n as f64).ln() - special::ln_factorial(n - 1);
                    Ok(T::lit(ln.exp()) * rn1)
                } else if n == 1 {
                    Ok(T::lit(2.0))
                } else {
                    Err(LcError::UnsupportedVariant("closed-form surface of a general ℓ_p ball".into()))
                }
            }
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.surface_area(),
            ConvexBody::Oracle(_) => Err(LcError::UnsupportedVariant("exact surface of a support-oracle body".into())),
        }
    }

    /// `K̄ = vol(K)^{−1/n} K` using the exact volume.
    pub fn scale_to_unit_volume(&self) -> Result<Self> {
        let v = self.volume_exact()?;
        self.scaled(v.powf(-T::one() / T::from_usize(self.dim()).unwrap()))
    }

    /// Half-widths of the axis-aligned bounding box, `h_K(e_i)`.
    pub fn bounding_half_widths(&self) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut e = vec![T::zero(); n];
                e[i] = T::one();
                self.support(&e)
            })
            .collect()
    }

    /// Isoperimetric ratio `S(K)/vol(K)^{(n−1)/n}`.
    pub fn isoperimetric_ratio(&self) -> Result<T> {
        let n = T::from_usize(self.dim()).unwrap();
        Ok(self.surface_exact()? / self.volume_exact()?.powf((n - T::one()) / n))
    }
}

/// Hölder conjugate exponent, `1 ↔ ∞`.
pub fn conjugate<T: Real>(p: T) -> T {
    if p == T::one() {
        T::infinity()
    } else if p.is_infinite() {
        T::one()
    } else {
        p / (p - T::one())
    }
}

pub fn lp_norm<T: Real>(x: &[T], p: T) -> T {
    if p.is_infinite() {
        return x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    }
    let m = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if m == T::zero() {
        return T::zero();
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<T>().powf(T::one() / p)
}

fn argmax_abs<T: Real>(x: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[best].abs() {
            best = i;
        }
    }
    best
}
