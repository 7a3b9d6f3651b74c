//! Symmetric polytopes held in both vertex and facet form.
//!
//! Conversions are brute force over `n`-subsets, which is fine for the
//! vertex/facet counts used here (tens of elements, `n <= 4`).

use crate::error::{LcError, Result};
use crate::linalg::{dot, norm, solve, sub};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Facet<T: Real> {
    /// Outer unit normal.
    pub normal: Vec<T>,
    /// Distance of the supporting hyperplane from the origin (positive).
    pub offset: T,
    /// Indices into the polytope's vertex list lying on this facet.
    pub vertex_ids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope<T: Real> {
    dim: usize,
    vertices: Vec<Vec<T>>,
    facets: Vec<Facet<T>>,
}

fn scale_of<T: Real>(pts: &[Vec<T>]) -> T {
    pts.iter().fold(T::zero(), |m, p| m.max(norm(p)))
}

fn push_unique<T: Real>(pts: &mut Vec<Vec<T>>, p: Vec<T>, tol: T) {
    if !pts.iter().any(|q| norm(&sub(q, &p)) <= tol) {
        pts.push(p);
    }
}

/// Determinant by elimination.
fn det<T: Real>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut d = T::one();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap());
        let piv = match piv {
            Some(p) => p,
            None => return T::zero(),
        };
        if m[piv][c] == T::zero() {
            return T::zero();
        }
        if piv != c {
            m.swap(piv, c);
            d = -d;
        }
        d = d * m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                let v = m[c][k];
                m[r][k] = m[r][k] - f * v;
            }
        }
    }
    d
}

/// Normal of the hyperplane through `n` points in `ℝⁿ` (generalized cross
/// product of the edge vectors); `None` if the points are affinely dependent.
fn hyperplane_normal<T: Real>(pts: &[&Vec<T>]) -> Option<Vec<T>> {
    let n = pts[0].len();
    let edges: Vec<Vec<T>> = pts[1..].iter().map(|p| sub(p, pts[0])).collect();
    let mut normal = Vec::with_capacity(n);
    for j in 0..n {
        let minor: Vec<Vec<T>> = edges
            .iter()
            .map(|e| e.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &v)| v).collect())
            .collect();
        let d = if minor.is_empty() { T::one() } else { det(minor) };
        normal.push(if j % 2 == 0 { d } else { -d });
    }
    let len = norm(&normal);
    let scale = edges.iter().fold(T::one(), |acc, e| acc * norm(e).max(T::min_positive_value()));
    if len <= T::geom_eps() * scale {
        None
    } else {
        Some(normal.into_iter().map(|v| v / len).collect())
    }
}

fn combinations(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Andrew's monotone chain; returns hull vertices counter-clockwise without
/// collinear points.
pub fn convex_hull_2d<T: Real>(points: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut pts: Vec<Vec<T>> = points.to_vec();
    pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap()));
    let tol = T::geom_eps() * scale_of(&pts).max(T::one());
    let cross = |o: &Vec<T>, a: &Vec<T>, b: &Vec<T>| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<Vec<T>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= tol * tol {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<T>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= tol * tol {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl<T: Real> Polytope<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<T>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet<T>] {
        &self.facets
    }

    /// Convex hull of a point set that must contain the origin in its interior.
    pub fn from_points(points: &[Vec<T>]) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).ok_or_else(|| LcError::InvalidParameter("empty vertex list".into()))?;
        if points.iter().any(|p| p.len() != dim) {
            return Err(LcError::InvalidParameter("vertices of mixed dimension".into()));
        }
        let tol = T::geom_eps() * scale_of(points).max(T::one());
        let mut pts: Vec<Vec<T>> = Vec::new();
        for p in points {
            push_unique(&mut pts, p.clone(), tol);
        }
        let poly = match dim {
            1 => {
                let hi = pts.iter().map(|p| p[0]).fold(T::neg_infinity(), T::max);
                let lo = pts.iter().map(|p| p[0]).fold(T::infinity(), T::min);
                Polytope {
                    dim,
                    vertices: vec![vec![hi], vec![lo]],
                    facets: vec![
                        Facet { normal: vec![T::one()], offset: hi, vertex_ids: vec![0] },
                        Facet { normal: vec![-T::one()], offset: -lo, vertex_ids: vec![1] },
                    ],
                }
            }
            2 => {
                let hull = convex_hull_2d(&pts);
                let m = hull.len();
                let mut facets = Vec::with_capacity(m);
                for i in 0..m {
                    let (a, b) = (&hull[i], &hull[(i + 1) % m]);
                    let e = sub(b, a);
                    let len = norm(&e);
                    let normal = vec![e[1] / len, -e[0] / len];
                    let offset = dot(&normal, a);
                    facets.push(Facet { normal, offset, vertex_ids: vec![i, (i + 1) % m] });
                }
                Polytope { dim, vertices: hull, facets }
            }
            _ => Self::hull_brute_force(&pts, dim, tol),
        };
        poly.validate_origin_interior()?;
        Ok(poly)
    }

    fn hull_brute_force(pts: &[Vec<T>], dim: usize, tol: T) -> Self {
        let mut planes: Vec<(Vec<T>, T)> = Vec::new();
        combinations(pts.len(), dim, |idx| {
            let sel: Vec<&Vec<T>> = idx.iter().map(|&i| &pts[i]).collect();
            let Some(mut normal) = hyperplane_normal(&sel) else { return };
            let mut offset = dot(&normal, sel[0]);
            if offset < T::zero() {
                normal.iter_mut().for_each(|v| *v = -*v);
                offset = -offset;
            }
            if offset <= tol {
                return;
            }
            if pts.iter().all(|p| dot(&normal, p) <= offset + tol)
                && !planes.iter().any(|(n, b)| norm(&sub(n, &normal)) <= T::lit(1e-7).max(tol) && (*b - offset).abs() <= tol)
            {
                planes.push((normal, offset));
            }
        });
        let on = |p: &Vec<T>, (n, b): &(Vec<T>, T)| (dot(n, p) - *b).abs() <= tol;
        let vertices: Vec<Vec<T>> = pts
            .iter()
            .filter(|p| planes.iter().filter(|pl| on(p, pl)).count() >= dim)
            .cloned()
            .collect();
        let facets = planes
            .into_iter()
            .map(|pl| {
                let ids = vertices.iter().enumerate().filter(|(_, v)| on(v, &pl)).map(|(i, _)| i).collect();
                Facet { normal: pl.0, offset: pl.1, vertex_ids: ids }
            })
            .collect();
        Polytope { dim, vertices, facets }
    }

    /// Polytope `{x : ⟨n_i, x⟩ <= b_i}`; normals need not be unit length.
    pub fn from_halfspaces(normals: &[Vec<T>], offsets: &[T]) -> Result<Self> {
        if normals.len() != offsets.len() || normals.is_empty() {
            return Err(LcError::InvalidParameter("normals and offsets must be nonempty and equal length".into()));
        }
        let dim = normals[0].len();
        let mut planes: Vec<(Vec<T>, T)> = Vec::with_capacity(normals.len());
        for (n, &b) in normals.iter().zip(offsets) {
            let len = norm(n);
            if n.len() != dim || len <= T::zero() || b <= T::zero() {
                return Err(LcError::InvalidParameter("halfspaces need nonzero normals and positive offsets".into()));
            }
            planes.push((n.iter().map(|&v| v / len).collect(), b / len));
        }
        let tol = T::geom_eps() * planes.iter().fold(T::one(), |m, p| m.max(p.1));
        let mut vertices: Vec<Vec<T>> = Vec::new();
        combinations(planes.len(), dim, |idx| {
            let m: Vec<Vec<T>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
            let rhs: Vec<T> = idx.iter().map(|&i| planes[i].1).collect();
            if let Some(x) = solve(&m, &rhs) {
                if planes.iter().all(|(n, b)| dot(n, &x) <= *b + tol) {
                    push_unique(&mut vertices, x, tol * T::lit(10.0));
                }
            }
        });
        if vertices.len() < dim + 1 {
            return Err(LcError::InvalidParameter("halfspaces do not bound a full-dimensional polytope".into()));
        }
        let vtol = tol * T::lit(10.0);
        let facets = planes
            .into_iter()
            .map(|(normal, offset)| {
                let ids = vertices.iter().enumerate().filter(|(_, v)| (dot(&normal, v) - offset).abs() <= vtol).map(|(i, _)| i).collect();
                Facet { normal, offset, vertex_ids: ids }
            })
            .collect();
        let poly = Polytope { dim, vertices, facets };
        poly.validate_origin_interior()?;
        Ok(poly)
    }

    fn validate_origin_interior(&self) -> Result<()> {
        if self.facets.len() < self.dim + 1 || self.facets.iter().any(|f| f.offset <= T::zero()) {
            return Err(LcError::InvalidParameter("origin must be an interior point".into()));
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        let tol = T::lit(1e3) * T::geom_eps() * scale_of(&self.vertices).max(T::one());
        self.vertices.iter().all(|v| {
            let neg: Vec<T> = v.iter().map(|&x| -x).collect();
            self.vertices.iter().any(|w| norm(&sub(w, &neg)) <= tol)
        })
    }

    pub fn support(&self, u: &[T]) -> T {
        self.vertices.iter().map(|v| dot(v, u)).fold(T::neg_infinity(), T::max)
    }

    pub fn support_point(&self, u: &[T]) -> Vec<T> {
        let mut best = 0;
        let mut bv = T::neg_infinity();
        for (i, v) in self.vertices.iter().enumerate() {
            let s = dot(v, u);
            if s > bv {
                bv = s;
                best = i;
            }
        }
        self.vertices[best].clone()
    }

    pub fn gauge(&self, x: &[T]) -> T {
        self.facets.iter().map(|f| dot(&f.normal, x) / f.offset).fold(T::zero(), T::max)
    }

    /// Index of the active facet (lowest index on ties).
    pub fn active_facet(&self, x: &[T]) -> usize {
        let mut best = 0;
        let mut bv = T::neg_infinity();
        for (i, f) in self.facets.iter().enumerate() {
            let v = dot(&f.normal, x) / f.offset;
            if v > bv {
                bv = v;
                best = i;
            }
        }
        best
    }

    pub fn scaled(&self, t: T) -> Self {
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().map(|&x| x * t).collect()).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet { normal: f.normal.clone(), offset: f.offset * t, vertex_ids: f.vertex_ids.clone() })
                .collect(),
        }
    }

    /// Polar polytope: vertices `n_i / b_i`.
    pub fn polar(&self) -> Result<Self> {
        let pts: Vec<Vec<T>> = self.facets.iter().map(|f| f.normal.iter().map(|&v| v / f.offset).collect()).collect();
        Polytope::from_points(&pts)
    }

    /// `(n-1)`-dimensional area of each facet; exact for `n <= 3`.
    pub fn facet_areas(&self) -> Result<Vec<T>> {
        match self.dim {
            1 => Ok(vec![T::one(); self.facets.len()]),
            2 => Ok(self
                .facets
                .iter()
                .map(|f| {
                    if f.vertex_ids.len() < 2 {
                        T::zero()
                    } else {
                        let pts: Vec<&Vec<T>> = f.vertex_ids.iter().map(|&i| &self.vertices[i]).collect();
                        let mut best = T::zero();
                        for a in &pts {
                            for b in &pts {
                                best = best.max(norm(&sub(a, b)));
                            }
                        }
                        best
                    }
                })
                .collect()),
            3 => Ok(self.facets.iter().map(|f| self.triangulate_facet(f).iter().map(|t| t.3).sum()).collect()),
            n => Err(LcError::DimensionTooLarge { what: "exact polytope surface", max: 3, n }),
        }
    }

    /// Fan triangulation `(a, b, c, area)` of a 3D facet, vertices ordered by
    /// angle around the centroid.
    pub fn triangulate_facet(&self, f: &Facet<T>) -> Vec<(Vec<T>, Vec<T>, Vec<T>, T)> {
        if f.vertex_ids.len() < 3 {
            return Vec::new();
        }
        let pts: Vec<Vec<T>> = f.vertex_ids.iter().map(|&i| self.vertices[i].clone()).collect();
        let k = T::from_usize(pts.len()).unwrap();
        let centroid: Vec<T> = (0..3).map(|j| pts.iter().map(|p| p[j]).sum::<T>() / k).collect();
        let e1 = crate::linalg::normalized(&sub(&pts[0], &centroid)).unwrap_or_else(|| vec![T::one(), T::zero(), T::zero()]);
        let nrm = &f.normal;
        let e2 = vec![
            nrm[1] * e1[2] - nrm[2] * e1[1],
            nrm[2] * e1[0] - nrm[0] * e1[2],
            nrm[0] * e1[1] - nrm[1] * e1[0],
        ];
        let mut ordered: Vec<(T, Vec<T>)> = pts
            .into_iter()
            .map(|p| {
                let d = sub(&p, &centroid);
                (dot(&d, &e2).atan2(dot(&d, &e1)), p)
            })
            .collect();
        ordered.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut tris = Vec::new();
        for i in 0..ordered.len() {
            let a = ordered[i].1.clone();
            let b = ordered[(i + 1) % ordered.len()].1.clone();
            let (u, v) = (sub(&a, &centroid), sub(&b, &centroid));
            let c = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
            let area = norm(&c) / T::lit(2.0);
            tris.push((centroid.clone(), a, b, area));
        }
        tris
    }

    pub fn surface_area(&self) -> Result<T> {
        Ok(self.facet_areas()?.into_iter().sum())
    }

    /// Cone decomposition from the origin: `vol = (1/n) Σ b_i |F_i|`.
    pub fn volume(&self) -> Result<T> {
        let areas = self.facet_areas()?;
        let n = T::from_usize(self.dim).unwrap();
        Ok(self.facets.iter().zip(areas).map(|(f, a)| f.offset * a).sum::<T>() / n)
    }
}
