//! Convex body models in ℝ² and ℝ³ with support function, brightness,
//! line chords and planar sections.

mod spec;

pub use spec::{BodySpec, RotationStep};

use std::f64::consts::PI;

use crate::crofton_coeffs::kappa;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::symtensor::LinearDirection;

/// Point-on-plane tolerance.
pub const PLANE_EPS: f64 = 1e-12;
/// Tangency tolerance for quadratic discriminants; tangent lines count as hits.
pub const DISCRIMINANT_EPS: f64 = 1e-14;
/// Smallest facet area accepted as non-degenerate.
pub const AREA_EPS: f64 = 1e-14;

/// An affine line `offset + ℝ u` with `offset ⟂ u`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineLine {
    direction: LinearDirection,
    offset: Vec<f64>,
}

impl AffineLine {
    /// The line through `point` parallel to `direction`.
    pub fn through(direction: LinearDirection, point: &[f64]) -> Result<Self> {
        let u = direction.unit();
        if point.len() != u.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), found: point.len() });
        }
        let offset = linalg::axpy(point, -linalg::dot(point, u), u);
        Ok(Self { direction, offset })
    }

    pub fn direction(&self) -> &LinearDirection {
        &self.direction
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn point_at(&self, t: f64) -> Vec<f64> {
        linalg::axpy(&self.offset, t, self.direction.unit())
    }

    pub fn translated(&self, t: &[f64]) -> Self {
        Self::through(self.direction.clone(), &linalg::add(&self.offset, t)).expect("same dimension")
    }
}

/// A 2-flat `offset + span(L₀, second)` in ℝ³ containing the vertical axis
/// direction `L₀`. Flat coordinates `(y₀, y₁)` map to
/// `offset + y₀ L₀ + y₁ second`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalFlat2 {
    vertical: LinearDirection,
    second: Vec<f64>,
    offset: Vec<f64>,
}

impl VerticalFlat2 {
    pub fn new(vertical: LinearDirection, second: &[f64], point: &[f64]) -> Result<Self> {
        let l0 = vertical.unit();
        if l0.len() != 3 {
            return Err(Error::Unsupported("vertical flats are implemented for n = 3".into()));
        }
        if second.len() != 3 || point.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: second.len().min(point.len()) });
        }
        let ns = linalg::norm(second);
        if (ns - 1.0).abs() > PLANE_EPS || linalg::dot(second, l0).abs() > PLANE_EPS {
            return Err(Error::InvalidArgument("second direction must be a unit vector orthogonal to L0".into()));
        }
        let mut offset = linalg::axpy(point, -linalg::dot(point, l0), l0);
        offset = linalg::axpy(&offset, -linalg::dot(&offset, second), second);
        Ok(Self { vertical, second: second.to_vec(), offset })
    }

    pub fn vertical(&self) -> &LinearDirection {
        &self.vertical
    }

    pub fn second(&self) -> &[f64] {
        &self.second
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// Unit normal of the flat.
    pub fn normal(&self) -> [f64; 3] {
        linalg::cross(self.vertical.unit(), &self.second)
    }

    /// World point of flat coordinates `y`.
    pub fn to_world(&self, y: [f64; 2]) -> Vec<f64> {
        let p = linalg::axpy(&self.offset, y[0], self.vertical.unit());
        linalg::axpy(&p, y[1], &self.second)
    }

    /// World vector of the in-flat vector `y`.
    pub fn vector_to_world(&self, y: [f64; 2]) -> Vec<f64> {
        linalg::axpy(&linalg::scale(self.vertical.unit(), y[0]), y[1], &self.second)
    }

    /// A line of the flat (in flat coordinates) as a line of ℝ³.
    pub fn line_to_world(&self, line: &AffineLine) -> Result<AffineLine> {
        if line.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: line.dim() });
        }
        let u = line.direction().unit();
        let o = line.offset();
        let dir = LinearDirection::new(&self.vector_to_world([u[0], u[1]]))?;
        AffineLine::through(dir, &self.to_world([o[0], o[1]]))
    }
}

/// Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

/// `center + T(Bⁿ)` with `T = R diag(semi_axes)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: Vec<f64>,
    semi_axes: Vec<f64>,
    rotation: Matrix,
}

/// Convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
    normals: Vec<[f64; 2]>,
    lengths: Vec<f64>,
    offsets: Vec<f64>,
}

/// One facet of a 3-D polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: [f64; 3],
    pub area: f64,
    pub vertices: Vec<[f64; 3]>,
}

/// Convex polytope in ℝ³ given by its facets.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    facets: Vec<Facet>,
    offsets: Vec<f64>,
    vertices: Vec<[f64; 3]>,
}

/// Segment `[p, q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    p: Vec<f64>,
    q: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    Ball(Ball),
    Ellipsoid(Ellipsoid),
    Polygon(Polygon),
    Polytope(Polytope),
    Segment(Segment),
}

/// Result of intersecting a body with a flat; the empty set is a value.
#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    Empty,
    Body(ConvexBody),
}

impl Section {
    pub fn is_empty(&self) -> bool {
        matches!(self, Section::Empty)
    }

    pub fn body(&self) -> Option<&ConvexBody> {
        match self {
            Section::Empty => None,
            Section::Body(b) => Some(b),
        }
    }

    /// Width in direction `u`; zero for the empty set.
    pub fn width(&self, u: &[f64]) -> f64 {
        self.body().map_or(0.0, |b| b.width(u))
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("bodies in dimension {d}")))
    }
}

fn check_finite(xs: &[f64], what: &str) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be finite")))
    }
}

impl ConvexBody {
    pub fn ball(center: &[f64], radius: f64) -> Result<Self> {
        check_dim(center.len())?;
        check_finite(center, "center")?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self::Ball(Ball { center: center.to_vec(), radius }))
    }

    /// Ellipsoid `center + R diag(semi_axes) Bⁿ`; the columns of `rotation`
    /// are the axis directions.
    pub fn ellipsoid(center: &[f64], semi_axes: &[f64], rotation: Matrix) -> Result<Self> {
        let n = center.len();
        check_dim(n)?;
        check_finite(center, "center")?;
        if semi_axes.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: semi_axes.len() });
        }
        if semi_axes.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidArgument("semi-axes must be positive".into()));
        }
        if rotation.len() != n || rotation.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: rotation.len() });
        }
        if linalg::orthogonality_error(&rotation) > 1e-10 {
            return Err(Error::InvalidArgument("ellipsoid rotation is not orthogonal".into()));
        }
        Ok(Self::Ellipsoid(Ellipsoid { center: center.to_vec(), semi_axes: semi_axes.to_vec(), rotation }))
    }

    pub fn axis_ellipsoid(semi_axes: &[f64]) -> Result<Self> {
        let n = semi_axes.len();
        Self::ellipsoid(&vec![0.0; n], semi_axes, linalg::identity(n))
    }

    /// Convex polygon from counter-clockwise vertices in convex position.
    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        let m = vertices.len();
        if m < 3 {
            return Err(Error::Degenerate(format!("polygon needs at least 3 vertices, got {m}")));
        }
        check_finite(&vertices.iter().flatten().copied().collect::<Vec<_>>(), "vertices")?;
        let scale = vertices.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
        for i in 0..m {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % m], vertices[(i + 2) % m]);
            let cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if cr <= 1e-14 * scale * scale {
                return Err(Error::InvalidArgument(
                    "polygon vertices must be counter-clockwise and in strictly convex position".into(),
                ));
            }
        }
        let mut normals = Vec::with_capacity(m);
        let mut lengths = Vec::with_capacity(m);
        let mut offsets = Vec::with_capacity(m);
        for i in 0..m {
            let (a, b) = (vertices[i], vertices[(i + 1) % m]);
            let e = [b[0] - a[0], b[1] - a[1]];
            let len = e[0].hypot(e[1]);
            if len < AREA_EPS {
                return Err(Error::Degenerate("polygon edge of zero length".into()));
            }
            let nrm = [e[1] / len, -e[0] / len];
            normals.push(nrm);
            lengths.push(len);
            offsets.push(nrm[0] * a[0] + nrm[1] * a[1]);
        }
        // convexity also needs a single turn around
        let turn: f64 = (0..m)
            .map(|i| {
                let (n0, n1) = (normals[i], normals[(i + 1) % m]);
                (n0[0] * n1[1] - n0[1] * n1[0]).atan2(n0[0] * n1[0] + n0[1] * n1[1])
            })
            .sum();
        if (turn - 2.0 * PI).abs() > 1e-9 {
            return Err(Error::InvalidArgument("polygon is not simple and convex".into()));
        }
        Ok(Self::Polygon(Polygon { vertices: vertices.to_vec(), normals, lengths, offsets }))
    }

    /// Polytope in ℝ³ from facet vertex loops, each counter-clockwise when
    /// seen from outside.
    pub fn polytope(loops: &[Vec<[f64; 3]>]) -> Result<Self> {
        if loops.len() < 4 {
            return Err(Error::Degenerate("a 3-D polytope needs at least 4 facets".into()));
        }
        let mut facets = Vec::with_capacity(loops.len());
        let mut offsets = Vec::with_capacity(loops.len());
        let mut vertices: Vec<[f64; 3]> = Vec::new();
        for lp in loops {
            if lp.len() < 3 {
                return Err(Error::Degenerate("facet with fewer than 3 vertices".into()));
            }
            // Newell's method: the vector area of the loop
            let mut va = [0.0; 3];
            for i in 0..lp.len() {
                let c = linalg::cross(&lp[i], &lp[(i + 1) % lp.len()]);
                (0..3).for_each(|k| va[k] += 0.5 * c[k]);
            }
            let area = linalg::norm(&va);
            if area < AREA_EPS {
                return Err(Error::Degenerate(format!("facet area {area:e} below {AREA_EPS:e}")));
            }
            let normal = [va[0] / area, va[1] / area, va[2] / area];
            let h = linalg::dot(&normal, &lp[0]);
            if lp.iter().any(|v| (linalg::dot(&normal, v) - h).abs() > 1e-9 * (1.0 + h.abs())) {
                return Err(Error::InvalidArgument("facet vertices are not coplanar".into()));
            }
            for v in lp {
                if !vertices.iter().any(|w| linalg::norm(&linalg::sub(v, w)) < 1e-12) {
                    vertices.push(*v);
                }
            }
            offsets.push(h);
            facets.push(Facet { normal, area, vertices: lp.clone() });
        }
        for (f, &h) in facets.iter().zip(&offsets) {
            if vertices.iter().any(|v| linalg::dot(&f.normal, v) > h + 1e-9 * (1.0 + h.abs())) {
                return Err(Error::InvalidArgument("facet normals must point outwards of a convex polytope".into()));
            }
        }
        let mut closure = [0.0; 3];
        for f in &facets {
            (0..3).for_each(|k| closure[k] += f.area * f.normal[k]);
        }
        let total: f64 = facets.iter().map(|f| f.area).sum();
        if linalg::norm(&closure) > 1e-9 * total {
            return Err(Error::InvalidArgument("facets do not close up (Σ area·normal ≠ 0)".into()));
        }
        Ok(Self::Polytope(Polytope { facets, offsets, vertices }))
    }

    /// Axis-parallel box `center + Π[-h_i, h_i]` in ℝ² or ℝ³.
    pub fn cuboid(center: &[f64], half_extents: &[f64]) -> Result<Self> {
        if center.len() != half_extents.len() {
            return Err(Error::DimensionMismatch { expected: center.len(), found: half_extents.len() });
        }
        if half_extents.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::InvalidArgument("box half extents must be positive".into()));
        }
        let (c, h) = (center, half_extents);
        match c.len() {
            2 => Self::polygon(&[
                [c[0] - h[0], c[1] - h[1]],
                [c[0] + h[0], c[1] - h[1]],
                [c[0] + h[0], c[1] + h[1]],
                [c[0] - h[0], c[1] + h[1]],
            ]),
            3 => {
                let v = |sx: f64, sy: f64, sz: f64| [c[0] + sx * h[0], c[1] + sy * h[1], c[2] + sz * h[2]];
                Self::polytope(&[
                    vec![v(1., -1., -1.), v(1., 1., -1.), v(1., 1., 1.), v(1., -1., 1.)],
                    vec![v(-1., -1., -1.), v(-1., -1., 1.), v(-1., 1., 1.), v(-1., 1., -1.)],
                    vec![v(-1., 1., -1.), v(-1., 1., 1.), v(1., 1., 1.), v(1., 1., -1.)],
                    vec![v(-1., -1., -1.), v(1., -1., -1.), v(1., -1., 1.), v(-1., -1., 1.)],
                    vec![v(-1., -1., 1.), v(1., -1., 1.), v(1., 1., 1.), v(-1., 1., 1.)],
                    vec![v(-1., -1., -1.), v(-1., 1., -1.), v(1., 1., -1.), v(1., -1., -1.)],
                ])
            }
            d => Err(Error::Unsupported(format!("boxes in dimension {d}"))),
        }
    }

    pub fn segment(p: &[f64], q: &[f64]) -> Result<Self> {
        check_dim(p.len())?;
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
        }
        Ok(Self::Segment(Segment { p: p.to_vec(), q: q.to_vec() }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Ball(b) => b.center.len(),
            Self::Ellipsoid(e) => e.center.len(),
            Self::Polygon(_) => 2,
            Self::Polytope(_) => 3,
            Self::Segment(s) => s.p.len(),
        }
    }

    /// Support function `h(K, u) = max_{x∈K} ⟨x, u⟩`.
    pub fn support(&self, u: &[f64]) -> f64 {
        match self {
            Self::Ball(b) => linalg::dot(&b.center, u) + b.radius * linalg::norm(u),
            Self::Ellipsoid(e) => linalg::dot(&e.center, u) + linalg::norm(&e.t_transpose_vec(u)),
            Self::Polygon(p) => p.vertices.iter().map(|v| v[0] * u[0] + v[1] * u[1]).fold(f64::NEG_INFINITY, f64::max),
            Self::Polytope(p) => p.vertices.iter().map(|v| linalg::dot(v, u)).fold(f64::NEG_INFINITY, f64::max),
            Self::Segment(s) => linalg::dot(&s.p, u).max(linalg::dot(&s.q, u)),
        }
    }

    /// Width `h(K, u) + h(K, -u)`.
    pub fn width(&self, u: &[f64]) -> f64 {
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        self.support(u) + self.support(&neg)
    }

    /// `(n-1)`-volume of the projection of `K` onto `v⊥`.
    pub fn brightness(&self, v: &LinearDirection) -> f64 {
        let u = v.unit();
        let n = self.dim();
        match self {
            Self::Ball(b) => kappa(n - 1) * b.radius.powi(n as i32 - 1),
            Self::Ellipsoid(e) => {
                let det: f64 = e.semi_axes.iter().product();
                kappa(n - 1) * det * linalg::norm(&e.t_inverse_vec(u))
            }
            Self::Polygon(p) => {
                0.5 * p.normals.iter().zip(&p.lengths).map(|(nr, l)| l * (nr[0] * u[0] + nr[1] * u[1]).abs()).sum::<f64>()
            }
            Self::Polytope(p) => 0.5 * p.facets.iter().map(|f| f.area * linalg::dot(&f.normal, u).abs()).sum::<f64>(),
            Self::Segment(s) => {
                if n == 2 {
                    let d = linalg::sub(&s.q, &s.p);
                    (d[0] * u[1] - d[1] * u[0]).abs()
                } else {
                    0.0
                }
            }
        }
    }

    /// Parameter interval `[t0, t1]` of `K ∩ E` along `E`'s unit direction
    /// from its offset point, or `None` if the line misses `K`.
    pub fn line_chord(&self, line: &AffineLine) -> Option<(f64, f64)> {
        let (o, d) = (line.offset(), line.direction().unit());
        match self {
            Self::Ball(b) => {
                let w = linalg::sub(o, &b.center);
                quadratic_chord(linalg::dot(d, d), linalg::dot(&w, d), linalg::dot(&w, &w) - b.radius * b.radius)
            }
            Self::Ellipsoid(e) => {
                let w = e.t_inverse_vec(&linalg::sub(o, &e.center));
                let dd = e.t_inverse_vec(d);
                quadratic_chord(linalg::dot(&dd, &dd), linalg::dot(&w, &dd), linalg::dot(&w, &w) - 1.0)
            }
            Self::Polygon(p) => clip_line(
                p.normals.iter().zip(&p.offsets).map(|(nr, &h)| (nr[0] * o[0] + nr[1] * o[1], nr[0] * d[0] + nr[1] * d[1], h)),
            ),
            Self::Polytope(p) => clip_line(
                p.facets.iter().zip(&p.offsets).map(|(f, &h)| (linalg::dot(&f.normal, o), linalg::dot(&f.normal, d), h)),
            ),
            Self::Segment(s) => segment_chord(&s.p, &s.q, o, d),
        }
    }

    /// Euler characteristic `V₀(K ∩ E)`.
    pub fn line_hits(&self, line: &AffineLine) -> bool {
        self.line_chord(line).is_some()
    }

    /// Length of `K ∩ E`.
    pub fn chord_length(&self, line: &AffineLine) -> f64 {
        self.line_chord(line).map_or(0.0, |(a, b)| b - a)
    }

    /// Planar section by a vertical flat, in the flat's coordinates.
    pub fn flat_section(&self, flat: &VerticalFlat2) -> Result<Section> {
        if self.dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: self.dim() });
        }
        let b = [flat.vertical().unit().to_vec(), flat.second().to_vec()];
        let o = flat.offset();
        match self {
            Self::Ball(ball) => {
                let w = linalg::sub(&ball.center, o);
                let y = [linalg::dot(&w, &b[0]), linalg::dot(&w, &b[1])];
                let dist2 = linalg::dot(&w, &w) - y[0] * y[0] - y[1] * y[1];
                let rho = ball.radius * ball.radius - dist2;
                if rho <= 0.0 {
                    return Ok(Section::Empty);
                }
                Ok(Section::Body(Self::ball(&y, rho.sqrt())?))
            }
            Self::Ellipsoid(e) => {
                // |M y + w|² ≤ 1 with M = T⁻¹B, w = T⁻¹(o - c)
                let m0 = e.t_inverse_vec(&b[0]);
                let m1 = e.t_inverse_vec(&b[1]);
                let w = e.t_inverse_vec(&linalg::sub(o, &e.center));
                let (a00, a01, a11) = (linalg::dot(&m0, &m0), linalg::dot(&m0, &m1), linalg::dot(&m1, &m1));
                let (b0, b1) = (linalg::dot(&m0, &w), linalg::dot(&m1, &w));
                let det = a00 * a11 - a01 * a01;
                let y0 = [-(a11 * b0 - a01 * b1) / det, -(a00 * b1 - a01 * b0) / det];
                let rho = 1.0 - linalg::dot(&w, &w) - (b0 * y0[0] + b1 * y0[1]);
                if rho <= 0.0 {
                    return Ok(Section::Empty);
                }
                let (lam, vecs) = linalg::sym2_eigen(a00, a01, a11);
                let axes = [(rho / lam[0]).sqrt(), (rho / lam[1]).sqrt()];
                let rot = vec![vec![vecs[0][0], vecs[1][0]], vec![vecs[0][1], vecs[1][1]]];
                Ok(Section::Body(Self::ellipsoid(&y0, &axes, rot)?))
            }
            Self::Polytope(p) => {
                let r = p.vertices.iter().map(|v| linalg::norm(&linalg::sub(v, o))).fold(0.0, f64::max) * 2.0 + 1.0;
                let mut poly = vec![[-r, -r], [r, -r], [r, r], [-r, r]];
                for (f, &h) in p.facets.iter().zip(&p.offsets) {
                    let a = [linalg::dot(&f.normal, &b[0]), linalg::dot(&f.normal, &b[1])];
                    let rhs = h - linalg::dot(&f.normal, o);
                    poly = clip_polygon(&poly, a, rhs);
                    if poly.is_empty() {
                        return Ok(Section::Empty);
                    }
                }
                let poly = dedup_polygon(poly);
                if poly.len() < 3 || polygon_area(&poly) < AREA_EPS {
                    return Ok(Section::Empty);
                }
                Ok(Section::Body(Self::polygon(&poly)?))
            }
            Self::Segment(_) => Ok(Section::Empty),
            Self::Polygon(_) => unreachable!("polygons are planar"),
        }
    }

    /// Facet normals with `(n-1)`-areas: the atoms of `S_{n-1}(P, ·)`.
    pub fn area_measure_atoms(&self) -> Result<Vec<(Vec<f64>, f64)>> {
        match self {
            Self::Polygon(p) => Ok(p.normals.iter().zip(&p.lengths).map(|(n, &l)| (n.to_vec(), l)).collect()),
            Self::Polytope(p) => Ok(p.facets.iter().map(|f| (f.normal.to_vec(), f.area)).collect()),
            Self::Segment(s) if s.p.len() == 2 => {
                let d = linalg::sub(&s.q, &s.p);
                let l = linalg::norm(&d);
                if l < AREA_EPS {
                    return Err(Error::Degenerate("segment of zero length".into()));
                }
                let nrm = vec![d[1] / l, -d[0] / l];
                Ok(vec![(nrm.clone(), l), (linalg::scale(&nrm, -1.0), l)])
            }
            _ => Err(Error::Unsupported("area measure atoms exist only for polytopes".into())),
        }
    }

    /// `(r(K), R(K))`: radii of the largest inscribed and the smallest
    /// enclosing ball. Exact for balls and ellipsoids; for polytopes a
    /// direct-search optimisation over the centre (approximate).
    pub fn inradius_circumradius(&self) -> Result<(f64, f64)> {
        match self {
            Self::Ball(b) => Ok((b.radius, b.radius)),
            Self::Ellipsoid(e) => {
                let lo = e.semi_axes.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = e.semi_axes.iter().copied().fold(0.0, f64::max);
                Ok((lo, hi))
            }
            Self::Polygon(p) => {
                let verts: Vec<Vec<f64>> = p.vertices.iter().map(|v| v.to_vec()).collect();
                let normals: Vec<Vec<f64>> = p.normals.iter().map(|v| v.to_vec()).collect();
                Ok(polytope_radii(&verts, &normals, &p.offsets))
            }
            Self::Polytope(p) => {
                let verts: Vec<Vec<f64>> = p.vertices.iter().map(|v| v.to_vec()).collect();
                let normals: Vec<Vec<f64>> = p.facets.iter().map(|f| f.normal.to_vec()).collect();
                Ok(polytope_radii(&verts, &normals, &p.offsets))
            }
            Self::Segment(_) => Err(Error::Degenerate("a segment has no inscribed ball".into())),
        }
    }

    pub fn translated(&self, t: &[f64]) -> Result<Self> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: t.len() });
        }
        match self {
            Self::Ball(b) => Self::ball(&linalg::add(&b.center, t), b.radius),
            Self::Ellipsoid(e) => Self::ellipsoid(&linalg::add(&e.center, t), &e.semi_axes, e.rotation.clone()),
            Self::Polygon(p) => Self::polygon(&p.vertices.iter().map(|v| [v[0] + t[0], v[1] + t[1]]).collect::<Vec<_>>()),
            Self::Polytope(p) => Self::polytope(
                &p.facets
                    .iter()
                    .map(|f| f.vertices.iter().map(|v| [v[0] + t[0], v[1] + t[1], v[2] + t[2]]).collect())
                    .collect::<Vec<_>>(),
            ),
            Self::Segment(s) => Self::segment(&linalg::add(&s.p, t), &linalg::add(&s.q, t)),
        }
    }

    /// `λK` (dilation about the origin), `λ > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument("scale factor must be positive".into()));
        }
        match self {
            Self::Ball(b) => Self::ball(&linalg::scale(&b.center, lambda), b.radius * lambda),
            Self::Ellipsoid(e) => {
                Self::ellipsoid(&linalg::scale(&e.center, lambda), &linalg::scale(&e.semi_axes, lambda), e.rotation.clone())
            }
            Self::Polygon(p) => Self::polygon(&p.vertices.iter().map(|v| [v[0] * lambda, v[1] * lambda]).collect::<Vec<_>>()),
            Self::Polytope(p) => Self::polytope(
                &p.facets
                    .iter()
                    .map(|f| f.vertices.iter().map(|v| [v[0] * lambda, v[1] * lambda, v[2] * lambda]).collect())
                    .collect::<Vec<_>>(),
            ),
            Self::Segment(s) => Self::segment(&linalg::scale(&s.p, lambda), &linalg::scale(&s.q, lambda)),
        }
    }

    /// `ρK` for a proper rotation `ρ` (about the origin).
    pub fn rotated(&self, rho: &[Vec<f64>]) -> Result<Self> {
        let n = self.dim();
        if rho.len() != n || rho.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: rho.len() });
        }
        if linalg::orthogonality_error(rho) > 1e-10 || linalg::det(rho) < 0.0 {
            return Err(Error::InvalidArgument("not a proper rotation".into()));
        }
        match self {
            Self::Ball(b) => Self::ball(&linalg::mat_vec(rho, &b.center), b.radius),
            Self::Ellipsoid(e) => {
                Self::ellipsoid(&linalg::mat_vec(rho, &e.center), &e.semi_axes, linalg::mat_mul(rho, &e.rotation))
            }
            Self::Polygon(p) => Self::polygon(
                &p.vertices
                    .iter()
                    .map(|v| {
                        let w = linalg::mat_vec(rho, v);
                        [w[0], w[1]]
                    })
                    .collect::<Vec<_>>(),
            ),
            Self::Polytope(p) => Self::polytope(
                &p.facets
                    .iter()
                    .map(|f| {
                        f.vertices
                            .iter()
                            .map(|v| {
                                let w = linalg::mat_vec(rho, v);
                                [w[0], w[1], w[2]]
                            })
                            .collect()
                    })
                    .collect::<Vec<_>>(),
            ),
            Self::Segment(s) => Self::segment(&linalg::mat_vec(rho, &s.p), &linalg::mat_vec(rho, &s.q)),
        }
    }

    /// Points of the body that are enough to bound it: vertices, or the
    /// centre for smooth bodies.
    pub fn center_hint(&self) -> Vec<f64> {
        match self {
            Self::Ball(b) => b.center.clone(),
            Self::Ellipsoid(e) => e.center.clone(),
            Self::Polygon(p) => centroid(p.vertices.iter().map(|v| v.to_vec())),
            Self::Polytope(p) => centroid(p.vertices.iter().map(|v| v.to_vec())),
            Self::Segment(s) => linalg::scale(&linalg::add(&s.p, &s.q), 0.5),
        }
    }

    /// Radius of a ball around [`center_hint`](Self::center_hint)
    /// containing the body.
    pub fn bounding_radius(&self) -> f64 {
        let c = self.center_hint();
        match self {
            Self::Ball(b) => b.radius,
            Self::Ellipsoid(e) => e.semi_axes.iter().copied().fold(0.0, f64::max),
            Self::Polygon(p) => p.vertices.iter().map(|v| linalg::norm(&linalg::sub(v, &c))).fold(0.0, f64::max),
            Self::Polytope(p) => p.vertices.iter().map(|v| linalg::norm(&linalg::sub(v, &c))).fold(0.0, f64::max),
            Self::Segment(s) => 0.5 * linalg::norm(&linalg::sub(&s.q, &s.p)),
        }
    }

    pub fn as_ball(&self) -> Option<&Ball> {
        match self {
            Self::Ball(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_ellipsoid(&self) -> Option<&Ellipsoid> {
        match self {
            Self::Ellipsoid(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_polygon(&self) -> Option<&Polygon> {
        match self {
            Self::Polygon(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            Self::Polytope(p) => Some(p),
            _ => None,
        }
    }
}

impl Ball {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Ellipsoid {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.semi_axes
    }

    pub fn rotation(&self) -> &Matrix {
        &self.rotation
    }

    /// The linear map `T = R diag(a)`.
    pub fn linear_map(&self) -> Matrix {
        self.rotation
            .iter()
            .map(|row| row.iter().zip(&self.semi_axes).map(|(r, a)| r * a).collect())
            .collect()
    }

    /// `Tᵀ v = diag(a) Rᵀ v`
    pub fn t_transpose_vec(&self, v: &[f64]) -> Vec<f64> {
        linalg::mat_t_vec(&self.rotation, v).iter().zip(&self.semi_axes).map(|(x, a)| x * a).collect()
    }

    /// `T⁻¹ v = diag(1/a) Rᵀ v`
    pub fn t_inverse_vec(&self, v: &[f64]) -> Vec<f64> {
        linalg::mat_t_vec(&self.rotation, v).iter().zip(&self.semi_axes).map(|(x, a)| x / a).collect()
    }

    /// `T⁻ᵀ v = R diag(1/a) v`
    pub fn t_inverse_transpose_vec(&self, v: &[f64]) -> Vec<f64> {
        let w: Vec<f64> = v.iter().zip(&self.semi_axes).map(|(x, a)| x / a).collect();
        linalg::mat_vec(&self.rotation, &w)
    }
}

impl Polygon {
    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.lengths.iter().sum()
    }
}

impl Polytope {
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn surface_area(&self) -> f64 {
        self.facets.iter().map(|f| f.area).sum()
    }
}

impl Segment {
    pub fn endpoints(&self) -> (&[f64], &[f64]) {
        (&self.p, &self.q)
    }
}

fn centroid(points: impl Iterator<Item = Vec<f64>>) -> Vec<f64> {
    let mut acc: Vec<f64> = Vec::new();
    let mut k = 0usize;
    for p in points {
        if acc.is_empty() {
            acc = vec![0.0; p.len()];
        }
        acc.iter_mut().zip(&p).for_each(|(a, x)| *a += x);
        k += 1;
    }
    acc.iter().map(|a| a / k as f64).collect()
}

/// Roots of `a t² + 2b t + c = 0` as a chord; tangency counts as a hit.
fn quadratic_chord(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - a * c;
    if disc < -DISCRIMINANT_EPS * (b * b).max(a * c.abs()).max(1.0) {
        return None;
    }
    let r = disc.max(0.0).sqrt();
    Some(((-b - r) / a, (-b + r) / a))
}

/// Clips the line `o + t d` against half-spaces `⟨n, x⟩ ≤ h`, each given as
/// `(⟨n, o⟩, ⟨n, d⟩, h)`.
fn clip_line(halfspaces: impl Iterator<Item = (f64, f64, f64)>) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (no, nd, h) in halfspaces {
        let slack = h - no;
        if nd.abs() < 1e-15 {
            if slack < -PLANE_EPS {
                return None;
            }
            continue;
        }
        let t = slack / nd;
        if nd > 0.0 {
            hi = hi.min(t);
        } else {
            lo = lo.max(t);
        }
    }
    (lo <= hi + PLANE_EPS).then_some((lo, hi.max(lo)))
}

fn segment_chord(p: &[f64], q: &[f64], o: &[f64], d: &[f64]) -> Option<(f64, f64)> {
    // closest approach between the segment p + s (q - p), s ∈ [0,1], and the line
    let e = linalg::sub(q, p);
    let w = linalg::sub(p, o);
    let ee = linalg::dot(&e, &e);
    let ed = linalg::dot(&e, d);
    let denom = ee - ed * ed;
    let s = if denom > 1e-15 * ee.max(1.0) {
        (-(linalg::dot(&w, &e)) + ed * linalg::dot(&w, d)) / denom
    } else {
        0.0
    };
    let s = s.clamp(0.0, 1.0);
    let x = linalg::axpy(p, s, &e);
    let t = linalg::dot(&linalg::sub(&x, o), d);
    let gap = linalg::norm(&linalg::sub(&x, &linalg::axpy(o, t, d)));
    if gap > PLANE_EPS {
        return None;
    }
    if denom <= 1e-15 * ee.max(1.0) {
        // parallel and on the line
        let (tp, tq) = (linalg::dot(&linalg::sub(p, o), d), linalg::dot(&linalg::sub(q, o), d));
        return Some((tp.min(tq), tp.max(tq)));
    }
    Some((t, t))
}

/// Sutherland–Hodgman step against `⟨a, y⟩ ≤ rhs`.
fn clip_polygon(poly: &[[f64; 2]], a: [f64; 2], rhs: f64) -> Vec<[f64; 2]> {
    let na = a[0].hypot(a[1]);
    if na < 1e-14 {
        return if rhs < -PLANE_EPS { Vec::new() } else { poly.to_vec() };
    }
    let f = |p: &[f64; 2]| a[0] * p[0] + a[1] * p[1] - rhs;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fp, fq) = (f(&p), f(&q));
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Drops repeated and collinear vertices.
fn dedup_polygon(poly: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let scale = poly.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(poly.len());
    for p in poly {
        if pts.last().is_none_or(|q: &[f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]) > 1e-12 * scale) {
            pts.push(p);
        }
    }
    while pts.len() > 1 {
        let (a, b) = (pts[0], pts[pts.len() - 1]);
        if (a[0] - b[0]).hypot(a[1] - b[1]) <= 1e-12 * scale {
            pts.pop();
        } else {
            break;
        }
    }
    let mut changed = true;
    while changed && pts.len() >= 3 {
        changed = false;
        let m = pts.len();
        for i in 0..m {
            let (a, b, c) = (pts[(i + m - 1) % m], pts[i], pts[(i + 1) % m]);
            let cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if cr <= 1e-13 * scale * scale {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    pts
}

fn polygon_area(v: &[[f64; 2]]) -> f64 {
    let m = v.len();
    0.5 * (0..m).map(|i| v[i][0] * v[(i + 1) % m][1] - v[(i + 1) % m][0] * v[i][1]).sum::<f64>()
}

/// Compass search minimising `f` from `x0`.
fn compass_search(f: impl Fn(&[f64]) -> f64, x0: Vec<f64>, step: f64, tol: f64) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    let mut h = step;
    // include diagonal moves so non-smooth ridges along diagonals are crossed
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for s in [-1.0, 1.0] {
            let mut d = vec![0.0; n];
            d[i] = s;
            dirs.push(d);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut d = vec![0.0; n];
                d[i] = si;
                d[j] = sj;
                dirs.push(d);
            }
        }
    }
    while h > tol {
        let mut improved = false;
        for d in &dirs {
            let y = linalg::axpy(&x, h, d);
            let fy = f(&y);
            if fy < fx {
                x = y;
                fx = fy;
                improved = true;
                break;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (x, fx)
}

fn polytope_radii(verts: &[Vec<f64>], normals: &[Vec<f64>], offsets: &[f64]) -> (f64, f64) {
    let c0 = centroid(verts.iter().cloned());
    let diam = verts.iter().map(|v| linalg::norm(&linalg::sub(v, &c0))).fold(0.0, f64::max);
    let tol = 1e-12 * diam.max(1.0);
    let far = |c: &[f64]| verts.iter().map(|v| linalg::norm(&linalg::sub(v, c))).fold(0.0, f64::max);
    let (_, big_r) = compass_search(far, c0.clone(), diam * 0.25, tol);
    let neg_slack = |c: &[f64]| {
        -normals.iter().zip(offsets).map(|(nr, h)| h - linalg::dot(nr, c)).fold(f64::INFINITY, f64::min)
    };
    let (_, neg_r) = compass_search(neg_slack, c0, diam * 0.25, tol);
    (-neg_r, big_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn unit_square() -> ConvexBody {
        ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn support_examples() {
        let b = ConvexBody::ball(&[0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(b.support(&[0.0, 0.6, 0.8]), 1.0);
        let (alpha, k) = (2.0, 0.3);
        let e = ConvexBody::axis_ellipsoid(&[alpha, k * alpha]).unwrap();
        for phi in [0.0, 0.4, 1.3, 2.9] {
            let (s, c) = f64::sin_cos(phi);
            let want = alpha * (c * c + k * k * s * s).sqrt();
            assert_relative_eq!(e.support(&[c, s]), want, max_relative = 1e-14);
        }
        assert_eq!(unit_square().support(&[1.0, 0.0]), 1.0);
    }

    #[test]
    fn width_examples() {
        assert_eq!(ConvexBody::ball(&[0.3, 0.1], 1.0).unwrap().width(&[1.0, 0.0]), 2.0);
        let s = ConvexBody::segment(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(s.width(&[0.0, 1.0]), 0.0);
        assert_relative_eq!(unit_square().width(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]), 2f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn brightness_examples() {
        let b = ConvexBody::ball(&[0.0; 3], 1.0).unwrap();
        assert_relative_eq!(b.brightness(&LinearDirection::new(&[1.0, 2.0, 3.0]).unwrap()), PI, max_relative = 1e-15);
        assert_relative_eq!(unit_square().brightness(&LinearDirection::axis(2, 0)), 1.0, max_relative = 1e-15);
        let sph = ConvexBody::axis_ellipsoid(&[1.0, 1.0, 3.0]).unwrap();
        assert_relative_eq!(sph.brightness(&LinearDirection::axis(3, 2)), PI, max_relative = 1e-15);
        // sideways silhouette of the spheroid is an ellipse with semi-axes 1 and 3
        assert_relative_eq!(sph.brightness(&LinearDirection::axis(3, 0)), 3.0 * PI, max_relative = 1e-15);
        let cube = ConvexBody::cuboid(&[0.0; 3], &[0.5; 3]).unwrap();
        let v = LinearDirection::new(&[1.0, 1.0, 1.0]).unwrap();
        assert_relative_eq!(cube.brightness(&v), 3f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn width_equals_planar_brightness() {
        let bodies = [
            unit_square(),
            ConvexBody::ellipsoid(&[0.2, 0.1], &[2.0, 1.0], linalg::axis_rotation(2, 0, 0.3).unwrap()).unwrap(),
            ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap(),
        ];
        for b in &bodies {
            for phi in [0.0, 0.5, 1.7, 2.5] {
                let v = LinearDirection::from_angle(phi);
                let u = [-phi.sin(), phi.cos()];
                assert_relative_eq!(b.width(&u), b.brightness(&v), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn line_hits_examples() {
        let b = ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap();
        let l = AffineLine::through(LinearDirection::new(&[1.0, 1.0]).unwrap(), &[0.0, 0.0]).unwrap();
        assert!(b.line_hits(&l));
        let far = AffineLine::through(LinearDirection::axis(2, 1), &[2.0, 0.0]).unwrap();
        assert!(!b.line_hits(&far));
        let sq = AffineLine::through(LinearDirection::axis(2, 1), &[0.5, 0.0]).unwrap();
        assert!(unit_square().line_hits(&sq));
        assert_relative_eq!(unit_square().chord_length(&sq), 1.0, max_relative = 1e-15);
        let tangent = AffineLine::through(LinearDirection::axis(2, 1), &[1.0, 0.0]).unwrap();
        assert!(b.line_hits(&tangent));
    }

    #[test]
    fn box_chords() {
        let cube = ConvexBody::cuboid(&[0.0; 3], &[1.0, 2.0, 3.0]).unwrap();
        let l = AffineLine::through(LinearDirection::axis(3, 2), &[0.5, -1.0, 7.0]).unwrap();
        assert_relative_eq!(cube.chord_length(&l), 6.0, max_relative = 1e-15);
        let miss = AffineLine::through(LinearDirection::axis(3, 2), &[1.5, 0.0, 0.0]).unwrap();
        assert!(!cube.line_hits(&miss));
    }

    #[test]
    fn flat_section_examples() {
        let l0 = LinearDirection::axis(3, 2);
        let ball = ConvexBody::ball(&[0.0; 3], 1.0).unwrap();
        let h = VerticalFlat2::new(l0.clone(), &[1.0, 0.0, 0.0], &[0.0; 3]).unwrap();
        let sec = ball.flat_section(&h).unwrap();
        assert_eq!(sec.body().unwrap().as_ball().unwrap().radius(), 1.0);
        let far = VerticalFlat2::new(l0.clone(), &[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0]).unwrap();
        assert!(ball.flat_section(&far).unwrap().is_empty());

        let sph = ConvexBody::axis_ellipsoid(&[1.0, 1.0, 2.0]).unwrap();
        let sec = sph.flat_section(&h).unwrap();
        let e = sec.body().unwrap().as_ellipsoid().unwrap();
        let mut ax = e.semi_axes().to_vec();
        ax.sort_by(f64::total_cmp);
        assert_relative_eq!(ax[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(ax[1], 2.0, max_relative = 1e-14);

        let cube = ConvexBody::cuboid(&[0.0; 3], &[0.5; 3]).unwrap();
        let diag = [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];
        let sec = cube.flat_section(&VerticalFlat2::new(l0, &diag, &[0.0; 3]).unwrap()).unwrap();
        assert_relative_eq!(sec.body().unwrap().as_polygon().unwrap().area(), 2f64.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn flat_section_agrees_with_line_chords() {
        let rot = linalg::mat_mul(&linalg::axis_rotation(3, 1, 0.9).unwrap(), &linalg::axis_rotation(3, 0, 0.4).unwrap());
        let bodies = [
            ConvexBody::ellipsoid(&[0.1, -0.2, 0.3], &[1.0, 0.7, 2.0], rot.clone()).unwrap(),
            ConvexBody::cuboid(&[0.1, 0.0, -0.1], &[0.8, 0.5, 1.1]).unwrap().rotated(&rot).unwrap(),
        ];
        let l0 = LinearDirection::axis(3, 2);
        let second = [0.6, 0.8, 0.0];
        let flat = VerticalFlat2::new(l0, &second, &[0.3, -0.1, 0.0]).unwrap();
        for b in &bodies {
            let sec = b.flat_section(&flat).unwrap();
            let sb = sec.body().unwrap();
            for (phi, off) in [(0.3, 0.1), (1.2, -0.4), (2.2, 0.5)] {
                let l2 = AffineLine::through(LinearDirection::from_angle(phi), &[-off * phi.sin(), off * phi.cos()]).unwrap();
                let l3 = flat.line_to_world(&l2).unwrap();
                assert_relative_eq!(sb.chord_length(&l2), b.chord_length(&l3), max_relative = 1e-9, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn atoms_examples() {
        let atoms = unit_square().area_measure_atoms().unwrap();
        assert_eq!(atoms.len(), 4);
        assert!(atoms.iter().all(|(_, a)| (*a - 1.0).abs() < 1e-15));
        let tri = ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let atoms = tri.area_measure_atoms().unwrap();
        assert_relative_eq!(atoms[0].0[1], -1.0);
        assert_relative_eq!(atoms[1].0[0], FRAC_1_SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(atoms[1].1, 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(atoms[2].0[0], -1.0);
        let cube = ConvexBody::cuboid(&[0.5; 3], &[0.5; 3]).unwrap();
        let atoms = cube.area_measure_atoms().unwrap();
        assert_eq!(atoms.len(), 6);
        assert!(atoms.iter().all(|(_, a)| (*a - 1.0).abs() < 1e-15));
    }

    #[test]
    fn radii_examples() {
        assert_eq!(ConvexBody::ball(&[0.0; 3], 1.0).unwrap().inradius_circumradius().unwrap(), (1.0, 1.0));
        assert_eq!(ConvexBody::axis_ellipsoid(&[2.0, 0.6]).unwrap().inradius_circumradius().unwrap(), (0.6, 2.0));
        let (r, big_r) = unit_square().inradius_circumradius().unwrap();
        assert!((r - 0.5).abs() < 1e-9);
        assert!((big_r - FRAC_1_SQRT_2).abs() < 1e-9);
        let tri = ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let (r, big_r) = tri.inradius_circumradius().unwrap();
        assert!((r - (2.0 - 2f64.sqrt()) / 2.0).abs() < 1e-9);
        assert!((big_r - FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn invalid_bodies_rejected() {
        assert!(ConvexBody::polygon(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(ConvexBody::ball(&[0.0, 0.0], -1.0).is_err());
        assert!(ConvexBody::ellipsoid(&[0.0, 0.0], &[1.0, 1.0], vec![vec![1.0, 1.0], vec![0.0, 1.0]]).is_err());
    }
}
