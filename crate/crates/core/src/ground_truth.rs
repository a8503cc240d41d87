//! Reference values: surface tensors from facet atoms or boundary
//! quadrature, and brute-force quadrature of the Crofton integrals over the
//! motion-invariant line measure.
//!
//! The line measure is normalised so that the lines hitting the unit ball
//! have measure `κ_{n-1}`: a probability measure on directions times
//! Lebesgue measure on the orthogonal complement.

use rayon::prelude::*;

use crate::bodies::{AffineLine, ConvexBody};
use crate::crofton_coeffs::{factorial, omega, CroftonTable, MeasurementFunction};
use crate::error::{Error, Result};
use crate::linalg;
use crate::quadrature::{direction_grid, gl_interval};
use crate::symtensor::{multi_indices, LinearDirection, SymmetricTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureMethod {
    /// Direction × offset grid over the line space.
    MidpointGrid,
    /// Parametrised boundary (smooth bodies).
    BoundaryParametrization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    /// `n = 2`: angles in `[0, π)`; boundary nodes for ellipses.
    /// `n = 3`: Gauss–Legendre nodes in `cos θ` (φ gets twice as many).
    pub direction_nodes: usize,
    /// Offset rows per direction (`n = 3`) and scan points per row.
    pub offset_nodes: usize,
    pub method: QuadratureMethod,
}

impl QuadratureSpec {
    pub fn new(direction_nodes: usize, offset_nodes: usize, method: QuadratureMethod) -> Result<Self> {
        if direction_nodes < 16 || offset_nodes < 16 {
            return Err(Error::InvalidArgument(format!(
                "quadrature node counts must be at least 16, got {direction_nodes}, {offset_nodes}"
            )));
        }
        Ok(Self { direction_nodes, offset_nodes, method })
    }

    /// Node counts used by the documented oracle checks.
    pub fn standard(n: usize) -> Self {
        match n {
            2 => Self { direction_nodes: 2048, offset_nodes: 512, method: QuadratureMethod::MidpointGrid },
            _ => Self { direction_nodes: 32, offset_nodes: 48, method: QuadratureMethod::MidpointGrid },
        }
    }
}

/// `Φ_{n-1,0,s}(P) = (1/(s! ω_{s+1})) Σ_F area(F) u_F^s`.
pub fn surface_tensor_polytope(body: &ConvexBody, s: usize) -> Result<SymmetricTensor> {
    let atoms = body.area_measure_atoms()?;
    Ok(tensor_from_nodes(body.dim(), s, atoms.iter().map(|(u, a)| (u.as_slice(), *a))))
}

/// `Φ_{n-1,0,s}(K) = (1/(s! ω_{s+1})) ∫_{∂K} ν^s dH^{n-1}` for balls and
/// ellipsoids by boundary quadrature.
pub fn surface_tensor_smooth(body: &ConvexBody, s: usize, q: &QuadratureSpec) -> Result<SymmetricTensor> {
    let nodes = smooth_boundary_nodes(body, q.direction_nodes, None)?;
    Ok(tensor_from_nodes(body.dim(), s, nodes.iter().map(|(u, a)| (u.as_slice(), *a))))
}

/// Surface tensor by whichever route fits the body model.
pub fn surface_tensor(body: &ConvexBody, s: usize, q: &QuadratureSpec) -> Result<SymmetricTensor> {
    match body {
        ConvexBody::Ball(_) | ConvexBody::Ellipsoid(_) => surface_tensor_smooth(body, s, q),
        _ => surface_tensor_polytope(body, s),
    }
}

/// `V_{n-1}(K)`, half the surface area.
pub fn top_intrinsic_volume(body: &ConvexBody, q: &QuadratureSpec) -> Result<f64> {
    Ok(surface_tensor(body, 0, q)?.coeffs()[0])
}

/// Cauchy's formula `(1/2) ∫ |⟨v, w⟩| S_{n-1}(K, dw)` on atoms or boundary
/// nodes.
pub fn brightness_oracle(body: &ConvexBody, v: &LinearDirection, q: &QuadratureSpec) -> Result<f64> {
    let nodes = match body {
        // the kink of |⟨v, ν⟩| is put on the seam of the parametrisation
        ConvexBody::Ball(_) | ConvexBody::Ellipsoid(_) => smooth_boundary_nodes(body, q.direction_nodes, Some(v.unit()))?,
        _ => body.area_measure_atoms()?,
    };
    Ok(0.5 * nodes.iter().map(|(u, a)| a * linalg::dot(u, v.unit()).abs()).sum::<f64>())
}

fn tensor_from_nodes<'a>(n: usize, s: usize, nodes: impl Iterator<Item = (&'a [f64], f64)>) -> SymmetricTensor {
    let idx = multi_indices(n, s);
    let mut acc = vec![0.0; idx.len()];
    for (u, w) in nodes {
        for (slot, ix) in acc.iter_mut().zip(&idx) {
            *slot += w * ix.iter().map(|&i| u[i]).product::<f64>();
        }
    }
    let f = 1.0 / (factorial(s) * omega(s + 1));
    SymmetricTensor::from_coeffs(n, s, acc.into_iter().map(|x| x * f).collect()).expect("layout")
}

/// `(outer unit normal, surface-area weight)` nodes on the boundary of a
/// ball or ellipsoid `c + T(Bⁿ)`. With `seam = Some(v)` the parametrisation
/// is arranged so that the curve `⟨ν, v⟩ = 0` lies between Gauss–Legendre
/// panels, which keeps integrands like `|⟨ν, v⟩|` smooth on every panel.
fn smooth_boundary_nodes(body: &ConvexBody, nodes: usize, seam: Option<&[f64]>) -> Result<Vec<(Vec<f64>, f64)>> {
    let (n, t) = match body {
        ConvexBody::Ball(b) => {
            let n = b.center().len();
            (n, linalg::identity(n).iter().map(|r| linalg::scale(r, b.radius())).collect::<Vec<_>>())
        }
        ConvexBody::Ellipsoid(e) => (e.center().len(), e.linear_map()),
        _ => return Err(Error::Unsupported("boundary quadrature needs a ball or an ellipsoid".into())),
    };
    let t_inv = |y: &[f64]| -> Vec<f64> {
        match body {
            ConvexBody::Ellipsoid(e) => e.t_inverse_vec(y),
            ConvexBody::Ball(b) => linalg::scale(y, 1.0 / b.radius()),
            _ => unreachable!(),
        }
    };
    let t_inv_t = |y: &[f64]| -> Vec<f64> {
        match body {
            ConvexBody::Ellipsoid(e) => e.t_inverse_transpose_vec(y),
            ConvexBody::Ball(b) => linalg::scale(y, 1.0 / b.radius()),
            _ => unreachable!(),
        }
    };
    // ⟨ν(y), v⟩ has the sign of ⟨y, T⁻¹v⟩
    let pole = seam.map(|v| {
        let p = t_inv(v);
        linalg::scale(&p, 1.0 / linalg::norm(&p))
    });
    match n {
        2 => {
            // x = T(cos a, sin a); outward normal ∝ rotated tangent
            let node = |a: f64, w: f64| {
                let d = linalg::mat_vec(&t, &[-a.sin(), a.cos()]);
                let len = linalg::norm(&d);
                (vec![d[1] / len, -d[0] / len], len * w)
            };
            match pole {
                None => {
                    let dt = 2.0 * std::f64::consts::PI / nodes as f64;
                    Ok((0..nodes).map(|i| node(dt * (i as f64 + 0.5), dt)).collect())
                }
                Some(p) => {
                    let a0 = p[1].atan2(p[0]) + std::f64::consts::FRAC_PI_2;
                    let pi = std::f64::consts::PI;
                    let mut out = Vec::with_capacity(nodes);
                    for k in 0..2 {
                        let lo = a0 + pi * k as f64;
                        out.extend(gl_interval(nodes.div_ceil(2), lo, lo + pi).into_iter().map(|(a, w)| node(a, w)));
                    }
                    Ok(out)
                }
            }
        }
        3 => {
            // x = T y, y ∈ S²: normal ∝ T⁻ᵀ y, area element |det T| |T⁻ᵀ y| dσ(y)
            let det = linalg::det(&t).abs();
            let (pz, (px, py)) = match pole {
                Some(p) => {
                    let c = orthonormal_complement(&p);
                    (p, c)
                }
                None => (vec![0.0, 0.0, 1.0], (vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0])),
            };
            let nphi = 2 * nodes;
            let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
            let mut out = Vec::with_capacity(2 * nodes * nphi);
            for half in [(-1.0, 0.0), (0.0, 1.0)] {
                for (z, wz) in gl_interval(nodes, half.0, half.1) {
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    for j in 0..nphi {
                        let phi = dphi * (j as f64 + 0.5);
                        let (c, s) = (r * phi.cos(), r * phi.sin());
                        let y: Vec<f64> = (0..3).map(|k| c * px[k] + s * py[k] + z * pz[k]).collect();
                        let m = t_inv_t(&y);
                        let len = linalg::norm(&m);
                        out.push((linalg::scale(&m, 1.0 / len), det * len * wz * dphi));
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::Unsupported(format!("boundary quadrature in dimension {n}"))),
    }
}

/// `(n-1)`-measure of the offsets `x ∈ L⊥` whose line `x + L` meets `K`,
/// found from the hit predicate alone: a scan locates the hit set and
/// bisection pins down its boundary.
pub fn hit_set_measure(body: &ConvexBody, dir: &LinearDirection, offset_nodes: usize) -> f64 {
    let u = dir.unit();
    match u.len() {
        2 => {
            let w = [-u[1], u[0]];
            let (lo, hi) = padded_range(body, &w);
            let hits = |x: f64| body.line_hits(&AffineLine::through(dir.clone(), &[x * w[0], x * w[1]]).expect("dim"));
            hit_interval(hits, lo, hi, offset_nodes).map_or(0.0, |(a, b)| b - a)
        }
        3 => {
            let (e1, e2) = orthonormal_complement(u);
            let (lo, hi) = (-body.support(&linalg::scale(&e1, -1.0)), body.support(&e1));
            let (lo2, hi2) = padded_range(body, &e2);
            let (mid, rad) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            if rad <= 0.0 {
                return 0.0;
            }
            // x₁ = mid + rad cos θ removes the square-root behaviour at the ends
            gl_interval(offset_nodes, 0.0, std::f64::consts::PI)
                .into_iter()
                .map(|(theta, wt)| {
                    let x1 = mid + rad * theta.cos();
                    let base = linalg::scale(&e1, x1);
                    let hits = |x2: f64| {
                        let p = linalg::axpy(&base, x2, &e2);
                        body.line_hits(&AffineLine::through(dir.clone(), &p).expect("dim"))
                    };
                    let mut len = 0.0;
                    for refine in [1, 4, 16] {
                        if let Some((a, b)) = hit_interval(hits, lo2, hi2, offset_nodes * refine) {
                            len = b - a;
                            break;
                        }
                    }
                    wt * rad * theta.sin() * len
                })
                .sum()
        }
        d => panic!("hit-set measure is implemented for n = 2, 3, not {d}"),
    }
}

fn padded_range(body: &ConvexBody, w: &[f64]) -> (f64, f64) {
    let hi = body.support(w);
    let lo = -body.support(&linalg::scale(w, -1.0));
    let pad = 0.01 * (hi - lo) + 1e-9 * (1.0 + hi.abs().max(lo.abs()));
    (lo - pad, hi + pad)
}

/// Hit interval of a convex 1-D set given by a membership predicate.
fn hit_interval(hits: impl Fn(f64) -> bool, lo: f64, hi: f64, nodes: usize) -> Option<(f64, f64)> {
    let h = (hi - lo) / nodes as f64;
    let xs: Vec<f64> = (0..=nodes).map(|i| lo + h * i as f64).collect();
    let first = xs.iter().position(|&x| hits(x))?;
    let last = xs.iter().rposition(|&x| hits(x))?;
    let a = if first == 0 { xs[0] } else { bisect(&hits, xs[first - 1], xs[first]) };
    let b = if last == nodes { xs[nodes] } else { bisect(&hits, xs[last + 1], xs[last]) };
    Some((a.min(b), a.max(b)))
}

/// Boundary between `miss` (predicate false) and `hit` (true).
fn bisect(hits: &impl Fn(f64) -> bool, mut miss: f64, mut hit: f64) -> f64 {
    for _ in 0..80 {
        let m = 0.5 * (miss + hit);
        if m == miss || m == hit {
            break;
        }
        if hits(m) {
            hit = m;
        } else {
            miss = m;
        }
    }
    0.5 * (miss + hit)
}

/// Two unit vectors completing `u` to an orthonormal basis of ℝ³.
pub fn orthonormal_complement(u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let a = if u[0].abs() < 0.6 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let c = linalg::cross(u, &a);
    let e1 = linalg::scale(&c, 1.0 / linalg::norm(&c));
    let e2 = linalg::cross(u, &e1).to_vec();
    (e1, e2)
}

/// Direction grid with the hit-set measure of every direction, computed
/// once per body and reused for every integrand.
#[derive(Debug, Clone)]
pub struct HitMeasureGrid {
    dim: usize,
    nodes: Vec<(LinearDirection, f64)>,
}

impl HitMeasureGrid {
    /// Directions are processed in parallel; the grid keeps their order.
    pub fn new(body: &ConvexBody, q: &QuadratureSpec) -> Self {
        let grid = direction_grid(body.dim(), q.direction_nodes);
        let nodes = grid
            .par_iter()
            .map(|(u, w)| {
                let dir = LinearDirection::new(u).expect("unit");
                let meas = hit_set_measure(body, &dir, q.offset_nodes);
                (dir, w * meas)
            })
            .collect();
        Self { dim: body.dim(), nodes }
    }

    /// `∫ f(π(E)) V₀(K ∩ E) μ(dE)`, summed in grid order.
    pub fn integrate(&self, rank: usize, f: impl Fn(&LinearDirection, &mut [f64])) -> SymmetricTensor {
        let m = crate::symtensor::num_components(self.dim, rank);
        let mut acc = vec![0.0; m];
        let mut buf = vec![0.0; m];
        for (dir, wm) in &self.nodes {
            f(dir, &mut buf);
            acc.iter_mut().zip(&buf).for_each(|(a, x)| *a += wm * x);
        }
        SymmetricTensor::from_coeffs(self.dim, rank, acc).expect("layout")
    }

    /// Line-section tensor `Φ^{(E)}_{0,0,s}(K ∩ E) = (1/(s! ω_{s+1}))(u^s + (-u)^s) V₀(K ∩ E)`
    /// integrated over all lines (left side of the forward Crofton
    /// formula). Odd ranks cancel exactly.
    pub fn crofton_integral(&self, s: usize) -> SymmetricTensor {
        let f = (1.0 + if s % 2 == 0 { 1.0 } else { -1.0 }) / (factorial(s) * omega(s + 1));
        let idx = multi_indices(self.dim, s);
        self.integrate(s, |dir, out| {
            let u = dir.unit();
            for (slot, ix) in out.iter_mut().zip(&idx) {
                *slot = f * ix.iter().map(|&i| u[i]).product::<f64>();
            }
        })
    }

    /// `∫ G_s(π(E)) V₀(K ∩ E) μ(dE)`.
    pub fn inverse_crofton(&self, s: usize) -> Result<SymmetricTensor> {
        let mf = MeasurementFunction::new(self.dim, s)?;
        Ok(self.integrate(s, |dir, out| mf.eval_into(dir.unit(), out)))
    }

    /// `Σ_j d_{m j} C_{2j} Q^{m-j} ∫ Φ^{(E)}_{0,0,2j}`.
    pub fn reconstruct(&self, s: usize) -> Result<SymmetricTensor> {
        let table = CroftonTable::new(self.dim, s)?;
        let ints: Vec<SymmetricTensor> = (0..=s / 2).map(|j| self.crofton_integral(2 * j)).collect();
        table.reconstruct(&ints)
    }
}

/// One-shot form of [`HitMeasureGrid::crofton_integral`].
pub fn crofton_integral_oracle(body: &ConvexBody, s: usize, q: &QuadratureSpec) -> SymmetricTensor {
    HitMeasureGrid::new(body, q).crofton_integral(s)
}

/// Right side of the forward Crofton formula from ground-truth surface
/// tensors of ranks `0, 2, …, s`.
pub fn crofton_rhs(body: &ConvexBody, s: usize, q: &QuadratureSpec) -> Result<SymmetricTensor> {
    if s % 2 == 1 {
        return Ok(SymmetricTensor::zeros(body.dim(), s));
    }
    let table = CroftonTable::new(body.dim(), s)?;
    let phis = (0..=s / 2).map(|k| surface_tensor(body, 2 * k, q)).collect::<Result<Vec<_>>>()?;
    table.forward_combination(&phis)
}

/// One-shot form of [`HitMeasureGrid::inverse_crofton`]; should reproduce
/// `Φ_{n-1,0,s}(K)`.
pub fn inverse_crofton_oracle(body: &ConvexBody, s: usize, q: &QuadratureSpec) -> Result<SymmetricTensor> {
    HitMeasureGrid::new(body, q).inverse_crofton(s)
}

/// One-shot form of [`HitMeasureGrid::reconstruct`].
pub fn reconstruct_from_crofton(body: &ConvexBody, s: usize, q: &QuadratureSpec) -> Result<SymmetricTensor> {
    HitMeasureGrid::new(body, q).reconstruct(s)
}

/// `max |a - b| / max |b|` (absolute gap when `b` vanishes).
pub fn relative_gap(a: &SymmetricTensor, b: &SymmetricTensor) -> Result<f64> {
    let gap = a.max_abs_diff(b)?;
    let scale = b.max_abs();
    Ok(if scale > 0.0 { gap / scale } else { gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn q(n: usize) -> QuadratureSpec {
        match n {
            2 => QuadratureSpec::new(256, 64, QuadratureMethod::MidpointGrid).unwrap(),
            _ => QuadratureSpec::new(16, 24, QuadratureMethod::MidpointGrid).unwrap(),
        }
    }

    #[test]
    fn polytope_examples() {
        let sq = ConvexBody::cuboid(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_relative_eq!(surface_tensor_polytope(&sq, 0).unwrap().coeffs()[0], 2.0, max_relative = 1e-15);
        let want = SymmetricTensor::metric(2).scale(1.0 / (4.0 * PI));
        assert!(surface_tensor_polytope(&sq, 2).unwrap().max_abs_diff(&want).unwrap() < 1e-16);
        let cube = ConvexBody::cuboid(&[0.5; 3], &[0.5; 3]).unwrap();
        let want = SymmetricTensor::metric(3).scale(1.0 / (4.0 * PI));
        assert!(surface_tensor_polytope(&cube, 2).unwrap().max_abs_diff(&want).unwrap() < 1e-16);
        assert!(surface_tensor_polytope(&cube, 3).unwrap().max_abs() < 1e-16);
    }

    #[test]
    fn smooth_examples() {
        let disk = ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap();
        let t = surface_tensor_smooth(&disk, 2, &q(2)).unwrap();
        assert!(t.max_abs_diff(&SymmetricTensor::metric(2).scale(0.125)).unwrap() < 1e-14);
        let ball = ConvexBody::ball(&[0.0; 3], 1.0).unwrap();
        let t = surface_tensor_smooth(&ball, 2, &q(3)).unwrap();
        assert!(t.max_abs_diff(&SymmetricTensor::metric(3).scale(1.0 / 6.0)).unwrap() < 1e-14);
        assert_relative_eq!(top_intrinsic_volume(&ball, &q(3)).unwrap(), 2.0 * PI, max_relative = 1e-14);
        let e = ConvexBody::axis_ellipsoid(&[1.0, 0.5, 2.0]).unwrap();
        assert!(surface_tensor_smooth(&e, 3, &q(3)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn spheroid_surface_area_closed_form() {
        // prolate spheroid (a, a, c), c > a: S = 2πa² (1 + c/(a e) asin e)
        let (a, c) = (1.0f64, 2.0f64);
        let e = (1.0 - a * a / (c * c)).sqrt();
        let area = 2.0 * PI * a * a * (1.0 + c / (a * e) * e.asin());
        let body = ConvexBody::axis_ellipsoid(&[a, a, c]).unwrap();
        assert_relative_eq!(top_intrinsic_volume(&body, &q(3)).unwrap(), area / 2.0, max_relative = 1e-10);
    }

    #[test]
    fn ellipse_perimeter_closed_form() {
        // perimeter of the (2, 1) ellipse, 9.688448220547675...
        let body = ConvexBody::axis_ellipsoid(&[2.0, 1.0]).unwrap();
        assert_relative_eq!(top_intrinsic_volume(&body, &q(2)).unwrap(), 9.688448220547675 / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn brightness_oracle_agrees() {
        let sph = ConvexBody::axis_ellipsoid(&[1.0, 1.0, 2.0]).unwrap();
        for v in [[1.0, 0.0, 0.0], [0.3, -0.2, 0.9]] {
            let d = LinearDirection::new(&v).unwrap();
            assert_relative_eq!(brightness_oracle(&sph, &d, &q(3)).unwrap(), sph.brightness(&d), max_relative = 1e-6);
        }
        let sq = ConvexBody::cuboid(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_relative_eq!(brightness_oracle(&sq, &LinearDirection::axis(2, 0), &q(2)).unwrap(), 1.0);
    }

    #[test]
    fn hit_measure_matches_brightness() {
        let bodies = [
            ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap(),
            ConvexBody::axis_ellipsoid(&[2.0, 1.0]).unwrap(),
        ];
        for b in &bodies {
            for phi in [0.1, 1.0, 2.0] {
                let d = LinearDirection::from_angle(phi);
                assert_relative_eq!(hit_set_measure(b, &d, 32), b.brightness(&d), max_relative = 1e-10);
            }
        }
        let sph = ConvexBody::axis_ellipsoid(&[1.0, 1.0, 2.0]).unwrap();
        let d = LinearDirection::new(&[0.2, 0.5, 0.7]).unwrap();
        assert_relative_eq!(hit_set_measure(&sph, &d, 48), sph.brightness(&d), max_relative = 1e-8);
    }

    #[test]
    fn disk_crofton_integrals() {
        let disk = ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap();
        let lhs = crofton_integral_oracle(&disk, 0, &q(2));
        assert_relative_eq!(lhs.coeffs()[0], 2.0, max_relative = 1e-10);
        assert!(crofton_integral_oracle(&disk, 3, &q(2)).max_abs() < 1e-10);
        let inv = inverse_crofton_oracle(&disk, 2, &q(2)).unwrap();
        assert!(inv.max_abs_diff(&SymmetricTensor::metric(2).scale(0.125)).unwrap() < 1e-8);
    }
}
