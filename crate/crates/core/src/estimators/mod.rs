//! Design-based estimators of surface tensors from line and flat sections.

pub mod curves;
pub mod mc;
pub mod sampling;
pub mod weighted;

use std::f64::consts::PI;

use crate::bodies::{AffineLine, ConvexBody, Section, VerticalFlat2};
use crate::crofton_coeffs::{kappa, omega, MeasurementFunction};
use crate::error::{Error, Result};
use crate::ground_truth::{top_intrinsic_volume, QuadratureMethod, QuadratureSpec};
use crate::linalg;
use crate::quadrature::direction_grid;
use crate::symtensor::{LinearDirection, SymmetricTensor};

/// Boundary nodes for `V₁` of planar sections.
const SECTION_NODES: usize = 256;

/// The compact convex set `A` that the sampling designs are built on.
#[derive(Debug, Clone)]
pub struct ReferenceSet {
    body: ConvexBody,
    top_volume: f64,
}

impl ReferenceSet {
    pub fn new(body: ConvexBody) -> Result<Self> {
        let n = body.dim();
        let top_volume = match body.as_ball() {
            Some(b) => 0.5 * omega(n) * b.radius().powi(n as i32 - 1),
            None => top_intrinsic_volume(&body, &QuadratureSpec::standard(n))?,
        };
        Ok(Self { body, top_volume })
    }

    pub fn ball(center: &[f64], radius: f64) -> Result<Self> {
        Self::new(ConvexBody::ball(center, radius)?)
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    /// `V_{n-1}(A)`.
    pub fn top_volume(&self) -> f64 {
        self.top_volume
    }

    /// `c₁(A)⁻¹ = 2 κ_{n-1} V_{n-1}(A) / ω_n`, the measure of the lines
    /// hitting `A`.
    pub fn c1_inv(&self) -> f64 {
        let n = self.dim();
        2.0 * kappa(n - 1) * self.top_volume / omega(n)
    }

    /// `V_{n-2}(A | L₀⊥)` (`n = 3`: half the perimeter of the projection).
    pub fn projected_volume(&self, l0: &LinearDirection) -> Result<f64> {
        if self.dim() != 3 {
            return Err(Error::Unsupported("vertical designs need n = 3".into()));
        }
        if let Some(b) = self.body.as_ball() {
            return Ok(PI * b.radius());
        }
        // Cauchy in the plane: perimeter = ∫_0^π width(u_θ) dθ
        let (e1, e2) = crate::ground_truth::orthonormal_complement(l0.unit());
        let m = 4096;
        let half: f64 = (0..m)
            .map(|i| {
                let t = PI * (i as f64 + 0.5) / m as f64;
                self.body.width(&linalg::axpy(&linalg::scale(&e1, t.cos()), t.sin(), &e2))
            })
            .sum::<f64>()
            * PI
            / m as f64;
        Ok(0.5 * half)
    }

    /// Support-function dominance on a direction grid: `h(K, u) ≤ h(A, u)`.
    pub fn contains(&self, k: &ConvexBody) -> bool {
        let n = self.dim();
        if k.dim() != n {
            return false;
        }
        let nodes = if n == 2 { 720 } else { 24 };
        direction_grid(n, nodes).iter().all(|(u, _)| {
            let neg = linalg::scale(u, -1.0);
            k.support(u) <= self.body.support(u) + 1e-12 && k.support(&neg) <= self.body.support(&neg) + 1e-12
        })
    }

    pub fn require_contains(&self, k: &ConvexBody) -> Result<()> {
        if self.contains(k) {
            Ok(())
        } else {
            Err(Error::InvalidArgument("body is not contained in the reference set".into()))
        }
    }
}

/// `c₁(A)⁻¹ G_s(π(E)) V₀(K ∩ E)`.
pub fn est_hitmiss(k: &ConvexBody, a: &ReferenceSet, e: &AffineLine, g: &MeasurementFunction) -> SymmetricTensor {
    if k.line_hits(e) {
        g.eval(e.direction()).scale(a.c1_inv())
    } else {
        SymmetricTensor::zeros(g.dim(), g.rank())
    }
}

/// `(1/N) Σ G_s(L_i) V_{n-1}(K | L_i⊥)` for lines through the origin.
pub fn est_projection(k: &ConvexBody, dirs: &[LinearDirection], g: &MeasurementFunction) -> Result<SymmetricTensor> {
    if dirs.is_empty() {
        return Err(Error::InvalidArgument("projection estimator needs at least one direction".into()));
    }
    let mut acc = SymmetricTensor::zeros(g.dim(), g.rank());
    for d in dirs {
        acc.add_scaled(k.brightness(d), &g.eval(d))?;
    }
    Ok(acc.scale(1.0 / dirs.len() as f64))
}

/// `(n+1) V_{n-1}(K|L_i⊥) > Σ_j V_{n-1}(K|L_j⊥)` for every frame line.
pub fn posdef_condition(k: &ConvexBody, frame: &[LinearDirection]) -> bool {
    let n = frame.len() as f64;
    let b: Vec<f64> = frame.iter().map(|d| k.brightness(d)).collect();
    let total: f64 = b.iter().sum();
    b.iter().all(|bi| (n + 1.0) * bi > total)
}

/// `r(K)/R(K) > (1 - 1/n)^{1/(n-1)}`.
pub fn sufficient_ratio_check(k: &ConvexBody) -> Result<bool> {
    let n = k.dim() as f64;
    let (r, big_r) = k.inradius_circumradius()?;
    if !(r > 0.0) {
        return Err(Error::Degenerate("body has empty interior".into()));
    }
    Ok(r / big_r > (1.0 - 1.0 / n).powf(1.0 / (n - 1.0)))
}

/// `S_N(K, φ₀) = (1/N) Σ_i G₂(u_i) V₁(K | u_i⊥)`, `u_i = u_{φ₀ + iπ/N}`.
pub fn systematic_estimator_2d(k: &ConvexBody, n_lines: usize, phi0: f64) -> Result<SymmetricTensor> {
    if k.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: k.dim() });
    }
    if n_lines == 0 {
        return Err(Error::InvalidArgument("need at least one line".into()));
    }
    let dirs: Vec<LinearDirection> =
        (0..n_lines).map(|i| LinearDirection::from_angle(phi0 + PI * i as f64 / n_lines as f64)).collect();
    est_projection(k, &dirs, &MeasurementFunction::new(2, 2)?)
}

/// The smaller angle between two lines through the origin, in `[0, π/2]`.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let c = linalg::dot(a, b).abs() / (linalg::norm(a) * linalg::norm(b));
    c.min(1.0).acos()
}

/// `V₁` of a planar section (0 for the empty set).
pub fn section_half_perimeter(sec: &Section) -> Result<f64> {
    match sec.body() {
        None => Ok(0.0),
        Some(b) if b.as_ball().is_some() => Ok(PI * b.as_ball().map_or(0.0, |d| d.radius())),
        Some(b) => top_intrinsic_volume(
            b,
            &QuadratureSpec {
                direction_nodes: SECTION_NODES,
                offset_nodes: 16,
                method: QuadratureMethod::BoundaryParametrization,
            },
        ),
    }
}

/// Vertical-section estimator with an IUR line `e` (flat coordinates) of
/// the flat `h` hitting `A ∩ H`:
/// `V_{n-2}(A|L₀⊥) c₃(A)⁻¹ G_s(π(E)) V₀(K ∩ E) sin(∠(E, L₀))^{n-2}` with
/// `c₃(A)⁻¹ = 2 V₁(A ∩ H) / π`.
pub fn est_vertical(
    k: &ConvexBody,
    a: &ReferenceSet,
    h: &VerticalFlat2,
    e: &AffineLine,
    g: &MeasurementFunction,
) -> Result<SymmetricTensor> {
    let l0 = h.vertical();
    let world = h.line_to_world(e)?;
    if !k.line_hits(&world) {
        return Ok(SymmetricTensor::zeros(g.dim(), g.rank()));
    }
    let a_sec = a.body().flat_section(h)?;
    let c3_inv = 2.0 * section_half_perimeter(&a_sec)? / PI;
    let n = k.dim() as i32;
    let sin = angle_between(world.direction().unit(), l0.unit()).sin();
    let factor = a.projected_volume(l0)? * c3_inv * sin.powi(n - 2);
    Ok(g.eval(world.direction()).scale(factor))
}

/// Width-based vertical-section estimator for a unit vector `u` of the
/// flat (flat coordinates):
/// `V_{n-2}(A|L₀⊥) G_s(U⊥ ∩ π(H)) cos(∠(U, L₀))^{n-2} w(K ∩ H, U)`.
pub fn est_vertical_width(
    k: &ConvexBody,
    a: &ReferenceSet,
    h: &VerticalFlat2,
    u: [f64; 2],
    g: &MeasurementFunction,
) -> Result<SymmetricTensor> {
    let sec = k.flat_section(h)?;
    let w = sec.width(&u);
    if w == 0.0 {
        return Ok(SymmetricTensor::zeros(g.dim(), g.rank()));
    }
    let l0 = h.vertical();
    let u_world = h.vector_to_world(u);
    let perp = LinearDirection::new(&h.vector_to_world([-u[1], u[0]]))?;
    let n = k.dim() as i32;
    let cos = angle_between(&u_world, l0.unit()).cos();
    let factor = a.projected_volume(l0)? * cos.powi(n - 2) * w;
    Ok(g.eval(&perp).scale(factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hitmiss_examples() {
        let a = ReferenceSet::ball(&[0.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(a.c1_inv(), 2.0, max_relative = 1e-15);
        let g = MeasurementFunction::new(2, 2).unwrap();
        let k = ConvexBody::ball(&[0.0, 0.0], 0.5).unwrap();
        let hit = AffineLine::through(LinearDirection::axis(2, 0), &[0.0, 0.1]).unwrap();
        let t = est_hitmiss(&k, &a, &hit, &g);
        assert_relative_eq!(t.get(&[0, 0]).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(t.get(&[1, 1]).unwrap(), -0.25, max_relative = 1e-14);
        assert_eq!(t.get(&[0, 1]).unwrap(), 0.0);
        let miss = AffineLine::through(LinearDirection::axis(2, 0), &[0.0, 0.9]).unwrap();
        assert_eq!(est_hitmiss(&k, &a, &miss, &g).max_abs(), 0.0);

        // n = 3: (V₂(A)/π)(Q(L) - Q/4)
        let a3 = ReferenceSet::ball(&[0.0; 3], 1.3).unwrap();
        let g3 = MeasurementFunction::new(3, 2).unwrap();
        let k3 = ConvexBody::ball(&[0.0; 3], 1.0).unwrap();
        let d = LinearDirection::new(&[1.0, 2.0, -0.5]).unwrap();
        let line = AffineLine::through(d.clone(), &[0.0; 3]).unwrap();
        let want = SymmetricTensor::line_metric(&d)
            .sub(&SymmetricTensor::metric(3).scale(0.25))
            .unwrap()
            .scale(a3.top_volume() / PI);
        assert!(est_hitmiss(&k3, &a3, &line, &g3).max_abs_diff(&want).unwrap() < 1e-14);
    }

    #[test]
    fn projection_of_ball_on_orthonormal_frame_is_exact() {
        let g = MeasurementFunction::new(3, 2).unwrap();
        let k = ConvexBody::ball(&[0.0; 3], 1.0).unwrap();
        let r = linalg::mat_mul(&linalg::axis_rotation(3, 0, 0.3).unwrap(), &linalg::axis_rotation(3, 2, 1.1).unwrap());
        let frame: Vec<LinearDirection> =
            (0..3).map(|j| LinearDirection::new(&[r[0][j], r[1][j], r[2][j]]).unwrap()).collect();
        let t = est_projection(&k, &frame, &g).unwrap();
        assert!(t.max_abs_diff(&SymmetricTensor::metric(3).scale(1.0 / 6.0)).unwrap() < 1e-15);
    }

    #[test]
    fn projection_rank0_is_exact_for_balls() {
        let g = MeasurementFunction::new(3, 0).unwrap();
        let k = ConvexBody::ball(&[0.0; 3], 2.0).unwrap();
        let t = est_projection(&k, &[LinearDirection::axis(3, 1)], &g).unwrap();
        assert_relative_eq!(t.coeffs()[0], 2.0 * PI * 4.0, max_relative = 1e-14);
    }

    #[test]
    fn posdef_condition_examples() {
        let ball = ConvexBody::ball(&[0.0; 3], 1.0).unwrap();
        let frame = vec![LinearDirection::axis(3, 0), LinearDirection::axis(3, 1), LinearDirection::axis(3, 2)];
        assert!(posdef_condition(&ball, &frame));
        // ellipse (α, kα), k = 0.3: condition holds iff φ in the window around π/4
        let k = 0.3;
        let e = ConvexBody::axis_ellipsoid(&[1.0, k]).unwrap();
        let s = ((1.0 - 4.0 * k * k) / (5.0 * (1.0 - k * k))).sqrt();
        let (lo, hi) = (s.asin(), s.acos());
        for i in 0..200 {
            let phi = (i as f64 + 0.5) * PI / 400.0;
            let frame = vec![LinearDirection::from_angle(phi), LinearDirection::from_angle(phi + PI / 2.0)];
            let inside = phi > lo + 1e-9 && phi < hi - 1e-9;
            let outside = phi < lo - 1e-9 || phi > hi + 1e-9;
            if inside {
                assert!(posdef_condition(&e, &frame), "phi={phi}");
            }
            if outside {
                assert!(!posdef_condition(&e, &frame), "phi={phi}");
            }
        }
    }

    #[test]
    fn ratio_check_examples() {
        assert!(sufficient_ratio_check(&ConvexBody::ball(&[0.0; 3], 1.0).unwrap()).unwrap());
        assert!(sufficient_ratio_check(&ConvexBody::axis_ellipsoid(&[1.0, 0.6]).unwrap()).unwrap());
        assert!(!sufficient_ratio_check(&ConvexBody::axis_ellipsoid(&[1.0, 0.4]).unwrap()).unwrap());
    }

    #[test]
    fn systematic_disk_is_exact() {
        let disk = ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap();
        for n in 2..6 {
            for phi0 in [0.0, 0.1, 0.5] {
                let t = systematic_estimator_2d(&disk, n, phi0).unwrap();
                assert!(t.max_abs_diff(&SymmetricTensor::metric(2).scale(0.125)).unwrap() < 1e-15);
            }
        }
        let s1 = systematic_estimator_2d(&disk, 1, 0.3).unwrap();
        let sp = s1.rank2_spectrum().unwrap();
        assert!(sp[0] < 0.0 && sp[1] > 0.0);
        assert_relative_eq!(sp[1] / sp[0], -2.0, max_relative = 1e-12);
    }

    #[test]
    fn vertical_estimators_zero_when_missing() {
        let a = ReferenceSet::ball(&[0.0; 3], 2.0).unwrap();
        let k = ConvexBody::ball(&[0.0; 3], 0.5).unwrap();
        let g = MeasurementFunction::new(3, 2).unwrap();
        let h = VerticalFlat2::new(LinearDirection::axis(3, 2), &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(est_vertical_width(&k, &a, &h, [1.0, 0.0], &g).unwrap().max_abs(), 0.0);
        let e = AffineLine::through(LinearDirection::from_angle(0.3), &[0.0, 0.0]).unwrap();
        assert_eq!(est_vertical(&k, &a, &h, &e, &g).unwrap().max_abs(), 0.0);
        // a line along L₀ has zero weight
        let h0 = VerticalFlat2::new(LinearDirection::axis(3, 2), &[1.0, 0.0, 0.0], &[0.0; 3]).unwrap();
        let along = AffineLine::through(LinearDirection::axis(2, 0), &[0.0, 0.0]).unwrap();
        assert_eq!(est_vertical(&k, &a, &h0, &along, &g).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn reference_set_containment() {
        let a = ReferenceSet::ball(&[0.0, 0.0], 1.0).unwrap();
        assert!(a.contains(&ConvexBody::cuboid(&[0.0, 0.0], &[0.5, 0.5]).unwrap()));
        assert!(!a.contains(&ConvexBody::cuboid(&[0.0, 0.0], &[0.8, 0.8]).unwrap()));
        let a3 = ReferenceSet::new(ConvexBody::cuboid(&[0.0; 3], &[1.0; 3]).unwrap()).unwrap();
        assert_relative_eq!(a3.top_volume(), 12.0, max_relative = 1e-14);
        assert_relative_eq!(a3.projected_volume(&LinearDirection::axis(3, 2)).unwrap(), 4.0, max_relative = 1e-6);
    }
}
