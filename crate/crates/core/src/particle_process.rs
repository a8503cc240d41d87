//! Stationary Poisson processes of convex particles (Boolean-model germs
//! with i.i.d. grains) and line-section estimation of their specific
//! surface tensors.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::bodies::{AffineLine, ConvexBody};
use crate::crofton_coeffs::{kappa, omega, MeasurementFunction};
use crate::error::{Error, Result};
use crate::estimators::sampling::{orthogonal_frame, uniform_direction};
use crate::ground_truth::{surface_tensor, QuadratureSpec};
use crate::linalg;
use crate::symtensor::{LinearDirection, SymmetricTensor};

/// Grain distributions; every grain has its circumcenter at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GrainModel {
    FixedDisk { radius: f64 },
    /// Radius uniform on `[min, max]`.
    RandomDisk { min: f64, max: f64 },
    /// Ellipse with a uniformly random orientation.
    RotatedEllipse { semi_axes: [f64; 2] },
    /// Spheroid `(a, a, c)` with a uniformly random orientation.
    RotatedSpheroid { a: f64, c: f64 },
}

impl GrainModel {
    pub fn dim(&self) -> usize {
        match self {
            Self::RotatedSpheroid { .. } => 3,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::FixedDisk { radius } => *radius > 0.0,
            Self::RandomDisk { min, max } => *min > 0.0 && max >= min,
            Self::RotatedEllipse { semi_axes } => semi_axes.iter().all(|a| *a > 0.0),
            Self::RotatedSpheroid { a, c } => *a > 0.0 && *c > 0.0,
        };
        if ok && self.circumradius().is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid grain model {self:?}")))
        }
    }

    /// Bound on the circumradius of every grain.
    pub fn circumradius(&self) -> f64 {
        match self {
            Self::FixedDisk { radius } => *radius,
            Self::RandomDisk { max, .. } => *max,
            Self::RotatedEllipse { semi_axes } => semi_axes[0].max(semi_axes[1]),
            Self::RotatedSpheroid { a, c } => a.max(*c),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ConvexBody> {
        match self {
            Self::FixedDisk { radius } => ConvexBody::ball(&[0.0, 0.0], *radius),
            Self::RandomDisk { min, max } => ConvexBody::ball(&[0.0, 0.0], min + (max - min) * rng.random::<f64>()),
            Self::RotatedEllipse { semi_axes } => {
                let r = linalg::axis_rotation(2, 0, PI * rng.random::<f64>())?;
                ConvexBody::ellipsoid(&[0.0, 0.0], semi_axes, r)
            }
            Self::RotatedSpheroid { a, c } => {
                let f = orthogonal_frame(3, rng);
                let r: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| f[j].unit()[i]).collect()).collect();
                ConvexBody::ellipsoid(&[0.0; 3], &[*a, *a, *c], r)
            }
        }
    }

    /// The grain body before rotation (a representative of the law up
    /// to rotations), and the mean of the size factor `λ` with grains
    /// `λ·K₀` for disks.
    fn representative(&self) -> Result<(ConvexBody, f64)> {
        match self {
            Self::FixedDisk { radius } => Ok((ConvexBody::ball(&[0.0, 0.0], 1.0)?, *radius)),
            Self::RandomDisk { min, max } => Ok((ConvexBody::ball(&[0.0, 0.0], 1.0)?, 0.5 * (min + max))),
            Self::RotatedEllipse { semi_axes } => Ok((ConvexBody::axis_ellipsoid(semi_axes)?, 1.0)),
            Self::RotatedSpheroid { a, c } => Ok((ConvexBody::axis_ellipsoid(&[*a, *a, *c])?, 1.0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleProcessModel {
    intensity: f64,
    grain: GrainModel,
    window_lo: Vec<f64>,
    window_hi: Vec<f64>,
}

/// A translated grain.
#[derive(Debug, Clone)]
pub struct Particle {
    pub germ: Vec<f64>,
    pub body: ConvexBody,
}

impl ParticleProcessModel {
    pub fn new(intensity: f64, grain: GrainModel, window_lo: Vec<f64>, window_hi: Vec<f64>) -> Result<Self> {
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(Error::Config(format!("intensity {intensity} must be positive")));
        }
        grain.validate()?;
        let n = grain.dim();
        if window_lo.len() != n || window_hi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: window_lo.len().min(window_hi.len()) });
        }
        if window_lo.iter().zip(&window_hi).any(|(a, b)| !(b > a)) {
            return Err(Error::Config("window must have positive side lengths".into()));
        }
        Ok(Self { intensity, grain, window_lo, window_hi })
    }

    /// Cube `[0, side]ⁿ`.
    pub fn cube(intensity: f64, grain: GrainModel, side: f64) -> Result<Self> {
        let n = grain.dim();
        Self::new(intensity, grain, vec![0.0; n], vec![side; n])
    }

    pub fn dim(&self) -> usize {
        self.grain.dim()
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn grain(&self) -> &GrainModel {
        &self.grain
    }

    pub fn window(&self) -> (&[f64], &[f64]) {
        (&self.window_lo, &self.window_hi)
    }

    pub fn window_center(&self) -> Vec<f64> {
        self.window_lo.iter().zip(&self.window_hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Volume of the window dilated by the circumradius bound (a box).
    pub fn dilated_volume(&self) -> f64 {
        let m = self.grain.circumradius();
        self.window_lo.iter().zip(&self.window_hi).map(|(a, b)| b - a + 2.0 * m).product()
    }

    /// `γ_L = γ E[V_{n-1}(K | L⊥)]`, independent of `L` for the shipped
    /// isotropic grain laws.
    pub fn section_intensity_truth(&self, q: &QuadratureSpec) -> Result<f64> {
        let n = self.dim();
        let v = specific_tensor_truth(self, 0, q)?.coeffs()[0];
        Ok(2.0 * kappa(n - 1) / omega(n) * v)
    }
}

/// One realization: Poisson germs in the dilated window, i.i.d. grains.
pub fn simulate<R: Rng + ?Sized>(model: &ParticleProcessModel, rng: &mut R) -> Result<Vec<Particle>> {
    let m = model.grain.circumradius();
    let mean = model.intensity * model.dilated_volume();
    let count = Poisson::new(mean).map_err(|e| Error::Config(e.to_string()))?.sample(rng) as usize;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let germ: Vec<f64> = model
            .window_lo
            .iter()
            .zip(&model.window_hi)
            .map(|(a, b)| (a - m) + (b - a + 2.0 * m) * rng.random::<f64>())
            .collect();
        let body = model.grain.sample(rng)?.translated(&germ)?;
        out.push(Particle { germ, body });
    }
    Ok(out)
}

/// Test segment of length `length` centered at the window center.
fn test_line(model: &ParticleProcessModel, dir: &LinearDirection, length: f64) -> Result<AffineLine> {
    let c = model.window_center();
    for sign in [-0.5, 0.5] {
        let p = linalg::axpy(&c, sign * length, dir.unit());
        let inside = p.iter().zip(model.window_lo.iter().zip(&model.window_hi)).all(|(x, (a, b))| *x >= *a && *x <= *b);
        if !inside {
            return Err(Error::OutOfRange(format!("test segment of length {length} leaves the window")));
        }
    }
    AffineLine::through(dir.clone(), &c)
}

/// Particles whose chord midpoint lies on the test segment.
fn segment_hits(particles: &[Particle], line: &AffineLine, center: &[f64], length: f64, bound: f64) -> usize {
    let d = line.direction().unit();
    // line parameters are measured from the foot point of the origin
    let t_c = linalg::dot(center, d);
    particles
        .iter()
        .filter(|p| {
            let w = linalg::sub(&p.germ, center);
            let along = linalg::dot(&w, d);
            if along.abs() > 0.5 * length + bound || linalg::dot(&w, &w) - along * along > bound * bound {
                return false;
            }
            match p.body.line_chord(line) {
                Some((t0, t1)) => {
                    let mid = 0.5 * (t0 + t1) - t_c;
                    (-0.5 * length..0.5 * length).contains(&mid)
                }
                None => false,
            }
        })
        .count()
}

/// `γ̂_L`: chord midpoints per unit length on the centered test segment.
pub fn section_intensity(
    model: &ParticleProcessModel,
    particles: &[Particle],
    dir: &LinearDirection,
    length: f64,
) -> Result<f64> {
    let line = test_line(model, dir, length)?;
    Ok(segment_hits(particles, &line, &model.window_center(), length, model.grain.circumradius()) as f64 / length)
}

/// Direction designs for the test lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionDesign {
    /// Independent isotropic directions.
    Iid,
    /// Equidistant planar directions with a uniform random start; in ℝ³,
    /// random orthonormal frames.
    Systematic,
}

pub fn draw_directions<R: Rng + ?Sized>(n: usize, count: usize, design: DirectionDesign, rng: &mut R) -> Vec<LinearDirection> {
    match (design, n) {
        (DirectionDesign::Iid, _) => (0..count).map(|_| uniform_direction(n, rng)).collect(),
        (DirectionDesign::Systematic, 2) => {
            let phi0 = rng.random::<f64>() * PI / count as f64;
            (0..count).map(|i| LinearDirection::from_angle(phi0 + PI * i as f64 / count as f64)).collect()
        }
        (DirectionDesign::Systematic, _) => {
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                out.extend(orthogonal_frame(n, rng));
            }
            out.truncate(count);
            out
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpecificTensorEstimate {
    pub rank: usize,
    pub tensor: SymmetricTensor,
    pub lines: usize,
    pub hits_per_line: Vec<usize>,
}

/// `(1/N) Σ G_s(L_i) γ̂_{L_i}` for each requested rank, from one set of
/// test segments.
pub fn specific_tensor_estimates(
    model: &ParticleProcessModel,
    particles: &[Particle],
    dirs: &[LinearDirection],
    length: f64,
    ranks: &[usize],
) -> Result<Vec<SpecificTensorEstimate>> {
    if dirs.is_empty() {
        return Err(Error::InvalidArgument("need at least one test line".into()));
    }
    let bound = model.grain.circumradius();
    let center = model.window_center();
    let mut hits = Vec::with_capacity(dirs.len());
    for d in dirs {
        let line = test_line(model, d, length)?;
        hits.push(segment_hits(particles, &line, &center, length, bound));
    }
    let n = model.dim();
    ranks
        .iter()
        .map(|&s| {
            let g = MeasurementFunction::new(n, s)?;
            let mut acc = SymmetricTensor::zeros(n, s);
            for (d, &h) in dirs.iter().zip(&hits) {
                acc.add_scaled(h as f64 / length, &g.eval(d))?;
            }
            Ok(SpecificTensorEstimate {
                rank: s,
                tensor: acc.scale(1.0 / dirs.len() as f64),
                lines: dirs.len(),
                hits_per_line: hits.clone(),
            })
        })
        .collect()
}

pub fn specific_tensor_estimate(
    model: &ParticleProcessModel,
    particles: &[Particle],
    dirs: &[LinearDirection],
    length: f64,
    s: usize,
) -> Result<SpecificTensorEstimate> {
    Ok(specific_tensor_estimates(model, particles, dirs, length, &[s])?.remove(0))
}

/// `γ E[Φ_{n-1,0,s}(K)]` for the isotropic grain laws: the surface tensor
/// of the unrotated grain projected onto the rotation-invariant tensors
/// `c Q^{s/2}`.
pub fn specific_tensor_truth(model: &ParticleProcessModel, s: usize, q: &QuadratureSpec) -> Result<SymmetricTensor> {
    if s % 2 == 1 {
        return Err(Error::OddRank(s));
    }
    let n = model.dim();
    let (body, size) = model.grain.representative()?;
    let phi = surface_tensor(&body, s, q)?;
    let qs = SymmetricTensor::metric(n).power(s / 2);
    let c = phi.full_contraction(&qs)? / qs.full_contraction(&qs)?;
    Ok(qs.scale(model.intensity * size.powi(n as i32 - 1) * c))
}
