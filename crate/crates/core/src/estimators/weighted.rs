//! Single-component estimators in the plane with non-uniform direction
//! densities (importance sampling of the line direction).
//!
//! Densities are taken with respect to `dφ/π` on `[0, π)`, so the uniform
//! density is 1.

use std::f64::consts::PI;

use rand::Rng;

use super::ReferenceSet;
use crate::bodies::{AffineLine, ConvexBody};
use crate::error::{Error, Result};
use crate::quadrature::{gl_interval, integrate};
use crate::symtensor::LinearDirection;

/// Cells of the inverse-CDF table.
pub const TABLE_CELLS: usize = 4096;
const CELL_NODES: usize = 6;

/// `κ = arccos(1/√3)`.
pub fn kappa_angle() -> f64 {
    (1.0 / 3.0f64.sqrt()).acos()
}

/// `M = (√2 + κ)/(4π) − 1/16`, the normalizer of the diagonal densities.
pub fn diag_normalizer() -> f64 {
    (2.0f64.sqrt() + kappa_angle()) / (4.0 * PI) - 1.0 / 16.0
}

/// `3/(8π)`, the normalizer of the off-diagonal density.
pub fn offdiag_normalizer() -> f64 {
    3.0 / (8.0 * PI)
}

/// A component `(i, j)` of a planar rank-2 tensor, 0-based, `i ≤ j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Component {
    i: usize,
    j: usize,
}

impl Component {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i > 1 || j > 1 {
            return Err(Error::OutOfRange(format!("component ({i}, {j}) of a planar tensor")));
        }
        Ok(Self { i: i.min(j), j: i.max(j) })
    }

    pub fn all() -> [Component; 3] {
        [Component { i: 0, j: 0 }, Component { i: 0, j: 1 }, Component { i: 1, j: 1 }]
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn is_diagonal(&self) -> bool {
        self.i == self.j
    }

    /// `g_ij(u_φ) = (3/8)(u_i u_j − δ_ij/3)`, the component of `G₂`.
    pub fn g(&self, phi: f64) -> f64 {
        let u = [phi.cos(), phi.sin()];
        let delta = if self.is_diagonal() { 1.0 / 3.0 } else { 0.0 };
        0.375 * (u[self.i] * u[self.j] - delta)
    }

    /// `∫ |g_ij| dφ/π`.
    pub fn abs_g_mean(&self) -> f64 {
        if self.is_diagonal() {
            diag_normalizer()
        } else {
            offdiag_normalizer()
        }
    }

    /// Zeros of `g_ij` in `[0, π)`.
    pub fn zeros(&self) -> Vec<f64> {
        let k = kappa_angle();
        match (self.i, self.j) {
            (0, 0) => vec![k, PI - k],
            (1, 1) => vec![0.5 * PI - k, 0.5 * PI + k],
            _ => vec![0.0, 0.5 * PI],
        }
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.i + 1, self.j + 1)
    }
}

/// Direction densities on `[0, π)`.
#[derive(Debug, Clone)]
pub enum DirectionDensity {
    Uniform,
    /// `∝ |g_ij|`.
    FStar(Component),
    /// `∝ |g_ij| √(2R V₁(K | u⊥))`, the optimum for a known body.
    FStarK { component: Component, body: ConvexBody, radius: f64 },
    /// `∝ 1 + a cos(2(φ − shift))`, `|a| < 1`.
    Cosine { amplitude: f64, shift: f64 },
    /// `∝ cos⁴(φ − shift) + floor`, `floor > 0`.
    Power4 { shift: f64, floor: f64 },
}

impl DirectionDensity {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Cosine { amplitude, .. } if !(amplitude.abs() < 1.0) => {
                Err(Error::InvalidArgument("cosine density needs |amplitude| < 1".into()))
            }
            Self::Power4 { floor, .. } if !(*floor > 0.0) => {
                Err(Error::InvalidArgument("power-4 density needs a positive floor".into()))
            }
            Self::FStarK { body, radius, .. } if body.dim() != 2 || !(*radius > 0.0) => {
                Err(Error::InvalidArgument("f*_K needs a planar body and a positive radius".into()))
            }
            _ => Ok(()),
        }
    }

    /// Unnormalized density at `φ`.
    pub fn unnormalized(&self, phi: f64) -> f64 {
        match self {
            Self::Uniform => 1.0,
            Self::FStar(c) => c.g(phi).abs(),
            Self::FStarK { component, body, radius } => {
                component.g(phi).abs() * (2.0 * radius * body.brightness(&LinearDirection::from_angle(phi))).sqrt()
            }
            Self::Cosine { amplitude, shift } => 1.0 + amplitude * (2.0 * (phi - shift)).cos(),
            Self::Power4 { shift, floor } => (phi - shift).cos().powi(4) + floor,
        }
    }

    /// Points in `[0, π]` where the density may fail to be smooth.
    fn breaks(&self) -> Vec<f64> {
        let mut b = vec![0.0, PI];
        match self {
            Self::FStar(c) => b.extend(c.zeros()),
            Self::FStarK { component, body, .. } => {
                b.extend(component.zeros());
                if let Some(p) = body.as_polygon() {
                    // the brightness kinks where u_φ is parallel to an edge
                    let v = p.vertices();
                    for e in 0..v.len() {
                        let (a, c) = (v[e], v[(e + 1) % v.len()]);
                        b.push((c[1] - a[1]).atan2(c[0] - a[0]).rem_euclid(PI));
                    }
                }
            }
            _ => {}
        }
        b.retain(|x| (0.0..=PI).contains(x));
        b.sort_by(f64::total_cmp);
        b.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        b
    }

    /// `∫ p dφ/π`.
    pub fn normalizer(&self) -> f64 {
        match self {
            Self::Uniform => 1.0,
            Self::FStar(c) => c.abs_g_mean(),
            Self::Cosine { .. } => 1.0,
            Self::Power4 { floor, .. } => 0.375 + floor,
            Self::FStarK { .. } => integrate(|x| self.unnormalized(x), &self.breaks(), 64) / PI,
        }
    }

    /// Normalized density (w.r.t. `dφ/π`).
    pub fn density(&self, phi: f64) -> f64 {
        self.unnormalized(phi) / self.normalizer()
    }

    pub fn label(&self) -> String {
        match self {
            Self::Uniform => "uniform".into(),
            Self::FStar(c) => format!("fstar{}", c.label()),
            Self::FStarK { component, .. } => format!("fstarK{}", component.label()),
            Self::Cosine { .. } => "cosine".into(),
            Self::Power4 { .. } => "power4".into(),
        }
    }
}

/// `f*(φ)` for component `ij`, normalized w.r.t. `dφ/π`.
pub fn fstar_density(c: Component, phi: f64) -> f64 {
    c.g(phi).abs() / c.abs_g_mean()
}

/// Inverse-CDF sampler: the density is replaced by its cell averages on
/// a table of [`TABLE_CELLS`] cells, which is sampled exactly; the
/// returned weight is the sampled (piecewise-constant) density.
#[derive(Debug, Clone)]
pub struct DensityTable {
    cdf: Vec<f64>,
    cell_density: Vec<f64>,
}

impl DensityTable {
    pub fn new(density: &DirectionDensity) -> Result<Self> {
        density.validate()?;
        let m = TABLE_CELLS;
        let h = PI / m as f64;
        let mut masses = Vec::with_capacity(m);
        for c in 0..m {
            let a = c as f64 * h;
            let mass: f64 = gl_interval(CELL_NODES, a, a + h).iter().map(|(x, w)| w * density.unnormalized(*x)).sum();
            if !(mass > 0.0) || !mass.is_finite() {
                return Err(Error::Degenerate(format!(
                    "{} density vanishes on [{a}, {}]",
                    density.label(),
                    a + h
                )));
            }
            masses.push(mass);
        }
        let total: f64 = masses.iter().sum();
        let mut cdf = Vec::with_capacity(m + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for &w in &masses {
            acc += w;
            cdf.push(acc / total);
        }
        cdf[m] = 1.0;
        let cell_density = masses.iter().map(|w| w / total * m as f64).collect();
        Ok(Self { cdf, cell_density })
    }

    /// Draws `φ` and returns it with its density (w.r.t. `dφ/π`).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let v: f64 = rng.random();
        let c = (self.cdf.partition_point(|&x| x <= v) - 1).min(TABLE_CELLS - 1);
        let frac = ((v - self.cdf[c]) / (self.cdf[c + 1] - self.cdf[c])).clamp(0.0, 1.0);
        let phi = (c as f64 + frac) * PI / TABLE_CELLS as f64;
        (phi, self.cell_density[c])
    }

    /// Density of the sampled law at `φ`.
    pub fn density(&self, phi: f64) -> f64 {
        let c = ((phi.rem_euclid(PI) / PI * TABLE_CELLS as f64) as usize).min(TABLE_CELLS - 1);
        self.cell_density[c]
    }
}

/// Rejection sampler against the uniform law; the weight is the exact
/// normalized density.
#[derive(Debug, Clone)]
pub struct RejectionSampler {
    density: DirectionDensity,
    normalizer: f64,
    bound: f64,
}

impl RejectionSampler {
    pub fn new(density: DirectionDensity) -> Result<Self> {
        density.validate()?;
        let grid = 8 * TABLE_CELLS;
        let peak =
            (0..=grid).map(|i| density.unnormalized(PI * i as f64 / grid as f64)).fold(0.0f64, f64::max);
        let normalizer = density.normalizer();
        Ok(Self { density, normalizer, bound: 1.05 * peak })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        loop {
            let phi = PI * rng.random::<f64>();
            let p = self.density.unnormalized(phi);
            if rng.random::<f64>() * self.bound < p {
                return (phi, p / self.normalizer);
            }
        }
    }
}

/// Either sampling route.
#[derive(Debug, Clone)]
pub enum WeightedSampler {
    Table(DensityTable),
    Rejection(RejectionSampler),
}

impl WeightedSampler {
    pub fn table(density: &DirectionDensity) -> Result<Self> {
        Ok(Self::Table(DensityTable::new(density)?))
    }

    pub fn rejection(density: DirectionDensity) -> Result<Self> {
        Ok(Self::Rejection(RejectionSampler::new(density)?))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self {
            Self::Table(t) => t.sample(rng),
            Self::Rejection(r) => r.sample(rng),
        }
    }
}

/// Line with direction `φ` and offset uniform on `[−R, R]` along the
/// normal, measured from the center of the ball `A`.
pub fn weighted_line<R: Rng + ?Sized>(a: &ReferenceSet, phi: f64, rng: &mut R) -> Result<AffineLine> {
    let ball = a.body().as_ball().ok_or_else(|| Error::Unsupported("weighted lines need a ball A".into()))?;
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: a.dim() });
    }
    let t = ball.radius() * (2.0 * rng.random::<f64>() - 1.0);
    let c = ball.center();
    let p = [c[0] - phi.sin() * t, c[1] + phi.cos() * t];
    AffineLine::through(LinearDirection::from_angle(phi), &p)
}

/// One draw of `2R g_ij(π(E)) V₀(K ∩ E) / f(π(E))`.
pub fn est_weighted<R: Rng + ?Sized>(
    k: &ConvexBody,
    a: &ReferenceSet,
    c: Component,
    sampler: &WeightedSampler,
    rng: &mut R,
) -> Result<f64> {
    let (phi, f) = sampler.sample(rng);
    let line = weighted_line(a, phi, rng)?;
    if !k.line_hits(&line) {
        return Ok(0.0);
    }
    let r = a.body().as_ball().map(|b| b.radius()).unwrap_or_default();
    Ok(2.0 * r * c.g(phi) / f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::mc::RngStream;
    use crate::quadrature::integrate;
    use approx::assert_relative_eq;

    #[test]
    fn normalizers_match_quadrature() {
        for c in Component::all() {
            let mut b = vec![0.0, PI];
            b.extend(c.zeros());
            b.sort_by(f64::total_cmp);
            let q = integrate(|x| c.g(x).abs(), &b, 40) / PI;
            assert_relative_eq!(q, c.abs_g_mean(), max_relative = 1e-13);
        }
        let d = DirectionDensity::Power4 { shift: 0.7, floor: 0.1 };
        let q = integrate(|x| d.unnormalized(x), &[0.0, PI], 40) / PI;
        assert_relative_eq!(q, d.normalizer(), max_relative = 1e-13);
    }

    #[test]
    fn fstar_of_disk_matches_fstar_k() {
        let disk = ConvexBody::ball(&[0.0, 0.0], 0.5).unwrap();
        for c in Component::all() {
            let dk = DirectionDensity::FStarK { component: c, body: disk.clone(), radius: 1.0 };
            for phi in [0.1, 0.4, 1.3, 2.9] {
                assert_relative_eq!(dk.density(phi), fstar_density(c, phi), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn table_sampler_is_a_density() {
        let t = DensityTable::new(&DirectionDensity::FStar(Component::new(0, 0).unwrap())).unwrap();
        let mass: f64 = t.cell_density.iter().sum::<f64>() / TABLE_CELLS as f64;
        assert_relative_eq!(mass, 1.0, max_relative = 1e-12);
        let mut rng = RngStream::new(5).substream(0);
        for _ in 0..1000 {
            let (phi, f) = t.sample(&mut rng);
            assert!((0.0..PI).contains(&phi));
            assert_relative_eq!(f, t.density(phi), max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_density_rejected() {
        let d = DirectionDensity::Power4 { shift: 0.0, floor: 0.0 };
        assert!(DensityTable::new(&d).is_err());
        assert!(DensityTable::new(&DirectionDensity::Cosine { amplitude: 1.0, shift: 0.0 }).is_err());
    }

    #[test]
    fn uniform_reduces_to_hitmiss_component() {
        let a = ReferenceSet::ball(&[0.0, 0.0], 1.0).unwrap();
        let k = ConvexBody::ball(&[0.0, 0.0], 0.5).unwrap();
        let s = WeightedSampler::table(&DirectionDensity::Uniform).unwrap();
        let c = Component::new(0, 0).unwrap();
        let mut rng = RngStream::new(9).substream(0);
        for _ in 0..200 {
            let v = est_weighted(&k, &a, c, &s, &mut rng).unwrap();
            assert!(v == 0.0 || (-0.25 - 1e-12..=0.5 + 1e-12).contains(&v));
        }
    }
}
