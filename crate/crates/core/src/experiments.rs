//! Reference experiments: systematic planar designs, the orthogonal-pair
//! ellipse probability, CV comparisons for rotated spheroids, and
//! importance-sampling comparisons in the plane.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::bodies::ConvexBody;
use crate::crofton_coeffs::MeasurementFunction;
use crate::error::{Error, Result};
use crate::estimators::mc::{mc_run, try_mc_run, McOptions, McRun, McSummary, RngStream};
use crate::estimators::sampling::{orthogonal_frame, sample_iur_line, sample_offset, uniform_direction};
use crate::estimators::weighted::{est_weighted, Component, DirectionDensity, WeightedSampler};
use crate::estimators::{est_hitmiss, est_projection, systematic_estimator_2d, ReferenceSet};
use crate::ground_truth::{surface_tensor, top_intrinsic_volume, QuadratureSpec};
use crate::linalg;
use crate::symtensor::SymmetricTensor;

/// Relative size below which a truth component counts as zero.
const ZERO_COMPONENT: f64 = 1e-9;

/// The elongated planar bodies: rectangle, rhombus and ellipse.
pub fn figure1_bodies(eps: f64) -> Result<Vec<(String, ConvexBody)>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {eps} must lie in (0, 1)")));
    }
    Ok(vec![
        ("K1".into(), ConvexBody::polygon(&[[1.0, -eps], [1.0, eps], [-1.0, eps], [-1.0, -eps]])?),
        ("K2".into(), ConvexBody::polygon(&[[1.0, 0.0], [0.0, eps], [-1.0, 0.0], [0.0, -eps]])?),
        ("K3".into(), ConvexBody::axis_ellipsoid(&[1.0, eps.powf(0.25)])?),
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Row {
    pub body: String,
    pub lines: usize,
    pub posdef_fraction: f64,
}

/// Fraction of `φ₀` values (midpoints of `grid` equal cells of `[0, π/N]`)
/// for which the systematic estimator with `N` lines is positive definite.
pub fn figure1(eps: f64, grid: usize, max_lines: usize) -> Result<Vec<Figure1Row>> {
    if grid == 0 || max_lines == 0 {
        return Err(Error::InvalidArgument("grid and line count must be positive".into()));
    }
    let mut rows = Vec::new();
    for (name, body) in figure1_bodies(eps)? {
        for n in 1..=max_lines {
            let step = PI / n as f64 / grid as f64;
            let hits = (0..grid)
                .into_par_iter()
                .map(|i| -> Result<u64> {
                    let t = systematic_estimator_2d(&body, n, (i as f64 + 0.5) * step)?;
                    Ok(u64::from(t.is_positive_definite()?))
                })
                .collect::<Result<Vec<u64>>>()?
                .iter()
                .sum::<u64>();
            rows.push(Figure1Row { body: name.clone(), lines: n, posdef_fraction: hits as f64 / grid as f64 });
        }
    }
    Ok(rows)
}

/// Smallest line count whose curve reaches 1 for `body`.
pub fn first_certain(rows: &[Figure1Row], body: &str) -> Option<usize> {
    rows.iter().filter(|r| r.body == body && r.posdef_fraction >= 1.0).map(|r| r.lines).min()
}

/// Limit of the orthogonal-pair probability for ellipses of vanishing
/// eccentricity ratio: `(2/π)(arccos √(1/5) − arcsin √(1/5))`.
pub fn ellipse_posdef_limit() -> f64 {
    let s = 0.2f64.sqrt();
    2.0 / PI * (s.acos() - s.asin())
}

/// Probability that the projection estimator with a uniformly rotated
/// orthogonal pair is positive definite for the ellipse `(1, k)`.
pub fn ellipse_posdef_probability(k: f64, draws: u64, stream: &RngStream) -> Result<f64> {
    let body = ConvexBody::axis_ellipsoid(&[1.0, k])?;
    let g = MeasurementFunction::new(2, 2)?;
    let run = try_mc_run(draws, stream, McOptions { posdef_dim: Some(2) }, |rng| {
        let frame = orthogonal_frame(2, rng);
        Ok(est_projection(&body, &frame, &g)?.into_coeffs())
    })?;
    run.summary().posdef_fraction.ok_or_else(|| Error::Degenerate("no positive-definiteness count".into()))
}

/// Estimators compared on the rotated spheroids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure2Estimator {
    /// One IUR line.
    HitMiss1,
    /// Three IUR lines in an orthonormal frame with independent offsets.
    HitMiss3,
    /// One isotropic line through the origin.
    Projection1,
    /// An isotropic orthonormal frame.
    Projection3,
}

impl Figure2Estimator {
    pub fn all() -> [Self; 4] {
        [Self::HitMiss1, Self::HitMiss3, Self::Projection1, Self::Projection3]
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::HitMiss1 => "hm1",
            Self::HitMiss3 => "hm3",
            Self::Projection1 => "pr1",
            Self::Projection3 => "pr3",
        }
    }
}

/// Spheroid with semi-axes `(1, 1, l)`, rotated by `R_{e₂}(5π/16) R_{e₁}(3π/16)`.
pub fn figure2_body(l: f64) -> Result<ConvexBody> {
    let r = linalg::mat_mul(&linalg::axis_rotation(3, 1, 5.0 * PI / 16.0)?, &linalg::axis_rotation(3, 0, 3.0 * PI / 16.0)?);
    ConvexBody::ellipsoid(&[0.0; 3], &[1.0, 1.0, l], r)
}

/// Centered ball `A` with `V₂(K)/V₂(A) = hit_probability`.
pub fn figure2_reference(k: &ConvexBody, hit_probability: f64, q: &QuadratureSpec) -> Result<ReferenceSet> {
    if !(hit_probability > 0.0 && hit_probability <= 1.0) {
        return Err(Error::OutOfRange(format!("hit probability {hit_probability}")));
    }
    let v = top_intrinsic_volume(k, q)?;
    ReferenceSet::ball(&[0.0; 3], (v / (hit_probability * 2.0 * PI)).sqrt())
}

#[derive(Debug, Clone)]
pub struct Figure2Config {
    pub elongations: Vec<f64>,
    pub hit_probability: f64,
    pub replications: u64,
    pub seed: u64,
}

impl Default for Figure2Config {
    fn default() -> Self {
        Self { elongations: vec![1.0, 2.0, 3.0, 4.0, 5.0], hit_probability: 1.0 / 7.0, replications: 100_000, seed: 44 }
    }
}

#[derive(Debug, Clone)]
pub struct Figure2Row {
    pub elongation: f64,
    pub estimator: String,
    pub component: String,
    pub truth: f64,
    pub mean: f64,
    pub variance: f64,
    pub cv: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Figure2Result {
    pub rows: Vec<Figure2Row>,
    /// Median of `CV(pr1)/CV(hm1)` over elongations and non-zero components.
    pub ratio_pr1_hm1: f64,
    /// Median of `CV(pr3)/CV(hm3)` over elongations `≥ 2`.
    pub ratio_pr3_hm3: f64,
    /// Median of `CV(hm3)/CV(three i.i.d. IUR lines)`.
    pub ratio_hm3_iid: f64,
    /// Largest per-component variance of `pr3` for the ball.
    pub ball_pr3_variance: Option<f64>,
}

/// Runs one of the compared estimators.
pub fn figure2_run(
    est: Figure2Estimator,
    k: &ConvexBody,
    a: &ReferenceSet,
    replications: u64,
    stream: &RngStream,
) -> Result<McRun> {
    let g = MeasurementFunction::new(3, 2)?;
    mc_run(replications, stream, McOptions::default(), |rng| {
        let t = match est {
            Figure2Estimator::HitMiss1 => est_hitmiss(k, a, &sample_iur_line(a, rng), &g),
            Figure2Estimator::HitMiss3 => {
                let mut acc = SymmetricTensor::zeros(3, 2);
                for d in orthogonal_frame(3, rng) {
                    let line = sample_offset(a.body(), d, rng);
                    acc.add_scaled(1.0 / 3.0, &est_hitmiss(k, a, &line, &g)).expect("shape");
                }
                acc
            }
            Figure2Estimator::Projection1 => est_projection(k, &[uniform_direction(3, rng)], &g).expect("one line"),
            Figure2Estimator::Projection3 => est_projection(k, &orthogonal_frame(3, rng), &g).expect("frame"),
        };
        t.into_coeffs()
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn figure2(config: &Figure2Config, q: &QuadratureSpec) -> Result<Figure2Result> {
    let stream = RngStream::new(config.seed);
    let labels: Vec<String> = SymmetricTensor::zeros(3, 2)
        .multi_indices()
        .iter()
        .map(|ix| ix.iter().map(|i| (i + 1).to_string()).collect())
        .collect();
    let mut rows = Vec::new();
    let (mut r1, mut r2, mut r3) = (Vec::new(), Vec::new(), Vec::new());
    let mut ball_var = None;
    for (li, &l) in config.elongations.iter().enumerate() {
        let k = figure2_body(l)?;
        let a = figure2_reference(&k, config.hit_probability, q)?;
        let truth = surface_tensor(&k, 2, q)?;
        let scale = truth.max_abs();
        let mut summaries: Vec<McSummary> = Vec::new();
        for (ei, est) in Figure2Estimator::all().iter().enumerate() {
            let sub = stream.derive((li * 16 + ei) as u64);
            let s = figure2_run(*est, &k, &a, config.replications, &sub)?.summary();
            for (c, label) in labels.iter().enumerate() {
                rows.push(Figure2Row {
                    elongation: l,
                    estimator: est.label().into(),
                    component: label.clone(),
                    truth: truth.coeffs()[c],
                    mean: s.mean[c],
                    variance: s.variance[c],
                    cv: s.cv[c],
                });
            }
            summaries.push(s);
        }
        for (c, label) in labels.iter().enumerate() {
            // three i.i.d. lines: same mean, a third of the variance
            let hm1 = &summaries[0];
            rows.push(Figure2Row {
                elongation: l,
                estimator: "hm3iid".into(),
                component: label.clone(),
                truth: truth.coeffs()[c],
                mean: hm1.mean[c],
                variance: hm1.variance[c] / 3.0,
                cv: hm1.cv[c].map(|v| v / 3.0f64.sqrt()),
            });
            if truth.coeffs()[c].abs() <= ZERO_COMPONENT * scale {
                continue;
            }
            let cv = |i: usize| summaries[i].cv[c].unwrap_or(f64::NAN);
            r1.push(cv(2) / cv(0));
            if l >= 2.0 {
                r2.push(cv(3) / cv(1));
            }
            r3.push(cv(1) / (cv(0) / 3.0f64.sqrt()));
        }
        if l == 1.0 {
            ball_var = Some(summaries[3].variance.iter().copied().fold(0.0, f64::max));
        }
    }
    Ok(Figure2Result {
        rows,
        ratio_pr1_hm1: median(r1),
        ratio_pr3_hm3: median(r2),
        ratio_hm3_iid: median(r3),
        ball_pr3_variance: ball_var,
    })
}

/// Planar test bodies for the weighted designs, all inside the centered
/// ball of radius [`WEIGHTED_RADIUS`].
pub fn weighted_test_bodies() -> Result<Vec<(String, ConvexBody)>> {
    Ok(vec![
        ("disk".into(), ConvexBody::ball(&[0.0, 0.0], 1.0)?),
        ("square".into(), ConvexBody::cuboid(&[0.5, 0.5], &[0.5, 0.5])?),
        ("ellipse".into(), ConvexBody::axis_ellipsoid(&[2.0, 1.0])?),
    ])
}

pub const WEIGHTED_RADIUS: f64 = 2.5;

/// Direction designs compared for a single component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightedDesign {
    /// One IUR line.
    Iur,
    /// Mean of three independent IUR lines.
    Iur3,
    FStar,
    FStarK,
    Cosine,
    Power4,
}

impl WeightedDesign {
    pub fn all() -> [Self; 6] {
        [Self::Iur, Self::Iur3, Self::FStar, Self::FStarK, Self::Cosine, Self::Power4]
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Iur => "iur",
            Self::Iur3 => "iur3",
            Self::FStar => "fstar",
            Self::FStarK => "fstarK",
            Self::Cosine => "cosine",
            Self::Power4 => "power4",
        }
    }

    fn density(&self, c: Component, k: &ConvexBody) -> DirectionDensity {
        match self {
            Self::Iur | Self::Iur3 => DirectionDensity::Uniform,
            Self::FStar => DirectionDensity::FStar(c),
            Self::FStarK => DirectionDensity::FStarK { component: c, body: k.clone(), radius: WEIGHTED_RADIUS },
            Self::Cosine => DirectionDensity::Cosine { amplitude: 0.9, shift: 0.0 },
            Self::Power4 => DirectionDensity::Power4 { shift: 0.7, floor: 0.1 },
        }
    }
}

#[derive(Debug, Clone)]
pub struct WeightedRow {
    pub body: String,
    pub component: Component,
    pub design: WeightedDesign,
    pub truth: f64,
    pub mean: f64,
    pub std_error: f64,
    pub variance: f64,
    pub variance_ci: (f64, f64),
}

/// Single-component runs of every design on every planar test body.
pub fn weighted_comparison(
    replications: u64,
    seed: u64,
    ci_level: f64,
    designs: &[WeightedDesign],
    q: &QuadratureSpec,
) -> Result<Vec<WeightedRow>> {
    let a = ReferenceSet::ball(&[0.0, 0.0], WEIGHTED_RADIUS)?;
    let stream = RngStream::new(seed);
    let mut rows = Vec::new();
    for (bi, (name, k)) in weighted_test_bodies()?.into_iter().enumerate() {
        a.require_contains(&k)?;
        let truth = surface_tensor(&k, 2, q)?;
        for (ci, c) in Component::all().into_iter().enumerate() {
            let (i, j) = c.indices();
            let t = truth.get(&[i, j])?;
            for (di, design) in designs.iter().enumerate() {
                let sampler = WeightedSampler::table(&design.density(c, &k))?;
                let draws = if *design == WeightedDesign::Iur3 { 3 } else { 1 };
                let sub = stream.derive(((bi * 4 + ci) * 16 + di) as u64);
                let run = try_mc_run(replications, &sub, McOptions::default(), |rng| {
                    let mut s = 0.0;
                    for _ in 0..draws {
                        s += est_weighted(&k, &a, c, &sampler, rng)?;
                    }
                    Ok(vec![s / draws as f64])
                })?;
                let s = run.summary();
                rows.push(WeightedRow {
                    body: name.clone(),
                    component: c,
                    design: *design,
                    truth: t,
                    mean: s.mean[0],
                    std_error: s.std_error[0],
                    variance: s.variance[0],
                    variance_ci: run.variance_ci(0, ci_level, 1000, seed ^ sub.seed()),
                });
            }
        }
    }
    Ok(rows)
}
