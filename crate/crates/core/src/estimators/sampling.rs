//! Random lines, frames and vertical flats.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::ReferenceSet;
use crate::bodies::{AffineLine, ConvexBody, Section, VerticalFlat2};
use crate::error::{Error, Result};
use crate::ground_truth::orthonormal_complement;
use crate::linalg;
use crate::symtensor::LinearDirection;

/// Uniform direction in ℝ² or ℝ³.
pub fn uniform_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LinearDirection {
    match n {
        2 => LinearDirection::from_angle(rng.random::<f64>() * PI),
        _ => loop {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(d) = LinearDirection::new(&v) {
                break d;
            }
        },
    }
}

/// Uniform point of the `(n-1)`-ball of radius `r` in `dir⊥` (`n ≤ 3`).
fn uniform_in_disk<R: Rng + ?Sized>(dir: &[f64], r: f64, rng: &mut R) -> Vec<f64> {
    match dir.len() {
        2 => {
            let t = r * (2.0 * rng.random::<f64>() - 1.0);
            vec![-dir[1] * t, dir[0] * t]
        }
        _ => {
            let (e1, e2) = orthonormal_complement(dir);
            let rad = r * rng.random::<f64>().sqrt();
            let a = 2.0 * PI * rng.random::<f64>();
            linalg::axpy(&linalg::scale(&e1, rad * a.cos()), rad * a.sin(), &e2)
        }
    }
}

/// Isotropic uniform random line hitting `A`: uniform direction, offset
/// uniform on `A | L⊥` (closed form for balls, rejection otherwise).
pub fn sample_iur_line<R: Rng + ?Sized>(a: &ReferenceSet, rng: &mut R) -> AffineLine {
    let n = a.dim();
    let dir = uniform_direction(n, rng);
    sample_offset(a.body(), dir, rng)
}

/// Line with the given direction and offset uniform on `A | L⊥`.
pub fn sample_offset<R: Rng + ?Sized>(a: &ConvexBody, dir: LinearDirection, rng: &mut R) -> AffineLine {
    if let Some(b) = a.as_ball() {
        let x = uniform_in_disk(dir.unit(), b.radius(), rng);
        return AffineLine::through(dir, &linalg::add(&x, b.center())).expect("dimension");
    }
    let u = dir.unit().to_vec();
    let c = a.center_hint();
    let r = a.bounding_radius() * (1.0 + 1e-9);
    loop {
        let x = linalg::add(&uniform_in_disk(&u, r, rng), &c);
        let line = AffineLine::through(dir.clone(), &x).expect("dimension");
        if a.line_hits(&line) {
            return line;
        }
    }
}

/// Uniformly random orthonormal frame (directions only).
pub fn orthogonal_frame<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<LinearDirection> {
    match n {
        2 => {
            let phi = rng.random::<f64>() * PI;
            vec![LinearDirection::from_angle(phi), LinearDirection::from_angle(phi + PI / 2.0)]
        }
        _ => {
            // Gram–Schmidt on a Gaussian matrix gives a Haar-distributed frame
            let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
            while cols.len() < n {
                let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                for c in &cols {
                    v = linalg::axpy(&v, -linalg::dot(&v, c), c);
                }
                let nv = linalg::norm(&v);
                if nv > 1e-8 {
                    cols.push(linalg::scale(&v, 1.0 / nv));
                }
            }
            cols.iter().map(|c| LinearDirection::new(c).expect("unit")).collect()
        }
    }
}

/// Vertical uniform random 2-flat containing `L₀` and hitting `A`
/// (`n = 3`): rotation angle about `L₀` uniform, offset uniform on the
/// interval `A | M⊥`.
pub fn sample_vur_flat<R: Rng + ?Sized>(a: &ReferenceSet, l0: &LinearDirection, rng: &mut R) -> Result<VerticalFlat2> {
    if a.dim() != 3 || l0.dim() != 3 {
        return Err(Error::Unsupported("vertical flats need n = 3".into()));
    }
    let (e1, e2) = orthonormal_complement(l0.unit());
    let alpha = rng.random::<f64>() * PI;
    let b = linalg::axpy(&linalg::scale(&e1, alpha.cos()), alpha.sin(), &e2);
    let m = linalg::cross(l0.unit(), &b);
    let hi = a.body().support(&m);
    let lo = -a.body().support(&linalg::scale(&m, -1.0));
    let t = lo + (hi - lo) * rng.random::<f64>();
    VerticalFlat2::new(l0.clone(), &b, &linalg::scale(&m, t))
}

/// IUR line of the plane of `flat` hitting the planar section `a_h`, in
/// flat coordinates. `None` if the section is empty.
pub fn sample_line_in_section<R: Rng + ?Sized>(a_h: &Section, rng: &mut R) -> Option<AffineLine> {
    let body = a_h.body()?;
    let dir = uniform_direction(2, rng);
    let u = dir.unit();
    let w = [-u[1], u[0]];
    let hi = body.support(&w);
    let lo = -body.support(&[-w[0], -w[1]]);
    let t = lo + (hi - lo) * rng.random::<f64>();
    Some(AffineLine::through(dir, &[t * w[0], t * w[1]]).expect("dimension"))
}

/// Uniform unit vector of the plane of `flat`, in flat coordinates.
pub fn uniform_in_plane<R: Rng + ?Sized>(rng: &mut R) -> [f64; 2] {
    let a = 2.0 * PI * rng.random::<f64>();
    [a.cos(), a.sin()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::mc::RngStream;

    #[test]
    fn frames_are_orthonormal() {
        let mut rng = RngStream::new(1).substream(0);
        for n in [2, 3] {
            for _ in 0..100 {
                let f = orthogonal_frame(n, &mut rng);
                for i in 0..n {
                    for j in 0..i {
                        assert!(linalg::dot(f[i].unit(), f[j].unit()).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn direction_marginal_is_uniform() {
        // 36 bins of the planar angle and of cos θ in ℝ³
        let draws = 360_000;
        for n in [2, 3] {
            let mut rng = RngStream::new(17).substream(n as u64);
            let mut bins = [0u64; 36];
            for _ in 0..draws {
                let u = uniform_direction(n, &mut rng);
                let v = u.unit();
                let x = if n == 2 { v[1].atan2(v[0]).rem_euclid(PI) / PI } else { v[2].abs() };
                bins[((x * 36.0) as usize).min(35)] += 1;
            }
            let e = draws as f64 / 36.0;
            let chi2: f64 = bins.iter().map(|&b| (b as f64 - e).powi(2) / e).sum();
            // 0.999 quantile of chi-square with 35 degrees of freedom
            assert!(chi2 < 66.6, "n={n}: chi2 = {chi2}");
        }
    }

    #[test]
    fn iur_offsets_stay_in_shadow() {
        let a = ReferenceSet::new(ConvexBody::cuboid(&[0.0, 0.0, 0.0], &[1.0, 0.5, 0.5]).unwrap()).unwrap();
        let mut rng = RngStream::new(2).substream(0);
        for _ in 0..1000 {
            assert!(a.body().line_hits(&sample_iur_line(&a, &mut rng)));
        }
    }

    #[test]
    fn vur_flat_contains_vertical_axis() {
        let a = ReferenceSet::new(ConvexBody::ball(&[0.0; 3], 2.0).unwrap()).unwrap();
        let l0 = LinearDirection::new(&[0.2, 0.3, 1.0]).unwrap();
        let mut rng = RngStream::new(3).substream(0);
        for _ in 0..100 {
            let h = sample_vur_flat(&a, &l0, &mut rng).unwrap();
            assert!(linalg::dot(&h.normal(), l0.unit()).abs() < 1e-12);
            assert!(linalg::norm(h.offset()) <= 2.0 + 1e-12);
        }
    }
}
