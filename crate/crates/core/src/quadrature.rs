//! Gauss–Legendre rules and the direction grids used by the oracles.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "need at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))`
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[a, b]`.
pub fn gl_interval(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter().zip(&w).map(|(xi, wi)| (m + h * xi, h * wi)).collect()
}

/// `∫_a^b f` by composite Gauss–Legendre on the given breakpoints.
pub fn integrate(f: impl Fn(f64) -> f64, breaks: &[f64], nodes: usize) -> f64 {
    let (x, w) = gauss_legendre(nodes);
    breaks
        .windows(2)
        .map(|ab| {
            let (m, h) = (0.5 * (ab[0] + ab[1]), 0.5 * (ab[1] - ab[0]));
            h * x.iter().zip(&w).map(|(xi, wi)| wi * f(m + h * xi)).sum::<f64>()
        })
        .sum()
}

/// Weighted direction grid on the sphere `S^{n-1}`, `n ∈ {2, 3}`; the
/// weights sum to 1 (probability on directions). Only one of each antipodal
/// pair is included.
///
/// * `n = 2`: midpoint rule in the angle on `[0, π)`.
/// * `n = 3`: Gauss–Legendre in `cos θ` on `[0, 1]` times the midpoint rule
///   in `φ` on `[0, 2π)` with `2 nodes` points.
pub fn direction_grid(n: usize, nodes: usize) -> Vec<(Vec<f64>, f64)> {
    match n {
        2 => (0..nodes)
            .map(|i| {
                let phi = PI * (i as f64 + 0.5) / nodes as f64;
                (vec![phi.cos(), phi.sin()], 1.0 / nodes as f64)
            })
            .collect(),
        3 => {
            let nphi = 2 * nodes;
            let mut out = Vec::with_capacity(nodes * nphi);
            for (z, wz) in gl_interval(nodes, 0.0, 1.0) {
                let r = (1.0 - z * z).max(0.0).sqrt();
                for j in 0..nphi {
                    let phi = 2.0 * PI * (j as f64 + 0.5) / nphi as f64;
                    out.push((vec![r * phi.cos(), r * phi.sin(), z], wz / nphi as f64));
                }
            }
            out
        }
        _ => panic!("direction grids are implemented for n = 2, 3"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_exact_for_polynomials() {
        for n in [1, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
            for deg in 0..(2 * n).min(40) {
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn composite_integration() {
        let v = integrate(|x| x.sin(), &[0.0, 1.0, PI], 20);
        assert_relative_eq!(v, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn sphere_grid_moments() {
        // E[u_3²] = 1/3 on S², E[u_1² u_2²] = 1/15
        let g = direction_grid(3, 16);
        let m2: f64 = g.iter().map(|(u, w)| w * u[2] * u[2]).sum();
        let m22: f64 = g.iter().map(|(u, w)| w * u[0] * u[0] * u[1] * u[1]).sum();
        assert_relative_eq!(m2, 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(m22, 1.0 / 15.0, max_relative = 1e-13);
        let g2 = direction_grid(2, 64);
        let c4: f64 = g2.iter().map(|(u, w)| w * u[0].powi(4)).sum();
        assert_relative_eq!(c4, 3.0 / 8.0, max_relative = 1e-14);
    }
}
