//! Second-moment curves of single-component estimators for a line segment
//! at angle `γ` (planar, rank 2), as functions of `γ ∈ [0, π]`.
//!
//! `P` refers to a diagonal component, `Q` to the off-diagonal one.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use super::weighted::{diag_normalizer, kappa_angle, offdiag_normalizer};
use crate::quadrature::gauss_legendre;

const PANEL_NODES: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    PIur,
    PFstar,
    QIur,
    QFstar,
    POpt,
    QOpt,
}

impl CurveKind {
    pub fn all() -> [CurveKind; 6] {
        [Self::PIur, Self::PFstar, Self::QIur, Self::QFstar, Self::POpt, Self::QOpt]
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::PIur => "P_IUR",
            Self::PFstar => "P_fstar",
            Self::QIur => "Q_IUR",
            Self::QFstar => "Q_fstar",
            Self::POpt => "P_opt",
            Self::QOpt => "Q_opt",
        }
    }

    fn is_diagonal(&self) -> bool {
        matches!(self, Self::PIur | Self::PFstar | Self::POpt)
    }
}

/// Closed forms; the optimum curves have none and go through quadrature.
pub fn variance_curve(kind: CurveKind, gamma: f64) -> f64 {
    let g = gamma.clamp(0.0, PI);
    match kind {
        CurveKind::PIur => {
            let c2 = g.cos().powi(2);
            (-0.375 * c2 * c2 + c2 + 0.5) / (20.0 * PI)
        }
        CurveKind::PFstar => {
            let g = if g > FRAC_PI_2 { PI - g } else { g };
            let m = diag_normalizer() / PI;
            let (s, c) = g.sin_cos();
            if g <= FRAC_PI_2 - kappa_angle() {
                m * (2.0 * 2.0f64.sqrt() / (3.0 * 3.0f64.sqrt()) * c - 0.25 * c * c)
            } else {
                m * (0.25 * c * c + s / (3.0 * 3.0f64.sqrt()))
            }
        }
        CurveKind::QIur => (4.0 - 0.5 * (2.0 * g).sin().powi(2)) * 3.0 / (320.0 * PI),
        CurveKind::QFstar => {
            let g = if g > FRAC_PI_2 { g - FRAC_PI_2 } else { g };
            let (s, c) = g.sin_cos();
            3.0 / (32.0 * PI * PI) * (s + c - s * c)
        }
        CurveKind::POpt | CurveKind::QOpt => curve_by_quadrature(kind, g),
    }
}

/// The curves evaluated from their defining integrals over `dφ/(2π)`.
pub fn curve_by_quadrature(kind: CurveKind, gamma: f64) -> f64 {
    let g = |phi: f64| {
        if kind.is_diagonal() {
            0.375 * (phi.cos().powi(2) - 1.0 / 3.0)
        } else {
            0.375 * phi.cos() * phi.sin()
        }
    };
    let seg = |phi: f64| (phi - gamma).cos().abs();
    let mean = |f: &dyn Fn(f64) -> f64, sqrt_ends: bool| integrate_periodic(f, &kinks(kind, gamma), sqrt_ends) / (2.0 * PI);
    match kind {
        CurveKind::PIur | CurveKind::QIur => mean(&|x| g(x).powi(2) * seg(x), false),
        CurveKind::PFstar => diag_normalizer() * mean(&|x| g(x).abs() * seg(x), false),
        CurveKind::QFstar => offdiag_normalizer() * mean(&|x| g(x).abs() * seg(x), false),
        CurveKind::POpt | CurveKind::QOpt => mean(&|x| g(x).abs() * seg(x).sqrt(), true).powi(2),
    }
}

/// Kinks of the integrand in `[0, 2π]`, together with the zeros of
/// `cos(φ − γ)` (flagged `true`).
fn kinks(kind: CurveKind, gamma: f64) -> Vec<(f64, bool)> {
    let mut k: Vec<(f64, bool)> = vec![(0.0, false), (2.0 * PI, false)];
    if kind.is_diagonal() {
        let a = kappa_angle();
        k.extend([a, PI - a, PI + a, 2.0 * PI - a].map(|x| (x, false)));
    } else {
        k.extend([FRAC_PI_2, PI, 1.5 * PI].map(|x| (x, false)));
    }
    for z in [gamma - FRAC_PI_2, gamma + FRAC_PI_2] {
        k.push((z.rem_euclid(2.0 * PI), true));
    }
    k.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, bool)> = Vec::with_capacity(k.len());
    for (x, s) in k {
        match out.last_mut() {
            Some(last) if (x - last.0).abs() < 1e-14 => last.1 |= s,
            _ => out.push((x, s)),
        }
    }
    // a zero of cos(φ − γ) at 0 recurs at 2π
    let wrap = out[0].1 || out.last().is_some_and(|l| l.1);
    out[0].1 = wrap;
    if let Some(l) = out.last_mut() {
        l.1 = wrap;
    }
    out
}

fn reference_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

fn gl_sum(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (x, w) = reference_rule();
    let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    h * x.iter().zip(w).map(|(x, w)| w * f(c + h * x)).sum::<f64>()
}

/// Gauss–Legendre on each panel; ends flagged `true` carry a square-root
/// zero, removed by the substitution `φ = end ± w²` on the adjacent half
/// panel.
fn integrate_periodic(f: &dyn Fn(f64) -> f64, breaks: &[(f64, bool)], sqrt_ends: bool) -> f64 {
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let ((a, sa), (b, sb)) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        let mid = 0.5 * (a + b);
        for (lo, hi, sing_lo, sing_hi) in [(a, mid, sa, false), (mid, b, false, sb)] {
            total += if sqrt_ends && (sing_lo || sing_hi) {
                let (end, dir) = if sing_lo { (lo, 1.0) } else { (hi, -1.0) };
                gl_sum(|t| 2.0 * t * f(end + dir * t * t), 0.0, (hi - lo).sqrt())
            } else {
                gl_sum(f, lo, hi)
            };
        }
    }
    total
}

/// `count` equidistant points of `[0, π]`, endpoints included.
pub fn gamma_grid(count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..count).map(|i| PI * i as f64 / (count - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms_match_integrals() {
        for kind in [CurveKind::PIur, CurveKind::PFstar, CurveKind::QIur, CurveKind::QFstar] {
            for gamma in gamma_grid(101) {
                let a = variance_curve(kind, gamma);
                let b = curve_by_quadrature(kind, gamma);
                assert!((a - b).abs() < 1e-12, "{kind:?} at {gamma}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn known_values() {
        assert_relative_eq!(variance_curve(CurveKind::PIur, 0.0), 9.0 / (160.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(variance_curve(CurveKind::QFstar, 0.0), 3.0 / (32.0 * PI * PI), max_relative = 1e-14);
        assert_relative_eq!(
            variance_curve(CurveKind::QFstar, PI / 4.0),
            3.0 / (32.0 * PI * PI) * (2.0f64.sqrt() - 0.5),
            max_relative = 1e-14
        );
        assert_relative_eq!(variance_curve(CurveKind::QIur, PI / 4.0), 21.0 / (640.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(variance_curve(CurveKind::QIur, 0.0), 3.0 / (80.0 * PI), max_relative = 1e-14);
    }

    #[test]
    fn optimum_curves_are_smooth_in_nodes() {
        // doubling the panel resolution must not move the value
        for gamma in [0.0, 0.3, FRAC_PI_2, 2.0] {
            for kind in [CurveKind::POpt, CurveKind::QOpt] {
                let v = curve_by_quadrature(kind, gamma);
                let g = |phi: f64| {
                    if kind.is_diagonal() {
                        0.375 * (phi.cos().powi(2) - 1.0 / 3.0)
                    } else {
                        0.375 * phi.cos() * phi.sin()
                    }
                };
                let m = 400_000;
                let brute: f64 = (0..m)
                    .map(|i| {
                        let x = 2.0 * PI * (i as f64 + 0.5) / m as f64;
                        g(x).abs() * (x - gamma).cos().abs().sqrt()
                    })
                    .sum::<f64>()
                    / m as f64;
                assert!((v - brute * brute).abs() < 1e-7 * v, "{kind:?} {gamma}");
            }
        }
    }
}
