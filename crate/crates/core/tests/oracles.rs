use crofton::bodies::ConvexBody;
use crofton::ground_truth::{
    crofton_rhs, inverse_crofton_oracle, relative_gap, surface_tensor, HitMeasureGrid, QuadratureSpec,
};
use crofton::linalg;
use crofton::symtensor::SymmetricTensor;

fn planar_bodies() -> Vec<(&'static str, ConvexBody)> {
    vec![
        ("disk", ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap()),
        ("square", ConvexBody::cuboid(&[0.5, 0.5], &[0.5, 0.5]).unwrap()),
        ("triangle", ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap()),
        ("ellipse", ConvexBody::axis_ellipsoid(&[2.0, 1.0]).unwrap()),
        (
            "tilted ellipse",
            ConvexBody::ellipsoid(&[0.3, -0.2], &[1.5, 0.5], linalg::axis_rotation(2, 0, 0.4).unwrap()).unwrap(),
        ),
    ]
}

fn spatial_bodies() -> Vec<(&'static str, ConvexBody)> {
    vec![
        ("ball", ConvexBody::ball(&[0.0; 3], 1.0).unwrap()),
        ("spheroid", ConvexBody::axis_ellipsoid(&[1.0, 1.0, 2.0]).unwrap()),
        (
            "tilted ellipsoid",
            ConvexBody::ellipsoid(
                &[0.1, 0.0, -0.3],
                &[1.0, 0.6, 1.8],
                linalg::mat_mul(
                    &linalg::axis_rotation(3, 1, 0.9).unwrap(),
                    &linalg::axis_rotation(3, 0, 0.5).unwrap(),
                ),
            )
            .unwrap(),
        ),
    ]
}

fn check_forward_and_inverse(bodies: &[(&str, ConvexBody)], q: &QuadratureSpec) {
    for (name, body) in bodies {
        let grid = HitMeasureGrid::new(body, q);
        for s in [0, 2, 4] {
            let lhs = grid.crofton_integral(s);
            let rhs = crofton_rhs(body, s, q).unwrap();
            let gap = relative_gap(&lhs, &rhs).unwrap();
            assert!(gap < 1e-3, "{name} s={s}: forward gap {gap:e}");

            let truth = surface_tensor(body, s, q).unwrap();
            let inv = grid.inverse_crofton(s).unwrap();
            let gap = relative_gap(&inv, &truth).unwrap();
            assert!(gap < 1e-3, "{name} s={s}: inverse gap {gap:e}");

            let rec = grid.reconstruct(s).unwrap();
            let gap = relative_gap(&rec, &truth).unwrap();
            assert!(gap < 1e-3, "{name} s={s}: reconstruction gap {gap:e}");
        }
        for s in [1, 3, 5] {
            let lhs = grid.crofton_integral(s);
            assert!(lhs.max_abs() <= 1e-10, "{name} s={s}: odd-rank integral {:e}", lhs.max_abs());
        }
    }
}

#[test]
fn crofton_formulas_in_the_plane() {
    check_forward_and_inverse(&planar_bodies(), &QuadratureSpec::standard(2));
}

#[test]
fn crofton_formulas_in_space() {
    check_forward_and_inverse(&spatial_bodies(), &QuadratureSpec::standard(3));
}

#[test]
fn ellipse_rank4_two_routes() {
    let q = QuadratureSpec::standard(2);
    let e = ConvexBody::axis_ellipsoid(&[2.0, 1.0]).unwrap();
    let inv = inverse_crofton_oracle(&e, 4, &q).unwrap();
    let truth = surface_tensor(&e, 4, &q).unwrap();
    assert!(relative_gap(&inv, &truth).unwrap() < 1e-3);
}

#[test]
fn surface_tensors_scale_with_degree_n_minus_1() {
    let q = QuadratureSpec::standard(3);
    let bodies = [
        ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.2, 1.0]]).unwrap(),
        ConvexBody::axis_ellipsoid(&[2.0, 1.0]).unwrap(),
        ConvexBody::axis_ellipsoid(&[1.0, 0.5, 2.0]).unwrap(),
        ConvexBody::cuboid(&[0.0; 3], &[1.0, 0.5, 0.25]).unwrap(),
    ];
    for b in &bodies {
        let n = b.dim() as i32;
        for s in [0, 2, 4] {
            let base = surface_tensor(b, s, &q).unwrap();
            for lambda in [0.5, 2.0] {
                let scaled = surface_tensor(&b.scaled(lambda).unwrap(), s, &q).unwrap();
                let want = base.scale(lambda.powi(n - 1));
                assert!(relative_gap(&scaled, &want).unwrap() < 1e-12);
            }
        }
    }
}

#[test]
fn surface_tensors_rotate_with_the_body() {
    let q = QuadratureSpec::standard(2);
    let square = ConvexBody::cuboid(&[0.3, 0.1], &[0.5, 0.25]).unwrap();
    let quarter = linalg::axis_rotation(2, 0, std::f64::consts::FRAC_PI_2).unwrap();
    for s in [2, 4] {
        let a = surface_tensor(&square.rotated(&quarter).unwrap(), s, &q).unwrap();
        let b = surface_tensor(&square, s, &q).unwrap().rotated(&quarter).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-15);
    }
    let e = ConvexBody::axis_ellipsoid(&[2.0, 0.7]).unwrap();
    for angle in [0.3, 1.1, 2.6] {
        let r = linalg::axis_rotation(2, 0, angle).unwrap();
        for s in [2, 4] {
            let a = surface_tensor(&e.rotated(&r).unwrap(), s, &q).unwrap();
            let b = surface_tensor(&e, s, &q).unwrap().rotated(&r).unwrap();
            assert!(relative_gap(&a, &b).unwrap() < 1e-6);
        }
    }
}

#[test]
fn rank2_trace_is_top_volume_over_4pi() {
    // unit disk: Φ₂ = Q/8 has trace 1/4 = V₁(B²)/(4π); the trace of u² is 1,
    // so tr Φ_{n-1,0,2} = S_{n-1}(K, S^{n-1}) / (2 ω₃) = V_{n-1}(K) / (4π)
    let q = QuadratureSpec::standard(3);
    let bodies = [
        ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap(),
        ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap(),
        ConvexBody::axis_ellipsoid(&[1.0, 1.0, 2.0]).unwrap(),
        ConvexBody::cuboid(&[0.0; 3], &[1.0, 0.5, 0.25]).unwrap(),
    ];
    for b in &bodies {
        let v = surface_tensor(b, 0, &q).unwrap().coeffs()[0];
        let tr = surface_tensor(b, 2, &q).unwrap().trace().unwrap();
        assert!((tr - v / (4.0 * std::f64::consts::PI)).abs() < 1e-13 * v);
    }
    let disk = surface_tensor(&bodies[0], 2, &q).unwrap();
    assert!(disk.max_abs_diff(&SymmetricTensor::metric(2).scale(0.125)).unwrap() < 1e-14);
}

#[test]
fn smooth_surface_tensors_are_rotation_equivariant() {
    let q = QuadratureSpec::standard(3);
    let rho = linalg::mat_mul(&linalg::axis_rotation(3, 2, 0.7).unwrap(), &linalg::axis_rotation(3, 0, 1.1).unwrap());
    let base = ConvexBody::axis_ellipsoid(&[1.0, 0.5, 2.0]).unwrap();
    let turned = ConvexBody::ellipsoid(&[0.0; 3], &[1.0, 0.5, 2.0], rho.clone()).unwrap();
    for s in [2, 4] {
        let want = surface_tensor(&base, s, &q).unwrap().rotated(&rho).unwrap();
        let got = surface_tensor(&turned, s, &q).unwrap();
        assert!(got.max_abs_diff(&want).unwrap() < 1e-10 * want.max_abs(), "s={s}");
    }
}
