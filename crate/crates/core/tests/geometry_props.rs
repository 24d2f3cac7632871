use proptest::prelude::*;
use toric_lll::{DeformedGeometry, SurfaceKind, SurfaceSpec};

fn geom(kind: SurfaceKind, n: u32, s: f64) -> DeformedGeometry {
    DeformedGeometry::new(SurfaceSpec::new(kind, n).unwrap(), s).unwrap()
}

/// 100 interior points, kept a little away from the facets.
fn interior_grid(g: &DeformedGeometry) -> Vec<f64> {
    let lo = -0.5;
    let hi = g.surface.upper().unwrap_or(12.0);
    let margin = 0.02 * (hi - lo);
    (0..100)
        .map(|i| lo + margin + (hi - lo - 2.0 * margin) * f64::from(i) / 99.0)
        .collect()
}

fn cases() -> Vec<DeformedGeometry> {
    let mut v = Vec::new();
    for s in [0.0, 0.7, 3.0, 25.0] {
        v.push(geom(SurfaceKind::Sphere, 4, s));
        v.push(geom(SurfaceKind::Sphere, 7, s));
        v.push(geom(SurfaceKind::Plane, 8, s));
    }
    v
}

#[test]
fn analytic_derivatives_match_finite_differences() {
    let h = 1e-5;
    for g in cases() {
        for x in interior_grid(&g) {
            let gp = |x| g.potential(x).unwrap();
            let fd1 = (gp(x + h) - gp(x - h)) / (2.0 * h);
            let y = g.moment_to_log(x).unwrap();
            assert!((fd1 - y).abs() <= 1e-7 * y.abs().max(1.0), "{g:?} x={x}: {fd1} vs {y}");

            let yp = |x| g.moment_to_log(x).unwrap();
            let fd2 = (yp(x + h) - yp(x - h)) / (2.0 * h);
            let gpp = g.metric_coeff(x).unwrap();
            assert!(((fd2 - gpp) / gpp).abs() <= 1e-7, "{g:?} x={x}: {fd2} vs {gpp}");
        }
    }
}

#[test]
fn curvature_matches_fourth_order_differences() {
    let h = 1e-3;
    for g in cases() {
        let inv = |x: f64| 1.0 / g.metric_coeff(x).unwrap();
        for x in interior_grid(&g).into_iter().skip(5).step_by(3).take(28) {
            let d2 = (-inv(x + 2.0 * h) + 16.0 * inv(x + h) - 30.0 * inv(x) + 16.0 * inv(x - h)
                - inv(x - 2.0 * h))
                / (12.0 * h * h);
            let sc = g.scalar_curvature(x).unwrap();
            let scale = sc.abs().max(1e-2);
            assert!((sc + d2).abs() <= 1e-6 * scale, "{g:?} x={x}: {sc} vs {}", -d2);
        }
    }
}

#[test]
fn sphere_mirror_symmetry_at_rest() {
    for n in [3u32, 4, 7] {
        let g = geom(SurfaceKind::Sphere, n, 0.0);
        let top = f64::from(n) - 1.0;
        for x in interior_grid(&g) {
            let m = top - x;
            assert!((g.potential(x).unwrap() - g.potential(m).unwrap()).abs() < 1e-13);
            assert!((g.moment_to_log(x).unwrap() + g.moment_to_log(m).unwrap()).abs() < 1e-13);
            assert!((g.metric_coeff(x).unwrap() - g.metric_coeff(m).unwrap()).abs() < 1e-10);
        }
    }
}

#[test]
fn kahler_potential_two_routes() {
    // κ_s = κ_0 + s (x H' − H) = κ_0 + s x²/2
    for kind in [SurfaceKind::Sphere, SurfaceKind::Plane] {
        let rest = geom(kind, 4, 0.0);
        for s in [0.0, 1.0, 9.5] {
            let g = geom(kind, 4, s);
            for x in [-0.3, 0.0, 1.0, 2.0, 3.2] {
                let direct = g.kahler_potential(x).unwrap();
                let shifted = rest.kahler_potential(x).unwrap() + 0.5 * s * x * x;
                assert!((direct - shifted).abs() < 1e-12, "{kind:?} s={s} x={x}");
            }
        }
    }
}

#[test]
fn metric_approaches_s_for_large_deformation() {
    for g in [geom(SurfaceKind::Sphere, 4, 1e4), geom(SurfaceKind::Plane, 8, 1e4)] {
        for x in [-0.25, 0.0, 1.0, 2.5, 3.0] {
            let ratio = g.metric_coeff(x).unwrap() / g.s;
            assert!((ratio - 1.0).abs() <= 1e-3, "{ratio}");
        }
    }
}

#[test]
fn dual_metric_coefficient_inverts() {
    for g in cases() {
        for x in interior_grid(&g) {
            let c = g.metric_coeff(x).unwrap();
            assert!(c > 0.0);
            assert!((c * (1.0 / c) - 1.0).abs() < 1e-15);
        }
    }
}

proptest! {
    #[test]
    fn legendre_duality(t in 0.001f64..0.999, s in 0.0f64..200.0, n in 1u32..12, plane in any::<bool>()) {
        let (kind, x) = if plane {
            (SurfaceKind::Plane, -0.5 + 30.0 * t)
        } else {
            (SurfaceKind::Sphere, -0.5 + f64::from(n) * t)
        };
        let g = geom(kind, n, s);
        let k = g.kahler_potential(x).unwrap();
        let rhs = x * g.moment_to_log(x).unwrap() - g.potential(x).unwrap();
        prop_assert_eq!(k, rhs);
    }

    #[test]
    fn deformation_is_additive(t in 0.001f64..0.999, s in 0.0f64..200.0, n in 1u32..12) {
        let x = -0.5 + f64::from(n) * t;
        let g = geom(SurfaceKind::Sphere, n, s);
        let g0 = geom(SurfaceKind::Sphere, n, 0.0);
        let diff = g.potential(x).unwrap() - g0.potential(x).unwrap();
        let want = 0.5 * s * x * x;
        prop_assert!((diff - want).abs() <= 1e-12 * want.abs().max(1.0));
    }
}
