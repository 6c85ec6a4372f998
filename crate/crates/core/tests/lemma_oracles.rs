//! Finite-difference oracles for the jet formulas on tilted and generic data.

use flatpoint::bounds::kpp_numeric;
use flatpoint::jets::{flat_point_jet, kpp_general, numeric_jet, SurfaceJet};
use flatpoint::verify::tilted_datum;
use flatpoint::{AnalyticFunction, RadialPath, WeierstrassData};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `p = 1 + 0.2 z`, `q = 0.3 z + 0.2 z^2`: no symmetry, nonzero curvature.
fn generic() -> WeierstrassData {
    WeierstrassData::new(
        AnalyticFunction::polynomial(vec![c(1.0, 0.0), c(0.2, 0.0)]),
        AnalyticFunction::polynomial(vec![c(0.0, 0.0), c(0.3, 0.1), c(0.2, 0.0)]),
        0.9,
    )
    .unwrap()
}

/// The closed form with the cross-coefficient printed in the Lemma's
/// statement, `3 (f_u^2 + f_v^2) - f_u^2 f_v^2`.
fn kpp_statement_version(jet: &SurfaceJet) -> f64 {
    let (u2, v2) = (jet.f_u * jet.f_u, jet.f_v * jet.f_v);
    let cross = 3.0 * (u2 + v2) - u2 * v2;
    let numerator = (1.0 + u2).powi(3) * jet.f_vvv * jet.f_vvv
        + 2.0 * jet.f_v * jet.f_vvv * jet.f_u * cross * jet.f_uuu
        + (1.0 + v2).powi(3) * jet.f_uuu * jet.f_uuu;
    let tilt = 1.0 + u2 + v2 * (1.0 - 3.0 * u2);
    -numerator / ((1.0 + u2 + v2).powi(2) * tilt * tilt)
}

/// `q = q0 + k z^2` with the slope direction chosen so that both `f_u` and
/// `f_v` are nonzero; the cross term then matters.
fn oblique(q0: Complex64) -> WeierstrassData {
    WeierstrassData::new(
        AnalyticFunction::constant(c(1.0, 0.0)),
        AnalyticFunction::polynomial(vec![q0, c(0.0, 0.0), c(0.8, 0.3)]),
        0.6,
    )
    .unwrap()
}

#[test]
fn proof_cross_coefficient_matches_the_limit_and_statement_version_does_not() {
    for q0 in [c(0.3, 0.2), c(-0.25, 0.35), c(0.4, -0.1)] {
        let data = oblique(q0);
        let exact = flat_point_jet(&data, c(0.0, 0.0)).unwrap();
        assert!(exact.f_u.abs() > 0.1 && exact.f_v.abs() > 0.1);
        let fd = numeric_jet(&data, c(0.0, 0.0)).unwrap().jet;
        let limit = kpp_numeric(&data).unwrap().value;
        let proof = kpp_general(&fd).unwrap();
        let statement = kpp_statement_version(&fd);
        assert!(
            (proof - limit).abs() <= 1e-6 * limit.abs(),
            "proof version {proof} vs limit {limit}"
        );
        assert!(
            (statement - limit).abs() >= 1e-2 * limit.abs(),
            "statement version {statement} unexpectedly agrees with {limit}"
        );
    }
}

#[test]
fn exact_flat_jet_agrees_with_finite_differences() {
    let data = tilted_datum().unwrap();
    let exact = flat_point_jet(&data, c(0.0, 0.0)).unwrap();
    let fd = numeric_jet(&data, c(0.0, 0.0)).unwrap();
    let pairs = [
        (exact.f_u, fd.jet.f_u),
        (exact.f_v, fd.jet.f_v),
        (exact.f_uu, fd.jet.f_uu),
        (exact.f_uv, fd.jet.f_uv),
        (exact.f_vv, fd.jet.f_vv),
        (exact.f_uuu, fd.jet.f_uuu),
        (exact.f_uuv, fd.jet.f_uuv),
        (exact.f_uvv, fd.jet.f_uvv),
        (exact.f_vvv, fd.jet.f_vvv),
    ];
    for (k, (a, b)) in pairs.into_iter().enumerate() {
        assert!((a - b).abs() < 1e-7, "entry {k}: exact {a}, fd {b}");
    }
}

#[test]
fn gradient_and_curvature_match_finite_differences() {
    let data = generic();
    for z in [c(0.1, 0.2), c(-0.3, 0.1), c(0.25, -0.35), c(0.0, 0.0)] {
        let fd = numeric_jet(&data, z).unwrap().jet;
        let (f_u, f_v) = data.gradient_f(z).unwrap();
        assert!(
            (fd.f_u - f_u).abs() < 1e-9 && (fd.f_v - f_v).abs() < 1e-9,
            "{z}"
        );
        let w = 1.0 + fd.f_u * fd.f_u + fd.f_v * fd.f_v;
        let k_fd = (fd.f_uu * fd.f_vv - fd.f_uv * fd.f_uv) / (w * w);
        let k = data.curvature(z).unwrap();
        assert!(
            (k - k_fd).abs() < 1e-7 * (1.0 + k.abs()),
            "{z}: {k} vs {k_fd}"
        );
        assert!(fd.pde_residual().abs() < 1e-7);
    }
}

#[test]
fn immersion_is_conformal_and_harmonic() {
    let data = generic();
    let h = 1e-3;
    for z in [c(0.2, 0.1), c(-0.4, 0.3), c(0.1, -0.6)] {
        let phi = data.ew_components(z).unwrap();
        let iso: Complex64 = phi.iter().map(|x| x * x).sum();
        assert!(iso.norm() < 1e-13);
        let x = |z: Complex64| {
            let s = data.surface_point(z, &RadialPath::new(z)).unwrap();
            s.position
        };
        let centre = x(z);
        let around = [x(z + h), x(z - h), x(z + c(0.0, h)), x(z - c(0.0, h))];
        for k in 0..3 {
            let lap = (around.iter().map(|p| p[k]).sum::<f64>() - 4.0 * centre[k]) / (h * h);
            assert!(lap.abs() < 1e-5, "coordinate {k} at {z}: {lap}");
        }
        // x_z = phi / 2
        let dx = [x(z + h), x(z - h)];
        let dy = [x(z + c(0.0, h)), x(z - c(0.0, h))];
        for k in 0..3 {
            let xz = c(
                (dx[0][k] - dx[1][k]) / (2.0 * h),
                -(dy[0][k] - dy[1][k]) / (2.0 * h),
            ) * 0.5;
            assert!((xz - phi[k] * 0.5).norm() < 1e-6, "component {k} at {z}");
        }
    }
}
