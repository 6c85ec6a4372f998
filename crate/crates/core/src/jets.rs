//! Partial derivatives of the height function `t = f(u, v)` of a minimal
//! graph, the Hessian of the Gaussian curvature at a zero-curvature point, and
//! the second-order curvature rate `K''` there.
//!
//! `K''` is normalized as
//!
//! ```text
//! K'' = lim_{w -> 0} K(w) / (|w|^2 + <grad f(w), w>^2)
//! ```
//!
//! so that at a point with horizontal tangent plane it is the coefficient of
//! `|w|^2` in `K`, and `K'' = -(f_uuu^2 + f_vvv^2)` there.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::RadialPath;
use crate::error::{Error, Result};
use crate::extrapolate::richardson;
use crate::weierstrass::WeierstrassData;

/// Second partials below this are treated as vanishing at a flat point.
pub const FLAT_TOLERANCE: f64 = 1e-8;
/// Accepted Richardson error estimate for numerically measured third partials.
pub const THIRD_ORDER_TOLERANCE: f64 = 1e-4;
const DEGENERATE_DENOMINATOR: f64 = 1e-12;

/// Partials of the height function at one point, through order three.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceJet {
    pub f_u: f64,
    pub f_v: f64,
    pub f_uu: f64,
    pub f_uv: f64,
    pub f_vv: f64,
    pub f_uuu: f64,
    pub f_uuv: f64,
    pub f_uvv: f64,
    pub f_vvv: f64,
}

impl SurfaceJet {
    /// The jet of a zero-curvature point with slopes `(f_u, f_v)` whose mixed
    /// third partials are fixed by the minimal surface equation.
    pub fn flat(f_u: f64, f_v: f64, f_uuu: f64, f_vvv: f64) -> Result<Self> {
        let (f_uvv, f_uuv) = close_third_jet(f_u, f_v, f_uuu, f_vvv)?;
        Ok(SurfaceJet {
            f_u,
            f_v,
            f_uuu,
            f_uuv,
            f_uvv,
            f_vvv,
            ..Default::default()
        })
    }

    /// `(1 + f_u^2) f_vv - 2 f_u f_v f_uv + (1 + f_v^2) f_uu`.
    pub fn pde_residual(&self) -> f64 {
        (1.0 + self.f_u * self.f_u) * self.f_vv - 2.0 * self.f_u * self.f_v * self.f_uv
            + (1.0 + self.f_v * self.f_v) * self.f_uu
    }

    /// Residuals of the minimal surface equation differentiated in `u` and
    /// in `v`.
    pub fn differentiated_pde_residuals(&self) -> (f64, f64) {
        let s = self;
        let (a, b) = (1.0 + s.f_u * s.f_u, 1.0 + s.f_v * s.f_v);
        let du = -2.0 * s.f_u * s.f_uv * s.f_uv + a * s.f_uvv + 2.0 * s.f_vv * s.f_u * s.f_uu
            - 2.0 * s.f_v * s.f_u * s.f_uuv
            + b * s.f_uuu;
        let dv = s.f_vvv * a - 2.0 * s.f_v * s.f_uv * s.f_uv - 2.0 * s.f_v * s.f_u * s.f_uvv
            + 2.0 * s.f_v * s.f_vv * s.f_uu
            + b * s.f_uuv;
        (du, dv)
    }

    pub fn is_flat(&self, tolerance: f64) -> bool {
        self.f_uu.abs() <= tolerance && self.f_uv.abs() <= tolerance && self.f_vv.abs() <= tolerance
    }

    fn require_flat(&self) -> Result<()> {
        let scale = 1.0 + self.f_uuu.abs().max(self.f_vvv.abs());
        if self.is_flat(FLAT_TOLERANCE * scale) {
            Ok(())
        } else {
            Err(Error::Premise(format!(
                "second partials ({:e}, {:e}, {:e}) do not vanish; not a zero-curvature point",
                self.f_uu, self.f_uv, self.f_vv
            )))
        }
    }

    fn gradient_weight(&self) -> f64 {
        1.0 + self.f_u * self.f_u + self.f_v * self.f_v
    }
}

/// Hessian of the Gaussian curvature, as a function on the base plane, at a
/// zero-curvature point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianK {
    pub k_uu: f64,
    pub k_uv: f64,
    pub k_vv: f64,
}

impl HessianK {
    pub fn trace(&self) -> f64 {
        self.k_uu + self.k_vv
    }

    /// `<H e, e>` for the unit vector `e = (cos t, sin t)`.
    pub fn quadratic_form(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        self.k_uu * c * c + 2.0 * self.k_uv * c * s + self.k_vv * s * s
    }
}

/// Values of the direction functions at angle `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionProfile {
    /// `<H e, e>`.
    pub q: f64,
    /// `-2 (1 + <grad f, e>^2)`.
    pub y: f64,
    /// `Q / (1 + <grad f, e>^2)`.
    pub r: f64,
}

/// Mixed third partials `(f_uvv, f_uuv)` at a zero-curvature point with
/// slopes `(f_u, f_v)`, from the minimal surface equation differentiated in
/// `u` and in `v`.
pub fn close_third_jet(f_u: f64, f_v: f64, f_uuu: f64, f_vvv: f64) -> Result<(f64, f64)> {
    let (u2, v2) = (f_u * f_u, f_v * f_v);
    let d = -1.0 - u2 + v2 * (-1.0 + 3.0 * u2);
    if d.abs() < DEGENERATE_DENOMINATOR {
        return Err(Error::Degenerate(format!(
            "slopes ({f_u}, {f_v}) make 1 + f_u^2 + f_v^2 (1 - 3 f_u^2) vanish"
        )));
    }
    let f_uvv = (2.0 * f_v * f_vvv * (f_u + f_u * u2) + (1.0 + v2).powi(2) * f_uuu) / d;
    let f_uuv = (f_vvv * (1.0 + u2).powi(2) + 2.0 * (f_v + f_v * v2) * f_u * f_uuu) / d;
    Ok((f_uvv, f_uuv))
}

pub fn hessian_of_k(jet: &SurfaceJet) -> Result<HessianK> {
    jet.require_flat()?;
    let w2 = jet.gradient_weight().powi(2);
    let j = jet;
    Ok(HessianK {
        k_uu: (-2.0 * j.f_uuv * j.f_uuv + 2.0 * j.f_uvv * j.f_uuu) / w2,
        k_uv: (-j.f_uvv * j.f_uuv + j.f_vvv * j.f_uuu) / w2,
        k_vv: (-2.0 * j.f_uvv * j.f_uvv + 2.0 * j.f_vvv * j.f_uuv) / w2,
    })
}

/// `Q(t)`, `Y(t)` and `R(t)` in the direction `e = (cos t, sin t)`.
pub fn direction_profile(jet: &SurfaceJet, t: f64) -> Result<DirectionProfile> {
    jet.require_flat()?;
    let (s, c) = t.sin_cos();
    let j = jet;
    let a = -2.0 * s * s * j.f_uvv * j.f_uvv + 2.0 * s * (s * j.f_vvv - c * j.f_uvv) * j.f_uuv;
    let b = -2.0 * c * c * j.f_uuv * j.f_uuv + 2.0 * c * (s * j.f_vvv + c * j.f_uvv) * j.f_uuu;
    let q = (a + b) / jet.gradient_weight().powi(2);
    let slope = c * j.f_u + s * j.f_v;
    let tilt = 1.0 + slope * slope;
    Ok(DirectionProfile {
        q,
        y: -2.0 * tilt,
        r: q / tilt,
    })
}

/// `Y'(t) = -4 cos(2t) f_u f_v + 2 sin(2t) (f_u^2 - f_v^2)`.
pub fn y_derivative(jet: &SurfaceJet, t: f64) -> f64 {
    -4.0 * (2.0 * t).cos() * jet.f_u * jet.f_v
        + 2.0 * (2.0 * t).sin() * (jet.f_u * jet.f_u - jet.f_v * jet.f_v)
}

/// Closed form of `K''` at a zero-curvature point in terms of the slopes and
/// the pure third partials.
pub fn kpp_general(jet: &SurfaceJet) -> Result<f64> {
    jet.require_flat()?;
    let (fu, fv) = (jet.f_u, jet.f_v);
    let (u2, v2) = (fu * fu, fv * fv);
    let tilt = 1.0 + u2 + v2 * (1.0 - 3.0 * u2);
    if tilt.abs() < DEGENERATE_DENOMINATOR {
        return Err(Error::Degenerate(format!(
            "slopes ({fu}, {fv}) make 1 + f_u^2 + f_v^2 (1 - 3 f_u^2) vanish"
        )));
    }
    let cross = v2 * (3.0 - u2) + 3.0 * (1.0 + u2);
    let numerator = (1.0 + u2).powi(3) * jet.f_vvv * jet.f_vvv
        + 2.0 * fv * jet.f_vvv * fu * cross * jet.f_uuu
        + (1.0 + v2).powi(3) * jet.f_uuu * jet.f_uuu;
    let denominator = jet.gradient_weight().powi(2) * tilt * tilt;
    Ok(-numerator / denominator)
}

/// Root `q` of the Gauss map data producing the slopes `(f_u, f_v)`.
pub fn slope_to_q(f_u: f64, f_v: f64) -> Complex64 {
    let grad = Complex64::new(f_u, f_v);
    let g = grad.norm();
    if g == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let modulus = ((1.0 + g * g).sqrt() - 1.0) / g;
    Complex64::i() * grad.conj() * 0.5 * (1.0 - modulus * modulus)
}

/// Exact jet at a parameter `z0` where `q'(z0) = 0`, computed from the
/// Weierstrass data instead of finite differences.
pub fn flat_point_jet(data: &WeierstrassData, z0: Complex64) -> Result<SurfaceJet> {
    let sign = if data.is_mirrored() { -1.0 } else { 1.0 };
    let q_jet = data.q_jet(z0, 2)?;
    let (q0, dq, ddq) = (q_jet[0] * sign, q_jet[1] * sign, q_jet[2] * sign);
    let p = data.p_value(z0)?;
    if dq.norm() > FLAT_TOLERANCE * p.norm() {
        return Err(Error::Premise(format!(
            "q'({z0}) = {dq} does not vanish; curvature is nonzero there"
        )));
    }
    let g = p * q0 * q0;
    let det = p.norm_sqr() - g.norm_sqr();
    // Parameter velocities along the base-plane axes.
    let dz_u = (p.conj() - g.conj()) / det;
    let dz_v = Complex64::i() * (p.conj() + g.conj()) / det;
    let m = 1.0 - q0.norm_sqr();
    let i = Complex64::i();
    let dgrad = |dq: Complex64| {
        2.0 * i * dq.conj() / m + 2.0 * i * q0.conj() * (q0.conj() * dq + q0 * dq.conj()) / (m * m)
    };
    let grad = 2.0 * i * q0.conj() / m;
    let uu = dgrad(ddq * dz_u * dz_u);
    let uv = dgrad(ddq * dz_u * dz_v);
    let vv = dgrad(ddq * dz_v * dz_v);
    Ok(SurfaceJet {
        f_u: grad.re,
        f_v: grad.im,
        f_uuu: uu.re,
        f_uuv: 0.5 * (uu.im + uv.re),
        f_uvv: 0.5 * (uv.im + vv.re),
        f_vvv: vv.im,
        ..Default::default()
    })
}

/// Finite-difference jet together with Richardson error estimates per entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericJet {
    pub jet: SurfaceJet,
    pub error: SurfaceJet,
    pub step: f64,
}

/// Height of the graph over the base point `w`, with the Newton inversion
/// seeded from the linearization at `z0`.
pub fn height_over(data: &WeierstrassData, w: Complex64, z0: Complex64) -> Result<f64> {
    let w0 = data.projection(z0)?;
    let (p, g) = data.part_derivatives(z0)?;
    let dw = w - w0;
    let seed = z0 + (p.conj() * dw - g.conj() * dw.conj()) / (p.norm_sqr() - g.norm_sqr());
    let z = data.invert_projection_from(w, seed)?;
    let t = data.surface_point(z, &RadialPath::new(z))?.position[2];
    // First-order correction for the Newton residual.
    let (f_u, f_v) = data.gradient_f(z)?;
    let r = w - data.projection(z)?;
    Ok(t + f_u * r.re + f_v * r.im)
}

const STENCIL: i32 = 2;
const STENCIL_WIDTH: usize = (2 * STENCIL + 1) as usize;

fn grid_heights(data: &WeierstrassData, z0: Complex64, h: f64) -> Result<Vec<f64>> {
    let w0 = data.projection(z0)?;
    let offsets: Vec<(i32, i32)> = (-STENCIL..=STENCIL)
        .flat_map(|j| (-STENCIL..=STENCIL).map(move |i| (i, j)))
        .collect();
    offsets
        .par_iter()
        .map(|&(i, j)| height_over(data, w0 + Complex64::new(i as f64 * h, j as f64 * h), z0))
        .collect()
}

fn stencil_jet(t: &[f64], h: f64) -> SurfaceJet {
    let at = |i: i32, j: i32| t[((j + STENCIL) as usize) * STENCIL_WIDTH + (i + STENCIL) as usize];
    let d_uu = |j: i32| (at(1, j) - 2.0 * at(0, j) + at(-1, j)) / (h * h);
    let d_vv = |i: i32| (at(i, 1) - 2.0 * at(i, 0) + at(i, -1)) / (h * h);
    let h3 = 2.0 * h * h * h;
    SurfaceJet {
        f_u: (at(1, 0) - at(-1, 0)) / (2.0 * h),
        f_v: (at(0, 1) - at(0, -1)) / (2.0 * h),
        f_uu: d_uu(0),
        f_uv: (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h),
        f_vv: d_vv(0),
        f_uuu: (at(2, 0) - 2.0 * at(1, 0) + 2.0 * at(-1, 0) - at(-2, 0)) / h3,
        f_uuv: (d_uu(1) - d_uu(-1)) / (2.0 * h),
        f_uvv: (d_vv(1) - d_vv(-1)) / (2.0 * h),
        f_vvv: (at(0, 2) - 2.0 * at(0, 1) + 2.0 * at(0, -1) - at(0, -2)) / h3,
    }
}

fn jet_fields(jet: &SurfaceJet) -> [f64; 9] {
    [
        jet.f_u, jet.f_v, jet.f_uu, jet.f_uv, jet.f_vv, jet.f_uuu, jet.f_uuv, jet.f_uvv, jet.f_vvv,
    ]
}

fn jet_from_fields(v: [f64; 9]) -> SurfaceJet {
    SurfaceJet {
        f_u: v[0],
        f_v: v[1],
        f_uu: v[2],
        f_uv: v[3],
        f_vv: v[4],
        f_uuu: v[5],
        f_uuv: v[6],
        f_uvv: v[7],
        f_vvv: v[8],
    }
}

/// Jet of the height over `f(z0)` by central differences on the graph,
/// with base step `1e-2` times the Newton trust radius and two Richardson
/// levels.
pub fn numeric_jet(data: &WeierstrassData, z0: Complex64) -> Result<NumericJet> {
    numeric_jet_with_step(data, z0, 1e-2 * data.trust_radius()?)
}

pub fn numeric_jet_with_step(
    data: &WeierstrassData,
    z0: Complex64,
    step: f64,
) -> Result<NumericJet> {
    if !(step > 0.0) {
        return Err(Error::Parameter(format!("step {step} must be positive")));
    }
    let steps = [step, step / 2.0, step / 4.0];
    let levels: Vec<[f64; 9]> = steps
        .iter()
        .map(|&h| Ok(jet_fields(&stencil_jet(&grid_heights(data, z0, h)?, h))))
        .collect::<Result<_>>()?;
    let mut value = [0.0; 9];
    let mut error = [0.0; 9];
    for k in 0..9 {
        let column: Vec<f64> = levels.iter().map(|l| l[k]).collect();
        let e = richardson(&steps, &column, 2);
        value[k] = e.value;
        error[k] = e.error;
    }
    let error = jet_from_fields(error);
    let worst = [error.f_uuu, error.f_uuv, error.f_uvv, error.f_vvv]
        .into_iter()
        .fold(0.0, f64::max);
    if worst > THIRD_ORDER_TOLERANCE {
        return Err(Error::NonConvergence {
            what: "finite-difference jet",
            detail: format!(
                "third partial error estimate {worst:e} exceeds {THIRD_ORDER_TOLERANCE:e}"
            ),
        });
    }
    Ok(NumericJet {
        jet: jet_from_fields(value),
        error,
        step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::AnalyticFunction;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closure_at_horizontal_tangent() {
        let (uvv, uuv) = close_third_jet(0.0, 0.0, 1.5, -0.5).unwrap();
        assert_eq!((uvv, uuv), (-1.5, 0.5));
    }

    #[test]
    fn closure_agrees_with_linear_solve() {
        let (fu, fv, fuuu, fvvv) = (0.5, 0.5, 0.0, 1.0);
        let (x, y) = close_third_jet(fu, fv, fuuu, fvvv).unwrap();
        // (1+fu^2) x - 2 fu fv y = -(1+fv^2) fuuu ; -2 fu fv x + (1+fv^2) y = -(1+fu^2) fvvv
        let (a11, a12, a21, a22) = (1.0 + fu * fu, -2.0 * fu * fv, -2.0 * fu * fv, 1.0 + fv * fv);
        let (b1, b2) = (-(1.0 + fv * fv) * fuuu, -(1.0 + fu * fu) * fvvv);
        let det = a11 * a22 - a12 * a21;
        assert!((x - (b1 * a22 - a12 * b2) / det).abs() < 1e-15);
        assert!((y - (a11 * b2 - a21 * b1) / det).abs() < 1e-15);
    }

    #[test]
    fn degenerate_closure_is_reported() {
        // 1 + u^2 + v^2 (1 - 3 u^2) = 0 at u = 1, v^2 = 1
        assert!(matches!(
            close_third_jet(1.0, 1.0, 1.0, 1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn hessian_and_profile_at_horizontal_tangent() {
        let (a, b) = (1.3, -0.7);
        let jet = SurfaceJet::flat(0.0, 0.0, a, b).unwrap();
        let h = hessian_of_k(&jet).unwrap();
        assert!((h.k_uu + 2.0 * (a * a + b * b)).abs() < 1e-14);
        assert!((h.k_vv + 2.0 * (a * a + b * b)).abs() < 1e-14);
        assert!(h.k_uv.abs() < 1e-14);
        for k in 0..8 {
            let t = k as f64 * std::f64::consts::PI / 8.0;
            let d = direction_profile(&jet, t).unwrap();
            assert!((d.q + 2.0 * (a * a + b * b)).abs() < 1e-13);
            assert!(y_derivative(&jet, t).abs() < 1e-15);
        }
        assert!((kpp_general(&jet).unwrap() + a * a + b * b).abs() < 1e-14);
    }

    #[test]
    fn zero_third_jet_gives_zero_hessian() {
        let h = hessian_of_k(&SurfaceJet::default()).unwrap();
        assert_eq!((h.k_uu, h.k_uv, h.k_vv), (0.0, 0.0, 0.0));
    }

    #[test]
    fn direction_independence_on_tilted_jet() {
        let jet = SurfaceJet::flat(0.2, -0.1, 1.0, 2.0).unwrap();
        let kpp = kpp_general(&jet).unwrap();
        for k in 0..16 {
            let t = k as f64 * std::f64::consts::PI / 8.0;
            let r = direction_profile(&jet, t).unwrap().r;
            assert!(
                (r / 2.0 - kpp).abs() <= 1e-12 * kpp.abs(),
                "t = {t}: {r} vs {kpp}"
            );
        }
        let tilted = SurfaceJet::flat(0.3, 0.4, 1.0, 2.0).unwrap();
        assert!((0..8).any(|k| y_derivative(&tilted, k as f64 * 0.4).abs() > 0.1));
    }

    #[test]
    fn non_flat_jet_is_rejected() {
        let jet = SurfaceJet {
            f_uu: 0.1,
            ..Default::default()
        };
        assert!(matches!(hessian_of_k(&jet), Err(Error::Premise(_))));
        assert!(kpp_general(&jet).is_err());
    }

    #[test]
    fn slope_inversion_round_trip() {
        for (fu, fv) in [(0.0, 0.0), (0.2, -0.1), (0.0, 4.0 / 3.0), (-3.0, 1.0)] {
            let q = slope_to_q(fu, fv);
            let data = WeierstrassData::new(
                AnalyticFunction::constant(c(1.0, 0.0)),
                AnalyticFunction::constant(q),
                0.9,
            )
            .unwrap();
            let (gu, gv) = data.gradient_f(c(0.1, 0.0)).unwrap();
            assert!((gu - fu).abs() < 1e-13 && (gv - fv).abs() < 1e-13);
        }
    }

    #[test]
    fn plane_has_vanishing_higher_partials() {
        let data = WeierstrassData::new(
            AnalyticFunction::constant(c(1.0, 0.0)),
            AnalyticFunction::constant(c(0.0, 0.0)),
            0.999,
        )
        .unwrap();
        let n = numeric_jet(&data, c(0.0, 0.0)).unwrap().jet;
        for v in jet_fields(&n) {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn numeric_jet_matches_exact_flat_jet() {
        // p = 1, q = 0.3 + z^2 on |z| < 0.8
        let q = AnalyticFunction::polynomial(vec![c(0.3, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let data = WeierstrassData::new(AnalyticFunction::constant(c(1.0, 0.0)), q, 0.8).unwrap();
        let exact = flat_point_jet(&data, c(0.0, 0.0)).unwrap();
        let numeric = numeric_jet(&data, c(0.0, 0.0)).unwrap().jet;
        assert!((exact.f_u - numeric.f_u).abs() < 1e-8);
        assert!((exact.f_v - numeric.f_v).abs() < 1e-8);
        for (a, b) in [
            (exact.f_uuu, numeric.f_uuu),
            (exact.f_uuv, numeric.f_uuv),
            (exact.f_uvv, numeric.f_uvv),
            (exact.f_vvv, numeric.f_vvv),
        ] {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
        let (r1, r2) = exact.differentiated_pde_residuals();
        assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12);
    }
}
