//! Minimal graphs from Enneper-Weierstrass data `(p, q)`.
//!
//! The projection onto the base plane is the harmonic map
//! `f = A + conj(B)` with `A' = p` and `B' = p q^2`, so the second Beltrami
//! coefficient is `omega = B'/A' = q^2`. The Weierstrass components are
//!
//! ```text
//! phi1 = p (1 + q^2),  phi2 = -i p (1 - q^2),  phi3 = -2 i p q
//! ```
//!
//! and the surface is `(Re f, Im f, Im int_0^z 2 p q)`. Choosing the other
//! root `-q` mirrors the surface in its base plane; [`WeierstrassData::mirrored`]
//! selects that choice without changing the stored `q`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    integrate_segment_multi, AnalyticFunction, Backend, RadialPath, NODES_PER_SEGMENT,
};
use crate::error::{Error, Result};
use crate::special::PowerSeries;

const VALIDATION_SAMPLES: usize = 1000;
const NEWTON_MAX_ITERATIONS: usize = 64;
/// Residual accepted by [`WeierstrassData::invert_projection`].
pub const NEWTON_TOLERANCE: f64 = 1e-12;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Deterministic, roughly uniform points on the open disk `|z| < radius`
/// (sunflower spiral).
pub fn disk_samples(n: usize, radius: f64) -> Vec<Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let r = radius * ((k as f64 + 0.5) / n as f64).sqrt();
            Complex64::from_polar(r, golden * k as f64)
        })
        .collect()
}

/// A point of the minimal graph together with its upward unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub z: Complex64,
    /// `(u, v, t)`.
    pub position: [f64; 3],
    pub normal: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct WeierstrassData {
    p: AnalyticFunction,
    q: AnalyticFunction,
    domain_radius: f64,
    mirrored: bool,
}

impl WeierstrassData {
    /// Validated data: `p` zero-free and `|q| < 1` at sampled points of the
    /// working disk.
    pub fn new(p: AnalyticFunction, q: AnalyticFunction, domain_radius: f64) -> Result<Self> {
        let data = Self::new_unchecked(p, q, domain_radius)?;
        data.validate()?;
        Ok(data)
    }

    /// Data without the sampled validity checks, for diagnosing candidates
    /// that may fail them.
    pub fn new_unchecked(
        p: AnalyticFunction,
        q: AnalyticFunction,
        domain_radius: f64,
    ) -> Result<Self> {
        if !(domain_radius > 0.0) || !domain_radius.is_finite() {
            return Err(Error::Parameter(format!(
                "working radius {domain_radius} must be positive and finite"
            )));
        }
        for (name, f) in [("p", &p), ("q", &q)] {
            if f.domain_radius() < domain_radius {
                return Err(Error::Parameter(format!(
                    "{name} is only defined on |z| < {}, below the working radius {domain_radius}",
                    f.domain_radius()
                )));
            }
        }
        Ok(WeierstrassData {
            p,
            q,
            domain_radius,
            mirrored: false,
        })
    }

    /// Selects the root `-q` for the third Weierstrass component.
    pub fn mirrored(mut self, mirrored: bool) -> Self {
        self.mirrored = mirrored;
        self
    }

    fn validate(&self) -> Result<()> {
        let samples = disk_samples(VALIDATION_SAMPLES, self.domain_radius);
        let p_scale = self.p.value(czero())?.norm();
        for &z in &samples {
            let p = self.p.value(z)?;
            if !(p.norm() > 1e-12 * p_scale) || !p.is_finite() {
                return Err(Error::Premise(format!("p vanishes near z = {z}")));
            }
            let q = self.q.value(z)?;
            if !(q.norm() < 1.0) {
                return Err(Error::Premise(format!(
                    "|q({z})| = {} is not below 1; the projection is not orientation preserving",
                    q.norm()
                )));
            }
        }
        Ok(())
    }

    pub fn p(&self) -> &AnalyticFunction {
        &self.p
    }

    /// The stored root `q` (before the mirror choice is applied).
    pub fn q(&self) -> &AnalyticFunction {
        &self.q
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn is_mirrored(&self) -> bool {
        self.mirrored
    }

    fn sign(&self) -> f64 {
        if self.mirrored {
            -1.0
        } else {
            1.0
        }
    }

    pub fn check(&self, z: Complex64) -> Result<()> {
        if z.norm() < self.domain_radius {
            Ok(())
        } else {
            Err(Error::radius(z, self.domain_radius))
        }
    }

    pub fn p_value(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        self.p.value(z)
    }

    /// The root entering the third component, `q` or `-q`.
    pub fn q_value(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        Ok(self.q.value(z)? * self.sign())
    }

    /// Derivatives of the root entering the third component.
    pub fn q_jet(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        self.check(z)?;
        let s = self.sign();
        Ok(self.q.jet(z, order)?.into_iter().map(|d| d * s).collect())
    }

    /// Second Beltrami coefficient `omega = q^2`.
    pub fn omega(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        self.q.squared_value(z)
    }

    /// `(A'(z), B'(z)) = (p, p q^2)`.
    pub fn part_derivatives(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let p = self.p_value(z)?;
        Ok((p, p * self.omega(z)?))
    }

    pub fn ew_components(&self, z: Complex64) -> Result<[Complex64; 3]> {
        let p = self.p_value(z)?;
        let q = self.q_value(z)?;
        let i = Complex64::i();
        let q2 = q * q;
        Ok([p * (1.0 + q2), -i * p * (1.0 - q2), -2.0 * i * p * q])
    }

    /// `(A(z), B(z), int_0^z p q)` by one radial quadrature.
    fn radial_integrals(&self, path: &RadialPath) -> Result<[Complex64; 3]> {
        self.check(path.endpoint)?;
        integrate_segment_multi(
            |z| {
                let p = self.p.value(z)?;
                let q = self.q.value(z)? * self.sign();
                Ok([p, p * q * q, p * q])
            },
            czero(),
            path.endpoint,
            path.segments,
            path.nodes_per_segment,
        )
    }

    /// The harmonic projection `f(z) = A(z) + conj(B(z))`.
    pub fn projection(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        let [a, b] = integrate_segment_multi(
            |w| {
                let (p, g) = self.part_derivatives(w)?;
                Ok([p, g])
            },
            czero(),
            z,
            1,
            NODES_PER_SEGMENT,
        )?;
        Ok(a + b.conj())
    }

    pub fn surface_point(&self, z: Complex64, path: &RadialPath) -> Result<SurfacePoint> {
        if path.endpoint != z {
            return Err(Error::Parameter(format!(
                "path ends at {} instead of {z}",
                path.endpoint
            )));
        }
        let [a, b, w] = self.radial_integrals(path)?;
        let f = a + b.conj();
        Ok(SurfacePoint {
            z,
            position: [f.re, f.im, 2.0 * w.im],
            normal: self.normal(z)?,
        })
    }

    /// Third coordinate `Im int_0^z 2 p q`.
    pub fn height(&self, z: Complex64) -> Result<f64> {
        Ok(self.radial_integrals(&RadialPath::new(z))?[2].im * 2.0)
    }

    /// Upward unit normal `-(2 Im q, 2 Re q, |q|^2 - 1) / (1 + |q|^2)`.
    pub fn normal(&self, z: Complex64) -> Result<[f64; 3]> {
        let q = self.q_value(z)?;
        let m = 1.0 + q.norm_sqr();
        Ok([-2.0 * q.im / m, -2.0 * q.re / m, (1.0 - q.norm_sqr()) / m])
    }

    pub fn gauss_map(&self, z: Complex64) -> Result<Complex64> {
        Ok(Complex64::i() * self.q_value(z)?)
    }

    /// Gaussian curvature `-4 |q'|^2 / (|p|^2 (1 + |q|^2)^4)` at the surface
    /// point over `f(z)`.
    pub fn curvature(&self, z: Complex64) -> Result<f64> {
        let p = self.p_value(z)?;
        let jet = self.q.jet(z, 1)?;
        let (q, dq) = (jet[0], jet[1]);
        Ok(-4.0 * dq.norm_sqr() / (p.norm_sqr() * (1.0 + q.norm_sqr()).powi(4)))
    }

    /// Curvature from `omega` and the part derivatives,
    /// `-|omega'|^2 / (|A' B'| (1 + |omega|)^4)`. Undefined where `omega = 0`.
    pub fn curvature_from_omega(&self, z: Complex64) -> Result<f64> {
        let (a, b) = self.part_derivatives(z)?;
        let t = self.q.taylor(z)?;
        let omega = t * t;
        let (w, dw) = (omega.0[0], omega.0[1]);
        let denominator = (a * b).norm();
        if denominator == 0.0 {
            return Err(Error::Degenerate(format!(
                "omega vanishes at {z}; the omega form of the curvature is 0/0"
            )));
        }
        Ok(-dw.norm_sqr() / (denominator * (1.0 + w.norm()).powi(4)))
    }

    /// Slopes `(f_u, f_v)` of the height over the base point `f(z)`:
    /// `f_u + i f_v = 2 i conj(q) / (1 - |q|^2)`.
    pub fn gradient_f(&self, z: Complex64) -> Result<(f64, f64)> {
        let q = self.q_value(z)?;
        let d = 1.0 - q.norm_sqr();
        if !(d > 0.0) {
            return Err(Error::Degenerate(format!(
                "|q({z})| = {} reaches 1, the graph slope is unbounded",
                q.norm()
            )));
        }
        Ok((2.0 * q.im / d, 2.0 * q.re / d))
    }

    /// `J(f, z) = |p|^2 (1 - |q|^4)`.
    pub fn jacobian(&self, z: Complex64) -> Result<f64> {
        let p = self.p_value(z)?;
        let w = self.omega(z)?;
        Ok(p.norm_sqr() * (1.0 - w.norm_sqr()))
    }

    /// Default Newton trust radius `0.5 |p(0)| R`.
    pub fn trust_radius(&self) -> Result<f64> {
        Ok(0.5 * self.p_value(czero())?.norm() * self.domain_radius)
    }

    /// Parameter `z` with `f(z) = w`, seeded at `w / p(0)`.
    pub fn invert_projection(&self, w: Complex64) -> Result<Complex64> {
        let trust = self.trust_radius()?;
        if w.norm() > trust {
            return Err(Error::Premise(format!(
                "|w| = {} exceeds the trust radius {trust}",
                w.norm()
            )));
        }
        let seed = w / self.p_value(czero())?;
        self.invert_projection_from(w, seed)
    }

    /// Newton iteration for `f(z) = w` from an explicit seed.
    pub fn invert_projection_from(&self, w: Complex64, seed: Complex64) -> Result<Complex64> {
        let mut z = seed;
        let mut last_residual = f64::INFINITY;
        for _ in 0..NEWTON_MAX_ITERATIONS {
            if z.norm() >= self.domain_radius {
                return Err(Error::NonConvergence {
                    what: "projection inversion",
                    detail: format!("iterate {z} left the working disk while solving f(z) = {w}"),
                });
            }
            let r = w - self.projection(z)?;
            let residual = r.norm();
            if residual == 0.0 {
                return Ok(z);
            }
            let (a, b) = self.part_derivatives(z)?;
            let det = a.norm_sqr() - b.norm_sqr();
            if !(det > 1e-14 * a.norm_sqr()) {
                return Err(Error::Degenerate(format!(
                    "projection Jacobian {det} degenerates at {z}"
                )));
            }
            let step = (a.conj() * r - b.conj() * r.conj()) / det;
            z += step;
            let stalled = residual >= 0.5 * last_residual;
            if step.norm() <= 1e-15 * (z.norm() + 1e-300)
                || (stalled && residual <= NEWTON_TOLERANCE)
            {
                let final_residual = (w - self.projection(z)?).norm();
                if final_residual <= NEWTON_TOLERANCE {
                    return Ok(z);
                }
            }
            last_residual = residual;
        }
        Err(Error::NonConvergence {
            what: "projection inversion",
            detail: format!(
                "no convergence to f(z) = {w} within {NEWTON_MAX_ITERATIONS} iterations (last residual {last_residual:e})"
            ),
        })
    }

    pub fn to_document(&self) -> Result<DataDocument> {
        Ok(DataDocument {
            p: FunctionDocument::from_function(&self.p)?,
            q: FunctionDocument::from_function(&self.q)?,
            domain_radius: self.domain_radius,
            mirrored: self.mirrored,
        })
    }

    pub fn from_document(doc: &DataDocument) -> Result<Self> {
        let p = doc.p.to_function(doc.domain_radius)?;
        let q = doc.q.to_function(doc.domain_radius)?;
        Ok(Self::new(p, q, doc.domain_radius)?.mirrored(doc.mirrored))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document()?)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&serde_json::from_str(text)?)
    }
}

/// Serialized holomorphic function; complex coefficients are `[re, im]`
/// pairs in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionDocument {
    Rational {
        numerator: Vec<Complex64>,
        denominator: Vec<Complex64>,
    },
    Series {
        coefficients: Vec<Complex64>,
    },
}

impl FunctionDocument {
    fn from_function(f: &AnalyticFunction) -> Result<Self> {
        match f.backend() {
            Backend::Rational {
                numerator,
                denominator,
            } => Ok(FunctionDocument::Rational {
                numerator: numerator.clone(),
                denominator: denominator.clone(),
            }),
            Backend::Series(s) => Ok(FunctionDocument::Series {
                coefficients: s.coefficients().to_vec(),
            }),
            other => Err(Error::Parameter(format!(
                "backend {other:?} has no document representation"
            ))),
        }
    }

    fn to_function(&self, radius: f64) -> Result<AnalyticFunction> {
        match self {
            FunctionDocument::Rational {
                numerator,
                denominator,
            } => AnalyticFunction::rational(numerator.clone(), denominator.clone(), radius),
            FunctionDocument::Series { coefficients } => Ok(AnalyticFunction::series(
                PowerSeries::from_coefficients(coefficients.clone(), radius)?,
            )),
        }
    }
}

/// Document form of [`WeierstrassData`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataDocument {
    pub p: FunctionDocument,
    pub q: FunctionDocument,
    pub domain_radius: f64,
    #[serde(default)]
    pub mirrored: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hexagon_like() -> WeierstrassData {
        let mut den = vec![czero(); 7];
        den[0] = c(PI, 0.0);
        den[6] = c(PI, 0.0);
        let p = AnalyticFunction::rational(vec![c(3.0, 0.0)], den, 1.0).unwrap();
        let q = AnalyticFunction::monomial(c(1.0, 0.0), 2);
        WeierstrassData::new(p, q, 0.999).unwrap()
    }

    fn plane(q0: Complex64) -> WeierstrassData {
        WeierstrassData::new(
            AnalyticFunction::constant(c(1.0, 0.0)),
            AnalyticFunction::constant(q0),
            0.999,
        )
        .unwrap()
    }

    #[test]
    fn components_at_the_centre() {
        let d = hexagon_like();
        let [a, b, t] = d.ew_components(czero()).unwrap();
        assert!((a - c(3.0 / PI, 0.0)).norm() < 1e-15);
        assert!((b - c(0.0, -3.0 / PI)).norm() < 1e-15);
        assert_eq!(t, czero());

        let flat = WeierstrassData::new(
            AnalyticFunction::constant(c(0.7, 0.2)),
            AnalyticFunction::constant(czero()),
            0.999,
        )
        .unwrap();
        let [a, b, t] = flat.ew_components(c(0.3, 0.1)).unwrap();
        assert_eq!(a, c(0.7, 0.2));
        assert!((b - c(0.2, -0.7)).norm() < 1e-15);
        assert_eq!(t, czero());
    }

    #[test]
    fn components_are_isotropic() {
        let [a, b, t] = hexagon_like().ew_components(c(0.5, 0.0)).unwrap();
        assert!((a * a + b * b + t * t).norm() <= 1e-14);
    }

    #[test]
    fn gauss_map_values() {
        let d = hexagon_like();
        assert_eq!(d.gauss_map(czero()).unwrap(), czero());
        assert!((d.gauss_map(c(0.5, 0.0)).unwrap() - c(0.0, 0.25)).norm() < 1e-15);
        assert!((plane(c(0.3, 0.0)).gauss_map(c(0.2, 0.4)).unwrap() - c(0.0, 0.3)).norm() < 1e-15);
    }

    #[test]
    fn curvature_values() {
        let d = hexagon_like();
        assert_eq!(d.curvature(czero()).unwrap(), 0.0);
        let z = c(0.5, 0.0);
        // independent substitution of p, q into the curvature formula
        let oracle = -4.0 * (2.0 * z).norm_sqr() * PI * PI * (1.0 + z.powu(6)).norm_sqr()
            / (9.0 * (1.0 + z.norm().powi(4)).powi(4));
        assert!((d.curvature(z).unwrap() - oracle).abs() <= 1e-12);
        assert_eq!(plane(c(0.4, 0.1)).curvature(c(0.2, 0.2)).unwrap(), 0.0);
    }

    #[test]
    fn omega_form_of_curvature_agrees_away_from_zeros_of_q() {
        let d = hexagon_like();
        for z in disk_samples(50, 0.9).into_iter().skip(1) {
            let a = d.curvature(z).unwrap();
            let b = d.curvature_from_omega(z).unwrap();
            assert!(
                (a - b).abs() <= 1e-12 * a.abs().max(1e-300),
                "{z}: {a} vs {b}"
            );
        }
        assert!(d.curvature_from_omega(czero()).is_err());
    }

    #[test]
    fn gradient_relations() {
        assert_eq!(plane(czero()).gradient_f(czero()).unwrap(), (0.0, 0.0));
        let (fu, fv) = plane(c(0.5, 0.0)).gradient_f(czero()).unwrap();
        assert!(fu.abs() < 1e-15 && (fv - 4.0 / 3.0).abs() < 1e-15);
        let (fu, fv) = plane(c(0.0, 0.5)).gradient_f(czero()).unwrap();
        assert!((fu - 4.0 / 3.0).abs() < 1e-15 && fv.abs() < 1e-15);
    }

    #[test]
    fn jacobian_values() {
        let d = hexagon_like();
        assert!((d.jacobian(czero()).unwrap() - 9.0 / (PI * PI)).abs() < 1e-15);
        let z = c(0.5, 0.0);
        let p = d.p_value(z).unwrap();
        assert!((d.jacobian(z).unwrap() - p.norm_sqr() * (1.0 - 0.5f64.powi(8))).abs() < 1e-15);
        let flat = plane(czero());
        assert_eq!(flat.jacobian(c(0.3, 0.3)).unwrap(), 1.0);
    }

    #[test]
    fn surface_point_at_centre() {
        let sp = hexagon_like()
            .surface_point(czero(), &RadialPath::new(czero()))
            .unwrap();
        assert_eq!(sp.position, [0.0, 0.0, 0.0]);
        assert_eq!(sp.normal, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn normal_is_unit() {
        let d = hexagon_like();
        for z in disk_samples(200, 0.99) {
            let n = d.normal(z).unwrap();
            let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            assert!((len - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn newton_round_trip() {
        let d = hexagon_like();
        assert_eq!(d.invert_projection(czero()).unwrap(), czero());
        let z = c(0.3, 0.2);
        let w = d.projection(z).unwrap();
        assert!((d.invert_projection(w).unwrap() - z).norm() <= 1e-10);

        let z = d.invert_projection(c(0.01, 0.0)).unwrap();
        let f = d.projection(z).unwrap();
        assert!((f.re - 0.01).abs() <= 1e-12 && f.im.abs() <= 1e-12);
    }

    #[test]
    fn invalid_data_is_rejected() {
        let p = AnalyticFunction::constant(c(1.0, 0.0));
        let q = AnalyticFunction::polynomial(vec![c(0.3, 0.0), czero(), c(1.0, 0.0)]);
        assert!(matches!(
            WeierstrassData::new(p.clone(), q.clone(), 0.999),
            Err(Error::Premise(_))
        ));
        assert!(WeierstrassData::new(p, q, 0.8).is_ok());
        let d = hexagon_like();
        assert!(matches!(
            d.curvature(c(1.0, 0.0)),
            Err(Error::RadiusViolation { .. })
        ));
    }

    #[test]
    fn document_round_trip_is_exact() {
        let d = WeierstrassData::new(
            AnalyticFunction::rational(
                vec![c(0.1, 0.7), c(1.0 / 3.0, -2.0 / 7.0)],
                vec![c(1.0, 0.0), c(0.0, 0.1)],
                0.9,
            )
            .unwrap(),
            AnalyticFunction::series(
                PowerSeries::from_coefficients(
                    vec![c(0.0, 0.0), c(0.0, 0.0), c(0.123456789012345678, 1e-17)],
                    0.9,
                )
                .unwrap(),
            ),
            0.9,
        )
        .unwrap()
        .mirrored(true);
        let text = d.to_json().unwrap();
        let back = WeierstrassData::from_json(&text).unwrap();
        assert_eq!(back.to_document().unwrap(), d.to_document().unwrap());
        assert!(back.is_mirrored());
    }
}
