//! The Scherk-type minimal graph over the regular hexagon.
//!
//! The harmonic map `f = g + conj(h)` with
//!
//! ```text
//! g(z) = (3/pi) z 2F1(1/6, 1; 7/6; -z^6),   h(z) = (3/(5 pi)) z^5 2F1(5/6, 1; 11/6; -z^6)
//! ```
//!
//! sends the unit disk onto the regular hexagon inscribed in the unit circle,
//! with `g' = p = 3/(pi (1 + z^6))` and `h'/g' = z^4`. The surface height is
//!
//! ```text
//! t(r e^{is}) = (1/2pi) log[(1 + r^6 - 2 r^3 sin 3s) / (1 + r^6 + 2 r^3 sin 3s)]
//! ```
//!
//! which is `Im int 2 p q` for the root `q = -z^2`; the model stores `q = z^2`
//! with the mirror flag set.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{integrate_segment_multi, AnalyticFunction, NODES_PER_SEGMENT};
use crate::bounds::{CurvatureReport, ReportOptions};
use crate::error::{Error, Result};
use crate::special::PowerSeries;
use crate::weierstrass::WeierstrassData;

/// Working radius of the model's Weierstrass data.
pub const WORKING_RADIUS: f64 = 0.999;
/// Validity radius of the truncated series for `g` and `h`.
pub const SERIES_RADIUS: f64 = 0.95;
/// Number of hypergeometric terms kept (`h` has degree `6 * 89 + 5`); enough
/// for `1e-10` on `|z| <= 0.95` in the first derivatives as well.
pub const SERIES_TERMS: usize = 90;
/// Angular distance from the singular boundary points inside which boundary
/// values are not evaluated.
pub const GUARD_BAND: f64 = 1e-3;
/// Radius at which boundary limits are taken.
const LIMIT_RADIUS: f64 = 1.0 - 1e-10;
/// Radius of the boundary samples.
pub const BOUNDARY_RADIUS: f64 = 0.999;

pub const EXTREMAL_ANNOTATION: &str =
    "extremal datum: graph over the hexagon, not the disk; attains 16*pi^4/81";

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `3 / (pi (1 + z^6))` on the open unit disk.
pub fn hexagon_density() -> AnalyticFunction {
    let mut den = vec![czero(); 7];
    den[0] = Complex64::new(PI, 0.0);
    den[6] = Complex64::new(PI, 0.0);
    AnalyticFunction::rational(vec![Complex64::new(3.0, 0.0)], den, 1.0)
        .expect("1 + z^6 has no zeros inside the unit disk")
}

/// Closed-form height over the parameter `z`, `|z| < 1`.
pub fn height(z: Complex64) -> Result<f64> {
    let r = z.norm();
    if !(r < 1.0) {
        return Err(Error::radius(z, 1.0));
    }
    let (r3, r6) = (r.powi(3), r.powi(6));
    let s3 = (3.0 * z.arg()).sin();
    Ok(((1.0 + r6 - 2.0 * r3 * s3) / (1.0 + r6 + 2.0 * r3 * s3)).ln() / (2.0 * PI))
}

#[derive(Debug, Clone)]
pub struct HexagonModel {
    data: WeierstrassData,
    g_series: PowerSeries,
    h_series: PowerSeries,
    vertex_angles: [f64; 6],
}

pub fn build_hexagon() -> HexagonModel {
    let q = AnalyticFunction::monomial(Complex64::new(1.0, 0.0), 2);
    let data = WeierstrassData::new(hexagon_density(), q, WORKING_RADIUS)
        .expect("hexagon data is admissible")
        .mirrored(true);
    let g_series = PowerSeries::hypergeometric(
        1.0 / 6.0,
        1.0,
        7.0 / 6.0,
        3.0 / PI,
        1,
        -1.0,
        6,
        SERIES_TERMS,
        SERIES_RADIUS,
    )
    .expect("valid hypergeometric parameters");
    let h_series = PowerSeries::hypergeometric(
        5.0 / 6.0,
        1.0,
        11.0 / 6.0,
        3.0 / (5.0 * PI),
        5,
        -1.0,
        6,
        SERIES_TERMS,
        SERIES_RADIUS,
    )
    .expect("valid hypergeometric parameters");
    let vertex_angles = std::array::from_fn(|k| PI / 6.0 + k as f64 * PI / 3.0);
    HexagonModel {
        data,
        g_series,
        h_series,
        vertex_angles,
    }
}

/// Boundary image sample and its distance to the hexagon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample {
    pub angle: f64,
    pub image: [f64; 2],
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryGeometry {
    pub samples: Vec<BoundarySample>,
    /// Estimated hexagon vertices, one per boundary arc between singular points.
    pub vertices: [[f64; 2]; 6],
    pub max_distance: f64,
}

impl HexagonModel {
    pub fn data(&self) -> &WeierstrassData {
        &self.data
    }

    pub fn g_series(&self) -> &PowerSeries {
        &self.g_series
    }

    pub fn h_series(&self) -> &PowerSeries {
        &self.h_series
    }

    /// The boundary points `e^{i (pi/6 + k pi/3)}` where `p` has its poles.
    pub fn vertex_angles(&self) -> [f64; 6] {
        self.vertex_angles
    }

    /// `f(z)` from the truncated series, `|z| <= 0.95`.
    pub fn projection_series(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.g_series.value(z)? + self.h_series.value(z)?.conj())
    }

    /// `f(z)` for any `|z| < 1` by quadrature graded toward the endpoint.
    pub fn projection(&self, z: Complex64) -> Result<Complex64> {
        let [g, h] = graded_parts(z)?;
        Ok(g + h.conj())
    }

    pub fn height(&self, z: Complex64) -> Result<f64> {
        height(z)
    }

    /// Radial limit of `f` at the boundary angle `s`.
    pub fn boundary_limit(&self, s: f64) -> Result<Complex64> {
        self.projection(Complex64::from_polar(LIMIT_RADIUS, s))
    }

    /// The images of the six boundary arcs, each the mean of the one-sided
    /// limits just inside the arc's two ends.
    pub fn vertices(&self) -> Result<[Complex64; 6]> {
        let mut out = [czero(); 6];
        for (k, v) in out.iter_mut().enumerate() {
            let start = self.vertex_angles[(k + 5) % 6] - if k == 0 { 2.0 * PI } else { 0.0 };
            let end = self.vertex_angles[k];
            let a = self.boundary_limit(start + GUARD_BAND)?;
            let b = self.boundary_limit(end - GUARD_BAND)?;
            *v = 0.5 * (a + b);
        }
        Ok(out)
    }

    pub fn kpp_report(&self) -> Result<CurvatureReport> {
        let mut report = CurvatureReport::for_data(
            &self.data,
            ReportOptions {
                numeric: true,
                disk_onto_disk: false,
            },
        )?;
        report.annotate(EXTREMAL_ANNOTATION);
        Ok(report)
    }

    pub fn boundary_geometry(&self, samples: usize) -> Result<BoundaryGeometry> {
        if samples < 6 {
            return Err(Error::Parameter(format!(
                "need at least 6 boundary samples, got {samples}"
            )));
        }
        let vertices = self.vertices()?;
        let angles: Vec<f64> = (0..samples)
            .map(|k| 2.0 * PI * k as f64 / samples as f64)
            .filter(|&s| {
                self.vertex_angles.iter().all(|&a| {
                    let d = (s - a).rem_euclid(2.0 * PI);
                    d.min(2.0 * PI - d) > GUARD_BAND
                })
            })
            .collect();
        let samples: Vec<BoundarySample> = angles
            .par_iter()
            .map(|&s| {
                let w = self.projection(Complex64::from_polar(BOUNDARY_RADIUS, s))?;
                Ok(BoundarySample {
                    angle: s,
                    image: [w.re, w.im],
                    distance: polygon_distance(&vertices, w),
                })
            })
            .collect::<Result<_>>()?;
        let max_distance = samples.iter().map(|s| s.distance).fold(0.0, f64::max);
        Ok(BoundaryGeometry {
            samples,
            vertices: vertices.map(|v| [v.re, v.im]),
            max_distance,
        })
    }

    /// Polar-grid mesh of the graph over `|z| <= r_max`.
    pub fn export_mesh(
        &self,
        n_radial: usize,
        n_angular: usize,
        r_max: f64,
        format: MeshFormat,
    ) -> Result<MeshArtifact> {
        if n_radial == 0 || n_angular < 3 {
            return Err(Error::Parameter(format!(
                "mesh needs n_radial >= 1 and n_angular >= 3, got {n_radial} and {n_angular}"
            )));
        }
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(Error::Parameter(format!(
                "r_max = {r_max} must lie in (0, 1)"
            )));
        }
        let mut nodes = vec![(0.0, 0.0)];
        for j in 1..=n_radial {
            let r = r_max * j as f64 / n_radial as f64;
            for k in 0..n_angular {
                nodes.push((r, 2.0 * PI * k as f64 / n_angular as f64));
            }
        }
        let vertices: Vec<MeshVertex> = nodes
            .par_iter()
            .map(|&(r, s)| {
                let z = Complex64::from_polar(r, s);
                let w = self.projection(z)?;
                Ok(MeshVertex {
                    r,
                    s,
                    u: w.re,
                    v: w.im,
                    t: height(z)?,
                })
            })
            .collect::<Result<_>>()?;
        let ring = |j: usize, k: usize| 1 + (j - 1) * n_angular + k % n_angular;
        let mut triangles = Vec::with_capacity(n_angular * (2 * n_radial - 1));
        for k in 0..n_angular {
            triangles.push([0, ring(1, k), ring(1, k + 1)]);
        }
        for j in 1..n_radial {
            for k in 0..n_angular {
                let (a, b) = (ring(j, k), ring(j, k + 1));
                let (c, d) = (ring(j + 1, k), ring(j + 1, k + 1));
                triangles.push([a, c, d]);
                triangles.push([a, d, b]);
            }
        }
        Ok(MeshArtifact {
            format,
            vertices,
            triangles,
        })
    }
}

/// `[g(z), h(z)]` by Gauss-Legendre on segments that shrink geometrically
/// toward `z`, where the integrands may be nearly singular.
fn graded_parts(z: Complex64) -> Result<[Complex64; 2]> {
    if !(z.norm() < 1.0) {
        return Err(Error::radius(z, 1.0));
    }
    let integrand = |w: Complex64| {
        let w2 = w * w;
        let p = 3.0 / (PI * (1.0 + w2 * w2 * w2));
        Ok([p, p * w2 * w2])
    };
    // Distance from z to the nearest pole bounds the useful grading depth.
    let gap = 1.0 - z.norm();
    let mut total = [czero(); 2];
    let mut a = 0.0;
    loop {
        let remaining = 1.0 - a;
        let b = if remaining * z.norm() <= gap.max(1e-3 * z.norm()) {
            1.0
        } else {
            a + 0.5 * remaining
        };
        let part = integrate_segment_multi(integrand, z * a, z * b, 1, NODES_PER_SEGMENT)?;
        total[0] += part[0];
        total[1] += part[1];
        if b == 1.0 {
            return Ok(total);
        }
        a = b;
    }
}

fn segment_distance(a: Complex64, b: Complex64, w: Complex64) -> f64 {
    let d = b - a;
    let t = (((w - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (w - (a + d * t)).norm()
}

fn polygon_distance(vertices: &[Complex64; 6], w: Complex64) -> f64 {
    (0..6)
        .map(|k| segment_distance(vertices[k], vertices[(k + 1) % 6], w))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Csv,
}

impl std::str::FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "csv" => Ok(MeshFormat::Csv),
            other => Err(Error::Parameter(format!("unknown mesh format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshVertex {
    pub r: f64,
    pub s: f64,
    pub u: f64,
    pub v: f64,
    pub t: f64,
}

/// Mesh of the hexagon graph; rendering is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshArtifact {
    pub format: MeshFormat,
    pub vertices: Vec<MeshVertex>,
    /// Zero-based vertex indices, counter-clockwise in the parameter disk.
    pub triangles: Vec<[usize; 3]>,
}

impl MeshArtifact {
    pub fn render(&self) -> String {
        let mut out = String::new();
        match self.format {
            MeshFormat::Obj => {
                out.push_str("# generalized Scherk surface over the regular hexagon\n");
                for v in &self.vertices {
                    writeln!(out, "v {:.11e} {:.11e} {:.11e}", v.u, v.v, v.t).unwrap();
                }
                for t in &self.triangles {
                    writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
                }
            }
            MeshFormat::Csv => {
                out.push_str("r,s,u,v,t\n");
                for v in &self.vertices {
                    writeln!(
                        out,
                        "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                        v.r, v.s, v.u, v.v, v.t
                    )
                    .unwrap();
                }
            }
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::FLAT_BOUND;
    use crate::analytic::RadialPath;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `g` and `h` through the logarithms of their partial fractions.
    fn parts_by_logs(z: Complex64) -> (Complex64, Complex64) {
        let mut g = czero();
        let mut h = czero();
        for k in 0..6 {
            let zeta = Complex64::from_polar(1.0, PI / 6.0 + k as f64 * PI / 3.0);
            let l = (1.0 - z / zeta).ln();
            g -= zeta * l / (2.0 * PI);
            h += l / (zeta * 2.0 * PI);
        }
        (g, h)
    }

    #[test]
    fn model_values_at_origin() {
        let m = build_hexagon();
        let p0 = m.data().p_value(czero()).unwrap();
        assert!((p0 - c(3.0 / PI, 0.0)).norm() < 1e-15);
        let q = m.data().q().jet(czero(), 2).unwrap();
        assert_eq!(q, vec![czero(), czero(), c(2.0, 0.0)]);
        assert!(m.data().is_mirrored());
    }

    #[test]
    fn series_match_logarithmic_closed_form() {
        let m = build_hexagon();
        for z in [c(0.5, 0.0), c(0.3, 0.6), c(-0.9, 0.2)] {
            let (g, h) = parts_by_logs(z);
            assert!((m.g_series().value(z).unwrap() - g).norm() < 1e-12);
            assert!((m.h_series().value(z).unwrap() - h).norm() < 1e-12);
        }
        let oracle: f64 = (0..30)
            .map(|k| (-1f64).powi(k) * 0.5f64.powi(6 * k + 1) / (6 * k + 1) as f64)
            .sum::<f64>()
            * 3.0
            / PI;
        assert!((m.g_series().value(c(0.5, 0.0)).unwrap().re - oracle).abs() < 1e-15);
    }

    #[test]
    fn graded_quadrature_reaches_the_boundary() {
        for z in [
            c(0.2, 0.1),
            Complex64::from_polar(0.999, 0.3),
            Complex64::from_polar(LIMIT_RADIUS, PI / 6.0 + 1e-3),
        ] {
            let [g, h] = graded_parts(z).unwrap();
            let (gl, hl) = parts_by_logs(z);
            assert!((g - gl).norm() < 1e-11, "{z}: {g} vs {gl}");
            assert!((h - hl).norm() < 1e-11, "{z}: {h} vs {hl}");
        }
    }

    #[test]
    fn omega_of_the_series_is_z4() {
        let m = build_hexagon();
        for z in crate::weierstrass::disk_samples(50, 0.95) {
            let a = m.g_series().eval_jet(z, 1).unwrap()[1];
            let b = m.h_series().eval_jet(z, 1).unwrap()[1];
            let w = z * z * z * z;
            assert!((b / a - w).norm() <= 1e-12 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn height_values() {
        assert_eq!(height(c(0.7, 0.0)).unwrap(), 0.0);
        let r: f64 = 0.5;
        let z = Complex64::from_polar(r, PI / 6.0);
        let expected = ((1.0 - r.powi(3)) / (1.0 + r.powi(3))).ln() / PI;
        assert!((height(z).unwrap() - expected).abs() < 1e-15);
        assert!(height(c(1.0, 0.0)).is_err());
        let m = build_hexagon();
        let z = Complex64::from_polar(0.6, 0.4);
        let t = m
            .data()
            .surface_point(z, &RadialPath::new(z))
            .unwrap()
            .position[2];
        assert!((t - height(z).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn vertices_lie_on_the_unit_circle() {
        let m = build_hexagon();
        let v = m.vertices().unwrap();
        for (k, vk) in v.iter().enumerate() {
            let ideal = Complex64::from_polar(1.0, k as f64 * PI / 3.0);
            assert!((vk - ideal).norm() < 1e-2, "vertex {k}: {vk}");
            assert!((vk.norm() - 1.0).abs() < 1e-2);
        }
    }

    #[test]
    fn boundary_images_hug_the_hexagon() {
        let m = build_hexagon();
        let geometry = m.boundary_geometry(96).unwrap();
        assert!(geometry.max_distance < 0.01, "{}", geometry.max_distance);
        // rotation by pi/3 permutes samples when 6 divides the count
        let n = geometry.samples.len();
        let rot = Complex64::from_polar(1.0, PI / 3.0);
        for (i, s) in geometry.samples.iter().enumerate() {
            let t = geometry.samples[(i + n / 6) % n];
            let a = c(s.image[0], s.image[1]) * rot;
            assert!((a - c(t.image[0], t.image[1])).norm() < 1e-10);
        }
    }

    #[test]
    fn six_fold_equivariance() {
        let m = build_hexagon();
        let rot = Complex64::from_polar(1.0, PI / 3.0);
        for z in crate::weierstrass::disk_samples(20, 0.9) {
            let a = m.projection(rot * z).unwrap();
            let b = rot * m.projection(z).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn mesh_counts_and_symmetry() {
        let m = build_hexagon();
        let mesh = m.export_mesh(2, 6, 0.5, MeshFormat::Obj).unwrap();
        assert_eq!(mesh.vertices.len(), 13);
        assert_eq!(mesh.triangles.len(), 18);
        let text = mesh.render();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 13);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 18);
        assert_eq!(
            text,
            m.export_mesh(2, 6, 0.5, MeshFormat::Obj).unwrap().render()
        );
        for v in &mesh.vertices {
            assert!(v.t.abs() < 1e-15);
        }
        let mesh = m.export_mesh(3, 12, 0.9, MeshFormat::Csv).unwrap();
        for j in 1..=3 {
            for k in 1..6 {
                let a = mesh.vertices[1 + (j - 1) * 12 + k].t;
                let b = mesh.vertices[1 + (j - 1) * 12 + (12 - k)].t;
                assert!((a + b).abs() < 1e-14);
            }
        }
        assert!(mesh.render().starts_with("r,s,u,v,t\n"));
    }

    #[test]
    fn report_is_annotated_extremal() {
        let r = build_hexagon().kpp_report().unwrap();
        assert!((r.kpp_closed + FLAT_BOUND.value()).abs() <= 1e-12 * FLAT_BOUND.value());
        assert!(r.annotations.iter().any(|a| a == EXTREMAL_ANNOTATION));
        assert!(r.violations().is_empty());
    }
}
