//! `K''` at the centre of a minimal graph over the disk and the bounds it
//! is compared against.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::AnalyticFunction;
use crate::error::{Error, Result};
use crate::extrapolate::richardson;
use crate::weierstrass::WeierstrassData;

/// A constant of the form `numerator * pi^pi_power / denominator`, kept
/// symbolic until it is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstant {
    pub name: &'static str,
    pub expression: &'static str,
    numerator: f64,
    pi_power: i32,
    denominator: f64,
}

impl BoundConstant {
    pub fn value(&self) -> f64 {
        self.numerator * PI.powi(self.pi_power) / self.denominator
    }

    pub fn record(&self) -> ConstantRecord {
        ConstantRecord {
            name: self.name.to_string(),
            expression: self.expression.to_string(),
            value: self.value(),
        }
    }
}

/// Bound on `|K''|` at the centre of any minimal graph over the disk with
/// vanishing curvature there.
pub const GENERAL_BOUND: BoundConstant = BoundConstant {
    name: "general",
    expression: "256*pi^4/729",
    numerator: 256.0,
    pi_power: 4,
    denominator: 729.0,
};

/// Sharp bound on `|K''|` when additionally the tangent plane at the centre
/// is horizontal (`q(0) = 0`).
pub const FLAT_BOUND: BoundConstant = BoundConstant {
    name: "flat",
    expression: "16*pi^4/81",
    numerator: 16.0,
    pi_power: 4,
    denominator: 81.0,
};

/// Constant in the lower bound `|p(0)|^2 (1 + |q(0)|^4) >= 27/(4 pi^2)` for
/// harmonic diffeomorphisms of the disk onto itself.
pub const HALL_CONSTANT: BoundConstant = BoundConstant {
    name: "hall",
    expression: "27/(4*pi^2)",
    numerator: 27.0,
    pi_power: -2,
    denominator: 4.0,
};

/// Serialized form of a [`BoundConstant`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRecord {
    pub name: String,
    pub expression: String,
    pub value: f64,
}

/// Slack allowed in the comparisons of the bound checks.
pub const CHECK_SLACK: f64 = 1e-12;
/// `|q'(0)|` above which the centre is not a zero-curvature point.
pub const FLAT_CENTRE_TOLERANCE: f64 = 1e-10;
/// `|q(0)|` below which the tangent plane at the centre counts as horizontal.
pub const HORIZONTAL_TOLERANCE: f64 = 1e-12;
/// Accepted relative spread of the directional limits in [`kpp_numeric`].
pub const DIRECTION_SPREAD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// `|K''(O)| = 4 |q''(0)|^2 / (|p(0)|^4 (1 + |q(0)|^2)^6)`.
pub fn kpp_closed_form(p0: Complex64, q0: Complex64, q2: Complex64) -> Result<f64> {
    if p0.norm() == 0.0 {
        return Err(Error::Parameter("p(0) must not vanish".into()));
    }
    Ok(4.0 * q2.norm_sqr() / (p0.norm_sqr().powi(2) * (1.0 + q0.norm_sqr()).powi(6)))
}

/// `16 (1 - |q0|^2)^2 / (|p0|^4 (1 + |q0|^2)^6)`, the bound on `|K''(O)|`
/// obtained from the Schwarz-type estimate alone.
pub fn intermediate_bound(p0: Complex64, q0: Complex64) -> Result<f64> {
    kpp_closed_form(p0, q0, 2.0 * Complex64::new(1.0 - q0.norm_sqr(), 0.0))
}

/// `|q''(0)| <= 2 (1 - |q(0)|^2)` for a self-map `q` of the disk with
/// `q'(0) = 0`.
pub fn schwarz_bound_check(q: &AnalyticFunction) -> Result<BoundCheck> {
    let jet = q.jet(Complex64::new(0.0, 0.0), 2)?;
    if jet[1].norm() > FLAT_CENTRE_TOLERANCE {
        return Err(Error::Premise(format!(
            "q'(0) = {} does not vanish",
            jet[1]
        )));
    }
    let lhs = jet[2].norm();
    let rhs = 2.0 * (1.0 - jet[0].norm_sqr());
    Ok(BoundCheck {
        lhs,
        rhs,
        ok: lhs <= rhs + CHECK_SLACK,
    })
}

/// `|p0|^2 >= (27/(4 pi^2)) / (1 + |q0|^4)`; meaningful only for harmonic
/// diffeomorphisms of the disk onto the disk.
pub fn hall_bound_check(p0: Complex64, q0: Complex64) -> BoundCheck {
    let lhs = p0.norm_sqr();
    let rhs = HALL_CONSTANT.value() / (1.0 + q0.norm_sqr().powi(2));
    BoundCheck {
        lhs,
        rhs,
        ok: lhs >= rhs - CHECK_SLACK,
    }
}

/// Richardson limit of `K(w) / (|w|^2 + <grad f(w), w>^2)` at the centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericLimit {
    pub value: f64,
    /// Limits along the individual directions `e^{i k pi / 4}`.
    pub directional: Vec<f64>,
    /// `(max - min) / |mean|` over the directions.
    pub spread: f64,
}

pub const LIMIT_DIRECTIONS: usize = 8;
pub const LIMIT_LEVELS: usize = 7;

/// Numerical `K''` at the centre, over radii `2^-j r0` (`r0 = 0.05` times
/// the Newton trust radius) along eight directions.
pub fn kpp_numeric(data: &WeierstrassData) -> Result<NumericLimit> {
    let origin = Complex64::new(0.0, 0.0);
    let k0 = data.curvature(origin)?;
    if k0.abs() > FLAT_CENTRE_TOLERANCE {
        return Err(Error::Premise(format!(
            "curvature {k0:e} at the centre does not vanish"
        )));
    }
    let r0 = 0.05 * data.trust_radius()?;
    let radii: Vec<f64> = (0..LIMIT_LEVELS)
        .map(|j| r0 / 2f64.powi(j as i32))
        .collect();
    let w0 = data.projection(origin)?;
    let (p0, g0) = data.part_derivatives(origin)?;
    let linear_inverse =
        |w: Complex64| (p0.conj() * w - g0.conj() * w.conj()) / (p0.norm_sqr() - g0.norm_sqr());
    let directional: Vec<f64> = (0..LIMIT_DIRECTIONS)
        .into_par_iter()
        .map(|k| {
            let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / LIMIT_DIRECTIONS as f64);
            let mut values = Vec::with_capacity(LIMIT_LEVELS);
            for &r in &radii {
                let w = r * e;
                let z = data.invert_projection_from(w0 + w, linear_inverse(w))?;
                let (f_u, f_v) = data.gradient_f(z)?;
                let slope = f_u * w.re + f_v * w.im;
                values.push(data.curvature(z)? / (r * r + slope * slope));
            }
            Ok(richardson(&radii, &values, 1).value)
        })
        .collect::<Result<_>>()?;
    let mean = directional.iter().sum::<f64>() / directional.len() as f64;
    let (lo, hi) = directional
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let spread = if mean == 0.0 {
        hi - lo
    } else {
        (hi - lo) / mean.abs()
    };
    if spread > DIRECTION_SPREAD_TOLERANCE {
        return Err(Error::Premise(format!(
            "directional limits spread by {spread:e}; the limit is direction dependent"
        )));
    }
    Ok(NumericLimit {
        value: mean,
        directional,
        spread,
    })
}

/// Curvature at the centre, `K''` and its comparison with the bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    #[serde(rename = "K_at_origin")]
    pub k_at_origin: f64,
    pub p0: [f64; 2],
    pub q0: [f64; 2],
    pub q2: [f64; 2],
    /// Signed closed-form `K''(O)` (never positive).
    pub kpp_closed: f64,
    pub kpp_numeric: Option<f64>,
    pub kpp_numeric_spread: Option<f64>,
    pub schwarz_lhs: f64,
    pub schwarz_rhs: f64,
    /// Present when the datum is a diffeomorphism of the disk onto the disk.
    pub hall_lhs: Option<f64>,
    pub hall_rhs: Option<f64>,
    pub intermediate_bound: Option<f64>,
    pub margin_general: f64,
    /// Present when the tangent plane at the centre is horizontal.
    pub margin_flat: Option<f64>,
    pub constants: Vec<ConstantRecord>,
    pub annotations: Vec<String>,
}

/// How a report is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    /// Run [`kpp_numeric`] as a cross-check of the closed form.
    pub numeric: bool,
    /// The projection maps the disk onto the disk, so Hall's bound and the
    /// bound constants apply.
    pub disk_onto_disk: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            numeric: true,
            disk_onto_disk: false,
        }
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl CurvatureReport {
    pub fn for_data(data: &WeierstrassData, options: ReportOptions) -> Result<Self> {
        let origin = Complex64::new(0.0, 0.0);
        let k_at_origin = data.curvature(origin)?;
        let sign = if data.is_mirrored() { -1.0 } else { 1.0 };
        let q_jet = data.q_jet(origin, 2)?;
        if q_jet[1].norm() > FLAT_CENTRE_TOLERANCE {
            return Err(Error::Premise(format!(
                "q'(0) = {} does not vanish; the centre is not a zero-curvature point",
                q_jet[1]
            )));
        }
        let (q0, q2) = (q_jet[0] * sign, q_jet[2] * sign);
        let p0 = data.p_value(origin)?;
        let schwarz = schwarz_bound_check(data.q())?;
        let numeric = if options.numeric {
            Some(kpp_numeric(data)?)
        } else {
            None
        };
        let mut report = CurvatureReport {
            k_at_origin,
            p0: pair(p0),
            q0: pair(q0),
            q2: pair(q2),
            kpp_closed: -kpp_closed_form(p0, q0, q2)?,
            kpp_numeric: numeric.as_ref().map(|n| n.value),
            kpp_numeric_spread: numeric.as_ref().map(|n| n.spread),
            schwarz_lhs: schwarz.lhs,
            schwarz_rhs: schwarz.rhs,
            hall_lhs: None,
            hall_rhs: None,
            intermediate_bound: None,
            margin_general: 0.0,
            margin_flat: None,
            constants: vec![
                GENERAL_BOUND.record(),
                FLAT_BOUND.record(),
                HALL_CONSTANT.record(),
            ],
            annotations: Vec::new(),
        };
        if options.disk_onto_disk {
            let hall = hall_bound_check(p0, q0);
            report.hall_lhs = Some(hall.lhs);
            report.hall_rhs = Some(hall.rhs);
            report.intermediate_bound = Some(intermediate_bound(p0, q0)?);
        } else {
            report.annotate(
                "image is not the unit disk: Hall's bound and the bound constants are not premises",
            );
        }
        Ok(bound_margins(report))
    }

    pub fn annotate(&mut self, note: &str) {
        if !self.annotations.iter().any(|a| a == note) {
            self.annotations.push(note.to_string());
        }
    }

    pub fn kpp_magnitude(&self) -> f64 {
        self.kpp_closed.abs()
    }

    pub fn is_horizontal(&self) -> bool {
        Complex64::new(self.q0[0], self.q0[1]).norm() <= HORIZONTAL_TOLERANCE
    }

    /// Whether the bounds are premises of this datum (it is a harmonic
    /// diffeomorphism of the disk onto itself).
    pub fn bounds_apply(&self) -> bool {
        self.hall_lhs.is_some()
    }

    /// Failed comparisons among those whose premises hold.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.schwarz_lhs > self.schwarz_rhs + CHECK_SLACK {
            out.push(format!(
                "Schwarz-type bound: |q''(0)| = {} > {}",
                self.schwarz_lhs, self.schwarz_rhs
            ));
        }
        if !self.bounds_apply() {
            return out;
        }
        if let (Some(l), Some(r)) = (self.hall_lhs, self.hall_rhs) {
            if l < r - CHECK_SLACK {
                out.push(format!("Hall bound: |p(0)|^2 = {l} < {r}"));
            }
        }
        if let Some(b) = self.intermediate_bound {
            if self.kpp_magnitude() > b * (1.0 + CHECK_SLACK) {
                out.push(format!(
                    "intermediate bound: |K''| = {} > {b}",
                    self.kpp_magnitude()
                ));
            }
        }
        if self.margin_general <= 0.0 {
            out.push(format!(
                "general bound {}: margin {}",
                GENERAL_BOUND.expression, self.margin_general
            ));
        }
        if let Some(m) = self.margin_flat {
            if m <= 0.0 {
                out.push(format!("flat bound {}: margin {m}", FLAT_BOUND.expression));
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Fills in the margins of `|K''|` against the general and flat bounds.
pub fn bound_margins(mut report: CurvatureReport) -> CurvatureReport {
    let magnitude = report.kpp_magnitude();
    report.margin_general = GENERAL_BOUND.value() - magnitude;
    report.margin_flat = report
        .is_horizontal()
        .then(|| FLAT_BOUND.value() - magnitude);
    report
}
