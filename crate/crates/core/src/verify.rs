//! Self-verification suite: named numerical checks, each a measured quantity
//! compared against a tolerance (`measured <= tolerance`).
//!
//! Checks run concurrently and are reported in name order. Every random draw
//! comes from a ChaCha stream keyed by the seed and the check, so a seed
//! fixes the summary byte for byte. Tolerances can be overridden per check
//! through `FLATPOINT_TOL_<NAME>` (name upper-cased).

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::AnalyticFunction;
use crate::bounds::{
    hall_bound_check, schwarz_bound_check, CurvatureReport, FLAT_BOUND, GENERAL_BOUND,
};
use crate::error::{Error, Result};
use crate::hexagon::{self, build_hexagon, HexagonModel, EXTREMAL_ANNOTATION};
use crate::jets::{
    close_third_jet, direction_profile, flat_point_jet, kpp_general, numeric_jet, SurfaceJet,
};
use crate::rkc::{
    self, analytic_parts, boundary_reproduction_error, boundary_trace, concentration_spec,
    family_report_with, parts_from_samples, seeded_batch, spectral_leakage, validate_diffeo,
    weierstrass_from_parts, weierstrass_from_parts_unchecked, BoundaryCorrespondence,
    CorrespondenceSpec, Target, DEFAULT_MODES,
};
use crate::weierstrass::WeierstrassData;

/// Number of admissible instances in the randomized bound suite.
pub const BATCH_SIZE: usize = 200;

/// Prefix of the environment variables overriding tolerances.
pub const TOLERANCE_ENV_PREFIX: &str = "FLATPOINT_TOL_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    /// `None` when the check could not be evaluated.
    pub measured: Option<f64>,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexagonSummary {
    pub kpp_closed: f64,
    pub margin_flat: f64,
    pub annotations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub hexagon: Option<HexagonSummary>,
    pub checks: Vec<Check>,
}

impl VerifySummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Per-check tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        VerifyConfig {
            seed,
            tolerances: BTreeMap::new(),
        }
    }

    /// Adds overrides from `FLATPOINT_TOL_<NAME>` variables.
    pub fn with_env_overrides(mut self) -> Result<Self> {
        for (key, value) in std::env::vars() {
            let Some(name) = key.strip_prefix(TOLERANCE_ENV_PREFIX) else {
                continue;
            };
            let name = name.to_ascii_lowercase();
            if !CHECKS.iter().any(|c| c.name == name) {
                return Err(Error::Parameter(format!("{key} names no known check")));
            }
            let tol: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("{key}={value} is not a number")))?;
            if !(tol >= 0.0) {
                return Err(Error::Parameter(format!(
                    "{key}={value} must be non-negative"
                )));
            }
            self.tolerances.insert(name, tol);
        }
        Ok(self)
    }

    fn tolerance(&self, spec: &CheckSpec) -> f64 {
        self.tolerances
            .get(spec.name)
            .copied()
            .unwrap_or(spec.tolerance)
    }
}

struct Context {
    seed: u64,
    hexagon: HexagonModel,
}

impl Context {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

type Measure = fn(&Context) -> Result<(f64, String)>;

struct CheckSpec {
    name: &'static str,
    tolerance: f64,
    measure: Measure,
}

const CHECKS: &[CheckSpec] = &[
    CheckSpec {
        name: "bound_ordering",
        tolerance: 0.0,
        measure: bound_ordering,
    },
    CheckSpec {
        name: "flat_point_identity",
        tolerance: 1e-4,
        measure: flat_point_identity,
    },
    CheckSpec {
        name: "gradient_fd",
        tolerance: 1e-7,
        measure: gradient_fd,
    },
    CheckSpec {
        name: "hall_bound",
        tolerance: 0.0,
        measure: hall_bound,
    },
    CheckSpec {
        name: "height_closed_form",
        tolerance: 1e-10,
        measure: height_closed_form,
    },
    CheckSpec {
        name: "hexagon_boundary_distance",
        tolerance: 1e-2,
        measure: hexagon_boundary_distance,
    },
    CheckSpec {
        name: "hexagon_closed_form",
        tolerance: 1e-12,
        measure: hexagon_closed_form,
    },
    CheckSpec {
        name: "hexagon_diffeo",
        tolerance: 0.0,
        measure: hexagon_diffeo,
    },
    CheckSpec {
        name: "hexagon_direction_spread",
        tolerance: 1e-6,
        measure: hexagon_direction_spread,
    },
    CheckSpec {
        name: "hexagon_margin_flat",
        tolerance: 1e-10,
        measure: hexagon_margin_flat,
    },
    CheckSpec {
        name: "hexagon_numeric_limit",
        tolerance: 1e-3,
        measure: hexagon_numeric_limit,
    },
    CheckSpec {
        name: "hexagon_omega",
        tolerance: 1e-12,
        measure: hexagon_omega,
    },
    CheckSpec {
        name: "hexagon_vertices",
        tolerance: 1e-6,
        measure: hexagon_vertices,
    },
    CheckSpec {
        name: "hypergeometric_derivative",
        tolerance: 1e-10,
        measure: hypergeometric_derivative,
    },
    CheckSpec {
        name: "lemma_direction_independence",
        tolerance: 1e-9,
        measure: lemma_direction_independence,
    },
    CheckSpec {
        name: "lemma_numeric_agreement",
        tolerance: 1e-4,
        measure: lemma_numeric_agreement,
    },
    CheckSpec {
        name: "newton_round_trip",
        tolerance: 1e-10,
        measure: newton_round_trip,
    },
    CheckSpec {
        name: "pde_residual",
        tolerance: 1e-6,
        measure: pde_residual,
    },
    CheckSpec {
        name: "rkc_batch_violations",
        tolerance: 0.0,
        measure: rkc_batch_violations,
    },
    CheckSpec {
        name: "rkc_concentration_family",
        tolerance: 0.0,
        measure: rkc_concentration_family,
    },
    CheckSpec {
        name: "rkc_hexagon_limit",
        tolerance: 1e-3,
        measure: rkc_hexagon_limit,
    },
    CheckSpec {
        name: "rkc_negative_controls",
        tolerance: 0.0,
        measure: rkc_negative_controls,
    },
    CheckSpec {
        name: "rkc_round_trip",
        tolerance: 1e-6,
        measure: rkc_round_trip,
    },
    CheckSpec {
        name: "rkc_spectral_support",
        tolerance: 1e-12,
        measure: rkc_spectral_support,
    },
    CheckSpec {
        name: "schwarz_equality",
        tolerance: 1e-12,
        measure: schwarz_equality,
    },
    CheckSpec {
        name: "schwarz_random",
        tolerance: 0.0,
        measure: schwarz_random,
    },
    CheckSpec {
        name: "third_jet_closure",
        tolerance: 1e-12,
        measure: third_jet_closure,
    },
    CheckSpec {
        name: "third_jet_fd",
        tolerance: 1e-4,
        measure: third_jet_fd,
    },
];

/// Names of all checks, in report order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Runs every check.
pub fn run_verify(config: &VerifyConfig) -> VerifySummary {
    run_selected(config, |_| true)
}

/// Runs the checks whose names satisfy `select`.
pub fn run_selected(config: &VerifyConfig, select: impl Fn(&str) -> bool + Sync) -> VerifySummary {
    let ctx = Context {
        seed: config.seed,
        hexagon: build_hexagon(),
    };
    let mut checks: Vec<Check> = CHECKS
        .par_iter()
        .filter(|spec| select(spec.name))
        .map(|spec| {
            let tolerance = config.tolerance(spec);
            match (spec.measure)(&ctx) {
                Ok((measured, detail)) => Check {
                    name: spec.name.to_string(),
                    tolerance,
                    measured: Some(measured),
                    pass: measured <= tolerance,
                    detail,
                },
                Err(e) => Check {
                    name: spec.name.to_string(),
                    tolerance,
                    measured: None,
                    pass: false,
                    detail: e.to_string(),
                },
            }
        })
        .collect();
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = checks.iter().filter(|c| c.pass).count();
    let hexagon = ctx.hexagon.kpp_report().ok().map(|r| HexagonSummary {
        kpp_closed: r.kpp_closed,
        margin_flat: r.margin_flat.unwrap_or(f64::NAN),
        annotations: r.annotations.clone(),
    });
    VerifySummary {
        seed: config.seed,
        passed,
        failed: checks.len() - passed,
        hexagon,
        checks,
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Uniform points of the disk `|z| <= radius`.
fn random_points(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI))
        })
        .collect()
}

/// `p = 1`, `q = 0.3 + z^2`: flat centre with tilted tangent plane.
pub fn tilted_datum() -> Result<WeierstrassData> {
    WeierstrassData::new(
        AnalyticFunction::constant(c(1.0, 0.0)),
        AnalyticFunction::polynomial(vec![c(0.3, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
        0.8,
    )
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn bound_ordering(_: &Context) -> Result<(f64, String)> {
    let (flat, general) = (FLAT_BOUND.value(), GENERAL_BOUND.value());
    Ok((
        if flat < general { 0.0 } else { 1.0 },
        format!(
            "{} = {flat} < {} = {general}",
            FLAT_BOUND.expression, GENERAL_BOUND.expression
        ),
    ))
}

fn hexagon_closed_form(ctx: &Context) -> Result<(f64, String)> {
    let r = ctx.hexagon.kpp_report()?;
    Ok((
        relative(r.kpp_magnitude(), FLAT_BOUND.value()),
        format!("|K''| = {}", r.kpp_magnitude()),
    ))
}

fn hexagon_numeric_limit(ctx: &Context) -> Result<(f64, String)> {
    let n = crate::bounds::kpp_numeric(ctx.hexagon.data())?;
    Ok((
        relative(n.value.abs(), FLAT_BOUND.value()),
        format!("Richardson limit {}", n.value),
    ))
}

fn hexagon_direction_spread(ctx: &Context) -> Result<(f64, String)> {
    let n = crate::bounds::kpp_numeric(ctx.hexagon.data())?;
    Ok((n.spread, format!("{} directions", n.directional.len())))
}

fn hexagon_margin_flat(ctx: &Context) -> Result<(f64, String)> {
    let r = ctx.hexagon.kpp_report()?;
    let margin = r
        .margin_flat
        .ok_or_else(|| Error::Premise("hexagon centre not recognized as flat".into()))?;
    let annotated = r.annotations.iter().any(|a| a == EXTREMAL_ANNOTATION);
    if !annotated {
        return Err(Error::Premise(
            "hexagon report lacks the extremal annotation".into(),
        ));
    }
    Ok((
        margin.abs() / FLAT_BOUND.value(),
        format!("margin_flat = {margin:e}, annotated extremal"),
    ))
}

fn hexagon_omega(ctx: &Context) -> Result<(f64, String)> {
    let (g1, h1) = (
        ctx.hexagon.g_series().derivative(),
        ctx.hexagon.h_series().derivative(),
    );
    let mut rng = ctx.rng(1);
    let worst = random_points(&mut rng, 200, hexagon::SERIES_RADIUS)
        .into_iter()
        .map(|z| Ok((h1.value(z)? / g1.value(z)? - z.powu(4)).norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok((max_of(worst), "h'/g' - z^4 on |z| <= 0.95".into()))
}

fn hexagon_vertices(ctx: &Context) -> Result<(f64, String)> {
    let v = ctx.hexagon.vertices()?;
    let worst = max_of(
        v.iter()
            .enumerate()
            .map(|(k, x)| (x - Complex64::from_polar(1.0, k as f64 * PI / 3.0)).norm()),
    );
    Ok((
        worst,
        "distance of boundary-arc images from e^{ik pi/3}".into(),
    ))
}

fn hexagon_boundary_distance(ctx: &Context) -> Result<(f64, String)> {
    let g = ctx.hexagon.boundary_geometry(240)?;
    Ok((
        g.max_distance,
        "distance of f(0.999 e^{is}) from the hexagon".into(),
    ))
}

fn hexagon_diffeo(ctx: &Context) -> Result<(f64, String)> {
    let d = validate_diffeo(ctx.hexagon.data(), 64)?;
    Ok((
        if d.ok { 0.0 } else { 1.0 },
        format!("min Jacobian {:e}", d.min_jacobian),
    ))
}

fn hypergeometric_derivative(ctx: &Context) -> Result<(f64, String)> {
    let g1 = ctx.hexagon.g_series().derivative();
    let mut rng = ctx.rng(2);
    let worst = random_points(&mut rng, 1000, hexagon::SERIES_RADIUS)
        .into_iter()
        .map(|z| {
            let exact = 3.0 / (PI * (1.0 + z.powu(6)));
            Ok((g1.value(z)? - exact).norm())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((max_of(worst), "g' - 3/(pi(1+z^6)) at 1000 points".into()))
}

fn height_closed_form(ctx: &Context) -> Result<(f64, String)> {
    let data = ctx.hexagon.data();
    let mut rng = ctx.rng(3);
    let worst = random_points(&mut rng, 100, 0.95)
        .into_iter()
        .map(|z| Ok((data.height(z)? - hexagon::height(z)?).abs()))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        max_of(worst),
        "quadrature vs closed-form height at 100 points".into(),
    ))
}

/// Interior points for the finite-difference checks on the hexagon graph.
fn fd_points(ctx: &Context, stream: u64) -> Vec<Complex64> {
    let mut rng = ctx.rng(stream);
    random_points(&mut rng, 100, 0.8)
}

fn pde_residual(ctx: &Context) -> Result<(f64, String)> {
    let data = ctx.hexagon.data();
    let worst = fd_points(ctx, 4)
        .par_iter()
        .map(|&z| Ok(numeric_jet(data, z)?.jet.pde_residual().abs()))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        max_of(worst),
        "finite-difference residual at 100 points".into(),
    ))
}

fn gradient_fd(ctx: &Context) -> Result<(f64, String)> {
    let data = ctx.hexagon.data();
    let worst = fd_points(ctx, 5)
        .into_iter()
        .take(20)
        .map(|z| {
            let fd = numeric_jet(data, z)?.jet;
            let (f_u, f_v) = data.gradient_f(z)?;
            Ok((fd.f_u - f_u).abs().max((fd.f_v - f_v).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        max_of(worst),
        "analytic vs finite-difference gradient".into(),
    ))
}

fn newton_round_trip(ctx: &Context) -> Result<(f64, String)> {
    let data = ctx.hexagon.data();
    let mut rng = ctx.rng(6);
    // |f(z)| stays inside the Newton trust radius 0.5 |p(0)| for |z| <= 0.45.
    let worst = random_points(&mut rng, 100, 0.45)
        .into_iter()
        .map(|z| Ok((data.invert_projection(data.projection(z)?)? - z).norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok((max_of(worst), "|f^{-1}(f(z)) - z|".into()))
}

fn flat_point_identity(ctx: &Context) -> Result<(f64, String)> {
    let jet = numeric_jet(ctx.hexagon.data(), c(0.0, 0.0))?.jet;
    let sum = jet.f_uuu * jet.f_uuu + jet.f_vvv * jet.f_vvv;
    let kpp = ctx.hexagon.kpp_report()?.kpp_magnitude();
    Ok((
        relative(sum, kpp),
        format!("f_uuu^2 + f_vvv^2 = {sum} against |K''| = {kpp}"),
    ))
}

fn lemma_numeric_agreement(_: &Context) -> Result<(f64, String)> {
    let data = tilted_datum()?;
    let general = kpp_general(&flat_point_jet(&data, c(0.0, 0.0))?)?;
    let numeric = crate::bounds::kpp_numeric(&data)?.value;
    Ok((
        relative(numeric, general),
        format!("closed {general}, numeric {numeric}"),
    ))
}

fn lemma_direction_independence(_: &Context) -> Result<(f64, String)> {
    let jet = flat_point_jet(&tilted_datum()?, c(0.0, 0.0))?;
    let r: Vec<f64> = (0..64)
        .map(|k| Ok(direction_profile(&jet, k as f64 * PI / 32.0)?.r))
        .collect::<Result<_>>()?;
    let (lo, hi) = r
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    Ok((
        (hi - lo) / hi.abs().max(lo.abs()),
        format!("R(t) in [{lo}, {hi}]"),
    ))
}

fn third_jet_closure(ctx: &Context) -> Result<(f64, String)> {
    let mut rng = ctx.rng(7);
    let mut worst: f64 = 0.0;
    let mut evaluated = 0;
    while evaluated < 1000 {
        let (f_u, f_v) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let (a, b) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let jet = match SurfaceJet::flat(f_u, f_v, a, b) {
            Ok(jet) => jet,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        let (du, dv) = jet.differentiated_pde_residuals();
        let scale = (1.0 + f_u * f_u + f_v * f_v) * (1.0 + a.abs().max(b.abs()));
        worst = worst.max(du.abs().max(dv.abs()) / scale);
        evaluated += 1;
    }
    Ok((worst, "scaled residuals over 1000 slope pairs".into()))
}

fn third_jet_fd(ctx: &Context) -> Result<(f64, String)> {
    let fd = numeric_jet(ctx.hexagon.data(), c(0.0, 0.0))?.jet;
    let (f_uvv, f_uuv) = close_third_jet(fd.f_u, fd.f_v, fd.f_uuu, fd.f_vvv)?;
    Ok((
        (f_uvv - fd.f_uvv).abs().max((f_uuv - fd.f_uuv).abs()),
        format!("closed ({f_uvv}, {f_uuv}), FD ({}, {})", fd.f_uvv, fd.f_uuv),
    ))
}

fn schwarz_equality(_: &Context) -> Result<(f64, String)> {
    let check = schwarz_bound_check(&AnalyticFunction::monomial(c(1.0, 0.0), 2))?;
    Ok(((check.rhs - check.lhs).abs(), "q = z^2".into()))
}

/// `q = M_c(z^2 B_a(z))` with a Blaschke factor `B_a` and the disk
/// automorphism `M_c(w) = (w + c)/(1 + conj(c) w)`: a self-map of the disk
/// with `q(0) = c`, `q'(0) = 0`, `|q''(0)| = 2 |a| (1 - |c|^2)`.
pub fn schwarz_pick_map(a: Complex64, rotation: f64, c0: Complex64) -> Result<AnalyticFunction> {
    let e = Complex64::from_polar(1.0, rotation);
    // z^2 B_a = e z^2 (z - a) / (1 - conj(a) z)
    let numerator = vec![c0, -c0 * a.conj(), -e * a, e];
    let denominator = vec![c(1.0, 0.0), -a.conj(), -e * a * c0.conj(), e * c0.conj()];
    AnalyticFunction::rational(numerator, denominator, 1.0)
}

fn schwarz_random(ctx: &Context) -> Result<(f64, String)> {
    let mut rng = ctx.rng(8);
    let mut failures = 0;
    let mut tightest: f64 = 0.0;
    for _ in 0..50 {
        let a = Complex64::from_polar(0.95 * rng.random::<f64>(), rng.random_range(0.0..2.0 * PI));
        let c0 = Complex64::from_polar(0.9 * rng.random::<f64>(), rng.random_range(0.0..2.0 * PI));
        let q = schwarz_pick_map(a, rng.random_range(0.0..2.0 * PI), c0)?;
        let check = schwarz_bound_check(&q)?;
        if !(check.lhs < check.rhs) {
            failures += 1;
        }
        tightest = tightest.max(check.lhs / check.rhs);
    }
    Ok((
        failures as f64,
        format!("50 maps, largest lhs/rhs {tightest}"),
    ))
}

fn rkc_batch_violations(ctx: &Context) -> Result<(f64, String)> {
    let batch = seeded_batch(ctx.seed, BATCH_SIZE, true);
    Ok((
        batch.violations.len() as f64,
        format!(
            "{} admissible, {} rejected, max |K''| flat {} general {}",
            batch.admissible, batch.rejected, batch.max_kpp_flat, batch.max_kpp_general
        ),
    ))
}

fn hall_failures(reports: &[CurvatureReport]) -> usize {
    reports
        .iter()
        .filter(|r| {
            let q0 = c(r.q0[0], r.q0[1]);
            !hall_bound_check(c(r.p0[0], r.p0[1]), q0).ok
        })
        .count()
}

fn rkc_report_list(seed: u64) -> Vec<CurvatureReport> {
    seeded_batch(seed, BATCH_SIZE, false)
        .instances
        .into_iter()
        .filter_map(|i| i.report)
        .collect()
}

fn hall_bound(ctx: &Context) -> Result<(f64, String)> {
    let mut reports = rkc_report_list(ctx.seed);
    for lambda in CONCENTRATION_GRID {
        let bc = BoundaryCorrespondence::new(concentration_spec(lambda, Target::Disk))?;
        reports.push(family_report_with(&bc, false)?);
    }
    Ok((
        hall_failures(&reports) as f64,
        format!("{} disk-target instances", reports.len()),
    ))
}

const CONCENTRATION_GRID: [f64; 8] = [0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.99, 0.999];

fn rkc_concentration_family(_: &Context) -> Result<(f64, String)> {
    let mut failures = 0;
    let mut previous = 0.0;
    let mut last = 0.0;
    for lambda in CONCENTRATION_GRID {
        let bc = BoundaryCorrespondence::new(concentration_spec(lambda, Target::Disk))?;
        let r = family_report_with(&bc, false)?;
        let kpp = r.kpp_magnitude();
        let margin = r.margin_flat.unwrap_or(f64::NEG_INFINITY);
        if kpp < previous || !(margin > 0.0) || !r.violations().is_empty() {
            failures += 1;
        }
        previous = kpp;
        last = kpp;
    }
    Ok((
        failures as f64,
        format!(
            "|K''| rises to {last} at lambda = 0.999 (bound {})",
            FLAT_BOUND.value()
        ),
    ))
}

fn rkc_hexagon_limit(_: &Context) -> Result<(f64, String)> {
    let bc = BoundaryCorrespondence::new(concentration_spec(0.999, Target::Hexagon))?;
    let (a, _) = analytic_parts(&bc, DEFAULT_MODES)?;
    let a1 = a.coefficients()[1];
    Ok(((a1 - 3.0 / PI).norm(), format!("A'(0) = {a1} against 3/pi")))
}

fn rkc_round_trip(ctx: &Context) -> Result<(f64, String)> {
    let mut worst: f64 = 0.0;
    for index in 0..4 {
        let bc = BoundaryCorrespondence::new(rkc::random_spec(ctx.seed, index))?;
        let (a, b) = analytic_parts(&bc, 1024)?;
        worst = worst.max(boundary_reproduction_error(&bc, &a, &b)?);
        let (a2, b2) = parts_from_samples(&boundary_trace(&a, &b, rkc::SAMPLES)?, 1024)?;
        for (x, y) in [(&a, &a2), (&b, &b2)] {
            let n = x.coefficients().len().max(y.coefficients().len());
            for k in 0..n {
                let u = x.coefficients().get(k).copied().unwrap_or_default();
                let v = y.coefficients().get(k).copied().unwrap_or_default();
                worst = worst.max((u - v).norm());
            }
        }
    }
    Ok((
        worst,
        "boundary reproduction and coefficient round trip".into(),
    ))
}

fn rkc_spectral_support(_: &Context) -> Result<(f64, String)> {
    let spec = CorrespondenceSpec {
        target: Target::Disk,
        epsilons: vec![0.05, -0.02],
        deltas: vec![0.3, 1.1],
        symmetry_order: 6,
        concentration: 0.0,
    };
    let bc = BoundaryCorrespondence::new(spec)?;
    let leak = spectral_leakage(&bc, 1000)?;
    let (a, b) = analytic_parts(&bc, 1000)?;
    let data = weierstrass_from_parts(&a, &b)?;
    let q = data.q_jet(c(0.0, 0.0), 1)?;
    Ok((
        leak.max(q[0].norm()).max(q[1].norm()),
        "forbidden exponents and q(0), q'(0) for a 6-fold correspondence".into(),
    ))
}

fn rkc_negative_controls(_: &Context) -> Result<(f64, String)> {
    let mut failures = 0;
    let odd = BoundaryCorrespondence::new(CorrespondenceSpec {
        target: Target::Disk,
        epsilons: vec![0.1],
        deltas: vec![0.0],
        symmetry_order: 3,
        concentration: 0.0,
    })?;
    let (a, b) = analytic_parts(&odd, 512)?;
    if !matches!(
        weierstrass_from_parts(&a, &b),
        Err(Error::OddVanishingOrder(_))
    ) {
        failures += 1;
    }
    let folded = CorrespondenceSpec {
        target: Target::Disk,
        epsilons: vec![0.3],
        deltas: vec![0.0],
        symmetry_order: 6,
        concentration: 0.0,
    };
    if BoundaryCorrespondence::new(folded.clone()).is_ok() {
        failures += 1;
    }
    let bc = BoundaryCorrespondence::new_unchecked(folded)?;
    let (a, b) = analytic_parts(&bc, 1024)?;
    if validate_diffeo(&weierstrass_from_parts_unchecked(&a, &b)?, 64)?.ok {
        failures += 1;
    }
    Ok((
        failures as f64,
        "odd symmetry and folded correspondence rejected".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_sorted_and_unique() {
        let names = check_names();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted);
    }

    #[test]
    fn schwarz_pick_maps_have_the_stated_jet() {
        let (a, c0) = (c(0.3, -0.4), c(0.2, 0.5));
        let q = schwarz_pick_map(a, 0.7, c0).unwrap();
        let jet = q.jet(c(0.0, 0.0), 2).unwrap();
        assert!((jet[0] - c0).norm() < 1e-15);
        assert!(jet[1].norm() < 1e-15);
        assert!((jet[2].norm() - 2.0 * a.norm() * (1.0 - c0.norm_sqr())).abs() < 1e-14);
        for z in [c(0.99, 0.0), c(0.0, -0.99), c(-0.7, 0.7)] {
            assert!(q.value(z).unwrap().norm() < 1.0);
        }
    }

    #[test]
    fn quick_checks_pass() {
        let cfg = VerifyConfig::new(7);
        let summary = run_selected(&cfg, |n| {
            n.starts_with("hexagon_closed") || n.starts_with("schwarz") || n == "bound_ordering"
        });
        assert_eq!(summary.checks.len(), 4);
        assert!(summary.all_passed(), "{:#?}", summary.checks);
        assert!(summary
            .hexagon
            .unwrap()
            .annotations
            .iter()
            .any(|a| a == EXTREMAL_ANNOTATION));
    }

    #[test]
    fn overrides_replace_defaults() {
        let mut cfg = VerifyConfig::new(1);
        cfg.tolerances.insert("schwarz_equality".into(), 0.5);
        let s = run_selected(&cfg, |n| n == "schwarz_equality");
        assert_eq!(s.checks[0].tolerance, 0.5);
    }
}
