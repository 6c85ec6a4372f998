//! Harmonic maps of the disk from boundary correspondences.
//!
//! A monotone correspondence `theta -> phi(theta)` composed with a convex
//! target curve gives boundary values whose harmonic extension is a
//! diffeomorphism onto the enclosed region (Rado-Kneser-Choquet). Its Fourier
//! coefficients split into the analytic parts `f = A + conj(B)`, from which
//! `p = A'` and `q = sqrt(B'/A')` follow.
//!
//! Correspondences come from the family
//!
//! ```text
//! phi(theta) = theta + sum_j eps_j sin(m j theta + delta_j)
//! ```
//!
//! optionally plus a sawtooth `-lambda saw(theta)` that flattens each arc
//! `|theta - k pi/3| < pi/6` towards `k pi/3`. Both commute with rotation by
//! `2 pi / m`. For `m = 6` this forces
//! `q(0) = q'(0) = 0`; for `m = 2`, `q'(0) = 0` with `q(0) != 0` in general;
//! odd `m` makes `B'/A'` vanish to odd order and the datum is rejected.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::analytic::{sqrt_branch, sqrt_branch_unchecked, AnalyticFunction};
use crate::bounds::{CurvatureReport, ReportOptions};
use crate::error::{Error, Result};
use crate::special::PowerSeries;
use crate::weierstrass::WeierstrassData;

/// Number of uniform boundary samples.
pub const SAMPLES: usize = 4096;
/// Working radius of generated Weierstrass data.
pub const WORKING_RADIUS: f64 = 0.99;
/// Fourier modes kept on each side by default.
pub const DEFAULT_MODES: usize = 2047;
/// Coefficients below this fraction of the largest are treated as zero.
const SPECTRAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// The unit circle.
    Disk,
    /// The regular hexagon with vertices `e^{i k pi/3}`.
    Hexagon,
}

impl Target {
    /// Point of the target curve in the direction `psi`.
    pub fn point(self, psi: f64) -> Complex64 {
        match self {
            Target::Disk => Complex64::from_polar(1.0, psi),
            Target::Hexagon => {
                let sector = PI / 3.0;
                let local = psi.rem_euclid(sector) - PI / 6.0;
                Complex64::from_polar((PI / 6.0).cos() / local.cos(), psi)
            }
        }
    }
}

/// Correspondence file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceSpec {
    pub target: Target,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub deltas: Vec<f64>,
    pub symmetry_order: usize,
    /// Weight `lambda` in `[0, 1)` of the sawtooth term.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub concentration: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// One-sided limits of `theta` minus the nearest multiple of `pi/3`; they
/// differ only on the jumps `pi/6 + k pi/3`.
fn sawtooth(theta: f64) -> (f64, f64) {
    let sector = PI / 3.0;
    let x = theta / sector;
    if (x - x.floor() - 0.5).abs() < 1e-12 {
        let below = x.floor() * sector;
        return (theta - below, theta - below - sector);
    }
    let s = theta - x.round() * sector;
    (s, s)
}

impl CorrespondenceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn delta(&self, j: usize) -> f64 {
        self.deltas.get(j).copied().unwrap_or(0.0)
    }

    /// `phi(theta)`, the midpoint of the one-sided limits at a jump.
    pub fn phi(&self, theta: f64) -> f64 {
        let (lo, hi) = self.phi_limits(theta);
        0.5 * (lo + hi)
    }

    /// Left and right limits of `phi` at `theta`.
    pub fn phi_limits(&self, theta: f64) -> (f64, f64) {
        let (left, right) = sawtooth(theta);
        let smooth = self.smooth_part(theta);
        (
            smooth - self.concentration * left,
            smooth - self.concentration * right,
        )
    }

    fn smooth_part(&self, theta: f64) -> f64 {
        let m = self.symmetry_order as f64;
        theta
            + self
                .epsilons
                .iter()
                .enumerate()
                .map(|(j, e)| e * (m * (j + 1) as f64 * theta + self.delta(j)).sin())
                .sum::<f64>()
    }

    /// `lambda + sum_j m j |eps_j|`; below 1 the correspondence is monotone.
    pub fn monotonicity_budget(&self) -> f64 {
        let m = self.symmetry_order as f64;
        self.concentration
            + self
                .epsilons
                .iter()
                .enumerate()
                .map(|(j, e)| m * (j + 1) as f64 * e.abs())
                .sum::<f64>()
    }
}

/// Monotone boundary correspondence sampled at [`SAMPLES`] uniform angles.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCorrespondence {
    spec: CorrespondenceSpec,
    phi: Vec<f64>,
}

impl BoundaryCorrespondence {
    /// Samples the family and checks strict monotonicity, total increase
    /// `2 pi` and the rotational symmetry.
    pub fn new(spec: CorrespondenceSpec) -> Result<Self> {
        let bc = Self::new_unchecked(spec)?;
        bc.validate()?;
        Ok(bc)
    }

    /// Samples the family without the monotonicity check, for negative
    /// controls.
    pub fn new_unchecked(spec: CorrespondenceSpec) -> Result<Self> {
        if spec.symmetry_order == 0 {
            return Err(Error::Parameter("symmetry order must be at least 1".into()));
        }
        if spec.deltas.len() > spec.epsilons.len() {
            return Err(Error::Parameter(format!(
                "{} phases given for {} amplitudes",
                spec.deltas.len(),
                spec.epsilons.len()
            )));
        }
        if spec
            .epsilons
            .iter()
            .chain(&spec.deltas)
            .chain([&spec.concentration])
            .any(|x| !x.is_finite())
        {
            return Err(Error::Parameter(
                "correspondence parameters must be finite".into(),
            ));
        }
        if !(0.0..1.0).contains(&spec.concentration) {
            return Err(Error::Parameter(format!(
                "concentration {} outside [0, 1)",
                spec.concentration
            )));
        }
        let phi = (0..SAMPLES)
            .map(|n| spec.phi(2.0 * PI * n as f64 / SAMPLES as f64))
            .collect();
        Ok(BoundaryCorrespondence { spec, phi })
    }

    pub fn identity(target: Target) -> Self {
        Self::new(CorrespondenceSpec {
            target,
            epsilons: Vec::new(),
            deltas: Vec::new(),
            symmetry_order: 1,
            concentration: 0.0,
        })
        .expect("identity correspondence is valid")
    }

    fn validate(&self) -> Result<()> {
        if self.spec.concentration != 0.0 && 6 % self.spec.symmetry_order != 0 {
            return Err(Error::Premise(format!(
                "the sawtooth term is not {}-fold symmetric",
                self.spec.symmetry_order
            )));
        }
        let wrap = self.phi[0] + 2.0 * PI;
        let increasing = self.phi.windows(2).all(|w| w[1] > w[0]) && wrap > self.phi[SAMPLES - 1];
        if !increasing {
            return Err(Error::Premise(
                "boundary correspondence is not strictly increasing".into(),
            ));
        }
        let period = 2.0 * PI / self.spec.symmetry_order as f64;
        for n in (0..SAMPLES).step_by(64) {
            let theta = 2.0 * PI * n as f64 / SAMPLES as f64;
            let shifted = self.spec.phi(theta + period) - period;
            if (shifted - self.phi[n]).abs() > 1e-12 {
                return Err(Error::Premise(format!(
                    "correspondence lacks the stated {}-fold symmetry",
                    self.spec.symmetry_order
                )));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &CorrespondenceSpec {
        &self.spec
    }

    pub fn target(&self) -> Target {
        self.spec.target
    }

    pub fn symmetry_order(&self) -> usize {
        self.spec.symmetry_order
    }

    pub fn phi_samples(&self) -> &[f64] {
        &self.phi
    }

    /// Boundary values `gamma(phi(theta_n))` on the target curve; at a jump
    /// of `phi` the mean of the two one-sided values, as the trapezoid rule
    /// requires.
    pub fn boundary_values(&self) -> Vec<Complex64> {
        let target = self.spec.target;
        (0..SAMPLES)
            .map(|n| {
                let (lo, hi) = self.spec.phi_limits(2.0 * PI * n as f64 / SAMPLES as f64);
                if lo == hi {
                    target.point(lo)
                } else {
                    0.5 * (target.point(lo) + target.point(hi))
                }
            })
            .collect()
    }
}

/// Fourier coefficients `(c_0..c_modes, c_{-1}..c_{-modes})` of uniform
/// samples of a closed curve.
fn fourier_coefficients(
    values: &[Complex64],
    modes: usize,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = values.len();
    if 2 * modes >= n {
        return Err(Error::Parameter(format!(
            "{modes} modes alias with {n} samples; at most {} are resolvable",
            n / 2 - 1
        )));
    }
    let mut buffer = values.to_vec();
    FftPlanner::<f64>::new()
        .plan_fft_forward(n)
        .process(&mut buffer);
    let scale = 1.0 / n as f64;
    let positive = (0..=modes).map(|k| buffer[k] * scale).collect();
    let negative = (1..=modes).map(|k| buffer[n - k] * scale).collect();
    Ok((positive, negative))
}

fn cleaned(mut coefficients: Vec<Complex64>, floor: f64) -> Vec<Complex64> {
    for c in coefficients.iter_mut() {
        if c.norm() <= floor {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    while coefficients.len() > 1 && coefficients.last().is_some_and(|c| c.norm() == 0.0) {
        coefficients.pop();
    }
    coefficients
}

/// Analytic parts `(A, B)` of the harmonic extension, `f = A + conj(B)`,
/// with `B(0) = 0`.
///
/// An `m`-fold symmetric correspondence has `A` supported on exponents
/// `1 mod m` and `B` on `-1 mod m`. The other modes only carry aliasing
/// error, since `SAMPLES` is not a multiple of `m`, and are discarded.
pub fn analytic_parts(
    bc: &BoundaryCorrespondence,
    modes: usize,
) -> Result<(PowerSeries, PowerSeries)> {
    split_parts(&bc.boundary_values(), modes, bc.symmetry_order())
}

/// Largest raw Fourier coefficient of `bc` at an exponent its symmetry
/// forbids, relative to the largest coefficient.
pub fn spectral_leakage(bc: &BoundaryCorrespondence, modes: usize) -> Result<f64> {
    let m = bc.symmetry_order();
    let (positive, negative) = fourier_coefficients(&bc.boundary_values(), modes)?;
    let scale = positive
        .iter()
        .chain(&negative)
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let forbidden = positive
        .iter()
        .enumerate()
        .filter(|(k, _)| k % m != 1 % m)
        .chain(
            negative
                .iter()
                .enumerate()
                .filter(|(l, _)| (l + 2) % m != 0),
        )
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    Ok(forbidden / scale)
}

/// [`analytic_parts`] for arbitrary uniform boundary samples.
pub fn parts_from_samples(
    values: &[Complex64],
    modes: usize,
) -> Result<(PowerSeries, PowerSeries)> {
    split_parts(values, modes, 1)
}

fn split_parts(
    values: &[Complex64],
    modes: usize,
    symmetry: usize,
) -> Result<(PowerSeries, PowerSeries)> {
    let (mut positive, mut negative) = fourier_coefficients(values, modes)?;
    if symmetry > 1 {
        for (k, c) in positive.iter_mut().enumerate() {
            if k % symmetry != 1 {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        for (l, c) in negative.iter_mut().enumerate() {
            if (l + 2) % symmetry != 0 {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
    let scale = positive
        .iter()
        .chain(&negative)
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let floor = SPECTRAL_FLOOR * scale;
    let a = cleaned(positive, floor);
    let mut b = vec![Complex64::new(0.0, 0.0)];
    b.extend(negative.iter().map(|c| c.conj()));
    let b = cleaned(b, floor);
    Ok((
        PowerSeries::from_coefficients(a, 1.0)?,
        PowerSeries::from_coefficients(b, 1.0)?,
    ))
}

/// `A(e^{i theta_n}) + conj(B(e^{i theta_n}))` at `n` uniform angles.
pub fn boundary_trace(a: &PowerSeries, b: &PowerSeries, n: usize) -> Result<Vec<Complex64>> {
    (0..n)
        .map(|k| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            Ok(a.value(z)? + b.value(z)?.conj())
        })
        .collect()
}

/// Largest deviation of the truncated Fourier sum from the boundary samples.
pub fn boundary_reproduction_error(
    bc: &BoundaryCorrespondence,
    a: &PowerSeries,
    b: &PowerSeries,
) -> Result<f64> {
    let trace = boundary_trace(a, b, SAMPLES)?;
    Ok(trace
        .iter()
        .zip(bc.boundary_values())
        .map(|(t, v)| (t - v).norm())
        .fold(0.0, f64::max))
}

/// Order of vanishing of `omega = B'/A'` at the origin, `None` when `B' = 0`.
fn vanishing_order(b_prime: &PowerSeries) -> Option<usize> {
    b_prime.coefficients().iter().position(|c| c.norm() > 0.0)
}

/// [`WORKING_RADIUS`], or less when a part converges on a smaller disk.
fn working_radius(a: &PowerSeries, b: &PowerSeries) -> f64 {
    WORKING_RADIUS.min(a.radius()).min(b.radius())
}

fn parts_to_functions(
    a: &PowerSeries,
    b: &PowerSeries,
) -> Result<(AnalyticFunction, AnalyticFunction, Option<usize>)> {
    let (a1, b1) = (a.derivative(), b.derivative());
    if a1.coefficients().first().is_none_or(|c| c.norm() == 0.0) {
        return Err(Error::Degenerate(
            "A'(0) = 0: the map is not locally injective at 0".into(),
        ));
    }
    let order = vanishing_order(&b1);
    let p = AnalyticFunction::series(a1).with_domain_radius(working_radius(a, b));
    let omega = AnalyticFunction::quotient(AnalyticFunction::series(b1), p.clone());
    Ok((p, omega, order))
}

/// `(p, q) = (A', sqrt(B'/A'))` on the working radius, validated.
pub fn weierstrass_from_parts(a: &PowerSeries, b: &PowerSeries) -> Result<WeierstrassData> {
    let (p, omega, order) = parts_to_functions(a, b)?;
    let q = match order {
        None => AnalyticFunction::constant(Complex64::new(0.0, 0.0)),
        Some(m) => sqrt_branch(&omega, m)?,
    };
    WeierstrassData::new(p, q, working_radius(a, b))
}

/// [`weierstrass_from_parts`] without the square-root and validity checks;
/// only `p` and `omega = q^2` are meaningful, which suffices for
/// [`validate_diffeo`].
pub fn weierstrass_from_parts_unchecked(
    a: &PowerSeries,
    b: &PowerSeries,
) -> Result<WeierstrassData> {
    let (p, omega, order) = parts_to_functions(a, b)?;
    let q = match order {
        None => AnalyticFunction::constant(Complex64::new(0.0, 0.0)),
        Some(m) => sqrt_branch_unchecked(&omega, m + m % 2)
            .or_else(|_| sqrt_branch_unchecked(&omega, m - m % 2))?,
    };
    WeierstrassData::new_unchecked(p, q, working_radius(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffeoCheck {
    pub ok: bool,
    pub min_jacobian: f64,
    pub at: [f64; 2],
}

/// Jacobian `|p|^2 (1 - |omega|^2)` on a `grid x grid` polar grid of
/// `|z| <= 0.99`.
pub fn validate_diffeo(data: &WeierstrassData, grid: usize) -> Result<DiffeoCheck> {
    let grid = grid.max(1);
    let points: Vec<Complex64> = std::iter::once(Complex64::new(0.0, 0.0))
        .chain((1..=grid).flat_map(|j| {
            let r = 0.99 * j as f64 / grid as f64;
            (0..grid).map(move |k| Complex64::from_polar(r, 2.0 * PI * k as f64 / grid as f64))
        }))
        .filter(|z| z.norm() < data.domain_radius())
        .collect();
    let values: Vec<(f64, Complex64)> = points
        .par_iter()
        .map(|&z| {
            let p = data.p_value(z)?;
            let w = data.omega(z)?;
            Ok((p.norm_sqr() * (1.0 - w.norm_sqr()), z))
        })
        .collect::<Result<_>>()?;
    let (min_jacobian, at) =
        values
            .into_iter()
            .fold((f64::INFINITY, Complex64::new(0.0, 0.0)), |best, v| {
                if v.0 < best.0 {
                    v
                } else {
                    best
                }
            });
    Ok(DiffeoCheck {
        ok: min_jacobian > 0.0,
        min_jacobian,
        at: [at.re, at.im],
    })
}

/// Weierstrass data of the harmonic extension of `bc`.
pub fn correspondence_data(bc: &BoundaryCorrespondence) -> Result<WeierstrassData> {
    let (a, b) = analytic_parts(bc, DEFAULT_MODES)?;
    weierstrass_from_parts(&a, &b)
}

/// Curvature report of the harmonic extension of `bc`. Hall's bound and the
/// bound constants are checked only for the disk target.
pub fn family_report(bc: &BoundaryCorrespondence) -> Result<CurvatureReport> {
    family_report_with(bc, true)
}

pub fn family_report_with(bc: &BoundaryCorrespondence, numeric: bool) -> Result<CurvatureReport> {
    let data = correspondence_data(bc)?;
    let disk = bc.target() == Target::Disk;
    let mut report = CurvatureReport::for_data(
        &data,
        ReportOptions {
            numeric,
            disk_onto_disk: disk,
        },
    )?;
    if !disk {
        report.annotate("premise not met: target is the hexagon, bounds reported without verdict");
    }
    Ok(report)
}

/// Correspondence `theta - lambda saw(theta)`, which squeezes each arc
/// `|theta - k pi/3| < pi/6` towards `k pi/3`. As `lambda -> 1` its disk
/// extension tends to the hexagon map, whose boundary map sends these arcs to
/// the vertices `e^{i k pi/3}`.
pub fn concentration_spec(lambda: f64, target: Target) -> CorrespondenceSpec {
    CorrespondenceSpec {
        target,
        epsilons: Vec::new(),
        deltas: Vec::new(),
        symmetry_order: 6,
        concentration: lambda,
    }
}

/// Fourier coefficient `c_k` of `e^{i phi}` for the disk-target
/// [`concentration_spec`], in closed form.
pub fn concentration_coefficient(lambda: f64, k: i64) -> f64 {
    // (6 / 2 pi) * integral over |s| < pi/6 of exp(i((1 - lambda) s - (k - 1) s))
    let w = (k - 1) as f64 + lambda;
    if w == 0.0 {
        return 1.0;
    }
    if (k - 1) % 6 != 0 {
        return 0.0;
    }
    6.0 * (w * PI / 6.0).sin() / (PI * w)
}

/// Outcome for one member of a randomized batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchInstance {
    pub index: u64,
    pub spec: CorrespondenceSpec,
    /// Present when the instance is admissible.
    pub report: Option<CurvatureReport>,
    /// Why the instance was rejected.
    pub rejection: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub seed: u64,
    pub admissible: usize,
    pub rejected: usize,
    pub max_kpp_flat: f64,
    pub max_kpp_general: f64,
    pub violations: Vec<String>,
    pub instances: Vec<BatchInstance>,
}

/// Random disk-target correspondence number `index` of the stream `seed`:
/// symmetry order 6 or 2 alternately, up to four harmonics, scaled so that
/// `sum m j |eps_j| < 0.95`.
pub fn random_spec(seed: u64, index: u64) -> CorrespondenceSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let m = if index % 2 == 0 { 6 } else { 2 };
    let terms = rng.random_range(1..=4usize);
    let raw: Vec<f64> = (0..terms).map(|_| rng.random_range(-1.0..1.0)).collect();
    let deltas: Vec<f64> = (0..terms)
        .map(|_| rng.random_range(0.0..2.0 * PI))
        .collect();
    let budget: f64 = raw
        .iter()
        .enumerate()
        .map(|(j, e)| (m * (j + 1)) as f64 * e.abs())
        .sum();
    let target_budget = rng.random_range(0.05..0.95);
    let epsilons = raw.iter().map(|e| e * target_budget / budget).collect();
    CorrespondenceSpec {
        target: Target::Disk,
        epsilons,
        deltas,
        symmetry_order: m,
        concentration: 0.0,
    }
}

fn run_instance(seed: u64, index: u64, numeric: bool) -> BatchInstance {
    let spec = random_spec(seed, index);
    let outcome =
        BoundaryCorrespondence::new(spec.clone()).and_then(|bc| family_report_with(&bc, numeric));
    match outcome {
        Ok(report) => BatchInstance {
            index,
            spec,
            report: Some(report),
            rejection: None,
        },
        Err(e) => BatchInstance {
            index,
            spec,
            report: None,
            rejection: Some(e.to_string()),
        },
    }
}

/// Generates candidates `0, 1, 2, ...` of the stream `seed` until `count` are
/// admissible, and checks every bound on each. The result depends only on
/// `(seed, count, numeric)`.
pub fn seeded_batch(seed: u64, count: usize, numeric: bool) -> BatchReport {
    let mut instances: Vec<BatchInstance> = Vec::new();
    let mut admissible = 0;
    let mut next = 0u64;
    while admissible < count {
        let chunk = (count - admissible).max(8) as u64;
        let mut fresh: Vec<BatchInstance> = (next..next + chunk)
            .into_par_iter()
            .map(|i| run_instance(seed, i, numeric))
            .collect();
        next += chunk;
        fresh.sort_by_key(|i| i.index);
        for inst in fresh {
            if admissible == count {
                break;
            }
            if inst.report.is_some() {
                admissible += 1;
            }
            instances.push(inst);
        }
    }
    let mut violations = Vec::new();
    let mut max_kpp_flat: f64 = 0.0;
    let mut max_kpp_general: f64 = 0.0;
    for inst in &instances {
        if let Some(r) = &inst.report {
            max_kpp_general = max_kpp_general.max(r.kpp_magnitude());
            if r.is_horizontal() {
                max_kpp_flat = max_kpp_flat.max(r.kpp_magnitude());
            }
            violations.extend(
                r.violations()
                    .into_iter()
                    .map(|v| format!("instance {}: {v}", inst.index)),
            );
        }
    }
    BatchReport {
        seed,
        admissible,
        rejected: instances.len() - admissible,
        max_kpp_flat,
        max_kpp_general,
        violations,
        instances,
    }
}
