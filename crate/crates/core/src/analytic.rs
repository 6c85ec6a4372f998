//! Holomorphic function handles and the numerics built on them: radial path
//! integration, derivative jets and branch-continued square roots.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::PowerSeries;
use crate::taylor::{Taylor, MAX_ORDER};

/// Default working radius for data given on the open unit disk.
pub const DEFAULT_WORKING_RADIUS: f64 = 0.999;

/// Gauss-Legendre nodes per quadrature segment.
pub const NODES_PER_SEGMENT: usize = 32;

/// Upper limit on the number of quadrature segments.
pub const MAX_SEGMENTS: usize = 1 << 10;

const CAUCHY_POINTS: usize = 64;

type SampledFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum Backend {
    /// `numerator(z) / denominator(z)`, coefficients in ascending order.
    Rational {
        numerator: Vec<Complex64>,
        denominator: Vec<Complex64>,
    },
    Series(PowerSeries),
    Product(Box<AnalyticFunction>, Box<AnalyticFunction>),
    Quotient(Box<AnalyticFunction>, Box<AnalyticFunction>),
    Scaled(Complex64, Box<AnalyticFunction>),
    /// `z^half_order * sqrt(psi(z))`, the root continued along the segment
    /// from the origin starting at the principal value of `sqrt(psi(0))`.
    ShiftedSqrt {
        psi: Box<AnalyticFunction>,
        half_order: u32,
    },
    /// Value-only closure; derivatives come from Cauchy integrals.
    Sampled(SampledFn),
}

impl fmt::Debug for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational {
                numerator,
                denominator,
            } => f
                .debug_struct("Rational")
                .field("numerator", numerator)
                .field("denominator", denominator)
                .finish(),
            Backend::Series(s) => f.debug_tuple("Series").field(&s.degree()).finish(),
            Backend::Product(a, b) => f.debug_tuple("Product").field(a).field(b).finish(),
            Backend::Quotient(a, b) => f.debug_tuple("Quotient").field(a).field(b).finish(),
            Backend::Scaled(c, a) => f.debug_tuple("Scaled").field(c).field(a).finish(),
            Backend::ShiftedSqrt { psi, half_order } => f
                .debug_struct("ShiftedSqrt")
                .field("psi", psi)
                .field("half_order", half_order)
                .finish(),
            Backend::Sampled(_) => f.write_str("Sampled(..)"),
        }
    }
}

/// A holomorphic function on the disk `|z| < domain_radius`.
#[derive(Debug, Clone)]
pub struct AnalyticFunction {
    backend: Backend,
    domain_radius: f64,
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn eval_poly(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(czero(), |acc, a| acc * z + a)
}

/// Winding number of `f` around the origin along `|z| = radius`, or `None`
/// when `f` vanishes on the sampled circle.
fn winding_number(f: impl Fn(Complex64) -> Complex64, radius: f64) -> Option<i64> {
    // Adaptive arc subdivision: zeros just outside the circle make the
    // argument swing quickly over short arcs.
    fn arc(
        f: &dyn Fn(f64) -> Complex64,
        t0: f64,
        t1: f64,
        v0: Complex64,
        v1: Complex64,
        depth: u32,
    ) -> Option<f64> {
        let step = (v1 / v0).arg();
        if step.abs() <= PI / 4.0 {
            return Some(step);
        }
        if depth == 0 {
            return None;
        }
        let tm = 0.5 * (t0 + t1);
        let vm = f(tm);
        if vm.norm() == 0.0 {
            return None;
        }
        Some(arc(f, t0, tm, v0, vm, depth - 1)? + arc(f, tm, t1, vm, v1, depth - 1)?)
    }
    let g = |t: f64| f(Complex64::from_polar(radius, t));
    let n = 256;
    let mut prev = g(0.0);
    if prev.norm() == 0.0 {
        return None;
    }
    let mut total = 0.0;
    for k in 1..=n {
        let (t0, t1) = (
            2.0 * PI * (k - 1) as f64 / n as f64,
            2.0 * PI * k as f64 / n as f64,
        );
        let v = g(t1);
        if v.norm() == 0.0 {
            return None;
        }
        total += arc(&g, t0, t1, prev, v, 48)?;
        prev = v;
    }
    Some((total / (2.0 * PI)).round() as i64)
}

impl AnalyticFunction {
    pub fn constant(c: Complex64) -> Self {
        AnalyticFunction {
            backend: Backend::Rational {
                numerator: vec![c],
                denominator: vec![Complex64::new(1.0, 0.0)],
            },
            domain_radius: f64::INFINITY,
        }
    }

    pub fn polynomial(coefficients: Vec<Complex64>) -> Self {
        AnalyticFunction {
            backend: Backend::Rational {
                numerator: coefficients,
                denominator: vec![Complex64::new(1.0, 0.0)],
            },
            domain_radius: f64::INFINITY,
        }
    }

    /// `coefficient * z^power`.
    pub fn monomial(coefficient: Complex64, power: usize) -> Self {
        let mut c = vec![czero(); power + 1];
        c[power] = coefficient;
        Self::polynomial(c)
    }

    /// Rational function on `|z| < domain_radius`; the denominator must not
    /// vanish there (checked with the argument principle).
    pub fn rational(
        numerator: Vec<Complex64>,
        denominator: Vec<Complex64>,
        domain_radius: f64,
    ) -> Result<Self> {
        if !(domain_radius > 0.0) {
            return Err(Error::Parameter(format!(
                "domain radius {domain_radius} must be positive"
            )));
        }
        if numerator.is_empty() || denominator.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::Parameter(
                "rational function needs a nonzero denominator".into(),
            ));
        }
        if denominator.len() > 1 && domain_radius.is_finite() {
            // Zeros on the boundary circle itself are allowed.
            match winding_number(|z| eval_poly(&denominator, z), domain_radius * (1.0 - 1e-9)) {
                Some(0) => {}
                _ => {
                    return Err(Error::Parameter(format!(
                        "denominator vanishes on |z| <= {domain_radius}"
                    )))
                }
            }
        }
        Ok(AnalyticFunction {
            backend: Backend::Rational {
                numerator,
                denominator,
            },
            domain_radius,
        })
    }

    pub fn series(series: PowerSeries) -> Self {
        let domain_radius = series.radius();
        AnalyticFunction {
            backend: Backend::Series(series),
            domain_radius,
        }
    }

    /// Value-only function; derivatives are computed from Cauchy integrals.
    pub fn sampled(
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        domain_radius: f64,
    ) -> Self {
        AnalyticFunction {
            backend: Backend::Sampled(Arc::new(f)),
            domain_radius,
        }
    }

    pub fn product(a: AnalyticFunction, b: AnalyticFunction) -> Self {
        let domain_radius = a.domain_radius.min(b.domain_radius);
        AnalyticFunction {
            backend: Backend::Product(Box::new(a), Box::new(b)),
            domain_radius,
        }
    }

    /// `a / b`; `b` is the caller's responsibility to keep nonzero.
    pub fn quotient(a: AnalyticFunction, b: AnalyticFunction) -> Self {
        let domain_radius = a.domain_radius.min(b.domain_radius);
        AnalyticFunction {
            backend: Backend::Quotient(Box::new(a), Box::new(b)),
            domain_radius,
        }
    }

    pub fn scaled(self, c: Complex64) -> Self {
        let domain_radius = self.domain_radius;
        AnalyticFunction {
            backend: Backend::Scaled(c, Box::new(self)),
            domain_radius,
        }
    }

    /// Restricts the function to a smaller disk.
    pub fn with_domain_radius(mut self, radius: f64) -> Self {
        self.domain_radius = self.domain_radius.min(radius);
        self
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    fn check(&self, z: Complex64) -> Result<()> {
        if z.norm() < self.domain_radius {
            Ok(())
        } else {
            Err(Error::radius(z, self.domain_radius))
        }
    }

    /// True when the function is identically zero by construction.
    pub fn is_identically_zero(&self) -> bool {
        match &self.backend {
            Backend::Rational { numerator, .. } => numerator.iter().all(|c| c.norm() == 0.0),
            Backend::Series(s) => s.coefficients().iter().all(|c| c.norm() == 0.0),
            Backend::Product(a, b) => a.is_identically_zero() || b.is_identically_zero(),
            Backend::Quotient(a, _) => a.is_identically_zero(),
            Backend::Scaled(c, a) => c.norm() == 0.0 || a.is_identically_zero(),
            Backend::ShiftedSqrt { psi, .. } => psi.is_identically_zero(),
            Backend::Sampled(_) => false,
        }
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        self.value_unchecked(z)
    }

    fn value_unchecked(&self, z: Complex64) -> Result<Complex64> {
        Ok(match &self.backend {
            Backend::Rational {
                numerator,
                denominator,
            } => eval_poly(numerator, z) / eval_poly(denominator, z),
            Backend::Series(s) => s.value_unchecked(z),
            Backend::Product(a, b) => a.value_unchecked(z)? * b.value_unchecked(z)?,
            Backend::Quotient(a, b) => a.value_unchecked(z)? / b.value_unchecked(z)?,
            Backend::Scaled(c, a) => c * a.value_unchecked(z)?,
            Backend::ShiftedSqrt { psi, half_order } => {
                if psi.is_identically_zero() {
                    return Ok(czero());
                }
                z.powu(*half_order) * continued_root(psi, z)?
            }
            Backend::Sampled(f) => f(z),
        })
    }

    /// `f(z)^2`, computed without a branch choice for square-root backends.
    pub fn squared_value(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        match &self.backend {
            Backend::ShiftedSqrt { psi, half_order } => {
                Ok(z.powu(2 * half_order) * psi.value_unchecked(z)?)
            }
            _ => {
                let v = self.value_unchecked(z)?;
                Ok(v * v)
            }
        }
    }

    /// Taylor jet at `z` from backend rules; sampled backends fall back to
    /// Cauchy differentiation.
    pub fn taylor(&self, z: Complex64) -> Result<Taylor> {
        self.check(z)?;
        self.taylor_unchecked(z)
    }

    fn taylor_unchecked(&self, z: Complex64) -> Result<Taylor> {
        Ok(match &self.backend {
            Backend::Rational {
                numerator,
                denominator,
            } => {
                let x = Taylor::variable(z);
                Taylor::polynomial(numerator, &x) / Taylor::polynomial(denominator, &x)
            }
            Backend::Series(s) => s.taylor_unchecked(z),
            Backend::Product(a, b) => a.taylor_unchecked(z)? * b.taylor_unchecked(z)?,
            Backend::Quotient(a, b) => a.taylor_unchecked(z)? / b.taylor_unchecked(z)?,
            Backend::Scaled(c, a) => a.taylor_unchecked(z)?.scale(*c),
            Backend::ShiftedSqrt { psi, half_order } => {
                if psi.is_identically_zero() {
                    return Ok(Taylor::constant(czero()));
                }
                let root = continued_root(psi, z)?;
                let s = psi.taylor_unchecked(z)?.sqrt_with_root(root);
                Taylor::variable(z).powi(*half_order) * s
            }
            Backend::Sampled(_) => Taylor::from_derivatives(&self.cauchy_jet(z, MAX_ORDER)?),
        })
    }

    /// Derivatives `f(z), f'(z), ..., f^(order)(z)`.
    pub fn jet(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        if order > MAX_ORDER {
            return Err(Error::Parameter(format!(
                "jet order {order} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        Ok(self.taylor(z)?.derivatives(order))
    }

    /// Derivatives by the trapezoidal rule on the Cauchy integral over a
    /// circle of radius `min(0.1, (R - |z|) / 2)`.
    pub fn cauchy_jet(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        if order > MAX_ORDER {
            return Err(Error::Parameter(format!(
                "jet order {order} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        self.check(z)?;
        let rho = if self.domain_radius.is_finite() {
            (0.1f64).min((self.domain_radius - z.norm()) / 2.0)
        } else {
            0.1
        };
        let samples: Vec<Complex64> = (0..CAUCHY_POINTS)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / CAUCHY_POINTS as f64;
                self.value_unchecked(z + Complex64::from_polar(rho, theta))
            })
            .collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(order + 1);
        let mut factorial = 1.0;
        for k in 0..=order {
            if k > 0 {
                factorial *= k as f64;
            }
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let theta = 2.0 * PI * (j * k) as f64 / CAUCHY_POINTS as f64;
                    v * Complex64::from_polar(1.0, -theta)
                })
                .sum();
            out.push(sum * factorial / (CAUCHY_POINTS as f64 * rho.powi(k as i32)));
        }
        Ok(out)
    }

    /// Removes a factor `z^k` for backends that support exact division.
    pub fn divide_by_z_power(&self, k: usize) -> Result<AnalyticFunction> {
        if k == 0 {
            return Ok(self.clone());
        }
        let backend = match &self.backend {
            Backend::Rational {
                numerator,
                denominator,
            } => {
                let scale = numerator.iter().map(|c| c.norm()).fold(0.0, f64::max);
                if numerator.len() <= k || numerator[..k].iter().any(|c| c.norm() > 1e-14 * scale) {
                    return Err(Error::Parameter(format!(
                        "rational numerator is not divisible by z^{k}"
                    )));
                }
                Backend::Rational {
                    numerator: numerator[k..].to_vec(),
                    denominator: denominator.clone(),
                }
            }
            Backend::Series(s) => Backend::Series(s.divide_by_z_power(k)?),
            Backend::Quotient(a, b) => {
                Backend::Quotient(Box::new(a.divide_by_z_power(k)?), b.clone())
            }
            Backend::Scaled(c, a) => Backend::Scaled(*c, Box::new(a.divide_by_z_power(k)?)),
            Backend::Product(a, b) => match a.divide_by_z_power(k) {
                Ok(a) => Backend::Product(Box::new(a), b.clone()),
                Err(_) => Backend::Product(a.clone(), Box::new(b.divide_by_z_power(k)?)),
            },
            Backend::ShiftedSqrt { psi, half_order } if k as u32 <= *half_order => {
                Backend::ShiftedSqrt {
                    psi: psi.clone(),
                    half_order: half_order - k as u32,
                }
            }
            _ => {
                return Err(Error::Parameter(format!(
                    "backend {:?} does not support division by z^{k}",
                    self.backend
                )))
            }
        };
        Ok(AnalyticFunction {
            backend,
            domain_radius: self.domain_radius,
        })
    }
}

/// `sqrt(psi(z))` continued along `[0, z]` from the principal root at 0.
fn continued_root(psi: &AnalyticFunction, z: Complex64) -> Result<Complex64> {
    let start = psi.value_unchecked(czero())?;
    if start.norm() == 0.0 {
        return Err(Error::BranchObstruction("psi(0) = 0".into()));
    }
    let mut root = start.sqrt();
    if z.norm() == 0.0 {
        return Ok(root);
    }
    let mut samples = 8usize;
    'refine: while samples <= 4096 {
        let mut prev = start;
        root = start.sqrt();
        for j in 1..=samples {
            let v = psi.value_unchecked(z * (j as f64 / samples as f64))?;
            if v.norm() == 0.0 {
                return Err(Error::BranchObstruction(format!(
                    "psi vanishes on the segment [0, {z}]"
                )));
            }
            if (v / prev).arg().abs() > PI / 4.0 {
                samples *= 2;
                continue 'refine;
            }
            let r = v.sqrt();
            root = if (r - root).norm() <= (r + root).norm() {
                r
            } else {
                -r
            };
            prev = v;
        }
        return Ok(root);
    }
    Err(Error::BranchObstruction(format!(
        "argument of psi varies too fast along [0, {z}]"
    )))
}

/// Holomorphic square root `q` of `omega = z^vanishing_order * psi` with
/// `psi(0) != 0` and `psi` zero-free on the working disk. The branch is fixed
/// by taking the principal value of `sqrt(psi(0))`.
pub fn sqrt_branch(omega: &AnalyticFunction, vanishing_order: usize) -> Result<AnalyticFunction> {
    if vanishing_order % 2 != 0 {
        return Err(Error::OddVanishingOrder(vanishing_order));
    }
    if omega.is_identically_zero() {
        return Ok(AnalyticFunction::constant(czero()).with_domain_radius(omega.domain_radius));
    }
    let psi = omega.divide_by_z_power(vanishing_order)?;
    let psi0 = psi.value(czero())?;
    if psi0.norm() <= 1e-14 {
        return Err(Error::Parameter(format!(
            "omega vanishes to order greater than {vanishing_order} at the origin"
        )));
    }
    let check_radius = if omega.domain_radius.is_finite() {
        omega.domain_radius * (1.0 - 1e-6)
    } else {
        1.0
    };
    let psi_ref = &psi;
    match winding_number(
        |z| psi_ref.value_unchecked(z).unwrap_or(czero()),
        check_radius,
    ) {
        Some(0) => {}
        _ => {
            return Err(Error::BranchObstruction(format!(
                "psi has zeros inside |z| < {check_radius}"
            )))
        }
    }
    Ok(shifted_sqrt(psi, vanishing_order, omega.domain_radius))
}

fn shifted_sqrt(
    psi: AnalyticFunction,
    vanishing_order: usize,
    domain_radius: f64,
) -> AnalyticFunction {
    AnalyticFunction {
        domain_radius,
        backend: Backend::ShiftedSqrt {
            psi: Box::new(psi),
            half_order: (vanishing_order / 2) as u32,
        },
    }
}

/// [`sqrt_branch`] without the zero-freeness check on `psi`. Its square
/// ([`AnalyticFunction::squared_value`]) is always `omega`; values and jets
/// fail where no continuous root exists.
pub fn sqrt_branch_unchecked(
    omega: &AnalyticFunction,
    vanishing_order: usize,
) -> Result<AnalyticFunction> {
    if vanishing_order % 2 != 0 {
        return Err(Error::OddVanishingOrder(vanishing_order));
    }
    if omega.is_identically_zero() {
        return Ok(AnalyticFunction::constant(czero()).with_domain_radius(omega.domain_radius));
    }
    let psi = omega.divide_by_z_power(vanishing_order)?;
    Ok(shifted_sqrt(psi, vanishing_order, omega.domain_radius))
}

fn gauss_legendre(nodes: usize) -> Result<Vec<(f64, f64)>> {
    static DEFAULT: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let build = |n: usize| -> Result<Vec<(f64, f64)>> {
        gauss_quad::GaussLegendre::new(n)
            .map(|r| r.into_node_weight_pairs())
            .map_err(|e| Error::Parameter(format!("Gauss-Legendre rule with {n} nodes: {e}")))
    };
    if nodes == NODES_PER_SEGMENT {
        if let Some(rule) = DEFAULT.get() {
            return Ok(rule.clone());
        }
        let rule = build(nodes)?;
        return Ok(DEFAULT.get_or_init(|| rule).clone());
    }
    build(nodes)
}

/// Straight path from the origin to `endpoint`, with the starting segment
/// count and the per-segment node count of the composite rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPath {
    pub endpoint: Complex64,
    pub segments: usize,
    pub nodes_per_segment: usize,
}

impl RadialPath {
    pub fn new(endpoint: Complex64) -> Self {
        RadialPath {
            endpoint,
            segments: 1,
            nodes_per_segment: NODES_PER_SEGMENT,
        }
    }
}

fn composite_rule<const N: usize>(
    f: &dyn Fn(Complex64) -> Result<[Complex64; N]>,
    rule: &[(f64, f64)],
    a: Complex64,
    b: Complex64,
    segments: usize,
) -> Result<[Complex64; N]> {
    let h = (b - a) / segments as f64;
    let mut total = [czero(); N];
    for s in 0..segments {
        let left = a + h * s as f64;
        let mid = left + h * 0.5;
        let mut part = [czero(); N];
        for &(x, w) in rule {
            let v = f(mid + h * (0.5 * x))?;
            for (acc, vi) in part.iter_mut().zip(v) {
                *acc += vi * w;
            }
        }
        for (t, p) in total.iter_mut().zip(part) {
            *t += p * h * 0.5;
        }
    }
    Ok(total)
}

/// Integrals of the `N` components of `f` along the segment `[a, b]` by
/// composite Gauss-Legendre, doubling the segment count until successive
/// results agree to `1e-12 (1 + |I|)` in every component.
pub fn integrate_segment_multi<const N: usize>(
    f: impl Fn(Complex64) -> Result<[Complex64; N]>,
    a: Complex64,
    b: Complex64,
    segments: usize,
    nodes_per_segment: usize,
) -> Result<[Complex64; N]> {
    let rule = gauss_legendre(nodes_per_segment)?;
    let mut n = segments.max(1);
    let mut coarse = composite_rule(&f, &rule, a, b, n)?;
    while n < MAX_SEGMENTS {
        n *= 2;
        let fine = composite_rule(&f, &rule, a, b, n)?;
        let converged = fine
            .iter()
            .zip(&coarse)
            .all(|(x, y)| (x - y).norm() <= 1e-12 * (1.0 + x.norm()));
        if converged {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::NonConvergence {
        what: "radial quadrature",
        detail: format!("tolerance not met with {MAX_SEGMENTS} segments on [{a}, {b}]"),
    })
}

/// Scalar form of [`integrate_segment_multi`].
pub fn integrate_segment(
    f: impl Fn(Complex64) -> Result<Complex64>,
    a: Complex64,
    b: Complex64,
    segments: usize,
    nodes_per_segment: usize,
) -> Result<Complex64> {
    let [v] = integrate_segment_multi(|z| Ok([f(z)?]), a, b, segments, nodes_per_segment)?;
    Ok(v)
}

/// `int_0^z f(zeta) d zeta` along the straight segment.
pub fn integrate_radial(f: &AnalyticFunction, path: &RadialPath) -> Result<Complex64> {
    f.check(path.endpoint)?;
    integrate_segment(
        |z| f.value_unchecked(z),
        czero(),
        path.endpoint,
        path.segments,
        path.nodes_per_segment,
    )
}
