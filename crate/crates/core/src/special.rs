//! Gauss hypergeometric series and truncated power series with tail bounds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taylor::{Taylor, MAX_ORDER};

/// Largest argument modulus accepted by [`hyp2f1`]. No analytic continuation
/// is attempted beyond it.
pub const HYP2F1_GUARD: f64 = 0.999;

const HYP2F1_MAX_TERMS: usize = 2_000_000;

/// Neumaier-compensated accumulator for complex sums.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    re: f64,
    im: f64,
    re_c: f64,
    im_c: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: Complex64) {
        fn step(sum: &mut f64, comp: &mut f64, x: f64) {
            let t = *sum + x;
            if sum.abs() >= x.abs() {
                *comp += (*sum - t) + x;
            } else {
                *comp += (x - t) + *sum;
            }
            *sum = t;
        }
        step(&mut self.re, &mut self.re_c, v.re);
        step(&mut self.im, &mut self.im_c, v.im);
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

fn is_nonpositive_integer(c: f64) -> bool {
    c <= 0.0 && c.fract() == 0.0
}

/// Gauss hypergeometric function `2F1(a, b; c; x)` by direct summation of its
/// power series.
///
/// Terms are accumulated with compensated summation; the loop stops once
/// three consecutive terms fall below `1e-16` of the partial sum.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Parameter(format!(
            "2F1 lower parameter c = {c} is a nonpositive integer"
        )));
    }
    let modulus = x.norm();
    if !(modulus <= HYP2F1_GUARD) {
        return Err(Error::DivergenceGuard {
            modulus,
            guard: HYP2F1_GUARD,
        });
    }
    // (1)_m / m! = 1, so a unit parameter drops out of the ratio
    let unit = if b == 1.0 {
        Some(a)
    } else if a == 1.0 {
        Some(b)
    } else {
        None
    };

    let mut sum = CompensatedSum::default();
    let mut term = Complex64::new(1.0, 0.0);
    let mut small_run = 0;
    for m in 0..HYP2F1_MAX_TERMS {
        sum.add(term);
        if term.norm() < 1e-16 * sum.total().norm() {
            small_run += 1;
            if small_run == 3 {
                return Ok(sum.total());
            }
        } else {
            small_run = 0;
        }
        let mf = m as f64;
        let ratio = match unit {
            Some(other) => (other + mf) / (c + mf),
            None => (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0)),
        };
        term *= x * ratio;
    }
    Err(Error::NonConvergence {
        what: "2F1 series",
        detail: format!("no convergence within {HYP2F1_MAX_TERMS} terms at |x| = {modulus}"),
    })
}

/// Truncated power series `sum_{n<=N} a_n z^n` valid on `|z| <= radius`.
///
/// `tail_bounds[k]` bounds the discarded tail of the `k`-th derivative on the
/// closed disk of the stated radius; `tail_bounds[0]` is the value tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    coefficients: Vec<Complex64>,
    radius: f64,
    tail_bounds: [f64; MAX_ORDER + 1],
}

/// Falling factorial `n (n-1) ... (n-k+1)`.
fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|j| n as f64 - j as f64).product()
}

/// Bound `sum_{n > N} |a_n| n^(k) R^(n-k)` given the window of coefficients
/// `N+1..=M`: the window sum itself plus a geometric continuation whose rate
/// is measured from the window.
fn window_tail_bound(window: &[(usize, Complex64)], radius: f64, order: usize) -> f64 {
    let terms: Vec<(usize, f64)> = window
        .iter()
        .filter(|(n, a)| *n >= order && a.norm() > 0.0)
        .map(|&(n, a)| {
            (
                n,
                a.norm() * falling(n, order) * radius.powi((n - order) as i32),
            )
        })
        .collect();
    let explicit: f64 = terms.iter().map(|t| t.1).sum();
    if terms.len() < 2 {
        return explicit;
    }
    let (i0, m0) = terms[terms.len() / 2];
    let (i1, m1) = *terms.last().expect("nonempty");
    if m1 == 0.0 {
        return explicit;
    }
    let rate = (m1 / m0).powf(1.0 / (i1 - i0) as f64);
    if !(rate < 1.0) {
        return f64::INFINITY;
    }
    explicit + m1 * rate / (1.0 - rate)
}

impl PowerSeries {
    /// Series with explicitly supplied tail bound (applied to every
    /// derivative order).
    pub fn new(coefficients: Vec<Complex64>, radius: f64, tail_bound: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Parameter(format!(
                "series radius {radius} must be positive"
            )));
        }
        if !(tail_bound >= 0.0) {
            return Err(Error::Parameter(format!(
                "tail bound {tail_bound} must be nonnegative"
            )));
        }
        Ok(PowerSeries {
            coefficients,
            radius,
            tail_bounds: [tail_bound; MAX_ORDER + 1],
        })
    }

    /// Builds the degree-`degree` truncation of the series whose coefficients
    /// are produced by `coefficient`. Coefficients up to `2 * degree` are
    /// generated to bound the discarded tail.
    pub fn from_generator(
        degree: usize,
        radius: f64,
        coefficient: impl Fn(usize) -> Complex64,
    ) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Parameter(format!(
                "series radius {radius} must be positive"
            )));
        }
        let coefficients: Vec<Complex64> = (0..=degree).map(&coefficient).collect();
        let window: Vec<(usize, Complex64)> = (degree + 1..=2 * degree.max(1))
            .map(|n| (n, coefficient(n)))
            .collect();
        let mut tail_bounds = [0.0; MAX_ORDER + 1];
        for (k, t) in tail_bounds.iter_mut().enumerate() {
            *t = window_tail_bound(&window, radius, k);
        }
        Ok(PowerSeries {
            coefficients,
            radius,
            tail_bounds,
        })
    }

    /// Series from a finite coefficient list; the tail beyond the list is
    /// estimated from the geometric decay of its last half.
    pub fn from_coefficients(coefficients: Vec<Complex64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Parameter(format!(
                "series radius {radius} must be positive"
            )));
        }
        let n = coefficients.len();
        let window: Vec<(usize, Complex64)> = coefficients
            .iter()
            .copied()
            .enumerate()
            .skip(n / 2)
            .collect();
        let mut tail_bounds = [0.0; MAX_ORDER + 1];
        for (k, t) in tail_bounds.iter_mut().enumerate() {
            // only the extrapolated part lies beyond the list
            let explicit: f64 = window
                .iter()
                .filter(|(i, a)| *i >= k && a.norm() > 0.0)
                .map(|&(i, a)| a.norm() * falling(i, k) * radius.powi((i - k) as i32))
                .sum();
            *t = (window_tail_bound(&window, radius, k) - explicit).max(0.0);
        }
        Ok(PowerSeries {
            coefficients,
            radius,
            tail_bounds,
        })
    }

    /// `scale * z^lead * 2F1(a, b; c; kappa * z^step)` truncated after
    /// `terms` hypergeometric terms.
    pub fn hypergeometric(
        a: f64,
        b: f64,
        c: f64,
        scale: f64,
        lead: usize,
        kappa: f64,
        step: usize,
        terms: usize,
        radius: f64,
    ) -> Result<Self> {
        if is_nonpositive_integer(c) {
            return Err(Error::Parameter(format!(
                "2F1 lower parameter c = {c} is a nonpositive integer"
            )));
        }
        if step == 0 || terms == 0 {
            return Err(Error::Parameter(
                "hypergeometric series needs step, terms >= 1".into(),
            ));
        }
        let degree = lead + step * (terms - 1);
        // coefficients of the hypergeometric variable, enough for the tail window
        let max_m = (2 * degree.max(1) - lead) / step + 1;
        let mut hyp = Vec::with_capacity(max_m + 1);
        let mut t = 1.0;
        for m in 0..=max_m {
            hyp.push(t);
            let mf = m as f64;
            t *= kappa * (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0));
        }
        Self::from_generator(degree, radius, |n| {
            if n < lead || (n - lead) % step != 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(scale * hyp[(n - lead) / step], 0.0)
            }
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bounds[0]
    }

    /// Tail bound for the `order`-th derivative.
    pub fn derivative_tail_bound(&self, order: usize) -> f64 {
        self.tail_bounds[order.min(MAX_ORDER)]
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    fn check_radius(&self, z: Complex64) -> Result<()> {
        if z.norm() > self.radius {
            Err(Error::radius(z, self.radius))
        } else {
            Ok(())
        }
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        self.check_radius(z)?;
        Ok(self.value_unchecked(z))
    }

    pub(crate) fn value_unchecked(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }

    pub(crate) fn taylor_unchecked(&self, z: Complex64) -> Taylor {
        Taylor::polynomial(&self.coefficients, &Taylor::variable(z))
    }

    /// Term-wise differentiated series `(s(z), s'(z), ..., s^(order)(z))`.
    pub fn eval_jet(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        if order > MAX_ORDER {
            return Err(Error::Parameter(format!(
                "jet order {order} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        self.check_radius(z)?;
        Ok(self.taylor_unchecked(z).derivatives(order))
    }

    /// Term-wise derivative; the radius is kept and tail bounds shift by one
    /// order.
    pub fn derivative(&self) -> PowerSeries {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, a)| a * n as f64)
            .collect();
        let mut tail_bounds = [self.tail_bounds[MAX_ORDER]; MAX_ORDER + 1];
        tail_bounds[..MAX_ORDER].copy_from_slice(&self.tail_bounds[1..]);
        PowerSeries {
            coefficients,
            radius: self.radius,
            tail_bounds,
        }
    }

    /// Removes a factor `z^k`; the first `k` coefficients must be negligible.
    pub fn divide_by_z_power(&self, k: usize) -> Result<PowerSeries> {
        let scale = self
            .coefficients
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max);
        if let Some((i, a)) = self
            .coefficients
            .iter()
            .enumerate()
            .take(k)
            .find(|(_, a)| a.norm() > 1e-12 * scale.max(1e-300))
        {
            return Err(Error::Parameter(format!(
                "coefficient {i} = {a} does not vanish, cannot divide by z^{k}"
            )));
        }
        let mut tail_bounds = self.tail_bounds;
        for t in tail_bounds.iter_mut() {
            *t /= self.radius.powi(k as i32);
        }
        Ok(PowerSeries {
            coefficients: self.coefficients.iter().skip(k).copied().collect(),
            radius: self.radius,
            tail_bounds,
        })
    }

    /// Drops trailing coefficients below `rel * max |a_n|`, folding their
    /// contribution on the disk into the tail bounds.
    pub fn trimmed(&self, rel: f64) -> PowerSeries {
        let scale = self
            .coefficients
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max);
        let keep = self
            .coefficients
            .iter()
            .rposition(|a| a.norm() > rel * scale)
            .map_or(1, |i| i + 1);
        let mut tail_bounds = self.tail_bounds;
        for (k, t) in tail_bounds.iter_mut().enumerate() {
            *t += self.coefficients[keep..]
                .iter()
                .enumerate()
                .filter(|(i, _)| keep + i >= k)
                .map(|(i, a)| {
                    let n = keep + i;
                    a.norm() * falling(n, k) * self.radius.powi((n - k) as i32)
                })
                .sum::<f64>();
        }
        PowerSeries {
            coefficients: self.coefficients[..keep].to_vec(),
            radius: self.radius,
            tail_bounds,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Composite Gauss-Legendre on [0, r], used as an independent oracle.
    fn quad(f: impl Fn(f64) -> f64, r: f64) -> f64 {
        let rule = gauss_quad::GaussLegendre::new(40).unwrap();
        let pieces = 16;
        let h = r / pieces as f64;
        (0..pieces)
            .map(|k| rule.integrate(k as f64 * h, (k + 1) as f64 * h, &f))
            .sum()
    }

    #[test]
    fn hyp2f1_at_origin_is_one() {
        assert_eq!(
            hyp2f1(1.0 / 6.0, 1.0, 7.0 / 6.0, c(0.0, 0.0)).unwrap(),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn hyp2f1_matches_quadrature_for_both_hexagon_parameter_sets() {
        let r: f64 = 0.5;
        let x = c(-r.powi(6), 0.0);
        let lhs = hyp2f1(1.0 / 6.0, 1.0, 7.0 / 6.0, x).unwrap();
        let oracle = quad(|t| 1.0 / (1.0 + t.powi(6)), r) / r;
        assert!((lhs.re - oracle).abs() <= 1e-10 && lhs.im == 0.0);

        let lhs = hyp2f1(5.0 / 6.0, 1.0, 11.0 / 6.0, x).unwrap();
        let oracle = 5.0 / r.powi(5) * quad(|t| t.powi(4) / (1.0 + t.powi(6)), r);
        assert!((lhs.re - oracle).abs() <= 1e-10);
    }

    #[test]
    fn hyp2f1_general_parameters_against_closed_form() {
        // 2F1(1/2, 1/2; 3/2; x^2) = asin(x) / x
        let x: f64 = 0.6;
        let v = hyp2f1(0.5, 0.5, 1.5, c(x * x, 0.0)).unwrap();
        assert!((v.re - x.asin() / x).abs() < 1e-13);
        // 2F1(1, 1; 2; x) = -log(1 - x) / x, complex argument
        let z = c(0.3, 0.4);
        let v = hyp2f1(1.0, 1.0, 2.0, z).unwrap();
        let exact = -(c(1.0, 0.0) - z).ln() / z;
        assert!((v - exact).norm() < 1e-13 * exact.norm());
        // terminating series: 2F1(-2, b; c; x) is a quadratic
        let v = hyp2f1(-2.0, 3.0, 4.0, c(0.5, 0.0)).unwrap();
        let exact =
            1.0 - 2.0 * 3.0 / 4.0 * 0.5 + (-2.0 * -1.0) * (3.0 * 4.0) / (4.0 * 5.0 * 2.0) * 0.25;
        assert!((v.re - exact).abs() < 1e-15);
    }

    #[test]
    fn hyp2f1_rejects_bad_inputs() {
        assert!(matches!(
            hyp2f1(0.5, 1.0, -2.0, c(0.1, 0.0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            hyp2f1(0.5, 1.0, 0.0, c(0.1, 0.0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            hyp2f1(0.5, 1.0, 1.5, c(1.0, 0.0)),
            Err(Error::DivergenceGuard { .. })
        ));
        assert!(matches!(
            hyp2f1(0.5, 1.0, 1.5, c(0.0, 0.9995)),
            Err(Error::DivergenceGuard { .. })
        ));
    }

    #[test]
    fn unit_parameter_series_has_reciprocal_coefficients() {
        let s = PowerSeries::hypergeometric(1.0 / 6.0, 1.0, 7.0 / 6.0, 1.0, 0, 1.0, 1, 41, 0.9)
            .unwrap();
        for m in 0..=40 {
            let expected = 1.0 / (6 * m + 1) as f64;
            assert!((s.coefficients()[m].re - expected).abs() < 1e-15 * expected);
        }
    }

    #[test]
    fn doubling_truncation_stays_within_tail_bound() {
        let coarse = PowerSeries::hypergeometric(0.3, 1.7, 2.2, 1.0, 0, 1.0, 1, 60, 0.9).unwrap();
        let fine = PowerSeries::hypergeometric(0.3, 1.7, 2.2, 1.0, 0, 1.0, 1, 120, 0.9).unwrap();
        for k in 0..32 {
            let z = Complex64::from_polar(0.9 * (k as f64 + 0.5) / 32.0, 0.7 * k as f64);
            let d = (coarse.value(z).unwrap() - fine.value(z).unwrap()).norm();
            assert!(d < coarse.tail_bound(), "{d} vs {}", coarse.tail_bound());
        }
    }

    #[test]
    fn jets_of_simple_series() {
        // 1 / (1 + z^6)
        let s = PowerSeries::hypergeometric(1.0, 1.0, 1.0, 1.0, 0, -1.0, 6, 40, 0.9).unwrap();
        let j = s.eval_jet(c(0.0, 0.0), 2).unwrap();
        assert_eq!(j, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);

        let sq = PowerSeries::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1.0, 0.0).unwrap();
        assert_eq!(
            sq.eval_jet(c(0.0, 0.0), 2).unwrap(),
            vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]
        );
    }

    #[test]
    fn hexagon_g_series_derivative() {
        let g =
            PowerSeries::hypergeometric(1.0 / 6.0, 1.0, 7.0 / 6.0, 3.0 / PI, 1, -1.0, 6, 65, 0.95)
                .unwrap();
        let z = c(0.3, 0.0);
        let d = g.eval_jet(z, 1).unwrap();
        let exact = 3.0 / (PI * (1.0 + 0.3f64.powi(6)));
        assert!((d[1] - exact).norm() <= 1e-12);
    }

    #[test]
    fn radius_and_order_guards() {
        let s = PowerSeries::new(vec![c(1.0, 0.0)], 0.5, 0.0).unwrap();
        assert!(matches!(
            s.value(c(0.6, 0.0)),
            Err(Error::RadiusViolation { .. })
        ));
        assert!(s.eval_jet(c(0.1, 0.0), 5).is_err());
    }
}
