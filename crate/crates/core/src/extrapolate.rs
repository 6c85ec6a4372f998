//! Richardson extrapolation to a vanishing step.

/// Result of extrapolating a sequence of step-dependent estimates to step 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    /// Difference between the two highest-order extrapolants.
    pub error: f64,
}

/// Polynomial (Neville) extrapolation of `values[i] = F(steps[i])` to
/// `F(0)`, treating `F` as a polynomial in `steps[i]^power`.
///
/// `power = 2` suits symmetric difference quotients, whose error expands in
/// even powers of the step.
pub fn richardson(steps: &[f64], values: &[f64], power: i32) -> Extrapolated {
    assert_eq!(steps.len(), values.len(), "one value per step");
    assert!(!steps.is_empty(), "need at least one estimate");
    let x: Vec<f64> = steps.iter().map(|h| h.powi(power)).collect();
    let n = x.len();
    let mut table = values.to_vec();
    let mut previous_top = table[n - 1];
    for level in 1..n {
        previous_top = table[n - 1];
        for i in (level..n).rev() {
            let (xi, xj) = (x[i], x[i - level]);
            table[i] = (xj * table[i] - xi * table[i - 1]) / (xj - xi);
        }
    }
    let value = table[n - 1];
    let error = if n > 1 {
        (value - previous_top).abs()
    } else {
        f64::INFINITY
    };
    Extrapolated { value, error }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_polynomial_error_terms() {
        let f = |h: f64| 3.0 + 2.0 * h * h - 5.0 * h.powi(4);
        let steps = [0.1, 0.05, 0.025];
        let values: Vec<f64> = steps.iter().map(|&h| f(h)).collect();
        let r = richardson(&steps, &values, 2);
        assert!((r.value - 3.0).abs() < 1e-13);
    }

    #[test]
    fn central_difference_of_exp() {
        let d = |h: f64| ((0.3f64 + h).exp() - (0.3f64 - h).exp()) / (2.0 * h);
        let steps = [0.1, 0.05, 0.025, 0.0125];
        let values: Vec<f64> = steps.iter().map(|&h| d(h)).collect();
        let r = richardson(&steps, &values, 2);
        assert!((r.value - 0.3f64.exp()).abs() < 1e-12);
        assert!(r.error < 1e-9);
    }

    #[test]
    fn linear_power_for_one_sided_limits() {
        let g = |r: f64| -2.0 + 0.7 * r - 0.3 * r * r + 0.05 * r.powi(3);
        let steps: Vec<f64> = (0..5).map(|j| 0.1 / 2f64.powi(j)).collect();
        let values: Vec<f64> = steps.iter().map(|&h| g(h)).collect();
        let r = richardson(&steps, &values, 1);
        assert!((r.value + 2.0).abs() < 1e-13);
    }
}
