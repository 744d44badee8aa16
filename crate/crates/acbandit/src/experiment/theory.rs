//! Theoretical constants and the width-sum sanity diagnostic.

use super::ExperimentError;
use serde::Serialize;

fn check(cond: bool, what: &str) -> Result<(), ExperimentError> {
    if cond {
        Ok(())
    } else {
        Err(ExperimentError::Domain(what.to_owned()))
    }
}

/// Worst-case posterior sampling scale `R sqrt((24/eps) d ln(1/delta))`.
///
/// Far larger than what desk-scale experiments want, but useful to know how
/// conservative a configured `v` is.
pub fn sampling_scale(r: f64, epsilon: f64, d: usize, delta: f64) -> Result<f64, ExperimentError> {
    check(r.is_finite() && r > 0.0, "r must be positive")?;
    check(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)")?;
    check(d >= 1, "d must be at least 1")?;
    check(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)")?;
    Ok(r * ((24.0 / epsilon) * d as f64 * (1.0 / delta).ln()).sqrt())
}

/// Confidence width `R sqrt(d ln(T³) ln(1/delta)) + 1`.
pub fn confidence_width(
    r: f64,
    horizon: u64,
    d: usize,
    delta: f64,
) -> Result<f64, ExperimentError> {
    check(r.is_finite() && r > 0.0, "r must be positive")?;
    check(horizon >= 2, "horizon must be at least 2")?;
    check(d >= 1, "d must be at least 1")?;
    check(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)")?;
    let t = horizon as f64;
    Ok(r * (d as f64 * (t * t * t).ln() * (1.0 / delta).ln()).sqrt() + 1.0)
}

/// Result of checking `Σ sqrt(π(1-π)) z  <=  5 sqrt(d T ln T)`.
///
/// The bound holds unconditionally for the weighted update rule, so a
/// violation points at a defect in the precision updates or the width
/// computation rather than at bad luck.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WidthDiagnostic {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Evaluate the width-sum bound over one run's `(pi, z)` pairs.
pub fn sum_width_diagnostic(
    steps: &[(f64, f64)],
    d: usize,
) -> Result<WidthDiagnostic, ExperimentError> {
    if steps.len() < 2 {
        return Err(ExperimentError::HorizonTooShort(steps.len()));
    }
    check(d >= 1, "d must be at least 1")?;
    let lhs: f64 = steps
        .iter()
        .map(|&(pi, z)| (pi * (1.0 - pi)).max(0.0).sqrt() * z)
        .sum();
    let t = steps.len() as f64;
    let rhs = 5.0 * (d as f64 * t * t.ln()).sqrt();
    Ok(WidthDiagnostic {
        lhs,
        rhs,
        satisfied: lhs <= rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_scale_reference_values() {
        let v = sampling_scale(1.0, 0.5, 2, 0.1).unwrap();
        assert!((v - 14.867688755399354).abs() < 1e-12);
        let v = sampling_scale(2.0, 0.1, 8, 0.05).unwrap();
        assert!((v - 151.68132337534061).abs() < 1e-10);

        // Unit argument: 24/eps * d * ln(1/delta) = 1.
        let delta = (-1.0f64 / 48.0).exp();
        let v = sampling_scale(1.0, 0.5, 1, delta).unwrap();
        assert!((v - 1.0).abs() < 1e-12);

        // The scale collapses as delta approaches 1.
        let v = sampling_scale(1.0, 0.5, 4, 1.0 - 1e-12).unwrap();
        assert!(v > 0.0 && v < 1e-4);

        assert!(sampling_scale(0.0, 0.5, 2, 0.1).is_err());
        assert!(sampling_scale(1.0, 1.0, 2, 0.1).is_err());
        assert!(sampling_scale(1.0, 0.5, 0, 0.1).is_err());
        assert!(sampling_scale(1.0, 0.5, 2, 1.0).is_err());
    }

    #[test]
    fn confidence_width_reference_values() {
        let w = confidence_width(1.0, 10, 1, (-1.0f64).exp()).unwrap();
        assert!((w - 3.628260884878466).abs() < 1e-12);
        let w = confidence_width(2.0, 2000, 8, 0.05).unwrap();
        assert!((w - 47.75409934320057).abs() < 1e-10);

        // Approaches the additive constant as delta tends to 1.
        let w = confidence_width(1.0, 100, 4, 1.0 - 1e-12).unwrap();
        assert!((w - 1.0).abs() < 1e-3);

        let mut last = 0.0;
        for t in [2u64, 5, 20, 100, 10_000] {
            let w = confidence_width(1.0, t, 3, 0.1).unwrap();
            assert!(w > last);
            last = w;
        }

        assert!(confidence_width(1.0, 1, 1, 0.1).is_err());
    }

    #[test]
    fn width_diagnostic_arithmetic() {
        // Two steps, only the first contributing: lhs = 0.5 * 1.
        let report = sum_width_diagnostic(&[(0.5, 1.0), (0.5, 0.0)], 1).unwrap();
        assert!((report.lhs - 0.5).abs() < 1e-15);
        assert!((report.rhs - 5.8870501125773735).abs() < 1e-12);
        assert!(report.satisfied);

        let zeros = sum_width_diagnostic(&[(0.3, 0.0); 5], 3).unwrap();
        assert_eq!(zeros.lhs, 0.0);
        assert!(zeros.satisfied);

        let broken = sum_width_diagnostic(&[(0.5, 1e6), (0.5, 1e6)], 1).unwrap();
        assert!(!broken.satisfied);

        assert!(sum_width_diagnostic(&[(0.5, 1.0)], 1).is_err());
    }
}
