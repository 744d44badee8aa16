//! Pointwise quantile curves across trials.

use super::ExperimentError;
use crate::sim::RegretTrace;
use serde::Serialize;

/// Median and quartile curves of cumulative regret, indexed by `t - 1`.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateCurve {
    pub median: Vec<f64>,
    pub q1: Vec<f64>,
    pub q3: Vec<f64>,
}

impl AggregateCurve {
    pub fn len(&self) -> usize {
        self.median.len()
    }

    pub fn is_empty(&self) -> bool {
        self.median.is_empty()
    }
}

/// Quantile by linear interpolation between order statistics: position
/// `h = (n-1)p`, interpolating between `floor(h)` and the next value. This is
/// the convention common plotting stacks default to.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&p));
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Pointwise median/q1/q3 of the cumulative regret across trials.
pub fn aggregate(traces: &[RegretTrace]) -> Result<AggregateCurve, ExperimentError> {
    let first = traces.first().ok_or(ExperimentError::NoTraces)?;
    let horizon = first.len();
    if traces.iter().any(|t| t.len() != horizon) {
        return Err(ExperimentError::RaggedTraces);
    }
    let mut median = Vec::with_capacity(horizon);
    let mut q1 = Vec::with_capacity(horizon);
    let mut q3 = Vec::with_capacity(horizon);
    let mut column = vec![0.0; traces.len()];
    for t in 0..horizon {
        for (i, trace) in traces.iter().enumerate() {
            column[i] = trace.cumulative[t];
        }
        column.sort_by(|a, b| a.partial_cmp(b).expect("regret values are finite"));
        q1.push(quantile(&column, 0.25));
        median.push(quantile(&column, 0.5));
        q3.push(quantile(&column, 0.75));
    }
    Ok(AggregateCurve { median, q1, q3 })
}
