use std::time::{Duration, Instant};

use crate::error::Result;

/// Warm-up and measured run counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunPlan {
    pub warmup: usize,
    pub runs: usize,
}

impl Default for RunPlan {
    fn default() -> Self {
        RunPlan { warmup: 1, runs: 5 }
    }
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

/// Runs `f` `plan.warmup` times unmeasured, then `plan.runs` times measured.
/// Returns the last result and the measured wall times in seconds.
pub fn measure<T>(plan: RunPlan, mut f: impl FnMut() -> Result<T>) -> Result<(T, Vec<f64>)> {
    for _ in 0..plan.warmup {
        f()?;
    }
    let mut times = Vec::with_capacity(plan.runs.max(1));
    let mut last = None;
    for _ in 0..plan.runs.max(1) {
        let t = Instant::now();
        let out = f()?;
        times.push(t.elapsed().as_secs_f64());
        last = Some(out);
    }
    Ok((last.expect("at least one run"), times))
}

pub fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn measure_counts_runs() {
        let mut calls = 0;
        let (last, times) = measure(RunPlan { warmup: 2, runs: 3 }, || {
            calls += 1;
            Ok(calls)
        })
        .unwrap();
        assert_eq!((last, times.len(), calls), (5, 3, 5));
    }
}
