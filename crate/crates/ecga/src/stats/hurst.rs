//! Rescaled-range (R/S) estimate of the Hurst exponent.

use crate::error::{Error, Result};
use crate::idprng::Sequence;

const MIN_LEN: usize = 64;
const MIN_WINDOW: usize = 16;
const WINDOW_COUNT: usize = 12;

/// Mean rescaled range over all full non-overlapping blocks of size `n`.
/// Blocks with zero standard deviation contribute nothing; returns `None`
/// when every block is degenerate.
fn mean_rs(values: &[f64], n: usize) -> Option<f64> {
    let blocks = values.len() / n;
    let mut total = 0.0;
    let mut used = 0usize;
    for b in 0..blocks {
        let chunk = &values[b * n..(b + 1) * n];
        let mean = chunk.iter().sum::<f64>() / n as f64;
        // Range of the mean-adjusted cumulative sum.
        let mut cum = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut var = 0.0;
        for &v in chunk {
            let d = v - mean;
            cum += d;
            lo = lo.min(cum);
            hi = hi.max(cum);
            var += d * d;
        }
        let s = (var / n as f64).sqrt();
        if s > 0.0 {
            total += (hi - lo) / s;
            used += 1;
        }
    }
    (used > 0).then(|| total / used as f64)
}

/// Hurst exponent of a sequence: the least-squares slope of log(R/S)
/// against log(n) over twelve logarithmically spaced window sizes between
/// 16 and len/4.
pub fn hurst_rs(seq: &Sequence) -> Result<f64> {
    let len = seq.len();
    if len < MIN_LEN {
        return Err(Error::SequenceTooShort { len, min: MIN_LEN });
    }
    let values: Vec<f64> = seq.symbols().iter().map(|&s| f64::from(s)).collect();

    let max_window = len / 4;
    let ratio = (max_window as f64 / MIN_WINDOW as f64).ln() / (WINDOW_COUNT - 1) as f64;
    let mut windows: Vec<usize> = (0..WINDOW_COUNT)
        .map(|i| (MIN_WINDOW as f64 * (ratio * i as f64).exp()).round() as usize)
        .collect();
    windows.dedup();

    let mut points: Vec<(f64, f64)> = Vec::with_capacity(windows.len());
    for n in windows {
        if let Some(rs) = mean_rs(&values, n) {
            if rs > 0.0 {
                points.push(((n as f64).ln(), rs.ln()));
            }
        }
    }
    if points.len() < 2 {
        return Err(Error::DegenerateSeries);
    }

    let k = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / k;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in points {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    Ok(num / den)
}
