//! Sequence metrics: Shannon entropy, string period, Hurst exponent,
//! Pearson correlation, bit-change rate, and the in-process subset of the
//! NIST SP 800-22 battery.

mod hurst;
pub mod nist;
pub mod special;

pub use hurst::hurst_rs;
pub use nist::{nist_subset, proportion, NistConfig, NistResult, TestOutcome};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::idprng::Sequence;

/// Shannon entropy in bits of the empirical symbol distribution.
pub fn entropy(s: &Sequence) -> f64 {
    let mut counts = vec![0u64; s.alphabet_size()];
    for &sym in s.symbols() {
        counts[sym as usize] += 1;
    }
    entropy_from_counts(&counts, s.len() as u64)
}

/// Entropy of a histogram with `total` samples, using 0 log 0 = 0.
pub(crate) fn entropy_from_counts(counts: &[u64], total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let total_f = total as f64;
    let mut acc = 0.0;
    for &c in counts {
        if c > 0 {
            acc += (c as f64) * (c as f64).log2();
        }
    }
    total_f.log2() - acc / total_f
}

/// Least `T >= 1` with `s[i] == s[i + T]` wherever both indices are valid;
/// equals the length minus the longest proper border, via the prefix
/// function, in O(len).
pub fn period(s: &Sequence) -> usize {
    period_slice(s.symbols())
}

pub(crate) fn period_slice(symbols: &[u16]) -> usize {
    let n = symbols.len();
    if n == 0 {
        return 0;
    }
    // Prefix function; only the final value (longest border) is needed, but
    // the whole table is required to compute it.
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && symbols[i] != symbols[k] {
            k = pi[k - 1];
        }
        if symbols[i] == symbols[k] {
            k += 1;
        }
        pi[i] = k;
    }
    n - pi[n - 1]
}

/// Pearson correlation coefficient between two equal-length sequences.
pub fn pearson(a: &Sequence, b: &Sequence) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    pearson_f64(
        &a.symbols().iter().map(|&s| f64::from(s)).collect::<Vec<_>>(),
        &b.symbols().iter().map(|&s| f64::from(s)).collect::<Vec<_>>(),
    )
}

pub(crate) fn pearson_f64(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(Error::ConstantSequence);
    }
    Ok(cov / (var_a.sqrt() * var_b.sqrt()))
}

/// Number-of-bit-change rate in percent: the Hamming distance between the
/// fixed-width m-bit encodings of the two sequences over the total bit
/// count. 50% is ideal for unrelated sequences.
pub fn nbcr(a: &Sequence, b: &Sequence) -> Result<f64> {
    if a.len() != b.len() || a.m() != b.m() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let hamming: u64 = a
        .symbols()
        .iter()
        .zip(b.symbols())
        .map(|(&x, &y)| u64::from((x ^ y).count_ones()))
        .sum();
    let total_bits = (a.len() as u64) * u64::from(a.m());
    Ok(100.0 * hamming as f64 / total_bits as f64)
}

/// Outcome of one NIST test at a significance level.
#[derive(Clone, Debug, Serialize)]
pub struct NistEntry {
    pub name: String,
    pub p_value: Option<f64>,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// Aggregated metrics of a single sequence, as emitted by `ecga analyze`.
#[derive(Clone, Debug, Serialize)]
pub struct StatsReport {
    pub schema_version: u32,
    pub input_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hurst_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nist: Option<Vec<NistEntry>>,
}
