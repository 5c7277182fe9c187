//! In-process subset of the NIST SP 800-22 rev 1a battery: Frequency
//! Monobit, Block Frequency, Runs, Longest Run of Ones, Cumulative Sums
//! (both directions), Approximate Entropy, and Serial. The heavier tests
//! (Rank, DFT, templates, Universal, Random Excursions, Linear Complexity)
//! are expected to run in the reference NIST STS against the bit export
//! produced by `ecga export-bits`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::material::BitString;
use crate::stats::special::{erfc, igamc, normal_cdf};

/// Parameters of the battery. Block lengths follow the SP 800-22
/// recommendations and shrink automatically when the input is short.
#[derive(Clone, Debug)]
pub struct NistConfig {
    /// Significance level; a test passes when p >= lambda.
    pub lambda: f64,
    /// Block Frequency block length M.
    pub block_m: usize,
    /// Approximate Entropy block length m.
    pub aet_m: usize,
    /// Serial block length m.
    pub serial_m: usize,
}

impl Default for NistConfig {
    fn default() -> Self {
        NistConfig {
            lambda: 0.01,
            block_m: 128,
            aet_m: 10,
            serial_m: 16,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(untagged)]
pub enum TestOutcome {
    Computed { p_value: f64, pass: bool },
    Skipped { skipped: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct NistResult {
    pub name: String,
    #[serde(flatten)]
    pub outcome: TestOutcome,
}

impl NistResult {
    pub fn p_value(&self) -> Option<f64> {
        match self.outcome {
            TestOutcome::Computed { p_value, .. } => Some(p_value),
            TestOutcome::Skipped { .. } => None,
        }
    }

    pub fn passed(&self) -> Option<bool> {
        match self.outcome {
            TestOutcome::Computed { pass, .. } => Some(pass),
            TestOutcome::Skipped { .. } => None,
        }
    }
}

/// Frequency (Monobit) test.
pub fn monobit(bits: &BitString) -> f64 {
    let n = bits.len() as f64;
    let sum: i64 = bits.as_slice().iter().map(|&b| i64::from(b) * 2 - 1).sum();
    let s_obs = (sum.abs() as f64) / n.sqrt();
    erfc(s_obs / std::f64::consts::SQRT_2)
}

/// Block Frequency test with block length `m`.
pub fn block_frequency(bits: &BitString, m: usize) -> f64 {
    let n = bits.len();
    let blocks = n / m;
    let mut chi2 = 0.0;
    for i in 0..blocks {
        let ones = bits.as_slice()[i * m..(i + 1) * m]
            .iter()
            .map(|&b| u32::from(b))
            .sum::<u32>();
        let pi = f64::from(ones) / m as f64;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * m as f64;
    igamc(blocks as f64 / 2.0, chi2 / 2.0)
}

/// Runs test.
pub fn runs(bits: &BitString) -> f64 {
    let n = bits.len() as f64;
    let ones: u64 = bits.as_slice().iter().map(|&b| u64::from(b)).sum();
    let pi = ones as f64 / n;
    // Frequency precondition of the test definition.
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return 0.0;
    }
    let v = 1 + bits
        .as_slice()
        .windows(2)
        .filter(|w| w[0] != w[1])
        .count();
    let num = (v as f64 - 2.0 * n * pi * (1.0 - pi)).abs();
    let den = 2.0 * (2.0 * n).sqrt() * pi * (1.0 - pi);
    erfc(num / den)
}

/// Longest Run of Ones in a Block test. Needs at least 128 bits.
pub fn longest_run(bits: &BitString) -> Result<f64> {
    let n = bits.len();
    // (M, category lower edge, category upper edge, probabilities)
    let (m, lo, hi, pi): (usize, u32, u32, &[f64]) = if n < 128 {
        return Err(Error::SequenceTooShort { len: n, min: 128 });
    } else if n < 6272 {
        (8, 1, 4, &[0.2148, 0.3672, 0.2305, 0.1875])
    } else if n < 750_000 {
        (128, 4, 9, &[0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124])
    } else {
        (
            10_000,
            10,
            16,
            &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
        )
    };
    let blocks = n / m;
    let mut v = vec![0u64; pi.len()];
    for i in 0..blocks {
        let mut longest = 0u32;
        let mut run = 0u32;
        for &b in &bits.as_slice()[i * m..(i + 1) * m] {
            if b == 1 {
                run += 1;
                longest = longest.max(run);
            } else {
                run = 0;
            }
        }
        let cat = longest.clamp(lo, hi) - lo;
        v[cat as usize] += 1;
    }
    let nf = blocks as f64;
    let chi2: f64 = v
        .iter()
        .zip(pi)
        .map(|(&obs, &p)| {
            let expect = nf * p;
            (obs as f64 - expect) * (obs as f64 - expect) / expect
        })
        .sum();
    let k = pi.len() as f64 - 1.0;
    Ok(igamc(k / 2.0, chi2 / 2.0))
}

/// Cumulative Sums test; `forward` selects the direction.
pub fn cusum(bits: &BitString, forward: bool) -> f64 {
    let n = bits.len();
    let mut z: i64 = 0;
    let mut s: i64 = 0;
    let iter: Box<dyn Iterator<Item = &u8>> = if forward {
        Box::new(bits.as_slice().iter())
    } else {
        Box::new(bits.as_slice().iter().rev())
    };
    for &b in iter {
        s += i64::from(b) * 2 - 1;
        z = z.max(s.abs());
    }
    if z == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let zf = z as f64;
    let sqrt_n = nf.sqrt();
    let ratio = nf / zf;
    // Sums run over the integers inside the stated real intervals, so the
    // lower bounds round up and the upper bounds round down.
    let mut p = 1.0;
    let start = ((-ratio + 1.0) / 4.0).ceil() as i64;
    let end = ((ratio - 1.0) / 4.0).floor() as i64;
    for k in start..=end {
        let k = k as f64;
        p -= normal_cdf((4.0 * k + 1.0) * zf / sqrt_n) - normal_cdf((4.0 * k - 1.0) * zf / sqrt_n);
    }
    let start = ((-ratio - 3.0) / 4.0).ceil() as i64;
    for k in start..=end {
        let k = k as f64;
        p += normal_cdf((4.0 * k + 3.0) * zf / sqrt_n) - normal_cdf((4.0 * k + 1.0) * zf / sqrt_n);
    }
    p.clamp(0.0, 1.0)
}

/// Counts of every overlapping `m`-bit pattern with wraparound.
fn pattern_counts(bits: &[u8], m: usize) -> Vec<u64> {
    let n = bits.len();
    let mut counts = vec![0u64; 1 << m];
    let mask = (1usize << m) - 1;
    // Seed the rolling window with the first m - 1 bits.
    let mut window = 0usize;
    for &b in &bits[..m - 1] {
        window = (window << 1) | usize::from(b);
    }
    for i in 0..n {
        let b = bits[(i + m - 1) % n];
        window = ((window << 1) | usize::from(b)) & mask;
        counts[window] += 1;
    }
    counts
}

/// Approximate Entropy test with block length `m`.
pub fn approximate_entropy(bits: &BitString, m: usize) -> f64 {
    let n = bits.len();
    let phi = |k: usize| -> f64 {
        if k == 0 {
            return 0.0;
        }
        pattern_counts(bits.as_slice(), k)
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let f = c as f64 / n as f64;
                f * f.ln()
            })
            .sum()
    };
    let apen = phi(m) - phi(m + 1);
    let chi2 = 2.0 * n as f64 * (std::f64::consts::LN_2 - apen);
    igamc((1 << (m - 1)) as f64, chi2 / 2.0)
}

/// Serial test with block length `m >= 3`; returns the two p-values.
pub fn serial(bits: &BitString, m: usize) -> (f64, f64) {
    let n = bits.len() as f64;
    let psi2 = |k: usize| -> f64 {
        if k == 0 {
            return 0.0;
        }
        let sum: f64 = pattern_counts(bits.as_slice(), k)
            .iter()
            .map(|&c| (c as f64) * (c as f64))
            .sum();
        (1u64 << k) as f64 / n * sum - n
    };
    let (p_m, p_m1, p_m2) = (psi2(m), psi2(m - 1), psi2(m - 2));
    let d1 = p_m - p_m1;
    let d2 = p_m - 2.0 * p_m1 + p_m2;
    (
        igamc((1u64 << (m - 2)) as f64, d1 / 2.0),
        igamc((1u64 << (m - 3)) as f64, d2 / 2.0),
    )
}

/// Pass proportion over `n` sequences against the acceptance band
/// `(1 - lambda) - 3 sqrt(lambda (1 - lambda) / n)`.
pub fn proportion(passes: usize, n: usize, lambda: f64) -> (f64, f64, bool) {
    let prop = passes as f64 / n as f64;
    let lower = (1.0 - lambda) - 3.0 * (lambda * (1.0 - lambda) / n as f64).sqrt();
    (prop, lower, prop >= lower)
}

fn computed(name: &str, p_value: f64, lambda: f64) -> NistResult {
    NistResult {
        name: name.to_string(),
        outcome: TestOutcome::Computed {
            p_value,
            pass: p_value >= lambda,
        },
    }
}

fn skipped(name: &str, reason: impl Into<String>) -> NistResult {
    NistResult {
        name: name.to_string(),
        outcome: TestOutcome::Skipped {
            skipped: reason.into(),
        },
    }
}

/// Runs the full in-process subset on one bit stream. Tests whose minimum
/// input size or block-length constraints cannot be met are reported as
/// skipped rather than failed.
pub fn nist_subset(bits: &BitString, cfg: &NistConfig) -> Result<Vec<NistResult>> {
    let n = bits.len();
    if n < 100 {
        return Err(Error::SequenceTooShort { len: n, min: 100 });
    }
    let log2n = (usize::BITS - 1 - n.leading_zeros()) as usize;
    let mut out = Vec::with_capacity(9);

    out.push(computed("Frequency Monobit", monobit(bits), cfg.lambda));

    // 20 <= M <= n/100 per the parameter table; shrink toward 20 on short
    // inputs.
    let block_m = cfg.block_m.clamp(20, (n / 100).max(20));
    if n / block_m >= 1 {
        out.push(computed(
            "Block Frequency",
            block_frequency(bits, block_m),
            cfg.lambda,
        ));
    } else {
        out.push(skipped("Block Frequency", format!("need at least {block_m} bits")));
    }

    out.push(computed("Cusum Forward", cusum(bits, true), cfg.lambda));
    out.push(computed("Cusum Reverse", cusum(bits, false), cfg.lambda));
    out.push(computed("Runs", runs(bits), cfg.lambda));

    match longest_run(bits) {
        Ok(p) => out.push(computed("Longest Runs", p, cfg.lambda)),
        Err(_) => out.push(skipped("Longest Runs", "need at least 128 bits")),
    }

    // m < floor(log2 n) - 5
    let aet_m = cfg.aet_m.min(log2n.saturating_sub(6));
    if aet_m >= 1 {
        out.push(computed(
            "Approximate Entropy",
            approximate_entropy(bits, aet_m),
            cfg.lambda,
        ));
    } else {
        out.push(skipped("Approximate Entropy", "input too short for any block length"));
    }

    // 2 < m < floor(log2 n) - 2
    let serial_m = cfg.serial_m.min(log2n.saturating_sub(3));
    if serial_m > 2 {
        let (p1, p2) = serial(bits, serial_m);
        out.push(computed("Serial 1", p1, cfg.lambda));
        out.push(computed("Serial 2", p2, cfg.lambda));
    } else {
        out.push(skipped("Serial 1", "input too short for m > 2"));
        out.push(skipped("Serial 2", "input too short for m > 2"));
    }

    Ok(out)
}
