//! Second-stage optimizer: a (1+1) hill climb over the two objectives,
//! symbol entropy and string period. Each generation proposes one
//! crossover (a permutation of the full alphabet written into random
//! positions) and one swap mutation; a proposal is kept only if it makes
//! neither objective worse.

use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_pcg::Pcg64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::idprng::Sequence;
use crate::stats::{entropy, period, period_slice};

/// The two objective values of a candidate, plus their reported sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitnessValue {
    pub entropy: f64,
    pub period: usize,
}

impl FitnessValue {
    /// Scalar fitness f = H + T. Reported for traceability; acceptance is
    /// decided componentwise, never on this sum.
    pub fn combined(&self) -> f64 {
        self.entropy + self.period as f64
    }
}

/// Evaluates both objectives of a sequence.
pub fn evaluate(seq: &Sequence) -> FitnessValue {
    FitnessValue {
        entropy: entropy(seq),
        period: period(seq),
    }
}

/// Entropy of the most uniform histogram a length-`len` sequence over a
/// `2^m`-symbol alphabet can have: `len mod 2^m` symbols occur once more
/// than the rest. This is the reachable entropy ceiling, below `m` bits
/// whenever `2^m` does not divide `len`.
pub fn h_max(len: usize, m: u8) -> f64 {
    let k = 1u64 << m;
    let q = len as u64 / k;
    let r = len as u64 % k;
    let mut counts = vec![q; k as usize];
    for c in counts.iter_mut().take(r as usize) {
        *c += 1;
    }
    crate::stats::entropy_from_counts(&counts, len as u64)
}

/// A crossover proposal: the full alphabet `1..=2^m`, permuted, written
/// into `2^m` distinct 1-based positions. Position `positions[j]` receives
/// symbol `perm[j] - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossoverPlan {
    pub positions: Vec<usize>,
    pub perm: Vec<u32>,
}

impl CrossoverPlan {
    /// Uniformly random plan: any `2^m` distinct positions.
    pub fn random(rng: &mut impl Rng, len: usize, m: u8) -> Self {
        let k = 1usize << m;
        let positions = rand::seq::index::sample(rng, len, k)
            .into_iter()
            .map(|i| i + 1)
            .collect();
        let mut perm: Vec<u32> = (1..=k as u32).collect();
        perm.shuffle(rng);
        CrossoverPlan { positions, perm }
    }

    /// Plan whose positions target over-represented symbols: the elements
    /// that contribute least to the entropy are the ones replaced. The
    /// replacement counts come from a water-filling pass that picks the
    /// most uniform histogram reachable in one step (each symbol can gain
    /// at most the single copy the permutation writes); which occurrences
    /// of a targeted symbol give up their position stays random.
    ///
    /// A uniformly random position draw stalls well short of the entropy
    /// ceiling: hitting the exact most-uniform histogram by accident has
    /// vanishing probability once the sequence is nearly uniform. Biasing
    /// only the positions keeps every accepted step a valid crossover
    /// while making the climb terminate.
    pub fn balancing(rng: &mut impl Rng, symbols: &[u16], m: u8) -> Self {
        let k = 1usize << m;
        let len = symbols.len();
        let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &s) in symbols.iter().enumerate() {
            occurrences[s as usize].push(i + 1);
        }

        // Water-fill target counts p[s] <= c[s] + 1 summing to len, as
        // uniform as the caps allow.
        let caps: Vec<usize> = occurrences.iter().map(|o| o.len() + 1).collect();
        let q = len / k;
        let mut p: Vec<usize> = caps.iter().map(|&c| c.min(q)).collect();
        let mut leftover = len - p.iter().sum::<usize>();
        // Min-heap of (count, symbol); capped symbols drop out. Sum of the
        // caps is len + 2^m, so the fill always completes.
        let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(usize, usize)>> = (0..k)
            .filter(|&s| p[s] < caps[s])
            .map(|s| std::cmp::Reverse((p[s], s)))
            .collect();
        while leftover > 0 {
            let std::cmp::Reverse((_, s)) = heap.pop().expect("caps sum above len");
            p[s] += 1;
            leftover -= 1;
            if p[s] < caps[s] {
                heap.push(std::cmp::Reverse((p[s], s)));
            }
        }

        let mut positions = Vec::with_capacity(k);
        for s in 0..k {
            // remove[s] = c[s] + 1 - p[s] random occurrences of s.
            let remove = caps[s] - p[s];
            if remove == 0 {
                continue;
            }
            for idx in rand::seq::index::sample(rng, occurrences[s].len(), remove) {
                positions.push(occurrences[s][idx]);
            }
        }
        debug_assert_eq!(positions.len(), k);

        let mut perm: Vec<u32> = (1..=k as u32).collect();
        perm.shuffle(rng);
        CrossoverPlan { positions, perm }
    }

    pub fn validate(&self, len: usize, m: u8) -> Result<()> {
        let k = 1usize << m;
        if self.positions.len() != k || self.perm.len() != k {
            return Err(Error::InvalidPlan(format!(
                "plan must carry exactly {k} positions and {k} symbols"
            )));
        }
        if self.positions.iter().any(|&v| v < 1 || v > len) {
            return Err(Error::InvalidPlan(format!(
                "positions must lie in [1, {len}]"
            )));
        }
        let mut seen = vec![false; len + 1];
        for &v in &self.positions {
            if seen[v] {
                return Err(Error::InvalidPlan(format!("duplicate position {v}")));
            }
            seen[v] = true;
        }
        let mut seen = vec![false; k + 1];
        for &s in &self.perm {
            if !(1..=k as u32).contains(&s) || seen[s as usize] {
                return Err(Error::InvalidPlan(format!(
                    "perm must be a permutation of 1..={k}"
                )));
            }
            seen[s as usize] = true;
        }
        Ok(())
    }
}

/// Applies a crossover plan to a copy of `seq`.
pub fn crossover(seq: &Sequence, plan: &CrossoverPlan) -> Result<Sequence> {
    let k = 1usize << seq.m();
    if seq.len() < k {
        return Err(Error::SequenceTooShort {
            len: seq.len(),
            min: k,
        });
    }
    plan.validate(seq.len(), seq.m())?;
    let mut symbols = seq.symbols().to_vec();
    for (&pos, &sym) in plan.positions.iter().zip(&plan.perm) {
        symbols[pos - 1] = (sym - 1) as u16;
    }
    Sequence::new(symbols, seq.m())
}

/// Swaps the symbols at 1-based positions `i` and `j` in a copy of `seq`;
/// `i == j` leaves it unchanged. The histogram (and hence the entropy) is
/// invariant under this move.
pub fn mutate_swap(seq: &Sequence, i: usize, j: usize) -> Result<Sequence> {
    let len = seq.len();
    if i < 1 || i > len || j < 1 || j > len {
        return Err(Error::IndexOutOfRange {
            index: i.max(j),
            len,
        });
    }
    let mut symbols = seq.symbols().to_vec();
    symbols.swap(i - 1, j - 1);
    Sequence::new(symbols, seq.m())
}

#[derive(Clone, Debug)]
pub struct OptimizerConfig {
    pub max_generations: u64,
    pub rng_seed: u64,
    /// Slack on the entropy ceiling when testing for optimality.
    pub epsilon: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_generations: 1_000_000,
            rng_seed: 0,
            epsilon: 1e-9,
        }
    }
}

/// Which of a generation's two proposals were kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Accepted {
    None,
    Crossover,
    Mutation,
    Both,
}

impl Accepted {
    fn as_str(self) -> &'static str {
        match self {
            Accepted::None => "none",
            Accepted::Crossover => "crossover",
            Accepted::Mutation => "mutation",
            Accepted::Both => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TraceRecord {
    pub generation: u64,
    pub entropy: f64,
    pub period: usize,
    pub fitness: f64,
    pub accepted: Accepted,
}

/// Per-generation history of an optimization run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct OptimizationTrace {
    pub records: Vec<TraceRecord>,
}

impl OptimizationTrace {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "generation,entropy,period,fitness,accepted")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{:.12},{},{:.12},{}",
                r.generation,
                r.entropy,
                r.period,
                r.fitness,
                r.accepted.as_str()
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Entropy reached the ceiling (within epsilon) and the period equals
    /// the length.
    Optimal,
    /// The generation cap was hit first.
    CapReached,
}

#[derive(Clone, Debug)]
pub struct OptimizationOutcome {
    pub sequence: Sequence,
    pub fitness: FitnessValue,
    pub generations: u64,
    pub reason: StopReason,
    pub trace: OptimizationTrace,
}

/// Tracks the entropy of a mutable symbol buffer incrementally: adjusting
/// one count is O(1) instead of a full histogram pass.
struct EntropyTracker {
    counts: Vec<u64>,
    // sum of c * log2(c) over all counts
    acc: f64,
    total: f64,
}

impl EntropyTracker {
    fn new(symbols: &[u16], m: u8) -> Self {
        let mut counts = vec![0u64; 1 << m];
        for &s in symbols {
            counts[s as usize] += 1;
        }
        let acc = counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| (c as f64) * (c as f64).log2())
            .sum();
        EntropyTracker {
            counts,
            acc,
            total: symbols.len() as f64,
        }
    }

    fn adjust(&mut self, symbol: u16, delta: i64) {
        let c = &mut self.counts[symbol as usize];
        if *c > 0 {
            self.acc -= (*c as f64) * (*c as f64).log2();
        }
        *c = c.checked_add_signed(delta).expect("count underflow");
        if *c > 0 {
            self.acc += (*c as f64) * (*c as f64).log2();
        }
    }

    fn entropy(&self) -> f64 {
        self.total.log2() - self.acc / self.total
    }
}

/// Hill-climbs `initial` until both objectives are maximal or the
/// generation cap is hit. Deterministic for a fixed `rng_seed`.
pub fn optimize(initial: &Sequence, cfg: &OptimizerConfig) -> Result<OptimizationOutcome> {
    let len = initial.len();
    let m = initial.m();
    let k = 1usize << m;
    if len < k {
        return Err(Error::SequenceTooShort { len, min: k });
    }
    let ceiling = h_max(len, m) - cfg.epsilon;

    let mut rng = Pcg64::new(u128::from(cfg.rng_seed), 0);
    let mut symbols = initial.symbols().to_vec();
    let mut tracker = EntropyTracker::new(&symbols, m);
    let mut h = tracker.entropy();
    let mut t = period_slice(&symbols);
    let mut trace = OptimizationTrace::default();

    let mut generation = 0u64;
    let reason = loop {
        if h >= ceiling && t == len {
            break StopReason::Optimal;
        }
        if generation >= cfg.max_generations {
            break StopReason::CapReached;
        }
        generation += 1;
        let mut accepted = Accepted::None;

        // Crossover proposal: write a permuted alphabet over the currently
        // over-represented symbols, keep it only if neither objective
        // drops.
        let plan = CrossoverPlan::balancing(&mut rng, &symbols, m);
        let mut saved = Vec::with_capacity(k);
        for (&pos, &sym) in plan.positions.iter().zip(&plan.perm) {
            let idx = pos - 1;
            let old = symbols[idx];
            let new = (sym - 1) as u16;
            saved.push((idx, old));
            tracker.adjust(old, -1);
            tracker.adjust(new, 1);
            symbols[idx] = new;
        }
        let h_new = tracker.entropy();
        let t_new = period_slice(&symbols);
        if h_new >= h && t_new >= t {
            h = h_new;
            t = t_new;
            accepted = Accepted::Crossover;
        } else {
            for &(idx, old) in saved.iter().rev() {
                tracker.adjust(symbols[idx], -1);
                tracker.adjust(old, 1);
                symbols[idx] = old;
            }
        }

        // Swap mutation: entropy is invariant, so only the period gates
        // acceptance.
        let i = rng.gen_range(0..len);
        let j = loop {
            let j = rng.gen_range(0..len);
            if j != i {
                break j;
            }
        };
        symbols.swap(i, j);
        let t_new = period_slice(&symbols);
        if t_new >= t {
            t = t_new;
            accepted = if accepted == Accepted::Crossover {
                Accepted::Both
            } else {
                Accepted::Mutation
            };
        } else {
            symbols.swap(i, j);
        }

        trace.records.push(TraceRecord {
            generation,
            entropy: h,
            period: t,
            fitness: h + t as f64,
            accepted,
        });
    };

    let sequence = Sequence::new(symbols, m)?;
    // Recompute from scratch so reported values carry no accumulated
    // floating-point drift.
    let fitness = evaluate(&sequence);
    Ok(OptimizationOutcome {
        sequence,
        fitness,
        generations: generation,
        reason,
        trace,
    })
}
