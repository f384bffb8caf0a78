use serde::{Deserialize, Serialize};

use super::ExponentSummary;
use crate::primes::{isqrt, primes_up_to};
use crate::{Error, Result};

/// Histogram slots: exponents of a `u64` never exceed 63.
pub const HISTOGRAM_LEN: usize = 64;

const NO_SLOT: u8 = u8::MAX;

/// Tunables for the segmented scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Integers per segment.
    pub segment_len: usize,
    /// Worker threads; 1 runs on the calling thread.
    pub workers: usize,
    /// The `k` values whose `ω_k(n)` is recorded in emitted summaries.
    pub omega_ks: Vec<u32>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { segment_len: 1 << 20, workers: 1, omega_ks: Vec::new() }
    }
}

impl ScanConfig {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_omega_ks(mut self, ks: &[u32]) -> Self {
        self.omega_ks = ks.to_vec();
        self
    }

    pub fn with_segment_len(mut self, len: usize) -> Self {
        self.segment_len = len;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.segment_len == 0 || self.workers == 0 {
            return Err(Error::InvalidArgument("segment length and worker count must be positive".into()));
        }
        if let Some(&k) = self.omega_ks.iter().find(|&&k| !(2..HISTOGRAM_LEN as u32).contains(&k)) {
            return Err(Error::InvalidK(k));
        }
        Ok(())
    }
}

/// Exact integer sums of `M`, `M²`, `m`, `m²` and value histograms over a range.
///
/// Merging is commutative and associative, so any split of a range into
/// segments folds to the same state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentAccumulator {
    pub count: u64,
    pub sum_max: u128,
    pub sum_max_sq: u128,
    pub sum_min: u128,
    pub sum_min_sq: u128,
    /// `hist_max[k] = #{n : M(n) = k}`.
    pub hist_max: Vec<u64>,
    /// `hist_min[k] = #{n : m(n) = k}`.
    pub hist_min: Vec<u64>,
}

impl Default for MomentAccumulator {
    fn default() -> Self {
        Self {
            count: 0,
            sum_max: 0,
            sum_max_sq: 0,
            sum_min: 0,
            sum_min_sq: 0,
            hist_max: vec![0; HISTOGRAM_LEN],
            hist_min: vec![0; HISTOGRAM_LEN],
        }
    }
}

impl MomentAccumulator {
    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum_max += other.sum_max;
        self.sum_max_sq += other.sum_max_sq;
        self.sum_min += other.sum_min;
        self.sum_min_sq += other.sum_min_sq;
        for (a, b) in self.hist_max.iter_mut().zip(&other.hist_max) {
            *a += b;
        }
        for (a, b) in self.hist_min.iter_mut().zip(&other.hist_min) {
            *a += b;
        }
    }

    pub fn push(&mut self, max_exp: u32, min_exp: u32) {
        let (big, small) = (max_exp as u128, min_exp as u128);
        self.count += 1;
        self.sum_max += big;
        self.sum_max_sq += big * big;
        self.sum_min += small;
        self.sum_min_sq += small * small;
        self.hist_max[max_exp as usize] += 1;
        self.hist_min[min_exp as usize] += 1;
    }

    /// `Σ k · hist[k]`, which must equal the direct sum.
    pub fn histogram_sum(hist: &[u64], power: u32) -> u128 {
        hist.iter().enumerate().map(|(k, &c)| (k as u128).pow(power) * c as u128).sum()
    }
}

#[derive(Clone, Copy)]
struct Cell {
    /// product of the prime powers found so far
    prod: u64,
    max: u8,
    min: u8,
}

const EMPTY: Cell = Cell { prod: 1, max: 0, min: u8::MAX };

/// Reusable per-worker segment storage.
struct Buffers {
    cells: Vec<Cell>,
    omega: Vec<u8>,
    even: Vec<u8>,
    odd: Vec<u8>,
}

impl Buffers {
    fn new() -> Self {
        Self { cells: Vec::new(), omega: Vec::new(), even: Vec::new(), odd: Vec::new() }
    }
}

/// Per-exponent slot into the recorded `ω_k` list.
struct Detail {
    slot: [u8; HISTOGRAM_LEN],
    width: usize,
}

impl Detail {
    fn new(ks: &[u32]) -> Self {
        let mut slot = [NO_SLOT; HISTOGRAM_LEN];
        for (i, &k) in ks.iter().enumerate() {
            slot[k as usize] = i as u8;
        }
        Self { slot, width: ks.len() }
    }
}

/// Factors every `n` in `[lo, lo + len)` against `primes` (all primes up to
/// the square root of the segment's top), leaving `M`, `m` and optionally the
/// `ω` detail in `buf`.
fn sieve_segment(lo: u64, len: usize, primes: &[u64], buf: &mut Buffers, detail: Option<&Detail>) {
    buf.cells.clear();
    buf.cells.resize(len, EMPTY);
    if let Some(d) = detail {
        buf.omega.clear();
        buf.omega.resize(len * d.width, 0);
        buf.even.clear();
        buf.even.resize(len, 0);
        buf.odd.clear();
        buf.odd.resize(len, 0);
    }
    let hi = lo + len as u64 - 1;
    for &p in primes {
        if p * p > hi {
            break;
        }
        let first = lo.div_ceil(p) * p;
        if first > hi {
            continue;
        }
        let mut i = (first - lo) as usize;
        let mut q = first / p;
        // q mod p, advanced incrementally
        let mut r = q % p;
        while i < len {
            let e = if r != 0 {
                1
            } else {
                let mut t = q / p;
                let mut e = 2;
                while t % p == 0 {
                    t /= p;
                    e += 1;
                }
                e
            };
            let cell = &mut buf.cells[i];
            cell.prod *= if e == 1 { p } else { p.pow(e) };
            let e8 = e as u8;
            cell.max = cell.max.max(e8);
            cell.min = cell.min.min(e8);
            if e >= 2 {
                if let Some(d) = detail {
                    if e % 2 == 0 {
                        buf.even[i] += 1;
                    } else {
                        buf.odd[i] += 1;
                    }
                    let s = d.slot[e as usize];
                    if s != NO_SLOT {
                        buf.omega[i * d.width + s as usize] += 1;
                    }
                }
            }
            i += p as usize;
            q += 1;
            r += 1;
            if r == p {
                r = 0;
            }
        }
    }
    for (i, cell) in buf.cells.iter_mut().enumerate() {
        let n = lo + i as u64;
        if cell.prod != n {
            // one prime above sqrt(hi) remains, with exponent 1
            cell.max = cell.max.max(1);
            cell.min = 1;
        }
        if cell.max == 0 {
            // n = 1
            cell.max = 1;
            cell.min = 1;
        }
    }
}

fn fold_segment(cells: &[Cell]) -> MomentAccumulator {
    let mut acc = MomentAccumulator::default();
    let (mut s_max, mut s_max2, mut s_min, mut s_min2) = (0u64, 0u64, 0u64, 0u64);
    for c in cells {
        let (big, small) = (c.max as u64, c.min as u64);
        s_max += big;
        s_max2 += big * big;
        s_min += small;
        s_min2 += small * small;
        acc.hist_max[c.max as usize] += 1;
        acc.hist_min[c.min as usize] += 1;
    }
    acc.count = cells.len() as u64;
    acc.sum_max = s_max as u128;
    acc.sum_max_sq = s_max2 as u128;
    acc.sum_min = s_min as u128;
    acc.sum_min_sq = s_min2 as u128;
    acc
}

fn check_range(lo: u64, hi: u64) -> Result<()> {
    if lo == 0 || lo > hi || hi == u64::MAX {
        return Err(Error::InvalidRange { lo, hi });
    }
    Ok(())
}

fn segments(lo: u64, hi: u64, segment_len: usize) -> Vec<(u64, usize)> {
    let step = segment_len as u64;
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(step - 1));
        out.push((start, (end - start + 1) as usize));
        start = end + 1;
    }
    out
}

/// Calls `consumer` once per `n` in `[lo, hi]`, in increasing order, with the
/// summary the trial-division oracle would produce for `cfg.omega_ks`.
pub fn segmented_scan<F>(lo: u64, hi: u64, cfg: &ScanConfig, mut consumer: F) -> Result<()>
where
    F: FnMut(&ExponentSummary),
{
    check_range(lo, hi)?;
    cfg.validate()?;
    let primes = primes_up_to(isqrt(hi));
    let detail = Detail::new(&cfg.omega_ks);
    let mut buf = Buffers::new();
    for (start, len) in segments(lo, hi, cfg.segment_len) {
        sieve_segment(start, len, &primes, &mut buf, Some(&detail));
        for (i, cell) in buf.cells.iter().enumerate() {
            let omega_counts = cfg
                .omega_ks
                .iter()
                .enumerate()
                .map(|(j, &k)| (k, buf.omega[i * detail.width + j] as u32))
                .collect();
            let summary = ExponentSummary {
                n: start + i as u64,
                max_exp: cell.max as u32,
                min_exp: cell.min as u32,
                omega_counts,
                even_high: buf.even[i] as u32,
                odd_high: buf.odd[i] as u32,
            };
            consumer(&summary);
        }
    }
    Ok(())
}

/// Exact moment sums and histograms of `M` and `m` over `[lo, hi]`.
pub fn scan_moments(lo: u64, hi: u64, cfg: &ScanConfig) -> Result<MomentAccumulator> {
    check_range(lo, hi)?;
    cfg.validate()?;
    let primes = primes_up_to(isqrt(hi));
    let units = segments(lo, hi, cfg.segment_len);
    let partials = run_units(&units, &primes, cfg.workers);
    let mut total = MomentAccumulator::default();
    for part in &partials {
        total.merge(part);
    }
    Ok(total)
}

#[cfg(feature = "parallel")]
fn run_units(units: &[(u64, usize)], primes: &[u64], workers: usize) -> Vec<MomentAccumulator> {
    use rayon::prelude::*;
    if workers > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(|| {
                units
                    .par_iter()
                    .map_init(Buffers::new, |buf, &(start, len)| {
                        sieve_segment(start, len, primes, buf, None);
                        fold_segment(&buf.cells)
                    })
                    .collect()
            });
        }
    }
    run_units_serial(units, primes)
}

#[cfg(not(feature = "parallel"))]
fn run_units(units: &[(u64, usize)], primes: &[u64], _workers: usize) -> Vec<MomentAccumulator> {
    run_units_serial(units, primes)
}

fn run_units_serial(units: &[(u64, usize)], primes: &[u64]) -> Vec<MomentAccumulator> {
    let mut buf = Buffers::new();
    units
        .iter()
        .map(|&(start, len)| {
            sieve_segment(start, len, primes, &mut buf, None);
            fold_segment(&buf.cells)
        })
        .collect()
}

/// Cumulative accumulators over `[1, x]` for each `x` in the strictly
/// increasing `checkpoints`, from a single pass.
pub fn scan_checkpoints(checkpoints: &[u64], cfg: &ScanConfig) -> Result<Vec<(u64, MomentAccumulator)>> {
    if checkpoints.is_empty() {
        return Ok(Vec::new());
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be positive and strictly increasing".into()));
    }
    let mut running = MomentAccumulator::default();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut lo = 1;
    for &x in checkpoints {
        running.merge(&scan_moments(lo, x, cfg)?);
        out.push((x, running.clone()));
        lo = x + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{exponent_summary, factorize, omega_a, ExponentSequence};

    #[test]
    fn matches_oracle_on_small_ranges_with_tiny_segments() {
        let ks = [2, 3, 4, 5, 6];
        for seg in [1usize, 7, 64, 1000] {
            let cfg = ScanConfig::default().with_segment_len(seg).with_omega_ks(&ks);
            let mut seen = 0;
            segmented_scan(1, 3000, &cfg, |s| {
                let sig = factorize(s.n).unwrap();
                assert_eq!(*s, exponent_summary(&sig, &ks), "n = {}", s.n);
                for seq in [ExponentSequence::S, ExponentSequence::E, ExponentSequence::O] {
                    assert_eq!(s.omega_a(seq), Some(omega_a(&sig, seq)));
                }
                seen += 1;
            })
            .unwrap();
            assert_eq!(seen, 3000);
        }
    }

    #[test]
    fn offset_range_near_large_values() {
        let lo = 1_000_000_000_000u64;
        let cfg = ScanConfig::default().with_segment_len(300).with_omega_ks(&[2, 3]);
        segmented_scan(lo, lo + 999, &cfg, |s| {
            assert_eq!(*s, exponent_summary(&factorize(s.n).unwrap(), &[2, 3]));
        })
        .unwrap();
    }

    #[test]
    fn histogram_examples_to_100() {
        let acc = scan_moments(1, 100, &ScanConfig::default()).unwrap();
        assert_eq!(acc.hist_max[1], 61);
        let at_least_two: u64 = acc.hist_min[2..].iter().sum();
        // the square-full n <= 100 other than 1
        assert_eq!(at_least_two + 1, 14);
        let prime = scan_moments(5, 5, &ScanConfig::default()).unwrap();
        assert_eq!((prime.sum_max, prime.sum_min, prime.count), (1, 1, 1));
    }

    #[test]
    fn rejects_bad_ranges() {
        let cfg = ScanConfig::default();
        assert!(scan_moments(0, 10, &cfg).is_err());
        assert!(scan_moments(10, 9, &cfg).is_err());
        assert!(segmented_scan(3, 2, &cfg, |_| {}).is_err());
        assert!(scan_checkpoints(&[10, 10], &cfg).is_err());
        assert!(ScanConfig::default().with_omega_ks(&[1]).validate().is_err());
    }

    #[test]
    fn accumulator_is_split_invariant() {
        let cfg = ScanConfig::default().with_segment_len(977);
        let whole = scan_moments(1, 200_000, &cfg).unwrap();
        let mut parts = scan_moments(120_001, 200_000, &cfg).unwrap();
        parts.merge(&scan_moments(1, 120_000, &cfg.clone().with_segment_len(1 << 16)).unwrap());
        assert_eq!(whole, parts);
        assert_eq!(MomentAccumulator::histogram_sum(&whole.hist_max, 1), whole.sum_max);
        assert_eq!(MomentAccumulator::histogram_sum(&whole.hist_min, 2), whole.sum_min_sq);
        let cps = scan_checkpoints(&[1000, 120_000, 200_000], &cfg).unwrap();
        assert_eq!(cps.last().unwrap().1, whole);
        assert_eq!(cps[0].1.count, 1000);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn worker_count_does_not_change_result() {
        let base = ScanConfig::default().with_segment_len(10_007);
        let one = scan_moments(1, 300_000, &base).unwrap();
        let four = scan_moments(1, 300_000, &base.clone().with_workers(4)).unwrap();
        assert_eq!(one, four);
    }
}
