//! Per-integer exponent statistics.
//!
//! [`factorize`] and [`exponent_summary`] form the slow trial-division
//! oracle; [`scan`] is the segmented factorization scan that must reproduce
//! the oracle exactly.

mod scan;

use serde::{Deserialize, Serialize};

pub use scan::{scan_checkpoints, scan_moments, segmented_scan, MomentAccumulator, ScanConfig, HISTOGRAM_LEN};

use crate::{Error, Result};

/// Exact factorization `n = Π p^e` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSignature {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl PrimeSignature {
    /// Builds a signature from factors, checking every invariant.
    pub fn new(n: u64, factors: Vec<(u64, u32)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroArgument);
        }
        let mut product: u64 = 1;
        let mut last = 1;
        for &(p, e) in &factors {
            if p <= last || e == 0 || !crate::primes::is_prime(p) {
                return Err(Error::InvalidArgument(format!("bad factor {p}^{e} of {n}")));
            }
            last = p;
            product = p
                .checked_pow(e)
                .and_then(|q| product.checked_mul(q))
                .ok_or_else(|| Error::InvalidArgument(format!("factors of {n} overflow")))?;
        }
        if product != n {
            return Err(Error::InvalidArgument(format!("factors multiply to {product}, not {n}")));
        }
        Ok(Self { n, factors })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn exponents(&self) -> impl Iterator<Item = u32> + '_ {
        self.factors.iter().map(|&(_, e)| e)
    }

    /// `ω(n)`, the number of distinct primes.
    pub fn distinct_primes(&self) -> u32 {
        self.factors.len() as u32
    }

    /// `Ω(n)`, the number of primes counted with multiplicity.
    pub fn total_primes(&self) -> u32 {
        self.exponents().sum()
    }
}

/// Coefficient sequence `A = (a_2, a_3, ...)` of an additive function
/// `ω_A(n) = Σ_{j>=2} a_j ω_j(n)`. All supported sequences are 0/1 valued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExponentSequence {
    /// `a_j = 1` for every `j >= 2`.
    S,
    /// `a_j = 1` for even `j`.
    E,
    /// `a_j = 1` for odd `j >= 3`.
    O,
    /// `a_j = 1` only at `j = k`; `ω_A = ω_k`.
    Indicator(u32),
}

impl ExponentSequence {
    pub fn indicator(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidK(k));
        }
        Ok(Self::Indicator(k))
    }

    /// `a_j`; zero for `j < 2`.
    pub fn coefficient(self, j: u32) -> u32 {
        if j < 2 {
            return 0;
        }
        match self {
            Self::S => 1,
            Self::E => u32::from(j.is_multiple_of(2)),
            Self::O => u32::from(j % 2 == 1),
            Self::Indicator(k) => u32::from(j == k),
        }
    }

    /// Natural density of the integers whose `p`-adic exponent `j` has `a_j = 1`,
    /// i.e. `Σ_{a_j = 1} (p^{-j} - p^{-j-1})`.
    pub fn prime_density(self, p: u64) -> f64 {
        let p = p as f64;
        match self {
            Self::S => 1.0 / (p * p),
            Self::E => 1.0 / (p * (p + 1.0)),
            Self::O => 1.0 / (p * p * (p + 1.0)),
            Self::Indicator(k) => p.powi(-(k as i32)) * (1.0 - 1.0 / p),
        }
    }

    /// Smallest exponent `j` with `a_j = 1`; `prime_density(p) <= p^{-j}`.
    pub fn leading_exponent(self) -> u32 {
        match self {
            Self::S | Self::E => 2,
            Self::O => 3,
            Self::Indicator(k) => k,
        }
    }

    pub fn label(self) -> String {
        match self {
            Self::S => "S".into(),
            Self::E => "E".into(),
            Self::O => "O".into(),
            Self::Indicator(k) => format!("indicator({k})"),
        }
    }
}

/// `M(n)`, `m(n)` and the `ω_k(n)` counts for a configured set of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentSummary {
    pub n: u64,
    pub max_exp: u32,
    pub min_exp: u32,
    /// `(k, ω_k(n))`, ordered by the configured `k` list.
    pub omega_counts: Vec<(u32, u32)>,
    /// Primes whose exponent is even (and so at least 2).
    pub even_high: u32,
    /// Primes whose exponent is odd and at least 3.
    pub odd_high: u32,
}

impl ExponentSummary {
    pub fn omega(&self, k: u32) -> Option<u32> {
        self.omega_counts.iter().find(|&&(j, _)| j == k).map(|&(_, c)| c)
    }

    /// `ω_A(n)`; `None` only for an indicator whose `k` was not configured.
    pub fn omega_a(&self, seq: ExponentSequence) -> Option<u32> {
        match seq {
            ExponentSequence::S => Some(self.even_high + self.odd_high),
            ExponentSequence::E => Some(self.even_high),
            ExponentSequence::O => Some(self.odd_high),
            ExponentSequence::Indicator(k) => self.omega(k),
        }
    }
}

/// Trial-division factorization. Rejects `n = 0`.
pub fn factorize(n: u64) -> Result<PrimeSignature> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut push = |rest: &mut u64, p: u64| {
        let mut e = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(&mut rest, 2);
    push(&mut rest, 3);
    // 6k ± 1 wheel
    let mut d = 5u64;
    while d.checked_mul(d).is_some_and(|dd| dd <= rest) {
        push(&mut rest, d);
        push(&mut rest, d + 2);
        d += 6;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(PrimeSignature { n, factors })
}

/// Summary of one signature; `M(1) = m(1) = 1`.
pub fn exponent_summary(sig: &PrimeSignature, ks: &[u32]) -> ExponentSummary {
    let max_exp = sig.exponents().max().unwrap_or(1);
    let min_exp = sig.exponents().min().unwrap_or(1);
    let omega_counts = ks.iter().map(|&k| (k, sig.exponents().filter(|&e| e == k).count() as u32)).collect();
    let even_high = sig.exponents().filter(|&e| e >= 2 && e % 2 == 0).count() as u32;
    let odd_high = sig.exponents().filter(|&e| e >= 3 && e % 2 == 1).count() as u32;
    ExponentSummary { n: sig.n, max_exp, min_exp, omega_counts, even_high, odd_high }
}

/// `ω_A(n) = Σ_j a_j ω_j(n)`.
pub fn omega_a(sig: &PrimeSignature, seq: ExponentSequence) -> u32 {
    sig.exponents().map(|e| seq.coefficient(e)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factorize_small_cases() {
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(2).unwrap().factors(), &[(2, 1)]);
        assert_eq!(factorize(1 << 63).unwrap().factors(), &[(2, 63)]);
        assert_eq!(factorize(0), Err(Error::ZeroArgument));
    }

    #[test]
    fn factorize_large_prime() {
        let n = 9_007_199_254_740_881;
        assert!(crate::primes::is_prime(n));
        assert_eq!(factorize(n).unwrap().factors(), &[(n, 1)]);
    }

    #[test]
    fn factorize_large_semiprime() {
        let (p, q) = (4_294_967_291u64, 4_294_967_279u64);
        assert_eq!(factorize(p * q).unwrap().factors(), &[(q, 1), (p, 1)]);
    }

    #[test]
    fn summary_examples() {
        let one = exponent_summary(&factorize(1).unwrap(), &[2, 3]);
        assert_eq!((one.max_exp, one.min_exp), (1, 1));
        assert_eq!(one.omega_counts, vec![(2, 0), (3, 0)]);

        let s72 = exponent_summary(&factorize(72).unwrap(), &[2, 3]);
        assert_eq!((s72.max_exp, s72.min_exp, s72.omega(2), s72.omega(3)), (3, 2, Some(1), Some(1)));

        let s12 = exponent_summary(&factorize(12).unwrap(), &[2]);
        assert_eq!((s12.max_exp, s12.min_exp, s12.omega(2)), (2, 1, Some(1)));
    }

    #[test]
    fn omega_a_examples() {
        let s12 = factorize(12).unwrap();
        assert_eq!(omega_a(&s12, ExponentSequence::S), 1);
        assert_eq!(s12.total_primes() - s12.distinct_primes(), 1);
        let one = factorize(1).unwrap();
        for seq in [ExponentSequence::S, ExponentSequence::E, ExponentSequence::O, ExponentSequence::Indicator(2)] {
            assert_eq!(omega_a(&one, seq), 0);
        }
        let eight = factorize(8).unwrap();
        assert_eq!(omega_a(&eight, ExponentSequence::O), 1);
        assert_eq!(omega_a(&eight, ExponentSequence::E), 0);
    }

    #[test]
    fn signature_constructor_checks_invariants() {
        assert!(PrimeSignature::new(12, vec![(2, 2), (3, 1)]).is_ok());
        assert!(PrimeSignature::new(12, vec![(3, 1), (2, 2)]).is_err());
        assert!(PrimeSignature::new(12, vec![(2, 1), (6, 1)]).is_err());
        assert!(PrimeSignature::new(13, vec![(2, 2), (3, 1)]).is_err());
        assert!(PrimeSignature::new(0, vec![]).is_err());
        assert!(PrimeSignature::new(1, vec![]).is_ok());
        assert!(ExponentSequence::indicator(1).is_err());
    }

    #[test]
    fn prime_density_matches_series() {
        for seq in [ExponentSequence::S, ExponentSequence::E, ExponentSequence::O, ExponentSequence::Indicator(3)] {
            for p in [2u64, 3, 7, 101] {
                let pf = p as f64;
                let series: f64 = (2..200).map(|j| seq.coefficient(j) as f64 * (pf.powi(-(j as i32)) - pf.powi(-(j as i32) - 1))).sum();
                let closed = seq.prime_density(p);
                assert!((series - closed).abs() <= 1e-15 * closed, "{seq:?} p={p}");
                assert!(closed <= pf.powi(-(seq.leading_exponent() as i32)));
            }
        }
    }

    proptest! {
        #[test]
        fn signature_invariants(n in 1u64..5_000_000) {
            let sig = factorize(n).unwrap();
            prop_assert!(PrimeSignature::new(n, sig.factors().to_vec()).is_ok());
            let s = exponent_summary(&sig, &[2, 3, 4, 5, 6]);
            prop_assert!(1 <= s.min_exp && s.min_exp <= s.max_exp);
            if n >= 2 {
                let bound = (n as f64).log2().ceil() as u32;
                prop_assert!(s.max_exp <= bound);
                let has_simple = sig.exponents().any(|e| e == 1);
                prop_assert_eq!(s.min_exp == 1, has_simple);
            }
            let weighted: u32 = (1..=64).map(|k| k * sig.exponents().filter(|&e| e == k).count() as u32).sum();
            prop_assert_eq!(weighted, sig.total_primes());
            let unweighted: u32 = (1..=64).map(|k| sig.exponents().filter(|&e| e == k).count() as u32).sum();
            prop_assert_eq!(unweighted, sig.distinct_primes());
        }
    }
}
