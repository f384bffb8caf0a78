//! Exact counts of k-free integers `S_k(x)` and k-full integers `N_k(x)`.
//!
//! The integer 1 is both k-free and k-full, so every count is at least 1.

use serde::{Deserialize, Serialize};

use crate::primes::{iroot, mobius_up_to, primes_up_to};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountKind {
    KFree,
    KFull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    Sieve,
    MoebiusFormula,
    Enumeration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub x: u64,
    pub k: u32,
    pub kind: CountKind,
    pub count: u64,
    pub method: CountMethod,
}

fn check(x: u64, k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    if x == 0 {
        return Err(Error::ZeroArgument);
    }
    Ok(())
}

const SIEVE_BLOCK: u64 = 1 << 20;

/// `S_k(x)` by striking out multiples of `p^k` for every prime `p <= x^{1/k}`.
pub fn count_k_free_sieve(x: u64, k: u32) -> Result<CountReport> {
    check(x, k)?;
    let powers: Vec<u64> = primes_up_to(iroot(x, k)).into_iter().map(|p| p.pow(k)).collect();
    let mut struck = vec![false; SIEVE_BLOCK.min(x) as usize];
    let mut count = 0u64;
    let mut lo = 1u64;
    while lo <= x {
        let hi = x.min(lo + SIEVE_BLOCK - 1);
        let len = (hi - lo + 1) as usize;
        struck[..len].fill(false);
        for &q in &powers {
            let mut m = lo.div_ceil(q) * q;
            while m <= hi {
                struck[(m - lo) as usize] = true;
                m += q;
            }
        }
        count += struck[..len].iter().filter(|&&s| !s).count() as u64;
        lo = hi + 1;
    }
    Ok(CountReport { x, k, kind: CountKind::KFree, count, method: CountMethod::Sieve })
}

/// `S_k(x) = Σ_{d <= x^{1/k}} μ(d) ⌊x / d^k⌋`.
pub fn count_k_free_moebius(x: u64, k: u32) -> Result<CountReport> {
    check(x, k)?;
    let limit = iroot(x, k);
    let mu = mobius_up_to(limit as usize);
    let mut total: i128 = 0;
    for (d, &m) in mu.iter().enumerate().skip(1) {
        if m != 0 {
            total += m as i128 * (x / (d as u64).pow(k)) as i128;
        }
    }
    Ok(CountReport { x, k, kind: CountKind::KFree, count: total as u64, method: CountMethod::MoebiusFormula })
}

/// Visits every k-full `n <= x` (1 first) with its factorization.
///
/// Depth-first over increasing primes; each prime enters with exponent
/// `k..=⌊log x / log p⌋` and the branch is pruned once the product would
/// exceed `x`.
pub fn for_each_k_full<F>(x: u64, k: u32, mut visit: F) -> Result<()>
where
    F: FnMut(u64, &[(u64, u32)]),
{
    check(x, k)?;
    let primes = primes_up_to(iroot(x, k));
    let mut stack = Vec::new();
    descend(&primes, 0, 1, x, k, &mut stack, &mut visit);
    Ok(())
}

fn descend<F>(primes: &[u64], from: usize, prod: u64, x: u64, k: u32, stack: &mut Vec<(u64, u32)>, visit: &mut F)
where
    F: FnMut(u64, &[(u64, u32)]),
{
    visit(prod, stack);
    let room = x / prod;
    for (idx, &p) in primes.iter().enumerate().skip(from) {
        let Some(pk) = p.checked_pow(k).filter(|&pk| pk <= room) else {
            break;
        };
        let mut value = prod * pk;
        let mut e = k;
        loop {
            stack.push((p, e));
            descend(primes, idx + 1, value, x, k, stack, visit);
            stack.pop();
            if value > x / p {
                break;
            }
            value *= p;
            e += 1;
        }
    }
}

/// `N_k(x)` by enumeration.
pub fn count_k_full(x: u64, k: u32) -> Result<CountReport> {
    let mut count = 0u64;
    for_each_k_full(x, k, |_, _| count += 1)?;
    Ok(CountReport { x, k, kind: CountKind::KFull, count, method: CountMethod::Enumeration })
}

/// `S_k(x)` with the bookkeeping convention `S_1(x) = 1`.
pub fn k_free_with_convention(x: u64, k: u32) -> Result<u64> {
    if k == 1 {
        return Ok(1);
    }
    Ok(count_k_free_moebius(x, k)?.count)
}

/// `N_k(x)` with the bookkeeping convention `N_1(x) = x`.
pub fn k_full_with_convention(x: u64, k: u32) -> Result<u64> {
    if k == 1 {
        return Ok(x);
    }
    Ok(count_k_full(x, k)?.count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::factorize;

    fn brute(x: u64, k: u32) -> (u64, u64) {
        let mut free = 0;
        let mut full = 0;
        for n in 1..=x {
            let sig = factorize(n).unwrap();
            if sig.exponents().all(|e| e < k) {
                free += 1;
            }
            if sig.exponents().all(|e| e >= k) {
                full += 1;
            }
        }
        (free, full)
    }

    #[test]
    fn small_examples_match_brute_force() {
        assert_eq!(brute(100, 2), (61, 14));
        assert_eq!(count_k_free_sieve(100, 2).unwrap().count, 61);
        assert_eq!(count_k_full(100, 2).unwrap().count, 14);
        let (free4, _) = brute(100, 4);
        assert_eq!(free4, 93);
        assert_eq!(count_k_free_sieve(100, 4).unwrap().count, 93);
        assert_eq!(count_k_free_moebius(2, 2).unwrap().count, 2);
        for k in 2..6 {
            assert_eq!(count_k_free_sieve(1, k).unwrap().count, 1);
            assert_eq!(count_k_full(1, k).unwrap().count, 1);
        }
    }

    #[test]
    fn enumerated_square_full_list() {
        let mut seen = Vec::new();
        for_each_k_full(100, 2, |n, f| {
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            seen.push(n);
        })
        .unwrap();
        seen.sort_unstable();
        assert_eq!(seen, [1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100]);
    }

    #[test]
    fn methods_agree_against_brute_force() {
        for x in [1u64, 2, 3, 10, 97, 1000, 4096, 5000] {
            for k in 2..=5 {
                let (free, full) = brute(x, k);
                assert_eq!(count_k_free_sieve(x, k).unwrap().count, free, "x={x} k={k}");
                assert_eq!(count_k_free_moebius(x, k).unwrap().count, free, "x={x} k={k}");
                assert_eq!(count_k_full(x, k).unwrap().count, full, "x={x} k={k}");
            }
        }
    }

    #[test]
    fn monotone_in_k() {
        for x in [50u64, 999, 65_536, 1_000_003] {
            for k in 2..=6 {
                assert!(count_k_free_moebius(x, k).unwrap().count <= count_k_free_moebius(x, k + 1).unwrap().count);
                assert!(count_k_full(x, k + 1).unwrap().count <= count_k_full(x, k).unwrap().count);
            }
        }
    }

    #[test]
    fn rejects_invalid_arguments() {
        assert_eq!(count_k_free_sieve(10, 1), Err(Error::InvalidK(1)));
        assert_eq!(count_k_free_moebius(10, 0), Err(Error::InvalidK(0)));
        assert_eq!(count_k_full(10, 1), Err(Error::InvalidK(1)));
        assert_eq!(count_k_full(0, 2), Err(Error::ZeroArgument));
    }

    #[test]
    fn large_k_full_counts_do_not_overflow() {
        // 2^63 is the only 63-full number above 1 below 2^64
        assert_eq!(count_k_full(u64::MAX, 63).unwrap().count, 2);
        assert!(count_k_full(1_000_000_000_000_000, 3).unwrap().count > 400_000);
    }
}
