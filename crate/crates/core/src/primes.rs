//! Small prime utilities shared by the scan, the counters and the constants.

/// Upper bound constant in `π(x) < 1.25506 x / ln x` (x > 1), Rosser and Schoenfeld.
const PI_UPPER: f64 = 1.25506;

/// All primes `<= limit`, from an odd-only bit-packed sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // bit i stands for the odd number 2i + 1
    let odd_count = (limit as usize - 1) / 2 + 1;
    let mut composite = vec![0u64; odd_count.div_ceil(64)];
    let mut i = 1usize;
    loop {
        let p = 2 * i + 1;
        if p * p > limit as usize {
            break;
        }
        if composite[i >> 6] & (1 << (i & 63)) == 0 {
            let mut j = p * p / 2;
            while j < odd_count {
                composite[j >> 6] |= 1 << (j & 63);
                j += p;
            }
        }
        i += 1;
    }
    let estimate = (limit as f64 / (limit as f64).ln().max(1.0) * 1.3) as usize + 8;
    let mut primes = Vec::with_capacity(estimate);
    primes.push(2);
    for (w, &word) in composite.iter().enumerate() {
        let mut free = !word;
        while free != 0 {
            let bit = free.trailing_zeros() as usize;
            free &= free - 1;
            let idx = (w << 6) + bit;
            if idx == 0 || idx >= odd_count {
                continue;
            }
            primes.push(2 * idx as u64 + 1);
        }
    }
    primes
}

/// Möbius function `μ(0..=limit)` by a linear sieve; `μ(0)` is reported as 0.
pub fn mobius_up_to(limit: usize) -> Vec<i8> {
    let mut mu = vec![0i8; limit + 1];
    if limit == 0 {
        return mu;
    }
    mu[1] = 1;
    let mut is_comp = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !is_comp[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            is_comp[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// `floor(sqrt(n))`, exact for every `u64`.
pub fn isqrt(n: u64) -> u64 {
    iroot(n, 2)
}

/// `floor(n^(1/k))`, exact for every `u64` and `k >= 1`.
pub fn iroot(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64) as u64;
    // float guess can be off by one in either direction
    while r > 0 && checked_pow(r, k).is_none_or(|v| v > n) {
        r -= 1;
    }
    while checked_pow(r + 1, k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

/// `base^exp` or `None` on overflow.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Upper bound on `Σ_{n > limit} n^{-a}` over all integers, from `∫_limit^∞ t^{-a} dt`.
pub fn integer_power_tail(limit: u64, a: f64) -> f64 {
    assert!(a > 1.0 && limit >= 1);
    (limit as f64).powf(1.0 - a) / (a - 1.0)
}

/// Upper bound on `Σ_{p > limit} p^{-a}` over primes.
///
/// Partial summation against `π(t) < 1.25506 t / ln t` gives
/// `a · 1.25506 / ((a - 1) ln P) · P^{1-a}`. Valid for `limit >= 2`.
pub fn prime_power_tail(limit: u64, a: f64) -> f64 {
    assert!(a > 1.0 && limit >= 2);
    let p = limit as f64;
    PI_UPPER * a / ((a - 1.0) * p.ln()) * p.powf(1.0 - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_primes(limit: u64) -> Vec<u64> {
        (2..=limit).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
    }

    #[test]
    fn sieve_matches_trial_division() {
        for limit in [0, 1, 2, 3, 4, 63, 64, 65, 127, 128, 129, 1000, 4099] {
            assert_eq!(primes_up_to(limit), trial_primes(limit), "limit {limit}");
        }
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
    }

    #[test]
    fn mobius_small_values() {
        let mu = mobius_up_to(30);
        let expected = [0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0, -1, 1, 1, 0, -1, 0, -1, 0, 1, 1, -1, 0, 0, 1, 0, 0, -1, -1];
        assert_eq!(mu, expected);
    }

    #[test]
    fn roots_are_exact_at_boundaries() {
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
        assert_eq!(isqrt(99), 9);
        assert_eq!(isqrt(100), 10);
        assert_eq!(iroot(1_000_000, 3), 100);
        assert_eq!(iroot(999_999, 3), 99);
        assert_eq!(iroot(u64::MAX, 3), 2_642_245);
        assert_eq!(iroot(1 << 62, 62), 2);
        assert_eq!(iroot(5, 64), 1);
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let primes = primes_up_to(10_000);
        for n in 0..10_000u64 {
            assert_eq!(is_prime(n), primes.binary_search(&n).is_ok(), "n = {n}");
        }
        assert!(is_prime(9_007_199_254_740_881));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn prime_tail_bound_dominates_direct_sum() {
        let primes = primes_up_to(2_000_000);
        for (limit, a) in [(1000u64, 2.0), (10_000, 1.5), (100, 3.0), (50_000, 4.0 / 3.0)] {
            let partial: f64 = primes.iter().filter(|&&p| p > limit).map(|&p| (p as f64).powf(-a)).sum();
            assert!(partial < prime_power_tail(limit, a), "limit {limit} a {a}");
            assert!(prime_power_tail(limit, a) < integer_power_tail(limit, a));
        }
    }
}
