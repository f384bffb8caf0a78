//! Limiting densities `e_{A,m}` of `{n : ω_A(n) = m}`.
//!
//! For 0/1 sequences the events "the exponent of `p` in `n` has `a_j = 1`"
//! are independent across primes in natural density, each with probability
//! `q_p = seq.prime_density(p)`. Hence
//! `Σ_m e_{A,m} z^m = Π_p (1 + (z - 1) q_p)`, a Poisson-binomial law, and the
//! coefficients come from a polynomial product over `p <= P`. Primes above
//! `P` change the law by at most `τ = Σ_{p>P} q_p` in total variation.
//!
//! The second route sums `(6/π²) (1/l) Π_{p|l} (1 + 1/p)^{-1}` over
//! square-full `l <= L` with `ω_A(l) = m`.

use super::zeta::zeta;
use super::{ConstantEstimate, Method, EPS};
use crate::counting::for_each_k_full;
use crate::exponents::ExponentSequence;
use crate::primes::{prime_power_tail, primes_up_to};
use crate::{Error, Result};

/// Highest `m` carried. Mass above it is below `μ^{25}/25!` (under `1e-30` for every
/// supported sequence, whose means are below `0.46`).
pub const MAX_DEGREE: usize = 24;
const MIN_PRIME_LIMIT: u64 = 1 << 12;
/// Largest prime limit the adaptive constructor will sieve to.
pub const MAX_PRIME_LIMIT: u64 = 1 << 26;

/// `ζ(3/2)` rounded up. Square-full numbers satisfy `N_2(t) <= ζ(3/2) √t`: each is uniquely `a² b³`
/// with `b` squarefree, so `N_2(t) <= Σ_b √(t / b³) <= ζ(3/2) √t`.
pub const SQUARE_FULL_CONSTANT: f64 = 2.612_375_35;

/// The law of `ω_A(n)` truncated to primes `p <= prime_limit`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaDensity {
    seq: ExponentSequence,
    prime_limit: u64,
    coeffs: Vec<f64>,
    /// `Σ_{m>=n} c_m`
    suffix: Vec<f64>,
    /// bound on `Σ_{p>P} q_p`
    truncation: f64,
    /// relative rounding bound of the product
    rounding: f64,
    /// `Σ_{p<=P} q_p`
    partial_mean: f64,
}

impl OmegaDensity {
    /// Product over `p <= prime_limit`.
    pub fn with_prime_limit(seq: ExponentSequence, prime_limit: u64) -> Result<Self> {
        if prime_limit < 2 {
            return Err(Error::InvalidArgument("prime limit must be at least 2".into()));
        }
        let primes = primes_up_to(prime_limit);
        let mut c = vec![0.0f64; MAX_DEGREE + 1];
        c[0] = 1.0;
        let mut degree = 0;
        let mut partial_mean = 0.0;
        // largest primes first: small q_p barely move c, so rounding stays relative
        for &p in primes.iter().rev() {
            let q = seq.prime_density(p);
            partial_mean += q;
            degree = (degree + 1).min(MAX_DEGREE);
            for m in (1..=degree).rev() {
                c[m] = c[m] * (1.0 - q) + c[m - 1] * q;
            }
            c[0] *= 1.0 - q;
        }
        let mut suffix = vec![0.0; MAX_DEGREE + 2];
        for m in (0..=MAX_DEGREE).rev() {
            suffix[m] = suffix[m + 1] + c[m];
        }
        let truncation = prime_power_tail(prime_limit, seq.leading_exponent() as f64);
        let rounding = 4.0 * (primes.len() as f64 + MAX_DEGREE as f64) * EPS;
        Ok(Self { seq, prime_limit, coeffs: c, suffix, truncation, rounding, partial_mean })
    }

    /// Chooses the prime limit so that the truncation is at most `tol / 2`.
    pub fn new(seq: ExponentSequence, tol: f64) -> Result<Self> {
        super::check_tol(tol)?;
        let lead = seq.leading_exponent() as f64;
        let mut limit = MIN_PRIME_LIMIT;
        while prime_power_tail(limit, lead) > tol / 2.0 {
            if limit >= MAX_PRIME_LIMIT {
                return Err(Error::ToleranceUnreachable { what: format!("e_{{{},m}}", seq.label()), tol });
            }
            limit *= 2;
        }
        let density = Self::with_prime_limit(seq, limit)?;
        if density.rounding > tol / 2.0 {
            return Err(Error::ToleranceUnreachable { what: format!("e_{{{},m}}", seq.label()), tol });
        }
        Ok(density)
    }

    pub fn sequence(&self) -> ExponentSequence {
        self.seq
    }

    pub fn prime_limit(&self) -> u64 {
        self.prime_limit
    }

    /// Upper bound on the mean `Σ_p q_p`.
    pub fn mean_upper(&self) -> f64 {
        self.partial_mean * (1.0 + self.rounding) + self.truncation
    }

    /// `μ^n / n!`, the union bound on `P(ω_A >= n)`.
    fn poisson_tail(&self, n: usize) -> f64 {
        let mu = self.mean_upper();
        (1..=n).fold(1.0, |acc, i| acc * mu / i as f64)
    }

    /// `e_{A,m}`.
    pub fn e(&self, m: usize) -> ConstantEstimate {
        if m > MAX_DEGREE {
            return ConstantEstimate::new(0.0, self.poisson_tail(m), Method::EulerProduct);
        }
        let c = self.coeffs[m];
        ConstantEstimate::new(c, self.truncation + self.rounding * c, Method::EulerProduct)
    }

    /// `P(ω_A >= n) = Σ_{m>=n} e_{A,m}`.
    pub fn tail(&self, n: usize) -> ConstantEstimate {
        if n > MAX_DEGREE {
            return ConstantEstimate::new(0.0, self.poisson_tail(n), Method::EulerProduct);
        }
        let s = self.suffix[n];
        let dropped = self.poisson_tail(MAX_DEGREE + 1);
        let err = if n == 0 { self.rounding * s } else { self.truncation + self.rounding * s };
        ConstantEstimate::new(s, err + dropped, Method::EulerProduct)
    }

    /// `Σ_{m<=MAX_DEGREE} e_{A,m}`, which must be 1 up to the carried error.
    pub fn total_mass(&self) -> ConstantEstimate {
        let s = self.suffix[0];
        ConstantEstimate::new(s, self.rounding * s + self.poisson_tail(MAX_DEGREE + 1), Method::EulerProduct)
    }

    /// `Σ_m m e_{A,m}` from the coefficients. Primes above the limit add
    /// exactly their `q_p` to the mean, so the truncation enters once.
    pub fn first_moment(&self) -> ConstantEstimate {
        let mut sum = 0.0;
        for m in (1..=MAX_DEGREE).rev() {
            sum += m as f64 * self.coeffs[m];
        }
        let dropped = self.poisson_tail(MAX_DEGREE + 1) * (MAX_DEGREE as f64 + 2.0);
        ConstantEstimate::new(sum, self.truncation + self.rounding * sum + dropped, Method::EulerProduct)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }
}

/// `e_{A,m}` for `m <= max_m` by enumerating square-full `l <= limit`.
///
/// The omitted `l > L` weigh at most
/// `(6/π²) Σ_{l>L, l∈N_2} 1/l <= (6/π²) ∫_L^∞ N_2(t) t^{-2} dt <= (6/π²) · 2C/√L`
/// with `C =` [`SQUARE_FULL_CONSTANT`].
pub fn e_distribution_by_enumeration(seq: ExponentSequence, limit: u64, max_m: usize) -> Result<Vec<ConstantEstimate>> {
    let inv_zeta2 = zeta(2.0)?.recip();
    let mut sums = vec![0.0f64; max_m + 1];
    let mut count = 0u64;
    for_each_k_full(limit, 2, |l, factors| {
        count += 1;
        let omega: u32 = factors.iter().map(|&(_, e)| seq.coefficient(e)).sum();
        if (omega as usize) <= max_m {
            let weight = factors.iter().fold(1.0 / l as f64, |w, &(p, _)| w * p as f64 / (p as f64 + 1.0));
            sums[omega as usize] += weight;
        }
    })?;
    let tail = inv_zeta2.value * 2.0 * SQUARE_FULL_CONSTANT / (limit as f64).sqrt();
    Ok(sums
        .into_iter()
        .map(|s| {
            let value = inv_zeta2.value * s;
            let err = inv_zeta2.error_bound * s + tail + 4.0 * (count as f64 + 8.0) * EPS * value;
            ConstantEstimate::new(value, err, Method::Enumeration)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_full_constant_is_zeta_three_halves() {
        let z = zeta(1.5).unwrap();
        assert!(SQUARE_FULL_CONSTANT >= z.value + z.error_bound);
        assert!(SQUARE_FULL_CONSTANT - z.value < 1e-8);
    }

    #[test]
    fn square_full_count_respects_constant() {
        for t in [1u64, 4, 100, 10_000, 1_000_000, 100_000_000] {
            let n = crate::counting::count_k_full(t, 2).unwrap().count as f64;
            assert!(n <= SQUARE_FULL_CONSTANT * (t as f64).sqrt(), "t={t}");
        }
    }

    #[test]
    fn squarefree_density_is_first_coefficient() {
        let d = OmegaDensity::with_prime_limit(ExponentSequence::S, 1 << 20).unwrap();
        let e0 = d.e(0);
        assert!(e0.contains(0.607_927_101_854_026_6), "{e0:?}");
        assert!(d.total_mass().contains(1.0));
    }

    #[test]
    fn product_and_enumeration_routes_agree() {
        for seq in [ExponentSequence::S, ExponentSequence::E, ExponentSequence::O, ExponentSequence::Indicator(2), ExponentSequence::Indicator(3)] {
            let fast = OmegaDensity::with_prime_limit(seq, 1 << 20).unwrap();
            let slow = e_distribution_by_enumeration(seq, 10_000_000_000, 4).unwrap();
            for (m, s) in slow.iter().enumerate() {
                assert!(fast.e(m).agrees_with(s), "{seq:?} m={m}: {:?} vs {s:?}", fast.e(m));
            }
        }
    }

    #[test]
    fn first_moment_bounds_are_consistent_across_limits() {
        let a = OmegaDensity::with_prime_limit(ExponentSequence::Indicator(2), 1 << 14).unwrap();
        let b = OmegaDensity::with_prime_limit(ExponentSequence::Indicator(2), 1 << 22).unwrap();
        assert!(a.first_moment().agrees_with(&b.first_moment()));
        assert!(b.first_moment().error_bound < a.first_moment().error_bound);
    }

    #[test]
    fn adaptive_limit_meets_tolerance() {
        let d = OmegaDensity::new(ExponentSequence::Indicator(3), 1e-9).unwrap();
        assert!(d.e(1).error_bound <= 1e-9);
        assert!(OmegaDensity::new(ExponentSequence::S, 1e-13).is_err());
    }
}
