//! Riemann zeta on the positive real axis with certified error bounds.
//!
//! * `s > 1`: partial sum plus an Euler-Maclaurin tail. For real `s` the
//!   remainder after the `B_{2P}` term is bounded by the first omitted term.
//! * `0 < s < 1`: the alternating series `η(s)` accelerated with Chebyshev
//!   weights (Borwein's second algorithm), then `ζ(s) = η(s) / (1 - 2^{1-s})`.
//!   Because `(k+1)^{-s}` are the moments of a positive measure on `[0, 1]`,
//!   the truncation error is at most `η(s) / d_n < 1 / d_n`.

use super::{ConstantEstimate, Method, EPS};
use crate::{Error, Result};

/// Terms summed directly before the Euler-Maclaurin tail.
const EM_CUTOFF: u32 = 16;
/// Bernoulli correction terms used; the bound uses the next one.
const EM_TERMS: usize = 9;
/// `B_2, B_4, ..., B_20`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Chebyshev terms for the eta series; `1/d_n` is then below `1e-18`.
const ETA_TERMS: u32 = 26;

fn check_domain(s: f64) -> Result<()> {
    if !s.is_finite() || s <= 0.0 || s == 1.0 {
        return Err(Error::ZetaDomain(s));
    }
    Ok(())
}

/// `ζ(s)` for real `s > 0`, `s != 1`.
pub fn zeta(s: f64) -> Result<ConstantEstimate> {
    check_domain(s)?;
    if s > 1.0 {
        let tail = zeta_minus_one(s)?;
        let value = 1.0 + tail.value;
        return Ok(ConstantEstimate::new(value, tail.error_bound + EPS * value, Method::EulerMaclaurin));
    }
    let eta = eta_accelerated(s, ETA_TERMS);
    let denom = 1.0 - (1.0 - s).exp2();
    let denom = ConstantEstimate::new(denom, 4.0 * EPS * denom.abs(), Method::ClosedForm);
    Ok(eta.div(&denom).with_method(Method::EtaContinuation))
}

/// `ζ(s) - 1` for `s > 1`, accurate in relative terms even when it is tiny.
pub fn zeta_minus_one(s: f64) -> Result<ConstantEstimate> {
    if !s.is_finite() || s <= 1.0 {
        return Err(Error::ZetaDomain(s));
    }
    Ok(euler_maclaurin_from_two(s))
}

/// `ζ(s)` from the Euler-Maclaurin formula alone, valid for all real `s > 0`,
/// `s != 1`. Used to cross-check the eta route.
pub fn zeta_euler_maclaurin(s: f64) -> Result<ConstantEstimate> {
    check_domain(s)?;
    let tail = euler_maclaurin_from_two(s);
    let value = 1.0 + tail.value;
    Ok(ConstantEstimate::new(value, tail.error_bound + EPS * value.abs(), Method::EulerMaclaurin))
}

/// `Σ_{n>=2} n^{-s}` (analytically continued when `s < 1`).
fn euler_maclaurin_from_two(s: f64) -> ConstantEstimate {
    let big_n = EM_CUTOFF as f64;
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    // smallest terms first
    for n in (2..EM_CUTOFF).rev() {
        let t = (n as f64).powf(-s);
        sum += t;
        magnitude += t;
    }
    let n_pow = big_n.powf(-s);
    let integral = big_n * n_pow / (s - 1.0);
    let half = 0.5 * n_pow;
    sum += integral + half;
    magnitude += integral.abs() + half;

    // B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
    let mut rising = s;
    let mut factorial = 2.0;
    let mut power = n_pow / big_n;
    let term_at = |j: usize, rising: f64, factorial: f64, power: f64| BERNOULLI[j] / factorial * rising * power;
    let mut omitted = 0.0;
    for j in 0..=EM_TERMS {
        let t = term_at(j, rising, factorial, power);
        if j == EM_TERMS {
            omitted = t.abs();
            break;
        }
        sum += t;
        magnitude += t.abs();
        let (a, b) = ((2 * j + 3) as f64, (2 * j + 4) as f64);
        rising *= (s + a - 2.0) * (s + a - 1.0);
        factorial *= a * b;
        power /= big_n * big_n;
    }
    let rounding = 8.0 * (EM_CUTOFF as f64 + EM_TERMS as f64) * EPS * magnitude;
    ConstantEstimate::new(sum, omitted + rounding, Method::EulerMaclaurin)
}

/// `η(s) = Σ_{k>=0} (-1)^k (k+1)^{-s}` for `s > 0`, using `n` Chebyshev-weighted terms.
pub fn eta_accelerated(s: f64, n: u32) -> ConstantEstimate {
    let nf = n as f64;
    // t_i = n (n+i-1)! 4^i / ((n-i)! (2i)!), d_k = Σ_{i<=k} t_i
    let mut t = vec![0.0f64; n as usize + 1];
    t[0] = 1.0;
    for i in 0..n as usize {
        let fi = i as f64;
        t[i + 1] = t[i] * (nf + fi) * 4.0 * (nf - fi) / ((2.0 * fi + 1.0) * (2.0 * fi + 2.0));
    }
    let d_n: f64 = t.iter().sum();
    // (d_n - d_k) as suffix sums of positive terms
    let mut suffix = vec![0.0f64; n as usize + 1];
    for k in (0..n as usize).rev() {
        suffix[k] = suffix[k + 1] + t[k + 1];
    }
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for k in (0..n as usize).rev() {
        let term = suffix[k] / d_n * ((k + 1) as f64).powf(-s);
        magnitude += term;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    // powf, the suffix weights and the running sum each cost at most about n ulps
    let rounding = (2.0 * nf + 4.0) * EPS * magnitude;
    ConstantEstimate::new(sum, 1.0 / d_n + rounding, Method::EtaContinuation)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // 40-digit references from an independent arbitrary-precision evaluation
    const REFERENCE: [(f64, f64); 11] = [
        (2.0 / 3.0, -2.447_580_736_233_658_2),
        (0.75, -3.441_285_386_945_222_9),
        (0.8, -4.437_538_415_895_550_5),
        (5.0 / 6.0, -5.435_053_237_370_820_9),
        (0.5, -1.460_354_508_809_586_8),
        (0.1, -0.603_037_519_856_241_7),
        (0.99, -99.423_512_977_728_188),
        (1.5, 2.612_375_348_685_488_3),
        (4.0 / 3.0, 3.600_937_750_458_862_4),
        (2.0, 1.644_934_066_848_226_4),
        (3.0, 1.202_056_903_159_594_3),
    ];

    #[test]
    fn matches_high_precision_references() {
        for (s, expected) in REFERENCE {
            let z = zeta(s).unwrap();
            assert!(z.contains(expected), "s={s}: {z:?} vs {expected}");
            let tol = if s > 0.95 && s < 1.0 { 1e-10 } else { 1e-12 };
            assert!(z.error_bound <= tol, "s={s}: bound {}", z.error_bound);
        }
    }

    #[test]
    fn eta_route_agrees_with_euler_maclaurin_route() {
        for i in 1..60 {
            let s = i as f64 / 30.0;
            if s == 1.0 {
                continue;
            }
            let em = zeta_euler_maclaurin(s).unwrap();
            let eta = eta_accelerated(s, ETA_TERMS);
            let via_eta = eta.div(&ConstantEstimate::new(1.0 - (1.0 - s).exp2(), 4.0 * EPS, Method::ClosedForm));
            assert!(em.agrees_with(&via_eta), "s={s}: {em:?} vs {via_eta:?}");
        }
    }

    #[test]
    fn closed_forms() {
        let pi2 = std::f64::consts::PI.powi(2);
        assert!(zeta(2.0).unwrap().contains(pi2 / 6.0));
        assert!(zeta(4.0).unwrap().contains(pi2 * pi2 / 90.0));
        let z = zeta(2.0).unwrap();
        assert!((z.value - 1.644_934_066_8).abs() < 1e-10);
    }

    #[test]
    fn tiny_tails_keep_relative_accuracy() {
        let t = zeta_minus_one(60.0).unwrap();
        let expected = 2f64.powi(-60) + 3f64.powi(-60);
        assert!((t.value - expected).abs() <= 1e-14 * expected);
        assert!(t.error_bound <= 1e-13 * expected);
    }

    #[test]
    fn negative_on_unit_interval() {
        for s in [0.05, 0.3, 2.0 / 3.0, 0.9] {
            assert!(zeta(s).unwrap().value < 0.0);
        }
    }

    #[test]
    fn domain_errors() {
        for s in [0.0, -1.0, 1.0, f64::NAN, f64::INFINITY] {
            assert!(zeta(s).is_err(), "s={s}");
        }
        assert!(zeta_minus_one(0.5).is_err());
    }
}
