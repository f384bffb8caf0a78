//! Certified Euler products `Π_p F(p^{-1/q})` for polynomial local factors
//! `F(u) = 1 + Σ_j a_j u^j` whose exponents all exceed `q`.
//!
//! The accelerated route writes `log F(u) = Σ_n c_n u^n`, peels off
//! `F(u) ≈ Π_{j<J} (1 - u^j)^{-b_j}` by Möbius inversion of
//! `n c_n = Σ_{j|n} j b_j`, and multiplies by `Π_j ζ(j/q)^{b_j}`. What remains,
//! `g(u) = log F(u) + Σ_{j<J} b_j log(1 - u^j) = O(u^J)`, is summed over
//! primes up to `P` and its tail over `p > P` is bounded coefficient-wise:
//! `|d_n|` exactly for `n <= N1`, and beyond that by the Cauchy estimate
//! `ĉ_n <= ln 2 · R^{-n}` where `V(R) = Σ |a_j| R^j = 1/2`.

use super::zeta::{zeta, zeta_minus_one};
use super::{CompensatedSum, ConstantEstimate, Method, EPS};
use crate::primes::{integer_power_tail, mobius_up_to, prime_power_tail, primes_up_to};
use crate::{Error, Result};

/// Primes multiplied explicitly by the accelerated route.
const ACCELERATED_PRIME_LIMIT: u64 = 1_000_000;

/// Local factor `1 + Σ a_j u^j` in `u = p^{-1/q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFactor {
    q: u32,
    coeffs: Vec<(u32, f64)>,
}

impl LocalFactor {
    pub fn new(q: u32, coeffs: Vec<(u32, f64)>) -> Result<Self> {
        if q == 0 || coeffs.iter().any(|&(j, a)| j <= q || !a.is_finite()) {
            return Err(Error::InvalidArgument("Euler product local factor must only carry exponents above q".into()));
        }
        let coeffs = coeffs.into_iter().filter(|&(_, a)| a != 0.0).collect();
        Ok(Self { q, coeffs })
    }

    fn degree(&self) -> u32 {
        self.coeffs.iter().map(|&(j, _)| j).max().unwrap_or(0)
    }

    fn dense(&self, len: usize) -> Vec<f64> {
        let mut a = vec![0.0; len];
        for &(j, c) in &self.coeffs {
            if (j as usize) < len {
                a[j as usize] += c;
            }
        }
        a
    }

    fn poly(&self, u: f64) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * u.powi(j as i32)).sum()
    }

    fn abs_poly(&self, u: f64) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a.abs() * u.powi(j as i32)).sum()
    }
}

/// Coefficients `c_1..c_len-1` of `log(1 + Σ a_j u^j)` from `n c_n = n a_n - Σ i c_i a_{n-i}`.
fn log_coefficients(a: &[f64]) -> Vec<f64> {
    let len = a.len();
    let mut c = vec![0.0; len];
    for n in 1..len {
        let mut acc = n as f64 * a[n];
        for i in 1..n {
            acc -= i as f64 * c[i] * a[n - i];
        }
        c[n] = acc / n as f64;
    }
    c
}

struct Peeled {
    /// `b_j` for `j < J`
    b: Vec<f64>,
    /// remainder coefficients `d_n`, `n <= N1`
    d: Vec<f64>,
}

fn peel(factor: &LocalFactor, cut: usize, top: usize) -> Peeled {
    let c = log_coefficients(&factor.dense(top + 1));
    let mu = mobius_up_to(top);
    let mut b = vec![0.0; cut];
    for j in 1..cut {
        let mut acc = 0.0;
        for d in (1..=j).filter(|d| j % d == 0) {
            acc += mu[j / d] as f64 * d as f64 * c[d];
        }
        b[j] = acc / j as f64;
    }
    let mut d = c;
    for (j, &bj) in b.iter().enumerate().skip(1) {
        if bj == 0.0 {
            continue;
        }
        let mut n = j;
        while n <= top {
            d[n] -= bj * j as f64 / n as f64;
            n += j;
        }
    }
    Peeled { b, d }
}

/// Radius `R < 1` with `Σ |a_j| R^j = 1/2`.
fn half_radius(factor: &LocalFactor) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if factor.abs_poly(1.0) <= 0.5 {
        return 1.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if factor.abs_poly(mid) <= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

struct Attempt {
    log_value: f64,
    log_error: f64,
}

fn attempt(factor: &LocalFactor, primes: &[u64], prime_limit: u64, cut: usize) -> Result<Attempt> {
    let q = factor.q as f64;
    let top = cut + 3 * factor.q as usize + 10;
    let Peeled { b, d } = peel(factor, cut, top);

    // the peeled zeta factors
    let mut log_value = 0.0;
    let mut log_error = 0.0;
    for (j, &bj) in b.iter().enumerate() {
        if bj == 0.0 {
            continue;
        }
        let s = j as f64 / q;
        let (ln_zeta, err) = if s >= 2.0 {
            let t = zeta_minus_one(s)?;
            (t.value.ln_1p(), t.error_bound / (1.0 + t.value - t.error_bound))
        } else {
            let z = zeta(s)?;
            (z.value.ln(), z.error_bound / (z.value - z.error_bound))
        };
        log_value += bj * ln_zeta;
        log_error += bj.abs() * (err + 2.0 * EPS * ln_zeta.abs());
    }

    // explicit primes; each term carries about `2 top` roundings from `u^j`
    let peeled: Vec<(i32, f64)> = b.iter().enumerate().filter(|(_, &bj)| bj != 0.0).map(|(j, &bj)| (j as i32, bj)).collect();
    let mut sum = CompensatedSum::default();
    let mut magnitude = 0.0;
    for &p in primes.iter().rev() {
        let u = (p as f64).powf(-1.0 / q);
        let lf = factor.poly(u).ln_1p();
        let mut g = lf;
        let mut mag = lf.abs();
        for &(j, bj) in &peeled {
            let t = bj * (-u.powi(j)).ln_1p();
            g += t;
            mag += t.abs();
        }
        sum.add(g);
        magnitude += mag;
    }
    log_value += sum.value();
    log_error += sum.rounding_bound() + 2.0 * (top as f64 + 8.0) * EPS * magnitude;

    // tail over p > P
    let u_top = (prime_limit as f64).powf(-1.0 / q);
    let radius = half_radius(factor);
    if u_top >= radius {
        return Err(Error::InvalidArgument("prime limit too small for the tail estimate".into()));
    }
    let mut tail = 0.0;
    for (n, &dn) in d.iter().enumerate().skip(cut) {
        if dn != 0.0 {
            tail += dn.abs() * prime_power_tail(prime_limit, n as f64 / q);
        }
    }
    let beyond = (top + 1) as f64;
    let b_abs: f64 = b.iter().map(|x| x.abs()).sum();
    let majorant = std::f64::consts::LN_2 * radius.powf(-beyond) / (1.0 - u_top / radius) + b_abs / (1.0 - u_top);
    tail += majorant * prime_power_tail(prime_limit, beyond / q);
    log_error += tail;
    Ok(Attempt { log_value, log_error })
}

fn exp_estimate(log_value: f64, log_error: f64, method: Method) -> ConstantEstimate {
    let value = log_value.exp();
    let error = value * log_error.exp_m1() + 4.0 * EPS * value;
    ConstantEstimate::new(value, error, method)
}

/// `Π_p F(p^{-1/q})` to absolute error at most `tol`.
pub fn euler_product(factor: &LocalFactor, tol: f64) -> Result<ConstantEstimate> {
    super::check_tol(tol)?;
    if factor.coeffs.is_empty() {
        return Ok(ConstantEstimate::new(1.0, 0.0, Method::EulerProduct));
    }
    let primes = primes_up_to(ACCELERATED_PRIME_LIMIT);
    let q = factor.q as usize;
    for cut in (q + 2)..=(8 * q).max(factor.degree() as usize + 2) {
        let a = attempt(factor, &primes, ACCELERATED_PRIME_LIMIT, cut)?;
        let est = exp_estimate(a.log_value, a.log_error, Method::EulerProduct);
        if est.error_bound <= tol {
            return Ok(est);
        }
    }
    Err(Error::ToleranceUnreachable { what: "Euler product".into(), tol })
}

/// Plain truncated product over `p <= prime_limit`.
///
/// The tail uses `|log(1 + v)| <= |v| / (1 - |v|)` and
/// `Σ_{p>P} p^{-a} <= ∫_P^∞ t^{-a} dt`.
pub fn euler_product_truncated(factor: &LocalFactor, prime_limit: u64) -> Result<ConstantEstimate> {
    if prime_limit < 2 {
        return Err(Error::InvalidArgument("prime limit must be at least 2".into()));
    }
    let q = factor.q as f64;
    let mut sum = CompensatedSum::default();
    let mut magnitude = 0.0;
    for &p in primes_up_to(prime_limit).iter().rev() {
        let t = factor.poly((p as f64).powf(-1.0 / q)).ln_1p();
        sum.add(t);
        magnitude += t.abs();
    }
    let v_top = factor.abs_poly((prime_limit as f64).powf(-1.0 / q));
    if v_top >= 1.0 {
        return Err(Error::InvalidArgument("prime limit too small for the tail estimate".into()));
    }
    let tail: f64 = factor.coeffs.iter().map(|&(j, a)| a.abs() * integer_power_tail(prime_limit, j as f64 / q)).sum::<f64>() / (1.0 - v_top);
    let rounding = sum.rounding_bound() + 2.0 * (factor.degree() as f64 + 8.0) * EPS * magnitude;
    Ok(exp_estimate(sum.value(), tail + rounding, Method::EulerProduct))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_coefficients_of_simple_factor() {
        // log(1 + u^3) = u^3 - u^6/2 + u^9/3 - ...
        let mut a = vec![0.0; 13];
        a[3] = 1.0;
        let c = log_coefficients(&a);
        assert_eq!(c[3], 1.0);
        assert_eq!(c[6], -0.5);
        assert!((c[9] - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(c[4], 0.0);
    }

    #[test]
    fn peeling_leaves_high_order_remainder() {
        let f = LocalFactor::new(3, vec![(4, 1.0), (5, 1.0)]).unwrap();
        let Peeled { d, .. } = peel(&f, 11, 30);
        for (n, dn) in d.iter().enumerate().take(11) {
            assert!(dn.abs() < 1e-14, "d_{n} = {dn}");
        }
        assert!(d[11..].iter().any(|x| x.abs() > 1e-3));
    }

    #[test]
    fn reproduces_zeta_ratios() {
        // Π (1 + p^{-3/2}) = ζ(3/2)/ζ(3)
        let f = LocalFactor::new(2, vec![(3, 1.0)]).unwrap();
        let prod = euler_product(&f, 1e-12).unwrap();
        assert!(prod.contains(2.173_254_312_519_554_1), "{prod:?}");
        // Π (1 - p^{-2}) = 1/ζ(2)
        let g = LocalFactor::new(3, vec![(6, -1.0)]).unwrap();
        let prod = euler_product(&g, 1e-12).unwrap();
        assert!(prod.contains(0.607_927_101_854_026_6), "{prod:?}");
    }

    #[test]
    fn truncated_route_brackets_accelerated_value() {
        let f = LocalFactor::new(3, vec![(4, 1.0), (5, 1.0)]).unwrap();
        let fast = euler_product(&f, 1e-11).unwrap();
        let slow = euler_product_truncated(&f, 1_000_000).unwrap();
        assert!(fast.agrees_with(&slow), "{fast:?} vs {slow:?}");
        let slower = euler_product_truncated(&f, 100_000).unwrap();
        assert!(slower.agrees_with(&slow));
        assert!(slower.error_bound > slow.error_bound);
    }

    #[test]
    fn rejects_divergent_factors() {
        assert!(LocalFactor::new(2, vec![(2, 1.0)]).is_err());
        assert!(LocalFactor::new(0, vec![(2, 1.0)]).is_err());
    }
}
