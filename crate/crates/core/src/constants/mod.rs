//! Constants with certified absolute error bounds.
//!
//! Every value is a [`ConstantEstimate`]: the computed `value` and an
//! `error_bound` such that the exact constant lies in
//! `[value - error_bound, value + error_bound]`. Bounds cover truncation and a
//! conservative allowance for floating-point rounding.

mod euler;
mod omega;
mod zeta;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use euler::{euler_product, euler_product_truncated, LocalFactor};
pub use omega::{e_distribution_by_enumeration, OmegaDensity, MAX_DEGREE, MAX_PRIME_LIMIT, SQUARE_FULL_CONSTANT};
pub use zeta::{eta_accelerated, zeta, zeta_euler_maclaurin, zeta_minus_one};

use crate::distribution::ArithmeticF;
use crate::exponents::ExponentSequence;
use crate::primes::{prime_power_tail, primes_up_to};
use crate::{Error, Result};

pub(crate) const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    EulerMaclaurin,
    EtaContinuation,
    EulerProduct,
    Enumeration,
    ClosedForm,
    PrimeSum,
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub method: Method,
}

impl ConstantEstimate {
    pub fn new(value: f64, error_bound: f64, method: Method) -> Self {
        debug_assert!(error_bound >= 0.0, "negative error bound {error_bound}");
        Self { value, error_bound, method }
    }

    pub fn exact(value: f64) -> Self {
        Self::new(value, 0.0, Method::ClosedForm)
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    fn rounded(value: f64, err: f64) -> Self {
        Self::new(value, err + EPS * value.abs(), Method::Derived)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::rounded(self.value + other.value, self.error_bound + other.error_bound)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::rounded(self.value - other.value, self.error_bound + other.error_bound)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let err = self.value.abs() * other.error_bound + other.value.abs() * self.error_bound + self.error_bound * other.error_bound;
        Self::rounded(self.value * other.value, err)
    }

    /// Requires `|other| > other.error_bound`.
    pub fn div(&self, other: &Self) -> Self {
        let low = other.value.abs() - other.error_bound;
        assert!(low > 0.0, "division by an interval containing zero");
        let q = self.value / other.value;
        let err = (self.error_bound + q.abs() * other.error_bound) / low;
        Self::rounded(q, err)
    }

    pub fn recip(&self) -> Self {
        Self::exact(1.0).div(self)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::rounded(c * self.value, c.abs() * self.error_bound)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error_bound
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error_bound
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.error_bound
    }

    /// Whether the two enclosures overlap.
    pub fn agrees_with(&self, other: &Self) -> bool {
        (self.value - other.value).abs() <= self.error_bound + other.error_bound
    }
}

/// Neumaier's compensated sum. The result is within
/// `(2ε + 4nε²) Σ |x_i|` of the exact sum of the `n` inputs.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs: f64,
    n: u64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
        self.n += 1;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub(crate) fn rounding_bound(&self) -> f64 {
        (2.0 * EPS + 4.0 * self.n as f64 * EPS * EPS) * self.abs
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(())
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    Ok(())
}

/// `1 - 1/ζ(k) = (ζ(k) - 1) / ζ(k)`, accurate when tiny.
pub fn zeta_complement(k: u32) -> Result<ConstantEstimate> {
    check_k(k)?;
    let t = zeta_minus_one(k as f64)?;
    Ok(t.div(&ConstantEstimate::exact(1.0).add(&t)).with_method(Method::EulerMaclaurin))
}

/// `1 + Σ_{k>=2} w(k) (1 - 1/ζ(k))` truncated where the tail bound
/// (from `1 - 1/ζ(k) < 2^{1-k}`) drops to `tol / 2`.
fn zeta_complement_series(tol: f64, what: &str, weight: impl Fn(u32) -> f64, tail: impl Fn(u32) -> f64) -> Result<ConstantEstimate> {
    check_tol(tol)?;
    let Some(cut) = (2..=1024).find(|&k| tail(k) <= tol / 2.0) else {
        return Err(Error::ToleranceUnreachable { what: what.into(), tol });
    };
    let mut sum = 0.0;
    let mut err = tail(cut);
    for k in (2..=cut).rev() {
        let c = zeta_complement(k)?;
        let w = weight(k);
        sum += w * c.value;
        err += w * c.error_bound;
    }
    let est = ConstantEstimate::new(1.0 + sum, err + 2.0 * cut as f64 * EPS * (1.0 + sum), Method::Series);
    if est.error_bound > tol {
        return Err(Error::ToleranceUnreachable { what: what.into(), tol });
    }
    Ok(est)
}

/// `B_1 = 1 + Σ_{k>=2} (1 - 1/ζ(k))`, the mean of `M(n)`.
pub fn compute_b1(tol: f64) -> Result<ConstantEstimate> {
    // Σ_{k>K} 2^{1-k} = 2^{1-K}
    zeta_complement_series(tol, "B1", |_| 1.0, |cut| 2f64.powi(1 - cut as i32))
}

/// `B_2 = 1 + Σ_{k>=2} (2k - 1)(1 - 1/ζ(k))`, the second moment of `M(n)`.
pub fn compute_b2(tol: f64) -> Result<ConstantEstimate> {
    // Σ_{k>K} (2k-1) 2^{1-k} = (2K + 3) 2^{1-K}
    zeta_complement_series(tol, "B2", |k| (2 * k - 1) as f64, |cut| (2 * cut + 3) as f64 * 2f64.powi(1 - cut as i32))
}

/// `B_2 - B_1^2`, evaluated with tighter inputs so the result meets `tol`.
pub fn variance_m(tol: f64) -> Result<ConstantEstimate> {
    check_tol(tol)?;
    let b1 = compute_b1(tol / 8.0)?;
    let b2 = compute_b2(tol / 4.0)?;
    let var = b2.sub(&b1.square()).with_method(Method::Derived);
    if var.error_bound > tol {
        return Err(Error::ToleranceUnreachable { what: "B2 - B1^2".into(), tol });
    }
    Ok(var)
}

/// Local factor of `γ_{0,k}`: `1 + Σ_{m=k+1}^{2k-1} u^m`, `u = p^{-1/k}`.
pub fn gamma0_factor(k: u32) -> Result<LocalFactor> {
    check_k(k)?;
    LocalFactor::new(k, (k + 1..2 * k).map(|m| (m, 1.0)).collect())
}

/// Local factor of `γ_{1,k} / ζ(k/(k+1))`:
/// `1 + Σ_{m=k+2}^{2k-1} u^m - Σ_{m=2k+2}^{3k} u^m`, `u = p^{-1/(k+1)}`.
pub fn gamma1_factor(k: u32) -> Result<LocalFactor> {
    check_k(k)?;
    let plus = (k + 2..2 * k).map(|m| (m, 1.0));
    let minus = (2 * k + 2..=3 * k).map(|m| (m, -1.0));
    LocalFactor::new(k + 1, plus.chain(minus).collect())
}

/// Leading coefficient `γ_{0,k}` of `N_k(x) ~ γ_{0,k} x^{1/k}`.
pub fn gamma0(k: u32, tol: f64) -> Result<ConstantEstimate> {
    check_k(k)?;
    check_tol(tol)?;
    if k == 2 {
        // ζ(3/2) / ζ(3)
        let v = zeta(1.5)?.div(&zeta(3.0)?).with_method(Method::ClosedForm);
        return Ok(v);
    }
    euler_product(&gamma0_factor(k)?, tol)
}

/// Second coefficient `γ_{1,k}`, the factor of `x^{1/(k+1)}`.
pub fn gamma1(k: u32, tol: f64) -> Result<ConstantEstimate> {
    check_k(k)?;
    check_tol(tol)?;
    let z = zeta(k as f64 / (k as f64 + 1.0))?;
    if k == 2 {
        // ζ(2/3) / ζ(2)
        return Ok(z.div(&zeta(2.0)?).with_method(Method::ClosedForm));
    }
    let budget = (tol - z.error_bound * 8.0).max(0.0) / (2.0 * z.value.abs());
    let prod = euler_product(&gamma1_factor(k)?, budget.max(f64::MIN_POSITIVE))?;
    let v = z.mul(&prod).with_method(Method::EulerProduct);
    if v.error_bound > tol {
        return Err(Error::ToleranceUnreachable { what: format!("gamma1_{k}"), tol });
    }
    Ok(v)
}

/// `γ_{0,k}` from the plain product over `p <= prime_limit`.
pub fn gamma0_truncated(k: u32, prime_limit: u64) -> Result<ConstantEstimate> {
    euler_product_truncated(&gamma0_factor(k)?, prime_limit)
}

/// `γ_{1,k}` from the plain product over `p <= prime_limit`.
pub fn gamma1_truncated(k: u32, prime_limit: u64) -> Result<ConstantEstimate> {
    let z = zeta(k as f64 / (k as f64 + 1.0))?;
    Ok(z.mul(&euler_product_truncated(&gamma1_factor(k)?, prime_limit)?).with_method(Method::EulerProduct))
}

/// Truncation point for a `D`-type sum: the first `K >= 1` whose tail bound
/// is at most `tol / 2`.
fn d_sum(f: &ArithmeticF, tol: f64, weight: impl Fn(u64) -> f64, second: bool) -> Result<ConstantEstimate> {
    check_tol(tol)?;
    let what = if second { "D2" } else { "D1" };
    let tail = f.tail_bound().ok_or_else(|| Error::NotCertified(f.name().to_string()))?;
    let tail_after = |cut: u64| if second { tail.odd_weighted_sum_after(cut) } else { tail.sum_after(cut) };
    let Some(cut) = (1..=crate::distribution::MAX_TRUNCATION).find(|&c| tail_after(c) <= tol / 2.0) else {
        return Err(Error::ToleranceUnreachable { what: what.into(), tol });
    };
    let mut sum = 0.0;
    let mut err = tail_after(cut);
    let mut magnitude = 0.0;
    for k in 2..=cut {
        let c = f.complement(k);
        let w = weight(k);
        sum += w * c.value;
        magnitude += w * c.value.abs();
        err += w * c.error_bound;
    }
    err += 2.0 * cut as f64 * EPS * magnitude;
    if err > tol {
        return Err(Error::ToleranceUnreachable { what: what.into(), tol });
    }
    Ok(ConstantEstimate::new(sum, err, Method::Series))
}

/// `D_1 = Σ_{k>=2} (1 - f(k))`.
pub fn compute_d1(f: &ArithmeticF, tol: f64) -> Result<ConstantEstimate> {
    d_sum(f, tol, |_| 1.0, false)
}

/// `D_2 = D_1 + 2 Σ_{k>=2} (k - 1)(1 - f(k)) = Σ_{k>=2} (2k - 1)(1 - f(k))`.
pub fn compute_d2(f: &ArithmeticF, tol: f64) -> Result<ConstantEstimate> {
    d_sum(f, tol, |k| (2 * k - 1) as f64, true)
}

/// `e_{k,m}`, the density of `{n : ω_k(n) = m}`.
pub fn compute_e_km(k: u32, m: u32, tol: f64) -> Result<ConstantEstimate> {
    let density = OmegaDensity::new(ExponentSequence::indicator(k)?, tol)?;
    let e = density.e(m as usize);
    if e.error_bound > tol {
        return Err(Error::ToleranceUnreachable { what: format!("e_{{{k},{m}}}"), tol });
    }
    Ok(e)
}

/// `Σ_p g(p)` over all primes for a positive `g(p) <= p^{-a}`. The tail over
/// `p > P` lies in `[0, τ]` and is replaced by its midpoint `τ/2`.
fn prime_sum_with(tol: f64, a: f64, what: &str, g: impl Fn(f64) -> f64) -> Result<ConstantEstimate> {
    check_tol(tol)?;
    let mut limit = 1u64 << 12;
    while prime_power_tail(limit, a) / 2.0 > tol / 2.0 {
        if limit >= MAX_PRIME_LIMIT {
            return Err(Error::ToleranceUnreachable { what: what.into(), tol });
        }
        limit *= 2;
    }
    let primes = primes_up_to(limit);
    let mut sum = CompensatedSum::default();
    for &p in primes.iter().rev() {
        sum.add(g(p as f64));
    }
    let tau = prime_power_tail(limit, a);
    // each term is within a few ulps
    let rounding = sum.rounding_bound() + 8.0 * EPS * sum.value();
    let est = ConstantEstimate::new(sum.value() + tau / 2.0, tau / 2.0 + rounding, Method::PrimeSum);
    if est.error_bound > tol {
        return Err(Error::ToleranceUnreachable { what: what.into(), tol });
    }
    Ok(est)
}

/// Prime zeta `P(s) = Σ_p p^{-s}` for `s > 1`.
pub fn prime_zeta(s: f64, tol: f64) -> Result<ConstantEstimate> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::ZetaDomain(s));
    }
    prime_sum_with(tol, s, "prime zeta", |p| p.powf(-s))
}

/// `Σ_p (p - 1) / p^{k+1}`, the mean of `ω_k` in the limit.
pub fn prime_sum_mean(k: u32, tol: f64) -> Result<ConstantEstimate> {
    check_k(k)?;
    prime_sum_with(tol, k as f64, "prime sum", |p| (p - 1.0) * p.powi(-(k as i32 + 1)))
}

/// `μ(μ + 1) - P(2k) + 2 P(2k+1) - P(2k+2)` with `μ` = [`prime_sum_mean`],
/// the limiting second moment of `ω_k`.
pub fn prime_sum_second(k: u32, tol: f64) -> Result<ConstantEstimate> {
    check_k(k)?;
    check_tol(tol)?;
    let part = tol / 16.0;
    let mu = prime_sum_mean(k, part)?;
    let s = 2.0 * k as f64;
    let p0 = prime_zeta(s, part)?;
    let p1 = prime_zeta(s + 1.0, part)?;
    let p2 = prime_zeta(s + 2.0, part)?;
    let one = ConstantEstimate::exact(1.0);
    let v = mu.mul(&mu.add(&one)).sub(&p0).add(&p1.scale(2.0)).sub(&p2).with_method(Method::PrimeSum);
    if v.error_bound > tol {
        return Err(Error::ToleranceUnreachable { what: "prime sum second moment".into(), tol });
    }
    Ok(v)
}

/// Everything `maxexp constants` prints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub tol: f64,
    #[serde(rename = "B1")]
    pub b1: ConstantEstimate,
    #[serde(rename = "B2")]
    pub b2: ConstantEstimate,
    #[serde(rename = "varM")]
    pub var_m: ConstantEstimate,
    pub gamma0_k: BTreeMap<u32, ConstantEstimate>,
    pub gamma1_k: BTreeMap<u32, ConstantEstimate>,
    /// Tolerance of the `e_{k,m}` grid, which cannot go below `E_GRID_TOL_FLOOR`.
    pub e_tol: f64,
    /// `e_{k,m}` for `k = 2..=5`, `m = 0..=E_GRID_M`.
    pub e_km: BTreeMap<u32, Vec<ConstantEstimate>>,
}

pub const E_GRID_TOL_FLOOR: f64 = 1e-8;
pub const E_GRID_M: usize = 5;

impl ConstantsReport {
    pub fn compute(tol: f64) -> Result<Self> {
        check_tol(tol)?;
        let mut gamma0_k = BTreeMap::new();
        let mut gamma1_k = BTreeMap::new();
        let mut e_km = BTreeMap::new();
        let e_tol = tol.max(E_GRID_TOL_FLOOR);
        for k in 2..=5 {
            gamma0_k.insert(k, gamma0(k, tol)?);
            gamma1_k.insert(k, gamma1(k, tol)?);
            let density = OmegaDensity::new(ExponentSequence::indicator(k)?, e_tol)?;
            e_km.insert(k, (0..=E_GRID_M).map(|m| density.e(m)).collect());
        }
        Ok(Self { tol, b1: compute_b1(tol)?, b2: compute_b2(tol)?, var_m: variance_m(tol)?, gamma0_k, gamma1_k, e_tol, e_km })
    }
}
