//! The arithmetic-f distribution: `P(X_f = k) = f(k+1) - f(k)` for a
//! non-decreasing `f` on the non-negative integers with `f(0) = 0`, `f(n) -> 1`
//! and `1 - f(n) ≪ n^{-(2+ε)}`.
//!
//! Functions are stored through their complement `1 - f(n)`, which is what
//! every moment formula consumes and which stays accurate when tiny.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{compute_d1, compute_d2, zeta_complement, ConstantEstimate, Method, OmegaDensity};
use crate::exponents::ExponentSequence;
use crate::{Error, Result};

/// Largest truncation point any direct or `D`-sum will use.
pub const MAX_TRUNCATION: u64 = 1 << 20;

/// Prime limit for the product behind `f2k` and `fA`.
pub const OMEGA_PRIME_LIMIT: u64 = 1 << 24;

/// Certified majorant `1 - f(n) <= tail(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TailBound {
    /// `c r^n`, `0 < r < 1`.
    Geometric { c: f64, r: f64 },
    /// `c n^{-a}` for `n >= 1`, `a > 2`.
    Power { c: f64, a: f64 },
    /// `μ^n / n!`.
    Poisson { mu: f64 },
    /// `1 - f(n) = 0` for `n >= N`.
    FiniteSupport { n: u64 },
}

impl TailBound {
    pub fn at(&self, n: u64) -> f64 {
        match *self {
            Self::Geometric { c, r } => c * r.powf(n as f64),
            Self::Power { c, a } => {
                if n == 0 {
                    1.0
                } else {
                    (c * (n as f64).powf(-a)).min(1.0)
                }
            }
            Self::Poisson { mu } => poisson_term(mu, n).min(1.0),
            Self::FiniteSupport { n: top } => f64::from(u8::from(n < top)),
        }
    }

    /// Bound on `Σ_{n>K} tail(n)`.
    pub fn sum_after(&self, cut: u64) -> f64 {
        let k = cut as f64;
        match *self {
            Self::Geometric { c, r } => c * r.powf(k + 1.0) / (1.0 - r),
            Self::Power { c, a } if cut == 0 => c * a / (a - 1.0),
            Self::Power { c, a } => c * k.powf(1.0 - a) / (a - 1.0),
            Self::Poisson { mu } => {
                let ratio = mu / (k + 2.0);
                if ratio >= 1.0 {
                    f64::INFINITY
                } else {
                    poisson_term(mu, cut + 1) / (1.0 - ratio)
                }
            }
            Self::FiniteSupport { n } => n.saturating_sub(cut + 1) as f64,
        }
    }

    /// Bound on `Σ_{n>K} (2n - 1) tail(n)`.
    pub fn odd_weighted_sum_after(&self, cut: u64) -> f64 {
        let k = cut as f64;
        match *self {
            Self::Geometric { c, r } => c * r.powf(k + 1.0) * ((2.0 * k + 1.0) / (1.0 - r) + 2.0 * r / ((1.0 - r) * (1.0 - r))),
            Self::Power { c, a } if cut == 0 => 2.0 * c * (a - 1.0) / (a - 2.0),
            Self::Power { c, a } => 2.0 * c * k.powf(2.0 - a) / (a - 2.0),
            Self::Poisson { mu } => {
                // successive ratios (2n+1) μ / ((2n-1)(n+1)) decrease in n
                let ratio = (2.0 * k + 3.0) * mu / ((2.0 * k + 1.0) * (k + 2.0));
                if ratio >= 1.0 {
                    f64::INFINITY
                } else {
                    (2.0 * k + 1.0) * poisson_term(mu, cut + 1) / (1.0 - ratio)
                }
            }
            Self::FiniteSupport { n } => (cut + 1..n).map(|j| (2 * j - 1) as f64).sum(),
        }
    }
}

fn poisson_term(mu: f64, n: u64) -> f64 {
    let mut t = 1.0;
    for i in 1..=n {
        t *= mu / i as f64;
        if t == 0.0 {
            break;
        }
    }
    t
}

type Complement = Arc<dyn Fn(u64) -> ConstantEstimate + Send + Sync>;

/// A candidate `f`, given through `1 - f(n)` with a per-value error bound.
#[derive(Clone)]
pub struct ArithmeticF {
    name: String,
    complement: Complement,
    tail: Option<TailBound>,
    epsilon: Option<f64>,
    decreasing_increments_from: Option<u64>,
}

impl fmt::Debug for ArithmeticF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArithmeticF").field("name", &self.name).field("tail", &self.tail).field("epsilon", &self.epsilon).finish_non_exhaustive()
    }
}

impl ArithmeticF {
    /// An uncertified `f` from exact values.
    pub fn from_values(name: impl Into<String>, f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        Self::from_complement(name, move |n| ConstantEstimate::exact(1.0 - f(n)))
    }

    /// An uncertified `f` from `1 - f(n)`.
    pub fn from_complement(name: impl Into<String>, g: impl Fn(u64) -> ConstantEstimate + Send + Sync + 'static) -> Self {
        Self { name: name.into(), complement: Arc::new(g), tail: None, epsilon: None, decreasing_increments_from: None }
    }

    /// Attaches a certified tail. `epsilon` is the exponent margin in
    /// `tail(n) <= C n^{-(2+ε)}`; `None` when the tail decays faster than any power.
    pub fn with_tail_bound(mut self, tail: TailBound, epsilon: Option<f64>) -> Self {
        self.tail = Some(tail);
        self.epsilon = epsilon;
        self
    }

    /// Marks `f(n+1) - f(n)` as claimed decreasing for `n >= from`; `validate` checks it.
    pub fn with_decreasing_increments_from(mut self, from: u64) -> Self {
        self.decreasing_increments_from = Some(from);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tail_bound(&self) -> Option<&TailBound> {
        self.tail.as_ref()
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub fn is_certified(&self) -> bool {
        self.tail.is_some()
    }

    /// `1 - f(n)`.
    pub fn complement(&self, n: u64) -> ConstantEstimate {
        (self.complement)(n)
    }

    /// `f(n)`.
    pub fn value(&self, n: u64) -> f64 {
        1.0 - self.complement(n).value
    }
}

/// Findings of [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub n: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub name: String,
    pub n_max: u64,
    pub certified: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `f(0) = 0`, `0 <= f <= 1`, monotonicity and the tail bound up to
/// `n_max`, plus decreasing increments where the instance claims them.
pub fn validate(f: &ArithmeticF, n_max: u64) -> Result<ValidationReport> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2".into()));
    }
    let mut violations = Vec::new();
    let mut flag = |check: &str, n: u64, detail: String| violations.push(Violation { check: check.into(), n, detail });
    let c: Vec<ConstantEstimate> = (0..=n_max + 1).map(|n| f.complement(n)).collect();
    if c[0].value != 1.0 {
        flag("f(0) = 0", 0, format!("f(0) = {}", 1.0 - c[0].value));
    }
    for n in 0..=n_max {
        let cn = c[n as usize];
        if cn.value < -cn.error_bound || cn.value > 1.0 + cn.error_bound {
            flag("range", n, format!("f({n}) = {}", 1.0 - cn.value));
        }
        let next = c[n as usize + 1];
        if next.value > cn.value + cn.error_bound + next.error_bound {
            flag("monotone", n, format!("f({}) < f({n})", n + 1));
        }
        if let Some(tail) = f.tail_bound() {
            if cn.value - cn.error_bound > tail.at(n) {
                flag("tail bound", n, format!("1 - f({n}) = {} exceeds {}", cn.value, tail.at(n)));
            }
        }
    }
    if let Some(from) = f.decreasing_increments_from {
        for n in from..n_max {
            let (a, b, d) = (c[n as usize], c[n as usize + 1], c[n as usize + 2]);
            let inc = a.value - b.value;
            let next_inc = b.value - d.value;
            // past the point where increments drop below the carried error nothing is decidable
            let noise = a.error_bound + 2.0 * b.error_bound + d.error_bound;
            if inc <= noise {
                break;
            }
            if next_inc >= inc + noise {
                flag("decreasing increments", n, format!("f({}) - f({}) >= f({}) - f({n})", n + 2, n + 1, n + 1));
            }
        }
    }
    Ok(ValidationReport { name: f.name().to_string(), n_max, certified: f.is_certified(), violations })
}

/// The law `P(X = k) = f(k+1) - f(k)`.
#[derive(Debug, Clone)]
pub struct ArithmeticFDistribution {
    f: ArithmeticF,
    cdf_table: Arc<OnceLock<Vec<f64>>>,
}

impl ArithmeticFDistribution {
    pub fn new(f: ArithmeticF) -> Self {
        Self { f, cdf_table: Arc::new(OnceLock::new()) }
    }

    pub fn f(&self) -> &ArithmeticF {
        &self.f
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.f.complement(k).value - self.f.complement(k + 1).value
    }

    pub fn cdf(&self, k: u64) -> f64 {
        self.f.value(k + 1)
    }

    /// `μ_1 = 1 - f(1) + D_1`.
    pub fn mean_closed(&self, tol: f64) -> Result<ConstantEstimate> {
        let head = self.f.complement(1);
        Ok(head.add(&compute_d1(&self.f, tol / 2.0)?).with_method(Method::Series))
    }

    /// `μ_2 = 1 - f(1) + D_2`.
    pub fn second_moment_closed(&self, tol: f64) -> Result<ConstantEstimate> {
        let head = self.f.complement(1);
        Ok(head.add(&compute_d2(&self.f, tol / 2.0)?).with_method(Method::Series))
    }

    /// `μ_2 - μ_1^2`.
    pub fn variance(&self, tol: f64) -> Result<ConstantEstimate> {
        let mean = self.mean_closed(tol / 8.0)?;
        let second = self.second_moment_closed(tol / 4.0)?;
        Ok(second.sub(&mean.square()).with_method(Method::Derived))
    }

    fn direct(&self, power: u32, cut: u64, tol: f64) -> Result<ConstantEstimate> {
        crate::constants::check_tol(tol)?;
        let tail = self.f.tail_bound().ok_or_else(|| Error::NotCertified(self.f.name().to_string()))?;
        let k1 = (cut + 1) as f64;
        // Σ_{k>K} k^r p_k by partial summation against 1 - f
        let truncation = match power {
            1 => k1 * tail.at(cut + 1) + tail.sum_after(cut + 1),
            _ => k1 * k1 * tail.at(cut + 1) + tail.odd_weighted_sum_after(cut + 1),
        };
        let mut sum = 0.0;
        let mut err = truncation;
        let mut prev = self.f.complement(0);
        for k in 0..=cut {
            let next = self.f.complement(k + 1);
            let w = (k as f64).powi(power as i32);
            sum += w * (prev.value - next.value);
            err += w * (prev.error_bound + next.error_bound) + 2.0 * w * EPS_SLACK * (prev.value.abs() + next.value.abs());
            prev = next;
        }
        err += (cut as f64 + 1.0) * EPS_SLACK * sum.abs();
        if err > tol {
            return Err(Error::ToleranceUnreachable { what: format!("direct moment of {}", self.f.name()), tol });
        }
        Ok(ConstantEstimate::new(sum, err, Method::Series))
    }

    /// Smallest `K` whose certified truncation is at most `tol / 2`.
    fn direct_cut(&self, power: u32, tol: f64) -> Result<u64> {
        let tail = self.f.tail_bound().ok_or_else(|| Error::NotCertified(self.f.name().to_string()))?;
        (1..=MAX_TRUNCATION)
            .find(|&cut| {
                let k1 = (cut + 1) as f64;
                let t = match power {
                    1 => k1 * tail.at(cut + 1) + tail.sum_after(cut + 1),
                    _ => k1 * k1 * tail.at(cut + 1) + tail.odd_weighted_sum_after(cut + 1),
                };
                t <= tol / 2.0
            })
            .ok_or(Error::ToleranceUnreachable { what: format!("direct moment of {}", self.f.name()), tol })
    }

    /// `Σ_{k<=K} k (f(k+1) - f(k))` plus a certified tail; `K = None` picks the
    /// smallest adequate truncation.
    pub fn mean_direct(&self, cut: Option<u64>, tol: f64) -> Result<ConstantEstimate> {
        let cut = match cut {
            Some(c) => c,
            None => self.direct_cut(1, tol)?,
        };
        self.direct(1, cut, tol)
    }

    /// `Σ_{k<=K} k² (f(k+1) - f(k))` plus a certified tail.
    pub fn second_moment_direct(&self, cut: Option<u64>, tol: f64) -> Result<ConstantEstimate> {
        let cut = match cut {
            Some(c) => c,
            None => self.direct_cut(2, tol)?,
        };
        self.direct(2, cut, tol)
    }

    /// `f(1), f(2), ...` until `f` reaches 1 in floating point.
    fn cdf_table(&self) -> &[f64] {
        self.cdf_table.get_or_init(|| {
            let mut table = Vec::new();
            for k in 0..SAMPLE_TABLE_LIMIT {
                let v = self.cdf(k);
                table.push(v);
                if v >= 1.0 {
                    break;
                }
            }
            table
        })
    }

    /// One draw by inversion: the smallest `k` with `f(k+1) > u`.
    pub fn sample_one(&self, rng: &mut ChaCha8Rng) -> u64 {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let table = self.cdf_table();
        table.partition_point(|&c| c <= u) as u64
    }

    /// `count` draws from a ChaCha8 stream seeded with `seed`; `u` takes the
    /// top 53 bits of each 64-bit output, so draws are reproducible everywhere.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample_one(&mut rng)).collect()
    }
}

const EPS_SLACK: f64 = f64::EPSILON;
const SAMPLE_TABLE_LIMIT: u64 = 1 << 16;

/// The built-in instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Builtin {
    /// Benford-type `f_0(n) = log n / log N_0` below `N_0`, 1 from there.
    F0(u64),
    /// `f_1(n) = 1/ζ(n)` for `n >= 2`; the limiting law of `M(n)`.
    F1,
    /// `f_{2,k}(n) = Σ_{m<n} e_{k,m}`; the limiting law of `ω_k(n)`.
    F2k(u32),
    /// `f_A(n) = Σ_{m<n} e_{A,m}` for `A ∈ {S, E, O}`.
    FA(ExponentSequence),
    /// Point mass at 1; the limiting law of `m(n)`.
    Degenerate,
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownBuiltin(s.to_string());
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("f1", None) => Ok(Self::F1),
            ("degenerate", None) => Ok(Self::Degenerate),
            ("f0", Some(a)) => {
                let n: u64 = a.parse().map_err(|_| unknown())?;
                if n < 2 {
                    return Err(Error::InvalidBase(n));
                }
                Ok(Self::F0(n))
            }
            ("f2k", Some(a)) => {
                let k: u32 = a.parse().map_err(|_| unknown())?;
                ExponentSequence::indicator(k)?;
                Ok(Self::F2k(k))
            }
            ("fA", Some("S")) => Ok(Self::FA(ExponentSequence::S)),
            ("fA", Some("E")) => Ok(Self::FA(ExponentSequence::E)),
            ("fA", Some("O")) => Ok(Self::FA(ExponentSequence::O)),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::F0(n) => write!(f, "f0:{n}"),
            Self::F1 => write!(f, "f1"),
            Self::F2k(k) => write!(f, "f2k:{k}"),
            Self::FA(seq) => write!(f, "fA:{}", seq.label()),
            Self::Degenerate => write!(f, "degenerate"),
        }
    }
}

impl Builtin {
    pub fn build(self) -> Result<ArithmeticF> {
        let name = self.to_string();
        match self {
            Self::F0(base) => {
                if base < 2 {
                    return Err(Error::InvalidBase(base));
                }
                let ln_base = (base as f64).ln();
                let f = ArithmeticF::from_complement(name, move |n| match n {
                    0 => ConstantEstimate::exact(1.0),
                    n if n >= base => ConstantEstimate::exact(0.0),
                    n => {
                        let v = 1.0 - (n as f64).ln() / ln_base;
                        ConstantEstimate::new(v, 4.0 * f64::EPSILON, Method::ClosedForm)
                    }
                });
                Ok(f.with_tail_bound(TailBound::FiniteSupport { n: base }, None))
            }
            Self::F1 => {
                let f = ArithmeticF::from_complement(name, |n| match n {
                    0 | 1 => ConstantEstimate::exact(1.0),
                    // below the smallest subnormal
                    n if n > 1100 => ConstantEstimate::new(0.0, f64::MIN_POSITIVE, Method::ClosedForm),
                    n => zeta_complement(n as u32).expect("k >= 2"),
                });
                // 1 - 1/ζ(n) < 2^{1-n}
                Ok(f.with_tail_bound(TailBound::Geometric { c: 2.0, r: 0.5 }, None).with_decreasing_increments_from(2))
            }
            Self::F2k(k) => Ok(omega_builtin(name, ExponentSequence::indicator(k)?)?),
            Self::FA(seq) => Ok(omega_builtin(name, seq)?),
            Self::Degenerate => {
                let f = ArithmeticF::from_complement(name, |n| ConstantEstimate::exact(if n < 2 { 1.0 } else { 0.0 }));
                Ok(f.with_tail_bound(TailBound::FiniteSupport { n: 2 }, None))
            }
        }
    }

    pub fn distribution(self) -> Result<ArithmeticFDistribution> {
        Ok(ArithmeticFDistribution::new(self.build()?))
    }
}

/// `f(n) = P(ω_A < n)` with `1 - f(n) = P(ω_A >= n) <= μ^n / n!`.
fn omega_builtin(name: String, seq: ExponentSequence) -> Result<ArithmeticF> {
    let density = Arc::new(OmegaDensity::with_prime_limit(seq, OMEGA_PRIME_LIMIT)?);
    let mu = density.mean_upper();
    let d = Arc::clone(&density);
    let f = ArithmeticF::from_complement(name, move |n| if n == 0 { ConstantEstimate::exact(1.0) } else { d.tail(n as usize) });
    Ok(f.with_tail_bound(TailBound::Poisson { mu }, None))
}

/// Parses and builds a built-in by name, e.g. `"f0:10"` or `"fA:E"`.
pub fn builtin(name: &str) -> Result<ArithmeticF> {
    name.parse::<Builtin>()?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_ZETA2: f64 = 0.607_927_101_854_026_6;

    #[test]
    fn f1_matches_zeta_values() {
        let d = Builtin::F1.distribution().unwrap();
        assert_eq!(d.pmf(0), 0.0);
        assert!((d.pmf(1) - INV_ZETA2).abs() < 1e-15);
        assert!((d.f().value(2) - INV_ZETA2).abs() < 1e-15);
        // 1/ζ(4) - 1/ζ(3)
        let expected = 90.0 / std::f64::consts::PI.powi(4) - 1.0 / 1.202_056_903_159_594_3;
        assert!((d.pmf(3) - expected).abs() < 1e-14);
    }

    #[test]
    fn degenerate_is_point_mass() {
        let d = Builtin::Degenerate.distribution().unwrap();
        assert_eq!((0..6).map(|k| d.pmf(k)).collect::<Vec<_>>(), [0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(d.mean_closed(1e-12).unwrap().value, 1.0);
        assert_eq!(d.variance(1e-12).unwrap().value, 0.0);
        assert_eq!(d.mean_direct(Some(1), 1e-12).unwrap().value, 1.0);
        assert!(d.sample(7, 1000).iter().all(|&x| x == 1));
    }

    #[test]
    fn benford_mean() {
        let d = Builtin::F0(10).distribution().unwrap();
        let closed = d.mean_closed(1e-12).unwrap();
        assert!((closed.value - 3.440_236_967_123_206).abs() < 1e-14);
        let direct = d.mean_direct(Some(10), 1e-12).unwrap();
        assert!(closed.agrees_with(&direct));
        assert!(d.sample(1, 10_000).iter().all(|&x| x < 10));
    }

    #[test]
    fn telescoping_cdf() {
        for b in [Builtin::F1, Builtin::F0(7), Builtin::F2k(2), Builtin::FA(ExponentSequence::E)] {
            let d = b.distribution().unwrap();
            let mut acc = 0.0;
            for k in 0..30 {
                acc += d.pmf(k);
                assert!((acc - d.cdf(k)).abs() <= 30.0 * f64::EPSILON, "{b} k={k}");
                assert!(d.pmf(k) >= -f64::EPSILON);
            }
        }
    }

    #[test]
    fn closed_and_direct_moments_agree() {
        for b in [Builtin::F1, Builtin::F0(10), Builtin::F0(2), Builtin::F2k(2), Builtin::F2k(3), Builtin::FA(ExponentSequence::S), Builtin::FA(ExponentSequence::O), Builtin::Degenerate] {
            let d = b.distribution().unwrap();
            // the omega laws carry the product's per-value truncation in every term
            let tol = if matches!(b, Builtin::F2k(_) | Builtin::FA(_)) { 1e-5 } else { 1e-6 };
            let m1 = d.mean_closed(tol).unwrap();
            let m1d = d.mean_direct(None, tol).unwrap();
            assert!(m1.agrees_with(&m1d), "{b}: {m1:?} vs {m1d:?}");
            let m2 = d.second_moment_closed(tol).unwrap();
            let m2d = d.second_moment_direct(None, tol).unwrap();
            assert!(m2.agrees_with(&m2d), "{b}: {m2:?} vs {m2d:?}");
            assert!(m1.error_bound <= tol && m2.error_bound <= tol);
        }
    }

    #[test]
    fn f2k_increments_are_e_values() {
        let f = Builtin::F2k(2).build().unwrap();
        let density = OmegaDensity::with_prime_limit(ExponentSequence::Indicator(2), OMEGA_PRIME_LIMIT).unwrap();
        for n in 0..6 {
            let inc = f.value(n as u64 + 1) - f.value(n as u64);
            let e = density.e(n);
            assert!((inc - e.value).abs() <= e.error_bound, "n={n}");
        }
    }

    #[test]
    fn validation_reports() {
        let f1 = Builtin::F1.build().unwrap();
        let report = validate(&f1, 64).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(validate(&Builtin::F0(10).build().unwrap(), 40).unwrap().passed());
        assert!(validate(&Builtin::FA(ExponentSequence::O).build().unwrap(), 40).unwrap().passed());

        let broken = ArithmeticF::from_values("broken", |n| match n {
            0 => 0.0,
            2 => 0.6,
            3 => 0.5,
            n => 1.0 - 1.0 / (n * n) as f64,
        });
        let report = validate(&broken, 10).unwrap();
        assert!(!report.certified);
        assert!(report.violations.iter().any(|v| v.check == "monotone" && v.n == 2), "{report:?}");
        assert!(validate(&broken, 1).is_err());
    }

    #[test]
    fn uncertified_functions_have_no_closed_moments() {
        let f = ArithmeticF::from_values("plain", |n| if n >= 3 { 1.0 } else { 0.0 });
        let d = ArithmeticFDistribution::new(f);
        assert!(matches!(d.mean_closed(1e-6), Err(Error::NotCertified(_))));
    }

    #[test]
    fn sampling_frequency_of_one() {
        let d = Builtin::F1.distribution().unwrap();
        let draws = d.sample(2024, 1_000_000);
        let ones = draws.iter().filter(|&&x| x == 1).count() as f64 / draws.len() as f64;
        assert!((ones - INV_ZETA2).abs() < 0.002, "{ones}");
        assert_eq!(draws[..20], d.sample(2024, 20)[..]);
        assert!(draws.iter().all(|&x| x >= 1));
    }

    #[test]
    fn parse_names() {
        assert_eq!("f0:10".parse::<Builtin>().unwrap(), Builtin::F0(10));
        assert_eq!("fA:E".parse::<Builtin>().unwrap(), Builtin::FA(ExponentSequence::E));
        assert_eq!("f2k:3".parse::<Builtin>().unwrap(), Builtin::F2k(3));
        assert_eq!("f0:1".parse::<Builtin>(), Err(Error::InvalidBase(1)));
        assert_eq!("f2k:1".parse::<Builtin>(), Err(Error::InvalidK(1)));
        for bad in ["f3", "fA:X", "f0", "f1:2", ""] {
            assert!(matches!(bad.parse::<Builtin>(), Err(Error::UnknownBuiltin(_))), "{bad}");
        }
        for b in [Builtin::F0(10), Builtin::F1, Builtin::F2k(4), Builtin::FA(ExponentSequence::S), Builtin::Degenerate] {
            assert_eq!(b.to_string().parse::<Builtin>().unwrap(), b);
        }
    }

    #[test]
    fn tail_bound_sums_dominate_direct_sums() {
        let bounds = [
            TailBound::Geometric { c: 2.0, r: 0.5 },
            TailBound::Power { c: 3.0, a: 2.5 },
            TailBound::Poisson { mu: 0.4 },
            TailBound::FiniteSupport { n: 9 },
        ];
        for b in bounds {
            for cut in [1u64, 3, 10, 40] {
                let direct: f64 = (cut + 1..cut + 5000).map(|n| b.at(n)).sum();
                let weighted: f64 = (cut + 1..cut + 5000).map(|n| (2 * n - 1) as f64 * b.at(n)).sum();
                assert!(direct <= b.sum_after(cut) * (1.0 + 1e-12), "{b:?} K={cut}");
                assert!(weighted <= b.odd_weighted_sum_after(cut) * (1.0 + 1e-12), "{b:?} K={cut}");
            }
        }
    }
}
