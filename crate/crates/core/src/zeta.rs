//! Riemann zeta-function on `Re(s) >= 1` by Euler–Maclaurin summation.
//!
//! The value is split as `ζ(s) = 1/(s-1) + R(s)` where `R` is entire; the
//! regular part is computed without cancellation near the pole, so moduli
//! such as `|ζ(1+it)|^p` stay accurate for tiny `t`.

use crate::sieve;
use crate::sum::{ComplexSum, NeumaierSum, WindowSum};
use crate::EULER_GAMMA;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    #[error("s = {s} lies within {radius} of the pole")]
    PoleProximity { s: Complex64, radius: f64 },
    #[error("cannot certify error {target:e}; best bound {bound:e}")]
    PrecisionUnreachable { target: f64, bound: f64 },
    #[error("argument {0} outside the accepted range")]
    OutOfRange(Complex64),
    #[error("Re(s) = {0} outside the domain of this operation")]
    DomainError(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

/// A complex value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
    pub abs_err: f64,
}

impl ComplexValue {
    pub fn new(z: Complex64, abs_err: f64) -> Self {
        Self {
            re: z.re,
            im: z.im,
            abs_err,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.value().norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub target_abs_err: f64,
    pub euler_maclaurin_cutoff: usize,
    pub bernoulli_terms: usize,
    pub pole_radius: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            target_abs_err: 1e-10,
            euler_maclaurin_cutoff: 16,
            bernoulli_terms: 24,
            pole_radius: 1e-3,
        }
    }
}

/// Largest supported number of Bernoulli correction terms.
pub const MAX_BERNOULLI_TERMS: usize = 64;

impl EvalConfig {
    pub fn validate(&self) -> Result<(), ZetaError> {
        if !(self.target_abs_err > 0.0) {
            return Err(ZetaError::InvalidConfig("target_abs_err must be positive"));
        }
        if !(self.pole_radius > 0.0) {
            return Err(ZetaError::InvalidConfig("pole_radius must be positive"));
        }
        if self.euler_maclaurin_cutoff < 10 {
            return Err(ZetaError::InvalidConfig("euler_maclaurin_cutoff must be >= 10"));
        }
        if self.bernoulli_terms < 2 || self.bernoulli_terms > MAX_BERNOULLI_TERMS {
            return Err(ZetaError::InvalidConfig("bernoulli_terms must lie in 2..=64"));
        }
        Ok(())
    }

    /// Oversampled configuration used as an independent oracle.
    pub fn oversampled(&self) -> Self {
        Self {
            euler_maclaurin_cutoff: self.euler_maclaurin_cutoff * 4,
            bernoulli_terms: (self.bernoulli_terms * 2).min(MAX_BERNOULLI_TERMS),
            ..*self
        }
    }

    /// Euler–Maclaurin cutoff for `|Im s| = t`.
    pub fn cutoff_for(&self, t: f64) -> usize {
        self.euler_maclaurin_cutoff.max((2.0 + t.abs()).ceil() as usize)
    }
}

/// `B_{2k} / (2k)!` for `k = 0..=MAX_BERNOULLI_TERMS + 1`.
fn bernoulli_ratios() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let m_max = 2 * (MAX_BERNOULLI_TERMS + 1);
        let mut b: Vec<BigRational> = Vec::with_capacity(m_max + 1);
        b.push(BigRational::one());
        // binomial row C(m+1, j)
        for m in 1..=m_max {
            let mut acc = BigRational::zero();
            let mut binom = BigInt::one();
            for (j, bj) in b.iter().enumerate() {
                acc += BigRational::from_integer(binom.clone()) * bj;
                binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }
        let mut fact = BigInt::one();
        let mut out = Vec::with_capacity(MAX_BERNOULLI_TERMS + 2);
        for (m, bm) in b.iter().enumerate() {
            if m > 0 {
                fact *= BigInt::from(m);
            }
            if m % 2 == 0 {
                let r = bm / BigRational::from_integer(fact.clone());
                out.push(r.to_f64().expect("finite ratio"));
            }
        }
        out
    })
}

/// `(e^z - 1) / z`.
fn expm1_over_z(z: Complex64) -> Complex64 {
    if z.norm() < 0.2 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..30 {
            term *= z / k as f64;
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Euler–Maclaurin pieces beyond the main sum at cutoff `n`:
/// `N^{-s}/2 + Σ_k T_k` plus either `N^{1-s}/(s-1)` or, for the regular
/// part, `(N^{1-s} - 1)/(s-1)`. Returns the value and the truncation bound.
fn em_tail(s: Complex64, n: usize, terms: usize, regular: bool) -> (Complex64, f64) {
    let ln_n = (n as f64).ln();
    let n_pow_neg_s = (-s * ln_n).exp();
    let n_pow_one_minus_s = n_pow_neg_s * n as f64;
    let integral = if regular {
        let z = (1.0 - s) * ln_n;
        -ln_n * expm1_over_z(z)
    } else {
        n_pow_one_minus_s / (s - 1.0)
    };
    let ratios = bernoulli_ratios();
    let mut total = integral + n_pow_neg_s * 0.5;
    let nf = n as f64;
    // T_1 = b_1 · s · N^{-s-1}
    let mut term = n_pow_neg_s * s * (ratios[1] / nf);
    let mut corr = ComplexSum::new();
    for k in 1..=terms {
        corr.add(term);
        let kk = k as f64;
        term *= (s + (2.0 * kk - 1.0)) * (s + 2.0 * kk) * (ratios[k + 1] / ratios[k] / (nf * nf));
    }
    total += corr.sum();
    let m = terms as f64;
    let bound = (s + 2.0 * m + 1.0).norm() / (s.re + 2.0 * m + 1.0) * term.norm();
    (total, bound)
}

/// `Σ_{n<N} n^{-s}` with a rounding estimate.
fn main_sum(s: Complex64, n: usize) -> (Complex64, f64) {
    let mut acc = ComplexSum::new();
    let mut weight = NeumaierSum::new();
    let t = s.im.abs();
    for k in 1..n {
        let l = (k as f64).ln();
        let mag = (-s.re * l).exp();
        acc.add(Complex64::from_polar(mag, -s.im * l));
        weight.add(mag * (t * l + 4.0));
    }
    (acc.sum(), weight.sum() * f64::EPSILON)
}

/// Picks the fewest correction terms meeting `goal`, up to `max_terms`.
fn certified_tail(
    s: Complex64,
    n: usize,
    max_terms: usize,
    goal: f64,
    regular: bool,
) -> (Complex64, f64) {
    let mut best = em_tail(s, n, 2, regular);
    let mut m = 2;
    while best.1 > goal && m < max_terms {
        m = (m * 2).min(max_terms);
        best = em_tail(s, n, m, regular);
    }
    best
}

fn evaluate(s: Complex64, cfg: &EvalConfig, regular: bool) -> Result<ComplexValue, ZetaError> {
    cfg.validate()?;
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(ZetaError::OutOfRange(s));
    }
    if s.re < 1.0 {
        return Err(ZetaError::DomainError(s.re));
    }
    let n = cfg.cutoff_for(s.im);
    let (main, rounding) = main_sum(s, n);
    let (tail, trunc) = certified_tail(
        s,
        n,
        cfg.bernoulli_terms,
        cfg.target_abs_err / 4.0,
        regular,
    );
    let bound = trunc + rounding + 8.0 * f64::EPSILON * (main + tail).norm();
    if bound > cfg.target_abs_err {
        return Err(ZetaError::PrecisionUnreachable {
            target: cfg.target_abs_err,
            bound,
        });
    }
    let v = main + tail;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(ZetaError::OutOfRange(s));
    }
    Ok(ComplexValue::new(v, bound))
}

/// `ζ(s)` for `Re(s) >= 1`, `|s - 1| > pole_radius`.
pub fn zeta(s: Complex64, cfg: &EvalConfig) -> Result<ComplexValue, ZetaError> {
    cfg.validate()?;
    if (s - 1.0).norm() <= cfg.pole_radius {
        return Err(ZetaError::PoleProximity {
            s,
            radius: cfg.pole_radius,
        });
    }
    evaluate(s, cfg, false)
}

/// Regular part `ζ(s) - 1/(s-1)`; defined at `s = 1` where it equals `γ`.
pub fn zeta_regular(s: Complex64, cfg: &EvalConfig) -> Result<ComplexValue, ZetaError> {
    evaluate(s, cfg, true)
}

/// Two-term Laurent expansion `1/(s-1) + γ` near the pole.
pub fn zeta_laurent(s: Complex64) -> Result<ComplexValue, ZetaError> {
    let w = s - 1.0;
    let r = w.norm();
    if r == 0.0 || r > 0.25 || !r.is_finite() {
        return Err(ZetaError::OutOfRange(s));
    }
    // |γ_1| < 0.073 and the remaining Stieltjes terms are far smaller on |w| <= 1/4.
    let err = 0.08 * r + f64::EPSILON / r;
    Ok(ComplexValue::new(w.inv() + EULER_GAMMA, err))
}

/// `log(1 + w)` without cancellation for small `w`.
fn log1p_c(w: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    let im = w.im.atan2(1.0 + w.re);
    Complex64::new(re, im)
}

/// `-Σ_{P <= limit} log(1 - P^{-s})` with a tail bound.
pub fn log_zeta_euler(s: Complex64, prime_limit: u64) -> Result<ComplexValue, ZetaError> {
    if !(s.re > 1.0) {
        return Err(ZetaError::DomainError(s.re));
    }
    let primes = sieve::primes_up_to(prime_limit.max(2));
    let mut acc = ComplexSum::new();
    for &pr in &primes {
        let l = (pr as f64).ln();
        let z = Complex64::from_polar((-s.re * l).exp(), -s.im * l);
        acc.add(-log1p_c(-z));
    }
    let x = prime_limit.max(2) as f64;
    let sigma = s.re;
    let tail = x.powf(1.0 - sigma) / (sigma - 1.0) / (1.0 - x.powf(-sigma));
    let rounding = 4.0 * f64::EPSILON * primes.len() as f64 * (1.0 + s.im.abs());
    Ok(ComplexValue::new(acc.sum(), tail + rounding))
}

/// `ζ(s)^p` on `Re(s) >= 1.05`, with the branch of `log ζ` continued from the
/// Euler product. There `|log ζ(s)| <= log ζ(Re s) < π`, so the principal
/// logarithm of the computed value is that branch.
pub fn zeta_pow(s: Complex64, p: f64, cfg: &EvalConfig) -> Result<ComplexValue, ZetaError> {
    if s.re < 1.05 {
        return Err(ZetaError::DomainError(s.re));
    }
    if p == 0.0 {
        return Ok(ComplexValue::new(Complex64::new(1.0, 0.0), 0.0));
    }
    let z = zeta(s, cfg)?;
    let v = z.value();
    let w = (v.ln() * p).exp();
    let rel = z.abs_err / v.norm();
    let err = w.norm() * ((p.abs() * rel).exp_m1() + 4.0 * f64::EPSILON);
    Ok(ComplexValue::new(w, err))
}

/// `1/ζ(1+it)` and `ζ(1+it)` with the pole handled through the regular part.
fn one_line(t: f64, cfg: &EvalConfig) -> Result<(Complex64, f64), ZetaError> {
    let s = Complex64::new(1.0, t);
    let r = zeta_regular(s, cfg)?;
    if t == 0.0 {
        return Err(ZetaError::PoleProximity {
            s,
            radius: cfg.pole_radius,
        });
    }
    let pole = Complex64::new(0.0, -1.0 / t);
    Ok((pole + r.value(), r.abs_err))
}

/// `|ζ(1+it)|^p`.
pub fn abs_zeta_pow(t: f64, p: f64, cfg: &EvalConfig) -> Result<f64, ZetaError> {
    if p == 0.0 {
        return Ok(1.0);
    }
    if t == 0.0 {
        if p < 0.0 {
            return Ok(0.0);
        }
        return Err(ZetaError::PoleProximity {
            s: Complex64::new(1.0, 0.0),
            radius: cfg.pole_radius,
        });
    }
    let (z, _) = one_line(t, cfg)?;
    let v = (p * z.norm().ln()).exp();
    if !v.is_finite() {
        return Err(ZetaError::PoleProximity {
            s: Complex64::new(1.0, t),
            radius: cfg.pole_radius,
        });
    }
    Ok(v)
}

/// `|ζ(2+2it)/ζ(1+it)|^p`; the ratio vanishes like `|t|` at `t = 0`.
pub fn ratio_abs_pow(t: f64, p: f64, cfg: &EvalConfig) -> Result<f64, ZetaError> {
    if p == 0.0 {
        return Ok(1.0);
    }
    let num = zeta(Complex64::new(2.0, 2.0 * t), cfg)?.norm();
    let s = Complex64::new(1.0, t);
    let r = zeta_regular(s, cfg)?.value();
    // 1/ζ(s) = (s-1)/(1 + (s-1)R(s))
    let w = Complex64::new(0.0, t);
    let inv = w / (1.0 + w * r);
    let ratio = num * inv.norm();
    if ratio == 0.0 {
        return if p > 0.0 {
            Ok(0.0)
        } else {
            Err(ZetaError::PoleProximity {
                s,
                radius: cfg.pole_radius,
            })
        };
    }
    Ok((p * ratio.ln()).exp())
}

/// Batch evaluator for `ζ(σ+it)` on `|t - center| <= half_width`.
///
/// The Euler–Maclaurin main sum is shared through a [`WindowSum`]; the
/// correction terms are evaluated per point.
#[derive(Debug, Clone)]
pub struct ZetaWindow {
    sigma: f64,
    cutoff: usize,
    terms: usize,
    main: WindowSum,
}

impl ZetaWindow {
    pub fn new(sigma: f64, center: f64, half_width: f64, cfg: &EvalConfig) -> Result<Self, ZetaError> {
        cfg.validate()?;
        if sigma < 1.0 {
            return Err(ZetaError::DomainError(sigma));
        }
        let cutoff = cfg.cutoff_for(center.abs() + half_width.abs());
        let main = WindowSum::build(
            center,
            half_width,
            (1..cutoff).map(|k| {
                let l = (k as f64).ln();
                (l, Complex64::new((-sigma * l).exp(), 0.0))
            }),
        );
        Ok(Self {
            sigma,
            cutoff,
            terms: cfg.bernoulli_terms,
            main,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn center(&self) -> f64 {
        self.main.center()
    }

    pub fn half_width(&self) -> f64 {
        self.main.half_width()
    }

    fn eval_inner(&self, t: f64, regular: bool) -> ComplexValue {
        let s = Complex64::new(self.sigma, t);
        let main = self.main.eval(t);
        let (tail, trunc) = em_tail(s, self.cutoff, self.terms, regular);
        let err = self.main.error_bound(t) + trunc + 8.0 * f64::EPSILON * (main + tail).norm();
        ComplexValue::new(main + tail, err)
    }

    /// `ζ(σ+it)`; not defined at the pole.
    pub fn zeta(&self, t: f64) -> ComplexValue {
        self.eval_inner(t, false)
    }

    /// `ζ(σ+it) - 1/(σ+it-1)`.
    pub fn regular(&self, t: f64) -> ComplexValue {
        self.eval_inner(t, true)
    }

    /// `|ζ(σ+it)|`, using the regular part so that `t` near the pole is safe.
    pub fn abs(&self, t: f64) -> f64 {
        let r = self.regular(t).value();
        let w = Complex64::new(self.sigma - 1.0, t);
        if w.norm() == 0.0 {
            return f64::INFINITY;
        }
        (w.inv() + r).norm()
    }

    /// `|s-1| · |ζ(s)|`, which is analytic through the pole.
    pub fn abs_times_pole(&self, t: f64) -> f64 {
        let r = self.regular(t).value();
        let w = Complex64::new(self.sigma - 1.0, t);
        (1.0 + w * r).norm()
    }
}

/// `2 - π²/6 <= |ζ(2+2it)| <= π²/6`, the elementary bracket for `Re(s) = 2`.
pub fn zeta_two_line_bracket() -> (f64, f64) {
    let z2 = PI * PI / 6.0;
    (2.0 - z2, z2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tight() -> EvalConfig {
        EvalConfig {
            target_abs_err: 1e-13,
            pole_radius: 1e-4,
            ..EvalConfig::default()
        }
    }

    #[test]
    fn bernoulli_table_starts_correctly() {
        let b = bernoulli_ratios();
        assert_eq!(b[0], 1.0);
        assert!((b[1] - 1.0 / 12.0).abs() < 1e-17);
        assert!((b[2] + 1.0 / 720.0).abs() < 1e-18);
        assert!((b[3] - 1.0 / 30240.0).abs() < 1e-19);
    }

    #[test]
    fn known_constants() {
        let z2 = zeta(Complex64::new(2.0, 0.0), &tight()).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-12);
        assert!(z2.abs_err <= 1e-13);
        let z3 = zeta(Complex64::new(3.0, 0.0), &tight()).unwrap();
        assert!((z3.re - 1.2020569031595943).abs() < 1e-12);
    }

    #[test]
    fn oversampled_oracle_agrees_on_the_one_line() {
        let cfg = EvalConfig {
            target_abs_err: 1e-12,
            ..EvalConfig::default()
        };
        for t in [10.0, 0.5, -3.0, 123.4] {
            let s = Complex64::new(1.0, t);
            let a = zeta(s, &cfg).unwrap();
            let b = zeta(s, &cfg.oversampled()).unwrap();
            assert!((a.value() - b.value()).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn pole_and_domain_errors() {
        let cfg = EvalConfig::default();
        assert!(matches!(
            zeta(Complex64::new(1.0005, 0.0), &cfg),
            Err(ZetaError::PoleProximity { .. })
        ));
        assert!(matches!(
            zeta(Complex64::new(0.5, 3.0), &cfg),
            Err(ZetaError::DomainError(_))
        ));
        let bad = EvalConfig {
            target_abs_err: 1e-20,
            ..cfg
        };
        assert!(matches!(
            zeta(Complex64::new(1.0, 5000.0), &bad),
            Err(ZetaError::PrecisionUnreachable { .. })
        ));
    }

    #[test]
    fn regular_part_near_pole_is_gamma() {
        let r = zeta_regular(Complex64::new(1.0, 0.0), &tight()).unwrap();
        assert!((r.re - EULER_GAMMA).abs() < 1e-12);
        assert!(r.im.abs() < 1e-14);
    }

    #[test]
    fn laurent_examples() {
        let cfg = EvalConfig {
            target_abs_err: 1e-10,
            pole_radius: 1e-4,
            ..EvalConfig::default()
        };
        let s = Complex64::new(1.001, 0.0);
        let l = zeta_laurent(s).unwrap();
        let z = zeta(s, &cfg).unwrap();
        assert!((l.re - 1000.5772).abs() < 1e-3);
        assert!((l.value() - z.value()).norm() < 1e-3);
        let s = Complex64::new(1.0, 0.001);
        let l = zeta_laurent(s).unwrap();
        assert!((l.value() - Complex64::new(0.5772, -1000.0)).norm() < 1e-3);
        assert!((l.value() - zeta(s, &cfg).unwrap().value()).norm() <= l.abs_err);
        let s = Complex64::new(1.25, 0.0);
        let l = zeta_laurent(s).unwrap();
        assert!((l.value() - zeta(s, &cfg).unwrap().value()).norm() <= 0.2);
        assert!(zeta_laurent(Complex64::new(1.3, 0.0)).is_err());
        assert!(zeta_laurent(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn euler_product_examples() {
        let v = log_zeta_euler(Complex64::new(2.0, 0.0), 1_000_000).unwrap();
        assert!((v.re - (PI * PI / 6.0).ln()).abs() <= v.abs_err);
        assert!((v.re - 0.4977003).abs() < 2e-6);
        let v = log_zeta_euler(Complex64::new(4.0, 0.0), 100).unwrap();
        assert!((v.re - (PI.powi(4) / 90.0).ln()).abs() <= v.abs_err);
        assert!(matches!(
            log_zeta_euler(Complex64::new(1.0, 1.0), 100),
            Err(ZetaError::DomainError(_))
        ));
    }

    #[test]
    fn euler_product_off_axis_within_tail() {
        let s = Complex64::new(1.5, 1.0);
        let e = log_zeta_euler(s, 100_000).unwrap();
        let z = zeta(s, &tight()).unwrap();
        let diff = (e.value() - z.value().ln()).norm();
        assert!(diff <= e.abs_err, "diff {diff} bound {}", e.abs_err);
    }

    #[test]
    fn abs_pow_examples() {
        let cfg = EvalConfig::default();
        assert_eq!(abs_zeta_pow(7.0, 0.0, &cfg).unwrap(), 1.0);
        let z = zeta(Complex64::new(1.0, 10.0), &cfg).unwrap().norm();
        assert!((abs_zeta_pow(10.0, -1.0, &cfg).unwrap() - 1.0 / z).abs() < 1e-12);
        let v = abs_zeta_pow(0.001, 1.0, &cfg).unwrap();
        let l = zeta_laurent(Complex64::new(1.0, 0.001)).unwrap();
        assert!((v - 1000.0).abs() < 0.01);
        assert!((v - l.norm()).abs() < 1e-3);
        assert!(abs_zeta_pow(0.0, 0.5, &cfg).is_err());
    }

    #[test]
    fn ratio_examples() {
        let cfg = EvalConfig::default();
        assert_eq!(ratio_abs_pow(0.0, 1.0, &cfg).unwrap(), 0.0);
        assert_eq!(ratio_abs_pow(0.0, 0.0, &cfg).unwrap(), 1.0);
        let a = zeta(Complex64::new(2.0, 10.0), &cfg).unwrap().norm();
        let b = zeta(Complex64::new(1.0, 5.0), &cfg).unwrap().norm();
        let want = (a / b).powi(2);
        assert!((ratio_abs_pow(5.0, 2.0, &cfg).unwrap() - want).abs() < 1e-10 * want);
        // vanishes linearly at the pole
        let r = ratio_abs_pow(1e-6, 1.0, &cfg).unwrap();
        assert!((r / 1e-6 - PI * PI / 6.0).abs() < 1e-3);
    }

    #[test]
    fn pow_matches_euler_branch() {
        let cfg = tight();
        let s = Complex64::new(1.5, 7.0);
        let w = zeta_pow(s, 2.0, &cfg).unwrap();
        let z = zeta(s, &cfg).unwrap().value();
        assert!((w.value() - z * z).norm() < 1e-11);
        let h = zeta_pow(s, 0.5, &cfg).unwrap().value();
        let e = log_zeta_euler(s, 1_000_000).unwrap();
        let want = (e.value() * 0.5).exp();
        assert!((h - want).norm() < 0.5 * e.abs_err * h.norm() + 1e-9);
    }

    #[test]
    fn window_matches_pointwise() {
        let cfg = EvalConfig::default();
        let w = ZetaWindow::new(1.0, 500.0, 1.0, &cfg).unwrap();
        for k in 0..=8 {
            let t = 499.0 + 0.25 * k as f64;
            let a = w.zeta(t);
            let b = zeta(Complex64::new(1.0, t), &cfg).unwrap();
            assert!((a.value() - b.value()).norm() <= a.abs_err + b.abs_err);
            assert!(a.abs_err < 1e-9);
        }
        let w0 = ZetaWindow::new(1.0, 0.0, 0.5, &cfg).unwrap();
        let r = w0.abs(1e-4);
        assert!((r - 1e4).abs() < 1e-3);
        assert!((w0.abs_times_pole(0.0) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn conjugate_symmetry(sigma in 1.0f64..3.0, t in 0.01f64..200.0) {
            let cfg = EvalConfig::default();
            let a = zeta(Complex64::new(sigma, t), &cfg).unwrap();
            let b = zeta(Complex64::new(sigma, -t), &cfg).unwrap();
            prop_assert!((a.value() - b.value().conj()).norm() <= 2.0 * cfg.target_abs_err);
        }

        #[test]
        fn two_line_bracket(t in -100.0f64..100.0) {
            let z = zeta(Complex64::new(2.0, 2.0 * t), &EvalConfig::default()).unwrap().norm();
            let (lo, hi) = zeta_two_line_bracket();
            prop_assert!(lo <= z && z <= hi);
            prop_assert!(1.0 / 3.0 < z && z < 5.0 / 3.0);
        }
    }
}
