//! Fixed-point multiprecision helpers (`value = mantissa / 2^prec`) used for
//! exact phase reduction `frac(T · ln P / 2π)` at arbitrarily large shifts.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Extra working bits carried inside series evaluations.
const GUARD: u32 = 32;

/// `atanh(a/b) · 2^prec`, for `0 <= a < b`.
fn atanh_ratio(a: u128, b: u128, prec: u32) -> BigInt {
    let work = prec + GUARD;
    let a2 = BigInt::from(a) * BigInt::from(a);
    let b2 = BigInt::from(b) * BigInt::from(b);
    let mut pow: BigInt = (BigInt::from(a) << work) / BigInt::from(b);
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    while !pow.is_zero() {
        sum += &pow / BigInt::from(2 * j + 1);
        pow = pow * &a2 / &b2;
        j += 1;
    }
    sum >> GUARD
}

/// `atan(1/m) · 2^prec`.
fn atan_inv(m: u64, prec: u32) -> BigInt {
    let work = prec + GUARD;
    let m2 = BigInt::from(m) * BigInt::from(m);
    let mut pow: BigInt = (BigInt::one() << work) / BigInt::from(m);
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    while !pow.is_zero() {
        let term = &pow / BigInt::from(2 * j + 1);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        pow /= &m2;
        j += 1;
    }
    sum >> GUARD
}

/// `π · 2^prec` (Machin's formula).
pub fn pi(prec: u32) -> BigInt {
    let p = prec + 8;
    let v = atan_inv(5, p) * 16 - atan_inv(239, p) * 4;
    v >> 8
}

/// `ln 2 · 2^prec`.
pub fn ln2(prec: u32) -> BigInt {
    atanh_ratio(1, 3, prec + 8) * 2 >> 8
}

/// Precomputed constants for repeated logarithms at one precision.
#[derive(Debug, Clone)]
pub struct LogContext {
    prec: u32,
    ln2: BigInt,
    two_pi: BigInt,
}

impl LogContext {
    pub fn new(prec: u32) -> Self {
        let work = prec + 16;
        Self {
            prec,
            ln2: ln2(work),
            two_pi: pi(work) << 1,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `ln n · 2^(prec+16)` (working precision).
    fn ln_work(&self, n: u64) -> BigInt {
        assert!(n >= 1, "ln of zero");
        if n == 1 {
            return BigInt::zero();
        }
        let work = self.prec + 16;
        // n = 2^k · r with r in [1/√2, √2).
        let bits = 64 - n.leading_zeros();
        let mut k = bits as i64 - 1;
        let nf = n as f64;
        if nf / (2f64).powi(k as i32) >= std::f64::consts::SQRT_2 {
            k += 1;
        }
        let pow2: u128 = 1u128 << k;
        let n128 = n as u128;
        let series: BigInt = if n128 >= pow2 {
            atanh_ratio(n128 - pow2, n128 + pow2, work) * 2
        } else {
            -(atanh_ratio(pow2 - n128, n128 + pow2, work) * BigInt::from(2))
        };
        &self.ln2 * BigInt::from(k) + series
    }

    /// `ln n · 2^prec`.
    pub fn ln(&self, n: u64) -> BigInt {
        self.ln_work(n) >> 16
    }

    /// `ln n / (2π) · 2^prec`.
    pub fn ln_over_two_pi(&self, n: u64) -> BigInt {
        (self.ln_work(n) << self.prec) / &self.two_pi
    }
}

/// Exact dyadic rational `mantissa · 2^exp`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dyadic {
    #[serde(with = "bigint_string")]
    pub mantissa: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self {
            mantissa: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn new(mantissa: BigInt, exp: i64) -> Self {
        Self { mantissa, exp }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mantissa.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz as usize;
            self.exp += tz as i64;
        }
        self
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite value has no dyadic form");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        Self::new(BigInt::from(m) * sign, e)
    }

    pub fn to_f64(&self) -> f64 {
        bigint_to_f64_scaled(&self.mantissa, self.exp)
    }

    /// `log2 |value|`, approximately; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.mantissa.is_zero() {
            return f64::NEG_INFINITY;
        }
        let b = self.mantissa.bits() as f64;
        b + self.exp as f64
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::new(&self.mantissa * k, self.exp)
    }

    /// Multiplies by a fixed-point value `x / 2^prec` and returns the result
    /// reduced modulo 1 into `[-1/2, 1/2)`, as an `f64`.
    pub fn mul_frac_centered(&self, x: &BigInt, prec: u32) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let prod = &self.mantissa * x;
        let shift = prec as i64 - self.exp;
        if shift <= 0 {
            // integer product
            return 0.0;
        }
        let shift = shift as usize;
        let modulus = BigInt::one() << shift;
        let r = prod.mod_floor(&modulus);
        // r / 2^shift in [0, 1); keep the top 64 bits.
        let frac = if shift > 64 {
            (r >> (shift - 64)).to_u64().unwrap_or(0) as f64 / 2f64.powi(64)
        } else {
            r.to_u64().unwrap_or(0) as f64 / 2f64.powi(shift as i32)
        };
        if frac >= 0.5 {
            frac - 1.0
        } else {
            frac
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exp)
    }
}

/// `m · 2^e` as `f64`, without intermediate overflow.
pub fn bigint_to_f64_scaled(m: &BigInt, e: i64) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    let bits = m.bits() as i64;
    let (top, shift) = if bits > 64 {
        ((m.abs() >> (bits - 64) as usize).to_u64().unwrap(), bits - 64)
    } else {
        (m.abs().to_u64().unwrap(), 0)
    };
    let mag = (top as f64) * 2f64.powi(0) * pow2(shift + e);
    if m.sign() == Sign::Minus {
        -mag
    } else {
        mag
    }
}

fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else if e < -1022 {
        2f64.powi(-1022) * 2f64.powi((e + 1022) as i32)
    } else {
        2f64.powi(e as i32)
    }
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_f64(x: &BigInt, prec: u32) -> f64 {
        bigint_to_f64_scaled(x, -(prec as i64))
    }

    #[test]
    fn constants_match_f64() {
        assert!((to_f64(&pi(200), 200) - std::f64::consts::PI).abs() < 1e-15);
        assert!((to_f64(&ln2(200), 200) - std::f64::consts::LN_2).abs() < 1e-16);
        let ctx = LogContext::new(128);
        for n in [2u64, 3, 5, 7, 11, 97, 1_000_003, u64::MAX / 3] {
            let got = to_f64(&ctx.ln(n), 128);
            assert!((got - (n as f64).ln()).abs() < 1e-14 * got.max(1.0), "n={n}");
        }
    }

    #[test]
    fn logs_are_additive_to_full_precision() {
        let prec = 300;
        let ctx = LogContext::new(prec);
        let lhs = ctx.ln(6 * 35);
        let rhs = ctx.ln(2) + ctx.ln(3) + ctx.ln(5) + ctx.ln(7);
        assert!((lhs - rhs).abs() < BigInt::from(16));
    }

    #[test]
    fn pi_digits() {
        // 50 decimal digits of pi
        let p = pi(200);
        let scaled: BigInt = p * BigInt::from(10).pow(50) >> 200;
        assert_eq!(
            scaled.to_string(),
            "314159265358979323846264338327950288419716939937510"
        );
    }

    #[test]
    fn dyadic_roundtrip_and_frac() {
        for x in [0.0, 1.0, -3.5, 9.064720283654387, 1e300, 5e-320] {
            assert_eq!(Dyadic::from_f64(x).to_f64(), x);
        }
        // T = 2π/ln 2 makes T ln2/2π an integer up to the rounding of T.
        let prec = 128;
        let ctx = LogContext::new(prec);
        let t = Dyadic::from_f64(2.0 * std::f64::consts::PI / std::f64::consts::LN_2);
        let f = t.mul_frac_centered(&ctx.ln_over_two_pi(2), prec);
        assert!(f.abs() < 1e-15);
        let half = Dyadic::from_f64(0.5);
        let one = (BigInt::one() << prec) * 3;
        assert_eq!(half.mul_frac_centered(&one, prec), -0.5);
    }
}
