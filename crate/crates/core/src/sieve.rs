//! Smallest-prime-factor tables and the multiplicative coefficient streams
//! `d_p(n)` and `λ(n) d_p(n)`.

use std::io::{self, Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("limit {limit} exceeds the capacity {max}")]
    CapacityError { limit: u64, max: u64 },
    #[error("n = {n} outside 1..={limit}")]
    OutOfRange { n: u64, limit: u64 },
    #[error("cache format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Hard upper bound on sieve limits.
pub const MAX_LIMIT: u64 = 1 << 31;
/// Default memory budget for a sieve, in bytes.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

/// `spf[n]` is the smallest prime factor of `n` for `2 <= n <= limit`.
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SpfTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor; `0` for `n < 2`.
    pub fn spf(&self, n: u64) -> u32 {
        self.spf[n as usize]
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    fn check(&self, n: u64) -> Result<(), SieveError> {
        if n < 1 || n > self.limit {
            return Err(SieveError::OutOfRange { n, limit: self.limit });
        }
        Ok(())
    }

    /// Prime factorization as `(prime, exponent)` pairs in increasing order.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>, SieveError> {
        self.check(n)?;
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        Ok(out)
    }

    /// Number of prime factors with multiplicity.
    pub fn big_omega(&self, n: u64) -> Result<u32, SieveError> {
        Ok(self.factorize(n)?.iter().map(|&(_, e)| e).sum())
    }
}

/// Linear sieve with the default memory budget.
pub fn sieve_spf(limit: u64) -> Result<SpfTable, SieveError> {
    sieve_spf_with_budget(limit, DEFAULT_MEMORY_BUDGET)
}

pub fn sieve_spf_with_budget(limit: u64, memory_budget: u64) -> Result<SpfTable, SieveError> {
    let limit = limit.max(2);
    let bytes = limit.saturating_mul(4).saturating_add(limit / 2);
    if limit > MAX_LIMIT || bytes > memory_budget {
        let max = MAX_LIMIT.min(memory_budget / 4);
        return Err(SieveError::CapacityError { limit, max });
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let ip = i * p as usize;
            if p > si || ip > n {
                break;
            }
            spf[ip] = p;
        }
    }
    Ok(SpfTable { limit, spf, primes })
}

/// All primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// `d_p(P^e) = Π_{j=1}^{e} (p+j-1)/j` for `e = 0..=max_e`.
pub fn prime_power_values(p: f64, max_e: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_e + 1);
    let mut v = 1.0;
    out.push(v);
    for j in 1..=max_e {
        v *= (p + j as f64 - 1.0) / j as f64;
        out.push(v);
    }
    out
}

/// Generalized divisor function `d_p(n)`.
pub fn d_p(n: u64, p: f64, spf: &SpfTable) -> Result<f64, SieveError> {
    let f = spf.factorize(n)?;
    let max_e = f.iter().map(|&(_, e)| e).max().unwrap_or(0) as usize;
    let pk = prime_power_values(p, max_e);
    Ok(f.iter().map(|&(_, e)| pk[e as usize]).product())
}

/// Liouville function `(-1)^{Ω(n)}`.
pub fn liouville(n: u64, spf: &SpfTable) -> Result<i8, SieveError> {
    Ok(if spf.big_omega(n)? % 2 == 0 { 1 } else { -1 })
}

/// `values[n] = d_p(n)` (or `λ(n) d_p(n)` when signed) for `1 <= n <= limit`;
/// `values[0]` is unused and zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub p: f64,
    pub limit: u64,
    pub signed: bool,
    pub values: Vec<f64>,
}

impl CoefficientTable {
    pub fn get(&self, n: u64) -> Result<f64, SieveError> {
        if n < 1 || n > self.limit {
            return Err(SieveError::OutOfRange { n, limit: self.limit });
        }
        Ok(self.values[n as usize])
    }

    pub fn dump<W: Write>(&self, w: W) -> Result<(), SieveError> {
        let header = CacheHeader {
            kind: CacheKind::Coefficients,
            p: self.p,
            limit: self.limit,
            signed: self.signed,
            n: 0,
            big_n: 0.0,
        };
        write_cache(w, &header, &self.values)
    }

    pub fn load<R: Read>(r: R) -> Result<Self, SieveError> {
        let (h, values) = read_cache(r)?;
        if h.kind != CacheKind::Coefficients {
            return Err(SieveError::Format("not a coefficient table".into()));
        }
        Ok(Self {
            p: h.p,
            limit: h.limit,
            signed: h.signed,
            values,
        })
    }
}

/// One-pass multiplicative fill: `values[n] = values[n / P^e] · d_p(P^e)` with
/// `P = spf(n)`.
pub fn coefficient_table(
    limit: u64,
    p: f64,
    signed: bool,
    spf: &SpfTable,
) -> Result<CoefficientTable, SieveError> {
    if limit > spf.limit() {
        return Err(SieveError::CapacityError {
            limit,
            max: spf.limit(),
        });
    }
    let n = limit as usize;
    let mut pk = prime_power_values(p, 64);
    if signed {
        for (e, v) in pk.iter_mut().enumerate() {
            if e % 2 == 1 {
                *v = -*v;
            }
        }
    }
    let mut values = vec![0.0; n + 1];
    if n >= 1 {
        values[1] = 1.0;
    }
    for i in 2..=n {
        let q = spf.spf[i] as usize;
        let mut rest = i / q;
        let mut e = 1;
        while rest % q == 0 {
            rest /= q;
            e += 1;
        }
        values[i] = values[rest] * pk[e];
    }
    Ok(CoefficientTable {
        p,
        limit,
        signed,
        values,
    })
}

const MAGIC: &[u8; 4] = b"LPZC";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheKind {
    Coefficients,
    Smoothed,
}

/// Header of the binary coefficient cache; `n` and `big_n` are only
/// meaningful for smoothed polynomials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheHeader {
    pub kind: CacheKind,
    pub p: f64,
    pub limit: u64,
    pub signed: bool,
    pub n: u32,
    pub big_n: f64,
}

pub fn write_cache<W: Write>(mut w: W, h: &CacheHeader, values: &[f64]) -> Result<(), SieveError> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[match h.kind {
        CacheKind::Coefficients => 0u8,
        CacheKind::Smoothed => 1u8,
    }])?;
    w.write_all(&h.p.to_le_bytes())?;
    w.write_all(&h.limit.to_le_bytes())?;
    w.write_all(&[h.signed as u8])?;
    w.write_all(&h.n.to_le_bytes())?;
    w.write_all(&h.big_n.to_le_bytes())?;
    w.write_all(&(values.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(values.len().min(1 << 16) * 8);
    for chunk in values.chunks(1 << 16) {
        buf.clear();
        for v in chunk {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

fn read_array<const K: usize, R: Read>(r: &mut R) -> Result<[u8; K], SieveError> {
    let mut b = [0u8; K];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_cache<R: Read>(mut r: R) -> Result<(CacheHeader, Vec<f64>), SieveError> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(SieveError::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(SieveError::Format(format!("unsupported version {version}")));
    }
    let kind = match read_array::<1, _>(&mut r)?[0] {
        0 => CacheKind::Coefficients,
        1 => CacheKind::Smoothed,
        k => return Err(SieveError::Format(format!("unknown kind {k}"))),
    };
    let p = f64::from_le_bytes(read_array(&mut r)?);
    let limit = u64::from_le_bytes(read_array(&mut r)?);
    let signed = read_array::<1, _>(&mut r)?[0] != 0;
    let n = u32::from_le_bytes(read_array(&mut r)?);
    let big_n = f64::from_le_bytes(read_array(&mut r)?);
    let len = u64::from_le_bytes(read_array(&mut r)?);
    if len > limit.saturating_add(1) {
        return Err(SieveError::Format("length exceeds limit".into()));
    }
    let mut raw = vec![0u8; len as usize * 8];
    r.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((
        CacheHeader {
            kind,
            p,
            limit,
            signed,
            n,
            big_n,
        },
        values,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_division_is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn small_spf() {
        let t = sieve_spf(10).unwrap();
        let got: Vec<u32> = (2..=10).map(|n| t.spf(n)).collect();
        assert_eq!(got, vec![2, 3, 2, 5, 2, 7, 2, 3, 2]);
        assert_eq!(sieve_spf(2).unwrap().spf(2), 2);
    }

    #[test]
    fn large_prime_entry() {
        let t = sieve_spf(1_000_000).unwrap();
        assert!(trial_division_is_prime(999_983));
        assert_eq!(t.spf(999_983), 999_983);
        assert_eq!(t.primes().len(), 78_498);
        for n in (2..1_000_000u64).step_by(9973) {
            let p = t.spf(n) as u64;
            assert!(trial_division_is_prime(p) && n % p == 0);
        }
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            sieve_spf(MAX_LIMIT + 1),
            Err(SieveError::CapacityError { .. })
        ));
        assert!(matches!(
            sieve_spf_with_budget(1000, 100),
            Err(SieveError::CapacityError { .. })
        ));
    }

    #[test]
    fn divisor_examples() {
        let t = sieve_spf(100).unwrap();
        assert_eq!(d_p(12, 2.0, &t).unwrap(), 6.0);
        for n in 1..=100 {
            assert_eq!(d_p(n, 1.0, &t).unwrap(), 1.0);
            assert_eq!(d_p(n, 0.0, &t).unwrap(), if n == 1 { 1.0 } else { 0.0 });
        }
        assert_eq!(d_p(4, 0.5, &t).unwrap(), 0.375);
        assert!(d_p(101, 1.0, &t).is_err());
        assert!(d_p(0, 1.0, &t).is_err());
    }

    #[test]
    fn liouville_examples() {
        let t = sieve_spf(1 << 20).unwrap();
        assert_eq!(liouville(1, &t).unwrap(), 1);
        assert_eq!(liouville(12, &t).unwrap(), -1);
        for k in 0..=20u32 {
            let want = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(liouville(1 << k, &t).unwrap(), want);
        }
    }

    #[test]
    fn table_examples() {
        let t = sieve_spf(100).unwrap();
        let c = coefficient_table(6, 2.0, false, &t).unwrap();
        assert_eq!(&c.values[1..], &[1.0, 2.0, 2.0, 3.0, 2.0, 4.0]);
        let c = coefficient_table(4, 2.0, true, &t).unwrap();
        assert_eq!(&c.values[1..], &[1.0, -2.0, -2.0, 3.0]);
        let c = coefficient_table(50, 0.0, false, &t).unwrap();
        assert_eq!(c.values[1], 1.0);
        assert!(c.values[2..].iter().all(|&v| v == 0.0));
        assert!(coefficient_table(101, 1.0, false, &t).is_err());
    }

    #[test]
    fn table_matches_pointwise() {
        let t = sieve_spf(5000).unwrap();
        for &(p, signed) in &[(2.0, false), (0.75, true), (-0.5, false), (3.3, true)] {
            let c = coefficient_table(5000, p, signed, &t).unwrap();
            for n in 1..=5000u64 {
                let mut want = d_p(n, p, &t).unwrap();
                if signed {
                    want *= liouville(n, &t).unwrap() as f64;
                }
                assert!((c.values[n as usize] - want).abs() <= 1e-13 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn nonnegative_for_nonnegative_p() {
        let t = sieve_spf(100_000).unwrap();
        for p in [0.0, 0.3, 1.0, 2.5] {
            let c = coefficient_table(100_000, p, false, &t).unwrap();
            assert!(c.values[1..].iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn euler_product_consistency() {
        let limit = 1_000_000u64;
        let t = sieve_spf(limit).unwrap();
        let c = coefficient_table(limit, 2.0, false, &t).unwrap();
        let s: f64 = (1..=limit as usize)
            .rev()
            .map(|n| c.values[n] / (n as f64 * n as f64))
            .sum();
        let target = (std::f64::consts::PI.powi(2) / 6.0).powi(2);
        // Σ_{n>X} d_2(n)/n² <= (ln X + 2γ + 1)/X + O(X^{-3/2})
        let x = limit as f64;
        let tail = (x.ln() + 3.0) / x;
        assert!(s <= target && target - s <= tail, "gap {}", target - s);
    }

    #[test]
    fn cache_roundtrip() {
        let t = sieve_spf(1000).unwrap();
        let c = coefficient_table(1000, 1.5, true, &t).unwrap();
        let mut buf = Vec::new();
        c.dump(&mut buf).unwrap();
        assert_eq!(CoefficientTable::load(&buf[..]).unwrap(), c);
        buf[0] = b'X';
        assert!(CoefficientTable::load(&buf[..]).is_err());
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    fn shared() -> &'static SpfTable {
        static T: std::sync::OnceLock<SpfTable> = std::sync::OnceLock::new();
        T.get_or_init(|| sieve_spf(9_000_000).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn multiplicative_on_coprime_pairs(m in 1u64..3000, n in 1u64..3000, p in -2.0f64..4.0) {
            prop_assume!(gcd(m, n) == 1);
            let t = shared();
            let lhs = d_p(m * n, p, t).unwrap();
            let rhs = d_p(m, p, t).unwrap() * d_p(n, p, t).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
        }

        #[test]
        fn liouville_completely_multiplicative(m in 1u64..3000, n in 1u64..3000) {
            let t = shared();
            prop_assert_eq!(
                liouville(m * n, t).unwrap(),
                liouville(m, t).unwrap() * liouville(n, t).unwrap()
            );
        }
    }
}
