//! Simultaneous inhomogeneous approximation of `T·ln P / 2π` modulo 1.
//!
//! A shift `T` is sought so that every prime of a finite set satisfies
//! `‖T ln P/(2π) − β_P‖ < ε_P`, where `β_P` is 0 (`P^{-iT} ≈ 1`), 1/2
//! (`P^{-iT} ≈ −1`) or user supplied. Three search strategies are provided:
//! closed form for one prime, a fixed-point brute force scan, and LLL with
//! progressive scaling. Every reported distance is recomputed exactly.

pub mod lll;

use crate::hp::{Dyadic, LogContext};
use crate::sieve::SpfTable;
use lll::{lll_reduce, LllError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::time::Instant;
use thiserror::Error;

pub const MAX_DIMENSION: usize = 120;
pub const DEFAULT_BRUTE_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiophantineError {
    #[error("{dim} primes requested, at most {max} supported")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("no solution found (best max distance {best_max_dist:e}, searched up to T={searched_t:e})")]
    NotFound { best_max_dist: f64, searched_t: f64 },
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("scan would take {steps} steps, budget is {budget}")]
    BudgetExceeded { steps: u64, budget: u64 },
    #[error("lattice reduction failed: {0}")]
    Lattice(#[from] LllError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    /// `P^{-iT} ≈ 1`
    Homogeneous,
    /// `P^{-iT} ≈ −1`
    HalfShift,
    /// explicit shifts `β_P` (fractions of a turn), one per prime
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxTarget {
    pub primes: Vec<u64>,
    pub mode: TargetMode,
    pub eps: f64,
    /// Overrides `eps` prime by prime when present.
    pub per_prime_eps: Option<Vec<f64>>,
    pub t_max: f64,
    /// Solutions must satisfy `|T| > t_min`; see [`ApproxTarget::min_shift`].
    #[serde(default)]
    pub t_min: Option<f64>,
}

impl ApproxTarget {
    pub fn new(primes: Vec<u64>, mode: TargetMode, eps: f64) -> Self {
        Self {
            primes,
            mode,
            eps,
            per_prime_eps: None,
            t_max: f64::INFINITY,
            t_min: None,
        }
    }

    pub fn with_t_min(mut self, t_min: f64) -> Self {
        self.t_min = Some(t_min);
        self
    }

    /// Explicit `t_min`, or for homogeneous targets the end of the interval
    /// around `T = 0` on which every phase is trivially within tolerance.
    pub fn min_shift(&self) -> f64 {
        self.t_min.unwrap_or_else(|| {
            if self.is_homogeneous() {
                (0..self.dim())
                    .map(|i| 2.0 * PI * self.eps_for(i) / (self.primes[i] as f64).ln())
                    .fold(f64::INFINITY, f64::min)
            } else {
                0.0
            }
        })
    }

    pub fn with_per_prime_eps(mut self, eps: Vec<f64>) -> Self {
        self.per_prime_eps = Some(eps);
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn dim(&self) -> usize {
        self.primes.len()
    }

    /// Target shift of prime `i`, reduced into `[-1/2, 1/2)`.
    pub fn shift(&self, i: usize) -> f64 {
        let b = match &self.mode {
            TargetMode::Homogeneous => 0.0,
            TargetMode::HalfShift => 0.5,
            TargetMode::Custom(v) => v[i],
        };
        let r = b - b.round();
        if r >= 0.5 {
            r - 1.0
        } else {
            r
        }
    }

    pub fn eps_for(&self, i: usize) -> f64 {
        self.per_prime_eps.as_ref().map_or(self.eps, |v| v[i])
    }

    pub fn is_homogeneous(&self) -> bool {
        (0..self.dim()).all(|i| self.shift(i) == 0.0)
    }

    /// Symmetric under `T → −T`, so only positive shifts need searching.
    fn is_symmetric(&self) -> bool {
        (0..self.dim()).all(|i| {
            let s = self.shift(i);
            s == 0.0 || s == -0.5
        })
    }

    pub fn validate(&self) -> Result<(), DiophantineError> {
        let bad = |m: &str| Err(DiophantineError::InvalidTarget(m.to_string()));
        if self.primes.is_empty() {
            return bad("empty prime set");
        }
        if self.dim() > MAX_DIMENSION {
            return Err(DiophantineError::DimensionTooLarge {
                dim: self.dim(),
                max: MAX_DIMENSION,
            });
        }
        if self.primes.iter().any(|&p| p < 2) {
            return bad("primes must be at least 2");
        }
        let mut sorted = self.primes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.dim() {
            return bad("duplicate primes");
        }
        if let TargetMode::Custom(v) = &self.mode {
            if v.len() != self.dim() || v.iter().any(|x| !x.is_finite()) {
                return bad("custom shifts must be finite, one per prime");
            }
        }
        if let Some(v) = &self.per_prime_eps {
            if v.len() != self.dim() {
                return bad("per-prime eps length mismatch");
            }
        }
        for i in 0..self.dim() {
            let e = self.eps_for(i);
            if !(e > 0.0 && e < 0.25) {
                return bad("eps must lie in (0, 1/4)");
            }
        }
        if !(self.t_max > 0.0) {
            return bad("t_max must be positive");
        }
        if let Some(m) = self.t_min {
            if !(m >= 0.0 && m < self.t_max) {
                return bad("t_min must lie in [0, t_max)");
            }
        }
        Ok(())
    }
}

/// Tolerance schedule `ε_P = min(N^-4, ln P / (2π n N^3))`.
///
/// Summed over the prime factorisation of any `j < e^{nN}` this keeps
/// `|j^{-iT} − target_j| ≤ N^-2`.
pub fn per_prime_eps(primes: &[u64], n: u32, big_n: f64) -> Vec<f64> {
    primes
        .iter()
        .map(|&p| {
            let by_log = (p as f64).ln() / (2.0 * PI * n as f64 * big_n.powi(3));
            big_n.powi(-4).min(by_log)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxSolution {
    #[serde(rename = "T")]
    pub t_approx: f64,
    #[serde(rename = "T_exact")]
    pub t: Dyadic,
    pub mode: TargetMode,
    pub primes: Vec<u64>,
    pub eps: f64,
    pub per_prime_dist: Vec<f64>,
    pub max_dist: f64,
    pub method: String,
    pub wall_time: f64,
}

impl ApproxSolution {
    fn build(t: Dyadic, target: &ApproxTarget, method: &str, start: Instant) -> Self {
        let d = verify_solution(&t, target);
        let max_dist = d.iter().cloned().fold(0.0, f64::max);
        Self {
            t_approx: t.to_f64(),
            t,
            mode: target.mode.clone(),
            primes: target.primes.clone(),
            eps: target.eps,
            per_prime_dist: d,
            max_dist,
            method: method.to_string(),
            wall_time: start.elapsed().as_secs_f64(),
        }
    }

    pub fn satisfies(&self, target: &ApproxTarget) -> bool {
        self.per_prime_dist
            .iter()
            .enumerate()
            .all(|(i, &d)| d < target.eps_for(i))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serialises")
    }
}

/// Distance from `x` to `s` on the circle of circumference 1.
pub fn circle_dist(x: f64, s: f64) -> f64 {
    ((x - s + 0.5).rem_euclid(1.0) - 0.5).abs()
}

fn working_precision(t: &Dyadic) -> u32 {
    let lg = t.log2_abs();
    let lg = if lg.is_finite() { lg.max(0.0) } else { 0.0 };
    (lg.ceil() as u32).saturating_add(96).max(128)
}

/// `T ln P / 2π` reduced into `[-1/2, 1/2)` for each prime, computed exactly
/// (error below `2^-64`).
pub fn prime_phases(t: &Dyadic, primes: &[u64]) -> Vec<f64> {
    let prec = working_precision(t);
    let ctx = LogContext::new(prec);
    primes
        .iter()
        .map(|&p| t.mul_frac_centered(&ctx.ln_over_two_pi(p), prec))
        .collect()
}

/// Per-prime distances `‖T ln P/2π − β_P‖`.
pub fn verify_solution(t: &Dyadic, target: &ApproxTarget) -> Vec<f64> {
    prime_phases(t, &target.primes)
        .into_iter()
        .enumerate()
        .map(|(i, ph)| circle_dist(ph, target.shift(i)))
        .collect()
}

/// `T ln j / 2π` mod 1 for every `j ≤ limit`, assembled from exact prime phases.
pub fn multiplicative_phases(t: &Dyadic, limit: u64, spf: &SpfTable) -> Vec<f64> {
    assert!(limit <= spf.limit(), "sieve too small for phase table");
    let primes: Vec<u64> = spf
        .primes()
        .iter()
        .map(|&p| p as u64)
        .take_while(|&p| p <= limit)
        .collect();
    let pp = prime_phases(t, &primes);
    let mut ph = vec![0.0f64; limit as usize + 1];
    let mut next_prime = 0;
    for j in 2..=limit as usize {
        let p = spf.spf(j as u64) as usize;
        let v = if p == j {
            next_prime += 1;
            pp[next_prime - 1]
        } else {
            ph[j / p] + ph[p]
        };
        ph[j] = v - v.round();
    }
    ph
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Closeness {
    pub max: f64,
    pub argmax: u64,
}

/// `max_{2≤j≤j_max} |j^{iT} − target_j|` where the target is 1, or `λ(j)` when
/// `twisted` is set.
pub fn power_closeness(t: &Dyadic, j_max: u64, spf: &SpfTable, twisted: bool) -> Closeness {
    let ph = multiplicative_phases(t, j_max, spf);
    let mut omega = vec![0u8; j_max as usize + 1];
    let mut best = Closeness { max: 0.0, argmax: 1 };
    for j in 2..=j_max {
        let p = spf.spf(j) as u64;
        omega[j as usize] = omega[(j / p) as usize] ^ 1;
        let shift = if twisted {
            0.5 * omega[j as usize] as f64
        } else {
            0.0
        };
        let d = 2.0 * (PI * circle_dist(ph[j as usize], shift)).sin();
        if d > best.max {
            best = Closeness { max: d, argmax: j };
        }
    }
    best
}

/// Exact solution for a single prime: smallest `T` above
/// [`ApproxTarget::min_shift`] with `T ln P/2π ≡ β (mod 1)`.
pub fn single_prime_solution(target: &ApproxTarget) -> Result<ApproxSolution, DiophantineError> {
    target.validate()?;
    if target.dim() != 1 {
        return Err(DiophantineError::InvalidTarget(
            "closed form needs exactly one prime".into(),
        ));
    }
    let start = Instant::now();
    let b = target.shift(0);
    let mut turns = if b > 0.0 { b } else { 1.0 + b };
    let period = 2.0 * PI / (target.primes[0] as f64).ln();
    let floor = target.min_shift();
    if turns * period <= floor {
        turns += ((floor - turns * period) / period).floor() + 1.0;
    }
    let t = period * turns;
    if t > target.t_max {
        return Err(DiophantineError::NotFound {
            best_max_dist: f64::NAN,
            searched_t: target.t_max,
        });
    }
    Ok(ApproxSolution::build(
        Dyadic::from_f64(t),
        target,
        "closed_form",
        start,
    ))
}

/// Fixed-point phase tracker for `T = k·step`: phases are 64-bit fractions of a
/// turn advanced by wrapping addition, exact up to `k·2^-64`.
struct PhaseScan {
    step: Dyadic,
    delta: Vec<u64>,
    shift: Vec<u64>,
    tol: Vec<u64>,
}

impl PhaseScan {
    fn new(target: &ApproxTarget, step: f64) -> Self {
        let step = Dyadic::from_f64(step);
        let prec = working_precision(&step) + 64;
        let ctx = LogContext::new(prec);
        let to_frac = |x: f64| -> u64 {
            let r = x.rem_euclid(1.0);
            (r * 2f64.powi(64)) as u128 as u64
        };
        let delta = target
            .primes
            .iter()
            .map(|&p| {
                let a = ctx.ln_over_two_pi(p);
                // frac(step · a / 2^prec) in 2^-64 units
                let prod = &step.mantissa * a;
                let sh = prec as i64 - step.exp - 64;
                let v = if sh >= 0 {
                    prod >> sh as usize
                } else {
                    prod << (-sh) as usize
                };
                v.mod_floor(&(BigInt::one() << 64)).to_u64().unwrap()
            })
            .collect();
        let n = target.dim();
        Self {
            step,
            delta,
            shift: (0..n).map(|i| to_frac(target.shift(i))).collect(),
            tol: (0..n)
                .map(|i| (target.eps_for(i) * 2f64.powi(64)) as u64)
                .collect(),
        }
    }

    fn start(&self, k0: u64) -> Vec<u64> {
        self.delta.iter().map(|&d| d.wrapping_mul(k0)).collect()
    }

    #[inline]
    fn dist(&self, i: usize, ph: u64) -> u64 {
        let x = ph.wrapping_sub(self.shift[i]);
        x.min(x.wrapping_neg())
    }

    fn t_of(&self, k: u64) -> Dyadic {
        self.step.mul_int(&BigInt::from(k))
    }
}

fn steps_in(step: f64, t_min: f64, t_max: f64, budget: u64) -> Result<(u64, u64), DiophantineError> {
    if !(step > 0.0) || !t_min.is_finite() || t_min < 0.0 || !(t_max >= t_min) {
        return Err(DiophantineError::InvalidTarget("bad scan range".into()));
    }
    let k0 = (t_min / step).ceil().max(1.0);
    let k1 = (t_max / step).floor();
    let steps = if k1 >= k0 { k1 - k0 + 1.0 } else { 0.0 };
    if !steps.is_finite() || steps > budget as f64 {
        return Err(DiophantineError::BudgetExceeded {
            steps: if steps.is_finite() { steps as u64 } else { u64::MAX },
            budget,
        });
    }
    Ok((k0 as u64, k1 as u64))
}

/// Scans `T = k·step` from just above `target.min_shift()` up to
/// `target.t_max` and returns the first hit.
pub fn brute_force_find(
    target: &ApproxTarget,
    step: f64,
    budget: u64,
) -> Result<ApproxSolution, DiophantineError> {
    target.validate()?;
    let start = Instant::now();
    let floor = target.min_shift();
    let (mut k0, k1) = steps_in(step, floor, target.t_max, budget)?;
    if k0 as f64 * step <= floor {
        k0 += 1;
    }
    let scan = PhaseScan::new(target, step);
    let mut ph = scan.start(k0);
    let n = target.dim();
    let mut best = u64::MAX;
    for k in k0..=k1 {
        let mut worst = 0u64;
        let mut ok = true;
        for i in 0..n {
            let d = scan.dist(i, ph[i]);
            if d >= scan.tol[i] {
                ok = false;
                worst = worst.max(d);
                break;
            }
            worst = worst.max(d);
        }
        if ok {
            let sol = ApproxSolution::build(scan.t_of(k), target, "brute_force", start);
            if sol.satisfies(target) {
                return Ok(sol);
            }
        } else if worst < best {
            best = worst;
        }
        for i in 0..n {
            ph[i] = ph[i].wrapping_add(scan.delta[i]);
        }
    }
    Err(DiophantineError::NotFound {
        best_max_dist: best as f64 / 2f64.powi(64),
        searched_t: target.t_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCandidate {
    pub t: f64,
    pub max_dist: f64,
}

/// Best `keep` shifts in `[t_min, t_max]` by maximal distance, pairwise at
/// least `min_sep` apart. Ignores `eps`.
pub fn brute_force_best(
    target: &ApproxTarget,
    step: f64,
    t_min: f64,
    t_max: f64,
    keep: usize,
    min_sep: f64,
    budget: u64,
) -> Result<Vec<ScanCandidate>, DiophantineError> {
    target.validate()?;
    let (k0, k1) = steps_in(step, t_min, t_max, budget)?;
    let scan = PhaseScan::new(target, step);
    let mut ph = scan.start(k0);
    let n = target.dim();
    let sep = (min_sep / step).ceil() as u64;
    // (worst distance, k), sorted ascending
    let mut kept: Vec<(u64, u64)> = Vec::with_capacity(keep + 1);
    for k in k0..=k1 {
        let cutoff = if kept.len() == keep {
            kept[keep - 1].0
        } else {
            u64::MAX
        };
        let mut worst = 0u64;
        for i in 0..n {
            worst = worst.max(scan.dist(i, ph[i]));
            if worst >= cutoff {
                break;
            }
        }
        if worst < cutoff && keep > 0 {
            if let Some(pos) = kept.iter().position(|&(_, kk)| k - kk < sep) {
                if worst < kept[pos].0 {
                    kept.remove(pos);
                } else {
                    for i in 0..n {
                        ph[i] = ph[i].wrapping_add(scan.delta[i]);
                    }
                    continue;
                }
            }
            let at = kept.partition_point(|&(w, _)| w <= worst);
            kept.insert(at, (worst, k));
            kept.truncate(keep);
        }
        for i in 0..n {
            ph[i] = ph[i].wrapping_add(scan.delta[i]);
        }
    }
    Ok(kept
        .into_iter()
        .map(|(_, k)| {
            let t = scan.t_of(k);
            let d = verify_solution(&t, target);
            ScanCandidate {
                t: t.to_f64(),
                max_dist: d.into_iter().fold(0.0, f64::max),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig {
    /// `T` is searched on the grid `q · 2^-step_bits`.
    pub step_bits: u32,
    pub guard_bits: u32,
    /// Growth of the multiplier bound per progressive stage.
    pub stage_bits: u32,
    pub delta: f64,
    /// Minimum working precision for the logarithms.
    pub precision_bits: u32,
    /// Hard cap on `log2` of the multiplier.
    pub max_bits: u32,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            step_bits: 20,
            guard_bits: 16,
            stage_bits: 12,
            delta: 0.99,
            precision_bits: 192,
            max_bits: 2048,
        }
    }
}

fn scaled_int(x: f64, shift: i64) -> BigInt {
    // round(x · 2^shift) for positive finite x
    let d = Dyadic::from_f64(x);
    let e = d.exp + shift;
    if e >= 0 {
        d.mantissa << e as usize
    } else {
        let s = (-e) as usize;
        (d.mantissa + (BigInt::one() << (s - 1))) >> s
    }
}

fn round_shift(x: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    let half = BigInt::one() << (s - 1) as usize;
    (x + half).div_floor(&(BigInt::one() << s as usize))
}

struct LatticeParams {
    w: BigInt,
    m: Vec<BigInt>,
    a: Vec<BigInt>,
    c: Vec<BigInt>,
    mt: BigInt,
}

impl LatticeParams {
    fn new(target: &ApproxTarget, alpha: &[BigInt], alpha_bits: u32, qb: u32, g: u32) -> Self {
        let k = target.dim();
        let sbits = (qb + g) as i64;
        let m: Vec<BigInt> = (0..k)
            .map(|i| scaled_int(1.0 / target.eps_for(i), sbits))
            .collect();
        let a = (0..k).map(|i| round_shift(&(&m[i] * &alpha[i]), alpha_bits)).collect();
        let c = (0..k)
            .map(|i| -scaled_int_signed(target.shift(i), &m[i]))
            .collect();
        Self {
            w: BigInt::one() << g as usize,
            m,
            a,
            c,
            mt: BigInt::one() << sbits as usize,
        }
    }

    fn basis(&self, inhom: bool) -> Vec<Vec<BigInt>> {
        let k = self.m.len();
        let n = 1 + k + inhom as usize;
        let mut rows = Vec::with_capacity(n);
        let mut r0 = vec![BigInt::zero(); n];
        r0[0] = self.w.clone();
        for i in 0..k {
            r0[1 + i] = self.a[i].clone();
        }
        rows.push(r0);
        for i in 0..k {
            let mut r = vec![BigInt::zero(); n];
            r[1 + i] = self.m[i].clone();
            rows.push(r);
        }
        if inhom {
            let mut r = vec![BigInt::zero(); n];
            for i in 0..k {
                r[1 + i] = self.c[i].clone();
            }
            r[n - 1] = self.mt.clone();
            rows.push(r);
        }
        rows
    }

    /// Integer coordinates of `v` in the canonical basis.
    fn coords(&self, v: &[BigInt], inhom: bool) -> Vec<BigInt> {
        let k = self.m.len();
        let u0 = &v[0] / &self.w;
        let ue = if inhom {
            &v[k + 1] / &self.mt
        } else {
            BigInt::zero()
        };
        let mut u = Vec::with_capacity(k + 2);
        u.push(u0.clone());
        for i in 0..k {
            let rest = &v[1 + i] - &u0 * &self.a[i] - &ue * &self.c[i];
            u.push(rest / &self.m[i]);
        }
        if inhom {
            u.push(ue);
        }
        u
    }

    fn vector(&self, u: &[BigInt], inhom: bool) -> Vec<BigInt> {
        let k = self.m.len();
        let ue = if inhom { u[k + 1].clone() } else { BigInt::zero() };
        let mut v = Vec::with_capacity(k + 2);
        v.push(&u[0] * &self.w);
        for i in 0..k {
            v.push(&u[0] * &self.a[i] + &u[1 + i] * &self.m[i] + &ue * &self.c[i]);
        }
        if inhom {
            v.push(ue * &self.mt);
        }
        v
    }
}

fn scaled_int_signed(x: f64, m: &BigInt) -> BigInt {
    // round(x · m)
    if x == 0.0 {
        return BigInt::zero();
    }
    let d = Dyadic::from_f64(x);
    let prod = &d.mantissa * m;
    if d.exp >= 0 {
        prod << d.exp as usize
    } else {
        round_shift(&prod, (-d.exp) as u32)
    }
}

/// LLL search with progressive scaling: the multiplier bound grows by
/// `stage_bits` per stage and each stage starts from the previous reduced basis.
pub fn lattice_find(
    target: &ApproxTarget,
    cfg: &LatticeConfig,
) -> Result<ApproxSolution, DiophantineError> {
    target.validate()?;
    let min_eps = (0..target.dim())
        .map(|i| target.eps_for(i))
        .fold(f64::INFINITY, f64::min);
    if min_eps < 2f64.powi(-(cfg.precision_bits as i32) / 4) {
        return Err(DiophantineError::InvalidTarget(format!(
            "eps {min_eps:e} below 2^-{}",
            cfg.precision_bits / 4
        )));
    }
    if target.dim() == 1 {
        return single_prime_solution(target);
    }
    let start = Instant::now();
    let inhom = !target.is_homogeneous();
    let symmetric = target.is_symmetric();
    let floor = target.min_shift();
    let g = cfg.guard_bits;
    let step_exp = -(cfg.step_bits as i64);
    let q_cap_bits = if target.t_max.is_finite() {
        ((target.t_max.log2() + cfg.step_bits as f64).ceil().max(1.0) as u32).min(cfg.max_bits)
    } else {
        cfg.max_bits
    };
    let eps_bits = (1.0 / min_eps).log2().ceil() as u32;
    let alpha_bits = (q_cap_bits + g + eps_bits + 64).max(cfg.precision_bits);
    let prec = alpha_bits - cfg.step_bits;
    let ctx = LogContext::new(prec);
    // α_i = step · ln P/2π in units of 2^-alpha_bits
    let alpha: Vec<BigInt> = target.primes.iter().map(|&p| ctx.ln_over_two_pi(p)).collect();

    let mut best_dist = f64::INFINITY;
    let mut qb = 0u32;
    let mut params = LatticeParams::new(target, &alpha, alpha_bits, qb, g);
    let mut basis = params.basis(inhom);
    loop {
        lll_reduce(&mut basis, cfg.delta)?;
        let mut found: Option<ApproxSolution> = None;
        let consider = |q: BigInt, found: &mut Option<ApproxSolution>, best_dist: &mut f64| {
            if q.is_zero() {
                return;
            }
            let q = if symmetric { q.abs() } else { q };
            let t = Dyadic::new(q, step_exp);
            let ta = t.to_f64().abs();
            if ta > target.t_max || ta <= floor {
                return;
            }
            if let Some(f) = found {
                if t.log2_abs() >= f.t.log2_abs() {
                    return;
                }
            }
            let sol = ApproxSolution::build(t, target, "lattice", start);
            *best_dist = best_dist.min(sol.max_dist);
            if sol.satisfies(target) {
                let better = found.as_ref().map_or(true, |f| sol.t_approx.abs() < f.t_approx.abs());
                if better {
                    *found = Some(sol);
                }
            }
        };
        let coords: Vec<Vec<BigInt>> = basis.iter().map(|v| params.coords(v, inhom)).collect();
        for u in &coords {
            if inhom {
                let ue = u.last().unwrap();
                if ue.abs() != BigInt::one() {
                    continue;
                }
                let q = if ue.is_positive() { u[0].clone() } else { -u[0].clone() };
                consider(q, &mut found, &mut best_dist);
            } else {
                for mult in 1..=3 {
                    consider(&u[0] * mult, &mut found, &mut best_dist);
                }
            }
        }
        if !inhom {
            let few = coords.len().min(8);
            for i in 0..few {
                for j in i + 1..few {
                    consider(&coords[i][0] + &coords[j][0], &mut found, &mut best_dist);
                    consider(&coords[i][0] - &coords[j][0], &mut found, &mut best_dist);
                }
            }
        }
        if let Some(mut sol) = found {
            sol.wall_time = start.elapsed().as_secs_f64();
            return Ok(sol);
        }
        if qb >= q_cap_bits {
            return Err(DiophantineError::NotFound {
                best_max_dist: best_dist,
                searched_t: target.t_max.min(2f64.powi((qb as i32) - cfg.step_bits as i32)),
            });
        }
        qb = (qb + cfg.stage_bits).min(q_cap_bits);
        let next = LatticeParams::new(target, &alpha, alpha_bits, qb, g);
        basis = coords.iter().map(|u| next.vector(u, inhom)).collect();
        params = next;
    }
}

/// Search strategy dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Auto,
    Lattice,
    BruteForce,
}

pub fn find_shift(
    target: &ApproxTarget,
    method: Method,
    cfg: &LatticeConfig,
) -> Result<ApproxSolution, DiophantineError> {
    match method {
        Method::BruteForce => brute_force_find(target, 1e-3, DEFAULT_BRUTE_BUDGET),
        Method::Lattice => lattice_find(target, cfg),
        Method::Auto if target.dim() == 1 => single_prime_solution(target),
        Method::Auto => lattice_find(target, cfg),
    }
}
