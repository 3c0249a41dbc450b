//! Smoothed Dirichlet polynomials `Σ_j c_j j^{-s}` with
//! `c_j = d_p(j) [λ(j)] θ_n(ln j / N)`, and the numerical checks relating them
//! to convolutions of `ζ^p` against `θ̂_n`.

use crate::diophantine::multiplicative_phases;
use crate::hp::Dyadic;
use crate::kernels::{build_theta_n, theta_hat_n, KernelError, PiecewiseKernel};
use crate::quad::{try_integrate, QuadConfig, QuadError};
use crate::sieve::{
    coefficient_table, read_cache, write_cache, CacheHeader, CacheKind, SieveError, SpfTable,
};
use crate::sum::{ComplexSum, NeumaierSum, WindowSum};
use crate::zeta::{zeta, zeta_pow, zeta_regular, ComplexValue, EvalConfig, ZetaError};
use crate::{Complex64, EULER_GAMMA};
use std::f64::consts::PI;
use std::io::{Read, Write};
use thiserror::Error;

pub const DEFAULT_COEFF_BUDGET: u64 = 100_000_000;

/// Second Stieltjes constant `γ_1`.
const STIELTJES_1: f64 = -0.072_815_845_483_676_72;

const CHUNK: usize = 4096;

#[derive(Debug, Error)]
pub enum DirichletError {
    #[error("cutoff {cutoff} exceeds coefficient budget {budget}")]
    Capacity { cutoff: u64, budget: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

#[derive(Debug, Clone)]
pub struct SmoothedPolynomial {
    p: f64,
    n: u32,
    big_n: f64,
    signed: bool,
    cutoff: u64,
    /// `coeffs[j] = c_j`, `coeffs[0] = 0`.
    coeffs: Vec<f64>,
    log_table: Vec<f64>,
}

/// `floor(e^{nN})`, nudged up when `e^{nN}` lands a rounding error below an integer.
pub fn smoothed_cutoff(n: u32, big_n: f64) -> f64 {
    let e = (n as f64 * big_n).exp();
    (e * (1.0 + 1e-12)).floor()
}

pub fn build_smoothed(
    p: f64,
    n: u32,
    big_n: f64,
    signed: bool,
    spf: &SpfTable,
) -> Result<SmoothedPolynomial, DirichletError> {
    build_smoothed_with_budget(p, n, big_n, signed, spf, DEFAULT_COEFF_BUDGET)
}

pub fn build_smoothed_with_budget(
    p: f64,
    n: u32,
    big_n: f64,
    signed: bool,
    spf: &SpfTable,
    budget: u64,
) -> Result<SmoothedPolynomial, DirichletError> {
    if !(big_n > 0.0) || !big_n.is_finite() || !p.is_finite() {
        return Err(DirichletError::InvalidInput("need finite p and N > 0".into()));
    }
    let kernel = build_theta_n(n)?;
    let cutoff = smoothed_cutoff(n, big_n);
    if cutoff > budget as f64 {
        return Err(DirichletError::Capacity {
            cutoff: if cutoff < u64::MAX as f64 { cutoff as u64 } else { u64::MAX },
            budget,
        });
    }
    let cutoff = cutoff as u64;
    let table = coefficient_table(cutoff, p, signed, spf)?;
    let log_table: Vec<f64> = (0..=cutoff)
        .map(|j| if j == 0 { 0.0 } else { (j as f64).ln() })
        .collect();
    let mut coeffs = table.values;
    coeffs[0] = 0.0;
    for j in 1..=cutoff as usize {
        if coeffs[j] != 0.0 {
            coeffs[j] *= kernel.eval(log_table[j] / big_n);
        }
    }
    Ok(SmoothedPolynomial {
        p,
        n,
        big_n,
        signed,
        cutoff,
        coeffs,
        log_table,
    })
}

impl SmoothedPolynomial {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn big_n(&self) -> f64 {
        self.big_n
    }

    pub fn signed(&self) -> bool {
        self.signed
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// `c_j`; zero outside `1..=cutoff`.
    pub fn coeff(&self, j: u64) -> f64 {
        if j == 0 || j > self.cutoff {
            0.0
        } else {
            self.coeffs[j as usize]
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `Σ |c_j| / j`.
    pub fn mass(&self) -> f64 {
        let mut s = NeumaierSum::new();
        for j in 1..=self.cutoff as usize {
            s.add(self.coeffs[j].abs() / j as f64);
        }
        s.sum()
    }

    fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (1..=self.cutoff as usize)
            .filter(move |&j| self.coeffs[j] != 0.0)
            .map(move |j| (self.log_table[j], self.coeffs[j] / j as f64))
    }

    /// Value on the line `Re s = 1`: `Σ c_j j^{-1-it}`.
    pub fn eval(&self, t: f64) -> ComplexValue {
        let mut total = ComplexSum::new();
        let mut chunk = ComplexSum::new();
        let mut k = 0;
        for (l, a) in self.terms() {
            let (s, c) = (t * l).sin_cos();
            chunk.add(Complex64::new(a * c, -a * s));
            k += 1;
            if k == CHUNK {
                total.add(chunk.sum());
                chunk = ComplexSum::new();
                k = 0;
            }
        }
        total.add(chunk.sum());
        let mass = self.mass();
        let ln_cut = (self.cutoff.max(1) as f64).ln();
        let err = f64::EPSILON * mass * (self.cutoff as f64 + t.abs() * ln_cut + 4.0);
        ComplexValue::new(total.sum(), err)
    }

    /// `Σ c_j j^{-s}` for arbitrary complex `s`.
    pub fn eval_at(&self, s: Complex64) -> ComplexValue {
        let mut total = ComplexSum::new();
        let mut bound = NeumaierSum::new();
        for j in 1..=self.cutoff as usize {
            let c = self.coeffs[j];
            if c == 0.0 {
                continue;
            }
            let l = self.log_table[j];
            let m = c * (-s.re * l).exp();
            total.add(Complex64::from_polar(m, -s.im * l));
            bound.add(m.abs());
        }
        let err = f64::EPSILON * bound.sum() * (self.cutoff as f64 + s.im.abs() * 40.0 + 4.0);
        ComplexValue::new(total.sum(), err)
    }

    /// Fast evaluator on `|t - center| <= half_width` (line `Re s = 1`).
    pub fn window(&self, center: f64, half_width: f64) -> WindowSum {
        WindowSum::build(
            center,
            half_width,
            self.terms().map(|(l, a)| (l, Complex64::new(a, 0.0))),
        )
    }

    /// Coefficients `c_j/j · j^{-iT}` for an exact shift `T`, with a bound on
    /// the total phase rounding.
    pub fn rotated(&self, shift: &Dyadic, spf: &SpfTable) -> (Vec<(f64, Complex64)>, f64) {
        let ph = multiplicative_phases(shift, self.cutoff, spf);
        let mut err = NeumaierSum::new();
        let items = self
            .terms()
            .map(|(l, a)| {
                let j = l.exp().round() as usize;
                // ≤ log2(j) additions, each rounding by one ulp of 1/2
                err.add(a.abs() * 2.0 * PI * f64::EPSILON * (l / 2f64.ln() + 2.0));
                (l, Complex64::from_polar(a, -2.0 * PI * ph[j]))
            })
            .collect();
        (items, err.sum())
    }

    /// Evaluates `Σ c_j j^{-1-i(T+t)}` at each `t` in the grid.
    pub fn eval_shifted(&self, shift: &Dyadic, t_grid: &[f64], spf: &SpfTable) -> Vec<ComplexValue> {
        let (items, phase_err) = self.rotated(shift, spf);
        let mass = self.mass();
        t_grid
            .iter()
            .map(|&t| {
                let mut acc = ComplexSum::new();
                for &(l, a) in &items {
                    acc.add(a * Complex64::from_polar(1.0, -t * l));
                }
                let err = phase_err + f64::EPSILON * mass * (items.len() as f64 + t.abs() * 40.0);
                ComplexValue::new(acc.sum(), err)
            })
            .collect()
    }

    pub fn dump<W: Write>(&self, w: W) -> Result<(), DirichletError> {
        let header = CacheHeader {
            kind: CacheKind::Smoothed,
            p: self.p,
            limit: self.cutoff,
            signed: self.signed,
            n: self.n,
            big_n: self.big_n,
        };
        write_cache(w, &header, &self.coeffs)?;
        Ok(())
    }

    pub fn load<R: Read>(r: R) -> Result<Self, DirichletError> {
        let (h, coeffs) = read_cache(r)?;
        if h.kind != CacheKind::Smoothed {
            return Err(SieveError::Format("not a smoothed polynomial".into()).into());
        }
        if coeffs.len() as u64 != h.limit + 1 {
            return Err(SieveError::Format("length mismatch".into()).into());
        }
        let log_table = (0..=h.limit)
            .map(|j| if j == 0 { 0.0 } else { (j as f64).ln() })
            .collect();
        Ok(Self {
            p: h.p,
            n: h.n,
            big_n: h.big_n,
            signed: h.signed,
            cutoff: h.limit,
            coeffs,
            log_table,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionCheck {
    pub dirichlet: ComplexValue,
    pub integral: ComplexValue,
    pub deviation: f64,
    /// `θ̂_n` was integrated over `[-x_max, x_max]`.
    pub x_max: f64,
}

impl ConvolutionCheck {
    /// Combined error bars of both sides.
    pub fn error_bound(&self) -> f64 {
        self.dirichlet.abs_err + self.integral.abs_err
    }
}

/// Coefficients `a_k` of the principal part `Σ_{k=1}^p a_k (s-1)^{-k}` of `ζ^p`.
fn principal_part(p: u32) -> Vec<f64> {
    let g = EULER_GAMMA;
    match p {
        1 => vec![1.0],
        2 => vec![2.0 * g, 1.0],
        3 => vec![3.0 * g * g - 3.0 * STIELTJES_1, 3.0 * g, 1.0],
        _ => unreachable!("principal part only tabulated for p <= 3"),
    }
}

/// `ζ(w)^p` minus its principal part at `w = 1`; entire in `w`.
fn zeta_pow_regular(w: Complex64, p: u32, cfg: &EvalConfig) -> Result<Complex64, ZetaError> {
    let r = zeta_regular(w, cfg)?.value();
    let v = w - 1.0;
    let g = EULER_GAMMA;
    Ok(match p {
        1 => r,
        2 => {
            let d = if v.norm() < 1e-12 {
                Complex64::new(-STIELTJES_1, 0.0)
            } else {
                (r - g) / v
            };
            d * 2.0 + r * r
        }
        3 => {
            let (d1, d2) = if v.norm() < 1e-12 {
                (Complex64::new(-STIELTJES_1, 0.0), Complex64::new(0.0, 0.0))
            } else {
                ((r - g) / v, (r - g + v * STIELTJES_1) / (v * v))
            };
            d2 * 3.0 + d1 * (r + g) * 3.0 + r * r * r
        }
        _ => unreachable!(),
    })
}

fn integrate_complex<F>(
    mut f: F,
    knots: &[f64],
    tol: f64,
) -> Result<(Complex64, f64), DirichletError>
where
    F: FnMut(f64) -> Result<Complex64, DirichletError>,
{
    let pieces = (knots.len() - 1) as f64;
    let qc = QuadConfig::new(tol / (2.0 * pieces));
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    let mut err = 0.0;
    for w in knots.windows(2) {
        let r = try_integrate(|x| f(x).map(|z| z.re), w[0], w[1], &qc)?;
        let i = try_integrate(|x| f(x).map(|z| z.im), w[0], w[1], &qc)?;
        re.add(r.value);
        im.add(i.value);
        err += r.err + i.err;
    }
    Ok((Complex64::new(re.sum(), im.sum()), err))
}

/// `∫_0^{nN} u^{k-1}/(k-1)! e^{-(s-1)u} θ_n(u/N) du`, the transform of
/// `(s-1)^{-k}` against the kernel; finite and continuous down to `Re s = 1`.
fn pole_transform(
    k: u32,
    s: Complex64,
    kernel: &PiecewiseKernel,
    big_n: f64,
    tol: f64,
) -> Result<(Complex64, f64), DirichletError> {
    let n = kernel.order();
    let fact: f64 = (1..k).map(|i| i as f64).product();
    let knots: Vec<f64> = (0..=n).map(|i| i as f64 * big_n).collect();
    let w = s - 1.0;
    integrate_complex(
        |u| {
            let mag = u.powi(k as i32 - 1) / fact * kernel.eval(u / big_n);
            Ok((-w * u).exp() * mag)
        },
        &knots,
        tol,
    )
}

const X_CAP: f64 = 256.0;
const LAURENT_X_CAP: f64 = 2048.0;
const SUBTRACTED_X: f64 = 128.0;
const MAX_SUBTRACTED: u64 = 2_000_000;

/// Compares `Σ c_j j^{-s}` with `∫ F(s + 2πix/N) θ̂_n(x) dx`, where `F = ζ^p`
/// (unsigned) or `(ζ(2w)/ζ(w))^p` (signed).
///
/// For `Re s >= 1.05` the integrand is evaluated directly. When `θ̂_n` decays
/// too slowly for a truncation at `|x| <= 256`, a partial sum
/// `P = Σ_{m<=M} a_m m^{-w}` of `F` is subtracted on `[-X, X]` and its full
/// transform `Σ a_m m^{-s} θ_n(ln m/N)` added back; the neglected part is
/// bounded by `Σ_{m>M} d_|p|(m) m^{-σ}` times the kernel tail mass.
///
/// For `1 <= Re s < 1.05` (unsigned, integer `p <= 3`) the principal part of
/// `ζ^p` at the pole is transformed in closed form and only the entire
/// remainder is integrated, which makes `Re s = 1` itself accessible.
pub fn convolution_repr_check(
    poly: &SmoothedPolynomial,
    s: Complex64,
    tol: f64,
    spf: &SpfTable,
) -> Result<ConvolutionCheck, DirichletError> {
    let p = poly.p;
    let n = poly.n;
    let big_n = poly.big_n;
    let sigma = s.re;
    let int_p = p.round() as u32;
    let laurent = sigma < 1.05 && p != 0.0;
    if laurent && (poly.signed || p != int_p as f64 || !(1..=3).contains(&int_p) || sigma < 1.0) {
        return Err(DirichletError::InvalidInput(
            "below Re s = 1.05 only unsigned integer 1 <= p <= 3 is supported".into(),
        ));
    }
    if sigma < 1.0 {
        return Err(DirichletError::InvalidInput("needs Re s >= 1".into()));
    }
    let cfg = EvalConfig {
        target_abs_err: (tol * 1e-3).max(1e-13),
        pole_radius: 1e-9,
        ..EvalConfig::default()
    };
    let dirichlet = poly.eval_at(s);
    let kernel = build_theta_n(n)?;
    let pa = p.abs();
    let two_n = 2.0 * n as f64;
    // 2∫_X^∞ (πx)^{-2n} x^{slack} dx relative to the factor at X
    let kernel_tail = |x: f64, slack: f64| -> f64 {
        let e = two_n - 1.0 - slack;
        2.0 * PI.powi(-2 * n as i32) * x.powf(-e) / e
    };
    let zeta_real = |x: f64| -> f64 {
        zeta(Complex64::new(x, 0.0), &cfg)
            .map(|z| z.value().re)
            .unwrap_or(f64::INFINITY)
    };
    let crude_tail = |x: f64| -> f64 {
        if laurent {
            // |ζ(σ+iy)| <= ln|y| + 3 for σ >= 1, |y| >= 2
            let y = (2.0 * PI * x / big_n).abs() + s.im.abs();
            let b = (y.max(2.0).ln() + 3.0).max(2.0 * pa);
            let pr: f64 = principal_part(int_p)
                .iter()
                .enumerate()
                .map(|(k, a)| a.abs() * 2f64.powi(-(k as i32) - 1))
                .sum();
            (b.powf(pa) + pr) * kernel_tail(x, 0.5)
        } else if p == 0.0 {
            kernel_tail(x, 0.0)
        } else {
            (zeta_real(sigma) * zeta_real(2.0 * sigma)).powf(pa) * kernel_tail(x, 0.0)
        }
    };
    let cap = if laurent { LAURENT_X_CAP } else { X_CAP };
    let mut x_max = 2.0f64;
    while crude_tail(x_max) > tol / 4.0 && x_max < cap {
        x_max += 1.0;
    }
    let mut tail_err = crude_tail(x_max);
    // partial Dirichlet sum of F to subtract: (ln m, a_m m^{-σ}, a_m m^{-s} θ_n(ln m/N))
    let mut partial: Vec<(f64, f64)> = Vec::new();
    let mut partial_transform = Complex64::new(0.0, 0.0);
    if tail_err > tol / 4.0 {
        if laurent {
            return Err(DirichletError::InvalidInput(
                "kernel decays too slowly for a truncated integral on Re s < 1.05".into(),
            ));
        }
        x_max = SUBTRACTED_X;
        let k_tail = kernel_tail(x_max, 0.0);
        let full = zeta_real(sigma).powf(pa);
        let mut m_max = poly.cutoff.max(1024);
        loop {
            if m_max > spf.limit() {
                return Err(SieveError::CapacityError {
                    limit: m_max,
                    max: spf.limit(),
                }
                .into());
            }
            let abs_tab = coefficient_table(m_max, pa, false, spf)?;
            let mut head = NeumaierSum::new();
            for m in 1..=m_max as usize {
                head.add(abs_tab.values[m] * (m as f64).powf(-sigma));
            }
            let rem = (full - head.sum()).max(0.0) + 1e-15 * full;
            if rem * k_tail <= tol / 4.0 || m_max >= MAX_SUBTRACTED {
                tail_err = rem * k_tail;
                break;
            }
            m_max = (m_max * 4).min(MAX_SUBTRACTED);
        }
        let tab = coefficient_table(m_max, p, poly.signed, spf)?;
        let mut tr = ComplexSum::new();
        for m in 1..=m_max as usize {
            let a = tab.values[m];
            if a == 0.0 {
                continue;
            }
            let l = (m as f64).ln();
            partial.push((l, a * (-sigma * l).exp()));
            let th = kernel.eval(l / big_n);
            if th != 0.0 {
                tr.add(Complex64::from_polar(a * th * (-sigma * l).exp(), -s.im * l));
            }
        }
        partial_transform = tr.sum();
    }
    let mut knots: Vec<f64> = (-(x_max as i64)..=x_max as i64).map(|k| k as f64).collect();
    if laurent {
        // x where the shifted argument crosses the pole
        let x0 = -s.im * big_n / (2.0 * PI);
        if x0.abs() < x_max && knots.iter().all(|&k| (k - x0).abs() > 1e-9) {
            let at = knots.partition_point(|&k| k < x0);
            knots.insert(at, x0);
        }
    }
    let pieces = (knots.len() - 1) as f64;
    let qc = QuadConfig::new(tol / (8.0 * pieces));
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    let mut quad_err = 0.0;
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let to_t = |x: f64| s.im + 2.0 * PI * x / big_n;
        let win = if partial.is_empty() {
            None
        } else {
            let c = 0.5 * (to_t(a) + to_t(b));
            let h = 0.5 * (to_t(b) - to_t(a));
            Some(WindowSum::build(
                c,
                h,
                partial.iter().map(|&(l, v)| (l, Complex64::new(v, 0.0))),
            ))
        };
        let f = |x: f64| -> Result<Complex64, DirichletError> {
            let h = theta_hat_n(x, n);
            if h == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let w = Complex64::new(sigma, to_t(x));
            let mut v = if p == 0.0 {
                Complex64::new(1.0, 0.0)
            } else if laurent {
                zeta_pow_regular(w, int_p, &cfg)?
            } else if poly.signed {
                let num = zeta_pow(w * 2.0, p, &cfg)?.value();
                let den = zeta_pow(w, p, &cfg)?.value();
                num / den
            } else {
                zeta_pow(w, p, &cfg)?.value()
            };
            if let Some(win) = &win {
                v -= win.eval(to_t(x));
            }
            Ok(v * h)
        };
        let r = try_integrate(|x| f(x).map(|z| z.re), a, b, &qc)?;
        let i = try_integrate(|x| f(x).map(|z| z.im), a, b, &qc)?;
        re.add(r.value);
        im.add(i.value);
        quad_err += r.err + i.err;
        if let Some(win) = &win {
            quad_err += 2.0 * (b - a) * win.error_bound(to_t(b));
        }
    }
    let mut value = Complex64::new(re.sum(), im.sum()) + partial_transform;
    let mut err = quad_err + tail_err;
    if laurent {
        for (k, a) in principal_part(int_p).iter().enumerate() {
            let (v, e) = pole_transform(k as u32 + 1, s, &kernel, big_n, tol / 8.0)?;
            value += v * *a;
            err += e * a.abs();
        }
    }
    let integral = ComplexValue::new(value, err);
    Ok(ConvolutionCheck {
        dirichlet,
        integral,
        deviation: (dirichlet.value() - integral.value()).norm(),
        x_max,
    })
}

fn require_lower_bound_regime(poly: &SmoothedPolynomial) -> Result<(), DirichletError> {
    if poly.signed {
        return Err(DirichletError::InvalidInput("needs the unsigned polynomial".into()));
    }
    if poly.p != 0.0 && !(poly.p >= 1.0 && (poly.n as f64) > poly.p / 2.0) {
        return Err(DirichletError::InvalidInput("needs p >= 1 and n > p/2".into()));
    }
    Ok(())
}

/// `(t, |eval(t)| · t^p)` along the grid.
pub fn pole_window_profile(
    poly: &SmoothedPolynomial,
    t_grid: &[f64],
) -> Result<Vec<(f64, f64)>, DirichletError> {
    require_lower_bound_regime(poly)?;
    if poly.p < 1.0 {
        return Err(DirichletError::InvalidInput("needs p >= 1".into()));
    }
    let lo = t_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = t_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let win = poly.window(0.5 * (lo + hi), 0.5 * (hi - lo));
    Ok(t_grid
        .iter()
        .map(|&t| (t, win.eval(t).norm() * t.abs().powf(poly.p)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub value: f64,
    pub err: f64,
}

/// `∫_0^δ |Σ c_j j^{-1-it}| dt`.
pub fn lower_bound_integral(
    poly: &SmoothedPolynomial,
    delta: f64,
    tol: f64,
) -> Result<IntegralValue, DirichletError> {
    require_lower_bound_regime(poly)?;
    if !(delta > 0.0) {
        return Err(DirichletError::InvalidInput("delta must be positive".into()));
    }
    if poly.p == 0.0 {
        return Ok(IntegralValue {
            value: poly.coeff(1) * delta,
            err: 0.0,
        });
    }
    let win = poly.window(delta / 2.0, delta / 2.0);
    integrate_abs(&win, poly, delta, tol, 0.0)
}

/// `∫_0^δ |Σ c_j j^{-1-i(T+t)}| dt` for an exact shift `T`.
pub fn shifted_abs_integral(
    poly: &SmoothedPolynomial,
    shift: &Dyadic,
    delta: f64,
    tol: f64,
    spf: &SpfTable,
) -> Result<IntegralValue, DirichletError> {
    if !(delta > 0.0) {
        return Err(DirichletError::InvalidInput("delta must be positive".into()));
    }
    let (items, phase_err) = poly.rotated(shift, spf);
    let win = WindowSum::build(delta / 2.0, delta / 2.0, items);
    integrate_abs(&win, poly, delta, tol, phase_err)
}

fn integrate_abs(
    win: &WindowSum,
    poly: &SmoothedPolynomial,
    delta: f64,
    tol: f64,
    extra_err: f64,
) -> Result<IntegralValue, DirichletError> {
    // the integrand oscillates on scale 1/(nN); split accordingly
    let pieces = ((delta * poly.n as f64 * poly.big_n).ceil() as usize).max(1);
    let h = delta / pieces as f64;
    let qc = QuadConfig::new(tol / pieces as f64);
    let mut acc = NeumaierSum::new();
    let mut err = 0.0;
    for i in 0..pieces {
        let r = try_integrate(
            |t| Ok::<f64, ZetaError>(win.eval(t).norm()),
            i as f64 * h,
            (i + 1) as f64 * h,
            &qc,
        )?;
        acc.add(r.value);
        err += r.err;
    }
    err += delta * (win.error_bound(delta) + extra_err);
    Ok(IntegralValue {
        value: acc.sum(),
        err,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub max_deviation: f64,
    pub argmax_t: f64,
    pub err: f64,
}

impl StabilityReport {
    pub fn within(&self, bound: f64) -> bool {
        self.max_deviation <= bound
    }
}

/// `max_t |shifted(T + t) − reference(t)|` over the grid. Pass the same
/// polynomial twice for the plain recurrence check, or a signed `shifted` with
/// an unsigned `reference` for the twisted one.
pub fn shift_stability(
    shifted: &SmoothedPolynomial,
    reference: &SmoothedPolynomial,
    shift: &Dyadic,
    t_grid: &[f64],
    spf: &SpfTable,
) -> StabilityReport {
    let a = shifted.eval_shifted(shift, t_grid, spf);
    let mut out = StabilityReport {
        max_deviation: 0.0,
        argmax_t: t_grid.first().copied().unwrap_or(0.0),
        err: 0.0,
    };
    for (i, &t) in t_grid.iter().enumerate() {
        let b = reference.eval(t);
        let d = (a[i].value() - b.value()).norm();
        out.err = out.err.max(a[i].abs_err + b.abs_err);
        if d > out.max_deviation {
            out.max_deviation = d;
            out.argmax_t = t;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{d_p, liouville, sieve_spf};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn spf() -> &'static SpfTable {
        static S: OnceLock<SpfTable> = OnceLock::new();
        S.get_or_init(|| sieve_spf(1 << 21).unwrap())
    }

    #[test]
    fn p_zero_has_single_term() {
        let poly = build_smoothed(0.0, 2, 3.0, false, spf()).unwrap();
        let k = build_theta_n(2).unwrap();
        assert_eq!(poly.coeff(1), k.eval(0.0));
        assert!((2..=poly.cutoff()).all(|j| poly.coeff(j) == 0.0));
        let v = poly.eval(3.7).value();
        assert!((v - poly.coeff(1)).norm() < 1e-15);
    }

    #[test]
    fn small_triangle_example() {
        let poly = build_smoothed(1.0, 1, 4f64.ln(), false, spf()).unwrap();
        assert_eq!(poly.cutoff(), 4);
        assert!((poly.coeff(2) - 0.5).abs() < 1e-15);
        assert_eq!(poly.coeff(1), 1.0);
        assert!(poly.coeff(4).abs() < 1e-15);
    }

    #[test]
    fn signed_coefficients_match_tables() {
        let big_n = 2.5;
        let s = build_smoothed(1.0, 2, big_n, true, spf()).unwrap();
        let u = build_smoothed(1.0, 2, big_n, false, spf()).unwrap();
        let k = build_theta_n(2).unwrap();
        for j in 1..=s.cutoff() {
            let want = liouville(j, spf()).unwrap() as f64 * k.eval((j as f64).ln() / big_n);
            assert!((s.coeff(j) - want).abs() < 1e-15);
            assert!((s.coeff(j).abs() - u.coeff(j)).abs() < 1e-15);
        }
    }

    #[test]
    fn support_matches_kernel() {
        let poly = build_smoothed(2.0, 2, 2.0, false, spf()).unwrap();
        assert_eq!(poly.cutoff(), 54);
        for j in 1..=poly.cutoff() {
            let inside = ((j as f64).ln() / 2.0) < 2.0;
            let dp = d_p(j, 2.0, spf()).unwrap();
            assert_eq!(poly.coeff(j) > 0.0, inside && dp > 0.0, "j={j}");
        }
        assert_eq!(poly.coeff(55), 0.0);
    }

    #[test]
    fn capacity_budget() {
        let e = build_smoothed_with_budget(1.0, 1, 10.0, false, spf(), 1000).unwrap_err();
        assert!(matches!(e, DirichletError::Capacity { budget: 1000, .. }));
    }

    #[test]
    fn window_agrees_with_direct() {
        let poly = build_smoothed(1.5, 2, 3.0, false, spf()).unwrap();
        let win = poly.window(2.0, 2.0);
        for &t in &[0.0, 0.7, 2.0, 3.9] {
            let d = (win.eval(t) - poly.eval(t).value()).norm();
            assert!(d < 1e-11, "t={t} d={d}");
        }
    }

    #[test]
    fn convolution_simple() {
        let poly = build_smoothed(1.0, 1, 2.0, false, spf()).unwrap();
        let c = convolution_repr_check(&poly, Complex64::new(2.0, 0.0), 1e-7, spf()).unwrap();
        assert!(c.deviation < 1e-6, "{c:?}");
    }

    #[test]
    fn convolution_p_zero() {
        let poly = build_smoothed(0.0, 1, 2.0, false, spf()).unwrap();
        let c = convolution_repr_check(&poly, Complex64::new(2.0, 0.0), 1e-9, spf()).unwrap();
        assert!((c.dirichlet.value() - 1.0).norm() < 1e-15);
        assert!(c.deviation < 1e-8, "{c:?}");
    }

    #[test]
    fn convolution_signed() {
        let poly = build_smoothed(1.0, 1, 2.0, true, spf()).unwrap();
        let c = convolution_repr_check(&poly, Complex64::new(2.0, 0.0), 1e-7, spf()).unwrap();
        assert!(c.deviation < 1e-5, "{c:?}");
    }

    #[test]
    fn convolution_on_the_one_line() {
        let poly = build_smoothed(2.0, 2, 3.0, false, spf()).unwrap();
        let c = convolution_repr_check(&poly, Complex64::new(1.0, 1.0), 1e-6, spf()).unwrap();
        let direct = poly.eval(1.0).value();
        assert!((c.dirichlet.value() - direct).norm() < 1e-12);
        assert!(c.deviation < 1e-4, "{c:?}");
    }

    #[test]
    fn eval_at_zero_is_max() {
        let poly = build_smoothed(1.0, 1, 5.0, false, spf()).unwrap();
        let at0 = poly.eval(0.0).value();
        assert!(at0.im.abs() < 1e-15 && at0.re > 0.0);
        let win = poly.window(0.0, 20.0);
        for i in -200..=200 {
            let t = i as f64 * 0.1;
            assert!(win.eval(t).norm() <= at0.re + 1e-10);
        }
    }

    #[test]
    fn zero_shift_is_stable() {
        let poly = build_smoothed(1.0, 1, 4.0, false, spf()).unwrap();
        let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let r = shift_stability(&poly, &poly, &Dyadic::zero(), &grid, spf());
        assert!(r.max_deviation < 1e-13);
    }

    #[test]
    fn period_of_two_leaves_only_three() {
        // cutoff 3: only j = 3 feels the shift 2π/ln 2
        let poly = build_smoothed(1.0, 1, 3.5f64.ln(), false, spf()).unwrap();
        assert_eq!(poly.cutoff(), 3);
        let t = 2.0 * PI / 2f64.ln();
        let shift = Dyadic::from_f64(t);
        let grid = [0.0, 0.5, 1.0];
        let r = shift_stability(&poly, &poly, &shift, &grid, spf());
        let want = poly.coeff(3) / 3.0 * 2.0 * (t * 3f64.ln() / 2.0).sin().abs();
        assert!((r.max_deviation - want).abs() < 1e-12, "{} vs {want}", r.max_deviation);
    }

    #[test]
    fn lower_bound_p_zero() {
        let poly = build_smoothed(0.0, 1, 3.0, false, spf()).unwrap();
        let v = lower_bound_integral(&poly, 0.7, 1e-10).unwrap();
        assert_eq!(v.value, poly.coeff(1) * 0.7);
    }

    #[test]
    fn lower_bound_matches_plain_quadrature() {
        let poly = build_smoothed(1.0, 1, 3.0, false, spf()).unwrap();
        let v = lower_bound_integral(&poly, 1.0, 1e-10).unwrap();
        // trapezoid with many nodes as an independent estimate
        let m = 20_000;
        let mut s = 0.0;
        for i in 0..=m {
            let t = i as f64 / m as f64;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            s += w * poly.eval(t).norm();
        }
        s /= m as f64;
        assert!((v.value - s).abs() < 1e-7, "{} vs {s}", v.value);
    }

    #[test]
    fn shifted_integral_at_zero_shift() {
        let poly = build_smoothed(1.0, 1, 3.0, false, spf()).unwrap();
        let a = lower_bound_integral(&poly, 1.0, 1e-10).unwrap();
        let b = shifted_abs_integral(&poly, &Dyadic::zero(), 1.0, 1e-10, spf()).unwrap();
        assert!((a.value - b.value).abs() < 1e-10);
    }

    #[test]
    fn cache_roundtrip() {
        let poly = build_smoothed(1.5, 2, 2.2, true, spf()).unwrap();
        let mut buf = Vec::new();
        poly.dump(&mut buf).unwrap();
        let back = SmoothedPolynomial::load(&buf[..]).unwrap();
        assert_eq!(back.coeffs(), poly.coeffs());
        assert_eq!(back.n(), 2);
        assert_eq!(back.big_n(), 2.2);
        assert!(back.signed());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn conjugate_symmetry(p in 0.0f64..3.0, n in 1u32..4, big_n in 0.5f64..3.0, t in -50.0f64..50.0) {
            let poly = build_smoothed(p, n, big_n, false, spf()).unwrap();
            let a = poly.eval(t).value();
            let b = poly.eval(-t).value();
            prop_assert!((a - b.conj()).norm() < 1e-12);
        }

        #[test]
        fn positive_coefficients(p in 0.0f64..4.0, n in 1u32..4, big_n in 0.5f64..3.0) {
            let poly = build_smoothed(p, n, big_n, false, spf()).unwrap();
            prop_assert!(poly.coeffs().iter().all(|&c| c >= 0.0));
            for j in 1..=poly.cutoff() {
                let inside = (j as f64).ln() < n as f64 * big_n;
                if !inside {
                    prop_assert_eq!(poly.coeff(j), 0.0);
                }
            }
        }
    }
}
