//! The triangular kernel `θ(x) = max(0, 1-|x|)`, its iterated
//! self-convolutions `θ_n` (centred B-splines of degree `2n-1`) and their
//! Fourier transforms `(sin πt / πt)^{2n}`.

use crate::quad::{try_integrate, QuadConfig, QuadError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("kernel order {0} exceeds the supported maximum 8")]
    OrderTooLarge(u32),
    #[error("kernel order must be at least 1")]
    InvalidOrder,
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

pub const MAX_ORDER: u32 = 8;

pub fn theta(x: f64) -> f64 {
    (1.0 - x.abs()).max(0.0)
}

/// `sin(πt)/(πt)`, with a Taylor branch near zero.
fn sinc(t: f64) -> f64 {
    let x = PI * t;
    if t.abs() < 1e-4 {
        let x2 = x * x;
        // remainder below x^6/5040 < 1e-21
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Fourier transform of `θ_n`: `(sin πt / πt)^{2n}`.
pub fn theta_hat_n(t: f64, n: u32) -> f64 {
    let s = sinc(t);
    if t != 0.0 && t.fract() == 0.0 {
        return 0.0;
    }
    (s * s).powi(n as i32)
}

type Poly = Vec<BigRational>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn poly_eval(p: &Poly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// `p(x + c)` as a polynomial in `x`.
fn poly_shift(p: &Poly, c: &BigRational) -> Poly {
    let mut out: Poly = vec![BigRational::zero(); p.len()];
    // Horner on polynomials: out = out·(x + c) + coeff
    for coef in p.iter().rev() {
        let mut next: Poly = vec![BigRational::zero(); p.len()];
        for (i, o) in out.iter().enumerate() {
            if o.is_zero() {
                continue;
            }
            next[i] += o * c;
            if i + 1 < next.len() {
                next[i + 1] += o;
            }
        }
        next[0] += coef;
        out = next;
    }
    out
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect()
}

fn poly_antiderivative(p: &Poly) -> Poly {
    let mut out = vec![BigRational::zero()];
    for (i, c) in p.iter().enumerate() {
        out.push(c / BigRational::from_integer(BigInt::from(i + 1)));
    }
    out
}

/// Compactly supported piecewise polynomial in the global variable `x`.
#[derive(Debug, Clone)]
struct Piecewise {
    knots: Vec<BigRational>,
    polys: Vec<Poly>,
}

impl Piecewise {
    fn unit_box() -> Self {
        Self {
            knots: vec![rat(-1, 2), rat(1, 2)],
            polys: vec![vec![BigRational::one()]],
        }
    }

    /// `(f * χ_{[-1/2,1/2]})(x) = F(x+1/2) - F(x-1/2)`.
    fn convolve_box(&self) -> Self {
        let m = self.polys.len();
        // antiderivative pieces, continuous, zero left of the support
        let mut anti: Vec<Poly> = Vec::with_capacity(m);
        let mut acc = BigRational::zero();
        for i in 0..m {
            let mut f = poly_antiderivative(&self.polys[i]);
            let base = poly_eval(&f, &self.knots[i]);
            f[0] += &acc - base;
            acc = poly_eval(&f, &self.knots[i + 1]);
            anti.push(f);
        }
        let total = acc;
        let big_f = |x: &BigRational| -> Poly {
            // piece of F active at point x (interior of an interval)
            if x < &self.knots[0] {
                return vec![BigRational::zero()];
            }
            for i in 0..m {
                if x < &self.knots[i + 1] {
                    return anti[i].clone();
                }
            }
            vec![total.clone()]
        };
        let half = rat(1, 2);
        let mut knots: Vec<BigRational> = self
            .knots
            .iter()
            .flat_map(|k| [k - &half, k + &half])
            .collect();
        knots.sort();
        knots.dedup();
        let mut polys = Vec::with_capacity(knots.len() - 1);
        for w in knots.windows(2) {
            let mid = (&w[0] + &w[1]) * &half;
            let plus = poly_shift(&big_f(&(&mid + &half)), &half);
            let minus = poly_shift(&big_f(&(&mid - &half)), &(-&half));
            polys.push(poly_sub(&plus, &minus));
        }
        Self { knots, polys }
    }
}

/// Exact piecewise-polynomial `θ_n` on the unit intervals `[k, k+1]`,
/// `k = -n..n-1`, with a binary64 evaluation copy in local coordinates.
#[derive(Debug, Clone)]
pub struct PiecewiseKernel {
    n: u32,
    /// Global-variable rational coefficients per unit piece.
    exact: Vec<Poly>,
    /// Local coefficients in `u = x - k`, ascending.
    local: Vec<Vec<f64>>,
}

pub fn build_theta_n(n: u32) -> Result<PiecewiseKernel, KernelError> {
    if n == 0 {
        return Err(KernelError::InvalidOrder);
    }
    if n > MAX_ORDER {
        return Err(KernelError::OrderTooLarge(n));
    }
    let mut f = Piecewise::unit_box();
    for _ in 1..(2 * n) {
        f = f.convolve_box();
    }
    debug_assert_eq!(f.polys.len(), 2 * n as usize);
    let exact = f.polys;
    let local = exact
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let k = BigRational::from_integer(BigInt::from(i as i64 - n as i64));
            poly_shift(p, &k)
                .iter()
                .map(|c| c.to_f64().expect("finite coefficient"))
                .collect()
        })
        .collect();
    Ok(PiecewiseKernel { n, exact, local })
}

impl PiecewiseKernel {
    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> usize {
        2 * self.n as usize - 1
    }

    /// Pieces as `(left knot, ascending rational coefficients in x)`.
    pub fn pieces(&self) -> impl Iterator<Item = (i64, &[BigRational])> {
        let n = self.n as i64;
        self.exact
            .iter()
            .enumerate()
            .map(move |(i, p)| (i as i64 - n, p.as_slice()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n as f64;
        if !(x.abs() < n) {
            return 0.0;
        }
        let k = x.floor();
        let idx = ((k + n) as usize).min(self.local.len() - 1);
        let u = x - (idx as f64 - n);
        let c = &self.local[idx];
        let mut acc = 0.0;
        for &a in c.iter().rev() {
            acc = acc * u + a;
        }
        acc.clamp(0.0, 1.0)
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let n = BigRational::from_integer(BigInt::from(self.n));
        if x.abs() >= n {
            return BigRational::zero();
        }
        let k = (x.floor() + &n).to_integer().to_usize().unwrap().min(self.exact.len() - 1);
        poly_eval(&self.exact[k], x)
    }

    /// `∫ θ_n` in exact arithmetic.
    pub fn integral_exact(&self) -> BigRational {
        let mut total = BigRational::zero();
        for (k, p) in self.pieces() {
            let a = poly_antiderivative(&p.to_vec());
            let lo = BigRational::from_integer(BigInt::from(k));
            let hi = BigRational::from_integer(BigInt::from(k + 1));
            total += poly_eval(&a, &hi) - poly_eval(&a, &lo);
        }
        total
    }

    /// Largest jump of the `d`-th derivative across any knot, including the
    /// support ends. Zero for `d <= 2n-2`.
    pub fn derivative_jump(&self, d: usize) -> BigRational {
        let derive = |p: &[BigRational]| -> Poly {
            let mut q: Poly = p.to_vec();
            for _ in 0..d {
                q = q
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                    .collect();
                if q.is_empty() {
                    q.push(BigRational::zero());
                }
            }
            q
        };
        let mut pieces: Vec<Poly> = vec![vec![BigRational::zero()]];
        pieces.extend(self.exact.iter().map(|p| derive(p)));
        pieces.push(vec![BigRational::zero()]);
        let mut worst = BigRational::zero();
        let n = self.n as i64;
        for (j, w) in pieces.windows(2).enumerate() {
            let x = BigRational::from_integer(BigInt::from(j as i64 - n));
            let jump = (poly_eval(&w[1], &x) - poly_eval(&w[0], &x)).abs();
            if jump > worst {
                worst = jump;
            }
        }
        worst
    }

    /// Whether `θ_n(-x) = θ_n(x)` holds coefficientwise.
    pub fn is_even_exact(&self) -> bool {
        let m = self.exact.len();
        (0..m).all(|i| {
            let mirrored: Poly = self.exact[m - 1 - i]
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                .collect();
            mirrored == self.exact[i]
        })
    }

    /// `∫ e^{-2πitx} θ_n(x) dx` by adaptive quadrature over the unit pieces.
    pub fn fourier_numeric(&self, t: f64, tol: f64) -> Result<f64, KernelError> {
        let n = self.n as i64;
        let pieces = (2 * n) as f64;
        let cfg = QuadConfig::new(tol / pieces);
        let mut total = 0.0;
        for k in -n..n {
            let r = try_integrate(
                |x: f64| Ok::<f64, std::convert::Infallible>((2.0 * PI * t * x).cos() * self.eval(x)),
                k as f64,
                (k + 1) as f64,
                &cfg,
            )?;
            total += r.value;
        }
        Ok(total)
    }
}

/// Max over the grid of `|numeric transform - (sin πt/πt)^{2n}|`.
pub fn fourier_cross_check(n: u32, t_grid: &[f64], quad_tol: f64) -> Result<f64, KernelError> {
    let k = build_theta_n(n)?;
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let d = (k.fourier_numeric(t, quad_tol)? - theta_hat_n(t, n)).abs();
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn triangle_values() {
        assert_eq!(theta(0.0), 1.0);
        assert_eq!(theta(1.0), 0.0);
        assert_eq!(theta(-1.0), 0.0);
        assert_eq!(theta(2.0), 0.0);
        assert_eq!(theta(0.25), 0.75);
    }

    #[test]
    fn order_one_is_the_triangle() {
        let k = build_theta_n(1).unwrap();
        assert_eq!(k.degree(), 1);
        for i in -40..=40 {
            let x = i as f64 / 17.0;
            assert!((k.eval(x) - theta(x)).abs() < 1e-15);
        }
        let p: Vec<_> = k.pieces().collect();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].1, &[rat(1, 1), rat(1, 1)]);
        assert_eq!(p[1].1, &[rat(1, 1), rat(-1, 1)]);
    }

    #[test]
    fn order_two_values() {
        let k = build_theta_n(2).unwrap();
        assert_eq!(k.eval_exact(&rat(0, 1)), rat(2, 3));
        assert_eq!(k.eval_exact(&rat(2, 1)), rat(0, 1));
        assert_eq!(k.eval_exact(&rat(-2, 1)), rat(0, 1));
        assert_eq!(k.eval_exact(&rat(1, 1)), rat(1, 6));
        assert!(k.derivative_jump(0).is_zero());
        // numeric convolution ∫θ(t)² dt
        let r = crate::quad::integrate_adaptive(|t| theta(t).powi(2), -1.0, 1.0, 1e-14, &[]).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn exact_structure_for_all_orders() {
        for n in 1..=MAX_ORDER {
            let k = build_theta_n(n).unwrap();
            assert_eq!(k.integral_exact(), BigRational::one(), "n={n}");
            assert!(k.is_even_exact());
            for d in 0..=(2 * n as usize - 2) {
                assert!(k.derivative_jump(d).is_zero(), "n={n} d={d}");
            }
            assert!(!k.derivative_jump(2 * n as usize - 1).is_zero());
        }
        assert_eq!(build_theta_n(9).unwrap_err(), KernelError::OrderTooLarge(9));
        assert_eq!(build_theta_n(0).unwrap_err(), KernelError::InvalidOrder);
    }

    #[test]
    fn transform_values() {
        for n in 1..5 {
            assert_eq!(theta_hat_n(0.0, n), 1.0);
            for k in [-3.0, -1.0, 1.0, 2.0] {
                assert_eq!(theta_hat_n(k, n), 0.0);
            }
        }
        assert!((theta_hat_n(0.5, 1) - 4.0 / (PI * PI)).abs() < 1e-15);
        assert!((theta_hat_n(0.5, 1) - 0.405285).abs() < 1e-6);
        // series branch joins the direct formula
        let a = theta_hat_n(0.99e-4, 3);
        let x = PI * 1.01e-4;
        let b = theta_hat_n(1.01e-4, 3);
        assert!((b - (x.sin() / x).powi(6)).abs() < 1e-15);
        assert!(a > b);
    }

    #[test]
    fn fourier_examples() {
        assert!(fourier_cross_check(1, &[0.0], 1e-9).unwrap() <= 1e-9);
        let grid: Vec<f64> = (-100..=100).map(|i| i as f64 * 0.1).collect();
        assert!(fourier_cross_check(1, &grid, 1e-9).unwrap() < 1e-6);
        let k = build_theta_n(3).unwrap();
        assert!(k.fourier_numeric(2.0, 1e-9).unwrap().abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn kernel_bounded_and_even(x in -9.0f64..9.0, n in 1u32..=8) {
            let k = build_theta_n(n).unwrap();
            let v = k.eval(x);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!((v - k.eval(-x)).abs() < 1e-14);
            if x.abs() >= n as f64 {
                prop_assert_eq!(v, 0.0);
            }
        }

        #[test]
        fn transform_is_power_of_base(t in -20.0f64..20.0, n in 1u32..=8) {
            let v = theta_hat_n(t, n);
            prop_assert!(v >= 0.0);
            prop_assert!((v - theta_hat_n(t, 1).powi(n as i32)).abs() <= 1e-12);
        }
    }
}
