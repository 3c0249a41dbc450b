//! Library results against plain reference computations written here.

use lpzeta::kernels::theta_hat_n;
use lpzeta::moments::{i_integral_bounds, short_moment, I_integral, MomentConfig, MomentQuery};
use lpzeta::sieve::{d_p, primes_up_to, sieve_spf};
use lpzeta::zeta::{zeta, EvalConfig};
use lpzeta::Complex64;
use std::f64::consts::PI;

/// Partial sum plus a short Euler-Maclaurin tail at a fixed cutoff.
fn zeta_ref(s: Complex64) -> Complex64 {
    let n = 2000u32;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..n {
        acc += Complex64::new(k as f64, 0.0).powc(-s);
    }
    let big = Complex64::new(n as f64, 0.0);
    let ns = big.powc(-s);
    acc + big * ns / (s - 1.0) + ns / 2.0 + s * ns / big / 12.0
        - s * (s + 1.0) * (s + 2.0) * ns / big.powi(3) / 720.0
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, pieces: usize) -> f64 {
    let h = (b - a) / pieces as f64;
    let mut acc = f(a) + f(b);
    for i in 1..pieces {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn zeta_matches_reference_sum() {
    let cfg = EvalConfig::default();
    for (re, im) in [(1.0, 3.0), (1.0, 77.7), (1.3, -12.0), (2.0, 250.0), (1.0, 0.5)] {
        let s = Complex64::new(re, im);
        let got = zeta(s, &cfg).unwrap();
        let want = zeta_ref(s);
        assert!((got.value() - want).norm() < 1e-9, "{s}: {} vs {want}", got.value());
    }
}

#[test]
fn divisor_functions_match_brute_force() {
    let spf = sieve_spf(400).unwrap();
    let tau = |n: u64| (1..=n).filter(|d| n % d == 0).count() as f64;
    // d_3(n) = Σ_{d | n} d_2(n/d)
    let d3 = |n: u64| (1..=n).filter(|d| n % d == 0).map(|d| tau(n / d)).sum::<f64>();
    for n in 1..=400u64 {
        assert_eq!(d_p(n, 1.0, &spf).unwrap(), 1.0);
        assert!((d_p(n, 2.0, &spf).unwrap() - tau(n)).abs() < 1e-12, "n={n}");
        assert!((d_p(n, 3.0, &spf).unwrap() - d3(n)).abs() < 1e-9, "n={n}");
    }
}

#[test]
fn prime_list_matches_trial_division() {
    let is_prime = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
    let want: Vec<u64> = (0..5000).filter(|&n| is_prime(n)).collect();
    assert_eq!(primes_up_to(4999), want);
}

#[test]
fn kernel_transform_matches_direct_cosine_integral() {
    // θ is even, so its transform is 2∫_0^1 (1-x) cos(2πtx) dx
    for t in [0.0, 0.3, 1.7, 4.25] {
        let direct = 2.0 * simpson(|x| (1.0 - x) * (2.0 * PI * t * x).cos(), 0.0, 1.0, 4000);
        assert!((theta_hat_n(t, 1) - direct).abs() < 1e-10, "t={t}");
    }
}

#[test]
fn short_moment_matches_simpson() {
    let zcfg = EvalConfig::default();
    let cfg = MomentConfig::with_tol(1e-10);
    for (t0, delta, p) in [(100.0, 1.0, 2.0), (20.0, 0.5, -0.5), (3.0, 2.0, 0.75)] {
        let got = short_moment(&MomentQuery::flat(t0, delta, p), &cfg).unwrap().value;
        let want = simpson(
            |t| zeta(Complex64::new(1.0, t), &zcfg).unwrap().norm().powf(p),
            t0,
            t0 + delta,
            2000,
        );
        assert!((got - want).abs() < 1e-8 * want.max(1.0), "{t0} {delta} {p}: {got} vs {want}");
    }
}

#[test]
fn singular_integral_at_q_zero_is_delta() {
    let cfg = MomentConfig::with_tol(1e-10);
    for delta in [0.5, 1.0, 2.0] {
        let v = I_integral(delta, 0.0, &cfg).unwrap().value;
        assert!((v - delta).abs() < 1e-9);
        assert!((i_integral_bounds(delta, 0.0).0 - delta).abs() < 1e-15);
    }
}
