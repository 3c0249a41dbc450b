use super::{bad, cached_smoothed, grid, num, par_map, seeded_uniform, Experiment, ExperimentError, Report};
use crate::dirichlet::convolution_repr_check;
use crate::kernels::{build_theta_n, fourier_cross_check, theta_hat_n};
use crate::moments::{gram_form, holder_split_check, triangular_energy, BMode, DirichletCoefficients, MomentConfig};
use crate::sieve::{coefficient_table, sieve_spf};
use crate::zeta::{log_zeta_euler, zeta, EvalConfig};
use crate::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelParams {
    pub orders: Vec<u32>,
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
    pub quad_tol: f64,
    pub max_dev: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            orders: vec![1, 2, 3],
            t_min: -10.0,
            t_max: 10.0,
            step: 0.1,
            quad_tol: 1e-10,
            max_dev: 1e-6,
        }
    }
}

pub fn run_kernel_check(prm: &KernelParams) -> Result<Report, ExperimentError> {
    if !(prm.step > 0.0) || !(prm.t_max >= prm.t_min) {
        return Err(bad("need step > 0 and t_min <= t_max"));
    }
    let count = ((prm.t_max - prm.t_min) / prm.step).round() as usize;
    let ts = grid(prm.t_min, prm.t_max, count);
    let mut report = Report::new(
        Experiment::KernelCheck,
        prm,
        &["n", "grid_points", "max_fourier_dev", "integral", "min_transform"],
    );
    let mut orders = prm.orders.clone();
    orders.sort_unstable();
    let results = par_map(&orders, |&n| -> Result<_, ExperimentError> {
        let k = build_theta_n(n)?;
        let dev = fourier_cross_check(n, &ts, prm.quad_tol)?;
        let min_hat = ts.iter().map(|&t| theta_hat_n(t, n)).fold(f64::INFINITY, f64::min);
        Ok((k.integral_exact(), dev, min_hat))
    });
    for (&n, r) in orders.iter().zip(results) {
        let (integral, dev, min_hat) = r?;
        let unit = integral == BigRational::one();
        report.row(
            "kernel-transform",
            vec![
                ("n", Value::from(n)),
                ("grid_points", Value::from(ts.len())),
                ("max_fourier_dev", num(dev)),
                ("integral", Value::from(integral.to_string())),
                ("min_transform", num(min_hat)),
            ],
        );
        report.check(
            "kernel-transform",
            dev <= prm.max_dev,
            format!("n={n}: max deviation {dev:.3e}"),
        );
        report.check("kernel-unit-mass", unit, format!("n={n}: exact integral {integral}"));
        report.check(
            "kernel-transform-nonnegative",
            min_hat >= 0.0,
            format!("n={n}: min transform {min_hat:.3e}"),
        );
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParsevalParams {
    pub limit: u64,
    /// Coefficients are `d_p(n)`.
    pub p: f64,
    pub sigma: f64,
    pub delta: f64,
    pub ts: Vec<f64>,
    pub quad_tol: f64,
    pub max_dev: f64,
}

impl Default for ParsevalParams {
    fn default() -> Self {
        Self {
            limit: 500,
            p: 2.0,
            sigma: 1.5,
            delta: 1.0,
            ts: vec![0.0, 10.0, 1000.0],
            quad_tol: 1e-11,
            max_dev: 1e-6,
        }
    }
}

pub fn run_parseval(prm: &ParsevalParams) -> Result<Report, ExperimentError> {
    if prm.limit < 1 {
        return Err(bad("limit must be positive"));
    }
    let spf = sieve_spf(prm.limit)?;
    let table = coefficient_table(prm.limit, prm.p, false, &spf)?;
    let coeffs = DirichletCoefficients::real(prm.sigma, &table.values[1..], BMode::One);
    let cfg = MomentConfig::with_tol(prm.quad_tol);
    let mut report = Report::new(
        Experiment::Parseval,
        prm,
        &["T", "time_domain", "quad_err", "gram_form", "deviation"],
    );
    let mut ts = prm.ts.clone();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let vals = par_map(&ts, |&t| {
        triangular_energy(&coeffs, t, prm.delta, &cfg).map(|e| (e, gram_form(&coeffs, t, prm.delta)))
    });
    for (&t, v) in ts.iter().zip(vals) {
        let (e, g) = v?;
        let dev = (e.value - g).abs();
        report.row(
            "finite-parseval",
            vec![
                ("T", num(t)),
                ("time_domain", num(e.value)),
                ("quad_err", num(e.err)),
                ("gram_form", num(g)),
                ("deviation", num(dev)),
            ],
        );
        report.check(
            "finite-parseval",
            dev <= prm.max_dev,
            format!("T={t}: |{:.10} - {g:.10}| = {dev:.2e}", e.value),
        );
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReprCase {
    pub p: f64,
    pub n: u32,
    #[serde(rename = "N")]
    pub big_n: f64,
    pub signed: bool,
    pub s_re: f64,
    pub s_im: f64,
    pub max_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothedReprParams {
    pub cases: Vec<ReprCase>,
    pub tol: f64,
}

impl Default for SmoothedReprParams {
    fn default() -> Self {
        let case = |signed, s_re, max_dev| ReprCase {
            p: 2.0,
            n: 2,
            big_n: 3.0,
            signed,
            s_re,
            s_im: 0.0,
            max_dev,
        };
        Self {
            cases: vec![case(false, 1.5, 1e-4), case(true, 2.0, 1e-5)],
            tol: 1e-7,
        }
    }
}

pub fn run_smoothed_repr(prm: &SmoothedReprParams) -> Result<Report, ExperimentError> {
    let spf = sieve_spf(1 << 21)?;
    let mut report = Report::new(
        Experiment::SmoothedRepr,
        prm,
        &[
            "p", "n", "N", "signed", "s_re", "s_im", "dirichlet_re", "dirichlet_im", "integral_re",
            "integral_im", "deviation", "error_bound", "x_max",
        ],
    );
    let results = par_map(&prm.cases, |c| -> Result<_, ExperimentError> {
        let poly = cached_smoothed(c.p, c.n, c.big_n, c.signed, &spf)?;
        Ok(convolution_repr_check(&poly, Complex64::new(c.s_re, c.s_im), prm.tol, &spf)?)
    });
    for (c, r) in prm.cases.iter().zip(results) {
        let r = r?;
        let anchor = if c.signed {
            "convolution-identity-signed"
        } else {
            "convolution-identity"
        };
        let d = r.dirichlet.value();
        let i = r.integral.value();
        report.row(
            anchor,
            vec![
                ("p", num(c.p)),
                ("n", Value::from(c.n)),
                ("N", num(c.big_n)),
                ("signed", Value::from(c.signed)),
                ("s_re", num(c.s_re)),
                ("s_im", num(c.s_im)),
                ("dirichlet_re", num(d.re)),
                ("dirichlet_im", num(d.im)),
                ("integral_re", num(i.re)),
                ("integral_im", num(i.im)),
                ("deviation", num(r.deviation)),
                ("error_bound", num(r.error_bound())),
                ("x_max", num(r.x_max)),
            ],
        );
        report.check(
            anchor,
            r.deviation < c.max_dev,
            format!(
                "p={} n={} N={} s={}{:+}i: deviation {:.3e} (limit {:.0e})",
                c.p, c.n, c.big_n, c.s_re, c.s_im, r.deviation, c.max_dev
            ),
        );
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZetaBoundsParams {
    pub one_line_points: usize,
    pub one_line_t_max: f64,
    pub small_ts: Vec<f64>,
    pub two_line_points: usize,
    pub two_line_t_max: f64,
    pub euler_prime_limit: u64,
    pub value_tol: f64,
}

impl Default for ZetaBoundsParams {
    fn default() -> Self {
        Self {
            one_line_points: 10_000,
            one_line_t_max: 1e4,
            small_ts: vec![0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99],
            two_line_points: 2000,
            two_line_t_max: 100.0,
            euler_prime_limit: 1_000_000,
            value_tol: 1e-12,
        }
    }
}

const APERY: f64 = 1.202_056_903_159_594_2;

pub fn run_zeta_bounds(prm: &ZetaBoundsParams) -> Result<Report, ExperimentError> {
    let tight = EvalConfig {
        target_abs_err: 1e-13,
        ..EvalConfig::default()
    };
    // rounding alone reaches ~1e-11 once t is in the thousands
    let cfg = EvalConfig {
        target_abs_err: 1e-10,
        ..EvalConfig::default()
    };
    let mut report = Report::new(
        Experiment::ZetaBounds,
        prm,
        &["t", "points", "value", "reference", "deviation", "worst_ratio", "worst_t", "holds"],
    );
    let z = |s: Complex64| zeta(s, &cfg);

    for (s, exact) in [(2.0, PI * PI / 6.0), (3.0, APERY)] {
        let v = zeta(Complex64::new(s, 0.0), &tight)?.value();
        let dev = (v - exact).norm();
        report.row(
            "special-value",
            vec![
                ("t", num(s)),
                ("value", num(v.re)),
                ("reference", num(exact)),
                ("deviation", num(dev)),
                ("holds", Value::from(dev <= prm.value_tol)),
            ],
        );
        report.check("special-value", dev <= prm.value_tol, format!("zeta({s}) off by {dev:.2e}"));
    }

    let mut worst = 0.0f64;
    for s in [
        Complex64::new(1.0, 5.0),
        Complex64::new(1.5, 30.0),
        Complex64::new(2.0, 100.0),
        Complex64::new(1.0, 1234.5),
    ] {
        let a = z(s)?;
        let b = z(s.conj())?;
        worst = worst.max((b.value() - a.value().conj()).norm());
    }
    report.row(
        "conjugate-symmetry",
        vec![("points", Value::from(4)), ("deviation", num(worst)), ("holds", Value::from(worst <= prm.value_tol))],
    );
    report.check("conjugate-symmetry", worst <= prm.value_tol, format!("max deviation {worst:.2e}"));

    let mut euler_ok = true;
    let mut worst = 0.0f64;
    for s in [Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(2.0, 10.0), Complex64::new(3.0, -7.0)] {
        let l = log_zeta_euler(s, prm.euler_prime_limit)?;
        let direct = z(s)?.value().ln();
        let dev = (l.value() - direct).norm();
        worst = worst.max(dev);
        euler_ok &= dev <= l.abs_err + prm.value_tol;
    }
    report.row(
        "euler-product",
        vec![("points", Value::from(4)), ("deviation", num(worst)), ("holds", Value::from(euler_ok))],
    );
    report.check("euler-product", euler_ok, format!("max log deviation {worst:.2e} within tail bounds"));

    // |ζ(1+it)| on t_k = 1 + (t_max - 1) k / points
    let ts = grid(1.0, prm.one_line_t_max, prm.one_line_points.saturating_sub(1).max(1));
    let vals = par_map(&ts, |&t| z(Complex64::new(1.0, t)).map(|v| v.norm()));
    let mut up = (0.0f64, f64::NAN);
    let mut low = (f64::INFINITY, f64::NAN);
    for (&t, v) in ts.iter().zip(vals) {
        let v = v?;
        let r_up = v / (1.0 + (t + 1.0).ln());
        if r_up > up.0 {
            up = (r_up, t);
        }
        let r_low = v * t;
        if r_low < low.0 {
            low = (r_low, t);
        }
    }
    for (anchor, (ratio, t), ok) in [
        ("one-line-upper", up, up.0 <= 1.0),
        ("one-line-lower", low, low.0 >= 1.0),
    ] {
        report.row(
            anchor,
            vec![
                ("points", Value::from(ts.len())),
                ("worst_ratio", num(ratio)),
                ("worst_t", num(t)),
                ("holds", Value::from(ok)),
            ],
        );
        report.check(anchor, ok, format!("worst ratio {ratio:.6} at t={t}"));
    }

    // below |t| = 1 both bounds are only reported
    for &t in &prm.small_ts {
        let v = z(Complex64::new(1.0, t))?.norm();
        let bound = 1.0 + (t + 1.0).ln();
        report.row(
            "one-line-small-t",
            vec![
                ("t", num(t)),
                ("value", num(v)),
                ("reference", num(bound)),
                ("worst_ratio", num(v / bound)),
                ("holds", Value::from(v <= bound)),
            ],
        );
    }

    let half = prm.two_line_t_max;
    let ts = grid(-half, half, prm.two_line_points.max(1));
    let vals = par_map(&ts, |&t| z(Complex64::new(2.0, 2.0 * t)).map(|v| v.norm()));
    let (mut lo, mut hi) = ((f64::INFINITY, 0.0), (0.0f64, 0.0));
    for (&t, v) in ts.iter().zip(vals) {
        let v = v?;
        if v < lo.0 {
            lo = (v, t);
        }
        if v > hi.0 {
            hi = (v, t);
        }
    }
    let ok = lo.0 > 1.0 / 3.0 && hi.0 < 5.0 / 3.0;
    report.row(
        "two-line-bracket",
        vec![
            ("points", Value::from(ts.len())),
            ("value", num(lo.0)),
            ("reference", num(hi.0)),
            ("worst_t", num(lo.1)),
            ("holds", Value::from(ok)),
        ],
    );
    report.check(
        "two-line-bracket",
        ok,
        format!("min {:.6} at t={}, max {:.6} at t={}", lo.0, lo.1, hi.0, hi.1),
    );
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolderParams {
    pub windows: usize,
    pub seed: u64,
    pub t_min: f64,
    pub t_max: f64,
    pub deltas: Vec<f64>,
    pub ps: Vec<f64>,
    pub tol: f64,
}

impl Default for HolderParams {
    fn default() -> Self {
        Self {
            windows: 20,
            seed: 7,
            t_min: 10.0,
            t_max: 1e4,
            deltas: vec![0.5, 1.0],
            ps: vec![2.0, 3.0],
            tol: 1e-8,
        }
    }
}

pub fn run_holder_split(prm: &HolderParams) -> Result<Report, ExperimentError> {
    let starts = seeded_uniform(prm.seed, prm.windows, prm.t_min, prm.t_max);
    let mut points = Vec::new();
    for (w, &t) in starts.iter().enumerate() {
        for &d in &prm.deltas {
            for &p in &prm.ps {
                points.push((w, t, d, p));
            }
        }
    }
    let cfg = MomentConfig::with_tol(prm.tol);
    let vals = par_map(&points, |&(_, t, d, p)| holder_split_check(t, d, p, &cfg));
    let mut report = Report::new(
        Experiment::HolderSplit,
        prm,
        &["window", "T", "delta", "p", "lhs", "rhs", "grid_sup", "slack"],
    );
    for (&(w, t, d, p), v) in points.iter().zip(vals) {
        let v = v?;
        report.row(
            "holder-split",
            vec![
                ("window", Value::from(w)),
                ("T", num(t)),
                ("delta", num(d)),
                ("p", num(p)),
                ("lhs", num(v.lhs)),
                ("rhs", num(v.rhs)),
                ("grid_sup", num(v.grid_sup)),
                ("slack", num(v.rhs / v.lhs)),
            ],
        );
        report.check(
            "holder-split",
            v.holds(),
            format!("T={t:.4} delta={d} p={p}: {:.6} <= {:.6}", v.lhs, v.rhs),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_check_small_grid() {
        let prm = KernelParams {
            orders: vec![2],
            t_min: -1.0,
            t_max: 1.0,
            step: 0.5,
            ..KernelParams::default()
        };
        let r = run_kernel_check(&prm).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.column("grid_points")[0], &Value::from(5));
    }

    #[test]
    fn parseval_short_series() {
        let prm = ParsevalParams {
            limit: 30,
            ts: vec![3.0],
            ..ParsevalParams::default()
        };
        assert!(run_parseval(&prm).unwrap().passed());
    }

    #[test]
    fn holder_is_deterministic() {
        let prm = HolderParams {
            windows: 2,
            ..HolderParams::default()
        };
        let a = run_holder_split(&prm).unwrap();
        let b = run_holder_split(&prm).unwrap();
        assert_eq!(a.csv_body(), b.csv_body());
        assert!(a.passed());
    }
}
