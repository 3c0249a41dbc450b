use super::{bad, cached_smoothed, fit_slope, grid, num, par_map, seeded_uniform, Experiment, ExperimentError, Report};
use crate::dirichlet::{lower_bound_integral, shift_stability, shifted_abs_integral, smoothed_cutoff};
use crate::diophantine::{lattice_find, per_prime_eps, power_closeness, ApproxTarget, LatticeConfig, TargetMode};
use crate::hp::Dyadic;
use crate::moments::{short_moment, MomentConfig, MomentQuery};
use crate::sieve::{primes_up_to, sieve_spf, SpfTable};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::f64::consts::PI;

fn check_regime(p: f64, n: u32, big_ns: &[f64]) -> Result<(), ExperimentError> {
    if !(p >= 1.0) || !(n as f64 > p / 2.0) {
        return Err(bad("needs p >= 1 and n > p/2"));
    }
    if big_ns.is_empty() || big_ns.iter().any(|&x| !(x > 0.0)) {
        return Err(bad("N list must be non-empty and positive"));
    }
    Ok(())
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v
}

fn spf_for(n: u32, big_ns: &[f64]) -> Result<SpfTable, ExperimentError> {
    let top = big_ns.iter().cloned().fold(0.0, f64::max);
    Ok(sieve_spf((smoothed_cutoff(n, top) as u64).max(64))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IreParams {
    pub p: f64,
    pub n: u32,
    #[serde(rename = "N_list")]
    pub big_ns: Vec<f64>,
    pub delta: f64,
    pub tol: f64,
    pub slope_range: Option<[f64; 2]>,
    pub ratio_range: Option<[f64; 2]>,
    /// `N` of the polynomial compared against `ζ` in the window-reduction rows.
    pub window_n: f64,
    pub window_ts: Vec<f64>,
    pub window_samples: usize,
    pub window_factor: f64,
    pub seed: u64,
}

impl Default for IreParams {
    fn default() -> Self {
        Self {
            p: 1.0,
            n: 1,
            big_ns: vec![2.0, 4.0, 6.0, 8.0, 10.0],
            delta: 1.0,
            tol: 1e-8,
            slope_range: Some([0.5, 2.0]),
            ratio_range: None,
            window_n: 4.0,
            window_ts: vec![1.0, 2.0, 5.0, 10.0, 100.0, 1000.0, 10000.0],
            window_samples: 16,
            window_factor: 0.1,
            seed: 3,
        }
    }
}

pub fn run_ire_growth(prm: &IreParams) -> Result<Report, ExperimentError> {
    check_regime(prm.p, prm.n, &prm.big_ns)?;
    let big_ns = sorted(&prm.big_ns);
    let mut all_ns = big_ns.clone();
    if !prm.window_ts.is_empty() {
        all_ns.push(prm.window_n);
    }
    let spf = spf_for(prm.n, &all_ns)?;
    let mut report = Report::new(
        Experiment::IreGrowth,
        prm,
        &[
            "N", "ln_N", "cutoff", "value", "err", "slope", "slope_se", "ratio", "T", "lhs", "rhs",
            "holds",
        ],
    )
    .with_plot("ln_N", "value");

    let mut values = Vec::new();
    for &big_n in &big_ns {
        let poly = cached_smoothed(prm.p, prm.n, big_n, false, &spf)?;
        let v = lower_bound_integral(&poly, prm.delta, prm.tol)?;
        values.push(v.value);
        report.row(
            "lower-bound-growth",
            vec![
                ("N", num(big_n)),
                ("ln_N", num(big_n.ln())),
                ("cutoff", Value::from(poly.cutoff())),
                ("value", num(v.value)),
                ("err", num(v.err)),
            ],
        );
    }
    let ln_ns: Vec<f64> = big_ns.iter().map(|x| x.ln()).collect();
    if big_ns.len() >= 2 {
        let (slope, se) = fit_slope(&ln_ns, &values);
        report.row(
            "growth-slope",
            vec![("slope", num(slope)), ("slope_se", num(se))],
        );
        report.note(format!("slope {slope:.4} +/- {:.4} (2 standard errors)", 2.0 * se));
        if let Some([lo, hi]) = prm.slope_range {
            report.check(
                "growth-slope",
                lo <= slope && slope <= hi,
                format!("slope of value vs ln N is {slope:.4} (se {se:.4}), wanted [{lo}, {hi}]"),
            );
        }
    }
    for (i, &big_n) in big_ns.iter().enumerate() {
        let Some(j) = big_ns.iter().position(|&m| m == 2.0 * big_n) else {
            continue;
        };
        let ratio = values[j] / values[i];
        report.row("growth-doubling", vec![("N", num(big_n)), ("ratio", num(ratio))]);
        if let Some([lo, hi]) = prm.ratio_range {
            report.check(
                "growth-doubling",
                lo <= ratio && ratio <= hi,
                format!("value({})/value({big_n}) = {ratio:.4}, wanted [{lo}, {hi}]", 2.0 * big_n),
            );
        }
    }

    if !prm.window_ts.is_empty() {
        let poly = cached_smoothed(prm.p, prm.n, prm.window_n, false, &spf)?;
        let cfg = MomentConfig::with_tol(prm.tol);
        let ts = sorted(&prm.window_ts);
        let rows = par_map(&ts, |&t| -> Result<(f64, f64), ExperimentError> {
            let lhs = shifted_abs_integral(&poly, &Dyadic::from_f64(t), prm.delta, prm.tol, &spf)?.value;
            let mut xs = seeded_uniform(prm.seed ^ t.to_bits(), prm.window_samples, t / 2.0, 2.0 * t);
            xs.extend([t / 2.0, t, 2.0 * t]);
            let mut rhs = 0.0f64;
            for x in xs {
                rhs = rhs.max(short_moment(&MomentQuery::flat(x, prm.delta, prm.p), &cfg)?.value);
            }
            Ok((prm.window_factor * lhs, rhs))
        });
        let mut from: Option<f64> = None;
        for (&t, r) in ts.iter().zip(rows) {
            let (lhs, rhs) = r?;
            let holds = lhs <= rhs;
            match (holds, from) {
                (true, None) => from = Some(t),
                (false, _) => from = None,
                _ => {}
            }
            report.row(
                "window-reduction",
                vec![
                    ("N", num(prm.window_n)),
                    ("T", num(t)),
                    ("lhs", num(lhs)),
                    ("rhs", num(rhs)),
                    ("holds", Value::from(holds)),
                ],
            );
        }
        match from {
            Some(t) => report.note(format!("window reduction holds for every tested T >= {t}")),
            None => report.note("window reduction fails at the largest tested T"),
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OmegaParams {
    pub p: f64,
    pub n: u32,
    #[serde(rename = "N_list")]
    pub big_ns: Vec<f64>,
    pub delta: f64,
    /// Anti-aligned shift with the `λ`-twisted polynomial.
    pub signed: bool,
    pub grid_points: usize,
    pub tol: f64,
    /// Defaults to `1/N` (plain) or `1` (signed).
    pub stability_bound: Option<f64>,
    pub require_monotone: bool,
}

impl Default for OmegaParams {
    fn default() -> Self {
        Self {
            p: 1.0,
            n: 1,
            big_ns: vec![2.0, 3.0, 4.0, 5.0, 6.0],
            delta: 1.0,
            signed: false,
            grid_points: 200,
            tol: 1e-8,
            stability_bound: None,
            require_monotone: true,
        }
    }
}

pub fn run_omega_growth(prm: &OmegaParams) -> Result<Report, ExperimentError> {
    check_regime(prm.p, prm.n, &prm.big_ns)?;
    let big_ns = sorted(&prm.big_ns);
    let spf = spf_for(prm.n, &big_ns)?;
    let mut report = Report::new(
        Experiment::OmegaGrowth,
        prm,
        &[
            "N", "ln_N", "primes", "status", "T", "log2_T", "loglog_T", "max_phase_dist", "min_eps",
            "closeness", "closeness_argmax", "stability", "stability_bound", "lower_bound", "proxy",
            "tn_bound_log2", "tn_bound_holds", "slope", "slope_se",
        ],
    )
    .with_plot("ln_N", "proxy");
    let grid_t = grid(-prm.delta, prm.delta, prm.grid_points.max(1));
    let mode = if prm.signed {
        TargetMode::HalfShift
    } else {
        TargetMode::Homogeneous
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut loglogs = Vec::new();
    for &big_n in &big_ns {
        let reference = cached_smoothed(prm.p, prm.n, big_n, false, &spf)?;
        let poly = if prm.signed {
            cached_smoothed(prm.p, prm.n, big_n, true, &spf)?
        } else {
            reference.clone()
        };
        let lower = lower_bound_integral(&reference, prm.delta, prm.tol)?;
        let cutoff = reference.cutoff();
        let primes = primes_up_to(cutoff);
        let eps = per_prime_eps(&primes, prm.n, big_n);
        let min_eps = eps.iter().cloned().fold(f64::INFINITY, f64::min);
        let target = ApproxTarget::new(primes.clone(), mode.clone(), min_eps).with_per_prime_eps(eps);
        let mut cells = vec![
            ("N", num(big_n)),
            ("ln_N", num(big_n.ln())),
            ("primes", Value::from(primes.len())),
            ("min_eps", num(min_eps)),
            ("lower_bound", num(lower.value)),
        ];
        let sol = match lattice_find(&target, &LatticeConfig::default()) {
            Ok(s) => s,
            Err(e) => {
                cells.push(("status", Value::from(e.to_string())));
                report.row("omega-growth", cells);
                report.check("phase-approx", false, format!("N={big_n}: {e}"));
                continue;
            }
        };
        let ok = sol.satisfies(&target);
        report.check(
            "phase-approx",
            ok,
            format!("N={big_n}: {} primes, max distance {:.3e}", primes.len(), sol.max_dist),
        );
        let close = power_closeness(&sol.t, cutoff, &spf, prm.signed);
        let close_bound = big_n.powi(-2);
        report.check(
            "power-closeness",
            close.max < close_bound,
            format!("N={big_n}: max_j {:.3e} at j={} vs {close_bound:.3e}", close.max, close.argmax),
        );
        let stab = shift_stability(&poly, &reference, &sol.t, &grid_t, &spf);
        let bound = prm
            .stability_bound
            .unwrap_or(if prm.signed { 1.0 } else { 1.0 / big_n });
        report.check(
            "shift-stability",
            stab.within(bound),
            format!("N={big_n}: deviation {:.3e} at t={} vs {bound}", stab.max_deviation, stab.argmax_t),
        );
        let proxy = shifted_abs_integral(&poly, &sol.t, prm.delta, prm.tol, &spf)?;
        let log2_t = sol.t.log2_abs();
        let ln_t = log2_t * std::f64::consts::LN_2;
        let loglog = if ln_t > 1.0 { ln_t.ln() } else { f64::NAN };
        let tn_log2 = 4.0 * PI * smoothed_cutoff(prm.n, big_n) * big_n.log2();
        xs.push(big_n.ln());
        ys.push(proxy.value);
        loglogs.push(loglog);
        cells.extend([
            ("status", Value::from("found")),
            ("T", Value::from(sol.t_approx)),
            ("log2_T", num(log2_t)),
            ("loglog_T", num(loglog)),
            ("max_phase_dist", num(sol.max_dist)),
            ("closeness", num(close.max)),
            ("closeness_argmax", Value::from(close.argmax)),
            ("stability", num(stab.max_deviation)),
            ("stability_bound", num(bound)),
            ("proxy", num(proxy.value)),
            ("tn_bound_log2", num(tn_log2)),
            ("tn_bound_holds", Value::from(log2_t <= tn_log2)),
        ]);
        report.row("omega-growth", cells);
    }
    if xs.len() >= 2 {
        let (slope, se) = fit_slope(&xs, &ys);
        report.row("growth-fit-ln-N", vec![("slope", num(slope)), ("slope_se", num(se))]);
        if loglogs.iter().all(|x| x.is_finite()) {
            let (s2, se2) = fit_slope(&loglogs, &ys);
            report.row("growth-fit-loglog-T", vec![("slope", num(s2)), ("slope_se", num(se2))]);
        }
        report.note(format!("proxy vs ln N slope {slope:.4} +/- {:.4} (2 standard errors)", 2.0 * se));
    }
    if prm.require_monotone {
        let mono = ys.len() == big_ns.len() && ys.windows(2).all(|w| w[1] > w[0]);
        report.check(
            "proxy-monotone",
            mono,
            format!(
                "shifted moments {:?} for N = {big_ns:?}",
                ys.iter().map(|y| format!("{y:.5}")).collect::<Vec<_>>()
            ),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_n() {
        let prm = OmegaParams {
            p: 2.0,
            n: 1,
            ..OmegaParams::default()
        };
        assert!(run_omega_growth(&prm).is_err());
    }

    #[test]
    fn small_omega_run() {
        let prm = OmegaParams {
            big_ns: vec![2.0, 3.0],
            ..OmegaParams::default()
        };
        let r = run_omega_growth(&prm).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.column("status")[0], &Value::from("found"));
    }

    #[test]
    fn signed_omega_run() {
        let prm = OmegaParams {
            big_ns: vec![2.0, 3.0],
            signed: true,
            ..OmegaParams::default()
        };
        let r = run_omega_growth(&prm).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
    }
}
