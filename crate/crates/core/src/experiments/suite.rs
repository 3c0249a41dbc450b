use super::{Experiment, ExperimentConfig, Report};
use serde::Serialize;
use serde_json::json;
use std::time::Instant;

/// Outcome of one acceptance criterion, aggregated over the checks it covers.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub failures: Vec<String>,
    pub checks: usize,
    pub seconds: f64,
    pub time_limit: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub reports: Vec<Option<Report>>,
    pub errors: Vec<Option<String>>,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

/// Default configurations run by the suite, in execution order.
pub fn acceptance_plan() -> Vec<ExperimentConfig> {
    vec![
        ExperimentConfig::new(Experiment::Theorem3),
        ExperimentConfig::new(Experiment::Lemma2Sup),
        ExperimentConfig::new(Experiment::Lemma2Sup)
            .with("ratio", true)
            .with("margin", 0.05)
            .with("samples", 200),
        ExperimentConfig::new(Experiment::Parseval),
        ExperimentConfig::new(Experiment::KernelCheck),
        ExperimentConfig::new(Experiment::SmoothedRepr),
        ExperimentConfig::new(Experiment::IreGrowth),
        ExperimentConfig::new(Experiment::IreGrowth)
            .with("p", 2.0)
            .with("n", 2)
            .with("N_list", json!([2.0, 4.0, 8.0]))
            .with("slope_range", json!(null))
            .with("ratio_range", json!([1.5, 3.0]))
            .with("window_ts", json!([])),
        ExperimentConfig::new(Experiment::OmegaGrowth),
        ExperimentConfig::new(Experiment::DiophFind),
        ExperimentConfig::new(Experiment::ZetaBounds),
        ExperimentConfig::new(Experiment::HolderSplit),
        ExperimentConfig::new(Experiment::Moment),
    ]
}

struct Criterion {
    id: u8,
    title: &'static str,
    /// `(plan index, anchors)`; no anchors means every check of that report.
    sources: &'static [(usize, &'static [&'static str])],
    time_limit: Option<f64>,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "short moments at extremal shifts lie between the explicit bounds",
        sources: &[(0, &["moment-sandwich"])],
        time_limit: Some(600.0),
    },
    Criterion {
        id: 2,
        title: "singular integral I(delta, q) within its closed-form bracket",
        sources: &[(0, &["i-integral-bracket", "i-integral-unit"])],
        time_limit: None,
    },
    Criterion {
        id: 3,
        title: "weighted moment maximal at the origin and attained at an aligned shift",
        sources: &[(1, &["sup-at-origin", "kronecker-shift"])],
        time_limit: Some(300.0),
    },
    Criterion {
        id: 4,
        title: "ratio moment at an anti-aligned shift reaches the zeta moment at the origin",
        sources: &[(2, &["kronecker-shift"])],
        time_limit: None,
    },
    Criterion {
        id: 5,
        title: "finite Parseval identity",
        sources: &[(3, &[])],
        time_limit: None,
    },
    Criterion {
        id: 6,
        title: "kernel transforms, unit mass and positivity",
        sources: &[(4, &[])],
        time_limit: None,
    },
    Criterion {
        id: 7,
        title: "convolution integral equals the smoothed Dirichlet sum",
        sources: &[(5, &[])],
        time_limit: None,
    },
    Criterion {
        id: 8,
        title: "growth of the smoothed lower-bound integral in N",
        sources: &[(6, &["growth-slope"]), (7, &["growth-doubling"])],
        time_limit: Some(900.0),
    },
    Criterion {
        id: 9,
        title: "shift stability of the smoothed polynomial at a lattice-found shift",
        sources: &[(8, &["phase-approx", "power-closeness", "shift-stability"])],
        time_limit: None,
    },
    Criterion {
        id: 10,
        title: "lattice and brute-force shifts verified, single-prime closed forms",
        sources: &[(9, &[])],
        time_limit: None,
    },
    Criterion {
        id: 11,
        title: "zeta special values, symmetry, Euler product and explicit bounds",
        sources: &[(10, &[])],
        time_limit: None,
    },
    Criterion {
        id: 12,
        title: "Holder split of the p-th moment",
        sources: &[(11, &[])],
        time_limit: None,
    },
    Criterion {
        id: 13,
        title: "bounded sampled moments for |p| < 1, growing shifted moments for p = 1",
        sources: &[(12, &["moment-upper"]), (8, &["proxy-monotone"])],
        time_limit: None,
    },
];

/// Runs every acceptance-tier experiment with its default configuration.
/// `progress` sees each experiment name before it starts.
pub fn run_all_checks(mut progress: impl FnMut(&ExperimentConfig)) -> SuiteOutcome {
    let plan = acceptance_plan();
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    let mut seconds = Vec::new();
    for cfg in &plan {
        progress(cfg);
        let start = Instant::now();
        match cfg.run() {
            Ok(r) => {
                reports.push(Some(r));
                errors.push(None);
            }
            Err(e) => {
                reports.push(None);
                errors.push(Some(e.to_string()));
            }
        }
        seconds.push(start.elapsed().as_secs_f64());
    }
    let criteria = CRITERIA
        .iter()
        .map(|c| {
            let mut failures = Vec::new();
            let mut checks = 0;
            let mut secs = 0.0;
            let mut used = Vec::new();
            for &(idx, anchors) in c.sources {
                if !used.contains(&idx) {
                    secs += seconds[idx];
                    used.push(idx);
                }
                let Some(r) = &reports[idx] else {
                    failures.push(format!(
                        "{} failed to run: {}",
                        plan[idx].experiment.name(),
                        errors[idx].as_deref().unwrap_or("")
                    ));
                    continue;
                };
                for ch in &r.checks {
                    if anchors.is_empty() || anchors.contains(&ch.anchor.as_str()) {
                        checks += 1;
                        if !ch.passed {
                            failures.push(format!("{}: {}", ch.anchor, ch.detail));
                        }
                    }
                }
            }
            if checks == 0 && failures.is_empty() {
                failures.push("no checks were produced".into());
            }
            if let Some(limit) = c.time_limit {
                if secs > limit {
                    failures.push(format!("took {secs:.0} s, limit {limit:.0} s"));
                }
            }
            CriterionResult {
                id: c.id,
                title: c.title,
                passed: failures.is_empty(),
                failures,
                checks,
                seconds: secs,
                time_limit: c.time_limit,
            }
        })
        .collect();
    SuiteOutcome {
        reports,
        errors,
        criteria,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_configs_resolve() {
        for cfg in acceptance_plan() {
            // resolution errors surface before any computation
            let p = &cfg.parameters;
            let ok = match cfg.experiment {
                Experiment::Lemma2Sup => super::super::resolve::<super::super::Lemma2Params>(p).is_ok(),
                Experiment::IreGrowth => super::super::resolve::<super::super::IreParams>(p).is_ok(),
                _ => p.is_empty(),
            };
            assert!(ok, "{cfg:?}");
        }
    }

    #[test]
    fn criteria_cover_one_to_thirteen() {
        let ids: Vec<u8> = CRITERIA.iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=13).collect::<Vec<_>>());
        let n = acceptance_plan().len();
        assert!(CRITERIA.iter().all(|c| c.sources.iter().all(|(i, _)| *i < n)));
    }
}
