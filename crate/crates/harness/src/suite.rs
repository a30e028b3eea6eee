//! Runs a selection of checks concurrently and merges the reports in
//! declared order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use biasrank::{Budget, Error, Result};

use crate::checks::{CheckContext, Mutation, CHECKS};
use crate::generate::HARNESS_BUDGET;
use crate::report::Report;

/// Checks that measure wall time run alone before the rest.
const SOLO: &[&str] = &["performance"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// Check names to run; `None` runs every check, an empty list none.
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mutation: Option<Mutation>,
    #[serde(default = "default_budget")]
    pub budget: u64,
}

fn default_budget() -> u64 {
    HARNESS_BUDGET.0
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { checks: None, seed: 0, mutation: None, budget: default_budget() }
    }
}

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(name, _)| *name).collect()
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    let selected: Vec<usize> = match &cfg.checks {
        None => (0..CHECKS.len()).collect(),
        Some(names) => {
            for name in names {
                if !CHECKS.iter().any(|(n, _)| n == name) {
                    return Err(Error::Usage(format!("unknown check {name:?}; known: {}", check_names().join(", "))));
                }
            }
            (0..CHECKS.len()).filter(|&i| names.iter().any(|n| n == CHECKS[i].0)).collect()
        }
    };
    let ctx = CheckContext { seed: cfg.seed, mutation: cfg.mutation, budget: Budget(cfg.budget) };
    let (solo, shared): (Vec<usize>, Vec<usize>) = selected.iter().partition(|&&i| SOLO.contains(&CHECKS[i].0));
    let mut reports: Vec<(usize, _)> = solo.iter().map(|&i| (i, CHECKS[i].1(&ctx))).collect();
    reports.extend(shared.par_iter().map(|&i| (i, CHECKS[i].1(&ctx))).collect::<Vec<_>>());
    reports.sort_by_key(|(i, _)| *i);
    Ok(Report::new(cfg, reports.into_iter().map(|(_, r)| r).collect()))
}

/// 0 when every check passed, 1 otherwise.
pub fn exit_code(report: &Report) -> i32 {
    if report.passed() {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_selection_runs_nothing() {
        let cfg = SuiteConfig { checks: Some(vec![]), ..SuiteConfig::default() };
        let report = run_suite(&cfg).unwrap();
        assert!(report.checks.is_empty());
        assert_eq!(exit_code(&report), 0);
    }

    #[test]
    fn unknown_check_is_a_usage_error() {
        let cfg = SuiteConfig { checks: Some(vec!["nope".into()]), ..SuiteConfig::default() };
        assert!(matches!(run_suite(&cfg), Err(Error::Usage(_))));
    }

    #[test]
    fn config_parses_with_defaults() {
        let cfg: SuiteConfig =
            serde_json::from_str(r#"{"checks": ["affine-counting"], "mutation": "nonhyperbolic-rank"}"#).unwrap();
        assert_eq!(cfg.mutation, Some(Mutation::NonhyperbolicRank));
        assert_eq!(cfg.budget, HARNESS_BUDGET.0);
        assert!(serde_json::from_str::<SuiteConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
