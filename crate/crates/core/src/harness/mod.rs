//! Seeded multi-run experiments, oracle comparison and CSV reports.

mod config;
mod report;
mod run;

pub use config::{preset, preset_names, Algorithm, EnvChoice, ExperimentConfig, FeatureChoice};
pub use report::{compare_reports, emit_report, ReportComparison};
pub use run::{run_experiment, ExperimentReport, RunOutcome};

use crate::error::{Error, Result};
use crate::mdp::{TabularMdp, TabularPolicy};

/// Formats with six significant digits and no trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("scientific literal parses");
    if rounded == 0.0 {
        "0".to_string()
    } else if rounded.abs() < 1e-4 || rounded.abs() >= 1e15 {
        format!("{rounded:e}")
    } else {
        rounded.to_string()
    }
}

/// Fraction of non-terminal states whose most probable actions coincide
/// (lowest index wins ties in each policy).
pub fn policy_agreement(mdp: &TabularMdp, a: &TabularPolicy, b: &TabularPolicy) -> Result<f64> {
    for pi in [a, b] {
        mdp.check_policy(pi)
            .map_err(|e| Error::domain(format!("policy does not match the MDP: {e}")))?;
    }
    let states: Vec<_> = mdp.non_terminal_states().collect();
    if states.is_empty() {
        return Ok(1.0);
    }
    let same = states
        .iter()
        .filter(|&&s| a.most_probable_action(s) == b.most_probable_action(s))
        .count();
    Ok(same as f64 / states.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::grid44_env;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig(-15.72), "-15.72");
        assert_eq!(fmt_sig(-39.758271), "-39.7583");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(0.000123456789), "0.000123457");
        assert_eq!(fmt_sig(1234567.0), "1234570");
        assert_eq!(fmt_sig(1.151082e-12), "1.15108e-12");
    }

    #[test]
    fn agreement_counts() {
        let env = grid44_env(0.9).unwrap();
        let mdp = env.mdp();
        let base: Vec<usize> = vec![0; 45];
        let a = TabularPolicy::deterministic(mdp, &base).unwrap();
        assert_eq!(policy_agreement(mdp, &a, &a).unwrap(), 1.0);
        let mut other = base.clone();
        for s in [3, 10, 20] {
            other[s] = 1;
        }
        let b = TabularPolicy::deterministic(mdp, &other).unwrap();
        assert!((policy_agreement(mdp, &a, &b).unwrap() - 41.0 / 44.0).abs() < 1e-15);
        let all: Vec<usize> = (0..45).map(|s| if s == 44 { 0 } else { 1 }).collect();
        let c = TabularPolicy::deterministic(mdp, &all).unwrap();
        assert_eq!(policy_agreement(mdp, &a, &c).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let env = grid44_env(0.9).unwrap();
        let small = TabularPolicy::new(vec![vec![1.0]]).unwrap();
        let full = TabularPolicy::uniform(env.mdp());
        assert!(matches!(
            policy_agreement(env.mdp(), &full, &small),
            Err(Error::Domain(_))
        ));
    }
}
