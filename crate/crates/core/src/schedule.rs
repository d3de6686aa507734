use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which counter feeds the step-size sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepIndex {
    /// The global sample counter `n`.
    #[default]
    Global,
    /// The number of earlier updates of the entry being updated: the state
    /// for the actor-critic, the state-action pair for Q-learning.
    Visits,
}

/// Polynomially decaying critic/actor step sizes
/// `c(n) = c0 / (1+n)^gamma_c` and `b(n) = b0 / (1+n)^gamma_b`.
///
/// With `0.5 < gamma_c < gamma_b <= 1` both sequences are non-summable,
/// square-summable, and `b(n)/c(n) -> 0`, so the actor moves on the slower
/// timescale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepSchedule {
    pub c0: f64,
    pub b0: f64,
    pub gamma_c: f64,
    pub gamma_b: f64,
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule {
            c0: 1.0,
            b0: 1.0,
            gamma_c: 0.6,
            gamma_b: 0.85,
        }
    }
}

impl StepSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0) {
            return Err(Error::config("schedule.c0", "must be positive"));
        }
        // b0 = 0 freezes the actor, which the critic-only experiments rely on.
        if !(self.b0 >= 0.0) {
            return Err(Error::config("schedule.b0", "must be nonnegative"));
        }
        if !(self.gamma_c > 0.5 && self.gamma_c < self.gamma_b && self.gamma_b <= 1.0) {
            return Err(Error::config(
                "schedule",
                format!(
                    "exponents must satisfy 0.5 < gamma_c < gamma_b <= 1 (got {}, {})",
                    self.gamma_c, self.gamma_b
                ),
            ));
        }
        Ok(())
    }

    pub fn critic(&self, n: u64) -> f64 {
        self.c0 / (1.0 + n as f64).powf(self.gamma_c)
    }

    pub fn actor(&self, n: u64) -> f64 {
        self.b0 / (1.0 + n as f64).powf(self.gamma_b)
    }
}

/// `(c(n), b(n))`.
pub fn step_sizes(schedule: &StepSchedule, n: u64) -> (f64, f64) {
    (schedule.critic(n), schedule.actor(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_at_zero() {
        assert_eq!(step_sizes(&StepSchedule::default(), 0), (1.0, 1.0));
    }

    #[test]
    fn defaults_at_999() {
        let (c, b) = step_sizes(&StepSchedule::default(), 999);
        assert!((c - 1000f64.powf(-0.6)).abs() < 1e-15);
        assert!((c - 0.015849).abs() < 1e-6);
        assert!((b - 0.0028184).abs() < 1e-7);
    }

    #[test]
    fn timescale_ratio() {
        let s = StepSchedule::default();
        let n = 1_000_000;
        let ratio = s.actor(n) / s.critic(n);
        assert!((ratio - 10f64.powf(-1.5)).abs() < 1e-4, "{ratio}");
    }

    #[test]
    fn rejects_bad_exponents() {
        let mut s = StepSchedule::default();
        s.gamma_b = 0.55;
        assert!(s.validate().is_err());
        s = StepSchedule { gamma_c: 0.5, ..Default::default() };
        assert!(s.validate().is_err());
        assert!(StepSchedule::default().validate().is_ok());
    }
}
