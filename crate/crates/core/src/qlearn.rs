//! Tabular Q-learning baseline with an epsilon-greedy behaviour policy.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::acopt::action_rng;
use crate::envs::{Environment, Transition};
use crate::error::{Error, Result};
use crate::harness::policy_agreement;
use crate::mdp::{argmax, greedy_policy, value_iteration, QTable, TabularMdp};
use crate::schedule::{StepIndex, StepSchedule};
use crate::trace::{ConvergenceTrace, QLEARN_COLUMNS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QLearnConfig {
    /// Only the critic sequence `c(n)` is used.
    pub schedule: StepSchedule,
    pub step_index: StepIndex,
    pub epsilon: f64,
    pub max_steps: u64,
    pub seed: u64,
    pub trace_interval: u64,
}

impl Default for QLearnConfig {
    fn default() -> Self {
        QLearnConfig {
            schedule: StepSchedule::default(),
            step_index: StepIndex::Global,
            epsilon: 0.1,
            max_steps: 100_000,
            seed: 0,
            trace_interval: 10_000,
        }
    }
}

impl QLearnConfig {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::config("qlearn.epsilon", "must lie in [0, 1]"));
        }
        if self.max_steps == 0 {
            return Err(Error::config("qlearn.max_steps", "must be positive"));
        }
        Ok(())
    }
}

/// `q(s,a) += c * (r + beta * max_b q(s',b) - q(s,a))`; terminal successors contribute 0.
pub fn qlearn_update(q: &mut QTable, sample: &Transition, c: f64, mdp: &TabularMdp) -> Result<()> {
    let (s, a) = (sample.state, sample.action);
    mdp.action(s, a)?;
    mdp.check_state(sample.next_state)?;
    if q.num_states() != mdp.num_states() {
        return Err(Error::domain("Q-table does not match the MDP"));
    }
    let continuation = if mdp.is_terminal(sample.next_state) {
        0.0
    } else {
        q.state_max(sample.next_state)
    };
    let target = sample.reward + mdp.discount() * continuation;
    let old = q.get(s, a);
    q.set(s, a, old + c * (target - old));
    Ok(())
}

/// Runs epsilon-greedy Q-learning from `Q = 0`, tracing the sup-norm
/// distance to the value-iteration `Q*` over non-terminal states.
pub fn run_qlearn<E: Environment>(env: &mut E, config: &QLearnConfig) -> Result<(QTable, ConvergenceTrace)> {
    config.validate()?;
    let mdp = env.mdp().clone();
    let oracle = (config.trace_interval > 0)
        .then(|| value_iteration(&mdp, 1e-10))
        .transpose()?;
    let oracle_policy = oracle.as_ref().map(|(_, q)| greedy_policy(q));
    let mut rng = action_rng(config.seed);
    let mut q = QTable::zeros(&mdp);
    let mut visits: Vec<Vec<u64>> = (0..mdp.num_states()).map(|s| vec![0; mdp.num_actions(s)]).collect();
    let mut trace = ConvergenceTrace::new(&QLEARN_COLUMNS);
    for n in 0..config.max_steps {
        let s = env.current_state();
        let k = mdp.num_actions(s);
        let a = if rng.gen::<f64>() < config.epsilon {
            rng.gen_range(0..k)
        } else {
            argmax(q.row(s))
        };
        let sample = env.step(a)?;
        let k = match config.step_index {
            StepIndex::Global => n,
            StepIndex::Visits => {
                visits[s][a] += 1;
                visits[s][a] - 1
            }
        };
        qlearn_update(&mut q, &sample, config.schedule.critic(k), &mdp)?;
        let done = n + 1;
        if let (Some((_, q_star)), Some(target)) = (&oracle, &oracle_policy) {
            if done % config.trace_interval == 0 || done == config.max_steps {
                trace.push(
                    done,
                    vec![
                        sup_distance_non_terminal(&mdp, &q, q_star),
                        policy_agreement(&mdp, &greedy_policy(&q), target)?,
                    ],
                );
            }
        }
    }
    Ok((q, trace))
}

fn sup_distance_non_terminal(mdp: &TabularMdp, q: &QTable, q_star: &QTable) -> f64 {
    mdp.non_terminal_states()
        .flat_map(|s| q.row(s).iter().zip(q_star.row(s)).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}
