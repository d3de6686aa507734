//! Actor-critic with a linear critic `v(s) = f(s)^T w` and a Boltzmann actor
//! `pi(s,a) ∝ exp(theta^T phi(s,a))`.
//!
//! Per sample `(s, a, r, s')`, with `f(terminal) = 0`:
//!
//! ```text
//! g     = r + beta * f(s')^T w - f(s)^T w
//! w     = w + c(n) * g * f(s)
//! theta = clamp(theta + b(n) * pi(s,a)^{3/2} * psi(s,a) * g)
//! ```
//!
//! with compatible features `psi(s,a) = phi(s,a) - sum_b pi(s,b) phi(s,b)`.

mod features;
mod oracle;

pub use features::FeatureMap;
pub use oracle::{restarted_stationary, td_fixed_point_oracle, TdFixedPoint};

use serde::{Deserialize, Serialize};

use crate::acopt::{action_rng, sample_action};
use crate::envs::{Environment, StartDistribution, Transition};
use crate::error::{Error, Result};
use crate::harness::policy_agreement;
use crate::mdp::{
    greedy_policy, optimal_action_rate, value_iteration, Action, State, TabularMdp, TabularPolicy,
};
use crate::schedule::StepSchedule;
use crate::trace::{ConvergenceTrace, FA_COLUMNS};
use features::dot;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearCritic {
    pub w: Vec<f64>,
}

impl LinearCritic {
    pub fn zeros(d1: usize) -> Self {
        LinearCritic { w: vec![0.0; d1] }
    }

    pub fn value(&self, features: &FeatureMap, s: State) -> f64 {
        dot(&self.w, features.state_features(s))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoltzmannActor {
    pub theta: Vec<f64>,
    /// Every coordinate of `theta` is kept in `[-box_bound, box_bound]`.
    pub box_bound: f64,
}

impl BoltzmannActor {
    pub fn zeros(d2: usize, box_bound: f64) -> Self {
        BoltzmannActor {
            theta: vec![0.0; d2],
            box_bound,
        }
    }

    fn clamp(&mut self) {
        let bound = self.box_bound;
        self.theta.iter_mut().for_each(|t| *t = t.clamp(-bound, bound));
    }
}

fn check_dims(critic: Option<&LinearCritic>, actor: &BoltzmannActor, features: &FeatureMap) -> Result<()> {
    if actor.theta.len() != features.action_dim() {
        return Err(Error::domain(format!(
            "theta has dimension {}, features have {}",
            actor.theta.len(),
            features.action_dim()
        )));
    }
    if let Some(c) = critic {
        if c.w.len() != features.state_dim() {
            return Err(Error::domain(format!(
                "w has dimension {}, features have {}",
                c.w.len(),
                features.state_dim()
            )));
        }
    }
    Ok(())
}

/// Softmax of the scores `theta^T phi(s, .)`, computed after subtracting the maximum score.
pub fn boltzmann_policy(actor: &BoltzmannActor, features: &FeatureMap, s: State) -> Vec<f64> {
    let scores: Vec<f64> = (0..features.num_actions(s))
        .map(|a| dot(&actor.theta, features.state_action_features(s, a)))
        .collect();
    softmax(&scores)
}

pub(crate) fn softmax(scores: &[f64]) -> Vec<f64> {
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut e: Vec<f64> = scores.iter().map(|&x| (x - top).exp()).collect();
    let total: f64 = e.iter().sum();
    e.iter_mut().for_each(|x| *x /= total);
    e
}

/// Boltzmann probabilities in every state as a tabular policy.
pub fn boltzmann_table(actor: &BoltzmannActor, features: &FeatureMap) -> Result<TabularPolicy> {
    check_dims(None, actor, features)?;
    Ok(TabularPolicy::from_rows_unchecked(
        (0..features.num_states())
            .map(|s| boltzmann_policy(actor, features, s))
            .collect(),
    ))
}

fn compatible_with(probs: &[f64], features: &FeatureMap, s: State, a: Action) -> Vec<f64> {
    let mut mean = vec![0.0; features.action_dim()];
    for (b, &p) in probs.iter().enumerate() {
        for (m, x) in mean.iter_mut().zip(features.state_action_features(s, b)) {
            *m += p * x;
        }
    }
    features
        .state_action_features(s, a)
        .iter()
        .zip(&mean)
        .map(|(x, m)| x - m)
        .collect()
}

/// `psi(s,a) = phi(s,a) - sum_b pi(s,b) phi(s,b)`, the gradient of `log pi(s,a)` in `theta`.
pub fn compatible_features(actor: &BoltzmannActor, features: &FeatureMap, s: State, a: Action) -> Vec<f64> {
    let probs = boltzmann_policy(actor, features, s);
    compatible_with(&probs, features, s, a)
}

/// One critic and actor step in place with step sizes `c` and `b`. Returns the TD error.
pub fn fa_step(
    critic: &mut LinearCritic,
    actor: &mut BoltzmannActor,
    features: &FeatureMap,
    mdp: &TabularMdp,
    sample: &Transition,
    c: f64,
    b: f64,
) -> Result<f64> {
    check_dims(Some(critic), actor, features)?;
    let (s, a) = (sample.state, sample.action);
    if s >= features.num_states() || a >= features.num_actions(s) {
        return Err(Error::domain(format!("no features for ({s}, {a})")));
    }
    if sample.next_state >= features.num_states() {
        return Err(Error::domain(format!("no features for state {}", sample.next_state)));
    }
    apply_step(critic, actor, features, mdp, sample, c, b, None)
}

/// [`fa_step`] without validation; `probs` may carry the policy at the
/// sample's state when the caller already computed it.
#[allow(clippy::too_many_arguments)]
fn apply_step(
    critic: &mut LinearCritic,
    actor: &mut BoltzmannActor,
    features: &FeatureMap,
    mdp: &TabularMdp,
    sample: &Transition,
    c: f64,
    b: f64,
    probs: Option<Vec<f64>>,
) -> Result<f64> {
    let (s, a) = (sample.state, sample.action);
    let next_value = if mdp.is_terminal(sample.next_state) {
        0.0
    } else {
        critic.value(features, sample.next_state)
    };
    let g = sample.reward + mdp.discount() * next_value - critic.value(features, s);
    if g == 0.0 {
        return Ok(0.0);
    }
    for (w, x) in critic.w.iter_mut().zip(features.state_features(s)) {
        *w += c * g * x;
    }
    if b == 0.0 {
        return Ok(g);
    }
    let probs = probs.unwrap_or_else(|| boltzmann_policy(actor, features, s));
    let psi = compatible_with(&probs, features, s, a);
    let scale = b * probs[a].powf(1.5) * g;
    for (t, p) in actor.theta.iter_mut().zip(&psi) {
        *t += scale * p;
    }
    actor.clamp();
    Ok(g)
}

/// Functional form of [`fa_step`] with step sizes taken from `schedule` at `n`.
pub fn fa_update(
    critic: &LinearCritic,
    actor: &BoltzmannActor,
    features: &FeatureMap,
    mdp: &TabularMdp,
    sample: &Transition,
    n: u64,
    schedule: &StepSchedule,
) -> Result<(LinearCritic, BoltzmannActor)> {
    let (mut critic, mut actor) = (critic.clone(), actor.clone());
    fa_step(&mut critic, &mut actor, features, mdp, sample, schedule.critic(n), schedule.actor(n))?;
    Ok((critic, actor))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FaConfig {
    pub schedule: StepSchedule,
    pub box_bound: f64,
    pub max_steps: u64,
    pub seed: u64,
    /// Checkpoint spacing of the convergence trace; 0 disables tracing.
    pub trace_interval: u64,
}

impl Default for FaConfig {
    fn default() -> Self {
        FaConfig {
            schedule: StepSchedule::default(),
            box_bound: 10.0,
            max_steps: 100_000,
            seed: 0,
            trace_interval: 10_000,
        }
    }
}

impl FaConfig {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if !(self.box_bound > 0.0) || !self.box_bound.is_finite() {
            return Err(Error::config("fa.box_bound", "must be a positive number"));
        }
        if self.max_steps == 0 {
            return Err(Error::config("fa.max_steps", "must be positive"));
        }
        Ok(())
    }
}

/// Runs the coupled recursion from `w = 0`, `theta = 0`.
///
/// Trace columns: sup-norm distance of `w` to the TD fixed point of the
/// current `theta`, the fraction of states whose most probable action is
/// optimal, and strict agreement with the greedy oracle policy.
pub fn run_acopt_fa<E: Environment>(
    env: &mut E,
    start: &StartDistribution,
    features: &FeatureMap,
    config: &FaConfig,
) -> Result<(LinearCritic, BoltzmannActor, ConvergenceTrace)> {
    config.validate()?;
    let mdp = env.mdp().clone();
    features.check_against(&mdp)?;
    let oracle = (config.trace_interval > 0)
        .then(|| value_iteration(&mdp, 1e-10))
        .transpose()?;
    let mut rng = action_rng(config.seed);
    let mut critic = LinearCritic::zeros(features.state_dim());
    let mut actor = BoltzmannActor::zeros(features.action_dim(), config.box_bound);
    let mut trace = ConvergenceTrace::new(&FA_COLUMNS);
    for n in 0..config.max_steps {
        let s = env.current_state();
        let probs = boltzmann_policy(&actor, features, s);
        let a = sample_action(&probs, &mut rng);
        let sample = env.step(a)?;
        if sample.state != s || sample.next_state >= features.num_states() {
            return Err(Error::domain(format!("environment returned an unexpected transition {sample:?}")));
        }
        apply_step(
            &mut critic,
            &mut actor,
            features,
            &mdp,
            &sample,
            config.schedule.critic(n),
            config.schedule.actor(n),
            Some(probs),
        )?;
        let done = n + 1;
        if let Some((_, q_star)) = &oracle {
            if done % config.trace_interval == 0 || done == config.max_steps {
                let fixed = td_fixed_point_oracle(&mdp, start, &actor, features)?;
                let distance = critic
                    .w
                    .iter()
                    .zip(&fixed.w)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                let pi = boltzmann_table(&actor, features)?;
                trace.push(
                    done,
                    vec![
                        distance,
                        optimal_action_rate(&mdp, &pi, q_star)?,
                        policy_agreement(&mdp, &pi, &greedy_policy(q_star))?,
                    ],
                );
            }
        }
    }
    Ok((critic, actor, trace))
}
