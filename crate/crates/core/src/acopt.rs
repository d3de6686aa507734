//! Two-timescale tabular actor-critic whose actor follows the descent
//! direction `pi^alpha' * g` of the Bellman-error objective.
//!
//! Per sample `(s, a, r, s')`:
//!
//! ```text
//! Q_n      = r + beta * v_n(s')
//! g_n      = Q_n - v_n(s)
//! v_{n+1}(s)   = v_n(s) + c(n) * g_n
//! pi_{n+1}(s)  = Gamma( pi_n(s) + b(n) * pi_n(s,a)^alpha' * g_n * e_a )
//! ```
//!
//! where `Gamma` is the Euclidean projection onto the simplex. Every `tau`
//! steps the whole policy is pushed towards uniform by the additive `eta`
//! perturbation so that iterates cannot settle on unstable equilibria.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::envs::{Environment, Transition};
use crate::error::{Error, Result};
use crate::harness::policy_agreement;
use crate::mdp::{
    bellman_gap, greedy_policy, objective_j, objective_j_gap_form, stationarity_residual,
    value_iteration, Action, State, TabularMdp, TabularPolicy, ValueFunction,
};
use crate::schedule::{StepIndex, StepSchedule};
use crate::simplex::{perturb_in_place, project_in_place};
use crate::trace::{ConvergenceTrace, ACOPT_COLUMNS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcOptConfig {
    pub schedule: StepSchedule,
    pub step_index: StepIndex,
    /// Exponent on `pi(s,a)` in the actor increment; 0.5 is the square-root
    /// direction, 1 the `pi * g` variant.
    pub alpha_prime: f64,
    /// Perturbation period in steps.
    pub tau: u64,
    /// Perturbation magnitude at step 0.
    pub eta: f64,
    /// The magnitude used at step `n` is `eta / (1+n)^eta_decay`; 0 keeps it constant.
    pub eta_decay: f64,
    pub max_steps: u64,
    pub seed: u64,
    pub stationarity_tol: f64,
    /// Checkpoint spacing of the convergence trace; 0 disables tracing.
    pub trace_interval: u64,
}

impl Default for AcOptConfig {
    fn default() -> Self {
        AcOptConfig {
            schedule: StepSchedule::default(),
            step_index: StepIndex::Global,
            alpha_prime: 0.5,
            tau: 10,
            eta: 0.1,
            eta_decay: 0.0,
            max_steps: 100_000,
            seed: 0,
            stationarity_tol: 1e-3,
            trace_interval: 10_000,
        }
    }
}

impl AcOptConfig {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if !(self.alpha_prime >= 0.5) {
            return Err(Error::config("acopt.alpha_prime", "must be at least 0.5"));
        }
        if self.tau == 0 {
            return Err(Error::config("acopt.tau", "must be at least 1"));
        }
        if !(self.eta > 0.0) {
            return Err(Error::config("acopt.eta", "must be positive"));
        }
        if !(self.eta_decay >= 0.0) {
            return Err(Error::config("acopt.eta_decay", "must be nonnegative"));
        }
        if self.max_steps == 0 {
            return Err(Error::config("acopt.max_steps", "must be positive"));
        }
        if !(self.stationarity_tol >= 0.0) {
            return Err(Error::config("acopt.stationarity_tol", "must be nonnegative"));
        }
        Ok(())
    }

    pub fn eta_at(&self, n: u64) -> f64 {
        if self.eta_decay == 0.0 {
            self.eta
        } else {
            self.eta / (1.0 + n as f64).powf(self.eta_decay)
        }
    }
}

/// Iterate `(v_n, pi_n)` of the recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct AcOptState {
    pub v: ValueFunction,
    pub pi: TabularPolicy,
    pub n: u64,
    /// Updates applied to each state so far.
    pub visits: Vec<u64>,
    pub current_state: State,
}

impl AcOptState {
    /// `v = 0`, uniform policy.
    pub fn initial(mdp: &TabularMdp, start: State) -> Self {
        AcOptState {
            v: ValueFunction::zeros(mdp.num_states()),
            pi: TabularPolicy::uniform(mdp),
            n: 0,
            visits: vec![0; mdp.num_states()],
            current_state: start,
        }
    }

    /// Applies one critic and actor step in place.
    pub fn update(&mut self, mdp: &TabularMdp, sample: &Transition, config: &AcOptConfig) -> Result<()> {
        let (s, a) = (sample.state, sample.action);
        mdp.action(s, a)?;
        mdp.check_state(sample.next_state)?;
        let k = match config.step_index {
            StepIndex::Global => self.n,
            StepIndex::Visits => self.visits[s],
        };
        let c = config.schedule.critic(k);
        let b = config.schedule.actor(k);
        let q = sample.reward + mdp.discount() * self.v[sample.next_state];
        let g = q - self.v[s];
        if !mdp.is_terminal(s) {
            self.visits[s] += 1;
            self.v[s] += c * g;
            let row = self.pi.row_mut(s);
            let step_size = b * row[a].powf(config.alpha_prime) * g;
            if step_size != 0.0 {
                row[a] += step_size;
                project_in_place(row);
            }
        }
        self.n += 1;
        self.current_state = sample.next_state;
        Ok(())
    }
}

/// Functional form of [`AcOptState::update`].
pub fn acopt_update(
    mdp: &TabularMdp,
    state: &AcOptState,
    sample: &Transition,
    config: &AcOptConfig,
) -> Result<AcOptState> {
    let mut next = state.clone();
    next.update(mdp, sample, config)?;
    Ok(next)
}

/// Objective before and after moving the single coordinate `pi(s,a)` by
/// `delta * pi(s,a)^alpha' * g(s,a)` with `v` held fixed and no projection.
///
/// The objective is evaluated in the gap form `-sum pi g`, which is linear in
/// `pi`, so `j_after = j_before - delta * pi(s,a)^alpha' * g(s,a)^2` exactly.
pub fn descent_check(
    mdp: &TabularMdp,
    v: &ValueFunction,
    pi: &TabularPolicy,
    s: State,
    a: Action,
    delta: f64,
    alpha_prime: f64,
) -> Result<(f64, f64)> {
    let g = bellman_gap(mdp, v, s, a)?;
    let p = pi.prob(s, a);
    let moved = p + delta * p.powf(alpha_prime) * g;
    if !(0.0..=1.0).contains(&moved) {
        return Err(Error::domain(format!(
            "step leaves [0, 1]: pi({s},{a}) would become {moved}"
        )));
    }
    let before = objective_j_gap_form(mdp, v, pi.rows())?;
    let mut rows = pi.rows().to_vec();
    rows[s][a] = moved;
    let after = objective_j_gap_form(mdp, v, &rows)?;
    Ok((before, after))
}

pub(crate) fn sample_action<R: Rng>(probs: &[f64], rng: &mut R) -> Action {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (a, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return a;
        }
    }
    // rounding left u above the cumulative sum; take the last supported action
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

pub(crate) fn action_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x005E_EDAC_70B7_u64)
}

/// Runs `config.max_steps` samples of the recursion from `v = 0` and a uniform policy.
pub fn run_acopt<E: Environment>(env: &mut E, config: &AcOptConfig) -> Result<(AcOptState, ConvergenceTrace)> {
    config.validate()?;
    let mdp = env.mdp().clone();
    let oracle = config
        .trace_interval
        .gt(&0)
        .then(|| value_iteration(&mdp, 1e-10).map(|(_, q)| greedy_policy(&q)))
        .transpose()?;
    let mut rng = action_rng(config.seed);
    let mut state = AcOptState::initial(&mdp, env.current_state());
    let mut trace = ConvergenceTrace::new(&ACOPT_COLUMNS);
    for _ in 0..config.max_steps {
        let s = env.current_state();
        let a = sample_action(state.pi.probs(s), &mut rng);
        let sample = env.step(a)?;
        state.update(&mdp, &sample, config)?;
        state.current_state = env.current_state();
        if state.n % config.tau == 0 {
            perturb_in_place(&mut state.pi, config.eta_at(state.n));
        }
        if let Some(oracle) = &oracle {
            if state.n % config.trace_interval == 0 || state.n == config.max_steps {
                trace.push(state.n, checkpoint(&mdp, &state, oracle)?);
            }
        }
    }
    Ok((state, trace))
}

fn checkpoint(mdp: &TabularMdp, state: &AcOptState, oracle: &TabularPolicy) -> Result<Vec<f64>> {
    Ok(vec![
        objective_j(mdp, &state.v, &state.pi)?,
        stationarity_residual(mdp, &state.pi)?,
        policy_agreement(mdp, &state.pi, oracle)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::six_node_env;
    use crate::mdp::ActionSpec;

    fn two_action_mdp() -> TabularMdp {
        TabularMdp::new(
            vec![
                vec![ActionSpec::deterministic(-5.0, 1), ActionSpec::deterministic(-1.0, 1)],
                vec![],
            ],
            0.9,
            &[1],
        )
        .unwrap()
    }

    fn sample(s: State, a: Action, r: f64, next: State) -> Transition {
        Transition {
            state: s,
            action: a,
            reward: r,
            next_state: next,
            terminated: false,
        }
    }

    #[test]
    fn critic_step_substitution() {
        let mdp = two_action_mdp();
        let mut cfg = AcOptConfig::default();
        cfg.schedule.c0 = 0.1;
        let state = AcOptState::initial(&mdp, 0);
        let next = acopt_update(&mdp, &state, &sample(0, 0, -5.0, 1), &cfg).unwrap();
        assert!((next.v[0] - -0.5).abs() < 1e-15);
        assert_eq!(next.v[1], 0.0);
        assert_eq!(next.n, 1);
    }

    #[test]
    fn zero_gap_leaves_policy() {
        let mdp = two_action_mdp();
        let cfg = AcOptConfig::default();
        let mut state = AcOptState::initial(&mdp, 0);
        state.v[0] = -5.0;
        let next = acopt_update(&mdp, &state, &sample(0, 0, -5.0, 1), &cfg).unwrap();
        assert_eq!(next.pi, state.pi);
    }

    #[test]
    fn actor_step_with_projection() {
        let mdp = two_action_mdp();
        let mut cfg = AcOptConfig::default();
        cfg.schedule.b0 = 0.1;
        cfg.schedule.c0 = 1.0;
        let mut state = AcOptState::initial(&mdp, 0);
        *state.pi.row_mut(0) = vec![0.25, 0.75];
        // g = r + 0.9 * 0 - 0 = 2
        let next = acopt_update(&mdp, &state, &sample(0, 0, 2.0, 1), &cfg).unwrap();
        let row = next.pi.probs(0);
        assert!((row[0] - 0.30).abs() < 1e-12 && (row[1] - 0.70).abs() < 1e-12, "{row:?}");
    }

    #[test]
    fn alpha_one_matches_pi_times_g() {
        let mdp = two_action_mdp();
        let mut cfg = AcOptConfig { alpha_prime: 1.0, ..Default::default() };
        cfg.schedule.b0 = 0.05;
        let mut state = AcOptState::initial(&mdp, 0);
        *state.pi.row_mut(0) = vec![0.4, 0.6];
        state.v[0] = -2.0;
        let smp = sample(0, 1, -1.0, 1);
        let next = acopt_update(&mdp, &state, &smp, &cfg).unwrap();
        // hand-coded pi * g increment, then projection
        let g = -1.0 + 0.9 * 0.0 - -2.0;
        let mut row = vec![0.4, 0.6 + 0.05 * 0.6 * g];
        project_in_place(&mut row);
        assert_eq!(next.pi.probs(0), row.as_slice());
    }

    #[test]
    fn bad_sample_is_domain_error() {
        let mdp = two_action_mdp();
        let state = AcOptState::initial(&mdp, 0);
        let cfg = AcOptConfig::default();
        assert!(acopt_update(&mdp, &state, &sample(0, 4, 0.0, 1), &cfg).is_err());
        assert!(acopt_update(&mdp, &state, &sample(9, 0, 0.0, 1), &cfg).is_err());
    }

    #[test]
    fn descent_examples() {
        let mdp = two_action_mdp();
        let pi = TabularPolicy::new(vec![vec![0.25, 0.75], vec![1.0]]).unwrap();
        // g(0,0) = -5 - v(0); pick v(0) = -3 so g = -2
        let v = ValueFunction(vec![-3.0, 0.0]);
        let (before, after) = descent_check(&mdp, &v, &pi, 0, 0, 0.01, 0.5).unwrap();
        assert!((before - after - 0.02).abs() < 1e-14);
        // g = 0 at v(0) = -5
        let v = ValueFunction(vec![-5.0, 0.0]);
        let (before, after) = descent_check(&mdp, &v, &pi, 0, 0, 0.3, 0.5).unwrap();
        assert_eq!(before, after);
        // precondition: leaving [0, 1]
        let v = ValueFunction(vec![-30.0, 0.0]);
        assert!(descent_check(&mdp, &v, &pi, 0, 0, 1.0, 0.5).is_err());
    }

    #[test]
    fn degenerate_single_action_chain() {
        let mdp = TabularMdp::new(
            vec![vec![ActionSpec::deterministic(-1.0, 1)], vec![]],
            0.5,
            &[1],
        )
        .unwrap();
        let env = crate::envs::RoutingEnv::new(
            mdp,
            crate::envs::StartDistribution::State(0),
            vec![0, 1],
            vec![vec!["go".into()], vec!["stay".into()]],
        );
        let mut sampler = env.sampler(1);
        let cfg = AcOptConfig { max_steps: 2_000, trace_interval: 0, ..Default::default() };
        let (state, _) = run_acopt(&mut sampler, &cfg).unwrap();
        assert!((state.v[0] + 1.0).abs() < 1e-6);
        assert_eq!(state.pi.probs(0), &[1.0]);
    }

    #[test]
    fn run_is_seed_deterministic() {
        let env = six_node_env();
        let cfg = AcOptConfig { max_steps: 5_000, trace_interval: 1_000, seed: 3, ..Default::default() };
        let a = run_acopt(&mut env.sampler(3), &cfg).unwrap();
        let b = run_acopt(&mut env.sampler(3), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1.len(), 5);
        for s in 0..6 {
            let row = a.0.pi.probs(s);
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }
}
