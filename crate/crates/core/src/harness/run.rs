use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::config::{Algorithm, ExperimentConfig};
use super::policy_agreement;
use crate::acopt::{run_acopt, AcOptConfig};
use crate::envs::RoutingEnv;
use crate::error::Result;
use crate::fa::{boltzmann_table, run_acopt_fa, FaConfig};
use crate::mdp::{
    greedy_policy, objective_j, optimal_action_rate, value_iteration, QTable, TabularPolicy, ValueFunction,
};
use crate::qlearn::{run_qlearn, QLearnConfig};
use crate::trace::ConvergenceTrace;

/// Result of one seeded run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub seed: u64,
    pub values: Vec<f64>,
    pub policy: Vec<Vec<f64>>,
    pub q: Option<QTable>,
    /// `(w, theta)` for the function-approximation learner.
    pub params: Option<(Vec<f64>, Vec<f64>)>,
    pub trace: ConvergenceTrace,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub env: RoutingEnv,
    pub values_avg: ValueFunction,
    pub policy_avg: TabularPolicy,
    pub q_avg: Option<QTable>,
    pub params_avg: Option<(Vec<f64>, Vec<f64>)>,
    pub v_oracle: ValueFunction,
    pub q_oracle: QTable,
    pub oracle_policy: TabularPolicy,
    /// Strict agreement of most probable actions with the greedy oracle.
    pub agreement: f64,
    /// Fraction of states whose most probable action is optimal, ties included.
    pub optimal_rate: f64,
    pub final_j: f64,
    pub runs: Vec<RunOutcome>,
    pub runtime: Duration,
}

impl ExperimentReport {
    pub fn num_runs(&self) -> usize {
        self.runs.len()
    }

    /// Most probable action and its probability under the averaged policy.
    pub fn mpa(&self, s: usize) -> (usize, f64) {
        let a = self.policy_avg.most_probable_action(s);
        (a, self.policy_avg.prob(s, a))
    }
}

/// Executes `num_runs` runs with seeds `base_seed..base_seed + num_runs`,
/// concurrently, and averages them in seed order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let env = config.build_env()?;
    let (v_oracle, q_oracle) = value_iteration(env.mdp(), 1e-10)?;
    let oracle_policy = greedy_policy(&q_oracle);
    let seeds: Vec<u64> = (0..config.num_runs as u64).map(|i| config.base_seed + i).collect();
    let runs = seeds
        .par_iter()
        .map(|&seed| single_run(config, &env, seed))
        .collect::<Result<Vec<_>>>()?;

    let mdp = env.mdp();
    let k = runs.len() as f64;
    let mut values = vec![0.0; mdp.num_states()];
    let mut policy: Vec<Vec<f64>> = (0..mdp.num_states()).map(|s| vec![0.0; mdp.num_actions(s)]).collect();
    for run in &runs {
        for (acc, x) in values.iter_mut().zip(&run.values) {
            *acc += x / k;
        }
        for (row, run_row) in policy.iter_mut().zip(&run.policy) {
            for (acc, x) in row.iter_mut().zip(run_row) {
                *acc += x / k;
            }
        }
    }
    for row in &mut policy {
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= total);
    }
    let q_avg = runs[0].q.as_ref().map(|_| {
        let mut q = QTable::zeros(mdp);
        for run in &runs {
            let rq = run.q.as_ref().expect("every run of one algorithm has a Q-table");
            for s in 0..mdp.num_states() {
                for a in 0..mdp.num_actions(s) {
                    q.set(s, a, q.get(s, a) + rq.get(s, a) / k);
                }
            }
        }
        q
    });
    let params_avg = runs[0].params.as_ref().map(|(w0, t0)| {
        let mut w = vec![0.0; w0.len()];
        let mut theta = vec![0.0; t0.len()];
        for run in &runs {
            let (rw, rt) = run.params.as_ref().expect("every run of one algorithm has parameters");
            w.iter_mut().zip(rw).for_each(|(acc, x)| *acc += x / k);
            theta.iter_mut().zip(rt).for_each(|(acc, x)| *acc += x / k);
        }
        (w, theta)
    });
    let values_avg = ValueFunction(values);
    let policy_avg = TabularPolicy::new(policy)?;
    let agreement = policy_agreement(mdp, &policy_avg, &oracle_policy)?;
    let optimal_rate = optimal_action_rate(mdp, &policy_avg, &q_oracle)?;
    let final_j = objective_j(mdp, &values_avg, &policy_avg)?;
    Ok(ExperimentReport {
        config: config.clone(),
        env,
        values_avg,
        policy_avg,
        q_avg,
        params_avg,
        v_oracle,
        q_oracle,
        oracle_policy,
        agreement,
        optimal_rate,
        final_j,
        runs,
        runtime: started.elapsed(),
    })
}

fn single_run(config: &ExperimentConfig, env: &RoutingEnv, seed: u64) -> Result<RunOutcome> {
    let mut sampler = env.sampler(seed);
    let mdp = env.mdp();
    match config.algorithm {
        Algorithm::Acopt => {
            let cfg = AcOptConfig {
                seed,
                ..config.acopt.clone()
            };
            let (state, trace) = run_acopt(&mut sampler, &cfg)?;
            Ok(RunOutcome {
                seed,
                values: state.v.0,
                policy: state.pi.rows().to_vec(),
                q: None,
                params: None,
                trace,
            })
        }
        Algorithm::Qlearn => {
            let cfg = QLearnConfig {
                seed,
                ..config.qlearn.clone()
            };
            let (q, trace) = run_qlearn(&mut sampler, &cfg)?;
            let values = (0..mdp.num_states())
                .map(|s| if mdp.is_terminal(s) { 0.0 } else { q.state_max(s) })
                .collect();
            Ok(RunOutcome {
                seed,
                values,
                policy: greedy_policy(&q).rows().to_vec(),
                q: Some(q),
                params: None,
                trace,
            })
        }
        Algorithm::AcoptFa => {
            let features = config.build_features(env);
            let cfg = FaConfig {
                seed,
                ..config.fa.clone()
            };
            let (critic, actor, trace) = run_acopt_fa(&mut sampler, env.start(), &features, &cfg)?;
            let values = (0..mdp.num_states())
                .map(|s| if mdp.is_terminal(s) { 0.0 } else { critic.value(&features, s) })
                .collect();
            Ok(RunOutcome {
                seed,
                values,
                policy: boltzmann_table(&actor, &features)?.rows().to_vec(),
                q: None,
                params: Some((critic.w, actor.theta)),
                trace,
            })
        }
    }
}
