use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use routelab::acopt::{AcOptConfig, AcOptState};
use routelab::envs::{grid44_env, grid44_features, six_node_env, Environment, RoutingEnv};
use routelab::fa::{fa_step, td_fixed_point_oracle, BoltzmannActor, LinearCritic};
use routelab::mdp::{greedy_policy, is_stationary_feasible, policy_evaluate_exact, value_iteration, TabularPolicy};
use routelab::schedule::{StepIndex, StepSchedule};

/// Plays `pi` for `steps` samples with the actor frozen and returns the
/// critic's sup-norm error against exact evaluation.
fn frozen_tabular_critic_error(pi: &TabularPolicy, gamma_c: f64, steps: u64, seed: u64) -> f64 {
    let env = six_node_env();
    let mdp = env.mdp();
    let target = policy_evaluate_exact(mdp, pi).unwrap();
    let config = AcOptConfig {
        schedule: StepSchedule { b0: 0.0, gamma_c, gamma_b: 1.0, ..StepSchedule::default() },
        step_index: StepIndex::Visits,
        ..AcOptConfig::default()
    };
    let mut sampler = env.sampler(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = AcOptState::initial(mdp, sampler.current_state());
    state.pi = pi.clone();
    for _ in 0..steps {
        let probs = pi.probs(sampler.current_state());
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let a = probs.iter().position(|p| {
            acc += p;
            u < acc
        });
        let t = sampler.step(a.unwrap_or(probs.len() - 1)).unwrap();
        state.update(mdp, &t, &config).unwrap();
    }
    assert_eq!(&state.pi, pi);
    state.v.sup_distance(&target)
}

#[test]
fn tabular_critic_evaluates_frozen_policy() {
    let env = six_node_env();
    let mdp = env.mdp();
    // 1 -> 2 -> 4 -> 3 -> 5 -> 6 passes through every state from the start node
    let route = [(1, 2), (2, 4), (4, 3), (3, 5), (5, 6)];
    let choice: Vec<usize> = (0..mdp.num_states())
        .map(|s| {
            let Some(&(_, to)) = route.iter().find(|r| r.0 == env.node_id(s)) else {
                return 0;
            };
            mdp.actions(s)
                .iter()
                .position(|spec| env.node_id(spec.transitions[0].0) == to)
                .unwrap()
        })
        .collect();
    let pi = TabularPolicy::deterministic(mdp, &choice).unwrap();
    let err = frozen_tabular_critic_error(&pi, 0.6, 100_000, 3);
    assert!(err <= 0.1, "sup error {err}");
}

#[test]
fn tabular_critic_evaluates_frozen_uniform_policy() {
    let env = six_node_env();
    let err = frozen_tabular_critic_error(&TabularPolicy::uniform(env.mdp()), 0.8, 1_000_000, 0);
    assert!(err <= 0.1, "sup error {err}");
}

#[test]
fn linear_critic_reaches_td_fixed_point_for_frozen_actor() {
    let env = grid44_env(0.8).unwrap();
    let features = grid44_features();
    let actor = BoltzmannActor::zeros(features.action_dim(), 10.0);
    let oracle = td_fixed_point_oracle(env.mdp(), env.start(), &actor, &features).unwrap();
    let mut critic = LinearCritic::zeros(features.state_dim());
    let mut frozen = actor.clone();
    let mut sampler = env.sampler(11);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let schedule = StepSchedule { c0: 0.05, gamma_c: 0.51, ..StepSchedule::default() };
    for n in 0..16_000_000u64 {
        let s = sampler.current_state();
        let a = rng.gen_range(0..env.mdp().num_actions(s));
        let t = sampler.step(a).unwrap();
        fa_step(&mut critic, &mut frozen, &features, env.mdp(), &t, schedule.critic(n), 0.0).unwrap();
    }
    assert_eq!(frozen, actor);
    for (i, (w, o)) in critic.w.iter().zip(&oracle.w).enumerate() {
        assert!((w - o).abs() <= 0.05, "component {i}: {w} vs {o}");
    }
}

fn assert_oracle_policy_is_stationary_feasible(env: &RoutingEnv) {
    let (_, q) = value_iteration(env.mdp(), 1e-12).unwrap();
    let pi = greedy_policy(&q);
    assert!(is_stationary_feasible(env.mdp(), &pi, 1e-8).unwrap());
    assert!(!is_stationary_feasible(env.mdp(), &TabularPolicy::uniform(env.mdp()), 1e-8).unwrap());
}

#[test]
fn oracle_policies_are_stationary_feasible() {
    assert_oracle_policy_is_stationary_feasible(&six_node_env());
    assert_oracle_policy_is_stationary_feasible(&grid44_env(0.9).unwrap());
    assert_oracle_policy_is_stationary_feasible(&grid44_env(0.8).unwrap());
}
