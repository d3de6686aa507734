//! Linear critic and Boltzmann actor over grid coordinates.
//!
//! Prints the TD fixed point of the uniform policy, then runs the coupled
//! recursion and reports the most probable move per node.
//!
//! Run with `cargo run --release --example function_approximation`.

use routelab::envs::{grid44_env, grid44_features};
use routelab::fa::{boltzmann_table, run_acopt_fa, td_fixed_point_oracle, BoltzmannActor, FaConfig};
use routelab::mdp::{optimal_action_rate, value_iteration};
use routelab::schedule::StepSchedule;

fn main() -> routelab::Result<()> {
    let env = grid44_env(0.9)?;
    let features = grid44_features();

    let uniform = BoltzmannActor::zeros(features.action_dim(), 10.0);
    let fixed = td_fixed_point_oracle(env.mdp(), env.start(), &uniform, &features)?;
    println!("TD fixed point at theta = 0: w = {:?} (rank {})", fixed.w, fixed.rank);

    let config = FaConfig {
        schedule: StepSchedule { c0: 0.03, b0: 0.1, gamma_c: 0.6, gamma_b: 0.7 },
        max_steps: 2_000_000,
        trace_interval: 500_000,
        ..FaConfig::default()
    };
    let mut sampler = env.sampler(0);
    let (critic, actor, trace) = run_acopt_fa(&mut sampler, env.start(), &features, &config)?;
    let pi = boltzmann_table(&actor, &features)?;
    let (_, q_star) = value_iteration(env.mdp(), 1e-10)?;

    println!("w = {:.3?}", critic.w);
    println!("theta = {:.3?}", actor.theta);
    println!("optimal-action rate {:.3}", optimal_action_rate(env.mdp(), &pi, &q_star)?);
    for row in 0..5 {
        let cells: Vec<String> = (0..9)
            .map(|col| row * 9 + col)
            .map(|s| {
                if env.mdp().is_terminal(s) {
                    "  * ".to_string()
                } else {
                    format!("{:>4}", env.action_label(s, pi.most_probable_action(s)))
                }
            })
            .collect();
        println!("{}", cells.concat());
    }
    print!("{}", trace.to_csv_string());
    Ok(())
}
