//! One AC-OPT run on the six-node network: critic values, policy and the
//! convergence trace against the exact oracle.
//!
//! Run with `cargo run --release --example six_node_acopt [seed]`.

use routelab::acopt::{run_acopt, AcOptConfig};
use routelab::envs::six_node_env;
use routelab::mdp::value_iteration;
use routelab::schedule::{StepIndex, StepSchedule};

fn main() -> routelab::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let env = six_node_env();
    let config = AcOptConfig {
        schedule: StepSchedule { b0: 10.0, ..StepSchedule::default() },
        step_index: StepIndex::Visits,
        eta_decay: 0.5,
        max_steps: 200_000,
        trace_interval: 20_000,
        seed,
        ..AcOptConfig::default()
    };
    let mut sampler = env.sampler(seed);
    let (state, trace) = run_acopt(&mut sampler, &config)?;
    let (v_star, _) = value_iteration(env.mdp(), 1e-10)?;

    println!("node      v      v*   policy");
    for s in env.mdp().non_terminal_states() {
        let probs: Vec<String> = state
            .pi
            .probs(s)
            .iter()
            .enumerate()
            .map(|(a, p)| format!("{}:{p:.3}", env.action_label(s, a)))
            .collect();
        println!("{:>4} {:>7.3} {:>7.3}   {}", env.node_id(s), state.v[s], v_star[s], probs.join(" "));
    }
    println!();
    print!("{}", trace.to_csv_string());
    Ok(())
}
