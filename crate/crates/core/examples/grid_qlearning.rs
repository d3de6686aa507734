//! Epsilon-greedy Q-learning on the 5x9 grid, compared entry by entry with Q*.
//!
//! Run with `cargo run --release --example grid_qlearning`.

use routelab::envs::grid44_env;
use routelab::mdp::{greedy_policy, optimal_action_rate, value_iteration};
use routelab::qlearn::{run_qlearn, QLearnConfig};
use routelab::schedule::StepIndex;

fn main() -> routelab::Result<()> {
    let env = grid44_env(0.9)?;
    let config = QLearnConfig {
        step_index: StepIndex::Visits,
        max_steps: 1_000_000,
        trace_interval: 100_000,
        ..QLearnConfig::default()
    };
    let mut sampler = env.sampler(1);
    let (q, trace) = run_qlearn(&mut sampler, &config)?;
    let (_, q_star) = value_iteration(env.mdp(), 1e-10)?;

    println!("sup |Q - Q*| = {:.3e}", q.sup_distance(&q_star));
    println!(
        "greedy action optimal in {:.1}% of nodes",
        100.0 * optimal_action_rate(env.mdp(), &greedy_policy(&q), &q_star)?
    );
    for (step, dist) in trace.steps().zip(trace.column("q_sup_distance").unwrap_or_default()) {
        println!("{step:>8}  {dist:.4}");
    }
    Ok(())
}
