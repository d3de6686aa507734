//! The constrained objective on the six-node network: gaps, `J`, a single
//! descent step and the stationarity test.
//!
//! Run with `cargo run --example objective`.

use routelab::acopt::descent_check;
use routelab::envs::six_node_env;
use routelab::mdp::{
    gap_table, greedy_policy, is_stationary_feasible, objective_j, policy_evaluate_exact, value_iteration,
    TabularPolicy,
};

fn main() -> routelab::Result<()> {
    let env = six_node_env();
    let mdp = env.mdp();
    let uniform = TabularPolicy::uniform(mdp);
    let v = policy_evaluate_exact(mdp, &uniform)?;
    println!("J(v_uniform, uniform) = {:.2e}", objective_j(mdp, &v, &uniform)?);

    let (v_star, q_star) = value_iteration(mdp, 1e-12)?;
    println!("J(v*, uniform) = {:.4}", objective_j(mdp, &v_star, &uniform)?);
    let g = gap_table(mdp, &v_star)?;
    for s in mdp.non_terminal_states() {
        let row: Vec<String> = (0..mdp.num_actions(s))
            .map(|a| format!("{}:{:.2}", env.action_label(s, a), g.get(s, a)))
            .collect();
        println!("gaps at node {}: {}", env.node_id(s), row.join(" "));
    }

    let s = env.state_of_node(1).expect("node 1 exists");
    let (before, after) = descent_check(mdp, &v_star, &uniform, s, 0, 0.01, 0.5)?;
    println!("moving pi(1, {}) lowers J from {before:.4} to {after:.4}", env.action_label(s, 0));

    let star = greedy_policy(&q_star);
    println!("greedy policy stationary-feasible: {}", is_stationary_feasible(mdp, &star, 1e-9)?);
    println!("uniform policy stationary-feasible: {}", is_stationary_feasible(mdp, &uniform, 1e-9)?);
    Ok(())
}
