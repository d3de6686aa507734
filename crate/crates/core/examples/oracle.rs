//! Exact solutions of both routing networks by value iteration.
//!
//! Run with `cargo run --example oracle`.

use routelab::envs::{grid44_env, six_node_env, RoutingEnv};
use routelab::mdp::{greedy_policy, optimal_actions, value_iteration, OPTIMAL_TIE_TOL};

fn show(title: &str, env: &RoutingEnv) -> routelab::Result<()> {
    let mdp = env.mdp();
    let (v, q) = value_iteration(mdp, 1e-10)?;
    let greedy = greedy_policy(&q);
    let ties = optimal_actions(&q, OPTIMAL_TIE_TOL);
    println!("{title} (discount {})", mdp.discount());
    for s in mdp.non_terminal_states() {
        let alternatives: Vec<&str> = ties[s].iter().map(|&a| env.action_label(s, a)).collect();
        println!(
            "  node {:>2}  v* = {:>9.4}  greedy {:<4} optimal {}",
            env.node_id(s),
            v[s],
            env.action_label(s, greedy.most_probable_action(s)),
            alternatives.join("/")
        );
    }
    Ok(())
}

fn main() -> routelab::Result<()> {
    show("six-node network", &six_node_env())?;
    show("5x9 grid", &grid44_env(0.9)?)
}
