//! Projection onto the probability simplex and the renormalizing
//! perturbation applied to tabular policies.
//!
//! Run with `cargo run --example simplex`.

use routelab::envs::six_node_env;
use routelab::mdp::TabularPolicy;
use routelab::simplex::{perturb_policy, project_simplex};

fn main() -> routelab::Result<()> {
    for x in [vec![0.5, 0.5], vec![0.9, 0.4, -0.2], vec![3.0, 1.0, 0.0, -1.0], vec![-2.0, -2.0]] {
        println!("{x:?} -> {:?}", project_simplex(&x)?.entries());
    }

    let env = six_node_env();
    let greedy: Vec<usize> = vec![0; env.mdp().num_states()];
    let pi = TabularPolicy::deterministic(env.mdp(), &greedy)?;
    let perturbed = perturb_policy(&pi, 0.1)?;
    for s in env.mdp().non_terminal_states() {
        println!("node {}: {:?} -> {:.4?}", env.node_id(s), pi.probs(s), perturbed.probs(s));
    }
    Ok(())
}
