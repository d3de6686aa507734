//! Builds a routing problem from an edge list and round-trips its MDP
//! through the text format.
//!
//! Run with `cargo run --example custom_graph [edge-list-file]`.

use routelab::envs::WeightedGraph;
use routelab::mdp::{greedy_policy, value_iteration, TabularMdp};

const RING: &str = "\
# a ring with one shortcut
destination=4
start=uniform
1 2 3
2 3 3
3 4 3
4 5 3
5 1 3
1 3 7
";

fn main() -> routelab::Result<()> {
    let graph = match std::env::args().nth(1) {
        Some(path) => WeightedGraph::load(path.as_ref())?,
        None => WeightedGraph::parse(RING, "ring")?,
    };
    let env = graph.to_env(0.8)?;
    let text = env.mdp().to_text();
    let back = TabularMdp::from_text(&text)?;
    assert_eq!(&back, env.mdp());
    println!("{text}");

    let (v, q) = value_iteration(&back, 1e-10)?;
    let pi = greedy_policy(&q);
    for s in back.non_terminal_states() {
        println!(
            "node {}: v* = {:.3}, route {}",
            env.node_id(s),
            v[s],
            env.action_label(s, pi.most_probable_action(s))
        );
    }
    Ok(())
}
