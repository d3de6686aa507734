//! Routing environments: weighted graphs and the 5x9 compass grid, plus the
//! seeded sampler that drives the learners.

mod graph;
mod grid;
mod sampler;

pub use graph::{six_node_env, StartSpec, WeightedGraph, SIX_NODE_EDGES};
pub use grid::{
    grid44_env, grid44_features, grid44_features_current_state, Direction, GridSpec,
};
pub use sampler::{EnvSampler, Environment, Transition};

use std::sync::Arc;

use rand::Rng;

use crate::mdp::{State, TabularMdp};

/// Where episodes (re)start.
#[derive(Debug, Clone, PartialEq)]
pub enum StartDistribution {
    State(State),
    /// Uniform over the listed states.
    Uniform(Vec<State>),
}

impl StartDistribution {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> State {
        match self {
            StartDistribution::State(s) => *s,
            StartDistribution::Uniform(states) => states[rng.gen_range(0..states.len())],
        }
    }

    /// Probability mass on each of `n` states.
    pub fn weights(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n];
        match self {
            StartDistribution::State(s) => w[*s] = 1.0,
            StartDistribution::Uniform(states) => {
                for &s in states {
                    w[s] += 1.0 / states.len() as f64;
                }
            }
        }
        w
    }
}

/// An MDP together with its start distribution and display labels.
#[derive(Debug, Clone)]
pub struct RoutingEnv {
    mdp: Arc<TabularMdp>,
    start: StartDistribution,
    node_ids: Vec<i64>,
    action_labels: Vec<Vec<String>>,
}

impl RoutingEnv {
    pub fn new(
        mdp: TabularMdp,
        start: StartDistribution,
        node_ids: Vec<i64>,
        action_labels: Vec<Vec<String>>,
    ) -> Self {
        RoutingEnv {
            mdp: Arc::new(mdp),
            start,
            node_ids,
            action_labels,
        }
    }

    pub fn mdp(&self) -> &TabularMdp {
        &self.mdp
    }

    pub fn shared_mdp(&self) -> Arc<TabularMdp> {
        Arc::clone(&self.mdp)
    }

    pub fn start(&self) -> &StartDistribution {
        &self.start
    }

    /// External node id of state `s` (graph label, or grid index).
    pub fn node_id(&self, s: State) -> i64 {
        self.node_ids[s]
    }

    pub fn state_of_node(&self, node: i64) -> Option<State> {
        self.node_ids.iter().position(|&id| id == node)
    }

    pub fn action_label(&self, s: State, a: usize) -> &str {
        &self.action_labels[s][a]
    }

    /// Same environment with the discount factor replaced.
    pub fn with_discount(&self, discount: f64) -> crate::Result<Self> {
        Ok(RoutingEnv {
            mdp: Arc::new(self.mdp.with_discount(discount)?),
            ..self.clone()
        })
    }

    pub fn sampler(&self, seed: u64) -> EnvSampler {
        EnvSampler::new(self.shared_mdp(), self.start.clone(), seed)
    }
}
