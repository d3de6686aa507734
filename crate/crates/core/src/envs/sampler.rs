use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::StartDistribution;
use crate::error::{Error, Result};
use crate::mdp::{Action, State, TabularMdp};

/// One observed transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: State,
    pub action: Action,
    pub reward: f64,
    pub next_state: State,
    /// `next_state` is terminal; the environment has already restarted.
    pub terminated: bool,
}

/// Sampling interface the learners run against.
pub trait Environment {
    fn mdp(&self) -> &TabularMdp;
    fn current_state(&self) -> State;
    fn step(&mut self, action: Action) -> Result<Transition>;
}

/// Draws successors from the MDP kernel; restarts from the start
/// distribution whenever a terminal state is reached.
#[derive(Debug, Clone)]
pub struct EnvSampler {
    mdp: Arc<TabularMdp>,
    start: StartDistribution,
    rng: ChaCha8Rng,
    current: State,
}

impl EnvSampler {
    pub fn new(mdp: Arc<TabularMdp>, start: StartDistribution, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let current = start.sample(&mut rng);
        EnvSampler {
            mdp,
            start,
            rng,
            current,
        }
    }

    /// Fresh sampler over the same model with another seed.
    pub fn reseeded(&self, seed: u64) -> Self {
        EnvSampler::new(Arc::clone(&self.mdp), self.start.clone(), seed)
    }
}

impl Environment for EnvSampler {
    fn mdp(&self) -> &TabularMdp {
        &self.mdp
    }

    fn current_state(&self) -> State {
        self.current
    }

    fn step(&mut self, action: Action) -> Result<Transition> {
        let s = self.current;
        let spec = self.mdp.action(s, action).map_err(|_| {
            Error::domain(format!("action {action} is not available in state {s}"))
        })?;
        let next = if spec.transitions.len() == 1 {
            spec.transitions[0].0
        } else {
            let u: f64 = self.rng.gen();
            let mut acc = 0.0;
            let mut chosen = spec.transitions.last().map(|t| t.0).unwrap_or(s);
            for &(y, p) in &spec.transitions {
                acc += p;
                if u < acc {
                    chosen = y;
                    break;
                }
            }
            chosen
        };
        let terminated = self.mdp.is_terminal(next);
        self.current = if terminated {
            self.start.sample(&mut self.rng)
        } else {
            next
        };
        Ok(Transition {
            state: s,
            action,
            reward: spec.reward,
            next_state: next,
            terminated,
        })
    }
}
