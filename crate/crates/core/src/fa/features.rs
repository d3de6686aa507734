use crate::error::{Error, Result};
use crate::mdp::{Action, State, TabularMdp};

/// State features `f(s)` (dimension `d1`) for the critic and state-action
/// features `phi(s,a)` (dimension `d2`) for the Boltzmann actor.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    state: Vec<Vec<f64>>,
    state_action: Vec<Vec<Vec<f64>>>,
    d1: usize,
    d2: usize,
}

impl FeatureMap {
    pub fn new(state: Vec<Vec<f64>>, state_action: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if state.len() != state_action.len() || state.is_empty() {
            return Err(Error::domain("state and state-action tables must cover the same states"));
        }
        let d1 = state[0].len();
        let d2 = state_action
            .iter()
            .flatten()
            .next()
            .map(Vec::len)
            .ok_or_else(|| Error::domain("no state-action features"))?;
        for (s, f) in state.iter().enumerate() {
            if f.len() != d1 || f.iter().any(|x| !x.is_finite()) {
                return Err(Error::domain(format!("bad state features at {s}")));
            }
        }
        for (s, rows) in state_action.iter().enumerate() {
            for (a, phi) in rows.iter().enumerate() {
                if phi.len() != d2 || phi.iter().any(|x| !x.is_finite()) {
                    return Err(Error::domain(format!("bad state-action features at ({s}, {a})")));
                }
            }
        }
        Ok(FeatureMap {
            state,
            state_action,
            d1,
            d2,
        })
    }

    /// One-hot state features and one-hot state-action features.
    pub fn tabular(mdp: &TabularMdp) -> Self {
        let n = mdp.num_states();
        let total: usize = (0..n).map(|s| mdp.num_actions(s)).sum();
        let mut offset = 0;
        let mut state_action = Vec::with_capacity(n);
        for s in 0..n {
            let rows = (0..mdp.num_actions(s))
                .map(|a| {
                    let mut phi = vec![0.0; total];
                    phi[offset + a] = 1.0;
                    phi
                })
                .collect();
            offset += mdp.num_actions(s);
            state_action.push(rows);
        }
        let state = (0..n)
            .map(|s| {
                let mut f = vec![0.0; n];
                f[s] = 1.0;
                f
            })
            .collect();
        FeatureMap::new(state, state_action).expect("tabular features are well formed")
    }

    pub fn state_dim(&self) -> usize {
        self.d1
    }

    pub fn action_dim(&self) -> usize {
        self.d2
    }

    pub fn num_states(&self) -> usize {
        self.state.len()
    }

    pub fn num_actions(&self, s: State) -> usize {
        self.state_action[s].len()
    }

    pub fn state_features(&self, s: State) -> &[f64] {
        &self.state[s]
    }

    pub fn state_action_features(&self, s: State, a: Action) -> &[f64] {
        &self.state_action[s][a]
    }

    pub fn check_against(&self, mdp: &TabularMdp) -> Result<()> {
        if self.num_states() != mdp.num_states() {
            return Err(Error::domain("feature map and MDP disagree on the number of states"));
        }
        for s in 0..mdp.num_states() {
            if self.num_actions(s) != mdp.num_actions(s) {
                return Err(Error::domain(format!(
                    "feature map has {} actions at state {s}, MDP has {}",
                    self.num_actions(s),
                    mdp.num_actions(s)
                )));
            }
        }
        Ok(())
    }

    /// Rank of the state-feature matrix over the given states.
    pub fn state_rank(&self, states: impl IntoIterator<Item = State>) -> usize {
        let rows: Vec<&Vec<f64>> = states.into_iter().map(|s| &self.state[s]).collect();
        if rows.is_empty() {
            return 0;
        }
        let m = nalgebra::DMatrix::from_fn(rows.len(), self.d1, |i, j| rows[i][j]);
        m.rank(1e-9)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
