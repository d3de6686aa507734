//! Text serialization of [`TabularMdp`].
//!
//! ```toml
//! num_states = 2
//! discount = 0.5
//! terminals = [1]
//!
//! [[states]]
//! state = 0
//! actions = [[0, -1.0, [[1, 1.0]]]]
//!
//! [[states]]
//! state = 1
//! actions = []
//! ```
//!
//! Each action entry is `[action_index, reward, [[next_state, prob], ...]]`;
//! action indices must enumerate `0..k` in order. Terminal states may list no
//! actions; they are canonicalized on load.

use serde::{Deserialize, Serialize};

use super::{ActionSpec, State, TabularMdp};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdpDocument {
    pub num_states: usize,
    pub discount: f64,
    pub terminals: Vec<State>,
    pub states: Vec<StateEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateEntry {
    pub state: State,
    pub actions: Vec<(usize, f64, Vec<(State, f64)>)>,
}

impl MdpDocument {
    pub fn from_mdp(mdp: &TabularMdp) -> Self {
        MdpDocument {
            num_states: mdp.num_states(),
            discount: mdp.discount(),
            terminals: mdp.terminal_states(),
            states: (0..mdp.num_states())
                .map(|s| StateEntry {
                    state: s,
                    actions: mdp
                        .actions(s)
                        .iter()
                        .enumerate()
                        .map(|(a, spec)| (a, spec.reward, spec.transitions.clone()))
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_mdp(&self) -> Result<TabularMdp> {
        let mut actions: Vec<Option<Vec<ActionSpec>>> = vec![None; self.num_states];
        for entry in &self.states {
            let slot = actions.get_mut(entry.state).ok_or_else(|| {
                Error::domain(format!("state entry {} out of range", entry.state))
            })?;
            if slot.is_some() {
                return Err(Error::domain(format!("state {} listed twice", entry.state)));
            }
            let mut list = Vec::with_capacity(entry.actions.len());
            for (k, (index, reward, next)) in entry.actions.iter().enumerate() {
                if *index != k {
                    return Err(Error::domain(format!(
                        "state {}: action index {index} out of order (expected {k})",
                        entry.state
                    )));
                }
                list.push(ActionSpec::new(*reward, next.clone()));
            }
            *slot = Some(list);
        }
        let actions = actions.into_iter().map(Option::unwrap_or_default).collect();
        TabularMdp::new(actions, self.discount, &self.terminals)
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("MDP documents always serialize")
    }

    pub fn from_text(text: &str, source_name: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            source_name: source_name.to_string(),
            message: e.to_string(),
        })
    }
}

impl TabularMdp {
    pub fn to_text(&self) -> String {
        MdpDocument::from_mdp(self).to_text()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        MdpDocument::from_text(text, "<mdp>")?.to_mdp()
    }
}
