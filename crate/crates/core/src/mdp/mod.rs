//! Tabular discounted MDPs and the Bellman quantities built on them.
//!
//! States are dense indices `0..num_states`. Actions are local to a state:
//! action `k` in state `s` is the `k`-th entry of `actions(s)`, so the per-state
//! action count may vary. Terminal states are canonicalized to a single
//! zero-reward self-loop and always carry value 0.

mod bellman;
mod format;
mod solve;

pub use bellman::{
    bellman_gap, bellman_q, gap_table, is_feasible, is_stationary_feasible, objective_j,
    objective_j_gap_form, q_table, stationarity_residual,
};
pub use format::MdpDocument;
pub use solve::{
    greedy_policy, optimal_action_rate, optimal_actions, policy_evaluate_exact, value_iteration,
    OPTIMAL_TIE_TOL,
};

use crate::error::{Error, Result};

pub type State = usize;
pub type Action = usize;

const ROW_SUM_TOL: f64 = 1e-12;
const POLICY_SUM_TOL: f64 = 1e-10;

/// One available action: its reward `r(s,a)` and successor distribution `p(.|s,a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpec {
    pub reward: f64,
    pub transitions: Vec<(State, f64)>,
}

impl ActionSpec {
    pub fn new(reward: f64, transitions: Vec<(State, f64)>) -> Self {
        ActionSpec {
            reward,
            transitions,
        }
    }

    /// Deterministic move to `next`.
    pub fn deterministic(reward: f64, next: State) -> Self {
        ActionSpec::new(reward, vec![(next, 1.0)])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    actions: Vec<Vec<ActionSpec>>,
    discount: f64,
    terminal: Vec<bool>,
}

impl TabularMdp {
    /// Validates and canonicalizes a model. Any actions listed for a terminal
    /// state are replaced by one zero-reward self-loop.
    pub fn new(
        mut actions: Vec<Vec<ActionSpec>>,
        discount: f64,
        terminals: &[State],
    ) -> Result<Self> {
        let n = actions.len();
        if n == 0 {
            return Err(Error::domain("an MDP needs at least one state"));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(Error::domain(format!(
                "discount must lie in (0, 1), got {discount}"
            )));
        }
        let mut terminal = vec![false; n];
        for &t in terminals {
            if t >= n {
                return Err(Error::domain(format!("terminal state {t} out of range")));
            }
            terminal[t] = true;
        }
        for (s, list) in actions.iter_mut().enumerate() {
            if terminal[s] {
                *list = vec![ActionSpec::deterministic(0.0, s)];
                continue;
            }
            if list.is_empty() {
                return Err(Error::domain(format!("state {s} has no actions")));
            }
            for (a, spec) in list.iter().enumerate() {
                if !spec.reward.is_finite() {
                    return Err(Error::domain(format!("reward of ({s}, {a}) is not finite")));
                }
                let mut total = 0.0;
                for &(next, p) in &spec.transitions {
                    if next >= n {
                        return Err(Error::domain(format!(
                            "successor {next} of ({s}, {a}) out of range"
                        )));
                    }
                    if !(p >= 0.0) {
                        return Err(Error::domain(format!(
                            "negative transition probability at ({s}, {a}) -> {next}"
                        )));
                    }
                    total += p;
                }
                if (total - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::domain(format!(
                        "transition row ({s}, {a}) sums to {total}"
                    )));
                }
            }
        }
        Ok(TabularMdp {
            actions,
            discount,
            terminal,
        })
    }

    pub fn num_states(&self) -> usize {
        self.actions.len()
    }

    pub fn num_actions(&self, s: State) -> usize {
        self.actions[s].len()
    }

    pub fn max_actions(&self) -> usize {
        self.actions.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn actions(&self, s: State) -> &[ActionSpec] {
        &self.actions[s]
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn is_terminal(&self, s: State) -> bool {
        self.terminal[s]
    }

    pub fn terminal_states(&self) -> Vec<State> {
        (0..self.num_states()).filter(|&s| self.terminal[s]).collect()
    }

    pub fn non_terminal_states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.num_states()).filter(move |&s| !self.terminal[s])
    }

    /// Same model with a different discount factor.
    pub fn with_discount(&self, discount: f64) -> Result<Self> {
        TabularMdp::new(self.actions.clone(), discount, &self.terminal_states())
    }

    pub fn reward(&self, s: State, a: Action) -> Result<f64> {
        self.action(s, a).map(|spec| spec.reward)
    }

    pub fn action(&self, s: State, a: Action) -> Result<&ActionSpec> {
        self.actions
            .get(s)
            .ok_or_else(|| Error::domain(format!("unknown state {s}")))?
            .get(a)
            .ok_or_else(|| Error::domain(format!("action {a} not available in state {s}")))
    }

    pub(crate) fn check_state(&self, s: State) -> Result<()> {
        if s < self.num_states() {
            Ok(())
        } else {
            Err(Error::domain(format!("unknown state {s}")))
        }
    }

    pub(crate) fn check_values(&self, v: &ValueFunction) -> Result<()> {
        if v.len() != self.num_states() {
            return Err(Error::domain(format!(
                "value function has {} entries, MDP has {} states",
                v.len(),
                self.num_states()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_policy(&self, pi: &TabularPolicy) -> Result<()> {
        if pi.num_states() != self.num_states() {
            return Err(Error::domain("policy and MDP disagree on the number of states"));
        }
        for s in 0..self.num_states() {
            if pi.probs(s).len() != self.num_actions(s) {
                return Err(Error::domain(format!(
                    "policy row {s} has {} entries, state has {} actions",
                    pi.probs(s).len(),
                    self.num_actions(s)
                )));
            }
        }
        Ok(())
    }
}

/// Per-state value estimates `v(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction(pub Vec<f64>);

impl ValueFunction {
    pub fn zeros(n: usize) -> Self {
        ValueFunction(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn sup_distance(&self, other: &ValueFunction) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<State> for ValueFunction {
    type Output = f64;
    fn index(&self, s: State) -> &f64 {
        &self.0[s]
    }
}

impl std::ops::IndexMut<State> for ValueFunction {
    fn index_mut(&mut self, s: State) -> &mut f64 {
        &mut self.0[s]
    }
}

/// Per-state-action values, defined exactly on the available actions.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable(pub Vec<Vec<f64>>);

impl QTable {
    pub fn zeros(mdp: &TabularMdp) -> Self {
        QTable(
            (0..mdp.num_states())
                .map(|s| vec![0.0; mdp.num_actions(s)])
                .collect(),
        )
    }

    pub fn num_states(&self) -> usize {
        self.0.len()
    }

    pub fn row(&self, s: State) -> &[f64] {
        &self.0[s]
    }

    pub fn get(&self, s: State, a: Action) -> f64 {
        self.0[s][a]
    }

    pub fn set(&mut self, s: State, a: Action, value: f64) {
        self.0[s][a] = value;
    }

    /// `max_a q(s, a)`.
    pub fn state_max(&self, s: State) -> f64 {
        self.0[s].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_distance(&self, other: &QTable) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(row: &[f64]) -> Action {
    let mut best = 0;
    for (a, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = a;
        }
    }
    best
}

/// A randomized stationary policy: one probability vector per state.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPolicy {
    probs: Vec<Vec<f64>>,
}

impl TabularPolicy {
    /// Validates that every row is a probability vector.
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        for (s, row) in probs.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::domain(format!("policy row {s} is empty")));
            }
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::domain(format!("policy row {s} has a negative entry")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > POLICY_SUM_TOL {
                return Err(Error::domain(format!("policy row {s} sums to {total}")));
            }
        }
        Ok(TabularPolicy { probs })
    }

    pub(crate) fn from_rows_unchecked(probs: Vec<Vec<f64>>) -> Self {
        TabularPolicy { probs }
    }

    pub fn uniform(mdp: &TabularMdp) -> Self {
        TabularPolicy {
            probs: (0..mdp.num_states())
                .map(|s| {
                    let k = mdp.num_actions(s);
                    vec![1.0 / k as f64; k]
                })
                .collect(),
        }
    }

    /// Deterministic policy choosing `choice[s]` in each state.
    pub fn deterministic(mdp: &TabularMdp, choice: &[Action]) -> Result<Self> {
        if choice.len() != mdp.num_states() {
            return Err(Error::domain("one action per state is required"));
        }
        let probs = choice
            .iter()
            .enumerate()
            .map(|(s, &a)| {
                let k = mdp.num_actions(s);
                if a >= k {
                    return Err(Error::domain(format!(
                        "action {a} not available in state {s}"
                    )));
                }
                let mut row = vec![0.0; k];
                row[a] = 1.0;
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TabularPolicy { probs })
    }

    pub fn num_states(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self, s: State) -> &[f64] {
        &self.probs[s]
    }

    pub fn prob(&self, s: State, a: Action) -> f64 {
        self.probs[s][a]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub(crate) fn row_mut(&mut self, s: State) -> &mut Vec<f64> {
        &mut self.probs[s]
    }

    /// Most probable action in `s`, lowest index on ties.
    pub fn most_probable_action(&self, s: State) -> Action {
        argmax(&self.probs[s])
    }
}
