use super::{RoutingEnv, StartDistribution};
use crate::error::Result;
use crate::fa::FeatureMap;
use crate::mdp::{ActionSpec, State, TabularMdp};

/// Compass moves in the order actions are enumerated: clockwise from East.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    E,
    SE,
    S,
    SW,
    W,
    NW,
    N,
    NE,
}

impl Direction {
    pub const CLOCKWISE_FROM_EAST: [Direction; 8] = [
        Direction::E,
        Direction::SE,
        Direction::S,
        Direction::SW,
        Direction::W,
        Direction::NW,
        Direction::N,
        Direction::NE,
    ];

    /// `(d_row, d_col)` with rows growing downwards.
    pub fn offset(self) -> (i64, i64) {
        match self {
            Direction::E => (0, 1),
            Direction::SE => (1, 1),
            Direction::S => (1, 0),
            Direction::SW => (1, -1),
            Direction::W => (0, -1),
            Direction::NW => (-1, -1),
            Direction::N => (-1, 0),
            Direction::NE => (-1, 1),
        }
    }

    pub fn reward(self) -> f64 {
        match self {
            Direction::E | Direction::W => -5.0,
            Direction::N | Direction::S => -15.0,
            _ => -10.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::E => "E",
            Direction::SE => "SE",
            Direction::S => "S",
            Direction::SW => "SW",
            Direction::W => "W",
            Direction::NW => "NW",
            Direction::N => "N",
            Direction::NE => "NE",
        }
    }
}

/// The 5x9 grid: node `id = 9*row + col`, row 0 at the top, destination in
/// the bottom-right corner (node 44).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { rows: 5, cols: 9 }
    }
}

impl GridSpec {
    pub fn num_nodes(&self) -> usize {
        self.rows * self.cols
    }

    pub fn destination(&self) -> State {
        self.num_nodes() - 1
    }

    pub fn coords(&self, s: State) -> (usize, usize) {
        (s / self.cols, s % self.cols)
    }

    /// On-grid moves out of `s`, clockwise from East, with their successors.
    pub fn moves(&self, s: State) -> Vec<(Direction, State)> {
        let (row, col) = self.coords(s);
        Direction::CLOCKWISE_FROM_EAST
            .iter()
            .filter_map(|&d| {
                let (dr, dc) = d.offset();
                let r = row as i64 + dr;
                let c = col as i64 + dc;
                (r >= 0 && c >= 0 && r < self.rows as i64 && c < self.cols as i64)
                    .then(|| (d, r as usize * self.cols + c as usize))
            })
            .collect()
    }

    pub fn to_env(&self, discount: f64) -> Result<RoutingEnv> {
        let dest = self.destination();
        let mut actions = Vec::with_capacity(self.num_nodes());
        let mut labels = Vec::with_capacity(self.num_nodes());
        for s in 0..self.num_nodes() {
            if s == dest {
                actions.push(vec![]);
                labels.push(vec!["stay".to_string()]);
                continue;
            }
            let moves = self.moves(s);
            actions.push(
                moves
                    .iter()
                    .map(|&(d, next)| ActionSpec::deterministic(d.reward(), next))
                    .collect(),
            );
            labels.push(moves.iter().map(|(d, _)| d.name().to_string()).collect());
        }
        let mdp = TabularMdp::new(actions, discount, &[dest])?;
        let start = StartDistribution::Uniform((0..dest).collect());
        let ids = (0..self.num_nodes() as i64).collect();
        Ok(RoutingEnv::new(mdp, start, ids, labels))
    }

    fn coordinate_features(&self, s: State) -> [f64; 3] {
        let (a, b) = self.coords(s);
        let (a, b) = (a as f64, b as f64);
        let last_row = (self.rows - 1) as f64;
        let last_col = (self.cols - 1) as f64;
        [last_row - a, last_col - b, last_row + a - b]
    }
}

/// The 44-node grid with uniform restarts over the non-destination nodes.
pub fn grid44_env(discount: f64) -> Result<RoutingEnv> {
    GridSpec::default().to_env(discount)
}

/// Grid features with `a = row`, `b = col`:
/// `f(s) = (4-a, 8-b, 4+a-b, 1)` and
/// `phi(s,a) = (4-a', 8-b', 4+a'-b', r(s,a), 1)` where `(a', b')` are the
/// coordinates of the node the action moves to.
///
/// Only action-dependent entries survive the softmax normalization, so the
/// coordinate block of `phi` is taken at the successor node; see
/// [`grid44_features_current_state`] for the variant that uses the current node.
pub fn grid44_features() -> FeatureMap {
    let grid = GridSpec::default();
    build_features(&grid, |_, next| next)
}

/// Same as [`grid44_features`] but with the coordinate block of `phi` taken at
/// the current node. Within a state every action then shares all entries
/// except `r(s,a)`, so the Boltzmann policy can only rank moves by their
/// immediate reward and East/West ties are exact.
pub fn grid44_features_current_state() -> FeatureMap {
    let grid = GridSpec::default();
    build_features(&grid, |s, _| s)
}

fn build_features(grid: &GridSpec, coord_node: impl Fn(State, State) -> State) -> FeatureMap {
    let dest = grid.destination();
    let mut state = Vec::with_capacity(grid.num_nodes());
    let mut state_action = Vec::with_capacity(grid.num_nodes());
    for s in 0..grid.num_nodes() {
        let [x, y, z] = grid.coordinate_features(s);
        state.push(vec![x, y, z, 1.0]);
        if s == dest {
            // the canonical self-loop
            state_action.push(vec![vec![x, y, z, 0.0, 1.0]]);
            continue;
        }
        state_action.push(
            grid.moves(s)
                .into_iter()
                .map(|(d, next)| {
                    let [x, y, z] = grid.coordinate_features(coord_node(s, next));
                    vec![x, y, z, d.reward(), 1.0]
                })
                .collect(),
        );
    }
    FeatureMap::new(state, state_action).expect("grid features are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_edge_and_interior_action_counts() {
        let env = grid44_env(0.9).unwrap();
        let mdp = env.mdp();
        assert_eq!(mdp.num_states(), 45);
        let labels = |s: usize| {
            (0..mdp.num_actions(s))
                .map(|a| env.action_label(s, a).to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(labels(0), ["E", "SE", "S"]);
        assert_eq!(labels(43), ["E", "W", "NW", "N", "NE"]);
        let rewards: Vec<f64> = mdp.actions(43).iter().map(|a| a.reward).collect();
        assert_eq!(rewards, [-5.0, -5.0, -10.0, -15.0, -10.0]);
        assert_eq!(mdp.num_actions(12), 8);
        assert_eq!(labels(8), ["S", "SW", "W"]);
        for s in 0..44 {
            let (r, c) = GridSpec::default().coords(s);
            let border = (r == 0 || r == 4) as usize + (c == 0 || c == 8) as usize;
            let expected = [8, 5, 3][border];
            assert_eq!(mdp.num_actions(s), expected, "state {s}");
        }
        assert!(mdp.is_terminal(44));
        assert_eq!(mdp.terminal_states(), vec![44]);
    }

    #[test]
    fn transitions_are_deterministic_rows() {
        let env = grid44_env(0.9).unwrap();
        for s in 0..45 {
            for spec in env.mdp().actions(s) {
                let total: f64 = spec.transitions.iter().map(|t| t.1).sum();
                assert_eq!(total, 1.0);
            }
        }
    }

    #[test]
    fn state_features() {
        let f = grid44_features();
        assert_eq!(f.state_features(0), &[4.0, 8.0, 4.0, 1.0]);
        assert_eq!(f.state_features(44), &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(f.state_dim(), 4);
        assert_eq!(f.action_dim(), 5);
    }

    #[test]
    fn action_features_at_bottom_row() {
        // 43 -> 44 by E: successor coordinates (4, 8)
        let f = grid44_features();
        assert_eq!(f.state_action_features(43, 0), &[0.0, 0.0, 0.0, -5.0, 1.0]);
        // current-node variant: (4, 7) -> (0, 1, 1)
        let g = grid44_features_current_state();
        assert_eq!(g.state_action_features(43, 0), &[0.0, 1.0, 1.0, -5.0, 1.0]);
        assert_eq!(g.state_action_features(43, 0), g.state_action_features(43, 1));
    }
}
