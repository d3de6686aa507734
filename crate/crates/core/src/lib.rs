//! Actor-critic, Q-learning and exact dynamic-programming oracles for
//! discounted tabular MDPs, with shortest-path routing environments.
//!
//! The tabular actor-critic ([`acopt`]) treats policy search as minimizing the
//! total Bellman error `J(v, pi) = sum_s [v(s) - sum_a pi(s,a) Q(s,a)]` subject
//! to `Q(s,a) <= v(s)`. Its function-approximation variant lives in [`fa`],
//! the Q-learning baseline in [`qlearn`], and exact solvers in [`mdp`].
//!
//! ```
//! use routelab::envs::six_node_env;
//! use routelab::mdp::value_iteration;
//!
//! let env = six_node_env();
//! let (v, _) = value_iteration(env.mdp(), 1e-10).unwrap();
//! assert!((v[0] + 15.72).abs() < 1e-6);
//! ```

pub mod acopt;
pub mod envs;
mod error;
pub mod fa;
pub mod harness;
pub mod mdp;
pub mod qlearn;
pub mod schedule;
pub mod simplex;
pub mod trace;

pub use error::{Error, Result};
