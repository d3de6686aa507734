use nalgebra::{DMatrix, DVector};

use super::{boltzmann_table, BoltzmannActor, FeatureMap};
use crate::envs::StartDistribution;
use crate::error::{Error, Result};
use crate::mdp::{TabularMdp, TabularPolicy};

/// Solution of the projected Bellman equation `A w = b` for linear TD(0).
#[derive(Debug, Clone, PartialEq)]
pub struct TdFixedPoint {
    pub w: Vec<f64>,
    /// Stationary distribution of the restarted chain; zero on terminal states.
    pub stationary: Vec<f64>,
    pub rank: usize,
    /// `max_i |(A w - b)_i|`.
    pub residual: f64,
}

const RANK_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-9;

/// Stationary distribution of the chain that follows `pi` and jumps back to
/// the start distribution whenever it would enter a terminal state.
pub fn restarted_stationary(mdp: &TabularMdp, pi: &TabularPolicy, start: &StartDistribution) -> Result<Vec<f64>> {
    mdp.check_policy(pi)?;
    let n = mdp.num_states();
    let restart = start.weights(n);
    if restart.iter().enumerate().any(|(s, &w)| w > 0.0 && mdp.is_terminal(s)) {
        return Err(Error::domain("start distribution puts mass on a terminal state"));
    }
    let live: Vec<usize> = mdp.non_terminal_states().collect();
    if live.is_empty() {
        return Ok(vec![0.0; n]);
    }
    let index: Vec<Option<usize>> = {
        let mut idx = vec![None; n];
        for (i, &s) in live.iter().enumerate() {
            idx[s] = Some(i);
        }
        idx
    };
    let m = live.len();
    let mut p = DMatrix::<f64>::zeros(m, m);
    for (i, &s) in live.iter().enumerate() {
        for (a, spec) in mdp.actions(s).iter().enumerate() {
            let pa = pi.prob(s, a);
            for &(y, q) in &spec.transitions {
                match index[y] {
                    Some(j) => p[(i, j)] += pa * q,
                    None => {
                        for (j, &t) in live.iter().enumerate() {
                            p[(i, j)] += pa * q * restart[t];
                        }
                    }
                }
            }
        }
    }
    // d (I - P) = 0 with the last balance equation replaced by sum(d) = 1
    let mut lhs = (DMatrix::<f64>::identity(m, m) - p).transpose();
    let mut rhs = DVector::<f64>::zeros(m);
    lhs.row_mut(m - 1).fill(1.0);
    rhs[m - 1] = 1.0;
    let d = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::numeric("restarted chain has no unique stationary distribution"))?;
    let mut out = vec![0.0; n];
    for (i, &s) in live.iter().enumerate() {
        out[s] = d[i].max(0.0);
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= total);
    Ok(out)
}

/// TD(0) limit for the Boltzmann policy of `actor`:
/// `A = Phi^T D (I - beta P) Phi`, `b = Phi^T D r`, with `D` the restarted-chain
/// stationary distribution and terminal successors contributing zero features.
///
/// When `Phi` is rank deficient the minimum-norm solution is returned; TD(0)
/// started from `w = 0` stays in the row space of `Phi`, where that solution is
/// the unique fixed point. An inconsistent system is a numeric error.
pub fn td_fixed_point_oracle(
    mdp: &TabularMdp,
    start: &StartDistribution,
    actor: &BoltzmannActor,
    features: &FeatureMap,
) -> Result<TdFixedPoint> {
    features.check_against(mdp)?;
    let pi = boltzmann_table(actor, features)?;
    let d = restarted_stationary(mdp, &pi, start)?;
    let k = features.state_dim();
    let beta = mdp.discount();
    let mut a_mat = DMatrix::<f64>::zeros(k, k);
    let mut b_vec = DVector::<f64>::zeros(k);
    for s in mdp.non_terminal_states() {
        if d[s] == 0.0 {
            continue;
        }
        let f = DVector::from_column_slice(features.state_features(s));
        let mut expected_next = DVector::<f64>::zeros(k);
        let mut expected_reward = 0.0;
        for (a, spec) in mdp.actions(s).iter().enumerate() {
            let pa = pi.prob(s, a);
            expected_reward += pa * spec.reward;
            for &(y, q) in &spec.transitions {
                if !mdp.is_terminal(y) {
                    expected_next += DVector::from_column_slice(features.state_features(y)) * (pa * q);
                }
            }
        }
        let diff = &f - expected_next * beta;
        a_mat += (&f * diff.transpose()) * d[s];
        b_vec += f * (d[s] * expected_reward);
    }
    let svd = a_mat.clone().svd(true, true);
    let scale = svd.singular_values.max().max(1.0);
    let rank = svd.rank(RANK_TOL * scale);
    let w = svd
        .solve(&b_vec, RANK_TOL * scale)
        .map_err(|e| Error::numeric(format!("TD system could not be solved: {e}")))?;
    let residual = (&a_mat * &w - &b_vec).amax();
    if !(residual <= RESIDUAL_TOL * b_vec.amax().max(1.0)) {
        return Err(Error::numeric(format!(
            "TD system is inconsistent: rank {rank} of {k}, residual {residual:e}"
        )));
    }
    Ok(TdFixedPoint {
        w: w.iter().copied().collect(),
        stationary: d,
        rank,
        residual,
    })
}
