use nalgebra::{DMatrix, DVector};

use super::bellman::q_unchecked;
use super::{argmax, Action, QTable, State, TabularMdp, TabularPolicy, ValueFunction};
use crate::error::{Error, Result};

const EVAL_RESIDUAL_TOL: f64 = 1e-9;

/// Actions whose optimal value is within this of the state maximum count as optimal.
pub const OPTIMAL_TIE_TOL: f64 = 1e-6;

/// Solves `(I - beta P_pi) v = R_pi` with a dense LU factorization.
pub fn policy_evaluate_exact(mdp: &TabularMdp, pi: &TabularPolicy) -> Result<ValueFunction> {
    mdp.check_policy(pi)?;
    let n = mdp.num_states();
    let beta = mdp.discount();
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for s in 0..n {
        if mdp.is_terminal(s) {
            continue;
        }
        for (spec, &p) in mdp.actions(s).iter().zip(pi.probs(s)) {
            rhs[s] += p * spec.reward;
            for &(y, q) in &spec.transitions {
                m[(s, y)] -= beta * p * q;
            }
        }
    }
    let lu = m.clone().lu();
    let v = lu
        .solve(&rhs)
        .ok_or_else(|| Error::numeric("policy evaluation system is singular"))?;
    let residual = (&m * &v - &rhs).amax();
    if !(residual <= EVAL_RESIDUAL_TOL) {
        return Err(Error::numeric(format!(
            "policy evaluation residual {residual:e} exceeds {EVAL_RESIDUAL_TOL:e}"
        )));
    }
    Ok(ValueFunction(v.iter().copied().collect()))
}

/// Gauss-Seidel value iteration until the sup-norm Bellman residual is at most `tol`.
/// Returns `v*` and the induced `Q*`.
pub fn value_iteration(mdp: &TabularMdp, tol: f64) -> Result<(ValueFunction, QTable)> {
    if !(tol > 0.0) {
        return Err(Error::domain("value iteration tolerance must be positive"));
    }
    let n = mdp.num_states();
    let mut v = ValueFunction::zeros(n);
    loop {
        for s in 0..n {
            if mdp.is_terminal(s) {
                continue;
            }
            v[s] = best_q(mdp, &v, s);
        }
        let residual = (0..n)
            .filter(|&s| !mdp.is_terminal(s))
            .map(|s| (best_q(mdp, &v, s) - v[s]).abs())
            .fold(0.0, f64::max);
        if residual <= tol {
            break;
        }
    }
    let q = super::q_table(mdp, &v)?;
    Ok((v, q))
}

fn best_q(mdp: &TabularMdp, v: &ValueFunction, s: State) -> f64 {
    mdp.actions(s)
        .iter()
        .map(|spec| q_unchecked(mdp, v, spec))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Deterministic argmax policy, lowest action index on ties.
pub fn greedy_policy(q: &QTable) -> TabularPolicy {
    TabularPolicy::from_rows_unchecked(
        q.0.iter()
            .map(|row| {
                let mut out = vec![0.0; row.len()];
                out[argmax(row)] = 1.0;
                out
            })
            .collect(),
    )
}

/// Per-state set of actions attaining `max_a q(s,a)` within `tol`.
pub fn optimal_actions(q: &QTable, tol: f64) -> Vec<Vec<Action>> {
    q.0.iter()
        .map(|row| {
            let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (0..row.len()).filter(|&a| row[a] >= best - tol).collect()
        })
        .collect()
}

/// Fraction of non-terminal states whose most probable action under `pi` is an
/// optimal action of `q_star`.
pub fn optimal_action_rate(mdp: &TabularMdp, pi: &TabularPolicy, q_star: &QTable) -> Result<f64> {
    mdp.check_policy(pi)?;
    let optimal = optimal_actions(q_star, OPTIMAL_TIE_TOL);
    let states: Vec<State> = mdp.non_terminal_states().collect();
    if states.is_empty() {
        return Ok(1.0);
    }
    let hits = states
        .iter()
        .filter(|&&s| optimal[s].contains(&pi.most_probable_action(s)))
        .count();
    Ok(hits as f64 / states.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{grid44_env, six_node_env};
    use crate::mdp::{is_stationary_feasible, ActionSpec};

    #[test]
    fn single_terminal_state_has_zero_value() {
        let mdp = TabularMdp::new(vec![vec![]], 0.9, &[0]).unwrap();
        let pi = TabularPolicy::uniform(&mdp);
        assert_eq!(policy_evaluate_exact(&mdp, &pi).unwrap().0, vec![0.0]);
    }

    #[test]
    fn two_state_chain() {
        let mdp = TabularMdp::new(
            vec![vec![ActionSpec::deterministic(-1.0, 1)], vec![]],
            0.5,
            &[1],
        )
        .unwrap();
        let v = policy_evaluate_exact(&mdp, &TabularPolicy::uniform(&mdp)).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-12);
        assert_eq!(v[1], 0.0);
    }

    #[test]
    fn six_node_optimal_route_values() {
        let env = six_node_env();
        // 1->3, 2->3, 3->5, 4->6, 5->6 in descending-neighbour action order
        let pi = TabularPolicy::deterministic(env.mdp(), &[1, 1, 0, 0, 0, 0]).unwrap();
        let v = policy_evaluate_exact(env.mdp(), &pi).unwrap();
        let expected = [-15.72, -16.72, -8.4, -6.0, -8.0, 0.0];
        for (got, want) in v.values().iter().zip(expected) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn value_iteration_six_node() {
        let env = six_node_env();
        let (v, q) = value_iteration(env.mdp(), 1e-10).unwrap();
        assert!((v[3] - -6.0).abs() < 1e-9);
        let greedy = greedy_policy(&q);
        let mpa: Vec<_> = (0..5).map(|s| greedy.most_probable_action(s)).collect();
        assert_eq!(mpa, vec![1, 1, 0, 0, 0]);
        assert!(is_stationary_feasible(env.mdp(), &greedy, 1e-9).unwrap());
    }

    #[test]
    fn value_iteration_grid_bottom_row() {
        let env = grid44_env(0.9).unwrap();
        let (_, q) = value_iteration(env.mdp(), 1e-10).unwrap();
        assert!((q.get(43, 0) - -5.0).abs() < 0.01);
        assert!((q.get(42, 0) - -9.5).abs() < 0.01);
        assert!((q.get(41, 0) - -13.55).abs() < 0.01);
        assert_eq!(greedy_policy(&q).most_probable_action(43), 0);
    }

    #[test]
    fn zero_rewards_give_zero_values() {
        let mdp = TabularMdp::new(
            vec![
                vec![ActionSpec::deterministic(0.0, 1), ActionSpec::deterministic(0.0, 0)],
                vec![ActionSpec::new(0.0, vec![(0, 0.5), (1, 0.5)])],
            ],
            0.9,
            &[],
        )
        .unwrap();
        let (v, _) = value_iteration(&mdp, 1e-12).unwrap();
        assert!(v.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let q = QTable(vec![vec![-1.0, -1.0, -1.0], vec![0.0, 2.0, 2.0]]);
        let g = greedy_policy(&q);
        assert_eq!(g.most_probable_action(0), 0);
        assert_eq!(g.most_probable_action(1), 1);
        assert_eq!(optimal_actions(&q, 1e-9)[1], vec![1, 2]);
    }

    #[test]
    fn bad_tolerance_rejected() {
        let env = six_node_env();
        assert!(value_iteration(env.mdp(), 0.0).is_err());
    }
}
