use super::{policy_evaluate_exact, Action, QTable, State, TabularMdp, TabularPolicy, ValueFunction};
use crate::error::{Error, Result};

/// `Q(s,a) = r(s,a) + beta * sum_s' p(s'|s,a) v(s')`.
pub fn bellman_q(mdp: &TabularMdp, v: &ValueFunction, s: State, a: Action) -> Result<f64> {
    mdp.check_values(v)?;
    let spec = mdp.action(s, a)?;
    Ok(q_unchecked(mdp, v, spec))
}

/// `g(s,a) = Q(s,a) - v(s)`; positive when `a` improves on the current estimate.
pub fn bellman_gap(mdp: &TabularMdp, v: &ValueFunction, s: State, a: Action) -> Result<f64> {
    Ok(bellman_q(mdp, v, s, a)? - v[s])
}

pub(crate) fn q_unchecked(mdp: &TabularMdp, v: &ValueFunction, spec: &super::ActionSpec) -> f64 {
    let continuation: f64 = spec.transitions.iter().map(|&(y, p)| p * v[y]).sum();
    spec.reward + mdp.discount() * continuation
}

/// All `Q(s,a)` under `v`.
pub fn q_table(mdp: &TabularMdp, v: &ValueFunction) -> Result<QTable> {
    mdp.check_values(v)?;
    Ok(QTable(
        (0..mdp.num_states())
            .map(|s| {
                mdp.actions(s)
                    .iter()
                    .map(|spec| q_unchecked(mdp, v, spec))
                    .collect()
            })
            .collect(),
    ))
}

/// All `g(s,a)` under `v`.
pub fn gap_table(mdp: &TabularMdp, v: &ValueFunction) -> Result<QTable> {
    let mut q = q_table(mdp, v)?;
    for (s, row) in q.0.iter_mut().enumerate() {
        for x in row.iter_mut() {
            *x -= v[s];
        }
    }
    Ok(q)
}

/// `J(v, pi) = sum_s [ v(s) - sum_a pi(s,a) Q(s,a) ]`.
pub fn objective_j(mdp: &TabularMdp, v: &ValueFunction, pi: &TabularPolicy) -> Result<f64> {
    mdp.check_policy(pi)?;
    let q = q_table(mdp, v)?;
    Ok((0..mdp.num_states())
        .map(|s| {
            let expected: f64 = pi.probs(s).iter().zip(q.row(s)).map(|(p, q)| p * q).sum();
            v[s] - expected
        })
        .sum())
}

/// `-sum_s sum_a w(s,a) g(s,a)` for arbitrary nonnegative weights `w`.
///
/// Coincides with [`objective_j`] whenever each row of `w` sums to one, and is
/// the extension along which `-g(s,a)` is the exact partial derivative in
/// `w(s,a)`. Used to evaluate single-coordinate moves that leave the simplex.
pub fn objective_j_gap_form(mdp: &TabularMdp, v: &ValueFunction, w: &[Vec<f64>]) -> Result<f64> {
    if w.len() != mdp.num_states() || (0..w.len()).any(|s| w[s].len() != mdp.num_actions(s)) {
        return Err(Error::domain("weight table does not match the MDP"));
    }
    let g = gap_table(mdp, v)?;
    Ok(-(0..mdp.num_states())
        .map(|s| w[s].iter().zip(g.row(s)).map(|(p, g)| p * g).sum::<f64>())
        .sum::<f64>())
}

fn policy_rows_valid(mdp: &TabularMdp, pi: &TabularPolicy, tol: f64) -> bool {
    (0..mdp.num_states()).all(|s| {
        let row = pi.probs(s);
        row.iter().all(|&p| p >= -tol) && (row.iter().sum::<f64>() - 1.0).abs() <= tol
    })
}

/// Membership of `(v, pi)` in the feasible set: `pi` is a distribution in every
/// state and no action has a positive gap beyond `tol`.
pub fn is_feasible(mdp: &TabularMdp, v: &ValueFunction, pi: &TabularPolicy, tol: f64) -> Result<bool> {
    mdp.check_policy(pi)?;
    if !policy_rows_valid(mdp, pi, tol) {
        return Ok(false);
    }
    let g = gap_table(mdp, v)?;
    Ok(g.0.iter().flatten().all(|&x| x <= tol))
}

/// `max_{s,a} |sqrt(pi(s,a)) * g^pi(s,a)|` with `g^pi` from exact evaluation.
/// Zero exactly on the equilibria of the actor flow.
pub fn stationarity_residual(mdp: &TabularMdp, pi: &TabularPolicy) -> Result<f64> {
    let v = policy_evaluate_exact(mdp, pi)?;
    let g = gap_table(mdp, &v)?;
    Ok((0..mdp.num_states())
        .flat_map(|s| {
            pi.probs(s)
                .iter()
                .zip(g.row(s))
                .map(|(p, g)| (p.max(0.0).sqrt() * g).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max))
}

/// True iff `pi` is a stable equilibrium of the actor: `sqrt(pi) g^pi = 0` and
/// `g^pi <= 0` everywhere (within `tol`). Such a policy is globally optimal.
/// Deterministic suboptimal policies satisfy the first condition but not the
/// second and are rejected.
pub fn is_stationary_feasible(mdp: &TabularMdp, pi: &TabularPolicy, tol: f64) -> Result<bool> {
    mdp.check_policy(pi)?;
    if !policy_rows_valid(mdp, pi, tol) {
        return Ok(false);
    }
    let v = policy_evaluate_exact(mdp, pi)?;
    let g = gap_table(mdp, &v)?;
    for s in 0..mdp.num_states() {
        for (p, &gap) in pi.probs(s).iter().zip(g.row(s)) {
            if (p.max(0.0).sqrt() * gap).abs() > tol || gap > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::six_node_env;
    use crate::mdp::{value_iteration, ActionSpec};

    fn chain() -> TabularMdp {
        // s0 -> s1 (terminal), r = -1
        TabularMdp::new(
            vec![vec![ActionSpec::deterministic(-1.0, 1)], vec![]],
            0.5,
            &[1],
        )
        .unwrap()
    }

    #[test]
    fn q_with_terminal_successor_is_reward() {
        let mdp = chain();
        let v = ValueFunction::zeros(2);
        assert_eq!(bellman_q(&mdp, &v, 0, 0).unwrap(), -1.0);
        assert_eq!(bellman_gap(&mdp, &v, 0, 0).unwrap(), -1.0);
    }

    #[test]
    fn six_node_q_entries() {
        let env = six_node_env();
        let mdp = env.mdp();
        let mut v = ValueFunction::zeros(6);
        // node 5 is state 4, its first action goes to node 6
        assert_eq!(bellman_q(mdp, &v, 4, 0).unwrap(), -8.0);
        v[4] = -8.0;
        let q = bellman_q(mdp, &v, 2, 0).unwrap();
        assert!((q - -8.4).abs() < 1e-12);
    }

    #[test]
    fn gap_at_node_one_via_five() {
        let env = six_node_env();
        let (v, _) = value_iteration(env.mdp(), 1e-12).unwrap();
        let g = bellman_gap(env.mdp(), &v, 0, 0).unwrap();
        assert!((g - -8.68).abs() < 1e-9, "{g}");
    }

    #[test]
    fn unknown_state_or_action_is_domain_error() {
        let mdp = chain();
        let v = ValueFunction::zeros(2);
        assert!(matches!(bellman_q(&mdp, &v, 7, 0), Err(Error::Domain(_))));
        assert!(matches!(bellman_q(&mdp, &v, 0, 3), Err(Error::Domain(_))));
        assert!(bellman_q(&mdp, &ValueFunction::zeros(5), 0, 0).is_err());
    }

    #[test]
    fn j_with_zero_values_is_minus_expected_reward() {
        let env = six_node_env();
        let mdp = env.mdp();
        let pi = TabularPolicy::uniform(mdp);
        let v = ValueFunction::zeros(6);
        let mut brute = 0.0;
        for s in 0..6 {
            let k = mdp.num_actions(s) as f64;
            for spec in mdp.actions(s) {
                brute -= spec.reward / k;
            }
        }
        let j = objective_j(mdp, &v, &pi).unwrap();
        assert!((j - brute).abs() < 1e-12);
        assert!(is_feasible(mdp, &v, &pi, 0.0).unwrap());
    }

    #[test]
    fn suboptimal_evaluation_is_infeasible() {
        let env = six_node_env();
        let mdp = env.mdp();
        // node 1 goes via 5 instead of 3
        let pi = TabularPolicy::deterministic(mdp, &[0, 1, 0, 0, 0, 0]).unwrap();
        let v = policy_evaluate_exact(mdp, &pi).unwrap();
        assert!(!is_feasible(mdp, &v, &pi, 1e-9).unwrap());
        // deterministic, so sqrt(pi) g = 0 but g > 0 somewhere: unstable equilibrium
        assert!(stationarity_residual(mdp, &pi).unwrap() < 1e-9);
        assert!(!is_stationary_feasible(mdp, &pi, 1e-9).unwrap());
    }

    #[test]
    fn uniform_policy_is_not_stationary() {
        let env = six_node_env();
        let pi = TabularPolicy::uniform(env.mdp());
        assert!(!is_stationary_feasible(env.mdp(), &pi, 1e-6).unwrap());
    }

    #[test]
    fn gap_form_matches_j_on_policies() {
        let env = six_node_env();
        let mdp = env.mdp();
        let pi = TabularPolicy::uniform(mdp);
        let v = ValueFunction((0..6).map(|s| -(s as f64)).collect());
        let a = objective_j(mdp, &v, &pi).unwrap();
        let b = objective_j_gap_form(mdp, &v, pi.rows()).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
