#![allow(dead_code)]

use proptest::prelude::*;
use routelab::mdp::{ActionSpec, TabularMdp, TabularPolicy};

/// Random MDP: the last state is terminal, every other state has 1 to 4
/// actions with stochastic successor rows.
pub fn arb_mdp() -> impl Strategy<Value = TabularMdp> {
    (2usize..7, 0.1f64..0.95).prop_flat_map(|(n, beta)| {
        let state = prop::collection::vec(
            (-10.0f64..0.0, prop::collection::vec(0.0f64..1.0, n)),
            1..5,
        );
        prop::collection::vec(state, n - 1).prop_map(move |rows| {
            let mut actions: Vec<Vec<ActionSpec>> = rows
                .into_iter()
                .map(|list| {
                    list.into_iter()
                        .map(|(r, mut w)| {
                            w[n - 1] += 0.05;
                            let total: f64 = w.iter().sum();
                            let transitions = w.iter().enumerate().map(|(y, x)| (y, x / total)).collect();
                            ActionSpec::new(r, transitions)
                        })
                        .collect()
                })
                .collect();
            actions.push(vec![ActionSpec::deterministic(0.0, n - 1)]);
            TabularMdp::new(actions, beta, &[n - 1]).unwrap()
        })
    })
}

/// Strictly positive random policy for `mdp`.
pub fn arb_policy(mdp: &TabularMdp) -> impl Strategy<Value = TabularPolicy> {
    let sizes: Vec<usize> = (0..mdp.num_states()).map(|s| mdp.num_actions(s)).collect();
    sizes
        .into_iter()
        .map(|k| prop::collection::vec(0.01f64..1.0, k))
        .collect::<Vec<_>>()
        .prop_map(|rows| {
            let rows = rows
                .into_iter()
                .map(|r| {
                    let t: f64 = r.iter().sum();
                    r.iter().map(|x| x / t).collect()
                })
                .collect();
            TabularPolicy::new(rows).unwrap()
        })
}

pub fn arb_mdp_policy() -> impl Strategy<Value = (TabularMdp, TabularPolicy)> {
    arb_mdp().prop_flat_map(|mdp| {
        let pi = arb_policy(&mdp);
        (Just(mdp), pi)
    })
}
