//! Euclidean projection onto the probability simplex and the additive
//! renormalizing perturbation used to push policies off unstable equilibria.

use crate::error::{Error, Result};
use crate::mdp::TabularPolicy;

/// A probability vector (nonnegative, summing to one).
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Nearest point of `{y : y_i >= 0, sum y_i = 1}` to `x`, by sort-and-threshold.
pub fn project_simplex(x: &[f64]) -> Result<SimplexVector> {
    if x.is_empty() {
        return Err(Error::domain("cannot project an empty vector"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("cannot project a vector with non-finite entries"));
    }
    let mut out = x.to_vec();
    project_in_place(&mut out);
    Ok(SimplexVector(out))
}

pub(crate) fn project_in_place(x: &mut [f64]) {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut threshold = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        prefix += u;
        let t = (prefix - 1.0) / (j + 1) as f64;
        if u - t > 0.0 {
            threshold = t;
        } else {
            break;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - threshold).max(0.0);
    }
}

/// `pi_hat(s,a) = (pi(s,a) + eta) / sum_b (pi(s,b) + eta)` in every state.
pub fn perturb_policy(pi: &TabularPolicy, eta: f64) -> Result<TabularPolicy> {
    if !(eta > 0.0) {
        return Err(Error::domain(format!("perturbation eta must be positive, got {eta}")));
    }
    let mut out = pi.clone();
    perturb_in_place(&mut out, eta);
    Ok(out)
}

pub(crate) fn perturb_in_place(pi: &mut TabularPolicy, eta: f64) {
    for s in 0..pi.num_states() {
        perturb_row(pi.row_mut(s), eta);
    }
}

pub(crate) fn perturb_row(row: &mut [f64], eta: f64) {
    let total: f64 = row.iter().map(|p| p + eta).sum();
    for p in row.iter_mut() {
        *p = (*p + eta) / total;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn simplex_points_are_fixed() {
        let p = project_simplex(&[0.2, 0.3, 0.5]).unwrap();
        assert!(close(p.entries(), &[0.2, 0.3, 0.5], 1e-15));
    }

    #[test]
    fn symmetric_overshoot() {
        let p = project_simplex(&[0.6, 0.6]).unwrap();
        assert!(close(p.entries(), &[0.5, 0.5], 1e-15));
    }

    #[test]
    fn clips_negative_coordinate() {
        let p = project_simplex(&[1.5, -0.3]).unwrap();
        assert_eq!(p.entries(), &[1.0, 0.0]);
    }

    #[test]
    fn empty_and_nan_rejected() {
        assert!(project_simplex(&[]).is_err());
        assert!(project_simplex(&[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn perturbation_examples() {
        let pi = TabularPolicy::new(vec![vec![1.0, 0.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let out = perturb_policy(&pi, 0.1).unwrap();
        assert!(close(out.probs(0), &[1.1 / 1.3, 0.1 / 1.3, 0.1 / 1.3], 1e-15));
        assert!(close(out.probs(1), &[0.5, 0.5], 1e-15));
        let out = perturb_policy(&pi, 0.5).unwrap();
        assert!(close(out.probs(1), &[0.5, 0.5], 1e-15));
        assert!(perturb_policy(&pi, 0.0).is_err());
    }

    #[test]
    fn uniform_is_perturbation_invariant() {
        let pi = TabularPolicy::new(vec![vec![0.25; 4]]).unwrap();
        let out = perturb_policy(&pi, 0.37).unwrap();
        assert!(close(out.probs(0), &[0.25; 4], 1e-15));
    }

    proptest! {
        #[test]
        fn projection_is_idempotent(x in prop::collection::vec(-5.0f64..5.0, 1..16)) {
            let once = project_simplex(&x).unwrap();
            let twice = project_simplex(once.entries()).unwrap();
            prop_assert!(close(once.entries(), twice.entries(), 1e-12));
            prop_assert!((once.entries().iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(once.entries().iter().all(|&v| v >= 0.0));
        }

        #[test]
        fn perturbation_floor(row in prop::collection::vec(0.0f64..1.0, 1..9), eta in 1e-3f64..1.0) {
            let total: f64 = row.iter().sum();
            prop_assume!(total > 1e-6);
            let row: Vec<f64> = row.iter().map(|p| p / total).collect();
            let k = row.len() as f64;
            let pi = TabularPolicy::new(vec![row]).unwrap();
            let out = perturb_policy(&pi, eta).unwrap();
            let floor = eta / (1.0 + k * eta);
            prop_assert!(out.probs(0).iter().all(|&p| p >= floor - 1e-15));
            prop_assert!((out.probs(0).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
