use serde::{Deserialize, Serialize};

use super::exponent::{exponent_from_scgf, ExponentEstimate, RootOpts};
use super::ScgfEvaluator;
use crate::analytic::{perron_pair, stationary_distribution};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::processes::Trace;

/// Transition-count MLE of a finite chain observed through its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimate {
    states: Vec<f64>,
    counts: Vec<Vec<u64>>,
    pi_hat: SquareMatrix,
    visited: Vec<bool>,
}

impl TransitionEstimate {
    /// Builds an estimate directly from a transition matrix, as if it had
    /// been observed exactly. Rows must be stochastic or all-zero.
    pub fn from_matrix(states: Vec<f64>, pi_hat: SquareMatrix) -> Result<Self> {
        if states.len() != pi_hat.dim() {
            return Err(Error::parameter(
                "one state value per matrix row is required",
            ));
        }
        let visited: Vec<bool> = pi_hat.rows().map(|r| r.iter().any(|v| *v > 0.0)).collect();
        Ok(Self {
            counts: vec![vec![0; states.len()]; states.len()],
            states,
            pi_hat,
            visited,
        })
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn pi_hat(&self) -> &SquareMatrix {
        &self.pi_hat
    }

    /// Whether each state was observed as the source of a transition.
    pub fn visited(&self) -> &[bool] {
        &self.visited
    }

    pub fn fully_visited(&self) -> bool {
        self.visited.iter().all(|v| *v)
    }
}

/// Counts the `n - 1` transitions `(X(k-1), X(k))`, `k = 2..n`, and
/// normalises rows with the convention `0/0 = 0`.
pub fn markov_mle(trace: &Trace, states: &[f64]) -> Result<TransitionEstimate> {
    if trace.len() < 2 {
        return Err(Error::insufficient(
            "transition counting needs at least two observations",
        ));
    }
    if states.is_empty() {
        return Err(Error::parameter("state list is empty"));
    }
    for (i, s) in states.iter().enumerate() {
        if states[..i].contains(s) {
            return Err(Error::parameter(format!("state value {s} listed twice")));
        }
    }
    let index_of = |v: f64| {
        states
            .iter()
            .position(|s| *s == v)
            .ok_or(Error::Domain { value: v })
    };
    let m = states.len();
    let mut counts = vec![vec![0u64; m]; m];
    let mut prev = index_of(trace.values()[0])?;
    for &v in &trace.values()[1..] {
        let next = index_of(v)?;
        counts[prev][next] += 1;
        prev = next;
    }

    let mut pi_hat = SquareMatrix::zeros(m);
    let mut visited = vec![false; m];
    for (i, row) in counts.iter().enumerate() {
        let total: u64 = row.iter().sum();
        if total == 0 {
            continue;
        }
        visited[i] = true;
        for (j, c) in row.iter().enumerate() {
            pi_hat.set(i, j, *c as f64 / total as f64);
        }
    }
    Ok(TransitionEstimate {
        states: states.to_vec(),
        counts,
        pi_hat,
        visited,
    })
}

/// `theta -> log rho(Pi_hat diag(exp(theta f)))`.
///
/// Evaluated as `theta * f_ref + log rho(Pi_hat diag(exp(theta (f - f_ref))))`
/// with `f_ref` the largest value for `theta >= 0` and the smallest otherwise,
/// so the tilted entries never overflow.
#[derive(Debug, Clone)]
pub struct MarkovScgf {
    transition: SquareMatrix,
    values: Vec<f64>,
    max_value: f64,
    min_value: f64,
    drift: f64,
}

impl MarkovScgf {
    pub fn new(est: &TransitionEstimate, values: &[f64]) -> Result<Self> {
        let m = est.pi_hat.dim();
        if values.len() != m {
            return Err(Error::parameter(format!(
                "{} values given for a {m}-state estimate",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| **v == 0.0 || !v.is_finite()) {
            return Err(Error::parameter(format!(
                "state values must be finite and nonzero, got {v}"
            )));
        }
        if !est.fully_visited() {
            let missing: Vec<String> = est
                .visited
                .iter()
                .zip(&est.states)
                .filter(|(v, _)| !**v)
                .map(|(_, s)| s.to_string())
                .collect();
            return Err(Error::insufficient(format!(
                "no transitions observed out of state(s) {}",
                missing.join(", ")
            )));
        }
        if !est.pi_hat.is_irreducible() {
            return Err(Error::insufficient(
                "estimated transition matrix is not irreducible",
            ));
        }
        let stationary = stationary_distribution(&est.pi_hat)?;
        let drift = stationary.iter().zip(values).map(|(p, f)| p * f).sum();
        Ok(Self {
            transition: est.pi_hat.clone(),
            values: values.to_vec(),
            max_value: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min_value: values.iter().copied().fold(f64::INFINITY, f64::min),
            drift,
        })
    }

    pub fn eval(&self, theta: f64) -> f64 {
        // Pi_hat is stochastic, so rho = 1 exactly; rounded row sums would
        // otherwise leave a residue of a few ulps.
        if theta == 0.0 {
            return 0.0;
        }
        let reference = if theta >= 0.0 {
            self.max_value
        } else {
            self.min_value
        };
        let weights: Vec<f64> = self
            .values
            .iter()
            .map(|f| (theta * (f - reference)).exp())
            .collect();
        let (rho, _) = perron_pair(&self.transition.scale_columns(&weights));
        theta * reference + rho.ln()
    }

    /// Stationary mean of the values under `Pi_hat`, the derivative at zero.
    pub fn drift(&self) -> f64 {
        self.drift
    }
}

pub fn markov_scgf(est: &TransitionEstimate, values: &[f64], theta: f64) -> Result<f64> {
    Ok(MarkovScgf::new(est, values)?.eval(theta))
}

pub fn markov_exponent(
    est: &TransitionEstimate,
    values: &[f64],
    opts: &RootOpts,
) -> Result<ExponentEstimate> {
    let scgf = ScgfEvaluator::markov(est, values)?;
    Ok(exponent_from_scgf(&scgf, opts))
}
