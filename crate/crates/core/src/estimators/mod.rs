//! Estimators of the sCGF and of Loynes' exponent from an observed trace.
//!
//! Two sCGF estimators share one interface, [`ScgfEvaluator`]:
//!
//! * block: `lambda_hat(theta) = (1/B) log( (1/K) sum_i exp(theta Y(i)) )`
//!   over the `K = floor(n/B)` block sums of the trace;
//! * Markov: `lambda_hat(theta) = log rho(Pi_hat D_theta)` with `Pi_hat` the
//!   transition-count MLE and `D_theta = diag(exp(theta f(i)))`.
//!
//! The exponent estimate is `sup{theta : lambda_hat(theta) <= 0}`
//! ([`exponent_from_scgf`]); the rate-function estimate is its Legendre
//! transform ([`legendre_rate`]). [`extremal_exponent`] is the direct
//! estimator `log(n) / max(1, W(1), ..., W(n))`.

mod block;
mod exponent;
mod legendre;
mod markov;

pub use block::block_scgf;
pub use exponent::{exponent_from_scgf, ExponentEstimate, ExponentStatus, RootOpts};
pub use legendre::{legendre_curve, legendre_rate, SupOpts};
pub use markov::{markov_exponent, markov_mle, markov_scgf, MarkovScgf, TransitionEstimate};

use crate::error::{Error, Result};
use crate::lindley::BlockedTrace;
use crate::processes::{Trace, TraceKind};
use crate::table::Table;

/// An estimated sCGF `theta -> lambda_hat(n, theta)`.
#[derive(Debug, Clone)]
pub enum ScgfEvaluator {
    Block(BlockedTrace),
    Markov(MarkovScgf),
}

impl ScgfEvaluator {
    pub fn block(blocked: BlockedTrace) -> Self {
        ScgfEvaluator::Block(blocked)
    }

    /// Fails with insufficient data if some state was never left or the
    /// estimated transition graph is not strongly connected.
    pub fn markov(est: &TransitionEstimate, values: &[f64]) -> Result<Self> {
        MarkovScgf::new(est, values).map(ScgfEvaluator::Markov)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            ScgfEvaluator::Block(b) => block_scgf(b, theta),
            ScgfEvaluator::Markov(m) => m.eval(theta),
        }
    }

    /// Right derivative at zero: the empirical mean growth rate of the
    /// partial sums.
    pub fn slope_at_zero(&self) -> f64 {
        match self {
            ScgfEvaluator::Block(b) => {
                b.blocks().iter().sum::<f64>() / (b.len() as f64 * b.block_size() as f64)
            }
            ScgfEvaluator::Markov(m) => m.drift(),
        }
    }

    pub fn source(&self) -> &'static str {
        match self {
            ScgfEvaluator::Block(_) => "block",
            ScgfEvaluator::Markov(_) => "markov",
        }
    }

    /// `theta,lambda_hat` table over `points` equally spaced values in
    /// `[start, stop]`.
    pub fn curve_table(&self, start: f64, stop: f64, points: usize) -> Table {
        let mut t = Table::new(["theta", "lambda_hat"]);
        t.meta("source", self.source());
        for theta in linspace(start, stop, points) {
            t.push_row(vec![theta.into(), self.eval(theta).into()]);
        }
        t
    }
}

pub(crate) fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|k| start + (stop - start) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// `log(n) / max(1, W(1), ..., W(n))`.
pub fn extremal_exponent(waits: &Trace) -> Result<f64> {
    if waits.kind() != TraceKind::Waits {
        return Err(Error::parameter(
            "extremal estimator needs a waiting-time trace",
        ));
    }
    let n = waits.len();
    if n < 2 {
        return Err(Error::insufficient(
            "extremal estimator needs at least two waiting times",
        ));
    }
    let peak = waits.values().iter().copied().fold(1.0_f64, f64::max);
    Ok((n as f64).ln() / peak)
}
