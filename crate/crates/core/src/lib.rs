//! Estimation of Loynes' exponent, the decay rate of the stationary
//! waiting-time tail `P(W > w) ~ exp(-theta* w)` for Lindley's recursion.
//!
//! The crate is organised bottom-up:
//!
//! * [`processes`] generates increment traces (two-state and finite Markov
//!   chains, D/M/1 increments) and reads/writes them as CSV.
//! * [`lindley`] holds the deterministic transforms: the Lindley recursion,
//!   partial sums and non-overlapping block sums.
//! * [`estimators`] implements the block and Markov sCGF estimators, the
//!   exponent read-out `sup{theta : lambda_hat(theta) <= 0}`, the extremal
//!   estimator and the Legendre transform of an estimated sCGF.
//! * [`analytic`] computes exact reference quantities: Perron roots, the
//!   two-state exponent and rate functions, the D/M/1 exponent.
//! * [`experiments`] runs the convergence and Monte Carlo large-deviation
//!   harnesses.
//! * [`table`] formats results as CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod lindley;
pub mod matrix;
pub(crate) mod numeric;
pub mod processes;
pub mod table;

pub use analytic::{
    dm1_exponent, spectral_radius, two_state_exponent, two_state_h, two_state_j, RateCurve,
    RateCurveKind,
};
pub use error::{Error, Result};
pub use estimators::{
    block_scgf, exponent_from_scgf, extremal_exponent, legendre_rate, markov_exponent, markov_mle,
    markov_scgf, ExponentEstimate, ExponentStatus, RootOpts, ScgfEvaluator, SupOpts,
    TransitionEstimate,
};
pub use experiments::{
    rate_curve_two_state, run_convergence, run_mc_ldp, ConvergenceConfig, ConvergencePoint,
    EstimatorKind, McLdpConfig, McLdpResult, PointEstimate,
};
pub use lindley::{block_sums, lindley_recursion, partial_sums, BlockedTrace};
pub use matrix::SquareMatrix;
pub use processes::{
    load_trace, sample_dm1, sample_finite_markov, sample_two_state, save_trace, Dm1Spec,
    FiniteMarkovSpec, Origin, ProcessSpec, Trace, TraceKind, TwoStateSpec,
};
