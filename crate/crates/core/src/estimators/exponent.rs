use std::fmt;

use serde::{Deserialize, Serialize};

use super::ScgfEvaluator;
use crate::numeric::bisect_sign_change;

/// Controls for the read-out `sup{theta >= 0 : lambda_hat(theta) <= 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootOpts {
    /// Target bound on `|lambda_hat(root)|`.
    pub tol: f64,
    /// Largest theta probed before declaring the exponent infinite.
    pub theta_cap: f64,
    pub max_iter: usize,
    /// Probe point for a positive sCGF immediately right of zero.
    pub zero_probe: f64,
}

impl Default for RootOpts {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            theta_cap: 1e6,
            max_iter: 200,
            zero_probe: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentStatus {
    /// Bracketed positive root.
    Root,
    /// `lambda_hat > 0` right of the origin, so the supremum is 0.
    Zero,
    /// `lambda_hat <= 0` on the whole search range.
    Infinite,
}

impl ExponentStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ExponentStatus::Root => "root",
            ExponentStatus::Zero => "zero",
            ExponentStatus::Infinite => "infinite",
        }
    }
}

impl fmt::Display for ExponentStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    /// In `[0, +inf]`.
    pub value: f64,
    pub status: ExponentStatus,
    /// `|lambda_hat(value)|`; absent when the value is infinite.
    pub residual: Option<f64>,
}

impl ExponentEstimate {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            status: ExponentStatus::Zero,
            residual: Some(0.0),
        }
    }

    pub fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            status: ExponentStatus::Infinite,
            residual: None,
        }
    }
}

/// `sup{theta : lambda_hat(theta) <= 0}` for a convex estimate with
/// `lambda_hat(0) = 0`.
///
/// 1. Double `theta_hi` from 1 up to `theta_cap` looking for
///    `lambda_hat > 0`; none found means the exponent is infinite.
/// 2. A nonnegative slope at the origin, or a positive value at
///    `zero_probe`, means the sublevel set is `{0}`.
/// 3. Otherwise bisect `[0, theta_hi]` down to floating-point resolution.
pub fn exponent_from_scgf(scgf: &ScgfEvaluator, opts: &RootOpts) -> ExponentEstimate {
    let mut hi = 1.0_f64.min(opts.theta_cap);
    let found = loop {
        if scgf.eval(hi) > 0.0 {
            break true;
        }
        if hi >= opts.theta_cap {
            break false;
        }
        hi = (2.0 * hi).min(opts.theta_cap);
    };
    if !found {
        return ExponentEstimate::infinite();
    }
    if scgf.slope_at_zero() >= 0.0 || scgf.eval(opts.zero_probe) > 0.0 {
        return ExponentEstimate::zero();
    }

    let (lo, hi) = bisect_sign_change(|t| scgf.eval(t), 0.0, hi, opts.max_iter);
    let (f_lo, f_hi) = (scgf.eval(lo).abs(), scgf.eval(hi).abs());
    let (value, residual) = if f_lo <= f_hi { (lo, f_lo) } else { (hi, f_hi) };
    ExponentEstimate {
        value,
        status: ExponentStatus::Root,
        residual: Some(residual),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindley::BlockedTrace;
    use proptest::prelude::*;

    fn block_eval(y: &[f64]) -> ScgfEvaluator {
        ScgfEvaluator::block(BlockedTrace::from_blocks(y.to_vec(), 1).unwrap())
    }

    /// Positive root of `u^3 - 2u^2 + 1 = (u - 1)(u^2 - u - 1)`, `u = e^theta`,
    /// found by bisection on the cubic itself.
    fn cubic_oracle() -> f64 {
        let p = |u: f64| u * u * u - 2.0 * u * u + 1.0;
        let (mut lo, mut hi) = (1.2, 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo.ln()
    }

    #[test]
    fn golden_ratio_root() {
        let est = exponent_from_scgf(&block_eval(&[-2.0, 1.0]), &RootOpts::default());
        assert_eq!(est.status, ExponentStatus::Root);
        assert!((est.value - cubic_oracle()).abs() < 1e-12);
        // mpmath: log((1 + sqrt 5)/2) = 0.48121182505960344750
        assert!((est.value - 0.481_211_825_059_603_45).abs() < 1e-12);
        assert!(est.residual.unwrap() <= 1e-10);
    }

    #[test]
    fn all_zero_blocks_are_infinite() {
        let est = exponent_from_scgf(&block_eval(&[0.0, 0.0, 0.0]), &RootOpts::default());
        assert_eq!(est.status, ExponentStatus::Infinite);
        assert_eq!(est.value, f64::INFINITY);
        assert_eq!(est.residual, None);
    }

    #[test]
    fn all_negative_blocks_are_infinite() {
        let est = exponent_from_scgf(&block_eval(&[-1.0, -0.5]), &RootOpts::default());
        assert_eq!(est.status, ExponentStatus::Infinite);
    }

    #[test]
    fn symmetric_blocks_give_zero() {
        let est = exponent_from_scgf(&block_eval(&[-1.0, 1.0]), &RootOpts::default());
        assert_eq!(est, ExponentEstimate::zero());
    }

    #[test]
    fn positive_mean_gives_zero() {
        let est = exponent_from_scgf(&block_eval(&[-1.0, 2.0, 0.5]), &RootOpts::default());
        assert_eq!(est.status, ExponentStatus::Zero);
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn small_cap_reports_infinite() {
        // root is ~0.48 but the cap stops the search before any positive value
        let opts = RootOpts {
            theta_cap: 0.25,
            ..RootOpts::default()
        };
        let est = exponent_from_scgf(&block_eval(&[-2.0, 1.0]), &opts);
        assert_eq!(est.status, ExponentStatus::Infinite);
    }

    proptest! {
        #[test]
        fn root_is_sign_certified(
            y in proptest::collection::vec(-5.0f64..3.0, 2..30),
        ) {
            let opts = RootOpts::default();
            let scgf = block_eval(&y);
            let est = exponent_from_scgf(&scgf, &opts);
            if est.status == ExponentStatus::Root {
                let delta = 10.0 * opts.tol;
                prop_assert!(est.residual.unwrap() <= opts.tol);
                prop_assert!(scgf.eval(est.value - delta) < 0.0);
                prop_assert!(scgf.eval(est.value + delta) > 0.0);
            }
        }

        #[test]
        fn scale_covariance(
            y in proptest::collection::vec(-5.0f64..3.0, 2..30),
            k in -3i32..4,
        ) {
            // powers of two keep the scaling exact in floating point
            let c = 2f64.powi(k);
            let scaled: Vec<f64> = y.iter().map(|v| v * c).collect();
            let a = exponent_from_scgf(&block_eval(&y), &RootOpts::default());
            let b = exponent_from_scgf(&block_eval(&scaled), &RootOpts::default());
            prop_assert_eq!(a.status, b.status);
            if a.status == ExponentStatus::Root {
                prop_assert!((b.value - a.value / c).abs() <= 1e-12 * (1.0 + a.value / c));
            }
        }
    }
}
