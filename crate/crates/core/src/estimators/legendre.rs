use serde::{Deserialize, Serialize};

use super::ScgfEvaluator;
use crate::analytic::{RateCurve, RateCurveKind};
use crate::error::Result;
use crate::numeric::golden_max;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupOpts {
    /// Search range is `[-theta_cap, theta_cap]`.
    pub theta_cap: f64,
    /// Final bracket width of the golden-section search.
    pub tol: f64,
}

impl Default for SupOpts {
    fn default() -> Self {
        Self {
            theta_cap: 1e3,
            tol: 1e-9,
        }
    }
}

/// `sup_theta (theta x - lambda_hat(theta))`, or `+inf` when the maximiser
/// runs into the edge of the search range and the objective is still
/// climbing there.
pub fn legendre_rate(scgf: &ScgfEvaluator, x: f64, opts: &SupOpts) -> f64 {
    let objective = |theta: f64| theta * x - scgf.eval(theta);
    let cap = opts.theta_cap;
    let (arg, peak) = golden_max(objective, -cap, cap, opts.tol);

    let near_edge = 0.99 * cap;
    for edge in [cap, -cap] {
        if arg * edge.signum() >= near_edge {
            let outer = objective(edge);
            let inner = objective(0.5 * edge);
            if outer - inner > 1e-9 * (1.0 + outer.abs()) {
                return f64::INFINITY;
            }
            return peak.max(outer).max(objective(0.0));
        }
    }
    peak.max(objective(0.0))
}

/// Estimated rate function sampled on an increasing grid.
pub fn legendre_curve(scgf: &ScgfEvaluator, x_grid: &[f64], opts: &SupOpts) -> Result<RateCurve> {
    let points = x_grid
        .iter()
        .map(|&x| (x, legendre_rate(scgf, x, opts)))
        .collect();
    let meta = vec![
        ("source".to_owned(), scgf.source().to_owned()),
        ("theta_cap".to_owned(), opts.theta_cap.to_string()),
    ];
    RateCurve::new(RateCurveKind::IHat, meta, points)
}
