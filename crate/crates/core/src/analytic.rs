//! Exact and numerically exact reference quantities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::numeric::{bisect_sign_change, golden_max};
use crate::processes::{validate_dm1, validate_two_state};
use crate::table::Table;

const POWER_MAX_ITER: usize = 100_000;
const POWER_TOL: f64 = 1e-14;

/// Perron root and right Perron vector (max-normalised) of a nonnegative
/// matrix, by power iteration on `M / s + I` where `s` is the largest row
/// sum. The identity shift makes periodic matrices primitive.
///
/// Iteration stops once the Collatz-Wielandt bracket
/// `min_i (Ax)_i / x_i <= rho(A) <= max_i (Ax)_i / x_i` is narrower than
/// `1e-14` relative, or, when some component of the iterate has vanished
/// (reducible support), once successive Rayleigh quotients agree to `1e-14`.
/// No validation: callers guarantee a finite nonnegative input.
pub(crate) fn perron_pair(m: &SquareMatrix) -> (f64, Vec<f64>) {
    let dim = m.dim();
    if dim == 1 {
        return (m.get(0, 0), vec![1.0]);
    }
    let scale = m
        .rows()
        .map(|r| r.iter().sum::<f64>())
        .fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return (0.0, vec![1.0; dim]);
    }
    let mut shifted = m.scaled(1.0 / scale);
    for i in 0..dim {
        shifted.set(i, i, shifted.get(i, i) + 1.0);
    }

    let mut x = vec![1.0; dim];
    let mut y = vec![0.0; dim];
    let mut prev_rayleigh = f64::NAN;
    for _ in 0..POWER_MAX_ITER {
        shifted.mul_vec_into(&x, &mut y);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        let mut degenerate = false;
        for (xi, yi) in x.iter().zip(&y) {
            if *xi > 0.0 {
                let r = yi / xi;
                lo = lo.min(r);
                hi = hi.max(r);
            } else {
                degenerate = true;
            }
        }
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let rayleigh = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / xx;
        let ymax = y.iter().copied().fold(0.0_f64, f64::max);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ymax;
        }
        if !degenerate && hi - lo <= POWER_TOL * hi {
            break;
        }
        if degenerate && (rayleigh - prev_rayleigh).abs() <= POWER_TOL * rayleigh {
            break;
        }
        prev_rayleigh = rayleigh;
    }

    // Read the root off the unshifted matrix to avoid cancelling the shift.
    m.mul_vec_into(&x, &mut y);
    let xx: f64 = x.iter().map(|v| v * v).sum();
    let rho = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / xx;
    (rho.max(0.0), x)
}

fn validate_perron_input(m: &SquareMatrix) -> Result<()> {
    if !m.is_finite() || !m.is_nonnegative() {
        return Err(Error::parameter(
            "spectral radius needs finite nonnegative entries",
        ));
    }
    if !m.is_irreducible() {
        return Err(Error::parameter("matrix is reducible"));
    }
    Ok(())
}

/// Perron root of an irreducible nonnegative matrix.
pub fn spectral_radius(m: &SquareMatrix) -> Result<f64> {
    validate_perron_input(m)?;
    Ok(perron_pair(m).0)
}

/// Stationary law of an irreducible stochastic matrix (left Perron vector,
/// normalised to sum one).
pub fn stationary_distribution(transition: &SquareMatrix) -> Result<Vec<f64>> {
    validate_perron_input(transition)?;
    let (_, mut v) = perron_pair(&transition.transpose());
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= total);
    Ok(v)
}

/// Loynes' exponent of the two-state chain on `{-1, +1}`:
/// `log((1 - alpha) / (1 - beta))`.
pub fn two_state_exponent(alpha: f64, beta: f64) -> Result<f64> {
    validate_two_state(alpha, beta)?;
    Ok((-alpha).ln_1p() - (-beta).ln_1p())
}

fn xlogy_ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (x / y).ln()
    }
}

/// Rate function of the two-state transition-matrix MLE at the matrix
/// `[[1-a, a], [b, 1-b]]`: the stationary-weighted relative entropy of its
/// rows against those of the true matrix. `+inf` unless `a, b` lie in `(0, 1)`.
pub fn two_state_h(alpha: f64, beta: f64, a: f64, b: f64) -> f64 {
    debug_assert!(validate_two_state(alpha, beta).is_ok());
    if !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
        return f64::INFINITY;
    }
    let w_minus = b / (a + b);
    let w_plus = a / (a + b);
    let row_minus = xlogy_ratio(1.0 - a, 1.0 - alpha) + xlogy_ratio(a, alpha);
    let row_plus = xlogy_ratio(b, beta) + xlogy_ratio(1.0 - b, 1.0 - beta);
    (w_minus * row_minus + w_plus * row_plus).max(0.0)
}

const J_SCAN_POINTS: usize = 512;
const J_REFINE_WIDTH: f64 = 1e-12;
const J_EDGE: f64 = 1e-12;

/// Rate function of the two-state exponent estimates,
/// `J(x) = inf_a H(a, 1 - (1 - a) e^{-x})` over the `a` for which both
/// transition probabilities lie in `(0, 1)`.
///
/// The objective need not be unimodal, so the feasible interval is scanned
/// on a grid that is log-spaced towards both ends and the best cell is then
/// refined by golden section.
pub fn two_state_j(alpha: f64, beta: f64, x: f64) -> f64 {
    debug_assert!(validate_two_state(alpha, beta).is_ok());
    if x.is_nan() {
        return f64::NAN;
    }
    let decay = (-x).exp();
    let lo = if x < 0.0 { -x.exp_m1() } else { 0.0 };
    let hi = 1.0;
    if !(lo < hi) || !decay.is_finite() {
        return f64::INFINITY;
    }
    let width = hi - lo;
    let objective = |t: f64| {
        let a = lo + width * t;
        let b = 1.0 - (1.0 - a) * decay;
        two_state_h(alpha, beta, a, b)
    };

    let grid = edge_refined_grid(J_SCAN_POINTS);
    let values: Vec<f64> = grid.iter().map(|&t| objective(t)).collect();
    let (best, &best_value) = values
        .iter()
        .enumerate()
        .min_by(|p, q| p.1.total_cmp(q.1))
        .expect("non-empty grid");
    if !best_value.is_finite() {
        return f64::INFINITY;
    }
    let left = if best == 0 { 0.0 } else { grid[best - 1] };
    let right = if best + 1 == grid.len() {
        1.0
    } else {
        grid[best + 1]
    };
    let (_, refined) = golden_max(|t| -objective(t), left, right, J_REFINE_WIDTH / width);
    best_value.min(-refined).max(0.0)
}

/// Points in `(0, 1)`, half log-spaced from `J_EDGE` up to `1/2` and the
/// other half mirrored towards 1.
fn edge_refined_grid(points: usize) -> Vec<f64> {
    let half = points / 2;
    let (log_lo, log_hi) = (J_EDGE.log10(), 0.5f64.log10());
    let lower: Vec<f64> = (0..half)
        .map(|k| 10f64.powf(log_lo + (log_hi - log_lo) * k as f64 / (half - 1) as f64))
        .collect();
    let mut grid = lower.clone();
    grid.extend(lower.iter().rev().skip(1).map(|t| 1.0 - t));
    grid
}

/// D/M/1 Loynes' exponent: the root in `(0, alpha)` of
/// `log(alpha / (alpha - theta)) = theta / beta`.
///
/// Solved in `s = -log(1 - theta/alpha)`, where the equation reads
/// `h(s) = s + (alpha/beta) * expm1(-s) = 0`; `h` is convex with `h(0) = 0`
/// and `h'(0) < 0`, so bisection on `[0, alpha/beta + 1]` followed by one
/// Newton step pins the positive root without approaching the pole at
/// `theta = alpha`.
pub fn dm1_exponent(alpha: f64, beta: f64) -> Result<f64> {
    validate_dm1(alpha, beta)?;
    let ratio = alpha / beta;
    let h = |s: f64| s + ratio * (-s).exp_m1();
    let (lo, hi) = bisect_sign_change(h, 0.0, ratio + 1.0, 2000);
    let mut s = if lo > 0.0 { lo } else { hi };
    let slope = 1.0 - ratio * (-s).exp();
    if slope > 0.0 {
        let polished = s - h(s) / slope;
        if polished > 0.0 && h(polished).abs() <= h(s).abs() {
            s = polished;
        }
    }
    Ok(-alpha * (-s).exp_m1())
}

/// Residual of the D/M/1 exponent equation at `theta`.
pub fn dm1_residual(alpha: f64, beta: f64, theta: f64) -> f64 {
    -(-theta / alpha).ln_1p() - theta / beta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateCurveKind {
    /// Two-state `J(x)`.
    JTwoState,
    /// Legendre transform of an estimated sCGF.
    IHat,
    /// Monte Carlo exceedance rates.
    McLdp,
}

impl RateCurveKind {
    fn value_column(self) -> &'static str {
        match self {
            RateCurveKind::JTwoState => "J",
            RateCurveKind::IHat => "I_hat",
            RateCurveKind::McLdp => "rate",
        }
    }
}

/// Sampled rate function `x -> value`, values in `[0, +inf]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    kind: RateCurveKind,
    meta: Vec<(String, String)>,
    points: Vec<(f64, f64)>,
}

impl RateCurve {
    pub fn new(
        kind: RateCurveKind,
        meta: Vec<(String, String)>,
        points: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::parameter(
                "rate curve abscissae must be strictly increasing",
            ));
        }
        if let Some((x, v)) = points.iter().find(|(_, v)| !(*v >= 0.0)) {
            return Err(Error::parameter(format!(
                "rate value {v} at x={x} is not in [0, inf]"
            )));
        }
        Ok(Self { kind, meta, points })
    }

    pub fn kind(&self) -> RateCurveKind {
        self.kind
    }

    pub fn meta(&self) -> &[(String, String)] {
        &self.meta
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["x", self.kind.value_column()]);
        for (k, v) in &self.meta {
            t.meta(k, v);
        }
        for &(x, v) in &self.points {
            t.push_row(vec![x.into(), v.into()]);
        }
        t
    }
}
