//! Monte Carlo harnesses: a single-realisation convergence run, the
//! replicated exceedance-rate experiment, and the two-state rate curve.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{dm1_exponent, two_state_exponent, two_state_j, RateCurve, RateCurveKind};
use crate::error::{Error, Result};
use crate::estimators::{
    exponent_from_scgf, extremal_exponent, markov_mle, ExponentEstimate, ExponentStatus, RootOpts,
    ScgfEvaluator,
};
use crate::lindley::{block_sums, lindley_recursion};
use crate::processes::{validate_two_state, ProcessSpec, Trace};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "estimator", rename_all = "lowercase")]
pub enum EstimatorKind {
    Block { block_size: usize },
    Markov,
    Extremal,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Block { .. } => "block",
            EstimatorKind::Markov => "markov",
            EstimatorKind::Extremal => "extremal",
        }
    }

    fn check_against(&self, process: &ProcessSpec) -> Result<()> {
        match self {
            EstimatorKind::Block { block_size: 0 } => {
                Err(Error::Config("block size must be at least 1".into()))
            }
            EstimatorKind::Markov => match process.state_values() {
                None => Err(Error::Config(
                    "the Markov estimator needs a finite-state process".into(),
                )),
                Some(values) => {
                    for (i, v) in values.iter().enumerate() {
                        if values[..i].contains(v) {
                            return Err(Error::Config(format!(
                                "state value {v} repeats, states are not identifiable from values"
                            )));
                        }
                    }
                    Ok(())
                }
            },
            _ => Ok(()),
        }
    }
}

/// Outcome of one estimator evaluation on a prefix.
#[derive(Debug, Clone, PartialEq)]
pub enum PointEstimate {
    Exponent(ExponentEstimate),
    /// Direct (non-root) estimate, as produced by the extremal estimator.
    Direct(f64),
    /// The estimator could not be formed from this much data.
    Undefined(String),
}

impl PointEstimate {
    pub fn value(&self) -> f64 {
        match self {
            PointEstimate::Exponent(e) => e.value,
            PointEstimate::Direct(v) => *v,
            PointEstimate::Undefined(_) => f64::NAN,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            PointEstimate::Exponent(e) => e.status.as_str(),
            PointEstimate::Direct(_) => "direct",
            PointEstimate::Undefined(_) => "undefined",
        }
    }

    pub fn exponent_status(&self) -> Option<ExponentStatus> {
        match self {
            PointEstimate::Exponent(e) => Some(e.status),
            _ => None,
        }
    }

    /// `estimate - reference > x`; an infinite estimate always exceeds, an
    /// undefined one never does.
    fn exceeds(&self, reference: f64, x: f64) -> bool {
        match self {
            PointEstimate::Undefined(_) => false,
            other => other.value() - reference > x,
        }
    }
}

/// A trace plus whatever derived series the estimator needs, so that each
/// prefix evaluation reads only the first `k` entries.
struct Prepared<'a> {
    trace: &'a Trace,
    waits: Option<Trace>,
    states: Option<Vec<f64>>,
}

impl<'a> Prepared<'a> {
    fn new(trace: &'a Trace, estimator: EstimatorKind, states: Option<Vec<f64>>) -> Result<Self> {
        let waits = match estimator {
            EstimatorKind::Extremal => Some(lindley_recursion(trace, 0.0)?),
            _ => None,
        };
        Ok(Self {
            trace,
            waits,
            states,
        })
    }

    fn estimate(
        &self,
        k: usize,
        estimator: EstimatorKind,
        opts: &RootOpts,
    ) -> Result<PointEstimate> {
        let undefined = |e: Error| match e {
            Error::InsufficientData(msg) => Ok(PointEstimate::Undefined(msg)),
            other => Err(other),
        };
        match estimator {
            EstimatorKind::Block { block_size } => {
                match block_sums(&self.trace.prefix(k)?, block_size) {
                    Ok(blocked) => Ok(PointEstimate::Exponent(exponent_from_scgf(
                        &ScgfEvaluator::block(blocked),
                        opts,
                    ))),
                    Err(e) => undefined(e),
                }
            }
            EstimatorKind::Markov => {
                let states = self.states.as_deref().expect("validated");
                let scgf = markov_mle(&self.trace.prefix(k)?, states)
                    .and_then(|est| ScgfEvaluator::markov(&est, states));
                match scgf {
                    Ok(s) => Ok(PointEstimate::Exponent(exponent_from_scgf(&s, opts))),
                    Err(e) => undefined(e),
                }
            }
            EstimatorKind::Extremal => {
                let waits = self.waits.as_ref().expect("prepared");
                match extremal_exponent(&waits.prefix(k)?) {
                    Ok(v) => Ok(PointEstimate::Direct(v)),
                    Err(e) => undefined(e),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    pub process: ProcessSpec,
    pub estimator: EstimatorKind,
    pub n_max: usize,
    pub checkpoints: Vec<usize>,
    pub seed: u64,
    #[serde(default)]
    pub root: RootOpts,
}

impl ConvergenceConfig {
    pub fn validate(&self) -> Result<()> {
        self.estimator.check_against(&self.process)?;
        if self.checkpoints.is_empty() {
            return Err(Error::Config("at least one checkpoint is required".into()));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "checkpoints must be strictly increasing".into(),
            ));
        }
        let (first, last) = (self.checkpoints[0], *self.checkpoints.last().unwrap());
        if first == 0 || last > self.n_max {
            return Err(Error::Config(format!(
                "checkpoints must lie in 1..={}",
                self.n_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePoint {
    pub n: usize,
    pub estimate: PointEstimate,
}

/// One realisation of length `n_max`; the estimator is recomputed on each
/// checkpoint prefix.
pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<Vec<ConvergencePoint>> {
    cfg.validate()?;
    let trace = cfg.process.with_run(cfg.n_max, cfg.seed).sample()?;
    convergence_on_trace(
        &trace,
        cfg.estimator,
        &cfg.checkpoints,
        cfg.process.state_values(),
        &cfg.root,
    )
}

/// Convergence run over an existing trace.
pub fn convergence_on_trace(
    trace: &Trace,
    estimator: EstimatorKind,
    checkpoints: &[usize],
    states: Option<Vec<f64>>,
    opts: &RootOpts,
) -> Result<Vec<ConvergencePoint>> {
    let prepared = Prepared::new(trace, estimator, states)?;
    checkpoints
        .iter()
        .map(|&n| {
            Ok(ConvergencePoint {
                n,
                estimate: prepared.estimate(n, estimator, opts)?,
            })
        })
        .collect()
}

pub fn convergence_table(cfg: &ConvergenceConfig, points: &[ConvergencePoint]) -> Table {
    let mut t = Table::new(["n", "estimate", "status"]);
    describe_process(&mut t, &cfg.process);
    t.meta("estimator", describe_estimator(cfg.estimator));
    t.meta("seed", cfg.seed);
    t.meta("n_max", cfg.n_max);
    if let Some(reference) = reference_exponent(&cfg.process) {
        t.meta("theta_star_ref", crate::table::format_real(reference));
    }
    for p in points {
        t.push_row(vec![
            p.n.into(),
            p.estimate.value().into(),
            p.estimate.status().into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McLdpConfig {
    pub process: ProcessSpec,
    pub estimator: EstimatorKind,
    pub replicas: usize,
    pub n_list: Vec<usize>,
    pub x_list: Vec<f64>,
    pub base_seed: u64,
    /// Required when the process has no closed-form exponent.
    #[serde(default)]
    pub theta_star_ref: Option<f64>,
    /// Worker threads; `None` uses the global rayon pool. Never affects results.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub root: RootOpts,
}

impl McLdpConfig {
    pub fn validate(&self) -> Result<()> {
        self.estimator.check_against(&self.process)?;
        if self.replicas == 0 {
            return Err(Error::Config("at least one replica is required".into()));
        }
        if self.n_list.is_empty() || self.n_list[0] == 0 {
            return Err(Error::Config(
                "n list must be non-empty and positive".into(),
            ));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n list must be strictly increasing".into()));
        }
        if self.x_list.is_empty() || !(self.x_list[0] > 0.0) {
            return Err(Error::Config(
                "x list must be non-empty and positive".into(),
            ));
        }
        if self.x_list.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("x list must be strictly increasing".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        self.reference()?;
        Ok(())
    }

    fn reference(&self) -> Result<f64> {
        match self
            .theta_star_ref
            .or_else(|| reference_exponent(&self.process))
        {
            Some(r) if r.is_finite() => Ok(r),
            Some(r) => Err(Error::Config(format!(
                "reference exponent {r} is not finite"
            ))),
            None => Err(Error::Config(
                "no closed-form exponent for this process; supply theta_star_ref".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McLdpRow {
    pub n: usize,
    pub x: f64,
    pub count: u64,
    /// `-(1/n) log(count / m)`, `+inf` when nothing exceeded.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McLdpResult {
    pub rows: Vec<McLdpRow>,
    pub theta_star_ref: f64,
    pub replicas: usize,
    pub base_seed: u64,
    /// Replicas per `n` whose estimator could not be formed.
    pub undefined: Vec<(usize, u64)>,
}

impl McLdpResult {
    pub fn row(&self, n: usize, x: f64) -> Option<&McLdpRow> {
        self.rows.iter().find(|r| r.n == n && r.x == x)
    }

    pub fn to_table(&self, cfg: &McLdpConfig) -> Table {
        let mut t = Table::new(["n", "x", "count", "m", "rate"]);
        describe_process(&mut t, &cfg.process);
        t.meta("estimator", describe_estimator(cfg.estimator));
        t.meta(
            "theta_star_ref",
            crate::table::format_real(self.theta_star_ref),
        );
        t.meta("base_seed", self.base_seed);
        t.meta(
            "seeds",
            format!(
                "{}..={}",
                self.base_seed,
                self.base_seed.wrapping_add(self.replicas as u64 - 1)
            ),
        );
        let undefined: Vec<String> = self
            .undefined
            .iter()
            .map(|(n, c)| format!("{n}:{c}"))
            .collect();
        t.meta("undefined", undefined.join(";"));
        for r in &self.rows {
            t.push_row(vec![
                r.n.into(),
                r.x.into(),
                r.count.into(),
                self.replicas.into(),
                r.rate.into(),
            ]);
        }
        t
    }
}

/// Closed-form Loynes' exponent of the process, where one exists.
pub fn reference_exponent(process: &ProcessSpec) -> Option<f64> {
    match process {
        ProcessSpec::TwoState(s) => two_state_exponent(s.alpha, s.beta).ok(),
        ProcessSpec::Dm1(s) => dm1_exponent(s.alpha, s.beta).ok(),
        ProcessSpec::FiniteMarkov(_) => None,
    }
}

/// Replica `r` samples `max(n_list)` values with seed `base_seed + r` and
/// evaluates the estimator on each prefix `n` in `n_list`. Counts are merged
/// by integer addition, so the result does not depend on scheduling.
pub fn run_mc_ldp(cfg: &McLdpConfig) -> Result<McLdpResult> {
    cfg.validate()?;
    let reference = cfg.reference()?;
    let n_max = *cfg.n_list.last().expect("validated");
    let states = cfg.process.state_values();
    let (nn, nx) = (cfg.n_list.len(), cfg.x_list.len());

    let replica = |r: usize| -> Result<Vec<u64>> {
        let seed = cfg.base_seed.wrapping_add(r as u64);
        let trace = cfg.process.with_run(n_max, seed).sample()?;
        let prepared = Prepared::new(&trace, cfg.estimator, states.clone())?;
        // layout: nn*nx exceedance flags, then nn undefined flags
        let mut tally = vec![0u64; nn * nx + nn];
        for (i, &n) in cfg.n_list.iter().enumerate() {
            let est = prepared.estimate(n, cfg.estimator, &cfg.root)?;
            if matches!(est, PointEstimate::Undefined(_)) {
                tally[nn * nx + i] = 1;
            }
            for (j, &x) in cfg.x_list.iter().enumerate() {
                tally[i * nx + j] = u64::from(est.exceeds(reference, x));
            }
        }
        Ok(tally)
    };
    let merge = |mut a: Vec<u64>, b: Vec<u64>| -> Result<Vec<u64>> {
        a.iter_mut().zip(&b).for_each(|(p, q)| *p += q);
        Ok(a)
    };
    let run = || {
        (0..cfg.replicas)
            .into_par_iter()
            .map(replica)
            .try_reduce(|| vec![0u64; nn * nx + nn], merge)
    };
    let totals = match cfg.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let m = cfg.replicas as f64;
    let mut rows = Vec::with_capacity(nn * nx);
    for (i, &n) in cfg.n_list.iter().enumerate() {
        for (j, &x) in cfg.x_list.iter().enumerate() {
            let count = totals[i * nx + j];
            rows.push(McLdpRow {
                n,
                x,
                count,
                rate: empirical_rate(count, m, n),
            });
        }
    }
    let undefined = cfg
        .n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, totals[nn * nx + i]))
        .collect();
    Ok(McLdpResult {
        rows,
        theta_star_ref: reference,
        replicas: cfg.replicas,
        base_seed: cfg.base_seed,
        undefined,
    })
}

/// `-(1/n) log(count / m)` written as `(log m - log count) / n`, which is
/// exactly zero when every replica exceeds.
pub fn empirical_rate(count: u64, replicas: f64, n: usize) -> f64 {
    if count == 0 {
        f64::INFINITY
    } else {
        (replicas.ln() - (count as f64).ln()) / n as f64
    }
}

/// `J(x)` of the two-state Markov exponent estimates on a grid.
pub fn rate_curve_two_state(alpha: f64, beta: f64, x_grid: &[f64]) -> Result<RateCurve> {
    validate_two_state(alpha, beta)?;
    if x_grid.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::parameter("rate-curve grid must be positive"));
    }
    let points = x_grid
        .iter()
        .map(|&x| (x, two_state_j(alpha, beta, x)))
        .collect();
    let meta = vec![
        ("alpha".to_owned(), alpha.to_string()),
        ("beta".to_owned(), beta.to_string()),
        (
            "theta_star".to_owned(),
            crate::table::format_real(two_state_exponent(alpha, beta)?),
        ),
    ];
    RateCurve::new(RateCurveKind::JTwoState, meta, points)
}

fn describe_process(t: &mut Table, process: &ProcessSpec) {
    match process {
        ProcessSpec::TwoState(s) => {
            t.meta("process", "two-state");
            t.meta("alpha", s.alpha);
            t.meta("beta", s.beta);
            t.meta("warmup", s.warmup);
        }
        ProcessSpec::FiniteMarkov(s) => {
            t.meta("process", "finite-markov");
            let rows: Vec<String> = s
                .transition
                .rows()
                .map(|r| r.iter().map(f64::to_string).collect::<Vec<_>>().join(" "))
                .collect();
            t.meta("transition", rows.join(";"));
            let values: Vec<String> = s.values.iter().map(f64::to_string).collect();
            t.meta("values", values.join(" "));
            if let Some(init) = s.init {
                t.meta("init", init);
            }
            t.meta("warmup", s.warmup);
        }
        ProcessSpec::Dm1(s) => {
            t.meta("process", "dm1");
            t.meta("alpha", s.alpha);
            t.meta("beta", s.beta);
            t.meta("warmup", s.warmup);
        }
    }
}

fn describe_estimator(e: EstimatorKind) -> String {
    match e {
        EstimatorKind::Block { block_size } => format!("block(B={block_size})"),
        other => other.name().to_owned(),
    }
}
