//! Increment processes and trace I/O.
//!
//! Every sampler is a pure function of its spec: the generator is ChaCha8
//! seeded with `seed_from_u64(spec.seed)`, uniforms come from
//! `Rng::random::<f64>()`, and a Markov run first draws (or takes) the
//! initial state `X(0)`, which is not emitted. The emitted trace is
//! `f(X(1)), ..., f(X(n))`. A non-zero `warmup` discards that many steps
//! before the first emitted value.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::stationary_distribution;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::table::format_real;

const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Increments,
    Waits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Process(ProcessSpec),
    External(PathBuf),
}

/// A finite observed sequence of increments `X(1..n)` or waits `W(1..n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    values: Vec<f64>,
    kind: TraceKind,
    origin: Origin,
    seed: Option<u64>,
}

impl Trace {
    pub fn new(values: Vec<f64>, kind: TraceKind, origin: Origin) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::insufficient("a trace needs at least one value"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::parameter(format!("trace value {v} is not finite")));
        }
        if kind == TraceKind::Waits {
            if let Some(v) = values.iter().find(|v| **v < 0.0) {
                return Err(Error::parameter(format!("waiting time {v} is negative")));
            }
        }
        let seed = match &origin {
            Origin::Process(spec) => Some(spec.seed()),
            Origin::External(_) => None,
        };
        Ok(Self {
            values,
            kind,
            origin,
            seed,
        })
    }

    pub fn increments(values: Vec<f64>) -> Result<Self> {
        Self::new(
            values,
            TraceKind::Increments,
            Origin::External(PathBuf::new()),
        )
    }

    pub fn waits(values: Vec<f64>) -> Result<Self> {
        Self::new(values, TraceKind::Waits, Origin::External(PathBuf::new()))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kind(&self) -> TraceKind {
        self.kind
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    /// Seed that produced the trace, or the one recorded in its CSV header.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// The first `n` values as a new trace with the same provenance.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::insufficient(format!(
                "prefix of length {n} requested from a trace of length {}",
                self.len()
            )));
        }
        Ok(Self {
            values: self.values[..n].to_vec(),
            kind: self.kind,
            origin: self.origin.clone(),
            seed: self.seed,
        })
    }

    /// Same provenance, different values and kind. Used by the deterministic
    /// transforms in [`crate::lindley`].
    pub(crate) fn derived(&self, values: Vec<f64>, kind: TraceKind) -> Self {
        Self {
            values,
            kind,
            origin: self.origin.clone(),
            seed: self.seed,
        }
    }
}

/// Two-state chain on `{-1, +1}`; `alpha = P(-1 -> +1)`, `beta = P(+1 -> -1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStateSpec {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub warmup: usize,
}

impl TwoStateSpec {
    pub fn new(alpha: f64, beta: f64, n: usize, seed: u64) -> Self {
        Self {
            alpha,
            beta,
            n,
            seed,
            warmup: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_two_state(self.alpha, self.beta)?;
        validate_length(self.n)
    }

    pub fn transition_matrix(&self) -> SquareMatrix {
        two_state_matrix(self.alpha, self.beta)
    }

    pub fn as_finite_markov(&self) -> FiniteMarkovSpec {
        FiniteMarkovSpec {
            transition: self.transition_matrix(),
            values: vec![-1.0, 1.0],
            init: None,
            n: self.n,
            seed: self.seed,
            warmup: self.warmup,
        }
    }
}

/// Irreducible finite chain emitting `values[state]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMarkovSpec {
    pub transition: SquareMatrix,
    pub values: Vec<f64>,
    /// Initial state `X(0)`; drawn from the stationary law when absent.
    pub init: Option<usize>,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub warmup: usize,
}

impl FiniteMarkovSpec {
    pub fn validate(&self) -> Result<()> {
        let m = self.transition.dim();
        if self.values.len() != m {
            return Err(Error::parameter(format!(
                "{} values given for a {m}-state chain",
                self.values.len()
            )));
        }
        if !self.transition.is_finite() || !self.transition.is_nonnegative() {
            return Err(Error::parameter(
                "transition matrix entries must be finite and nonnegative",
            ));
        }
        for (i, row) in self.transition.rows().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::parameter(format!("row {i} sums to {sum}, not 1")));
            }
        }
        if !self.transition.is_irreducible() {
            return Err(Error::parameter("transition matrix is reducible"));
        }
        if let Some(v) = self.values.iter().find(|v| **v == 0.0 || !v.is_finite()) {
            return Err(Error::parameter(format!(
                "state values must be finite and nonzero, got {v}"
            )));
        }
        if let Some(init) = self.init {
            if init >= m {
                return Err(Error::parameter(format!(
                    "initial state {init} out of range for {m} states"
                )));
            }
        }
        validate_length(self.n)
    }
}

/// D/M/1 increments `X = Exp(alpha) - 1/beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dm1Spec {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub warmup: usize,
}

impl Dm1Spec {
    pub fn new(alpha: f64, beta: f64, n: usize, seed: u64) -> Self {
        Self {
            alpha,
            beta,
            n,
            seed,
            warmup: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_dm1(self.alpha, self.beta)?;
        validate_length(self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "kebab-case")]
pub enum ProcessSpec {
    TwoState(TwoStateSpec),
    FiniteMarkov(FiniteMarkovSpec),
    Dm1(Dm1Spec),
}

impl ProcessSpec {
    pub fn seed(&self) -> u64 {
        match self {
            ProcessSpec::TwoState(s) => s.seed,
            ProcessSpec::FiniteMarkov(s) => s.seed,
            ProcessSpec::Dm1(s) => s.seed,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ProcessSpec::TwoState(s) => s.n,
            ProcessSpec::FiniteMarkov(s) => s.n,
            ProcessSpec::Dm1(s) => s.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Copy with a different sample count and seed.
    pub fn with_run(&self, n: usize, seed: u64) -> Self {
        let mut spec = self.clone();
        match &mut spec {
            ProcessSpec::TwoState(s) => (s.n, s.seed) = (n, seed),
            ProcessSpec::FiniteMarkov(s) => (s.n, s.seed) = (n, seed),
            ProcessSpec::Dm1(s) => (s.n, s.seed) = (n, seed),
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::TwoState(s) => s.validate(),
            ProcessSpec::FiniteMarkov(s) => s.validate(),
            ProcessSpec::Dm1(s) => s.validate(),
        }
    }

    pub fn sample(&self) -> Result<Trace> {
        match self {
            ProcessSpec::TwoState(s) => sample_two_state(s),
            ProcessSpec::FiniteMarkov(s) => sample_finite_markov(s),
            ProcessSpec::Dm1(s) => sample_dm1(s),
        }
    }

    /// Finite state space of the emitted values, if the process has one.
    pub fn state_values(&self) -> Option<Vec<f64>> {
        match self {
            ProcessSpec::TwoState(_) => Some(vec![-1.0, 1.0]),
            ProcessSpec::FiniteMarkov(s) => Some(s.values.clone()),
            ProcessSpec::Dm1(_) => None,
        }
    }
}

fn validate_length(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::parameter("sample count n must be at least 1"));
    }
    Ok(())
}

pub(crate) fn validate_two_state(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
        return Err(Error::parameter(format!(
            "two-state chain needs 0 < alpha < beta < 1, got alpha={alpha}, beta={beta}"
        )));
    }
    Ok(())
}

pub(crate) fn validate_dm1(alpha: f64, beta: f64) -> Result<()> {
    if !(beta > 0.0 && alpha > beta && alpha.is_finite()) {
        return Err(Error::parameter(format!(
            "D/M/1 increments need alpha > beta > 0 (negative drift), got alpha={alpha}, beta={beta}"
        )));
    }
    Ok(())
}

pub(crate) fn two_state_matrix(alpha: f64, beta: f64) -> SquareMatrix {
    SquareMatrix::from_rows(vec![vec![1.0 - alpha, alpha], vec![beta, 1.0 - beta]])
        .expect("2x2 rows")
}

/// Uniform on `(0, 1]`.
fn open_closed_uniform(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

fn draw_index(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (j, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return j;
        }
    }
    // rounding left u above the accumulated mass
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

fn run_chain(
    transition: &SquareMatrix,
    values: &[f64],
    initial: Initial<'_>,
    n: usize,
    warmup: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut state = match initial {
        Initial::State(s) => s,
        Initial::Law(law) => draw_index(law, rng.random::<f64>()),
    };
    for _ in 0..warmup {
        state = draw_index(transition.row(state), rng.random::<f64>());
    }
    (0..n)
        .map(|_| {
            state = draw_index(transition.row(state), rng.random::<f64>());
            values[state]
        })
        .collect()
}

enum Initial<'a> {
    State(usize),
    Law(&'a [f64]),
}

pub fn sample_two_state(spec: &TwoStateSpec) -> Result<Trace> {
    spec.validate()?;
    let (alpha, beta) = (spec.alpha, spec.beta);
    let stationary = [beta / (alpha + beta), alpha / (alpha + beta)];
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values = run_chain(
        &spec.transition_matrix(),
        &[-1.0, 1.0],
        Initial::Law(&stationary),
        spec.n,
        spec.warmup,
        &mut rng,
    );
    Trace::new(
        values,
        TraceKind::Increments,
        Origin::Process(ProcessSpec::TwoState(spec.clone())),
    )
}

pub fn sample_finite_markov(spec: &FiniteMarkovSpec) -> Result<Trace> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let stationary;
    let initial = match spec.init {
        Some(s) => Initial::State(s),
        None => {
            stationary = stationary_distribution(&spec.transition)?;
            Initial::Law(&stationary)
        }
    };
    let values = run_chain(
        &spec.transition,
        &spec.values,
        initial,
        spec.n,
        spec.warmup,
        &mut rng,
    );
    Trace::new(
        values,
        TraceKind::Increments,
        Origin::Process(ProcessSpec::FiniteMarkov(spec.clone())),
    )
}

pub fn sample_dm1(spec: &Dm1Spec) -> Result<Trace> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let shift = 1.0 / spec.beta;
    for _ in 0..spec.warmup {
        open_closed_uniform(&mut rng);
    }
    let values = (0..spec.n)
        .map(|_| -open_closed_uniform(&mut rng).ln() / spec.alpha - shift)
        .collect();
    Trace::new(
        values,
        TraceKind::Increments,
        Origin::Process(ProcessSpec::Dm1(spec.clone())),
    )
}

/// Reads a single-column trace: optional `value` header, `#` comment lines,
/// one real per line. A `# seed=<u64>` comment is kept on the trace.
pub fn load_trace(path: impl AsRef<Path>, kind: TraceKind) -> Result<Trace> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut values = Vec::new();
    let mut seed = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(s) = comment.trim().strip_prefix("seed=") {
                seed = Some(s.trim().parse::<u64>().map_err(|e| Error::Format {
                    path: path.to_owned(),
                    line: lineno,
                    message: format!("bad seed comment: {e}"),
                })?);
            }
            continue;
        }
        if values.is_empty() && line.eq_ignore_ascii_case("value") {
            continue;
        }
        let field = line.split(',').next().unwrap_or(line).trim();
        let value: f64 = field.parse().map_err(|_| Error::Format {
            path: path.to_owned(),
            line: lineno,
            message: format!("cannot parse {field:?} as a real number"),
        })?;
        if !value.is_finite() {
            return Err(Error::Format {
                path: path.to_owned(),
                line: lineno,
                message: format!("non-finite value {field:?}"),
            });
        }
        if kind == TraceKind::Waits && value < 0.0 {
            return Err(Error::Format {
                path: path.to_owned(),
                line: lineno,
                message: format!("negative waiting time {field}"),
            });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput {
            path: path.to_owned(),
        });
    }
    let mut trace = Trace::new(values, kind, Origin::External(path.to_owned()))?;
    trace.seed = seed;
    Ok(trace)
}

/// CSV text of a trace in the format read by [`load_trace`].
pub fn trace_to_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(trace.len() * 24 + 32);
    if let Some(seed) = trace.seed {
        let _ = writeln!(out, "# seed={seed}");
    }
    out.push_str("value\n");
    for v in &trace.values {
        out.push_str(&format_real(*v));
        out.push('\n');
    }
    out
}

pub fn save_trace(trace: &Trace, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, trace_to_csv(trace))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_state_single_value_in_support() {
        for seed in 0..20 {
            let t = sample_two_state(&TwoStateSpec::new(0.3, 0.6, 1, seed)).unwrap();
            assert_eq!(t.len(), 1);
            assert!(t.values()[0] == -1.0 || t.values()[0] == 1.0);
        }
    }

    #[test]
    fn two_state_rejects_bad_order() {
        assert!(matches!(
            sample_two_state(&TwoStateSpec::new(0.2, 0.1, 10, 0)),
            Err(Error::Parameter(_))
        ));
        assert!(sample_two_state(&TwoStateSpec::new(0.0, 0.1, 10, 0)).is_err());
        assert!(sample_two_state(&TwoStateSpec::new(0.1, 1.0, 10, 0)).is_err());
    }

    #[test]
    fn absorbing_singleton() {
        let spec = FiniteMarkovSpec {
            transition: SquareMatrix::identity(1),
            values: vec![-1.0],
            init: Some(0),
            n: 3,
            seed: 9,
            warmup: 0,
        };
        assert_eq!(
            sample_finite_markov(&spec).unwrap().values(),
            &[-1.0, -1.0, -1.0]
        );
    }

    #[test]
    fn deterministic_flip_chain_emits_successors() {
        let spec = FiniteMarkovSpec {
            transition: SquareMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            values: vec![-1.0, 1.0],
            init: Some(0),
            n: 4,
            seed: 1,
            warmup: 0,
        };
        assert_eq!(
            sample_finite_markov(&spec).unwrap().values(),
            &[1.0, -1.0, 1.0, -1.0]
        );
    }

    #[test]
    fn finite_markov_validation() {
        let base = FiniteMarkovSpec {
            transition: SquareMatrix::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
            values: vec![-1.0, 1.0],
            init: None,
            n: 5,
            seed: 0,
            warmup: 0,
        };
        assert!(base.validate().is_ok());

        let mut bad = base.clone();
        bad.transition = SquareMatrix::from_rows(vec![vec![0.5, 0.4], vec![0.5, 0.5]]).unwrap();
        assert!(bad.validate().is_err());

        let mut reducible = base.clone();
        reducible.transition =
            SquareMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(reducible.validate().is_err());

        let mut zero_value = base.clone();
        zero_value.values = vec![0.0, 1.0];
        assert!(zero_value.validate().is_err());

        let mut bad_init = base;
        bad_init.init = Some(2);
        assert!(bad_init.validate().is_err());
    }

    #[test]
    fn dm1_support_and_errors() {
        let t = sample_dm1(&Dm1Spec::new(1.0, 10.0 / 11.0, 10_000, 3)).unwrap();
        assert!(t.values().iter().all(|v| *v >= -1.1));
        assert!(sample_dm1(&Dm1Spec::new(1.0, 1.0, 10, 0)).is_err());
        assert!(sample_dm1(&Dm1Spec::new(0.5, 1.0, 10, 0)).is_err());
    }

    #[test]
    fn warmup_shifts_the_stream() {
        let mut spec = Dm1Spec::new(1.0, 0.5, 10, 4);
        let plain = sample_dm1(&spec).unwrap();
        spec.warmup = 3;
        let warmed = sample_dm1(&spec).unwrap();
        assert_eq!(&plain.values()[3..], &warmed.values()[..7]);
    }

    #[test]
    fn load_headerless_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        fs::write(&p, "1.0\n-2.0\n").unwrap();
        let t = load_trace(&p, TraceKind::Increments).unwrap();
        assert_eq!(t.values(), &[1.0, -2.0]);
        assert_eq!(t.origin(), &Origin::External(p.clone()));

        fs::write(&p, "").unwrap();
        assert!(matches!(
            load_trace(&p, TraceKind::Increments),
            Err(Error::EmptyInput { .. })
        ));

        fs::write(&p, "value\n1.0\nabc\n").unwrap();
        match load_trace(&p, TraceKind::Increments) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected format error, got {other:?}"),
        }

        fs::write(&p, "value\n1.0\n-0.5\n").unwrap();
        assert!(load_trace(&p, TraceKind::Waits).is_err());
    }

    #[test]
    fn seed_comment_is_preserved() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let t = sample_dm1(&Dm1Spec::new(2.0, 1.0, 50, 77)).unwrap();
        save_trace(&t, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# seed=77\nvalue\n"));
        let back = load_trace(&p, TraceKind::Increments).unwrap();
        assert_eq!(back.seed(), Some(77));
        assert_eq!(back.values(), t.values());
        assert_eq!(trace_to_csv(&back), text);
    }
}
