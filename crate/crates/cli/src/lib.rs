//! Command-line front end for the `loynes` crate.
//!
//! Every run writes its CSV to `--output` (or stdout) and a JSON run
//! manifest next to it. Exit codes: 0 success, 1 bad parameters or usage,
//! 2 bad data, malformed input or I/O failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod config;
pub mod manifest;

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use loynes::estimators::legendre_curve;
use loynes::experiments::convergence_table;
use loynes::processes::trace_to_csv;
use loynes::table::{Cell, Table};
use loynes::{
    block_sums, dm1_exponent, exponent_from_scgf, extremal_exponent, lindley_recursion, load_trace,
    markov_mle, rate_curve_two_state, run_convergence, run_mc_ldp, two_state_exponent,
    ConvergenceConfig, Dm1Spec, EstimatorKind, FiniteMarkovSpec, McLdpConfig, ProcessSpec,
    RootOpts, ScgfEvaluator, SquareMatrix, SupOpts, Trace, TraceKind, TwoStateSpec,
};

use crate::args::*;
use crate::manifest::RunManifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] loynes::Error),
    #[error("{path}: {source}")]
    Input {
        path: std::path::PathBuf,
        source: loynes::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_parameter_error() => 1,
            CliError::Core(_) | CliError::Input { .. } => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(loynes::Error::Io(e))
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Runs the CLI against the process's standard streams.
pub fn dispatch<I: IntoIterator<Item = String>>(argv: I) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI with explicit output streams and returns the exit code.
pub fn run<I: IntoIterator<Item = String>>(
    argv: I,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let argv: Vec<String> = argv.into_iter().collect();
    let expanded = match config::expand(argv.clone()) {
        Ok(a) => a,
        Err(e) => return report(e, stderr),
    };
    let cli = match args::Cli::try_parse_from(&expanded) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    let mut ctx = Context {
        manifest: RunManifest::new(argv.iter().skip(1).cloned().collect()),
        stdout,
    };
    let outcome = execute(&cli.command, &mut ctx).and_then(|out| {
        ctx.manifest.finish(out, stderr)?;
        Ok(())
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => report(e, stderr),
    }
}

fn report(e: CliError, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    e.exit_code()
}

struct Context<'a> {
    manifest: RunManifest,
    stdout: &'a mut dyn Write,
}

impl Context<'_> {
    /// Writes `text` to `path` or stdout and records the destination.
    fn emit(&mut self, path: Option<&Path>, text: &str) -> Result<()> {
        match path {
            Some(p) => {
                fs::write(p, text)?;
                self.manifest.outputs.push(p.display().to_string());
            }
            None => {
                self.stdout.write_all(text.as_bytes())?;
                self.manifest.outputs.push("-".into());
            }
        }
        Ok(())
    }

    fn record<T: serde::Serialize>(&mut self, subcommand: &str, params: &T) -> Result<()> {
        self.manifest.subcommand = subcommand.into();
        self.manifest.parameters =
            serde_json::to_value(params).map_err(|e| usage(format!("parameters: {e}")))?;
        Ok(())
    }
}

fn execute<'c>(cmd: &'c Command, ctx: &mut Context) -> Result<&'c OutputArgs> {
    match cmd {
        Command::Simulate(a) => simulate(a, ctx).map(|_| &a.out),
        Command::Estimate(a) => estimate(a, ctx).map(|_| &a.out),
        Command::Analytic(a) => analytic(a, ctx).map(|_| &a.out),
        Command::RateCurve(a) => rate_curve(a, ctx).map(|_| &a.out),
        Command::Experiment(ExperimentCommand::Convergence(a)) => {
            convergence(a, ctx).map(|_| &a.out)
        }
        Command::Experiment(ExperimentCommand::McLdp(a)) => mc_ldp(a, ctx).map(|_| &a.out),
    }
}

fn value_name<T: clap::ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}

fn process_spec(p: &ProcessArgs, n: usize, seed: u64) -> Result<ProcessSpec> {
    let pair = || match (p.alpha, p.beta) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(usage(format!(
            "--process {} needs --alpha and --beta",
            value_name(&p.process)
        ))),
    };
    let spec = match p.process {
        ProcessName::TwoState => {
            let (alpha, beta) = pair()?;
            ProcessSpec::TwoState(TwoStateSpec {
                alpha,
                beta,
                n,
                seed,
                warmup: p.warmup,
            })
        }
        ProcessName::Dm1 => {
            let (alpha, beta) = pair()?;
            ProcessSpec::Dm1(Dm1Spec {
                alpha,
                beta,
                n,
                seed,
                warmup: p.warmup,
            })
        }
        ProcessName::FiniteMarkov => {
            let text = p
                .matrix
                .as_deref()
                .ok_or_else(|| usage("--process finite-markov needs --matrix"))?;
            if p.values.is_empty() {
                return Err(usage("--process finite-markov needs --values"));
            }
            ProcessSpec::FiniteMarkov(FiniteMarkovSpec {
                transition: parse_matrix(text)?,
                values: p.values.clone(),
                init: p.init,
                n,
                seed,
                warmup: p.warmup,
            })
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// Parses `a,b;c,d` into a square matrix.
pub fn parse_matrix(text: &str) -> Result<SquareMatrix> {
    let rows = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| usage(format!("--matrix: cannot parse `{}`", x.trim())))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SquareMatrix::from_rows(rows)?)
}

fn estimator_kind(name: EstimatorName, block_size: usize) -> EstimatorKind {
    match name {
        EstimatorName::Block => EstimatorKind::Block { block_size },
        EstimatorName::Markov => EstimatorKind::Markov,
        EstimatorName::Extremal => EstimatorKind::Extremal,
    }
}

fn root_opts(r: &RootArgs) -> Result<RootOpts> {
    if !(r.tol > 0.0 && r.tol.is_finite()) {
        return Err(usage("--tol must be positive"));
    }
    if !(r.theta_cap > 1.0 && r.theta_cap.is_finite()) {
        return Err(usage("--theta-cap must be a finite number above 1"));
    }
    Ok(RootOpts {
        tol: r.tol,
        theta_cap: r.theta_cap,
        ..RootOpts::default()
    })
}

fn simulate(a: &SimulateArgs, ctx: &mut Context) -> Result<()> {
    ctx.record("simulate", a)?;
    ctx.manifest.seed = Some(a.seed);
    let trace = process_spec(&a.process, a.n, a.seed)?.sample()?;
    let trace = if a.waits {
        lindley_recursion(&trace, a.w0)?
    } else {
        trace
    };
    ctx.emit(a.out.output.as_deref(), &trace_to_csv(&trace))
}

fn distinct_sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// sCGF of `trace` under a block or Markov estimator; notes dropped samples.
fn scgf_for(
    trace: &Trace,
    markov: bool,
    block_size: usize,
    states: &[f64],
    ctx: &mut Context,
) -> Result<ScgfEvaluator> {
    if trace.kind() != TraceKind::Increments {
        return Err(usage("sCGF estimators need an increment trace"));
    }
    if markov {
        let states = if states.is_empty() {
            distinct_sorted(trace.values())
        } else {
            states.to_vec()
        };
        let est = markov_mle(trace, &states)?;
        ctx.manifest
            .notes
            .insert("states".into(), format!("{states:?}"));
        Ok(ScgfEvaluator::markov(&est, &states)?)
    } else {
        if block_size == 0 {
            return Err(usage("--B must be at least 1"));
        }
        let blocked = block_sums(trace, block_size)?;
        ctx.manifest
            .notes
            .insert("dropped".into(), blocked.dropped().to_string());
        Ok(ScgfEvaluator::block(blocked))
    }
}

fn load(path: &Path, kind: TraceKind) -> Result<Trace> {
    load_trace(path, kind).map_err(|e| match e {
        loynes::Error::Io(_) => CliError::Input {
            path: path.to_path_buf(),
            source: e,
        },
        other => CliError::Core(other),
    })
}

fn input_kind(k: InputKind) -> TraceKind {
    match k {
        InputKind::Increments => TraceKind::Increments,
        InputKind::Waits => TraceKind::Waits,
    }
}

fn estimate(a: &EstimateArgs, ctx: &mut Context) -> Result<()> {
    let name = value_name(&a.estimator);
    ctx.record(&format!("estimate {name}"), a)?;
    let opts = root_opts(&a.root)?;
    if !a.scgf_grid.is_empty() {
        if a.estimator == EstimatorName::Extremal {
            return Err(usage("--scgf-grid needs the block or markov estimator"));
        }
        if a.scgf_output.is_none() {
            return Err(usage("--scgf-grid needs --scgf-output"));
        }
    }
    let trace = load(&a.input, input_kind(a.input_kind))?;
    let mut table = Table::new(["estimator", "n", "value", "status", "residual"]);
    table.meta("input", a.input.display());
    let row = match a.estimator {
        EstimatorName::Extremal => {
            let waits = match trace.kind() {
                TraceKind::Waits => trace.clone(),
                TraceKind::Increments => lindley_recursion(&trace, a.w0)?,
            };
            let v = extremal_exponent(&waits)?;
            vec![
                name.as_str().into(),
                trace.len().into(),
                v.into(),
                "direct".into(),
                Cell::Empty,
            ]
        }
        est => {
            let markov = est == EstimatorName::Markov;
            let scgf = scgf_for(&trace, markov, a.block_size, &a.states, ctx)?;
            if !markov {
                table.meta("block_size", a.block_size);
                table.meta("dropped", &ctx.manifest.notes["dropped"]);
            }
            if let (&[start, stop, points], Some(path)) = (&a.scgf_grid[..], &a.scgf_output) {
                if !(points >= 1.0 && points.fract() == 0.0) {
                    return Err(usage("--scgf-grid points must be a positive integer"));
                }
                let curve = scgf.curve_table(start, stop, points as usize);
                ctx.emit(Some(path), &curve.to_csv())?;
            } else if !a.scgf_grid.is_empty() {
                return Err(usage("--scgf-grid takes start,stop,points"));
            }
            let e = exponent_from_scgf(&scgf, &opts);
            vec![
                name.as_str().into(),
                trace.len().into(),
                e.value.into(),
                e.status.as_str().into(),
                e.residual.map_or(Cell::Empty, Cell::from),
            ]
        }
    };
    table.push_row(row);
    ctx.emit(a.out.output.as_deref(), &table.to_csv())
}

fn analytic(a: &AnalyticArgs, ctx: &mut Context) -> Result<()> {
    let name = value_name(&a.which);
    ctx.record(&format!("analytic {name}"), a)?;
    let v = match a.which {
        AnalyticName::TwoState => two_state_exponent(a.alpha, a.beta)?,
        AnalyticName::Dm1 => dm1_exponent(a.alpha, a.beta)?,
    };
    ctx.emit(a.out.output.as_deref(), &format!("{:.*}\n", a.digits, v))
}

fn grid(g: &GridArgs) -> Result<Vec<f64>> {
    if !g.x_list.is_empty() {
        return Ok(g.x_list.clone());
    }
    if g.points < 2 || !(g.x_max > g.x_min) {
        return Err(usage("grid needs --points >= 2 and --x-max > --x-min"));
    }
    let step = (g.x_max - g.x_min) / (g.points - 1) as f64;
    Ok((0..g.points)
        .map(|k| {
            if k + 1 == g.points {
                g.x_max
            } else {
                g.x_min + step * k as f64
            }
        })
        .collect())
}

fn rate_curve(a: &RateCurveArgs, ctx: &mut Context) -> Result<()> {
    let name = value_name(&a.kind);
    ctx.record(&format!("rate-curve {name}"), a)?;
    let xs = grid(&a.grid)?;
    let curve = match a.kind {
        CurveName::TwoState => {
            let (Some(alpha), Some(beta)) = (a.alpha, a.beta) else {
                return Err(usage("rate-curve two-state needs --alpha and --beta"));
            };
            rate_curve_two_state(alpha, beta, &xs)?
        }
        CurveName::Legendre => {
            let input = a
                .input
                .as_deref()
                .ok_or_else(|| usage("rate-curve legendre needs --input"))?;
            if !(a.sup_cap > 0.0 && a.sup_cap.is_finite()) {
                return Err(usage("--sup-cap must be positive"));
            }
            let trace = load(input, TraceKind::Increments)?;
            let markov = a.estimator == ScgfName::Markov;
            let scgf = scgf_for(&trace, markov, a.block_size, &a.states, ctx)?;
            let opts = SupOpts {
                theta_cap: a.sup_cap,
                ..SupOpts::default()
            };
            legendre_curve(&scgf, &xs, &opts)?
        }
    };
    ctx.emit(a.out.output.as_deref(), &curve.to_table().to_csv())
}

fn convergence(a: &ConvergenceArgs, ctx: &mut Context) -> Result<()> {
    ctx.record("experiment convergence", a)?;
    ctx.manifest.seed = Some(a.seed);
    let checkpoints = if a.checkpoints.is_empty() {
        let step = (a.n_max / 100).max(1);
        let mut c: Vec<usize> = (step..=a.n_max).step_by(step).collect();
        if c.last() != Some(&a.n_max) {
            c.push(a.n_max);
        }
        c
    } else {
        a.checkpoints.clone()
    };
    let cfg = ConvergenceConfig {
        process: process_spec(&a.process, a.n_max.max(1), a.seed)?,
        estimator: estimator_kind(a.estimator, a.block_size),
        n_max: a.n_max,
        checkpoints,
        seed: a.seed,
        root: root_opts(&a.root)?,
    };
    let points = run_convergence(&cfg)?;
    ctx.emit(
        a.out.output.as_deref(),
        &convergence_table(&cfg, &points).to_csv(),
    )
}

fn mc_ldp(a: &McLdpArgs, ctx: &mut Context) -> Result<()> {
    ctx.record("experiment mc-ldp", a)?;
    ctx.manifest.seed = Some(a.base_seed);
    if a.workers == Some(0) {
        return Err(usage("--workers must be at least 1"));
    }
    let n_max = a.n_list.iter().copied().max().unwrap_or(1).max(1);
    let cfg = McLdpConfig {
        process: process_spec(&a.process, n_max, a.base_seed)?,
        estimator: estimator_kind(a.estimator, a.block_size),
        replicas: a.replicas,
        n_list: a.n_list.clone(),
        x_list: a.x_list.clone(),
        base_seed: a.base_seed,
        theta_star_ref: a.theta_star_ref,
        workers: a.workers,
        root: root_opts(&a.root)?,
    };
    let result = run_mc_ldp(&cfg)?;
    ctx.emit(a.out.output.as_deref(), &result.to_table(&cfg).to_csv())
}
