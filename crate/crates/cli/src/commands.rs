//! The five workflows.

use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use chrono::Utc;
use trp_core::model::{target_gate, ParamValues};
use trp_core::optimize::{optimize, sensitivity_scan, PENALTY};
use trp_core::{Execution, GateEvaluation, GateMetrics};

use crate::config::{Command, ConvergeSpec, RunConfig};
use crate::error::CliError;
use crate::record::{read_records, ConvergenceSummary, MatrixParts, RunRecord, SCHEMA_VERSION};
use crate::table;

/// Largest |ΔTr P| tolerated when replaying a record.
pub const REPLAY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Default)]
pub struct Context {
    pub execution: Execution,
    /// Overrides the optimizer seed.
    pub seed: Option<u64>,
}

pub struct Outcome {
    pub records: Vec<RunRecord>,
    /// Human-readable report for stdout.
    pub text: String,
}

/// Simulates `cfg` as written (or scores the stubbed gate).
pub fn evaluate_config(cfg: &RunConfig) -> Result<GateEvaluation, CliError> {
    cfg.validate()?;
    let run = cfg.gate_run();
    let eval = match cfg.stub_applied_gate {
        Some(g) => {
            if g.dim() != cfg.target.dim() {
                return Err(CliError::Usage(format!(
                    "stub_applied_gate `{}` does not match the target dimension",
                    g.as_str()
                )));
            }
            run.score(target_gate(g).matrix)?
        }
        None => run.evaluate()?,
    };
    check_metrics(&eval.metrics)?;
    Ok(eval)
}

fn check_metrics(m: &GateMetrics) -> Result<(), CliError> {
    if m.trace_p.is_finite() && m.fidelity.is_finite() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("non-finite metrics {m:?}")))
    }
}

fn record(command: Command, config: RunConfig, eval: &GateEvaluation, seed: u64, started: Instant) -> RunRecord {
    RunRecord {
        schema_version: SCHEMA_VERSION,
        command,
        timestamp: Utc::now(),
        config,
        metrics: eval.metrics,
        applied_gate: MatrixParts::of(&eval.applied),
        seed,
        wall_time_s: started.elapsed().as_secs_f64(),
        optimization: None,
        scan_row: None,
        convergence: None,
    }
}

fn seed_of(cfg: &RunConfig) -> u64 {
    cfg.optimizer.as_ref().map_or(0, |o| o.seed)
}

/// Applies context overrides that live inside the config.
fn prepare(cfg: &RunConfig, ctx: &Context) -> RunConfig {
    let mut cfg = cfg.clone();
    if let Some(opt) = cfg.optimizer.as_mut() {
        if let Some(s) = ctx.seed {
            opt.seed = s;
        }
        opt.execution = ctx.execution;
    }
    cfg
}

pub fn run(command: Command, cfg: &RunConfig, ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = prepare(cfg, ctx);
    match command {
        Command::Simulate => simulate(&cfg),
        Command::Optimize => optimize_cmd(&cfg),
        Command::Scan => scan(&cfg, ctx),
        Command::Converge => converge(&cfg, ctx),
        Command::Report => Err(CliError::Usage("report reads records; use --records".into())),
    }
}

pub fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = Instant::now();
    let eval = evaluate_config(cfg)?;
    let rec = record(Command::Simulate, cfg.clone(), &eval, seed_of(cfg), t);
    let mut text = table::gate_summary(std::slice::from_ref(&rec));
    text.push_str(&table::matrix_blocks(&rec.applied_gate));
    Ok(Outcome { records: vec![rec], text })
}

pub fn optimize_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = Instant::now();
    cfg.validate()?;
    let opt = cfg
        .optimizer
        .as_ref()
        .ok_or_else(|| CliError::Usage("optimize needs an [optimizer] section".into()))?;
    let space = cfg.parameter_space()?;
    opt.validate(space.names.len())?;
    let run = cfg.gate_run();
    let result = optimize(&|x: &[f64]| run.objective(&space, x), &space, opt)?;
    if result.best_trace_p.is_nan() || result.best_trace_p >= PENALTY {
        return Err(CliError::Numerical("every objective evaluation failed".into()));
    }
    let mut best = cfg.params();
    for (name, v) in &result.best_params {
        best.set(*name, *v)?;
    }
    let mut echo = cfg.clone();
    echo.set_params(&best);
    let eval = evaluate_config(&echo)?;
    let mut rec = record(Command::Optimize, echo, &eval, opt.seed, t);
    rec.optimization = Some(result.clone());

    let mut text = format!(
        "{} after {} evaluations ({}converged), seed {}\n",
        match opt.algorithm {
            trp_core::optimize::Algorithm::NelderMead => "nelder_mead",
            trp_core::optimize::Algorithm::SimulatedAnnealing => "simulated_annealing",
        },
        result.eval_count,
        if result.converged { "" } else { "not " },
        result.seed
    );
    for (name, v) in &result.best_params {
        text.push_str(&format!("  {:<8} {:.10e}\n", name.as_str(), v));
    }
    text.push_str(&table::gate_summary(std::slice::from_ref(&rec)));
    text.push_str(&table::matrix_blocks(&rec.applied_gate));
    Ok(Outcome { records: vec![rec], text })
}

pub fn scan(cfg: &RunConfig, ctx: &Context) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let spec = cfg
        .scan
        .as_ref()
        .ok_or_else(|| CliError::Usage("scan needs a [scan] section".into()))?;
    let run = cfg.gate_run();
    let base = cfg.params();
    let started = Instant::now();
    let evaluations: Mutex<Vec<(u64, GateEvaluation)>> = Mutex::new(Vec::new());
    let objective = |v: &ParamValues| -> trp_core::Result<f64> {
        let e = run.evaluate_with(v)?;
        let key = v.get(spec.param).unwrap_or(f64::NAN).to_bits();
        evaluations.lock().expect("scan store").push((key, e));
        Ok(e.metrics.trace_p)
    };
    let rows = sensitivity_scan(&objective, &base, spec.param, &spec.offsets, ctx.execution)?;
    let evaluations = evaluations.into_inner().expect("scan store");

    let mut records = Vec::with_capacity(rows.len());
    for row in rows {
        let eval = evaluations
            .iter()
            .find(|(k, _)| *k == row.value.to_bits())
            .map(|(_, e)| *e)
            .expect("every scan row was evaluated");
        check_metrics(&eval.metrics)?;
        let mut echo = cfg.clone();
        let mut v = base;
        v.set(spec.param, row.value)?;
        echo.set_params(&v);
        let mut rec = record(Command::Scan, echo, &eval, seed_of(cfg), started);
        rec.scan_row = Some(row);
        records.push(rec);
    }
    let text = table::scan_table(spec.param.as_str(), &records);
    Ok(Outcome { records, text })
}

pub fn converge(cfg: &RunConfig, ctx: &Context) -> Result<Outcome, CliError> {
    let t = Instant::now();
    let eval = evaluate_config(cfg)?;
    let spec = cfg.converge.clone().unwrap_or_default();
    let ConvergeSpec {
        doublings,
        base_subintervals,
        subinterval_doublings,
    } = spec;
    if doublings == 0 {
        return Err(CliError::Usage("converge.doublings must be at least 1".into()));
    }
    let run = cfg.gate_run();
    let integrator = run.step_convergence(doublings, ctx.execution)?;
    let mut text = String::new();
    let unit = if cfg.schedule.is_some() { "k" } else { "steps" };
    text.push_str(&table::convergence_table("integrator", unit, &integrator));
    let subintervals = match cfg.schedule {
        Some(s) => {
            let base = base_subintervals.unwrap_or(s.n_subintervals);
            let n = subinterval_doublings.unwrap_or(doublings);
            let report = run.schedule_convergence(base, n, ctx.execution)?;
            text.push_str(&table::convergence_table("subintervals", "N", &report));
            Some(report)
        }
        None => None,
    };
    let mut rec = record(Command::Converge, cfg.clone(), &eval, seed_of(cfg), t);
    rec.convergence = Some(ConvergenceSummary {
        integrator,
        subintervals,
    });
    Ok(Outcome { records: vec![rec], text })
}

/// Tr P of a record's config evaluated afresh, and the difference to the stored value.
pub fn replay(rec: &RunRecord) -> Result<(f64, f64), CliError> {
    let fresh = evaluate_config(&rec.config)?.metrics.trace_p;
    Ok((fresh, (fresh - rec.metrics.trace_p).abs()))
}

pub fn report(path: &Path, verify: bool) -> Result<Outcome, CliError> {
    let records = read_records(path)?;
    let mut text = String::new();
    let gates: Vec<RunRecord> = records
        .iter()
        .filter(|r| matches!(r.command, Command::Simulate | Command::Optimize | Command::Converge))
        .cloned()
        .collect();
    if !gates.is_empty() {
        text.push_str(&table::gate_summary(&gates));
    }
    let scans: Vec<RunRecord> = records.iter().filter(|r| r.scan_row.is_some()).cloned().collect();
    if !scans.is_empty() {
        let param = scans[0].config.scan.as_ref().map_or("value", |s| s.param.as_str());
        text.push_str(&table::scan_table(param, &scans));
    }
    if verify {
        let mut worst: f64 = 0.0;
        for r in &records {
            let (_, diff) = replay(r)?;
            worst = worst.max(diff);
        }
        text.push_str(&format!("replayed {} records, max |dTr P| = {worst:.3e}\n", records.len()));
        if worst > REPLAY_TOL {
            return Err(CliError::Numerical(format!(
                "replay differs by {worst:e} (tolerance {REPLAY_TOL:e})"
            )));
        }
    }
    Ok(Outcome { records: Vec::new(), text })
}
