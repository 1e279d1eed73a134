//! Derivative-free minimization: bounded Nelder–Mead and simulated annealing.
//!
//! Both work in coordinates normalized to `[0, 1]` per free parameter so that
//! quantities like `η₄ ~ 1e-4` and `d₁ ~ 1e2` share one search scale.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrpError};
use crate::model::{ParamName, ParamValues};
use crate::par::{self, Execution};

/// Objective value reported when an evaluation fails.
pub const PENALTY: f64 = 1e6;

/// Axis-aligned search box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SearchBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(TrpError::invalid("bounds", "need at least one free parameter"));
        }
        if lower.len() != upper.len() {
            return Err(TrpError::invalid(
                "bounds",
                format!("{} lower vs {} upper bounds", lower.len(), upper.len()),
            ));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(TrpError::invalid("bounds", format!("axis {i}: need lower < upper, got [{l}, {u}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| v >= l && v <= u)
    }

    fn unit_coords(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (l, u))| ((v - l) / (u - l)).clamp(0.0, 1.0))
            .collect()
    }

    fn point_at(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(t, (l, u))| (l + t * (u - l)).clamp(*l, *u))
            .collect()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.point_at(&vec![0.5; self.dim()])
    }
}

/// Folds a coordinate back into `[0, 1]` by mirror reflection at the walls.
fn reflect_unit(t: f64) -> f64 {
    if !t.is_finite() {
        return 0.5;
    }
    let period = t.rem_euclid(2.0);
    let r = if period > 1.0 { 2.0 - period } else { period };
    r.clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[default]
    NelderMead,
    SimulatedAnnealing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NelderMeadConfig {
    /// Initial simplex edge per parameter, as a fraction of its range; a single
    /// value is broadcast.
    pub initial_scale: Vec<f64>,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub tol_f: f64,
    pub tol_x: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            initial_scale: vec![0.1],
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            tol_f: 1e-14,
            tol_x: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealingConfig {
    pub initial_temperature: f64,
    pub cooling_factor: f64,
    pub steps_per_epoch: usize,
    /// Gaussian step width per parameter as a fraction of its range; a single
    /// value is broadcast.
    pub proposal_scale: Vec<f64>,
    pub restarts: usize,
}

impl Default for AnnealingConfig {
    fn default() -> Self {
        Self {
            initial_temperature: 1.0,
            cooling_factor: 0.95,
            steps_per_epoch: 200,
            proposal_scale: vec![0.05],
            restarts: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub max_evals: usize,
    pub record_trace: bool,
    pub nm: NelderMeadConfig,
    pub sa: AnnealingConfig,
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::NelderMead,
            seed: 0,
            max_evals: 1000,
            record_trace: true,
            nm: NelderMeadConfig::default(),
            sa: AnnealingConfig::default(),
            execution: Execution::Parallel,
        }
    }
}

fn broadcast(name: &str, v: &[f64], dim: usize) -> Result<Vec<f64>> {
    match v.len() {
        1 => Ok(vec![v[0]; dim]),
        n if n == dim => Ok(v.to_vec()),
        n => Err(TrpError::invalid(name, format!("has {n} entries, expected 1 or {dim}"))),
    }
}

impl OptimizerConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.max_evals == 0 {
            return Err(TrpError::invalid("max_evals", "must be > 0"));
        }
        let nm = &self.nm;
        let scales = broadcast("nm.initial_scale", &nm.initial_scale, dim)?;
        if scales.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
            return Err(TrpError::invalid("nm.initial_scale", "entries must lie in (0, 1]"));
        }
        if !(nm.reflection > 0.0
            && nm.expansion > 1.0
            && nm.contraction > 0.0
            && nm.contraction < 1.0
            && nm.shrink > 0.0
            && nm.shrink < 1.0)
        {
            return Err(TrpError::invalid("nm", "coefficients out of range"));
        }
        let sa = &self.sa;
        if !(sa.cooling_factor > 0.0 && sa.cooling_factor < 1.0) {
            return Err(TrpError::invalid("sa.cooling_factor", "must lie in (0, 1)"));
        }
        if !(sa.initial_temperature > 0.0 && sa.initial_temperature.is_finite()) {
            return Err(TrpError::invalid("sa.initial_temperature", "must be finite and > 0"));
        }
        if sa.steps_per_epoch == 0 || sa.restarts == 0 {
            return Err(TrpError::invalid("sa", "steps_per_epoch and restarts must be > 0"));
        }
        let props = broadcast("sa.proposal_scale", &sa.proposal_scale, dim)?;
        if props.iter().any(|s| s.is_nan() || *s <= 0.0) {
            return Err(TrpError::invalid("sa.proposal_scale", "entries must be > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub eval: usize,
    pub value: f64,
}

/// Outcome of a box-constrained minimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

/// Budgeted evaluation counter that remembers the best point.
struct Tally<'a, F> {
    f: &'a F,
    bounds: &'a SearchBox,
    evals: usize,
    budget: usize,
    offset: usize,
    best_x: Vec<f64>,
    best_f: f64,
    trace: Option<Vec<TracePoint>>,
}

impl<'a, F: Fn(&[f64]) -> f64> Tally<'a, F> {
    fn new(f: &'a F, bounds: &'a SearchBox, budget: usize, offset: usize, record: bool) -> Self {
        Self {
            f,
            bounds,
            evals: 0,
            budget,
            offset,
            best_x: Vec::new(),
            best_f: f64::INFINITY,
            trace: record.then(Vec::new),
        }
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.budget
    }

    fn eval_unit(&mut self, z: &[f64]) -> f64 {
        let x = self.bounds.point_at(z);
        let mut v = (self.f)(&x);
        if v.is_nan() {
            v = PENALTY;
        }
        if let Some(t) = self.trace.as_mut() {
            t.push(TracePoint {
                eval: self.offset + self.evals,
                value: v,
            });
        }
        self.evals += 1;
        if v < self.best_f || self.best_x.is_empty() {
            self.best_f = v;
            self.best_x = x;
        }
        v
    }

    fn finish(self, converged: bool) -> Minimum {
        Minimum {
            x: self.best_x,
            f: self.best_f,
            evals: self.evals,
            converged,
            trace: self.trace.unwrap_or_default(),
        }
    }
}

/// Bounded Nelder–Mead from `start`.
pub fn nelder_mead<F>(f: &F, bounds: &SearchBox, start: &[f64], cfg: &OptimizerConfig) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64,
{
    let n = bounds.dim();
    if start.len() != n {
        return Err(TrpError::invalid("start", format!("has {} entries, expected {n}", start.len())));
    }
    cfg.validate(n)?;
    let nm = &cfg.nm;
    let scales = broadcast("nm.initial_scale", &nm.initial_scale, n)?;
    let mut tally = Tally::new(f, bounds, cfg.max_evals, 0, cfg.record_trace);

    let z0 = bounds.unit_coords(start);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = tally.eval_unit(&z0);
    simplex.push((z0.clone(), f0));
    for i in 0..n {
        if tally.exhausted() {
            return Ok(tally.finish(false));
        }
        let mut z = z0.clone();
        z[i] = if z0[i] + scales[i] <= 1.0 {
            z0[i] + scales[i]
        } else {
            z0[i] - scales[i]
        };
        z[i] = reflect_unit(z[i]);
        let v = tally.eval_unit(&z);
        simplex.push((z, v));
    }

    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(ai, bi)| reflect_unit(ai + t * (bi - ai)))
            .collect()
    };

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(z, _)| {
                z.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if f_spread < nm.tol_f || diameter < nm.tol_x {
            return Ok(tally.finish(true));
        }
        if tally.exhausted() {
            return Ok(tally.finish(false));
        }

        let mut centroid = vec![0.0; n];
        for (z, _) in &simplex[..n] {
            for (c, zi) in centroid.iter_mut().zip(z) {
                *c += zi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let xr = combine(&centroid, &worst.0, -nm.reflection);
        let fr = tally.eval_unit(&xr);

        if fr < simplex[0].1 {
            if tally.exhausted() {
                simplex[n] = (xr, fr);
                continue;
            }
            let xe = combine(&centroid, &worst.0, -nm.reflection * nm.expansion);
            let fe = tally.eval_unit(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        if tally.exhausted() {
            if fr < worst.1 {
                simplex[n] = (xr, fr);
            }
            continue;
        }
        // contraction: outside if the reflection beat the worst, inside otherwise
        let (xc, fc) = if fr < worst.1 {
            let xc = combine(&centroid, &xr, nm.contraction);
            let fc = tally.eval_unit(&xc);
            (xc, fc)
        } else {
            let xc = combine(&centroid, &worst.0, nm.contraction);
            let fc = tally.eval_unit(&xc);
            (xc, fc)
        };
        if fc < fr.min(worst.1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if tally.exhausted() {
                break;
            }
            let z = combine(&best, &vertex.0, nm.shrink);
            let v = tally.eval_unit(&z);
            *vertex = (z, v);
        }
    }
}

/// Stream for restart `r` of a run seeded with `seed`.
pub fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn anneal_once<F>(
    f: &F,
    bounds: &SearchBox,
    start: &[f64],
    cfg: &OptimizerConfig,
    restart: usize,
    budget: usize,
    offset: usize,
) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let sa = &cfg.sa;
    let n = bounds.dim();
    let scales = broadcast("sa.proposal_scale", &sa.proposal_scale, n).expect("validated");
    let mut rng = restart_rng(cfg.seed, restart);
    let mut tally = Tally::new(f, bounds, budget, offset, cfg.record_trace);

    let mut z = bounds.unit_coords(start);
    let mut fz = tally.eval_unit(&z);
    let mut temperature = sa.initial_temperature;
    let mut step = 0usize;
    while !tally.exhausted() {
        let cand: Vec<f64> = z
            .iter()
            .zip(&scales)
            .map(|(zi, s)| {
                let g: f64 = rng.sample(StandardNormal);
                (zi + s * g).clamp(0.0, 1.0)
            })
            .collect();
        let fc = tally.eval_unit(&cand);
        let delta = fc - fz;
        // draw unconditionally so the stream position never depends on Δ
        let u: f64 = rng.random();
        let accept = delta <= 0.0 || u < (-delta / temperature).exp();
        if accept {
            z = cand;
            fz = fc;
        }
        step += 1;
        if step.is_multiple_of(sa.steps_per_epoch) {
            temperature *= sa.cooling_factor;
        }
    }
    tally.finish(false)
}

/// Simulated annealing with `cfg.sa.restarts` independent chains from `start`.
///
/// The evaluation budget is split across restarts; each restart draws from its
/// own ChaCha stream, so parallel and sequential runs agree bit for bit.
pub fn simulated_annealing<F>(f: &F, bounds: &SearchBox, start: &[f64], cfg: &OptimizerConfig) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = bounds.dim();
    if start.len() != n {
        return Err(TrpError::invalid("start", format!("has {} entries, expected {n}", start.len())));
    }
    cfg.validate(n)?;
    let restarts = cfg.sa.restarts.min(cfg.max_evals);
    let share = cfg.max_evals / restarts;
    let extra = cfg.max_evals % restarts;
    let budgets: Vec<(usize, usize)> = (0..restarts)
        .scan(0usize, |offset, r| {
            let b = share + usize::from(r < extra);
            let item = (b, *offset);
            *offset += b;
            Some(item)
        })
        .collect();
    let runs = par::map_range(cfg.execution, restarts, |r| {
        let (budget, offset) = budgets[r];
        anneal_once(f, bounds, start, cfg, r, budget, offset)
    });

    let mut best: Option<Minimum> = None;
    let mut trace = Vec::new();
    let mut evals = 0;
    for run in runs {
        evals += run.evals;
        trace.extend_from_slice(&run.trace);
        // strict < keeps the lowest restart index on ties
        if best.as_ref().is_none_or(|b| run.f < b.f) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    Ok(Minimum {
        x: best.x,
        f: best.f,
        evals,
        converged: false,
        trace,
    })
}

/// Free parameters with bounds, plus frozen values for the rest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpace {
    pub names: Vec<ParamName>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Starting point for the free parameters; box midpoint if absent.
    #[serde(default)]
    pub start: Option<Vec<f64>>,
    #[serde(default)]
    pub fixed: BTreeMap<ParamName, f64>,
}

impl ParameterSpace {
    /// Checks bounds and that free and fixed parameters partition what a
    /// `qubits`-qubit Hamiltonian needs.
    pub fn validate(&self, qubits: usize) -> Result<()> {
        let b = self.search_box()?;
        if b.dim() != self.names.len() {
            return Err(TrpError::invalid(
                "space",
                format!("{} names but {} bounds", self.names.len(), b.dim()),
            ));
        }
        let required = ParamName::required(qubits);
        for (i, name) in self.names.iter().enumerate() {
            if self.names[..i].contains(name) {
                return Err(TrpError::invalid(name.as_str(), "listed twice as free"));
            }
            if self.fixed.contains_key(name) {
                return Err(TrpError::invalid(name.as_str(), "both free and fixed"));
            }
            if !required.contains(name) {
                return Err(TrpError::invalid(
                    name.as_str(),
                    format!("not a parameter of a {qubits}-qubit gate"),
                ));
            }
        }
        for name in self.fixed.keys() {
            if !required.contains(name) {
                return Err(TrpError::invalid(
                    name.as_str(),
                    format!("not a parameter of a {qubits}-qubit gate"),
                ));
            }
        }
        for name in required {
            if !self.names.contains(name) && !self.fixed.contains_key(name) {
                return Err(TrpError::invalid(name.as_str(), "neither free nor fixed"));
            }
        }
        if let Some(s) = &self.start {
            if s.len() != self.names.len() {
                return Err(TrpError::invalid("start", "length must match the free parameters"));
            }
            if !b.contains(s) {
                return Err(TrpError::invalid("start", "lies outside the bounds"));
            }
        }
        Ok(())
    }

    pub fn search_box(&self) -> Result<SearchBox> {
        SearchBox::new(self.lower.clone(), self.upper.clone())
    }

    pub fn start_point(&self) -> Result<Vec<f64>> {
        match &self.start {
            Some(s) => Ok(s.clone()),
            None => Ok(self.search_box()?.midpoint()),
        }
    }

    /// Writes fixed values and then `point` into `values`.
    pub fn apply(&self, values: &mut ParamValues, point: &[f64]) -> Result<()> {
        for (name, v) in &self.fixed {
            values.set(*name, *v)?;
        }
        for (name, v) in self.names.iter().zip(point) {
            values.set(*name, *v)?;
        }
        Ok(())
    }

    /// Box of `±fraction·|value|` around the free parameters of `values`,
    /// starting at `values`; everything else required is frozen.
    pub fn around(values: &ParamValues, free: &[ParamName], fraction: f64, qubits: usize) -> Result<Self> {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut start = Vec::new();
        for name in free {
            let v = values
                .get(*name)
                .ok_or_else(|| TrpError::invalid(name.as_str(), "has no value to centre on"))?;
            let w = fraction * v.abs();
            lower.push(v - w);
            upper.push(v + w);
            start.push(v);
        }
        let fixed = ParamName::required(qubits)
            .iter()
            .filter(|n| !free.contains(n))
            .filter_map(|n| values.get(*n).map(|v| (*n, v)))
            .collect();
        let space = Self {
            names: free.to_vec(),
            lower,
            upper,
            start: Some(start),
            fixed,
        };
        space.validate(qubits)?;
        Ok(space)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub algorithm: Algorithm,
    /// Free and fixed parameter values at the best point.
    pub best_params: BTreeMap<ParamName, f64>,
    pub best_trace_p: f64,
    pub eval_count: usize,
    pub converged: bool,
    pub trace: Option<Vec<TracePoint>>,
    pub seed: u64,
}

/// Minimizes `objective` over `space` with the configured algorithm.
pub fn optimize<F>(objective: &F, space: &ParameterSpace, cfg: &OptimizerConfig) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let bounds = space.search_box()?;
    let start = space.start_point()?;
    let m = match cfg.algorithm {
        Algorithm::NelderMead => nelder_mead(objective, &bounds, &start, cfg)?,
        Algorithm::SimulatedAnnealing => simulated_annealing(objective, &bounds, &start, cfg)?,
    };
    let mut best_params: BTreeMap<ParamName, f64> = space.fixed.clone();
    for (name, v) in space.names.iter().zip(&m.x) {
        best_params.insert(*name, *v);
    }
    Ok(OptimizationResult {
        algorithm: cfg.algorithm,
        best_params,
        best_trace_p: m.f,
        eval_count: m.evals,
        converged: m.converged,
        trace: cfg.record_trace.then_some(m.trace),
        seed: cfg.seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub offset: f64,
    pub value: f64,
    pub trace_p: f64,
}

/// Evaluates `objective` at `base` with `name` shifted by each offset.
pub fn sensitivity_scan<F>(
    objective: &F,
    base: &ParamValues,
    name: ParamName,
    offsets: &[f64],
    exec: Execution,
) -> Result<Vec<ScanRow>>
where
    F: Fn(&ParamValues) -> Result<f64> + Sync,
{
    let centre = base
        .get(name)
        .ok_or_else(|| TrpError::invalid(name.as_str(), "not set for this gate"))?;
    let rows = par::map(exec, offsets, |&off| -> Result<ScanRow> {
        let mut v = *base;
        let value = centre + off;
        v.set(name, value)?;
        Ok(ScanRow {
            offset: off,
            value,
            trace_p: objective(&v)?,
        })
    });
    rows.into_iter().collect()
}
