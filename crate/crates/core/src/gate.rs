//! One fully specified gate simulation: target, parameters, integrator,
//! optional symmetrization and readout frame.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrpError};
use crate::linalg::UnitaryMatrix;
use crate::metrics::GateMetrics;
use crate::model::{
    target_gate, to_frame, GateFrame, GateName, OneQubitSweep, ParamValues, TwoQubitSweep,
};
use crate::optimize::{ParameterSpace, PENALTY};
use crate::propagate::{convergence_ladder, propagate, ConvergenceReport, PropagationPlan};
use crate::par::Execution;
use crate::symmetrize::{symmetrized_propagate, GroupName, SymmetrizationSchedule};

/// Serializable description of a symmetrization schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default)]
    pub group: GroupName,
    pub n_subintervals: usize,
    #[serde(default = "default_slices_per_subsub")]
    pub slices_per_subsub: usize,
}

fn default_slices_per_subsub() -> usize {
    4
}

impl ScheduleSpec {
    pub fn build(&self, dim: usize) -> Result<SymmetrizationSchedule> {
        SymmetrizationSchedule::new(self.group.build(dim)?, self.n_subintervals, self.slices_per_subsub)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRun {
    pub target: GateName,
    pub params: ParamValues,
    pub plan: PropagationPlan,
    pub schedule: Option<ScheduleSpec>,
    pub frame: GateFrame,
    /// Permit symmetrization of one-qubit gates.
    #[serde(default)]
    pub allow_1q_symmetrization: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateEvaluation {
    pub applied: UnitaryMatrix,
    pub metrics: GateMetrics,
}

impl GateRun {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.plan.validate()?;
        match (self.target.qubits(), self.params.system.is_some()) {
            (2, false) => {
                return Err(TrpError::invalid("system", "two-qubit targets need system parameters"))
            }
            (1, true) => {
                return Err(TrpError::invalid("system", "one-qubit targets take no system parameters"))
            }
            _ => {}
        }
        if let Some(s) = &self.schedule {
            if self.target.qubits() == 1 && !self.allow_1q_symmetrization {
                return Err(TrpError::invalid(
                    "schedule",
                    "symmetrization is for two-qubit targets (set allow_1q_symmetrization to override)",
                ));
            }
            let sched = s.build(self.target.dim())?;
            if self.plan.steps != sched.total_slices() {
                return Err(TrpError::Schedule(format!(
                    "plan.steps = {} but the schedule needs {}",
                    self.plan.steps,
                    sched.total_slices()
                )));
            }
        }
        Ok(())
    }

    /// Lab-frame propagator with the current parameters.
    pub fn propagator_with(&self, params: &ParamValues, plan: &PropagationPlan, schedule: Option<&ScheduleSpec>) -> Result<UnitaryMatrix> {
        let sweep = &params.sweep;
        let sched = schedule.map(|s| s.build(self.target.dim())).transpose()?;
        match (self.target.qubits(), params.system) {
            (1, _) => {
                let h = OneQubitSweep { sweep: *sweep };
                match &sched {
                    Some(s) => symmetrized_propagate(&h, sweep, s, plan),
                    None => propagate(&h, sweep, plan),
                }
            }
            (_, Some(system)) => {
                let h = TwoQubitSweep { sweep: *sweep, system };
                match &sched {
                    Some(s) => symmetrized_propagate(&h, sweep, s, plan),
                    None => propagate(&h, sweep, plan),
                }
            }
            (_, None) => Err(TrpError::invalid("system", "two-qubit targets need system parameters")),
        }
    }

    /// Applied gate in the configured frame.
    pub fn applied_gate_with(&self, params: &ParamValues) -> Result<UnitaryMatrix> {
        let u = self.propagator_with(params, &self.plan, self.schedule.as_ref())?;
        to_frame(&u, &params.sweep, self.frame)
    }

    pub fn evaluate_with(&self, params: &ParamValues) -> Result<GateEvaluation> {
        let applied = self.applied_gate_with(params)?;
        self.score(applied)
    }

    pub fn evaluate(&self) -> Result<GateEvaluation> {
        self.validate()?;
        self.evaluate_with(&self.params)
    }

    /// Metrics for an externally supplied applied gate.
    pub fn score(&self, applied: UnitaryMatrix) -> Result<GateEvaluation> {
        let target = target_gate(self.target);
        Ok(GateEvaluation {
            applied,
            metrics: GateMetrics::compute(&applied, &target.matrix)?,
        })
    }

    pub fn trace_p_with(&self, params: &ParamValues) -> Result<f64> {
        Ok(self.evaluate_with(params)?.metrics.trace_p)
    }

    /// `Tr P` at `point` of `space`, or [`PENALTY`] if the run fails.
    pub fn objective(&self, space: &ParameterSpace, point: &[f64]) -> f64 {
        let mut params = self.params;
        let result = space
            .apply(&mut params, point)
            .and_then(|_| params.validate())
            .and_then(|_| self.trace_p_with(&params));
        match result {
            Ok(v) if v.is_finite() => v,
            Ok(v) => {
                log::warn!("non-finite objective {v} at {point:?}");
                PENALTY
            }
            Err(e) => {
                log::warn!("objective failed at {point:?}: {e}");
                PENALTY
            }
        }
    }

    /// Step-doubling ladder on the integrator; metric is `Tr P` per level.
    pub fn step_convergence(&self, doublings: usize, exec: Execution) -> Result<ConvergenceReport> {
        if self.schedule.is_some() {
            return self.subdivision_convergence(doublings, exec);
        }
        convergence_ladder(exec, self.plan.steps, doublings, |n| {
            let u = self.propagator_with(&self.params, &self.plan.with_steps(n), None)?;
            let a = to_frame(&u, &self.params.sweep, self.frame)?;
            let m = self.score(a)?.metrics.trace_p;
            Ok((a, Some(m)))
        })
    }

    /// Integrator ladder for a symmetrized run: doubles the slices per
    /// sub-subinterval at fixed subinterval count.
    pub fn subdivision_convergence(&self, doublings: usize, exec: Execution) -> Result<ConvergenceReport> {
        let spec = self
            .schedule
            .ok_or_else(|| TrpError::invalid("schedule", "needs a symmetrization schedule"))?;
        convergence_ladder(exec, spec.slices_per_subsub, doublings, |k| {
            let s = ScheduleSpec {
                slices_per_subsub: k,
                ..spec
            };
            let plan = s.build(self.target.dim())?.aligned_plan(&self.plan);
            let u = self.propagator_with(&self.params, &plan, Some(&s))?;
            let a = to_frame(&u, &self.params.sweep, self.frame)?;
            let m = self.score(a)?.metrics.trace_p;
            Ok((a, Some(m)))
        })
    }

    /// Subinterval-doubling ladder at fixed slices per sub-subinterval.
    pub fn schedule_convergence(&self, base_n: usize, doublings: usize, exec: Execution) -> Result<ConvergenceReport> {
        let spec = self
            .schedule
            .ok_or_else(|| TrpError::invalid("schedule", "needs a symmetrization schedule"))?;
        convergence_ladder(exec, base_n, doublings, |n| {
            let s = ScheduleSpec {
                n_subintervals: n,
                ..spec
            };
            let plan = s.build(self.target.dim())?.aligned_plan(&self.plan);
            let u = self.propagator_with(&self.params, &plan, Some(&s))?;
            let a = to_frame(&u, &self.params.sweep, self.frame)?;
            let m = self.score(a)?.metrics.trace_p;
            Ok((a, Some(m)))
        })
    }
}
