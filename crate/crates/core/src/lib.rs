//! Twisted-rapid-passage gate simulation.
//!
//! Integrates one- and two-qubit sweeps, optionally interleaved with
//! group-symmetrizing pulses, scores the resulting unitary against a target
//! gate and searches sweep/system parameters to minimize the gate error.

pub mod error;
pub mod gate;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod optimize;
pub mod par;
pub mod propagate;
pub mod symmetrize;

pub use error::{Result, TrpError};
pub use gate::{GateEvaluation, GateRun, ScheduleSpec};
pub use linalg::{ComplexMatrix, EigenDecomposition, HermitianMatrix, UnitaryMatrix};
pub use metrics::GateMetrics;
pub use model::{
    GateFrame, GateName, GateTarget, ParamName, ParamValues, SweepParameters, SweepWindow,
    TwistSense, TwoQubitSystemParameters,
};
pub use par::Execution;
pub use propagate::{IntegrationRule, PropagationPlan};
pub use symmetrize::{GroupName, SymmetrizationSchedule, SymmetryGroup};
