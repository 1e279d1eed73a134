use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use trp_core::model::{GateFrame, GateName, ParamName, ParamValues, SweepParameters, SweepWindow};
use trp_core::optimize::{
    sensitivity_scan, simulated_annealing, Algorithm, OptimizerConfig, ParameterSpace,
};
use trp_core::{Execution, GateRun, PropagationPlan};

fn hadamard(steps: usize) -> GateRun {
    let sweep = SweepParameters::new(5.8511, 2.9280e-4, 80.0)
        .unwrap()
        .with_window(SweepWindow::Full);
    GateRun {
        target: GateName::Hadamard,
        params: ParamValues { sweep, system: None },
        plan: PropagationPlan::new(steps).unwrap(),
        schedule: None,
        frame: GateFrame::Adiabatic,
        allow_1q_symmetrization: false,
    }
}

fn executions() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn scan(c: &mut Criterion) {
    let run = hadamard(20_000);
    let offsets: Vec<f64> = (-8..8).map(|i| i as f64 * 1e-4).collect();
    let objective = |v: &ParamValues| run.trace_p_with(v);
    let mut g = c.benchmark_group("scan_16_points");
    g.sample_size(10);
    for (name, exec) in executions() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                sensitivity_scan(&objective, &run.params, ParamName::Lambda, black_box(&offsets), exec).unwrap()
            })
        });
    }
    g.finish();
}

fn annealing(c: &mut Criterion) {
    let run = hadamard(5_000);
    let space = ParameterSpace::around(&run.params, &[ParamName::Lambda, ParamName::Eta4], 0.01, 1).unwrap();
    let bounds = space.search_box().unwrap();
    let start = space.start_point().unwrap();
    let f = |x: &[f64]| run.objective(&space, x);
    let mut g = c.benchmark_group("annealing_4_restarts");
    g.sample_size(10);
    for (name, exec) in executions() {
        let cfg = OptimizerConfig {
            algorithm: Algorithm::SimulatedAnnealing,
            max_evals: 64,
            execution: exec,
            sa: trp_core::optimize::AnnealingConfig {
                restarts: 4,
                ..Default::default()
            },
            ..OptimizerConfig::default()
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| simulated_annealing(&f, &bounds, black_box(&start), &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, scan, annealing);
criterion_main!(benches);
