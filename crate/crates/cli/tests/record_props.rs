use chrono::{TimeZone, Utc};
use proptest::prelude::*;
use trp_cli::config::{preset, parse_document, into_config};
use trp_cli::record::{MatrixParts, RunRecord, SCHEMA_VERSION};
use trp_cli::Command;
use trp_core::GateMetrics;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -1.0f64..1.0,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(5e-324),
    ]
}

fn record(vals: Vec<f64>, seed: u64, micros: i64) -> RunRecord {
    let mut config = into_config(parse_document(preset("vcp-symmetrized").unwrap(), "t").unwrap()).unwrap();
    config.sweep.eta4 = vals[0];
    config.system.as_mut().unwrap().d4 = vals[1];
    RunRecord {
        schema_version: SCHEMA_VERSION,
        command: Command::Simulate,
        timestamp: Utc.timestamp_micros(micros).unwrap(),
        config,
        metrics: GateMetrics {
            trace_p: vals[2],
            fidelity: vals[3],
            pe_upper_bound: vals[2],
            pe_eigen_bound: vals[4],
            n_qubits: 2,
            phase_free_trace_p: vals[5],
        },
        applied_gate: MatrixParts {
            re: vals[6..10].chunks(2).map(<[f64]>::to_vec).collect(),
            im: vals[10..14].chunks(2).map(<[f64]>::to_vec).collect(),
        },
        seed,
        wall_time_s: vals[14],
        optimization: None,
        scan_row: None,
        convergence: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn records_round_trip_bit_for_bit(
        vals in prop::collection::vec(finite(), 15),
        seed in any::<u64>(),
        micros in 0i64..4_102_444_800_000_000,
    ) {
        let r = record(vals.clone(), seed, micros);
        let line = serde_json::to_string(&r).unwrap();
        prop_assert!(!line.contains('\n'));
        let back: RunRecord = serde_json::from_str(&line).unwrap();
        prop_assert_eq!(back.metrics.trace_p.to_bits(), r.metrics.trace_p.to_bits());
        prop_assert_eq!(back.config.sweep.eta4.to_bits(), r.config.sweep.eta4.to_bits());
        for (a, b) in back.applied_gate.re.iter().flatten().zip(r.applied_gate.re.iter().flatten()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(back, r);
    }
}
