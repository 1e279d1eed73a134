//! Published reference values the acceptance target compares against.

/// One-qubit rows: gate name, λ, η₄, Tr P, fidelity. All at τ₀ = 80.
pub const ONE_QUBIT_ROWS: [(&str, f64, f64, f64, f64); 4] = [
    ("hadamard", 5.8511, 2.9280e-4, 8.82e-6, 0.999998),
    ("not", 7.3205, 2.9277e-4, 1.10e-5, 0.999997),
    ("modified_pi8", 6.0150, 8.1464e-4, 3.03e-5, 0.999992),
    ("modified_phase", 5.9750, 3.8060e-4, 8.20e-5, 0.999980),
];

/// Presets reproducing [`ONE_QUBIT_ROWS`], in the same order.
pub const ONE_QUBIT_PRESETS: [&str; 4] = ["table1-hadamard", "table1-not", "table1-pi8", "table1-phase"];

pub const VCP_TRACE_P: f64 = 8.87e-5;
pub const VCP_FIDELITY: f64 = 0.999989;

/// Published real part of the symmetrized controlled-phase gate.
pub const VCP_RE: [[f64; 4]; 4] = [
    [0.999998, -0.000003, -0.000015, -0.000014],
    [0.000003, 0.999997, 0.000036, 0.000261],
    [-0.000015, 0.000034, -0.999980, -0.003818],
    [-0.000014, -0.000257, -0.003838, 0.999981],
];

/// Published imaginary part of the symmetrized controlled-phase gate.
pub const VCP_IM: [[f64; 4]; 4] = [
    [-0.002151, 0.000003, -0.000010, -0.000073],
    [-0.000003, -0.002180, 0.000140, -0.000325],
    [0.000010, -0.001140, 0.001702, 0.004534],
    [-0.000073, -0.000328, -0.004521, -0.001778],
];

/// Sensitivity rows: (value, Tr P).
pub const C4_SCAN: [(f64, f64); 3] = [(2.172, 6.79e-3), (2.173, 8.87e-5), (2.174, 7.73e-3)];
pub const D4_SCAN: [(f64, f64); 3] = [(0.8346, 1.52e-3), (0.8347, 8.87e-5), (0.8348, 1.52e-3)];
