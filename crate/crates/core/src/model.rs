//! Sweep parameters, the one- and two-qubit TRP Hamiltonians and the target gates.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrpError};
use crate::linalg::{pauli, ComplexMatrix, HermitianMatrix, LinalgError, UnitaryMatrix};
use crate::propagate::HamiltonianSource;

/// Default reduced Planck constant for lab-unit conversions (natural units).
pub const HBAR: f64 = 1.0;

/// Smallest allowed gap between the two highest base levels.
pub const E4_GAP_TOL: f64 = 1e-9;

/// Sense in which the transverse field twists about z.
///
/// `Resonant` uses `cos φ σx − sin φ σy` inside the bracket, for which the
/// rotating-frame longitudinal field is `τ − η₄τ³` and the sweep passes through
/// resonance at `τ = 0, ±η₄^{-1/2}`. `AsPrinted` flips the σy sign.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwistSense {
    #[default]
    Resonant,
    AsPrinted,
}

impl TwistSense {
    /// Coefficient of `sin φ σy` inside the field bracket.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            TwistSense::Resonant => -1.0,
            TwistSense::AsPrinted => 1.0,
        }
    }
}

/// Time window swept by a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepWindow {
    /// `τ ∈ [−τ₀/2, τ₀/2]`
    #[default]
    Half,
    /// `τ ∈ [−τ₀, τ₀]`
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParameters {
    pub lambda: f64,
    pub eta4: f64,
    pub tau0: f64,
    #[serde(default)]
    pub window: SweepWindow,
    #[serde(default)]
    pub twist: TwistSense,
}

impl SweepParameters {
    pub fn new(lambda: f64, eta4: f64, tau0: f64) -> Result<Self> {
        let p = Self {
            lambda,
            eta4,
            tau0,
            window: SweepWindow::Half,
            twist: TwistSense::Resonant,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_window(mut self, window: SweepWindow) -> Self {
        self.window = window;
        self
    }

    pub fn with_twist(mut self, twist: TwistSense) -> Self {
        self.twist = twist;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda", self.lambda), ("eta4", self.eta4), ("tau0", self.tau0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(TrpError::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Start and end of the swept interval.
    pub fn interval(&self) -> (f64, f64) {
        let half = match self.window {
            SweepWindow::Half => 0.5 * self.tau0,
            SweepWindow::Full => self.tau0,
        };
        (-half, half)
    }

    pub fn duration(&self) -> f64 {
        let (a, b) = self.interval();
        b - a
    }

    #[inline]
    pub fn phase(&self, tau: f64) -> f64 {
        phase_quartic(tau, self)
    }
}

/// `φ₄(τ) = (η₄/2λ)·τ⁴`
#[inline]
pub fn phase_quartic(tau: f64, p: &SweepParameters) -> f64 {
    let t2 = tau * tau;
    p.eta4 / (2.0 * p.lambda) * t2 * t2
}

/// `dφ₄/dτ = (2η₄/λ)·τ³`
#[inline]
pub fn phase_quartic_rate(tau: f64, p: &SweepParameters) -> f64 {
    2.0 * p.eta4 / p.lambda * tau * tau * tau
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRoot {
    pub tau: f64,
    pub inside_window: bool,
}

/// Roots of `τ − η₄τ³ = 0`, ascending, with a flag for the configured window.
pub fn resonance_times(p: &SweepParameters) -> Vec<ResonanceRoot> {
    let r = p.eta4.powf(-0.5);
    let (lo, hi) = p.interval();
    [-r, 0.0, r]
        .into_iter()
        .map(|tau| ResonanceRoot {
            tau,
            inside_window: tau >= lo && tau <= hi,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneQubitLabParameters {
    /// inversion rate
    pub a: f64,
    /// transverse field strength
    pub b: f64,
    /// quartic twist strength
    pub twist_b: f64,
    /// inversion time
    pub t0: f64,
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(TrpError::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

fn require_nonzero(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v != 0.0 {
        Ok(())
    } else {
        Err(TrpError::invalid(name, format!("must be finite and nonzero, got {v}")))
    }
}

/// `λ = ħa/b²`, `η₄ = ħBb²/a³`, `τ₀ = (a/b)T₀`.
pub fn lab_to_dimensionless_1q(q: &OneQubitLabParameters, hbar: f64) -> Result<SweepParameters> {
    require_positive("a", q.a)?;
    require_positive("b", q.b)?;
    require_positive("t0", q.t0)?;
    require_positive("hbar", hbar)?;
    SweepParameters::new(
        hbar * q.a / (q.b * q.b),
        hbar * q.twist_b * q.b * q.b / q.a.powi(3),
        q.a / q.b * q.t0,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitLabParameters {
    pub gamma1: f64,
    pub gamma2: f64,
    /// rf field amplitude
    pub brf: f64,
    /// static field
    pub b0: f64,
    pub delta: f64,
    /// Ising coupling
    pub j: f64,
    pub a: f64,
    pub twist_b: f64,
    pub t0: f64,
}

/// Converts lab parameters for the two-qubit system; `c4` has no lab image
/// and is passed through.
pub fn lab_to_dimensionless_2q(
    q: &TwoQubitLabParameters,
    c4: f64,
    hbar: f64,
) -> Result<(SweepParameters, TwoQubitSystemParameters)> {
    require_nonzero("gamma2", q.gamma2)?;
    require_nonzero("brf", q.brf)?;
    require_nonzero("b0", q.b0)?;
    require_nonzero("a", q.a)?;
    require_positive("hbar", hbar)?;
    let b1 = hbar * q.gamma1 * q.brf / 2.0;
    let b2 = hbar * q.gamma2 * q.brf / 2.0;
    let w1 = q.gamma1 * q.b0;
    let w2 = q.gamma2 * q.b0;
    let sweep = SweepParameters::new(
        hbar * q.a / (b2 * b2),
        hbar * q.twist_b * b2 * b2 / q.a.powi(3),
        q.a / b2 * q.t0,
    )?;
    let system = TwoQubitSystemParameters {
        c4,
        d1: (w1 - w2) * b2 / q.a,
        d2: q.delta / q.a * b2,
        d3: b1 / b2,
        d4: q.j / q.a * b2,
    };
    system.validate()?;
    Ok((sweep, system))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoQubitSystemParameters {
    pub c4: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
}

impl TwoQubitSystemParameters {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c4", self.c4),
            ("d1", self.d1),
            ("d2", self.d2),
            ("d3", self.d3),
            ("d4", self.d4),
        ] {
            if !v.is_finite() {
                return Err(TrpError::invalid(name, format!("must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `−(1/λ)(τσz + cos φ σx ∓ sin φ σy)`, sign of σy set by the twist sense.
pub fn build_h1(tau: f64, p: &SweepParameters) -> Result<HermitianMatrix> {
    let inv = 1.0 / p.lambda;
    let phi = phase_quartic(tau, p);
    // cos φ σx + s sin φ σy has (0,1) entry e^{−isφ}
    let off = Complex64::from_polar(1.0, -p.twist.sign() * phi) * (-inv);
    let m = ComplexMatrix::from_row_major(&[
        cplx(-inv * tau, 0.0),
        off,
        off.conj(),
        cplx(inv * tau, 0.0),
    ])?;
    Ok(HermitianMatrix::hermitian_part(&m))
}

/// Coefficients `(a₀, a_x, a_y, a_z)` with `h = a₀I + a·σ`.
pub fn pauli_coefficients(h: &HermitianMatrix) -> Result<[f64; 4]> {
    if h.dim() != 2 {
        return Err(TrpError::Unsupported(format!(
            "Pauli decomposition needs a 2x2 matrix, got {}",
            h.dim()
        )));
    }
    let m = h.as_matrix();
    Ok([
        0.5 * (m[(0, 0)].re + m[(1, 1)].re),
        m[(0, 1)].re,
        -m[(0, 1)].im,
        0.5 * (m[(0, 0)].re - m[(1, 1)].re),
    ])
}

/// Sum of the first five terms of the two-qubit Hamiltonian (everything but
/// the `c₄` projector term).
pub fn build_h2_base(
    tau: f64,
    p: &SweepParameters,
    s: &TwoQubitSystemParameters,
) -> Result<HermitianMatrix> {
    let inv = 1.0 / p.lambda;
    let phi = phase_quartic(tau, p);
    let twist = Complex64::from_polar(1.0, -p.twist.sign() * phi);
    let z1 = -(s.d1 + s.d2) / 2.0 + tau * inv;
    let z2 = -s.d2 / 2.0 + tau * inv;
    let zz = -PI * s.d4 / 2.0;
    let t1 = twist * (-s.d3 * inv);
    let t2 = twist * (-inv);

    let mut m = ComplexMatrix::zeros(4).expect("dim 4");
    let zs = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    for (k, (a, b)) in zs.iter().enumerate() {
        m[(k, k)] = cplx(z1 * a + z2 * b + zz * a * b, 0.0);
    }
    // qubit 1 flips |0x⟩ ↔ |1x⟩, qubit 2 flips |x0⟩ ↔ |x1⟩
    for low in [0usize, 1] {
        m[(low, low + 2)] = t1;
        m[(low + 2, low)] = t1.conj();
    }
    for high in [0usize, 2] {
        m[(high, high + 1)] = t2;
        m[(high + 1, high)] = t2.conj();
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite.into());
    }
    Ok(HermitianMatrix::hermitian_part(&m))
}

/// `|E₄⟩⟨E₄|` for the highest eigenstate of `base`.
pub fn project_e4(base: &HermitianMatrix) -> Result<HermitianMatrix> {
    let e = base.eigh()?;
    let n = e.dim();
    let vals = e.eigenvalues();
    let gap = vals[n - 1] - vals[n - 2];
    if gap < E4_GAP_TOL {
        return Err(TrpError::DegenerateTopLevel { tau: f64::NAN, gap });
    }
    Ok(e.projector(n - 1))
}

/// Full two-qubit Hamiltonian, `base + c₄|E₄⟩⟨E₄|`.
pub fn build_h2(
    tau: f64,
    p: &SweepParameters,
    s: &TwoQubitSystemParameters,
) -> Result<HermitianMatrix> {
    let base = build_h2_base(tau, p, s).map_err(|e| e.at_time(tau))?;
    let proj = project_e4(&base).map_err(|e| match e {
        TrpError::DegenerateTopLevel { gap, .. } => TrpError::DegenerateTopLevel { tau, gap },
        other => other.at_time(tau),
    })?;
    Ok(HermitianMatrix::combine(&[(1.0, &base), (s.c4, &proj)])?)
}

/// One-qubit TRP sweep as a Hamiltonian source.
#[derive(Clone, Copy, Debug)]
pub struct OneQubitSweep {
    pub sweep: SweepParameters,
}

impl HamiltonianSource for OneQubitSweep {
    fn dim(&self) -> usize {
        2
    }

    fn hamiltonian(&self, tau: f64) -> Result<HermitianMatrix> {
        build_h1(tau, &self.sweep).map_err(|e| e.at_time(tau))
    }
}

/// Two-qubit TRP sweep with Ising coupling and the `c₄` level shift.
#[derive(Clone, Copy, Debug)]
pub struct TwoQubitSweep {
    pub sweep: SweepParameters,
    pub system: TwoQubitSystemParameters,
}

impl HamiltonianSource for TwoQubitSweep {
    fn dim(&self) -> usize {
        4
    }

    fn hamiltonian(&self, tau: f64) -> Result<HermitianMatrix> {
        build_h2(tau, &self.sweep, &self.system)
    }

    /// The projector term shares eigenvectors with the base, so one
    /// decomposition of the base serves the whole slice.
    fn slice_propagator(&self, tau: f64, dt: f64) -> Result<UnitaryMatrix> {
        let base = build_h2_base(tau, &self.sweep, &self.system).map_err(|e| e.at_time(tau))?;
        let e = base.eigh().map_err(|err| TrpError::from(err).at_time(tau))?;
        let vals = e.eigenvalues();
        let gap = vals[3] - vals[2];
        if gap < E4_GAP_TOL {
            return Err(TrpError::DegenerateTopLevel { tau, gap });
        }
        Ok(e.with_shift(3, self.system.c4).propagator(dt))
    }
}

/// Frame in which the applied gate is read off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateFrame {
    /// Computational basis, `U(τ_start) = I`.
    #[default]
    Lab,
    /// Instantaneous eigenbasis of the co-rotating field at both ends of the sweep.
    Adiabatic,
}

/// Co-rotating dressed basis `R(φ)·B(τ)` for one qubit.
///
/// `B` holds the spin-coherent eigenvectors of the untwisted field direction
/// `θ = atan2(1, τ)`, ordered so column 0 is the one connected to `|↑⟩`.
pub fn dressed_basis_1q(tau: f64, p: &SweepParameters) -> Result<UnitaryMatrix> {
    let theta = 1f64.atan2(tau);
    let (s, c) = (0.5 * theta).sin_cos();
    let plus = [c, s];
    let minus = [s, -c];
    let (col0, col1) = if plus[0].abs() >= minus[0].abs() {
        (plus, minus)
    } else {
        (minus, plus)
    };
    let half = -0.5 * p.twist.sign() * phase_quartic(tau, p);
    let r0 = Complex64::from_polar(1.0, half);
    let r1 = Complex64::from_polar(1.0, -half);
    let m = ComplexMatrix::from_row_major(&[
        r0 * col0[0],
        r0 * col1[0],
        r1 * col0[1],
        r1 * col1[1],
    ])?;
    Ok(UnitaryMatrix::new(m)?)
}

/// Re-expresses a lab-frame propagator `U` over the configured window in `frame`.
pub fn to_frame(u: &UnitaryMatrix, p: &SweepParameters, frame: GateFrame) -> Result<UnitaryMatrix> {
    match frame {
        GateFrame::Lab => Ok(*u),
        GateFrame::Adiabatic => {
            if u.dim() != 2 {
                return Err(TrpError::Unsupported(
                    "adiabatic gate frame is defined for one qubit only".into(),
                ));
            }
            let (ti, tf) = p.interval();
            let di = dressed_basis_1q(ti, p)?;
            let df = dressed_basis_1q(tf, p)?;
            Ok(df.adjoint() * *u * di)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateName {
    Hadamard,
    Not,
    ModifiedPi8,
    ModifiedPhase,
    ModifiedControlledPhase,
}

impl GateName {
    pub const ALL: [GateName; 5] = [
        GateName::Hadamard,
        GateName::Not,
        GateName::ModifiedPi8,
        GateName::ModifiedPhase,
        GateName::ModifiedControlledPhase,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::Hadamard => "hadamard",
            GateName::Not => "not",
            GateName::ModifiedPi8 => "modified_pi8",
            GateName::ModifiedPhase => "modified_phase",
            GateName::ModifiedControlledPhase => "modified_controlled_phase",
        }
    }

    pub fn qubits(self) -> usize {
        match self {
            GateName::ModifiedControlledPhase => 2,
            _ => 1,
        }
    }

    pub fn dim(self) -> usize {
        1 << self.qubits()
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateName {
    type Err = TrpError;
    fn from_str(s: &str) -> Result<Self> {
        GateName::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| TrpError::UnknownName(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateTarget {
    pub name: GateName,
    pub matrix: UnitaryMatrix,
    pub qubits: usize,
}

pub fn target_gate(name: GateName) -> GateTarget {
    let m = match name {
        GateName::Hadamard => (pauli::z() + pauli::x()).scale_real(FRAC_1_SQRT_2),
        GateName::Not => pauli::x(),
        GateName::ModifiedPi8 => {
            pauli::x().scale_real(FRAC_PI_8.cos()) - pauli::y().scale_real(FRAC_PI_8.sin())
        }
        GateName::ModifiedPhase => (pauli::x() - pauli::y()).scale_real(FRAC_1_SQRT_2),
        GateName::ModifiedControlledPhase => {
            ComplexMatrix::diag_real(&[1.0, 1.0, -1.0, 1.0]).expect("dim 4")
        }
    };
    GateTarget {
        name,
        matrix: UnitaryMatrix::new(m).expect("target gates are unitary"),
        qubits: name.qubits(),
    }
}

/// Every parameter a gate Hamiltonian can depend on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    Lambda,
    Eta4,
    Tau0,
    C4,
    D1,
    D2,
    D3,
    D4,
}

impl ParamName {
    pub const ALL: [ParamName; 8] = [
        ParamName::Lambda,
        ParamName::Eta4,
        ParamName::Tau0,
        ParamName::C4,
        ParamName::D1,
        ParamName::D2,
        ParamName::D3,
        ParamName::D4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Lambda => "lambda",
            ParamName::Eta4 => "eta4",
            ParamName::Tau0 => "tau0",
            ParamName::C4 => "c4",
            ParamName::D1 => "d1",
            ParamName::D2 => "d2",
            ParamName::D3 => "d3",
            ParamName::D4 => "d4",
        }
    }

    pub fn is_sweep(self) -> bool {
        matches!(self, ParamName::Lambda | ParamName::Eta4 | ParamName::Tau0)
    }

    /// Parameters the Hamiltonian for a gate of `qubits` qubits needs.
    pub fn required(qubits: usize) -> &'static [ParamName] {
        if qubits == 1 {
            &ParamName::ALL[..3]
        } else {
            &ParamName::ALL
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = TrpError;
    fn from_str(s: &str) -> Result<Self> {
        ParamName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| TrpError::UnknownName(s.to_string()))
    }
}

/// Sweep plus optional system parameters, addressable by [`ParamName`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamValues {
    pub sweep: SweepParameters,
    pub system: Option<TwoQubitSystemParameters>,
}

impl ParamValues {
    pub fn get(&self, name: ParamName) -> Option<f64> {
        match name {
            ParamName::Lambda => Some(self.sweep.lambda),
            ParamName::Eta4 => Some(self.sweep.eta4),
            ParamName::Tau0 => Some(self.sweep.tau0),
            _ => self.system.map(|s| match name {
                ParamName::C4 => s.c4,
                ParamName::D1 => s.d1,
                ParamName::D2 => s.d2,
                ParamName::D3 => s.d3,
                _ => s.d4,
            }),
        }
    }

    pub fn set(&mut self, name: ParamName, value: f64) -> Result<()> {
        match name {
            ParamName::Lambda => self.sweep.lambda = value,
            ParamName::Eta4 => self.sweep.eta4 = value,
            ParamName::Tau0 => self.sweep.tau0 = value,
            _ => {
                let s = self.system.as_mut().ok_or_else(|| {
                    TrpError::invalid(name.as_str(), "one-qubit runs have no system parameters")
                })?;
                match name {
                    ParamName::C4 => s.c4 = value,
                    ParamName::D1 => s.d1 = value,
                    ParamName::D2 => s.d2 = value,
                    ParamName::D3 => s.d3 = value,
                    _ => s.d4 = value,
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.sweep.validate()?;
        if let Some(s) = &self.system {
            s.validate()?;
        }
        Ok(())
    }
}
