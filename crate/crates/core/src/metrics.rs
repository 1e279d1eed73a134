//! Gate error metrics for an applied/target pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrpError};
use crate::linalg::{HermitianMatrix, LinalgError, UnitaryMatrix};

/// Negative `Tr P` down to this is treated as roundoff and clamped to 0.
pub const ROUNDOFF_CLAMP: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

fn check_dims(ua: &UnitaryMatrix, ut: &UnitaryMatrix) -> Result<()> {
    if ua.dim() != ut.dim() {
        return Err(LinalgError::DimMismatch {
            left: ua.dim(),
            right: ut.dim(),
        }
        .into());
    }
    Ok(())
}

/// `P = (U_a − U_t)†(U_a − U_t)`
pub fn error_operator(ua: &UnitaryMatrix, ut: &UnitaryMatrix) -> Result<HermitianMatrix> {
    check_dims(ua, ut)?;
    let d = *ua.as_matrix() - *ut.as_matrix();
    Ok(HermitianMatrix::hermitian_part(&(d.adjoint() * d)))
}

/// `Re Tr(U_a†U_t)`
fn overlap(ua: &UnitaryMatrix, ut: &UnitaryMatrix) -> Complex64 {
    (ua.as_matrix().adjoint() * *ut.as_matrix()).trace()
}

/// `Tr P = ‖U_a − U_t‖_F²`.
///
/// Summing squared moduli avoids the cancellation in `2·2ⁿ − 2 Re Tr(U_a†U_t)`
/// when `Tr P` is small.
pub fn trace_p(ua: &UnitaryMatrix, ut: &UnitaryMatrix) -> Result<f64> {
    check_dims(ua, ut)?;
    Ok((*ua.as_matrix() - *ut.as_matrix()).frobenius_sq())
}

/// `Tr P` from the overlap form `2·2ⁿ − 2 Re Tr(U_a†U_t)`, with roundoff clamp.
pub fn trace_p_from_overlap(ua: &UnitaryMatrix, ut: &UnitaryMatrix) -> Result<f64> {
    check_dims(ua, ut)?;
    let v = 2.0 * ua.dim() as f64 - 2.0 * overlap(ua, ut).re;
    clamp_roundoff(v)
}

fn clamp_roundoff(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -ROUNDOFF_CLAMP {
        Ok(0.0)
    } else {
        Err(TrpError::Consistency(format!("Tr P = {v:e} is negative")))
    }
}

/// `F_n = Re Tr(U_a†U_t) / 2ⁿ`
pub fn fidelity(ua: &UnitaryMatrix, ut: &UnitaryMatrix, n: usize) -> Result<f64> {
    check_dims(ua, ut)?;
    if ua.dim() != 1 << n {
        return Err(TrpError::invalid(
            "n_qubits",
            format!("{n} qubits do not match dimension {}", ua.dim()),
        ));
    }
    Ok(overlap(ua, ut).re / ua.dim() as f64)
}

/// `⟨ψ|P|ψ⟩ = ‖(U_a − U_t)ψ‖²` for a normalized state.
pub fn pe_of_state(ua: &UnitaryMatrix, ut: &UnitaryMatrix, psi: &[Complex64]) -> Result<f64> {
    check_dims(ua, ut)?;
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(TrpError::invalid("psi", format!("state norm is {norm}, expected 1")));
    }
    let d = *ua.as_matrix() - *ut.as_matrix();
    Ok(d.apply(psi)?.iter().map(|z| z.norm_sqr()).sum())
}

/// `min_θ Tr P(e^{iθ}U_a, U_t) = 2·2ⁿ − 2|Tr(U_a†U_t)|`.
///
/// Global phase is physically irrelevant but this is not the reported metric.
pub fn phase_optimized_trace_p(ua: &UnitaryMatrix, ut: &UnitaryMatrix) -> Result<f64> {
    check_dims(ua, ut)?;
    clamp_roundoff(2.0 * ua.dim() as f64 - 2.0 * overlap(ua, ut).norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateMetrics {
    pub trace_p: f64,
    pub fidelity: f64,
    /// `Tr P`, the bound on the worst-case error probability.
    pub pe_upper_bound: f64,
    /// Largest eigenvalue of `P`, the worst-case error probability itself.
    pub pe_eigen_bound: f64,
    pub n_qubits: usize,
    /// Diagnostic: `Tr P` after removing the best global phase.
    pub phase_free_trace_p: f64,
}

impl GateMetrics {
    pub fn compute(ua: &UnitaryMatrix, ut: &UnitaryMatrix) -> Result<Self> {
        check_dims(ua, ut)?;
        let n_qubits = match ua.dim() {
            2 => 1,
            4 => 2,
            d => return Err(LinalgError::UnsupportedDim(d).into()),
        };
        let tp = trace_p(ua, ut)?;
        let p = error_operator(ua, ut)?;
        let top = *p.eigh()?.eigenvalues().last().expect("non-empty spectrum");
        Ok(Self {
            trace_p: tp,
            fidelity: fidelity(ua, ut, n_qubits)?,
            pe_upper_bound: tp,
            pe_eigen_bound: top.max(0.0),
            n_qubits,
            phase_free_trace_p: phase_optimized_trace_p(ua, ut)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, ComplexMatrix};

    fn u(m: ComplexMatrix) -> UnitaryMatrix {
        UnitaryMatrix::new(m).unwrap()
    }

    #[test]
    fn identical_gates() {
        let x = u(pauli::x());
        assert_eq!(trace_p(&x, &x).unwrap(), 0.0);
        assert_eq!(fidelity(&x, &x, 1).unwrap(), 1.0);
        assert_eq!(error_operator(&x, &x).unwrap().as_matrix().max_abs(), 0.0);
        let psi = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        assert_eq!(pe_of_state(&x, &x, &psi).unwrap(), 0.0);
    }

    #[test]
    fn antipodal_phase() {
        let a = u(pauli::z());
        let b = u(pauli::z().scale_real(-1.0));
        let p = error_operator(&a, &b).unwrap();
        assert!(p.as_matrix().max_diff(&ComplexMatrix::identity(2).unwrap().scale_real(4.0)) < 1e-15);
        assert_eq!(trace_p(&a, &b).unwrap(), 8.0);
        assert!(phase_optimized_trace_p(&a, &b).unwrap().abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = u(pauli::z());
        let b = UnitaryMatrix::identity(4).unwrap();
        assert!(trace_p(&a, &b).is_err());
        assert!(fidelity(&a, &a, 2).is_err());
        let psi = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(pe_of_state(&a, &a, &psi).is_err());
    }

    #[test]
    fn clamp_behaviour() {
        assert_eq!(clamp_roundoff(-5e-13).unwrap(), 0.0);
        assert!(clamp_roundoff(-1e-9).is_err());
    }
}
