//! Group-symmetrized propagation with instantaneous pulses.
//!
//! The sweep is cut into `N` subintervals, each into `|G|` sub-subintervals.
//! Within a subinterval the state sees `ρ₁†δU₁ρ₁`, then `ρ₂†δU₂ρ₂`, and so on:
//! between sub-subintervals the pulse `ρ_{j+1}ρ_j†` is applied and the
//! subinterval closes with `ρ_{|G|}†`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrpError};
use crate::linalg::{pauli, ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use crate::model::SweepParameters;
use crate::propagate::{evolve_slices, HamiltonianSource, PropagationPlan};

const ELEMENT_UNITARY_TOL: f64 = 1e-12;
const CLOSURE_TOL: f64 = 1e-10;

/// Finite unitary group with `ρ₁ = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryGroup {
    elements: Vec<UnitaryMatrix>,
}

/// `true` if `a = e^{iθ}·b` for some θ.
fn equal_up_to_phase(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    let overlap = (a.adjoint() * *b).trace();
    if overlap.norm() < 1e-300 {
        return false;
    }
    let phase = overlap / overlap.norm();
    a.max_diff(&b.scale(phase.conj())) <= tol
}

impl SymmetryGroup {
    pub fn new(elements: Vec<UnitaryMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| TrpError::invalid("group", "must have at least one element"))?;
        let dim = first.dim();
        if *first.as_matrix() != ComplexMatrix::identity(dim)? {
            return Err(TrpError::invalid("group", "first element must be the identity"));
        }
        for (i, r) in elements.iter().enumerate() {
            if r.dim() != dim {
                return Err(TrpError::invalid("group", format!("element {i} has dimension {}", r.dim())));
            }
            let defect = r.as_matrix().unitarity_defect();
            if defect > ELEMENT_UNITARY_TOL {
                return Err(TrpError::invalid(
                    "group",
                    format!("element {i} unitarity defect {defect:e}"),
                ));
            }
        }
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                let prod = *a.as_matrix() * *b.as_matrix();
                if !elements
                    .iter()
                    .any(|c| equal_up_to_phase(&prod, c.as_matrix(), CLOSURE_TOL))
                {
                    return Err(TrpError::invalid(
                        "group",
                        format!("not closed: product of elements {i} and {j} is not in the set"),
                    ));
                }
            }
        }
        Ok(Self { elements })
    }

    pub fn trivial(dim: usize) -> Result<Self> {
        Self::new(vec![UnitaryMatrix::identity(dim)?])
    }

    /// `{I, σz}` on one qubit.
    pub fn z_parity_1q() -> Self {
        Self::new(vec![
            UnitaryMatrix::identity(2).expect("dim 2"),
            UnitaryMatrix::new(pauli::z()).expect("σz"),
        ])
        .expect("valid group")
    }

    /// `{I⊗I, σz⊗I, I⊗σz, σz⊗σz}`, the symmetry group of the controlled-phase target.
    pub fn z_parity_2q() -> Self {
        let i = pauli::identity();
        let z = pauli::z();
        let el = |a: &ComplexMatrix, b: &ComplexMatrix| {
            UnitaryMatrix::new(a.tensor(b).expect("2x2 factors")).expect("unitary")
        };
        Self::new(vec![el(&i, &i), el(&z, &i), el(&i, &z), el(&z, &z)]).expect("valid group")
    }

    pub fn elements(&self) -> &[UnitaryMatrix] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

/// Named groups for configuration files.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupName {
    Trivial,
    #[serde(rename = "z_parity_1q")]
    ZParity1q,
    #[default]
    #[serde(rename = "z_parity_2q")]
    ZParity2q,
}

impl GroupName {
    pub fn build(self, dim: usize) -> Result<SymmetryGroup> {
        let g = match self {
            GroupName::Trivial => SymmetryGroup::trivial(dim)?,
            GroupName::ZParity1q => SymmetryGroup::z_parity_1q(),
            GroupName::ZParity2q => SymmetryGroup::z_parity_2q(),
        };
        if g.dim() != dim {
            return Err(TrpError::invalid(
                "group",
                format!("group acts on dimension {}, system has {dim}", g.dim()),
            ));
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetrizationSchedule {
    pub group: SymmetryGroup,
    pub n_subintervals: usize,
    pub slices_per_subsub: usize,
}

impl SymmetrizationSchedule {
    pub fn new(group: SymmetryGroup, n_subintervals: usize, slices_per_subsub: usize) -> Result<Self> {
        if n_subintervals == 0 {
            return Err(TrpError::invalid("n_subintervals", "must be at least 1"));
        }
        if slices_per_subsub == 0 {
            return Err(TrpError::invalid("slices_per_subsub", "must be at least 1"));
        }
        Ok(Self {
            group,
            n_subintervals,
            slices_per_subsub,
        })
    }

    /// Integrator slices over the whole sweep.
    pub fn total_slices(&self) -> usize {
        self.n_subintervals * self.group.order() * self.slices_per_subsub
    }

    /// Pulses applied per subinterval, counting the closing one.
    pub fn pulses_per_subinterval(&self) -> usize {
        self.group.order()
    }

    /// Plan whose slices line up with this schedule.
    pub fn aligned_plan(&self, base: &PropagationPlan) -> PropagationPlan {
        base.with_steps(self.total_slices())
    }
}

/// Bound on the subinterval length and the smallest `N` meeting it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubintervalEstimate {
    /// `ratio · φ_f / φ̇(τ₀/2) = ratio · τ₀/8`
    pub dt_bound: f64,
    pub n_subintervals: usize,
}

/// Smallest `N` with `τ₀/N < ratio·τ₀/8`, i.e. twist change per subinterval
/// below `ratio` of the final twist angle.
pub fn min_subintervals(p: &SweepParameters, ratio: f64) -> Result<SubintervalEstimate> {
    if ratio.is_nan() || ratio <= 0.0 {
        return Err(TrpError::invalid("ratio", format!("must be > 0, got {ratio}")));
    }
    let dt_bound = ratio * p.tau0 / 8.0;
    // τ₀/N < ratio·τ₀/8  ⇔  N > 8/ratio; snap near-integers so 1600.0000000002 counts as 1600
    let x = 8.0 / ratio;
    let snapped = if (x - x.round()).abs() <= 1e-9 * x.max(1.0) {
        x.round()
    } else {
        x.floor()
    };
    let n = if snapped.is_finite() && snapped < usize::MAX as f64 {
        snapped as usize + 1
    } else {
        return Err(TrpError::invalid("ratio", "bound needs more subintervals than representable"));
    };
    Ok(SubintervalEstimate {
        dt_bound,
        n_subintervals: n,
    })
}

/// `H̃ = (1/|G|) Σ ρᵢ† H ρᵢ`
pub fn effective_hamiltonian(h: &HermitianMatrix, g: &SymmetryGroup) -> Result<HermitianMatrix> {
    if h.dim() != g.dim() {
        return Err(TrpError::Linalg(crate::linalg::LinalgError::DimMismatch {
            left: h.dim(),
            right: g.dim(),
        }));
    }
    let mut acc = ComplexMatrix::zeros(h.dim())?;
    for r in g.elements() {
        let m = r.as_matrix();
        acc = acc + m.adjoint() * *h.as_matrix() * *m;
    }
    Ok(HermitianMatrix::hermitian_part(
        &acc.scale_real(1.0 / g.order() as f64),
    ))
}

struct Pulse {
    m: ComplexMatrix,
    identity: bool,
}

impl Pulse {
    fn new(m: ComplexMatrix) -> Self {
        let identity = m == ComplexMatrix::identity(m.dim()).expect("valid dim");
        Self { m, identity }
    }

    #[inline]
    fn apply(&self, u: ComplexMatrix) -> ComplexMatrix {
        if self.identity {
            u
        } else {
            self.m * u
        }
    }
}

/// Propagator over the sweep window with the schedule's pulses interleaved.
pub fn symmetrized_propagate<H: HamiltonianSource + ?Sized>(
    h: &H,
    p: &SweepParameters,
    sched: &SymmetrizationSchedule,
    plan: &PropagationPlan,
) -> Result<UnitaryMatrix> {
    plan.validate()?;
    if plan.steps != sched.total_slices() {
        return Err(TrpError::Schedule(format!(
            "plan has {} slices but the schedule needs N·|G|·k = {}·{}·{} = {}",
            plan.steps,
            sched.n_subintervals,
            sched.group.order(),
            sched.slices_per_subsub,
            sched.total_slices()
        )));
    }
    let dim = h.dim();
    if sched.group.dim() != dim {
        return Err(TrpError::Schedule(format!(
            "group acts on dimension {}, Hamiltonian has {dim}",
            sched.group.dim()
        )));
    }

    let els = sched.group.elements();
    let order = els.len();
    // transitions[j]: pulse after sub-subinterval j
    let transitions: Vec<Pulse> = (0..order)
        .map(|j| {
            let cur = els[j].as_matrix().adjoint();
            if j + 1 < order {
                Pulse::new(*els[j + 1].as_matrix() * cur)
            } else {
                Pulse::new(cur)
            }
        })
        .collect();

    let (start, end) = p.interval();
    let n_sub = order * sched.n_subintervals;
    let k = sched.slices_per_subsub;
    let dt = (end - start) / plan.steps as f64;
    let mut u = ComplexMatrix::identity(dim)?;
    for s in 0..n_sub {
        u = evolve_slices(h, u, start, dt, s * k, k, plan.rule)?;
        u = transitions[s % order].apply(u);
    }
    Ok(UnitaryMatrix::from_product(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagate::{propagate, ConstantSource};

    #[test]
    fn estimate_examples() {
        let p = SweepParameters::new(5.04, 3.0e-4, 120.0).unwrap();
        let e = min_subintervals(&p, 0.005).unwrap();
        assert_eq!(e.n_subintervals, 1601);
        assert!((e.dt_bound - 7.5e-2).abs() <= 1e-15);

        let p80 = SweepParameters::new(5.8511, 2.9280e-4, 80.0).unwrap();
        assert_eq!(min_subintervals(&p80, 0.005).unwrap().n_subintervals, 1601);
        assert_eq!(min_subintervals(&p, 1e300).unwrap().n_subintervals, 1);
        assert!(min_subintervals(&p, 0.0).is_err());
    }

    #[test]
    fn transverse_terms_average_out() {
        let g = SymmetryGroup::z_parity_2q();
        let x1 = HermitianMatrix::new(pauli::x().tensor(&pauli::identity()).unwrap()).unwrap();
        let out = effective_hamiltonian(&x1, &g).unwrap();
        assert!(out.as_matrix().max_abs() < 1e-16);
        let zz = HermitianMatrix::new(pauli::z().tensor(&pauli::z()).unwrap()).unwrap();
        let out = effective_hamiltonian(&zz, &g).unwrap();
        assert_eq!(out, zz);
    }

    #[test]
    fn group_validation() {
        assert!(SymmetryGroup::new(vec![]).is_err());
        let z = UnitaryMatrix::new(pauli::z()).unwrap();
        assert!(SymmetryGroup::new(vec![z]).is_err());
        let i = UnitaryMatrix::identity(2).unwrap();
        let x = UnitaryMatrix::new(pauli::x()).unwrap();
        // {I, σz, σx} is not closed (σzσx = iσy)
        assert!(SymmetryGroup::new(vec![i, z, x]).is_err());
        assert_eq!(SymmetryGroup::z_parity_2q().order(), 4);
    }

    #[test]
    fn misaligned_plan_rejected() {
        let p = SweepParameters::new(1.0, 1.0, 1.0).unwrap();
        let s = SymmetrizationSchedule::new(SymmetryGroup::z_parity_1q(), 10, 2).unwrap();
        let h = ConstantSource(HermitianMatrix::new(pauli::x()).unwrap());
        let err = symmetrized_propagate(&h, &p, &s, &PropagationPlan::new(39).unwrap());
        assert!(matches!(err, Err(TrpError::Schedule(_))));
        assert!(symmetrized_propagate(&h, &p, &s, &PropagationPlan::new(40).unwrap()).is_ok());
    }

    #[test]
    fn trivial_group_is_plain_propagation() {
        let p = SweepParameters::new(5.8511, 2.9280e-4, 80.0).unwrap();
        let h = crate::model::OneQubitSweep { sweep: p };
        let s = SymmetrizationSchedule::new(SymmetryGroup::trivial(2).unwrap(), 100, 7).unwrap();
        let plan = s.aligned_plan(&PropagationPlan::new(1).unwrap());
        let a = symmetrized_propagate(&h, &p, &s, &plan).unwrap();
        let b = propagate(&h, &p, &plan).unwrap();
        assert_eq!(a, b);
    }
}
