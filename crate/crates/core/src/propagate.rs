//! Time-ordered propagation of `i dU/dτ = H(τ) U` with piecewise-constant slices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrpError};
use crate::linalg::{expm_skew, ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use crate::model::SweepParameters;
use crate::par::{self, Execution};

/// A time-dependent Hamiltonian.
pub trait HamiltonianSource: Sync {
    fn dim(&self) -> usize;

    fn hamiltonian(&self, tau: f64) -> Result<HermitianMatrix>;

    /// `exp(−i·dt·H(tau))`. Override when the slice exponential has a cheaper
    /// route than a fresh decomposition.
    fn slice_propagator(&self, tau: f64, dt: f64) -> Result<UnitaryMatrix> {
        let h = self.hamiltonian(tau).map_err(|e| e.at_time(tau))?;
        expm_skew(&h, dt).map_err(|e| TrpError::from(e).at_time(tau))
    }
}

impl<S: HamiltonianSource + ?Sized> HamiltonianSource for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn hamiltonian(&self, tau: f64) -> Result<HermitianMatrix> {
        (**self).hamiltonian(tau)
    }
    fn slice_propagator(&self, tau: f64, dt: f64) -> Result<UnitaryMatrix> {
        (**self).slice_propagator(tau, dt)
    }
}

/// Adapts a closure `τ → H(τ)` into a [`HamiltonianSource`].
pub struct FnSource<F> {
    dim: usize,
    f: F,
}

impl<F> FnSource<F>
where
    F: Fn(f64) -> Result<HermitianMatrix> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> HamiltonianSource for FnSource<F>
where
    F: Fn(f64) -> Result<HermitianMatrix> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn hamiltonian(&self, tau: f64) -> Result<HermitianMatrix> {
        (self.f)(tau)
    }
}

/// Time-independent Hamiltonian.
#[derive(Clone, Copy, Debug)]
pub struct ConstantSource(pub HermitianMatrix);

impl HamiltonianSource for ConstantSource {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn hamiltonian(&self, _tau: f64) -> Result<HermitianMatrix> {
        Ok(self.0)
    }
}

/// Where each slice samples the Hamiltonian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationRule {
    #[default]
    MidpointExponential,
    /// Samples at the left end of each slice; first order.
    EndpointExponential,
}

impl IntegrationRule {
    #[inline]
    fn sample_offset(self) -> f64 {
        match self {
            IntegrationRule::MidpointExponential => 0.5,
            IntegrationRule::EndpointExponential => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationPlan {
    pub steps: usize,
    #[serde(default)]
    pub rule: IntegrationRule,
    #[serde(default)]
    pub convergence_check: bool,
}

impl PropagationPlan {
    pub fn new(steps: usize) -> Result<Self> {
        let p = Self {
            steps,
            rule: IntegrationRule::MidpointExponential,
            convergence_check: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(TrpError::invalid("steps", "must be at least 1"));
        }
        Ok(())
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }
}

/// Applies slices `first..first + count` of a uniform grid `origin + k·dt`
/// to `u` on the left.
pub(crate) fn evolve_slices<H: HamiltonianSource + ?Sized>(
    h: &H,
    mut u: ComplexMatrix,
    origin: f64,
    dt: f64,
    first: usize,
    count: usize,
    rule: IntegrationRule,
) -> Result<ComplexMatrix> {
    let off = rule.sample_offset();
    for k in first..first + count {
        let tau = origin + (k as f64 + off) * dt;
        let step = h.slice_propagator(tau, dt)?;
        u = step.as_matrix() * &u;
        if (k + 1).is_multiple_of(REUNITARIZE_EVERY) {
            u = reunitarize(&u);
        }
    }
    Ok(u)
}

/// Slices between polar corrections of the running product.
const REUNITARIZE_EVERY: usize = 4096;

/// One Newton step toward the polar factor, `U(3I − U†U)/2`. Rounding in
/// long products drifts linearly away from unitarity; this pins it at eps.
fn reunitarize(u: &ComplexMatrix) -> ComplexMatrix {
    let n = u.dim();
    let gram = u.adjoint() * *u;
    let corr = ComplexMatrix::from_fn(n, |i, j| {
        let d = if i == j { 3.0 } else { 0.0 };
        (Complex64::new(d, 0.0) - gram[(i, j)]) * 0.5
    })
    .expect("dimension of an existing matrix");
    u * &corr
}

/// Propagator over `[start, end]` with `steps` slices, starting from `I`.
pub fn propagate_interval<H: HamiltonianSource + ?Sized>(
    h: &H,
    start: f64,
    end: f64,
    steps: usize,
    rule: IntegrationRule,
) -> Result<UnitaryMatrix> {
    if steps == 0 {
        return Err(TrpError::invalid("steps", "must be at least 1"));
    }
    let dt = (end - start) / steps as f64;
    let u = evolve_slices(h, ComplexMatrix::identity(h.dim())?, start, dt, 0, steps, rule)?;
    Ok(UnitaryMatrix::from_product(u))
}

/// Applied propagator over the sweep window of `p`.
pub fn propagate<H: HamiltonianSource + ?Sized>(
    h: &H,
    p: &SweepParameters,
    plan: &PropagationPlan,
) -> Result<UnitaryMatrix> {
    plan.validate()?;
    let (start, end) = p.interval();
    propagate_interval(h, start, end, plan.steps, plan.rule)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// Resolution of this level (slices, or subintervals for a schedule ladder).
    pub steps: usize,
    /// `‖U(steps) − U(2·steps)‖_max`; absent on the finest level.
    pub diff_to_next: Option<f64>,
    /// Metric at this level if the caller supplied one.
    pub metric: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// `log2(diff_k / diff_{k+1})` for consecutive differences.
    pub slopes: Vec<f64>,
    /// A difference is already at the roundoff floor.
    pub saturated: bool,
}

/// Differences below this are treated as roundoff.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

impl ConvergenceReport {
    pub fn from_levels(levels: &[(usize, UnitaryMatrix, Option<f64>)]) -> Self {
        let mut rows = Vec::with_capacity(levels.len());
        for (i, (steps, u, metric)) in levels.iter().enumerate() {
            let diff_to_next = levels
                .get(i + 1)
                .map(|(_, next, _)| u.as_matrix().max_diff(next.as_matrix()));
            rows.push(ConvergenceRow {
                steps: *steps,
                diff_to_next,
                metric: *metric,
            });
        }
        let diffs: Vec<f64> = rows.iter().filter_map(|r| r.diff_to_next).collect();
        let saturated = diffs.iter().any(|&d| d < ROUNDOFF_FLOOR);
        let slopes = diffs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        Self {
            rows,
            slopes,
            saturated,
        }
    }

    /// Relative change of the metric between the two finest levels.
    pub fn last_metric_change(&self) -> Option<f64> {
        let n = self.rows.len();
        if n < 2 {
            return None;
        }
        let a = self.rows[n - 2].metric?;
        let b = self.rows[n - 1].metric?;
        Some(((a - b) / b).abs())
    }

    /// Least-squares slope of `log(diff)` against `log(steps)`, negated.
    pub fn fitted_order(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| r.diff_to_next.map(|d| ((r.steps as f64).ln(), d.ln())))
            .collect();
        fit_slope(&pts).map(|s| -s)
    }
}

/// Least-squares slope through `(x, y)` pairs; `None` with fewer than 2 points.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Runs `run(n)` for `n = base, 2·base, …` (`doublings` extra levels) and
/// reports successive differences.
pub fn convergence_ladder<F>(
    exec: Execution,
    base: usize,
    doublings: usize,
    run: F,
) -> Result<ConvergenceReport>
where
    F: Fn(usize) -> Result<(UnitaryMatrix, Option<f64>)> + Sync + Send,
{
    if doublings == 0 {
        return Err(TrpError::invalid("doublings", "must be at least 1"));
    }
    if base == 0 {
        return Err(TrpError::invalid("base_steps", "must be at least 1"));
    }
    let levels: Vec<usize> = (0..=doublings).map(|k| base << k).collect();
    let results = par::map(exec, &levels, |&n| run(n));
    let mut out = Vec::with_capacity(levels.len());
    for (n, r) in levels.iter().zip(results) {
        let (u, m) = r?;
        out.push((*n, u, m));
    }
    Ok(ConvergenceReport::from_levels(&out))
}

/// Step-doubling study of [`propagate`] starting from `plan.steps`.
pub fn convergence_study<H: HamiltonianSource>(
    h: &H,
    p: &SweepParameters,
    plan: &PropagationPlan,
    doublings: usize,
    exec: Execution,
) -> Result<ConvergenceReport> {
    convergence_ladder(exec, plan.steps, doublings, |n| {
        Ok((propagate(h, p, &plan.with_steps(n))?, None))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    #[test]
    fn constant_hamiltonian_is_exact() {
        let p = SweepParameters::new(5.0, 1e-4, 3.0).unwrap();
        let h = HermitianMatrix::new(pauli::x().scale_real(-1.0 / p.lambda)).unwrap();
        let exact = expm_skew(&h, p.tau0).unwrap();
        for steps in [1, 7, 100] {
            let u = propagate(&ConstantSource(h), &p, &PropagationPlan::new(steps).unwrap())
                .unwrap();
            assert!(u.as_matrix().max_diff(exact.as_matrix()) < 1e-13);
        }
    }

    #[test]
    fn null_dynamics() {
        let p = SweepParameters::new(1.0, 1.0, 10.0).unwrap();
        let zero = HermitianMatrix::new(ComplexMatrix::zeros(4).unwrap()).unwrap();
        let u = propagate(&ConstantSource(zero), &p, &PropagationPlan::new(50).unwrap()).unwrap();
        assert_eq!(*u.as_matrix(), ComplexMatrix::identity(4).unwrap());
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(PropagationPlan::new(0).is_err());
    }

    #[test]
    fn errors_carry_the_time() {
        let src = FnSource::new(2, |tau: f64| {
            if tau > 0.5 {
                Err(TrpError::Consistency("boom".into()))
            } else {
                Ok(HermitianMatrix::new(pauli::z()).unwrap())
            }
        });
        let err = propagate_interval(&src, 0.0, 1.0, 4, IntegrationRule::MidpointExponential)
            .unwrap_err();
        match err {
            TrpError::AtTime { tau, .. } => assert_eq!(tau, 0.625),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (1..5).map(|k| (k as f64, 3.0 - 2.0 * k as f64)).collect();
        assert!((fit_slope(&pts).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(fit_slope(&pts[..1]), None);
    }
}
