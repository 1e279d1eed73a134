//! Dense complex linear algebra for one- and two-qubit operators.
//!
//! Every operator in this crate is either 2×2 or 4×4, so matrices live on the
//! stack in a fixed 16-slot row-major buffer and all algorithms are direct:
//! cyclic complex Jacobi for Hermitian eigenproblems and the spectral formula
//! for the propagator `exp(-i·dt·H)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Largest tolerated `‖M − M†‖_max` for a [`HermitianMatrix`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest tolerated `‖U†U − I‖_max` for a [`UnitaryMatrix`].
pub const UNITARY_TOL: f64 = 1e-10;

const MAX_DIM: usize = 4;
const JACOBI_MAX_SWEEPS: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("unsupported dimension {0} (expected 2 or 4)")]
    UnsupportedDim(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian: max |M - M†| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary: max |U†U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("Jacobi eigensolver did not converge: off-diagonal residual {residual:e}")]
    NoConvergence { residual: f64 },
    #[error("vector length {len} does not match dimension {dim}")]
    VectorLength { len: usize, dim: usize },
}

#[inline]
fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense square complex matrix of dimension 2 or 4, stored row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [Complex64; MAX_DIM * MAX_DIM],
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

fn check_dim(dim: usize) -> Result<(), LinalgError> {
    match dim {
        2 | 4 => Ok(()),
        d => Err(LinalgError::UnsupportedDim(d)),
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: [Complex64::default(); MAX_DIM * MAX_DIM],
        })
    }

    pub fn identity(dim: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = c(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_fn(
        dim: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        if !m.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be 4 or 16.
    pub fn from_row_major(entries: &[Complex64]) -> Result<Self, LinalgError> {
        let dim = match entries.len() {
            4 => 2,
            16 => 4,
            n => return Err(LinalgError::UnsupportedDim((n as f64).sqrt() as usize)),
        };
        Self::from_fn(dim, |i, j| entries[i * dim + j])
    }

    pub fn diag(values: &[Complex64]) -> Result<Self, LinalgError> {
        let dim = values.len();
        Self::from_fn(dim, |i, j| if i == j { values[i] } else { c(0.0, 0.0) })
    }

    pub fn diag_real(values: &[f64]) -> Result<Self, LinalgError> {
        let v: Vec<Complex64> = values.iter().map(|&x| c(x, 0.0)).collect();
        Self::diag(&v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Row-major view of the active entries.
    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self {
            dim: n,
            data: [Complex64::default(); MAX_DIM * MAX_DIM],
        };
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other` of two 2×2 matrices, basis order
    /// |00⟩, |01⟩, |10⟩, |11⟩ with the left factor as the most significant qubit.
    pub fn tensor(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim != 2 {
            return Err(LinalgError::UnsupportedDim(self.dim));
        }
        if other.dim != 2 {
            return Err(LinalgError::UnsupportedDim(other.dim));
        }
        Self::from_fn(4, |i, j| self[(i / 2, j / 2)] * other[(i % 2, j % 2)])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        m.data.iter_mut().for_each(|z| *z *= s);
        m
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `‖self − other‖_max`; panics on dimension mismatch.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_diff");
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_diff(&self.adjoint())
    }

    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.adjoint().mul_unchecked(self);
        let eye = Self::identity(self.dim).expect("dim already validated");
        gram.max_diff(&eye)
    }

    /// `self · v` for a column vector.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        if v.len() != self.dim {
            return Err(LinalgError::VectorLength {
                len: v.len(),
                dim: self.dim,
            });
        }
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self, LinalgError> {
        Ok(self.matmul(other)? - other.matmul(self)?)
    }

    /// Row-major real parts, suitable for printing or serialization.
    pub fn real_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)].re).collect())
            .collect()
    }

    pub fn imag_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)].im).collect())
            .collect()
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on dimension mismatch; use [`ComplexMatrix::matmul`] for a fallible product.
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        self.mul_unchecked(&rhs)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        self.mul_unchecked(rhs)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(mut self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        self
    }
}

/// Pauli matrices and the 2×2 identity.
pub mod pauli {
    use super::{c, ComplexMatrix};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2).unwrap()
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_row_major(&[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_row_major(&[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, -1.0]).unwrap()
    }
}

/// A matrix known to be Hermitian within [`HERMITIAN_TOL`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self, LinalgError> {
        if !m.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let deviation = m.hermiticity_defect();
        if deviation > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian { deviation });
        }
        Ok(Self(m))
    }

    /// `(M + M†)/2`, exact Hermitian part.
    pub fn hermitian_part(m: &ComplexMatrix) -> Self {
        Self((*m + m.adjoint()).scale_real(0.5))
    }

    /// Real combination `Σ coeff_k · P_k` of Hermitian terms.
    pub fn combine(terms: &[(f64, &HermitianMatrix)]) -> Result<Self, LinalgError> {
        let (_, first) = terms.first().ok_or(LinalgError::UnsupportedDim(0))?;
        let mut acc = ComplexMatrix::zeros(first.dim())?;
        for (coeff, term) in terms {
            if term.dim() != acc.dim() {
                return Err(LinalgError::DimMismatch {
                    left: acc.dim(),
                    right: term.dim(),
                });
            }
            acc = acc + term.0.scale_real(*coeff);
        }
        Ok(Self(acc))
    }

    #[inline]
    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    #[inline]
    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn eigh(&self) -> Result<EigenDecomposition, LinalgError> {
        eigh(self)
    }
}

impl Add for HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> Self {
        HermitianMatrix(self.0 + rhs.0)
    }
}

/// A matrix known to be unitary within [`UNITARY_TOL`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self, LinalgError> {
        if !m.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let deviation = m.unitarity_defect();
        if deviation > UNITARY_TOL {
            return Err(LinalgError::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Result<Self, LinalgError> {
        Ok(Self(ComplexMatrix::identity(dim)?))
    }

    /// Wraps a product of unitaries without re-checking the invariant.
    #[inline]
    pub(crate) fn from_product(m: ComplexMatrix) -> Self {
        Self(m)
    }

    #[inline]
    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    #[inline]
    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `self · other`; dimensions must match.
    pub fn then_apply(&self, later: &UnitaryMatrix) -> Result<Self, LinalgError> {
        Ok(Self(later.0.matmul(&self.0)?))
    }

    pub fn compose(&self, other: &UnitaryMatrix) -> Result<Self, LinalgError> {
        Ok(Self(self.0.matmul(&other.0)?))
    }

    pub fn tensor(&self, other: &UnitaryMatrix) -> Result<Self, LinalgError> {
        Ok(Self(self.0.tensor(&other.0)?))
    }

    pub fn scale_phase(&self, theta: f64) -> Self {
        Self(self.0.scale(Complex64::from_polar(1.0, theta)))
    }
}

impl Mul for UnitaryMatrix {
    type Output = UnitaryMatrix;
    fn mul(self, rhs: Self) -> Self {
        UnitaryMatrix(self.0 * rhs.0)
    }
}

/// Ascending eigenvalues with orthonormal eigenvector columns.
#[derive(Clone, Copy, Debug)]
pub struct EigenDecomposition {
    dim: usize,
    values: [f64; MAX_DIM],
    vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values[..self.dim]
    }

    /// Eigenvectors as columns, ordered like [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.vectors[(i, k)]).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rank-1 projector `|v_k⟩⟨v_k|`; independent of the eigenvector phase.
    pub fn projector(&self, k: usize) -> HermitianMatrix {
        let v = &self.vectors;
        let m = ComplexMatrix::from_fn(self.dim, |i, j| v[(i, k)] * v[(j, k)].conj())
            .expect("dimension already validated");
        HermitianMatrix::hermitian_part(&m)
    }

    /// `V f(Λ) V†` for a complex function of the eigenvalues.
    pub fn spectral_map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.dim;
        let v = &self.vectors;
        let fl: Vec<Complex64> = self.eigenvalues().iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n).expect("dimension already validated");
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::default();
                for (k, fk) in fl.iter().enumerate() {
                    acc += v[(i, k)] * fk * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// `exp(-i·dt·H)` from this decomposition of `H`.
    pub fn propagator(&self, dt: f64) -> UnitaryMatrix {
        UnitaryMatrix(self.spectral_map(|l| Complex64::from_polar(1.0, -l * dt)))
    }

    /// Same decomposition with eigenvalue `k` shifted by `delta` (re-sorted).
    pub fn with_shift(&self, k: usize, delta: f64) -> Self {
        let mut out = *self;
        out.values[k] += delta;
        out.sort();
        out
    }

    fn sort(&mut self) {
        let n = self.dim;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]));
        if order.iter().enumerate().all(|(i, &k)| i == k) {
            return;
        }
        let old_vals = self.values;
        let old_vecs = self.vectors;
        for (new_k, &old_k) in order.iter().enumerate() {
            self.values[new_k] = old_vals[old_k];
            for i in 0..n {
                self.vectors[(i, new_k)] = old_vecs[(i, old_k)];
            }
        }
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eigh(h: &HermitianMatrix) -> Result<EigenDecomposition, LinalgError> {
    let n = h.dim();
    let mut a = *h.as_matrix();
    let mut v = ComplexMatrix::identity(n)?;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let threshold = scale * 1e-17;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= threshold * 1e-3 {
                    continue;
                }
                let e = apq / g;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                let e_conj = e.conj();

                // A ← A·J with J_pp = c, J_qp = −s·ē, J_pq = s, J_qq = c·ē.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs - akq * e_conj * sn;
                    a[(k, q)] = akp * sn + akq * e_conj * cs;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs - vkq * e_conj * sn;
                    v[(k, q)] = vkp * sn + vkq * e_conj * cs;
                }
                // A ← J†·A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs - aqk * e * sn;
                    a[(q, k)] = apk * sn + aqk * e * cs;
                }
                a[(p, q)] = Complex64::default();
                a[(q, p)] = Complex64::default();
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
            }
        }
    }
    if !converged {
        let residual = off_diagonal_norm(&a);
        if residual > scale * 1e-13 {
            return Err(LinalgError::NoConvergence { residual });
        }
    }

    let mut values = [0.0; MAX_DIM];
    for (i, val) in values.iter_mut().enumerate().take(n) {
        *val = a[(i, i)].re;
    }
    let mut out = EigenDecomposition {
        dim: n,
        values,
        vectors: v,
    };
    out.sort();
    Ok(out)
}

/// `exp(-i·dt·h)` via the eigendecomposition of `h`.
pub fn expm_skew(h: &HermitianMatrix, dt: f64) -> Result<UnitaryMatrix, LinalgError> {
    Ok(eigh(h)?.propagator(dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn herm(m: ComplexMatrix) -> HermitianMatrix {
        HermitianMatrix::new(m).unwrap()
    }

    #[test]
    fn identity_products() {
        let i2 = pauli::identity();
        assert_eq!(i2.matmul(&i2).unwrap(), i2);
    }

    #[test]
    fn pauli_algebra() {
        let xy = pauli::x().matmul(&pauli::y()).unwrap();
        let iz = pauli::z().scale(c(0.0, 1.0));
        assert!(xy.max_diff(&iz) < 1e-15);
        let zz = pauli::z().matmul(&pauli::z()).unwrap();
        assert_eq!(zz, pauli::identity());
    }

    #[test]
    fn matmul_rejects_mismatched_dims() {
        let a = ComplexMatrix::identity(2).unwrap();
        let b = ComplexMatrix::identity(4).unwrap();
        assert_eq!(
            a.matmul(&b),
            Err(LinalgError::DimMismatch { left: 2, right: 4 })
        );
        assert!(ComplexMatrix::zeros(3).is_err());
    }

    #[test]
    fn tensor_expansions() {
        let i4 = pauli::identity().tensor(&pauli::identity()).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4).unwrap());
        let zi = pauli::z().tensor(&pauli::identity()).unwrap();
        assert_eq!(zi, ComplexMatrix::diag_real(&[1., 1., -1., -1.]).unwrap());
        let zz = pauli::z().tensor(&pauli::z()).unwrap();
        assert_eq!(zz, ComplexMatrix::diag_real(&[1., -1., -1., 1.]).unwrap());
        let four = ComplexMatrix::identity(4).unwrap();
        assert_eq!(four.tensor(&pauli::x()), Err(LinalgError::UnsupportedDim(4)));
    }

    #[test]
    fn expm_special_cases() {
        let sx = herm(pauli::x());
        let zero_time = expm_skew(&sx, 0.0).unwrap();
        assert!(zero_time.as_matrix().max_diff(&pauli::identity()) < 1e-15);

        let quarter = expm_skew(&sx, FRAC_PI_2).unwrap();
        let expected = pauli::x().scale(c(0.0, -1.0));
        assert!(quarter.as_matrix().max_diff(&expected) < 1e-15);

        let d = herm(ComplexMatrix::diag_real(&[1.0, 2.0]).unwrap());
        let t = 0.37;
        let u = expm_skew(&d, t).unwrap();
        let expected = ComplexMatrix::diag(&[
            Complex64::from_polar(1.0, -t),
            Complex64::from_polar(1.0, -2.0 * t),
        ])
        .unwrap();
        assert!(u.as_matrix().max_diff(&expected) < 1e-15);
    }

    #[test]
    fn eigh_textbook_cases() {
        let d = herm(ComplexMatrix::diag_real(&[3.0, 1.0]).unwrap());
        let e = d.eigh().unwrap();
        assert_eq!(e.eigenvalues(), &[1.0, 3.0]);
        assert!((e.eigenvector(0)[1].norm() - 1.0).abs() < 1e-15);
        assert!((e.eigenvector(1)[0].norm() - 1.0).abs() < 1e-15);

        let e = herm(pauli::x()).eigh().unwrap();
        assert!((e.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues()[1] - 1.0).abs() < 1e-15);
        let v0 = e.eigenvector(0);
        // (1, -1)/√2 up to phase
        assert!(((v0[0] + v0[1]).norm()) < 1e-15);
        assert!((v0[0].norm() - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_row_major(&[c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)])
            .unwrap();
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(LinalgError::NotHermitian { .. })
        ));
        let nan = ComplexMatrix::from_fn(2, |_, _| c(f64::NAN, 0.0));
        assert_eq!(nan, Err(LinalgError::NonFinite));
    }

    #[test]
    fn projector_of_diagonal() {
        let d = herm(ComplexMatrix::diag_real(&[1., 2., 3., 4.]).unwrap());
        let p = d.eigh().unwrap().projector(3);
        let expected = ComplexMatrix::diag_real(&[0., 0., 0., 1.]).unwrap();
        assert!(p.as_matrix().max_diff(&expected) < 1e-15);
    }

    #[test]
    fn degenerate_spectrum_is_handled() {
        let h = herm(ComplexMatrix::identity(4).unwrap().scale_real(2.5));
        let e = h.eigh().unwrap();
        assert!(e.eigenvalues().iter().all(|&l| (l - 2.5).abs() < 1e-15));
        assert!(e.eigenvectors().unitarity_defect() < 1e-15);
    }
}
