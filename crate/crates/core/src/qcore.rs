//! Dense complex linear algebra and quantum-state primitives.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Superoperators act on
//! column-stacked states: `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`, which matches the
//! column-major storage of `DMatrix`, so `vec` is a plain reshape.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default positivity / trace tolerance for density matrices.
pub const STATE_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn from_real_diag(diag: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(
        diag.len(),
        diag.iter().map(|&x| c(x, 0.0)),
    ))
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn trace(a: &CMat) -> C64 {
    a.trace()
}

/// `Re Tr(ρ A)` without forming the product.
pub fn expect(rho: &CMat, a: &CMat) -> f64 {
    let n = rho.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += rho[(i, k)] * a[(k, i)];
        }
    }
    acc.re
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn frob_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().fold(0.0, |m: f64, &s| m.max(s))
}

pub fn hermitian_deviation(a: &CMat) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()) * c(0.5, 0.0)
}

/// Column-stacking vectorization.
pub fn vectorize(a: &CMat) -> CVec {
    CVec::from_column_slice(a.as_slice())
}

pub fn devectorize(v: &CVec, d: usize) -> CMat {
    CMat::from_column_slice(d, d, v.as_slice())
}

/// Superoperator of `ρ ↦ A ρ B`.
pub fn sandwich_super(a: &CMat, b: &CMat) -> CMat {
    kron(&b.transpose(), a)
}

/// Hermitian operator: square and `max |A_ij − conj(A_ji)| ≤ 1e-12 (1 + max|A|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian(CMat);

impl Hermitian {
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        let dev = hermitian_deviation(&m);
        if dev > 1e-12 * (1.0 + max_abs(&m)) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self(hermitize(&m)))
    }

    /// Builds from a matrix known to be Hermitian up to rounding; the
    /// anti-Hermitian residue is dropped.
    pub fn symmetrized(m: CMat) -> Self {
        assert_eq!(
            m.nrows(),
            m.ncols(),
            "Hermitian::symmetrized on non-square matrix"
        );
        Self(hermitize(&m))
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self(from_real_diag(diag))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: CMat,
    tol: f64,
}

impl DensityMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        Self::with_tolerance(m, STATE_TOL)
    }

    pub fn with_tolerance(m: CMat, tol: f64) -> Result<Self> {
        let h = Hermitian::new(m)?;
        let tr = h.0.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eig(&h).values[0];
        if min < -tol {
            return Err(Error::InvalidState(format!("smallest eigenvalue {min:e}")));
        }
        Ok(Self { mat: h.0, tol })
    }

    /// Wraps a matrix without validation. Used for intermediate states whose
    /// physicality is checked by the caller.
    pub fn new_unchecked(m: CMat) -> Self {
        Self {
            mat: hermitize(&m),
            tol: STATE_TOL,
        }
    }

    pub fn pure(psi: &CVec) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = psi / c(n, 0.0);
        Ok(Self {
            mat: &v * v.adjoint(),
            tol: STATE_TOL,
        })
    }

    pub fn from_populations(p: &[f64]) -> Result<Self> {
        Self::new(from_real_diag(p))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: identity(d) / c(d as f64, 0.0),
            tol: STATE_TOL,
        }
    }

    /// `e^{−H/T}/Z`, computed in the eigenbasis with the ground energy shifted
    /// to zero.
    pub fn gibbs(h: &Hermitian, temperature: f64) -> Result<Self> {
        if !(temperature > 0.0) {
            return Err(Error::InvalidParams(format!(
                "temperature {temperature} must be > 0"
            )));
        }
        let eig = hermitian_eig(h);
        let e0 = eig.values[0];
        let w: Vec<f64> = eig
            .values
            .iter()
            .map(|e| (-(e - e0) / temperature).exp())
            .collect();
        let z: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / z).collect();
        Ok(Self {
            mat: eig.reconstruct_with(&p),
            tol: STATE_TOL,
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn hermitian(&self) -> Hermitian {
        Hermitian(self.mat.clone())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.hermitian()).values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn expect(&self, a: &CMat) -> f64 {
        expect(&self.mat, a)
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    pub fn conjugate(&self, u: &CMat) -> Self {
        Self::new_unchecked(u * &self.mat * u.adjoint())
    }
}

/// Ordered local dimensions of a tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositeSpace {
    dims: Vec<usize>,
}

impl CompositeSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParams(
                "factor dimensions must be positive".into(),
            ));
        }
        Ok(Self { dims })
    }

    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }
}

/// Kronecker product; the first factor is the most significant index.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all(ops: &[CMat]) -> CMat {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, o| kron(&acc, o))
}

/// Trace out every factor not in `keep`. The result lives on the kept factors
/// in their original order.
pub fn partial_trace(
    rho: &DensityMatrix,
    space: &CompositeSpace,
    keep: &[usize],
) -> Result<DensityMatrix> {
    let n = space.dims.len();
    if rho.dim() != space.total() {
        return Err(Error::DimMismatch {
            expected: space.total(),
            got: rho.dim(),
        });
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= n) {
        return Err(Error::InvalidSubsystem {
            index: bad,
            factors: n,
        });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();
    let dk: usize = kept.iter().map(|&i| space.dims[i]).product();
    let dt: usize = traced.iter().map(|&i| space.dims[i]).product();

    // strides of each factor in the full index
    let mut stride = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        stride[i] = stride[i + 1] * space.dims[i + 1];
    }
    let offsets = |factors: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for &f in factors.iter().rev() {
            let d = space.dims[f];
            off += (idx % d) * stride[f];
            idx /= d;
        }
        off
    };
    let kept_off: Vec<usize> = (0..dk).map(|k| offsets(&kept, k)).collect();
    let traced_off: Vec<usize> = (0..dt).map(|t| offsets(&traced, t)).collect();

    let m = rho.matrix();
    let mut out = CMat::zeros(dk, dk);
    for (a, &oa) in kept_off.iter().enumerate() {
        for (b, &ob) in kept_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_off {
                acc += m[(oa + t, ob + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix::new_unchecked(out))
}

/// Eigen-decomposition with eigenvalues ascending and orthonormal eigenvector
/// columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl Eigen {
    /// `V diag(f) V†`.
    pub fn reconstruct_with(&self, f: &[f64]) -> CMat {
        let mut scaled = self.vectors.clone();
        for (j, &fj) in f.iter().enumerate() {
            scaled.column_mut(j).scale_mut(fj);
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMat {
        let v: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        self.reconstruct_with(&v)
    }

    /// `V diag(z) V†` for complex `z`.
    pub fn reconstruct_complex(&self, z: &[C64]) -> CMat {
        let mut scaled = self.vectors.clone();
        for (j, &zj) in z.iter().enumerate() {
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= zj;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// `exp(−i H t)`.
    pub fn propagator(&self, t: f64) -> CMat {
        let z: Vec<C64> = self
            .values
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * t))
            .collect();
        self.reconstruct_complex(&z)
    }
}

pub fn hermitian_eig(h: &Hermitian) -> Eigen {
    let n = h.dim();
    if n == 0 {
        return Eigen {
            values: vec![],
            vectors: CMat::zeros(0, 0),
        };
    }
    let se = h.0.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        vectors.set_column(j, &se.eigenvectors.column(k));
    }
    Eigen { values, vectors }
}

/// Checked variant: rejects non-Hermitian input.
pub fn hermitian_eig_checked(m: &CMat) -> Result<Eigen> {
    Ok(hermitian_eig(&Hermitian::new(m.clone())?))
}

/// `exp(scale · a)` by scaling and squaring with a Padé approximant.
pub fn matrix_exp(a: &CMat, scale: C64) -> CMat {
    assert_eq!(a.nrows(), a.ncols(), "matrix_exp on non-square matrix");
    if a.is_empty() {
        return a.clone();
    }
    (a * scale).exp()
}

/// `exp(−i H t)` through the eigendecomposition; exactly unitary up to rounding.
pub fn unitary_propagator(h: &Hermitian, t: f64) -> CMat {
    hermitian_eig(h).propagator(t)
}

/// `√ρ` with eigenvalues floored at zero.
pub fn sqrt_psd(m: &CMat) -> CMat {
    hermitian_eig(&Hermitian::symmetrized(m.clone())).map(|x| x.max(0.0).sqrt())
}

/// Uhlmann root fidelity `Tr √(√ρ₁ ρ₂ √ρ₁)`, clamped into [0, 1].
pub fn fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimMismatch {
            expected: rho1.dim(),
            got: rho2.dim(),
        });
    }
    // a pure argument gives F = √⟨ψ|ρ|ψ⟩; the general route would add the
    // square root of eigenvalue roundoff
    for (a, b) in [(rho1, rho2), (rho2, rho1)] {
        let eig = hermitian_eig(&Hermitian::symmetrized(a.mat.clone()));
        let top = eig.values.len() - 1;
        if eig.values[top] >= 1.0 - 1e-12 {
            let v = eig.vectors.column(top);
            let overlap = (v.adjoint() * &b.mat * v)[(0, 0)].re;
            return Ok(overlap.max(0.0).sqrt().clamp(0.0, 1.0));
        }
    }
    let s = sqrt_psd(&rho1.mat);
    let inner = Hermitian::symmetrized(&s * &rho2.mat * &s);
    let f: f64 = hermitian_eig(&inner)
        .values
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Bures angle `arccos F`.
pub fn bures_angle(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    Ok(fidelity(rho1, rho2)?.acos())
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(&rho.eigenvalues())
}

pub fn entropy_of(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(a: &CMat, b: &CMat) -> f64 {
    let d = Hermitian::symmetrized(a - b);
    0.5 * hermitian_eig(&d)
        .values
        .iter()
        .map(|x| x.abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{pauli_x, pauli_z};
    use approx::assert_abs_diff_eq;

    #[test]
    fn kron_of_identities_and_sigma_z() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        let z = kron(&pauli_z(), &identity(2));
        assert_eq!(z, from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn sigma_x_eigenpairs() {
        let e = hermitian_eig(&Hermitian::new(pauli_x()).unwrap());
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        let v0 = e.vectors.column(0);
        assert_abs_diff_eq!((v0[0] + v0[1]).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = pauli_x();
        m[(0, 1)] = c(2.0, 0.0);
        assert!(matches!(
            hermitian_eig_checked(&m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn half_period_rotation() {
        let u = matrix_exp(&pauli_x(), c(0.0, std::f64::consts::FRAC_PI_2));
        let target = pauli_x() * I;
        assert!(max_abs(&(u - target)) < 1e-12);
        assert_eq!(matrix_exp(&CMat::zeros(3, 3), ONE), identity(3));
    }

    #[test]
    fn bell_state_marginal_is_mixed() {
        let s = 0.5f64.sqrt();
        let psi = CVec::from_vec(vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)]);
        let rho = DensityMatrix::pure(&psi).unwrap();
        let sp = CompositeSpace::uniform(2, 2).unwrap();
        let red = partial_trace(&rho, &sp, &[0]).unwrap();
        assert!(max_abs(&(red.matrix() - identity(2) * c(0.5, 0.0))) < 1e-15);
        assert!(matches!(
            partial_trace(&rho, &sp, &[2]),
            Err(Error::InvalidSubsystem {
                index: 2,
                factors: 2
            })
        ));
    }

    #[test]
    fn fidelity_and_angle_extremes() {
        let g = DensityMatrix::from_populations(&[1.0, 0.0]).unwrap();
        let e = DensityMatrix::from_populations(&[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(fidelity(&g, &g).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&g, &e).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            bures_angle(&g, &e).unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(bures_angle(&e, &e).unwrap(), 0.0, epsilon = 1e-6);
        let m = DensityMatrix::maximally_mixed(3);
        assert!(matches!(fidelity(&g, &m), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn entropy_examples() {
        let g = DensityMatrix::from_populations(&[1.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&g), 0.0);
        assert_abs_diff_eq!(
            von_neumann_entropy(&DensityMatrix::maximally_mixed(4)),
            4f64.ln(),
            epsilon = 1e-13
        );
        let q = DensityMatrix::from_populations(&[0.3, 0.7]).unwrap();
        let want = -0.3 * 0.3f64.ln() - 0.7 * 0.7f64.ln();
        assert_abs_diff_eq!(von_neumann_entropy(&q), want, epsilon = 1e-14);
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(DensityMatrix::from_populations(&[0.6, 0.6]).is_err());
        assert!(DensityMatrix::from_populations(&[1.1, -0.1]).is_err());
    }

    #[test]
    fn sandwich_matches_vectorization_convention() {
        let a = CMat::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64));
        let b = CMat::from_fn(2, 2, |i, j| c(j as f64 - 1.0, i as f64 * 0.5));
        let r = CMat::from_fn(2, 2, |i, j| c((i * 2 + j) as f64, 1.0));
        let lhs = vectorize(&(&a * &r * &b));
        let rhs = sandwich_super(&a, &b) * vectorize(&r);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
