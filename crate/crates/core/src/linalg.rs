//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Tensor products follow the
//! Kronecker convention: the basis vector `|i⟩ ⊗ |j⟩` of `A ⊗ B` sits at
//! index `i * dim_b + j`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for structural checks (Hermiticity, trace, unitarity).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Tolerance for spectral checks (PSD drift, reconstruction).
pub const SPECTRAL_TOL: f64 = 1e-9;
/// Tolerance on the Euclidean norm of a pure state.
pub const NORM_TOL: f64 = 1e-12;

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` and wraps it.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(LabError::InvalidDensity(format!("not square ({}x{})", matrix.nrows(), matrix.ncols())));
        }
        let herm = hermitian_residual(&matrix);
        if herm > STRUCTURAL_TOL {
            return Err(LabError::NotHermitian { residual: herm });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
            return Err(LabError::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let min_eig = eigh(&matrix)?.values[0];
        if min_eig < -SPECTRAL_TOL {
            return Err(LabError::InvalidDensity(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix the caller has already established to be a state,
    /// e.g. the exact output of a channel.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(CMatrix::identity(dim, dim).unscale(dim as f64))
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let d = DVector::from_iterator(probs.len(), probs.iter().map(|&p| C64::new(p, 0.0)));
        Self::new(CMatrix::from_diagonal(&d))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Eigenvalues in ascending order, with values in `[-1e-9, 0)` clamped to 0.
    pub fn spectrum(&self) -> Vec<f64> {
        let eig = eigh_unchecked(&self.matrix);
        eig.values.iter().map(|&l| l.max(0.0)).collect()
    }

    /// Entrywise complex conjugate (also a valid state).
    pub fn conj(&self) -> Self {
        Self::from_trusted(self.matrix.map(|z| z.conj()))
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// A unit vector in `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(LabError::InvalidArgument("empty state vector".into()));
        }
        let n = amplitudes.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(LabError::NotNormalized { norm: n });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `v` to unit norm. Fails on the zero vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let n = v.norm();
        if v.is_empty() || n == 0.0 || !n.is_finite() {
            return Err(LabError::NotNormalized { norm: n });
        }
        Ok(Self { amplitudes: v.unscale(n) })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(LabError::InvalidArgument(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    /// `d^{-1/2} Σ_i |i⟩|i⟩` on `C^d ⊗ C^d`.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(LabError::InvalidArgument("dimension must be positive".into()));
        }
        let mut v = CVector::zeros(d * d);
        let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            v[i * d + i] = amp;
        }
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn conj(&self) -> Self {
        Self { amplitudes: self.amplitudes.map(|z| z.conj()) }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(outer(&self.amplitudes, &self.amplitudes))
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        Self { amplitudes: self.amplitudes.kronecker(&other.amplitudes) }
    }
}

/// `|u⟩⟨v|`.
pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// Which factor of a bipartite system to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Kronecker product, index `(i_a * b.rows + i_b, j_a * b.cols + j_b)`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Partial trace of an arbitrary operator on `C^{dim_a} ⊗ C^{dim_b}`.
pub fn partial_trace_op(m: &CMatrix, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<CMatrix> {
    let n = dim_a * dim_b;
    if m.nrows() != n || m.ncols() != n {
        return Err(LabError::DimensionMismatch { expected: n, found: m.nrows() });
    }
    Ok(match keep {
        Subsystem::A => {
            CMatrix::from_fn(dim_a, dim_a, |i, j| (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum())
        }
        Subsystem::B => {
            CMatrix::from_fn(dim_b, dim_b, |i, j| (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum())
        }
    })
}

pub fn partial_trace(rho: &DensityMatrix, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<DensityMatrix> {
    partial_trace_op(rho.matrix(), dim_a, dim_b, keep).map(DensityMatrix::from_trusted)
}

/// Reduced state of a bipartite pure vector, computed without forming `|ψ⟩⟨ψ|`.
pub fn reduced_state(psi: &PureState, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<DensityMatrix> {
    let n = dim_a * dim_b;
    if psi.dim() != n {
        return Err(LabError::DimensionMismatch { expected: n, found: psi.dim() });
    }
    // Coefficient matrix C[a, b] = ψ_{a·dim_b + b}; ψ^A = C C†, ψ^B = Cᵀ C̄.
    let c = CMatrix::from_row_slice(dim_a, dim_b, psi.amplitudes().as_slice());
    let m = match keep {
        Subsystem::A => &c * c.adjoint(),
        Subsystem::B => c.transpose() * c.map(|z| z.conj()),
    };
    Ok(DensityMatrix::from_trusted(m))
}

/// Hermitian eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// `V diag(f(λ)) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let s = f(l);
            scaled.column_mut(j).scale_mut(s);
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn eigh(h: &CMatrix) -> Result<Eigh> {
    if !h.is_square() {
        return Err(LabError::DimensionMismatch { expected: h.nrows(), found: h.ncols() });
    }
    let r = hermitian_residual(h);
    if r > STRUCTURAL_TOL {
        return Err(LabError::NotHermitian { residual: r });
    }
    Ok(eigh_unchecked(h))
}

/// Eigendecomposition of the Hermitian part of `h`.
pub(crate) fn eigh_unchecked(h: &CMatrix) -> Eigh {
    let sym = (h + h.adjoint()).unscale(2.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Eigh { values, vectors }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Largest singular value.
    Operator,
    Frobenius,
    /// Sum of singular values.
    Trace,
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

pub fn norm(m: &CMatrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::Frobenius => m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        NormKind::Operator => singular_values(m).into_iter().fold(0.0, f64::max),
        NormKind::Trace => singular_values(m).into_iter().sum(),
    }
}

/// Operator norm of a Hermitian matrix via its spectrum.
pub fn hermitian_operator_norm(h: &CMatrix) -> f64 {
    let v = eigh_unchecked(h).values;
    v[0].abs().max(v[v.len() - 1].abs())
}

/// Square root of a PSD matrix, clamping drift below zero.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let eig = eigh(m)?;
    if eig.values[0] < -SPECTRAL_TOL {
        return Err(LabError::InvalidDensity(format!("negative eigenvalue {:.3e}", eig.values[0])));
    }
    Ok(eig.apply_fn(|l| l.max(0.0).sqrt()))
}

/// Root fidelity `‖√ρ √σ‖₁`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(LabError::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let prod = sqrt_psd(rho.matrix())? * sqrt_psd(sigma.matrix())?;
    Ok(norm(&prod, NormKind::Trace).clamp(0.0, 1.0))
}

/// Swap operator on `C^d ⊗ C^d`: `|i⟩|j⟩ ↦ |j⟩|i⟩`.
pub fn swap_operator(d: usize) -> CMatrix {
    let mut f = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    f
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max |M - M†|` entrywise.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

/// `max |U†U - I|` entrywise.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)))
}

pub fn pauli_x() -> CMatrix {
    real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_density(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        let g = CMatrix::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        DensityMatrix::new(m.unscale(tr)).unwrap()
    }

    fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let g = CMatrix::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        (&g + g.adjoint()).unscale(2.0)
    }

    #[test]
    fn tensor_identity_and_basis() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(tensor(&i2, &i2), CMatrix::identity(4, 4));
        let e0 = PureState::basis(2, 0).unwrap().projector().into_matrix();
        let e1 = PureState::basis(2, 1).unwrap().projector().into_matrix();
        let t = tensor(&e0, &e1);
        let expected = PureState::basis(4, 1).unwrap().projector().into_matrix();
        assert_eq!(t, expected);
        let t = tensor(&CMatrix::identity(2, 2), &CMatrix::identity(3, 3));
        assert_eq!(t.shape(), (6, 6));
    }

    #[test]
    fn tensor_associative() {
        // Gaussian-integer entries keep every product exact.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut int_matrix = |r: usize, c: usize| {
            CMatrix::from_fn(r, c, |_, _| C64::new(rng.random_range(-5..=5) as f64, rng.random_range(-5..=5) as f64))
        };
        let a = int_matrix(2, 3);
        let b = int_matrix(3, 2);
        let c = int_matrix(2, 2);
        assert_eq!(tensor(&tensor(&a, &b), &c), tensor(&a, &tensor(&b, &c)));
    }

    #[test]
    fn partial_trace_examples() {
        let phi = PureState::maximally_entangled(2).unwrap().projector();
        let red = partial_trace(&phi, 2, 2, Subsystem::A).unwrap();
        assert!(max_abs_diff(red.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random_density(3, &mut rng);
        let sigma = random_density(2, &mut rng);
        let prod = DensityMatrix::new(tensor(rho.matrix(), sigma.matrix())).unwrap();
        let back = partial_trace(&prod, 3, 2, Subsystem::A).unwrap();
        assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-14);
        let back = partial_trace(&prod, 3, 2, Subsystem::B).unwrap();
        assert!(max_abs_diff(back.matrix(), sigma.matrix()) < 1e-14);

        // tr_A |01⟩⟨01| = |1⟩⟨1|
        let s01 = PureState::basis(4, 1).unwrap().projector();
        let red = partial_trace(&s01, 2, 2, Subsystem::B).unwrap();
        assert_eq!(red.matrix(), PureState::basis(2, 1).unwrap().projector().matrix());

        assert!(matches!(partial_trace(&s01, 3, 2, Subsystem::A), Err(LabError::DimensionMismatch { .. })));
    }

    #[test]
    fn reduced_state_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = CVector::from_fn(6, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let psi = PureState::normalized(v).unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let a = reduced_state(&psi, 3, 2, keep).unwrap();
            let b = partial_trace(&psi.projector(), 3, 2, keep).unwrap();
            assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-14);
        }
    }

    #[test]
    fn eigh_examples() {
        let e = eigh(&CMatrix::identity(4, 4)).unwrap();
        assert!(e.values.iter().all(|&l| (l - 1.0).abs() < 1e-14));
        let e = eigh(&real_matrix(2, 2, &[3.0, 0.0, 0.0, 1.0])).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] - 3.0).abs() < 1e-14);
        // char. poly of X: λ² - 1
        let e = eigh(&pauli_x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);

        let bad = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eigh(&bad), Err(LabError::NotHermitian { .. })));
    }

    #[test]
    fn eigh_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [1, 2, 5, 16, 40] {
            let h = random_hermitian(d, &mut rng);
            let e = eigh(&h).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            assert!(max_abs_diff(&e.apply_fn(|l| l), &h) < 1e-9);
            assert!(unitarity_residual(&e.vectors) < 1e-9);
        }
    }

    #[test]
    fn norm_examples() {
        let z = CMatrix::zeros(3, 3);
        for k in [NormKind::Operator, NormKind::Frobenius, NormKind::Trace] {
            assert_eq!(norm(&z, k), 0.0);
        }
        let p = PureState::basis(3, 2).unwrap().projector().into_matrix();
        for k in [NormKind::Operator, NormKind::Frobenius, NormKind::Trace] {
            assert!((norm(&p, k) - 1.0).abs() < 1e-14);
        }
        let d = real_matrix(2, 2, &[0.5, 0.0, 0.0, -0.5]);
        assert!((norm(&d, NormKind::Trace) - 1.0).abs() < 1e-14);
        assert!((norm(&d, NormKind::Operator) - 0.5).abs() < 1e-14);
        assert!((norm(&d, NormKind::Frobenius) - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((hermitian_operator_norm(&d) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn fidelity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rho = random_density(3, &mut rng);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        let p0 = PureState::basis(2, 0).unwrap().projector();
        let p1 = PureState::basis(2, 1).unwrap().projector();
        assert!(fidelity(&p0, &p1).unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((fidelity(&mixed, &p0).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);

        let p = DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let q = DensityMatrix::diagonal(&[0.6, 0.1, 0.3]).unwrap();
        let classical: f64 = [0.2 * 0.6, 0.3 * 0.1, 0.5 * 0.3f64].iter().map(|x: &f64| x.sqrt()).sum();
        assert!((fidelity(&p, &q).unwrap() - classical).abs() < 1e-12);
        let sigma = random_density(3, &mut rng);
        assert!((fidelity(&rho, &sigma).unwrap() - fidelity(&sigma, &rho).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn swap_examples() {
        assert_eq!(swap_operator(1), CMatrix::identity(1, 1));
        let f = swap_operator(2);
        assert_eq!(f.trace(), C64::new(2.0, 0.0));
        assert_eq!(&f * &f, CMatrix::identity(4, 4));

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in [2, 3, 4] {
            let rho = random_density(d, &mut rng);
            let sigma = random_density(d, &mut rng);
            let f = swap_operator(d);
            let lhs = (tensor(rho.matrix(), rho.matrix()) * &f).trace();
            assert!((lhs.re - rho.purity()).abs() < 1e-10 && lhs.im.abs() < 1e-10);
            let lhs = (tensor(rho.matrix(), sigma.matrix()) * &f).trace();
            let rhs = (rho.matrix() * sigma.matrix()).trace();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::diagonal(&[1.2, -0.2]).is_err());
        assert!(DensityMatrix::new(pauli_x()).is_err());
        assert!(DensityMatrix::diagonal(&[1.0 + 1e-8, -1e-8]).is_err());
        assert!(DensityMatrix::diagonal(&[1.0 + 1e-10, -1e-10]).is_ok());
        assert!(PureState::new(CVector::from_element(2, C64::new(1.0, 0.0))).is_err());
        assert!(PureState::normalized(CVector::zeros(3)).is_err());
    }

    proptest::proptest! {
        #[test]
        fn norm_ordering(seed in 0u64..10_000, d in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = CMatrix::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let (t, f, o) = (norm(&m, NormKind::Trace), norm(&m, NormKind::Frobenius), norm(&m, NormKind::Operator));
            proptest::prop_assert!(t >= f - 1e-12 && f >= o - 1e-12);
            let v = CVector::from_fn(d, |_, _| C64::new(rng.random::<f64>(), rng.random::<f64>()));
            let r1 = outer(&v, &v);
            let (t, f, o) = (norm(&r1, NormKind::Trace), norm(&r1, NormKind::Frobenius), norm(&r1, NormKind::Operator));
            proptest::prop_assert!((t - f).abs() < 1e-10 * t.max(1.0) && (f - o).abs() < 1e-10 * f.max(1.0));
        }

        #[test]
        fn partial_traces_keep_unit_trace(seed in 0u64..10_000, da in 1usize..4, db in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density(da * db, &mut rng);
            for keep in [Subsystem::A, Subsystem::B] {
                let r = partial_trace(&rho, da, db, keep).unwrap();
                proptest::prop_assert!((r.matrix().trace().re - 1.0).abs() < 1e-10);
            }
        }
    }
}
