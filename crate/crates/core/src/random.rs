//! Seeded Haar sampling.
//!
//! Every draw is a deterministic function of a [`SeedSpec`]. Parallel
//! Monte Carlo code derives one child seed per trial with
//! [`SeedSpec::child`], so results do not depend on scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{CMatrix, CVector, PureState, C64};

/// Resample threshold for the projected norm in [`haar_state_orthogonal`].
const MIN_PROJECTED_NORM: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed, stream_id: 0 }
    }

    pub fn with_stream(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    /// ChaCha8 keyed by the master seed, positioned on `stream_id`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Seed for the `index`-th sub-task (trial, start, unitary sample).
    pub fn child(&self, index: u64) -> SeedSpec {
        SeedSpec {
            master_seed: self.master_seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15))),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard complex Gaussian `(X + iY)/√2`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    // Row-major fill so the draw order is independent of storage layout.
    let data: Vec<C64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    CMatrix::from_row_slice(rows, cols, &data)
}

pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim == 0 {
        return Err(LabError::InvalidArgument("dimension must be positive".into()));
    }
    loop {
        let v = CVector::from_iterator(dim, (0..dim).map(|_| complex_gaussian(rng)));
        if v.norm() > 0.0 {
            return PureState::normalized(v);
        }
    }
}

pub fn haar_state_seeded(dim: usize, seed: SeedSpec) -> Result<PureState> {
    haar_state(dim, &mut seed.rng())
}

/// Haar unitary: QR of a Ginibre matrix, with column `j` of `Q` multiplied
/// by the phase of `R_jj` so that the factorization is unique.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    if dim == 0 {
        return Err(LabError::InvalidArgument("dimension must be positive".into()));
    }
    let qr = ginibre(dim, dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        if n > 0.0 {
            let phase = rjj / n;
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    Ok(q)
}

pub fn haar_unitary_seeded(dim: usize, seed: SeedSpec) -> Result<CMatrix> {
    haar_unitary(dim, &mut seed.rng())
}

/// Splitting of `χ` along a fixed `ψ`: `e^{iθ}χ = √x ψ + √(1-x) φ` with
/// the phase chosen so that `⟨ψ|e^{iθ}χ⟩ ≥ 0`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub x: f64,
    pub phi: PureState,
    /// `χ` after the phase adjustment.
    pub chi: PureState,
}

pub fn decompose_against(chi: &PureState, psi: &PureState) -> Result<Decomposition> {
    if chi.dim() != psi.dim() {
        return Err(LabError::DimensionMismatch { expected: psi.dim(), found: chi.dim() });
    }
    if psi.dim() < 2 {
        return Err(LabError::InvalidArgument("no orthogonal complement in dimension 1".into()));
    }
    let overlap = psi.inner(chi);
    let modulus = overlap.norm();
    let phase = if modulus > 0.0 { overlap.conj() / modulus } else { C64::new(1.0, 0.0) };
    let adjusted = chi.amplitudes() * phase;
    let x = modulus * modulus;
    let residual = &adjusted - psi.amplitudes() * C64::new(modulus, 0.0);
    let rn = residual.norm();
    let phi = if rn > MIN_PROJECTED_NORM { PureState::normalized(residual)? } else { fixed_orthogonal(psi)? };
    Ok(Decomposition { x: x.min(1.0), phi, chi: PureState::normalized(adjusted)? })
}

/// Deterministic unit vector orthogonal to `psi` (Gram–Schmidt on the basis
/// vector where `psi` is smallest).
fn fixed_orthogonal(psi: &PureState) -> Result<PureState> {
    let a = psi.amplitudes();
    let k = (0..a.len()).min_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm())).expect("non-empty");
    let mut e = CVector::zeros(a.len());
    e[k] = C64::new(1.0, 0.0);
    let proj = a.dotc(&e);
    PureState::normalized(e - a * proj)
}

/// Haar-distributed unit vector in the orthogonal complement of `psi`.
pub fn haar_state_orthogonal<R: Rng + ?Sized>(psi: &PureState, rng: &mut R) -> Result<PureState> {
    if psi.dim() < 2 {
        return Err(LabError::InvalidArgument("orthogonal complement needs dimension at least 2".into()));
    }
    loop {
        let chi = haar_state(psi.dim(), rng)?;
        let proj = psi.inner(&chi);
        let v = chi.amplitudes() - psi.amplitudes() * proj;
        if v.norm() >= MIN_PROJECTED_NORM {
            // One reorthogonalization pass keeps ⟨ψ|φ⟩ at roundoff level.
            let v = &v - psi.amplitudes() * psi.amplitudes().dotc(&v);
            return PureState::normalized(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;

    #[test]
    fn reproducible_and_distinct_streams() {
        let s = SeedSpec::new(42);
        let a = haar_state_seeded(5, s).unwrap();
        let b = haar_state_seeded(5, s).unwrap();
        assert_eq!(a, b);
        let c = haar_state_seeded(5, s.child(1)).unwrap();
        assert_ne!(a, c);
        assert_ne!(s.child(1), s.child(2));
        assert_eq!(s.child(7), s.child(7));
        let u1 = haar_unitary_seeded(4, s).unwrap();
        let u2 = haar_unitary_seeded(4, s).unwrap();
        assert_eq!(u1, u2);
    }

    #[test]
    fn haar_state_basic() {
        let mut rng = SeedSpec::new(1).rng();
        for d in 1..10 {
            let s = haar_state(d, &mut rng).unwrap();
            assert!((s.amplitudes().norm() - 1.0).abs() < 1e-12);
        }
        let s = haar_state(1, &mut rng).unwrap();
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
        assert!(haar_state(0, &mut rng).is_err());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = SeedSpec::new(2).rng();
        for d in [1, 2, 3, 8, 18, 32] {
            let u = haar_unitary(d, &mut rng).unwrap();
            assert!(unitarity_residual(&u) <= 1e-10, "d = {d}");
        }
    }

    #[test]
    fn decompose_examples() {
        let mut rng = SeedSpec::new(3).rng();
        let psi = haar_state(4, &mut rng).unwrap();
        let d = decompose_against(&psi, &psi).unwrap();
        assert!((d.x - 1.0).abs() < 1e-12);
        assert!(psi.inner(&d.phi).norm() < 1e-10);

        let e0 = PureState::basis(3, 0).unwrap();
        let e1 = PureState::basis(3, 1).unwrap();
        let chi = PureState::new(e1.amplitudes() * C64::new(0.0, 1.0)).unwrap();
        let d = decompose_against(&chi, &e0).unwrap();
        assert!(d.x.abs() < 1e-15);
        assert!((d.phi.inner(&chi).norm() - 1.0).abs() < 1e-12);

        for _ in 0..50 {
            let chi = haar_state(5, &mut rng).unwrap();
            let psi = haar_state(5, &mut rng).unwrap();
            let d = decompose_against(&chi, &psi).unwrap();
            assert!(psi.inner(&d.chi).im.abs() < 1e-12 && psi.inner(&d.chi).re >= 0.0);
            let rebuilt =
                psi.amplitudes() * C64::new(d.x.sqrt(), 0.0) + d.phi.amplitudes() * C64::new((1.0 - d.x).sqrt(), 0.0);
            assert!((rebuilt - d.chi.amplitudes()).norm() < 1e-10);
            assert!(psi.inner(&d.phi).norm() < 1e-10);
        }
        let one = PureState::basis(1, 0).unwrap();
        assert!(decompose_against(&one, &one).is_err());
    }

    #[test]
    fn orthogonal_sampling() {
        let mut rng = SeedSpec::new(4).rng();
        let psi = haar_state(6, &mut rng).unwrap();
        for _ in 0..100 {
            let phi = haar_state_orthogonal(&psi, &mut rng).unwrap();
            assert!(psi.inner(&phi).norm() < 1e-10);
            assert!((phi.amplitudes().norm() - 1.0).abs() < 1e-12);
        }
        assert!(haar_state_orthogonal(&PureState::basis(1, 0).unwrap(), &mut rng).is_err());
    }
}
