use serde::Serialize;

use crate::channel::StinespringChannel;
use crate::error::{LabError, Result};
use crate::guard::MemoryGuard;
use crate::linalg::{CMatrix, DensityMatrix, C64};

use super::{bound_s, von_neumann};

/// The printed bound `2 log₂|B| - log₂|B| / |B|`.
pub fn hayden_bound(dim_b: usize) -> f64 {
    let l = (dim_b as f64).log2();
    2.0 * l - l / dim_b as f64
}

/// `s(1/|B|, |B|²) = log₂|B| + (1 - 1/|B|) log₂(|B| + 1)`: the entropy
/// ceiling implied by an eigenvalue of at least `1/|B|` in dimension `|B|²`.
pub fn hayden_corrected_bound(dim_b: usize) -> f64 {
    if dim_b < 2 {
        return 0.0;
    }
    bound_s(1.0 / dim_b as f64, dim_b * dim_b).expect("1/|B| > 1/|B|² for |B| ≥ 2")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HaydenCheck {
    /// `S((E ⊗ Ē)(Φ^{AA'}))` in bits.
    pub entropy: f64,
    /// [`hayden_bound`].
    pub bound: f64,
    /// [`hayden_corrected_bound`].
    pub corrected_bound: f64,
    /// `⟨Φ^{BB'}|(E ⊗ Ē)(Φ^{AA'})|Φ^{BB'}⟩`.
    pub overlap: f64,
}

impl HaydenCheck {
    pub fn bound_holds(&self) -> bool {
        self.entropy <= self.bound + 1e-8
    }

    pub fn corrected_bound_holds(&self) -> bool {
        self.entropy <= self.corrected_bound + 1e-8
    }

    pub fn overlap_holds(&self, dim_b: usize) -> bool {
        self.overlap >= 1.0 / dim_b as f64 - 1e-9
    }
}

/// `(E ⊗ Ē)(Φ^{AA'})`.
///
/// The global output `(V ⊗ V̄)|Φ⟩` is pure with amplitude
/// `|A|^{-1/2} Σ_i V_{(a b), i} V̄_{(a' b'), i}`; arranging it as a matrix
/// `M[(a a'), (b b')]` the `BB'` marginal is `Mᵀ M̄`.
pub fn maximally_entangled_output(e: &StinespringChannel) -> Result<DensityMatrix> {
    let (a, b) = (e.dim_a(), e.dim_b());
    let u = e.unitary();
    let scale = 1.0 / (a as f64).sqrt();
    let m = CMatrix::from_fn(a * a, b * b, |row, col| {
        let (env, env2) = (row / a, row % a);
        let (out, out2) = (col / b, col % b);
        let s: C64 = (0..a).map(|i| u[(env * b + out, i * b)] * u[(env2 * b + out2, i * b)].conj()).sum();
        s * scale
    });
    Ok(DensityMatrix::from_trusted(m.transpose() * m.map(|z| z.conj())))
}

pub fn hayden_check(e: &StinespringChannel, guard: &MemoryGuard) -> Result<HaydenCheck> {
    if e.variant() != crate::channel::Variant::Direct {
        return Err(LabError::WrongVariant { expected: crate::channel::Variant::Direct, found: e.variant() });
    }
    guard.check_product(e.dim_a(), e.dim_b())?;
    let b = e.dim_b();
    let out = maximally_entangled_output(e)?;
    // ⟨Φ|ρ|Φ⟩ = (1/|B|) Σ_{k,l} ρ_{(kk),(ll)}
    let mut overlap = C64::new(0.0, 0.0);
    for k in 0..b {
        for l in 0..b {
            overlap += out.matrix()[(k * b + k, l * b + l)];
        }
    }
    Ok(HaydenCheck {
        entropy: von_neumann(&out),
        bound: hayden_bound(b),
        corrected_bound: hayden_corrected_bound(b),
        overlap: overlap.re / b as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::apply_product;
    use crate::linalg::{max_abs_diff, PureState};
    use crate::random::{haar_unitary, SeedSpec};

    #[test]
    fn bound_values() {
        assert!((hayden_bound(2) - 1.5).abs() < 1e-15);
        assert!((hayden_corrected_bound(2) - (1.0 + 0.5 * 3f64.log2())).abs() < 1e-14);
        for b in 2..10 {
            let l = (b as f64).log2();
            let closed = l + (1.0 - 1.0 / b as f64) * ((b + 1) as f64).log2();
            assert!((hayden_corrected_bound(b) - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_channel() {
        let e = StinespringChannel::identity_unitary(4, 2).unwrap();
        let h = hayden_check(&e, &MemoryGuard::default()).unwrap();
        assert!(h.entropy.abs() < 1e-12);
        assert!((h.overlap - 0.5).abs() < 1e-12);
        assert!(h.bound_holds() && h.overlap_holds(2));
    }

    #[test]
    fn matches_general_product_route() {
        let mut rng = SeedSpec::new(21).rng();
        for (a, b) in [(2, 2), (3, 2), (2, 3)] {
            let e = StinespringChannel::new(haar_unitary(a * b, &mut rng).unwrap(), a, b).unwrap();
            let phi = PureState::maximally_entangled(a).unwrap().projector();
            let general = apply_product(&e, &phi).unwrap();
            let special = maximally_entangled_output(&e).unwrap();
            assert!(max_abs_diff(general.matrix(), special.matrix()) < 1e-12);
        }
    }

    #[test]
    fn guard_applies() {
        let e = StinespringChannel::identity_unitary(8, 2).unwrap();
        assert!(hayden_check(&e, &MemoryGuard::new(100)).is_err());
    }
}
