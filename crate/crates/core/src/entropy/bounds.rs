use serde::Serialize;

use crate::error::{LabError, Result};
use crate::linalg::{norm, CMatrix, DensityMatrix, NormKind};

use super::von_neumann;

/// Shannon binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Entropy ceiling for a state with `‖ρ‖∞ ≥ λ`:
/// `s(λ, D) = (1 - λ) log₂(D - 1) + h(λ)`, valid for `1/D ≤ λ ≤ 1`
/// (at `λ = 1/D` it equals `log₂ D`).
pub fn bound_s(lambda: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(LabError::InvalidArgument(format!("s(λ, D) needs D ≥ 2, got {d}")));
    }
    if !(lambda >= 1.0 / d as f64 && lambda <= 1.0) {
        return Err(LabError::InvalidArgument(format!("s(λ, D) needs 1/D ≤ λ ≤ 1, got λ = {lambda}, D = {d}")));
    }
    Ok((1.0 - lambda) * ((d - 1) as f64).log2() + binary_entropy(lambda))
}

/// Purity floor for a state with `‖ρ‖∞ ≥ λ`:
/// `r(λ, D) = λ² + (1 - λ)²/(D - 1)`, valid for `1/D ≤ λ ≤ 1`.
pub fn bound_r(lambda: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(LabError::InvalidArgument(format!("r(λ, D) needs D ≥ 2, got {d}")));
    }
    if !(lambda >= 1.0 / d as f64 && lambda <= 1.0) {
        return Err(LabError::InvalidArgument(format!("r(λ, D) needs 1/D ≤ λ ≤ 1, got λ = {lambda}, D = {d}")));
    }
    Ok(lambda * lambda + (1.0 - lambda).powi(2) / (d - 1) as f64)
}

/// Both sides of `‖σ - I/D‖₂² ≥ (log D - S(σ))/D`.
///
/// The inequality holds with natural logarithms (`rhs`). `rhs_bits` is the
/// same expression with entropies in bits; it is larger by `1/ln 2` and can
/// exceed `lhs` (e.g. the flat rank-2 state in `D = 3`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoNormGap {
    pub lhs: f64,
    pub rhs: f64,
    pub rhs_bits: f64,
}

pub fn two_norm_entropy_gap_bound(sigma: &DensityMatrix) -> TwoNormGap {
    let d = sigma.dim();
    let mixed = CMatrix::identity(d, d).unscale(d as f64);
    let lhs = norm(&(sigma.matrix() - mixed), NormKind::Frobenius).powi(2);
    let gap_bits = ((d as f64).log2() - von_neumann(sigma)).max(0.0);
    let rhs_bits = gap_bits / d as f64;
    TwoNormGap { lhs, rhs: rhs_bits * std::f64::consts::LN_2, rhs_bits }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PureState;

    #[test]
    fn bound_s_examples() {
        for d in [2, 3, 7] {
            assert!(bound_s(1.0, d).unwrap().abs() < 1e-15);
        }
        assert!((bound_s(0.5, 2).unwrap() - 1.0).abs() < 1e-15);
        let expected = 0.5 * 3f64.log2() + 1.0;
        assert!((bound_s(0.5, 4).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 1.7925).abs() < 1e-4);
        assert!((bound_s(0.25, 4).unwrap() - 2.0).abs() < 1e-14);
        assert!(bound_s(0.2, 4).is_err());
        assert!(bound_s(1.1, 4).is_err());
    }

    #[test]
    fn bound_s_decreasing() {
        for d in [2usize, 3, 4, 9] {
            let lo = 1.0 / d as f64;
            let vals: Vec<f64> = (1..=200).map(|i| bound_s(lo + (1.0 - lo) * i as f64 / 200.0, d).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-15), "D = {d}");
        }
    }

    #[test]
    fn bound_r_examples() {
        assert!((bound_r(1.0, 5).unwrap() - 1.0).abs() < 1e-15);
        assert!((bound_r(0.25, 4).unwrap() - 0.25).abs() < 1e-15);
        assert!((bound_r(0.5, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!(bound_r(0.2, 4).is_err());
        assert!(bound_r(0.5, 1).is_err());
    }

    #[test]
    fn two_norm_gap_examples() {
        let g = two_norm_entropy_gap_bound(&DensityMatrix::maximally_mixed(4));
        assert!(g.lhs.abs() < 1e-15 && g.rhs.abs() < 1e-12);
        // pure qubit: lhs = 1/2, gap = 1 bit, rhs_bits = 1/2
        let g = two_norm_entropy_gap_bound(&PureState::basis(2, 0).unwrap().projector());
        assert!((g.lhs - 0.5).abs() < 1e-14);
        assert!((g.rhs_bits - 0.5).abs() < 1e-14);
        assert!(g.lhs >= g.rhs);
    }

    #[test]
    fn two_norm_gap_bits_counterexample() {
        let flat = DensityMatrix::diagonal(&[0.5, 0.5, 0.0]).unwrap();
        let g = two_norm_entropy_gap_bound(&flat);
        assert!((g.lhs - 1.0 / 6.0).abs() < 1e-14);
        assert!((g.rhs_bits - (3f64.log2() - 1.0) / 3.0).abs() < 1e-14);
        assert!(g.lhs < g.rhs_bits);
        assert!(g.lhs >= g.rhs);
    }
}
