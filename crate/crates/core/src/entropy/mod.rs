//! Entropies (in bits), analytic entropy/norm bounds and minimum output
//! entropy estimation.

mod bounds;
mod hayden;
mod min_output;

pub use bounds::{binary_entropy, bound_r, bound_s, two_norm_entropy_gap_bound, TwoNormGap};
pub use hayden::{hayden_bound, hayden_check, hayden_corrected_bound, HaydenCheck};
pub use min_output::{
    brute_force_min_entropy, entropy_gradient, min_output_entropy, min_output_entropy_with_starts, output_entropy,
    MinEntOptions, MinEntResult, ORACLE_MAX_INPUT_DIM,
};

use crate::linalg::DensityMatrix;

/// `-Σ p log₂ p` over a spectrum, with `0 log 0 = 0` and negative drift clamped.
pub fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    let s: f64 = spectrum.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    s.max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.spectrum())
}

/// `δS(ρ) = log₂(dim) - S(ρ)`, clamped at 0.
pub fn entropy_deviation(rho: &DensityMatrix) -> f64 {
    ((rho.dim() as f64).log2() - von_neumann(rho)).max(0.0)
}
