//! Minimum output entropy `min_ψ S(E(ψψ†))`.
//!
//! Concavity of `S` puts the minimum on pure inputs, so the search runs over
//! the unit sphere. The optimizer is multi-start projected gradient descent
//! with Armijo backtracking; [`brute_force_min_entropy`] is a derivative-free
//! cross-check for small inputs.

use serde::Serialize;

use crate::channel::KrausMap;
use crate::error::{LabError, Result};
use crate::linalg::{eigh_unchecked, CVector, PureState, C64};
use crate::parallel::map_indexed;
use crate::random::{haar_state, SeedSpec};

use super::entropy_of_spectrum;

/// Eigenvalue floor inside `log₂` for the gradient.
const LOG_FLOOR: f64 = 1e-30;
/// Largest input dimension accepted by the brute-force oracle.
pub const ORACLE_MAX_INPUT_DIM: usize = 4;
const ORACLE_POLISHED: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinEntOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Sufficient-decrease constant.
    pub armijo_c: f64,
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for MinEntOptions {
    fn default() -> Self {
        Self { max_iters: 200, grad_tol: 1e-7, armijo_c: 1e-4, initial_step: 1.0, min_step: 1e-14 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinEntResult {
    /// Bits.
    pub value: f64,
    #[serde(serialize_with = "serialize_state")]
    pub argmin: PureState,
    pub starts: usize,
    pub converged_starts: usize,
    pub best_gradient_norm: f64,
}

fn serialize_state<S: serde::Serializer>(state: &PureState, s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = state.amplitudes().iter().map(|z| [z.re, z.im]).collect();
    serde::Serialize::serialize(&pairs, s)
}

/// `S(E(ψψ†) / ‖ψ‖²)` in bits.
pub fn output_entropy(map: &KrausMap, psi: &CVector) -> f64 {
    let rho = map.apply_pure(psi);
    let tr = rho.trace().re;
    let spectrum: Vec<f64> = eigh_unchecked(&rho).values.iter().map(|&l| (l / tr).max(0.0)).collect();
    entropy_of_spectrum(&spectrum)
}

/// Value and Euclidean gradient of `f(ψ) = S(E(ψψ†))` on `C^n ≅ R^{2n}`,
/// with no normalization of `ψ`. The gradient is returned as a complex
/// vector `g` such that `df = Re⟨g, dψ⟩`:
/// `g = -2 E†(log₂ρ + I/ln 2) ψ` with `ρ = E(ψψ†)`.
pub fn entropy_gradient(map: &KrausMap, psi: &CVector) -> (f64, CVector) {
    let images: Vec<CVector> = map.ops.iter().map(|k| k * psi).collect();
    let mut rho = crate::linalg::CMatrix::zeros(map.out_dim, map.out_dim);
    for v in &images {
        rho += v * v.adjoint();
    }
    let eig = eigh_unchecked(&rho);
    let value = entropy_of_spectrum(&eig.values);
    let inv_ln2 = std::f64::consts::LOG2_E;
    let g_mat = eig.apply_fn(|l| l.max(LOG_FLOOR).log2() + inv_ln2);
    let mut grad = CVector::zeros(map.in_dim);
    for (k, v) in map.ops.iter().zip(&images) {
        grad += k.adjoint() * (&g_mat * v);
    }
    (value, grad * C64::new(-2.0, 0.0))
}

/// Tangent projection at a unit vector: `g - Re⟨ψ, g⟩ ψ`.
fn tangent(psi: &CVector, g: &CVector) -> CVector {
    let radial = psi.dotc(g).re;
    g - psi * C64::new(radial, 0.0)
}

struct LocalRun {
    value: f64,
    psi: CVector,
    grad_norm: f64,
    converged: bool,
}

fn descend(map: &KrausMap, start: CVector, opts: &MinEntOptions) -> LocalRun {
    let mut psi = start.normalize();
    let (mut value, g) = entropy_gradient(map, &psi);
    let mut iter = 0;
    let mut dir = tangent(&psi, &g);
    let mut grad_norm = dir.norm();
    let mut step = opts.initial_step;
    let mut converged = grad_norm < opts.grad_tol;
    while !converged && iter < opts.max_iters {
        iter += 1;
        let mut t = step;
        let mut accepted = None;
        while t >= opts.min_step {
            let trial = (&psi - &dir * C64::new(t, 0.0)).normalize();
            let (tv, tg) = entropy_gradient(map, &trial);
            if tv <= value - opts.armijo_c * t * grad_norm * grad_norm {
                accepted = Some((trial, tv, tg, t));
                break;
            }
            t *= 0.5;
        }
        let Some((next, next_value, next_grad, t_used)) = accepted else {
            // No descent at machine resolution: a stationary point for our purposes.
            converged = grad_norm < opts.grad_tol.sqrt();
            break;
        };
        psi = next;
        value = next_value;
        dir = tangent(&psi, &next_grad);
        grad_norm = dir.norm();
        step = (t_used * 2.0).min(1e3);
        converged = grad_norm < opts.grad_tol;
    }
    let value = output_entropy(map, &psi);
    LocalRun { value, psi, grad_norm, converged }
}

/// Multi-start search from `starts` Haar-random inputs.
pub fn min_output_entropy(map: &KrausMap, starts: usize, seed: SeedSpec, opts: &MinEntOptions) -> Result<MinEntResult> {
    min_output_entropy_with_starts(map, &[], starts, seed, opts)
}

/// As [`min_output_entropy`], additionally descending from each of `extra`.
/// Random start `i` draws from `seed.child(i)`; the best run wins, ties going
/// to the earliest start (extra starts first).
pub fn min_output_entropy_with_starts(
    map: &KrausMap,
    extra: &[PureState],
    starts: usize,
    seed: SeedSpec,
    opts: &MinEntOptions,
) -> Result<MinEntResult> {
    if starts + extra.len() == 0 {
        return Err(LabError::InvalidArgument("at least one start is required".into()));
    }
    for s in extra {
        if s.dim() != map.in_dim {
            return Err(LabError::DimensionMismatch { expected: map.in_dim, found: s.dim() });
        }
    }
    let total = extra.len() + starts;
    let runs: Vec<Result<LocalRun>> = map_indexed(total, |i| {
        let start = if i < extra.len() {
            extra[i].amplitudes().clone()
        } else {
            let mut rng = seed.child((i - extra.len()) as u64).rng();
            haar_state(map.in_dim, &mut rng)?.into_amplitudes()
        };
        Ok(descend(map, start, opts))
    });
    let mut best: Option<LocalRun> = None;
    let mut converged_starts = 0;
    for run in runs {
        let run = run?;
        if run.converged {
            converged_starts += 1;
        }
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one run");
    Ok(MinEntResult {
        value: best.value,
        argmin: PureState::normalized(best.psi)?,
        starts: total,
        converged_starts,
        best_gradient_norm: best.grad_norm,
    })
}

/// Derivative-free upper bound on `S_min`: the best of `grid_points` Haar
/// inputs, followed by a coordinate pattern search from the best
/// [`ORACLE_POLISHED`] of them. Inputs of dimension above
/// [`ORACLE_MAX_INPUT_DIM`] are rejected.
pub fn brute_force_min_entropy(map: &KrausMap, grid_points: usize, seed: SeedSpec) -> Result<f64> {
    if map.in_dim > ORACLE_MAX_INPUT_DIM {
        return Err(LabError::InvalidArgument(format!(
            "brute-force oracle limited to input dimension {ORACLE_MAX_INPUT_DIM}, got {}",
            map.in_dim
        )));
    }
    if grid_points == 0 {
        return Err(LabError::InvalidArgument("grid_points must be positive".into()));
    }
    let mut rng = seed.rng();
    let mut samples = Vec::with_capacity(grid_points);
    for i in 0..grid_points {
        let psi = haar_state(map.in_dim, &mut rng)?.into_amplitudes();
        samples.push((output_entropy(map, &psi), i, psi));
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let polished = samples
        .iter()
        .take(ORACLE_POLISHED)
        .map(|(v, _, psi)| pattern_search(map, psi.clone(), *v))
        .fold(f64::INFINITY, f64::min);
    Ok(polished.min(samples[0].0))
}

/// Compass search over the real and imaginary parts of each amplitude.
fn pattern_search(map: &KrausMap, mut psi: CVector, mut value: f64) -> f64 {
    let n = psi.len();
    let mut h = 0.1;
    let mut evals = 0usize;
    while h > 1e-10 && evals < 200_000 {
        let mut improved = false;
        for coord in 0..2 * n {
            for sign in [1.0, -1.0] {
                let mut trial = psi.clone();
                let delta = if coord < n { C64::new(sign * h, 0.0) } else { C64::new(0.0, sign * h) };
                trial[coord % n] += delta;
                let trial = trial.normalize();
                let v = output_entropy(map, &trial);
                evals += 1;
                if v < value {
                    value = v;
                    psi = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::StinespringChannel;
    use crate::random::haar_unitary;

    #[test]
    fn constant_and_identity_channels() {
        let e = StinespringChannel::identity_unitary(3, 2).unwrap();
        let r = min_output_entropy(&e.kraus_map(), 5, SeedSpec::new(1), &MinEntOptions::default()).unwrap();
        assert!(r.value.abs() < 1e-10);
        assert_eq!(r.starts, 5);
        let e = StinespringChannel::swap_unitary(3).unwrap();
        let r = min_output_entropy(&e.kraus_map(), 5, SeedSpec::new(1), &MinEntOptions::default()).unwrap();
        assert!(r.value.abs() < 1e-6, "value {}", r.value);
        assert!(
            brute_force_min_entropy(
                &StinespringChannel::identity_unitary(2, 2).unwrap().kraus_map(),
                10,
                SeedSpec::new(0)
            )
            .unwrap()
            .abs()
                < 1e-12
        );
    }

    #[test]
    fn rejects_bad_arguments() {
        let e = StinespringChannel::identity_unitary(2, 2).unwrap();
        assert!(min_output_entropy(&e.kraus_map(), 0, SeedSpec::new(1), &MinEntOptions::default()).is_err());
        let big = StinespringChannel::identity_unitary(5, 2).unwrap();
        assert!(brute_force_min_entropy(&big.kraus_map(), 10, SeedSpec::new(0)).is_err());
    }

    #[test]
    fn result_value_matches_argmin() {
        let mut rng = SeedSpec::new(9).rng();
        let u = haar_unitary(6, &mut rng).unwrap();
        let e = StinespringChannel::new(u, 3, 2).unwrap();
        let map = e.kraus_map();
        let r = min_output_entropy(&map, 10, SeedSpec::new(2), &MinEntOptions::default()).unwrap();
        let direct = output_entropy(&map, r.argmin.amplitudes());
        assert!((direct - r.value).abs() < 1e-8);
        assert!(r.value >= 0.0 && r.value <= 1.0 + 1e-12);
    }
}
