//! wasm-bindgen wrappers behind `www/index.html`. Every export returns a JSON
//! string; the plain functions underneath are what the native tests call.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use moelab::channel::StinespringChannel;
use moelab::entropy::{hayden_check, min_output_entropy, HaydenCheck, MinEntOptions};
use moelab::error::{LabError, Result};
use moelab::experiments::stats::{mean, median};
use moelab::experiments::{g_second_moment, polar_cap_exact};
use moelab::geometry::g_function;
use moelab::guard::MemoryGuard;
use moelab::random::{haar_state, haar_unitary, SeedSpec};

/// Keeps a click in the page under a second or so.
pub const DEMO_MAX_CHANNEL_DIM: usize = 36;
pub const DEMO_MAX_DRAWS: u32 = 200_000;

#[derive(Debug, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    /// Normalized to a density on `[lo, hi]`.
    pub density: Vec<f64>,
}

fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Histogram {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in values {
        let k = (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let scale = 1.0 / (values.len() as f64 * width);
    Histogram { lo, hi, density: counts.into_iter().map(|c| c as f64 * scale).collect() }
}

fn check_sizes(draws: u32, bins: u32) -> Result<()> {
    if draws == 0 || draws > DEMO_MAX_DRAWS {
        return Err(LabError::InvalidArgument(format!("draws must be in 1..={DEMO_MAX_DRAWS}")));
    }
    if !(1..=200).contains(&bins) {
        return Err(LabError::InvalidArgument("bins must be in 1..=200".into()));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct OverlapDemo {
    pub n: usize,
    pub draws: u32,
    pub histogram: Histogram,
    /// `(n-1)(1-t)^{n-2}` at bin centres.
    pub exact_density: Vec<f64>,
    pub tail_half: f64,
    pub tail_half_exact: f64,
}

/// Squared overlap `|⟨e_0|χ⟩|²` of Haar states in dimension `n`.
pub fn overlap_demo(n: usize, draws: u32, seed: u64, bins: u32) -> Result<OverlapDemo> {
    check_sizes(draws, bins)?;
    if !(2..=1024).contains(&n) {
        return Err(LabError::InvalidArgument("n must be in 2..=1024".into()));
    }
    let mut rng = SeedSpec::new(seed).rng();
    let xs: Vec<f64> =
        (0..draws).map(|_| haar_state(n, &mut rng).map(|s| s.amplitudes()[0].norm_sqr())).collect::<Result<_>>()?;
    let histogram = histogram(&xs, 0.0, 1.0, bins as usize);
    let width = 1.0 / bins as f64;
    let exact_density = (0..bins)
        .map(|k| {
            let t = (k as f64 + 0.5) * width;
            (n - 1) as f64 * (1.0 - t).powi(n as i32 - 2)
        })
        .collect();
    let tail_half = xs.iter().filter(|&&x| x >= 0.5).count() as f64 / draws as f64;
    Ok(OverlapDemo { n, draws, histogram, exact_density, tail_half, tail_half_exact: polar_cap_exact(n) })
}

#[derive(Debug, Serialize)]
pub struct GDemo {
    pub dim_a: usize,
    pub dim_b: usize,
    pub draws: u32,
    pub histogram: Histogram,
    pub median: f64,
    pub median_bound: f64,
    pub mean_square: f64,
    pub mean_square_exact: f64,
}

/// `g(ψ) = ‖ψ^B − I/|B|‖₂` over Haar `ψ ∈ A ⊗ B`.
pub fn g_demo(dim_a: usize, dim_b: usize, draws: u32, seed: u64, bins: u32) -> Result<GDemo> {
    check_sizes(draws, bins)?;
    if dim_a == 0 || dim_b < 2 || dim_a * dim_b > 4096 {
        return Err(LabError::InvalidArgument("need |A| ≥ 1, |B| ≥ 2, |A||B| ≤ 4096".into()));
    }
    let mut rng = SeedSpec::new(seed).rng();
    let gs: Vec<f64> =
        (0..draws).map(|_| g_function(&haar_state(dim_a * dim_b, &mut rng)?, dim_a, dim_b)).collect::<Result<_>>()?;
    let hi = (1.0 - 1.0 / dim_b as f64).sqrt();
    let squares: Vec<f64> = gs.iter().map(|g| g * g).collect();
    Ok(GDemo {
        dim_a,
        dim_b,
        draws,
        histogram: histogram(&gs, 0.0, hi, bins as usize),
        median: median(&gs),
        median_bound: 2.0 / (dim_a as f64).sqrt(),
        mean_square: mean(&squares),
        mean_square_exact: g_second_moment(dim_a, dim_b),
    })
}

#[derive(Debug, Serialize)]
pub struct ChannelDemo {
    pub dim_a: usize,
    pub dim_b: usize,
    pub s_min: f64,
    pub s_min_conj: f64,
    /// `S_min(E) + S_min(Ē)`, the additive prediction for the product.
    pub additive_sum: f64,
    pub hayden: HaydenCheck,
    pub printed_bound_holds: bool,
    pub corrected_bound_holds: bool,
    pub overlap_holds: bool,
    /// Entropy of the product on `Φ`, minus the additive sum. Negative
    /// would mean a violation.
    pub phi_minus_sum: f64,
}

/// One Haar channel: `S_min` of it and its conjugate, and the `(E ⊗ Ē)(Φ)` entropy.
pub fn channel_demo(dim_a: usize, dim_b: usize, seed: u64, starts: usize) -> Result<ChannelDemo> {
    if dim_a < 1 || dim_b < 1 || dim_a * dim_b > DEMO_MAX_CHANNEL_DIM {
        return Err(LabError::InvalidArgument(format!("need |A||B| ≤ {DEMO_MAX_CHANNEL_DIM} in the browser")));
    }
    if !(1..=64).contains(&starts) {
        return Err(LabError::InvalidArgument("starts must be in 1..=64".into()));
    }
    let seed = SeedSpec::new(seed);
    let u = haar_unitary(dim_a * dim_b, &mut seed.child(0).rng())?;
    let e = StinespringChannel::new(u, dim_a, dim_b)?;
    let opts = MinEntOptions::default();
    let s_min = min_output_entropy(&e.kraus_map(), starts, seed.child(1), &opts)?.value;
    let s_min_conj = min_output_entropy(&e.conjugate()?.kraus_map(), starts, seed.child(2), &opts)?.value;
    let hayden = hayden_check(&e, &MemoryGuard::default())?;
    Ok(ChannelDemo {
        dim_a,
        dim_b,
        s_min,
        s_min_conj,
        additive_sum: s_min + s_min_conj,
        printed_bound_holds: hayden.bound_holds(),
        corrected_bound_holds: hayden.corrected_bound_holds(),
        overlap_holds: hayden.overlap_holds(dim_b),
        phi_minus_sum: hayden.entropy - (s_min + s_min_conj),
        hayden,
    })
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = overlapHistogram)]
pub fn overlap_histogram(n: usize, draws: u32, seed: u32, bins: u32) -> std::result::Result<String, JsError> {
    to_js(overlap_demo(n, draws, seed.into(), bins))
}

#[wasm_bindgen(js_name = gDistribution)]
pub fn g_distribution(
    dim_a: usize,
    dim_b: usize,
    draws: u32,
    seed: u32,
    bins: u32,
) -> std::result::Result<String, JsError> {
    to_js(g_demo(dim_a, dim_b, draws, seed.into(), bins))
}

#[wasm_bindgen(js_name = randomChannel)]
pub fn random_channel(dim_a: usize, dim_b: usize, seed: u32, starts: usize) -> std::result::Result<String, JsError> {
    to_js(channel_demo(dim_a, dim_b, seed.into(), starts))
}
