//! Toy-scale run of the additivity-violation argument: per sampled unitary,
//! estimate `S_min(E)`, `S_min(Ē)`, an upper bound on `S_min(E ⊗ Ē)`, and how
//! often random outputs land in `X` and `Y`.

use std::time::Instant;

use serde::Serialize;

use crate::channel::{KrausMap, StinespringChannel};
use crate::entropy::{hayden_check, min_output_entropy, min_output_entropy_with_starts, MinEntOptions};
use crate::error::{LabError, Result};
use crate::geometry::{in_x_witnessed, in_y, SetParams, C0};
use crate::guard::MemoryGuard;
use crate::linalg::{CMatrix, PureState};
use crate::parallel::map_indexed;
use crate::random::{haar_state, haar_unitary, SeedSpec};

use super::stats::mean;

pub const NO_VIOLATION_NOTE: &str = "no violation expected at these dimensions";
/// Slack allowed by the subadditivity sanity check.
pub const SUBADDITIVITY_SLACK: f64 = 2e-3;
/// A row counts as an apparent violation when its gap exceeds this.
pub const GAP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitarySource {
    Haar,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineOptions {
    /// Random starts for each single-channel optimization.
    pub starts: usize,
    /// Random starts for the joint optimization, on top of `Φ` and the product of argmins.
    pub joint_starts: usize,
    /// Haar inputs per unitary for the `X`/`Y` frequencies.
    pub inputs: u64,
    /// `N` in `TUBE(σ, N)`; `|A|` when absent.
    pub tube_n: Option<usize>,
    pub source: UnitarySource,
    pub minent: MinEntOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            joint_starts: 4,
            inputs: 50,
            tube_n: None,
            source: UnitarySource::Haar,
            minent: MinEntOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineRow {
    pub unitary_index: u64,
    pub s_min: f64,
    pub s_min_conj: f64,
    pub joint_optimizer: f64,
    pub hayden_entropy: f64,
    /// `min(joint_optimizer, hayden_entropy)`
    pub joint_upper: f64,
    /// `s_min + s_min_conj - joint_upper`
    pub gap: f64,
    pub printed_bound: f64,
    pub printed_bound_holds: bool,
    pub corrected_bound: f64,
    pub corrected_bound_holds: bool,
    pub overlap: f64,
    pub delta_s_min: f64,
    /// `δS_min(E) ≥ c/|B|`
    pub low_entropy_event: bool,
    pub in_x_frequency: f64,
    pub in_y_frequency: f64,
    pub subadditive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineSummary {
    pub gap_min: f64,
    pub gap_mean: f64,
    pub gap_max: f64,
    pub apparent_violations: u64,
    pub printed_bound_failures: u64,
    pub corrected_bound_failures: u64,
    pub subadditivity_failures: u64,
    pub low_entropy_frequency: f64,
    pub mean_in_x: f64,
    pub mean_in_y: f64,
    /// `(log₂|B| - 2c)/|B|`, the violation size the theorem predicts for `c ≥ c₀`.
    pub predicted_gap: f64,
    pub c0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub dim_a: usize,
    pub dim_b: usize,
    pub c: f64,
    pub a: f64,
    pub tube_n: usize,
    pub unitary_samples: u64,
    pub seed: SeedSpec,
    pub options: PipelineOptions,
    pub rows: Vec<PipelineRow>,
    pub summary: PipelineSummary,
    pub notes: Vec<String>,
    pub runtime_seconds: f64,
}

impl PipelineReport {
    pub fn without_runtime(&self) -> Self {
        Self { runtime_seconds: 0.0, ..self.clone() }
    }
}

pub fn counterexample_pipeline(
    dim_a: usize,
    dim_b: usize,
    c: f64,
    a: f64,
    unitary_samples: u64,
    seed: SeedSpec,
    options: &PipelineOptions,
) -> Result<PipelineReport> {
    counterexample_pipeline_with_guard(dim_a, dim_b, c, a, unitary_samples, seed, options, &MemoryGuard::from_env())
}

#[allow(clippy::too_many_arguments)]
pub fn counterexample_pipeline_with_guard(
    dim_a: usize,
    dim_b: usize,
    c: f64,
    a: f64,
    unitary_samples: u64,
    seed: SeedSpec,
    options: &PipelineOptions,
    guard: &MemoryGuard,
) -> Result<PipelineReport> {
    if unitary_samples == 0 {
        return Err(LabError::InvalidArgument("unitary_samples must be at least 1".into()));
    }
    if options.starts == 0 {
        return Err(LabError::InvalidArgument("starts must be at least 1".into()));
    }
    guard.check_product(dim_a, dim_b)?;
    let started = Instant::now();
    let tube_n = options.tube_n.unwrap_or(dim_a);
    let params = SetParams::new(dim_b, tube_n, c, a)?;
    let rows: Vec<Result<PipelineRow>> = map_indexed(unitary_samples as usize, |k| {
        pipeline_row(k as u64, dim_a, dim_b, &params, seed.child(k as u64), options, guard)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let n = rows.len() as f64;
    let tally = |f: fn(&PipelineRow) -> bool| rows.iter().filter(|r| f(r)).count() as u64;
    let summary = PipelineSummary {
        gap_min: gaps.iter().copied().fold(f64::INFINITY, f64::min),
        gap_mean: mean(&gaps),
        gap_max: gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        apparent_violations: tally(|r| r.gap > GAP_TOLERANCE),
        printed_bound_failures: tally(|r| !r.printed_bound_holds),
        corrected_bound_failures: tally(|r| !r.corrected_bound_holds),
        subadditivity_failures: tally(|r| !r.subadditive),
        low_entropy_frequency: tally(|r| r.low_entropy_event) as f64 / n,
        mean_in_x: mean(&rows.iter().map(|r| r.in_x_frequency).collect::<Vec<_>>()),
        mean_in_y: mean(&rows.iter().map(|r| r.in_y_frequency).collect::<Vec<_>>()),
        predicted_gap: ((dim_b as f64).log2() - 2.0 * c) / dim_b as f64,
        c0: C0,
    };
    let mut notes = vec![
        NO_VIOLATION_NOTE.to_string(),
        format!("the violation argument needs c ≥ c₀ = {C0} and log|A| ≥ 8|B|^8; here c = {c}, |A| = {dim_a}, |B| = {dim_b}"),
        "S_min values are optimizer estimates (upper bounds); the joint value is an upper bound on S_min(E ⊗ Ē)".to_string(),
    ];
    if summary.printed_bound_failures > 0 {
        notes.push(format!(
            "{} of {unitary_samples} rows exceed the printed 2log|B| - log|B|/|B| bound; the s(1/|B|, |B|²) bound is the one implied by the overlap",
            summary.printed_bound_failures
        ));
    }
    Ok(PipelineReport {
        dim_a,
        dim_b,
        c,
        a,
        tube_n,
        unitary_samples,
        seed,
        options: *options,
        rows,
        summary,
        notes,
        runtime_seconds: started.elapsed().as_secs_f64(),
    })
}

fn pipeline_row(
    index: u64,
    dim_a: usize,
    dim_b: usize,
    params: &SetParams,
    seed: SeedSpec,
    options: &PipelineOptions,
    guard: &MemoryGuard,
) -> Result<PipelineRow> {
    let u = match options.source {
        UnitarySource::Haar => haar_unitary(dim_a * dim_b, &mut seed.child(0).rng())?,
        UnitarySource::Identity => CMatrix::identity(dim_a * dim_b, dim_a * dim_b),
    };
    let e = StinespringChannel::new(u, dim_a, dim_b)?;
    let conj = e.conjugate()?;
    let map = e.kraus_map();
    let single = min_output_entropy(&map, options.starts, seed.child(1), &options.minent)?;
    let single_conj = min_output_entropy(&conj.kraus_map(), options.starts, seed.child(2), &options.minent)?;

    let joint_map = KrausMap::product_with_conjugate(&e)?;
    let extra = [PureState::maximally_entangled(dim_a)?, single.argmin.tensor(&single_conj.argmin)];
    let joint =
        min_output_entropy_with_starts(&joint_map, &extra, options.joint_starts, seed.child(3), &options.minent)?;
    let hayden = hayden_check(&e, guard)?;
    let joint_upper = joint.value.min(hayden.entropy);

    let witness = e.apply(&single.argmin.projector())?;
    let mut rng = seed.child(4).rng();
    let (mut in_x, mut in_y_count) = (0u64, 0u64);
    for _ in 0..options.inputs {
        let chi = haar_state(dim_a, &mut rng)?;
        let rho = e.apply(&chi.projector())?;
        if in_y(&rho, params)? {
            in_y_count += 1;
        }
        if in_x_witnessed(&rho, params, std::slice::from_ref(&witness))?.is_member() {
            in_x += 1;
        }
    }
    let inputs = options.inputs.max(1) as f64;
    let delta_s_min = ((dim_b as f64).log2() - single.value).max(0.0);
    Ok(PipelineRow {
        unitary_index: index,
        s_min: single.value,
        s_min_conj: single_conj.value,
        joint_optimizer: joint.value,
        hayden_entropy: hayden.entropy,
        joint_upper,
        gap: single.value + single_conj.value - joint_upper,
        printed_bound: hayden.bound,
        printed_bound_holds: hayden.bound_holds(),
        corrected_bound: hayden.corrected_bound,
        corrected_bound_holds: hayden.corrected_bound_holds(),
        overlap: hayden.overlap,
        delta_s_min,
        low_entropy_event: delta_s_min >= params.c / dim_b as f64,
        in_x_frequency: in_x as f64 / inputs,
        in_y_frequency: in_y_count as f64 / inputs,
        subadditive: joint_upper <= single.value + single_conj.value + SUBADDITIVITY_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_unitary_has_zero_gap() {
        let opts = PipelineOptions {
            source: UnitarySource::Identity,
            inputs: 5,
            starts: 2,
            joint_starts: 1,
            ..Default::default()
        };
        let r = counterexample_pipeline(2, 2, 1.0, 3.0, 1, SeedSpec::new(0), &opts).unwrap();
        let row = r.rows[0];
        assert!(row.s_min.abs() < 1e-8 && row.s_min_conj.abs() < 1e-8);
        assert!(row.joint_upper.abs() < 1e-8 && row.gap.abs() < 1e-8);
        assert!(r.notes.iter().any(|n| n == NO_VIOLATION_NOTE));
    }

    #[test]
    fn haar_rows_are_sane() {
        let opts = PipelineOptions { inputs: 10, starts: 4, joint_starts: 2, ..Default::default() };
        let r = counterexample_pipeline(3, 2, 0.5, 3.0, 2, SeedSpec::new(11), &opts).unwrap();
        for row in &r.rows {
            assert!(row.subadditive);
            assert!(row.corrected_bound_holds);
            assert!(row.overlap >= 0.5 - 1e-9);
            assert!((0.0..=1.0).contains(&row.in_x_frequency));
        }
        assert_eq!(r.summary.c0, C0);
    }

    #[test]
    fn guard_refuses_large_products() {
        let guard = MemoryGuard::new(16);
        let err = counterexample_pipeline_with_guard(
            4,
            2,
            1.0,
            3.0,
            1,
            SeedSpec::new(0),
            &PipelineOptions::default(),
            &guard,
        );
        assert!(matches!(err, Err(LabError::ResourceGuard { .. })));
    }
}
