use std::path::Path;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::channel::StinespringChannel;
use crate::entropy::{
    bound_r, bound_s, entropy_deviation, hayden_bound, hayden_check, hayden_corrected_bound,
    two_norm_entropy_gap_bound, von_neumann,
};
use crate::error::{LabError, Result};
use crate::geometry::{distance_from_mixed, g_function, lipschitz_pair_check, pinch, projectors_from_basis, SetParams};
use crate::guard::MemoryGuard;
use crate::linalg::{
    hermitian_operator_norm, norm, outer, reduced_state, CMatrix, DensityMatrix, NormKind, PureState, Subsystem,
};
use crate::random::{decompose_against, ginibre, haar_state, haar_state_orthogonal, haar_unitary, SeedSpec};

use super::engine::{count, run_trials, write_csv, ExperimentConfig, ExperimentReport};
use super::stats::{ks_test, mean_and_se, median, pearson, wilson_interval};

/// Largest `|A|` for the polar-cap suite; beyond it the event is too rare to see.
pub const GEOMETRIC_MAX_DIM: usize = 24;
const SLACK: f64 = 1e-9;

/// `2^{-(n-1)}`, the exact `Pr(|⟨ψ|χ⟩|² ≥ 1/2)` for Haar `χ` in dimension `n`.
pub fn polar_cap_exact(n: usize) -> f64 {
    0.5f64.powi(n as i32 - 1)
}

/// `2^{-n} / (8n)`.
pub fn polar_cap_bound(n: usize) -> f64 {
    0.5f64.powi(n as i32) / (8.0 * n as f64)
}

/// `Pr(x ≥ 1/2)` for `x = |⟨ψ|χ⟩|²`, against the exact law and the paper's lower bound.
pub fn verify_geometric(dim_a: usize, trials: u64, seed: SeedSpec) -> Result<ExperimentReport> {
    if dim_a > GEOMETRIC_MAX_DIM {
        return Err(LabError::InvalidArgument(format!("geometric suite needs |A| ≤ {GEOMETRIC_MAX_DIM}, got {dim_a}")));
    }
    let started = Instant::now();
    let config = ExperimentConfig::new(dim_a, 1, trials, seed)?;
    let hits = run_trials(&config, |_, rng| {
        let chi = haar_state(dim_a, rng)?;
        Ok(chi.amplitudes()[0].norm_sqr() >= 0.5)
    })?;
    let exact = polar_cap_exact(dim_a);
    let bound = polar_cap_bound(dim_a);
    let r = ExperimentReport::from_counts("geometric", &config, count(hits), started)?.with_lower_bound(bound);
    let in_ci = r.ci_low <= exact && exact <= r.ci_high;
    let ci = r.ci_text();
    Ok(r.check("exact_in_ci", in_ci, format!("exact {exact:.6e} vs {ci}"))
        .check("exact_ge_bound", exact >= bound, format!("exact {exact:.6e} vs bound {bound:.6e}"))
        .metric("exact", exact)
        .finish(started))
}

/// `E g² = (|A|+|B|)/(|A||B|+1) - 1/|B|` for Haar bipartite states.
pub fn g_second_moment(dim_a: usize, dim_b: usize) -> f64 {
    let (a, b) = (dim_a as f64, dim_b as f64);
    (a + b) / (a * b + 1.0) - 1.0 / b
}

/// Median of `g` against `2/√|A|`, and the exact second moment.
///
/// The frequency reported is `Pr(g > 2/√|A|)`; the median claim is that it
/// does not exceed 1/2.
pub fn verify_median_lemma(dim_a: usize, dim_b: usize, trials: u64, seed: SeedSpec) -> Result<ExperimentReport> {
    let started = Instant::now();
    let config = ExperimentConfig::new(dim_a, dim_b, trials, seed)?;
    let gs = run_trials(&config, |_, rng| g_function(&haar_state(dim_a * dim_b, rng)?, dim_a, dim_b))?;
    let m_bound = 2.0 / (dim_a as f64).sqrt();
    let med = median(&gs);
    let sq: Vec<f64> = gs.iter().map(|g| g * g).collect();
    let (mean_g2, se) = mean_and_se(&sq);
    let exact = g_second_moment(dim_a, dim_b);
    let within = (mean_g2 - exact).abs() <= 4.0 * se || (mean_g2 - exact).abs() < 1e-12;
    let above = count(gs.iter().map(|&g| g > m_bound));
    Ok(ExperimentReport::from_counts("median", &config, above, started)?
        .with_upper_bound(0.5)
        .check("median_le_bound", med <= m_bound, format!("median {med:.6} vs 2/√|A| = {m_bound:.6}"))
        .check("second_moment", within, format!("mean g² {mean_g2:.6} vs exact {exact:.6}, 4·SE = {:.3e}", 4.0 * se))
        .metric("median", med)
        .metric("median_bound", m_bound)
        .metric("mean_g2", mean_g2)
        .metric("se_g2", se)
        .metric("exact_g2", exact)
        .finish(started))
}

/// `4 exp(-|A||B|²(ε - 2/√|A|)²/(64a))`.
pub fn prop5_bound(dim_a: usize, dim_b: usize, a: f64, epsilon: f64) -> f64 {
    let (da, db) = (dim_a as f64, dim_b as f64);
    let shift = epsilon - 2.0 / da.sqrt();
    4.0 * (-da * db * db * shift * shift / (64.0 * a)).exp()
}

/// `Pr(g ≥ ε and ψ^B ∈ Y_{|B|,a})` against the large-deviation bound.
///
/// `ε ≤ 2/√|A|` is accepted and evaluated literally, with a warning that the
/// bound is outside the regime it was derived for.
pub fn verify_prop5(
    dim_a: usize,
    dim_b: usize,
    a: f64,
    epsilon: f64,
    trials: u64,
    seed: SeedSpec,
) -> Result<ExperimentReport> {
    if dim_a < dim_b * dim_b {
        return Err(LabError::InvalidArgument(format!("needs |A| ≥ |B|², got |A| = {dim_a}, |B| = {dim_b}")));
    }
    if a < 3.0 {
        return Err(LabError::InvalidArgument(format!("needs a ≥ 3, got {a}")));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(LabError::InvalidArgument(format!("needs ε > 0, got {epsilon}")));
    }
    let started = Instant::now();
    let params = SetParams::new(dim_b, dim_a, super::engine::DEFAULT_C, a)?;
    let config = ExperimentConfig::new(dim_a, dim_b, trials, seed)?.with_params(params)?;
    let y_cap = a / dim_b as f64 + crate::linalg::STRUCTURAL_TOL;
    let hits = run_trials(&config, |_, rng| {
        let psi = haar_state(dim_a * dim_b, rng)?;
        let rb = reduced_state(&psi, dim_a, dim_b, Subsystem::B)?;
        let in_y = hermitian_operator_norm(rb.matrix()) <= y_cap;
        Ok(in_y && distance_from_mixed(&rb, NormKind::Frobenius) >= epsilon)
    })?;
    let bound = prop5_bound(dim_a, dim_b, a, epsilon);
    let regime = 2.0 / (dim_a as f64).sqrt();
    let mut r = ExperimentReport::from_counts("prop5", &config, count(hits), started)?
        .with_upper_bound(bound)
        .parameter("epsilon", epsilon)
        .parameter("a", a)
        .metric("g_max", (1.0 - 1.0 / dim_b as f64).sqrt());
    if epsilon <= regime {
        r = r.warn(format!("ε = {epsilon} ≤ 2/√|A| = {regime:.4}: outside the regime of the bound"));
    }
    Ok(r.finish(started))
}

/// The two operator-norm tail bounds. The first applies only for `ε < 1`.
/// Logarithms are base 2.
pub fn hhl_bounds(dim_a: usize, dim_b: usize, epsilon: f64) -> (Option<f64>, f64) {
    let (da, db) = (dim_a as f64, dim_b as f64);
    let prefactor = (10.0 * db / epsilon).powf(2.0 * db);
    let denom = 14.0 * std::f64::consts::LN_2;
    let first = (epsilon < 1.0).then(|| prefactor * (-da * epsilon * epsilon / denom).exp());
    let second = prefactor * (-da * (epsilon - (1.0 + epsilon).log2()) / denom).exp();
    (first, second)
}

/// `Pr(‖ψ^B‖∞ ≥ (1+ε)/|B|)` against both tail bounds.
pub fn verify_hhl(dim_a: usize, dim_b: usize, epsilon: f64, trials: u64, seed: SeedSpec) -> Result<ExperimentReport> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(LabError::InvalidArgument(format!("needs ε > 0, got {epsilon}")));
    }
    let started = Instant::now();
    let config = ExperimentConfig::new(dim_a, dim_b, trials, seed)?;
    let threshold = (1.0 + epsilon) / dim_b as f64;
    let hits = run_trials(&config, |_, rng| {
        let psi = haar_state(dim_a * dim_b, rng)?;
        let rb = reduced_state(&psi, dim_a, dim_b, Subsystem::B)?;
        Ok(hermitian_operator_norm(rb.matrix()) >= threshold)
    })?;
    let (first, second) = hhl_bounds(dim_a, dim_b, epsilon);
    let best = first.map_or(second, |f| f.min(second));
    let mut r = ExperimentReport::from_counts("hhl", &config, count(hits), started)?
        .with_upper_bound(best)
        .parameter("epsilon", epsilon)
        .metric("bound_second", second);
    if let Some(f) = first {
        r = r.metric("bound_first", f);
    }
    Ok(r.finish(started))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LevyStatistic {
    /// `f(φ) = |⟨θ|φ⟩|` for a fixed unit `θ`; Lipschitz constant 1.
    OverlapWithFixedVector,
}

/// `4 exp(-dim α²/16)`.
pub fn levy_bound(dim: usize, alpha: f64) -> f64 {
    4.0 * (-(dim as f64) * alpha * alpha / 16.0).exp()
}

/// `Pr(|⟨θ|φ⟩| ≥ 1/√dim + α)`, exactly `(1-t)^{dim-1}` with `t = (1/√dim + α)²`.
pub fn levy_exact_tail(dim: usize, alpha: f64) -> f64 {
    let t = (1.0 / (dim as f64).sqrt() + alpha).powi(2);
    if t >= 1.0 {
        0.0
    } else {
        (1.0 - t).powi(dim as i32 - 1)
    }
}

pub fn verify_levy(
    dim: usize,
    statistic: LevyStatistic,
    alpha: f64,
    trials: u64,
    seed: SeedSpec,
) -> Result<ExperimentReport> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(LabError::InvalidArgument(format!("needs α > 0, got {alpha}")));
    }
    let started = Instant::now();
    let config = ExperimentConfig::new(dim, 1, trials, seed)?;
    let threshold = 1.0 / (dim as f64).sqrt() + alpha;
    let hits = run_trials(&config, |_, rng| {
        let phi = haar_state(dim, rng)?;
        let f = match statistic {
            LevyStatistic::OverlapWithFixedVector => phi.amplitudes()[0].norm(),
        };
        Ok(f >= threshold)
    })?;
    let bound = levy_bound(dim, alpha);
    let exact = levy_exact_tail(dim, alpha);
    let r = ExperimentReport::from_counts("levy", &config, count(hits), started)?.with_upper_bound(bound);
    let in_ci = r.ci_low <= exact && exact <= r.ci_high;
    let ci = r.ci_text();
    Ok(r.check("exact_le_bound", exact <= bound.min(1.0), format!("exact {exact:.6e} vs bound {bound:.6e}"))
        .check("exact_in_ci", in_ci, format!("exact {exact:.6e} vs {ci}"))
        .parameter("alpha", alpha)
        .metric("exact_tail", exact)
        .finish(started))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FgRow {
    pub trial: u64,
    /// `‖E(|ψ⟩⟨φ|)‖∞`
    pub cross_norm: f64,
    /// `‖E(φφ†) - I/|B|‖∞`
    pub mixed_norm: f64,
    /// `δS(E(ψψ†))`
    pub delta_s: f64,
    pub f_event: bool,
    pub g_event: bool,
    pub d_event: bool,
}

/// Frequencies of the events `F`, `G` and `D = {δS(E(ψψ†)) ≥ c/|B|}` for
/// Haar `U`, Haar `ψ` and `φ ⊥ ψ`, with the intersection inequality
/// `#(M∩N) ≥ #M - #Nᶜ` asserted on every ordered pair of logged events.
/// The thresholds are fractions of the tube width at `N = tube_n` (default `|A|`).
pub fn verify_fg(
    dim_a: usize,
    dim_b: usize,
    c: f64,
    tube_n: Option<usize>,
    trials: u64,
    seed: SeedSpec,
    csv: Option<&Path>,
) -> Result<ExperimentReport> {
    if dim_a < 2 {
        return Err(LabError::InvalidArgument("F/G suite needs |A| ≥ 2 for φ ⊥ ψ".into()));
    }
    let started = Instant::now();
    let n = tube_n.unwrap_or(dim_a);
    let params = SetParams::new(dim_b, n, c, super::engine::DEFAULT_A)?;
    let config = ExperimentConfig::new(dim_a, dim_b, trials, seed)?.with_params(params)?;
    let width = crate::geometry::tube_width(n);
    let d_threshold = c / dim_b as f64;
    let rows = run_trials(&config, |i, rng| {
        let u = haar_unitary(dim_a * dim_b, rng)?;
        let e = StinespringChannel::new(u, dim_a, dim_b)?;
        let psi = haar_state(dim_a, rng)?;
        let phi = haar_state_orthogonal(&psi, rng)?;
        let cross = norm(&e.apply_op(&outer(psi.amplitudes(), phi.amplitudes()))?, NormKind::Operator);
        let out_phi = e.apply(&phi.projector())?;
        let mixed = distance_from_mixed(&out_phi, NormKind::Operator);
        let delta_s = entropy_deviation(&e.apply(&psi.projector())?);
        Ok(FgRow {
            trial: i,
            cross_norm: cross,
            mixed_norm: mixed,
            delta_s,
            f_event: cross <= width / 4.0,
            g_event: mixed <= width / 2.0,
            d_event: delta_s >= d_threshold,
        })
    })?;
    let events: [(&str, Vec<bool>); 3] = [
        ("F", rows.iter().map(|r| r.f_event).collect()),
        ("G", rows.iter().map(|r| r.g_event).collect()),
        ("D", rows.iter().map(|r| r.d_event).collect()),
    ];
    let f_count = count(events[0].1.iter().copied());
    let mut r = ExperimentReport::from_counts("fg", &config, f_count, started)?;
    for (name, flags) in &events {
        let k = count(flags.iter().copied());
        let ci = wilson_interval(k, trials, config.confidence_level)?;
        r = r
            .metric(&format!("pr_{}", name.to_lowercase()), k as f64 / trials as f64)
            .metric(&format!("pr_{}_ci_low", name.to_lowercase()), ci.low)
            .metric(&format!("pr_{}_ci_high", name.to_lowercase()), ci.high);
    }
    for (m_name, m) in &events {
        for (n_name, n) in &events {
            if m_name == n_name {
                continue;
            }
            let both = count(m.iter().zip(n).map(|(&x, &y)| x && y));
            let lhs = count(m.iter().copied()) as i64 - count(n.iter().map(|&y| !y)) as i64;
            r = r.check(
                &format!("intersection_{m_name}_{n_name}"),
                both as i64 >= lhs,
                format!("#({m_name}∩{n_name}) = {both} vs #{m_name} - #{n_name}ᶜ = {lhs}"),
            );
        }
    }
    let fg = count(rows.iter().map(|r| r.f_event && r.g_event));
    let regime = (dim_a as f64).log2() >= 8.0 * (dim_b as f64).powi(8);
    r = r
        .parameter("c", c)
        .metric("pr_fg", fg as f64 / trials as f64)
        .metric("f_threshold", width / 4.0)
        .metric("g_threshold", width / 2.0)
        .metric("asymptotic_regime", if regime { 1.0 } else { 0.0 })
        .warn("analytic lower bounds on Pr(F), Pr(G) carry unspecified constants and need log|A| ≥ 8|B|^8; reported, not asserted".into());
    if let Some(path) = csv {
        write_csv(path, &rows)?;
        r.csv_path = Some(path.display().to_string());
    }
    Ok(r.finish(started))
}

/// Splits Haar `χ` along a fixed `ψ` into `(x, φ)`, and tests independence of
/// `x` and `y = |⟨θ|φ⟩|²` for a fixed `θ ⊥ ψ`, plus the Beta(1, n-1) law of `x`.
///
/// The frequency reported is `Pr(x ≥ 1/2 and y ≥ 1/2)`, which under
/// independence equals `2^{-(n-1)} · 2^{-(n-2)}`.
pub fn verify_independence(dim_a: usize, trials: u64, seed: SeedSpec) -> Result<ExperimentReport> {
    if dim_a < 2 {
        return Err(LabError::InvalidArgument("independence suite needs |A| ≥ 2".into()));
    }
    let started = Instant::now();
    let config = ExperimentConfig::new(dim_a, 1, trials, seed)?;
    let psi = PureState::basis(dim_a, 0)?;
    let theta = PureState::basis(dim_a, 1)?;
    let pairs = run_trials(&config, |_, rng| {
        let chi = haar_state(dim_a, rng)?;
        let d = decompose_against(&chi, &psi)?;
        Ok((d.x, theta.inner(&d.phi).norm_sqr()))
    })?;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let joint = count(pairs.iter().map(|&(x, y)| x >= 0.5 && y >= 0.5));
    let expected_joint = polar_cap_exact(dim_a) * polar_cap_exact(dim_a - 1);
    let n = dim_a as i32;
    let ks = ks_test(&xs, |t| 1.0 - (1.0 - t.clamp(0.0, 1.0)).powi(n - 1));
    let mut r = ExperimentReport::from_counts("independence", &config, joint, started)?;
    let in_ci = r.ci_low <= expected_joint && expected_joint <= r.ci_high;
    let ci = r.ci_text();
    r = r
        .check("joint_matches_product", in_ci, format!("product of marginals {expected_joint:.6e} vs {ci}"))
        .check("x_marginal_ks", ks.p_value > 0.01, format!("KS D = {:.5}, p = {:.4}", ks.statistic, ks.p_value))
        .metric("ks_statistic", ks.statistic)
        .metric("ks_p_value", ks.p_value)
        .metric("expected_joint", expected_joint);
    let limit = 3.0 / (trials as f64).sqrt();
    match pearson(&xs, &ys) {
        Some(rho) => {
            r = r
                .check("correlation", rho.abs() <= limit, format!("|r| = {:.5} vs 3/√n = {limit:.5}", rho.abs()))
                .metric("correlation", rho);
        }
        None => {
            r = r
                .metric("correlation", f64::NAN)
                .warn("correlation degenerate: y is constant (|A| = 2 leaves one orthogonal direction)".into());
        }
    }
    Ok(r.finish(started))
}

/// Printed and corrected Hayden bounds, and the overlap with `Φ^{BB'}`,
/// over `samples` Haar unitaries. The frequency reported is that of
/// printed-bound violations.
pub fn verify_hayden(dim_a: usize, dim_b: usize, samples: u64, seed: SeedSpec) -> Result<ExperimentReport> {
    let started = Instant::now();
    let guard = MemoryGuard::from_env();
    guard.check_product(dim_a, dim_b)?;
    let config = ExperimentConfig::with_guard(dim_a, dim_b, samples, seed, &guard)?;
    let checks = run_trials(&config, |_, rng| {
        let e = StinespringChannel::new(haar_unitary(dim_a * dim_b, rng)?, dim_a, dim_b)?;
        hayden_check(&e, &guard)
    })?;
    let printed = count(checks.iter().map(|h| !h.bound_holds()));
    let corrected = count(checks.iter().map(|h| !h.corrected_bound_holds()));
    let overlap = count(checks.iter().map(|h| !h.overlap_holds(dim_b)));
    let max_entropy = checks.iter().map(|h| h.entropy).fold(f64::NEG_INFINITY, f64::max);
    let min_overlap = checks.iter().map(|h| h.overlap).fold(f64::INFINITY, f64::min);
    let b = hayden_bound(dim_b);
    Ok(ExperimentReport::from_counts("hayden", &config, printed, started)?
        .check("printed_bound", printed == 0, format!("{printed} of {samples} exceed 2log|B| - log|B|/|B| = {b:.6}"))
        .check("overlap", overlap == 0, format!("{overlap} of {samples} below 1/|B|"))
        .check(
            "corrected_bound",
            corrected == 0,
            format!("{corrected} of {samples} exceed s(1/|B|, |B|²) = {:.6}", hayden_corrected_bound(dim_b)),
        )
        .metric("max_entropy", max_entropy)
        .metric("printed_bound", b)
        .metric("corrected_bound", hayden_corrected_bound(dim_b))
        .metric("min_overlap", min_overlap)
        .finish(started))
}

/// Random density matrix of random rank: `GG†/tr` with `G` a `D×k` Ginibre
/// matrix, `k` uniform in `1..=D`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    let k = rng.random_range(1..=dim);
    let g = ginibre(dim, k, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr))
}

#[derive(Debug, Clone, Copy, Default)]
struct BoundsTrial {
    two_norm_bits: bool,
    two_norm_nats: bool,
    s_bound: bool,
    r_bound: bool,
}

/// Entropy/norm inequalities on random density matrices of dimension `dim`.
/// The frequency reported is that of violations of the two-norm lemma with
/// entropies in bits.
pub fn verify_bounds(dim: usize, samples: u64, seed: SeedSpec) -> Result<ExperimentReport> {
    if dim < 2 {
        return Err(LabError::InvalidArgument("bounds suite needs D ≥ 2".into()));
    }
    let started = Instant::now();
    let config = ExperimentConfig::new(1, dim, samples, seed)?;
    let trials = run_trials(&config, |_, rng| {
        let rho = random_density(dim, rng)?;
        let gap = two_norm_entropy_gap_bound(&rho);
        let lambda = hermitian_operator_norm(rho.matrix()).clamp(1.0 / dim as f64, 1.0);
        let s = von_neumann(&rho);
        Ok(BoundsTrial {
            two_norm_bits: gap.lhs < gap.rhs_bits - SLACK,
            two_norm_nats: gap.lhs < gap.rhs - SLACK,
            s_bound: s > bound_s(lambda, dim)? + SLACK,
            r_bound: rho.purity() < bound_r(lambda, dim)? - SLACK,
        })
    })?;
    let bits = count(trials.iter().map(|t| t.two_norm_bits));
    let nats = count(trials.iter().map(|t| t.two_norm_nats));
    let s = count(trials.iter().map(|t| t.s_bound));
    let r = count(trials.iter().map(|t| t.r_bound));
    Ok(ExperimentReport::from_counts("bounds", &config, bits, started)?
        .check("two_norm_gap_bits", bits == 0, format!("{bits} of {samples} with ‖σ-I/D‖₂² < (log₂D - S)/D"))
        .check("two_norm_gap_nats", nats == 0, format!("{nats} of {samples} with ‖σ-I/D‖₂² < (ln D - S_e)/D"))
        .check("entropy_le_s", s == 0, format!("{s} of {samples} with S > s(λ, D)"))
        .check("purity_ge_r", r == 0, format!("{r} of {samples} with tr ρ² < r(λ, D)"))
        .finish(started))
}

#[derive(Debug, Clone, Copy, Default)]
struct LipschitzTrial {
    haar_pair: Option<bool>,
    near_pair: Option<bool>,
    global_ok: bool,
}

const Y_REJECTION_LIMIT: usize = 1000;

/// Restricted Lipschitz inequality on `pairs` independent Haar pairs with
/// both reductions in `Y_{|B|,a}`, plus the same number of nearby pairs
/// `φ ∝ ψ + s·G`. Also checks the global constant 2 on unfiltered pairs.
pub fn verify_lipschitz(dim_a: usize, dim_b: usize, a: f64, pairs: u64, seed: SeedSpec) -> Result<ExperimentReport> {
    let started = Instant::now();
    let params = SetParams::new(dim_b, dim_a, super::engine::DEFAULT_C, a)?;
    let config = ExperimentConfig::new(dim_a, dim_b, pairs, seed)?.with_params(params)?;
    let n = dim_a * dim_b;
    let check_pair = |psi: &PureState, phi: &PureState| -> Result<Option<bool>> {
        match lipschitz_pair_check(psi, phi, dim_a, dim_b, a) {
            Ok(p) => Ok(Some(p.holds())),
            Err(LabError::InvalidArgument(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let trials = run_trials(&config, |_, rng| {
        let mut out = LipschitzTrial { global_ok: true, ..Default::default() };
        for _ in 0..Y_REJECTION_LIMIT {
            let psi = haar_state(n, rng)?;
            let phi = haar_state(n, rng)?;
            let g_diff = (g_function(&psi, dim_a, dim_b)? - g_function(&phi, dim_a, dim_b)?).abs();
            out.global_ok &= g_diff <= 2.0 * (psi.amplitudes() - phi.amplitudes()).norm() + SLACK;
            if let Some(ok) = check_pair(&psi, &phi)? {
                out.haar_pair = Some(ok);
                break;
            }
        }
        for _ in 0..Y_REJECTION_LIMIT {
            let psi = haar_state(n, rng)?;
            let scale = 10f64.powf(-3.0 * rng.random::<f64>());
            let noise = haar_state(n, rng)?;
            let phi =
                PureState::normalized(psi.amplitudes() + noise.amplitudes() * crate::linalg::C64::new(scale, 0.0))?;
            if let Some(ok) = check_pair(&psi, &phi)? {
                out.near_pair = Some(ok);
                break;
            }
        }
        Ok(out)
    })?;
    let haar_tested = count(trials.iter().map(|t| t.haar_pair.is_some()));
    let haar_bad = count(trials.iter().map(|t| t.haar_pair == Some(false)));
    let near_tested = count(trials.iter().map(|t| t.near_pair.is_some()));
    let near_bad = count(trials.iter().map(|t| t.near_pair == Some(false)));
    let global_bad = count(trials.iter().map(|t| !t.global_ok));
    let mut r = ExperimentReport::from_counts("lipschitz", &config, haar_bad + near_bad, started)?
        .check("haar_pairs", haar_bad == 0, format!("{haar_bad} violations on {haar_tested} Y-filtered Haar pairs"))
        .check("near_pairs", near_bad == 0, format!("{near_bad} violations on {near_tested} Y-filtered nearby pairs"))
        .check("global_constant_2", global_bad == 0, format!("{global_bad} trials with |Δg| > 2‖ψ-φ‖"))
        .parameter("a", a)
        .metric("haar_pairs_tested", haar_tested as f64)
        .metric("near_pairs_tested", near_tested as f64);
    if haar_tested < pairs {
        r = r.warn(format!("only {haar_tested} of {pairs} Haar pairs landed in Y within the rejection limit"));
    }
    Ok(r.finish(started))
}

/// Norm contraction under pinching: random `dim × dim` Ginibre matrices and
/// projector families from a Haar basis split into random blocks.
pub fn verify_pinching(dim: usize, draws: u64, seed: SeedSpec) -> Result<ExperimentReport> {
    let started = Instant::now();
    let config = ExperimentConfig::new(dim, 1, draws, seed)?;
    let violations = run_trials(&config, |_, rng| {
        let x: CMatrix = ginibre(dim, dim, rng);
        let u = haar_unitary(dim, rng)?;
        let mut sizes = Vec::new();
        let mut left = dim;
        while left > 0 {
            let s = rng.random_range(1..=left);
            sizes.push(s);
            left -= s;
        }
        let px = pinch(&x, &projectors_from_basis(&u, &sizes)?)?;
        let op = norm(&px, NormKind::Operator) > norm(&x, NormKind::Operator) + 1e-10;
        let fro = norm(&px, NormKind::Frobenius) > norm(&x, NormKind::Frobenius) + 1e-10;
        Ok((op, fro))
    })?;
    let op = count(violations.iter().map(|v| v.0));
    let fro = count(violations.iter().map(|v| v.1));
    Ok(ExperimentReport::from_counts("pinching", &config, op + fro, started)?
        .check("operator_norm", op == 0, format!("{op} of {draws} draws with ‖pinch(X)‖∞ > ‖X‖∞"))
        .check("frobenius_norm", fro == 0, format!("{fro} of {draws} draws with ‖pinch(X)‖₂ > ‖X‖₂"))
        .finish(started))
}
