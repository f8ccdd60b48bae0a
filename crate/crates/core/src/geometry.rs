//! Tubes around states, the sets `X_{D,N,c}` and `Y_{D,a}`, pinching and the
//! distance-from-mixed function `g`.

use serde::Serialize;

use crate::entropy::entropy_deviation;
use crate::error::{LabError, Result};
use crate::linalg::{
    hermitian_operator_norm, max_abs_diff, norm, reduced_state, CMatrix, DensityMatrix, NormKind, PureState, Subsystem,
    STRUCTURAL_TOL,
};

/// The constant `c₀` above which the additivity violation is proven.
pub const C0: f64 = 1333.0;

/// Tolerance on the mixing parameter found by [`in_tube`].
const P_TOL: f64 = 1e-6;
const MEMBERSHIP_SLACK: f64 = 1e-9;

/// `TUBE(σ, N)`: states within operator-norm distance `√(log₂N / N)` of some
/// `pσ + (1-p)I/D` with `p ∈ [1/2, 1]`.
#[derive(Debug, Clone)]
pub struct TubeSpec {
    center: DensityMatrix,
    width_param: usize,
    width: f64,
}

impl TubeSpec {
    pub fn new(center: DensityMatrix, width_param: usize) -> Result<Self> {
        if width_param == 0 {
            return Err(LabError::InvalidArgument("tube width parameter must be positive".into()));
        }
        Ok(Self { center, width_param, width: tube_width(width_param) })
    }

    pub fn center(&self) -> &DensityMatrix {
        &self.center
    }

    pub fn width_param(&self) -> usize {
        self.width_param
    }

    pub fn width(&self) -> f64 {
        self.width
    }
}

pub fn tube_width(n: usize) -> f64 {
    let n = n as f64;
    (n.log2() / n).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeMembership {
    pub member: bool,
    pub best_p: f64,
    pub best_dist: f64,
}

/// `‖π - pσ - (1-p)I/D‖∞`.
pub fn tube_distance(pi: &DensityMatrix, sigma: &DensityMatrix, p: f64) -> f64 {
    let d = pi.dim();
    let mixed = CMatrix::identity(d, d).unscale(d as f64);
    let target = sigma.matrix().scale(p) + mixed.scale(1.0 - p);
    hermitian_operator_norm(&(pi.matrix() - target))
}

/// Minimizes the (convex) tube distance over `p ∈ [1/2, 1]` by golden-section
/// search and compares with the tube width.
pub fn in_tube(pi: &DensityMatrix, tube: &TubeSpec) -> Result<TubeMembership> {
    if pi.dim() != tube.center.dim() {
        return Err(LabError::DimensionMismatch { expected: tube.center.dim(), found: pi.dim() });
    }
    let f = |p: f64| tube_distance(pi, &tube.center, p);
    let (best_p, best_dist) = golden_section_min(f, 0.5, 1.0, P_TOL);
    Ok(TubeMembership { member: best_dist <= tube.width + MEMBERSHIP_SLACK, best_p, best_dist })
}

/// Minimum of a convex function on `[lo, hi]`, endpoints included.
fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let ends = [(lo, f(lo)), (hi, f(hi))];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    [(mid, f(mid)), (x1, f1), (x2, f2), ends[0], ends[1]].into_iter().fold((f64::NAN, f64::INFINITY), |best, cand| {
        if cand.1 < best.1 {
            cand
        } else {
            best
        }
    })
}

/// Parameters of `X_{D,N,c}` and `Y_{D,a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SetParams {
    pub d: usize,
    pub n: usize,
    pub c: f64,
    pub a: f64,
}

impl SetParams {
    pub fn new(d: usize, n: usize, c: f64, a: f64) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(LabError::InvalidArgument("D and N must be positive".into()));
        }
        if c.is_nan() || c <= 0.0 {
            return Err(LabError::InvalidArgument(format!("c must be positive, got {c}")));
        }
        if a.is_nan() || a <= 1.0 {
            return Err(LabError::InvalidArgument(format!("a must exceed 1, got {a}")));
        }
        Ok(Self { d, n, c, a })
    }

    /// Whether any state can have `δS ≥ c/D` at all.
    pub fn x_nonempty(&self) -> bool {
        self.c / self.d as f64 <= (self.d as f64).log2()
    }
}

/// `‖ρ‖∞ ≤ a/D`.
pub fn in_y(rho: &DensityMatrix, params: &SetParams) -> Result<bool> {
    if rho.dim() != params.d {
        return Err(LabError::DimensionMismatch { expected: params.d, found: rho.dim() });
    }
    Ok(hermitian_operator_norm(rho.matrix()) <= params.a / params.d as f64 + STRUCTURAL_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum XMembership {
    Member {
        witness_index: usize,
        best_p: f64,
        best_dist: f64,
    },
    NotMember,
    /// No witnesses were supplied, so nothing can be certified.
    NoWitnesses,
}

impl XMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, XMembership::Member { .. })
    }
}

/// Membership in `X_{D,N,c}` certified against the given candidate centers:
/// some witness `σ` with `δS(σ) ≥ c/D` whose tube contains `ρ`.
pub fn in_x_witnessed(rho: &DensityMatrix, params: &SetParams, witnesses: &[DensityMatrix]) -> Result<XMembership> {
    if rho.dim() != params.d {
        return Err(LabError::DimensionMismatch { expected: params.d, found: rho.dim() });
    }
    if witnesses.is_empty() {
        return Ok(XMembership::NoWitnesses);
    }
    let threshold = params.c / params.d as f64 - MEMBERSHIP_SLACK;
    for (i, sigma) in witnesses.iter().enumerate() {
        if sigma.dim() != params.d {
            return Err(LabError::DimensionMismatch { expected: params.d, found: sigma.dim() });
        }
        if entropy_deviation(sigma) < threshold {
            continue;
        }
        let tube = TubeSpec::new(sigma.clone(), params.n)?;
        let m = in_tube(rho, &tube)?;
        if m.member {
            return Ok(XMembership::Member { witness_index: i, best_p: m.best_p, best_dist: m.best_dist });
        }
    }
    Ok(XMembership::NotMember)
}

/// Checks that `projectors` are orthogonal projectors summing to the identity.
pub fn validate_projectors(projectors: &[CMatrix], dim: usize) -> Result<()> {
    let invalid = |msg: String| Err(LabError::InvalidArgument(format!("invalid projector family: {msg}")));
    if projectors.is_empty() {
        return invalid("empty".into());
    }
    let mut total = CMatrix::zeros(dim, dim);
    for (i, p) in projectors.iter().enumerate() {
        if p.nrows() != dim || p.ncols() != dim {
            return Err(LabError::DimensionMismatch { expected: dim, found: p.nrows() });
        }
        if max_abs_diff(&(p * p), p) > STRUCTURAL_TOL || max_abs_diff(p, &p.adjoint()) > STRUCTURAL_TOL {
            return invalid(format!("P_{i} is not an orthogonal projector"));
        }
        for (j, q) in projectors.iter().enumerate().skip(i + 1) {
            if (p * q).iter().any(|z| z.norm() > STRUCTURAL_TOL) {
                return invalid(format!("P_{i} P_{j} ≠ 0"));
            }
        }
        total += p;
    }
    if max_abs_diff(&total, &CMatrix::identity(dim, dim)) > STRUCTURAL_TOL {
        return invalid("projectors do not sum to the identity".into());
    }
    Ok(())
}

/// Projectors onto consecutive groups of columns of the unitary `basis`.
pub fn projectors_from_basis(basis: &CMatrix, block_sizes: &[usize]) -> Result<Vec<CMatrix>> {
    if block_sizes.iter().sum::<usize>() != basis.ncols() {
        return Err(LabError::InvalidArgument("block sizes must sum to the dimension".into()));
    }
    let mut start = 0;
    Ok(block_sizes
        .iter()
        .map(|&size| {
            let cols = basis.columns(start, size);
            start += size;
            cols * cols.adjoint()
        })
        .collect())
}

/// `Σ P_k X P_k`.
pub fn pinch(x: &CMatrix, projectors: &[CMatrix]) -> Result<CMatrix> {
    if !x.is_square() {
        return Err(LabError::DimensionMismatch { expected: x.nrows(), found: x.ncols() });
    }
    validate_projectors(projectors, x.nrows())?;
    Ok(projectors.iter().fold(CMatrix::zeros(x.nrows(), x.ncols()), |acc, p| acc + p * x * p))
}

/// `g(ψ) = ‖ψ^B - I/|B|‖₂`.
pub fn g_function(psi: &PureState, dim_a: usize, dim_b: usize) -> Result<f64> {
    let rb = reduced_state(psi, dim_a, dim_b, Subsystem::B)?;
    Ok(distance_from_mixed(&rb, NormKind::Frobenius))
}

pub fn distance_from_mixed(rho: &DensityMatrix, kind: NormKind) -> f64 {
    let d = rho.dim();
    let diff = rho.matrix() - CMatrix::identity(d, d).unscale(d as f64);
    match kind {
        NormKind::Operator => hermitian_operator_norm(&diff),
        _ => norm(&diff, kind),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzPair {
    /// `|g(ψ) - g(φ)|`
    pub lhs: f64,
    /// `√(4a/|B|) ‖ψ - φ‖₂`
    pub rhs: f64,
}

impl LipschitzPair {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + 1e-9
    }
}

/// Restricted Lipschitz inequality for `g`. Both reductions must lie in
/// `Y_{|B|,a}`; pairs outside it are rejected.
pub fn lipschitz_pair_check(
    psi: &PureState,
    phi: &PureState,
    dim_a: usize,
    dim_b: usize,
    a: f64,
) -> Result<LipschitzPair> {
    let bound = a / dim_b as f64 + STRUCTURAL_TOL;
    let mut gs = [0.0; 2];
    for (slot, state) in gs.iter_mut().zip([psi, phi]) {
        let rb = reduced_state(state, dim_a, dim_b, Subsystem::B)?;
        let op = hermitian_operator_norm(rb.matrix());
        if op > bound {
            return Err(LabError::InvalidArgument(format!(
                "reduced state has operator norm {op:.6} > a/|B| = {:.6}",
                a / dim_b as f64
            )));
        }
        *slot = distance_from_mixed(&rb, NormKind::Frobenius);
    }
    let dist = (psi.amplitudes() - phi.amplitudes()).norm();
    Ok(LipschitzPair { lhs: (gs[0] - gs[1]).abs(), rhs: (4.0 * a / dim_b as f64).sqrt() * dist })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, pauli_x, real_matrix};
    use crate::random::{haar_state, haar_unitary, SeedSpec};

    #[test]
    fn tube_self_and_mixed() {
        let mut rng = SeedSpec::new(1).rng();
        let sigma = haar_state(3, &mut rng).unwrap().projector();
        let tube = TubeSpec::new(sigma.clone(), 16).unwrap();
        let m = in_tube(&sigma, &tube).unwrap();
        assert!(m.member);
        assert!((m.best_p - 1.0).abs() < 1e-6 && m.best_dist < 1e-6);

        let mixed = DensityMatrix::maximally_mixed(3);
        let tube = TubeSpec::new(mixed.clone(), 16).unwrap();
        let m = in_tube(&mixed, &tube).unwrap();
        assert!(m.member && m.best_dist < 1e-12);
    }

    #[test]
    fn tube_excludes_mixed_from_pure_center() {
        // f(p) = p/2 on [1/2, 1]; minimum 1/4 at p = 1/2.
        let sigma = PureState::basis(2, 0).unwrap().projector();
        let n = 256; // width = √(8/256) ≈ 0.177 < 1/4
        assert!(tube_width(n) < 0.25);
        let tube = TubeSpec::new(sigma, n).unwrap();
        let m = in_tube(&DensityMatrix::maximally_mixed(2), &tube).unwrap();
        assert!(!m.member);
        assert!((m.best_dist - 0.25).abs() < 1e-9);
        assert!((m.best_p - 0.5).abs() < 1e-6);
    }

    #[test]
    fn golden_section_matches_grid() {
        let mut rng = SeedSpec::new(2).rng();
        for _ in 0..20 {
            let sigma = haar_state(4, &mut rng).unwrap().projector();
            let chi = haar_state(4, &mut rng).unwrap();
            let tube = TubeSpec::new(sigma.clone(), 64).unwrap();
            let pi = chi.projector();
            let m = in_tube(&pi, &tube).unwrap();
            let grid_min =
                (0..100).map(|i| tube_distance(&pi, &sigma, 0.5 + 0.5 * i as f64 / 99.0)).fold(f64::INFINITY, f64::min);
            assert!(grid_min >= m.best_dist - 1e-6);
        }
    }

    #[test]
    fn y_membership() {
        let p = SetParams::new(2, 4, 1.0, 1.3).unwrap();
        assert!(in_y(&DensityMatrix::maximally_mixed(2), &p).unwrap());
        assert!(!in_y(&PureState::basis(2, 0).unwrap().projector(), &p).unwrap());
        assert!(in_y(&DensityMatrix::diagonal(&[0.6, 0.4]).unwrap(), &p).unwrap());
        let p = SetParams::new(2, 4, 1.0, 1.1).unwrap();
        assert!(!in_y(&DensityMatrix::diagonal(&[0.6, 0.4]).unwrap(), &p).unwrap());
        assert!(SetParams::new(2, 4, 1.0, 1.0).is_err());
    }

    #[test]
    fn x_membership() {
        let pure = PureState::basis(4, 0).unwrap().projector();
        let p = SetParams::new(4, 16, 8.0, 2.0).unwrap(); // c/D = 2 = log₂4
        assert!(p.x_nonempty());
        let m = in_x_witnessed(&pure, &p, std::slice::from_ref(&pure)).unwrap();
        assert_eq!(m, XMembership::Member { witness_index: 0, best_p: m_best_p(&m), best_dist: m_best_dist(&m) });
        assert!(m.is_member());

        let mixed = DensityMatrix::maximally_mixed(4);
        let p = SetParams::new(4, 16, 0.1, 2.0).unwrap();
        assert_eq!(in_x_witnessed(&mixed, &p, std::slice::from_ref(&mixed)).unwrap(), XMembership::NotMember);
        assert_eq!(in_x_witnessed(&mixed, &p, &[]).unwrap(), XMembership::NoWitnesses);
    }

    fn m_best_p(m: &XMembership) -> f64 {
        match m {
            XMembership::Member { best_p, .. } => *best_p,
            _ => f64::NAN,
        }
    }

    fn m_best_dist(m: &XMembership) -> f64 {
        match m {
            XMembership::Member { best_dist, .. } => *best_dist,
            _ => f64::NAN,
        }
    }

    #[test]
    fn pinching_examples() {
        let x = pauli_x();
        let comp = vec![real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]), real_matrix(2, 2, &[0.0, 0.0, 0.0, 1.0])];
        assert_eq!(pinch(&x, &comp).unwrap(), CMatrix::zeros(2, 2));

        let e = eigh(&x).unwrap();
        let eigen_proj = projectors_from_basis(&e.vectors, &[1, 1]).unwrap();
        let pinched = pinch(&x, &eigen_proj).unwrap();
        assert!(max_abs_diff(&pinched, &x) < 1e-12);

        let mut rng = SeedSpec::new(3).rng();
        let u = haar_unitary(5, &mut rng).unwrap();
        let proj = projectors_from_basis(&u, &[2, 1, 2]).unwrap();
        let y = crate::random::ginibre(5, 5, &mut rng);
        let py = pinch(&y, &proj).unwrap();
        assert!((py.trace() - y.trace()).norm() < 1e-12);

        let bad = vec![real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])];
        assert!(pinch(&x, &bad).is_err());
        let overlapping = vec![CMatrix::identity(2, 2), real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])];
        assert!(pinch(&x, &overlapping).is_err());
    }

    #[test]
    fn g_examples() {
        let phi = PureState::maximally_entangled(3).unwrap();
        assert!(g_function(&phi, 3, 3).unwrap() < 1e-14);
        let prod = PureState::basis(3, 1).unwrap().tensor(&PureState::basis(2, 0).unwrap());
        assert!((g_function(&prod, 3, 2).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        let mut rng = SeedSpec::new(4).rng();
        for _ in 0..50 {
            let psi = haar_state(8, &mut rng).unwrap();
            assert!(g_function(&psi, 2, 4).unwrap() <= (1.0 - 0.25f64).sqrt() + 1e-12);
        }
        assert!(g_function(&phi, 2, 3).is_err());
    }

    #[test]
    fn lipschitz_examples() {
        let mut rng = SeedSpec::new(5).rng();
        let psi = haar_state(32, &mut rng).unwrap();
        let r = lipschitz_pair_check(&psi, &psi, 16, 2, 3.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        // a = 1.01 makes Y tiny around I/2: a product state is outside.
        let prod = PureState::basis(16, 0).unwrap().tensor(&PureState::basis(2, 0).unwrap());
        assert!(lipschitz_pair_check(&prod, &psi, 16, 2, 1.01).is_err());
    }
}
