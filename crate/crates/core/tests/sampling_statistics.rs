use moelab::experiments::stats::{ks_test, mean_and_se};
use moelab::linalg::{CMatrix, PureState, C64};
use moelab::random::{decompose_against, haar_state, haar_state_orthogonal, haar_unitary, SeedSpec};

/// E|ψ_0|⁴ = 2/(n(n+1)) for Haar states in dimension n.
#[test]
fn haar_state_fourth_moment() {
    for n in [2usize, 3, 5, 8] {
        let mut rng = SeedSpec::with_stream(1, n as u64).rng();
        let xs: Vec<f64> =
            (0..40_000).map(|_| haar_state(n, &mut rng).unwrap().amplitudes()[0].norm_sqr().powi(2)).collect();
        let (m, se) = mean_and_se(&xs);
        let exact = 2.0 / (n * (n + 1)) as f64;
        assert!((m - exact).abs() < 4.0 * se, "n = {n}: {m} vs {exact}");
    }
}

/// Overlap with a fixed vector follows Beta(1, n-1).
#[test]
fn overlap_law_ks() {
    for n in [2usize, 4, 7] {
        let mut rng = SeedSpec::with_stream(2, n as u64).rng();
        let xs: Vec<f64> = (0..5000).map(|_| haar_state(n, &mut rng).unwrap().amplitudes()[0].norm_sqr()).collect();
        let ks = ks_test(&xs, |t| 1.0 - (1.0 - t.clamp(0.0, 1.0)).powi(n as i32 - 1));
        assert!(ks.p_value > 0.01, "n = {n}: p = {}", ks.p_value);
    }
}

/// |U_00|² of a Haar unitary has the same Beta(1, n-1) law, and |tr U|² has mean 1.
#[test]
fn haar_unitary_entries_and_trace() {
    let n = 4;
    let mut rng = SeedSpec::new(3).rng();
    let mut entries = Vec::new();
    let mut traces = Vec::new();
    for _ in 0..5000 {
        let u = haar_unitary(n, &mut rng).unwrap();
        entries.push(u[(0, 0)].norm_sqr());
        traces.push(u.trace().norm_sqr());
    }
    let ks = ks_test(&entries, |t| 1.0 - (1.0 - t.clamp(0.0, 1.0)).powi(n as i32 - 1));
    assert!(ks.p_value > 0.01, "p = {}", ks.p_value);
    let (m, se) = mean_and_se(&traces);
    assert!((m - 1.0).abs() < 4.0 * se, "E|tr U|² = {m}");
}

/// Left-multiplying Haar states by a fixed unitary leaves the overlap law intact.
#[test]
fn unitary_invariance() {
    let n = 5;
    let fixed = haar_unitary(n, &mut SeedSpec::new(4).rng()).unwrap();
    let mut rng = SeedSpec::new(5).rng();
    let xs: Vec<f64> =
        (0..5000).map(|_| (&fixed * haar_state(n, &mut rng).unwrap().amplitudes())[0].norm_sqr()).collect();
    let ks = ks_test(&xs, |t| 1.0 - (1.0 - t.clamp(0.0, 1.0)).powi(n as i32 - 1));
    assert!(ks.p_value > 0.01, "p = {}", ks.p_value);
}

/// Haar in the complement of ψ: orthogonal, and |⟨θ|φ⟩|² ~ Beta(1, n-2) for θ ⊥ ψ.
#[test]
fn orthogonal_sampler_law() {
    let n = 6;
    let psi = haar_state(n, &mut SeedSpec::new(6).rng()).unwrap();
    let theta = {
        let d = decompose_against(&haar_state(n, &mut SeedSpec::new(7).rng()).unwrap(), &psi).unwrap();
        d.phi
    };
    let mut rng = SeedSpec::new(8).rng();
    let mut ys = Vec::new();
    for _ in 0..5000 {
        let phi = haar_state_orthogonal(&psi, &mut rng).unwrap();
        assert!(psi.inner(&phi).norm() < 1e-12);
        ys.push(theta.inner(&phi).norm_sqr());
    }
    let ks = ks_test(&ys, |t| 1.0 - (1.0 - t.clamp(0.0, 1.0)).powi(n as i32 - 2));
    assert!(ks.p_value > 0.01, "p = {}", ks.p_value);
}

#[test]
fn decomposition_reconstructs() {
    let mut rng = SeedSpec::new(9).rng();
    for _ in 0..100 {
        let psi = haar_state(4, &mut rng).unwrap();
        let chi = haar_state(4, &mut rng).unwrap();
        let d = decompose_against(&chi, &psi).unwrap();
        let rebuilt =
            psi.amplitudes() * C64::new(d.x.sqrt(), 0.0) + d.phi.amplitudes() * C64::new((1.0 - d.x).sqrt(), 0.0);
        assert!((rebuilt - d.chi.amplitudes()).norm() < 1e-12);
        assert!((d.chi.inner(&chi).norm() - 1.0).abs() < 1e-12);
    }
    let e0 = PureState::basis(3, 0).unwrap();
    let d = decompose_against(&e0, &e0).unwrap();
    assert_eq!(d.x, 1.0);
    assert!(e0.inner(&d.phi).norm() < 1e-15);
}

#[test]
fn seeds_reproduce() {
    let a = haar_unitary(5, &mut SeedSpec::with_stream(10, 3).rng()).unwrap();
    let b = haar_unitary(5, &mut SeedSpec::with_stream(10, 3).rng()).unwrap();
    let c: CMatrix = haar_unitary(5, &mut SeedSpec::with_stream(10, 4).rng()).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_ne!(SeedSpec::new(10).child(0), SeedSpec::new(10).child(1));
}
