//! Channels in Stinespring form `E(ρ) = tr_A(U (ρ ⊗ |0⟩⟨0|) U†)`.
//!
//! The joint space is `A ⊗ B` (A first). The ancilla `|0⟩` sits on the B
//! factor and the environment traced out by the direct channel is A, so the
//! input and environment dimensions are both `dim_a`. Only the columns
//! `U|j, 0⟩` of the unitary ever matter; they are cached as an isometry
//! `V: C^{dim_a} → C^{dim_a} ⊗ C^{dim_b}`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{
    self, partial_trace_op, unitarity_residual, CMatrix, DensityMatrix, Subsystem, C64, STRUCTURAL_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `tr_A(U(ρ ⊗ |0⟩⟨0|)U†)`
    Direct,
    /// `tr_A(U*(ρ ⊗ |0⟩⟨0|)Uᵀ)`
    Conjugate,
    /// `tr_B(U(ρ ⊗ |0⟩⟨0|)U†)`
    Complementary,
}

#[derive(Debug, Clone)]
pub struct StinespringChannel {
    unitary: CMatrix,
    isometry: CMatrix,
    dim_a: usize,
    dim_b: usize,
    variant: Variant,
}

impl StinespringChannel {
    /// Direct channel for the unitary `u` on `C^{dim_a} ⊗ C^{dim_b}`.
    pub fn new(u: CMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(LabError::InvalidArgument("dimensions must be positive".into()));
        }
        let n = dim_a * dim_b;
        if u.nrows() != n || u.ncols() != n {
            return Err(LabError::DimensionMismatch { expected: n, found: u.nrows() });
        }
        let residual = unitarity_residual(&u);
        if residual > STRUCTURAL_TOL {
            return Err(LabError::NotUnitary { residual });
        }
        let isometry = CMatrix::from_fn(n, dim_a, |r, j| u[(r, j * dim_b)]);
        Ok(Self { unitary: u, isometry, dim_a, dim_b, variant: Variant::Direct })
    }

    pub fn identity_unitary(dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::new(CMatrix::identity(dim_a * dim_b, dim_a * dim_b), dim_a, dim_b)
    }

    /// SWAP on `C^d ⊗ C^d`; the direct channel is the identity channel.
    pub fn swap_unitary(d: usize) -> Result<Self> {
        Self::new(linalg::swap_operator(d), d, d)
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn input_dim(&self) -> usize {
        self.dim_a
    }

    pub fn output_dim(&self) -> usize {
        match self.variant {
            Variant::Direct | Variant::Conjugate => self.dim_b,
            Variant::Complementary => self.dim_a,
        }
    }

    fn require_direct(&self) -> Result<()> {
        if self.variant != Variant::Direct {
            return Err(LabError::WrongVariant { expected: Variant::Direct, found: self.variant });
        }
        Ok(())
    }

    /// `Ē`, sharing the stored unitary.
    pub fn conjugate(&self) -> Result<Self> {
        self.require_direct()?;
        Ok(Self { variant: Variant::Conjugate, ..self.clone() })
    }

    /// `E^c`, sharing the stored unitary.
    pub fn complementary(&self) -> Result<Self> {
        self.require_direct()?;
        Ok(Self { variant: Variant::Complementary, ..self.clone() })
    }

    fn effective_isometry(&self) -> CMatrix {
        match self.variant {
            Variant::Conjugate => self.isometry.map(|z| z.conj()),
            _ => self.isometry.clone(),
        }
    }

    /// Applies the channel to an arbitrary operator (e.g. `|ψ⟩⟨φ|`).
    pub fn apply_op(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.nrows() != self.dim_a || x.ncols() != self.dim_a {
            return Err(LabError::DimensionMismatch { expected: self.dim_a, found: x.nrows() });
        }
        let v = self.effective_isometry();
        let joint = &v * x * v.adjoint();
        let keep = match self.variant {
            Variant::Direct | Variant::Conjugate => Subsystem::B,
            Variant::Complementary => Subsystem::A,
        };
        partial_trace_op(&joint, self.dim_a, self.dim_b, keep)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply_op(rho.matrix()).map(DensityMatrix::from_trusted)
    }

    /// Kraus operators of this channel read off the isometry.
    ///
    /// Direct/conjugate: `dim_a` operators `K_a` of shape `dim_b × dim_a`,
    /// `(K_a)_{bj} = ⟨a, b|U|j, 0⟩` (conjugated for `Ē`).
    /// Complementary: see [`kraus_of_complementary`].
    pub fn kraus_map(&self) -> KrausMap {
        let v = self.effective_isometry();
        let (a, b) = (self.dim_a, self.dim_b);
        let ops = match self.variant {
            Variant::Direct | Variant::Conjugate => {
                (0..a).map(|env| CMatrix::from_fn(b, a, |out, j| v[(env * b + out, j)])).collect()
            }
            Variant::Complementary => complementary_ops(&v, a, b),
        };
        KrausMap { in_dim: a, out_dim: self.output_dim(), ops }
    }
}

fn complementary_ops(v: &CMatrix, a: usize, b: usize) -> Vec<CMatrix> {
    (0..b).map(|env| CMatrix::from_fn(a, a, |out, j| v[(out * b + env, j)])).collect()
}

/// Kraus operators `A_k` of `E^c` for a direct channel `E`:
/// `dim_b` operators of shape `dim_a × dim_a` with `(A_k)_{ij} = ⟨i, k|U|j, 0⟩`.
///
/// These satisfy `Σ A_k† A_k = I`, `E^c(ρ) = Σ A_k ρ A_k†` and
/// `E(ρ)_{kk'} = tr(A_{k'}† A_k ρ)`.
pub fn kraus_of_complementary(e: &StinespringChannel) -> Result<Vec<CMatrix>> {
    e.require_direct()?;
    Ok(complementary_ops(&e.isometry, e.dim_a, e.dim_b))
}

/// Rebuilds `E(ρ)` from the complementary Kraus family:
/// `E(ρ) = Σ_{k,k'} tr(A_{k'}† A_k ρ) |k⟩⟨k'|`.
pub fn reconstruct_direct_from_kraus(kraus: &[CMatrix], rho: &DensityMatrix) -> Result<DensityMatrix> {
    if kraus.is_empty() {
        return Err(LabError::InvalidArgument("empty Kraus family".into()));
    }
    for k in kraus {
        if k.nrows() != rho.dim() || k.ncols() != rho.dim() {
            return Err(LabError::DimensionMismatch { expected: rho.dim(), found: k.nrows() });
        }
    }
    let n = kraus.len();
    let applied: Vec<CMatrix> = kraus.iter().map(|k| k * rho.matrix()).collect();
    let out = CMatrix::from_fn(n, n, |k, kp| (kraus[kp].adjoint() * &applied[k]).trace());
    Ok(DensityMatrix::from_trusted(out))
}

/// `(E ⊗ Ē)(ρ)` for `ρ` on `A ⊗ A'`, output on `B ⊗ B'`.
///
/// With `W = V ⊗ V̄` (rows indexed by `(a, b, a', b')`), the output entry
/// `(bb', cc')` is `Σ_{a,a'} (W ρ W†)_{(a b a' b'), (a c a' c')}`. Rows are
/// paired through that index map directly, so the factor permutation is
/// never materialized and `W ρ W†` is never formed.
pub fn apply_product(e: &StinespringChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    e.require_direct()?;
    let (a, b) = (e.dim_a, e.dim_b);
    if rho.dim() != a * a {
        return Err(LabError::DimensionMismatch { expected: a * a, found: rho.dim() });
    }
    let v = &e.isometry;
    let w = v.kronecker(&v.map(|z| z.conj()));
    let x = &w * rho.matrix();
    let ab = a * b;
    let row = |env: usize, env2: usize, out: usize| (env * b + out / b) * ab + env2 * b + out % b;
    let bb = b * b;
    let mut result = CMatrix::zeros(bb, bb);
    for env in 0..a {
        for env2 in 0..a {
            for o in 0..bb {
                let xr = x.row(row(env, env2, o));
                for p in 0..bb {
                    let wr = w.row(row(env, env2, p));
                    let s: C64 = xr.iter().zip(wr.iter()).map(|(u, t)| u * t.conj()).sum();
                    result[(o, p)] += s;
                }
            }
        }
    }
    Ok(DensityMatrix::from_trusted(result))
}

/// A completely positive map `X ↦ Σ K X K†`.
#[derive(Debug, Clone)]
pub struct KrausMap {
    pub in_dim: usize,
    pub out_dim: usize,
    pub ops: Vec<CMatrix>,
}

impl KrausMap {
    /// Kraus family of `E ⊗ Ē` (products `K_a ⊗ K̄_{a'}`).
    pub fn product_with_conjugate(e: &StinespringChannel) -> Result<Self> {
        e.require_direct()?;
        let direct = e.kraus_map();
        let mut ops = Vec::with_capacity(direct.ops.len() * direct.ops.len());
        for k in &direct.ops {
            for kp in &direct.ops {
                ops.push(k.kronecker(&kp.map(|z| z.conj())));
            }
        }
        Ok(Self { in_dim: direct.in_dim * direct.in_dim, out_dim: direct.out_dim * direct.out_dim, ops })
    }

    pub fn apply_op(&self, x: &CMatrix) -> CMatrix {
        self.ops.iter().fold(CMatrix::zeros(self.out_dim, self.out_dim), |acc, k| acc + k * x * k.adjoint())
    }

    /// Output for the pure input `|ψ⟩`, via `Σ (Kψ)(Kψ)†`.
    pub fn apply_pure(&self, psi: &linalg::CVector) -> CMatrix {
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.ops {
            let v = k * psi;
            out += &v * v.adjoint();
        }
        out
    }

    /// Adjoint map `Y ↦ Σ K† Y K`.
    pub fn adjoint_apply(&self, y: &CMatrix) -> CMatrix {
        self.ops.iter().fold(CMatrix::zeros(self.in_dim, self.in_dim), |acc, k| acc + k.adjoint() * y * k)
    }

    /// `max |Σ K†K - I|`.
    pub fn completeness_residual(&self) -> f64 {
        let s = self.adjoint_apply(&CMatrix::identity(self.out_dim, self.out_dim));
        linalg::max_abs_diff(&s, &CMatrix::identity(self.in_dim, self.in_dim))
    }
}
