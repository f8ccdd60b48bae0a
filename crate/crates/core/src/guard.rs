//! Dimension cap for dense intermediates.

use crate::error::{LabError, Result};

pub const MAX_DIM_ENV: &str = "MOELAB_MAX_DIM";
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Cap on the largest dense matrix side an operation may allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryGuard {
    pub max_dim: usize,
}

impl Default for MemoryGuard {
    fn default() -> Self {
        Self { max_dim: DEFAULT_MAX_DIM }
    }
}

impl MemoryGuard {
    pub fn new(max_dim: usize) -> Self {
        Self { max_dim }
    }

    /// Reads `MOELAB_MAX_DIM`, falling back to the default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var(MAX_DIM_ENV).ok().and_then(|v| v.trim().parse().ok()).map(Self::new).unwrap_or_default()
    }

    pub fn check(&self, required: usize) -> Result<()> {
        if required > self.max_dim {
            return Err(LabError::ResourceGuard { required, cap: self.max_dim });
        }
        Ok(())
    }

    /// Single channel: the joint space `|A||B|`.
    pub fn check_channel(&self, dim_a: usize, dim_b: usize) -> Result<()> {
        self.check(dim_a.saturating_mul(dim_b))
    }

    /// Product channel `E ⊗ Ē`: the joint space `|A|²|B|²`.
    pub fn check_product(&self, dim_a: usize, dim_b: usize) -> Result<()> {
        let ab = dim_a.saturating_mul(dim_b);
        self.check(ab.saturating_mul(ab))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_limits() {
        let g = MemoryGuard::new(100);
        assert!(g.check_channel(10, 10).is_ok());
        assert_eq!(g.check_channel(11, 10), Err(LabError::ResourceGuard { required: 110, cap: 100 }));
        assert!(g.check_product(5, 2).is_ok());
        assert!(g.check_product(6, 2).is_err());
    }
}
