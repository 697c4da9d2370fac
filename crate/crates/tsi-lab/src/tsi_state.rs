//! Normalized truncated state vectors built from map orbits.

use crate::map_orbits::MapSpec;
use crate::{Error, Result};
use num_complex::Complex64;

/// Amplitudes `c_0..c_D` over the Fock states `|0>..|D>`.
///
/// Builders that produce physical states normalize; chain outputs keep their
/// true (sub-unity) norm. `is_normalized` distinguishes the two.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    /// Wrap raw amplitudes without normalizing.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Domain("a state needs at least one amplitude".into()));
        }
        Ok(FockVector { amplitudes })
    }

    /// Vacuum in a space of largest Fock index `dim`.
    pub fn vacuum(dim: usize) -> Self {
        let mut amplitudes = vec![Complex64::default(); dim + 1];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        FockVector { amplitudes }
    }

    /// The number state `|n>` embedded in a space of largest index `dim >= n`.
    pub fn fock(n: usize, dim: usize) -> Self {
        assert!(n <= dim, "fock index exceeds dimension");
        let mut amplitudes = vec![Complex64::default(); dim + 1];
        amplitudes[n] = Complex64::new(1.0, 0.0);
        FockVector { amplitudes }
    }

    /// Largest Fock index (length - 1).
    pub fn dim(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Squared Euclidean norm `sum |c_n|^2`.
    pub fn norm2(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm2() - 1.0).abs() < 1e-12
    }

    /// A normalized copy. Fails on an (numerically) all-zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm2();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / n2.sqrt();
        Ok(FockVector {
            amplitudes: self.amplitudes.iter().map(|c| c * inv).collect(),
        })
    }

    /// `P_n = |c_n|^2` for each n. Sums to one on a normalized state.
    pub fn photon_distribution(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Build the truncated state for a map: take the orbit `C_0..C_{n_max}` and
/// divide by its Euclidean norm. The seed is the `|0>` amplitude.
pub fn build_tsi(map: &MapSpec, n_max: usize) -> Result<FockVector> {
    let orbit = map.orbit(n_max)?;
    FockVector::new(orbit.values().to_vec())?.normalized()
}

/// A fresh state of dimension `n` from the same map, independently
/// normalized. Each truncation renormalizes on its own, so parity sums to
/// one at every `n` of a sweep.
pub fn truncate_and_renormalize(map: &MapSpec, n: usize) -> Result<FockVector> {
    build_tsi(map, n)
}
