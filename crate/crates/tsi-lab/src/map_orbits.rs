//! Catalogue of generating maps and orbit iteration.
//!
//! An orbit is the sequence `C_0, C_1, ..., C_N` where `C_0` is the seed and
//! `C_n = f(C_{n-1})` for the chosen map. Orbits become the (unnormalized)
//! amplitudes of a truncated state, so fixed or periodic points of the map
//! show up directly as regular photon-number distributions.
//!
//! A caveat on the doubling map in floating point: `2x mod 1` shifts mantissa
//! bits left one place per step, so any f64 seed (a dyadic rational) collapses
//! to exactly 0 after at most ~53 iterations, and accumulated seed-rounding
//! grows as `2^n`. Short orbits are faithful; for long ones use
//! [`doubling_orbit_exact`], which iterates a rational seed `p/q` without
//! rounding.

use crate::{complex_is_finite, Error, Result};
use num_complex::Complex64;

/// The map catalogue. `mu` is the control parameter (unused by `Doubling`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// `f(x) = 2x mod 1` on `[0, 1)`, real arguments only.
    Doubling,
    /// `f(x) = mu * x * (1 - x)`.
    Logistic,
    /// `f(x) = x^2 + mu`.
    Quadratic,
    /// `f(x) = mu * sin(x)`.
    Sine,
    /// `f(x) = mu * exp(x)`.
    Exponential,
}

impl MapKind {
    pub fn name(self) -> &'static str {
        match self {
            MapKind::Doubling => "doubling",
            MapKind::Logistic => "logistic",
            MapKind::Quadratic => "quadratic",
            MapKind::Sine => "sine",
            MapKind::Exponential => "exponential",
        }
    }
}

/// A generating map together with its parameter and seed.
///
/// Seeds are accepted as complex for the quadratic/sine/exponential maps;
/// the standard configurations all use real seeds. The doubling map is
/// real-only by definition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSpec {
    pub kind: MapKind,
    pub mu: f64,
    pub seed: Complex64,
}

impl MapSpec {
    pub fn new(kind: MapKind, mu: f64, seed: Complex64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Domain("map parameter mu must be finite".into()));
        }
        if !complex_is_finite(seed) {
            return Err(Error::Domain("seed must be finite".into()));
        }
        if kind == MapKind::Doubling {
            check_doubling_arg(seed).map_err(|_| {
                Error::Domain(format!(
                    "doubling map requires a real seed in [0, 1), got {seed}"
                ))
            })?;
        }
        Ok(MapSpec { kind, mu, seed })
    }

    pub fn doubling(seed: f64) -> Result<Self> {
        Self::new(MapKind::Doubling, 0.0, Complex64::new(seed, 0.0))
    }

    pub fn logistic(mu: f64, seed: f64) -> Result<Self> {
        Self::new(MapKind::Logistic, mu, Complex64::new(seed, 0.0))
    }

    /// One application of the map. Fails on non-finite input, and for the
    /// doubling map on complex or out-of-range input.
    pub fn iterate(&self, x: Complex64) -> Result<Complex64> {
        if !complex_is_finite(x) {
            return Err(Error::Domain(format!("map argument must be finite, got {x}")));
        }
        let mu = Complex64::new(self.mu, 0.0);
        match self.kind {
            MapKind::Doubling => {
                check_doubling_arg(x)?;
                // 2x is exact in binary floating point, and the conditional
                // subtraction is exact by Sterbenz's lemma, so each step
                // introduces no new rounding.
                let mut y = 2.0 * x.re;
                if y >= 1.0 {
                    y -= 1.0;
                }
                Ok(Complex64::new(y, 0.0))
            }
            MapKind::Logistic => Ok(mu * x * (Complex64::new(1.0, 0.0) - x)),
            MapKind::Quadratic => Ok(x * x + mu),
            MapKind::Sine => Ok(mu * x.sin()),
            MapKind::Exponential => Ok(mu * x.exp()),
        }
    }

    /// The orbit `C_0..C_{n_max}` starting from the seed.
    pub fn orbit(&self, n_max: usize) -> Result<Orbit> {
        let mut values = Vec::with_capacity(n_max + 1);
        values.push(self.seed);
        for n in 1..=n_max {
            let next = self.iterate(values[n - 1]).map_err(|e| {
                Error::Domain(format!("at orbit index {n}: {e}"))
            })?;
            values.push(next);
        }
        Ok(Orbit { values })
    }
}

fn check_doubling_arg(x: Complex64) -> Result<()> {
    if x.im != 0.0 || !(0.0..1.0).contains(&x.re) {
        return Err(Error::Domain(format!(
            "doubling map argument must be real in [0, 1), got {x}"
        )));
    }
    Ok(())
}

/// The doubling orbit of a rational seed `p/q`, iterated exactly on integers
/// (`p <- 2p mod q`) and converted to f64 only for storage. Use this for long
/// doubling orbits, where plain f64 iteration degrades (see module docs).
pub fn doubling_orbit_exact(numer: u64, denom: u64, n_max: usize) -> Result<Orbit> {
    if denom == 0 || numer >= denom {
        return Err(Error::Domain(format!(
            "rational seed must satisfy 0 <= p/q < 1 with q > 0, got {numer}/{denom}"
        )));
    }
    if denom > u64::MAX / 2 {
        return Err(Error::Domain("rational seed denominator too large".into()));
    }
    let mut p = numer;
    let q = denom;
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(Complex64::new(p as f64 / q as f64, 0.0));
    for _ in 0..n_max {
        p = (2 * p) % q;
        values.push(Complex64::new(p as f64 / q as f64, 0.0));
    }
    Ok(Orbit { values })
}

/// An orbit: `values[0]` is the seed, `values[n]` the n-th iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    values: Vec<Complex64>,
}

impl Orbit {
    /// Wrap an explicit value sequence (must be nonempty).
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("orbit must contain at least the seed".into()));
        }
        Ok(Orbit { values })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Find the smallest period `p <= max_period`, and for it the smallest
/// transient `t`, such that `|values[n + p] - values[n]| < tol` for every
/// `n >= t` with both indices in range. At least one comparison must exist
/// for a `(t, p)` pair to count. Returns `(transient, period)`, or `None`
/// if no period fits.
pub fn detect_eventual_period(
    orbit: &Orbit,
    tol: f64,
    max_period: usize,
) -> Option<(usize, usize)> {
    assert!(tol > 0.0, "tolerance must be positive");
    assert!(max_period >= 1, "max_period must be at least 1");
    let v = orbit.values();
    let len = v.len();
    if len < 2 {
        return None;
    }
    for p in 1..=max_period.min(len - 1) {
        // Walk backwards from the last comparable index; the transient is the
        // start of the final run of in-tolerance comparisons reaching the end.
        let last = len - 1 - p;
        let mut t = None;
        for n in (0..=last).rev() {
            if (v[n + p] - v[n]).norm() < tol {
                t = Some(n);
            } else {
                break;
            }
        }
        if let Some(t) = t {
            return Some((t, p));
        }
    }
    None
}
