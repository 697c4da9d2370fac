//! Truncated Fock-space operator algebra: displacement, creation and
//! attenuation operators, and the conditional beam-splitter chain
//! `R^N D(a_{N+1}) [adag T^n D(a_N)] ... [adag T^n D(a_1)] |0>`.
//!
//! Operators are materialized as dense matrices and applied step by step to
//! a vector; the full product matrix is never formed. Displacement matrix
//! elements use the associated-Laguerre closed form with log-space
//! prefactors, so cutoffs of several hundred and large displacements stay
//! within f64 range.

use crate::math::ln_factorial_table;
use crate::tsi_state::FockVector;
use crate::{complex_is_finite, Error, Result};
use num_complex::Complex64;

/// A dense complex operator on the truncated space `|0>..|cutoff>`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: Vec<Complex64>,
    size: usize,
}

impl OperatorMatrix {
    fn zeros(cutoff: usize) -> Self {
        let size = cutoff + 1;
        OperatorMatrix {
            entries: vec![Complex64::default(); size * size],
            size,
        }
    }

    pub fn identity(cutoff: usize) -> Self {
        let mut m = Self::zeros(cutoff);
        for i in 0..m.size {
            m.entries[i * m.size + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn cutoff(&self) -> usize {
        self.size - 1
    }

    /// Number of rows (= columns) = cutoff + 1.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.size + col]
    }

    fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.size + col] = value;
    }

    /// Matrix-vector product. The vector length must equal `size()`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.size, "vector length mismatch");
        let mut out = vec![Complex64::default(); self.size];
        for (row, out_row) in out.iter_mut().enumerate() {
            let base = row * self.size;
            let mut acc = Complex64::default();
            for (col, vc) in v.iter().enumerate() {
                acc += self.entries[base + col] * vc;
            }
            *out_row = acc;
        }
        out
    }

    /// Matrix product `self * rhs` (used by tests and diagnostics).
    pub fn matmul(&self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.size, rhs.size, "size mismatch");
        let n = self.size;
        let mut out = OperatorMatrix::zeros(n - 1);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::default() {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> OperatorMatrix {
        let n = self.size;
        let mut out = OperatorMatrix::zeros(n - 1);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }
}

/// Displacement operator `D(alpha)` via the closed form
/// `<n+d|D|n> = sqrt(n!/(n+d)!) alpha^d e^{-|a|^2/2} L_n^{(d)}(|a|^2)` and its
/// mirror `<n|D|n+d> = sqrt(n!/(n+d)!) (-conj(alpha))^d e^{-|a|^2/2} L_n^{(d)}(|a|^2)`.
pub fn displacement_matrix(alpha: Complex64, cutoff: usize) -> OperatorMatrix {
    assert!(complex_is_finite(alpha), "alpha must be finite");
    if alpha == Complex64::default() {
        return OperatorMatrix::identity(cutoff);
    }
    let mut m = OperatorMatrix::zeros(cutoff);
    let x = alpha.norm_sqr();
    let ln_fact = ln_factorial_table(cutoff);
    let ln_abs_alpha = alpha.norm().ln();
    let arg_lower = alpha.arg();
    let arg_upper = (-alpha.conj()).arg();

    for d in 0..=cutoff {
        // One pass of the L^{(d)} recurrence fills subdiagonal and
        // superdiagonal d simultaneously. The recurrence is rescaled when it
        // grows large; `scale_log` tracks the factored-out magnitude.
        let mut l_prev = 0.0f64;
        let mut l_cur = 1.0f64; // L_0^{(d)} = 1
        let mut scale_log = 0.0f64;
        for n in 0..=cutoff - d {
            let k = n + d;
            // log magnitude of sqrt(n!/k!) |alpha|^d e^{-x/2} * scale
            let ln_pref =
                d as f64 * ln_abs_alpha - 0.5 * (ln_fact[k] - ln_fact[n]) - x / 2.0 + scale_log;
            let mag = ln_pref.exp() * l_cur;
            m.set(k, n, Complex64::from_polar(mag.abs(), arg_lower * d as f64)
                * if mag < 0.0 { -1.0 } else { 1.0 });
            m.set(n, k, Complex64::from_polar(mag.abs(), arg_upper * d as f64)
                * if mag < 0.0 { -1.0 } else { 1.0 });
            // advance L_{n}^{(d)} -> L_{n+1}^{(d)}
            let next = ((2 * n + 1 + d) as f64 - x) / (n + 1) as f64 * l_cur
                - (n + d) as f64 / (n + 1) as f64 * l_prev;
            l_prev = l_cur;
            l_cur = next;
            let a = l_cur.abs().max(l_prev.abs());
            if a > 1e100 {
                l_cur /= 1e100;
                l_prev /= 1e100;
                scale_log += 100.0 * std::f64::consts::LN_10;
            } else if a < 1e-100 && a > 0.0 {
                l_cur *= 1e100;
                l_prev *= 1e100;
                scale_log -= 100.0 * std::f64::consts::LN_10;
            }
        }
    }
    m
}

/// Creation operator: `adag|n> = sqrt(n+1)|n+1>`; the top row is truncated.
pub fn creation_matrix(cutoff: usize) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(cutoff);
    for n in 0..cutoff {
        m.set(n + 1, n, Complex64::new(((n + 1) as f64).sqrt(), 0.0));
    }
    m
}

/// Conditional attenuation `T^n`: diagonal with entries `T^n`.
pub fn attenuation_matrix(t: f64, cutoff: usize) -> OperatorMatrix {
    assert!(t > 0.0 && t <= 1.0, "transmittance must be in (0, 1]");
    let mut m = OperatorMatrix::zeros(cutoff);
    let mut p = 1.0;
    for n in 0..=cutoff {
        m.set(n, n, Complex64::new(p, 0.0));
        p *= t;
    }
    m
}

/// The conditional chain: `n_steps = alphas.len() - 1` photon additions with
/// attenuation and displacements in between, all detectors registering zero
/// photons. `skip_index = Some(k)` replaces the k-th creation operator
/// (k in 1..=n_steps) by the identity, which models a photon absorbed
/// unseen in the k-th detector; the chain prefactor then drops one power of
/// the reflectance.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    alphas: Vec<Complex64>,
    transmittance: f64,
    skip_index: Option<usize>,
}

impl ChainSpec {
    pub fn new(alphas: Vec<Complex64>, transmittance: f64) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Domain("chain needs at least one displacement".into()));
        }
        if alphas.iter().any(|a| !complex_is_finite(*a)) {
            return Err(Error::Domain("chain displacements must be finite".into()));
        }
        if !(transmittance > 0.0 && transmittance < 1.0) {
            return Err(Error::Domain(format!(
                "transmittance must lie strictly in (0, 1), got {transmittance}"
            )));
        }
        Ok(ChainSpec {
            alphas,
            transmittance,
            skip_index: None,
        })
    }

    /// Same chain with the `k`-th creation operator replaced by identity.
    pub fn with_skip(mut self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n_steps() {
            return Err(Error::Domain(format!(
                "skip index {k} outside 1..={}",
                self.n_steps()
            )));
        }
        self.skip_index = Some(k);
        Ok(self)
    }

    pub fn n_steps(&self) -> usize {
        self.alphas.len() - 1
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }

    /// Amplitude reflectance `R = sqrt(1 - T^2)`.
    pub fn reflectance(&self) -> f64 {
        (1.0 - self.transmittance * self.transmittance).sqrt()
    }

    pub fn skip_index(&self) -> Option<usize> {
        self.skip_index
    }
}

/// Starting cutoff for a chain: `4 * (N + max|alpha|^2 + 1)`, rounded up.
/// Displacements push occupation well above N, so the margin is generous;
/// [`apply_chain_converged`] still verifies and escalates if needed.
pub fn default_cutoff(n_steps: usize, alphas: &[Complex64]) -> usize {
    let max_a2 = alphas.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    (4.0 * (n_steps as f64 + max_a2 + 1.0)).ceil() as usize
}

const TAIL_TOLERANCE: f64 = 1e-10;

/// Run the chain at a fixed cutoff. The result keeps its true norm (the
/// squared norm is the zero-count coincidence weight). Fails if at any step
/// more than `1e-10` of the state's weight sits above `cutoff / 2`.
pub fn apply_chain(spec: &ChainSpec, cutoff: usize) -> Result<FockVector> {
    let n = spec.n_steps();
    if cutoff < n + 1 {
        return Err(Error::Domain(format!(
            "cutoff {cutoff} below chain length {}",
            n + 1
        )));
    }
    let size = cutoff + 1;
    let mut v = vec![Complex64::default(); size];
    v[0] = Complex64::new(1.0, 0.0);
    let t = spec.transmittance;

    for k in 1..=n {
        let d = displacement_matrix(spec.alphas[k - 1], cutoff);
        v = d.apply(&v);
        // T^n then adag, applied elementwise (diagonal / shift matrices)
        let mut p = 1.0;
        for amp in v.iter_mut() {
            *amp *= p;
            p *= t;
        }
        if spec.skip_index != Some(k) {
            for m in (1..size).rev() {
                v[m] = v[m - 1] * (m as f64).sqrt();
            }
            v[0] = Complex64::default();
        }
        check_tail(&v, cutoff, k)?;
    }
    let d = displacement_matrix(spec.alphas[n], cutoff);
    v = d.apply(&v);
    check_tail(&v, cutoff, n + 1)?;

    let power = if spec.skip_index.is_some() { n - 1 } else { n };
    let prefactor = spec.reflectance().powi(power as i32);
    for amp in v.iter_mut() {
        *amp *= prefactor;
    }
    FockVector::new(v)
}

fn check_tail(v: &[Complex64], cutoff: usize, step: usize) -> Result<()> {
    let half = cutoff / 2;
    let total: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return Ok(());
    }
    let tail: f64 = v[half + 1..].iter().map(|c| c.norm_sqr()).sum();
    let tail_mass = tail / total;
    if tail_mass > TAIL_TOLERANCE {
        return Err(Error::CutoffInsufficient {
            cutoff,
            half,
            step,
            tail_mass,
        });
    }
    Ok(())
}

const NORM_AGREEMENT: f64 = 1e-8;
const MAX_CUTOFF: usize = 4096;

/// Run the chain under the cutoff policy: start from [`default_cutoff`]
/// (or the override), recompute at 1.5x, and accept once the two squared
/// norms agree within 1e-8, escalating otherwise. Returns the state from the
/// larger cutoff and the cutoff it used.
pub fn apply_chain_converged(
    spec: &ChainSpec,
    cutoff_override: Option<usize>,
) -> Result<(FockVector, usize)> {
    let mut cutoff = cutoff_override
        .unwrap_or_else(|| default_cutoff(spec.n_steps(), &spec.alphas))
        .max(spec.n_steps() + 1);
    let mut current: Option<(FockVector, f64)> = None;
    while cutoff <= MAX_CUTOFF {
        let bigger = (cutoff * 3).div_ceil(2);
        let lo = match current.take() {
            Some(pair) => pair,
            None => match apply_chain(spec, cutoff) {
                Ok(state) => {
                    let n2 = state.norm2();
                    (state, n2)
                }
                Err(Error::CutoffInsufficient { .. }) => {
                    cutoff = bigger;
                    continue;
                }
                Err(e) => return Err(e),
            },
        };
        match apply_chain(spec, bigger) {
            Ok(state) => {
                let n2 = state.norm2();
                if (n2 - lo.1).abs() <= NORM_AGREEMENT {
                    return Ok((state, bigger));
                }
                cutoff = bigger;
                current = Some((state, n2));
            }
            Err(Error::CutoffInsufficient { .. }) => {
                cutoff = bigger;
                current = None;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::CutoffInsufficient {
        cutoff: MAX_CUTOFF,
        half: MAX_CUTOFF / 2,
        step: 0,
        tail_mass: f64::NAN,
    })
}

/// Inner product `<a|b> = sum conj(a_n) b_n`; the shorter vector is
/// zero-padded.
pub fn overlap(a: &FockVector, b: &FockVector) -> Complex64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// Squared norm, as a free function for symmetry with [`overlap`].
pub fn norm2(a: &FockVector) -> f64 {
    a.norm2()
}
