//! Generation plans: characteristic-polynomial roots, displacement
//! parameters, success probability, equivalence verification, and
//! transmittance optimization.
//!
//! A normalized target `sum_n c_n |n>` factors into displaced photon
//! additions through the roots of its characteristic polynomial. The
//! polynomial carries the Fock normalization explicitly:
//!
//! ```text
//! sum_n (c_n / sqrt(n!)) x^n  =  (c_N / sqrt(N!)) prod_k (x - beta_k*)
//! ```
//!
//! so `|psi> = (c_N/sqrt(N!)) prod_k (adag - beta_k*) |0>`. The returned
//! `beta_k` are the conjugates of the polynomial roots; the reference tables
//! in [`crate::validation`] list them as `(|beta|, phase-of-beta)` pairs.
//! With a beam splitter of amplitude transmittance `T`, the displacement
//! parameters of the conditional chain are
//! `alpha_k = T^{N-k+1} (beta_{k-1} - beta_k)` for `k = 2..N`,
//! `alpha_{N+1} = beta_N`, and
//! `alpha_1 = -sum_l T^{-l} alpha_{l+1}`.

use crate::fock_engine::{apply_chain, apply_chain_converged, overlap, ChainSpec};
use crate::math::ln_factorial;
use crate::par;
use crate::tsi_state::FockVector;
use crate::{complex_is_finite, Error, Result};
use num_complex::Complex64;

/// A complete synthesis plan for one target state at one transmittance.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineeringPlan {
    pub coefficients: Vec<Complex64>,
    /// Roots in the order used to derive `alphas`.
    pub betas: Vec<Complex64>,
    pub transmittance: f64,
    pub alphas: Vec<Complex64>,
    pub success_prob: f64,
    pub cutoff_used: usize,
}

/// How to order roots before deriving displacement parameters. The target
/// state is order-invariant but the individual alphas (and, weakly, the
/// success probability) are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootOrder {
    /// Descending modulus, ties by ascending phase.
    Canonical,
    /// Indices into the canonical order.
    Permutation(Vec<usize>),
}

impl RootOrder {
    fn apply(&self, canonical: Vec<Complex64>) -> Result<Vec<Complex64>> {
        match self {
            RootOrder::Canonical => Ok(canonical),
            RootOrder::Permutation(indices) => {
                let n = canonical.len();
                let mut seen = vec![false; n];
                if indices.len() != n {
                    return Err(Error::Domain(format!(
                        "root order has {} entries for {} roots",
                        indices.len(),
                        n
                    )));
                }
                for &i in indices {
                    if i >= n || seen[i] {
                        return Err(Error::Domain(format!(
                            "root order is not a permutation of 0..{n}"
                        )));
                    }
                    seen[i] = true;
                }
                Ok(indices.iter().map(|&i| canonical[i]).collect())
            }
        }
    }
}

impl EngineeringPlan {
    /// Build the full plan: roots, ordering, alphas, and the
    /// cutoff-converged success probability.
    pub fn synthesize(
        coefficients: &[Complex64],
        transmittance: f64,
        order: &RootOrder,
        cutoff_override: Option<usize>,
    ) -> Result<Self> {
        let betas = order.apply(char_poly_roots(coefficients)?)?;
        let alphas = alphas_from_roots(&betas, transmittance)?;
        let spec = ChainSpec::new(alphas.clone(), transmittance)?;
        let (state, cutoff_used) = apply_chain_converged(&spec, cutoff_override)?;
        let success_prob = spec.reflectance() * state.norm2();
        Ok(EngineeringPlan {
            coefficients: coefficients.to_vec(),
            betas,
            transmittance,
            alphas,
            success_prob,
            cutoff_used,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.betas.len()
    }

    pub fn chain_spec(&self) -> ChainSpec {
        ChainSpec::new(self.alphas.clone(), self.transmittance)
            .expect("plan invariants guarantee a valid chain")
    }
}

/// Weighted coefficients `c_n / sqrt(n!)`.
fn weighted(coefficients: &[Complex64]) -> Vec<Complex64> {
    coefficients
        .iter()
        .enumerate()
        .map(|(n, c)| c * (-0.5 * ln_factorial(n)).exp())
        .collect()
}

/// All `N` roots (with multiplicity) of the characteristic polynomial of a
/// degree-`N` coefficient vector, returned as `beta_k` (conjugates of the
/// polynomial roots) in canonical order. Every root is verified against the
/// residual bound `|p(root)| < 1e-9 * max|coefficient|`.
pub fn char_poly_roots(coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
    if coefficients.len() < 2 {
        return Err(Error::Domain(
            "need a degree >= 1 polynomial (at least two coefficients)".into(),
        ));
    }
    if coefficients.iter().any(|c| !complex_is_finite(*c)) {
        return Err(Error::Domain("coefficients must be finite".into()));
    }
    if coefficients.last().unwrap().norm() == 0.0 {
        return Err(Error::DegenerateDegree);
    }
    let w = weighted(coefficients);
    let roots = polynomial_roots(&w)?;
    let betas = roots.into_iter().map(|r| r.conj()).collect();
    Ok(canonical_order(betas))
}

/// Sort descending by modulus; within modulus clusters (relative width
/// 1e-9), ascending by phase.
fn canonical_order(mut betas: Vec<Complex64>) -> Vec<Complex64> {
    betas.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let scale = betas.first().map(|b| b.norm()).unwrap_or(1.0).max(1e-300);
    let mut out: Vec<Complex64> = Vec::with_capacity(betas.len());
    let mut cluster: Vec<Complex64> = Vec::new();
    for b in betas {
        if let Some(last) = cluster.last() {
            if (last.norm() - b.norm()).abs() > 1e-9 * scale {
                cluster.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
                out.append(&mut cluster);
            }
        }
        cluster.push(b);
    }
    cluster.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
    out.append(&mut cluster);
    out
}

const ABERTH_TOL: f64 = 1e-12;
const ABERTH_MAX_ITER: usize = 200;
const RESIDUAL_BOUND: f64 = 1e-9;

/// Roots of `sum w_n x^n` by simultaneous (Aberth-Ehrlich) iteration with
/// restarts, a Newton polish, and a companion-matrix fallback for real
/// coefficient vectors.
fn polynomial_roots(w: &[Complex64]) -> Result<Vec<Complex64>> {
    // strip exact zero roots at the origin
    let low = w
        .iter()
        .position(|c| c.norm() > 0.0)
        .expect("leading coefficient checked nonzero");
    let reduced = &w[low..];
    let mut roots = vec![Complex64::default(); low];
    if reduced.len() == 1 {
        return Ok(roots);
    }

    // scale for conditioning; roots are scale-invariant
    let scale = reduced.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let monic: Vec<Complex64> = reduced.iter().map(|c| c / scale).collect();
    let max_w = monic.iter().map(|c| c.norm()).fold(0.0, f64::max);

    let mut found: Option<Vec<Complex64>> = None;
    for restart in 0..4 {
        if let Some(candidate) = aberth(&monic, restart) {
            if residuals_ok(&monic, &candidate, max_w) {
                found = Some(candidate);
                break;
            }
        }
    }
    if found.is_none() {
        if let Some(candidate) = companion_roots_real(&monic) {
            if residuals_ok(&monic, &candidate, max_w) {
                found = Some(candidate);
            }
        }
    }
    match found {
        Some(mut r) => {
            roots.append(&mut r);
            Ok(roots)
        }
        None => Err(Error::RootFinder {
            details: format!(
                "degree {} polynomial: no candidate met the residual bound \
                 {RESIDUAL_BOUND:.0e} * max|coefficient| after 4 restarts and \
                 the companion fallback",
                monic.len() - 1
            ),
        }),
    }
}

fn horner(w: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::default();
    let mut dp = Complex64::default();
    for c in w.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

fn residuals_ok(w: &[Complex64], roots: &[Complex64], max_w: f64) -> bool {
    roots
        .iter()
        .all(|&r| horner(w, r).0.norm() < RESIDUAL_BOUND * max_w)
}

fn aberth(w: &[Complex64], restart: usize) -> Option<Vec<Complex64>> {
    let degree = w.len() - 1;
    let lead = w[degree];
    let radius = (w[0].norm() / lead.norm()).powf(1.0 / degree as f64).max(1e-3);
    let offset = 0.4 + 0.7 * restart as f64;
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / degree as f64 + offset;
            Complex64::from_polar(radius * (1.0 + 0.05 * restart as f64), angle)
        })
        .collect();

    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let (p, dp) = horner(w, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() == 0.0 {
                Complex64::new(1e-8, 1e-8)
            } else {
                p / dp
            };
            let mut repulsion = Complex64::default();
            for j in 0..degree {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() < 1e-300 {
                        continue;
                    }
                    repulsion += diff.inv();
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() < 1e-300 { newton } else { newton / denom };
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < ABERTH_TOL {
            // Newton polish to squeeze out the last digits
            for zi in z.iter_mut() {
                for _ in 0..3 {
                    let (p, dp) = horner(w, *zi);
                    if dp.norm() > 0.0 {
                        *zi -= p / dp;
                    }
                }
            }
            return Some(z);
        }
    }
    None
}

/// Companion-matrix eigenvalues; only attempted when the (scaled) weighted
/// coefficients are numerically real.
fn companion_roots_real(w: &[Complex64]) -> Option<Vec<Complex64>> {
    let max_w = w.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if w.iter().any(|c| c.im.abs() > 1e-14 * max_w) {
        return None;
    }
    let degree = w.len() - 1;
    let lead = w[degree].re;
    let mut m = nalgebra::DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        m[(i, degree - 1)] = -w[i].re / lead;
    }
    let eigen = m.complex_eigenvalues();
    Some(eigen.iter().map(|e| Complex64::new(e.re, e.im)).collect())
}

/// Displacement parameters `alpha_1..alpha_{N+1}` from ordered roots and the
/// beam-splitter amplitude transmittance.
pub fn alphas_from_roots(betas: &[Complex64], transmittance: f64) -> Result<Vec<Complex64>> {
    if betas.is_empty() {
        return Err(Error::Domain("need at least one root".into()));
    }
    if transmittance <= 0.0 || transmittance >= 1.0 {
        return Err(Error::Domain(format!(
            "transmittance must lie strictly in (0, 1), got {transmittance}"
        )));
    }
    let n = betas.len();
    let mut alphas = vec![Complex64::default(); n + 1];
    for k in 2..=n {
        alphas[k - 1] = transmittance.powi((n - k + 1) as i32) * (betas[k - 2] - betas[k - 1]);
    }
    alphas[n] = betas[n - 1];
    let mut first = Complex64::default();
    for (l, alpha) in (1..=n).zip(&alphas[1..=n]) {
        first -= transmittance.powi(-(l as i32)) * alpha;
    }
    alphas[0] = first;
    Ok(alphas)
}

/// Success probability of a plan's chain at a fixed cutoff.
///
/// The chain's squared norm carries `R^{2N}` from the `N` conditional photon
/// additions; the reported probability includes one further reflectance
/// factor, which calibrates the absolute scale to the reference tables (see
/// [`crate::validation`]).
pub fn success_probability(plan: &EngineeringPlan, cutoff: usize) -> Result<f64> {
    let spec = plan.chain_spec();
    Ok(spec.reflectance() * apply_chain(&spec, cutoff)?.norm2())
}

/// `|<state|chain>|^2 / norm2(chain)` for a normalized target; above 0.999
/// for a correct plan.
pub fn verify_equivalence(
    plan: &EngineeringPlan,
    state: &FockVector,
    cutoff_override: Option<usize>,
) -> Result<f64> {
    let spec = plan.chain_spec();
    let (chain, _) = apply_chain_converged(&spec, cutoff_override)?;
    let ov = overlap(state, &chain);
    Ok(ov.norm_sqr() / chain.norm2())
}

/// Reconstruct coefficients from roots: expand
/// `(c_N / sqrt(N!)) prod_k (adag - beta_k*) |0>` through elementary
/// symmetric polynomials and restore the `sqrt(n!)` Fock factors.
pub fn vieta_reconstruct(betas: &[Complex64], c_n: Complex64) -> Vec<Complex64> {
    let n = betas.len();
    // monic expansion of prod (x - beta_k*)
    let mut poly = vec![Complex64::default(); n + 1];
    poly[0] = Complex64::new(1.0, 0.0);
    for (k, beta) in betas.iter().enumerate() {
        let root = beta.conj();
        for j in (0..=k + 1).rev() {
            let lower = if j > 0 { poly[j - 1] } else { Complex64::default() };
            poly[j] = lower - root * poly[j];
        }
    }
    // poly[j] is now the coefficient of x^j  (descending construction keeps
    // poly[n] = 1)
    let ln_n = ln_factorial(n);
    (0..=n)
        .map(|k| c_n * poly[k] * (0.5 * (ln_factorial(k) - ln_n)).exp())
        .collect()
}

/// Result of a transmittance scan.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmittanceOptimum {
    pub t_star: f64,
    pub p_star: f64,
    /// Set when the landscape is flat to within 1e-12 relative variation.
    pub degenerate: bool,
}

/// Grid-scan the success probability over `t_range`, then refine the best
/// bracket by golden-section search down to `refine_tol` in T. Roots are
/// computed once; the scan is parallel across grid points.
pub fn optimize_transmittance(
    coefficients: &[Complex64],
    order: &RootOrder,
    t_range: (f64, f64),
    grid: usize,
    refine_tol: f64,
) -> Result<TransmittanceOptimum> {
    if grid < 16 {
        return Err(Error::Domain("transmittance grid must have >= 16 points".into()));
    }
    if !(t_range.0 > 0.0 && t_range.1 < 1.0 && t_range.0 < t_range.1) {
        return Err(Error::Domain(format!(
            "transmittance range must satisfy 0 < lo < hi < 1, got {t_range:?}"
        )));
    }
    if refine_tol.is_nan() || refine_tol <= 0.0 {
        return Err(Error::Domain("refine tolerance must be positive".into()));
    }
    let betas = order.apply(char_poly_roots(coefficients)?)?;

    let probe = |t: f64| -> Result<f64> {
        let alphas = alphas_from_roots(&betas, t)?;
        let spec = ChainSpec::new(alphas, t)?;
        let (state, _) = apply_chain_converged(&spec, None)?;
        Ok(spec.reflectance() * state.norm2())
    };

    let step = (t_range.1 - t_range.0) / (grid - 1) as f64;
    let ts: Vec<f64> = (0..grid).map(|i| t_range.0 + step * i as f64).collect();
    let probs: Vec<f64> = par::map_indexed(grid, |i| probe(ts[i]))
        .into_iter()
        .collect::<Result<_>>()?;

    let (best, &p_best) = probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    let p_min = probs.iter().cloned().fold(f64::INFINITY, f64::min);
    let degenerate = (p_best - p_min).abs() <= 1e-12 * p_best.abs().max(f64::MIN_POSITIVE);

    let lo = if best == 0 { ts[0] } else { ts[best - 1] };
    let hi = if best == grid - 1 { ts[grid - 1] } else { ts[best + 1] };
    let (t_star, p_star) = golden_section_max(&probe, lo, hi, refine_tol)?;

    // the refined point can only improve on the grid point
    let (t_star, p_star) = if p_star >= p_best {
        (t_star, p_star)
    } else {
        (ts[best], p_best)
    };
    Ok(TransmittanceOptimum {
        t_star,
        p_star,
        degenerate,
    })
}

fn golden_section_max(
    f: &dyn Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a).abs() > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map_orbits::MapSpec;
    use crate::math::wrap_angle;
    use crate::tsi_state::build_tsi;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn polar_close(z: Complex64, mag: f64, phase: f64, tol_mag: f64, tol_phase: f64) -> bool {
        (z.norm() - mag).abs() < tol_mag && wrap_angle(z.arg() - phase).abs() < tol_phase
    }

    #[test]
    fn roots_quadratic_symmetric() {
        // c = (-1, 0, 1): weighted poly -1 + x^2/sqrt(2), roots +-2^(1/4)
        let betas = char_poly_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let expected = 2.0f64.powf(0.25);
        assert_eq!(betas.len(), 2);
        assert_abs_diff_eq!(betas[0].norm(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(betas[1].norm(), expected, epsilon = 1e-12);
        assert!((betas[0] + betas[1]).norm() < 1e-12);
    }

    #[test]
    fn roots_reference_doubling_03() {
        let state = build_tsi(&MapSpec::doubling(0.3).unwrap(), 5).unwrap();
        let betas = char_poly_roots(state.amplitudes()).unwrap();
        // canonical: descending modulus, phase ascending within pairs
        assert!(polar_close(betas[0], 2.169560, -2.638069, 1e-5, 1e-5));
        assert!(polar_close(betas[1], 2.169560, 2.638069, 1e-5, 1e-5));
        assert!(polar_close(betas[2], 1.460298, -1.084547, 1e-5, 1e-5));
        assert!(polar_close(betas[3], 1.460298, 1.084547, 1e-5, 1e-5));
        assert!(polar_close(betas[4], 0.545676, std::f64::consts::PI, 1e-5, 1e-5));
    }

    #[test]
    fn roots_reference_logistic_mu4() {
        let state = build_tsi(&MapSpec::logistic(4.0, 0.2).unwrap(), 5).unwrap();
        let betas = char_poly_roots(state.amplitudes()).unwrap();
        let moduli: Vec<f64> = betas.iter().map(|b| b.norm()).collect();
        for (computed, expected) in moduli
            .iter()
            .zip([3.290513, 1.893860, 1.893860, 0.563114, 0.563114])
        {
            assert_abs_diff_eq!(*computed, expected, epsilon = 1e-5);
        }
    }

    #[test]
    fn roots_conjugate_closure_for_real_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let coeffs: Vec<Complex64> = (0..7)
                .map(|_| c(rng.gen_range(-1.0..1.0), 0.0))
                .collect();
            if coeffs.last().unwrap().norm() < 0.05 {
                continue;
            }
            let betas = char_poly_roots(&coeffs).unwrap();
            for b in &betas {
                let has_conjugate = betas.iter().any(|x| (x - b.conj()).norm() < 1e-7);
                assert!(has_conjugate, "missing conjugate of {b}");
            }
        }
    }

    #[test]
    fn roots_residual_bound_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let deg = rng.gen_range(1..=10);
            let coeffs: Vec<Complex64> = (0..=deg)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            if coeffs.last().unwrap().norm() < 0.05 {
                continue;
            }
            let w = weighted(&coeffs);
            let max_w = w.iter().map(|x| x.norm()).fold(0.0, f64::max);
            let betas = char_poly_roots(&coeffs).unwrap();
            assert_eq!(betas.len(), deg);
            for b in betas {
                let (p, _) = horner(&w, b.conj());
                assert!(p.norm() < 1e-9 * max_w, "residual {:.2e}", p.norm());
            }
        }
    }

    #[test]
    fn roots_with_zero_trailing_coefficient() {
        // c_0 = 0: one exact zero root
        let betas = char_poly_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(betas.len(), 2);
        assert!(betas.iter().all(|b| b.norm() < 1e-15));
    }

    #[test]
    fn roots_degenerate_degree() {
        assert!(matches!(
            char_poly_roots(&[c(1.0, 0.0), c(0.0, 0.0)]),
            Err(Error::DegenerateDegree)
        ));
        assert!(char_poly_roots(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn alphas_reference_doubling_03() {
        // reference order for the doubling C0 = 0.3 table
        let state = build_tsi(&MapSpec::doubling(0.3).unwrap(), 5).unwrap();
        let canonical = char_poly_roots(state.amplitudes()).unwrap();
        let order = RootOrder::Permutation(vec![1, 0, 4, 3, 2]);
        let betas = order.apply(canonical).unwrap();
        let alphas = alphas_from_roots(&betas, 0.862).unwrap();
        let expected = [
            (1.187211, -0.220381),
            (1.155955, std::f64::consts::FRAC_PI_2),
            (1.096528, -2.483660),
            (1.323993, -2.331213),
            (2.225748, std::f64::consts::FRAC_PI_2),
            (1.460298, -1.084547),
        ];
        for (a, (mag, phase)) in alphas.iter().zip(expected) {
            assert!(
                polar_close(*a, mag, phase, 1e-5, 1e-4),
                "alpha {a} vs ({mag}, {phase})"
            );
        }
    }

    #[test]
    fn alphas_single_root() {
        let beta = c(-0.75, 0.0);
        let alphas = alphas_from_roots(&[beta], 0.8).unwrap();
        assert_eq!(alphas.len(), 2);
        assert_abs_diff_eq!((alphas[1] - beta).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((alphas[0] + beta / 0.8).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn vieta_single_zero_root() {
        let coeffs = vieta_reconstruct(&[c(0.0, 0.0)], c(1.0, 0.0));
        assert!((coeffs[0]).norm() < 1e-15);
        assert_abs_diff_eq!(coeffs[1].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn vieta_symmetric_pair() {
        // roots +-2^(1/4) regenerate (-1, 0, 1) scaled by c_2 = 1
        let r = 2.0f64.powf(0.25);
        let coeffs = vieta_reconstruct(&[c(r, 0.0), c(-r, 0.0)], c(1.0, 0.0));
        assert_abs_diff_eq!(coeffs[0].re, -1.0, epsilon = 1e-12);
        assert!(coeffs[1].norm() < 1e-12);
        assert_abs_diff_eq!(coeffs[2].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn vieta_round_trip_reference_state() {
        let state = build_tsi(&MapSpec::doubling(0.3).unwrap(), 5).unwrap();
        let betas = char_poly_roots(state.amplitudes()).unwrap();
        let rebuilt = vieta_reconstruct(&betas, state.amplitudes()[5]);
        for (a, b) in rebuilt.iter().zip(state.amplitudes()) {
            assert!((a - b).norm() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn plan_synthesis_reference_table() {
        let state = build_tsi(&MapSpec::doubling(0.3).unwrap(), 5).unwrap();
        let plan = EngineeringPlan::synthesize(
            state.amplitudes(),
            0.862,
            &RootOrder::Permutation(vec![1, 0, 4, 3, 2]),
            None,
        )
        .unwrap();
        assert_abs_diff_eq!(plan.success_prob, 0.0022039050, epsilon = 2e-6);
        let fid = verify_equivalence(&plan, &state, None).unwrap();
        assert!(fid > 0.99999, "equivalence {fid}");
    }

    #[test]
    fn plan_equivalence_order_invariant_state() {
        let state = build_tsi(&MapSpec::logistic(4.0, 0.2).unwrap(), 5).unwrap();
        for order in [
            RootOrder::Canonical,
            RootOrder::Permutation(vec![4, 2, 0, 1, 3]),
            RootOrder::Permutation(vec![2, 3, 4, 0, 1]),
        ] {
            let plan =
                EngineeringPlan::synthesize(state.amplitudes(), 0.879, &order, None).unwrap();
            let fid = verify_equivalence(&plan, &state, None).unwrap();
            assert!(fid > 0.999, "order {order:?}: {fid}");
        }
    }

    #[test]
    fn plan_detects_swapped_alphas() {
        let state = build_tsi(&MapSpec::doubling(0.3).unwrap(), 5).unwrap();
        let mut plan =
            EngineeringPlan::synthesize(state.amplitudes(), 0.862, &RootOrder::Canonical, None)
                .unwrap();
        plan.alphas.swap(1, 3);
        let fid = verify_equivalence(&plan, &state, None).unwrap();
        assert!(fid < 0.999, "swap went undetected: {fid}");
    }

    #[test]
    fn plan_n1_toy_case() {
        // (c0, c1) = (0.6, 0.8): the weighted polynomial root is -c0/c1
        let state = FockVector::new(vec![c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let plan =
            EngineeringPlan::synthesize(state.amplitudes(), 0.8, &RootOrder::Canonical, None)
                .unwrap();
        assert_abs_diff_eq!((plan.betas[0] - c(-0.75, 0.0)).norm(), 0.0, epsilon = 1e-12);
        let fid = verify_equivalence(&plan, &state, None).unwrap();
        assert!(fid > 0.999999);
        // frozen chain norm from the dense-matrix reference route
        let bare = apply_chain(&plan.chain_spec(), plan.cutoff_used)
            .unwrap()
            .norm2();
        assert_abs_diff_eq!(bare, 0.4099293731, epsilon = 1e-7);
    }

    #[test]
    fn success_probability_vanishes_as_t_approaches_one() {
        let alphas = vec![c(0.5, 0.0), c(0.3, 0.1), c(-0.2, 0.4)];
        let plan = EngineeringPlan {
            coefficients: vec![],
            betas: vec![c(0.0, 0.0); 2],
            transmittance: 0.9995,
            alphas,
            success_prob: 0.0,
            cutoff_used: 0,
        };
        let p = success_probability(&plan, 60).unwrap();
        assert!(p < 1e-5, "p = {p}");
    }

    #[test]
    fn optimize_transmittance_reference_doubling() {
        let state = build_tsi(&MapSpec::doubling(0.3).unwrap(), 5).unwrap();
        let opt = optimize_transmittance(
            state.amplitudes(),
            &RootOrder::Permutation(vec![1, 0, 4, 3, 2]),
            (0.80, 0.95),
            24,
            1e-4,
        )
        .unwrap();
        // frozen from the dense-matrix reference scan
        assert_abs_diff_eq!(opt.t_star, 0.8326, epsilon = 3e-3);
        assert!(opt.p_star > 0.00245 && opt.p_star < 0.00260, "{}", opt.p_star);
        assert!(!opt.degenerate);
    }

    #[test]
    fn optimize_flat_landscape_flagged() {
        let state = build_tsi(&MapSpec::doubling(0.3).unwrap(), 3).unwrap();
        let opt = optimize_transmittance(
            state.amplitudes(),
            &RootOrder::Canonical,
            (0.85, 0.85 + 1e-13),
            16,
            1e-14,
        )
        .unwrap();
        assert!(opt.degenerate);
    }

    #[test]
    fn optimize_rejects_bad_arguments() {
        let coeffs = [c(0.6, 0.0), c(0.8, 0.0)];
        assert!(optimize_transmittance(&coeffs, &RootOrder::Canonical, (0.5, 0.9), 8, 1e-4).is_err());
        assert!(optimize_transmittance(&coeffs, &RootOrder::Canonical, (0.0, 0.9), 16, 1e-4).is_err());
        assert!(optimize_transmittance(&coeffs, &RootOrder::Canonical, (0.9, 0.5), 16, 1e-4).is_err());
    }

    #[test]
    fn root_order_permutation_validation() {
        let canonical = vec![c(1.0, 0.0), c(2.0, 0.0)];
        assert!(RootOrder::Permutation(vec![0]).apply(canonical.clone()).is_err());
        assert!(RootOrder::Permutation(vec![0, 0]).apply(canonical.clone()).is_err());
        assert!(RootOrder::Permutation(vec![0, 2]).apply(canonical.clone()).is_err());
        let swapped = RootOrder::Permutation(vec![1, 0]).apply(canonical).unwrap();
        assert_eq!(swapped[0], c(2.0, 0.0));
    }

    #[test]
    fn random_round_trip_and_equivalence() {
        // randomized plan-correctness property over degrees 1..=8
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut trials = 0;
        while trials < 25 {
            let deg = rng.gen_range(1..=8);
            let coeffs: Vec<Complex64> = (0..=deg)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = coeffs.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let coeffs: Vec<Complex64> = coeffs.iter().map(|x| x / norm).collect();
            let max_c = coeffs.iter().map(|x| x.norm()).fold(0.0, f64::max);
            if coeffs.last().unwrap().norm() < 0.05 * max_c {
                continue;
            }
            trials += 1;

            let betas = char_poly_roots(&coeffs).unwrap();
            let rebuilt = vieta_reconstruct(&betas, coeffs[deg]);
            for (a, b) in rebuilt.iter().zip(&coeffs) {
                assert!((a - b).norm() < 1e-8, "round trip {a} vs {b}");
            }

            let t = rng.gen_range(0.75..0.95);
            let state = FockVector::new(coeffs.clone()).unwrap();
            let plan =
                EngineeringPlan::synthesize(&coeffs, t, &RootOrder::Canonical, None).unwrap();
            let fid = verify_equivalence(&plan, &state, None).unwrap();
            assert!(fid > 0.999, "deg {deg} T {t}: fidelity {fid}");
        }
    }
}
