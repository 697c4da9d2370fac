//! Photon statistics of a truncated state: parity, number moments, Mandel Q,
//! g2(0), quadrature variances, and the Husimi Q function.
//!
//! All operator expectations are evaluated within the truncated space
//! (`a|n> = sqrt(n)|n-1>`); there is no tail to correct for. Mandel Q and
//! g2(0) divide by the mean photon number and are therefore undefined on
//! vacuum-like states.

use crate::map_orbits::MapSpec;
use crate::math::ln_factorial_table;
use crate::par;
use crate::tsi_state::{build_tsi, FockVector};
use crate::{Error, Result};
use num_complex::Complex64;

/// The observable suite for one state. `mandel_q` and `g2` are `None` when
/// the mean photon number vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub p_even: f64,
    pub p_odd: f64,
    pub mean_n: f64,
    pub delta_n: f64,
    pub mandel_q: Option<f64>,
    pub g2: Option<f64>,
    pub dx1: f64,
    pub dx2: f64,
    /// `p_odd > 0.5` implies a negative Glauber-Sudarshan P function.
    pub nonclassical_parity: bool,
}

/// Probabilities of even and odd photon number: `(p_even, p_odd)`.
pub fn even_odd(state: &FockVector) -> (f64, f64) {
    let mut even = 0.0;
    let mut odd = 0.0;
    for (n, c) in state.amplitudes().iter().enumerate() {
        if n % 2 == 0 {
            even += c.norm_sqr();
        } else {
            odd += c.norm_sqr();
        }
    }
    (even, odd)
}

/// Mean and standard deviation of photon number: `(mean_n, delta_n)`.
pub fn number_moments(state: &FockVector) -> (f64, f64) {
    let (mean, second) = raw_moments(state);
    (mean, (second - mean * mean).max(0.0).sqrt())
}

fn raw_moments(state: &FockVector) -> (f64, f64) {
    let mut mean = 0.0;
    let mut second = 0.0;
    for (n, c) in state.amplitudes().iter().enumerate() {
        let p = c.norm_sqr();
        mean += p * n as f64;
        second += p * (n * n) as f64;
    }
    (mean, second)
}

/// Mandel Q = (variance - mean) / mean. Negative marks sub-Poissonian
/// statistics, positive super-Poissonian.
pub fn mandel_q(state: &FockVector) -> Result<f64> {
    let (mean, second) = raw_moments(state);
    if mean <= 0.0 {
        return Err(Error::UndefinedStatistic("Mandel Q"));
    }
    let variance = second - mean * mean;
    Ok((variance - mean) / mean)
}

/// Zero-delay second-order correlation g2(0) = (<n^2> - <n>) / <n>^2.
pub fn g2_zero(state: &FockVector) -> Result<f64> {
    let (mean, second) = raw_moments(state);
    if mean <= 0.0 {
        return Err(Error::UndefinedStatistic("g2(0)"));
    }
    Ok((second - mean) / (mean * mean))
}

/// Standard deviations of the quadratures X1 = (a + a^dag)/2 and
/// X2 = (a - a^dag)/2i. Vacuum gives (0.5, 0.5); smaller marks squeezing.
pub fn quadrature_variances(state: &FockVector) -> (f64, f64) {
    let amps = state.amplitudes();
    let mut a_exp = Complex64::default(); // <a>
    let mut a2_exp = Complex64::default(); // <a^2>
    for n in 1..amps.len() {
        a_exp += amps[n - 1].conj() * amps[n] * (n as f64).sqrt();
    }
    for n in 2..amps.len() {
        a2_exp += amps[n - 2].conj() * amps[n] * ((n * (n - 1)) as f64).sqrt();
    }
    let (mean, _) = raw_moments(state);
    // <X1^2> = (2 Re<a^2> + 2<n> + 1)/4, <X1> = Re<a>; analogously for X2.
    let var1 = (2.0 * a2_exp.re + 2.0 * mean + 1.0) / 4.0 - a_exp.re * a_exp.re;
    let var2 = (1.0 + 2.0 * mean - 2.0 * a2_exp.re) / 4.0 - a_exp.im * a_exp.im;
    (var1.max(0.0).sqrt(), var2.max(0.0).sqrt())
}

/// Everything at once; undefined statistics become `None`.
pub fn stats_report(state: &FockVector) -> StatsReport {
    let (p_even, p_odd) = even_odd(state);
    let (mean_n, delta_n) = number_moments(state);
    let (dx1, dx2) = quadrature_variances(state);
    StatsReport {
        p_even,
        p_odd,
        mean_n,
        delta_n,
        mandel_q: mandel_q(state).ok(),
        g2: g2_zero(state).ok(),
        dx1,
        dx2,
        nonclassical_parity: p_odd > 0.5,
    }
}

/// Husimi Q(beta) = |<beta|psi>|^2 / pi, a value in [0, 1/pi].
pub fn husimi_q(state: &FockVector, beta: Complex64) -> f64 {
    let table = ln_factorial_table(state.dim());
    husimi_q_with_table(state, beta, &table)
}

// The coherent overlap <beta|psi> = e^{-|b|^2/2} sum_n c_n (b*)^n / sqrt(n!)
// is summed with per-term log-magnitudes so large dims and |beta| cannot
// overflow the n-th power or the factorial.
fn husimi_q_with_table(state: &FockVector, beta: Complex64, ln_fact: &[f64]) -> f64 {
    let bsq = beta.norm_sqr();
    let amps = state.amplitudes();
    let overlap = if bsq == 0.0 {
        amps[0]
    } else {
        let ln_b = beta.norm().ln();
        let phase = beta.conj().arg();
        let mut acc = Complex64::default();
        for (n, c) in amps.iter().enumerate() {
            let ln_mag = n as f64 * ln_b - 0.5 * ln_fact[n] - bsq / 2.0;
            acc += c * Complex64::from_polar(ln_mag.exp(), phase * n as f64);
        }
        acc
    };
    overlap.norm_sqr() / std::f64::consts::PI
}

/// A sampled Husimi function: `values[i * im_axis.len() + j]` is
/// `Q(re_axis[i] + i * im_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiGrid {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    values: Vec<f64>,
}

impl HusimiGrid {
    pub fn value(&self, re_index: usize, im_index: usize) -> f64 {
        self.values[re_index * self.im_axis.len() + im_index]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Riemann sum of Q over the window; approaches one when the window
    /// captures the state.
    pub fn quadrature(&self) -> f64 {
        if self.re_axis.len() < 2 || self.im_axis.len() < 2 {
            return 0.0;
        }
        let dre = self.re_axis[1] - self.re_axis[0];
        let dim = self.im_axis[1] - self.im_axis[0];
        self.values.iter().sum::<f64>() * dre * dim
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

fn linspace(range: (f64, f64), n: usize) -> Vec<f64> {
    let step = (range.1 - range.0) / (n - 1) as f64;
    (0..n).map(|i| range.0 + step * i as f64).collect()
}

/// Sample Q(beta) on a rectangular grid (parallel over grid rows when the
/// `parallel` feature is on).
pub fn husimi_grid(
    state: &FockVector,
    re_range: (f64, f64),
    im_range: (f64, f64),
    resolution: usize,
) -> HusimiGrid {
    let (re_axis, im_axis, table) = grid_setup(state, re_range, im_range, resolution);
    let rows = par::map_indexed(resolution, |i| {
        husimi_row(state, re_axis[i], &im_axis, &table)
    });
    assemble_grid(re_axis, im_axis, rows)
}

/// Sequential twin of [`husimi_grid`]; always single-threaded.
pub fn husimi_grid_seq(
    state: &FockVector,
    re_range: (f64, f64),
    im_range: (f64, f64),
    resolution: usize,
) -> HusimiGrid {
    let (re_axis, im_axis, table) = grid_setup(state, re_range, im_range, resolution);
    let rows = par::map_indexed_seq(resolution, |i| {
        husimi_row(state, re_axis[i], &im_axis, &table)
    });
    assemble_grid(re_axis, im_axis, rows)
}

fn grid_setup(
    state: &FockVector,
    re_range: (f64, f64),
    im_range: (f64, f64),
    resolution: usize,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    assert!(resolution >= 2, "grid needs at least 2 points per axis");
    assert!(
        re_range.0.is_finite()
            && re_range.1.is_finite()
            && im_range.0.is_finite()
            && im_range.1.is_finite(),
        "grid ranges must be finite"
    );
    (
        linspace(re_range, resolution),
        linspace(im_range, resolution),
        ln_factorial_table(state.dim()),
    )
}

fn husimi_row(state: &FockVector, re: f64, im_axis: &[f64], table: &[f64]) -> Vec<f64> {
    im_axis
        .iter()
        .map(|&im| husimi_q_with_table(state, Complex64::new(re, im), table))
        .collect()
}

fn assemble_grid(re_axis: Vec<f64>, im_axis: Vec<f64>, rows: Vec<Vec<f64>>) -> HusimiGrid {
    HusimiGrid {
        re_axis,
        im_axis,
        values: rows.into_iter().flatten().collect(),
    }
}

/// One report per truncation `N = 0..=n_max`, each state independently
/// renormalized (parallel over N when the `parallel` feature is on).
pub fn stats_sweep(map: &MapSpec, n_max: usize) -> Result<Vec<StatsReport>> {
    collect_sweep(par::map_indexed(n_max + 1, |n| sweep_entry(map, n)))
}

/// Sequential twin of [`stats_sweep`].
pub fn stats_sweep_seq(map: &MapSpec, n_max: usize) -> Result<Vec<StatsReport>> {
    collect_sweep(par::map_indexed_seq(n_max + 1, |n| sweep_entry(map, n)))
}

fn sweep_entry(map: &MapSpec, n: usize) -> Result<StatsReport> {
    Ok(stats_report(&build_tsi(map, n)?))
}

fn collect_sweep(entries: Vec<Result<StatsReport>>) -> Result<Vec<StatsReport>> {
    entries.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map_orbits::MapSpec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const FRAC_1_PI: f64 = std::f64::consts::FRAC_1_PI;

    fn tsi(map: &MapSpec, n: usize) -> FockVector {
        build_tsi(map, n).unwrap()
    }

    fn d3() -> MapSpec {
        MapSpec::doubling(0.3).unwrap()
    }

    fn d29() -> MapSpec {
        MapSpec::doubling(0.29711).unwrap()
    }

    fn l349() -> MapSpec {
        MapSpec::logistic(3.49, 0.2).unwrap()
    }

    fn l4() -> MapSpec {
        MapSpec::logistic(4.0, 0.2).unwrap()
    }

    #[test]
    fn parity_basics() {
        assert_eq!(even_odd(&FockVector::vacuum(1)), (1.0, 0.0));
        assert_eq!(even_odd(&FockVector::fock(1, 1)), (0.0, 1.0));
    }

    #[test]
    fn parity_completeness_on_sweeps() {
        for map in [d3(), d29(), l349(), l4()] {
            for report in stats_sweep(&map, 30).unwrap() {
                assert!((report.p_even + report.p_odd - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chaotic_parity_oscillates_around_half() {
        let reports = stats_sweep(&d29(), 50).unwrap();
        let crossings = reports
            .windows(2)
            .filter(|w| (w[0].p_odd - 0.5) * (w[1].p_odd - 0.5) < 0.0)
            .count();
        assert!(crossings >= 5, "only {crossings} crossings of 0.5");
    }

    #[test]
    fn regular_parity_stays_below_half_at_large_n() {
        let reports = stats_sweep(&d3(), 50).unwrap();
        for (n, report) in reports.iter().enumerate().skip(20) {
            assert!(report.p_odd < 0.5, "p_odd = {} at N = {n}", report.p_odd);
            assert!(!report.nonclassical_parity);
        }
    }

    #[test]
    fn moments_basics() {
        let (mean, delta) = number_moments(&FockVector::fock(3, 5));
        assert_abs_diff_eq!(mean, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(delta, 0.0, epsilon = 1e-14);

        let half = 1.0 / 2.0f64.sqrt();
        let cat = FockVector::new(vec![
            Complex64::new(half, 0.0),
            Complex64::default(),
            Complex64::new(half, 0.0),
        ])
        .unwrap();
        let (mean, delta) = number_moments(&cat);
        assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(delta, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn mean_photon_grows_near_linearly_in_regular_regime() {
        let reports = stats_sweep(&d3(), 50).unwrap();
        let pts: Vec<(f64, f64)> = reports
            .iter()
            .enumerate()
            .skip(5)
            .map(|(n, r)| (n as f64, r.mean_n))
            .collect();
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let syy: f64 = pts.iter().map(|p| p.1 * p.1).sum();
        let r = (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
        assert!(r > 0.995, "correlation {r}");
    }

    #[test]
    fn frozen_stats_doubling_03_n5() {
        // Brute-force reference values for the doubling C0 = 0.3, N = 5 state.
        let report = stats_report(&tsi(&d3(), 5));
        assert_abs_diff_eq!(report.p_even, 0.466666666667, epsilon = 1e-10);
        assert_abs_diff_eq!(report.p_odd, 0.533333333333, epsilon = 1e-10);
        assert_abs_diff_eq!(report.mean_n, 3.2, epsilon = 1e-12);
        assert_abs_diff_eq!(report.delta_n, 1.615080446444, epsilon = 1e-10);
        assert_abs_diff_eq!(report.mandel_q.unwrap(), -0.184848484848, epsilon = 1e-10);
        assert_abs_diff_eq!(report.g2.unwrap(), 0.942234848485, epsilon = 1e-10);
        assert_abs_diff_eq!(report.dx1, 0.875627998232, epsilon = 1e-10);
        assert_abs_diff_eq!(report.dx2, 1.073750261632, epsilon = 1e-10);
        assert!(report.nonclassical_parity);
    }

    #[test]
    fn mandel_q_fock_states() {
        for n in 1..=10 {
            let q = mandel_q(&FockVector::fock(n, n + 2)).unwrap();
            assert_abs_diff_eq!(q, -1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn mandel_q_zero_for_even_cat() {
        let half = 1.0 / 2.0f64.sqrt();
        let s = FockVector::new(vec![
            Complex64::new(half, 0.0),
            Complex64::default(),
            Complex64::new(half, 0.0),
        ])
        .unwrap();
        assert_abs_diff_eq!(mandel_q(&s).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn mandel_q_undefined_for_vacuum() {
        assert!(matches!(
            mandel_q(&FockVector::vacuum(4)),
            Err(Error::UndefinedStatistic(_))
        ));
        assert!(matches!(
            g2_zero(&FockVector::vacuum(0)),
            Err(Error::UndefinedStatistic(_))
        ));
    }

    #[test]
    fn mandel_q_sign_transition_per_config() {
        // First N with Q > 0, frozen from brute-force enumeration:
        // doubling 0.3 -> 7, doubling 0.29711 -> 10, logistic 3.49 -> 8,
        // logistic 4 -> 8. Q stays positive from there through N = 50.
        for (map, first_positive) in
            [(d3(), 7usize), (d29(), 10), (l349(), 8), (l4(), 8)]
        {
            let reports = stats_sweep(&map, 50).unwrap();
            for (n, report) in reports.iter().enumerate().skip(1) {
                let q = report.mandel_q.unwrap();
                if n < first_positive {
                    assert!(q < 0.0, "{} N={n}: q={q}", map.kind.name());
                } else {
                    assert!(q > 0.0, "{} N={n}: q={q}", map.kind.name());
                }
            }
        }
    }

    #[test]
    fn g2_fock_states() {
        assert_abs_diff_eq!(g2_zero(&FockVector::fock(1, 3)).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g2_zero(&FockVector::fock(2, 3)).unwrap(), 0.5, epsilon = 1e-14);
        for n in 1..=10 {
            let g2 = g2_zero(&FockVector::fock(n, n)).unwrap();
            assert_abs_diff_eq!(g2, 1.0 - 1.0 / n as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn g2_rises_irregularly_in_chaotic_regime() {
        let reports = stats_sweep(&d29(), 50).unwrap();
        let g: Vec<f64> = reports.iter().skip(1).map(|r| r.g2.unwrap()).collect();
        assert!(g.last().unwrap() > &1.0);
        // not monotone: at least a few local decreases
        let decreases = g.windows(2).filter(|w| w[1] < w[0]).count();
        assert!(decreases >= 3, "{decreases} decreases");
    }

    #[test]
    fn qg_identity_everywhere() {
        for map in [d3(), d29(), l349(), l4()] {
            for n in 1..=40 {
                let state = tsi(&map, n);
                let q = mandel_q(&state).unwrap();
                let g2 = g2_zero(&state).unwrap();
                let (mean, _) = number_moments(&state);
                assert!(
                    (q - (g2 - 1.0) * mean).abs() < 1e-9,
                    "qg residual {} at N={n}",
                    (q - (g2 - 1.0) * mean).abs()
                );
            }
        }
    }

    #[test]
    fn quadratures_vacuum_exact() {
        assert_eq!(quadrature_variances(&FockVector::vacuum(6)), (0.5, 0.5));
    }

    #[test]
    fn quadratures_fock_states() {
        for n in 1..=10 {
            let (dx1, dx2) = quadrature_variances(&FockVector::fock(n, n + 1));
            let expected = ((2 * n + 1) as f64).sqrt() / 2.0;
            assert_abs_diff_eq!(dx1, expected, epsilon = 1e-12);
            assert_abs_diff_eq!(dx2, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn quadrature_variances_grow_with_n() {
        for map in [d3(), d29(), l349(), l4()] {
            let early = stats_report(&tsi(&map, 10));
            let late = stats_report(&tsi(&map, 50));
            assert!(late.dx1 > early.dx1, "{}", map.kind.name());
            assert!(late.dx2 > early.dx2, "{}", map.kind.name());
        }
    }

    #[test]
    fn husimi_point_values() {
        let vac = FockVector::vacuum(3);
        assert_abs_diff_eq!(husimi_q(&vac, Complex64::default()), FRAC_1_PI, epsilon = 1e-14);
        assert_abs_diff_eq!(
            husimi_q(&vac, Complex64::new(1.0, 0.0)),
            (-1.0f64).exp() * FRAC_1_PI,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            husimi_q(&FockVector::fock(1, 1), Complex64::default()),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn husimi_grid_vacuum_peaks_at_origin() {
        let grid = husimi_grid(&FockVector::vacuum(2), (-3.0, 3.0), (-3.0, 3.0), 61);
        let center = grid.value(30, 30);
        assert_abs_diff_eq!(center, FRAC_1_PI, epsilon = 1e-12);
        assert_abs_diff_eq!(grid.max_value(), center, epsilon = 1e-15);
        assert!((grid.quadrature() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn husimi_quadrature_near_one() {
        let state = tsi(&d3(), 15);
        let grid = husimi_grid(&state, (-6.0, 6.0), (-6.0, 6.0), 121);
        assert!((grid.quadrature() - 1.0).abs() < 1e-3, "{}", grid.quadrature());
        assert!(grid.max_value() <= FRAC_1_PI + 1e-12);
    }

    #[test]
    fn husimi_parallel_matches_sequential() {
        let state = tsi(&l4(), 12);
        let a = husimi_grid(&state, (-4.0, 4.0), (-4.0, 4.0), 41);
        let b = husimi_grid_seq(&state, (-4.0, 4.0), (-4.0, 4.0), 41);
        assert_eq!(a, b);
    }

    #[test]
    fn husimi_large_dim_stays_finite() {
        // dim 50 with |beta| = 6: direct powers/factorials would overflow
        let state = tsi(&l4(), 50);
        let q = husimi_q(&state, Complex64::new(6.0, -6.0));
        assert!(q.is_finite() && (0.0..=FRAC_1_PI + 1e-12).contains(&q));
    }

    #[test]
    fn sweep_shapes_and_vacuum_entry() {
        let reports = stats_sweep(&d3(), 12).unwrap();
        assert_eq!(reports.len(), 13);
        assert!(reports[0].mandel_q.is_none());
        assert!(reports[0].g2.is_none());
        assert_eq!(reports[0].dx1, 0.5);
        assert!(reports[1].mandel_q.is_some());
        let seq = stats_sweep_seq(&d3(), 12).unwrap();
        assert_eq!(reports, seq);
    }

    proptest! {
        #[test]
        fn husimi_bounds(seed in 0.05f64..0.95, n in 0usize..25, re in -5.0f64..5.0, im in -5.0f64..5.0) {
            let map = MapSpec::logistic(3.8, seed).unwrap();
            let state = build_tsi(&map, n).unwrap();
            let q = husimi_q(&state, Complex64::new(re, im));
            prop_assert!(q >= 0.0);
            prop_assert!(q <= FRAC_1_PI + 1e-12);
        }

        #[test]
        fn heisenberg_floor(seed in 0.05f64..0.95, n in 0usize..30) {
            let map = MapSpec::logistic(3.6, seed).unwrap();
            let state = build_tsi(&map, n).unwrap();
            let (dx1, dx2) = quadrature_variances(&state);
            prop_assert!(dx1 * dx2 >= 0.25 - 1e-9);
        }
    }
}
