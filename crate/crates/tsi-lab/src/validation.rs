//! Built-in reproduction checks against the reference tables for the four
//! standard configurations (doubling seeds 0.3 and 0.29711, logistic
//! mu = 3.49 and mu = 4 from seed 0.2, all at N = 5).
//!
//! Each criterion compares a computed quantity against the published
//! reference values at a fixed tolerance and reports a pass/fail outcome
//! with deltas. Several reference claims are not reproducible from the
//! construction itself (see the individual criterion docs); those criteria
//! report honest failures with diagnostics rather than loosened tolerances.

use crate::engineering::{
    alphas_from_roots, char_poly_roots, optimize_transmittance, EngineeringPlan, RootOrder,
};
use crate::fidelity::fidelity;
use crate::map_orbits::{detect_eventual_period, doubling_orbit_exact, MapSpec};
use crate::math::wrap_angle;
use crate::photon_stats::stats_sweep;
use crate::tsi_state::build_tsi;
use crate::Result;
use num_complex::Complex64;

/// One reference configuration: map, caption transmittance, printed roots
/// and displacement parameters (magnitude/phase pairs), and the printed
/// success probability.
#[derive(Debug, Clone)]
pub struct ReferenceConfig {
    pub label: &'static str,
    pub map: MapSpec,
    pub transmittance: f64,
    pub betas_polar: [(f64, f64); 5],
    pub alphas_polar: [(f64, f64); 6],
    pub success_prob: f64,
}

/// The degree used throughout the reference tables.
pub const REFERENCE_DEGREE: usize = 5;

// 3.141 below is the printed table value, not a rounding of pi chosen here.
#[allow(clippy::approx_constant)]
pub fn reference_configs() -> Vec<ReferenceConfig> {
    vec![
        ReferenceConfig {
            label: "doubling C0=0.3",
            map: MapSpec::doubling(0.3).expect("valid seed"),
            transmittance: 0.862,
            betas_polar: [
                (2.169, 2.638),
                (2.169, -2.638),
                (0.545, 3.141),
                (1.460, 1.084),
                (1.460, -1.084),
            ],
            alphas_polar: [
                (1.187, -0.220),
                (1.155, 1.570),
                (1.096, -2.483),
                (1.323, -2.331),
                (2.225, 1.570),
                (1.460, -1.084),
            ],
            success_prob: 0.0022,
        },
        ReferenceConfig {
            label: "doubling C0=0.29711",
            map: MapSpec::doubling(0.29711).expect("valid seed"),
            transmittance: 0.867,
            betas_polar: [
                (2.306, 2.692),
                (2.306, -2.692),
                (0.543, 3.141),
                (1.489, 1.089),
                (1.489, -1.089),
            ],
            alphas_polar: [
                (1.372, -0.198),
                (1.130, 1.570),
                (1.193, -2.563),
                (1.357, -2.321),
                (2.289, 1.570),
                (1.489, -1.089),
            ],
            success_prob: 0.0021,
        },
        ReferenceConfig {
            label: "logistic mu=3.49 C0=0.2",
            map: MapSpec::logistic(3.49, 0.2).expect("valid parameters"),
            transmittance: 0.893,
            betas_polar: [
                (3.948, 3.141),
                (0.609, 2.566),
                (0.609, -2.566),
                (1.828, 1.373),
                (1.828, -1.373),
            ],
            alphas_polar: [
                (2.794, 0.051),
                (2.195, -3.045),
                (0.472, 1.570),
                (1.830, -1.959),
                (3.202, 1.570),
                (1.828, -1.373),
            ],
            success_prob: 0.0011,
        },
        ReferenceConfig {
            label: "logistic mu=4 C0=0.2",
            map: MapSpec::logistic(4.0, 0.2).expect("valid parameters"),
            transmittance: 0.879,
            betas_polar: [
                (3.290, 3.141),
                (0.563, 2.708),
                (0.563, -2.708),
                (1.893, 1.255),
                (1.893, -1.255),
            ],
            alphas_polar: [
                (2.027, 0.094),
                (1.665, -3.056),
                (0.321, 1.570),
                (1.787, -2.064),
                (3.165, 1.570),
                (1.893, -1.255),
            ],
            success_prob: 0.0015,
        },
    ]
}

/// Reference fidelities per map family: `(eta, F)` triples quoted for the
/// doubling and logistic configurations.
pub const REFERENCE_FIDELITIES_DOUBLING: [(f64, f64); 3] =
    [(0.99, 0.9983), (0.95, 0.9943), (0.90, 0.9909)];
pub const REFERENCE_FIDELITIES_LOGISTIC: [(f64, f64); 3] =
    [(0.99, 0.9986), (0.95, 0.9944), (0.90, 0.9911)];

/// The quoted summary optimum of the transmittance scan.
pub const REFERENCE_MEAN_OPTIMAL_T: f64 = 0.878;

/// Outcome of one validation criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

pub fn list_criteria() -> Vec<(usize, &'static str)> {
    vec![
        (1, CRITERION_NAMES[0]),
        (2, CRITERION_NAMES[1]),
        (3, CRITERION_NAMES[2]),
        (4, CRITERION_NAMES[3]),
        (5, CRITERION_NAMES[4]),
        (6, CRITERION_NAMES[5]),
        (7, CRITERION_NAMES[6]),
    ]
}

const CRITERION_NAMES: [&str; 7] = [
    "characteristic-polynomial roots match the reference tables",
    "displacement parameters match the reference tables",
    "success probabilities match the reference tables",
    "optimal transmittances match the reference captions",
    "fidelities match the reference values",
    "Mandel-Q sign transition window",
    "orbit period structure",
];

/// Run every reference criterion and collect the outcomes.
pub fn run_reference_criteria() -> Result<Vec<CriterionOutcome>> {
    Ok(vec![
        criterion_roots()?,
        criterion_alphas()?,
        criterion_success_probabilities()?,
        criterion_optimal_transmittance()?,
        criterion_fidelities()?,
        criterion_mandel_transition()?,
        criterion_period_structure()?,
    ])
}

/// Run the criterion with the given id (1-based).
pub fn run_criterion(id: usize) -> Result<CriterionOutcome> {
    match id {
        1 => criterion_roots(),
        2 => criterion_alphas(),
        3 => criterion_success_probabilities(),
        4 => criterion_optimal_transmittance(),
        5 => criterion_fidelities(),
        6 => criterion_mandel_transition(),
        7 => criterion_period_structure(),
        _ => Err(crate::Error::Domain(format!("no criterion {id}"))),
    }
}

fn polar(mag: f64, phase: f64) -> Complex64 {
    Complex64::from_polar(mag, phase)
}

/// Match computed roots to the printed order by greedy nearest neighbour in
/// the complex plane; returns indices into `computed`.
pub fn reference_permutation(computed: &[Complex64], printed: &[(f64, f64)]) -> Vec<usize> {
    let mut used = vec![false; computed.len()];
    printed
        .iter()
        .map(|&(mag, phase)| {
            let target = polar(mag, phase);
            let (best, _) = computed
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, z)| (i, (z - target).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("as many computed roots as printed");
            used[best] = true;
            best
        })
        .collect()
}

fn reference_plan(config: &ReferenceConfig) -> Result<EngineeringPlan> {
    let state = build_tsi(&config.map, REFERENCE_DEGREE)?;
    let canonical = char_poly_roots(state.amplitudes())?;
    let perm = reference_permutation(&canonical, &config.betas_polar);
    EngineeringPlan::synthesize(
        state.amplitudes(),
        config.transmittance,
        &RootOrder::Permutation(perm),
        None,
    )
}

const ROOT_TOL: f64 = 2e-3;

fn criterion_roots() -> Result<CriterionOutcome> {
    let mut worst: f64 = 0.0;
    let mut details = String::new();
    let mut passed = true;
    for config in reference_configs() {
        let state = build_tsi(&config.map, REFERENCE_DEGREE)?;
        let betas = char_poly_roots(state.amplitudes())?;
        let perm = reference_permutation(&betas, &config.betas_polar);
        for (&(mag, phase), &idx) in config.betas_polar.iter().zip(&perm) {
            let z = betas[idx];
            let d_mag = (z.norm() - mag).abs();
            let d_phase = wrap_angle(z.arg() - phase).abs();
            worst = worst.max(d_mag).max(d_phase);
            if d_mag > ROOT_TOL || d_phase > ROOT_TOL {
                passed = false;
                details.push_str(&format!(
                    "{}: ({:.3},{:+.3}) off by ({:.1e},{:.1e}); ",
                    config.label, mag, phase, d_mag, d_phase
                ));
            }
        }
    }
    if passed {
        details = format!("all 20 roots within {ROOT_TOL:.0e} (worst delta {worst:.1e})");
    }
    Ok(CriterionOutcome {
        id: 1,
        name: CRITERION_NAMES[0],
        passed,
        details,
    })
}

const ALPHA_TOL: f64 = 2e-2;

fn criterion_alphas() -> Result<CriterionOutcome> {
    let mut worst: f64 = 0.0;
    let mut details = String::new();
    let mut passed = true;
    for config in reference_configs() {
        let state = build_tsi(&config.map, REFERENCE_DEGREE)?;
        let canonical = char_poly_roots(state.amplitudes())?;
        let perm = reference_permutation(&canonical, &config.betas_polar);
        let betas: Vec<Complex64> = perm.iter().map(|&i| canonical[i]).collect();
        let alphas = alphas_from_roots(&betas, config.transmittance)?;
        for (k, (alpha, &(mag, phase))) in alphas.iter().zip(&config.alphas_polar).enumerate() {
            let d_mag = (alpha.norm() - mag).abs();
            let d_phase = wrap_angle(alpha.arg() - phase).abs();
            worst = worst.max(d_mag).max(d_phase);
            if d_mag > ALPHA_TOL || d_phase > ALPHA_TOL {
                passed = false;
                details.push_str(&format!(
                    "{} alpha_{}: off by ({:.1e},{:.1e}); ",
                    config.label,
                    k + 1,
                    d_mag,
                    d_phase
                ));
            }
        }
    }
    if passed {
        details = format!("all 24 alphas within {ALPHA_TOL:.0e} (worst delta {worst:.1e})");
    }
    Ok(CriterionOutcome {
        id: 2,
        name: CRITERION_NAMES[1],
        passed,
        details,
    })
}

const PROB_TOL: f64 = 5e-4;

fn criterion_success_probabilities() -> Result<CriterionOutcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    let mut ratios = Vec::new();
    for config in reference_configs() {
        let plan = reference_plan(&config)?;
        let delta = (plan.success_prob - config.success_prob).abs();
        ratios.push(plan.success_prob / config.success_prob);
        if delta > PROB_TOL {
            passed = false;
        }
        parts.push(format!(
            "{}: {:.6} vs {:.4} (delta {:.1e})",
            config.label, plan.success_prob, config.success_prob, delta
        ));
    }
    let mut details = parts.join("; ");
    if !passed {
        let mean: f64 = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let spread = ratios
            .iter()
            .map(|r| (r / mean - 1.0).abs())
            .fold(0.0, f64::max);
        details.push_str(&format!(
            "; normalization-convention flag: ratios to reference {:?}, common ratio {:.4} (spread {:.1}%)",
            ratios.iter().map(|r| (r * 1e4).round() / 1e4).collect::<Vec<_>>(),
            mean,
            spread * 100.0
        ));
    }
    Ok(CriterionOutcome {
        id: 3,
        name: CRITERION_NAMES[2],
        passed,
        details,
    })
}

const T_STAR_TOL: f64 = 0.02;

/// The caption transmittances are not the optima of the zero-count success
/// probability computed here (any scale convention places the optima near
/// 0.83-0.85, below every caption value), so this criterion reports the
/// computed optima and fails honestly.
fn criterion_optimal_transmittance() -> Result<CriterionOutcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    let mut t_stars = Vec::new();
    for config in reference_configs() {
        let state = build_tsi(&config.map, REFERENCE_DEGREE)?;
        let canonical = char_poly_roots(state.amplitudes())?;
        let perm = reference_permutation(&canonical, &config.betas_polar);
        let opt = optimize_transmittance(
            state.amplitudes(),
            &RootOrder::Permutation(perm),
            (0.78, 0.96),
            24,
            1e-4,
        )?;
        let delta = (opt.t_star - config.transmittance).abs();
        if delta > T_STAR_TOL {
            passed = false;
        }
        parts.push(format!(
            "{}: T*={:.4} vs caption {:.3} (delta {:.3})",
            config.label, opt.t_star, config.transmittance, delta
        ));
        t_stars.push(opt.t_star);
    }
    let mean = t_stars.iter().sum::<f64>() / t_stars.len() as f64;
    let mean_delta = (mean - REFERENCE_MEAN_OPTIMAL_T).abs();
    if mean_delta > T_STAR_TOL {
        passed = false;
    }
    parts.push(format!(
        "mean T* = {:.4} vs {} (delta {:.3})",
        mean, REFERENCE_MEAN_OPTIMAL_T, mean_delta
    ));
    Ok(CriterionOutcome {
        id: 4,
        name: CRITERION_NAMES[3],
        passed,
        details: parts.join("; "),
    })
}

const FIDELITY_TOL: f64 = 2e-3;

/// The reference pairs three eta values with two configurations per map
/// family, so each quoted value is accepted when either configuration of the
/// family matches. The quoted values are far above what the first-order
/// branch expansion yields for these plans (see module docs), so this
/// criterion reports honest failures with both computed values.
fn criterion_fidelities() -> Result<CriterionOutcome> {
    let configs = reference_configs();
    let plans: Vec<EngineeringPlan> = configs
        .iter()
        .map(reference_plan)
        .collect::<Result<_>>()?;
    let mut passed = true;
    let mut parts = Vec::new();
    for (family, members, reference) in [
        ("doubling", [0usize, 1], REFERENCE_FIDELITIES_DOUBLING),
        ("logistic", [2, 3], REFERENCE_FIDELITIES_LOGISTIC),
    ] {
        for (eta, f_ref) in reference {
            let computed: Vec<f64> = members
                .iter()
                .map(|&i| Ok(fidelity(&plans[i], eta, None)?.fidelity))
                .collect::<Result<_>>()?;
            let best_delta = computed
                .iter()
                .map(|f| (f - f_ref).abs())
                .fold(f64::INFINITY, f64::min);
            if best_delta > FIDELITY_TOL {
                passed = false;
            }
            parts.push(format!(
                "{family} eta={eta}: computed ({:.4}, {:.4}) vs {f_ref} (best delta {:.1e})",
                computed[0], computed[1], best_delta
            ));
        }
    }
    Ok(CriterionOutcome {
        id: 5,
        name: CRITERION_NAMES[4],
        passed,
        details: parts.join("; "),
    })
}

/// Checks Q < 0 for N <= 9 and Q > 0 for N >= 15 in every configuration.
/// Brute-force enumeration puts the actual sign change at N = 7..10
/// depending on the configuration, so the first half fails for three of the
/// four; the details list the observed transition points.
fn criterion_mandel_transition() -> Result<CriterionOutcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for config in reference_configs() {
        let reports = stats_sweep(&config.map, 50)?;
        let mut low_ok = true;
        let mut high_ok = true;
        let mut first_positive = None;
        for (n, report) in reports.iter().enumerate().skip(1) {
            let q = report.mandel_q.expect("mean > 0 for N >= 1");
            if q > 0.0 && first_positive.is_none() {
                first_positive = Some(n);
            }
            if n <= 9 && q >= 0.0 {
                low_ok = false;
            }
            if n >= 15 && q <= 0.0 {
                high_ok = false;
            }
        }
        if !(low_ok && high_ok) {
            passed = false;
        }
        parts.push(format!(
            "{}: Q<0 through N=9 {}, Q>0 from N=15 {}, first Q>0 at N={}",
            config.label,
            if low_ok { "ok" } else { "VIOLATED" },
            if high_ok { "ok" } else { "VIOLATED" },
            first_positive.map_or("none".to_string(), |n| n.to_string())
        ));
    }
    Ok(CriterionOutcome {
        id: 6,
        name: CRITERION_NAMES[5],
        passed,
        details: parts.join("; "),
    })
}

fn criterion_period_structure() -> Result<CriterionOutcome> {
    let tol = 1e-9;
    let mut passed = true;
    let mut parts = Vec::new();

    // periodic cases: doubling 0.3 (exact rational orbit, N = 50) and
    // logistic 3.49 (f64, orbit long enough for the transient to decay)
    let exact = doubling_orbit_exact(3, 10, 50)?;
    match detect_eventual_period(&exact, tol, 50) {
        Some((t, 4)) => parts.push(format!("doubling 0.3 exact: period 4, transient {t}")),
        other => {
            passed = false;
            parts.push(format!("doubling 0.3 exact: expected period 4, got {other:?}"));
        }
    }
    let logistic = MapSpec::logistic(3.49, 0.2)?.orbit(120)?;
    match detect_eventual_period(&logistic, tol, 50) {
        Some((t, 4)) => parts.push(format!("logistic 3.49: period 4, transient {t}")),
        other => {
            passed = false;
            parts.push(format!("logistic 3.49: expected period 4, got {other:?}"));
        }
    }

    // chaotic cases: no period up to 50 over N = 50. The doubling case runs
    // in the exact rational mode: the f64 mantissa of 0.29711 happens to
    // exhaust at n = 48, collapsing the plain orbit to the fixed point 0
    // (see the orbit module docs), which would be a precision artifact, not
    // map dynamics.
    let exact_chaotic = doubling_orbit_exact(29711, 100_000, 50)?;
    match detect_eventual_period(&exact_chaotic, tol, 50) {
        None => parts.push("doubling 0.29711 exact: no period <= 50".to_string()),
        Some(found) => {
            passed = false;
            parts.push(format!("doubling 0.29711 exact: unexpected period {found:?}"));
        }
    }
    let chaotic = MapSpec::logistic(4.0, 0.2)?.orbit(50)?;
    match detect_eventual_period(&chaotic, tol, 50) {
        None => parts.push("logistic mu=4: no period <= 50".to_string()),
        Some(found) => {
            passed = false;
            parts.push(format!("logistic mu=4: unexpected period {found:?}"));
        }
    }
    Ok(CriterionOutcome {
        id: 7,
        name: CRITERION_NAMES[6],
        passed,
        details: parts.join("; "),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_permutation_matches_each_table() {
        for config in reference_configs() {
            let state = build_tsi(&config.map, REFERENCE_DEGREE).unwrap();
            let betas = char_poly_roots(state.amplitudes()).unwrap();
            let perm = reference_permutation(&betas, &config.betas_polar);
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, vec![0, 1, 2, 3, 4], "{}", config.label);
            for (&(mag, phase), &i) in config.betas_polar.iter().zip(&perm) {
                let z = betas[i];
                assert!((z.norm() - mag).abs() < 2e-3, "{}: {z}", config.label);
                assert!(wrap_angle(z.arg() - phase).abs() < 2e-3, "{}: {z}", config.label);
            }
        }
    }

    #[test]
    fn criteria_one_through_three_pass() {
        assert!(criterion_roots().unwrap().passed);
        assert!(criterion_alphas().unwrap().passed);
        assert!(criterion_success_probabilities().unwrap().passed);
    }

    #[test]
    fn criterion_seven_passes() {
        let outcome = criterion_period_structure().unwrap();
        assert!(outcome.passed, "{}", outcome.details);
    }

    #[test]
    fn known_discrepant_criteria_report_diagnostics() {
        let outcome = criterion_mandel_transition().unwrap();
        assert!(!outcome.passed);
        assert!(outcome.details.contains("first Q>0 at N="));

        let outcome = criterion_fidelities().unwrap();
        assert!(!outcome.passed);
        assert!(outcome.details.contains("best delta"));
    }

    #[test]
    fn run_all_reports_seven_outcomes() {
        let outcomes = run_reference_criteria().unwrap();
        assert_eq!(outcomes.len(), 7);
        for (i, outcome) in outcomes.iter().enumerate() {
            assert_eq!(outcome.id, i + 1);
            assert!(!outcome.details.is_empty());
        }
    }
}
