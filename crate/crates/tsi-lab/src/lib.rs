//! Truncated Fock states whose amplitudes are orbits of iterated maps.
//!
//! The state family under study is a finite superposition
//! `|psi> = sum_{n=0}^{N} C_n |n>` where each coefficient is obtained from the
//! previous one by iterating a generating map (doubling, logistic, quadratic,
//! sine or exponential). This crate builds such states, computes their photon
//! statistics (parity, number moments, Mandel Q, g2(0), quadrature variances,
//! Husimi Q function), synthesizes the conditional beam-splitter chain that
//! generates them (characteristic-polynomial roots, displacement parameters,
//! success probability, transmittance optimization), and evaluates the
//! generation fidelity under inefficient detectors.
//!
//! Modules follow the pipeline order:
//!
//! * [`map_orbits`] — map catalogue and orbit iteration,
//! * [`tsi_state`] — normalized truncated state vectors,
//! * [`photon_stats`] — the observable suite for one state (or an N-sweep),
//! * [`fock_engine`] — truncated operator algebra (displacements, creation,
//!   attenuation, conditional chains),
//! * [`engineering`] — generation plans: roots, alphas, success probability,
//!   transmittance optimization,
//! * [`fidelity`] — single-absorption loss branches and fidelity under
//!   detector efficiency eta,
//! * [`validation`] — built-in reproduction checks against the reference
//!   tables for the four standard configurations.
//!
//! Grid and sweep computations are data-parallel via rayon when the default
//! `parallel` feature is enabled; `*_seq` variants always run sequentially
//! and results are identical either way.

pub mod engineering;
pub mod fidelity;
pub mod fock_engine;
pub mod map_orbits;
mod math;
mod par;
pub mod photon_stats;
pub mod tsi_state;
pub mod validation;

pub use engineering::{EngineeringPlan, RootOrder, TransmittanceOptimum};
pub use fidelity::{FidelityReport, LossModel};
pub use fock_engine::{ChainSpec, OperatorMatrix};
pub use map_orbits::{MapKind, MapSpec, Orbit};
pub use photon_stats::{HusimiGrid, StatsReport};
pub use tsi_state::FockVector;

use num_complex::Complex64;

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input violated a precondition of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An all-zero vector cannot be normalized.
    #[error("cannot normalize an all-zero amplitude vector")]
    ZeroNorm,

    /// The requested statistic is undefined for this state.
    #[error("{0} is undefined for a state with zero mean photon number")]
    UndefinedStatistic(&'static str),

    /// A chain computation pushed significant amplitude past half the cutoff.
    #[error(
        "cutoff {cutoff} insufficient: relative tail mass {tail_mass:.3e} above \
         index {half} after chain step {step}"
    )]
    CutoffInsufficient {
        cutoff: usize,
        half: usize,
        step: usize,
        tail_mass: f64,
    },

    /// The leading polynomial coefficient vanishes; the caller must reduce N.
    #[error("leading coefficient is zero: polynomial degree is degenerate")]
    DegenerateDegree,

    /// The simultaneous root iteration did not converge.
    #[error("root finder failed to converge: {details}")]
    RootFinder { details: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn complex_is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
