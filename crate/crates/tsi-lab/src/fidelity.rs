//! Detector-inefficiency model: single-absorption loss branches of the
//! conditional chain and the resulting generation fidelity.
//!
//! With detector efficiency `eta`, a run accepted on all-zero counts may
//! still have absorbed one photon unseen at detector `k`. That branch is the
//! chain with the k-th creation operator replaced by identity, prefactor
//! `R^{N-1}`, and weight `1 - eta` (the ground-state expectation of the
//! environment pair); distinct detectors excite orthogonal environment
//! states, so branch weights never interfere. Multi-absorption terms are of
//! order `(1-eta)^2` and dropped. With `Psi = chi_0 / |chi_0|`:
//!
//! ```text
//! F(eta) = [ |chi_0|^2 + (1-eta) sum_k |<Psi|chi_k>|^2 ]
//!        / [ |chi_0|^2 + (1-eta) sum_k  |chi_k|^2      ]
//! ```
//!
//! which gives F(1) = 1 exactly and F in [0, 1] by Cauchy-Schwarz.

use crate::engineering::EngineeringPlan;
use crate::fock_engine::{apply_chain_converged, overlap};
use crate::par;
use crate::tsi_state::FockVector;
use crate::{Error, Result};

/// Detector efficiency for the first-order loss expansion. The expansion
/// keeps single-absorption branches only, which the source analysis trusts
/// for `eta >= 0.9`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel {
    pub eta: f64,
}

impl LossModel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::Domain(format!(
                "detector efficiency must lie in (0, 1], got {eta}"
            )));
        }
        Ok(LossModel { eta })
    }

    /// True when eta sits inside the regime the first-order expansion is
    /// meant for. Lower eta still computes, with degraded accuracy.
    pub fn in_high_efficiency_regime(&self) -> bool {
        self.eta >= 0.9
    }
}

/// Fidelity of one plan at one efficiency, with the branch diagnostics.
/// Index 0 is the no-absorption branch; `branch_overlaps[0]` equals
/// `branch_norms[0]` by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    pub eta: f64,
    pub fidelity: f64,
    /// Squared norms `|chi_k|^2`, k = 0..=N.
    pub branch_norms: Vec<f64>,
    /// Squared overlaps `|<Psi|chi_k>|^2`, k = 0..=N.
    pub branch_overlaps: Vec<f64>,
}

impl FidelityReport {
    /// Analytic `dF/d(1-eta)` at `eta = 1`:
    /// `(sum_k overlaps - sum_k norms) / |chi_0|^2` over the loss branches.
    pub fn first_order_slope(&self) -> f64 {
        let s_o: f64 = self.branch_overlaps[1..].iter().sum();
        let s_n: f64 = self.branch_norms[1..].iter().sum();
        (s_o - s_n) / self.branch_norms[0]
    }
}

/// The `N + 1` unnormalized branch states: index 0 the full chain, index k
/// the chain with the k-th creation operator skipped (prefactor `R^{N-1}`).
pub fn loss_branches(plan: &EngineeringPlan, cutoff_override: Option<usize>) -> Result<Vec<FockVector>> {
    let n = plan.n_steps();
    let base = plan.chain_spec();
    let mut branches = Vec::with_capacity(n + 1);
    let (chi0, cutoff) = apply_chain_converged(&base, cutoff_override)?;
    branches.push(chi0);
    for k in 1..=n {
        let spec = base.clone().with_skip(k)?;
        // the converged cutoff of the full chain covers the skip branches,
        // which hold strictly fewer photons
        let (chik, _) = apply_chain_converged(&spec, Some(cutoff))?;
        branches.push(chik);
    }
    Ok(branches)
}

/// Fidelity of the loss-degraded output against the ideal chain output.
pub fn fidelity(plan: &EngineeringPlan, eta: f64, cutoff_override: Option<usize>) -> Result<FidelityReport> {
    let model = LossModel::new(eta)?;
    let branches = loss_branches(plan, cutoff_override)?;
    Ok(report_from_branches(&branches, model.eta))
}

fn report_from_branches(branches: &[FockVector], eta: f64) -> FidelityReport {
    let a0 = branches[0].norm2();
    let psi = branches[0]
        .normalized()
        .expect("chain output has positive norm");
    let branch_norms: Vec<f64> = branches.iter().map(FockVector::norm2).collect();
    let branch_overlaps: Vec<f64> = branches
        .iter()
        .map(|chi| overlap(&psi, chi).norm_sqr())
        .collect();
    let u = 1.0 - eta;
    let s_o: f64 = branch_overlaps[1..].iter().sum();
    let s_n: f64 = branch_norms[1..].iter().sum();
    let fidelity = (a0 + u * s_o) / (a0 + u * s_n);
    FidelityReport {
        eta,
        fidelity,
        branch_norms,
        branch_overlaps,
    }
}

/// One report per eta, sharing a single branch computation (parallel over
/// the eta grid when the `parallel` feature is on).
pub fn fidelity_sweep(
    plan: &EngineeringPlan,
    etas: &[f64],
    cutoff_override: Option<usize>,
) -> Result<Vec<FidelityReport>> {
    let branches = validated_branches(plan, etas, cutoff_override)?;
    Ok(par::map_indexed(etas.len(), |i| {
        report_from_branches(&branches, etas[i])
    }))
}

/// Sequential twin of [`fidelity_sweep`].
pub fn fidelity_sweep_seq(
    plan: &EngineeringPlan,
    etas: &[f64],
    cutoff_override: Option<usize>,
) -> Result<Vec<FidelityReport>> {
    let branches = validated_branches(plan, etas, cutoff_override)?;
    Ok(par::map_indexed_seq(etas.len(), |i| {
        report_from_branches(&branches, etas[i])
    }))
}

fn validated_branches(
    plan: &EngineeringPlan,
    etas: &[f64],
    cutoff_override: Option<usize>,
) -> Result<Vec<FockVector>> {
    for &eta in etas {
        LossModel::new(eta)?;
    }
    loss_branches(plan, cutoff_override)
}
