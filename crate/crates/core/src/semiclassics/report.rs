use super::family::{negative_part_trace_difference, semiclassical_prediction, BdgFamily};
use super::lattice::LatticeSpec;
use super::pairing::{alpha_delta_block, operator_h1_norm, pairing_ansatz, trial_state_energy, TrialEnergy};
use crate::coupling::coefficient_integrals;
use crate::gp::{ExternalFields, PeriodicField};
use crate::twobody::BoundState;
use crate::{Execution, Result};
use serde::Serialize;

/// Trace, pairing-block and (optionally) trial-energy comparison at one `h`.
#[derive(Debug, Clone, Serialize)]
pub struct SemiclassicalReport {
    pub h: f64,
    pub n_modes: usize,
    pub theta_samples: usize,
    pub trace: f64,
    pub prediction: f64,
    pub e1: f64,
    pub e2: f64,
    /// `|trace - prediction|`.
    pub residual: f64,
    /// `residual · h^{d-3}`, which should scale like `h³`.
    pub scaled_residual: f64,
    pub particle_hole_defect: f64,
    pub smallest_abs_eigenvalue: f64,
    /// `‖α_Δ - α_ans‖_{H¹}`.
    pub pairing_residual: f64,
    /// `pairing_residual · h^{(d-3)/2}`, which should scale like `h^{3/2}`.
    pub scaled_pairing_residual: f64,
    pub trial: Option<TrialEnergy>,
}

pub fn semiclassical_report(
    psi: &PeriodicField,
    fields: &ExternalFields,
    bs: &BoundState,
    spec: &LatticeSpec,
    with_trial: bool,
    exec: Execution,
) -> Result<SemiclassicalReport> {
    let d = bs.dim() as i32;
    let h = spec.h;
    let family = BdgFamily::build(psi, fields, bs, spec, exec)?;
    let coeffs = coefficient_integrals(bs, spec.mu)?;
    let (e1, e2) = semiclassical_prediction(psi, fields, &coeffs)?;
    let trace = negative_part_trace_difference(&family);
    let prediction = h.powi(-d) * (-h * h * e1 - h.powi(4) * e2);
    let residual = (trace - prediction).abs();
    let alpha = alpha_delta_block(&family);
    let rest = alpha.difference(&pairing_ansatz(&family))?;
    let pairing_residual = operator_h1_norm(&rest).sqrt();
    let trial = if with_trial { Some(trial_state_energy(&family, psi, bs)?) } else { None };
    Ok(SemiclassicalReport {
        h,
        n_modes: spec.modes(),
        theta_samples: spec.theta_samples,
        trace,
        prediction,
        e1,
        e2,
        residual,
        scaled_residual: residual * h.powi(d - 3),
        particle_hole_defect: family.particle_hole_defect(),
        smallest_abs_eigenvalue: family.smallest_abs_eigenvalue(),
        pairing_residual,
        scaled_pairing_residual: pairing_residual * h.powf((d - 3) as f64 / 2.0),
        trial,
    })
}
