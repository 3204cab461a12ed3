//! Semiclassical analysis of the BCS functional on a periodic lattice.

mod family;
mod lattice;
mod pairing;
mod report;

pub use family::{negative_part_trace_difference, semiclassical_prediction, BdgFamily};
pub use lattice::{build_bdg_operator, BdgLattice, Component, LatticeSpec, MAX_BLOCK};
pub use pairing::{
    alpha_delta_block, density_block, kinetic_trace, operator_h1_norm, pairing_ansatz, relative_profiles,
    trial_state_energy, v_weighted_norm, FiberOperator, LatticeOperator, RelativeProfiles, TrialEnergy,
};
pub use report::{semiclassical_report, SemiclassicalReport};
